#!/usr/bin/env python
'''Independent re-check of a schedule against every process constraint. Recomputes everything from
stage starts and power arrays, without the model that produced them'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import dataclass, field
import logging
import numpy as np

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import DimensionMismatch
from grid.time_grid import TimeGrid
from plant.plant_specs import PlantInstance, FurnaceSpec
from plant.evaluators import stageEnergyRequirement, reheatEnergy, bufferTrace, ladleTrace, holdingPower, lossStages
from plant.schedule import Schedule, intervalMeans

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

FAMILIES = ['StageOrder', 'StageDuration', 'EnergyCompletion', 'PowerOutsideStage', 'PowerBounds',
            'SemiContinuity', 'PowerUnitCap', 'GlobalCap', 'Ramp', 'SplashOverflow', 'BufferBounds',
            'BufferBalance', 'HoldingPower', 'Baseline', 'LadleCount', 'Reheat']

#----------------------------------------------


@dataclass(frozen=True)
class Violation:
    family: str
    indices: Tuple
    slack: float

    def toDict(self) -> dict:
        return {'family':self.family, 'indices':list(self.indices), 'slack':float(self.slack)}


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)
    tol: float = 1e-6

    @property
    def ok(self) -> bool:
        return len(self.violations)==0

    def families(self) -> List[str]:
        return sorted(set([v.family for v in self.violations]))

    def count(self, family:str) -> int:
        return sum([v.family==family for v in self.violations])

    def toDict(self) -> dict:
        return {'ok':self.ok, 'tol':self.tol, 'violations':[v.toDict() for v in self.violations]}


class scheduleChecker:
    '''runs every constraint family on one schedule'''

    def __init__(self, instance:PlantInstance, grid:TimeGrid, schedule:Schedule, tol:float):
        self.instance = instance
        self.grid = grid
        self.s = schedule
        self.tol = tol
        self.report = ValidationReport(tol=tol)
        self.checkDimensions()
        self.fids = [fid for cid in schedule.lines for fid in instance.line(cid).furnaces]
        self.intervals = dict([(fid, self.stageIntervals(instance.furnace(fid))) for fid in self.fids])

    def add(self, family:str, indices:Tuple, slack:float) -> None:
        self.report.violations.append(Violation(family, indices, float(slack)))

    def checkDimensions(self) -> None:
        s = self.s
        if s.horizon_steps!=self.grid.K or s.settlement_steps!=self.grid.Nq or s.step_seconds!=self.grid.step_seconds:
            raise DimensionMismatch(f'Schedule grid ({s.step_seconds} s x {s.horizon_steps}, Nq {s.settlement_steps}) '
                                    f'does not match ({self.grid.step_seconds} s x {self.grid.K}, Nq {self.grid.Nq})')
        for cid in s.lines:
            for f in self.instance.lineFurnaces(cid):
                for m, j in f.stageKeys():
                    key = (f.id, m, j)
                    if not key in s.start_step or not key in s.power_kw:
                        raise DimensionMismatch(f'Schedule has no entry for furnace {f.id} cycle {m} stage {j}')
                    if len(s.power_kw[key])!=self.grid.K:
                        raise DimensionMismatch(f'Power of {key} has {len(s.power_kw[key])} samples, expected {self.grid.K}')
            for attr in ['buffer_m3', 'holding_power_kw']:
                if len(getattr(s, attr)[cid])!=self.grid.K:
                    raise DimensionMismatch(f'{attr} of line {cid} has the wrong length')
            if len(s.baseline_kw[cid])!=self.grid.n_settlements:
                raise DimensionMismatch(f'Baseline of line {cid} has the wrong length')

    def stageIntervals(self, f:FurnaceSpec) -> Dict[Tuple[int, int], Tuple[Optional[int], Optional[int]]]:
        '''(start, end) steps of every stage. end is the successor's start, the furnace end step for
        the last stage, or None when the successor is deferred'''
        keys = f.stageKeys()
        out = {}
        for i, (m, j) in enumerate(keys):
            start = self.s.start_step[(f.id, m, j)]
            if i+1<len(keys):
                end = self.s.start_step[(f.id,)+keys[i+1]]
            else:
                end = self.s.end_step.get(f.id)
            out[(m, j)] = (start, end)
        return out

    def activeMask(self, start:Optional[int], end:Optional[int]) -> np.ndarray:
        K = self.grid.K
        a = np.zeros(K, dtype=bool)
        if start is None:
            return a
        stop = K+1 if end is None else min(end, K+1)
        a[start-1:stop-1] = True
        return a

    #-------------------------------------------

    def run(self) -> ValidationReport:
        for fid in self.fids:
            f = self.instance.furnace(fid)
            self.checkOrder(f)
            self.checkStages(f)
        self.checkCaps()
        for cid in self.s.lines:
            self.checkLine(cid)
        logger.debug(f'Validated {self.s.label}: {len(self.report.violations)} violations')
        return self.report

    def checkOrder(self, f:FurnaceSpec) -> None:
        prev = 0
        deferred = False
        for m, j in f.stageKeys():
            s = self.s.start_step[(f.id, m, j)]
            if s is None:
                deferred = True
                continue
            if deferred:
                self.add('StageOrder', (f.id, m, j), -1)
            elif s<=prev:
                self.add('StageOrder', (f.id, m, j), s-prev-1)
            prev = s

    def checkStages(self, f:FurnaceSpec) -> None:
        dt = self.grid.step_seconds
        dth = self.grid.step_hours
        tol = self.tol
        durations = {}
        for (m, j), (start, end) in self.intervals[f.id].items():
            if start is not None and end is not None:
                durations[(m, j)] = (end-start)*dt
        for (m, j), (start, end) in self.intervals[f.id].items():
            st = f.stage(m, j)
            key = (f.id, m, j)
            p = np.asarray(self.s.power_kw[key], dtype=float)
            a = self.activeMask(start, end)
            # power outside the stage
            for k in np.where((~a) & (np.abs(p)>tol))[0]:
                self.add('PowerOutsideStage', key+(int(k)+1,), -abs(p[k]))
            # power bounds inside the stage
            for k in np.where(a)[0]:
                if p[k]>st.p_max_kw+tol or p[k]<-tol:
                    self.add('PowerBounds', key+(int(k)+1,), min(st.p_max_kw-p[k], p[k]))
                elif p[k]<st.p_min_kw-tol:
                    if not st.semi_continuous:
                        self.add('PowerBounds', key+(int(k)+1,), p[k]-st.p_min_kw)
                    elif p[k]>tol:
                        self.add('SemiContinuity', key+(int(k)+1,), p[k]-st.p_min_kw)
            energy = float(np.sum(p[a])*dth)
            # minimum duration of time stages
            if (m, j) in durations and not st.isEnergy and durations[(m, j)]<st.min_duration_s-tol:
                self.add('StageDuration', key, durations[(m, j)]-st.min_duration_s)
            # energy with heat losses
            if st.isEnergy and end is not None:
                need = lossStages(f, m, j)
                if all([(m, i) in durations for i in need]):
                    req = stageEnergyRequirement(f, m, j, dict([(i, durations[(m, i)]) for i in need]))
                    if energy<req-tol:
                        self.add('EnergyCompletion', key, energy-req)
            # reheat of long holds
            if st.reheat_tau_s is not None and (m, j) in durations:
                req = reheatEnergy(f, m, j, durations[(m, j)])
                if energy<req-tol:
                    self.add('Reheat', key, energy-req)
            if st.ramp is not None:
                self.checkRamp(key, st, p, a)
            if st.charge_melt is not None:
                self.checkSplash(key, st, p, a)

    def checkRamp(self, key:Tuple, st, p:np.ndarray, a:np.ndarray) -> None:
        '''p <= P0 + r*dt*(active steps so far)'''
        limit = st.ramp.initial_power_kw+st.ramp.rate_limit_kw_per_s*self.grid.step_seconds*np.cumsum(a)
        for k in np.where(a & (p>limit+self.tol))[0]:
            self.add('Ramp', key+(int(k)+1,), limit[k]-p[k])

    def checkSplash(self, key:Tuple, st, p:np.ndarray, a:np.ndarray) -> None:
        '''cumulative energy against cumulative active time stays between the overflow and splash lines'''
        cm = st.charge_melt
        dth = self.grid.step_hours
        ecum = np.cumsum(np.where(a, p, 0))*dth
        acum = np.cumsum(a)
        hi = cm.splash_energy_kwh+cm.splash_rate_kw*dth*acum
        lo = cm.overflow_rate_kw*dth*acum-cm.overflow_rate_kw*cm.overflow_time_s/3600
        for k in np.where(a)[0]:
            if ecum[k]>hi[k]+self.tol:
                self.add('SplashOverflow', key+(int(k)+1, 'splash'), hi[k]-ecum[k])
            if ecum[k]<lo[k]-self.tol:
                self.add('SplashOverflow', key+(int(k)+1, 'overflow'), ecum[k]-lo[k])

    def checkCaps(self) -> None:
        K = self.grid.K
        units = {}
        total = np.zeros(K)
        for fid in self.fids:
            f = self.instance.furnace(fid)
            pf = sum([np.asarray(self.s.power_kw[(fid, m, j)], dtype=float) for m, j in f.stageKeys()])
            units[f.power_unit_id] = units.get(f.power_unit_id, np.zeros(K))+pf
            total = total+pf
        for l, pl in sorted(units.items()):
            cap = self.instance.power_units[l]
            for k in np.where(pl>cap+self.tol)[0]:
                self.add('PowerUnitCap', (l, int(k)+1), cap-pl[k])
        cap = self.instance.global_p_max_kw
        for k in np.where(total>cap+self.tol)[0]:
            self.add('GlobalCap', (int(k)+1,), cap-total[k])

    def checkLine(self, cid:str) -> None:
        line = self.instance.line(cid)
        tol = self.tol
        taps = dict([(fid, [self.s.start_step[(fid, m, j)] for m, j in self.instance.furnace(fid).tapKeys()])
                     for fid in line.furnaces])
        v = bufferTrace(self.instance, cid, self.grid, taps)
        lo = line.vmin_m3+line.safety_margin_m3+self.s.buffer_margin_m3.get(cid, 0)
        for k in np.where(v<lo-tol)[0]:
            self.add('BufferBounds', (cid, int(k)+1, 'min'), v[k]-lo)
        for k in np.where(v>line.vmax_m3+tol)[0]:
            self.add('BufferBounds', (cid, int(k)+1, 'max'), line.vmax_m3-v[k])
        stored = np.asarray(self.s.buffer_m3[cid], dtype=float)
        for k in np.where(np.abs(stored-v)>tol)[0]:
            self.add('BufferBalance', (cid, int(k)+1), v[k]-stored[k])
        hp = holdingPower(line, stored)
        heldStored = np.asarray(self.s.holding_power_kw[cid], dtype=float)
        for k in np.where(np.abs(heldStored-hp)>tol)[0]:
            self.add('HoldingPower', (cid, int(k)+1), hp[k]-heldStored[k])
        metered = sum([np.asarray(self.s.power_kw[(fid, m, j)], dtype=float)
                       for fid in line.furnaces for m, j in self.instance.furnace(fid).stageKeys()])
        if self.s.baseline_includes_holding:
            metered = metered+heldStored
        base = intervalMeans(metered, self.grid.Nq)
        stored = np.asarray(self.s.baseline_kw[cid], dtype=float)
        for q in np.where(np.abs(stored-base)>tol)[0]:
            self.add('Baseline', (cid, int(q)+1), base[q]-stored[q])
        n = ladleTrace(self.instance, cid, self.grid, taps)
        for k in np.where(n>line.ladle_limit)[0]:
            self.add('LadleCount', (cid, int(k)+1), line.ladle_limit-n[k])


def validateSchedule(instance:PlantInstance, grid:TimeGrid, schedule:Schedule, tol:Optional[float]=None) -> ValidationReport:
    '''every violated constraint of the schedule as (family, indices, slack). an empty list is a pass'''
    if tol is None:
        tol = cfg.validation.tol
    return scheduleChecker(instance, grid, schedule, tol).run()
