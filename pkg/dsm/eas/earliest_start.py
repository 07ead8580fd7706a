#!/usr/bin/env python
'''A feasible schedule of one line built without a solver: every stage starts as early as the caps,
the buffer and the ladles allow and runs at the highest power its bounds allow. Used as the
incumbent of the day-ahead solve'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
import logging
import numpy as np

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.val_tools import ceilSteps
from grid.time_grid import TimeGrid
from plant.plant_specs import PlantInstance, FurnaceSpec, StageSpec
from plant.evaluators import stageEnergyRequirement, reheatEnergy, bufferTrace, ladleTrace, lossStages
from plant.schedule import Schedule, assembleSchedule

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

# kWh a stage may fall short of its requirement through float sums
SHORT = 1e-9

#----------------------------------------------


class earliestStartPlanner:
    '''plans the furnaces of line cid one after the other. each furnace sees the power the furnaces
    before it already use and the taps they already make'''

    def __init__(self, instance:PlantInstance, cid:str, grid:TimeGrid):
        self.instance = instance
        self.cid = cid
        self.line = instance.line(cid)
        self.grid = grid
        self.K = grid.K
        self.furnaces = instance.lineFurnaces(cid)
        self.lineUse = np.zeros(grid.K+1)
        self.unitUse = dict([(f.power_unit_id, np.zeros(grid.K+1)) for f in self.furnaces])
        self.starts:Dict[Tuple[str, int, int], Optional[int]] = {}
        self.ends:Dict[str, Optional[int]] = {}
        self.power:Dict[Tuple[str, int, int], np.ndarray] = {}
        self.taps:Dict[str, List[int]] = dict([(f.id, []) for f in self.furnaces])

    #-------------------------------------------
    # power

    def capLeft(self, f:FurnaceSpec, k:int) -> float:
        unit = self.instance.unitCap(f.power_unit_id, self.cid)-self.unitUse[f.power_unit_id][k]
        return max(0, min(unit, self.instance.lineCap(self.cid)-self.lineUse[k]))

    def use(self, f:FurnaceSpec, p:np.ndarray, sign:float=1) -> None:
        self.lineUse[1:] += sign*p
        self.unitUse[f.power_unit_id][1:] += sign*p

    def requirement(self, f:FurnaceSpec, m:int, j:int, steps:int, durations:Dict[int, float]) -> float:
        '''energy the stage needs when it lasts steps grid steps'''
        st = f.stage(m, j)
        d = dict(durations)
        d[j] = steps*self.grid.step_seconds
        if st.isEnergy:
            return stageEnergyRequirement(f, m, j, dict([(i, d[i]) for i in lossStages(f, m, j)]))
        return reheatEnergy(f, m, j, d[j])

    def fillStage(self, f:FurnaceSpec, m:int, j:int, start:int, durations:Dict[int, float],
                  stop:Optional[int]=None) -> Optional[Tuple[np.ndarray, int]]:
        '''power of the stage from start, and its end step. with stop=None the stage ends as soon as its
        energy and duration are met, otherwise it is held until stop. None if the bounds cannot be met'''
        st = f.stage(m, j)
        dth = self.grid.step_hours
        p = np.zeros(self.K)
        minN = 1 if st.isEnergy else max(1, ceilSteps(st.min_duration_s, self.grid.step_seconds))
        e = 0.
        ons = 0
        i = 0
        k = start
        while True:
            if stop is None or k==stop:
                if i>=minN and e>=self.requirement(f, m, j, i, durations)-SHORT:
                    return p, k
                if k==stop:
                    return None
            if k>self.K:
                return None
            i += 1
            hi, lo = self.bounds(f, st, k, i, ons, e)
            if lo>hi:
                return None
            target = self.requirement(f, m, j, i if stop is None else stop-start, durations)
            want = hi if e<target-SHORT else lo
            if st.semi_continuous and 0<want<st.p_min_kw:
                want = st.p_min_kw if hi>=st.p_min_kw else lo
            p[k-1] = want
            e += want*dth
            ons += int(want>0)
            k += 1

    def bounds(self, f:FurnaceSpec, st:StageSpec, k:int, i:int, ons:int, e:float) -> Tuple[float, float]:
        '''highest and lowest power of the i-th active step of the stage at step k'''
        dth = self.grid.step_hours
        hi = min(st.p_max_kw, self.capLeft(f, k))
        lo = 0. if st.semi_continuous else st.p_min_kw
        if st.ramp is not None:
            count = ons+1 if st.semi_continuous else i
            hi = min(hi, st.ramp.initial_power_kw+st.ramp.rate_limit_kw_per_s*self.grid.step_seconds*count)
        if st.charge_melt is not None:
            cm = st.charge_melt
            hi = min(hi, (cm.splash_energy_kwh+cm.splash_rate_kw*dth*i-e)/dth)
            lo = max(lo, (cm.overflow_rate_kw*dth*i-cm.overflow_rate_kw*cm.overflow_time_s/3600-e)/dth)
        if st.semi_continuous and hi<st.p_min_kw:
            hi = 0.
        return max(hi, 0.), lo

    #-------------------------------------------
    # cycles

    def planCycle(self, f:FurnaceSpec, m:int, t0:int) -> Optional[Dict[int, Tuple[int, np.ndarray]]]:
        '''stages of cycle m back to back from t0, keyed by stage: (start, power). the end step of the
        cycle is stored under key 0'''
        out = {}
        durations = {}
        k = t0
        for j in range(1, len(f.cycles[m-1])+1):
            res = self.fillStage(f, m, j, k, durations)
            if res is None:
                return None
            p, end = res
            out[j] = (k, p)
            durations[j] = (end-k)*self.grid.step_seconds
            k = end
        out[0] = (k, np.zeros(self.K))
        return out

    def tapsFit(self, f:FurnaceSpec, extra:List[int]) -> bool:
        '''buffer stays below its maximum and the ladles suffice with the extra taps of f'''
        taps = dict([(fid, list(t)) for fid, t in self.taps.items()])
        taps[f.id] = taps[f.id]+extra
        v = bufferTrace(self.instance, self.cid, self.grid, taps)
        n = ladleTrace(self.instance, self.cid, self.grid, taps)
        return bool(np.all(v<=self.line.vmax_m3) and np.all(n<=self.line.ladle_limit))

    def holdTail(self, f:FurnaceSpec, m:int, stop:int) -> bool:
        '''hold the last stage of cycle m until stop'''
        j = len(f.cycles[m-1])
        key = (f.id, m, j)
        start = self.starts[key]
        durations = dict([(i, (self.starts[(f.id, m, i+1)]-self.starts[(f.id, m, i)])*self.grid.step_seconds)
                          for i in range(1, j)])
        self.use(f, self.power[key], -1)
        res = self.fillStage(f, m, j, start, durations, stop=stop)
        if res is None:
            self.use(f, self.power[key])
            return False
        self.power[key] = res[0]
        self.use(f, res[0])
        return True

    def planFurnace(self, f:FurnaceSpec) -> bool:
        t0 = 1
        for m in range(1, len(f.cycles)+1):
            tapStages = [j for mm, j in f.tapKeys() if mm==m]
            while True:
                if t0>self.K:
                    return False
                if m>1 and not self.holdTail(f, m-1, t0):
                    t0 += 1
                    continue
                cyc = self.planCycle(f, m, t0)
                if cyc is not None and self.tapsFit(f, [cyc[j][0] for j in tapStages]):
                    break
                t0 += 1
            for j, (s, p) in cyc.items():
                if j==0:
                    continue
                self.starts[(f.id, m, j)] = s
                self.power[(f.id, m, j)] = p
                self.use(f, p)
            self.taps[f.id] += [cyc[j][0] for j in tapStages]
            t0 = cyc[0][0]
        if t0>self.K+1:
            return False
        self.ends[f.id] = t0
        return True

    def run(self) -> Optional[Schedule]:
        pins = self.instance.initial_state.pinned_starts
        if any([key[0] in self.line.furnaces for key in pins]):
            logger.debug(f'Line {self.cid}: pinned starts, no earliest-start schedule')
            return None
        for f in self.furnaces:
            if not self.planFurnace(f):
                logger.debug(f'Line {self.cid}: furnace {f.id} does not fit the horizon')
                return None
        v = bufferTrace(self.instance, self.cid, self.grid, self.taps)
        if np.any(v<self.line.vmin_m3+self.line.safety_margin_m3):
            logger.debug(f'Line {self.cid}: earliest starts drain the buffer')
            return None
        return assembleSchedule(self.instance, self.grid, [self.cid], self.starts, self.ends, self.power,
                                label='earliest start')


def earliestStartSchedule(instance:PlantInstance, cid:str, grid:TimeGrid) -> Optional[Schedule]:
    '''feasible schedule of line cid with every stage as early as possible, or None when the greedy
    plan runs out of horizon or drains the buffer'''
    return earliestStartPlanner(instance, cid, grid).run()
