#!/usr/bin/env python
'''Solved schedules: stage starts, power profiles, buffer traces and baselines, with JSON import/export'''

# external packages
import os, sys
import json
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import dataclass, field
import logging
import numpy as np

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import DimensionMismatch, MissingFile, InputError
from grid.time_grid import TimeGrid
from plant.plant_specs import PlantInstance
from plant.evaluators import bufferTrace, holdingPower
from file.file_export import exportJSON

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

StageKey = Tuple[str, int, int]

#----------------------------------------------


@dataclass(frozen=True)
class Schedule:
    '''start_step maps (furnace, cycle, stage) to the first active step, or None if the stage is
    deferred past the horizon. end_step maps furnace to the step after its last stage ends (K+1 if it
    ends with the horizon). arrays are indexed k-1 and q-1'''
    step_seconds: float
    horizon_steps: int
    settlement_steps: int
    lines: Tuple[str, ...]
    start_step: Dict[StageKey, Optional[int]]
    end_step: Dict[str, Optional[int]]
    power_kw: Dict[StageKey, np.ndarray]
    buffer_m3: Dict[str, np.ndarray]
    holding_power_kw: Dict[str, np.ndarray]
    baseline_kw: Dict[str, np.ndarray]
    objective_eur: float = 0
    label: str = ''
    baseline_includes_holding: bool = True
    buffer_margin_m3: Dict[str, float] = field(default_factory=dict)

    def startSeconds(self, key:StageKey) -> Optional[float]:
        s = self.start_step[key]
        return None if s is None else s*self.step_seconds

    def tapStarts(self, instance:PlantInstance, cid:str) -> Dict[str, List[Optional[int]]]:
        out = {}
        for fid in instance.line(cid).furnaces:
            f = instance.furnace(fid)
            out[fid] = [self.start_step[(fid, m, j)] for m, j in f.tapKeys()]
        return out

    def furnacePower(self, instance:PlantInstance, cid:str) -> np.ndarray:
        '''melting furnace power of the line at each step'''
        p = np.zeros(self.horizon_steps)
        for fid in instance.line(cid).furnaces:
            for m, j in instance.furnace(fid).stageKeys():
                p = p+self.power_kw[(fid, m, j)]
        return p

    def linePower(self, instance:PlantInstance, cid:str) -> np.ndarray:
        '''metered power of the line: melting furnaces plus holding'''
        return self.furnacePower(instance, cid)+self.holding_power_kw[cid]

    def lineEnergyMwh(self, instance:PlantInstance, cid:str) -> float:
        return float(np.sum(self.linePower(instance, cid))*self.step_seconds/3600/1000)


def intervalMeans(values:np.ndarray, Nq:int) -> np.ndarray:
    '''mean of each consecutive group of Nq samples'''
    values = np.asarray(values, dtype=float)
    return values.reshape(-1, Nq).mean(axis=1)


def assembleSchedule(instance:PlantInstance, grid:TimeGrid, lineIds:List[str],
                     starts:Dict[StageKey, Optional[int]], ends:Dict[str, Optional[int]],
                     power:Dict[StageKey, np.ndarray], objective:float=0, label:str='',
                     includeHolding:bool=True, margins:Dict[str, float]={}) -> Schedule:
    '''derive buffer, holding power and baseline from stage starts and power profiles'''
    K = grid.K
    buf = {}
    hold = {}
    base = {}
    full = {}
    for cid in lineIds:
        line = instance.line(cid)
        for fid in line.furnaces:
            for m, j in instance.furnace(fid).stageKeys():
                key = (fid, m, j)
                if not key in starts:
                    raise DimensionMismatch(f'No start for furnace {fid} cycle {m} stage {j}')
                p = np.asarray(power.get(key, np.zeros(K)), dtype=float)
                if p.shape!=(K,):
                    raise DimensionMismatch(f'Power of {key} has shape {p.shape}, expected ({K},)')
                full[key] = p
        tapStarts = dict([(fid, [starts[(fid, m, j)] for m, j in instance.furnace(fid).tapKeys()]) for fid in line.furnaces])
        buf[cid] = bufferTrace(instance, cid, grid, tapStarts)
        hold[cid] = holdingPower(line, buf[cid])
        total = sum([full[(fid, m, j)] for fid in line.furnaces for m, j in instance.furnace(fid).stageKeys()])
        if includeHolding:
            total = total+hold[cid]
        base[cid] = intervalMeans(total, grid.Nq)
    return Schedule(step_seconds=grid.step_seconds, horizon_steps=K, settlement_steps=grid.Nq,
                    lines=tuple(lineIds), start_step=dict(starts), end_step=dict(ends), power_kw=full,
                    buffer_m3=buf, holding_power_kw=hold, baseline_kw=base, objective_eur=objective,
                    label=label, baseline_includes_holding=includeHolding,
                    buffer_margin_m3=dict([(c, margins.get(c, 0)) for c in lineIds]))


def mergeSchedules(schedules:List[Schedule], label:str='') -> Schedule:
    '''join per-line schedules on the same grid into one plant schedule'''
    if len(schedules)==0:
        raise InputError('No schedules to merge')
    s0 = schedules[0]
    for s in schedules[1:]:
        if (s.step_seconds, s.horizon_steps, s.settlement_steps)!=(s0.step_seconds, s0.horizon_steps, s0.settlement_steps):
            raise DimensionMismatch('Schedules are on different grids')
    d = {}
    for attr in ['start_step', 'end_step', 'power_kw', 'buffer_m3', 'holding_power_kw', 'baseline_kw', 'buffer_margin_m3']:
        d[attr] = {}
        for s in schedules:
            d[attr].update(getattr(s, attr))
    return Schedule(step_seconds=s0.step_seconds, horizon_steps=s0.horizon_steps, settlement_steps=s0.settlement_steps,
                    lines=tuple([c for s in schedules for c in s.lines]),
                    objective_eur=sum([s.objective_eur for s in schedules]),
                    label=label or s0.label, baseline_includes_holding=s0.baseline_includes_holding, **d)


def lineSchedule(schedule:Schedule, instance:PlantInstance, cid:str) -> Schedule:
    '''the part of a plant schedule that belongs to one line'''
    fids = instance.line(cid).furnaces
    keep = lambda key: key[0] in fids
    return Schedule(step_seconds=schedule.step_seconds, horizon_steps=schedule.horizon_steps,
                    settlement_steps=schedule.settlement_steps, lines=(cid,),
                    start_step=dict([(k, v) for k, v in schedule.start_step.items() if keep(k)]),
                    end_step=dict([(k, v) for k, v in schedule.end_step.items() if k in fids]),
                    power_kw=dict([(k, v) for k, v in schedule.power_kw.items() if keep(k)]),
                    buffer_m3={cid:schedule.buffer_m3[cid]}, holding_power_kw={cid:schedule.holding_power_kw[cid]},
                    baseline_kw={cid:schedule.baseline_kw[cid]}, objective_eur=schedule.objective_eur,
                    label=schedule.label, baseline_includes_holding=schedule.baseline_includes_holding,
                    buffer_margin_m3={cid:schedule.buffer_margin_m3.get(cid, 0)})


#----------------------------------------------

def _floats(a:np.ndarray) -> List[float]:
    return [float(x) for x in a]


def scheduleToDict(schedule:Schedule) -> dict:
    stages = []
    for key in sorted(schedule.start_step.keys()):
        fid, m, j = key
        stages.append({'furnace':fid, 'cycle':m, 'stage':j, 'start_step':schedule.start_step[key],
                       'start_s':schedule.startSeconds(key), 'power_kw':_floats(schedule.power_kw[key])})
    lines = {}
    for cid in schedule.lines:
        lines[cid] = {'buffer_m3':_floats(schedule.buffer_m3[cid]),
                      'holding_power_kw':_floats(schedule.holding_power_kw[cid]),
                      'baseline_kw':_floats(schedule.baseline_kw[cid]),
                      'buffer_margin_m3':float(schedule.buffer_margin_m3.get(cid, 0))}
    return {'label':schedule.label, 'objective_eur':float(schedule.objective_eur),
            'grid':{'step_seconds':schedule.step_seconds, 'horizon_steps':schedule.horizon_steps,
                    'settlement_steps':schedule.settlement_steps},
            'baseline_includes_holding':schedule.baseline_includes_holding,
            'lines':list(schedule.lines), 'end_steps':dict(sorted(schedule.end_step.items())),
            'stages':stages, 'line_data':lines}


def scheduleFromDict(d:dict) -> Schedule:
    try:
        g = d['grid']
        starts = {}
        power = {}
        for s in d['stages']:
            key = (s['furnace'], int(s['cycle']), int(s['stage']))
            starts[key] = s['start_step']
            power[key] = np.array(s['power_kw'], dtype=float)
        ld = d['line_data']
        return Schedule(step_seconds=float(g['step_seconds']), horizon_steps=int(g['horizon_steps']),
                        settlement_steps=int(g['settlement_steps']), lines=tuple(d['lines']),
                        start_step=starts, end_step=dict(d['end_steps']), power_kw=power,
                        buffer_m3=dict([(c, np.array(ld[c]['buffer_m3'])) for c in d['lines']]),
                        holding_power_kw=dict([(c, np.array(ld[c]['holding_power_kw'])) for c in d['lines']]),
                        baseline_kw=dict([(c, np.array(ld[c]['baseline_kw'])) for c in d['lines']]),
                        objective_eur=float(d.get('objective_eur', 0)), label=d.get('label', ''),
                        baseline_includes_holding=d.get('baseline_includes_holding', True),
                        buffer_margin_m3=dict([(c, float(ld[c].get('buffer_margin_m3', 0))) for c in d['lines']]))
    except (KeyError, TypeError) as e:
        raise InputError(f'Schedule document is missing {e}') from e


def exportSchedule(fn:str, schedule:Schedule) -> None:
    exportJSON(fn, scheduleToDict(schedule))


def loadSchedule(fn:str) -> Schedule:
    if not os.path.exists(fn):
        raise MissingFile(fn)
    with open(fn, 'r') as f:
        return scheduleFromDict(json.load(f))
