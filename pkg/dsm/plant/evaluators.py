#!/usr/bin/env python
'''Closed-form process evaluators: heat-loss energy, cast and tapped volume, buffer level, holding power, ladle use'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Iterable, Optional
import logging
import numpy as np

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import NegativeDuration
from grid.time_grid import TimeGrid
from plant.plant_specs import *

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


def heatLossEnergy(min_energy_kwh:float, elongation_durations:List[Tuple[float, float, float]]) -> float:
    '''energy an energy stage needs once its losses are counted.
    elongation_durations holds (alpha, duration_s, min_duration_s) for the stage itself and every
    time stage since the previous energy stage. E = Ehat*(1 + sum(alpha*duration/min_duration))'''
    factor = 1
    for alpha, dur, dmin in elongation_durations:
        if dur<0:
            raise NegativeDuration(f'Stage duration {dur} s is negative')
        if alpha==0:
            continue
        factor += alpha*dur/dmin
    return min_energy_kwh*factor


def lossStages(furnace:FurnaceSpec, m:int, j:int) -> List[int]:
    '''stages of cycle m whose duration adds to the losses of energy stage j: j itself and the
    time stages since the previous energy stage of the cycle'''
    out = [j]
    i = j-1
    while i>=1 and not furnace.stage(m, i).isEnergy:
        out.insert(0, i)
        i -= 1
    return out


def stageEnergyRequirement(furnace:FurnaceSpec, m:int, j:int, durations:Dict[int, float]) -> float:
    '''heat-loss adjusted energy of stage j in cycle m, given stage durations in s keyed by stage index'''
    terms = [(furnace.alpha(m, i), durations[i], furnace.stage(m, i).min_duration_s) for i in lossStages(furnace, m, j)]
    return heatLossEnergy(furnace.stage(m, j).min_energy_kwh, terms)


def reheatEnergy(furnace:FurnaceSpec, m:int, j:int, duration_s:float) -> float:
    '''minimum reheat energy of a tapping stage held longer than its reheat time'''
    s = furnace.stage(m, j)
    if s.reheat_tau_s is None:
        return 0
    return max(0, furnace.alpha(m, j)*(duration_s/s.reheat_tau_s-1))


def castVolume(line:CastingLineSpec, k:Union[int, np.ndarray], grid:TimeGrid) -> Union[float, np.ndarray]:
    '''cumulative volume cast by the end of step k, piecewise linear between breakpoints'''
    k = np.asarray(k, dtype=float)
    vol = np.zeros_like(k)
    segs = list(line.casting_segments)
    for n, (b, r) in enumerate(segs):
        end = segs[n+1][0] if n+1<len(segs) else np.inf
        vol = vol+r*np.clip(np.minimum(k, end)-b, 0, None)*grid.step_seconds
    if vol.ndim==0:
        return float(vol)
    return vol


def tappedVolume(furnace:FurnaceSpec, start_steps:Iterable[Optional[int]], k:int) -> float:
    '''volume delivered to the line by step k: tap volume times the taps with start + delivery time <= k'''
    n = sum([1 for s in start_steps if s is not None and s+furnace.delivery_time_steps<=k])
    return furnace.tap_volume_m3*n


def holdingPower(line:CastingLineSpec, buffer_m3:Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    '''power drawn by the pouring furnace holding buffer_m3'''
    return line.gamma_kw_per_m3*buffer_m3


def bufferTrace(instance:PlantInstance, cid:str, grid:TimeGrid, tapStarts:Dict[str, List[Optional[int]]]) -> np.ndarray:
    '''buffer level at k = 1..K: v0 + delivered volume - cast volume. tapStarts maps furnace id to the
    start steps of its tapping stages in this horizon. prior-day taps are added from the instance'''
    line = instance.line(cid)
    ks = np.arange(1, grid.K+1)
    v = instance.initialBuffer(cid)-castVolume(line, ks, grid)
    for fid in line.furnaces:
        f = instance.furnace(fid)
        starts = list(instance.priorTaps(fid))+[s for s in tapStarts.get(fid, []) if s is not None]
        arrive = np.array(starts, dtype=float)+f.delivery_time_steps
        if len(arrive)>0:
            v = v+f.tap_volume_m3*np.sum(arrive[None, :]<=ks[:, None], axis=1)
    return v


def ladleTrace(instance:PlantInstance, cid:str, grid:TimeGrid, tapStarts:Dict[str, List[Optional[int]]]) -> np.ndarray:
    '''ladles in use at k = 1..K: taps started in (k - roundtrip, k]'''
    line = instance.line(cid)
    ks = np.arange(1, grid.K+1)
    n = np.zeros(grid.K, dtype=int)
    for fid in line.furnaces:
        f = instance.furnace(fid)
        starts = list(instance.priorTaps(fid))+[s for s in tapStarts.get(fid, []) if s is not None]
        for s in starts:
            n = n+((ks>=s) & (ks<s+f.roundtrip_time_steps)).astype(int)
    return n
