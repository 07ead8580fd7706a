#!/usr/bin/env python
'''Reachable windows of every stage: earliest start and latest finish on the scheduling grid.
A stage with window (k_min, k_max) can only be active at steps k_min < k <= k_max'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any
from dataclasses import dataclass
import logging

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import InfeasibleHorizon
from tools.val_tools import ceilSteps, FUZZ
from grid.time_grid import TimeGrid
from plant.plant_specs import StageSpec, FurnaceSpec, PlantInstance

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


@dataclass(frozen=True)
class StageWindow:
    k_min: int
    k_max: int
    min_steps: int = 0

    @property
    def earliestStart(self) -> int:
        '''first step at which the stage can be active'''
        return self.k_min+1

    @property
    def latestStart(self) -> int:
        '''last step at which the stage can start and still finish by k_max'''
        return self.k_max-self.min_steps+1


def minSteps(stage:StageSpec, grid:TimeGrid) -> int:
    '''fewest grid steps the stage can take: ceil(E/(Pmax dt)) for energy stages, ceil(D/dt) for time stages.
    a ramp limits the i-th active step to P0 + r*dt*i, which can add steps'''
    if not stage.isEnergy:
        return max(1, ceilSteps(stage.min_duration_s, grid.step_seconds))
    n = max(1, ceilSteps(stage.min_energy_kwh, stage.p_max_kw*grid.step_hours))
    if stage.ramp is None:
        return n
    r = stage.ramp.rate_limit_kw_per_s*grid.step_seconds
    e = 0.
    i = 0
    while e<stage.min_energy_kwh*(1-FUZZ):
        i += 1
        e += min(stage.p_max_kw, stage.ramp.initial_power_kw+r*i)*grid.step_hours
    return max(n, i)


def furnaceWindows(furnace:FurnaceSpec, grid:TimeGrid, deferrable:bool=False) -> Dict[Tuple[int, int], StageWindow]:
    '''windows of all stages of one furnace, keyed by (cycle, stage).
    deferrable=True lets the relaxed cycles slip past the horizon, so they do not count toward
    the latest finish of earlier stages'''
    K = grid.K
    keys = furnace.stageKeys()
    steps = [minSteps(furnace.stage(m, j), grid) for m, j in keys]
    optional = [deferrable and (m in furnace.daf_relaxed_cycles) for m, j in keys]
    before = 0
    after = sum([s for s, o in zip(steps, optional) if not o])
    windows = {}
    for key, s, o in zip(keys, steps, optional):
        if not o:
            after -= s
        if o:
            w = StageWindow(min(before, K), K, s)
        else:
            w = StageWindow(before, K-after, s)
            if w.k_max-w.k_min<s:
                raise InfeasibleHorizon(f'Furnace {furnace.id}: minimum work of {before+s+after} steps '
                                        f'does not fit in {K} steps (cycle {key[0]} stage {key[1]})')
        windows[key] = w
        before += s
    return windows


def stageWindows(instance:PlantInstance, grid:TimeGrid, deferrable:bool=False) -> Dict[Tuple[str, int, int], StageWindow]:
    '''windows of every stage in the plant, keyed by (furnace, cycle, stage)'''
    out = {}
    for f in instance.furnaces:
        for (m, j), w in furnaceWindows(f, grid, deferrable).items():
            out[(f.id, m, j)] = w
    return out


def unboundedWindows(furnace:FurnaceSpec, grid:TimeGrid) -> Dict[Tuple[int, int], StageWindow]:
    '''the whole horizon for every stage, used when window tightening is off. only the stage order
    rows use min_steps then'''
    return dict([(key, StageWindow(0, grid.K, minSteps(furnace.stage(*key), grid))) for key in furnace.stageKeys()])
