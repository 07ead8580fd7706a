#!/usr/bin/env python
'''Shared fixtures: a 4 hour grid with 15 minute steps and a one-furnace plant small enough for HiGHS
to solve in well under a second'''

# external packages
import os, sys
import copy
from typing import List, Dict, Tuple, Union, Any, Optional
import numpy as np
import pytest

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from grid.time_grid import buildTimeGrid
from plant.instance_file import instanceFromDict
from plant.schedule import assembleSchedule

#----------------------------------------------

DEMO_INSTANCE = os.path.join(os.path.dirname(os.path.dirname(currentdir)), 'configs', 'demo', 'instance.json')

TINY = {
    'name':'tiny',
    'global_p_max_kw':2000,
    'power_units':{'U1':2000},
    'furnaces':[{'id':'F1', 'power_unit_id':'U1', 'tap_volume_m3':1, 'delivery_time_steps':1,
                 'roundtrip_time_steps':2,
                 'cycles':[[{'kind':'EnergyBased', 'name':'Melting', 'min_energy_kwh':500, 'p_max_kw':1000},
                            {'kind':'TimeBased', 'name':'Tapping', 'min_duration_s':900, 'is_tapping':True}]]}],
    'lines':[{'id':'C1', 'furnaces':['F1'], 'v0_m3':4, 'vmin_m3':0.5, 'vmax_m3':8, 'gamma_kw_per_m3':0,
              'casting_segments':[[0, 0]], 'ladle_limit':1}],
}


def tinyDict(**changes) -> dict:
    '''a copy of the tiny plant document with top-level keys replaced'''
    d = copy.deepcopy(TINY)
    d.update(changes)
    return d


@pytest.fixture
def grid():
    '''K=16 steps of 900 s, Nq=2, 8 settlement intervals, 2 bid blocks of 4 intervals'''
    return buildTimeGrid(900, 14400, 1800, 3600, 7200)


@pytest.fixture
def tiny():
    return instanceFromDict(tinyDict())


@pytest.fixture
def tinyDoc():
    return tinyDict()


def handSchedule(instance, grid, melt_start:int=1, tap_start:int=3, power:Optional[List[float]]=None):
    '''melting at full power in its first two steps, tapping for one step, end right after'''
    p = np.zeros(grid.K)
    if power is None:
        p[melt_start-1:melt_start+1] = 1000
    else:
        p[:len(power)] = power
    starts = {('F1', 1, 1):melt_start, ('F1', 1, 2):tap_start}
    ends = {'F1':tap_start+1}
    return assembleSchedule(instance, grid, ['C1'], starts, ends, {('F1', 1, 1):p}, label='hand')


@pytest.fixture
def committed(tiny, grid):
    '''schedule that melts in interval 1 and taps at step 3'''
    return handSchedule(tiny, grid)
