#!/usr/bin/env python
'''Tables behind the schedule and reserve plots, exported as csvs with a units row'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
import logging
import numpy as np
import pandas as pd

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from grid.time_grid import TimeGrid
from plant.plant_specs import PlantInstance
from plant.schedule import Schedule
from file.plainIm import plainExp
from reserve.bids import BidBlock

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#-------------------------------------------


def powerTable(schedule:Schedule, instance:PlantInstance) -> Tuple[pd.DataFrame, dict]:
    '''metered power of each line and of the plant at every step'''
    K = schedule.horizon_steps
    df = pd.DataFrame({'k':np.arange(1, K+1), 'time':np.arange(K)*schedule.step_seconds/3600})
    units = {'k':'', 'time':'h'}
    for cid in schedule.lines:
        df[cid] = schedule.linePower(instance, cid)
        units[cid] = 'kW'
    df['total'] = df[list(schedule.lines)].sum(axis=1)
    units['total'] = 'kW'
    return df, units


def baselineTable(schedule:Schedule) -> Tuple[pd.DataFrame, dict]:
    n = len(schedule.baseline_kw[schedule.lines[0]])
    hours = schedule.settlement_steps*schedule.step_seconds/3600
    df = pd.DataFrame({'q':np.arange(1, n+1), 'time':np.arange(n)*hours})
    units = {'q':'', 'time':'h'}
    for cid in schedule.lines:
        df[cid] = schedule.baseline_kw[cid]
        units[cid] = 'kW'
    return df, units


def bufferTable(schedule:Schedule) -> Tuple[pd.DataFrame, dict]:
    K = schedule.horizon_steps
    df = pd.DataFrame({'k':np.arange(1, K+1), 'time':np.arange(1, K+1)*schedule.step_seconds/3600})
    units = {'k':'', 'time':'h'}
    for cid in schedule.lines:
        df[cid] = schedule.buffer_m3[cid]
        units[cid] = 'm^3'
    return df, units


def reserveTable(bids:Dict[str, List[BidBlock]], grid:TimeGrid) -> Tuple[pd.DataFrame, dict]:
    '''reserve per interval and the block capacity of each line. missing intervals are empty'''
    n = grid.n_settlements
    df = pd.DataFrame({'q':np.arange(1, n+1), 'time':np.arange(n)*grid.settlement_hours,
                       'block':[grid.blockOf(q) for q in range(1, n+1)]})
    units = {'q':'', 'time':'h', 'block':''}
    for cid in sorted(bids):
        R = np.full(n, np.nan)
        cap = np.full(n, np.nan)
        for b in bids[cid]:
            for q, r in b.R_kw.items():
                R[q-1] = r
            for q in range(1, n+1):
                if grid.blockOf(q)==b.d and b.eligible:
                    cap[q-1] = b.capacity_kw
        df[f'R_{cid}'] = R
        df[f'bid_{cid}'] = cap
        units[f'R_{cid}'] = 'kW'
        units[f'bid_{cid}'] = 'kW'
    return df, units


def exportPlotData(folder:str, schedule:Optional[Schedule]=None, instance:Optional[PlantInstance]=None,
                   bids:Optional[Dict[str, List[BidBlock]]]=None, grid:Optional[TimeGrid]=None) -> List[str]:
    '''write the tables that the inputs allow. returns the file names'''
    out = []
    if schedule is not None:
        tables = [('baseline.csv', baselineTable(schedule)), ('buffer.csv', bufferTable(schedule))]
        if instance is not None:
            tables.insert(0, ('power.csv', powerTable(schedule, instance)))
        for fn, (df, units) in tables:
            plainExp(os.path.join(folder, fn), df, units)
            out.append(os.path.join(folder, fn))
    if bids is not None and grid is not None:
        df, units = reserveTable(bids, grid)
        plainExp(os.path.join(folder, 'reserve.csv'), df, units)
        out.append(os.path.join(folder, 'reserve.csv'))
    return out
