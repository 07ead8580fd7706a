#!/usr/bin/env python
'''Baselines and cost metrics of solved schedules'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
import logging
import numpy as np

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import ZeroEnergy, DimensionMismatch
from grid.time_grid import TimeGrid
from plant.plant_specs import PlantInstance
from plant.schedule import Schedule, intervalMeans

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


def computeBaseline(schedule:Schedule, instance:PlantInstance, grid:TimeGrid,
                    includeHolding:Optional[bool]=None) -> Dict[str, np.ndarray]:
    '''mean metered power of every line in every settlement interval, kW'''
    if includeHolding is None:
        includeHolding = schedule.baseline_includes_holding
    out = {}
    for cid in schedule.lines:
        p = schedule.linePower(instance, cid) if includeHolding else schedule.furnacePower(instance, cid)
        out[cid] = intervalMeans(p, grid.Nq)
    return out


def lineCost(schedule:Schedule, instance:PlantInstance, cid:str, prices:np.ndarray, grid:TimeGrid) -> float:
    '''EUR of melting and holding energy. prices in EUR/MWh per step'''
    prices = np.asarray(prices, dtype=float)
    if len(prices)!=grid.K:
        raise DimensionMismatch(f'Got {len(prices)} prices for {grid.K} steps')
    p = schedule.linePower(instance, cid)
    return float(np.sum(p*prices/1000)*grid.step_hours)


def totalCost(schedule:Schedule, instance:PlantInstance, prices:np.ndarray, grid:TimeGrid) -> float:
    return sum([lineCost(schedule, instance, cid, prices, grid) for cid in schedule.lines])


def totalEnergyMwh(schedule:Schedule, instance:PlantInstance) -> float:
    return sum([schedule.lineEnergyMwh(instance, cid) for cid in schedule.lines])


def efr(total_cost_eur:float, total_energy_mwh:float) -> float:
    '''equivalent flat rate, EUR/MWh'''
    if not total_energy_mwh>0:
        raise ZeroEnergy(f'Cannot compute a flat rate for {total_energy_mwh} MWh')
    return total_cost_eur/total_energy_mwh


def costSummary(schedule:Schedule, instance:PlantInstance, prices:np.ndarray, grid:TimeGrid) -> dict:
    '''cost, energy and flat rate per line and for the plant'''
    lines = {}
    for cid in schedule.lines:
        c = lineCost(schedule, instance, cid, prices, grid)
        e = schedule.lineEnergyMwh(instance, cid)
        lines[cid] = {'cost_eur':c, 'energy_mwh':e, 'efr_eur_mwh':efr(c, e) if e>0 else None,
                      'baseline_kw':[float(x) for x in schedule.baseline_kw[cid]]}
    c = sum([l['cost_eur'] for l in lines.values()])
    e = sum([l['energy_mwh'] for l in lines.values()])
    return {'label':schedule.label, 'total_cost_eur':c, 'total_energy_mwh':e,
            'efr_eur_mwh':efr(c, e) if e>0 else None,
            'mean_price_eur_mwh':float(np.mean(prices)), 'lines':lines}
