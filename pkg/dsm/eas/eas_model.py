#!/usr/bin/env python
'''Day-ahead energy-aware scheduling model of one casting line'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import dataclass
import logging
import numpy as np
from box import Box

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import MissingPrice, InputError
from grid.time_grid import TimeGrid, blockSlots
from plant.plant_specs import PlantInstance
from milp.milp_model import MilpModel, LinExpr
from milp.naming import nameFloor
from eas.process_model import processModel

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


@dataclass(frozen=True)
class EasConfig:
    '''reserve_floor_weight is in EUR/kW on the lowest baseline of each bid block'''
    reserve_floor_weight: float = 0
    enable_windows: bool = True
    mct_mode: bool = False
    baseline_includes_holding: bool = True

    def __post_init__(self):
        if self.reserve_floor_weight<0:
            raise InputError(f'reserve_floor_weight must be nonnegative, got {self.reserve_floor_weight}')


def easConfigFrom(c:Box=cfg, **overrides) -> EasConfig:
    e = c.eas
    d = {'reserve_floor_weight':float(e.get('reserve_floor_weight', 0)),
         'enable_windows':bool(e.get('enable_windows', True)),
         'mct_mode':bool(e.get('mct_mode', False)),
         'baseline_includes_holding':bool(e.get('baseline_includes_holding', True))}
    d.update(overrides)
    return EasConfig(**d)


def stepPrices(prices:np.ndarray, grid:TimeGrid, mct:bool) -> np.ndarray:
    '''EUR/kWh per step. the constant-price objective uses 1 per kWh'''
    prices = np.asarray(prices, dtype=float)
    if len(prices)!=grid.K:
        raise MissingPrice(f'Got {len(prices)} prices for {grid.K} steps')
    if not np.all(np.isfinite(prices)):
        raise MissingPrice('Price series has missing values')
    if mct:
        return np.ones(grid.K)
    return prices/1000


def buildEasModel(instance:PlantInstance, cid:str, grid:TimeGrid, prices:np.ndarray,
                  config:Optional[EasConfig]=None, name:str='') -> MilpModel:
    '''cost-minimizing schedule of line cid. prices are EUR/MWh per scheduling step'''
    if config is None:
        config = easConfigFrom()
    lam = stepPrices(prices, grid, config.mct_mode)
    model = MilpModel(name or f'eas_{cid}')
    pm = processModel(model, instance, cid, grid, windows=config.enable_windows)
    obj = pm.cost(lam)
    if config.reserve_floor_weight>0:
        for d, qs in enumerate(blockSlots(grid), start=1):
            low = model.addVar(nameFloor(d), lower=0)
            for q in qs:
                model.addConstraint(f'floor_d{d}_q{q}', LinExpr.var(low)-pm.baseline(q, config.baseline_includes_holding), '<=')
            obj.addTerm(low, -config.reserve_floor_weight)
    model.setObjective(obj, 'min')
    model.metadata.update({'kind':'eas', 'mct':config.mct_mode,
                           'baseline_includes_holding':config.baseline_includes_holding})
    logger.info(f'Built {model.summary()}')
    return model
