#!/usr/bin/env python
'''Reserve model of one casting line for one settlement interval q. The line keeps its committed
baseline before q, drops at least R below the baseline over the activation window and pays an
imbalance penalty for deviating from the baseline after the window. With day-after flexibility the
trailing cycles may slip to the next day at a cost'''

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
from tools.errors import InputError, ZeroBaseline, DimensionMismatch
from grid.time_grid import TimeGrid, blockSlots
from plant.plant_specs import PlantInstance
from plant.schedule import Schedule
from market.prices import penaltySeries
from milp.milp_model import MilpModel, LinExpr
from milp.naming import nameR, nameUp, nameDown, nameNu
from milp.extract import valuesFromSchedule
from eas.process_model import processModel

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


@dataclass(frozen=True, eq=False)
class ReserveParams:
    '''market and risk parameters of the reserve model.
    availability_price_eur_per_kw, up_penalty, down_penalty: arrays over settlement intervals.
    penalties are in EUR/kWh of deviation from the baseline. activation_span is the number of
    settlement intervals one activation can occupy. daf_blocks lists the bid blocks solved with
    day-after flexibility, -1 is the last block'''
    availability_price_eur_per_kw: np.ndarray
    up_penalty: np.ndarray
    down_penalty: np.ndarray
    activation_probability: float = 1/48
    activation_span: int = 2
    one_price: bool = False
    min_bid_kw: float = 300
    max_bid_kw: float = 5000
    daf_enabled: bool = False
    daf_next_day_price_eur_mwh: float = 0
    max_shift_energy_kwh: float = 0
    daf_blocks: Tuple[int, ...] = (-1,)
    remunerate_dispatch: bool = False
    baseline_tolerance_kw: float = 1e-3
    baseline_includes_holding: bool = True

    def __post_init__(self):
        if not 0<=self.activation_probability<=1:
            raise InputError(f'Activation probability must be in [0, 1], got {self.activation_probability}')
        if self.activation_span<1:
            raise InputError(f'Activation span must be at least 1, got {self.activation_span}')
        if np.any(np.asarray(self.up_penalty)<0) or np.any(np.asarray(self.down_penalty)<0):
            raise InputError('Imbalance penalties must be nonnegative')
        if self.min_bid_kw>self.max_bid_kw:
            raise InputError(f'Minimum bid {self.min_bid_kw} kW is above the maximum bid {self.max_bid_kw} kW')
        if self.max_shift_energy_kwh<0 or self.baseline_tolerance_kw<0:
            raise InputError('Shift energy cap and baseline tolerance must be nonnegative')
        n = len(self.availability_price_eur_per_kw)
        if len(self.up_penalty)!=n or len(self.down_penalty)!=n:
            raise DimensionMismatch(f'Availability prices cover {n} intervals, penalties cover {len(self.up_penalty)} and {len(self.down_penalty)}')

    @property
    def next_day_price_kwh(self) -> float:
        return self.daf_next_day_price_eur_mwh/1000

    def dafOn(self, d:int, n_blocks:int) -> bool:
        '''day-after flexibility is used in bid block d'''
        if not self.daf_enabled:
            return False
        blocks = [n_blocks+1+b if b<0 else b for b in self.daf_blocks]
        return d in blocks

    def penalties(self, q:int) -> Tuple[float, float]:
        '''up and down penalty of interval q. one-price settlement charges the up rate both ways'''
        up = float(self.up_penalty[q-1])
        return (up, up) if self.one_price else (up, float(self.down_penalty[q-1]))


def reserveParamsFrom(c:Box, grid:TimeGrid, prices_k:np.ndarray,
                      penalties:Optional[Tuple[np.ndarray, np.ndarray]]=None, **overrides) -> ReserveParams:
    '''parameters from the reserve section of a config. prices_k are day-ahead EUR/MWh per step.
    without explicit penalties the up and down rates are factors of the day-ahead price'''
    r = c.reserve
    if penalties is None:
        penalties = penaltySeries(prices_k, grid, r.get('up_factor', None), r.get('down_factor', None))
    up, down = penalties
    daf = r.get('daf', Box())
    d = {'availability_price_eur_per_kw':np.full(grid.n_settlements, float(r.availability_price_eur_per_mw)/1000),
         'up_penalty':np.asarray(up, dtype=float), 'down_penalty':np.asarray(down, dtype=float),
         'activation_probability':float(r.activation_probability),
         'activation_span':int(r.activation_span), 'one_price':bool(r.get('one_price', False)),
         'min_bid_kw':float(r.min_bid_kw), 'max_bid_kw':float(r.max_bid_kw),
         'daf_enabled':bool(daf.get('enabled', False)),
         'daf_next_day_price_eur_mwh':float(daf.get('next_day_price_eur_mwh', 0)),
         'max_shift_energy_kwh':float(daf.get('max_shift_energy_kwh', 0)),
         'daf_blocks':tuple(daf.get('blocks', [-1])),
         'remunerate_dispatch':bool(r.get('remunerate_dispatch', False)),
         'baseline_tolerance_kw':float(r.get('baseline_tolerance_kw', 1e-3)),
         'baseline_includes_holding':bool(c.eas.get('baseline_includes_holding', True))}
    d.update(overrides)
    return ReserveParams(**d)


def activationWindow(grid:TimeGrid, q:int, span:int) -> List[int]:
    '''settlement intervals of an activation starting in q: span intervals, cut at the end of the bid block'''
    last = blockSlots(grid)[grid.blockOf(q)-1][-1]
    return list(range(q, min(q+span-1, last)+1))


def stageDurationsOf(schedule:Schedule, instance:PlantInstance, cid:str) -> Dict[Tuple[str, int, int], float]:
    '''scheduled duration in s of every started stage of line cid'''
    out = {}
    for fid in instance.line(cid).furnaces:
        keys = instance.furnace(fid).stageKeys()
        for i, (m, j) in enumerate(keys):
            s = schedule.start_step[(fid, m, j)]
            if s is None:
                continue
            e = schedule.start_step[(fid,)+keys[i+1]] if i+1<len(keys) else schedule.end_step[fid]
            if e is None:
                e = schedule.horizon_steps+1
            out[(fid, m, j)] = (e-s)*schedule.step_seconds
    return out


#----------------------------------------------

def buildReserveModel(instance:PlantInstance, cid:str, grid:TimeGrid, baseline:np.ndarray, q:int,
                      params:ReserveParams, daf_on:bool=False,
                      stageDurations:Optional[Dict[Tuple[str, int, int], float]]=None, name:str='') -> MilpModel:
    '''maximize the expected reserve income of interval q minus the expected imbalance cost of
    recovering after an activation. baseline is the committed mean power per interval in kW'''
    bl = np.asarray(baseline, dtype=float)
    if len(bl)!=grid.n_settlements:
        raise DimensionMismatch(f'Baseline covers {len(bl)} intervals, grid has {grid.n_settlements}')
    if not 1<=q<=grid.n_settlements:
        raise InputError(f'Settlement interval {q} is outside 1..{grid.n_settlements}')
    if not bl[q-1]>0:
        raise ZeroBaseline(q)
    hold = params.baseline_includes_holding
    model = MilpModel(name or f'reserve_{cid}_q{q}')
    pm = processModel(model, instance, cid, grid, windows=True, deferrable=daf_on, stageDurations=stageDurations)
    window = activationWindow(grid, q, params.activation_span)
    after = list(range(window[-1]+1, grid.n_settlements+1))
    dth = grid.settlement_hours
    tol = params.baseline_tolerance_kw
    Pi = params.activation_probability

    R = model.addVar(nameR(q), lower=0, upper=float(bl[q-1]))
    for qq in range(1, q):
        b = pm.baseline(qq, hold)
        model.addConstraint(f'keep_q{qq}_hi', b, '<=', bl[qq-1]+tol)
        model.addConstraint(f'keep_q{qq}_lo', b, '>=', bl[qq-1]-tol)
    for qq in window:
        model.addConstraint(f'drop_q{qq}', pm.baseline(qq, hold)+LinExpr.var(R), '<=', bl[qq-1])

    # largest metered power the line can draw above its baseline
    top = instance.lineCap(cid)+(pm.line.gamma_kw_per_m3*pm.line.vmax_m3 if hold else 0)
    imbalance = LinExpr()
    for qq in after:
        up = model.addVar(nameUp(qq), lower=0, upper=max(0, top-bl[qq-1]))
        dn = model.addVar(nameDown(qq), lower=-bl[qq-1], upper=0)
        model.addConstraint(f'dev_q{qq}', pm.baseline(qq, hold)-LinExpr.var(up)-LinExpr.var(dn), '=', bl[qq-1])
        if not params.one_price:
            nu = model.addBinary(nameNu(qq))
            model.addConstraint(f'nuup_q{qq}', LinExpr.var(up)-LinExpr.var(nu)*max(0, top-bl[qq-1]), '<=')
            model.addConstraint(f'nudn_q{qq}', LinExpr.var(dn)-LinExpr.var(nu)*bl[qq-1], '>=', -bl[qq-1])
        lp, lm = params.penalties(qq)
        imbalance.addTerm(up, lp*dth)
        imbalance.addTerm(dn, -lm*dth)

    income = float(params.availability_price_eur_per_kw[q-1])
    if params.remunerate_dispatch:
        income += Pi*params.penalties(q)[0]*dth*len(window)
    shifted = pm.shiftedEnergy() if daf_on else LinExpr()
    if daf_on:
        model.addConstraint(f'shift_{cid}', shifted, '<=', params.max_shift_energy_kwh)
    obj = LinExpr.var(R, income)-(imbalance+shifted*params.next_day_price_kwh)*Pi
    model.setObjective(obj, 'max')
    model.metadata.update({'kind':'reserve', 'q':q, 'window':window, 'after':after, 'daf_on':daf_on,
                           'baseline_includes_holding':hold})
    model.metadata['shifted'] = shifted
    model.metadata['margin'] = pm.margin
    logger.info(f'Built {model.summary()} (window {window[0]}..{window[-1]}, daf {daf_on})')
    return model


#----------------------------------------------

def warmStartFromSchedule(model:MilpModel, schedule:Schedule, baseline:Optional[np.ndarray]=None,
                          tol:float=1e-9) -> Dict[str, float]:
    '''values of the reserve model variables that reproduce the committed schedule with no reserve'''
    values = valuesFromSchedule(model, schedule, tol)
    if baseline is not None:
        hold = model.metadata.get('baseline_includes_holding', True)
        cid = model.metadata['line']
        ref = np.asarray(baseline, dtype=float)
        for qq in model.metadata.get('after', []):
            dev = float(schedule.baseline_kw[cid][qq-1]-ref[qq-1]) if hold==schedule.baseline_includes_holding else 0.
            values[nameUp(qq)] = max(dev, 0)
            values[nameDown(qq)] = min(dev, 0)
            if model.hasVar(nameNu(qq)):
                values[nameNu(qq)] = float(dev>0)
    return model.completeValues(values)
