#!/usr/bin/env python
'''Solving the reserve model of every settlement interval of a day against a frozen baseline.
The intervals are independent, so they run through a joblib worker pool and the results are merged by q'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import dataclass, field
import logging
import numpy as np
from box import Box
from joblib import Parallel, delayed

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import DSMError, InfeasibleContingency, SolverFailed, ZeroBaseline
from grid.time_grid import TimeGrid
from plant.plant_specs import PlantInstance
from plant.schedule import Schedule, assembleSchedule, scheduleToDict
from milp.milp_model import MilpModel, MilpSolution, SolveStatus
from milp.naming import nameR, nameUp, nameDown, nameNu, nameZeta
from milp.solver import solve
from milp.extract import extractStarts, extractPower, extractScalar
from eas.baseline import computeBaseline
from reserve.reserve_model import ReserveParams, buildReserveModel, warmStartFromSchedule, stageDurationsOf

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


@dataclass
class ReserveResult:
    '''outcome of the reserve model of interval q. up_kw and down_kw are the deviations from the
    baseline after the activation window. daf maps deferrable stages to 1 if they stay in the day'''
    q: int
    block: int
    R_kw: float
    window: List[int]
    up_kw: Dict[int, float] = field(default_factory=dict)
    down_kw: Dict[int, float] = field(default_factory=dict)
    nu: Dict[int, int] = field(default_factory=dict)
    unit_cost: float = np.inf
    daf: Dict[Tuple[str, int, int], int] = field(default_factory=dict)
    shifted_energy_kwh: float = 0
    imbalance_eur: float = 0
    objective: float = 0
    status: str = ''
    daf_on: bool = False
    contingency: Optional[Schedule] = None

    def toDict(self, withSchedule:bool=False) -> dict:
        d = {'q':self.q, 'block':self.block, 'R_kw':self.R_kw, 'window':self.window,
             'up_kw':self.up_kw, 'down_kw':self.down_kw, 'nu':self.nu,
             'unit_cost_eur_per_kw':None if not np.isfinite(self.unit_cost) else self.unit_cost,
             'daf':[[f, m, j, z] for (f, m, j), z in self.daf.items()],
             'shifted_energy_kwh':self.shifted_energy_kwh, 'imbalance_eur':self.imbalance_eur,
             'objective':self.objective, 'status':self.status, 'daf_on':self.daf_on}
        if withSchedule and self.contingency is not None:
            d['contingency'] = scheduleToDict(self.contingency)
        return d


def unitCost(R:float, imbalance_eur:float, shifted_kwh:float, params:ReserveParams) -> float:
    '''expected cost per kW of offered reserve, infinite when nothing is offered'''
    if not R>0:
        return np.inf
    return params.activation_probability*(imbalance_eur+params.next_day_price_kwh*shifted_kwh)/R


def lineBaseline(schedule:Schedule, instance:PlantInstance, cid:str, grid:TimeGrid,
                 params:ReserveParams) -> np.ndarray:
    '''committed baseline of the line, with or without holding power as the reserve params ask'''
    if schedule.baseline_includes_holding==params.baseline_includes_holding:
        return np.asarray(schedule.baseline_kw[cid], dtype=float)
    return computeBaseline(schedule, instance, grid, params.baseline_includes_holding)[cid]


def resultFromSolution(model:MilpModel, sol:MilpSolution, instance:PlantInstance, cid:str, grid:TimeGrid,
                       q:int, params:ReserveParams) -> ReserveResult:
    dth = grid.settlement_hours
    R = max(0, extractScalar(sol, nameR(q)))
    up, down, nu = {}, {}, {}
    imbalance = 0
    for qq in model.metadata['after']:
        up[qq] = extractScalar(sol, nameUp(qq))
        down[qq] = extractScalar(sol, nameDown(qq))
        if model.hasVar(nameNu(qq)):
            nu[qq] = int(round(extractScalar(sol, nameNu(qq))))
        lp, lm = params.penalties(qq)
        imbalance += (lp*up[qq]-lm*down[qq])*dth
    daf = {}
    for nd in model.metadata['nodes']:
        if nd['relaxed'] and nd['m'] is not None:
            daf[(nd['f'], nd['m'], nd['j'])] = int(round(extractScalar(sol, nameZeta(nd['f'], nd['m'], nd['j']), 0)))
    shifted = model.metadata['shifted'].value(sol.values)
    margin = model.metadata['margin'].value(sol.values)
    starts, ends = extractStarts(model, sol)
    power = extractPower(model, sol, starts, ends)
    s = assembleSchedule(instance, grid, [cid], starts, ends, power, objective=sol.objective, label=f'{cid}_q{q}',
                         includeHolding=params.baseline_includes_holding, margins={cid:margin})
    return ReserveResult(q=q, block=grid.blockOf(q), R_kw=R, window=model.metadata['window'], up_kw=up,
                         down_kw=down, nu=nu, unit_cost=unitCost(R, imbalance, shifted, params),
                         daf=daf, shifted_energy_kwh=shifted, imbalance_eur=imbalance, objective=sol.objective,
                         status=sol.status.value, daf_on=model.metadata['daf_on'], contingency=s)


def solveInterval(instance:PlantInstance, cid:str, grid:TimeGrid, schedule:Schedule, baseline:np.ndarray,
                  q:int, params:ReserveParams, profile:Union[str, Box, None]=None,
                  time_limit:Optional[float]=None, daf_on:Optional[bool]=None) -> ReserveResult:
    '''reserve model of interval q, warm-started from the committed schedule'''
    if daf_on is None:
        daf_on = params.dafOn(grid.blockOf(q), grid.n_blocks)
    if time_limit is None:
        time_limit = cfg.solver.reserve_time_limit
    model = buildReserveModel(instance, cid, grid, baseline, q, params, daf_on,
                              stageDurations=stageDurationsOf(schedule, instance, cid))
    warm = warmStartFromSchedule(model, schedule, baseline)
    broken = model.checkFeasible(warm)
    if len(broken)>0:
        logger.debug(f'{model.name}: committed schedule breaks {len(broken)} rows, e.g. {broken[:3]}')
        warm = None
    sol = solve(model, profile, time_limit, warm_start=warm)
    if sol.status==SolveStatus.INFEASIBLE:
        raise InfeasibleContingency(f'Line {cid}: no contingency plan for an activation in interval {q}')
    if not sol.hasValues:
        raise SolverFailed(f'Line {cid}: reserve model of interval {q} returned {sol.status.value} without a solution. {sol.message}')
    res = resultFromSolution(model, sol, instance, cid, grid, q, params)
    logger.info(f'Line {cid} q{q}: R* {res.R_kw:.1f} kW, unit cost {res.unit_cost:.4g} EUR/kW, shifted {res.shifted_energy_kwh:.0f} kWh')
    return res


def _solveOne(*args, **kwargs) -> Tuple[int, Union[ReserveResult, DSMError]]:
    q = args[5]
    try:
        return q, solveInterval(*args, **kwargs)
    except DSMError as e:
        if isinstance(e, ZeroBaseline):
            logger.info(f'Line {args[1]}: {e}, interval is not eligible')
        else:
            logger.error(f'Line {args[1]} q{q}: {e}')
        return q, e


def solveReserveDay(instance:PlantInstance, cid:str, grid:TimeGrid, schedule:Schedule, params:ReserveParams,
                    profile:Union[str, Box, None]=None, time_limit:Optional[float]=None, jobs:int=1,
                    qs:Optional[List[int]]=None) -> Tuple[Dict[int, ReserveResult], Dict[int, DSMError]]:
    '''reserve results of every interval keyed by q, and the errors of intervals without a result'''
    baseline = lineBaseline(schedule, instance, cid, grid, params)
    if qs is None:
        qs = list(range(1, grid.n_settlements+1))
    out = Parallel(n_jobs=jobs, prefer='threads')(
        delayed(_solveOne)(instance, cid, grid, schedule, baseline, q, params, profile, time_limit) for q in qs)
    results = {}
    errors = {}
    for q, res in out:
        if isinstance(res, DSMError):
            errors[q] = res
        else:
            results[q] = res
    logger.info(f'Line {cid}: reserve results for {len(results)} of {len(qs)} intervals')
    return dict(sorted(results.items())), dict(sorted(errors.items()))
