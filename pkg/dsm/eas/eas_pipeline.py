#!/usr/bin/env python
'''Solving the day-ahead schedule line by line and turning solutions into Schedules'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import replace
import logging
import numpy as np
from box import Box
from joblib import Parallel, delayed

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import DSMError, InfeasibleSchedule, SolverFailed
from grid.time_grid import TimeGrid
from plant.plant_specs import PlantInstance
from plant.schedule import Schedule, assembleSchedule, mergeSchedules
from milp.milp_model import MilpModel, MilpSolution, SolveStatus
from milp.solver import solve
from milp.extract import extractStarts, extractPower, valuesFromSchedule
from eas.eas_model import EasConfig, easConfigFrom, buildEasModel
from eas.baseline import lineCost
from eas.decompose import decomposeAndWarmstart
from eas.earliest_start import earliestStartSchedule

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


def checkSolution(sol:MilpSolution, what:str) -> None:
    '''raise if the solve gave no usable values'''
    if sol.status==SolveStatus.INFEASIBLE:
        raise InfeasibleSchedule(f'{what} is infeasible')
    if not sol.hasValues:
        raise SolverFailed(f'{what}: solver returned {sol.status.value} without a solution. {sol.message}')


def scheduleFromSolution(model:MilpModel, sol:MilpSolution, instance:PlantInstance, grid:TimeGrid,
                         lineIds:List[str], label:str='', includeHolding:bool=True,
                         margins:Dict[str, float]={}, objective:Optional[float]=None) -> Schedule:
    '''extract starts and powers and derive buffer, holding power and baseline'''
    starts, ends = extractStarts(model, sol)
    power = extractPower(model, sol, starts, ends)
    return assembleSchedule(instance, grid, lineIds, starts, ends, power,
                            objective=sol.objective if objective is None else objective,
                            label=label, includeHolding=includeHolding, margins=margins)


def earliestStartValues(model:MilpModel, instance:PlantInstance, cid:str, grid:TimeGrid) -> Optional[Dict[str, float]]:
    '''model values of the earliest-start schedule of the line, None if there is none or the model rejects it'''
    first = earliestStartSchedule(instance, cid, grid)
    if first is None:
        return None
    values = model.completeValues(valuesFromSchedule(model, first))
    broken = model.checkFeasible(values)
    if len(broken)>0:
        logger.debug(f'{model.name}: earliest-start schedule breaks {len(broken)} rows, e.g. {broken[:3]}')
        return None
    logger.debug(f'{model.name}: earliest-start incumbent objective {model.objectiveValue(values):.4f}')
    return values


def solveLine(instance:PlantInstance, cid:str, grid:TimeGrid, prices:np.ndarray,
              config:Optional[EasConfig]=None, profile:Union[str, Box, None]=None,
              time_limit:Optional[float]=None, decompose:bool=False, label:str='') -> Tuple[Schedule, MilpSolution]:
    '''day-ahead schedule of one line. the schedule objective is the energy cost at the given prices'''
    if config is None:
        config = easConfigFrom()
    if time_limit is None:
        time_limit = cfg.solver.eas_time_limit
    label = label or ('MCT' if config.mct_mode else 'DAEA')
    if decompose:
        sol, model = decomposeAndWarmstart(instance, cid, grid, prices, config, profile, time_limit)
    else:
        model = buildEasModel(instance, cid, grid, prices, config)
        sol = solve(model, profile, time_limit, warm_start=earliestStartValues(model, instance, cid, grid))
    checkSolution(sol, f'Line {cid}')
    s = scheduleFromSolution(model, sol, instance, grid, [cid], label, config.baseline_includes_holding, objective=0)
    cost = lineCost(s, instance, cid, prices, grid)
    logger.info(f'Line {cid}: {label} cost {cost:.2f} EUR ({sol.status.value})')
    return replace(s, objective_eur=cost), sol


def _solveOne(*args, **kwargs) -> Tuple[str, Union[Tuple[Schedule, MilpSolution], DSMError]]:
    cid = args[1]
    try:
        return cid, solveLine(*args, **kwargs)
    except DSMError as e:
        logger.error(f'Line {cid}: {e}')
        return cid, e


def solvePlant(instance:PlantInstance, grid:TimeGrid, prices:np.ndarray, config:Optional[EasConfig]=None,
               profile:Union[str, Box, None]=None, time_limit:Optional[float]=None, decompose:bool=False,
               lines:Optional[List[str]]=None, jobs:int=1, label:str='') -> Tuple[Dict[str, Schedule], Dict[str, MilpSolution], Dict[str, DSMError]]:
    '''solve the lines independently. returns schedules, solutions and errors keyed by line'''
    if lines is None:
        lines = [c.id for c in instance.lines]
    out = Parallel(n_jobs=jobs, prefer='threads')(
        delayed(_solveOne)(instance, cid, grid, prices, config, profile, time_limit, decompose, label) for cid in lines)
    schedules = {}
    solutions = {}
    errors = {}
    for cid, res in out:
        if isinstance(res, DSMError):
            errors[cid] = res
        else:
            schedules[cid], solutions[cid] = res
    return schedules, solutions, errors


def plantSchedule(schedules:Dict[str, Schedule], label:str='') -> Schedule:
    return mergeSchedules([schedules[c] for c in sorted(schedules)], label)
