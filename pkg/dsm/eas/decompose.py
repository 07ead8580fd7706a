#!/usr/bin/env python
'''Power-unit decomposition of a line model. Each power unit gets a proportional share of the buffer,
the cast demand, the ladles and the line cap. The joined sub-solutions are a warm start for the
full line model'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
import logging
import numpy as np
from box import Box

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import DecompositionInapplicable, SubproblemInfeasible, SolverFailed
from grid.time_grid import TimeGrid
from plant.plant_specs import PlantInstance, CastingLineSpec, InitialState
from milp.milp_model import MilpModel, MilpSolution, SolveStatus
from milp.solver import solve
from eas.eas_model import EasConfig, buildEasModel

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


def splitCount(total:int, shares:List[float]) -> List[int]:
    '''largest-remainder split of an integer. every part gets at least 1 when total>0'''
    quotas = [total*s for s in shares]
    parts = [int(np.floor(q)) for q in quotas]
    order = sorted(range(len(shares)), key=lambda i: (-(quotas[i]-parts[i]), i))
    for i in order[:total-sum(parts)]:
        parts[i] += 1
    if total>0:
        parts = [max(1, p) for p in parts]
    return parts


def lineUnits(instance:PlantInstance, cid:str) -> List[str]:
    '''power units of the line. raises if one of them also feeds another line'''
    units = sorted(set([f.power_unit_id for f in instance.lineFurnaces(cid)]))
    for l in units:
        if instance.unitSpansLines(l):
            raise DecompositionInapplicable(f'Power unit {l} feeds furnaces on more than one line')
    return units


def subInstances(instance:PlantInstance, cid:str) -> Dict[str, PlantInstance]:
    '''one instance per power unit of line cid, with the line resources split by furnace count'''
    line = instance.line(cid)
    units = lineUnits(instance, cid)
    members = dict([(l, [f.id for f in instance.lineFurnaces(cid) if f.power_unit_id==l]) for l in units])
    shares = [len(members[l])/len(line.furnaces) for l in units]
    ladles = splitCount(line.ladle_limit, shares)
    st = instance.initial_state
    out = {}
    for l, share, nl in zip(units, shares, ladles):
        fids = members[l]
        sub = CastingLineSpec(id=cid, furnaces=tuple(fids), v0_m3=line.v0_m3*share,
                              vmin_m3=line.vmin_m3*share, vmax_m3=line.vmax_m3*share,
                              gamma_kw_per_m3=line.gamma_kw_per_m3,
                              casting_segments=tuple([(b, r*share) for b, r in line.casting_segments]),
                              ladle_limit=nl, safety_margin_m3=line.safety_margin_m3*share,
                              p_max_kw=instance.lineCap(cid)*share)
        init = InitialState(buffer_m3={cid:instance.initialBuffer(cid)*share},
                            prior_taps=dict([(f, t) for f, t in st.prior_taps.items() if f in fids]),
                            pinned_starts=dict([(k, s) for k, s in st.pinned_starts.items() if k[0] in fids]))
        out[l] = PlantInstance(lines=(sub,), furnaces=tuple([instance.furnace(f) for f in fids]),
                               power_units={l:instance.unitCap(l, cid)}, global_p_max_kw=instance.global_p_max_kw,
                               initial_state=init, name=f'{instance.name}_{cid}_{l}')
    return out


def joinSolutions(subs:List[MilpSolution]) -> Dict[str, float]:
    '''union of the furnace variables of the sub-solutions. line-level floor variables are left out'''
    values = {}
    for s in subs:
        for n, v in s.values.items():
            if not n.startswith('Plow_'):
                values[n] = v
    return values


def decomposeAndWarmstart(instance:PlantInstance, cid:str, grid:TimeGrid, prices:np.ndarray,
                          config:EasConfig, profile:Union[str, Box, None]=None,
                          time_limit:Optional[float]=None) -> Tuple[MilpSolution, MilpModel]:
    '''solve one sub-model per power unit, check the joined solution against the full model and use
    it as the warm start of the full solve. the better of incumbent and final solve is returned'''
    subs = subInstances(instance, cid)
    logger.info(f'Line {cid}: decomposing into power units {list(subs.keys())}')
    solutions = []
    for l, sub in subs.items():
        m = buildEasModel(sub, cid, grid, prices, config, name=f'eas_{cid}_{l}')
        s = solve(m, profile, time_limit)
        if s.status==SolveStatus.INFEASIBLE:
            raise SubproblemInfeasible(f'Line {cid}: sub-model of power unit {l} is infeasible')
        if not s.hasValues:
            raise SolverFailed(f'Line {cid}: sub-model of power unit {l} returned no solution ({s.status.value})')
        solutions.append(s)
    full = buildEasModel(instance, cid, grid, prices, config)
    warm = full.completeValues(joinSolutions(solutions))
    broken = full.checkFeasible(warm)
    incumbent = None
    if len(broken)>0:
        logger.warning(f'Line {cid}: joined sub-solutions break {len(broken)} rows of the full model, e.g. {broken[:3]}. Solving without a warm start')
        warm = None
    else:
        incumbent = full.objectiveValue(warm)
        logger.info(f'Line {cid}: decomposed incumbent objective {incumbent:.4f}')
    sol = solve(full, profile, time_limit, warm_start=warm)
    if warm is not None and (not sol.hasValues or sol.objective>incumbent):
        logger.info(f'Line {cid}: keeping the decomposed incumbent')
        sol = MilpSolution(status=SolveStatus.FEASIBLE, values=warm, objective=incumbent, gap=sol.gap,
                           solve_seconds=sol.solve_seconds, message='decomposed incumbent')
    sol.incumbent_objective = incumbent
    return sol, full
