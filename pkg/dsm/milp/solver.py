#!/usr/bin/env python
'''Solving MilpModels, either in process with scipy's HiGHS interface or with an external solver
that reads a model file and writes a solution file'''

# external packages
import os, sys
import shlex
import shutil
import subprocess
import tempfile
from typing import List, Dict, Tuple, Union, Any, Optional
import logging
import numpy as np
from scipy.optimize import milp, LinearConstraint, Bounds
from scipy.sparse import coo_matrix
from box import Box

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg, solverProfile
from tools.errors import SolverNotFound, SolverCrashed, UnparsableSolution
from tools.logs import stopwatch
from milp.milp_model import MilpModel, MilpSolution, SolveStatus, VarKind, Sense
from milp.compile_model import exportModel
from milp.solution_reader import readSolution, writeStartFile

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


def resolveProfile(profile:Union[str, Box, dict, None]) -> Box:
    if profile is None or isinstance(profile, str):
        return solverProfile(cfg, profile or '')
    return Box(profile)


def solve(model:MilpModel, profile:Union[str, Box, dict, None]=None, time_limit:Optional[float]=None,
          warm_start:Optional[Dict[str, float]]=None, gap:Optional[float]=None, workdir:str='') -> MilpSolution:
    '''solve the model. profile is a profile name from the solver section of the config or a profile Box.
    warm_start maps variable names to a feasible assignment'''
    p = resolveProfile(profile)
    if time_limit is None:
        time_limit = cfg.solver.eas_time_limit
    if gap is None:
        gap = cfg.solver.gap
    logger.info(f'Solving {model.summary()} with {p.get("name", p.kind)}')
    with stopwatch() as sw:
        if p.kind=='scipy':
            sol = solveScipy(model, time_limit, gap, warm_start)
        elif p.kind=='external':
            sol = solveExternal(model, p, time_limit, gap, warm_start, workdir)
        else:
            raise ValueError(f'Unknown solver kind {p.kind}. Options are scipy, external')
    sol.solve_seconds = sw.seconds
    if sol.hasValues:
        sol.objective = model.objectiveValue(sol.values)
    logger.info(f'{model.name}: {sol.status.value}, objective {sol.objective}, {sol.solve_seconds:.2f} s')
    return sol


def fallbackToStart(model:MilpModel, sol:MilpSolution, warm_start:Optional[Dict[str, float]]) -> MilpSolution:
    '''keep a feasible warm start as the incumbent when the solver stopped at its time limit without
    a solution or with a worse one'''
    if sol.status!=SolveStatus.TIME_LIMIT or warm_start is None:
        return sol
    values = model.completeValues(warm_start)
    if len(sol.values)>0:
        sign = 1 if model.objectiveSense=='min' else -1
        if sign*model.objectiveValue(values)>=sign*model.objectiveValue(sol.values):
            return sol
    if len(model.checkFeasible(values))==0:
        logger.info(f'{model.name}: keeping the warm start as the incumbent')
        sol.values = values
    return sol


#----------------------------------------------

def matrices(model:MilpModel) -> Tuple[np.ndarray, Any, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    '''objective vector, sparse row matrix, row bounds, variable bounds, integrality'''
    n = model.nVars
    c = np.zeros(n)
    for name, a in model.objective.items():
        c[model.index[name]] = a
    rows, cols, data = [], [], []
    lo = np.empty(model.nConstraints)
    hi = np.empty(model.nConstraints)
    for i, con in enumerate(model.constraints):
        for name, a in con.terms.items():
            rows.append(i)
            cols.append(model.index[name])
            data.append(a)
        lo[i] = con.rhs if con.sense in [Sense.GE, Sense.EQ] else -np.inf
        hi[i] = con.rhs if con.sense in [Sense.LE, Sense.EQ] else np.inf
    A = coo_matrix((data, (rows, cols)), shape=(model.nConstraints, n)).tocsr()
    vlo = np.array([v.lower for v in model.variables])
    vhi = np.array([v.upper for v in model.variables])
    integrality = np.array([1 if v.kind==VarKind.BINARY else 0 for v in model.variables])
    return c, A, lo, hi, vlo, vhi, integrality


def solveScipy(model:MilpModel, time_limit:float, gap:float, warm_start:Optional[Dict[str, float]]) -> MilpSolution:
    '''in-process HiGHS. this interface takes no start solution, so a warm start only serves as the
    fallback incumbent'''
    c, A, lo, hi, vlo, vhi, integrality = matrices(model)
    if model.objectiveSense=='max':
        c = -c
    if warm_start is not None:
        logger.debug(f'{model.name}: scipy backend keeps the warm start as fallback only')
    constraints = [LinearConstraint(A, lo, hi)] if model.nConstraints>0 else []
    res = milp(c, constraints=constraints, integrality=integrality, bounds=Bounds(vlo, vhi),
               options={'time_limit':time_limit, 'mip_rel_gap':gap, 'disp':False})
    status = {0:SolveStatus.OPTIMAL, 1:SolveStatus.TIME_LIMIT, 2:SolveStatus.INFEASIBLE}.get(res.status, SolveStatus.ERROR)
    values = {}
    if res.x is not None and status!=SolveStatus.INFEASIBLE:
        x = np.where(integrality==1, np.round(res.x), res.x)
        values = dict([(v.name, float(xi)) for v, xi in zip(model.variables, x)])
    sol = MilpSolution(status=status, values=values, gap=getattr(res, 'mip_gap', None), message=str(res.message))
    if status==SolveStatus.ERROR:
        logger.warning(f'{model.name}: HiGHS returned status {res.status}: {res.message}')
    return fallbackToStart(model, sol, warm_start)


#----------------------------------------------

def solveExternal(model:MilpModel, p:Box, time_limit:float, gap:float,
                  warm_start:Optional[Dict[str, float]], workdir:str='') -> MilpSolution:
    '''write the model, run the solver command, read the solution file'''
    keep = cfg.solver.get('keep_files', False) or len(workdir)>0
    folder = workdir if len(workdir)>0 else tempfile.mkdtemp(prefix='dsm_')
    try:
        fmt = p.get('model_format', 'mps')
        modelfile = exportModel(model, folder, f'{model.name}.{fmt}', fmt)
        solfile = os.path.join(folder, f'{model.name}.sol')
        startArg = ''
        if warm_start is not None and len(p.get('start_flag', ''))>0:
            startfile = writeStartFile(folder, f'{model.name}_start.sol', model, warm_start)
            startArg = p.start_flag.format(start=startfile)
        cmd = p.command.format(model=modelfile, solution=solfile, time_limit=time_limit, gap=gap, start_arg=startArg)
        args = shlex.split(cmd)
        if shutil.which(args[0]) is None:
            raise SolverNotFound(f'Solver executable {args[0]} not found')
        logger.debug(f'Running {cmd}')
        try:
            result = subprocess.run(args, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
                                    timeout=2*time_limit+60, cwd=folder)
        except subprocess.TimeoutExpired as e:
            raise SolverCrashed(-1, f'no response after {e.timeout} s') from e
        if not os.path.exists(solfile) or os.path.getsize(solfile)==0:
            if result.returncode!=0:
                raise SolverCrashed(result.returncode, result.stderr or result.stdout)
            if 'infeasible' in result.stdout.lower():
                return MilpSolution(status=SolveStatus.INFEASIBLE, message=result.stdout[-200:])
            raise UnparsableSolution(f'Solver wrote no solution file. Output: {result.stdout[-300:]}')
        sol = readSolution(solfile, p.get('dialect', 'name_value'), model, p.get('fill_missing', False))
        return fallbackToStart(model, sol, warm_start)
    finally:
        if not keep:
            shutil.rmtree(folder, ignore_errors=True)
