#!/usr/bin/env python
'''Reading typed values back out of a solved model: stage starts, furnace end steps, power arrays
and scalar decisions. valuesFromSchedule goes the other way. The node records in
model.metadata['nodes'] describe which activation values are variables and which are fixed'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
import logging
import numpy as np

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import MissingVariable, SolverInconsistency, SolverFailed
from milp.milp_model import MilpModel, MilpSolution
from plant.schedule import Schedule
from milp.naming import nameX, nameP, nameY, namePhi, nameCum, nameZeta

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

Term = Union[int, str]

# solver values below this are zero power
SNAP_KW = 1e-9

#----------------------------------------------


def node(f:str, m:Optional[int], j:Optional[int], es:int, ls:int, relaxed:bool=False,
         power:bool=False, pwLo:int=0, pwHi:int=-1) -> dict:
    '''record of one activation sequence. m=None marks the end node of furnace f.
    es: first step x can be 1. ls: first step x is fixed to 1 (non-relaxed nodes).
    pwLo..pwHi: steps with a power variable'''
    return {'f':f, 'm':m, 'j':j, 'es':int(es), 'ls':int(ls), 'relaxed':bool(relaxed),
            'power':bool(power), 'pwLo':int(pwLo), 'pwHi':int(pwHi)}


def activationTerm(nd:dict, k:int, K:int) -> Term:
    '''x of the node at step k as 0, 1 or a variable name.
    relaxed stage nodes reuse their step-K value at K+1 under the zeta name; a relaxed end node
    has its own zeta at K+1'''
    isEnd = nd['m'] is None
    if k<=0 or k<nd['es']:
        return 0
    if k>=K+1:
        if not nd['relaxed']:
            return 1
        if isEnd:
            return nameZeta(nd['f'], None, None)
        return activationTerm(nd, K, K)
    if nd['relaxed']:
        if k==K and not isEnd:
            return nameZeta(nd['f'], nd['m'], nd['j'])
        return nameX(nd['f'], nd['m'], nd['j'], k)
    if k>=nd['ls']:
        return 1
    return nameX(nd['f'], nd['m'], nd['j'], k)


def termValue(t:Term, values:Dict[str, float]) -> int:
    if isinstance(t, str):
        if not t in values:
            raise MissingVariable(f'Solution has no value for {t}')
        return int(values[t]>0.5)
    return int(t)


#----------------------------------------------

def startStep(nd:dict, K:int, values:Dict[str, float]) -> Optional[int]:
    '''first step with x=1; K+1 if the node only starts at the horizon end; None if deferred'''
    prev = 0
    first = None
    for k in range(max(1, nd['es']), K+2):
        x = termValue(activationTerm(nd, k, K), values)
        if x<prev:
            raise SolverInconsistency(f'Activation of {nd["f"]} cycle {nd["m"]} stage {nd["j"]} drops back to 0 at step {k}')
        if x==1 and first is None:
            first = k
        prev = x
    return first


def extractStarts(model:MilpModel, sol:MilpSolution) -> Tuple[Dict[Tuple[str, int, int], Optional[int]], Dict[str, Optional[int]]]:
    '''start step of every stage and end step of every furnace in the model'''
    if not sol.hasValues:
        raise SolverFailed(f'{model.name}: no solution values ({sol.status.value})')
    K = model.metadata['K']
    starts = {}
    ends = {}
    for nd in model.metadata['nodes']:
        s = startStep(nd, K, sol.values)
        if nd['m'] is None:
            ends[nd['f']] = s
            continue
        if s is not None and s>K and not nd['relaxed']:
            raise SolverInconsistency(f'Mandatory stage {nd["f"]} cycle {nd["m"]} stage {nd["j"]} never starts')
        starts[(nd['f'], nd['m'], nd['j'])] = None if (s is None or s>K) else s
    return starts, ends


def snapPower(x:float, upper:float) -> float:
    '''solver power clipped to [0, upper], with solver noise around zero set to 0'''
    if x<SNAP_KW:
        return 0.
    return min(x, upper)


def extractPower(model:MilpModel, sol:MilpSolution, starts:Dict[Tuple[str, int, int], Optional[int]],
                 ends:Dict[str, Optional[int]]) -> Dict[Tuple[str, int, int], np.ndarray]:
    '''power of every stage at k = 1..K. samples outside the extracted stage interval are set to 0'''
    K = model.metadata['K']
    nodes = model.metadata['nodes']
    out = {}
    for i, nd in enumerate(nodes):
        if nd['m'] is None:
            continue
        key = (nd['f'], nd['m'], nd['j'])
        p = np.zeros(K)
        if nd['power']:
            for k in range(nd['pwLo'], nd['pwHi']+1):
                n = nameP(nd['f'], nd['m'], nd['j'], k)
                if not n in sol.values:
                    raise MissingVariable(f'Solution has no value for {n}')
                p[k-1] = snapPower(sol.values[n], model.variables[model.index[n]].upper)
        s = starts[key]
        nxt = nodes[i+1]
        e = ends[nd['f']] if nxt['m'] is None else starts.get((nxt['f'], nxt['m'], nxt['j']))
        active = np.zeros(K, dtype=bool)
        if s is not None:
            stop = K+1 if e is None else e
            active[s-1:stop-1] = True
        clipped = np.abs(p[~active]).max() if (~active).any() else 0
        if clipped>1e-9:
            logger.debug(f'{model.name}: clipped {clipped:g} kW outside stage {key}')
        p[~active] = 0
        out[key] = p
    return out


def extractScalar(sol:MilpSolution, name:str, default:Optional[float]=None) -> float:
    if name in sol.values:
        return float(sol.values[name])
    if default is None:
        raise MissingVariable(f'Solution has no value for {name}')
    return default



#----------------------------------------------

def valuesFromSchedule(model:MilpModel, schedule:Schedule, tol:float=1e-9) -> Dict[str, float]:
    '''values of the process variables (activations, fractions, power, on/off and cumulative
    counters) that reproduce the schedule. other variables are left out'''
    K = model.metadata['K']
    nodes = model.metadata['nodes']
    values = {}
    steps = np.arange(1, K+2)
    for i, nd in enumerate(nodes):
        if nd['m'] is None:
            s = schedule.end_step.get(nd['f'])
        else:
            s = schedule.start_step[(nd['f'], nd['m'], nd['j'])]
        x = np.zeros(K+2) if s is None else np.concatenate([[0], (steps>=s).astype(float)])
        for k in range(max(1, nd['es']), K+2):
            t = activationTerm(nd, k, K)
            if isinstance(t, str):
                values[t] = x[k]
        if nd['m'] is None:
            continue
        f, m, j = nd['f'], nd['m'], nd['j']
        nxt = nodes[i+1]
        sn = schedule.end_step.get(f) if nxt['m'] is None else schedule.start_step[(nxt['f'], nxt['m'], nxt['j'])]
        if model.hasVar(namePhi(f, m, j)):
            values[namePhi(f, m, j)] = float(sn is not None)
        if not nd['power']:
            continue
        p = schedule.power_kw[(f, m, j)]
        active = np.zeros(K+1)
        if s is not None:
            active[s:(K+1 if sn is None else sn)] = 1
        ycum, ecum, acum = 0., 0., 0.
        for k in range(nd['pwLo'], nd['pwHi']+1):
            values[nameP(f, m, j, k)] = float(p[k-1])
            if model.hasVar(nameY(f, m, j, k)):
                semi = model.metadata.get('semi', {}).get((f, m, j), True)
                y = float(active[k]>0 and (p[k-1]>tol or not semi))
                values[nameY(f, m, j, k)] = y
                ycum += y
                if model.hasVar(nameCum('ycum', f, m, j, k)):
                    values[nameCum('ycum', f, m, j, k)] = ycum
            if model.hasVar(nameCum('ecum', f, m, j, k)):
                ecum += p[k-1]*schedule.step_seconds/3600
                acum += active[k]
                values[nameCum('ecum', f, m, j, k)] = ecum
                values[nameCum('acum', f, m, j, k)] = acum
    return values
