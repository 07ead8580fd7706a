#!/usr/bin/env python
'''Solver-agnostic MILP representation: named variables, linear constraints, objective, metadata'''

# external packages
import os, sys
import math
from typing import List, Dict, Tuple, Union, Any, Optional, Iterable
from dataclasses import dataclass, field
from enum import Enum
import logging

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import DuplicateName, UndeclaredVariable, InfeasibleSchedule, ModelError

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

INF = math.inf

#----------------------------------------------


class VarKind(str, Enum):
    CONTINUOUS = 'continuous'
    BINARY = 'binary'


class Sense(str, Enum):
    LE = '<='
    EQ = '='
    GE = '>='


class SolveStatus(str, Enum):
    OPTIMAL = 'Optimal'
    FEASIBLE = 'Feasible'
    INFEASIBLE = 'Infeasible'
    TIME_LIMIT = 'TimeLimit'
    ERROR = 'Error'


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VarKind
    lower: float
    upper: float


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: Dict[str, float]
    sense: Sense
    rhs: float


@dataclass
class MilpSolution:
    status: SolveStatus
    values: Dict[str, float] = field(default_factory=dict)
    objective: Optional[float] = None
    gap: Optional[float] = None
    solve_seconds: float = 0
    message: str = ''
    incumbent_objective: Optional[float] = None

    @property
    def hasValues(self) -> bool:
        return self.status in [SolveStatus.OPTIMAL, SolveStatus.FEASIBLE, SolveStatus.TIME_LIMIT] and len(self.values)>0


class LinExpr:
    '''linear expression: sum of coef*variable plus a constant'''

    def __init__(self, terms:Optional[Dict[str, float]]=None, const:float=0):
        self.terms = dict(terms) if terms else {}
        self.const = const

    @classmethod
    def var(cls, name:str, coef:float=1) -> 'LinExpr':
        return cls({name:coef})

    def copy(self) -> 'LinExpr':
        return LinExpr(self.terms, self.const)

    def addTerm(self, name:str, coef:float) -> 'LinExpr':
        self.terms[name] = self.terms.get(name, 0)+coef
        return self

    def add(self, other:Union['LinExpr', float], scale:float=1) -> 'LinExpr':
        '''in place self += scale*other'''
        if isinstance(other, LinExpr):
            for n, c in other.terms.items():
                self.terms[n] = self.terms.get(n, 0)+scale*c
            self.const += scale*other.const
        else:
            self.const += scale*other
        return self

    def __add__(self, other):
        return self.copy().add(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.copy().add(other, -1)

    def __rsub__(self, other):
        return (-self).add(other)

    def __mul__(self, k:float):
        return LinExpr(dict([(n, k*c) for n, c in self.terms.items()]), k*self.const)

    __rmul__ = __mul__

    def __neg__(self):
        return self*-1

    def value(self, values:Dict[str, float]) -> float:
        return self.const+sum([c*values[n] for n, c in self.terms.items()])

    def __repr__(self) -> str:
        return ' + '.join([f'{c:g}*{n}' for n, c in self.terms.items()]+[f'{self.const:g}'])


def lsum(exprs:Iterable[Union[LinExpr, float]]) -> LinExpr:
    '''sum of expressions without intermediate copies'''
    out = LinExpr()
    for e in exprs:
        out.add(e)
    return out


class MilpModel:
    '''a MILP with stable names. variables and constraints keep their declaration order'''

    def __init__(self, name:str='dsm'):
        self.name = name
        self.variables:List[Variable] = []
        self.index:Dict[str, int] = {}
        self.constraints:List[Constraint] = []
        self.conNames:set = set()
        self.objectiveSense = 'min'
        self.objective:Dict[str, float] = {}
        self.objectiveConstant = 0.
        self.metadata:Dict[str, Any] = {}

    #-------------------------------------------

    def addVar(self, name:str, kind:VarKind=VarKind.CONTINUOUS, lower:float=0, upper:float=INF) -> str:
        if name in self.index:
            raise DuplicateName(f'Variable {name} declared twice')
        if kind==VarKind.BINARY:
            lower, upper = 0, 1
        if lower>upper:
            raise ModelError(f'Variable {name} has lower bound {lower} above upper bound {upper}')
        self.index[name] = len(self.variables)
        self.variables.append(Variable(name, VarKind(kind), float(lower), float(upper)))
        return name

    def addBinary(self, name:str) -> str:
        return self.addVar(name, VarKind.BINARY)

    def hasVar(self, name:str) -> bool:
        return name in self.index

    def var(self, name:str) -> Variable:
        return self.variables[self.index[name]]

    def addConstraint(self, name:str, expr:Union[LinExpr, Dict[str, float]], sense:Union[Sense, str], rhs:float=0) -> bool:
        '''add expr (sense) rhs. constants in expr move to the right side. rows without variables are
        checked and dropped. returns True if a row was added'''
        if isinstance(expr, dict):
            expr = LinExpr(expr)
        sense = Sense(sense)
        rhs = rhs-expr.const
        terms = dict([(n, c) for n, c in expr.terms.items() if c!=0])
        for n in terms:
            if not n in self.index:
                raise UndeclaredVariable(f'Constraint {name} uses undeclared variable {n}')
        if len(terms)==0:
            tol = 1e-9*max(1, abs(rhs))
            ok = {Sense.LE:0<=rhs+tol, Sense.GE:0>=rhs-tol, Sense.EQ:abs(rhs)<=tol}[sense]
            if not ok:
                raise InfeasibleSchedule(f'Constraint {name} cannot hold: 0 {sense.value} {rhs:g}')
            return False
        if name in self.conNames:
            raise DuplicateName(f'Constraint {name} declared twice')
        self.conNames.add(name)
        self.constraints.append(Constraint(name, terms, sense, float(rhs)))
        return True

    def setObjective(self, expr:LinExpr, sense:str='min') -> None:
        if not sense in ['min', 'max']:
            raise ModelError(f'Objective sense must be min or max, got {sense}')
        for n in expr.terms:
            if not n in self.index:
                raise UndeclaredVariable(f'Objective uses undeclared variable {n}')
        self.objectiveSense = sense
        self.objective = dict([(n, c) for n, c in expr.terms.items() if c!=0])
        self.objectiveConstant = expr.const

    #-------------------------------------------

    @property
    def nVars(self) -> int:
        return len(self.variables)

    @property
    def nBinaries(self) -> int:
        return sum([v.kind==VarKind.BINARY for v in self.variables])

    @property
    def nConstraints(self) -> int:
        return len(self.constraints)

    def summary(self) -> str:
        return f'{self.name}: {self.nVars} variables ({self.nBinaries} binary), {self.nConstraints} constraints'

    def objectiveValue(self, values:Dict[str, float]) -> float:
        return self.objectiveConstant+sum([c*values.get(n, 0) for n, c in self.objective.items()])

    def checkFeasible(self, values:Dict[str, float], tol:float=1e-6) -> List[Tuple[str, float]]:
        '''list of (row or variable name, violation) for every bound, integrality or row the values break.
        missing variables count as violations'''
        out = []
        for v in self.variables:
            if not v.name in values:
                out.append((v.name, INF))
                continue
            x = values[v.name]
            viol = max(v.lower-x, x-v.upper, 0)
            if v.kind==VarKind.BINARY:
                viol = max(viol, abs(x-round(x)))
            if viol>tol:
                out.append((v.name, viol))
        if len(out)>0:
            return out
        for c in self.constraints:
            lhs = sum([a*values[n] for n, a in c.terms.items()])
            if c.sense==Sense.LE:
                viol = lhs-c.rhs
            elif c.sense==Sense.GE:
                viol = c.rhs-lhs
            else:
                viol = abs(lhs-c.rhs)
            if viol>tol:
                out.append((c.name, viol))
        return out

    def completeValues(self, values:Dict[str, float]) -> Dict[str, float]:
        '''fill variables missing from values with the bound closest to zero'''
        out = dict(values)
        for v in self.variables:
            if not v.name in out:
                out[v.name] = min(max(0, v.lower), v.upper)
        return out
