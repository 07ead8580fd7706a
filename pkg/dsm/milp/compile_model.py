#!/usr/bin/env python
'''Writing MilpModels as free-format MPS or LP text'''

# external packages
import os, sys
import math
from typing import List, Dict, Tuple, Union, Any
import logging

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import NameTooLong, EmptyModel, ModelError
from milp.milp_model import MilpModel, VarKind, Sense
from file.file_export import exportFile

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

OBJ = 'obj'

#----------------------------------------------


def num(v:float) -> str:
    '''shortest round-trip representation of a float'''
    v = float(v)
    if v==int(v) and abs(v)<1e15:
        return str(int(v))
    return repr(v)


class ModelFile:
    '''tools for creating model files'''

    def __init__(self, model:MilpModel, maxName:int=0):
        if maxName<=0:
            maxName = cfg.emit.max_name_length
        self.model = model
        self.maxName = maxName
        self.checkModel()
        self.negate = (model.objectiveSense=='max')
        self.s = ''

    def checkModel(self) -> None:
        if self.model.nVars==0:
            raise EmptyModel(f'Model {self.model.name} has no variables')
        for name in [v.name for v in self.model.variables]+[c.name for c in self.model.constraints]:
            if len(name)>self.maxName:
                raise NameTooLong(name, self.maxName)
            if len(name)==0 or any([ch.isspace() for ch in name]) or name==OBJ:
                raise ModelError(f'Name {name!r} cannot be written to a model file')

    def objCoef(self, name:str) -> float:
        c = self.model.objective.get(name, 0)
        return -c if self.negate else c

    def headerLines(self) -> List[str]:
        '''comment lines describing the objective'''
        lines = [f'model {self.model.name}: {self.model.nVars} columns, {self.model.nConstraints} rows']
        if self.negate:
            lines.append('objective sense: max, written as min of the negated objective')
        if self.model.objectiveConstant!=0:
            lines.append(f'objective constant (not written): {num(self.model.objectiveConstant)}')
        return lines


class compileMps(ModelFile):
    '''free-format MPS'''

    def __init__(self, model:MilpModel, maxName:int=0):
        super().__init__(model, maxName)
        s = ''.join([f'* {l}\n' for l in self.headerLines()])
        s = s+f'NAME {self.model.name}\n'
        s = s+self.rows()+self.columns()+self.rhs()+self.bounds()
        s = s+'ENDATA\n'
        self.s = s

    def rows(self) -> str:
        code = {Sense.LE:'L', Sense.GE:'G', Sense.EQ:'E'}
        s = f'ROWS\n N  {OBJ}\n'
        for c in self.model.constraints:
            s = s+f' {code[c.sense]}  {c.name}\n'
        return s

    def columns(self) -> str:
        entries = dict([(v.name, []) for v in self.model.variables])
        for c in self.model.constraints:
            for n, a in c.terms.items():
                entries[n].append((c.name, a))
        lines = ['COLUMNS']
        marker = 0
        inInt = False
        for v in self.model.variables:
            isInt = v.kind==VarKind.BINARY
            if isInt and not inInt:
                lines.append(f"    MARK{marker:04d}  'MARKER'  'INTORG'")
                marker += 1
                inInt = True
            elif inInt and not isInt:
                lines.append(f"    MARK{marker:04d}  'MARKER'  'INTEND'")
                marker += 1
                inInt = False
            oc = self.objCoef(v.name)
            if oc!=0 or len(entries[v.name])==0:
                lines.append(f'    {v.name}  {OBJ}  {num(oc)}')
            for row, a in entries[v.name]:
                lines.append(f'    {v.name}  {row}  {num(a)}')
        if inInt:
            lines.append(f"    MARK{marker:04d}  'MARKER'  'INTEND'")
        return '\n'.join(lines)+'\n'

    def rhs(self) -> str:
        s = 'RHS\n'
        for c in self.model.constraints:
            if c.rhs!=0:
                s = s+f'    RHS  {c.name}  {num(c.rhs)}\n'
        return s

    def bounds(self) -> str:
        s = 'BOUNDS\n'
        for v in self.model.variables:
            if v.kind==VarKind.BINARY:
                s = s+f' BV BND  {v.name}\n'
            elif v.lower==v.upper:
                s = s+f' FX BND  {v.name}  {num(v.lower)}\n'
            elif v.lower==-math.inf and v.upper==math.inf:
                s = s+f' FR BND  {v.name}\n'
            else:
                if v.lower==-math.inf:
                    s = s+f' MI BND  {v.name}\n'
                elif v.lower!=0:
                    s = s+f' LO BND  {v.name}  {num(v.lower)}\n'
                if v.upper!=math.inf:
                    s = s+f' UP BND  {v.name}  {num(v.upper)}\n'
        return s


class compileLp(ModelFile):
    '''CPLEX-style LP text'''

    perLine = 8

    def __init__(self, model:MilpModel, maxName:int=0):
        super().__init__(model, maxName)
        s = ''.join([f'\\ {l}\n' for l in self.headerLines()])
        s = s+'Minimize\n'
        obj = dict([(v.name, self.objCoef(v.name)) for v in self.model.variables if self.objCoef(v.name)!=0])
        if len(obj)==0:
            obj = {self.model.variables[0].name:0}
        s = s+self.expression(OBJ, obj)+'\n'
        s = s+'Subject To\n'
        for c in self.model.constraints:
            s = s+self.expression(c.name, c.terms)+f' {c.sense.value} {num(c.rhs)}\n'
        s = s+self.bounds()
        binaries = [v.name for v in self.model.variables if v.kind==VarKind.BINARY]
        if len(binaries)>0:
            s = s+'Binaries\n'
            for i in range(0, len(binaries), self.perLine):
                s = s+' '+' '.join(binaries[i:i+self.perLine])+'\n'
        s = s+'End\n'
        self.s = s

    def expression(self, label:str, terms:Dict[str, float]) -> str:
        parts = []
        for i, (n, a) in enumerate(terms.items()):
            sign = '-' if a<0 else '+'
            if i==0:
                parts.append(f'{"-" if a<0 else ""}{num(abs(a))} {n}')
            else:
                parts.append(f'{sign} {num(abs(a))} {n}')
        lines = [' '.join(parts[i:i+self.perLine]) for i in range(0, len(parts), self.perLine)]
        return f' {label}: '+'\n   '.join(lines)

    def bounds(self) -> str:
        s = 'Bounds\n'
        for v in self.model.variables:
            if v.kind==VarKind.BINARY:
                continue
            if v.lower==-math.inf and v.upper==math.inf:
                s = s+f' {v.name} free\n'
            elif v.lower==v.upper:
                s = s+f' {v.name} = {num(v.lower)}\n'
            else:
                lo = '-inf' if v.lower==-math.inf else num(v.lower)
                if v.upper==math.inf:
                    if v.lower!=0:
                        s = s+f' {v.name} >= {lo}\n'
                else:
                    s = s+f' {lo} <= {v.name} <= {num(v.upper)}\n'
        return s


def emitModel(model:MilpModel, fmt:str='mps', maxName:int=0) -> str:
    '''text of the model in MPS or LP format. identical models give identical text'''
    fmt = fmt.lower()
    if fmt=='mps':
        return compileMps(model, maxName).s
    elif fmt in ['lp', 'lp-text']:
        return compileLp(model, maxName).s
    raise ValueError(f'Unknown model format {fmt}. Options are mps, lp')


def exportModel(model:MilpModel, folder:str, file:str, fmt:str='mps') -> str:
    '''write the model file and return its path'''
    return exportFile(folder, file, emitModel(model, fmt), diag=False)
