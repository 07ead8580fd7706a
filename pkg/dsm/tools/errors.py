#!/usr/bin/env python
'''Exceptions raised by the scheduling toolkit. The cli maps each family to an exit code.'''

# external packages
from typing import List, Dict, Tuple, Union, Any

#----------------------------------------------


class DSMError(Exception):
    '''base class for all toolkit errors'''
    exitCode = 1


#------ input errors (exit 1)

class InputError(DSMError):
    exitCode = 1

class NonDivisible(InputError):
    '''a duration does not divide another one'''

    def __init__(self, a:float, b:float, what:str=''):
        self.pair = (a, b)
        super().__init__(f'{a:g} does not divide {b:g} {what}'.strip())

class HorizonMismatch(InputError):
    pass

class InstanceError(InputError):
    '''the plant instance file is inconsistent'''

class MissingFile(InputError):
    def __init__(self, path:str):
        self.path = path
        super().__init__(f'File not found: {path}')

class MalformedRow(InputError):
    def __init__(self, line:int, msg:str=''):
        self.line = line
        super().__init__(f'Malformed row at line {line} {msg}'.strip())

class GapDetected(InputError):
    def __init__(self, timestamp:Any):
        self.timestamp = timestamp
        super().__init__(f'Gap in price series before {timestamp}')

class EmptyFile(InputError):
    pass

class MissingPrice(InputError):
    pass

class DimensionMismatch(InputError):
    pass

class NegativeDuration(InputError):
    pass

class ZeroEnergy(InputError):
    pass


#------ model construction errors (exit 1)

class ModelError(DSMError):
    exitCode = 1

class DuplicateName(ModelError):
    pass

class UndeclaredVariable(ModelError):
    pass

class NameTooLong(ModelError):
    def __init__(self, name:str, limit:int):
        self.name = name
        super().__init__(f'Name longer than {limit} characters: {name}')

class EmptyModel(ModelError):
    pass


#------ solver errors (exit 2)

class SolverError(DSMError):
    exitCode = 2

class SolverNotFound(SolverError):
    pass

class SolverCrashed(SolverError):
    def __init__(self, returncode:int, stderr:str):
        self.returncode = returncode
        self.stderr = stderr[-500:]
        super().__init__(f'Solver exited with code {returncode}: {self.stderr}')

class UnparsableSolution(SolverError):
    pass

class SolverFailed(SolverError):
    '''the solver returned no usable solution'''

class MissingVariable(SolverError):
    pass

class SolverInconsistency(MissingVariable):
    '''the solution contradicts the model structure'''


#------ infeasibility errors (exit 3)

class InfeasibilityError(DSMError):
    exitCode = 3

class InfeasibleHorizon(InfeasibilityError):
    pass

class InfeasibleSchedule(InfeasibilityError):
    pass

class InfeasibleContingency(InfeasibilityError):
    pass

class InfeasibleAggregation(InfeasibilityError):
    pass

class SubproblemInfeasible(InfeasibilityError):
    pass

class DecompositionInapplicable(InfeasibilityError):
    pass

class ZeroBaseline(InfeasibilityError):
    def __init__(self, q:int):
        self.q = q
        super().__init__(f'Baseline is zero in settlement interval {q}')

class ValidationFailed(InfeasibilityError):
    pass
