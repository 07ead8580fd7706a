#!/usr/bin/env python
'''Numeric helpers shared by the grid, plant and market modules'''

# external packages
from typing import List, Dict, Tuple, Union, Any
import math
import logging

# local packages


# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

# relative slack for float divisions that should land on integers
FUZZ = 1e-9

#----------------------------------------------

def ceilSteps(amount:float, perStep:float) -> int:
    '''number of whole steps needed to cover amount when each step covers perStep.
    6.0000000001 steps counts as 6'''
    if amount<=0:
        return 0
    ratio = amount/perStep
    r = round(ratio)
    if abs(ratio-r)<=FUZZ*max(1, abs(ratio)):
        return int(r)
    return int(math.ceil(ratio))


def divides(a:float, b:float) -> bool:
    '''True if b is an integer multiple of a'''
    if a<=0:
        return False
    ratio = b/a
    return abs(ratio-round(ratio))<=FUZZ*max(1, abs(ratio)) and round(ratio)>=1


def intRatio(a:float, b:float) -> int:
    '''b/a as an int, assuming divides(a,b)'''
    return int(round(b/a))
