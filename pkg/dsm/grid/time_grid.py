#!/usr/bin/env python
'''Time discretizations of the delivery day: scheduling steps, settlement intervals and reserve bid blocks.
All indices are 1-based: steps k in 1..K, settlement intervals q in 1..|Q|, blocks d in 1..|D|'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any
from dataclasses import dataclass
import logging

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import NonDivisible, InputError
from tools.val_tools import divides, intRatio

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


@dataclass(frozen=True)
class TimeGrid:
    '''scheduling grid. step_seconds is δt, horizon_steps is K, settlement_steps is N_q,
    reserve_block_steps is the number of scheduling steps in one bid block'''
    step_seconds: float
    horizon_steps: int
    settlement_steps: int
    market_step_seconds: float
    reserve_block_steps: int

    @property
    def K(self) -> int:
        return self.horizon_steps

    @property
    def Nq(self) -> int:
        return self.settlement_steps

    @property
    def step_hours(self) -> float:
        return self.step_seconds/3600

    @property
    def horizon_seconds(self) -> float:
        return self.horizon_steps*self.step_seconds

    @property
    def settlement_seconds(self) -> float:
        return self.settlement_steps*self.step_seconds

    @property
    def settlement_hours(self) -> float:
        return self.settlement_seconds/3600

    @property
    def n_settlements(self) -> int:
        '''|Q|'''
        return self.horizon_steps//self.settlement_steps

    @property
    def settlements_per_block(self) -> int:
        return self.reserve_block_steps//self.settlement_steps

    @property
    def n_blocks(self) -> int:
        '''|D|'''
        return self.horizon_steps//self.reserve_block_steps

    def settlementOf(self, k:int) -> int:
        '''settlement interval q containing step k'''
        return (k-1)//self.settlement_steps+1

    def blockOf(self, q:int) -> int:
        '''bid block d containing settlement interval q'''
        return (q-1)//self.settlements_per_block+1

    def withBlockSteps(self, blockSteps:int) -> 'TimeGrid':
        '''the same grid with a different bid block length'''
        if blockSteps%self.settlement_steps!=0 or self.horizon_steps%blockSteps!=0:
            raise NonDivisible(self.settlement_steps, blockSteps, 'steps (settlement | block)')
        return TimeGrid(self.step_seconds, self.horizon_steps, self.settlement_steps, self.market_step_seconds, blockSteps)

    def toDict(self) -> dict:
        return {'step_seconds':self.step_seconds, 'horizon_seconds':self.horizon_seconds,
                'settlement_seconds':self.settlement_seconds, 'market_seconds':self.market_step_seconds,
                'block_seconds':self.reserve_block_steps*self.step_seconds}


def buildTimeGrid(step_seconds:float, horizon_seconds:float, settlement_seconds:float, market_seconds:float, block_seconds:float) -> TimeGrid:
    '''build the grid and check that every duration divides the next one'''
    for name, val in [('step', step_seconds), ('horizon', horizon_seconds), ('settlement', settlement_seconds),
                      ('market', market_seconds), ('block', block_seconds)]:
        if not val>0:
            raise InputError(f'{name} duration must be positive, got {val}')
    for a, b, what in [(step_seconds, settlement_seconds, '(step | settlement)'),
                       (step_seconds, market_seconds, '(step | market)'),
                       (settlement_seconds, block_seconds, '(settlement | block)'),
                       (step_seconds, horizon_seconds, '(step | horizon)'),
                       (settlement_seconds, horizon_seconds, '(settlement | horizon)'),
                       (market_seconds, horizon_seconds, '(market | horizon)'),
                       (block_seconds, horizon_seconds, '(block | horizon)')]:
        if not divides(a, b):
            raise NonDivisible(a, b, what)
    grid = TimeGrid(step_seconds=float(step_seconds),
                    horizon_steps=intRatio(step_seconds, horizon_seconds),
                    settlement_steps=intRatio(step_seconds, settlement_seconds),
                    market_step_seconds=float(market_seconds),
                    reserve_block_steps=intRatio(step_seconds, block_seconds))
    logger.debug(f'Grid K={grid.K}, Nq={grid.Nq}, |Q|={grid.n_settlements}, |D|={grid.n_blocks}')
    return grid


def gridFromConfig(c) -> TimeGrid:
    '''build the grid from the grid section of a config Box'''
    g = c.grid
    return buildTimeGrid(g.step_seconds, g.horizon_seconds, g.settlement_seconds, g.market_seconds, g.block_seconds)


def settlementSlots(grid:TimeGrid) -> List[List[int]]:
    '''K_q = {k | (q-1)N_q < k <= qN_q} for every q'''
    n = grid.settlement_steps
    return [list(range((q-1)*n+1, q*n+1)) for q in range(1, grid.n_settlements+1)]


def blockSlots(grid:TimeGrid) -> List[List[int]]:
    '''Q_d for every bid block d'''
    n = grid.settlements_per_block
    return [list(range((d-1)*n+1, d*n+1)) for d in range(1, grid.n_blocks+1)]
