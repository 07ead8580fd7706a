#!/usr/bin/env python
'''Bid blocks of one casting line: the capacity is the smallest reserve of the block's intervals and
the minimum price is the largest unit cost'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import dataclass, field
import logging
import numpy as np

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from grid.time_grid import TimeGrid, blockSlots
from reserve.reserve_model import ReserveParams
from reserve.reserve_day import ReserveResult

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


@dataclass(frozen=True)
class BidBlock:
    d: int
    capacity_kw: float
    min_price_eur_per_kw: float
    eligible: bool
    reason: str = ''
    R_kw: Dict[int, float] = field(default_factory=dict)
    line: str = ''

    def toDict(self) -> dict:
        return {'d':self.d, 'line':self.line, 'capacity_kw':self.capacity_kw,
                'min_price_eur_per_kw':self.min_price_eur_per_kw if np.isfinite(self.min_price_eur_per_kw) else None,
                'eligible':self.eligible, 'reason':self.reason,
                'R_kw':dict([(str(q), r) for q, r in self.R_kw.items()])}


def bidFromDict(d:dict) -> BidBlock:
    price = d['min_price_eur_per_kw']
    return BidBlock(d=int(d['d']), capacity_kw=float(d['capacity_kw']),
                    min_price_eur_per_kw=np.inf if price is None else float(price),
                    eligible=bool(d['eligible']), reason=d.get('reason', ''),
                    R_kw=dict([(int(q), float(r)) for q, r in d.get('R_kw', {}).items()]), line=d.get('line', ''))


def blockBid(d:int, qs:List[int], results:Dict[int, ReserveResult], params:ReserveParams, line:str='') -> BidBlock:
    '''one block. intervals without a result make the block ineligible'''
    missing = [q for q in qs if not q in results]
    R = dict([(q, results[q].R_kw) for q in qs if q in results])
    if len(missing)>0:
        return BidBlock(d, 0., np.inf, False, f'no result for intervals {missing}', R, line)
    cap = min(R.values())
    price = max([results[q].unit_cost for q in qs])
    reason = ''
    if not cap>0:
        reason = 'no reserve'
    elif cap<params.min_bid_kw:
        reason = f'below the minimum bid of {params.min_bid_kw:g} kW'
    elif cap>params.max_bid_kw:
        reason = f'above the maximum bid of {params.max_bid_kw:g} kW'
    return BidBlock(d, float(cap), float(price), reason=='', reason, R, line)


def bidBlocks(results:Dict[int, ReserveResult], grid:TimeGrid, params:ReserveParams,
              block_steps:Optional[int]=None, line:str='') -> List[BidBlock]:
    '''bid of every block. block_steps regroups the same results under another block length'''
    if block_steps is not None:
        grid = grid.withBlockSteps(block_steps)
    bids = [blockBid(d, qs, results, params, line) for d, qs in enumerate(blockSlots(grid), start=1)]
    logger.info(f'Line {line}: {sum([b.eligible for b in bids])} of {len(bids)} blocks eligible')
    return bids
