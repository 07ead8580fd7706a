#!/usr/bin/env python
'''Internal aggregation of the bids of several casting lines when the market may activate the plant
more than once a day. beta picks the lines offered on their own in a block, mu the lines whose bid
bounds the shared capacity Rt of the block'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import dataclass, field
import logging
import numpy as np
from box import Box

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import InfeasibleAggregation, InputError, SolverFailed
from milp.milp_model import MilpModel, LinExpr, lsum, SolveStatus
from milp.naming import nameBeta, nameMu, nameRt
from milp.solver import solve
from reserve.bids import BidBlock

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


@dataclass
class AggregationPlan:
    N_a: int
    blocks: List[int]
    lines: List[str]
    beta: Dict[Tuple[int, str], int] = field(default_factory=dict)
    mu: Dict[Tuple[int, str], int] = field(default_factory=dict)
    Rt: Dict[int, float] = field(default_factory=dict)
    objective: float = 0
    offers: Dict[int, List[dict]] = field(default_factory=dict)

    def toDict(self) -> dict:
        return {'N_a':self.N_a, 'blocks':self.blocks, 'lines':self.lines, 'objective':self.objective,
                'beta':[[d, c, b] for (d, c), b in self.beta.items()],
                'mu':[[d, c, u] for (d, c), u in self.mu.items()],
                'Rt_kw':dict([(str(d), r) for d, r in self.Rt.items()]),
                'offers':dict([(str(d), o) for d, o in self.offers.items()])}


def bidTable(bids:Dict[str, List[BidBlock]]) -> Tuple[List[int], List[str], Dict[Tuple[int, str], Tuple[float, float]]]:
    '''blocks, lines and (capacity, price) per (block, line). ineligible bids count as zero capacity'''
    lines = sorted(bids.keys())
    if len(lines)==0:
        raise InputError('No bids to aggregate')
    blocks = sorted(set([b.d for c in lines for b in bids[c]]))
    table = {}
    for c in lines:
        byBlock = dict([(b.d, b) for b in bids[c]])
        for d in blocks:
            b = byBlock.get(d)
            if b is None or not b.eligible:
                table[(d, c)] = (0., 0.)
            else:
                if not np.isfinite(b.min_price_eur_per_kw):
                    raise InputError(f'Bid of line {c} in block {d} has no finite price')
                table[(d, c)] = (b.capacity_kw, b.min_price_eur_per_kw)
    return blocks, lines, table


def singleActivation(bids:Dict[str, List[BidBlock]]) -> AggregationPlan:
    '''one activation a day: the plant offers the sum of the line capacities at the capacity-weighted price'''
    blocks, lines, table = bidTable(bids)
    plan = AggregationPlan(N_a=1, blocks=blocks, lines=lines)
    for d in blocks:
        R = sum([table[(d, c)][0] for c in lines])
        cost = sum([table[(d, c)][0]*table[(d, c)][1] for c in lines])
        price = cost/R if R>0 else None
        plan.offers[d] = [{'lines':[c for c in lines if table[(d, c)][0]>0], 'capacity_kw':R, 'price_eur_per_kw':price}]
        plan.Rt[d] = R
        plan.objective += cost
    return plan


def buildAggregationModel(blocks:List[int], lines:List[str], table:Dict[Tuple[int, str], Tuple[float, float]],
                          N_a:int, reference_price:float=1) -> MilpModel:
    model = MilpModel(f'aggregate_na{N_a}')
    obj = LinExpr()
    nc = len(lines)
    for d in blocks:
        top = max([table[(d, c)][0] for c in lines])
        Rt = model.addVar(nameRt(d), lower=0, upper=top)
        obj.addTerm(Rt, reference_price)
        for c in lines:
            R, lam = table[(d, c)]
            b = model.addBinary(nameBeta(d, c))
            u = model.addBinary(nameMu(d, c))
            obj.addTerm(b, R*lam)
            model.addConstraint(f'rtb_d{d}_c{c}', LinExpr.var(Rt)+LinExpr.var(b, top), '<=', top)
            model.addConstraint(f'rtm_d{d}_c{c}', LinExpr.var(Rt)+LinExpr.var(u, top), '<=', R+top)
        model.addConstraint(f'lines_d{d}', lsum([LinExpr.var(nameBeta(d, c)) for c in lines]), '<=', nc-N_a+1)
        model.addConstraint(f'bound_d{d}', lsum([LinExpr.var(nameMu(d, c)) for c in lines]), '>=', N_a-1)
    for c in lines:
        model.addConstraint(f'once_c{c}', lsum([LinExpr.var(nameBeta(d, c)) for d in blocks]), '<=', 1)
    model.setObjective(obj, 'max')
    return model


def aggregateInternal(bids:Dict[str, List[BidBlock]], N_a:int, reference_price:Optional[float]=None,
                      profile:Union[str, Box, None]=None, time_limit:Optional[float]=None) -> AggregationPlan:
    '''aggregation plan for N_a activations a day. bids maps line id to its bid blocks'''
    if N_a<1:
        raise InputError(f'Number of activations must be at least 1, got {N_a}')
    if N_a==1:
        return singleActivation(bids)
    if reference_price is None:
        reference_price = float(cfg.aggregate.get('reference_price', 1))
    blocks, lines, table = bidTable(bids)
    if N_a-1>len(lines):
        raise InfeasibleAggregation(f'{N_a} activations need at least {N_a-1} lines, got {len(lines)}')
    model = buildAggregationModel(blocks, lines, table, N_a, reference_price)
    sol = solve(model, profile, time_limit)
    if sol.status==SolveStatus.INFEASIBLE:
        raise InfeasibleAggregation(f'Aggregation with {N_a} activations is infeasible')
    if not sol.hasValues:
        raise SolverFailed(f'Aggregation returned {sol.status.value} without a solution. {sol.message}')
    plan = AggregationPlan(N_a=N_a, blocks=blocks, lines=lines, objective=float(sol.objective))
    for d in blocks:
        plan.Rt[d] = float(sol.values[nameRt(d)])
        offers = []
        for c in lines:
            plan.beta[(d, c)] = int(round(sol.values[nameBeta(d, c)]))
            plan.mu[(d, c)] = int(round(sol.values[nameMu(d, c)]))
            if plan.beta[(d, c)]==1:
                R, lam = table[(d, c)]
                offers.append({'lines':[c], 'capacity_kw':R, 'price_eur_per_kw':lam})
        if plan.Rt[d]>0:
            offers.append({'lines':[c for c in lines if plan.beta[(d, c)]==0], 'capacity_kw':plan.Rt[d], 'price_eur_per_kw':None})
        plan.offers[d] = offers
    logger.info(f'Aggregation with {N_a} activations: objective {plan.objective:.4g}')
    return plan
