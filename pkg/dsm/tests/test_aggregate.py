#!/usr/bin/env python
'''Tests for the internal aggregation of line bids'''

# external packages
import os, sys
import itertools
import pytest
from box import Box
from hypothesis import given, settings, strategies as st

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import InputError, InfeasibleAggregation
from reserve.bids import BidBlock
from reserve.aggregate import aggregateInternal, bidTable, buildAggregationModel

#----------------------------------------------

SCIPY = Box({'kind':'scipy', 'name':'scipy'})


def bid(d, R, price, eligible=True) -> BidBlock:
    return BidBlock(d, float(R), float(price), eligible)


def bidsOf(table) -> dict:
    '''table maps line to a list of (capacity, price) per block'''
    return dict([(c, [bid(d, R, lam) for d, (R, lam) in enumerate(rows, start=1)]) for c, rows in table.items()])


def bruteForce(table, N_a, reference_price=1.) -> float:
    '''best objective over every assignment of lines to at most one solo block'''
    lines = sorted(table)
    nb = len(table[lines[0]])
    best = -1
    for pick in itertools.product([None]+list(range(nb)), repeat=len(lines)):
        total = 0.
        ok = True
        for d in range(nb):
            solo = [c for c, p in zip(lines, pick) if p==d]
            if len(solo)>len(lines)-N_a+1:
                ok = False
                break
            total += sum([table[c][d][0]*table[c][d][1] for c in solo])
            if len(solo)==0:
                caps = sorted([table[c][d][0] for c in lines], reverse=True)
                total += reference_price*caps[N_a-2]
        if ok:
            best = max(best, total)
    return best


#----------------------------------------------


def test_single_activation_sums_the_lines():
    plan = aggregateInternal(bidsOf({'C1':[(1000, 10)], 'C2':[(2000, 12)]}), 1)
    assert plan.Rt[1]==3000
    offer = plan.offers[1][0]
    assert offer['lines']==['C1', 'C2']
    assert offer['price_eur_per_kw']==pytest.approx(34000/3000)


def test_ineligible_bids_count_as_zero():
    bids = {'C1':[bid(1, 1000, 10)], 'C2':[bid(1, 200, 5, eligible=False)]}
    blocks, lines, table = bidTable(bids)
    assert table[(1, 'C2')]==(0., 0.)
    plan = aggregateInternal(bids, 1)
    assert plan.Rt[1]==1000
    assert plan.offers[1][0]['lines']==['C1']


def test_activation_count_checks():
    bids = bidsOf({'C1':[(1000, 10)], 'C2':[(2000, 12)]})
    with pytest.raises(InputError):
        aggregateInternal(bids, 0)
    with pytest.raises(InfeasibleAggregation):
        aggregateInternal(bids, 4, reference_price=1, profile=SCIPY, time_limit=30)
    with pytest.raises(InputError):
        aggregateInternal({}, 1)


def test_model_rows():
    blocks, lines, table = bidTable(bidsOf({'C1':[(1000, 10), (500, 2)], 'C2':[(2000, 12), (800, 3)]}))
    model = buildAggregationModel(blocks, lines, table, 2)
    assert 'once_cC1' in model.conNames
    assert 'bound_d2' in model.conNames
    assert model.nBinaries==8


def test_two_activations():
    # C2 alone in block 1 earns 24000; C1 alone in block 2 earns 1000 and leaves no shared capacity there
    table = {'C1':[(1000, 10), (500, 2)], 'C2':[(2000, 12), (800, 3)]}
    plan = aggregateInternal(bidsOf(table), 2, reference_price=1, profile=SCIPY, time_limit=30)
    assert plan.objective==pytest.approx(bruteForce(table, 2), rel=1e-4)
    assert sum([plan.beta[(d, 'C2')] for d in plan.blocks])<=1
    assert plan.toDict()['N_a']==2


@settings(max_examples=10, deadline=None)
@given(st.lists(st.tuples(st.integers(min_value=0, max_value=10), st.integers(min_value=0, max_value=5)),
                min_size=6, max_size=6))
def test_matches_brute_force(cells):
    table = {'C1':cells[0:2], 'C2':cells[2:4], 'C3':cells[4:6]}
    plan = aggregateInternal(bidsOf(table), 2, reference_price=1, profile=SCIPY, time_limit=30)
    assert plan.objective==pytest.approx(bruteForce(table, 2), rel=1e-3, abs=1e-6)
