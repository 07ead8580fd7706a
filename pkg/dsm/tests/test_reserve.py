#!/usr/bin/env python
'''Tests for the reserve model of one interval, day-after flexibility and bid blocks'''

# external packages
import os, sys
import numpy as np
import pytest
from box import Box
from hypothesis import given, settings, strategies as st

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import InputError, DimensionMismatch, ZeroBaseline
from grid.time_grid import buildTimeGrid
from plant.instance_file import instanceFromDict, loadInstance
from plant.validator import validateSchedule
from market.prices import expandToGrid, twoPeakSeries
from eas.eas_model import EasConfig
from eas.eas_pipeline import solveLine
from milp.naming import nameZeta
from reserve.reserve_model import ReserveParams, reserveParamsFrom, activationWindow, buildReserveModel, \
    warmStartFromSchedule
from reserve.reserve_day import ReserveResult, solveInterval, solveReserveDay, unitCost
from reserve.bids import blockBid, bidBlocks, bidFromDict
from conftest import tinyDict, handSchedule, DEMO_INSTANCE

#----------------------------------------------

SCIPY = Box({'kind':'scipy', 'name':'scipy'})
PI = 1/48


def params(price=0.01, up=0.1, down=0.02, **kwargs) -> ReserveParams:
    kwargs.setdefault('activation_probability', PI)
    return ReserveParams(np.full(8, price), np.full(8, up), np.full(8, down), **kwargs)


def dafInstance():
    d = tinyDict()
    d['furnaces'][0]['daf_relaxed_cycles'] = [1]
    return instanceFromDict(d)


def result(q, R, cost=0.) -> ReserveResult:
    return ReserveResult(q=q, block=(q-1)//4+1, R_kw=R, window=[q], unit_cost=cost)


#----------------------------------------------


def test_activation_window(grid):
    assert activationWindow(grid, 1, 2)==[1, 2]
    assert activationWindow(grid, 4, 2)==[4]
    assert activationWindow(grid, 5, 1)==[5]


def test_daf_blocks():
    p = params(daf_enabled=True)
    assert p.dafOn(2, 2)
    assert not p.dafOn(1, 2)
    assert not params().dafOn(2, 2)
    assert params(daf_enabled=True, daf_blocks=(1,)).dafOn(1, 2)


def test_one_price_penalties():
    assert params().penalties(1)==(0.1, 0.02)
    assert params(one_price=True).penalties(1)==(0.1, 0.1)


def test_param_checks():
    with pytest.raises(InputError):
        params(activation_probability=1.5)
    with pytest.raises(InputError):
        params(min_bid_kw=600, max_bid_kw=500)
    with pytest.raises(InputError):
        params(up=-1)
    with pytest.raises(DimensionMismatch):
        ReserveParams(np.ones(8), np.ones(7), np.ones(8))


def test_params_from_config(grid):
    p = reserveParamsFrom(cfg, grid, np.full(grid.K, 100.))
    assert len(p.availability_price_eur_per_kw)==grid.n_settlements
    assert p.availability_price_eur_per_kw[0]==pytest.approx(0.01)
    assert p.up_penalty[0]==pytest.approx(0.12)
    assert p.down_penalty[0]==pytest.approx(0.02)
    assert p.daf_enabled and p.daf_blocks==(-1,)
    assert p.activation_probability==pytest.approx(1/48, rel=1e-6)
    assert reserveParamsFrom(cfg, grid, np.full(grid.K, 100.), activation_span=1).activation_span==1


def test_unit_cost():
    p = params(daf_next_day_price_eur_mwh=100)
    assert unitCost(0, 10, 0, p)==np.inf
    assert unitCost(1000, 50, 500, p)==pytest.approx(PI*100/1000)


#----------------------------------------------

def test_zero_baseline(tiny, grid, committed):
    with pytest.raises(ZeroBaseline):
        buildReserveModel(tiny, 'C1', grid, committed.baseline_kw['C1'], 2, params())
    with pytest.raises(DimensionMismatch):
        buildReserveModel(tiny, 'C1', grid, np.ones(3), 1, params())


def test_committed_schedule_is_a_warm_start(tiny, grid, committed):
    bl = committed.baseline_kw['C1']
    model = buildReserveModel(tiny, 'C1', grid, bl, 1, params(activation_span=1))
    warm = warmStartFromSchedule(model, committed, bl)
    assert model.checkFeasible(warm)==[]


def test_reserve_of_the_melting_interval(tiny, grid, committed):
    # moving the 500 kWh out of q1 costs 0.1 EUR/kWh in the recovery, weighted by the activation probability
    res = solveInterval(tiny, 'C1', grid, committed, committed.baseline_kw['C1'], 1, params(activation_span=1), SCIPY, 30)
    assert res.R_kw==pytest.approx(1000, rel=1e-3)
    assert res.imbalance_eur==pytest.approx(50, rel=1e-3)
    assert res.unit_cost==pytest.approx(PI*50/1000, rel=1e-3)
    assert res.window==[1]
    assert sum(res.up_kw.values())*grid.settlement_hours==pytest.approx(500, rel=1e-3)
    assert res.contingency.baseline_kw['C1'][0]==pytest.approx(0, abs=1e-3)
    assert res.toDict()['unit_cost_eur_per_kw']==pytest.approx(res.unit_cost)


def test_window_over_an_idle_interval(tiny, grid, committed):
    res = solveInterval(tiny, 'C1', grid, committed, committed.baseline_kw['C1'], 1, params(activation_span=2), SCIPY, 30)
    assert res.R_kw==pytest.approx(0, abs=1e-6)
    assert res.unit_cost==np.inf
    assert res.toDict()['unit_cost_eur_per_kw'] is None


def test_low_price_offers_nothing(tiny, grid, committed):
    p = params(price=0.0005, activation_span=1)
    res = solveInterval(tiny, 'C1', grid, committed, committed.baseline_kw['C1'], 1, p, SCIPY, 30)
    assert res.R_kw==pytest.approx(0, abs=1e-6)
    # paying for the dispatched energy tips the balance
    p = params(price=0.0005, activation_span=1, remunerate_dispatch=True)
    res = solveInterval(tiny, 'C1', grid, committed, committed.baseline_kw['C1'], 1, p, SCIPY, 30)
    assert res.R_kw==pytest.approx(1000, rel=1e-3)


def test_reserve_day(tiny, grid, committed):
    results, errors = solveReserveDay(tiny, 'C1', grid, committed, params(activation_span=1), SCIPY, 30, qs=[1, 2])
    assert list(results)==[1]
    assert list(errors)==[2]
    assert isinstance(errors[2], ZeroBaseline)


#----------------------------------------------

def test_daf_model_rows(grid):
    inst = dafInstance()
    s = handSchedule(inst, grid)
    p = params(daf_enabled=True, daf_next_day_price_eur_mwh=100, max_shift_energy_kwh=1000)
    model = buildReserveModel(inst, 'C1', grid, s.baseline_kw['C1'], 1, p, daf_on=True)
    assert 'shift_C1' in model.conNames
    assert model.hasVar(nameZeta('F1', 1, 2))
    assert model.metadata['daf_on']


def test_daf_defers_the_cycle(grid):
    # recovering within the day costs 10 EUR/kWh, the next day only 0.1 EUR/kWh
    inst = dafInstance()
    s = handSchedule(inst, grid)
    bl = s.baseline_kw['C1']
    p = params(up=10, activation_span=1, daf_enabled=True, daf_next_day_price_eur_mwh=100, max_shift_energy_kwh=1000)
    without = solveInterval(inst, 'C1', grid, s, bl, 1, p, SCIPY, 30, daf_on=False)
    assert without.R_kw==pytest.approx(0, abs=1e-6)
    res = solveInterval(inst, 'C1', grid, s, bl, 1, p, SCIPY, 30, daf_on=True)
    assert res.daf_on
    assert res.R_kw==pytest.approx(1000, rel=1e-3)
    assert res.shifted_energy_kwh==pytest.approx(500, rel=1e-3)
    assert res.daf[('F1', 1, 2)]==0
    assert res.unit_cost==pytest.approx(PI*0.1*500/1000, rel=1e-2)


def test_shift_cap_limits_the_reserve(grid):
    # 100 kWh may move to the next day, which frees 200 kW over the half hour
    inst = dafInstance()
    s = handSchedule(inst, grid)
    p = params(up=10, activation_span=1, daf_enabled=True, daf_next_day_price_eur_mwh=100, max_shift_energy_kwh=100)
    res = solveInterval(inst, 'C1', grid, s, s.baseline_kw['C1'], 1, p, SCIPY, 30, daf_on=True)
    assert res.R_kw==pytest.approx(200, rel=1e-2)
    assert res.shifted_energy_kwh<=100+1e-6


#----------------------------------------------

def test_capacity_is_the_smallest_reserve():
    results = dict([(q, result(q, R, c)) for q, R, c in [(1, 1200, 0.2), (2, 900, 0.5), (3, 1500, 0.1), (4, 1100, 0.3)]])
    b = blockBid(1, [1, 2, 3, 4], results, params(), 'C1')
    assert b.eligible
    assert b.capacity_kw==900
    assert b.min_price_eur_per_kw==0.5
    assert b.R_kw=={1:1200, 2:900, 3:1500, 4:1100}


def test_small_and_large_bids():
    small = dict([(q, result(q, 200)) for q in range(1, 5)])
    b = blockBid(1, [1, 2, 3, 4], small, params(), 'C1')
    assert not b.eligible and 'below' in b.reason
    large = dict([(q, result(q, 6000)) for q in range(1, 5)])
    b = blockBid(1, [1, 2, 3, 4], large, params(), 'C1')
    assert not b.eligible and 'above' in b.reason
    none = dict([(q, result(q, 0, np.inf)) for q in range(1, 5)])
    assert blockBid(1, [1, 2, 3, 4], none, params()).reason=='no reserve'


def test_missing_interval_makes_the_block_ineligible():
    results = dict([(q, result(q, 1000)) for q in [1, 2, 4]])
    b = blockBid(1, [1, 2, 3, 4], results, params())
    assert not b.eligible
    assert '[3]' in b.reason


def test_bid_blocks_regroup(grid):
    results = dict([(q, result(q, 400*q, 0.01*q)) for q in range(1, 9)])
    bids = bidBlocks(results, grid, params(), line='C1')
    assert [b.capacity_kw for b in bids]==[400, 2000]
    assert all([b.line=='C1' for b in bids])
    halves = bidBlocks(results, grid, params(), block_steps=4, line='C1')
    assert [b.capacity_kw for b in halves]==[400, 1200, 2000, 2800]
    assert halves[3].min_price_eur_per_kw==pytest.approx(0.08)


def test_bid_dict():
    results = dict([(q, result(q, 0, np.inf)) for q in range(1, 5)])
    b = blockBid(1, [1, 2, 3, 4], results, params(), 'C1')
    d = b.toDict()
    assert d['min_price_eur_per_kw'] is None
    back = bidFromDict(d)
    assert back.min_price_eur_per_kw==np.inf
    assert back.R_kw==b.R_kw


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=0, max_value=6000), min_size=8, max_size=8))
def test_shorter_blocks_never_offer_less(Rs):
    results = dict([(q, result(q, R, 0.01)) for q, R in enumerate(Rs, start=1)])
    grid = buildTimeGrid(900, 14400, 1800, 3600, 7200)
    coarse = bidBlocks(results, grid, params())
    fine = bidBlocks(results, grid, params(), block_steps=4)
    for i, b in enumerate(fine, start=1):
        assert b.capacity_kw>=coarse[(i-1)//2].capacity_kw


#----------------------------------------------

def test_reserve_grows_with_the_price(tiny, grid, committed):
    bl = committed.baseline_kw['C1']
    last = 0
    for price in [0.0002, 0.0005, 0.001, 0.002, 0.004]:
        low = solveInterval(tiny, 'C1', grid, committed, bl, 1, params(price=price, activation_span=1), SCIPY, 30)
        high = solveInterval(tiny, 'C1', grid, committed, bl, 1, params(price=2*price, activation_span=1), SCIPY, 30)
        assert high.R_kw>=low.R_kw*(1-1e-3)-1e-6
        assert low.R_kw>=last*(1-1e-3)-1e-6
        last = low.R_kw
    assert last==pytest.approx(1000, rel=1e-3)


def test_deferral_never_lowers_the_objective(grid):
    inst = dafInstance()
    s = handSchedule(inst, grid)
    bl = s.baseline_kw['C1']
    for up in [0.1, 1, 10]:
        p = params(up=up, activation_span=1, daf_enabled=True, daf_next_day_price_eur_mwh=100, max_shift_energy_kwh=1000)
        without = solveInterval(inst, 'C1', grid, s, bl, 1, p, SCIPY, 30, daf_on=False)
        withDaf = solveInterval(inst, 'C1', grid, s, bl, 1, p, SCIPY, 30, daf_on=True)
        assert withDaf.objective>=without.objective-1e-6*max(1, abs(without.objective))


#----------------------------------------------
# demo plant on the two-peak day

def test_demo_contingency_plans_are_valid():
    grid = buildTimeGrid(300, 86400, 900, 3600, 14400)
    inst = loadInstance(DEMO_INSTANCE)
    prices = expandToGrid(twoPeakSeries(), grid)
    s, _ = solveLine(inst, 'C1', grid, prices, EasConfig(), SCIPY, 60)
    results, errors = solveReserveDay(inst, 'C1', grid, s, reserveParamsFrom(cfg, grid, prices), SCIPY, 60,
                                      jobs=2, qs=[81, 85])
    assert sorted(list(results)+list(errors))==[81, 85]
    assert all([isinstance(e, ZeroBaseline) for e in errors.values()])
    for q, res in results.items():
        report = validateSchedule(inst, grid, res.contingency, tol=1e-6)
        assert report.ok, (q, report.toDict()['violations'][:5])
