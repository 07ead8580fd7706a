#!/usr/bin/env python
'''Tests for the day-ahead schedule: cost oracles on the tiny plant, baselines, flat rates and the
power-unit decomposition'''

# external packages
import os, sys
import numpy as np
import pytest
from box import Box
from hypothesis import given, settings, strategies as st

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import InfeasibleSchedule, MissingPrice, DecompositionInapplicable, ZeroEnergy, InputError
from grid.time_grid import buildTimeGrid
from plant.instance_file import instanceFromDict, loadInstance
from plant.validator import validateSchedule
from milp.naming import nameFloor
from eas.eas_model import EasConfig, buildEasModel, stepPrices
from market.prices import expandToGrid, twoPeakSeries
from eas.eas_pipeline import solveLine, solvePlant, plantSchedule, earliestStartValues
from eas.earliest_start import earliestStartSchedule
from eas.baseline import computeBaseline, costSummary, efr, lineCost, totalCost, totalEnergyMwh
from eas.decompose import splitCount, subInstances, lineUnits
from conftest import tinyDict, handSchedule, DEMO_INSTANCE

#----------------------------------------------

SCIPY = Box({'kind':'scipy', 'name':'scipy'})
GRID = buildTimeGrid(900, 14400, 1800, 3600, 7200)


def stepsOf(hourly) -> np.ndarray:
    return np.repeat(np.asarray(hourly, dtype=float), 4)


def twoUnitDict() -> dict:
    '''two furnaces on separate power units feeding one line'''
    d = tinyDict(global_p_max_kw=4000, power_units={'U1':2000, 'U2':2000})
    f2 = dict(d['furnaces'][0], id='F2', power_unit_id='U2')
    d['furnaces'].append(f2)
    d['lines'][0].update({'furnaces':['F1', 'F2'], 'ladle_limit':2})
    return d


#----------------------------------------------


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=100), min_size=4, max_size=4))
def test_cost_matches_the_cheapest_hour(hourly):
    # without losses the stage puts its 500 kWh into two steps of the cheapest hour
    inst = instanceFromDict(tinyDict())
    s, sol = solveLine(inst, 'C1', GRID, stepsOf(hourly), EasConfig(), SCIPY, 30)
    assert s.objective_eur==pytest.approx(0.5*min(hourly), rel=1e-3)
    assert validateSchedule(inst, GRID, s).ok


def test_schedule_follows_prices(tiny, grid):
    s, sol = solveLine(tiny, 'C1', grid, stepsOf([50, 20, 40, 60]), EasConfig(), SCIPY, 30)
    p = s.power_kw[('F1', 1, 1)]
    assert p[4:8].sum()*grid.step_hours==pytest.approx(500, rel=1e-3)
    assert s.start_step[('F1', 1, 2)]>=7
    assert s.label=='DAEA'


def test_mct_uses_minimum_energy(tiny, grid):
    s, sol = solveLine(tiny, 'C1', grid, stepsOf([50, 20, 40, 60]), EasConfig(mct_mode=True), SCIPY, 30)
    assert s.label=='MCT'
    assert s.lineEnergyMwh(tiny, 'C1')==pytest.approx(0.5, rel=1e-3)


def test_flat_price_rate(tiny, grid):
    prices = stepsOf([40, 40, 40, 40])
    s, sol = solveLine(tiny, 'C1', grid, prices, EasConfig(), SCIPY, 30)
    summary = costSummary(s, tiny, prices, grid)
    assert summary['efr_eur_mwh']==pytest.approx(40)
    assert summary['lines']['C1']['cost_eur']==pytest.approx(20, rel=1e-4)


def test_drained_buffer_is_infeasible(grid):
    d = tinyDict()
    d['lines'][0]['casting_segments'] = [[0, 1e-3]]
    inst = instanceFromDict(d)
    with pytest.raises(InfeasibleSchedule):
        solveLine(inst, 'C1', grid, stepsOf([1, 1, 1, 1]), EasConfig(), SCIPY, 30)


def test_missing_prices(tiny, grid):
    with pytest.raises(MissingPrice):
        buildEasModel(tiny, 'C1', grid, np.ones(grid.K-1))
    with pytest.raises(MissingPrice):
        stepPrices(np.full(grid.K, np.nan), grid, False)


def test_reserve_floor_variables(tiny, grid):
    m = buildEasModel(tiny, 'C1', grid, stepsOf([1, 2, 3, 4]), EasConfig(reserve_floor_weight=0.01))
    assert m.hasVar(nameFloor(1)) and m.hasVar(nameFloor(2))
    with pytest.raises(InputError):
        EasConfig(reserve_floor_weight=-1)


def test_plant_solve_in_parallel(grid):
    d = twoUnitDict()
    d['furnaces'][1]['power_unit_id'] = 'U1'
    d['lines'][0]['furnaces'] = ['F1']
    d['lines'].append(dict(d['lines'][0], id='C2', furnaces=['F2']))
    inst = instanceFromDict(d)
    prices = stepsOf([50, 20, 40, 60])
    schedules, sols, errors = solvePlant(inst, grid, prices, EasConfig(), SCIPY, 30, jobs=2)
    assert errors=={}
    plant = plantSchedule(schedules, 'DAEA')
    assert plant.lines==('C1', 'C2')
    assert validateSchedule(inst, grid, plant).ok
    assert plant.objective_eur==pytest.approx(20, rel=1e-3)


#----------------------------------------------

def test_baseline_of_the_committed_schedule(tiny, grid, committed):
    b = computeBaseline(committed, tiny, grid)
    assert list(b['C1'])==[1000, 0, 0, 0, 0, 0, 0, 0]
    assert lineCost(committed, tiny, 'C1', stepsOf([40, 0, 0, 0]), grid)==pytest.approx(20)
    assert totalCost(committed, tiny, stepsOf([40, 0, 0, 0]), grid)==pytest.approx(20)
    assert totalEnergyMwh(committed, tiny)==pytest.approx(0.5)


def test_holding_power_enters_the_baseline(grid):
    d = tinyDict()
    d['lines'][0]['gamma_kw_per_m3'] = 10
    inst = instanceFromDict(d)
    s = handSchedule(inst, grid)
    with_hold = computeBaseline(s, inst, grid, True)['C1']
    without = computeBaseline(s, inst, grid, False)['C1']
    assert with_hold[0]==pytest.approx(1040)
    assert without[0]==pytest.approx(1000)
    assert with_hold[2]==pytest.approx(50)


def test_efr():
    assert efr(100, 2)==50
    with pytest.raises(ZeroEnergy):
        efr(100, 0)


#----------------------------------------------

def test_split_count():
    assert splitCount(5, [0.5, 0.5])==[3, 2]
    assert splitCount(1, [0.5, 0.5])==[1, 1]
    assert splitCount(0, [0.5, 0.5])==[0, 0]


def test_sub_instances_share_the_line():
    inst = instanceFromDict(twoUnitDict())
    subs = subInstances(inst, 'C1')
    assert sorted(subs)==['U1', 'U2']
    line = subs['U1'].line('C1')
    assert line.v0_m3==pytest.approx(2)
    assert line.vmax_m3==pytest.approx(4)
    assert line.p_max_kw==pytest.approx(2000)
    assert [f.id for f in subs['U2'].furnaces]==['F2']


def test_decomposed_solve_is_optimal(grid):
    inst = instanceFromDict(twoUnitDict())
    prices = stepsOf([50, 20, 40, 60])
    full, _ = solveLine(inst, 'C1', grid, prices, EasConfig(), SCIPY, 30)
    dec, sol = solveLine(inst, 'C1', grid, prices, EasConfig(), SCIPY, 30, decompose=True)
    assert dec.objective_eur==pytest.approx(full.objective_eur, rel=1e-3)
    assert dec.objective_eur==pytest.approx(20, rel=1e-3)
    assert validateSchedule(inst, grid, dec).ok


def test_shared_unit_cannot_be_decomposed():
    d = twoUnitDict()
    d['furnaces'][1]['power_unit_id'] = 'U1'
    d['lines'][0]['furnaces'] = ['F1']
    d['lines'].append(dict(d['lines'][0], id='C2', furnaces=['F2']))
    inst = instanceFromDict(d)
    with pytest.raises(DecompositionInapplicable):
        lineUnits(inst, 'C1')


#----------------------------------------------

@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=100), min_size=4, max_size=4))
def test_windows_keep_the_optimum(hourly):
    inst = instanceFromDict(twoUnitDict())
    prices = stepsOf(hourly)
    on, _ = solveLine(inst, 'C1', GRID, prices, EasConfig(enable_windows=True), SCIPY, 30)
    off, _ = solveLine(inst, 'C1', GRID, prices, EasConfig(enable_windows=False), SCIPY, 30)
    assert on.objective_eur==pytest.approx(off.objective_eur, rel=1e-3, abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=100), min_size=4, max_size=4))
def test_price_aware_schedule_never_costs_more(hourly):
    inst = instanceFromDict(twoUnitDict())
    prices = stepsOf(hourly)
    daea, _ = solveLine(inst, 'C1', GRID, prices, EasConfig(), SCIPY, 30)
    mct, _ = solveLine(inst, 'C1', GRID, prices, EasConfig(mct_mode=True), SCIPY, 30)
    assert daea.objective_eur<=mct.objective_eur*(1+1e-3)+1e-6


def test_earliest_start_schedule(tiny, grid):
    s = earliestStartSchedule(tiny, 'C1', grid)
    assert s.start_step=={('F1', 1, 1):1, ('F1', 1, 2):3}
    assert s.end_step=={'F1':4}
    assert list(s.power_kw[('F1', 1, 1)][:3])==[1000, 1000, 0]
    assert validateSchedule(tiny, grid, s).ok


def test_earliest_start_waits_for_room_in_the_buffer(grid):
    # 0.1 m3 cast per step: the tap may not arrive before step 5
    d = tinyDict()
    d['lines'][0].update({'v0_m3':7.5, 'casting_segments':[[0, 1/9000]]})
    inst = instanceFromDict(d)
    s = earliestStartSchedule(inst, 'C1', grid)
    assert s.start_step=={('F1', 1, 1):2, ('F1', 1, 2):4}
    assert validateSchedule(inst, grid, s).ok
    assert max(s.buffer_m3['C1'])<=8+1e-9


def test_earliest_start_is_the_fallback_incumbent(tiny, grid):
    model = buildEasModel(tiny, 'C1', grid, stepsOf([50, 20, 40, 60]), EasConfig())
    values = earliestStartValues(model, tiny, 'C1', grid)
    assert model.checkFeasible(values)==[]
    assert model.objectiveValue(values)==pytest.approx(0.5*50, rel=1e-6)


def test_identical_furnaces_start_in_order(grid):
    d = twoUnitDict()
    d['furnaces'][1]['power_unit_id'] = 'U1'
    d['power_units'] = {'U1':4000}
    inst = instanceFromDict(d)
    model = buildEasModel(inst, 'C1', grid, stepsOf([50, 20, 40, 60]), EasConfig())
    assert any([n.startswith('sym_F1_F2') for n in model.conNames])
    s, _ = solveLine(inst, 'C1', grid, stepsOf([50, 20, 40, 60]), EasConfig(), SCIPY, 30)
    assert s.start_step[('F1', 1, 1)]<=s.start_step[('F2', 1, 1)]
    assert validateSchedule(inst, grid, s).ok


#----------------------------------------------
# demo plant on the two-peak day

DEMO_GRID = buildTimeGrid(300, 86400, 900, 3600, 14400)


@pytest.fixture(scope='module')
def demoDay():
    '''DAEA and MCT plant schedules of the demo plant, solved line by line in 60 s each'''
    inst = loadInstance(DEMO_INSTANCE)
    prices = expandToGrid(twoPeakSeries(), DEMO_GRID)
    out = {}
    for mct in [False, True]:
        schedules, sols, errors = solvePlant(inst, DEMO_GRID, prices, EasConfig(mct_mode=mct), SCIPY, 60, jobs=2)
        assert errors=={}
        out['MCT' if mct else 'DAEA'] = plantSchedule(schedules)
    return inst, prices, out


def test_windows_shrink_the_demo_model():
    inst = loadInstance(DEMO_INSTANCE)
    prices = expandToGrid(twoPeakSeries(), DEMO_GRID)
    for cid in ['C1', 'C2']:
        on = buildEasModel(inst, cid, DEMO_GRID, prices, EasConfig(enable_windows=True))
        off = buildEasModel(inst, cid, DEMO_GRID, prices, EasConfig(enable_windows=False))
        assert on.nVars<=0.8*off.nVars


def test_demo_earliest_start_schedules_are_valid():
    inst = loadInstance(DEMO_INSTANCE)
    for cid in ['C1', 'C2']:
        s = earliestStartSchedule(inst, cid, DEMO_GRID)
        assert s is not None
        assert validateSchedule(inst, DEMO_GRID, s).ok


def test_demo_schedules_are_valid(demoDay):
    inst, prices, out = demoDay
    for label, s in out.items():
        report = validateSchedule(inst, DEMO_GRID, s, tol=1e-6)
        assert report.ok, (label, report.toDict()['violations'][:5])
        assert s.lines==('C1', 'C2')


def test_demo_price_aware_schedule_beats_mct(demoDay):
    inst, prices, out = demoDay
    daea = totalCost(out['DAEA'], inst, prices, DEMO_GRID)
    mct = totalCost(out['MCT'], inst, prices, DEMO_GRID)
    assert daea<mct
    assert costSummary(out['DAEA'], inst, prices, DEMO_GRID)['efr_eur_mwh']<prices.mean()
