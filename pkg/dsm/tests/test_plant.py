#!/usr/bin/env python
'''Tests for instance files, process evaluators, schedules and the schedule validator'''

# external packages
import os, sys
import json
from dataclasses import replace
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import InstanceError, MissingFile, DimensionMismatch, NegativeDuration
from grid.time_grid import buildTimeGrid
from plant.instance_file import instanceFromDict, loadInstance
from plant.evaluators import heatLossEnergy, castVolume, bufferTrace, ladleTrace, reheatEnergy, tappedVolume, holdingPower
from plant.schedule import exportSchedule, loadSchedule, mergeSchedules, lineSchedule, intervalMeans
from plant.validator import validateSchedule, FAMILIES
from conftest import tinyDict, handSchedule, DEMO_INSTANCE

#----------------------------------------------


def test_demo_instance_loads():
    inst = loadInstance(DEMO_INSTANCE)
    assert [c.id for c in inst.lines]==['C1', 'C2']
    f2 = inst.furnace('F2')
    assert f2.alpha(1, 4)==pytest.approx(0.08)
    assert inst.furnace('F1').alpha(1, 4)==pytest.approx(0.05)
    assert len(f2.cycles)==2
    assert f2.daf_relaxed_cycles==(2,)


def test_missing_instance_file(tmp_path):
    with pytest.raises(MissingFile):
        loadInstance(str(tmp_path/'nope.json'))


def test_schema_rejects_unknown_stage_field():
    d = tinyDict()
    d['furnaces'][0]['cycles'][0][0]['colour'] = 'red'
    with pytest.raises(InstanceError):
        instanceFromDict(d)


def test_unknown_template():
    d = tinyDict()
    d['furnaces'][0]['cycles'] = ['standard']
    with pytest.raises(InstanceError):
        instanceFromDict(d)


def test_relaxed_cycles_must_trail():
    d = tinyDict()
    f = d['furnaces'][0]
    f['cycles'] = [f['cycles'][0], f['cycles'][0]]
    f['daf_relaxed_cycles'] = [1]
    with pytest.raises(InstanceError):
        instanceFromDict(d)


def test_furnace_on_two_lines():
    d = tinyDict()
    d['lines'].append(dict(d['lines'][0], id='C2'))
    with pytest.raises(InstanceError):
        instanceFromDict(d)


def test_energy_stage_needs_power():
    d = tinyDict()
    d['furnaces'][0]['cycles'][0][0]['p_max_kw'] = 0
    with pytest.raises(InstanceError):
        instanceFromDict(d)


def test_charge_melt_envelope_only_on_charge_melting_stage():
    d = tinyDict()
    d['furnaces'][0]['cycles'][0][0]['charge_melt'] = {'overflow_rate_kw':100, 'splash_rate_kw':900,
                                                      'splash_energy_kwh':100, 'overflow_time_s':900}
    with pytest.raises(InstanceError):
        instanceFromDict(d)
    assert loadInstance(DEMO_INSTANCE).furnace('F1').stage(1, 3).charge_melt is not None


def test_line_cap_split_by_furnaces():
    inst = loadInstance(DEMO_INSTANCE)
    assert inst.lineCap('C1')==pytest.approx(5500)
    assert inst.unitCap('U1', 'C1')==pytest.approx(6000)


#----------------------------------------------

def test_heat_loss_energy():
    # 1000 kWh stage held 50% longer than its nominal time with alpha 0.1
    assert heatLossEnergy(1000, [(0.1, 1800, 1200)])==pytest.approx(1150)
    assert heatLossEnergy(1000, [(0, 5000, 1200)])==pytest.approx(1000)
    with pytest.raises(NegativeDuration):
        heatLossEnergy(1000, [(0.1, -1, 1200)])


@given(st.floats(min_value=0, max_value=1), st.floats(min_value=0, max_value=1e4), st.floats(min_value=0, max_value=1e4))
def test_heat_loss_is_monotone_in_duration(alpha, d1, d2):
    lo, hi = sorted([d1, d2])
    assert heatLossEnergy(500, [(alpha, lo, 600)])<=heatLossEnergy(500, [(alpha, hi, 600)])+1e-9


def test_cast_volume_piecewise():
    d = tinyDict()
    d['lines'][0]['casting_segments'] = [[0, 1e-3], [4, 2e-3]]
    inst = instanceFromDict(d)
    g = buildTimeGrid(900, 14400, 1800, 3600, 7200)
    line = inst.line('C1')
    assert castVolume(line, 0, g)==0
    assert castVolume(line, 4, g)==pytest.approx(4*900*1e-3)
    assert castVolume(line, 6, g)==pytest.approx(4*900*1e-3+2*900*2e-3)


def test_buffer_and_ladles(tiny, grid):
    v = bufferTrace(tiny, 'C1', grid, {'F1':[3]})
    assert v[2]==pytest.approx(4)
    assert v[3]==pytest.approx(5)
    n = ladleTrace(tiny, 'C1', grid, {'F1':[3]})
    assert list(n[:5])==[0, 0, 1, 1, 0]


def test_tapped_volume_and_holding_power(tiny):
    f = tiny.furnace('F1')
    assert tappedVolume(f, [3, None], 3)==0
    assert tappedVolume(f, [3, None, 5], 6)==pytest.approx(2)
    line = tiny.line('C1')
    assert holdingPower(line, 4.)==0
    assert list(holdingPower(replace(line, gamma_kw_per_m3=10), np.array([1., 2.])))==[10, 20]


def test_reheat_energy():
    d = tinyDict()
    tap = d['furnaces'][0]['cycles'][0][1]
    tap.update({'reheat_tau_s':900, 'loss_coeff':20, 'p_max_kw':500})
    f = instanceFromDict(d).furnace('F1')
    assert reheatEnergy(f, 1, 2, 900)==0
    assert reheatEnergy(f, 1, 2, 2700)==pytest.approx(40)


#----------------------------------------------

def test_hand_schedule_is_valid(tiny, grid, committed):
    report = validateSchedule(tiny, grid, committed)
    assert report.ok, report.toDict()
    assert list(committed.baseline_kw['C1'])==[1000, 0, 0, 0, 0, 0, 0, 0]


def test_short_energy(tiny, grid):
    s = handSchedule(tiny, grid, power=[900, 900])
    report = validateSchedule(tiny, grid, s)
    assert report.families()==['EnergyCompletion']
    assert report.violations[0].slack==pytest.approx(-50)


def test_large_stage_shortfall_is_flagged(grid):
    # 10000 kWh stage, 9 Wh short: the tolerance does not grow with the requirement
    d = tinyDict(global_p_max_kw=20000, power_units={'U1':20000})
    d['furnaces'][0]['cycles'][0][0].update({'min_energy_kwh':10000, 'p_max_kw':20000})
    inst = instanceFromDict(d)
    assert validateSchedule(inst, grid, handSchedule(inst, grid, power=[20000, 20000])).ok
    report = validateSchedule(inst, grid, handSchedule(inst, grid, power=[20000, 20000-0.036]))
    assert report.families()==['EnergyCompletion']
    assert report.violations[0].slack==pytest.approx(-0.009)


def test_power_above_stage_max(tiny, grid):
    s = handSchedule(tiny, grid, power=[1200, 800])
    report = validateSchedule(tiny, grid, s)
    assert report.count('PowerBounds')==1
    assert report.violations[0].indices==('F1', 1, 1, 1)


def test_power_outside_stage(tiny, grid):
    s = handSchedule(tiny, grid, power=[1000, 1000, 0, 10])
    report = validateSchedule(tiny, grid, s)
    assert 'PowerOutsideStage' in report.families()


def test_stage_order(tiny, grid, committed):
    starts = dict(committed.start_step)
    starts[('F1', 1, 2)] = 1
    report = validateSchedule(tiny, grid, replace(committed, start_step=starts))
    assert 'StageOrder' in report.families()


def test_stale_baseline(tiny, grid, committed):
    base = {'C1':committed.baseline_kw['C1']+1}
    report = validateSchedule(tiny, grid, replace(committed, baseline_kw=base))
    assert report.count('Baseline')==grid.n_settlements


def test_buffer_overflow(grid):
    d = tinyDict()
    d['lines'][0]['v0_m3'] = 7.5
    inst = instanceFromDict(d)
    report = validateSchedule(inst, grid, handSchedule(inst, grid))
    assert 'BufferBounds' in report.families()


def test_wrong_grid(tiny, grid, committed):
    other = buildTimeGrid(900, 14400, 900, 3600, 7200)
    with pytest.raises(DimensionMismatch):
        validateSchedule(tiny, other, committed)


def test_families_are_known(tiny, grid):
    s = handSchedule(tiny, grid, power=[1200, 900, 0, 10])
    report = validateSchedule(tiny, grid, s)
    assert set(report.families())<=set(FAMILIES)


#----------------------------------------------

def test_schedule_file(tmp_path, tiny, grid, committed):
    fn = str(tmp_path/'schedule.json')
    exportSchedule(fn, committed)
    with open(fn, 'r') as f:
        doc = json.load(f)
    assert doc['stages'][0]['start_s']==900
    back = loadSchedule(fn)
    assert back.start_step==committed.start_step
    assert np.allclose(back.baseline_kw['C1'], committed.baseline_kw['C1'])
    assert validateSchedule(tiny, grid, back).ok


def test_merge_and_split(tiny, grid, committed):
    merged = mergeSchedules([committed], 'plant')
    assert merged.label=='plant'
    part = lineSchedule(merged, tiny, 'C1')
    assert part.start_step==committed.start_step


def test_interval_means():
    assert list(intervalMeans(np.array([1, 3, 5, 7]), 2))==[2, 6]
