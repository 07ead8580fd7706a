#!/usr/bin/env python
'''Tests for the plot tables'''

# external packages
import os, sys
import numpy as np
import pytest

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from file.plainIm import plainIm
from reserve.bids import BidBlock
from plot.plot_data import powerTable, reserveTable, exportPlotData

#----------------------------------------------


def bids() -> dict:
    return {'C1':[BidBlock(1, 800., 0.01, True, R_kw={1:800., 2:900.}), BidBlock(2, 0., np.inf, False, 'no reserve')]}


def test_power_table(tiny, committed):
    df, units = powerTable(committed, tiny)
    assert list(df['C1'][:3])==[1000, 1000, 0]
    assert list(df['total'])==list(df['C1'])
    assert units['C1']=='kW'


def test_reserve_table(grid):
    df, units = reserveTable(bids(), grid)
    assert len(df)==grid.n_settlements
    assert list(df['R_C1'][:2])==[800, 900]
    assert np.isnan(df['R_C1'][2])
    assert list(df['bid_C1'][:4])==[800]*4
    assert np.isnan(df['bid_C1'][4])


def test_export(tmp_path, tiny, grid, committed):
    files = exportPlotData(str(tmp_path), committed, tiny, bids(), grid)
    assert [os.path.basename(f) for f in files]==['power.csv', 'baseline.csv', 'buffer.csv', 'reserve.csv']
    df, units = plainIm(str(tmp_path/'baseline.csv'))
    assert units['C1']=='kW'
    assert list(df['C1'])==[1000, 0, 0, 0, 0, 0, 0, 0]
    df, units = plainIm(str(tmp_path/'buffer.csv'))
    assert units['C1']=='m^3'
    assert df['C1'][3]==pytest.approx(5)


def test_nothing_to_export(tmp_path):
    assert exportPlotData(str(tmp_path))==[]
