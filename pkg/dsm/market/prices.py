#!/usr/bin/env python
'''Day-ahead price series: reading price and penalty csvs, expanding to the scheduling grid,
synthetic price days and imbalance penalty series'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import dataclass
import logging
import numpy as np
import pandas as pd

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import MissingFile, MalformedRow, GapDetected, EmptyFile, NonDivisible, HorizonMismatch, InputError
from tools.val_tools import divides, intRatio
from grid.time_grid import TimeGrid

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

PRICE_COLUMNS = ['interval_start', 'price_eur_mwh']
PENALTY_COLUMNS = ['interval_start', 'up_eur_mwh', 'down_eur_mwh']

#----------------------------------------------


@dataclass(frozen=True)
class PriceSeries:
    '''prices in EUR/MWh, one value per interval of resolution_s seconds'''
    resolution_s: float
    values: np.ndarray
    label: str = ''

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise InputError(f'Price series {self.label} has non-finite values')
        object.__setattr__(self, 'values', v)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def duration_s(self) -> float:
        return len(self.values)*self.resolution_s

    @property
    def meanPrice(self) -> float:
        '''time-weighted mean, EUR/MWh'''
        return float(np.mean(self.values))


def readSeriesCsv(path:str, columns:List[str]) -> Tuple[pd.DatetimeIndex, pd.DataFrame]:
    '''read a contiguous time series csv. the first column holds interval start timestamps,
    the others numbers. row numbers in errors count the header as line 1'''
    if not os.path.exists(path):
        raise MissingFile(path)
    try:
        df = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise EmptyFile(f'{path} is empty') from e
    missing = [c for c in columns if not c in df.columns]
    if len(missing)>0:
        raise MalformedRow(1, f'in {path}: header is missing {missing}, expected {",".join(columns)}')
    if len(df)==0:
        raise EmptyFile(f'{path} has a header but no rows')
    times = pd.to_datetime(df[columns[0]], errors='coerce')
    for i in np.where(times.isna())[0]:
        raise MalformedRow(int(i)+2, f'in {path}: bad timestamp {df[columns[0]].iloc[i]!r}')
    out = pd.DataFrame(index=df.index)
    for c in columns[1:]:
        vals = pd.to_numeric(df[c], errors='coerce')
        for i in np.where(vals.isna() | ~np.isfinite(vals.fillna(0)))[0]:
            raise MalformedRow(int(i)+2, f'in {path}: bad number {df[c].iloc[i]!r} in column {c}')
        out[c] = vals.astype(float)
    return pd.DatetimeIndex(times), out


def checkContiguous(times:pd.DatetimeIndex, resolution_s:Optional[float]) -> float:
    '''the series step in seconds. a step longer than the resolution is a gap'''
    if len(times)==1:
        return float(resolution_s if resolution_s else cfg.grid.market_seconds)
    steps = np.diff(times.asi8)/1e9
    if resolution_s is None:
        resolution_s = float(np.min(steps))
    for i, s in enumerate(steps):
        if s>resolution_s:
            raise GapDetected(times[i+1])
        if s!=resolution_s:
            raise MalformedRow(i+3, f': interval start {times[i+1]} is {s:g} s after the previous row, expected {resolution_s:g} s')
    return float(resolution_s)


def loadPricesCsv(path:str, resolution_s:Optional[float]=None, label:str='') -> PriceSeries:
    '''read a csv with header interval_start,price_eur_mwh. resolution_s defaults to the row spacing'''
    times, df = readSeriesCsv(path, PRICE_COLUMNS)
    res = checkContiguous(times, resolution_s)
    logger.debug(f'Read {len(df)} prices at {res:g} s from {path}')
    return PriceSeries(res, df['price_eur_mwh'].to_numpy(), label or os.path.splitext(os.path.basename(path))[0])


def expandToGrid(series:PriceSeries, grid:TimeGrid) -> np.ndarray:
    '''piecewise-constant price per scheduling step, EUR/MWh, length K'''
    if not divides(grid.step_seconds, series.resolution_s):
        raise NonDivisible(grid.step_seconds, series.resolution_s, '(step | price resolution)')
    out = np.repeat(series.values, intRatio(grid.step_seconds, series.resolution_s))
    if len(out)!=grid.K:
        raise HorizonMismatch(f'Price series {series.label} covers {series.duration_s:g} s, '
                              f'the horizon is {grid.horizon_seconds:g} s')
    return out


#----------------------------------------------

def flatSeries(price:float, hours:int=24, label:str='flat') -> PriceSeries:
    return PriceSeries(3600, np.full(hours, float(price)), label)


def twoPeakSeries(base:float=30, peak:float=60, peaks:List[Tuple[int, int]]=[(8, 12), (17, 21)],
                  label:str='two_peak') -> PriceSeries:
    '''hourly day at the base price with peak prices in the [start, end) hours of peaks'''
    v = np.full(24, float(base))
    for h0, h1 in peaks:
        v[h0:h1] = peak
    return PriceSeries(3600, v, label)


def penaltySeries(prices_k:np.ndarray, grid:TimeGrid, up_factor:Optional[float]=None,
                  down_factor:Optional[float]=None) -> Tuple[np.ndarray, np.ndarray]:
    '''up and down imbalance penalties per settlement interval in EUR/kWh, as factors of the mean
    day-ahead price of the interval'''
    if up_factor is None:
        up_factor = cfg.reserve.up_factor
    if down_factor is None:
        down_factor = cfg.reserve.down_factor
    if up_factor<0 or down_factor<0:
        raise InputError('Penalty factors must be nonnegative')
    mean = np.asarray(prices_k, dtype=float).reshape(-1, grid.Nq).mean(axis=1)/1000
    return np.maximum(0, up_factor*mean), np.maximum(0, down_factor*mean)


def loadPenaltiesCsv(path:str, grid:TimeGrid) -> Tuple[np.ndarray, np.ndarray]:
    '''explicit up/down penalties from a csv with header interval_start,up_eur_mwh,down_eur_mwh.
    returns EUR/kWh per settlement interval'''
    times, df = readSeriesCsv(path, PENALTY_COLUMNS)
    res = checkContiguous(times, None)
    out = []
    for c in PENALTY_COLUMNS[1:]:
        if (df[c]<0).any():
            raise InputError(f'{path}: penalties must be nonnegative')
        k = expandToGrid(PriceSeries(res, df[c].to_numpy(), c), grid)
        out.append(k.reshape(-1, grid.Nq).mean(axis=1)/1000)
    return out[0], out[1]
