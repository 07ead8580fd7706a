#!/usr/bin/env python
'''Time-of-use tariffs: three price levels assigned to hour slots by season. Weekends are off-peak'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any
from dataclasses import dataclass, field
import logging
import numpy as np
from box import Box

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg
from tools.errors import InputError
from market.prices import PriceSeries

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

LEVELS = ['off_peak', 'shoulder', 'peak']

#----------------------------------------------


@dataclass(frozen=True)
class TouTariff:
    '''prices in EUR/MWh. slots maps shoulder and peak to lists of [start_hour, end_hour) ranges;
    every other hour is off-peak'''
    off_peak: float
    shoulder: float
    peak: float
    season: str = 'winter'
    slots: Dict[str, Tuple[Tuple[int, int], ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.off_peak<=self.shoulder<=self.peak:
            raise InputError(f'Tariff levels must satisfy off_peak <= shoulder <= peak, got {self.off_peak}, {self.shoulder}, {self.peak}')
        if not self.season in ['summer', 'winter']:
            raise InputError(f'Unknown season {self.season}. Options are summer, winter')
        taken = set()
        for level, ranges in self.slots.items():
            if not level in LEVELS[1:]:
                raise InputError(f'Unknown tariff level {level}. Options are {LEVELS[1:]}')
            for h0, h1 in ranges:
                hours = set(range(h0, h1))
                if not (0<=h0<h1<=24) or len(hours & taken)>0:
                    raise InputError(f'Bad or overlapping {level} slot [{h0}, {h1}) in the {self.season} tariff')
                taken |= hours

    def price(self, level:str) -> float:
        return getattr(self, level)

    def level(self, hour:int) -> str:
        for lev, ranges in self.slots.items():
            if any([h0<=hour<h1 for h0, h1 in ranges]):
                return lev
        return 'off_peak'


def tariffFromConfig(c:Box=cfg, season:str='winter') -> TouTariff:
    t = c.market.tou
    if not season in t.slots:
        raise InputError(f'No {season} slots in the tariff config')
    slots = dict([(lev, tuple([tuple(r) for r in ranges])) for lev, ranges in t.slots[season].items()])
    return TouTariff(float(t.off_peak), float(t.shoulder), float(t.peak), season, slots)


def touSeries(tariff:TouTariff, day_type:str='weekday') -> PriceSeries:
    '''24 hourly prices of the tariff on a weekday or a weekend day'''
    if day_type=='weekend':
        v = np.full(24, tariff.off_peak)
    elif day_type=='weekday':
        v = np.array([tariff.price(tariff.level(h)) for h in range(24)])
    else:
        raise InputError(f'Unknown day type {day_type}. Options are weekday, weekend')
    return PriceSeries(3600, v, f'tou_{tariff.season}_{day_type}')
