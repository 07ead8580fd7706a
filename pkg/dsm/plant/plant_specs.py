#!/usr/bin/env python
'''Plant topology: stages of a melt cycle, melting furnaces, casting lines with their pouring buffer, power units'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import dataclass, field
from enum import Enum
import logging

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import InstanceError

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------

CHARGE_MELT_STAGE = 3    # 1-based position of the charge-melting stage in a cycle


class StageKind(str, Enum):
    ENERGY = 'EnergyBased'
    TIME = 'TimeBased'


@dataclass(frozen=True)
class Ramp:
    initial_power_kw: float
    rate_limit_kw_per_s: float


@dataclass(frozen=True)
class ChargeMelt:
    '''splash/overflow envelope of the charge-melting stage'''
    overflow_rate_kw: float
    splash_rate_kw: float
    splash_energy_kwh: float
    overflow_time_s: float


@dataclass(frozen=True)
class StageSpec:
    '''one stage of a melt cycle. loss_coeff is dimensionless on energy stages and is the reheat
    energy in kWh on tapping stages'''
    kind: StageKind
    min_duration_s: float = 0
    min_energy_kwh: float = 0
    loss_coeff: float = 0
    p_min_kw: float = 0
    p_max_kw: float = 0
    semi_continuous: bool = False
    is_tapping: bool = False
    reheat_tau_s: Optional[float] = None
    ramp: Optional[Ramp] = None
    charge_melt: Optional[ChargeMelt] = None
    name: str = ''

    @property
    def isEnergy(self) -> bool:
        return self.kind==StageKind.ENERGY

    @property
    def usesPower(self) -> bool:
        return self.p_max_kw>0

    def check(self, label:str) -> None:
        if self.isEnergy:
            if not (self.min_energy_kwh>0 and self.p_max_kw>0):
                raise InstanceError(f'{label}: energy stage needs min_energy_kwh>0 and p_max_kw>0')
            if self.loss_coeff>0 and not self.min_duration_s>0:
                raise InstanceError(f'{label}: loss_coeff>0 needs min_duration_s>0')
        elif not self.min_duration_s>0:
            raise InstanceError(f'{label}: time stage needs min_duration_s>0')
        if not 0<=self.p_min_kw<=self.p_max_kw:
            raise InstanceError(f'{label}: need 0 <= p_min_kw <= p_max_kw')
        if self.loss_coeff<0:
            raise InstanceError(f'{label}: loss_coeff must be nonnegative')
        if self.charge_melt is not None and not self.isEnergy:
            raise InstanceError(f'{label}: charge_melt envelope on a time stage')
        if self.reheat_tau_s is not None and not (self.is_tapping and self.reheat_tau_s>0):
            raise InstanceError(f'{label}: reheat_tau_s needs a tapping stage and a positive value')
        if self.ramp is not None and self.ramp.initial_power_kw+self.ramp.rate_limit_kw_per_s<=0:
            raise InstanceError(f'{label}: ramp never lets power above zero')


@dataclass(frozen=True)
class FurnaceSpec:
    '''a melting furnace. cycles is a list of melt cycles, each a list of StageSpec.
    loss_overrides maps (cycle, stage), both 1-based, to a per-cycle loss coefficient'''
    id: str
    power_unit_id: str
    cycles: Tuple[Tuple[StageSpec, ...], ...]
    tap_volume_m3: float
    delivery_time_steps: int
    roundtrip_time_steps: int
    daf_relaxed_cycles: Tuple[int, ...] = ()
    loss_overrides: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def stage(self, m:int, j:int) -> StageSpec:
        return self.cycles[m-1][j-1]

    def alpha(self, m:int, j:int) -> float:
        '''loss coefficient of stage j in cycle m'''
        return self.loss_overrides.get((m, j), self.stage(m, j).loss_coeff)

    def stageKeys(self) -> List[Tuple[int, int]]:
        '''(cycle, stage) pairs in processing order'''
        return [(m+1, j+1) for m, cyc in enumerate(self.cycles) for j in range(len(cyc))]

    def tapKeys(self) -> List[Tuple[int, int]]:
        return [(m, j) for m, j in self.stageKeys() if self.stage(m, j).is_tapping]

    def check(self) -> None:
        if len(self.cycles)==0:
            raise InstanceError(f'Furnace {self.id} has no cycles')
        if self.delivery_time_steps>self.roundtrip_time_steps:
            raise InstanceError(f'Furnace {self.id}: delivery_time_steps > roundtrip_time_steps')
        if self.delivery_time_steps<0 or self.tap_volume_m3<0:
            raise InstanceError(f'Furnace {self.id}: negative delivery time or tap volume')
        for m, cyc in enumerate(self.cycles):
            if len(cyc)==0:
                raise InstanceError(f'Furnace {self.id} cycle {m+1} has no stages')
            cm = [j+1 for j, s in enumerate(cyc) if s.charge_melt is not None]
            if len(cm)>1:
                raise InstanceError(f'Furnace {self.id} cycle {m+1} has more than one charge-melting stage')
            if len(cm)==1 and cm[0]!=CHARGE_MELT_STAGE:
                raise InstanceError(f'Furnace {self.id} cycle {m+1}: charge_melt envelope on stage {cm[0]}, '
                                    f'only stage {CHARGE_MELT_STAGE} (charge melting) carries one')
            for j, s in enumerate(cyc):
                s.check(f'Furnace {self.id} cycle {m+1} stage {j+1}')
        n = len(self.cycles)
        relaxed = sorted(self.daf_relaxed_cycles)
        if relaxed!=list(range(n-len(relaxed)+1, n+1)):
            raise InstanceError(f'Furnace {self.id}: daf_relaxed_cycles must be the trailing cycles, got {relaxed}')
        for (m, j), a in self.loss_overrides.items():
            if m>len(self.cycles) or j>len(self.cycles[m-1]) or a<0:
                raise InstanceError(f'Furnace {self.id}: bad loss override at cycle {m} stage {j}')


@dataclass(frozen=True)
class CastingLineSpec:
    '''a casting line with its pouring (holding) furnace. casting_segments is a list of
    (breakpoint_step, rate_m3_per_s) with the first breakpoint at 0'''
    id: str
    furnaces: Tuple[str, ...]
    v0_m3: float
    vmin_m3: float
    vmax_m3: float
    gamma_kw_per_m3: float
    casting_segments: Tuple[Tuple[int, float], ...]
    ladle_limit: int
    safety_margin_m3: float = 0
    p_max_kw: Optional[float] = None

    def check(self) -> None:
        if not self.vmin_m3<=self.v0_m3<=self.vmax_m3:
            raise InstanceError(f'Line {self.id}: need vmin <= v0 <= vmax')
        if len(self.casting_segments)==0 or self.casting_segments[0][0]!=0:
            raise InstanceError(f'Line {self.id}: first casting breakpoint must be 0')
        bps = [b for b, r in self.casting_segments]
        if any([b2<=b1 for b1, b2 in zip(bps[:-1], bps[1:])]):
            raise InstanceError(f'Line {self.id}: casting breakpoints must be strictly increasing')
        if any([r<0 for b, r in self.casting_segments]):
            raise InstanceError(f'Line {self.id}: casting rates must be nonnegative')
        if self.gamma_kw_per_m3<0 or self.ladle_limit<0:
            raise InstanceError(f'Line {self.id}: negative gamma or ladle limit')

    @property
    def lastRate(self) -> float:
        return self.casting_segments[-1][1]


@dataclass(frozen=True)
class InitialState:
    '''prior-day state. prior_taps maps furnace id to tap start steps <= 0,
    pinned_starts maps (furnace, cycle, stage) to a start step'''
    buffer_m3: Dict[str, float] = field(default_factory=dict)
    prior_taps: Dict[str, Tuple[int, ...]] = field(default_factory=dict)
    pinned_starts: Dict[Tuple[str, int, int], int] = field(default_factory=dict)


@dataclass(frozen=True)
class PlantInstance:
    lines: Tuple[CastingLineSpec, ...]
    furnaces: Tuple[FurnaceSpec, ...]
    power_units: Dict[str, float]
    global_p_max_kw: float
    initial_state: InitialState = field(default_factory=InitialState)
    name: str = ''

    def furnace(self, fid:str) -> FurnaceSpec:
        for f in self.furnaces:
            if f.id==fid:
                return f
        raise KeyError(f'No furnace {fid}')

    def line(self, cid:str) -> CastingLineSpec:
        for c in self.lines:
            if c.id==cid:
                return c
        raise KeyError(f'No casting line {cid}. Options are {[c.id for c in self.lines]}')

    def lineFurnaces(self, cid:str) -> List[FurnaceSpec]:
        return [self.furnace(fid) for fid in self.line(cid).furnaces]

    def lineOf(self, fid:str) -> CastingLineSpec:
        for c in self.lines:
            if fid in c.furnaces:
                return c
        raise KeyError(f'Furnace {fid} is on no line')

    def unitFurnaces(self, l:str) -> List[FurnaceSpec]:
        return [f for f in self.furnaces if f.power_unit_id==l]

    def initialBuffer(self, cid:str) -> float:
        return self.initial_state.buffer_m3.get(cid, self.line(cid).v0_m3)

    def priorTaps(self, fid:str) -> Tuple[int, ...]:
        return self.initial_state.prior_taps.get(fid, ())

    def lineCap(self, cid:str) -> float:
        '''line share of the global cap: explicit p_max_kw, else split by installed furnace count'''
        c = self.line(cid)
        if c.p_max_kw is not None:
            return c.p_max_kw
        return self.global_p_max_kw*len(c.furnaces)/len(self.furnaces)

    def unitCap(self, l:str, cid:str) -> float:
        '''share of power unit l available to line cid'''
        members = self.unitFurnaces(l)
        inLine = [f for f in members if f.id in self.line(cid).furnaces]
        return self.power_units[l]*len(inLine)/len(members)

    def unitSpansLines(self, l:str) -> bool:
        return len(set([self.lineOf(f.id).id for f in self.unitFurnaces(l)]))>1

    def check(self) -> None:
        ids = [f.id for f in self.furnaces]
        if len(set(ids))!=len(ids):
            raise InstanceError('Furnace ids must be unique')
        if len(set([c.id for c in self.lines]))!=len(self.lines):
            raise InstanceError('Line ids must be unique')
        owners = {}
        for c in self.lines:
            c.check()
            for fid in c.furnaces:
                if fid in owners:
                    raise InstanceError(f'Furnace {fid} is on lines {owners[fid]} and {c.id}')
                if not fid in ids:
                    raise InstanceError(f'Line {c.id} lists unknown furnace {fid}')
                owners[fid] = c.id
        for f in self.furnaces:
            f.check()
            if not f.id in owners:
                raise InstanceError(f'Furnace {f.id} is on no line')
            if not f.power_unit_id in self.power_units:
                raise InstanceError(f'Furnace {f.id} uses unknown power unit {f.power_unit_id}')
        for (fid, m, j), s in self.initial_state.pinned_starts.items():
            if not fid in ids:
                raise InstanceError(f'Pinned start on unknown furnace {fid}')
            f = self.furnace(fid)
            if m>len(f.cycles) or j>len(f.cycles[m-1]):
                raise InstanceError(f'Pinned start on unknown stage {fid} cycle {m} stage {j}')
        for fid, taps in self.initial_state.prior_taps.items():
            if any([t>0 for t in taps]):
                raise InstanceError(f'Prior taps of {fid} must be at steps <= 0')
