#!/usr/bin/env python
'''Process constraints of one casting line as MILP rows: stage activation, ordering and durations,
stage power, energy with heat losses, caps, buffer, ladles, reheat, ramp and the charge-melting
envelope. Shared by the day-ahead and the reserve models.

Every stage is a node with activation x^k = [start <= k], nondecreasing in k. A stage is active at
k when x_n^k - x_next^k = 1. Each furnace ends with an end node whose start is the step after its
last stage. x at K+1 is 1, except on nodes of deferrable cycles where it is a zeta variable'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, Optional
from dataclasses import replace
import logging
import numpy as np

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import InfeasibleHorizon
from grid.time_grid import TimeGrid, settlementSlots
from grid.windows import furnaceWindows, unboundedWindows
from plant.plant_specs import PlantInstance, FurnaceSpec, StageSpec
from plant.evaluators import castVolume, lossStages
from milp.milp_model import MilpModel, LinExpr, lsum
from milp.naming import stageTag, nameP, nameY, namePhi, nameCum
from milp.extract import node, activationTerm

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------


class processModel:
    '''adds the process variables and rows of line cid to model.
    windows: restrict variables to the reachable window of each stage.
    deferrable: the instance's relaxed cycles may slip past the horizon.
    stageDurations: scheduled durations in s used for the buffer margin of deferred stages'''

    def __init__(self, model:MilpModel, instance:PlantInstance, cid:str, grid:TimeGrid,
                 windows:bool=True, deferrable:bool=False,
                 stageDurations:Optional[Dict[Tuple[str, int, int], float]]=None):
        self.model = model
        self.instance = instance
        self.cid = cid
        self.line = instance.line(cid)
        self.grid = grid
        self.K = grid.K
        self.windows = windows
        self.deferrable = deferrable
        self.stageDurations = stageDurations or {}
        self.furnaces = instance.lineFurnaces(cid)
        self.chains:Dict[str, List[dict]] = {}
        self.specs:Dict[Tuple[str, int, int], StageSpec] = {}
        self.steps:Dict[Tuple[str, int, int], int] = {}
        self.counts = {}
        for f in self.furnaces:
            self.chains[f.id] = self.buildChain(f)
        self.declareActivations()
        self.declarePower()
        self.sequenceRows()
        self.symmetryRows()
        self.stageRows()
        self.capRows()
        self.margin = self.marginExpr()
        self.buffer = [None]+[self.bufferExpr(k) for k in range(1, self.K+1)]
        self.bufferRows()
        self.ladleRows()
        model.metadata.setdefault('nodes', [])
        model.metadata['nodes'] += [nd for f in self.furnaces for nd in self.chains[f.id]]
        model.metadata['K'] = self.K
        model.metadata['line'] = cid
        logger.debug(f'{model.name} process rows for line {cid}: {self.counts}')

    #-------------------------------------------
    # nodes

    def buildChain(self, f:FurnaceSpec) -> List[dict]:
        '''node records of furnace f in processing order, end node last'''
        K = self.K
        tight = furnaceWindows(f, self.grid, self.deferrable)
        win = tight if self.windows else unboundedWindows(f, self.grid)
        pins = self.instance.initial_state.pinned_starts
        chain = []
        total = 0
        anyRelaxed = False
        for m, j in f.stageKeys():
            st = f.stage(m, j)
            w = win[(m, j)]
            key = (f.id, m, j)
            self.specs[key] = st
            self.steps[key] = w.min_steps
            total += w.min_steps
            relaxed = self.deferrable and (m in f.daf_relaxed_cycles)
            es = w.earliestStart
            ls = K+1 if (relaxed or not self.windows) else w.latestStart
            hi = K if relaxed else w.k_max
            if key in pins:
                s = pins[key]
                if not (es<=s<=min(ls, K)) or s<1:
                    raise InfeasibleHorizon(f'Pinned start {s} of furnace {f.id} cycle {m} stage {j} is outside [{es}, {min(ls, K)}]')
                es, ls, relaxed = s, s, False
            anyRelaxed = anyRelaxed or relaxed
            chain.append(node(f.id, m, j, es, ls, relaxed, st.usesPower, es, min(hi, K)))
        esEnd = total+1 if self.windows else 1
        chain.append(node(f.id, None, None, esEnd, K+1, anyRelaxed))
        return chain

    def xe(self, nd:dict, k:int) -> LinExpr:
        '''activation of the node at step k'''
        t = activationTerm(nd, k, self.K)
        if isinstance(t, str):
            return LinExpr.var(t)
        return LinExpr(const=t)

    def active(self, chain:List[dict], i:int, k:int) -> LinExpr:
        return self.xe(chain[i], k)-self.xe(chain[i+1], k)

    def duration(self, chain:List[dict], i:int) -> LinExpr:
        '''active steps of node i within the horizon'''
        return lsum([self.active(chain, i, k) for k in range(1, self.K+1)])

    def zeta(self, nd:dict) -> LinExpr:
        '''1 if the node starts by the horizon end'''
        return self.xe(nd, self.K+1)

    def stageNodes(self) -> List[Tuple[List[dict], int]]:
        return [(self.chains[f.id], i) for f in self.furnaces for i in range(len(self.chains[f.id])-1)]

    def key(self, nd:dict) -> Tuple[str, int, int]:
        return (nd['f'], nd['m'], nd['j'])

    def row(self, family:str, name:str, expr:LinExpr, sense:str, rhs:float=0) -> None:
        if self.model.addConstraint(name, expr, sense, rhs):
            self.counts[family] = self.counts.get(family, 0)+1

    #-------------------------------------------
    # variables

    def declareActivations(self) -> None:
        for f in self.furnaces:
            for nd in self.chains[f.id]:
                for k in range(max(1, nd['es']), self.K+2):
                    t = activationTerm(nd, k, self.K)
                    if isinstance(t, str) and not self.model.hasVar(t):
                        self.model.addBinary(t)

    def needsY(self, st:StageSpec) -> bool:
        return st.semi_continuous or st.ramp is not None

    def declarePower(self) -> None:
        for chain, i in self.stageNodes():
            nd = chain[i]
            if not nd['power']:
                continue
            st = self.specs[self.key(nd)]
            if self.needsY(st):
                self.model.metadata.setdefault('semi', {})[self.key(nd)] = st.semi_continuous
            for k in range(nd['pwLo'], nd['pwHi']+1):
                self.model.addVar(nameP(nd['f'], nd['m'], nd['j'], k), lower=0, upper=st.p_max_kw)
                if self.needsY(st):
                    self.model.addBinary(nameY(nd['f'], nd['m'], nd['j'], k))

    def p(self, nd:dict, k:int) -> LinExpr:
        if nd['power'] and nd['pwLo']<=k<=nd['pwHi']:
            return LinExpr.var(nameP(nd['f'], nd['m'], nd['j'], k))
        return LinExpr()

    def energy(self, nd:dict) -> LinExpr:
        '''energy of the stage in kWh'''
        if not nd['power']:
            return LinExpr()
        return lsum([self.p(nd, k) for k in range(nd['pwLo'], nd['pwHi']+1)])*self.grid.step_hours

    #-------------------------------------------
    # rows

    def sequenceRows(self) -> None:
        '''monotone activation, then order and minimum duration: x_next^k <= x_n^(k-d_n)'''
        K = self.K
        for f in self.furnaces:
            chain = self.chains[f.id]
            for nd in chain:
                tag = stageTag(nd['f'], nd['m'], nd['j'])
                for k in range(max(1, nd['es']), K+1):
                    self.row('monotone', f'mono_{tag}_k{k}', self.xe(nd, k)-self.xe(nd, k+1), '<=')
            for i in range(len(chain)-1):
                nxt = chain[i+1]
                d = self.steps[self.key(chain[i])]
                tag = stageTag(nxt['f'], nxt['m'], nxt['j'])
                for k in range(max(1, nxt['es']), K+2):
                    self.row('order', f'ord_{tag}_k{k}', self.xe(nxt, k)-self.xe(chain[i], k-d), '<=')

    def symmetryRows(self) -> None:
        '''of two identical furnaces on one power unit without pins or prior taps, the one listed first
        starts first'''
        pins = self.instance.initial_state.pinned_starts
        free = [f for f in self.furnaces
                if len(self.instance.priorTaps(f.id))==0 and not any([key[0]==f.id for key in pins])]
        for a, b in zip(free, free[1:]):
            if replace(a, id=b.id)!=b:
                continue
            first, second = self.chains[a.id][0], self.chains[b.id][0]
            for k in range(max(1, second['es']), self.K+1):
                self.row('symmetry', f'sym_{a.id}_{b.id}_k{k}', self.xe(second, k)-self.xe(first, k), '<=')

    def stageRows(self) -> None:
        for chain, i in self.stageNodes():
            nd = chain[i]
            st = self.specs[self.key(nd)]
            if nd['power']:
                self.powerRows(chain, i, st)
            if st.isEnergy:
                self.energyRows(chain, i, st)
            if nd['relaxed']:
                self.fractionRows(chain, i, st)
            if st.reheat_tau_s is not None:
                self.reheatRows(chain, i, st)

    def powerRows(self, chain:List[dict], i:int, st:StageSpec) -> None:
        '''stage bounds, semi-continuity, ramp and charge-melting envelope'''
        nd = chain[i]
        f, m, j = self.key(nd)
        tag = stageTag(f, m, j)
        dth = self.grid.step_hours
        for k in range(nd['pwLo'], nd['pwHi']+1):
            a = self.active(chain, i, k)
            p = self.p(nd, k)
            if self.needsY(st):
                y = LinExpr.var(nameY(f, m, j, k))
                self.row('power', f'yon_{tag}_k{k}', y-a, '<=')
                self.row('power', f'pmax_{tag}_k{k}', p-y*st.p_max_kw, '<=')
                if st.p_min_kw>0:
                    on = y if st.semi_continuous else a
                    self.row('power', f'pmin_{tag}_k{k}', p-on*st.p_min_kw, '>=')
            else:
                self.row('power', f'pmax_{tag}_k{k}', p-a*st.p_max_kw, '<=')
                if st.p_min_kw>0:
                    self.row('power', f'pmin_{tag}_k{k}', p-a*st.p_min_kw, '>=')
        if st.ramp is not None:
            r = st.ramp.rate_limit_kw_per_s*self.grid.step_seconds
            for k in range(nd['pwLo'], nd['pwHi']+1):
                cum = self.model.addVar(nameCum('ycum', f, m, j, k), lower=0)
                expr = LinExpr.var(cum)-LinExpr.var(nameY(f, m, j, k))
                if k>nd['pwLo']:
                    expr = expr-LinExpr.var(nameCum('ycum', f, m, j, k-1))
                self.row('ramp', f'ycum_{tag}_k{k}', expr, '=')
                self.row('ramp', f'ramp_{tag}_k{k}', self.p(nd, k)-LinExpr.var(cum)*r, '<=', st.ramp.initial_power_kw)
        if st.charge_melt is not None:
            cm = st.charge_melt
            for k in range(nd['pwLo'], nd['pwHi']+1):
                e = self.model.addVar(nameCum('ecum', f, m, j, k), lower=0)
                n = self.model.addVar(nameCum('acum', f, m, j, k), lower=0)
                de = LinExpr.var(e)-self.p(nd, k)*dth
                da = LinExpr.var(n)-self.active(chain, i, k)
                if k>nd['pwLo']:
                    de = de-LinExpr.var(nameCum('ecum', f, m, j, k-1))
                    da = da-LinExpr.var(nameCum('acum', f, m, j, k-1))
                self.row('envelope', f'ecum_{tag}_k{k}', de, '=')
                self.row('envelope', f'acum_{tag}_k{k}', da, '=')
                self.row('envelope', f'splash_{tag}_k{k}', LinExpr.var(e)-LinExpr.var(n)*(cm.splash_rate_kw*dth), '<=', cm.splash_energy_kwh)
                self.row('envelope', f'over_{tag}_k{k}', LinExpr.var(e)-LinExpr.var(n)*(cm.overflow_rate_kw*dth), '>=',
                         -cm.overflow_rate_kw*cm.overflow_time_s/3600)

    def energyRows(self, chain:List[dict], i:int, st:StageSpec) -> None:
        '''E - Ehat*sum(alpha/Dhat*dt*duration) >= Ehat over the stage and the time stages before it.
        on deferrable stages the row only binds when the next node starts within the horizon'''
        nd = chain[i]
        f = self.instance.furnace(nd['f'])
        m, j = nd['m'], nd['j']
        loss = LinExpr()
        bigM = st.min_energy_kwh
        for jj in lossStages(f, m, j):
            a = f.alpha(m, jj)
            if a==0:
                continue
            coef = st.min_energy_kwh*a/f.stage(m, jj).min_duration_s*self.grid.step_seconds
            ii = [n for n, x in enumerate(chain) if x['m']==m and x['j']==jj][0]
            loss.add(self.duration(chain, ii), coef)
            bigM += coef*self.K
        expr = self.energy(nd)-loss
        if nd['relaxed']:
            expr = expr+bigM-self.zeta(chain[i+1])*bigM
        self.row('energy', f'energy_{stageTag(f.id, m, j)}', expr, '>=', st.min_energy_kwh)

    def fractionRows(self, chain:List[dict], i:int, st:StageSpec) -> None:
        '''completed fraction phi of a deferrable stage: zeta_next <= phi <= zeta_n'''
        nd = chain[i]
        f, m, j = self.key(nd)
        tag = stageTag(f, m, j)
        phi = LinExpr.var(self.model.addVar(namePhi(f, m, j), lower=0, upper=1))
        self.row('fraction', f'phiz_{tag}', phi-self.zeta(nd), '<=')
        self.row('fraction', f'phin_{tag}', phi-self.zeta(chain[i+1]), '>=')
        if st.isEnergy:
            self.row('fraction', f'phie_{tag}', self.energy(nd)-phi*st.min_energy_kwh, '>=')
        else:
            self.row('fraction', f'phit_{tag}', self.duration(chain, i)*self.grid.step_seconds-phi*st.min_duration_s, '>=')

    def reheatRows(self, chain:List[dict], i:int, st:StageSpec) -> None:
        '''E >= alpha*(duration/tau - 1) on tapping stages'''
        nd = chain[i]
        f = self.instance.furnace(nd['f'])
        alpha = f.alpha(nd['m'], nd['j'])
        if alpha==0:
            return
        coef = alpha*self.grid.step_seconds/st.reheat_tau_s
        expr = self.energy(nd)-self.duration(chain, i)*coef
        if nd['relaxed']:
            bigM = coef*self.K
            expr = expr+bigM-self.zeta(chain[i+1])*bigM
        self.row('reheat', f'reheat_{stageTag(f.id, nd["m"], nd["j"])}', expr, '>=', -alpha)

    def capRows(self) -> None:
        '''power unit shares and the line share of the global cap, only at steps where the
        installed power of the reachable stages exceeds the cap'''
        groups = [(f'unit_{l}', self.instance.unitCap(l, self.cid), [f.id for f in self.furnaces if f.power_unit_id==l])
                  for l in sorted(set([f.power_unit_id for f in self.furnaces]))]
        groups.append((f'line_{self.cid}', self.instance.lineCap(self.cid), [f.id for f in self.furnaces]))
        for label, cap, fids in groups:
            nodes = [nd for fid in fids for nd in self.chains[fid] if nd['power']]
            for k in range(1, self.K+1):
                here = [nd for nd in nodes if nd['pwLo']<=k<=nd['pwHi']]
                if sum([self.specs[self.key(nd)].p_max_kw for nd in here])<=cap:
                    continue
                self.row('cap', f'{label}_k{k}', lsum([self.p(nd, k) for nd in here]), '<=', cap)

    #-------------------------------------------
    # buffer and ladles

    def tapNodes(self) -> List[Tuple[FurnaceSpec, dict]]:
        return [(f, nd) for f in self.furnaces for nd in self.chains[f.id][:-1] if self.specs[self.key(nd)].is_tapping]

    def bufferExpr(self, k:int) -> LinExpr:
        '''buffer volume after step k: v0 + delivered - cast'''
        v = LinExpr(const=self.instance.initialBuffer(self.cid)-castVolume(self.line, k, self.grid))
        for f in self.furnaces:
            prior = sum([1 for s in self.instance.priorTaps(f.id) if s+f.delivery_time_steps<=k])
            v.add(f.tap_volume_m3*prior)
        for f, nd in self.tapNodes():
            v.add(self.xe(nd, k-f.delivery_time_steps), f.tap_volume_m3)
        return v

    def marginExpr(self) -> LinExpr:
        '''extra buffer kept while cycles are deferred: last cast rate times the scheduled duration
        of every deferred stage'''
        if not self.deferrable:
            return LinExpr()
        out = LinExpr()
        for chain, i in self.stageNodes():
            nd = chain[i]
            if not nd['relaxed']:
                continue
            key = self.key(nd)
            dur = self.stageDurations.get(key, self.steps[key]*self.grid.step_seconds)
            out.add(1-self.zeta(nd), self.line.lastRate*dur)
        return out

    def bufferRows(self) -> None:
        lo = self.line.vmin_m3+self.line.safety_margin_m3
        for k in range(1, self.K+1):
            self.row('buffer', f'vmin_{self.cid}_k{k}', self.buffer[k]-self.margin, '>=', lo)
            self.row('buffer', f'vmax_{self.cid}_k{k}', self.buffer[k], '<=', self.line.vmax_m3)

    def ladleRows(self) -> None:
        '''taps started in (k - roundtrip, k] <= ladle limit'''
        taps = self.tapNodes()
        if len(taps)==0:
            return
        for k in range(1, self.K+1):
            busy = LinExpr()
            for f in self.furnaces:
                busy.add(sum([1 for s in self.instance.priorTaps(f.id) if s<=k<s+f.roundtrip_time_steps]))
            for f, nd in taps:
                busy.add(self.xe(nd, k)-self.xe(nd, k-f.roundtrip_time_steps))
            self.row('ladle', f'ladle_{self.cid}_k{k}', busy, '<=', self.line.ladle_limit)

    #-------------------------------------------
    # expressions for objectives

    def furnacePower(self, k:int) -> LinExpr:
        return lsum([self.p(nd, k) for f in self.furnaces for nd in self.chains[f.id][:-1]])

    def holding(self, k:int) -> LinExpr:
        return self.buffer[k]*self.line.gamma_kw_per_m3

    def metered(self, k:int, includeHolding:bool=True) -> LinExpr:
        out = self.furnacePower(k)
        if includeHolding:
            out.add(self.holding(k))
        return out

    def baseline(self, q:int, includeHolding:bool=True) -> LinExpr:
        '''mean metered power of settlement interval q'''
        ks = settlementSlots(self.grid)[q-1]
        return lsum([self.metered(k, includeHolding) for k in ks])*(1/len(ks))

    def cost(self, price_kwh:np.ndarray) -> LinExpr:
        '''energy cost of melting and holding: sum of price*power*dt, price in EUR/kWh per step'''
        dth = self.grid.step_hours
        return lsum([self.metered(k, True)*(price_kwh[k-1]*dth) for k in range(1, self.K+1)])

    def shiftedEnergy(self) -> LinExpr:
        '''minimum energy of the deferred energy stages in kWh. a stage cut by the horizon counts
        the share 1-phi it leaves for the next day'''
        out = LinExpr()
        for chain, i in self.stageNodes():
            nd = chain[i]
            st = self.specs[self.key(nd)]
            if nd['relaxed'] and st.isEnergy:
                out.add(1-LinExpr.var(namePhi(*self.key(nd))), st.min_energy_kwh)
        return out
