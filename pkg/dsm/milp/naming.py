#!/usr/bin/env python
'''Variable and row names. The names are the contract between model building, warm starts and extraction.

    p_f{F}_m{M}_j{J}_k{K}     stage power, kW
    x_f{F}_m{M}_j{J}_k{K}     stage started by step k
    y_f{F}_m{M}_j{J}_k{K}     stage power on at step k
    x_f{F}_end_k{K}           all cycles of furnace F finished by step k
    zeta_f{F}_m{M}_j{J}       stage starts within the horizon (day-after flexibility)
    zeta_f{F}_end             furnace finishes all cycles within the horizon
    phi_f{F}_m{M}_j{J}        completed fraction of a relaxed stage
    ecum_/acum_f..._k{K}      cumulative energy and active steps of the charge-melting stage
    ycum_f..._k{K}            cumulative on-steps of a ramped stage
    Plow_d{D}                 baseline floor in bid block D
    R_q{Q}                    reserve offered in settlement interval Q
    pup_q{Q} / pdn_q{Q}       imbalance above / below the baseline in interval Q
    nu_q{Q}                   imbalance direction
    beta_d{D}_c{C} / mu_d{D}_c{C} / Rt_d{D}   aggregation
'''

# external packages
from typing import List, Dict, Tuple, Union, Any, Optional

#----------------------------------------------

def stageTag(f:str, m:Optional[int], j:Optional[int]) -> str:
    if m is None:
        return f'f{f}_end'
    return f'f{f}_m{m}_j{j}'

def nameX(f:str, m:Optional[int], j:Optional[int], k:int) -> str:
    return f'x_{stageTag(f, m, j)}_k{k}'

def nameP(f:str, m:int, j:int, k:int) -> str:
    return f'p_{stageTag(f, m, j)}_k{k}'

def nameY(f:str, m:int, j:int, k:int) -> str:
    return f'y_{stageTag(f, m, j)}_k{k}'

def nameZeta(f:str, m:Optional[int], j:Optional[int]) -> str:
    return f'zeta_{stageTag(f, m, j)}'

def namePhi(f:str, m:int, j:int) -> str:
    return f'phi_{stageTag(f, m, j)}'

def nameCum(prefix:str, f:str, m:int, j:int, k:int) -> str:
    return f'{prefix}_{stageTag(f, m, j)}_k{k}'

def nameFloor(d:int) -> str:
    return f'Plow_d{d}'

def nameR(q:int) -> str:
    return f'R_q{q}'

def nameUp(q:int) -> str:
    return f'pup_q{q}'

def nameDown(q:int) -> str:
    return f'pdn_q{q}'

def nameNu(q:int) -> str:
    return f'nu_q{q}'

def nameBeta(d:int, c:str) -> str:
    return f'beta_d{d}_c{c}'

def nameMu(d:int, c:str) -> str:
    return f'mu_d{d}_c{c}'

def nameRt(d:int) -> str:
    return f'Rt_d{d}'
