#!/usr/bin/env python
'''Reading plant instance files (JSON)'''

# external packages
import os, sys
import json
from typing import List, Dict, Tuple, Union, Any
import logging
import jsonschema

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import InstanceError, MissingFile
from plant.plant_specs import *

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------

_num = {'type':'number'}
_nonneg = {'type':'number', 'minimum':0}
_int = {'type':'integer'}
_id = {'type':'string', 'pattern':'^[A-Za-z0-9_]+$'}

STAGE_SCHEMA = {
    'type':'object',
    'required':['kind'],
    'properties':{
        'kind':{'enum':[k.value for k in StageKind]},
        'name':{'type':'string'},
        'min_energy_kwh':_nonneg, 'min_duration_s':_nonneg, 'loss_coeff':_nonneg,
        'p_min_kw':_nonneg, 'p_max_kw':_nonneg,
        'semi_continuous':{'type':'boolean'}, 'is_tapping':{'type':'boolean'},
        'reheat_tau_s':{'type':['number', 'null']},
        'ramp':{'type':'object', 'required':['initial_power_kw', 'rate_limit_kw_per_s'],
                'properties':{'initial_power_kw':_nonneg, 'rate_limit_kw_per_s':_nonneg}},
        'charge_melt':{'type':'object',
                       'required':['overflow_rate_kw', 'splash_rate_kw', 'splash_energy_kwh', 'overflow_time_s'],
                       'properties':{'overflow_rate_kw':_nonneg, 'splash_rate_kw':_nonneg,
                                     'splash_energy_kwh':_nonneg, 'overflow_time_s':_nonneg}},
    },
    'additionalProperties':False,
}

CYCLE_SCHEMA = {'oneOf':[{'type':'string'}, {'type':'array', 'items':STAGE_SCHEMA, 'minItems':1}]}

INSTANCE_SCHEMA = {
    'type':'object',
    'required':['furnaces', 'lines', 'power_units', 'global_p_max_kw'],
    'properties':{
        'name':{'type':'string'},
        'global_p_max_kw':_nonneg,
        'power_units':{'type':'object', 'additionalProperties':_nonneg},
        'cycle_templates':{'type':'object', 'additionalProperties':{'type':'array', 'items':STAGE_SCHEMA}},
        'furnaces':{'type':'array', 'minItems':1, 'items':{
            'type':'object',
            'required':['id', 'power_unit_id', 'cycles', 'tap_volume_m3', 'delivery_time_steps', 'roundtrip_time_steps'],
            'properties':{
                'id':_id, 'power_unit_id':{'type':'string'},
                'cycles':{'type':'array', 'minItems':1, 'items':CYCLE_SCHEMA},
                'tap_volume_m3':_nonneg, 'delivery_time_steps':_int, 'roundtrip_time_steps':_int,
                'daf_relaxed_cycles':{'type':'array', 'items':_int},
                'loss_coeff_overrides':{'type':'array', 'items':{
                    'type':'object', 'required':['cycle', 'stage', 'value'],
                    'properties':{'cycle':_int, 'stage':_int, 'value':_nonneg}}},
            }}},
        'lines':{'type':'array', 'minItems':1, 'items':{
            'type':'object',
            'required':['id', 'furnaces', 'v0_m3', 'vmin_m3', 'vmax_m3', 'gamma_kw_per_m3', 'casting_segments', 'ladle_limit'],
            'properties':{
                'id':_id, 'furnaces':{'type':'array', 'items':{'type':'string'}},
                'v0_m3':_num, 'vmin_m3':_num, 'vmax_m3':_num, 'gamma_kw_per_m3':_nonneg,
                'casting_segments':{'type':'array', 'minItems':1,
                                    'items':{'type':'array', 'minItems':2, 'maxItems':2, 'items':_num}},
                'ladle_limit':_int, 'safety_margin_m3':_nonneg, 'p_max_kw':{'type':['number', 'null']},
            }}},
        'initial_state':{'type':'object', 'properties':{
            'buffer_m3':{'type':'object', 'additionalProperties':_num},
            'prior_taps':{'type':'object', 'additionalProperties':{'type':'array', 'items':_int}},
            'pinned_starts':{'type':'array', 'items':{
                'type':'object', 'required':['furnace', 'cycle', 'stage', 'start_step'],
                'properties':{'furnace':{'type':'string'}, 'cycle':_int, 'stage':_int, 'start_step':_int}}},
        }},
    },
}


def stageFromDict(d:dict) -> StageSpec:
    ramp = Ramp(**d['ramp']) if d.get('ramp') else None
    cm = ChargeMelt(**d['charge_melt']) if d.get('charge_melt') else None
    return StageSpec(kind=StageKind(d['kind']),
                     min_duration_s=d.get('min_duration_s', 0),
                     min_energy_kwh=d.get('min_energy_kwh', 0),
                     loss_coeff=d.get('loss_coeff', 0),
                     p_min_kw=d.get('p_min_kw', 0),
                     p_max_kw=d.get('p_max_kw', 0),
                     semi_continuous=d.get('semi_continuous', False),
                     is_tapping=d.get('is_tapping', False),
                     reheat_tau_s=d.get('reheat_tau_s', None),
                     ramp=ramp, charge_melt=cm, name=d.get('name', ''))


def instanceFromDict(d:dict) -> PlantInstance:
    '''validate the document against the schema and build a checked PlantInstance'''
    try:
        jsonschema.validate(d, INSTANCE_SCHEMA)
    except jsonschema.ValidationError as e:
        path = '/'.join([str(p) for p in e.absolute_path])
        raise InstanceError(f'Instance file invalid at {path}: {e.message}') from e
    templates = d.get('cycle_templates', {})
    furnaces = []
    for fd in d['furnaces']:
        cycles = []
        for cyc in fd['cycles']:
            if isinstance(cyc, str):
                if not cyc in templates:
                    raise InstanceError(f'Furnace {fd["id"]} uses unknown cycle template {cyc}')
                cyc = templates[cyc]
            cycles.append(tuple([stageFromDict(s) for s in cyc]))
        overrides = dict([((o['cycle'], o['stage']), o['value']) for o in fd.get('loss_coeff_overrides', [])])
        furnaces.append(FurnaceSpec(id=fd['id'], power_unit_id=fd['power_unit_id'], cycles=tuple(cycles),
                                    tap_volume_m3=fd['tap_volume_m3'],
                                    delivery_time_steps=fd['delivery_time_steps'],
                                    roundtrip_time_steps=fd['roundtrip_time_steps'],
                                    daf_relaxed_cycles=tuple(fd.get('daf_relaxed_cycles', [])),
                                    loss_overrides=overrides))
    lines = []
    for cd in d['lines']:
        lines.append(CastingLineSpec(id=cd['id'], furnaces=tuple(cd['furnaces']),
                                     v0_m3=cd['v0_m3'], vmin_m3=cd['vmin_m3'], vmax_m3=cd['vmax_m3'],
                                     gamma_kw_per_m3=cd['gamma_kw_per_m3'],
                                     casting_segments=tuple([(int(b), float(r)) for b, r in cd['casting_segments']]),
                                     ladle_limit=cd['ladle_limit'],
                                     safety_margin_m3=cd.get('safety_margin_m3', 0),
                                     p_max_kw=cd.get('p_max_kw', None)))
    ist = d.get('initial_state', {})
    initial = InitialState(buffer_m3=dict(ist.get('buffer_m3', {})),
                           prior_taps=dict([(k, tuple(v)) for k, v in ist.get('prior_taps', {}).items()]),
                           pinned_starts=dict([((p['furnace'], p['cycle'], p['stage']), p['start_step'])
                                               for p in ist.get('pinned_starts', [])]))
    instance = PlantInstance(lines=tuple(lines), furnaces=tuple(furnaces),
                             power_units=dict(d['power_units']), global_p_max_kw=d['global_p_max_kw'],
                             initial_state=initial, name=d.get('name', ''))
    instance.check()
    return instance


def loadInstance(path:str) -> PlantInstance:
    '''read a plant instance file'''
    if not os.path.exists(path):
        raise MissingFile(path)
    with open(path, 'r') as f:
        try:
            d = json.load(f)
        except json.JSONDecodeError as e:
            raise InstanceError(f'{path} is not valid JSON: {e}') from e
    instance = instanceFromDict(d)
    logger.info(f'Loaded instance {instance.name or path}: {len(instance.lines)} lines, {len(instance.furnaces)} furnaces')
    return instance
