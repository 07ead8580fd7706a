#!/usr/bin/env python
'''Command line verbs: eas, reserve, aggregate, validate, plotdata. Each verb reads the run file given
with -c (merged on top of the default config), writes JSON or csv files to the output folder and
exits with the code of the error family that stopped it'''

# external packages
import os, sys
import argparse
import json
from typing import List, Dict, Tuple, Union, Any, Optional
import logging
import numpy as np
from box import Box

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(currentdir)
from tools.config import loadRunConfig, solverProfile, dumpConfigs
from tools.logs import openLog
from tools.errors import DSMError, MissingFile, InputError, ValidationFailed, ZeroBaseline
from file.file_export import exportJSON
from grid.time_grid import TimeGrid, gridFromConfig
from plant.plant_specs import PlantInstance
from plant.instance_file import loadInstance
from plant.schedule import Schedule, exportSchedule, loadSchedule
from plant.validator import validateSchedule
from market.prices import loadPricesCsv, expandToGrid, loadPenaltiesCsv
from market.tou import tariffFromConfig, touSeries
from eas.eas_model import easConfigFrom
from eas.eas_pipeline import solvePlant, plantSchedule
from eas.baseline import costSummary
from reserve.reserve_model import reserveParamsFrom
from reserve.reserve_day import solveReserveDay
from reserve.bids import BidBlock, bidBlocks, bidFromDict
from reserve.aggregate import aggregateInternal
from plot.plot_data import exportPlotData

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

VERBS = ['eas', 'reserve', 'aggregate', 'validate', 'plotdata']

#----------------------------------------------


def parseArgs(argv:Optional[List[str]]=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog='dsm', description='Energy-aware scheduling and reserve bidding of a melt shop')
    parser.add_argument('verb', choices=VERBS)
    parser.add_argument('-c', '--config', default='', help='run file, merged on top of the default config')
    parser.add_argument('--mct', action='store_true', help='schedule at a constant price (minimum cycle time)')
    parser.add_argument('--jobs', type=int, default=-1, help='concurrent line or interval solves, -1 uses every core')
    parser.add_argument('--seed', type=int, default=None, help='seed for any tie-breaking randomness')
    parser.add_argument('--solver', default='', help='solver profile name')
    parser.add_argument('--out', default='', help='output folder')
    parser.add_argument('--time-limit', type=float, default=None, help='seconds per solve')
    parser.add_argument('--decompose', action='store_true', help='warm-start each line from its power-unit sub-models')
    parser.add_argument('--na', type=int, default=None, help='activations per day for the aggregation')
    parser.add_argument('--schedule', default='', help='schedule JSON for reserve, validate and plotdata')
    parser.add_argument('--bids', nargs='*', default=[], help='bid files for aggregate and plotdata')
    parser.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    return parser.parse_args(argv)


#----------------------------------------------
# inputs

def runValue(c:Box, key:str, default:str='') -> str:
    return c.get('run', Box()).get(key, default) or default


def outFolder(c:Box, args:argparse.Namespace) -> str:
    '''output folder, with a copy of the merged settings of this run'''
    out = args.out or runValue(c, 'output') or c.path.output
    os.makedirs(out, exist_ok=True)
    dumpConfigs(c, os.path.join(out, 'run_config.yml'))
    return out


def loadPrices(c:Box, grid:TimeGrid) -> np.ndarray:
    '''day-ahead EUR/MWh per scheduling step, from the price csv of the run or the TOU tariff'''
    path = runValue(c, 'prices')
    if len(path)>0:
        return expandToGrid(loadPricesCsv(path), grid)
    tou = runValue(c, 'tou')
    if len(tou)>0:
        season, day = (tou.split(':')+['weekday'])[:2]
        return expandToGrid(touSeries(tariffFromConfig(c, season), day), grid)
    raise InputError('The run needs a price file (run.prices) or a tariff (run.tou: season:day_type)')


def loadPenalties(c:Box, grid:TimeGrid) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    path = runValue(c, 'penalties')
    if len(path)==0:
        return None
    return loadPenaltiesCsv(path, grid)


def schedulePath(c:Box, args:argparse.Namespace, out:str) -> str:
    path = args.schedule or runValue(c, 'schedule') or os.path.join(out, 'schedule.json')
    if not os.path.exists(path):
        raise MissingFile(path)
    return path


def loadBids(paths:List[str]) -> Dict[str, List[BidBlock]]:
    '''bid blocks by line from one or more bid files'''
    bids = {}
    for p in paths:
        if not os.path.exists(p):
            raise MissingFile(p)
        with open(p, 'r') as f:
            d = json.load(f)
        for cid, blocks in d['lines'].items():
            bids[cid] = [bidFromDict(b) for b in blocks]
    return bids


def worstCode(errors:List[DSMError]) -> int:
    return max([e.exitCode for e in errors]+[0])


#----------------------------------------------
# verbs

def cmdEas(c:Box, args:argparse.Namespace) -> int:
    instance = loadInstance(runValue(c, 'instance'))
    grid = gridFromConfig(c)
    prices = loadPrices(c, grid)
    out = outFolder(c, args)
    config = easConfigFrom(c, mct_mode=args.mct or bool(c.eas.mct_mode))
    decompose = args.decompose or bool(c.eas.get('decompose', False))
    schedules, sols, errors = solvePlant(instance, grid, prices, config, solverProfile(c), args.time_limit,
                                         decompose, jobs=args.jobs)
    for cid, s in schedules.items():
        exportSchedule(os.path.join(out, f'schedule_{cid}.json'), s)
    summary = {'grid':grid.toDict(), 'errors':dict([(cid, str(e)) for cid, e in errors.items()]),
               'status':dict([(cid, s.status.value) for cid, s in sols.items()])}
    if len(schedules)>0:
        plant = plantSchedule(schedules, 'MCT' if config.mct_mode else 'DAEA')
        exportSchedule(os.path.join(out, 'schedule.json'), plant)
        summary.update(costSummary(plant, instance, prices, grid))
        report = validateSchedule(instance, grid, plant)
        summary['validation'] = report.toDict()
        if not report.ok:
            logger.error(f'Schedule breaks {report.families()}')
            errors['validation'] = ValidationFailed(f'{len(report.violations)} violations')
    exportJSON(os.path.join(out, 'summary.json'), summary)
    return worstCode(list(errors.values()))


def cmdReserve(c:Box, args:argparse.Namespace) -> int:
    instance = loadInstance(runValue(c, 'instance'))
    grid = gridFromConfig(c)
    prices = loadPrices(c, grid)
    out = outFolder(c, args)
    schedule = loadSchedule(schedulePath(c, args, out))
    params = reserveParamsFrom(c, grid, prices, loadPenalties(c, grid))
    doc = {'grid':grid.toDict(), 'lines':{}, 'results':{}, 'errors':{}}
    failures = []
    for cid in schedule.lines:
        results, errors = solveReserveDay(instance, cid, grid, schedule, params, solverProfile(c),
                                          args.time_limit, jobs=args.jobs)
        for q, r in results.items():
            exportSchedule(os.path.join(out, 'contingency', f'{cid}_q{q}.json'), r.contingency)
        bids = bidBlocks(results, grid, params, line=cid)
        doc['lines'][cid] = [b.toDict() for b in bids]
        doc['results'][cid] = [r.toDict() for r in results.values()]
        doc['errors'][cid] = dict([(str(q), str(e)) for q, e in errors.items()])
        failures += [e for e in errors.values() if not isinstance(e, ZeroBaseline)]
    if args.na is not None:
        plan = aggregateInternal(dict([(cid, [bidFromDict(b) for b in bl]) for cid, bl in doc['lines'].items()]),
                                 args.na, profile=solverProfile(c), time_limit=args.time_limit)
        doc['aggregation'] = plan.toDict()
    exportJSON(os.path.join(out, 'bids.json'), doc)
    return worstCode(failures)


def cmdAggregate(c:Box, args:argparse.Namespace) -> int:
    out = outFolder(c, args)
    bids = loadBids(args.bids or [os.path.join(out, 'bids.json')])
    na = args.na if args.na is not None else int(c.aggregate.activations)
    plan = aggregateInternal(bids, na, profile=solverProfile(c), time_limit=args.time_limit)
    exportJSON(os.path.join(out, 'aggregation.json'), plan.toDict())
    return 0


def cmdValidate(c:Box, args:argparse.Namespace) -> int:
    instance = loadInstance(runValue(c, 'instance'))
    grid = gridFromConfig(c)
    out = outFolder(c, args)
    schedule = loadSchedule(schedulePath(c, args, out))
    report = validateSchedule(instance, grid, schedule)
    exportJSON(os.path.join(out, 'validation.json'), report.toDict())
    if report.ok:
        logger.info('Schedule is valid')
        return 0
    for v in report.violations[:20]:
        logger.error(f'{v.family} at {v.indices}: {v.slack:g}')
    return ValidationFailed.exitCode


def cmdPlotdata(c:Box, args:argparse.Namespace) -> int:
    out = outFolder(c, args)
    grid = gridFromConfig(c)
    path = args.schedule or runValue(c, 'schedule') or os.path.join(out, 'schedule.json')
    schedule = loadSchedule(path) if os.path.exists(path) else None
    instance = loadInstance(runValue(c, 'instance')) if len(runValue(c, 'instance'))>0 else None
    bidFiles = args.bids or [p for p in [os.path.join(out, 'bids.json')] if os.path.exists(p)]
    bids = loadBids(bidFiles) if len(bidFiles)>0 else None
    if schedule is None and bids is None:
        raise MissingFile(path)
    exportPlotData(out, schedule, instance, bids, grid)
    return 0


COMMANDS = {'eas':cmdEas, 'reserve':cmdReserve, 'aggregate':cmdAggregate, 'validate':cmdValidate, 'plotdata':cmdPlotdata}


def main(argv:Optional[List[str]]=None) -> int:
    args = parseArgs(argv)
    openLog(__file__, False, level=args.log_level)
    if args.seed is not None:
        np.random.seed(args.seed)
    try:
        overrides = {'solver':{'profile':args.solver}} if len(args.solver)>0 else {}
        c = loadRunConfig(args.config, overrides)
        code = COMMANDS[args.verb](c, args)
    except DSMError as e:
        logger.error(f'{type(e).__name__}: {e}')
        return e.exitCode
    except KeyError as e:
        logger.error(f'Missing setting {e}')
        return 1
    logger.info(f'{args.verb} finished with exit code {code}')
    return code


if __name__=='__main__':
    sys.exit(main())
