#!/usr/bin/env python
'''Tools for loading settings'''

# external packages
import yaml
import sys
import os
from typing import List, Dict, Tuple, Union, Any
import logging
from box import Box
import shutil

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import MissingFile

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------------


def getConfigDir() -> str:
    '''find the configs directory'''
    currentdir = os.path.dirname(os.path.realpath(__file__))
    configdir = os.path.join(currentdir, 'configs')
    if not os.path.exists(configdir):
        parentdir = os.path.dirname(currentdir)
        configdir = os.path.join(parentdir, 'configs')
        if not os.path.exists(configdir):
            grandparentdir = os.path.dirname(parentdir)
            configdir = os.path.join(grandparentdir, 'configs')
            if not os.path.exists(configdir):
                raise FileNotFoundError(f"No configs directory found")
    return configdir

def dumpConfigs(cfg:Union[Box, dict], path:str) -> int:
    '''Saves config file. cfg could be a Box or a dict'''
    with open(path, "w") as ymlout:
        if isinstance(cfg, Box):
            cout = cfg.to_dict()
        elif isinstance(cfg, dict):
            cout = cfg
        else:
            return 1
        yaml.safe_dump(cout, ymlout)
        return 0


def findConfigFile() -> str:
    '''find the config file and return the path. copies the template if there is no config.yml yet'''
    configdir = getConfigDir()
    path = os.path.join(configdir, "config.yml")
    if os.path.exists(path):
        return path
    template = os.path.join(configdir, 'config_template.yml')
    if os.path.exists(template):
        shutil.copy2(template, path)
        return path
    raise FileNotFoundError(f'No config.yml or config_template.yml in {configdir}')


def loadConfigFile(path:str) -> Box:
    '''open the config file and turn it into a Box'''
    if not os.path.exists(path):
        raise MissingFile(path)
    with open(path, "r") as ymlfile:
        y = yaml.safe_load(ymlfile)
    if y is None:
        y = {}
    return Box(y)

def loadConfig() -> Box:
    path = findConfigFile()
    return loadConfigFile(path)


def loadRunConfig(path:str='', overrides:dict={}) -> Box:
    '''load the default config, merge the run file at path on top of it, then merge the overrides.
    Relative paths in the run file section `run` are resolved against the run file folder'''
    c = Box(cfg.to_dict())
    if len(path)>0:
        run = loadConfigFile(path)
        runfolder = os.path.dirname(os.path.abspath(path))
        if 'run' in run:
            for key in ['instance', 'prices', 'penalties', 'schedule', 'output']:
                val = run.run.get(key, '')
                if isinstance(val, str) and len(val)>0 and not os.path.isabs(val):
                    run.run[key] = os.path.normpath(os.path.join(runfolder, val))
        c.merge_update(run)
    if len(overrides)>0:
        c.merge_update(Box(overrides))
    return c


def solverProfile(c:Box, name:str='') -> Box:
    '''get the solver profile. DSM_SOLVER overrides the command template of external profiles'''
    if len(name)==0:
        name = c.solver.profile
    if not name in c.solver.profiles:
        raise KeyError(f'Unknown solver profile {name}. Options are {list(c.solver.profiles.keys())}')
    profile = Box(c.solver.profiles[name].to_dict())
    profile.name = name
    env = os.environ.get('DSM_SOLVER', '')
    if len(env)>0 and profile.kind=='external':
        logger.info(f'Solver command overridden by DSM_SOLVER: {env}')
        profile.command = env
    return profile

#----------------------------------------------------

cfg = loadConfig()
