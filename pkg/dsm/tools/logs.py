#!/usr/bin/env python
'''Functions for handling logs'''

# external packages
import os, sys
from typing import List, Dict, Tuple, Union, Any, TextIO
import time
import logging, socket

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.config import cfg

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


#----------------------------------------------

def logFN(scriptFile:str, logfolder:str='') -> str:
    '''Get a log file name, given a script file name'''
    compname = socket.gethostname()
    base = os.path.splitext(os.path.basename(scriptFile))[0]
    if len(logfolder)==0:
        dirpath = os.path.dirname(os.path.dirname(os.path.realpath(__file__)))
        try:
            cfgbase = cfg.path.logs
        except AttributeError:
            cfgbase = 'logs'
        logfolder = os.path.join(os.path.dirname(dirpath), cfgbase)
    os.makedirs(logfolder, exist_ok=True)
    return os.path.join(logfolder, f'{base}_{compname}.log')

def openLog(f:str, LOGGERDEFINED:bool, level:str="INFO", exportLog:bool=True, logfolder:str='') -> bool:
    '''create a log file and print log messages to stdout. f is the file name of the script calling the openLog function'''

    if not LOGGERDEFINED:
        loglevel = getattr(logging, level)
        root = logging.getLogger()
        if len(root.handlers)>0:
            # if handlers are already set up, don't set them up again
            return True
        root.setLevel(loglevel)

        # send messages to file
        if exportLog:
            logfile = logFN(f, logfolder)
            filehandler = logging.FileHandler(logfile)
            filehandler.setLevel(loglevel)
            formatter = logging.Formatter("%(asctime)s/{}/%(levelname)s: %(message)s".format(socket.gethostname()), datefmt='%b%d/%H:%M:%S')
            filehandler.setFormatter(formatter)
            root.addHandler(filehandler)
            logging.info(f'Established log: {logfile}')

        # print messages
        handler = logging.StreamHandler(sys.stdout)
        handler.setLevel(loglevel)
        formatter2 = logging.Formatter('%(levelname)s: %(message)s')
        handler.setFormatter(formatter2)
        root.addHandler(handler)
        LOGGERDEFINED = True

    return LOGGERDEFINED


class stopwatch:
    '''time a block of code. use as a context manager, then read .seconds'''

    def __init__(self, label:str='', diag:bool=True):
        self.label = label
        self.diag = diag
        self.seconds = 0

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *args):
        self.seconds = time.perf_counter()-self.t0
        if self.diag and len(self.label)>0:
            logger.info(f'{self.label}: {self.seconds:.2f} s')
