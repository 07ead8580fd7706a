#!/usr/bin/env python
'''Functions for exporting text, JSON and csv files'''

# external packages
import os
import json
import math
from typing import List, Dict, Tuple, Union, Any, TextIO
import logging
import numpy as np

# local packages

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

#----------------------------------------------

def mkdirif(folder:str) -> None:
    '''make the folder if it does not exist'''
    if len(folder)>0:
        os.makedirs(folder, exist_ok=True)


def exportFile(folder:str, file:str, text:str, diag:bool=True) -> str:
    '''exportFile exports a text file
    folder is the folder to save the file to
    file is a file base name (e.g. 'myfile.txt') within that folder
    text is the text to write to the file'''
    mkdirif(folder)
    fn = os.path.join(folder, file)
    with open(fn, "w", newline='\n') as f:
        f.write(text)
    if diag:
        logger.info("Exported file %s" % fn)
    return fn


def jsonSafe(obj:Any) -> Any:
    '''convert numpy values and infinities into plain JSON values. infinities become None'''
    if isinstance(obj, dict):
        return dict([(str(k), jsonSafe(v)) for k, v in obj.items()])
    if isinstance(obj, (list, tuple)):
        return [jsonSafe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonSafe(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return None
        return float(obj)
    return obj


def exportJSON(fn:str, d:dict, diag:bool=True) -> None:
    '''export a dictionary to a JSON file with stable formatting'''
    mkdirif(os.path.dirname(fn))
    with open(fn, 'w', newline='\n') as f:
        json.dump(jsonSafe(d), f, indent=1, allow_nan=False)
        f.write('\n')
    if diag:
        logger.info(f'Exported {fn}')
