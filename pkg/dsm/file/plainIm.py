#!/usr/bin/env python
'''Functions for importing and exporting csvs with a units row'''

# external packages
import os
import pandas as pd
from typing import List, Dict, Tuple, Union, Any, TextIO
import logging
import numpy as np

# local packages


# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


#----------------------------------------------

def plainIm(file:str, ic:Union[int, bool]=False, checkUnits:bool=True) -> Tuple[Union[pd.DataFrame, List[Any]], Dict]:
    '''import a csv to a pandas dataframe. ic is the index column. Int if there is an index column, False if there is none. checkUnits=False to assume that there is no units row. Otherwise, look for a units row'''
    if not os.path.exists(file):
        return [], {}
    try:
        toprows = pd.read_csv(file, index_col=ic, nrows=2)
    except (pd.errors.EmptyDataError, pd.errors.ParserError):
        return [], {}
    toprows = toprows.fillna('')
    row1 = list(toprows.iloc[0]) if len(toprows)>0 else []
    if checkUnits and len(row1)>0 and all([isinstance(s, str) for s in row1]):
        # row 2 is all str: this file has units
        unitdict = dict(toprows.iloc[0])
        skiprows = [1]
    else:
        unitdict = dict([[s, 'undefined'] for s in toprows])
        skiprows = []
    try:
        d = pd.read_csv(file, index_col=ic, dtype=float, skiprows=skiprows)
    except ValueError:
        d = pd.read_csv(file, index_col=ic, skiprows=skiprows)
    return d, unitdict


def plainExp(fn:str, data:pd.DataFrame, units:dict, index:bool=False) -> None:
    '''export the table with a units row under the header'''
    if len(data)==0 or len(units)==0:
        return
    folder = os.path.dirname(fn)
    if len(folder)>0:
        os.makedirs(folder, exist_ok=True)
    col = pd.MultiIndex.from_tuples([(k, units.get(k, '')) for k in data]) # index with units
    df = data.copy()
    df.columns = col
    df.to_csv(fn, index=index)
    logger.info(f'Exported {fn}')
