#!/usr/bin/env python
'''Reading solver solution files and writing start files.
Dialects: name_value (one `name value` pair per line, with free-form header lines) and xml (CPLEX-style .sol)'''

# external packages
import os, sys
import re
from typing import List, Dict, Tuple, Union, Any, Optional
import logging
from xml.etree.ElementTree import parse, ParseError

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import UnparsableSolution
from milp.milp_model import MilpModel, MilpSolution, SolveStatus
from file.file_export import exportFile

# logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

_objre = re.compile(r'(?:objective(?:\s+value)?|=obj=)\s*[:=]?\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)', re.IGNORECASE)

#----------------------------------------------


def statusFromText(text:str, hasValues:bool) -> SolveStatus:
    '''solve status from the words the solver wrote'''
    t = text.lower()
    if 'infeasible' in t:
        return SolveStatus.INFEASIBLE
    if 'time limit' in t or 'stopped on time' in t or 'timelimit' in t:
        return SolveStatus.TIME_LIMIT
    if 'optimal' in t:
        return SolveStatus.OPTIMAL
    if hasValues:
        return SolveStatus.FEASIBLE
    return SolveStatus.ERROR


def tryNumber(s:str) -> Optional[float]:
    try:
        return float(s)
    except ValueError:
        return None


def parseNameValue(text:str, model:MilpModel, fillMissing:bool=False) -> MilpSolution:
    '''parse a name/value listing. lines whose name is not a model variable are treated as header text.
    `index name value ...` rows are accepted too'''
    values = {}
    header = []
    for line in text.splitlines():
        tokens = line.split()
        if len(tokens)==0:
            continue
        if tokens[0] in model.index and len(tokens)>=2 and tryNumber(tokens[1]) is not None:
            values[tokens[0]] = float(tokens[1])
        elif len(tokens)>=3 and tokens[0].isdigit() and tokens[1] in model.index and tryNumber(tokens[2]) is not None:
            values[tokens[1]] = float(tokens[2])
        else:
            header.append(line)
    htext = '\n'.join(header)
    status = statusFromText(htext, len(values)>0)
    if status==SolveStatus.ERROR:
        raise UnparsableSolution(f'No status and no values in solution: {htext[:200]}')
    m = _objre.search(htext)
    objective = float(m.group(1)) if m else None
    if status!=SolveStatus.INFEASIBLE:
        if len(values)==0:
            raise UnparsableSolution('Solution lists no variable values')
        if fillMissing:
            values = dict([(v.name, values.get(v.name, 0)) for v in model.variables])
    else:
        values = {}
    return MilpSolution(status=status, values=values, objective=objective, message=htext[:200])


def parseXml(path:str, model:MilpModel) -> MilpSolution:
    '''parse a CPLEX-style XML solution'''
    try:
        doc = parse(path).getroot()
    except ParseError as e:
        raise UnparsableSolution(f'{path} is not valid XML: {e}') from e
    head = doc.find('.//header')
    if head is None:
        raise UnparsableSolution(f'{path} has no header element')
    values = {}
    for item in doc.findall('.//variables/variable'):
        name = item.get('name')
        val = tryNumber(item.get('value', ''))
        if name is None or val is None:
            raise UnparsableSolution(f'Bad variable entry in {path}: {item.attrib}')
        values[name] = val
    status = statusFromText(head.get('solutionStatusString', ''), len(values)>0)
    if status==SolveStatus.ERROR:
        raise UnparsableSolution(f'No status and no values in {path}')
    obj = tryNumber(head.get('objectiveValue', ''))
    gap = tryNumber(head.get('MIPRelativeGap', ''))
    if status==SolveStatus.INFEASIBLE:
        values = {}
    return MilpSolution(status=status, values=values, objective=obj, gap=gap)


def readSolution(path:str, dialect:str, model:MilpModel, fillMissing:bool=False) -> MilpSolution:
    '''parse the solution file at path in the given dialect'''
    if not os.path.exists(path):
        raise UnparsableSolution(f'No solution file at {path}')
    if dialect=='xml':
        return parseXml(path, model)
    elif dialect=='name_value':
        with open(path, 'r') as f:
            return parseNameValue(f.read(), model, fillMissing)
    raise ValueError(f'Unknown solution dialect {dialect}. Options are name_value, xml')


def startFileText(model:MilpModel, values:Dict[str, float]) -> str:
    '''start solution as `name value` lines in declaration order'''
    lines = [f'# start solution for {model.name}']
    for v in model.variables:
        if v.name in values:
            lines.append(f'{v.name} {float(values[v.name])!r}')
    return '\n'.join(lines)+'\n'


def writeStartFile(folder:str, file:str, model:MilpModel, values:Dict[str, float]) -> str:
    return exportFile(folder, file, startFileText(model, values), diag=False)
