#!/usr/bin/env python
'''Tests for the MILP container, model file writers, solution readers, the solver front end and
activation extraction'''

# external packages
import os, sys
import pytest
from box import Box

# local packages
currentdir = os.path.dirname(os.path.realpath(__file__))
sys.path.append(os.path.dirname(currentdir))
from tools.errors import DuplicateName, UndeclaredVariable, InfeasibleSchedule, NameTooLong, EmptyModel, \
    UnparsableSolution, SolverNotFound, SolverCrashed, SolverInconsistency
from milp.milp_model import MilpModel, MilpSolution, LinExpr, lsum, SolveStatus
from milp.compile_model import emitModel, exportModel, num
from milp.solution_reader import parseNameValue, readSolution, startFileText
from milp.solver import solve, fallbackToStart
from milp.extract import node, activationTerm, startStep, snapPower
from milp.naming import nameX, nameZeta

#----------------------------------------------


def smallModel() -> MilpModel:
    '''max 3x + 2y, x + y <= 5, y - x >= 1, x binary, 0 <= y <= 10. optimum x=1, y=4, objective 11'''
    m = MilpModel('small')
    m.addVar('y', upper=10)
    m.addBinary('x')
    m.addConstraint('cap', LinExpr({'x':1, 'y':1}), '<=', 5)
    m.addConstraint('gap', LinExpr({'y':1, 'x':-1}), '>=', 1)
    m.setObjective(LinExpr({'x':3, 'y':2}), 'max')
    return m


SCIPY = Box({'kind':'scipy', 'name':'scipy'})

#----------------------------------------------


def test_linexpr_arithmetic():
    e = LinExpr.var('a', 2)+LinExpr.var('b')-3
    e2 = 2*e-LinExpr.var('a')
    assert e2.terms=={'a':3, 'b':2}
    assert e2.const==-6
    assert e2.value({'a':1, 'b':1})==pytest.approx(-1)
    assert lsum([LinExpr.var('a'), 1, LinExpr.var('a')]).terms=={'a':2}


def test_expression_value_takes_the_solution():
    assert LinExpr({'a':2}, 1).value({'a':1})==3
    assert LinExpr(const=4).value({})==4


def test_constants_move_to_rhs():
    m = MilpModel()
    m.addVar('a')
    m.addConstraint('r', LinExpr.var('a')+4, '<=', 10)
    assert m.constraints[0].rhs==6


def test_duplicate_and_undeclared():
    m = smallModel()
    with pytest.raises(DuplicateName):
        m.addVar('x')
    with pytest.raises(DuplicateName):
        m.addConstraint('cap', LinExpr.var('x'), '<=', 1)
    with pytest.raises(UndeclaredVariable):
        m.addConstraint('z', LinExpr.var('z'), '<=', 1)


def test_constant_rows():
    m = smallModel()
    assert not m.addConstraint('fine', LinExpr(const=1), '<=', 2)
    with pytest.raises(InfeasibleSchedule):
        m.addConstraint('broken', LinExpr(const=3), '<=', 2)


def test_check_feasible():
    m = smallModel()
    assert m.checkFeasible({'x':1, 'y':4})==[]
    assert [n for n, v in m.checkFeasible({'x':1, 'y':5})]==['cap']
    assert [n for n, v in m.checkFeasible({'x':0.5, 'y':3})]==['x']
    assert m.completeValues({'x':1})=={'x':1, 'y':0}


def test_check_feasible_uses_an_absolute_tolerance():
    m = MilpModel()
    m.addVar('e', upper=20000)
    m.addConstraint('energy', LinExpr.var('e'), '>=', 10000)
    assert [n for n, v in m.checkFeasible({'e':10000-0.009})]==['energy']
    assert m.checkFeasible({'e':10000-1e-7})==[]


#----------------------------------------------

def test_num():
    assert num(3.0)=='3'
    assert num(0.1)=='0.1'
    assert num(-2)=='-2'


def test_mps_sections():
    s = emitModel(smallModel(), 'mps')
    order = [s.index(h) for h in ['NAME small', 'ROWS', 'COLUMNS', 'RHS', 'BOUNDS', 'ENDATA']]
    assert order==sorted(order)
    assert ' L  cap' in s and ' G  gap' in s
    assert "'INTORG'" in s and "'INTEND'" in s
    # max is written as min of the negated objective
    assert '    x  obj  -3' in s
    assert ' BV BND  x' in s
    assert ' UP BND  y  10' in s


def test_emit_is_deterministic():
    assert emitModel(smallModel(), 'mps')==emitModel(smallModel(), 'mps')
    assert emitModel(smallModel(), 'lp')==emitModel(smallModel(), 'lp')


def test_lp_text():
    s = emitModel(smallModel(), 'lp')
    assert 'Minimize' in s
    assert ' obj: -2 y - 3 x' in s
    assert ' cap: 1 x + 1 y <= 5' in s
    assert 'Binaries\n x\n' in s
    assert ' 0 <= y <= 10' in s
    assert s.endswith('End\n')


def test_emit_limits():
    with pytest.raises(NameTooLong):
        emitModel(smallModel(), 'mps', maxName=2)
    with pytest.raises(EmptyModel):
        emitModel(MilpModel('empty'), 'mps')
    with pytest.raises(ValueError):
        emitModel(smallModel(), 'nl')


def test_export_model(tmp_path):
    fn = exportModel(smallModel(), str(tmp_path), 'small.mps')
    with open(fn, 'r') as f:
        assert f.read()==emitModel(smallModel())


#----------------------------------------------

def test_parse_name_value():
    text = 'Model status : Optimal\nObjective value : 11\n# Columns 2\nx 1\ny 4\n'
    sol = parseNameValue(text, smallModel())
    assert sol.status==SolveStatus.OPTIMAL
    assert sol.objective==pytest.approx(11)
    assert sol.values=={'x':1, 'y':4}


def test_parse_indexed_rows_and_fill():
    sol = parseNameValue('Optimal - objective value 3\n0 x 1\n', smallModel(), fillMissing=True)
    assert sol.values=={'y':0, 'x':1}


def test_parse_infeasible():
    sol = parseNameValue('Problem is infeasible\n', smallModel())
    assert sol.status==SolveStatus.INFEASIBLE
    assert not sol.hasValues


def test_time_limit_keeps_the_better_start():
    m = smallModel()
    start = {'x':1, 'y':4}
    sol = fallbackToStart(m, MilpSolution(SolveStatus.TIME_LIMIT), start)
    assert sol.values==start
    sol = fallbackToStart(m, MilpSolution(SolveStatus.TIME_LIMIT, {'x':0, 'y':1}), start)
    assert sol.values==start
    sol = fallbackToStart(m, MilpSolution(SolveStatus.TIME_LIMIT, {'x':0, 'y':1}), {'x':0, 'y':9})
    assert sol.values=={'x':0, 'y':1}
    sol = fallbackToStart(m, MilpSolution(SolveStatus.OPTIMAL, {'x':0, 'y':1}), start)
    assert sol.values=={'x':0, 'y':1}


def test_parse_garbage():
    with pytest.raises(UnparsableSolution):
        parseNameValue('segmentation fault\n', smallModel())


def test_parse_xml(tmp_path):
    fn = tmp_path/'s.sol'
    fn.write_text('<?xml version="1.0"?>\n<CPLEXSolution version="1.2">\n'
                  ' <header objectiveValue="11" solutionStatusString="integer optimal solution" MIPRelativeGap="0"/>\n'
                  ' <variables>\n  <variable name="y" index="0" value="4"/>\n  <variable name="x" index="1" value="1"/>\n'
                  ' </variables>\n</CPLEXSolution>\n')
    sol = readSolution(str(fn), 'xml', smallModel())
    assert sol.status==SolveStatus.OPTIMAL
    assert sol.values=={'y':4, 'x':1}
    assert sol.gap==0


def test_missing_solution_file(tmp_path):
    with pytest.raises(UnparsableSolution):
        readSolution(str(tmp_path/'none.sol'), 'name_value', smallModel())


def test_start_file_text():
    lines = startFileText(smallModel(), {'x':1, 'y':4}).splitlines()
    assert lines[1:]==['y 4.0', 'x 1.0']


#----------------------------------------------

def test_solve_scipy():
    sol = solve(smallModel(), SCIPY, time_limit=30)
    assert sol.status==SolveStatus.OPTIMAL
    assert sol.objective==pytest.approx(11)
    assert sol.values['x']==1
    assert sol.values['y']==pytest.approx(4)


def test_solve_infeasible():
    m = smallModel()
    m.addConstraint('big', LinExpr.var('y'), '>=', 20)
    sol = solve(m, SCIPY, time_limit=30)
    assert sol.status==SolveStatus.INFEASIBLE
    assert not sol.hasValues


def test_external_solver_missing():
    p = Box({'kind':'external', 'name':'ghost', 'command':'no_such_solver_dsm {model} {solution}', 'dialect':'name_value'})
    with pytest.raises(SolverNotFound):
        solve(smallModel(), p, time_limit=5)


def test_external_solver_script(tmp_path):
    script = tmp_path/'fake.sh'
    script.write_text('#!/bin/sh\nprintf "Model status : Optimal\\nx 1\\ny 4\\n" > "$2"\n')
    p = Box({'kind':'external', 'name':'fake', 'command':f'sh {script} {{model}} {{solution}}', 'dialect':'name_value'})
    sol = solve(smallModel(), p, time_limit=5)
    assert sol.status==SolveStatus.OPTIMAL
    assert sol.objective==pytest.approx(11)


def test_external_solver_crash(tmp_path):
    script = tmp_path/'crash.sh'
    script.write_text('#!/bin/sh\necho boom >&2\nexit 3\n')
    p = Box({'kind':'external', 'name':'crash', 'command':f'sh {script} {{model}} {{solution}}', 'dialect':'name_value'})
    with pytest.raises(SolverCrashed):
        solve(smallModel(), p, time_limit=5)


def test_external_solver_reads_model_file(tmp_path):
    # the fake solver copies the model it was given next to the test
    script = tmp_path/'copy.sh'
    script.write_text(f'#!/bin/sh\ncp "$1" {tmp_path}/seen.mps\nprintf "optimal\\nx 0\\ny 5\\n" > "$2"\n')
    p = Box({'kind':'external', 'name':'copy', 'command':f'sh {script} {{model}} {{solution}}', 'dialect':'name_value'})
    sol = solve(smallModel(), p, time_limit=5)
    assert (tmp_path/'seen.mps').read_text()==emitModel(smallModel(), 'mps')
    assert sol.objective==pytest.approx(10)


#----------------------------------------------

def test_activation_terms():
    nd = node('F1', 1, 2, es=3, ls=5)
    K = 8
    assert activationTerm(nd, 2, K)==0
    assert activationTerm(nd, 3, K)==nameX('F1', 1, 2, 3)
    assert activationTerm(nd, 5, K)==1
    assert activationTerm(nd, K+1, K)==1


def test_relaxed_activation_terms():
    K = 8
    nd = node('F1', 2, 1, es=3, ls=K+1, relaxed=True)
    assert activationTerm(nd, K, K)==nameZeta('F1', 2, 1)
    assert activationTerm(nd, K+1, K)==nameZeta('F1', 2, 1)
    end = node('F1', None, None, es=4, ls=K+1, relaxed=True)
    assert activationTerm(end, K, K)==nameX('F1', None, None, K)
    assert activationTerm(end, K+1, K)==nameZeta('F1', None, None)


def test_start_step():
    K = 8
    nd = node('F1', 1, 1, es=1, ls=4)
    values = {nameX('F1', 1, 1, 1):0, nameX('F1', 1, 1, 2):1, nameX('F1', 1, 1, 3):1}
    assert startStep(nd, K, values)==2
    values[nameX('F1', 1, 1, 3)] = 0
    with pytest.raises(SolverInconsistency):
        startStep(nd, K, values)


def test_deferred_start_is_none():
    K = 4
    nd = node('F1', 2, 1, es=1, ls=K+1, relaxed=True)
    values = dict([(nameX('F1', 2, 1, k), 0) for k in range(1, K)])
    values[nameZeta('F1', 2, 1)] = 0
    assert startStep(nd, K, values) is None


def test_power_snaps_to_its_bounds():
    assert snapPower(-1e-7, 1000)==0
    assert snapPower(1e-12, 1000)==0
    assert snapPower(1000+1e-7, 1000)==1000
    assert snapPower(400, 1000)==400
