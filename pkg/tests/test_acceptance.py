"""Acceptance criteria 1-8.

Each test carries an ``acceptance`` marker; conftest prints one PASS/FAIL
line per criterion in the terminal summary.
"""

import json
import random
import re
import time

import pytest

from fdtrace.analyzers import TraceValidator, build_search_tree, oracle_solve, validate_trace
from fdtrace.cli import main
from fdtrace.constraints import ConstraintForm, Kind
from fdtrace.domain import Domain, VarRef
from fdtrace.engine import Engine
from fdtrace.model import generate_nqueens, random_model
from fdtrace.search import solve
from fdtrace.trace import Port, TraceRecorder, read_trace

from helpers import CheckingEngine

# Frozen reference trace of sorted([X, Y, Z]), compared token by token.
REFERENCE = """\
 1 [1] Tell    X##Y  X:[1,2,3] Y:[1,2,3]
 2 [1] Suspend X##Y  X:[1,2,3] Y:[1,2,3]
 3 [2] Tell    X#>=Y X:[1,2,3] Y:[1,2,3]
 4 [2] Suspend X#>=Y X:[1,2,3] Y:[1,2,3]
 5 [3] Tell    Y#>Z  Y:[1,2,3] Z:[1,2,3]
 6 [3] Reduce  Y#>Z  Y:[1,2,3] Z:[1,2,3] Y[1]
 7 [3] Wake-up X#>=Y X:[1,2,3] Y:[2,3]
 8 [3] Reduce  Y#>Z  Y:[2,3]   Z:[1,2,3] Z[3]
 9 [3] Suspend Y#>Z  Y:[2,3]   Z:[1,2]
10 [3] Select  X#>=Y X:[1,2,3] Y:[2,3]
11 [3] Reduce  X#>=Y X:[1,2,3] Y:[2,3]   X[1]
12 [3] Suspend X#>=Y X:[2,3]   Y:[2,3]
13 [4] Tell    X#=2  X:[2,3]
14 [4] Reduce  X#=2  X:[2,3]             X[3]
15 [4] Wake-up X#>=Y X:[2]     Y:[2,3]
16 [4] Wake-up X##Y  X:[2]     Y:[2,3]
17 [4] True    X#=2  X:[2]
18 [4] Select  X#>=Y X:[2]     Y:[2,3]
19 [4] Reduce  X#>=Y X:[2]     Y:[2,3]   Y[3]
20 [4] Wake-up Y#>Z  Y:[2]     Z:[1,2]
21 [4] True    X#>=Y  X:[2]     Y:[2]
22 [4] Select  X##Y   X:[2]     Y:[2]
23 [4] Reduce  X##Y   X:[2]     Y:[2]   X[2]
24 [4] Reject  X##Y   X:[]      Y:[2]
25 [4] Told    X#=2   X:[]
26 [4] Tell    X#=3   X:[2,3]
27 [4] Reduce  X#=3   X:[2,3]           X[2]
28 [4] Wake-up X##Y   X:[3]     Y:[2,3]
29 [4] True    X#=3   X:[3]
30 [4] Select  X##Y   X:[3]     Y:[2,3]
31 [4] Reduce  X##Y   X:[3]     Y:[2,3] Y[3]
32 [4] Wake-up Y#>Z   Y:[2]     Z:[1,2]
33 [4] True    X##Y   X:[3]     Y:[2]
34 [4] Select  Y#>Z   Y:[2]     Z:[1,2]
35 [4] Reduce  Y#>Z   Y:[2]     Z:[1,2] Z[2]
36 [4] True    Y#>Z   Y:[2]     Z:[1]
37 [4] Told    X#=3   X:[3]
38 [3] Told    Y#>Z   Y:[2,3]   Z:[1,2]
39 [2] Told    X#>=Y  X:[1,2,3] Y:[1,2,3]
40 [1] Told    X##Y   X:[1,2,3] Y:[1,2,3]
"""

RANDOM_SEEDS = range(200)


def _timed_main(capsys, *argv):
    start = time.perf_counter()
    code = main(list(argv))
    elapsed = time.perf_counter() - start
    out, err = capsys.readouterr()
    return code, out, err, elapsed


@pytest.mark.acceptance(1, "reference trace replay of sorted([X, Y, Z])")
def test_reference_trace_replay(capsys, tmp_path, report):
    code, out, _, elapsed = _timed_main(capsys, "solve", "--builtin", "sorted", "--format", "compact")
    assert code == 0
    lines = out.splitlines()
    trace_lines = [l for l in lines if not l.startswith("{")]
    expected = [l.split() for l in REFERENCE.splitlines()]
    assert len(trace_lines) == 40
    mismatches = [(i + 1, got, want) for i, (got, want)
                  in enumerate(zip((l.split() for l in trace_lines), expected)) if got != want]
    assert mismatches == []

    path = tmp_path / "sorted.fdtrace.jsonl"
    assert main(["solve", "--builtin", "sorted", "--trace", str(path)]) == 0
    capsys.readouterr()
    events = list(read_trace(path))
    e14, e16 = events[13], events[15]
    assert (e14.withdrawn[0].name, list(e14.withdrawn[1])) == ("X", [3])
    assert [f"{v.name}->{t.value}" for v, t in e14.update] == ["X->any", "X->ground", "X->max"]
    assert list(e14.store.S) == [(2, "X#>=Y"), (3, "Y#>Z"), (1, "X##Y")]
    assert list(e14.store.A) == [(4, "X#=2")]
    assert e14.constraint.concrete == "assign(var(1,X),2)"
    assert [f"{v.name}->{t.value}" for v, t in e16.cause] == ["X->ground"]
    assert list(e16.store.S) == [(3, "Y#>Z"), (1, "X##Y")]
    assert list(e16.store.Q) == [(2, "X#>=Y")]
    assert validate_trace(events) == []
    report(f"40/40 lines match, events #14/#16 match, {elapsed * 1000:.0f} ms")
    assert elapsed < 1.0


@pytest.mark.acceptance(2, "reduction chain x>y, y>z reaches {3},{2},{1} with 5 reduces")
def test_reduction_chain(report):
    x, y, z = VarRef(1, "x"), VarRef(2, "y"), VarRef(3, "z")
    rec = TraceRecorder()
    start = time.perf_counter()
    eng = Engine({v: Domain.interval(1, 3) for v in (x, y, z)}, [rec])
    eng.tell(ConstraintForm(Kind.GT, x, y))
    eng.tell(ConstraintForm(Kind.GT, y, z))
    elapsed = time.perf_counter() - start
    reduces = sum(e.port is Port.REDUCE for e in rec)
    report(f"D=({eng.domains[x]}, {eng.domains[y]}, {eng.domains[z]}), {reduces} reduces")
    assert [eng.domains[v].values for v in (x, y, z)] == [(3,), (2,), (1,)]
    assert reduces == 5
    eng.told()
    eng.told()
    assert validate_trace(rec) == []
    assert elapsed < 1.0


@pytest.mark.acceptance(3, "4-queens solutions and search tree")
def test_four_queens(capsys, tmp_path, report):
    path = tmp_path / "q4.fdtrace.jsonl"
    code, out, _, elapsed = _timed_main(capsys, "solve", "--builtin", "nqueens:4", "--trace", str(path))
    assert code == 0
    assert out.splitlines() == ["{Q1:2, Q2:4, Q3:1, Q4:3}", "{Q1:3, Q2:1, Q3:4, Q4:2}"]
    assert [tuple(s.values()) for s in oracle_solve(generate_nqueens(4))] == [(2, 4, 1, 3), (3, 1, 4, 2)]

    assert main(["analyze", "tree", str(path)]) == 0
    dot = capsys.readouterr().out
    events = list(read_trace(path))
    rejects = sum(e.port is Port.REJECT for e in events)
    solution_leaves = len(re.findall(r"shape=doublecircle", dot))
    failure_leaves = len(re.findall(r"shape=box", dot))
    tree = build_search_tree(events)
    report(f"solutions={solution_leaves} failures={failure_leaves} choice_points={tree.choice_points} "
           f"(reporting target: 4 failures, 3 choice points) rejects={rejects}")
    assert solution_leaves == 2
    assert failure_leaves == rejects
    assert validate_trace(events) == []
    assert elapsed < 1.0


@pytest.fixture(scope="module")
def random_suite():
    """Solve the 200 seeded random models once, under full instrumentation."""
    start = time.perf_counter()
    runs = []
    for seed in RANDOM_SEEDS:
        model = random_model(random.Random(seed))
        validator = TraceValidator()
        eng = CheckingEngine(model.initial_domains(), [validator])
        solutions = list(solve(model, eng))
        runs.append((seed, model, eng, validator.finish(), solutions))
    return runs, time.perf_counter() - start


@pytest.mark.acceptance(4, "search equals brute-force oracle on 200 random models")
def test_oracle_equivalence(random_suite, report):
    runs, solve_time = random_suite
    start = time.perf_counter()
    mismatched = []
    total = 0
    for seed, model, _, _, solutions in runs:
        got = sorted(tuple(s[v] for v in model.vars) for s in solutions)
        want = sorted(tuple(s[v] for v in model.vars) for s in oracle_solve(model))
        total += len(want)
        if got != want:
            mismatched.append(seed)
    elapsed = solve_time + time.perf_counter() - start
    report(f"{len(runs)} models, {total} solutions, {len(mismatched)} mismatches, {elapsed:.1f} s")
    assert mismatched == []
    assert elapsed < 30.0


@pytest.mark.acceptance(5, "arc consistency at every propagation fixpoint")
def test_arc_consistency(random_suite, report):
    runs, _ = random_suite
    fixpoints = sum(eng.fixpoints for _, _, eng, _, _ in runs)
    failures = [(seed, eng.ac_failures) for seed, _, eng, _, _ in runs if eng.ac_failures]
    report(f"{fixpoints} fixpoints checked, {len(failures)} models with unsupported values")
    assert fixpoints > 0
    assert failures == []


@pytest.mark.acceptance(6, "engine traces pass validation")
def test_trace_invariants(random_suite, sorted_events, queens4_events, report):
    runs, _ = random_suite
    bad = [(seed, v[:3]) for seed, _, _, v, _ in runs if v]
    # the reduction-chain trace of criterion 2
    x, y, z = VarRef(1, "x"), VarRef(2, "y"), VarRef(3, "z")
    rec = TraceRecorder()
    eng = Engine({v: Domain.interval(1, 3) for v in (x, y, z)}, [rec])
    eng.tell(ConstraintForm(Kind.GT, x, y))
    eng.tell(ConstraintForm(Kind.GT, y, z))
    eng.told()
    eng.told()
    fixed = {"sorted": validate_trace(sorted_events), "4-queens": validate_trace(queens4_events),
             "chain": validate_trace(rec)}
    report(f"{len(runs) + 3} traces, random violations={len(bad)}, "
           + ", ".join(f"{k}={len(v)}" for k, v in fixed.items()))
    assert bad == []
    assert all(v == [] for v in fixed.values())


@pytest.mark.acceptance(7, "40-queens desk-scale run")
def test_forty_queens(capsys, tmp_path, report):
    path = tmp_path / "q40.fdtrace.jsonl"
    code, out, _, elapsed = _timed_main(
        capsys, "solve", "--builtin", "nqueens:40", "--var-strategy", "first_fail",
        "--val-strategy", "min", "--max-solutions", "1", "--trace", str(path))
    assert code == 0
    (line,) = out.splitlines()
    values = [int(v) for v in re.findall(r":(\d+)", line)]
    assert len(values) == 40 and len(set(values)) == 40
    assert len({v - i for i, v in enumerate(values)}) == 40
    assert len({v + i for i, v in enumerate(values)}) == 40

    # parse every line back; chrono must run 1..n without gaps
    start = time.perf_counter()
    count = 0
    for count, e in enumerate(read_trace(path), start=1):
        assert e.chrono == count
    parse_time = time.perf_counter() - start
    with open(path) as fh:
        first = json.loads(fh.readline())
    assert first["port"] == "tell" and first["depth"] == 1

    counts = {}
    for var_s, val_s in (("first_fail", "min"), ("middle_first", "middle")):
        model = generate_nqueens(40, var_s, val_s)
        eng = Engine(model.initial_domains())
        t0 = time.perf_counter()
        gen = solve(model, eng)
        next(gen)
        counts[f"{var_s}/{val_s}"] = (eng.chrono, time.perf_counter() - t0)
        gen.close()
        assert eng.depth == 0
    report(f"traced solve {elapsed:.1f} s, {count} events parsed in {parse_time:.1f} s; events to "
           "first solution: " + ", ".join(f"{k}={n} ({t:.2f} s)" for k, (n, t) in counts.items()))
    assert elapsed < 60.0


@pytest.mark.acceptance(8, "told restores the pre-tell state")
def test_restoration(random_suite, report):
    runs, _ = random_suite
    tolds = sum(eng.tolds for _, _, eng, _, _ in runs)
    failures = [(seed, eng.restore_failures) for seed, _, eng, _, _ in runs if eng.restore_failures]
    report(f"{tolds} tolds checked, {len(failures)} models with a restoration mismatch")
    assert tolds > 0
    assert failures == []
