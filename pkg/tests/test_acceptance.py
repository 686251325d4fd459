"""Acceptance criteria, one test per criterion.

Each test appends a PASS or FAIL line to ``RESULTS``; ``conftest.py`` prints
them in the terminal summary.  Runtimes are reported next to the expected
budget but only agreement decides the verdict.  The painting-instance
criterion checks the distinct instances collected by the three criteria
before it, so run the module in file order.
"""

import itertools
import math
import random
import statistics
import time
from math import comb

import pytest

from helpers import (
    connected_atlas_graphs,
    cover_violations,
    hand_built_decompositions,
    perfect_violations,
    plant_instance,
    planted_violations,
    random_abc_instance,
    random_favorable_hp,
    random_multigraph,
)
from judicious.abcbjb import AbcInstance, AbcSolver, all_color_vectors
from judicious.derand import cover_family, perfect_family
from judicious.graph import MultiGraph, enumerate_unbreakable_functions, find_bipartition
from judicious.hp import HPMemo, brute_force_hp, solve_hp_favorable
from judicious.oct import solve_oct
from judicious.oracle import brute_force_abcbjb, brute_force_bjb, brute_force_oct, brute_force_y_table
from judicious.pipeline import BjbInstance, TableCache, solve_bjb, verify_partition

RESULTS: list[str] = []
# Shared by the first three criteria; its stored instances feed the fourth.
MEMO = HPMemo(maxsize=10**7)


def report(name: str, ok: bool, seconds: float, budget: float, detail: str) -> None:
    over = "" if seconds <= budget else f", over the expected {budget:.0f}s"
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail} [{seconds:.1f}s{over}]"
    RESULTS.append(line)
    print(line)


def bjb_mismatches(g: MultiGraph, queries, cache: TableCache) -> list[str]:
    bad = []
    for mu, k1, k2 in queries:
        inst = BjbInstance(g, mu, k1, k2)
        got = solve_bjb(inst, cache=cache)
        expected = brute_force_bjb(inst).yes
        if got.yes != expected or (got.yes and not verify_partition(g, *got.witness, mu, k1, k2)):
            bad.append(f"n={g.n} edges={g.edge_list()} mu={mu} k1={k1} k2={k2}")
    return bad


def test_bjb_end_to_end():
    """Decisions agree with exhaustive search on every small connected graph and on random multigraphs."""
    start = time.perf_counter()
    bad, count = [], 0
    budgets = list(itertools.product(range(3), repeat=2))
    for g in connected_atlas_graphs(7, 10):
        queries = [(mu, k1, k2) for mu in range(g.n + 1) for k1, k2 in budgets]
        bad += bjb_mismatches(g, queries, TableCache(floor=(2, 2), hp_memo=MEMO))
        count += len(queries)
    rng = random.Random(20240601)
    for _ in range(500):
        n = rng.randint(1, 12)
        g = random_multigraph(rng, n, rng.randint(0, n + 3))
        k1, k2 = rng.randint(0, 2), rng.randint(0, 2)
        queries = [(mu, k1, k2) for mu in range(n + 1)]
        bad += bjb_mismatches(g, queries, TableCache(hp_memo=MEMO))
        count += len(queries)
    report("BJB end-to-end", not bad, time.perf_counter() - start, 600, f"{count} queries, {len(bad)} mismatches")
    assert not bad, bad[:5]


def test_abcbjb_tables():
    """Trivial-decomposition tables equal exhaustive tables on random connected bipartite graphs."""
    start = time.perf_counter()
    rng = random.Random(7)
    bad = []
    for _ in range(200):
        inst = random_abc_instance(rng, rng.randint(1, 9), rng.randint(0, 3), rng.randint(0, 2), rng.randint(0, 2))
        if AbcSolver(inst, hp_memo=MEMO).run() != brute_force_abcbjb(inst):
            bad.append(f"edges={inst.g.edge_list()} A={sorted(inst.A)} B={sorted(inst.B)} k=({inst.k1},{inst.k2})")
    report("ABC-BJB tables", not bad, time.perf_counter() - start, 600, f"200 instances, {len(bad)} mismatches")
    assert not bad, bad[:5]


def test_multi_node_decompositions():
    """Multi-node tables match the trivial decomposition and the oracle; every child table matches brute force."""
    start = time.perf_counter()
    rng = random.Random(1)
    bad, entries = [], 0
    cases = hand_built_decompositions()
    for name, g, td in cases:
        for k1, k2 in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (2, 2)]:
            forced = rng.sample(range(g.n), rng.randint(0, 2))
            cut = rng.randint(0, len(forced))
            inst = AbcInstance(g, find_bipartition(g), frozenset(forced[:cut]), frozenset(forced[cut:]), k1, k2)
            solver = AbcSolver(inst, td, hp_memo=MEMO)
            table = solver.run()
            if not table == AbcSolver(inst, hp_memo=MEMO).run() == brute_force_abcbjb(inst):
                bad.append(f"{name} table k=({k1},{k2})")
            for t in range(len(td)):
                if t == td.root:
                    continue
                for ups in itertools.product(range(inst.k + 1), repeat=len(td.sigma(t))):
                    for v in all_color_vectors(inst.k):
                        entries += 1
                        if solver.y[t].get(solver.key(ups, v), 0) != brute_force_y_table(inst, td, t, ups, v).bits:
                            bad.append(f"{name} node {t} ups={ups} v={v} k=({k1},{k2})")
    ok = not bad and len(cases) >= 20
    detail = f"{len(cases)} decompositions, {entries} child entries, {len(bad)} mismatches"
    report("multi-node decompositions", ok, time.perf_counter() - start, 300, detail)
    assert ok, bad[:5]


def test_hp_solver():
    """Every distinct painting instance met above with at most 9 vertices, plus synthetic ones, matches brute force."""
    start = time.perf_counter()
    constructed = [inst for inst in MEMO.instances() if inst.h.n <= 9]
    assert constructed, "run the earlier acceptance criteria first"
    rng = random.Random(3)
    synthetic = []
    for _ in range(100):
        n = rng.randint(1, 6)
        synthetic.append(random_favorable_hp(rng, n, rng.randint(0, 2), rng.randint(0, 2 if n <= 4 else 1)))
    bad = []
    for origin, pool in (("constructed", constructed), ("synthetic", synthetic)):
        for i, inst in enumerate(pool):
            if solve_hp_favorable(inst) != brute_force_hp(inst):
                bad.append(f"{origin} #{i}")
    detail = f"{len(constructed)} constructed and {len(synthetic)} synthetic instances, {len(bad)} mismatches"
    report("HP solver", not bad, time.perf_counter() - start, 600, detail)
    assert not bad, bad[:5]


def test_planted_structure():
    """Planted witnessing colorings satisfy every structural claim for both assignment families."""
    start = time.perf_counter()
    rng = random.Random(5)
    failures, planted = [], 0
    while planted < 100:
        k1, k2 = rng.randint(0, 2), rng.randint(0, 2)
        got = plant_instance(rng, rng.randint(2, 7), rng.randint(0, 3), max(k1, 1), k2, tries=2000, min_cross=1)
        if got is None:
            continue
        planted += 1
        for family in ("paper", "realizable"):
            failures += [f"#{planted} {family}: {msg}" for msg in planted_violations(*got, family=family)]
    detail = f"{planted} instances, {len(failures)} failed assertions"
    report("planted structure", not failures, time.perf_counter() - start, 600, detail)
    assert not failures, failures[:5]


def test_derandomization_families():
    """Cover and perfect families pass exhaustive verification over the whole parameter grid."""
    start = time.perf_counter()
    bad = []
    for n in range(11):
        for y in range(3):
            for z in range(4):
                if cover_violations(n, y, z, cover_family(n, y, z)):
                    bad.append(f"cover n={n} y={y} z={z}")
        for r in range(4):
            if perfect_violations(n, r, perfect_family(n, r)):
                bad.append(f"perfect n={n} r={r}")
    report("derandomization families", not bad, time.perf_counter() - start, 120, f"{len(bad)} failing parameter sets")
    assert not bad, bad


def test_oct():
    """Transversal presence and size match brute force on random graphs."""
    start = time.perf_counter()
    rng = random.Random(11)
    bad = []
    for i in range(300):
        n = rng.randint(1, 10)
        g = random_multigraph(rng, n, rng.randint(0, 2 * n))
        k = rng.randint(0, 4)
        got, expected = solve_oct(g, k), brute_force_oct(g, k)
        if got.found != (expected is not None) or (got.found and len(got.transversal) != len(expected)):
            bad.append(f"#{i} n={n} k={k}")
    report("OCT", not bad, time.perf_counter() - start, 120, f"300 instances, {len(bad)} mismatches")
    assert not bad, bad


@pytest.mark.xfail(
    strict=True,
    reason="a q^k factor undercounts: with one off-majority element and k >= 2 there are k choices, not 1",
)
def test_unbreakable_function_count_bound():
    """Counts of unbreakable functions against the sum of C(|U|, l) * q^k * (k + 1)."""
    start = time.perf_counter()
    violations = []
    for size in range(7):
        for q in range(1, 4):
            for k in range(4):
                got = len(enumerate_unbreakable_functions(list(range(size)), q, k))
                bound = sum(comb(size, l) for l in range(q + 1)) * q**k * (k + 1)
                if got > bound:
                    violations.append(f"|U|={size} q={q} k={k}: {got} > {bound}")
    detail = f"{len(violations)} violations" + (f", e.g. {violations[0]}" if violations else "")
    report("unbreakable function count bound", not violations, time.perf_counter() - start, 60, detail)
    assert not violations, violations


def test_path_scaling():
    """Wall time on long paths grows at most cubically, judged by the log-log slope."""
    start = time.perf_counter()
    sizes, times, witnesses_ok = [50, 100, 200], [], True
    for n in sizes:
        g = MultiGraph(n, [(i, i + 1) for i in range(n - 1)])
        inst = BjbInstance(g, n // 2, 1, 1)
        t0 = time.perf_counter()
        ans = solve_bjb(inst, cache=TableCache())
        times.append(time.perf_counter() - t0)
        witnesses_ok &= ans.yes and verify_partition(g, *ans.witness, n // 2, 1, 1)
    slope = statistics.linear_regression([math.log(n) for n in sizes], [math.log(t) for t in times]).slope
    ok = slope <= 3.5 and witnesses_ok
    detail = "times " + ", ".join(f"P{n} {t:.2f}s" for n, t in zip(sizes, times)) + f", slope {slope:.2f}"
    report("path scaling", ok, time.perf_counter() - start, 900, detail)
    assert ok, detail
