"""Command-line entry point.

Every command prints ``key=value`` lines followed by a ``--- json`` marker and
the same report as one JSON object.  Exit codes: 0 when the command ran
(whatever the answer), 2 for malformed input, 3 when a size gate is exceeded.
"""

from __future__ import annotations

import json
import os
import random
import sys
import time
from typing import Callable

import click

from .abcbjb import AbcInstance, AbcSolver
from .decomposition import (
    checked_split_decomposition,
    read_decomposition,
    trivial_decomposition,
    trivial_provider,
    validate_highly_connected,
    validate_tree_decomposition,
)
from .errors import GateExceeded, InputError
from .graph import MultiGraph, find_bipartition, format_graph, read_graph
from .hp import FAMILIES, brute_force_hp, read_hp, solve_hp_detailed
from .oct import solve_oct
from .oracle import brute_force_abcbjb, brute_force_bjb, brute_force_jb, brute_force_oct
from .pipeline import BjbInstance, TableCache, solve_bjb, solve_jb, verify_partition

EXIT_OK, EXIT_INPUT, EXIT_GATE = 0, 2, 3
PROVIDERS = {"split": checked_split_decomposition, "trivial": trivial_provider}

Report = dict


def emit(report: Report) -> None:
    for key, value in _flatten(report):
        click.echo(f"{key}={value}")
    click.echo("--- json")
    click.echo(json.dumps(report, sort_keys=True))


def _flatten(report: Report, prefix: str = ""):
    for key, value in report.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        elif isinstance(value, bool):
            yield name, str(value).lower()
        elif isinstance(value, (list, tuple)):
            yield name, " ".join(_token(x) for x in value)
        else:
            yield name, value


def _token(x) -> str:
    if isinstance(x, (list, tuple)):
        return ",".join(str(y) for y in x)
    return str(x)


def _id_list(text: str) -> frozenset[int]:
    if not text.strip():
        return frozenset()
    try:
        return frozenset(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise InputError(f"expected a comma-separated list of vertex ids, got {text!r}") from None


def _load_graph(path: str) -> MultiGraph:
    try:
        return read_graph(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _answer(yes: bool) -> str:
    return "yes" if yes else "no"


def _partition_report(witness) -> dict:
    if witness is None:
        return {}
    V1, V2 = witness
    return {"V1": sorted(V1), "V2": sorted(V2)}


# ----------------------------------------------------------------------------
# Tasks: each returns the solver report and a thunk producing the oracle report.


def task_bjb(graph: str, mu: int, k1: int, k2: int, provider: str) -> tuple[Report, Callable[[], Report]]:
    g = _load_graph(graph)
    inst = BjbInstance(g, mu, k1, k2)
    start = time.perf_counter()
    ans = solve_bjb(inst, PROVIDERS[provider], TableCache())
    elapsed = time.perf_counter() - start
    report = {"answer": _answer(ans.yes), "witness": _partition_report(ans.witness)}
    if ans.yes:
        report["verified"] = verify_partition(g, *ans.witness, mu, k1, k2)
    report["stats"] = {
        "transversal": ans.stats.get("transversal") or [],
        "branches": ans.stats.get("branches", 0),
        "elapsed": round(elapsed, 6),
    }

    def oracle() -> Report:
        got = brute_force_bjb(inst)
        return {"answer": _answer(got.yes), "witness": _partition_report(got.witness)}

    return report, oracle


def task_jb(graph: str, k1: int, k2: int, provider: str) -> tuple[Report, Callable[[], Report]]:
    g = _load_graph(graph)
    if min(k1, k2) < 0:
        raise InputError("budgets must be nonnegative")
    start = time.perf_counter()
    ans = solve_jb(g, k1, k2, PROVIDERS[provider], TableCache())
    elapsed = time.perf_counter() - start
    report = {"answer": _answer(ans.yes), "witness": _partition_report(ans.witness)}
    if ans.yes:
        report["verified"] = verify_partition(g, *ans.witness, None, k1, k2)
        report["mu"] = ans.stats["mu"]
    report["stats"] = {"elapsed": round(elapsed, 6)}

    def oracle() -> Report:
        got = brute_force_jb(g, k1, k2)
        return {"answer": _answer(got.yes), "witness": _partition_report(got.witness)}

    return report, oracle


def task_oct(graph: str, k: int) -> tuple[Report, Callable[[], Report]]:
    g = _load_graph(graph)
    start = time.perf_counter()
    ans = solve_oct(g, k)
    elapsed = time.perf_counter() - start
    report = {
        "answer": _answer(ans.found),
        "transversal": sorted(ans.transversal) if ans.found else [],
        "stats": {"elapsed": round(elapsed, 6)},
    }

    def oracle() -> Report:
        got = brute_force_oct(g, k)
        return {"answer": _answer(got is not None), "transversal": sorted(got) if got is not None else []}

    return report, oracle


def _abc_instance(graph: str, a: str, b: str, k1: int, k2: int) -> AbcInstance:
    g = _load_graph(graph)
    bip = find_bipartition(g)
    if bip is None:
        raise InputError("the graph is not bipartite")
    A, B = _id_list(a), _id_list(b)
    if any(not 0 <= v < g.n for v in A | B):
        raise InputError(f"A and B must hold ids in 0..{g.n - 1}")
    return AbcInstance(g, bip, A, B, k1, k2)


def task_abcbjb(graph: str, a: str, b: str, k1: int, k2: int, decomp: str | None) -> tuple[Report, Callable[[], Report]]:
    inst = _abc_instance(graph, a, b, k1, k2)
    if decomp is not None:
        td = _load_decomposition(decomp)
    else:
        td = trivial_decomposition(inst.g)
    hp_calls = [0]

    def count(*_):
        hp_calls[0] += 1

    start = time.perf_counter()
    solver = AbcSolver(inst, td, on_hp=count)
    table = solver.run()
    elapsed = time.perf_counter() - start
    report = {
        "answer": "table",
        "ones": table.cells(),
        "stats": {"nodes": len(td), "hp_instances": hp_calls[0], "elapsed": round(elapsed, 6)},
    }

    def oracle() -> Report:
        return {"answer": "table", "ones": brute_force_abcbjb(inst).cells()}

    return report, oracle


def _load_decomposition(path: str):
    try:
        return read_decomposition(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def task_hp(fixture: str, family: str, check: bool) -> tuple[Report, Callable[[], Report]]:
    try:
        inst = read_hp(fixture)
    except OSError as exc:
        raise InputError(f"cannot read {fixture}: {exc.strerror}") from None
    start = time.perf_counter()
    sol = solve_hp_detailed(inst, check=check, family=family)
    elapsed = time.perf_counter() - start
    report = {
        "answer": "table",
        "ones": sol.table.cells(),
        "stats": {
            "family": sol.stats.family_kind,
            "family_size": sol.stats.family,
            "evaluated": sol.stats.evaluated,
            "elapsed": round(elapsed, 6),
        },
    }

    def oracle() -> Report:
        return {"answer": "table", "ones": brute_force_hp(inst).cells()}

    return report, oracle


# ----------------------------------------------------------------------------
# Commands


@click.group()
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True, help="Worker count (results never depend on it).")
@click.pass_context
def cli(ctx: click.Context, threads: int) -> None:
    """Balanced judicious bipartition solver."""
    ctx.obj = {"threads": threads}


graph_arg = click.argument("graph", type=click.Path(dir_okay=False))
k1_opt = click.option("--k1", type=int, required=True, help="Edge budget inside V1.")
k2_opt = click.option("--k2", type=int, required=True, help="Edge budget inside V2.")
provider_opt = click.option(
    "--decomp-provider", "provider", type=click.Choice(sorted(PROVIDERS)), default="split", show_default=True
)


def _bjb_params(f):
    for deco in reversed([graph_arg, click.option("--mu", type=int, required=True, help="Required size of V1."), k1_opt, k2_opt, provider_opt]):
        f = deco(f)
    return f


def _jb_params(f):
    for deco in reversed([graph_arg, k1_opt, k2_opt, provider_opt]):
        f = deco(f)
    return f


def _oct_params(f):
    for deco in reversed([graph_arg, click.option("--k", type=int, required=True, help="Transversal size bound.")]):
        f = deco(f)
    return f


def _abc_params(f):
    for deco in reversed(
        [
            graph_arg,
            click.option("--a", "a", default="", help="Vertices forced into V1, comma-separated."),
            click.option("--b", "b", default="", help="Vertices forced into V2, comma-separated."),
            k1_opt,
            k2_opt,
            click.option("--decomp", type=click.Path(dir_okay=False), default=None, help="Decomposition file."),
        ]
    ):
        f = deco(f)
    return f


def _hp_params(f):
    for deco in reversed(
        [
            click.argument("fixture", type=click.Path(dir_okay=False)),
            click.option("--family", type=click.Choice(FAMILIES), default="realizable", show_default=True),
            click.option("--check/--no-check", default=True, show_default=True, help="Verify favorability first."),
        ]
    ):
        f = deco(f)
    return f


TASKS = {
    "solve-bjb": (task_bjb, _bjb_params, "Decide a balanced judicious bipartition instance."),
    "solve-jb": (task_jb, _jb_params, "Decide a judicious bipartition instance (any |V1|)."),
    "oct": (task_oct, _oct_params, "Find a smallest odd cycle transversal of size at most k."),
    "solve-abcbjb": (task_abcbjb, _abc_params, "Full table of a connected bipartite instance with forced vertices."),
    "solve-hp": (task_hp, _hp_params, "Answer table of a favorable painting fixture."),
}


def _solve_command(name: str, task, params, doc: str) -> click.Command:
    def run_task(**kwargs):
        report, _ = task(**kwargs)
        emit(report)

    run_task.__doc__ = doc
    return click.command(name)(params(run_task))


def _diff_command(name: str, task, params, doc: str) -> click.Command:
    def run_diff(**kwargs):
        report, oracle = task(**kwargs)
        expected = oracle()
        agree = report["answer"] == expected["answer"] and report.get("ones") == expected.get("ones")
        if name == "oct":
            agree = agree and len(report["transversal"]) == len(expected["transversal"])
        emit(
            {
                "agreement": agree,
                "solver": {"answer": report["answer"], **({"ones": report["ones"]} if "ones" in report else {})},
                "oracle": expected,
                "verified": report.get("verified", True),
            }
        )

    run_diff.__doc__ = f"Compare with the exhaustive oracle: {doc[0].lower()}{doc[1:]}"
    return click.command(name)(params(run_diff))


for _name, (_task, _params, _doc) in TASKS.items():
    cli.add_command(_solve_command(_name, _task, _params, _doc))


@cli.group("diff-oracle")
def diff_oracle() -> None:
    """Run a solver and its exhaustive oracle and report whether they agree."""


for _name, (_task, _params, _doc) in TASKS.items():
    diff_oracle.add_command(_diff_command(_name, _task, _params, _doc))


@cli.command("validate-decomp")
@graph_arg
@click.argument("decomp", type=click.Path(dir_okay=False))
@click.option("--k", type=int, required=True, help="Budget k = k1 + k2 the decomposition is checked for.")
def validate_decomp(graph: str, decomp: str, k: int) -> None:
    """Check a decomposition file against the tree and connectivity conditions."""
    g = _load_graph(graph)
    td = _load_decomposition(decomp)
    rep = validate_tree_decomposition(g, td)
    if rep.ok:
        rep = validate_highly_connected(g, td, k)
    emit(
        {
            "answer": "ok" if rep.ok else "invalid",
            "violations": [f"{node}:{cond}" for node, cond, _ in rep.violations],
            "details": [detail for _, _, detail in rep.violations],
        }
    )


@cli.command("gen-graph")
@click.option("--n", type=click.IntRange(min=0), required=True)
@click.option("--m", type=click.IntRange(min=0), required=True)
@click.option("--seed", type=int, default=None, help="Defaults to $JP_SEED, else 0.")
def gen_graph(n: int, m: int, seed: int | None) -> None:
    """Print a random multigraph in the graph file format."""
    if seed is None:
        seed = int(os.environ.get("JP_SEED", "0"))
    if n < 2 and m > 0:
        raise InputError("edges need at least two vertices")
    rng = random.Random(seed)
    edges = [tuple(rng.sample(range(n), 2)) for _ in range(m)]
    click.echo(format_graph(MultiGraph(n, edges)), nl=False)


def run(argv: list[str] | None = None) -> int:
    """Run the command line and return its exit code."""
    try:
        cli.main(args=argv, prog_name="judicious", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except GateExceeded as exc:
        click.echo(f"gate exceeded: {exc}", err=True)
        return EXIT_GATE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
