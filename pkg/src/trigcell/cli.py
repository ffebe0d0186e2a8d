"""Command-line surface: potential evaluation, expansion tables, Hbar grids,
equivalence verdicts, M-function traces, and the combined verification harness.

All traces and grids are CSV, verdicts and reports JSON; floats are emitted
with 17 significant digits so downstream tools can round-trip them.
"""

from __future__ import annotations

import itertools
import json
import math
import sys
from fractions import Fraction

import click
import numpy as np

from .expansion import ResonantDirectionError, check_nonresonant, corrector_recursion
from .homogenize import SolverConfig, hbar_grid
from .potential import load_potential, max_on_torus
from .rigidity import MFunctionParams, Verdict, decide, m_function

SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_vector(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _parse_range(text: str) -> np.ndarray:
    lo, hi, step = (float(p) for p in text.split(":"))
    if step <= 0:
        raise click.BadParameter("step must be positive")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _p_grid(text: str, dim: int) -> list[tuple[float, ...]]:
    axis = _parse_range(text)
    return [tuple(p) for p in itertools.product(axis, repeat=dim)]


def _verdict_json(v: Verdict) -> dict:
    out: dict = {"schema_version": SCHEMA_VERSION, "tag": v.tag}
    if v.transform is not None:
        out["c"] = f"{v.transform.c.numerator}/{v.transform.c.denominator}"
        out["x0"] = [float(x) for x in v.transform.x0]
        out["orientation"] = v.transform.orientation
    if v.scalings is not None:
        out["scalings"] = [f"{c.numerator}/{c.denominator}" for c in v.scalings]
    if v.mode_pairing is not None:
        out["mode_pairing"] = [list(pair) for pair in v.mode_pairing]
    if v.witness is not None:
        out["witness"] = v.witness
    if v.reason is not None:
        out["reason"] = v.reason
    return out


@click.group()
def cli():
    """Effective Hamiltonians of trigonometric potentials."""


@cli.command("eval")
@click.option("--potential", "path", required=True, type=click.Path(exists=True))
@click.option("--x", "point", required=True, help="comma-separated coordinates")
def eval_cmd(path, point):
    """Evaluate a potential at a point on the torus."""
    V = load_potential(path)
    x = _parse_vector(point)
    if len(x) != V.dim:
        raise click.BadParameter(f"point has {len(x)} coordinates, potential dim is {V.dim}")
    value = V.eval(np.asarray(x))
    click.echo(json.dumps({"schema_version": SCHEMA_VERSION,
                           "x": list(x), "value": float(value)}))
    click.echo(f"# V({point}) = {_fmt(value)}", err=True)


@cli.command("expand")
@click.option("--potential", "path", required=True, type=click.Path(exists=True))
@click.option("--Q", "q_text", required=True, help="comma-separated direction")
@click.option("--order", default=4, show_default=True)
@click.option("--eta", default=1e-8, show_default=True, help="resonance threshold")
def expand_cmd(path, q_text, order, eta):
    """Asymptotic-expansion coefficients a_0..a_L along a direction Q."""
    V = load_potential(path)
    Q = _parse_vector(q_text)
    try:
        res = corrector_recursion(V, Q, order, eta=eta)
    except ResonantDirectionError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(json.dumps({
        "schema_version": SCHEMA_VERSION,
        "Q": [float(q) for q in Q],
        "a": [float(a) for a in res.a],
        "min_denominator": res.min_denominator,
    }))


@cli.command("hbar")
@click.option("--potential", "path", required=True, type=click.Path(exists=True))
@click.option("--p-grid", "p_text", required=True, help="min:max:step per coordinate")
@click.option("--grid", default=64, show_default=True, help="grid points per dimension")
@click.option("--horizon", default=None, type=float, help="override horizon T2")
@click.option("--output", default="-", type=click.Path(allow_dash=True))
def hbar_cmd(path, p_text, grid, horizon, output):
    """Effective Hamiltonian on a momentum grid, written as CSV."""
    V = load_potential(path)
    cfg = SolverConfig(grid_points_per_dim=grid, horizon_t2=horizon)
    ps = _p_grid(p_text, V.dim)
    samples = hbar_grid(V, ps, cfg)
    lines = [",".join(f"p{i+1}" for i in range(V.dim)) + ",hbar,error_estimate"]
    for s in samples:
        lines.append(",".join([_fmt(c) for c in s.p]
                              + [_fmt(s.value), _fmt(s.error_estimate)]))
    text = "\n".join(lines) + "\n"
    with click.open_file(output, "w") as fh:
        fh.write(text)


@cli.command("decide")
@click.option("--a", "path_a", required=True, type=click.Path(exists=True))
@click.option("--b", "path_b", required=True, type=click.Path(exists=True))
def decide_cmd(path_a, path_b):
    """Decide equivalence of two potentials; exit 0 equivalent, 1 not, 2 out of scope."""
    v = decide(load_potential(path_a), load_potential(path_b))
    click.echo(json.dumps(_verdict_json(v)))
    if v.equivalent:
        sys.exit(0)
    sys.exit(2 if v.tag == "OutOfScope" else 1)


@cli.command("mfunc")
@click.option("--r", "r_text", required=True, help="r1,r2,r3")
@click.option("--alpha", "alpha_text", required=True, help="alpha1,alpha2 (rationals)")
@click.option("--range", "t_text", required=True, help="start:stop:step for t")
@click.option("--output", default="-", type=click.Path(allow_dash=True))
def mfunc_cmd(r_text, alpha_text, t_text, output):
    """Trace of the phase max-function M(t), with the computed half-period l."""
    r = _parse_vector(r_text)
    alphas = [Fraction(a) for a in alpha_text.split(",")]
    params = MFunctionParams(r[0], r[1], r[2], alphas[0], alphas[1])
    ts = _parse_range(t_text)
    lines = [f"# l = {_fmt(params.halfperiod)}", "t,M"]
    for t in ts:
        lines.append(f"{_fmt(t)},{_fmt(m_function(params, float(t)))}")
    with click.open_file(output, "w") as fh:
        fh.write("\n".join(lines) + "\n")


@cli.command("verify")
@click.option("--a", "path_a", required=True, type=click.Path(exists=True))
@click.option("--b", "path_b", required=True, type=click.Path(exists=True))
@click.option("--grid", default=48, show_default=True)
@click.option("--p-grid", "p_text", default="-2:2:2", show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--hbar-tol", default=5e-2, show_default=True)
@click.option("--max-tol", default=1e-2, show_default=True)
def verify_cmd(path_a, path_b, grid, p_text, seed, hbar_tol, max_tol):
    """Cross-validate the verdict against grid solves, torus maxima and expansions.

    Exit code 0 when the numerics are consistent with the verdict, 1 otherwise.
    """
    report = run_verify(path_a, path_b, grid=grid, p_text=p_text, seed=seed,
                        hbar_tol=hbar_tol, max_tol=max_tol)
    click.echo(json.dumps(report, indent=2))
    sys.exit(0 if report["consistent"] else 1)


def run_verify(path_a, path_b, grid=48, p_text="-2:2:2", seed=7,
               hbar_tol=5e-2, max_tol=1e-2) -> dict:
    """Build the verification report (library entry point used by the CLI)."""
    V1 = load_potential(path_a)
    V2 = load_potential(path_b)
    verdict = decide(V1, V2)
    report: dict = {"schema_version": SCHEMA_VERSION, "verdict": _verdict_json(verdict)}

    max1 = max_on_torus(V1, 96)
    max2 = max_on_torus(V2, 96)
    report["torus_max"] = {"a": max1, "b": max2, "gap": abs(max1 - max2)}

    rng = np.random.default_rng(seed)
    expansions = []
    a_gap = 0.0
    tries = 0
    while len(expansions) < 3 and tries < 200:
        tries += 1
        Q = rng.normal(size=V1.dim)
        Q = 1.5 * Q / np.linalg.norm(Q)
        # keep well clear of resonant hyperplanes so the coefficients stay O(1)
        if (check_nonresonant(V1, Q, 4) < 0.1
                or check_nonresonant(V2, Q, 4) < 0.1):
            continue
        r1 = corrector_recursion(V1, Q, 4)
        r2 = corrector_recursion(V2, Q, 4)
        gap = max(abs(x - y) for x, y in zip(r1.a, r2.a))
        a_gap = max(a_gap, gap)
        expansions.append({"Q": [float(q) for q in Q],
                           "a_gap": gap,
                           "a2": [r1.a[2], r2.a[2]],
                           "a4": [r1.a[4], r2.a[4]]})
    report["expansions"] = expansions

    hbar_gap = None
    if V1.dim <= 3:
        # resolve each potential proportionally to its top frequency, so a
        # scaled pair is discretized with the same points per oscillation
        def top_freq(V):
            return max((abs(c) for m in V.modes for c in m.k), default=1)

        f1, f2 = top_freq(V1), top_freq(V2)
        base = min(f1, f2)
        n1 = min(grid * max(1, round(f1 / base)), 4 * grid)
        n2 = min(grid * max(1, round(f2 / base)), 4 * grid)
        ps = _p_grid(p_text, V1.dim)
        s1 = hbar_grid(V1, ps, SolverConfig(grid_points_per_dim=n1))
        s2 = hbar_grid(V2, ps, SolverConfig(grid_points_per_dim=n2))
        hbar_gap = max(abs(a.value - b.value) for a, b in zip(s1, s2))
        report["hbar"] = {
            "p_grid": [list(p) for p in ps],
            "a": [s.value for s in s1],
            "b": [s.value for s in s2],
            "max_gap": hbar_gap,
        }

    if verdict.equivalent:
        consistent = (abs(max1 - max2) <= max_tol and a_gap <= 1e-6
                      and (hbar_gap is None or hbar_gap <= hbar_tol))
    elif verdict.tag == "NotEquivalent":
        evidence = (abs(max1 - max2) >= max_tol or a_gap >= 1e-6
                    or (hbar_gap is not None and hbar_gap >= hbar_tol))
        consistent = evidence
    else:
        consistent = True
    report["consistent"] = bool(consistent)
    return report


if __name__ == "__main__":
    cli()
