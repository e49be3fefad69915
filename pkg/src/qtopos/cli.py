"""Command line driver: JSON files in, deterministic reports out.

Subcommands cover poset construction, per-context spectra, operator
approximation, elementary propositions, truth values, frame reports, and
the executable law suites. Output is assembled from sorted structures so
identical input and seed produce byte-identical output.

Exit codes: 0 success, 1 failed law, 2 malformed input or usage,
3 non-commuting generators, 4 unknown context label, 5 approach or
frame mismatch.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import click
import numpy as np

from .bundle import BundleOpen, STAR, VARIANTS, enumerate_opens, spectrum
from .checks import RunConfig, SUITE_ORDER, run_suite
from .daseinisation import (
    ScottBasic,
    das_inner_sa,
    das_map,
    das_outer_sa,
    elementary_prop_contra,
    elementary_prop_cov1,
    elementary_prop_cov2,
)
from .errors import (
    ApproachMismatch,
    ContextNotInPoset,
    FrameMismatch,
    ModeMismatch,
    NonCommutingGenerators,
    ParseError,
    ToposError,
)
from .heyting import Frame, negation, regularity_report
from .operators import HermitianOperator, Tolerance, spectral_projection
from .serialize import (
    context_to_json,
    matrix_from_json,
    matrix_to_json,
    open_to_json,
    poset_from_json,
    poset_include_trivial_field,
    poset_to_json,
    prop_from_json,
    state_from_json,
    truth_to_json,
    vector_from_json,
)
from .states import (
    covariant_state_from_state,
    truth_object,
    truth_value_contra,
    truth_value_cov,
)

EXIT_LAW_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NONCOMMUTING = 3
EXIT_UNKNOWN_CONTEXT = 4
EXIT_MISMATCH = 5

SUITES = SUITE_ORDER + ("all",)
APPROACHES = ("contra", "cov")


@dataclass(frozen=True)
class Options:
    """Resolved global flags, shared by every subcommand."""

    tol: float | None
    include_trivial: bool | None
    seed: int
    cap: int
    as_json: bool

    def tolerance(self) -> Tolerance:
        return Tolerance.coerce(self.tol)


def _die(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    raise SystemExit(code)


def mapped_errors(fn):
    """Translate package failures into the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NonCommutingGenerators as exc:
            _die(EXIT_NONCOMMUTING, str(exc))
        except ContextNotInPoset as exc:
            _die(EXIT_UNKNOWN_CONTEXT, str(exc))
        except (FrameMismatch, ModeMismatch) as exc:
            _die(EXIT_MISMATCH, str(exc))
        except ToposError as exc:
            _die(EXIT_BAD_INPUT, str(exc))

    return wrapper


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        _die(EXIT_BAD_INPUT, f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        _die(EXIT_BAD_INPUT, f"{path}: invalid JSON ({exc})")


def _load_poset(path: str, opts: Options, approach_default: bool | None = None):
    # precedence: explicit flag, then file field, then approach default
    obj = _load_json(path)
    flag = opts.include_trivial
    if flag is None:
        flag = poset_include_trivial_field(obj)
    if flag is None:
        flag = approach_default
    if flag is None:
        flag = True
    return poset_from_json(obj, opts.tolerance(), include_trivial=flag)


def _scott(window) -> ScottBasic:
    if not (window.lo_open and window.hi_open):
        raise ParseError("covariant windows use open endpoints")
    if not (math.isfinite(window.lo) and math.isfinite(window.hi)):
        raise ParseError("covariant windows need finite endpoints")
    return ScottBasic(window.lo, window.hi)


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload, sort_keys=True, indent=2))


def _plural(n: int, noun: str) -> str:
    return noun if n == 1 else noun + "s"


def _fmt_real(x: float) -> str:
    out = f"{x:.9g}"
    return "0" if out == "-0" else out


def _fmt_entry(z, t: Tolerance) -> str:
    z = complex(z)
    if t.close(z.imag, 0.0):
        return _fmt_real(z.real)
    return f"{_fmt_real(z.real)}{z.imag:+.9g}i"


def _matrix_lines(mat, t: Tolerance) -> list[str]:
    rows = np.asarray(mat)
    width = 0
    cells = [[_fmt_entry(z, t) for z in row] for row in rows]
    for row in cells:
        width = max(width, max(len(c) for c in row))
    return ["  ".join(c.rjust(width) for c in row) for row in cells]


def _echo_fibers(fibers: dict[str, list[int]]) -> None:
    for label in sorted(fibers):
        indices = fibers[label]
        shown = " ".join(str(k) for k in indices) if indices else "-"
        click.echo(f"  {label}: {shown}")


@click.group()
@click.option("--tol", type=float, default=None,
              help="Numerical tolerance for every comparison.")
@click.option("--include-trivial/--no-include-trivial", "include_trivial",
              default=None,
              help="Force the one-dimensional context in or out; unset "
                   "defers to the input file, then to the approach.")
@click.option("--seed", type=int, default=7, show_default=True,
              help="Seed for the randomized law suites.")
@click.option("--cap", type=int, default=4096, show_default=True,
              help="Cap on enumerations and searches.")
@click.option("--json/--text", "as_json", default=False,
              help="Emit machine-readable JSON instead of text.")
@click.pass_context
def main(ctx, tol, include_trivial, seed, cap, as_json):
    """Workbench for finite-dimensional quantum logic over context posets."""
    if cap < 1:
        raise click.UsageError("--cap must be at least 1")
    ctx.obj = Options(tol, include_trivial, seed, cap, as_json)


@main.command()
@click.argument("poset_file", type=click.Path())
@click.pass_obj
@mapped_errors
def contexts(opts: Options, poset_file: str):
    """Build the context poset of a seed file and report its shape."""
    po = _load_poset(poset_file, opts)
    edges = po.hasse_edges()
    if opts.as_json:
        payload = poset_to_json(po)
        payload["context_count"] = len(po)
        payload["edge_count"] = len(edges)
        _emit_json(payload)
        return
    click.echo(
        f"{len(po)} {_plural(len(po), 'context')}, "
        f"{len(edges)} {_plural(len(edges), 'edge')}"
    )
    for c in po:
        ranks = "+".join(str(r) for r in c.block_ranks())
        click.echo(f"  {c.label}  blocks {ranks}")
    for lo, hi in edges:
        click.echo(f"  {lo} < {hi}")


@main.command("spectrum")
@click.argument("poset_file", type=click.Path())
@click.pass_obj
@mapped_errors
def spectrum_report(opts: Options, poset_file: str):
    """List the characters of every context in a poset."""
    po = _load_poset(poset_file, opts)
    if opts.as_json:
        entries = []
        for c in po:
            entry = context_to_json(c)
            entry["characters"] = c.size
            entries.append(entry)
        _emit_json({"contexts": entries})
        return
    for c in po:
        ranks = "+".join(str(r) for r in c.block_ranks())
        click.echo(
            f"{c.label}: {c.size} {_plural(c.size, 'character')}, "
            f"blocks {ranks}"
        )


@main.command()
@click.argument("op_file", type=click.Path())
@click.argument("poset_file", type=click.Path())
@click.option("--context", "label", required=True,
              help="Label of the context to approximate inside.")
@click.pass_obj
@mapped_errors
def das(opts: Options, op_file: str, poset_file: str, label: str):
    """Approximate an operator inside one context, with point intervals."""
    t = opts.tolerance()
    a = HermitianOperator(matrix_from_json(_load_json(op_file), "op"), t)
    po = _load_poset(poset_file, opts)
    c = po.get(label)
    inner = das_inner_sa(a, c, t)
    outer = das_outer_sa(a, c, t)
    intervals = [das_map(a, ch, t) for ch in spectrum(c)]
    if opts.as_json:
        _emit_json({
            "context": c.label,
            "inner": matrix_to_json(inner.mat),
            "outer": matrix_to_json(outer.mat),
            "intervals": [
                {"character": k, "lo": iv.lo, "hi": iv.hi}
                for k, iv in enumerate(intervals)
            ],
        })
        return
    click.echo(f"context {c.label}")
    click.echo("inner approximation:")
    for line in _matrix_lines(inner.mat, t):
        click.echo(f"  {line}")
    click.echo("outer approximation:")
    for line in _matrix_lines(outer.mat, t):
        click.echo(f"  {line}")
    click.echo("character intervals:")
    for k, iv in enumerate(intervals):
        click.echo(f"  {k}: [{_fmt_real(iv.lo)}, {_fmt_real(iv.hi)}]")


@main.command()
@click.argument("prop_file", type=click.Path())
@click.argument("poset_file", type=click.Path())
@click.pass_obj
@mapped_errors
def prop(opts: Options, prop_file: str, poset_file: str):
    """Evaluate an elementary proposition to an open of the bundle."""
    t = opts.tolerance()
    op, windows, variant = prop_from_json(_load_json(prop_file))
    po = _load_poset(poset_file, opts, approach_default=variant != "contra")
    a = HermitianOperator(op, t)
    if variant == "cov1":
        opened = elementary_prop_cov1(a, _scott(windows), po, t)
    elif variant == "cov2":
        opened = elementary_prop_cov2(a, _scott(windows), po, t)
    else:
        opened = elementary_prop_contra(a, windows, po, t)
    if opts.as_json:
        payload = open_to_json(opened)
        payload["recipe"] = variant
        _emit_json(payload)
        return
    click.echo(f"{variant} proposition, {opened.variant} open")
    _echo_fibers(open_to_json(opened)["fibers"])


@main.command()
@click.argument("state_file", type=click.Path())
@click.argument("prop_file", type=click.Path())
@click.argument("poset_file", type=click.Path())
@click.option("--approach", type=click.Choice(APPROACHES), required=True,
              help="Pairing style: sieve-valued (contra) or cosieve-valued (cov).")
@click.option("--base", required=True, help="Label of the base context.")
@click.pass_obj
@mapped_errors
def truth(opts: Options, state_file: str, prop_file: str, poset_file: str,
          approach: str, base: str):
    """Pair a state with a proposition at a base context."""
    t = opts.tolerance()
    state_obj = _load_json(state_file)
    op, windows, variant = prop_from_json(_load_json(prop_file))
    po = _load_poset(poset_file, opts, approach_default=approach == "cov")
    a = HermitianOperator(op, t)
    if approach == "cov":
        if variant == "contra":
            raise ApproachMismatch(
                "the contra recipe pairs with --approach contra"
            )
        recipe = elementary_prop_cov1 if variant == "cov1" else elementary_prop_cov2
        opened = recipe(a, _scott(windows), po, t)
        mu = covariant_state_from_state(state_from_json(state_obj, t), po, t)
        tv = truth_value_cov(mu, opened, base, po, t)
    else:
        if variant != "contra":
            raise ApproachMismatch(
                f"the {variant} recipe pairs with --approach cov"
            )
        if not (isinstance(state_obj, dict) and "vector" in state_obj):
            raise ApproachMismatch("contravariant truth needs a vector state")
        psi = vector_from_json(state_obj["vector"], "state.vector")
        tobj = truth_object(psi, po, t)
        tv = truth_value_contra(tobj, spectral_projection(a, windows, t), base, po, t)
    if opts.as_json:
        _emit_json(truth_to_json(tv))
        return
    members = tv.sorted_members()
    shown = " ".join(members) if members else "-"
    click.echo(f"{tv.kind} at {tv.base}: {shown}")
    click.echo(f"total: {'yes' if tv.is_total else 'no'}")


@main.command()
@click.argument("poset_file", type=click.Path())
@click.option("--variant", type=click.Choice(VARIANTS), default=STAR,
              show_default=True, help="Bundle topology to analyze.")
@click.pass_obj
@mapped_errors
def frame(opts: Options, poset_file: str, variant: str):
    """Regularity and negation report for the frame of a bundle."""
    po = _load_poset(poset_file, opts)
    fr = Frame(po, variant)
    opens = list(enumerate_opens(po, variant, opts.cap))
    report = regularity_report(fr, opts.cap)
    bottom = BundleOpen.empty(po, variant)
    top = BundleOpen.full(po, variant)
    nonempty = [u for u in opens if u != bottom]
    collapsed = sum(1 for u in nonempty if negation(u) == bottom)
    settled = sum(1 for u in opens if negation(negation(u)) in (bottom, top))
    if opts.as_json:
        _emit_json({
            "variant": variant,
            "contexts": len(po),
            "opens": len(opens),
            "regular": report.regular,
            "checked": report.checked,
            "witness": open_to_json(report.witness) if report.witness else None,
            "negation": {
                "nonempty_opens": len(nonempty),
                "negation_is_bottom": collapsed,
                "double_negation_settles": settled,
            },
        })
        return
    click.echo(
        f"{variant} frame over {len(po)} {_plural(len(po), 'context')}: "
        f"{len(opens)} {_plural(len(opens), 'open')}"
    )
    click.echo(f"regular: {'yes' if report.regular else 'no'} "
               f"({report.checked} checked)")
    if report.witness is not None:
        click.echo("witness fibers:")
        _echo_fibers(open_to_json(report.witness)["fibers"])
    click.echo(
        f"negation sends {collapsed} of {len(nonempty)} nonempty "
        f"{_plural(len(nonempty), 'open')} to bottom"
    )
    click.echo(
        f"double negation lands on bottom or top for {settled} of "
        f"{len(opens)} {_plural(len(opens), 'open')}"
    )


@main.command()
@click.argument("suite", type=click.Choice(SUITES))
@click.pass_obj
def check(opts: Options, suite: str):
    """Run an executable law suite and report per-law results."""
    config = RunConfig(
        tol=opts.tol,
        include_trivial=opts.include_trivial,
        seed=opts.seed,
        cap=opts.cap,
    )
    results = run_suite(suite, config)
    failures = [r for r in results if not r.passed]
    if opts.as_json:
        _emit_json({
            "suite": suite,
            "laws": [
                {"name": r.name, "passed": r.passed, "detail": r.detail}
                for r in results
            ],
            "failures": len(failures),
        })
    else:
        for r in results:
            mark = "pass" if r.passed else "FAIL"
            line = f"{mark}  {r.name}"
            if r.detail:
                line = f"{line}  ({r.detail})"
            click.echo(line)
        click.echo(
            f"{len(results)} {_plural(len(results), 'law')}, "
            f"{len(failures)} {_plural(len(failures), 'failure')}"
        )
    if failures:
        raise SystemExit(EXIT_LAW_FAILED)


if __name__ == "__main__":
    main()
