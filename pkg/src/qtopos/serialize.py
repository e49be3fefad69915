"""JSON-facing converters for every object the command line touches.

All readers take already-parsed JSON values (dicts, lists, numbers) and
raise ParseError with a pointed message on structural problems; readers
never guess. Numbers may be given as JSON numbers or as exact strings
("3/4", "-1/2", "-inf", "inf") which are parsed through Fraction. Writers
produce plain JSON values with deterministically sorted keys and fibers so
equal objects serialize to identical bytes.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .bundle import BundleOpen, VARIANTS, _bits
from .contexts import (
    Context,
    ContextPoset,
    build_poset,
    context_from_operators,
    trivial_context,
)
from .errors import ParseError
from .operators import HermitianOperator, RealInterval, Tolerance
from .states import DensityState, TruthValue


def parse_number(value, where: str = "number") -> float:
    """A JSON number, or an exact string like '3/4', '-inf', 'inf'."""
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        if text in ("-inf", "-infinity"):
            return -math.inf
        if text in ("inf", "+inf", "infinity"):
            return math.inf
        try:
            return float(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: cannot parse {value!r}") from exc
    raise ParseError(f"{where}: expected a number, got {type(value).__name__}")


def _entry_to_complex(entry, where: str) -> complex:
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise ParseError(f"{where}: complex entry needs [re, im]")
        return complex(parse_number(entry[0], where), parse_number(entry[1], where))
    return complex(parse_number(entry, where), 0.0)


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    """Square complex matrix from {'dim': n, 'rows': [[entry, ...], ...]}.

    A bare list of rows is also accepted. Entries are numbers, exact number
    strings, or [re, im] pairs.
    """
    if isinstance(obj, dict):
        if "rows" not in obj:
            raise ParseError(f"{where}: missing 'rows'")
        rows = obj["rows"]
        dim = obj.get("dim")
    else:
        rows = obj
        dim = None
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{where}: 'rows' must be a non-empty list")
    n = len(rows)
    if dim is not None and int(dim) != n:
        raise ParseError(f"{where}: 'dim' {dim} does not match {n} rows")
    mat = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"{where}: row {i} must list {n} entries")
        for j, entry in enumerate(row):
            mat[i, j] = _entry_to_complex(entry, f"{where}[{i}][{j}]")
    return mat


def matrix_to_json(mat) -> dict:
    arr = mat.mat if isinstance(mat, HermitianOperator) else np.asarray(mat)
    n = arr.shape[0]
    rows = [
        [[float(arr[i, j].real), float(arr[i, j].imag)] for j in range(n)]
        for i in range(n)
    ]
    return {"dim": n, "rows": rows}


def interval_from_json(obj, where: str = "interval") -> RealInterval:
    """RealInterval from {'lo', 'hi', 'lo_open'?, 'hi_open'?}; flags default open."""
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object with 'lo' and 'hi'")
    if "lo" not in obj or "hi" not in obj:
        raise ParseError(f"{where}: missing 'lo' or 'hi'")
    lo = parse_number(obj["lo"], f"{where}.lo")
    hi = parse_number(obj["hi"], f"{where}.hi")
    lo_open = obj.get("lo_open", True)
    hi_open = obj.get("hi_open", True)
    if not isinstance(lo_open, bool) or not isinstance(hi_open, bool):
        raise ParseError(f"{where}: endpoint flags must be booleans")
    return RealInterval(lo, hi, lo_open=lo_open, hi_open=hi_open)


def interval_to_json(iv: RealInterval) -> dict:
    def fmt(x: float) -> float | str:
        if x == math.inf:
            return "inf"
        if x == -math.inf:
            return "-inf"
        return float(x)

    return {
        "lo": fmt(iv.lo),
        "hi": fmt(iv.hi),
        "lo_open": iv.lo_open,
        "hi_open": iv.hi_open,
    }


def windows_from_json(obj, where: str = "window"):
    """One interval or a list of intervals."""
    if isinstance(obj, list):
        if not obj:
            raise ParseError(f"{where}: empty interval list")
        return tuple(
            interval_from_json(w, f"{where}[{i}]") for i, w in enumerate(obj)
        )
    return interval_from_json(obj, where)


def context_from_json(
    obj,
    tol: Tolerance | float | None = None,
    where: str = "context",
) -> Context:
    """Context from {'generators': [matrix,...]} or {'projections': [matrix,...]}.

    Generators are arbitrary commuting Hermitian matrices and produce their
    joint refinement; non-commuting input propagates NonCommutingGenerators
    untouched so the caller can map it to its own failure class.
    """
    t = Tolerance.coerce(tol)
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if "generators" in obj:
        mats = obj["generators"]
        if not isinstance(mats, list) or not mats:
            raise ParseError(f"{where}: 'generators' must be a non-empty list")
        ops = [
            matrix_from_json(m, f"{where}.generators[{i}]")
            for i, m in enumerate(mats)
        ]
        return context_from_operators(ops, t)
    if "projections" in obj:
        mats = obj["projections"]
        if not isinstance(mats, list) or not mats:
            raise ParseError(f"{where}: 'projections' must be a non-empty list")
        projs = [
            matrix_from_json(m, f"{where}.projections[{i}]")
            for i, m in enumerate(mats)
        ]
        return Context(projs, t)
    raise ParseError(f"{where}: needs 'generators' or 'projections'")


def context_to_json(c: Context) -> dict:
    return {
        "label": c.label,
        "block_ranks": list(c.block_ranks()),
        "projections": [matrix_to_json(p) for p in c.mins],
    }


def poset_from_json(
    obj,
    tol: Tolerance | float | None = None,
    include_trivial: bool | None = None,
) -> ContextPoset:
    """Poset from {'seeds': [context,...], 'include_trivial'?: bool}.

    The include_trivial parameter, when not None, overrides the file field;
    when both are absent the trivial context is included. An empty seed
    list needs a 'dim' field and yields the one-context poset of the
    one-dimensional subalgebra.
    """
    t = Tolerance.coerce(tol)
    if not isinstance(obj, dict):
        raise ParseError("poset: expected an object with 'seeds'")
    seeds = obj.get("seeds")
    if seeds is None:
        # emitted reports carry the closed context family under 'contexts';
        # reseeding from it rebuilds the identical poset
        seeds = obj.get("contexts")
    if not isinstance(seeds, list):
        raise ParseError("poset: 'seeds' must be a list")
    contexts = [
        context_from_json(s, t, f"poset.seeds[{i}]") for i, s in enumerate(seeds)
    ]
    flag = include_trivial
    if flag is None:
        flag = obj.get("include_trivial")
        if flag is None:
            flag = True
        elif not isinstance(flag, bool):
            raise ParseError("poset: 'include_trivial' must be a boolean")
    if not contexts:
        dim = obj.get("dim")
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise ParseError(
                "poset: empty 'seeds' needs a positive integer 'dim'"
            )
        if not flag:
            raise ParseError(
                "poset: empty 'seeds' with the trivial context excluded"
            )
        contexts = [trivial_context(dim)]
    return build_poset(contexts, include_trivial=flag, tol=t)


def poset_include_trivial_field(obj) -> bool | None:
    """The raw include_trivial field of a poset object, if present."""
    if isinstance(obj, dict) and isinstance(obj.get("include_trivial"), bool):
        return obj["include_trivial"]
    return None


def poset_to_json(poset: ContextPoset) -> dict:
    return {
        "include_trivial": poset.include_trivial,
        "contexts": [context_to_json(c) for c in poset.contexts],
        "edges": [list(e) for e in poset.hasse_edges()],
    }


def open_from_json(
    obj,
    poset: ContextPoset,
    where: str = "open",
) -> BundleOpen:
    """BundleOpen from {'variant', 'fibers': {label: [indices]}}; validates."""
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    variant = obj.get("variant")
    if variant not in VARIANTS:
        raise ParseError(
            f"{where}: 'variant' must be one of {', '.join(VARIANTS)}"
        )
    raw = obj.get("fibers")
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: 'fibers' must be an object")
    fibers: dict[str, int] = {}
    for label, indices in raw.items():
        if label not in poset:
            raise ParseError(f"{where}: unknown context label {label!r}")
        if not isinstance(indices, list):
            raise ParseError(f"{where}: fiber at {label} must be a list")
        c = poset.get(label)
        mask = 0
        for k in indices:
            if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k < c.size:
                raise ParseError(
                    f"{where}: character index {k!r} out of range at {label}"
                )
            mask |= 1 << k
        fibers[label] = mask
    return BundleOpen(poset, variant, fibers)


def open_to_json(opened: BundleOpen) -> dict:
    return {
        "variant": opened.variant,
        "fibers": {
            label: list(_bits(opened.fibers[label]))
            for label in sorted(opened.fibers)
        },
    }


def vector_from_json(obj, where: str = "vector") -> np.ndarray:
    """Complex column vector from a list of scalar entries."""
    if not isinstance(obj, list) or not obj:
        raise ParseError(f"{where}: expected a non-empty list")
    return np.array(
        [_entry_to_complex(e, f"{where}[{i}]") for i, e in enumerate(obj)]
    )


def state_from_json(
    obj,
    tol: Tolerance | float | None = None,
    where: str = "state",
) -> DensityState:
    """DensityState from {'density': matrix} or {'vector': [entry,...]}."""
    t = Tolerance.coerce(tol)
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if "density" in obj:
        return DensityState(matrix_from_json(obj["density"], f"{where}.density"), t)
    if "vector" in obj:
        vec = vector_from_json(obj["vector"], f"{where}.vector")
        return DensityState.from_vector(vec, t)
    raise ParseError(f"{where}: needs 'density' or 'vector'")


PROP_VARIANTS = ("cov1", "cov2", "contra")


def prop_from_json(obj, where: str = "prop"):
    """Elementary proposition input: (operator matrix, windows, recipe name)."""
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if "op" not in obj:
        raise ParseError(f"{where}: missing 'op'")
    variant = obj.get("variant")
    if variant not in PROP_VARIANTS:
        raise ParseError(
            f"{where}: 'variant' must be one of {', '.join(PROP_VARIANTS)}"
        )
    if "window" not in obj:
        raise ParseError(f"{where}: missing 'window'")
    op = matrix_from_json(obj["op"], f"{where}.op")
    windows = windows_from_json(obj["window"], f"{where}.window")
    if variant in ("cov1", "cov2") and not isinstance(windows, RealInterval):
        if len(windows) != 1:
            raise ParseError(
                f"{where}: the {variant} recipe takes a single window"
            )
        windows = windows[0]
    return op, windows, variant


def truth_to_json(tv: TruthValue) -> dict:
    return {
        "base": tv.base,
        "kind": tv.kind,
        "members": sorted(tv.members),
        "total": tv.is_total,
    }
