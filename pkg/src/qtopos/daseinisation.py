"""Approximating operators inside contexts, and elementary propositions.

A self-adjoint operator rarely belongs to a given context. It still casts
two shadows there: an outer approximation built from the smallest dominating
projections and an inner approximation built from the largest dominated
ones. At the projection level these are lattice operations; at the operator
level they are assembled threshold by threshold from the spectral data.

Reading the two shadows at a character of the context produces a closed
interval, one per bundle point, and asking that interval to sit strictly
inside an open window produces elementary propositions: open subsets of the
bundle standing for "the value of a lies in the window". Three recipes are
implemented, two for the costar topology (interval containment, and inner
approximation of the spectral window projection) and one star-like recipe
via outer approximation over a union of intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import (
    COSTAR,
    CLOPEN_STAR,
    STAR,
    BundleOpen,
    Character,
    evaluate,
)
from .contexts import Context, ContextPoset
from .errors import DegenerateInterval
from .operators import (
    HermitianOperator,
    Projection,
    RealInterval,
    Tolerance,
    as_matrix,
    eigendecompose,
    proj_leq,
    spectral_projection,
    support_of_positive_part,
)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; the value of a bundle point under an operator."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise DegenerateInterval(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x: float, tol: Tolerance | float | None = None) -> bool:
        t = Tolerance.coerce(tol)
        return t.geq(x, self.lo) and t.leq(x, self.hi)


@dataclass(frozen=True)
class ScottBasic:
    """Basic open window (p, q) on interval values, with strict membership.

    An interval [lo, hi] belongs to the window when p < lo and hi < q, both
    strictly up to tolerance. Degenerate windows are rejected.
    """

    p: float
    q: float

    def __post_init__(self) -> None:
        if not self.p < self.q:
            raise DegenerateInterval(
                f"window ({self.p}, {self.q}) has no interior"
            )

    def member(self, iv: Interval, tol: Tolerance | float | None = None) -> bool:
        t = Tolerance.coerce(tol)
        return t.lt(self.p, iv.lo) and t.lt(iv.hi, self.q)


# ----------------------------------------------------------------------
# projection approximations


def das_outer_proj(
    p, c: Context, tol: Tolerance | float | None = None
) -> Projection:
    """Smallest context projection dominating p: sum of overlapping blocks."""
    t = Tolerance.coerce(tol)
    pm = p.mat if isinstance(p, HermitianOperator) else as_matrix(p)
    mask = 0
    for i, q in enumerate(c.mins):
        # block overlaps p exactly when q p is nonzero
        if np.linalg.norm(q.mat @ pm, 2) > t.tol:
            mask |= 1 << i
    return c.projection_of_mask(mask)


def das_inner_proj(
    p, c: Context, tol: Tolerance | float | None = None
) -> Projection:
    """Largest context projection dominated by p: sum of contained blocks."""
    t = Tolerance.coerce(tol)
    mask = 0
    for i, q in enumerate(c.mins):
        if proj_leq(q, p, t):
            mask |= 1 << i
    return c.projection_of_mask(mask)


def das_outer_mask(p, c: Context, tol: Tolerance | float | None = None) -> int:
    t = Tolerance.coerce(tol)
    pm = p.mat if isinstance(p, HermitianOperator) else as_matrix(p)
    mask = 0
    for i, q in enumerate(c.mins):
        if np.linalg.norm(q.mat @ pm, 2) > t.tol:
            mask |= 1 << i
    return mask


def das_inner_mask(p, c: Context, tol: Tolerance | float | None = None) -> int:
    t = Tolerance.coerce(tol)
    mask = 0
    for i, q in enumerate(c.mins):
        if proj_leq(q, p, t):
            mask |= 1 << i
    return mask


# ----------------------------------------------------------------------
# operator approximations


def das_outer_sa(
    a, c: Context, tol: Tolerance | float | None = None
) -> HermitianOperator:
    """Outer approximation of a self-adjoint operator inside a context.

    Built from the spectral family: each left-continuous spectral projection
    is approximated from inside, and the staircase is resummed. The result
    dominates a in the spectral order and lies in the context.
    """
    t = Tolerance.coerce(tol)
    h = a if isinstance(a, HermitianOperator) else HermitianOperator(a, t)
    res = eigendecompose(h, t)
    outer_steps = [das_inner_proj(step, c, t) for step in res.steps]
    return _resum(res.thresholds, outer_steps, h.dim)


def das_inner_sa(
    a, c: Context, tol: Tolerance | float | None = None
) -> HermitianOperator:
    """Inner approximation: spectral steps approximated from outside."""
    t = Tolerance.coerce(tol)
    h = a if isinstance(a, HermitianOperator) else HermitianOperator(a, t)
    res = eigendecompose(h, t)
    inner_steps = [das_outer_proj(step, c, t) for step in res.steps]
    return _resum(res.thresholds, inner_steps, h.dim)


def _resum(thresholds, steps, dim: int) -> HermitianOperator:
    """Rebuild an operator from a monotone staircase of projections."""
    mat = np.zeros((dim, dim), dtype=complex)
    prev = np.zeros((dim, dim), dtype=complex)
    for lam, proj in zip(thresholds, steps):
        mat += lam * (proj.mat - prev)
        prev = proj.mat
    return HermitianOperator(mat)


def das_map(
    a,
    char: Character,
    tol: Tolerance | float | None = None,
) -> Interval:
    """Interval of a bundle point: inner and outer values at the character."""
    t = Tolerance.coerce(tol)
    c = char.context
    inner = das_inner_sa(a, c, t)
    outer = das_outer_sa(a, c, t)
    lo = evaluate(char, inner, t)
    hi = evaluate(char, outer, t)
    if lo > hi:
        # approximations always straddle; any violation is numerical noise
        lo, hi = min(lo, hi), max(lo, hi)
    return Interval(lo, hi)


# ----------------------------------------------------------------------
# independent evaluation path: threshold scans against one projection


def antonymous_value(
    a,
    char: Character,
    tol: Tolerance | float | None = None,
) -> float:
    """Value of the inner approximation at a character, via threshold scan.

    Scans the spectral thresholds of a from below and returns the first one
    whose complementary spectral projection fails to dominate the
    character's block. Computed without constructing the approximation,
    which makes it an independent cross-check.
    """
    t = Tolerance.coerce(tol)
    h = a if isinstance(a, HermitianOperator) else HermitianOperator(a, t)
    res = eigendecompose(h, t)
    p = char.projection
    eye = np.eye(h.dim)
    for lam, step in zip(res.thresholds, res.steps):
        cmpl = Projection(eye - step.mat, t)
        if not proj_leq(p, cmpl, t):
            return float(lam)
    return float(res.thresholds[-1])  # pragma: no cover


def observable_value(
    a,
    char: Character,
    tol: Tolerance | float | None = None,
) -> float:
    """Value of the outer approximation at a character, via threshold scan."""
    t = Tolerance.coerce(tol)
    h = a if isinstance(a, HermitianOperator) else HermitianOperator(a, t)
    res = eigendecompose(h, t)
    p = char.projection
    for lam, step in zip(res.thresholds, res.steps):
        if proj_leq(p, step, t):
            return float(lam)
    return float(res.thresholds[-1])  # pragma: no cover


# ----------------------------------------------------------------------
# elementary propositions


def elementary_prop_cov1(
    a,
    window: ScottBasic,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> BundleOpen:
    """Costar proposition: points whose value interval sits inside the window."""
    t = Tolerance.coerce(tol)
    fibers: dict[str, int] = {}
    for c in poset:
        inner = das_inner_sa(a, c, t)
        outer = das_outer_sa(a, c, t)
        lo_coeffs = c.coefficients(inner, t)
        hi_coeffs = c.coefficients(outer, t)
        mask = 0
        for k in range(c.size):
            iv = Interval(
                min(float(lo_coeffs[k]), float(hi_coeffs[k])),
                max(float(lo_coeffs[k]), float(hi_coeffs[k])),
            )
            if window.member(iv, t):
                mask |= 1 << k
        fibers[c.label] = mask
    return BundleOpen(poset, COSTAR, fibers)


def elementary_prop_cov2(
    a,
    window: ScottBasic,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> BundleOpen:
    """Costar proposition via inner approximation of the window projection."""
    t = Tolerance.coerce(tol)
    h = a if isinstance(a, HermitianOperator) else HermitianOperator(a, t)
    win = RealInterval(window.p, window.q, lo_open=True, hi_open=True)
    spec = spectral_projection(h, win, t)
    fibers = {
        c.label: das_inner_mask(spec, c, t) for c in poset
    }
    return BundleOpen(poset, COSTAR, fibers)


def elementary_prop_contra(
    a,
    delta,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> BundleOpen:
    """Clopen-star proposition via outer approximation of the window projection.

    delta may be one RealInterval or an iterable of them (a finite union).
    """
    t = Tolerance.coerce(tol)
    h = a if isinstance(a, HermitianOperator) else HermitianOperator(a, t)
    spec = spectral_projection(h, delta, t)
    fibers = {
        c.label: das_outer_mask(spec, c, t) for c in poset
    }
    return BundleOpen(poset, CLOPEN_STAR, fibers)


def inf_embedding(
    p,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> BundleOpen:
    """Costar open collecting each context's inner approximation of p."""
    t = Tolerance.coerce(tol)
    fibers = {c.label: das_inner_mask(p, c, t) for c in poset}
    return BundleOpen(poset, COSTAR, fibers)


def sup_embedding(
    p,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> BundleOpen:
    """Star open collecting each context's outer approximation of p."""
    t = Tolerance.coerce(tol)
    fibers = {c.label: das_outer_mask(p, c, t) for c in poset}
    return BundleOpen(poset, STAR, fibers)


# ----------------------------------------------------------------------
# projection lattice helpers for non-commuting pairs


def projection_meet(
    p, q, tol: Tolerance | float | None = None
) -> Projection:
    """Largest projection below both: kernel projector of (1-p) + (1-q)."""
    t = Tolerance.coerce(tol)
    pm = p.mat if isinstance(p, HermitianOperator) else as_matrix(p)
    qm = q.mat if isinstance(q, HermitianOperator) else as_matrix(q)
    dim = pm.shape[0]
    gap = (np.eye(dim) - pm) + (np.eye(dim) - qm)
    res = eigendecompose(HermitianOperator(gap, t), t)
    mat = np.zeros((dim, dim), dtype=complex)
    for lam, proj in zip(res.thresholds, res.eigenprojections):
        if abs(lam) <= max(t.tol, 1e-12) * 10:
            mat += proj.mat
    return Projection(mat, t)


def projection_join(
    p, q, tol: Tolerance | float | None = None
) -> Projection:
    """Smallest projection above both: support of the sum."""
    t = Tolerance.coerce(tol)
    pm = p.mat if isinstance(p, HermitianOperator) else as_matrix(p)
    qm = q.mat if isinstance(q, HermitianOperator) else as_matrix(q)
    return support_of_positive_part(HermitianOperator(pm + qm, t), t)


# ----------------------------------------------------------------------
# witness for the failure of interval openness in the star topology


def star_interval_discontinuity_witness(
    a,
    window: ScottBasic,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
):
    """Find a point whose interval is in the window while a restriction is not.

    Returns (context_label, char_index, coarser_label) for the first bundle
    point, in poset order, that satisfies the window but whose restriction
    to some coarser context does not; returns None when no such point
    exists. A non-None result shows the interval condition cuts out a set
    that is not open in the star topology.
    """
    t = Tolerance.coerce(tol)
    member: dict[str, int] = {}
    for c in poset:
        inner = das_inner_sa(a, c, t)
        outer = das_outer_sa(a, c, t)
        lo = c.coefficients(inner, t)
        hi = c.coefficients(outer, t)
        mask = 0
        for k in range(c.size):
            iv = Interval(
                min(float(lo[k]), float(hi[k])),
                max(float(lo[k]), float(hi[k])),
            )
            if window.member(iv, t):
                mask |= 1 << k
        member[c.label] = mask
    for c in poset:
        mask = member[c.label]
        if mask == 0:
            continue
        for i in poset.down_indices(c):
            d = poset.contexts[i]
            if d.label == c.label:
                continue
            table = poset.restriction_table(c.label, d.label)
            for k in range(c.size):
                if mask >> k & 1 and not (member[d.label] >> table[k]) & 1:
                    return (c.label, k, d.label)
    return None
