"""States, valuations on opens, truth values, and state reconstruction.

A density operator induces a valuation on bundle opens by evaluating the
fiber projection at each context. For the star-like topologies the fiber
projections shrink along restriction, so the valuation is order reversing;
for the costar topology they grow along extension, so it is order
preserving. Unit vectors additionally induce a truth object (the family of
certainly-true fiber projections), pseudo-states in both topologies, and a
0/1 valuation.

Truth values live in the poset itself: a proposition at a stage is assigned
the collection of coarser stages where it holds hereditarily (a sieve), or
dually the collection of finer stages where it holds onward (a cosieve).

The reconstruction map inverts the state-to-valuation assignment: given
enough fiber values it solves for the density matrix and certifies the
result, reporting underdetermination or inconsistency instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import (
    COSTAR,
    BundleOpen,
    saturate,
)
from .contexts import Context, ContextPoset, Cosieve, Sieve
from .daseinisation import das_inner_mask, das_outer_mask
from .errors import (
    DimensionMismatch,
    FrameMismatch,
    Inconsistent,
    ModeMismatch,
    NotUnitVector,
    Underdetermined,
)
from .operators import (
    HermitianOperator,
    Projection,
    Tolerance,
    as_matrix,
    fingerprint,
)


class DensityState:
    """A density operator: positive semidefinite with unit trace."""

    __slots__ = ("op",)

    def __init__(self, mat, tol: Tolerance | float | None = None):
        t = Tolerance.coerce(tol)
        op = mat if isinstance(mat, HermitianOperator) else HermitianOperator(mat, t)
        eigs = np.linalg.eigvalsh(op.mat)
        if eigs.min() < -t.tol:
            raise NotUnitVector(
                f"density matrix has negative eigenvalue {eigs.min():.3g}"
            )
        if not t.close(float(op.trace()), 1.0):
            raise NotUnitVector(
                f"density matrix has trace {float(op.trace()):.6g}, expected 1"
            )
        self.op = op

    @classmethod
    def from_vector(cls, psi, tol: Tolerance | float | None = None) -> "DensityState":
        t = Tolerance.coerce(tol)
        v = np.asarray(psi, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(v))
        if not t.close(norm, 1.0):
            raise NotUnitVector(f"vector has norm {norm:.6g}, expected 1")
        return cls(np.outer(v, v.conj()), t)

    @property
    def dim(self) -> int:
        return self.op.dim

    def expectation(self, a, tol: Tolerance | float | None = None) -> float:
        return expectation(self, a, tol)


def expectation(rho, a, tol: Tolerance | float | None = None) -> float:
    """Expectation value tr(rho a) of a self-adjoint operator."""
    t = Tolerance.coerce(tol)
    rm = rho.op.mat if isinstance(rho, DensityState) else as_matrix(rho)
    am = a.mat if isinstance(a, HermitianOperator) else as_matrix(a)
    if rm.shape != am.shape:
        raise DimensionMismatch(
            f"state dimension {rm.shape[0]} vs operator dimension {am.shape[0]}"
        )
    return float(np.trace(rm @ am).real)


# ----------------------------------------------------------------------
# valuations induced by states


ORDER_PRESERVING = "order-preserving"
ORDER_REVERSING = "order-reversing"


@dataclass(frozen=True)
class MonotoneValuation:
    """A [0, 1]-valued assignment to contexts, monotone along inclusion."""

    poset: ContextPoset
    values: dict[str, float]
    direction: str

    def __post_init__(self) -> None:
        if self.direction not in (ORDER_PRESERVING, ORDER_REVERSING):
            raise ValueError(f"unknown direction {self.direction!r}")
        t = Tolerance.coerce(self.poset.tol)
        for c in self.poset:
            v = self.values[c.label]
            if not (t.geq(v, 0.0) and t.leq(v, 1.0)):
                raise ValueError(f"value {v} at {c.label} outside [0, 1]")
        for a in self.poset:
            for b in self.poset:
                if a.label == b.label or not self.poset.is_leq(a, b):
                    continue
                # a is coarser than b here; preserving means value grows
                # toward finer contexts, reversing means it shrinks
                lo, hi = self.values[a.label], self.values[b.label]
                if self.direction == ORDER_REVERSING:
                    lo, hi = hi, lo
                if t.gt(lo, hi):
                    raise ValueError(
                        f"valuation not {self.direction} between "
                        f"{a.label} and {b.label}"
                    )

    def value(self, label: str) -> float:
        return self.values[label]


class ClopenMeasure:
    """Valuation on star-like opens induced by a density state."""

    __slots__ = ("state", "poset", "tol")

    def __init__(
        self,
        state: DensityState,
        poset: ContextPoset,
        tol: Tolerance | float | None = None,
    ):
        self.state = state
        self.poset = poset
        self.tol = Tolerance.coerce(tol)

    def value(self, opened: BundleOpen, label: str) -> float:
        if opened.variant == COSTAR:
            raise FrameMismatch("this measure evaluates star-like opens")
        c = self.poset.get(label)
        p = c.projection_of_mask(opened.fibers[label])
        return expectation(self.state, p, self.tol)

    def valuation(self, opened: BundleOpen) -> MonotoneValuation:
        values = {
            c.label: self.value(opened, c.label) for c in self.poset
        }
        return MonotoneValuation(self.poset, values, ORDER_REVERSING)


class CovariantState:
    """Valuation on costar opens induced by a density state."""

    __slots__ = ("state", "poset", "tol")

    def __init__(
        self,
        state: DensityState,
        poset: ContextPoset,
        tol: Tolerance | float | None = None,
    ):
        self.state = state
        self.poset = poset
        self.tol = Tolerance.coerce(tol)

    def value(self, opened: BundleOpen, label: str) -> float:
        if opened.variant != COSTAR:
            raise FrameMismatch("this state evaluates costar opens")
        c = self.poset.get(label)
        p = c.projection_of_mask(opened.fibers[label])
        return expectation(self.state, p, self.tol)

    def valuation(self, opened: BundleOpen) -> MonotoneValuation:
        values = {
            c.label: self.value(opened, c.label) for c in self.poset
        }
        return MonotoneValuation(self.poset, values, ORDER_PRESERVING)


def measure_from_state(
    rho: DensityState,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> ClopenMeasure:
    return ClopenMeasure(rho, poset, tol)


def covariant_state_from_state(
    rho: DensityState,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> CovariantState:
    return CovariantState(rho, poset, tol)


def restrict_measure(mu: ClopenMeasure) -> CovariantState:
    """Read a star-like measure as a costar valuation on the same state.

    Both directions evaluate the same density state on fiber projections;
    only the class of opens accepted changes.
    """
    return CovariantState(mu.state, mu.poset, mu.tol)


# ----------------------------------------------------------------------
# vector states: truth objects and pseudo-states


@dataclass(frozen=True)
class TruthObject:
    """Per-context family of fiber masks that a vector makes certainly true."""

    poset: ContextPoset
    masks: dict[str, frozenset[int]]

    def holds(self, label: str, mask: int) -> bool:
        return int(mask) in self.masks[label]


def truth_object(
    psi,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> TruthObject:
    """Collect, per context, the masks whose projection the vector satisfies."""
    t = Tolerance.coerce(tol)
    state = DensityState.from_vector(psi, t)
    masks: dict[str, frozenset[int]] = {}
    for c in poset:
        good = []
        for m in c.lattice_masks():
            p = c.projection_of_mask(m)
            if t.close(expectation(state, p, t), 1.0):
                good.append(m)
        masks[c.label] = frozenset(good)
    return TruthObject(poset, masks)


def pseudo_state_contra(
    psi,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> BundleOpen:
    """Smallest star-like proposition a vector certainly satisfies."""
    from .bundle import CLOPEN_STAR

    t = Tolerance.coerce(tol)
    state = DensityState.from_vector(psi, t)
    fibers = {
        c.label: das_outer_mask(Projection(state.op.mat, t), c, t)
        for c in poset
    }
    return BundleOpen(poset, CLOPEN_STAR, fibers)


def pseudo_state_cov(
    psi,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> BundleOpen:
    """Costar open collecting the inner approximations of the vector's line."""
    t = Tolerance.coerce(tol)
    state = DensityState.from_vector(psi, t)
    fibers = {
        c.label: das_inner_mask(Projection(state.op.mat, t), c, t)
        for c in poset
    }
    return BundleOpen(poset, COSTAR, fibers)


# ----------------------------------------------------------------------
# truth values


@dataclass(frozen=True)
class TruthValue:
    """A sieve or cosieve on the context poset, anchored at a base stage."""

    base: str
    members: frozenset[str]
    kind: str

    @property
    def is_total(self) -> bool:
        return self.base in self.members

    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))


def truth_value_contra(
    lhs,
    rhs,
    base: str,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> TruthValue:
    """Sieve-valued truth at a base stage, in one of two modes.

    Membership mode: lhs is a TruthObject and rhs a Projection; a coarser
    stage is in the sieve when every stage below it makes the outer
    approximation of rhs certainly true.

    Inclusion mode: lhs and rhs are star-like opens; a coarser stage is in
    the sieve when the lhs fiber sits inside the rhs fiber at every stage
    below it. Any other combination raises ModeMismatch.
    """
    t = Tolerance.coerce(tol)
    c0 = poset.get(base)
    down = [poset.contexts[i] for i in poset.down_indices(c0)]
    if isinstance(lhs, TruthObject) and isinstance(rhs, (Projection, HermitianOperator)):
        rp = rhs if isinstance(rhs, Projection) else Projection(rhs.mat, t)

        def holds_at(d: Context) -> bool:
            return lhs.holds(d.label, das_outer_mask(rp, d, t))

    elif isinstance(lhs, BundleOpen) and isinstance(rhs, BundleOpen):
        if lhs.variant == COSTAR or rhs.variant == COSTAR:
            raise ModeMismatch(
                "inclusion mode needs star-like opens on both sides"
            )
        if lhs.poset.key != poset.key or rhs.poset.key != poset.key:
            raise FrameMismatch("opens live over a different poset")

        def holds_at(d: Context) -> bool:
            return lhs.fibers[d.label] & ~rhs.fibers[d.label] == 0

    else:
        raise ModeMismatch(
            "expected (TruthObject, Projection) or (BundleOpen, BundleOpen)"
        )
    members = []
    for d in down:
        below = [poset.contexts[i] for i in poset.down_indices(d)]
        if all(holds_at(e) for e in below):
            members.append(d.label)
    return TruthValue(base=c0.label, members=frozenset(members), kind="sieve")


def truth_value_cov(
    mu: CovariantState,
    opened: BundleOpen,
    base: str,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> TruthValue:
    """Cosieve-valued truth: finer stages where the open is certainly true."""
    t = Tolerance.coerce(tol)
    if opened.variant != COSTAR:
        raise FrameMismatch("covariant truth evaluates costar opens")
    c0 = poset.get(base)
    ups = [poset.contexts[j] for j in poset.up_indices(c0)]

    def certain(c: Context) -> bool:
        return t.close(mu.value(opened, c.label), 1.0)

    members = []
    for c in ups:
        above = [poset.contexts[j] for j in poset.up_indices(c)]
        if all(certain(e) for e in above):
            members.append(c.label)
    return TruthValue(base=c0.label, members=frozenset(members), kind="cosieve")


def sieve_of(tv: TruthValue, poset: ContextPoset) -> Sieve:
    if tv.kind != "sieve":
        raise ModeMismatch("truth value is not a sieve")
    s = Sieve(base=tv.base, members=tv.members)
    if not poset.is_sieve_on(s.base, s.members):
        raise ModeMismatch("member set is not downward closed")  # pragma: no cover
    return s


def cosieve_of(tv: TruthValue, poset: ContextPoset) -> Cosieve:
    if tv.kind != "cosieve":
        raise ModeMismatch("truth value is not a cosieve")
    s = Cosieve(base=tv.base, members=tv.members)
    if not poset.is_cosieve_on(s.base, s.members):
        raise ModeMismatch("member set is not upward closed")  # pragma: no cover
    return s


class Mu0:
    """0/1 valuation of costar opens induced by a unit vector.

    An open counts as true at a context when every finer context containing
    the vector's line puts all of the line's support characters inside the
    open. Additive only in the trivial cases: the certainty requirement
    breaks additivity, and the empty open can evaluate to 1 at a context
    none of whose refinements contain the line.
    """

    __slots__ = ("poset", "line", "tol")

    def __init__(self, psi, poset: ContextPoset, tol: Tolerance | float | None = None):
        t = Tolerance.coerce(tol)
        state = DensityState.from_vector(psi, t)
        self.poset = poset
        self.line = Projection(state.op.mat, t)
        self.tol = t

    def value(self, opened: BundleOpen, label: str) -> int:
        if opened.variant != COSTAR:
            raise FrameMismatch("this valuation evaluates costar opens")
        c = self.poset.get(label)
        for j in self.poset.up_indices(c):
            e = self.poset.contexts[j]
            if not e.contains_operator(self.line, self.tol):
                continue
            support = das_outer_mask(self.line, e, self.tol)
            if support & ~opened.fibers[e.label]:
                return 0
        return 1


def mu0(psi, poset: ContextPoset, tol: Tolerance | float | None = None) -> Mu0:
    return Mu0(psi, poset, tol)


# ----------------------------------------------------------------------
# reconstruction


def _herm_to_vec(mat: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix: diagonal, then scaled off-diagonal."""
    n = mat.shape[0]
    parts = [mat.diagonal().real]
    upper_re = []
    upper_im = []
    for i in range(n):
        for j in range(i + 1, n):
            upper_re.append(np.sqrt(2.0) * mat[i, j].real)
            upper_im.append(np.sqrt(2.0) * mat[i, j].imag)
    parts.append(np.array(upper_re))
    parts.append(np.array(upper_im))
    return np.concatenate([p for p in parts if p.size])


def reconstruct_state(
    measurements,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
) -> DensityState:
    """Solve for the density state behind a family of fiber values.

    Input is an iterable of ((label, mask), value) pairs: the valuation of
    the fiber projection of mask at the context of label. Duplicate
    projections must agree (Inconsistent otherwise), the projections must
    span the space of Hermitian matrices together with the trace condition
    (Underdetermined otherwise), and the solved matrix must reproduce the
    data and be an actual state (Inconsistent otherwise).
    """
    t = Tolerance.coerce(tol)
    n = poset.dim
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    seen: dict[tuple, float] = {}
    for (label, mask), value in measurements:
        c = poset.get(label)
        p = c.projection_of_mask(int(mask))
        key = fingerprint(p.mat, t)
        if key in seen:
            if not t.close(seen[key], float(value)):
                raise Inconsistent(
                    f"projection at {label} mask {mask} reported "
                    f"{value}, previously {seen[key]}"
                )
            continue
        seen[key] = float(value)
        rows.append(_herm_to_vec(p.mat))
        rhs.append(float(value))
    eye_row = _herm_to_vec(np.eye(n, dtype=complex))
    rows.append(eye_row)
    rhs.append(1.0)
    a = np.vstack(rows)
    b = np.array(rhs)
    rank = np.linalg.matrix_rank(a, tol=1e-8)
    if rank < n * n:
        raise Underdetermined(
            f"measurements span {rank} of {n * n} state dimensions"
        )
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    mat = _vec_to_herm(sol, n)
    residual = float(np.max(np.abs(a @ sol - b)))
    if residual > max(1e-8, 10 * t.tol):
        raise Inconsistent(
            f"no state reproduces the measurements (residual {residual:.3g})"
        )
    eigs = np.linalg.eigvalsh(mat)
    if eigs.min() < -max(1e-8, 10 * t.tol):
        raise Inconsistent(
            f"solved matrix has negative eigenvalue {eigs.min():.3g}"
        )
    tr = float(np.trace(mat).real)
    if abs(tr - 1.0) > max(1e-8, 10 * t.tol):
        raise Inconsistent(f"solved matrix has trace {tr:.6g}")  # pragma: no cover
    mat = mat / tr
    return DensityState(mat, t)


def _vec_to_herm(vec: np.ndarray, n: int) -> np.ndarray:
    mat = np.zeros((n, n), dtype=complex)
    mat[np.arange(n), np.arange(n)] = vec[:n]
    k = n
    off = n * (n - 1) // 2
    re = vec[k:k + off]
    im = vec[k + off:k + 2 * off]
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            z = (re[idx] + 1j * im[idx]) / np.sqrt(2.0)
            mat[i, j] = z
            mat[j, i] = np.conj(z)
            idx += 1
    return mat


def canonical_measurements(
    mu,
    poset: ContextPoset,
    tol: Tolerance | float | None = None,
):
    """Evaluate a valuation on the saturations of all single-context fibers.

    Yields ((label, mask), value) pairs suitable for reconstruct_state; each
    single-context seed is saturated to a genuine costar open first, so the
    values come from honest opens rather than arbitrary projections.
    """
    t = Tolerance.coerce(tol)
    for c in poset:
        for m in c.lattice_masks():
            if m == 0:
                continue
            opened = saturate(poset, COSTAR, {c.label: m})
            yield (c.label, m), mu.value(opened, c.label)
