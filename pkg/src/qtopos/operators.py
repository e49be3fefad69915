"""Dense Hermitian kernel: eigendata, spectral order, projection lattice bits.

Everything above this layer (contexts, bundles, daseinisation, states) reduces
to eigenstructure questions about small dense Hermitian matrices, so this
module owns the numeric conventions: how eigenvalues cluster into spectral
thresholds, how projections are compared, and how real windows select
spectral subspaces. All comparisons go through an explicit Tolerance value
that is threaded by the callers rather than kept in module state.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInterval,
    DimensionMismatch,
    NonCommuting,
    NotHermitian,
)

DEFAULT_TOL = 1e-9

_TOL_CEILING = 1e-3


@dataclass(frozen=True)
class Tolerance:
    """Numeric slack for every floating comparison.

    A value x counts as zero when |x| <= tol, two scalars are equal when they
    differ by at most tol, and strict inequalities require clearance by more
    than tol. The ceiling keeps the slack far away from the spectral gaps of
    any sane input.
    """

    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if not (0.0 <= self.tol < _TOL_CEILING):
            raise ValueError(
                f"tolerance must lie in [0, {_TOL_CEILING}), got {self.tol!r}"
            )

    @classmethod
    def coerce(cls, value: "Tolerance | float | None") -> "Tolerance":
        if value is None:
            return cls()
        if isinstance(value, Tolerance):
            return value
        return cls(float(value))

    # scalar comparisons
    def close(self, x: float, y: float) -> bool:
        return abs(x - y) <= self.tol

    def leq(self, x: float, y: float) -> bool:
        return x <= y + self.tol

    def geq(self, x: float, y: float) -> bool:
        return x >= y - self.tol

    def lt(self, x: float, y: float) -> bool:
        return x < y - self.tol

    def gt(self, x: float, y: float) -> bool:
        return x > y + self.tol

    # matrix comparisons, always max-norm
    def matrix_close(self, a: np.ndarray, b: np.ndarray) -> bool:
        return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) <= self.tol

    def matrix_zero(self, a: np.ndarray) -> bool:
        return float(np.max(np.abs(np.asarray(a)))) <= self.tol


def as_matrix(value) -> np.ndarray:
    """Accept wrapper objects or raw arrays and return an ndarray view."""
    if isinstance(value, HermitianOperator):
        return value.mat
    return np.asarray(value, dtype=complex)


@dataclass(frozen=True)
class RealInterval:
    """Interval of the real line with independent open/closed endpoints.

    Endpoints may be -inf / +inf. Membership honors the endpoint flags, with
    equality judged at tolerance: a point within tol of a closed endpoint is
    in, a point within tol of an open endpoint is out.
    """

    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise DegenerateInterval(
                f"interval lower endpoint {self.lo} exceeds upper {self.hi}"
            )

    def contains(self, x: float, tol: Tolerance | float | None = None) -> bool:
        t = Tolerance.coerce(tol)
        if np.isfinite(self.lo):
            if self.lo_open:
                if not t.gt(x, self.lo):
                    return False
            elif not t.geq(x, self.lo):
                return False
        if np.isfinite(self.hi):
            if self.hi_open:
                if not t.lt(x, self.hi):
                    return False
            elif not t.leq(x, self.hi):
                return False
        return True


class HermitianOperator:
    """Square complex matrix equal to its conjugate transpose within tol.

    The stored matrix is symmetrized once at construction, so downstream
    numerics see an exactly Hermitian array. Instances are immutable; the
    spectral resolution is memoized per tolerance.
    """

    __slots__ = ("mat", "_resolutions")

    def __init__(self, entries, tol: Tolerance | float | None = None) -> None:
        t = Tolerance.coerce(tol)
        mat = np.array(entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise NotHermitian(f"expected a square matrix, got shape {mat.shape}")
        if mat.shape[0] < 1:
            raise NotHermitian("dimension must be at least 1")
        dev = float(np.max(np.abs(mat - mat.conj().T)))
        if dev > t.tol:
            raise NotHermitian(
                f"matrix deviates from Hermitian symmetry by {dev:.3e}"
            )
        sym = (mat + mat.conj().T) / 2.0
        sym.setflags(write=False)
        object.__setattr__(self, "mat", sym)
        object.__setattr__(self, "_resolutions", {})

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("HermitianOperator is immutable")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim))

    @classmethod
    def zero(cls, dim: int) -> "HermitianOperator":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def diagonal(cls, values) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def close_to(self, other, tol: Tolerance | float | None = None) -> bool:
        return Tolerance.coerce(tol).matrix_close(self.mat, as_matrix(other))

    def __add__(self, other) -> "HermitianOperator":
        return HermitianOperator(self.mat + as_matrix(other))

    def __sub__(self, other) -> "HermitianOperator":
        return HermitianOperator(self.mat - as_matrix(other))

    def __rmul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(float(scalar) * self.mat)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class Projection(HermitianOperator):
    """Hermitian idempotent; the working currency of the whole package."""

    def __init__(self, entries, tol: Tolerance | float | None = None) -> None:
        super().__init__(entries, tol)
        t = Tolerance.coerce(tol)
        dev = float(np.max(np.abs(self.mat @ self.mat - self.mat)))
        # products double rounding noise, so idempotence gets a small multiple
        if dev > 10 * max(t.tol, 1e-12):
            raise NotHermitian(f"matrix is not idempotent, |P^2-P| = {dev:.3e}")

    @property
    def underlying(self) -> HermitianOperator:
        return HermitianOperator(self.mat)

    def rank(self) -> int:
        return int(round(self.trace()))

    def is_zero(self, tol: Tolerance | float | None = None) -> bool:
        return Tolerance.coerce(tol).matrix_zero(self.mat)

    def complement(self) -> "Projection":
        return Projection(np.eye(self.dim) - self.mat)

    def leq(self, other, tol: Tolerance | float | None = None) -> bool:
        return proj_leq(self, other, tol)

    @classmethod
    def onto_vector(cls, vec) -> "Projection":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise ValueError("cannot project onto the zero vector")
        v = v / n
        return cls(np.outer(v, v.conj()))


def proj_leq(p, q, tol: Tolerance | float | None = None) -> bool:
    """Range inclusion p <= q for projections, i.e. q p = p within tol."""
    t = Tolerance.coerce(tol)
    pm, qm = as_matrix(p), as_matrix(q)
    if pm.shape != qm.shape:
        raise DimensionMismatch(f"projection shapes {pm.shape} vs {qm.shape}")
    return t.matrix_close(qm @ pm, pm)


def proj_orthogonal(p, q, tol: Tolerance | float | None = None) -> bool:
    t = Tolerance.coerce(tol)
    return t.matrix_zero(as_matrix(p) @ as_matrix(q))


@dataclass(frozen=True)
class SpectralResolution:
    """Clustered eigendata of a Hermitian operator.

    thresholds are strictly increasing (consecutive raw eigenvalues within tol
    are merged, the threshold is the cluster mean); eigenprojections[k] spans
    the k-th cluster; steps[k] accumulates everything at or below threshold k,
    so steps[-1] is the identity.
    """

    thresholds: tuple[float, ...]
    eigenprojections: tuple[Projection, ...]
    dim: int

    @property
    def steps(self) -> tuple[Projection, ...]:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        out = []
        for proj in self.eigenprojections:
            acc = acc + proj.mat
            out.append(Projection(acc))
        return tuple(out)

    def step_at(self, x: float, tol: Tolerance | float | None = None) -> Projection:
        """Cumulative spectral projection at height x (thresholds <= x + tol)."""
        t = Tolerance.coerce(tol)
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for lam, proj in zip(self.thresholds, self.eigenprojections):
            if t.leq(lam, x):
                acc = acc + proj.mat
        return Projection(acc)

    def reconstruct(self) -> HermitianOperator:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for lam, proj in zip(self.thresholds, self.eigenprojections):
            acc = acc + lam * proj.mat
        return HermitianOperator(acc)


def eigendecompose(a, tol: Tolerance | float | None = None) -> SpectralResolution:
    """Cluster the spectrum of a Hermitian operator at tolerance.

    Consecutive eigenvalues closer than tol fall into one cluster; each
    cluster contributes one threshold (the mean) and one eigenprojection
    (sum of outer products over the cluster's orthonormal eigenvectors).
    """
    if isinstance(a, HermitianOperator):
        t = Tolerance.coerce(tol)
        cached = a._resolutions.get(t.tol)
        if cached is not None:
            return cached
        res = _eigendecompose_matrix(a.mat, t)
        a._resolutions[t.tol] = res
        return res
    t = Tolerance.coerce(tol)
    mat = as_matrix(a)
    if not t.matrix_close(mat, mat.conj().T):
        raise NotHermitian("eigendecompose expects a Hermitian matrix")
    return _eigendecompose_matrix((mat + mat.conj().T) / 2.0, t)


def _eigendecompose_matrix(mat: np.ndarray, t: Tolerance) -> SpectralResolution:
    vals, vecs = np.linalg.eigh(mat)
    dim = mat.shape[0]
    thresholds: list[float] = []
    projections: list[Projection] = []
    start = 0
    for i in range(1, dim + 1):
        if i == dim or vals[i] - vals[i - 1] > t.tol:
            block = vecs[:, start:i]
            thresholds.append(float(np.mean(vals[start:i])))
            projections.append(Projection(block @ block.conj().T))
            start = i
    return SpectralResolution(tuple(thresholds), tuple(projections), dim)


def spectral_projection(
    a,
    delta,
    tol: Tolerance | float | None = None,
) -> Projection:
    """Spectral subspace of a Hermitian operator over a window.

    delta is a RealInterval or an iterable of them (a finite union). The
    result sums the eigenprojections whose threshold lies in the union,
    with endpoint membership judged per interval flags at tolerance.
    """
    t = Tolerance.coerce(tol)
    if isinstance(delta, RealInterval):
        windows: tuple[RealInterval, ...] = (delta,)
    else:
        windows = tuple(delta)
        if not all(isinstance(w, RealInterval) for w in windows):
            raise TypeError("delta must be a RealInterval or an iterable of them")
    res = eigendecompose(a, t)
    acc = np.zeros((res.dim, res.dim), dtype=complex)
    for lam, proj in zip(res.thresholds, res.eigenprojections):
        if any(w.contains(lam, t) for w in windows):
            acc = acc + proj.mat
    return Projection(acc)


def spectral_order_leq(a, b, tol: Tolerance | float | None = None) -> bool:
    """Spectral order: a <= b iff every spectral step of a dominates b's.

    Both step families are compared at the merged threshold grid; domination
    at height x means step_a(x) >= step_b(x) as projections. On projections
    and on commuting pairs this coincides with the usual operator order.
    """
    t = Tolerance.coerce(tol)
    am, bm = as_matrix(a), as_matrix(b)
    if am.shape != bm.shape:
        raise DimensionMismatch(f"operator shapes {am.shape} vs {bm.shape}")
    ra, rb = eigendecompose(a, t), eigendecompose(b, t)
    grid = sorted(set(ra.thresholds) | set(rb.thresholds))
    for x in grid:
        ea = ra.step_at(x, t)
        eb = rb.step_at(x, t)
        if not proj_leq(eb, ea, t):
            return False
    return True


def loewner_leq(a, b, tol: Tolerance | float | None = None) -> bool:
    """Ordinary operator order: b - a is PSD within tol."""
    t = Tolerance.coerce(tol)
    am, bm = as_matrix(a), as_matrix(b)
    if am.shape != bm.shape:
        raise DimensionMismatch(f"operator shapes {am.shape} vs {bm.shape}")
    diff = bm - am
    low = float(np.min(np.linalg.eigvalsh((diff + diff.conj().T) / 2.0)))
    return low >= -t.tol


def commutator_norm(a, b) -> float:
    am, bm = as_matrix(a), as_matrix(b)
    return float(np.max(np.abs(am @ bm - bm @ am)))


def commuting_lattice_ops(
    p,
    q,
    tol: Tolerance | float | None = None,
) -> tuple[Projection, Projection]:
    """Meet and join of a commuting pair of projections: (pq, p + q - pq)."""
    t = Tolerance.coerce(tol)
    pm, qm = as_matrix(p), as_matrix(q)
    if pm.shape != qm.shape:
        raise DimensionMismatch(f"projection shapes {pm.shape} vs {qm.shape}")
    norm = commutator_norm(pm, qm)
    if norm > t.tol:
        raise NonCommuting(f"projections do not commute, |[p,q]| = {norm:.3e}")
    prod = pm @ qm
    prod = (prod + prod.conj().T) / 2.0
    return Projection(prod), Projection(pm + qm - prod)


def _joint_blocks(a, b, t: Tolerance) -> list[tuple[float, float, Projection]]:
    """Simultaneous eigendata for a commuting Hermitian pair."""
    am, bm = as_matrix(a), as_matrix(b)
    norm = commutator_norm(am, bm)
    if norm > t.tol:
        raise NonCommuting(f"operators do not commute, |[a,b]| = {norm:.3e}")
    out = []
    ra = eigendecompose(a, t)
    for alpha, proj in zip(ra.thresholds, ra.eigenprojections):
        basis = _range_basis(proj, t)
        comp = basis.conj().T @ bm @ basis
        comp = (comp + comp.conj().T) / 2.0
        vals, vecs = np.linalg.eigh(comp)
        start = 0
        r = comp.shape[0]
        for i in range(1, r + 1):
            if i == r or vals[i] - vals[i - 1] > t.tol:
                cols = basis @ vecs[:, start:i]
                out.append(
                    (alpha, float(np.mean(vals[start:i])), Projection(cols @ cols.conj().T))
                )
                start = i
    return out


def _range_basis(p: Projection, t: Tolerance) -> np.ndarray:
    vals, vecs = np.linalg.eigh(p.mat)
    keep = vals > 0.5
    return vecs[:, keep]


def commuting_max(a, b, tol: Tolerance | float | None = None) -> HermitianOperator:
    """Pointwise max of a commuting pair on their joint eigenspaces."""
    t = Tolerance.coerce(tol)
    dim = as_matrix(a).shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    for alpha, beta, proj in _joint_blocks(a, b, t):
        acc = acc + max(alpha, beta) * proj.mat
    return HermitianOperator(acc)


def commuting_min(a, b, tol: Tolerance | float | None = None) -> HermitianOperator:
    t = Tolerance.coerce(tol)
    dim = as_matrix(a).shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    for alpha, beta, proj in _joint_blocks(a, b, t):
        acc = acc + min(alpha, beta) * proj.mat
    return HermitianOperator(acc)


def support_of_positive_part(a, tol: Tolerance | float | None = None) -> Projection:
    """Projection onto the span of eigenvectors with eigenvalue above tol."""
    t = Tolerance.coerce(tol)
    res = eigendecompose(a, t)
    acc = np.zeros((res.dim, res.dim), dtype=complex)
    for lam, proj in zip(res.thresholds, res.eigenprojections):
        if t.gt(lam, 0.0):
            acc = acc + proj.mat
    return Projection(acc)


def fingerprint(mat, tol: Tolerance | float | None = None) -> tuple[int, ...]:
    """Quantized entry tuple; equal matrices at tol share a fingerprint."""
    t = Tolerance.coerce(tol)
    scale = t.tol if t.tol > 0 else DEFAULT_TOL
    arr = as_matrix(mat)
    quant = np.round(arr / scale)
    # flatten re/im interleaved; +0.0 normalizes -0.0
    flat = np.stack([quant.real + 0.0, quant.imag + 0.0], axis=-1).reshape(-1)
    return tuple(int(x) for x in flat)


def matrix_label(mats, tol: Tolerance | float | None = None) -> str:
    """Short stable hex label for an ordered family of matrices."""
    h = hashlib.sha256()
    for m in mats:
        h.update(repr(fingerprint(m, tol)).encode())
        h.update(b"|")
    return h.hexdigest()[:12]
