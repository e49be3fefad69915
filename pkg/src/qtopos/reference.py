"""Worked fixtures and seeded random sources shared by checks and tests.

Everything here is deterministic: fixed matrices with hand-checkable spectra,
a few small context posets whose frame-level counts are known in advance, the
18-vector dim-4 family with no consistent section, and numpy-seeded random
generators for the property suites.
"""

from __future__ import annotations

import numpy as np

from .contexts import Context, ContextPoset, build_poset
from .operators import HermitianOperator, Projection, Tolerance


def golden_matrix() -> HermitianOperator:
    """Off-diagonal 2x2 example with eigenvalues (1 +- sqrt(5))/2."""
    return HermitianOperator([[0.0, 1.0], [1.0, 1.0]])


def loewner_pair() -> tuple[HermitianOperator, HermitianOperator]:
    """Two diagonal minorants of golden_matrix in the Loewner order."""
    b1 = HermitianOperator(np.diag([-1.0, 0.0]))
    b2 = HermitianOperator(np.diag([-0.25, -3.0]))
    return b1, b2


def diag_context(dim: int = 2) -> Context:
    """Context of diagonal matrices in the standard basis."""
    blocks = []
    for k in range(dim):
        m = np.zeros((dim, dim))
        m[k, k] = 1.0
        blocks.append(Projection(m))
    return Context(blocks)


def plus_projection() -> Projection:
    """Rank-1 projection onto (1,1)/sqrt(2)."""
    return Projection(np.full((2, 2), 0.5))


def basis_state(dim: int = 2, k: int = 0) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[k] = 1.0
    return vec


def two_context_poset(tol: Tolerance | float | None = None) -> ContextPoset:
    """The smallest nontrivial poset: diagonal M2 context plus bottom."""
    return build_poset([diag_context(2)], include_trivial=True, tol=tol)


def _basis_context(vectors) -> Context:
    blocks = []
    for v in vectors:
        w = np.asarray(v, dtype=complex)
        w = w / np.linalg.norm(w)
        blocks.append(Projection(np.outer(w, w.conj())))
    return Context(blocks)


def diamond_poset(tol: Tolerance | float | None = None) -> ContextPoset:
    """Four-context M3 poset: two maximal contexts, their meet, bottom."""
    c1 = diag_context(3)
    root2 = np.sqrt(2.0)
    c2 = _basis_context(
        [
            np.array([1.0, 1.0, 0.0]) / root2,
            np.array([1.0, -1.0, 0.0]) / root2,
            np.array([0.0, 0.0, 1.0]),
        ]
    )
    return build_poset([c1, c2], include_trivial=True, tol=tol)


def projection_rich_poset(tol: Tolerance | float | None = None) -> ContextPoset:
    """Eleven-context M3 poset whose projections span all of Herm(3).

    Seven maximal contexts: the standard basis and, for each coordinate
    pair, the real and the imaginary rotation by 45 degrees. Their meet
    closure adds three two-block contexts and the bottom.
    """
    root2 = np.sqrt(2.0)
    e = [basis_state(3, k) for k in range(3)]
    seeds = [diag_context(3)]
    for i, j, k in ((0, 1, 2), (1, 2, 0), (0, 2, 1)):
        seeds.append(
            _basis_context(
                [(e[i] + e[j]) / root2, (e[i] - e[j]) / root2, e[k]]
            )
        )
        seeds.append(
            _basis_context(
                [(e[i] + 1j * e[j]) / root2, (e[i] - 1j * e[j]) / root2, e[k]]
            )
        )
    return build_poset(seeds, include_trivial=True, tol=tol)


def cross_poset(
    arms: int = 7,
    include_trivial: bool = True,
    tol: Tolerance | float | None = None,
) -> ContextPoset:
    """M2 poset of rotated axis contexts at angles k*pi/(2*arms)."""
    seeds = []
    for k in range(arms):
        theta = k * np.pi / (2 * arms)
        v = np.array([np.cos(theta), np.sin(theta)])
        seeds.append(_basis_context([v, np.array([-v[1], v[0]])]))
    return build_poset(seeds, include_trivial=include_trivial, tol=tol)


# Eighteen +-1/0 vectors in dimension four, grouped into nine orthogonal
# bases so that every vector occurs in exactly two of them. Each basis must
# select one vector of a section, but the double-occurrence forces an even
# total selection count against nine odd bases, so no section exists.
UNCOLORABLE_BASES: tuple[tuple[tuple[int, int, int, int], ...], ...] = (
    ((0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 0, 0), (1, -1, 0, 0)),
    ((0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 1, 0), (1, 0, -1, 0)),
    ((1, -1, 1, -1), (1, -1, -1, 1), (1, 1, 0, 0), (0, 0, 1, 1)),
    ((1, -1, 1, -1), (1, 1, 1, 1), (1, 0, -1, 0), (0, 1, 0, -1)),
    ((0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 0, -1)),
    ((1, -1, -1, 1), (1, 1, 1, 1), (1, 0, 0, -1), (0, 1, -1, 0)),
    ((1, 1, -1, 1), (1, 1, 1, -1), (1, -1, 0, 0), (0, 0, 1, 1)),
    ((1, 1, -1, 1), (-1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, -1)),
    ((1, 1, 1, -1), (-1, 1, 1, 1), (1, 0, 0, 1), (0, 1, -1, 0)),
)


def uncolorable_contexts() -> list[Context]:
    return [_basis_context(rows) for rows in UNCOLORABLE_BASES]


def uncolorable_poset(tol: Tolerance | float | None = None) -> ContextPoset:
    """Meet closure of the nine bases, without the bottom context."""
    return build_poset(uncolorable_contexts(), include_trivial=False, tol=tol)


# ----------------------------------------------------------------------
# seeded random sources


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_hermitian(
    gen: np.random.Generator,
    dim: int,
    scale: float = 1.0,
) -> HermitianOperator:
    g = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    return HermitianOperator(scale * (g + g.conj().T) / 2.0)


def random_unitary(gen: np.random.Generator, dim: int) -> np.ndarray:
    g = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    # fix phases so the distribution is Haar
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_projection(
    gen: np.random.Generator,
    dim: int,
    rank: int | None = None,
) -> Projection:
    if rank is None:
        rank = int(gen.integers(1, dim))
    u = random_unitary(gen, dim)
    d = np.zeros(dim)
    d[:rank] = 1.0
    return Projection(u @ np.diag(d) @ u.conj().T)


def random_context(gen: np.random.Generator, dim: int) -> Context:
    """Maximal context spanned by a Haar-random orthonormal basis."""
    u = random_unitary(gen, dim)
    return _basis_context([u[:, k] for k in range(dim)])


def random_poset(
    gen: np.random.Generator,
    dim: int,
    count: int,
    include_trivial: bool = True,
    tol: Tolerance | float | None = None,
) -> ContextPoset:
    seeds = [random_context(gen, dim) for _ in range(count)]
    return build_poset(seeds, include_trivial=include_trivial, tol=tol)


def random_unit_vector(gen: np.random.Generator, dim: int) -> np.ndarray:
    v = gen.normal(size=dim) + 1j * gen.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(gen: np.random.Generator, dim: int) -> HermitianOperator:
    """Full-rank density matrix from a Ginibre square."""
    g = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    m = g @ g.conj().T + 1e-3 * np.eye(dim)
    return HermitianOperator(m / np.trace(m).real)


def random_window(
    gen: np.random.Generator,
    a: HermitianOperator,
    tol: Tolerance | float | None = None,
) -> tuple[float, float]:
    """Window overlapping the spectrum of a, endpoints off the eigenvalues."""
    evs = np.linalg.eigvalsh(a.mat)
    lo_b, hi_b = float(evs[0]) - 1.0, float(evs[-1]) + 1.0
    for _ in range(64):
        r, s = np.sort(gen.uniform(lo_b, hi_b, size=2))
        if s - r < 1e-2:
            continue
        if min(abs(float(v) - r) for v in evs) < 1e-3:
            continue
        if min(abs(float(v) - s) for v in evs) < 1e-3:
            continue
        return float(r), float(s)
    return lo_b - 0.5, hi_b + 0.5
