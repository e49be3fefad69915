"""Commutative contexts of M_n(C) and their inclusion poset.

A context is a unital commutative *-subalgebra, stored as its resolution of
identity: the ordered tuple of mutually orthogonal minimal projections that
sum to 1. Inclusion of contexts is refinement of these block decompositions
read backwards: D is below C when every block of D is a union of blocks of C.

The poset layer works with finite user-seeded fragments closed under pairwise
meet. The one-dimensional trivial context (single block, the identity) is the
bottom element and is included or stripped by an explicit flag; with the flag
off a family of mutually incompatible contexts is a bare antichain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContextNotInPoset,
    DimensionMismatch,
    NonCommutingGenerators,
    NotASubcontext,
    NotInContext,
)
from .operators import (
    HermitianOperator,
    Projection,
    Tolerance,
    as_matrix,
    commutator_norm,
    fingerprint,
    matrix_label,
    proj_leq,
)


class Context:
    """Commutative context given by its minimal projections.

    The projections are sorted by a tol-quantized entry fingerprint, which
    makes the ordering (and hence the label and the character indexing)
    independent of how the context was produced.
    """

    __slots__ = ("mins", "label", "_coeff_cache")

    def __init__(self, minimal_projections, tol: Tolerance | float | None = None):
        t = Tolerance.coerce(tol)
        mins = tuple(
            p if isinstance(p, Projection) else Projection(p, t)
            for p in minimal_projections
        )
        if not mins:
            raise ValueError("a context needs at least one minimal projection")
        dim = mins[0].dim
        total = np.zeros((dim, dim), dtype=complex)
        for i, p in enumerate(mins):
            if p.dim != dim:
                raise DimensionMismatch("blocks of mixed dimensions")
            if p.is_zero(t):
                raise ValueError("zero projection cannot be a block")
            total = total + p.mat
            for q in mins[i + 1 :]:
                if not t.matrix_zero(p.mat @ q.mat):
                    raise ValueError("blocks are not mutually orthogonal")
        if not t.matrix_close(total, np.eye(dim)):
            raise ValueError("blocks do not sum to the identity")
        mins = tuple(sorted(mins, key=lambda p: fingerprint(p, t)))
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "label", "c" + matrix_label([p.mat for p in mins], t))
        object.__setattr__(self, "_coeff_cache", {})

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Context is immutable")

    @property
    def dim(self) -> int:
        return self.mins[0].dim

    @property
    def size(self) -> int:
        """Number of blocks, i.e. number of Gelfand characters."""
        return len(self.mins)

    @classmethod
    def trivial(cls, dim: int) -> "Context":
        return cls([Projection(np.eye(dim))])

    def is_trivial(self) -> bool:
        return self.size == 1

    def block_ranks(self) -> tuple[int, ...]:
        return tuple(p.rank() for p in self.mins)

    def coefficients(self, a, tol: Tolerance | float | None = None) -> np.ndarray:
        """Block coefficients of a member, or raise NotInContext.

        A Hermitian a belongs to the context iff a = sum_i c_i p_i; the c_i
        are recovered as tr(p_i a)/rank(p_i) and the expansion is verified.
        """
        t = Tolerance.coerce(tol)
        key = None
        if isinstance(a, HermitianOperator):
            # key by content: object ids get recycled across temporaries
            key = (a.mat.tobytes(), t.tol)
            hit = self._coeff_cache.get(key)
            if hit is not None:
                return hit
        mat = as_matrix(a)
        if mat.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"operator of shape {mat.shape} against dim {self.dim} context"
            )
        coeffs = np.array(
            [float(np.trace(p.mat @ mat).real) / p.rank() for p in self.mins]
        )
        recon = sum(c * p.mat for c, p in zip(coeffs, self.mins))
        if not t.matrix_close(recon, mat):
            raise NotInContext("operator is not a member of this context")
        if key is not None:
            self._coeff_cache[key] = coeffs
        return coeffs

    def contains_operator(self, a, tol: Tolerance | float | None = None) -> bool:
        try:
            self.coefficients(a, tol)
        except (NotInContext, DimensionMismatch):
            return False
        return True

    def member_from_coefficients(self, coeffs) -> HermitianOperator:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for c, p in zip(coeffs, self.mins):
            acc = acc + float(c) * p.mat
        return HermitianOperator(acc)

    def projection_of_mask(self, mask: int) -> Projection:
        """Projection in the context's lattice named by a block bitmask."""
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for i, p in enumerate(self.mins):
            if mask >> i & 1:
                acc = acc + p.mat
        return Projection(acc)

    def mask_of_projection(self, p, tol: Tolerance | float | None = None) -> int:
        """Bitmask of a lattice member, or raise NotInContext."""
        t = Tolerance.coerce(tol)
        coeffs = self.coefficients(p, t)
        mask = 0
        for i, c in enumerate(coeffs):
            if t.close(c, 1.0):
                mask |= 1 << i
            elif not t.close(c, 0.0):
                raise NotInContext("operator is not a projection of this context")
        return mask

    def lattice_masks(self) -> range:
        """All projections of the context, as block bitmasks."""
        return range(1 << self.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, Context) and self.label == other.label

    def __hash__(self) -> int:
        return hash(self.label)

    def __repr__(self) -> str:
        ranks = "|".join(str(r) for r in self.block_ranks())
        return f"Context[{ranks}]({self.label})"


def context_from_operators(
    operators,
    tol: Tolerance | float | None = None,
    dim: int | None = None,
) -> Context:
    """Smallest context containing a commuting Hermitian family.

    The blocks are the joint eigenspaces, computed by refining an orthonormal
    basis one generator at a time. An empty family yields the trivial
    context, which needs an explicit dim. Non-commuting input raises
    NonCommutingGenerators naming the offending pair and its commutator norm.
    """
    t = Tolerance.coerce(tol)
    ops = [
        a if isinstance(a, HermitianOperator) else HermitianOperator(a, t)
        for a in operators
    ]
    if not ops:
        if dim is None:
            raise ValueError("cannot infer the dimension from an empty family")
        return Context.trivial(dim)
    if dim is not None and ops[0].dim != dim:
        raise DimensionMismatch("generators do not match the requested dim")
    dim = ops[0].dim
    for a in ops:
        if a.dim != dim:
            raise DimensionMismatch("generators of mixed dimensions")
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            norm = commutator_norm(ops[i], ops[j])
            if norm > t.tol:
                raise NonCommutingGenerators(
                    f"generators {i} and {j} do not commute, "
                    f"commutator norm {norm:.6e}"
                )
    blocks = [np.eye(dim, dtype=complex)]  # orthonormal column bases
    for a in ops:
        refined = []
        for basis in blocks:
            comp = basis.conj().T @ a.mat @ basis
            comp = (comp + comp.conj().T) / 2.0
            vals, vecs = np.linalg.eigh(comp)
            r = comp.shape[0]
            start = 0
            for i in range(1, r + 1):
                if i == r or vals[i] - vals[i - 1] > t.tol:
                    refined.append(basis @ vecs[:, start:i])
                    start = i
        blocks = refined
    return Context([Projection(b @ b.conj().T) for b in blocks], t)


def trivial_context(dim: int) -> Context:
    return Context.trivial(dim)


def context_leq(d: Context, c: Context, tol: Tolerance | float | None = None) -> bool:
    """Inclusion D <= C: every block of D is a sum of blocks of C."""
    t = Tolerance.coerce(tol)
    if d.dim != c.dim:
        raise DimensionMismatch("contexts of different dimensions")
    for block in d.mins:
        acc = np.zeros((d.dim, d.dim), dtype=complex)
        for q in c.mins:
            if proj_leq(q, block, t):
                acc = acc + q.mat
        if not t.matrix_close(acc, block.mat):
            return False
    return True


def context_meet(c1: Context, c2: Context, tol: Tolerance | float | None = None) -> Context:
    """Largest common coarsening: intersection of the two subalgebras.

    Blocks of the meet are connected components of the overlap graph between
    the two block families; within a component the two partial sums agree and
    that common projection is a block of the meet.
    """
    t = Tolerance.coerce(tol)
    if c1.dim != c2.dim:
        raise DimensionMismatch("contexts of different dimensions")
    n1, n2 = c1.size, c2.size
    parent = list(range(n1 + n2))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for i, p in enumerate(c1.mins):
        for j, q in enumerate(c2.mins):
            if not t.matrix_zero(p.mat @ q.mat):
                union(i, n1 + j)
    groups: dict[int, np.ndarray] = {}
    for i, p in enumerate(c1.mins):
        root = find(i)
        groups[root] = groups.get(root, 0) + p.mat
    blocks = []
    for root, acc in groups.items():
        # sanity: the c2 side of the component must sum to the same projection
        other = sum(
            (q.mat for j, q in enumerate(c2.mins) if find(n1 + j) == root),
            np.zeros((c1.dim, c1.dim), dtype=complex),
        )
        if not Tolerance(min(100 * t.tol, 9e-4)).matrix_close(acc, other):
            raise ValueError("overlap components disagree; input is inconsistent")
        blocks.append(Projection(acc))
    return Context(blocks, t)


@dataclass(frozen=True)
class Sieve:
    """Downward closed selection of contexts under a base."""

    base: str
    members: frozenset[str]

    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class Cosieve:
    """Upward closed selection of contexts above a base."""

    base: str
    members: frozenset[str]

    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))


@dataclass(eq=False)
class ContextPoset:
    """Finite fragment of the context order, closed under pairwise meet.

    Contexts are kept in canonical label order. leq[i][j] says contexts[i] is
    below (coarser than) contexts[j]. Restriction tables between comparable
    pairs are computed on demand and cached; they drive every bundle
    operation downstream.
    """

    contexts: tuple[Context, ...]
    include_trivial: bool
    tol: Tolerance = field(default_factory=Tolerance)
    _index: dict[str, int] = field(init=False, repr=False)
    _leq: np.ndarray = field(init=False, repr=False)
    _restrictions: dict[tuple[str, str], tuple[int, ...]] = field(
        init=False, repr=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        labels = [c.label for c in self.contexts]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate contexts in poset")
        self._index = {c.label: i for i, c in enumerate(self.contexts)}
        n = len(self.contexts)
        leq = np.zeros((n, n), dtype=bool)
        for i, a in enumerate(self.contexts):
            for j, b in enumerate(self.contexts):
                leq[i, j] = context_leq(a, b, self.tol)
        self._leq = leq

    # ------------------------------------------------------------------
    # basic access
    def __len__(self) -> int:
        return len(self.contexts)

    def __iter__(self):
        return iter(self.contexts)

    def __contains__(self, item) -> bool:
        label = item.label if isinstance(item, Context) else item
        return label in self._index

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.contexts)

    @property
    def key(self) -> tuple:
        return (self.include_trivial, self.labels)

    @property
    def dim(self) -> int:
        return self.contexts[0].dim

    def get(self, item) -> Context:
        """Stored context for a label or a Context with the same label."""
        label = item.label if isinstance(item, Context) else item
        i = self._index.get(label)
        if i is None:
            raise ContextNotInPoset(f"no context labelled {label!r} in this poset")
        return self.contexts[i]

    def index_of(self, item) -> int:
        label = item.label if isinstance(item, Context) else item
        i = self._index.get(label)
        if i is None:
            raise ContextNotInPoset(f"no context labelled {label!r} in this poset")
        return i

    def is_leq(self, a, b) -> bool:
        return bool(self._leq[self.index_of(a), self.index_of(b)])

    def down_indices(self, item) -> tuple[int, ...]:
        j = self.index_of(item)
        return tuple(int(i) for i in np.nonzero(self._leq[:, j])[0])

    def up_indices(self, item) -> tuple[int, ...]:
        i = self.index_of(item)
        return tuple(int(j) for j in np.nonzero(self._leq[i, :])[0])

    def hasse_edges(self) -> tuple[tuple[str, str], ...]:
        """Covering pairs (lower, upper) in label order."""
        n = len(self.contexts)
        edges = []
        for i in range(n):
            for j in range(n):
                if i == j or not self._leq[i, j]:
                    continue
                between = (
                    self._leq[i, :] & self._leq[:, j] &
                    ~np.eye(n, dtype=bool)[i, :] & ~np.eye(n, dtype=bool)[j, :]
                )
                if not between.any():
                    edges.append((self.contexts[i].label, self.contexts[j].label))
        return tuple(sorted(edges))

    def maximal_indices(self) -> tuple[int, ...]:
        n = len(self.contexts)
        return tuple(
            i for i in range(n)
            if not any(self._leq[i, j] and i != j for j in range(n))
        )

    def bottom(self) -> Context | None:
        """The unique minimum if there is one, else None."""
        n = len(self.contexts)
        for i in range(n):
            if all(self._leq[i, j] for j in range(n)):
                return self.contexts[i]
        return None

    # ------------------------------------------------------------------
    # order machinery
    def restriction_table(self, c_label: str, d_label: str) -> tuple[int, ...]:
        """Character restriction map along D <= C, as a block index table.

        Entry k names the block of D that dominates block k of C, i.e. the
        image of the k-th character of C under restriction to D.
        """
        key = (c_label, d_label)
        hit = self._restrictions.get(key)
        if hit is not None:
            return hit
        c, d = self.get(c_label), self.get(d_label)
        if not self.is_leq(d, c):
            raise NotASubcontext(f"{d_label} is not below {c_label}")
        table = []
        for p in c.mins:
            for j, q in enumerate(d.mins):
                if proj_leq(p, q, self.tol):
                    table.append(j)
                    break
            else:  # pragma: no cover - excluded by context_leq
                raise NotASubcontext("block fails to land in a coarser block")
        out = tuple(table)
        self._restrictions[key] = out
        return out

    def extension_masks(self, d_label: str, c_label: str) -> tuple[int, ...]:
        """For D <= C, the mask of C-characters restricting to each D-character."""
        table = self.restriction_table(c_label, d_label)
        d = self.get(d_label)
        masks = [0] * d.size
        for k, j in enumerate(table):
            masks[j] |= 1 << k
        return tuple(masks)

    def principal_sieve(self, item) -> Sieve:
        c = self.contexts[self.index_of(item)]
        members = frozenset(self.contexts[i].label for i in self.down_indices(c))
        return Sieve(base=c.label, members=members)

    def up_set(self, item) -> Cosieve:
        c = self.contexts[self.index_of(item)]
        members = frozenset(self.contexts[i].label for i in self.up_indices(c))
        return Cosieve(base=c.label, members=members)

    def is_sieve_on(self, base, members) -> bool:
        base_i = self.index_of(base)
        idx = {self.index_of(m) for m in members}
        if not idx <= set(self.down_indices(self.contexts[base_i])):
            return False
        for i in idx:
            for j in self.down_indices(self.contexts[i]):
                if j not in idx:
                    return False
        return True

    def is_cosieve_on(self, base, members) -> bool:
        base_i = self.index_of(base)
        idx = {self.index_of(m) for m in members}
        if not idx <= set(self.up_indices(self.contexts[base_i])):
            return False
        for i in idx:
            for j in self.up_indices(self.contexts[i]):
                if j not in idx:
                    return False
        return True


def build_poset(
    seeds,
    include_trivial: bool = True,
    tol: Tolerance | float | None = None,
) -> ContextPoset:
    """Meet-closure of a seed family, in canonical order.

    Pairwise meets are added until closure. The trivial context is then added
    or stripped according to the flag; with the flag off, meets that coarsen
    all the way down to the trivial context are simply not represented, which
    leaves mutually incompatible seeds as an antichain.
    """
    t = Tolerance.coerce(tol)
    pool: dict[str, Context] = {}
    for c in seeds:
        if not isinstance(c, Context):
            raise TypeError("seeds must be Context instances")
        pool[c.label] = c
    if not pool:
        raise ValueError("at least one seed context is required")
    dims = {c.dim for c in pool.values()}
    if len(dims) != 1:
        raise DimensionMismatch("seed contexts of mixed dimensions")
    work = list(pool.values())
    while work:
        fresh: list[Context] = []
        items = list(pool.values())
        for c in work:
            for d in items:
                m = context_meet(c, d, t)
                if m.label not in pool:
                    pool[m.label] = m
                    fresh.append(m)
        work = fresh
    dim = next(iter(dims))
    triv = Context.trivial(dim)
    if include_trivial:
        pool.setdefault(triv.label, triv)
    else:
        pool.pop(triv.label, None)
    ordered = tuple(sorted(pool.values(), key=lambda c: c.label))
    return ContextPoset(contexts=ordered, include_trivial=include_trivial, tol=t)
