"""Spectral bundles over a context poset, in two dual topologies.

The total space gathers the Gelfand spectra of all contexts in a poset: one
point per (context, character), a character being "evaluate at one block" of
the context's resolution of identity. Fibers are stored as integer bitmasks
over the context's block order, so all set algebra is bit twiddling.

Two topologies matter and they point in opposite directions:

* star ("clopen" in finite dimension): a set is open when membership
  survives restriction to coarser contexts. Closed sets are stable under
  extension to finer contexts.
* costar: a set is open when membership survives extension to finer
  contexts. Closed sets are stable under restriction.

A third tag, clopen-star, marks subsets that play the role of clopen
subobjects; their membership rule coincides with star at this scale, and
retagging between the two is the canonical embedding of clopen subobjects
into star opens. Everything else in this module (interior, closure,
saturation, irreducibility, sections, open counting, the class lattice and
its covering relation, the frame comparison map psi) is parameterized by the
variant tag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contexts import Context, ContextPoset
from .errors import (
    NotASubcontext,
    NotASubfunctor,
    NotCoveringClosed,
    NotInContext,
    PointNotInBundle,
    TooLarge,
)
from .operators import (
    Projection,
    Tolerance,
    proj_leq,
)

STAR = "star"
COSTAR = "costar"
CLOPEN_STAR = "clopen-star"

VARIANTS = (STAR, COSTAR, CLOPEN_STAR)

DEFAULT_ENUM_CAP = 200_000
DEFAULT_SECTION_CAP = 32


def _star_like(variant: str) -> bool:
    return variant in (STAR, CLOPEN_STAR)


def _check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"unknown bundle variant {variant!r}")
    return variant


@dataclass(frozen=True)
class Character:
    """A point of the bundle: one Gelfand character of one context.

    Character index k evaluates a member to its coefficient on block k.
    """

    context: Context
    index: int

    def __post_init__(self) -> None:
        if not (0 <= self.index < self.context.size):
            raise PointNotInBundle(
                f"character index {self.index} outside context of size "
                f"{self.context.size}"
            )

    @property
    def projection(self) -> Projection:
        return self.context.mins[self.index]


def spectrum(c: Context) -> tuple[Character, ...]:
    """All characters of a context, in block order."""
    return tuple(Character(c, i) for i in range(c.size))


def evaluate(char: Character, a, tol: Tolerance | float | None = None) -> float:
    """Apply a character to a member of its context."""
    coeffs = char.context.coefficients(a, tol)
    return float(coeffs[char.index])


def restrict_character(
    char: Character,
    d: Context,
    tol: Tolerance | float | None = None,
) -> Character:
    """Restriction of a character along an inclusion D <= C.

    The restricted character evaluates on the unique block of D dominating
    the character's block.
    """
    from .contexts import context_leq

    t = Tolerance.coerce(tol)
    if not context_leq(d, char.context, t):
        raise NotASubcontext("restriction target is not a coarser context")
    p = char.projection
    for j, q in enumerate(d.mins):
        if proj_leq(p, q, t):
            return Character(d, j)
    raise NotASubcontext("no coarser block dominates the character")  # pragma: no cover


def _full_mask(size: int) -> int:
    return (1 << size) - 1


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _submasks(mask: int):
    """All submasks of a bitmask, descending, ending with 0."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


class _FiberSet:
    """Shared plumbing for open and closed fiber families."""

    __slots__ = ("poset", "variant", "fibers")

    def __init__(self, poset: ContextPoset, variant: str, fibers: dict[str, int]):
        self.poset = poset
        self.variant = _check_variant(variant)
        norm: dict[str, int] = {}
        for c in poset:
            mask = int(fibers.get(c.label, 0))
            full = _full_mask(c.size)
            if mask & ~full:
                raise PointNotInBundle(
                    f"fiber mask {mask:#x} exceeds context of size {c.size}"
                )
            norm[c.label] = mask
        unknown = set(fibers) - set(norm)
        if unknown:
            raise PointNotInBundle(f"fibers over unknown contexts: {sorted(unknown)}")
        self.fibers = norm

    def fiber(self, label: str) -> int:
        return self.fibers[label]

    def chars(self, label: str) -> tuple[int, ...]:
        return tuple(_bits(self.fibers[label]))

    def points(self) -> tuple[tuple[str, int], ...]:
        out = []
        for c in self.poset:
            for i in _bits(self.fibers[c.label]):
                out.append((c.label, i))
        return tuple(out)

    def total_size(self) -> int:
        return sum(_popcount(m) for m in self.fibers.values())

    def is_empty(self) -> bool:
        return all(m == 0 for m in self.fibers.values())

    def is_full(self) -> bool:
        return all(
            self.fibers[c.label] == _full_mask(c.size) for c in self.poset
        )

    def _same_frame(self, other: "_FiberSet") -> None:
        if self.poset.key != other.poset.key or self.variant != other.variant:
            from .errors import FrameMismatch

            raise FrameMismatch(
                "operands live on different posets or bundle variants"
            )

    def __eq__(self, other) -> bool:
        return (
            type(self) is type(other)
            and self.poset.key == other.poset.key
            and self.variant == other.variant
            and self.fibers == other.fibers
        )

    def __hash__(self) -> int:
        return hash(
            (type(self).__name__, self.poset.key, self.variant,
             tuple(sorted(self.fibers.items())))
        )

    def __repr__(self) -> str:
        body = ", ".join(
            f"{label}:{self.fibers[label]:b}" for label in sorted(self.fibers)
        )
        return f"{type(self).__name__}[{self.variant}]({body})"


class BundleOpen(_FiberSet):
    """Open subset of the bundle in one of the variant topologies."""

    def __init__(
        self,
        poset: ContextPoset,
        variant: str,
        fibers: dict[str, int],
        validate: bool = True,
    ):
        super().__init__(poset, variant, fibers)
        if validate and not _is_open(poset, self.variant, self.fibers):
            raise PointNotInBundle(
                f"fiber family is not open in the {self.variant} topology"
            )

    @classmethod
    def empty(cls, poset: ContextPoset, variant: str) -> "BundleOpen":
        return cls(poset, variant, {}, validate=False)

    @classmethod
    def full(cls, poset: ContextPoset, variant: str) -> "BundleOpen":
        fibers = {c.label: _full_mask(c.size) for c in poset}
        return cls(poset, variant, fibers, validate=False)

    def union(self, other: "BundleOpen") -> "BundleOpen":
        self._same_frame(other)
        fibers = {k: self.fibers[k] | other.fibers[k] for k in self.fibers}
        return BundleOpen(self.poset, self.variant, fibers, validate=False)

    def intersection(self, other: "BundleOpen") -> "BundleOpen":
        self._same_frame(other)
        fibers = {k: self.fibers[k] & other.fibers[k] for k in self.fibers}
        return BundleOpen(self.poset, self.variant, fibers, validate=False)

    def leq(self, other: "BundleOpen") -> bool:
        self._same_frame(other)
        return all(
            self.fibers[k] & ~other.fibers[k] == 0 for k in self.fibers
        )

    def complement(self) -> "BundleClosed":
        fibers = {
            c.label: _full_mask(c.size) & ~self.fibers[c.label]
            for c in self.poset
        }
        return BundleClosed(self.poset, self.variant, fibers, validate=False)

    def retag(self, variant: str) -> "BundleOpen":
        """Same fiber data under another star-like tag.

        This is the canonical embedding of clopen subobjects into star opens
        (and its inverse): membership rules agree, only the tag changes.
        Retagging to or from the costar topology is not meaningful and is
        rejected.
        """
        variant = _check_variant(variant)
        if _star_like(self.variant) != _star_like(variant):
            from .errors import FrameMismatch

            raise FrameMismatch("retag must stay within the star-like variants")
        return BundleOpen(self.poset, variant, dict(self.fibers), validate=False)


class BundleClosed(_FiberSet):
    """Closed subset of the bundle in one of the variant topologies."""

    def __init__(
        self,
        poset: ContextPoset,
        variant: str,
        fibers: dict[str, int],
        validate: bool = True,
    ):
        super().__init__(poset, variant, fibers)
        if validate:
            comp = {
                c.label: _full_mask(c.size) & ~self.fibers[c.label]
                for c in poset
            }
            if not _is_open(poset, self.variant, comp):
                raise PointNotInBundle(
                    f"fiber family is not closed in the {self.variant} topology"
                )

    def complement(self) -> BundleOpen:
        fibers = {
            c.label: _full_mask(c.size) & ~self.fibers[c.label]
            for c in self.poset
        }
        return BundleOpen(self.poset, self.variant, fibers, validate=False)

    def union(self, other: "BundleClosed") -> "BundleClosed":
        self._same_frame(other)
        fibers = {k: self.fibers[k] | other.fibers[k] for k in self.fibers}
        return BundleClosed(self.poset, self.variant, fibers, validate=False)

    def intersection(self, other: "BundleClosed") -> "BundleClosed":
        self._same_frame(other)
        fibers = {k: self.fibers[k] & other.fibers[k] for k in self.fibers}
        return BundleClosed(self.poset, self.variant, fibers, validate=False)

    def leq(self, other: "BundleClosed") -> bool:
        self._same_frame(other)
        return all(self.fibers[k] & ~other.fibers[k] == 0 for k in self.fibers)


def _is_open(poset: ContextPoset, variant: str, fibers: dict[str, int]) -> bool:
    if _star_like(variant):
        # membership must survive restriction to every coarser context
        for c in poset:
            mask = fibers[c.label]
            if mask == 0:
                continue
            for i in poset.down_indices(c):
                d = poset.contexts[i]
                if d.label == c.label:
                    continue
                table = poset.restriction_table(c.label, d.label)
                down = fibers[d.label]
                for k in _bits(mask):
                    if not (down >> table[k]) & 1:
                        return False
        return True
    # costar: membership must survive extension to every finer context
    for c in poset:
        mask = fibers[c.label]
        if mask == 0:
            continue
        for j in poset.up_indices(c):
            e = poset.contexts[j]
            if e.label == c.label:
                continue
            ext = poset.extension_masks(c.label, e.label)
            up = fibers[e.label]
            for k in _bits(mask):
                if ext[k] & ~up:
                    return False
    return True


def saturate(
    poset: ContextPoset,
    variant: str,
    fibers: dict[str, int],
) -> BundleOpen:
    """Smallest open of the variant containing the given fiber family."""
    variant = _check_variant(variant)
    out = {c.label: int(fibers.get(c.label, 0)) for c in poset}
    if _star_like(variant):
        for c in poset:
            mask = out[c.label]
            if mask == 0:
                continue
            for i in poset.down_indices(c):
                d = poset.contexts[i]
                if d.label == c.label:
                    continue
                table = poset.restriction_table(c.label, d.label)
                add = 0
                for k in _bits(mask):
                    add |= 1 << table[k]
                out[d.label] |= add
    else:
        for c in poset:
            mask = out[c.label]
            if mask == 0:
                continue
            for j in poset.up_indices(c):
                e = poset.contexts[j]
                if e.label == c.label:
                    continue
                ext = poset.extension_masks(c.label, e.label)
                add = 0
                for k in _bits(mask):
                    add |= ext[k]
                out[e.label] |= add
    return BundleOpen(poset, variant, out, validate=False)


def interior(
    poset: ContextPoset,
    variant: str,
    fibers: dict[str, int],
) -> BundleOpen:
    """Largest open of the variant inside the given fiber family.

    star: a point survives iff its whole restriction orbit lies inside.
    costar: a point survives iff all of its extensions lie inside.
    """
    variant = _check_variant(variant)
    src = {c.label: int(fibers.get(c.label, 0)) for c in poset}
    out: dict[str, int] = {}
    if _star_like(variant):
        for c in poset:
            keep = 0
            for k in _bits(src[c.label]):
                ok = True
                for i in poset.down_indices(c):
                    d = poset.contexts[i]
                    if d.label == c.label:
                        continue
                    table = poset.restriction_table(c.label, d.label)
                    if not (src[d.label] >> table[k]) & 1:
                        ok = False
                        break
                if ok:
                    keep |= 1 << k
            out[c.label] = keep
    else:
        for c in poset:
            keep = 0
            for k in _bits(src[c.label]):
                ok = True
                for j in poset.up_indices(c):
                    e = poset.contexts[j]
                    if e.label == c.label:
                        continue
                    ext = poset.extension_masks(c.label, e.label)
                    if ext[k] & ~src[e.label]:
                        ok = False
                        break
                if ok:
                    keep |= 1 << k
            out[c.label] = keep
    return BundleOpen(poset, variant, out, validate=False)


def closure(
    poset: ContextPoset,
    variant: str,
    fibers: dict[str, int],
) -> BundleClosed:
    """Smallest closed set of the variant containing the fiber family."""
    variant = _check_variant(variant)
    comp = {
        c.label: _full_mask(c.size) & ~int(fibers.get(c.label, 0)) for c in poset
    }
    inner = interior(poset, variant, comp)
    return inner.complement()


# ----------------------------------------------------------------------
# the class lattice over one context and its covering relation


@dataclass(frozen=True)
class LClass:
    """Equivalence class of positive context members, up to support.

    Two positive members are identified when each is dominated by a multiple
    of the other; the invariant datum is the support projection, recorded
    here as the bitmask of blocks it contains.
    """

    context: Context
    mask: int

    @property
    def support(self) -> Projection:
        return self.context.projection_of_mask(self.mask)


def l_class(a, c: Context, tol: Tolerance | float | None = None) -> LClass:
    """Class of a context member, named by the support of its positive part."""
    t = Tolerance.coerce(tol)
    coeffs = c.coefficients(a, t)
    mask = 0
    for i, v in enumerate(coeffs):
        if t.gt(float(v), 0.0):
            mask |= 1 << i
    return LClass(c, mask)


def covers(
    target,
    members,
    c: Context,
    tol: Tolerance | float | None = None,
) -> bool:
    """Covering relation of the class lattice over one context.

    The target (a class, or a raw context member standing for its class) is
    covered by a finite set of classes when, for every positive rational q,
    the class of (target - q)+ is below the join of the set. With finite
    spectra the quantifier is discharged by sweeping q over midpoints of
    consecutive distinct coefficient values plus one value below the least
    positive coefficient; the sweep makes the reduction to a support
    comparison explicit instead of assuming it.
    """
    t = Tolerance.coerce(tol)
    if isinstance(target, LClass):
        if target.context.label != c.label:
            raise NotInContext("target class lives over a different context")
        coeffs = np.array(
            [1.0 if target.mask >> i & 1 else 0.0 for i in range(c.size)]
        )
    else:
        coeffs = c.coefficients(target, t)
    join_mask = 0
    for m in members:
        if not isinstance(m, LClass):
            raise TypeError("members must be LClass instances")
        if m.context.label != c.label:
            raise NotInContext("member class lives over a different context")
        join_mask |= m.mask
    distinct = sorted(set(float(v) for v in coeffs))
    sweep = [
        (x + y) / 2.0 for x, y in zip(distinct, distinct[1:])
    ]
    positive = [v for v in distinct if t.gt(v, 0.0)]
    if positive:
        sweep.append(positive[0] / 2.0)
    qs = [q for q in sweep if t.gt(q, 0.0)]
    if not qs:
        # nothing positive anywhere: the zero class is covered by anything
        qs = [1.0]
    for q in qs:
        cut = 0
        for i, v in enumerate(coeffs):
            if t.gt(float(v) - q, 0.0):
                cut |= 1 << i
        if cut & ~join_mask:
            return False
    return True


# ----------------------------------------------------------------------
# covering-closed subfunctors of the class lattice and the comparison map


@dataclass(frozen=True)
class CoveringSubfunctor:
    """Covering-closed, inclusion-monotone class selection over the poset.

    Canonical form: at each context the selected classes are exactly the
    down-set of one top class, so the whole datum is one bitmask per context,
    monotone along context inclusion (read through extension masks).
    """

    poset: ContextPoset
    tops: dict[str, int]

    def classes(self, label: str) -> tuple[LClass, ...]:
        c = self.poset.get(label)
        return tuple(
            LClass(c, m) for m in sorted(_submasks(self.tops[label]))
        )

    def meet(self, other: "CoveringSubfunctor") -> "CoveringSubfunctor":
        tops = {k: self.tops[k] & other.tops[k] for k in self.tops}
        return CoveringSubfunctor(self.poset, tops)

    def join(self, other: "CoveringSubfunctor") -> "CoveringSubfunctor":
        tops = {k: self.tops[k] | other.tops[k] for k in self.tops}
        return CoveringSubfunctor(self.poset, tops)


def _validate_subfunctor_tops(poset: ContextPoset, tops: dict[str, int]) -> None:
    for c in poset:
        if c.label not in tops:
            raise NotASubfunctor(f"missing context {c.label} in subfunctor domain")
        for j in poset.up_indices(c):
            e = poset.contexts[j]
            if e.label == c.label:
                continue
            ext = poset.extension_masks(c.label, e.label)
            lifted = 0
            for k in _bits(tops[c.label]):
                lifted |= ext[k]
            if lifted & ~tops[e.label]:
                raise NotASubfunctor(
                    f"class at {c.label} is lost when passing to {e.label}"
                )


def covering_subfunctor_from_masks(
    poset: ContextPoset,
    tops: dict[str, int],
) -> CoveringSubfunctor:
    """Canonical constructor from one top mask per context; validates."""
    full = {c.label: int(tops.get(c.label, 0)) for c in poset}
    _validate_subfunctor_tops(poset, full)
    return CoveringSubfunctor(poset, full)


def generate_covering_subfunctor(
    poset: ContextPoset,
    seeds: dict[str, int],
) -> CoveringSubfunctor:
    """Smallest covering-closed subfunctor containing the seed classes."""
    tops = {c.label: int(seeds.get(c.label, 0)) for c in poset}
    changed = True
    while changed:
        changed = False
        for c in poset:
            for j in poset.up_indices(c):
                e = poset.contexts[j]
                if e.label == c.label:
                    continue
                ext = poset.extension_masks(c.label, e.label)
                lifted = 0
                for k in _bits(tops[c.label]):
                    lifted |= ext[k]
                if lifted & ~tops[e.label]:
                    tops[e.label] |= lifted
                    changed = True
    return CoveringSubfunctor(poset, tops)


def psi(
    poset: ContextPoset,
    subfunctor,
    tol: Tolerance | float | None = None,
) -> BundleOpen:
    """Comparison map from covering-closed subfunctors to costar opens.

    Input may be a CoveringSubfunctor or a raw map label -> iterable of
    classes (LClass or bitmask). Raw input must be covering closed at each
    context (a down-set of its own join; otherwise NotCoveringClosed) and
    monotone along inclusion (otherwise NotASubfunctor). The open's fiber at
    each context is the union of the selected supports' character sets,
    which is exactly the top mask.
    """
    if isinstance(subfunctor, CoveringSubfunctor):
        if subfunctor.poset.key != poset.key:
            raise NotASubfunctor("subfunctor lives over a different poset")
        tops = dict(subfunctor.tops)
        _validate_subfunctor_tops(poset, tops)
    else:
        tops = {}
        for c in poset:
            raw = subfunctor.get(c.label)
            if raw is None:
                raise NotASubfunctor(
                    f"missing context {c.label} in subfunctor domain"
                )
            masks = set()
            for item in raw:
                if isinstance(item, LClass):
                    if item.context.label != c.label:
                        raise NotInContext(
                            "class assigned to the wrong context"
                        )
                    masks.add(item.mask)
                else:
                    masks.add(int(item))
            top = 0
            for m in masks:
                top |= m
            if masks != set(_submasks(top)):
                raise NotCoveringClosed(
                    f"classes at {c.label} are not the down-set of their join"
                )
            tops[c.label] = top
        _validate_subfunctor_tops(poset, tops)
    return BundleOpen(poset, COSTAR, tops, validate=False)


def psi_inverse(opened: BundleOpen) -> CoveringSubfunctor:
    """Inverse comparison: select every class whose support sits inside."""
    if opened.variant != COSTAR:
        from .errors import FrameMismatch

        raise FrameMismatch("psi_inverse expects a costar open")
    return CoveringSubfunctor(opened.poset, dict(opened.fibers))


# ----------------------------------------------------------------------
# enumeration, sections, irreducibility


def _linear_extension(poset: ContextPoset, ascending: bool) -> list[Context]:
    order = sorted(
        poset,
        key=lambda c: (sum(1 for _ in poset.down_indices(c)), c.label),
    )
    return order if ascending else list(reversed(order))


def enumerate_opens(
    poset: ContextPoset,
    variant: str,
    cap: int = DEFAULT_ENUM_CAP,
):
    """Yield every open of the variant; raise TooLarge beyond cap.

    star: choose fibers bottom-up, each a subset of the characters whose
    restrictions were already chosen. costar: top-down dual.
    """
    variant = _check_variant(variant)
    star = _star_like(variant)
    order = _linear_extension(poset, ascending=star)
    n = len(order)
    count = 0

    def allowed(idx: int, chosen: dict[str, int]) -> int:
        c = order[idx]
        full = _full_mask(c.size)
        keep = 0
        for k in range(c.size):
            ok = True
            if star:
                for i in poset.down_indices(c):
                    d = poset.contexts[i]
                    if d.label == c.label or d.label not in chosen:
                        continue
                    table = poset.restriction_table(c.label, d.label)
                    if not (chosen[d.label] >> table[k]) & 1:
                        ok = False
                        break
            else:
                for j in poset.up_indices(c):
                    e = poset.contexts[j]
                    if e.label == c.label or e.label not in chosen:
                        continue
                    ext = poset.extension_masks(c.label, e.label)
                    if ext[k] & ~chosen[e.label]:
                        ok = False
                        break
            if ok:
                keep |= 1 << k
        return keep & full

    def rec(idx: int, chosen: dict[str, int]):
        nonlocal count
        if idx == n:
            count += 1
            if count > cap:
                raise TooLarge(f"open enumeration exceeds cap {cap}")
            yield BundleOpen(poset, variant, dict(chosen), validate=False)
            return
        c = order[idx]
        for mask in _submasks(allowed(idx, chosen)):
            chosen[c.label] = mask
            yield from rec(idx + 1, chosen)
        del chosen[c.label]

    yield from rec(0, {})


def count_opens(
    poset: ContextPoset,
    variant: str,
    cap: int = DEFAULT_ENUM_CAP,
) -> int:
    """Number of opens of the variant over the poset."""
    return sum(1 for _ in enumerate_opens(poset, variant, cap))


def monotone_projection_maps(
    poset: ContextPoset,
    cap: int = DEFAULT_ENUM_CAP,
    tol: Tolerance | float | None = None,
):
    """All inclusion-monotone choices of one projection per context.

    Monotonicity is verified on the actual matrices, which makes this an
    independent enumeration of what costar opens encode fiberwise.
    """
    t = Tolerance.coerce(tol)
    labels = [c.label for c in poset]
    choices = {c.label: list(c.lattice_masks()) for c in poset}
    mats = {
        c.label: [c.projection_of_mask(m).mat for m in choices[c.label]]
        for c in poset
    }
    pairs = [
        (a.label, b.label)
        for a in poset
        for b in poset
        if a.label != b.label and poset.is_leq(a, b)
    ]
    out: list[dict[str, Projection]] = []

    def rec(idx: int, picked: dict[str, int]):
        if idx == len(labels):
            out.append(
                {
                    lab: Projection(mats[lab][picked[lab]])
                    for lab in labels
                }
            )
            if len(out) > cap:
                raise TooLarge(f"monotone map enumeration exceeds cap {cap}")
            return
        lab = labels[idx]
        for m in choices[lab]:
            picked[lab] = m
            ok = True
            for lo, hi in pairs:
                if lo in picked and hi in picked:
                    if not proj_leq(
                        mats[lo][picked[lo]], mats[hi][picked[hi]], t
                    ):
                        ok = False
                        break
            if ok:
                rec(idx + 1, picked)
        del picked[lab]

    rec(0, {})
    return out


def global_sections(
    poset: ContextPoset,
    cap: int = DEFAULT_SECTION_CAP,
) -> list[dict[str, int]]:
    """All compatible choices of one character per context.

    A section assigns to every context a character such that along any
    inclusion the finer choice restricts to the coarser one. Backtracking
    runs over contexts in decreasing size so the forced coarse choices prune
    early. Posets beyond the cap raise TooLarge before searching.
    """
    if len(poset) > cap:
        raise TooLarge(
            f"section search over {len(poset)} contexts exceeds cap {cap}"
        )
    # Greedy placement: always extend with the context most constrained by
    # what is already placed, so contradictions between overlapping contexts
    # surface before the whole assignment is built.
    remaining = sorted(poset, key=lambda c: (-c.size, c.label))
    comparable = {
        c.label: {
            d.label
            for d in poset
            if d.label != c.label and (poset.is_leq(c, d) or poset.is_leq(d, c))
        }
        for c in poset
    }
    order: list[Context] = []
    placed: set[str] = set()
    while remaining:
        best = max(
            remaining,
            key=lambda c: (
                len(comparable[c.label] & placed),
                c.size,
                c.label,
            ),
        )
        remaining.remove(best)
        order.append(best)
        placed.add(best.label)
    n = len(order)
    found: list[dict[str, int]] = []

    def consistent(c: Context, k: int, picked: dict[str, int]) -> bool:
        for i in poset.down_indices(c):
            d = poset.contexts[i]
            if d.label == c.label or d.label not in picked:
                continue
            table = poset.restriction_table(c.label, d.label)
            if table[k] != picked[d.label]:
                return False
        for j in poset.up_indices(c):
            e = poset.contexts[j]
            if e.label == c.label or e.label not in picked:
                continue
            table = poset.restriction_table(e.label, c.label)
            if table[picked[e.label]] != k:
                return False
        return True

    def rec(idx: int, picked: dict[str, int]):
        if idx == n:
            found.append(dict(picked))
            return
        c = order[idx]
        for k in range(c.size):
            if consistent(c, k, picked):
                picked[c.label] = k
                rec(idx + 1, picked)
                del picked[c.label]

    rec(0, {})
    found.sort(key=lambda s: tuple(s[lab] for lab in poset.labels))
    return found


@dataclass(frozen=True)
class IrreducibleClosed:
    """An irreducible closed set with its generic point and structure report."""

    closed: BundleClosed
    generic: tuple[str, int]
    is_point_closure: bool
    structure: dict[str, bool] = field(hash=False)


def point_closure(
    poset: ContextPoset,
    variant: str,
    label: str,
    index: int,
) -> BundleClosed:
    fibers = {label: 1 << index}
    return closure(poset, variant, fibers)


def _all_point_closures(
    poset: ContextPoset,
    variant: str,
) -> dict[tuple[str, int], BundleClosed]:
    return {
        (c.label, k): point_closure(poset, variant, c.label, k)
        for c in poset
        for k in range(c.size)
    }


def _specialization_maximal_points(
    poset: ContextPoset,
    variant: str,
    closed: BundleClosed,
    closures: dict[tuple[str, int], BundleClosed] | None = None,
) -> list[tuple[str, int]]:
    """Points of the set whose point closure is maximal inside it."""
    pts = closed.points()
    if closures is None:
        closures = {pt: point_closure(poset, variant, *pt) for pt in pts}
    maximal = []
    for pt in pts:
        cl = closures[pt]
        dominated = False
        for other in pts:
            if other == pt:
                continue
            ocl = closures[other]
            if cl.leq(ocl) and cl != ocl:
                dominated = True
                break
            if cl.leq(ocl) and cl == ocl and other < pt:
                # identical closures: keep one canonical representative
                dominated = True
                break
        if not dominated:
            maximal.append(pt)
    return maximal


def irreducible_closed_sets(
    poset: ContextPoset,
    variant: str,
    cap: int = DEFAULT_ENUM_CAP,
) -> list[IrreducibleClosed]:
    """Every irreducible closed set of the variant, with annotations.

    Strategy: enumerate all closed sets (complements of opens) when the
    frame fits under the cap and keep those with exactly one specialization
    maximal point; in a finite space those are precisely the irreducible
    closed sets and each is the closure of its maximal point. If the frame
    is too large, fall back to the point closures themselves, deduplicated,
    which enumerate the same collection.
    """
    variant = _check_variant(variant)
    results: list[IrreducibleClosed] = []
    seen: set = set()
    closures = _all_point_closures(poset, variant)
    # precompute strict/canonical domination between points so the scan over
    # candidate closed sets only does set lookups
    dominators: dict[tuple[str, int], set] = {}
    for pt, cl in closures.items():
        doms = set()
        for other, ocl in closures.items():
            if other == pt:
                continue
            if cl.leq(ocl) and (cl != ocl or other < pt):
                doms.add(other)
        dominators[pt] = doms
    try:
        all_closed = [u.complement() for u in enumerate_opens(poset, variant, cap)]
    except TooLarge:
        all_closed = None
    if all_closed is not None:
        candidates = all_closed
    else:
        candidates = list(closures.values())
    for closed_set in candidates:
        if closed_set.is_empty() or closed_set in seen:
            continue
        pts = closed_set.points()
        pt_set = set(pts)
        maxima = [pt for pt in pts if not (dominators[pt] & pt_set)]
        if len(maxima) != 1:
            continue
        generic = maxima[0]
        if closures[generic] != closed_set:
            continue
        seen.add(closed_set)
        structure = _structure_report(poset, variant, closed_set, generic)
        results.append(
            IrreducibleClosed(
                closed=closed_set,
                generic=generic,
                is_point_closure=True,
                structure=structure,
            )
        )
    results.sort(key=lambda r: r.generic)
    return results


def _structure_report(
    poset: ContextPoset,
    variant: str,
    closed_set: BundleClosed,
    generic: tuple[str, int],
) -> dict[str, bool]:
    support = [c for c in poset if closed_set.fibers[c.label] != 0]
    support_idx = {poset.index_of(c) for c in support}
    if not _star_like(variant):
        singletons = all(
            _popcount(closed_set.fibers[c.label]) == 1 for c in support
        )
        down_closed = all(
            set(poset.down_indices(c)) <= support_idx for c in support
        )
        directed = _has_maximum(poset, support)
        return {
            "nonempty_fibers_are_singletons": singletons,
            "support_is_downward_closed": down_closed,
            "support_is_upward_directed": directed,
        }
    # star: unique minimal supporting context with a singleton fiber there,
    # and the set is the full extension orbit of that character
    minimal = [
        c for c in support
        if not any(
            i in support_idx and poset.contexts[i].label != c.label
            for i in poset.down_indices(c)
        )
    ]
    unique_min = len(minimal) == 1
    singleton_at_min = (
        unique_min
        and _popcount(closed_set.fibers[minimal[0].label]) == 1
    )
    orbit_ok = False
    if singleton_at_min:
        base = minimal[0]
        k = next(_bits(closed_set.fibers[base.label]))
        expected = point_closure(poset, variant, base.label, k)
        orbit_ok = expected == closed_set
    return {
        "unique_minimal_context": unique_min,
        "singleton_fiber_at_minimal": singleton_at_min,
        "equals_extension_orbit": orbit_ok,
    }


def _has_maximum(poset: ContextPoset, support: list[Context]) -> bool:
    for c in support:
        if all(poset.is_leq(d, c) for d in support):
            return True
    return False
