"""Heyting algebra structure on the open sets of a spectral bundle.

Opens of either bundle topology form a complete Heyting algebra: meets and
joins are fiberwise, and the relative pseudocomplement is computed as the
interior of the pointwise material implication. The module also provides
negation, the well-inside relation, and a regularity scan that reports the
first element not recovered as the join of the elements well inside it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bundle import (
    BundleOpen,
    DEFAULT_ENUM_CAP,
    enumerate_opens,
    interior,
    _full_mask,
)
from .contexts import ContextPoset
from .errors import FrameMismatch


class Frame:
    """The complete Heyting algebra of opens for one poset and variant."""

    __slots__ = ("poset", "variant")

    def __init__(self, poset: ContextPoset, variant: str):
        self.poset = poset
        self.variant = variant
        # construct top once to validate the variant tag early
        BundleOpen.full(poset, variant)

    @property
    def key(self):
        return (self.poset.key, self.variant)

    def element(self, opened: BundleOpen) -> "FrameElement":
        return FrameElement(opened, self)

    @property
    def bottom(self) -> "FrameElement":
        return FrameElement(BundleOpen.empty(self.poset, self.variant), self)

    @property
    def top(self) -> "FrameElement":
        return FrameElement(BundleOpen.full(self.poset, self.variant), self)

    def elements(self, cap: int = DEFAULT_ENUM_CAP):
        for u in enumerate_opens(self.poset, self.variant, cap):
            yield FrameElement(u, self)

    def __eq__(self, other) -> bool:
        return isinstance(other, Frame) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


@dataclass(frozen=True)
class FrameElement:
    """One open set viewed as an element of its frame."""

    open: BundleOpen
    frame: Frame

    def __post_init__(self) -> None:
        if (
            self.open.poset.key != self.frame.poset.key
            or self.open.variant != self.frame.variant
        ):
            raise FrameMismatch("open does not belong to this frame")

    def _check(self, other: "FrameElement") -> None:
        if self.frame != other.frame:
            raise FrameMismatch("elements belong to different frames")

    def meet(self, other: "FrameElement") -> "FrameElement":
        self._check(other)
        return FrameElement(self.open.intersection(other.open), self.frame)

    def join(self, other: "FrameElement") -> "FrameElement":
        self._check(other)
        return FrameElement(self.open.union(other.open), self.frame)

    def leq(self, other: "FrameElement") -> bool:
        self._check(other)
        return self.open.leq(other.open)

    def arrow(self, other: "FrameElement") -> "FrameElement":
        self._check(other)
        return FrameElement(
            heyting_arrow(self.open, other.open), self.frame
        )

    def negation(self) -> "FrameElement":
        return FrameElement(negation(self.open), self.frame)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FrameElement)
            and self.frame == other.frame
            and self.open == other.open
        )

    def __hash__(self) -> int:
        return hash((self.frame, self.open))


def big_join(frame: Frame, elements) -> FrameElement:
    """Join of an arbitrary finite family; empty family gives bottom."""
    acc = frame.bottom
    for el in elements:
        acc = acc.join(el)
    return acc


def big_meet(frame: Frame, elements) -> FrameElement:
    """Meet of an arbitrary finite family; empty family gives top."""
    acc = frame.top
    for el in elements:
        acc = acc.meet(el)
    return acc


def heyting_arrow(u: BundleOpen, v: BundleOpen) -> BundleOpen:
    """Relative pseudocomplement u -> v: largest open w with w & u <= v.

    Computed as the interior of the pointwise implication (~u | v); the
    defining adjunction w <= (u -> v) iff w & u <= v is property tested
    rather than assumed.
    """
    u._same_frame(v)
    poset = u.poset
    fibers = {
        c.label: (
            (_full_mask(c.size) & ~u.fibers[c.label]) | v.fibers[c.label]
        )
        for c in poset
    }
    return interior(poset, u.variant, fibers)


def negation(u: BundleOpen) -> BundleOpen:
    """Pseudocomplement: arrow into the empty open."""
    return heyting_arrow(u, BundleOpen.empty(u.poset, u.variant))


def well_inside(u: BundleOpen, v: BundleOpen) -> bool:
    """u is well inside v when ~u joined with v already covers everything."""
    u._same_frame(v)
    return negation(u).union(v).is_full()


@dataclass(frozen=True)
class RegularityReport:
    """Outcome of scanning a frame for regularity."""

    regular: bool
    checked: int
    witness: BundleOpen | None

    def __bool__(self) -> bool:
        return self.regular


def regularity_report(frame: Frame, cap: int = DEFAULT_ENUM_CAP) -> RegularityReport:
    """Check x = join of all y well inside x, for every open x.

    Returns the first failing x as the witness, scanning opens in a fixed
    deterministic order (total size, then fiber data).
    """
    opens = sorted(
        enumerate_opens(frame.poset, frame.variant, cap),
        key=lambda u: (
            u.total_size(),
            tuple(u.fibers[lab] for lab in frame.poset.labels),
        ),
    )
    checked = 0
    for x in opens:
        acc = BundleOpen.empty(frame.poset, frame.variant)
        for y in opens:
            if well_inside(y, x):
                acc = acc.union(y)
        checked += 1
        if acc != x:
            return RegularityReport(regular=False, checked=checked, witness=x)
    return RegularityReport(regular=True, checked=checked, witness=None)


def embed_clopen(u: BundleOpen) -> BundleOpen:
    """Canonical inclusion of clopen subobjects into the star frame."""
    from .bundle import CLOPEN_STAR, STAR

    if u.variant != CLOPEN_STAR:
        raise FrameMismatch("embedding expects a clopen-star open")
    return u.retag(STAR)
