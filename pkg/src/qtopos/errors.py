"""Exception taxonomy shared by every module.

Each failure mode gets its own class so callers (and the command line driver,
which maps these onto exit codes) can react without matching message strings.
"""


class ToposError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(ToposError):
    """Matrix input deviates from its conjugate transpose beyond tolerance."""


class DimensionMismatch(ToposError):
    """Operands live on Hilbert spaces of different dimensions."""


class DegenerateInterval(ToposError):
    """Interval or window whose lower endpoint exceeds the upper one."""


class NonCommuting(ToposError):
    """Lattice operation requested for a non-commuting pair of projections."""


class NonCommutingGenerators(NonCommuting):
    """Context construction from generators that fail to commute pairwise."""


class NotASubcontext(ToposError):
    """Restriction requested along a pair not related by inclusion."""


class NotInContext(ToposError):
    """Operator is not a member of the named commutative context."""


class ContextNotInPoset(ToposError):
    """Context lookup failed against the ambient poset."""


class UnknownContext(ContextNotInPoset):
    """Context label from the command line matches nothing in the poset."""


class PointNotInBundle(ToposError):
    """Character reference does not denote a point of the bundle."""


class NotUnitVector(ToposError):
    """State vector whose norm is not 1 within tolerance."""


class NotASubfunctor(ToposError):
    """Class assignment is not monotone along context inclusion."""


class NotCoveringClosed(ToposError):
    """Class set at some context is not closed under the covering relation."""


class FrameMismatch(ToposError):
    """Frame operation across different posets or bundle variants."""


class ModeMismatch(ToposError):
    """Truth-value pairing invoked with an inconsistent operand combination."""


class ApproachMismatch(ModeMismatch):
    """Proposition variant does not fit the requested approach."""


class TooLarge(ToposError):
    """Enumeration or search would exceed the configured cap."""


class Underdetermined(ToposError):
    """Measure values do not pin down a unique density matrix."""


class Inconsistent(ToposError):
    """Measure values admit no PSD unit-trace solution within tolerance."""


class ParseError(ToposError):
    """Malformed JSON input."""
