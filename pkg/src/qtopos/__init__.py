"""Finite-dimensional quantum logic over posets of commutative contexts.

The package builds the poset of commutative subalgebras of a matrix
algebra, turns its character space into a bundle with two topologies,
exposes the Heyting structure of the resulting frames, approximates
operators and propositions inside contexts, and pairs states with
propositions to sieve- and cosieve-valued truth values. A command line
driver (qtopos) wraps the whole surface behind JSON files.
"""

from .bundle import (
    BundleClosed,
    BundleOpen,
    CLOPEN_STAR,
    COSTAR,
    Character,
    CoveringSubfunctor,
    STAR,
    VARIANTS,
    closure,
    covers,
    enumerate_opens,
    evaluate,
    global_sections,
    interior,
    irreducible_closed_sets,
    l_class,
    monotone_projection_maps,
    psi,
    psi_inverse,
    restrict_character,
    saturate,
    spectrum,
)
from .checks import CheckResult, RunConfig, run_suite
from .contexts import (
    Context,
    ContextPoset,
    Cosieve,
    Sieve,
    build_poset,
    context_from_operators,
    context_leq,
    context_meet,
    trivial_context,
)
from .daseinisation import (
    Interval,
    ScottBasic,
    antonymous_value,
    das_inner_mask,
    das_inner_proj,
    das_inner_sa,
    das_map,
    das_outer_mask,
    das_outer_proj,
    das_outer_sa,
    elementary_prop_contra,
    elementary_prop_cov1,
    elementary_prop_cov2,
    inf_embedding,
    observable_value,
    sup_embedding,
)
from .errors import (
    ApproachMismatch,
    ContextNotInPoset,
    DegenerateInterval,
    DimensionMismatch,
    FrameMismatch,
    Inconsistent,
    ModeMismatch,
    NonCommuting,
    NonCommutingGenerators,
    NotASubcontext,
    NotASubfunctor,
    NotCoveringClosed,
    NotHermitian,
    NotInContext,
    NotUnitVector,
    ParseError,
    PointNotInBundle,
    TooLarge,
    ToposError,
    Underdetermined,
    UnknownContext,
)
from .heyting import (
    Frame,
    FrameElement,
    RegularityReport,
    big_join,
    big_meet,
    embed_clopen,
    heyting_arrow,
    negation,
    regularity_report,
    well_inside,
)
from .operators import (
    HermitianOperator,
    Projection,
    RealInterval,
    SpectralResolution,
    Tolerance,
    commuting_lattice_ops,
    eigendecompose,
    loewner_leq,
    proj_leq,
    spectral_order_leq,
    spectral_projection,
    support_of_positive_part,
)
from .states import (
    ClopenMeasure,
    CovariantState,
    DensityState,
    MonotoneValuation,
    Mu0,
    TruthObject,
    TruthValue,
    canonical_measurements,
    cosieve_of,
    covariant_state_from_state,
    expectation,
    measure_from_state,
    mu0,
    pseudo_state_contra,
    pseudo_state_cov,
    reconstruct_state,
    restrict_measure,
    sieve_of,
    truth_object,
    truth_value_contra,
    truth_value_cov,
)

__version__ = "0.1.0"
