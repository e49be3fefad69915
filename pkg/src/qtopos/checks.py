"""Executable law suites behind the check subcommand.

Each suite re-derives a family of structural facts about the finite
machinery at desk scale: order and spectral laws of Hermitian matrices,
Heyting structure of the two bundle topologies, approximation laws,
valuation and truth-value laws, and section searches. Every law reports
one named pass/fail result; randomness is seeded through the config so a
repeated run produces an identical report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import (
    COSTAR,
    STAR,
    BundleOpen,
    Character,
    covering_subfunctor_from_masks,
    covers,
    enumerate_opens,
    global_sections,
    irreducible_closed_sets,
    monotone_projection_maps,
    psi,
    psi_inverse,
    saturate,
)
from .contexts import build_poset, context_from_operators
from .daseinisation import (
    ScottBasic,
    antonymous_value,
    das_inner_mask,
    das_inner_proj,
    das_inner_sa,
    das_map,
    das_outer_mask,
    das_outer_proj,
    das_outer_sa,
    elementary_prop_cov1,
    elementary_prop_cov2,
    inf_embedding,
    observable_value,
    star_interval_discontinuity_witness,
    sup_embedding,
)
from .errors import Underdetermined
from .heyting import Frame, heyting_arrow, negation, regularity_report
from .operators import (
    HermitianOperator,
    Projection,
    RealInterval,
    Tolerance,
    commuting_lattice_ops,
    commuting_max,
    eigendecompose,
    loewner_leq,
    proj_leq,
    spectral_order_leq,
    spectral_projection,
    support_of_positive_part,
)
from .reference import (
    basis_state,
    diag_context,
    diamond_poset,
    golden_matrix,
    loewner_pair,
    plus_projection,
    projection_rich_poset,
    random_context,
    random_density,
    random_hermitian,
    random_poset,
    random_projection,
    random_unit_vector,
    random_window,
    rng,
    two_context_poset,
    uncolorable_poset,
)
from .states import (
    DensityState,
    canonical_measurements,
    covariant_state_from_state,
    expectation,
    measure_from_state,
    mu0,
    pseudo_state_contra,
    pseudo_state_cov,
    reconstruct_state,
    truth_object,
    truth_value_contra,
    truth_value_cov,
)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named law: pass/fail plus a short diagnostic."""

    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by every suite; defaults match the command line."""

    tol: float | None = None
    include_trivial: bool | None = None
    seed: int = 7
    cap: int = 4096

    def tolerance(self) -> Tolerance:
        return Tolerance.coerce(self.tol)


class _Suite:
    """Collects law results, converting exceptions into failures."""

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.results: list[CheckResult] = []

    def law(self, name: str, fn) -> None:
        full = f"{self.prefix}.{name}"
        try:
            detail = fn()
        except Exception as exc:  # a crash inside a law is a failed law
            self.results.append(
                CheckResult(full, False, f"{type(exc).__name__}: {exc}")
            )
            return
        if detail is None:
            self.results.append(CheckResult(full, True, ""))
        elif isinstance(detail, str):
            self.results.append(CheckResult(full, True, detail))
        else:
            passed, text = detail
            self.results.append(CheckResult(full, bool(passed), text))


def _fail(message: str):
    return False, message


def projection_meet_any(p, q, tol=None) -> Projection:
    """Largest projection under both arguments; intersection of ranges."""
    t = Tolerance.coerce(tol)
    dim = p.mat.shape[0]
    gaps = HermitianOperator(
        (np.eye(dim) - p.mat) + (np.eye(dim) - q.mat), t
    )
    return Projection(np.eye(dim) - support_of_positive_part(gaps, t).mat, t)


def projection_join_any(p, q, tol=None) -> Projection:
    """Smallest projection over both arguments; span of ranges."""
    t = Tolerance.coerce(tol)
    return support_of_positive_part(HermitianOperator(p.mat + q.mat, t), t)


# ----------------------------------------------------------------------
# kernel: matrix orders, spectral calculus, projection lattices


def check_kernel(config: RunConfig) -> list[CheckResult]:
    t = config.tolerance()
    gen = rng(config.seed)
    suite = _Suite("kernel")

    def eigen_reconstruction():
        for _ in range(20):
            dim = int(gen.integers(2, 5))
            a = random_hermitian(gen, dim)
            res = eigendecompose(a, t)
            if not t.matrix_close(res.reconstruct().mat, a.mat):
                return _fail(f"reconstruction off for dim {dim}")
            if not t.matrix_close(res.steps[-1].mat, np.eye(dim)):
                return _fail("eigenprojections do not resolve the identity")
            projs = res.eigenprojections
            for i, p in enumerate(projs):
                for q in projs[i + 1:]:
                    if not t.matrix_close(p.mat @ q.mat, np.zeros((dim, dim))):
                        return _fail("eigenprojections not orthogonal")
            if list(res.thresholds) != sorted(res.thresholds):
                return _fail("thresholds not ascending")
        return "20 random operators, dims 2-4"

    suite.law("eigendecomposition-reconstructs-the-operator", eigen_reconstruction)

    def spectral_partition():
        for _ in range(15):
            dim = int(gen.integers(2, 5))
            a = random_hermitian(gen, dim)
            cut = float(gen.normal())
            low = spectral_projection(
                a, RealInterval(-np.inf, cut, hi_open=False), t
            )
            high = spectral_projection(a, RealInterval(cut, np.inf), t)
            if not t.matrix_close(low.mat + high.mat, np.eye(dim)):
                return _fail(f"windows at cut {cut:.3f} do not tile the line")
        return "15 random cuts"

    suite.law("spectral-projections-tile-the-line", spectral_partition)

    def projection_order_agreement():
        comparable = 0
        for _ in range(30):
            dim = int(gen.integers(2, 4))
            if gen.integers(2):
                p = random_projection(gen, dim)
                q = random_projection(gen, dim)
            else:
                # nested pair from one context so the order holds sometimes
                c = random_context(gen, dim)
                big = int(gen.integers(1, c.lattice_masks().stop))
                small = big & int(gen.integers(c.lattice_masks().stop))
                p = c.projection_of_mask(small)
                q = c.projection_of_mask(big)
            order = proj_leq(p, q, t)
            absorption = t.matrix_close(q.mat @ p.mat, p.mat)
            if order != absorption:
                return _fail("order disagrees with multiplicative absorption")
            if order != loewner_leq(p, q, t):
                return _fail("order disagrees with the semidefinite order")
            if order != spectral_order_leq(p, q, t):
                return _fail("order disagrees with the threshold order")
            comparable += order
        return f"30 pairs, {comparable} comparable"

    suite.law("projection-order-has-three-equal-faces", projection_order_agreement)

    def commuting_orders_agree():
        for _ in range(20):
            dim = int(gen.integers(2, 5))
            c = random_context(gen, dim)
            lo = gen.normal(size=c.size)
            if gen.integers(2):
                hi = lo + gen.uniform(0.0, 1.0, c.size)
            else:
                hi = gen.normal(size=c.size)
            a = c.member_from_coefficients(lo)
            b = c.member_from_coefficients(hi)
            expect = all(t.leq(float(x), float(y)) for x, y in zip(lo, hi))
            if spectral_order_leq(a, b, t) != expect:
                return _fail("threshold order misses a coefficient comparison")
            if loewner_leq(a, b, t) != expect:
                return _fail("semidefinite order misses a coefficient comparison")
        return "20 commuting pairs"

    suite.law("orders-coincide-on-commuting-pairs", commuting_orders_agree)

    def fixed_join_escape():
        a = golden_matrix()
        b1, b2 = loewner_pair()
        if not (loewner_leq(b1, a, t) and loewner_leq(b2, a, t)):
            return _fail("fixed lower bounds are not below the target")
        join = commuting_max(b1, b2, t)
        if not t.matrix_close(join.mat, np.diag([-0.25, 0.0])):
            return _fail(f"join is {np.diag(join.mat)} not diag(-1/4, 0)")
        w = np.array([-1j, 1j])
        val = float(np.real(w.conj() @ (a.mat - join.mat) @ w))
        if abs(val - (-0.75)) > 1e-9:
            return _fail(f"witness pairing {val} differs from -0.75")
        if loewner_leq(join, a, t):
            return _fail("join unexpectedly stayed below the target")
        return "witness pairing -0.75, join escapes"

    suite.law("commuting-join-escapes-the-semidefinite-order", fixed_join_escape)

    def lattice_ops_are_mask_ops():
        for _ in range(20):
            dim = int(gen.integers(2, 5))
            c = random_context(gen, dim)
            m1 = int(gen.integers(c.lattice_masks().stop))
            m2 = int(gen.integers(c.lattice_masks().stop))
            p = c.projection_of_mask(m1)
            q = c.projection_of_mask(m2)
            meet, join = commuting_lattice_ops(p, q, t)
            if not t.matrix_close(meet.mat, c.projection_of_mask(m1 & m2).mat):
                return _fail("meet is not the common refinement")
            if not t.matrix_close(join.mat, c.projection_of_mask(m1 | m2).mat):
                return _fail("join is not the spanned sum")
        return "20 pairs inside random contexts"

    suite.law("lattice-operations-match-mask-operations", lattice_ops_are_mask_ops)

    def positive_support():
        for _ in range(15):
            dim = int(gen.integers(2, 5))
            a = random_hermitian(gen, dim)
            p = support_of_positive_part(a, t)
            q = spectral_projection(a, RealInterval(0.0, np.inf), t)
            if not t.matrix_close(p.mat, q.mat):
                return _fail("support differs from the strictly positive window")
        return "15 random operators"

    suite.law("positive-support-is-the-strict-upper-window", positive_support)

    return suite.results


# ----------------------------------------------------------------------
# frames: Heyting structure of both bundle topologies


def _sample_pairs(gen, opens, count):
    n = len(opens)
    for _ in range(count):
        yield opens[int(gen.integers(n))], opens[int(gen.integers(n))]


def _sample_triples(gen, opens, count):
    n = len(opens)
    for _ in range(count):
        yield (
            opens[int(gen.integers(n))],
            opens[int(gen.integers(n))],
            opens[int(gen.integers(n))],
        )


def check_frames(config: RunConfig) -> list[CheckResult]:
    t = config.tolerance()
    gen = rng(config.seed)
    suite = _Suite("frames")

    small = two_context_poset(t)
    diamond = diamond_poset(t)
    small_opens = {
        variant: list(enumerate_opens(small, variant, config.cap))
        for variant in (STAR, COSTAR)
    }
    diamond_costar = list(enumerate_opens(diamond, COSTAR, config.cap))

    def closure_under_ops():
        for variant in (STAR, COSTAR):
            for u in small_opens[variant]:
                for v in small_opens[variant]:
                    BundleOpen(small, variant, dict(u.union(v).fibers))
                    BundleOpen(small, variant, dict(u.intersection(v).fibers))
        for u, v in _sample_pairs(gen, diamond_costar, 120):
            BundleOpen(diamond, COSTAR, dict(u.union(v).fibers))
            BundleOpen(diamond, COSTAR, dict(u.intersection(v).fibers))
        return "exhaustive on the 2-context poset, sampled on the diamond"

    suite.law("opens-close-under-union-and-intersection", closure_under_ops)

    def residuation():
        for variant in (STAR, COSTAR):
            opens = small_opens[variant]
            for u in opens:
                for v in opens:
                    arrow = heyting_arrow(u, v)
                    for w in opens:
                        if w.intersection(u).leq(v) != w.leq(arrow):
                            return _fail(
                                f"adjunction breaks in the {variant} frame"
                            )
        for u, v, w in _sample_triples(gen, diamond_costar, 300):
            arrow = heyting_arrow(u, v)
            if w.intersection(u).leq(v) != w.leq(arrow):
                return _fail("adjunction breaks on the diamond")
        return "250 exhaustive triples plus 300 sampled"

    suite.law("arrow-satisfies-residuation", residuation)

    def negation_is_arrow_to_bottom():
        for variant in (STAR, COSTAR):
            empty = BundleOpen.empty(small, variant)
            for u in small_opens[variant]:
                if negation(u) != heyting_arrow(u, empty):
                    return _fail("negation differs from arrow into bottom")
        return None

    suite.law("negation-is-arrow-into-bottom", negation_is_arrow_to_bottom)

    def double_negation():
        sampled = [u for u, _ in _sample_pairs(gen, diamond_costar, 60)]
        for u in small_opens[STAR] + small_opens[COSTAR] + sampled:
            nn = negation(negation(u))
            if not u.leq(nn):
                return _fail("double negation is not inflationary")
            if negation(nn) != negation(u):
                return _fail("triple negation differs from single")
        return None

    suite.law("double-negation-inflates-and-stabilizes", double_negation)

    def negation_collapse():
        posets = [small, diamond, random_poset(gen, 2, 3, include_trivial=True)]
        for po in posets:
            if po.bottom() is None:
                return _fail("fixture poset lost its coarsest context")
            top = BundleOpen.full(po, STAR)
            for u in enumerate_opens(po, STAR, config.cap):
                n = negation(u)
                if any(u.fibers.values()):
                    if any(n.fibers.values()):
                        return _fail("nonempty open has nonempty negation")
                elif n != top:
                    return _fail("negation of bottom is not the top")
        return f"{len(posets)} refinement-directed frames"

    suite.law("negation-collapses-over-a-coarsest-context", negation_collapse)

    def regularity_fixtures():
        with_trivial = regularity_report(Frame(small, STAR), config.cap)
        if with_trivial.regular or with_trivial.witness is None:
            return _fail("frame over the full poset wrongly reported regular")
        alone = build_poset([diag_context(2)], include_trivial=False, tol=t)
        without = regularity_report(Frame(alone, STAR), config.cap)
        if not without.regular or without.witness is not None:
            return _fail("discrete single-context frame wrongly irregular")
        antichain = build_poset(
            [random_context(gen, 2) for _ in range(3)],
            include_trivial=False,
            tol=t,
        )
        spread = regularity_report(Frame(antichain, STAR), config.cap)
        if not spread.regular:
            return _fail("antichain frame wrongly irregular")
        return (
            f"irregular with a witness after {with_trivial.checked} opens; "
            "regular once the coarsest context is dropped"
        )

    suite.law("regularity-splits-on-the-coarsest-context", regularity_fixtures)

    def clopen_embedding():
        for _ in range(10):
            p = random_projection(gen, 2)
            q = random_projection(gen, 2)
            u = sup_embedding(p, small, t)
            v = sup_embedding(q, small, t)
            eu, ev = u.retag(STAR), v.retag(STAR)
            if eu.union(ev).fibers != u.union(v).fibers:
                return _fail("embedding does not commute with union")
            if eu.intersection(ev).fibers != u.intersection(v).fibers:
                return _fail("embedding does not commute with intersection")
            if eu.leq(ev) != u.leq(v):
                return _fail("embedding does not preserve order")
        return "10 embedded pairs"

    suite.law("clopen-embedding-preserves-the-lattice", clopen_embedding)

    def covering_is_support_inclusion():
        from .bundle import l_class

        for _ in range(25):
            dim = int(gen.integers(2, 5))
            c = random_context(gen, dim)
            stop = c.lattice_masks().stop
            target = c.projection_of_mask(int(gen.integers(stop)))
            masks = [
                int(gen.integers(stop)) for _ in range(int(gen.integers(0, 4)))
            ]
            members = [l_class(c.projection_of_mask(m), c, t) for m in masks]
            joined = 0
            for m in masks:
                joined |= m
            expected = c.mask_of_projection(target, t) & ~joined == 0
            if covers(target, members, c, t) != expected:
                return _fail("covering disagrees with support inclusion")
        return "25 random families"

    suite.law("covering-matches-support-inclusion", covering_is_support_inclusion)

    def covering_selections_round_trip():
        for po in (small, diamond):
            for u in enumerate_opens(po, COSTAR, config.cap):
                sub = psi_inverse(u)
                if psi(po, sub, t) != u:
                    return _fail("selection of an open does not map back")
        return "all costar opens on both fixture posets"

    suite.law("covering-selections-round-trip", covering_selections_round_trip)

    def comparison_bijection():
        for po in (small, diamond):
            opens = {
                tuple(sorted(u.fibers.items()))
                for u in enumerate_opens(po, COSTAR, config.cap)
            }
            images = set()
            maps = monotone_projection_maps(po, config.cap, t)
            for choice in maps:
                masks = {
                    label: po.get(label).mask_of_projection(p, t)
                    for label, p in choice.items()
                }
                u = psi(po, covering_subfunctor_from_masks(po, masks), t)
                images.add(tuple(sorted(u.fibers.items())))
            if images != opens or len(maps) != len(opens):
                return _fail(f"{len(maps)} selections against {len(opens)} opens")
        return "bijective on both fixture posets"

    suite.law("comparison-map-is-a-bijection", comparison_bijection)

    def comparison_transports_lattice_ops():
        subs = [
            psi_inverse(u) for u in enumerate_opens(small, COSTAR, config.cap)
        ]
        for s1 in subs:
            for s2 in subs:
                meet = covering_subfunctor_from_masks(
                    small, {k: s1.tops[k] & s2.tops[k] for k in s1.tops}
                )
                join = covering_subfunctor_from_masks(
                    small, {k: s1.tops[k] | s2.tops[k] for k in s1.tops}
                )
                u1, u2 = psi(small, s1, t), psi(small, s2, t)
                if psi(small, meet, t) != u1.intersection(u2):
                    return _fail("meet does not transport")
                if psi(small, join, t) != u1.union(u2):
                    return _fail("join does not transport")
        return f"all {len(subs)}^2 pairs"

    suite.law(
        "comparison-map-transports-lattice-operations",
        comparison_transports_lattice_ops,
    )

    def sober_at_small_scale():
        for po in (small, diamond):
            points = sum(c.size for c in po)
            for variant in (STAR, COSTAR):
                irr = irreducible_closed_sets(po, variant, config.cap)
                if len(irr) != points:
                    return _fail(f"{len(irr)} irreducibles over {points} points")
                if len({item.generic for item in irr}) != len(irr):
                    return _fail("generic points repeat")
                for item in irr:
                    if not item.is_point_closure:
                        return _fail("irreducible set is not a point closure")
                    if not all(item.structure.values()):
                        return _fail(f"structure flags {item.structure}")
        return "both fixture posets, both variants"

    suite.law("irreducibles-are-unique-point-closures", sober_at_small_scale)

    return suite.results


# ----------------------------------------------------------------------
# daseinisation: approximation laws


def _boundary_oracle(a, c, k, t) -> tuple[float, float]:
    """Interval endpoints at one character from raw spectral data.

    Lower endpoint: the largest eigenvalue r such that the character's block
    is orthogonal to all spectral mass strictly below r. Upper endpoint: the
    smallest eigenvalue s such that the block sits inside the spectral mass
    up to s. Computed from eigenprojections alone, independently of the
    approximation routines.
    """
    op = a if isinstance(a, HermitianOperator) else HermitianOperator(a, t)
    res = eigendecompose(op, t)
    dim = op.mat.shape[0]
    block = c.projection_of_mask(1 << k)
    lo = res.thresholds[0]
    for r in res.thresholds:
        below = spectral_projection(
            op, RealInterval(-np.inf, r, hi_open=True), t
        )
        comp = Projection(np.eye(dim) - below.mat, t)
        if proj_leq(block, comp, t):
            lo = r
    hi = res.thresholds[-1]
    for s in reversed(res.thresholds):
        upto = spectral_projection(
            op, RealInterval(-np.inf, s, hi_open=False), t
        )
        if proj_leq(block, upto, t):
            hi = s
    return float(lo), float(hi)


def _closed_window_open(a, lo, hi, poset, t) -> BundleOpen:
    """Costar open of points whose value interval sits inside [lo, hi]."""
    fibers = {}
    for c in poset:
        mask = 0
        for k in range(c.size):
            iv = das_map(a, Character(c, k), t)
            if t.geq(iv.lo, lo) and t.leq(iv.hi, hi):
                mask |= 1 << k
        fibers[c.label] = mask
    return BundleOpen(poset, COSTAR, fibers)


def check_daseinisation(config: RunConfig) -> list[CheckResult]:
    t = config.tolerance()
    gen = rng(config.seed)
    suite = _Suite("daseinisation")

    def best_bounds():
        for _ in range(40):
            dim = int(gen.integers(2, 4))
            c = random_context(gen, dim)
            p = random_projection(gen, dim)
            outer = das_outer_mask(p, c, t)
            inner = das_inner_mask(p, c, t)
            if not t.matrix_close(
                das_outer_proj(p, c, t).mat, c.projection_of_mask(outer).mat
            ) or not t.matrix_close(
                das_inner_proj(p, c, t).mat, c.projection_of_mask(inner).mat
            ):
                return _fail("mask and projection forms disagree")
            above = [
                m for m in c.lattice_masks()
                if loewner_leq(p, c.projection_of_mask(m), t)
            ]
            below = [
                m for m in c.lattice_masks()
                if loewner_leq(c.projection_of_mask(m), p, t)
            ]
            if outer not in above or any(outer & ~m for m in above):
                return _fail("outer approximation is not the least bound")
            if inner not in below or any(m & ~inner for m in below):
                return _fail("inner approximation is not the greatest bound")
        return "40 random pairs against brute force"

    suite.law("approximations-are-lattice-best-bounds", best_bounds)

    def sandwich():
        for _ in range(30):
            dim = int(gen.integers(2, 5))
            c = random_context(gen, dim)
            a = random_hermitian(gen, dim)
            if not spectral_order_leq(das_inner_sa(a, c, t), a, t):
                return _fail("inner approximation escapes upward")
            if not spectral_order_leq(a, das_outer_sa(a, c, t), t):
                return _fail("outer approximation escapes downward")
        return "30 random operators"

    suite.law("approximations-sandwich-the-operator", sandwich)

    def members_fixed():
        for _ in range(15):
            dim = int(gen.integers(2, 5))
            c = random_context(gen, dim)
            a = c.member_from_coefficients(gen.normal(size=c.size))
            if not t.matrix_close(das_inner_sa(a, c, t).mat, a.mat):
                return _fail("member moved under inner approximation")
            if not t.matrix_close(das_outer_sa(a, c, t).mat, a.mat):
                return _fail("member moved under outer approximation")
        return "15 member operators"

    suite.law("members-are-approximation-fixed-points", members_fixed)

    def antitone_along_coarsening():
        for _ in range(8):
            dim = int(gen.integers(2, 4))
            po = random_poset(gen, dim, 2, include_trivial=True)
            a = random_hermitian(gen, dim)
            for c in po:
                for i in po.down_indices(c):
                    d = po.contexts[i]
                    if not spectral_order_leq(
                        das_outer_sa(a, c, t), das_outer_sa(a, d, t), t
                    ):
                        return _fail("outer approximation improved downward")
                    if not spectral_order_leq(
                        das_inner_sa(a, d, t), das_inner_sa(a, c, t), t
                    ):
                        return _fail("inner approximation degraded upward")
        return "8 random posets"

    suite.law("approximations-degrade-along-coarsening", antitone_along_coarsening)

    def boundary_functions():
        for _ in range(10):
            dim = int(gen.integers(2, 4))
            po = random_poset(gen, dim, 2, include_trivial=True)
            a = random_hermitian(gen, dim)
            for c in po:
                for k in range(c.size):
                    ch = Character(c, k)
                    iv = das_map(a, ch, t)
                    lo, hi = _boundary_oracle(a, c, k, t)
                    if abs(iv.lo - lo) > 1e-8 or abs(iv.hi - hi) > 1e-8:
                        return _fail(
                            f"interval [{iv.lo}, {iv.hi}] against oracle "
                            f"[{lo}, {hi}]"
                        )
                    if abs(antonymous_value(a, ch, t) - lo) > 1e-8:
                        return _fail("lower boundary function disagrees")
                    if abs(observable_value(a, ch, t) - hi) > 1e-8:
                        return _fail("upper boundary function disagrees")
        return "10 random posets, every bundle point"

    suite.law("point-values-match-the-spectral-oracle", boundary_functions)

    def golden_values():
        phi = (1 + np.sqrt(5)) / 2
        a = golden_matrix()
        cz = diag_context(2)
        if not t.matrix_close(das_outer_sa(a, cz, t).mat, phi * np.eye(2)):
            return _fail("outer value at the diagonal context is off")
        if not t.matrix_close(
            das_inner_sa(a, cz, t).mat, (1 - np.sqrt(5)) / 2 * np.eye(2)
        ):
            return _fail("inner value at the diagonal context is off")
        for k in range(2):
            iv = das_map(a, Character(cz, k), t)
            if abs(iv.lo - (1 - np.sqrt(5)) / 2) > 1e-6 or abs(iv.hi - phi) > 1e-6:
                return _fail("value interval misses the golden pair")
        plus = plus_projection()
        if not t.matrix_close(das_outer_proj(plus, cz, t).mat, np.eye(2)):
            return _fail("outer approximation of the tilted line is not full")
        if not t.matrix_close(das_inner_proj(plus, cz, t).mat, np.zeros((2, 2))):
            return _fail("inner approximation of the tilted line is not zero")
        return "golden-ratio interval and tilted-line collapse"

    suite.law("fixed-two-dimensional-values", golden_values)

    def strict_window_forms_coincide():
        for _ in range(25):
            po = random_poset(gen, 3, 2, include_trivial=True)
            a = random_hermitian(gen, 3)
            lo, hi = random_window(gen, a, t)
            u1 = elementary_prop_cov1(a, ScottBasic(lo, hi), po, t)
            u2 = elementary_prop_cov2(a, ScottBasic(lo, hi), po, t)
            if not u1.leq(u2):
                return _fail("first form escapes the second")
            if u1 != u2:
                return _fail("forms differ on a finite spectrum")
        return "25 random windows"

    suite.law("strict-window-forms-coincide", strict_window_forms_coincide)

    def closed_window_converse():
        for _ in range(25):
            po = random_poset(gen, 3, 2, include_trivial=True)
            a = random_hermitian(gen, 3)
            lo, hi = random_window(gen, a, t)
            u2 = elementary_prop_cov2(a, ScottBasic(lo, hi), po, t)
            if not u2.leq(_closed_window_open(a, lo, hi, po, t)):
                return _fail("strict form escapes the closed form")
        po = two_context_poset(t)
        a = np.diag([1.0, 0.0])
        u2 = elementary_prop_cov2(a, ScottBasic(0.0, 2.0), po, t)
        closed = _closed_window_open(a, 0.0, 2.0, po, t)
        if not (u2.leq(closed) and u2 != closed):
            return _fail("scaled projection fails to separate the forms")
        return "25 random windows plus the scaled-projection witness"

    suite.law(
        "closed-window-form-strictly-contains-the-strict-form",
        closed_window_converse,
    )

    def embeddings_preserve_structure():
        po = diamond_poset(t)
        for _ in range(10):
            p = random_projection(gen, 3)
            q = random_projection(gen, 3)
            pm = projection_meet_any(p, q, t)
            pj = projection_join_any(p, q, t)
            if inf_embedding(pm, po, t) != inf_embedding(p, po, t).intersection(
                inf_embedding(q, po, t)
            ):
                return _fail("inner embedding misses a meet")
            if sup_embedding(pj, po, t) != sup_embedding(p, po, t).union(
                sup_embedding(q, po, t)
            ):
                return _fail("outer embedding misses a join")
        return "10 random projection pairs"

    suite.law("embeddings-preserve-meets-and-joins", embeddings_preserve_structure)

    def join_escape_at_coarse_contexts():
        po = two_context_poset(t)
        e1 = Projection(np.diag([1.0, 0.0]), t)
        e2 = Projection(np.diag([0.0, 1.0]), t)
        pointwise = inf_embedding(e1, po, t).union(inf_embedding(e2, po, t))
        total = inf_embedding(projection_join_any(e1, e2, t), po, t)
        triv = next(c.label for c in po if c.is_trivial())
        if not (pointwise.leq(total) and pointwise != total):
            return _fail("no gap between pointwise and total joins")
        if pointwise.fibers[triv] != 0 or total.fibers[triv] == 0:
            return _fail("gap is not at the coarsest context")
        return None

    suite.law(
        "inner-embedding-drops-joins-at-coarse-contexts",
        join_escape_at_coarse_contexts,
    )

    def restriction_instability():
        po = two_context_poset(t)
        z = np.diag([1.0, -1.0])
        witness = star_interval_discontinuity_witness(
            z, ScottBasic(0.0, 2.0), po, t
        )
        if witness is None:
            return _fail("no witness for a window cutting the spectrum")
        wide = star_interval_discontinuity_witness(
            z, ScottBasic(-2.0, 2.0), po, t
        )
        if wide is not None:
            return _fail("witness appeared for a window holding the spectrum")
        return f"witness {witness}"

    suite.law(
        "window-membership-is-not-restriction-stable", restriction_instability
    )

    return suite.results


# ----------------------------------------------------------------------
# pairing: valuations, measures, truth values


def check_pairing(config: RunConfig) -> list[CheckResult]:
    t = config.tolerance()
    gen = rng(config.seed)
    suite = _Suite("pairing")

    small = two_context_poset(t)
    diamond = diamond_poset(t)

    def valuation_laws():
        for po in (small, diamond):
            opens = list(enumerate_opens(po, COSTAR, config.cap))
            rho = DensityState(random_density(gen, po.dim).mat, t)
            mu = covariant_state_from_state(rho, po, t)
            full = BundleOpen.full(po, COSTAR)
            empty = BundleOpen.empty(po, COSTAR)
            for c in po:
                if not t.close(mu.value(full, c.label), 1.0):
                    return _fail("full open not certain")
                if not t.close(mu.value(empty, c.label), 0.0):
                    return _fail("empty open not null")
            pairs = (
                [(u, v) for u in opens for v in opens]
                if po is small
                else list(_sample_pairs(gen, opens, 150))
            )
            for u, v in pairs:
                for c in po:
                    a = mu.value(u, c.label)
                    b = mu.value(v, c.label)
                    if u.leq(v) and not t.leq(a, b):
                        return _fail("valuation not monotone in the open")
                    rhs = mu.value(u.intersection(v), c.label) + mu.value(
                        u.union(v), c.label
                    )
                    if abs(a + b - rhs) > 1e-9:
                        return _fail("valuation not modular")
            for u in opens[: min(len(opens), 40)]:
                for c in po:
                    for j in po.up_indices(c):
                        finer = po.contexts[j].label
                        if not t.leq(mu.value(u, c.label), mu.value(u, finer)):
                            return _fail("valuation not monotone in the context")
        return "both fixture posets"

    suite.law("state-valuations-obey-the-valuation-laws", valuation_laws)

    def measure_laws():
        rho = DensityState(random_density(gen, 2).mat, t)
        mu = measure_from_state(rho, small, t)
        opens = list(enumerate_opens(small, STAR, config.cap))
        for u in opens:
            for v in opens:
                for c in small:
                    lhs = mu.value(u, c.label) + mu.value(v, c.label)
                    rhs = mu.value(u.intersection(v), c.label) + mu.value(
                        u.union(v), c.label
                    )
                    if abs(lhs - rhs) > 1e-9:
                        return _fail("measure not modular")
                    if u.fibers[c.label] == v.fibers[c.label] and abs(
                        mu.value(u, c.label) - mu.value(v, c.label)
                    ) > 1e-12:
                        return _fail("measure depends on remote fibers")
        return "all star opens of the 2-context poset"

    suite.law("measures-are-modular-and-local", measure_laws)

    def valuation_maximum():
        for _ in range(10):
            po = random_poset(gen, int(gen.integers(2, 4)), 2)
            rho = DensityState(random_density(gen, po.dim).mat, t)
            mu = covariant_state_from_state(rho, po, t)
            fibers = {
                c.label: int(gen.integers(c.lattice_masks().stop)) for c in po
            }
            u = saturate(po, COSTAR, fibers)
            for c in po:
                val = mu.value(u, c.label)
                best = max(
                    expectation(rho, c.projection_of_mask(m), t)
                    for m in c.lattice_masks()
                    if m & ~u.fibers[c.label] == 0
                )
                if abs(val - best) > 1e-9:
                    return _fail("fiber value is not the attained maximum")
        return "10 random saturated opens"

    suite.law(
        "fiber-projections-attain-the-valuation-maximum", valuation_maximum
    )

    def measure_truth_extends_pairing():
        for po in (small, diamond):
            for _ in range(6):
                psi_vec = random_unit_vector(gen, po.dim)
                p = random_projection(gen, po.dim)
                s = sup_embedding(p, po, t)
                mu = measure_from_state(DensityState.from_vector(psi_vec, t), po, t)
                tobj = truth_object(psi_vec, po, t)
                for base in po.labels:
                    tv = truth_value_contra(tobj, p, base, po, t)
                    members = set()
                    for i in po.down_indices(po.get(base)):
                        d = po.contexts[i]
                        if all(
                            t.close(mu.value(s, po.contexts[j].label), 1.0)
                            for j in po.down_indices(d)
                        ):
                            members.add(d.label)
                    if members != set(tv.members):
                        return _fail("measure sieve differs from pairing sieve")
        return "both fixture posets, 6 instances each"

    suite.law("measure-truth-extends-vector-pairing", measure_truth_extends_pairing)

    def two_modes_coincide():
        for po in (small, diamond):
            for _ in range(6):
                psi_vec = random_unit_vector(gen, po.dim)
                p = random_projection(gen, po.dim)
                tobj = truth_object(psi_vec, po, t)
                w = pseudo_state_contra(psi_vec, po, t)
                s = sup_embedding(p, po, t)
                for base in po.labels:
                    via_membership = truth_value_contra(tobj, p, base, po, t)
                    via_inclusion = truth_value_contra(w, s, base, po, t)
                    if via_membership.members != via_inclusion.members:
                        return _fail("membership and inclusion sieves differ")
        return "both fixture posets, 6 instances each"

    suite.law("membership-and-inclusion-sieves-coincide", two_modes_coincide)

    def window_certainty_inner_form():
        for _ in range(12):
            dim = int(gen.integers(2, 4))
            po = random_poset(gen, dim, 2, include_trivial=True)
            rho = DensityState(random_density(gen, dim).mat, t)
            a = random_hermitian(gen, dim)
            lo, hi = random_window(gen, a, t)
            u2 = elementary_prop_cov2(a, ScottBasic(lo, hi), po, t)
            mu = covariant_state_from_state(rho, po, t)
            chi = spectral_projection(a, RealInterval(lo, hi), t)
            for c in po:
                in_cosieve = (
                    c.label in truth_value_cov(mu, u2, c.label, po, t).members
                )
                pointwise = t.close(
                    expectation(rho, das_inner_proj(chi, c, t), t), 1.0
                )
                if in_cosieve != pointwise:
                    return _fail("certainty differs from the inner form")
        return "12 random instances"

    suite.law(
        "window-certainty-equals-inner-spectral-certainty",
        window_certainty_inner_form,
    )

    def certainty_forces_expectations():
        hits = 0
        for _ in range(12):
            dim = int(gen.integers(2, 4))
            po = random_poset(gen, dim, 2, include_trivial=True)
            rho = DensityState(random_density(gen, dim).mat, t)
            a = random_hermitian(gen, dim)
            lo, hi = random_window(gen, a, t)
            u1 = elementary_prop_cov1(a, ScottBasic(lo, hi), po, t)
            mu = covariant_state_from_state(rho, po, t)
            for c in po:
                if c.label not in truth_value_cov(mu, u1, c.label, po, t).members:
                    continue
                hits += 1
                for value in (
                    expectation(rho, das_inner_sa(a, c, t), t),
                    expectation(rho, das_outer_sa(a, c, t), t),
                ):
                    if not (t.geq(value, lo) and t.leq(value, hi)):
                        return _fail("boundary expectation escapes the window")
        return f"{hits} certain stages observed"

    suite.law(
        "window-certainty-forces-boundary-expectations",
        certainty_forces_expectations,
    )

    def certainty_support_form():
        for _ in range(12):
            dim = int(gen.integers(2, 4))
            po = random_poset(gen, dim, 2, include_trivial=True)
            rho = DensityState(random_density(gen, dim).mat, t)
            a = random_hermitian(gen, dim)
            lo, hi = random_window(gen, a, t)
            u1 = elementary_prop_cov1(a, ScottBasic(lo, hi), po, t)
            mu = covariant_state_from_state(rho, po, t)
            for c in po:
                in_cosieve = (
                    c.label in truth_value_cov(mu, u1, c.label, po, t).members
                )
                above = spectral_projection(
                    das_inner_sa(a, c, t), RealInterval(lo, np.inf), t
                )
                below = spectral_projection(
                    das_outer_sa(a, c, t), RealInterval(-np.inf, hi), t
                )
                support = t.close(expectation(rho, above, t), 1.0) and t.close(
                    expectation(rho, below, t), 1.0
                )
                if in_cosieve != support:
                    return _fail("certainty differs from the support form")
        return "12 random instances"

    suite.law("window-certainty-equals-support-certainty", certainty_support_form)

    def window_forms_share_truth():
        for _ in range(10):
            dim = int(gen.integers(2, 4))
            po = random_poset(gen, dim, 2, include_trivial=True)
            rho = DensityState(random_density(gen, dim).mat, t)
            a = random_hermitian(gen, dim)
            lo, hi = random_window(gen, a, t)
            mu = covariant_state_from_state(rho, po, t)
            u1 = elementary_prop_cov1(a, ScottBasic(lo, hi), po, t)
            u2 = elementary_prop_cov2(a, ScottBasic(lo, hi), po, t)
            for base in po.labels:
                tv1 = truth_value_cov(mu, u1, base, po, t)
                tv2 = truth_value_cov(mu, u2, base, po, t)
                if tv1.members != tv2.members:
                    return _fail("the two window forms disagree")
        return "10 random instances, every base"

    suite.law("both-window-forms-share-cosieve-truth", window_forms_share_truth)

    def covariant_forces_contravariant():
        seen = 0
        for _ in range(20):
            dim = int(gen.integers(2, 4))
            po = random_poset(gen, dim, 2, include_trivial=True)
            psi_vec = random_unit_vector(gen, dim)
            rho = DensityState.from_vector(psi_vec, t)
            a = random_hermitian(gen, dim)
            lo, hi = random_window(gen, a, t)
            u2 = elementary_prop_cov2(a, ScottBasic(lo, hi), po, t)
            mu = covariant_state_from_state(rho, po, t)
            if not any(
                c.label in truth_value_cov(mu, u2, c.label, po, t).members
                for c in po
            ):
                continue
            seen += 1
            chi = spectral_projection(a, RealInterval(lo, hi), t)
            tobj = truth_object(psi_vec, po, t)
            for base in po.labels:
                if not truth_value_contra(tobj, chi, base, po, t).is_total:
                    return _fail("contravariant truth is not total")
        return f"{seen} instances with a certain stage"

    suite.law(
        "covariant-certainty-forces-total-contravariant-truth",
        covariant_forces_contravariant,
    )

    def fixed_vector_fixtures():
        psi_vec = basis_state(2, 0)
        cz = next(c for c in small if not c.is_trivial())
        triv = next(c for c in small if c.is_trivial())
        e1 = Projection(np.diag([1.0, 0.0]), t)
        tobj = truth_object(psi_vec, small, t)
        m1 = cz.mask_of_projection(e1, t)
        full = cz.lattice_masks().stop - 1
        if tobj.masks[cz.label] != frozenset({m1, full}):
            return _fail("truth object misses the certain masks")
        if tobj.masks[triv.label] != frozenset({1}):
            return _fail("truth object at the coarsest context is off")
        w = pseudo_state_contra(psi_vec, small, t)
        if w.fibers[cz.label] != m1 or w.fibers[triv.label] != 1:
            return _fail("minimal certain proposition has wrong fibers")
        if not truth_value_contra(tobj, e1, cz.label, small, t).is_total:
            return _fail("certain projection is not totally true")
        e2 = Projection(np.diag([0.0, 1.0]), t)
        coarse_only = truth_value_contra(tobj, e2, cz.label, small, t).members
        if coarse_only != frozenset({triv.label}):
            return _fail("orthogonal projection should hold only coarsely")
        zero = Projection(np.zeros((2, 2)), t)
        if truth_value_contra(tobj, zero, cz.label, small, t).members:
            return _fail("zero projection acquired a stage")
        return None

    suite.law("fixed-vector-truth-fixtures", fixed_vector_fixtures)

    def zero_one_valuation_matches_inclusion():
        plus_ctx = context_from_operators([plus_projection().mat], t)
        tilted = build_poset([plus_ctx], include_trivial=True, tol=t)
        for po in (small, tilted):
            psi_vec = basis_state(2, 0)
            val = mu0(psi_vec, po, t)
            w_cov = pseudo_state_cov(psi_vec, po, t)
            for u in enumerate_opens(po, COSTAR, config.cap):
                for base in po.labels:
                    c0 = po.get(base)
                    lhs = set()
                    rhs = set()
                    for j in po.up_indices(c0):
                        d = po.contexts[j]
                        finer = [po.contexts[k] for k in po.up_indices(d)]
                        if all(val.value(u, e.label) == 1 for e in finer):
                            lhs.add(d.label)
                        if all(
                            w_cov.fibers[e.label] & ~u.fibers[e.label] == 0
                            for e in finer
                        ):
                            rhs.add(d.label)
                    if lhs != rhs:
                        return _fail("valuation truth differs from inclusion")
        return "all costar opens over both fixtures"

    suite.law(
        "zero-one-valuation-matches-inclusion-truth",
        zero_one_valuation_matches_inclusion,
    )

    def zero_one_valuation_laws():
        plus_ctx = context_from_operators([plus_projection().mat], t)
        tilted = build_poset([plus_ctx], include_trivial=True, tol=t)
        psi_vec = basis_state(2, 0)
        for po in (small, tilted):
            val = mu0(psi_vec, po, t)
            opens = list(enumerate_opens(po, COSTAR, config.cap))
            for u in opens:
                for v in opens:
                    for c in po:
                        if u.leq(v) and val.value(u, c.label) > val.value(
                            v, c.label
                        ):
                            return _fail("valuation not monotone")
                        lhs = val.value(u, c.label) + val.value(v, c.label)
                        rhs = val.value(
                            u.intersection(v), c.label
                        ) + val.value(u.union(v), c.label)
                        if lhs != rhs:
                            return _fail("valuation not modular")
            full = BundleOpen.full(po, COSTAR)
            if any(val.value(full, c.label) != 1 for c in po):
                return _fail("full open not certain")
        val = mu0(psi_vec, tilted, t)
        plus_label = next(c for c in tilted if not c.is_trivial()).label
        if val.value(BundleOpen.empty(tilted, COSTAR), plus_label) != 1:
            return _fail("empty open evaluated to 0 with no witnessing stage")
        small_val = mu0(psi_vec, small, t)
        if small_val.value(BundleOpen.empty(small, COSTAR), small.labels[0]) != 0:
            return _fail("empty open certain despite a witnessing stage")
        return "empty-open failure pinned to the tilted fixture"

    suite.law(
        "zero-one-valuation-laws-and-empty-open-failure", zero_one_valuation_laws
    )

    def reconstruction_round_trip():
        po = projection_rich_poset(t)
        for _ in range(3):
            rho = DensityState(random_density(gen, 3).mat, t)
            mu = covariant_state_from_state(rho, po, t)
            back = reconstruct_state(canonical_measurements(mu, po, t), po, t)
            if not np.allclose(back.op.mat, rho.op.mat, atol=1e-6):
                return _fail("reconstruction drifted beyond 1e-6")
        rho = DensityState(random_density(gen, 2).mat, t)
        mu = covariant_state_from_state(rho, small, t)
        try:
            reconstruct_state(canonical_measurements(mu, small, t), small, t)
        except Underdetermined as exc:
            return f"recovered 3 states; 2-context poset: {exc}"
        return _fail("underdetermined poset produced a state")

    suite.law(
        "reconstruction-inverts-restriction-when-spanning",
        reconstruction_round_trip,
    )

    def orthogonal_additivity():
        for _ in range(10):
            dim = int(gen.integers(2, 5))
            po = random_poset(gen, dim, 2)
            rho = DensityState(random_density(gen, dim).mat, t)
            c = po.contexts[int(gen.integers(len(po)))]
            stop = c.lattice_masks().stop
            m1 = int(gen.integers(stop))
            m2 = int(gen.integers(stop)) & ~m1
            total = expectation(rho, c.projection_of_mask(m1), t) + expectation(
                rho, c.projection_of_mask(m2), t
            )
            joint = expectation(rho, c.projection_of_mask(m1 | m2), t)
            if abs(total - joint) > 1e-9:
                return _fail("expectation not additive on orthogonal pairs")
        return "10 random orthogonal pairs"

    suite.law(
        "expectation-adds-over-orthogonal-projections", orthogonal_additivity
    )

    return suite.results


# ----------------------------------------------------------------------
# ks: global section searches


def check_ks(config: RunConfig) -> list[CheckResult]:
    t = config.tolerance()
    gen = rng(config.seed)
    suite = _Suite("ks")

    def two_context_sections():
        secs = global_sections(two_context_poset(t), config.cap)
        if len(secs) != 2:
            return _fail(f"{len(secs)} sections, expected 2")
        return "2 sections, one per character of the maximal context"

    suite.law("two-context-poset-has-two-sections", two_context_sections)

    def diamond_sections():
        secs = global_sections(diamond_poset(t), config.cap)
        if len(secs) != 5:
            return _fail(f"{len(secs)} sections, expected 5")
        return "5 sections"

    suite.law("diamond-poset-has-five-sections", diamond_sections)

    def single_context_sections():
        for _ in range(5):
            dim = int(gen.integers(2, 5))
            c = random_context(gen, dim)
            po = build_poset([c], include_trivial=False, tol=t)
            if len(global_sections(po, config.cap)) != c.size:
                return _fail("sections differ from the character count")
        return "5 random single-context posets"

    suite.law(
        "single-context-posets-have-one-section-per-character",
        single_context_sections,
    )

    def sections_restrict_consistently():
        for po in (two_context_poset(t), diamond_poset(t)):
            for sec in global_sections(po, config.cap):
                for c in po:
                    for i in po.down_indices(c):
                        d = po.contexts[i]
                        table = po.restriction_table(c.label, d.label)
                        if table[sec[c.label]] != sec[d.label]:
                            return _fail("section breaks along a restriction")
        return None

    suite.law("sections-restrict-consistently", sections_restrict_consistently)

    def uncolorable_fixture():
        po = uncolorable_poset(t)
        if len(po) != 27:
            return _fail(f"{len(po)} contexts, expected 27")
        secs = global_sections(po, config.cap)
        if secs:
            return _fail(f"{len(secs)} sections on the uncolorable family")
        return "27 contexts, 0 global sections"

    suite.law("eighteen-vector-fixture-admits-no-section", uncolorable_fixture)

    return suite.results


# ----------------------------------------------------------------------
# dispatch

SUITES = {
    "kernel": check_kernel,
    "frames": check_frames,
    "daseinisation": check_daseinisation,
    "pairing": check_pairing,
    "ks": check_ks,
}

SUITE_ORDER = ("kernel", "frames", "daseinisation", "pairing", "ks")


def run_suite(name: str, config: RunConfig | None = None) -> list[CheckResult]:
    """Run one suite, or all of them in declaration order."""
    config = config or RunConfig()
    if name == "all":
        results: list[CheckResult] = []
        for key in SUITE_ORDER:
            results.extend(SUITES[key](config))
        return results
    if name not in SUITES:
        raise ValueError(
            f"unknown suite {name!r}; choose from "
            f"{', '.join((*SUITE_ORDER, 'all'))}"
        )
    return SUITES[name](config)
