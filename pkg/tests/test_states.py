"""States as valuations on opens, vector truth machinery, reconstruction."""

import numpy as np
import pytest

from qtopos import (
    BundleOpen,
    COSTAR,
    ClopenMeasure,
    CovariantState,
    DensityState,
    DimensionMismatch,
    FrameMismatch,
    Inconsistent,
    ModeMismatch,
    MonotoneValuation,
    NotUnitVector,
    Projection,
    RealInterval,
    STAR,
    ScottBasic,
    Tolerance,
    Underdetermined,
    canonical_measurements,
    cosieve_of,
    covariant_state_from_state,
    elementary_prop_contra,
    elementary_prop_cov2,
    enumerate_opens,
    expectation,
    measure_from_state,
    mu0,
    pseudo_state_contra,
    pseudo_state_cov,
    reconstruct_state,
    restrict_measure,
    sieve_of,
    spectral_projection,
    truth_object,
    truth_value_contra,
    truth_value_cov,
)
from qtopos.contexts import build_poset, context_from_operators
from qtopos.reference import golden_matrix, plus_projection, random_density, rng


@pytest.fixture(scope="module")
def e1_density(tol):
    return DensityState.from_vector([1.0, 0.0], tol)


@pytest.fixture(scope="module")
def narrow_prop(p2, tol, z_op):
    # spectral window (0, 2) of z picks out the first basis line
    return elementary_prop_contra(z_op, RealInterval(0.0, 2.0), p2, tol)


@pytest.fixture(scope="module")
def cov_prop(p2, tol, z_op):
    return elementary_prop_cov2(z_op, ScottBasic(0.0, 2.0), p2, tol)


@pytest.fixture(scope="module")
def tilted(tol):
    ctx = context_from_operators([plus_projection().mat], tol)
    return build_poset([ctx], include_trivial=True, tol=tol)


class TestExpectation:
    def test_basis_vector_reads_diagonal_entry(self, e1_density, tol):
        assert expectation(e1_density, np.diag([3.0, 7.0]), tol) == pytest.approx(3.0)
        assert expectation(e1_density, np.eye(2), tol) == pytest.approx(1.0)

    def test_maximally_mixed_state_averages(self, tol):
        half = DensityState(np.eye(2) / 2, tol)
        assert expectation(half, golden_matrix(), tol) == pytest.approx(0.5)

    def test_dimension_mismatch(self, e1_density, tol):
        with pytest.raises(DimensionMismatch):
            expectation(e1_density, np.eye(3), tol)

    def test_density_validation(self, tol):
        with pytest.raises(NotUnitVector, match="negative eigenvalue"):
            DensityState(np.diag([1.5, -0.5]), tol)
        with pytest.raises(NotUnitVector, match="trace"):
            DensityState(np.diag([0.5, 0.2]), tol)
        with pytest.raises(NotUnitVector, match="norm"):
            DensityState.from_vector([1.0, 1.0], tol)
        assert DensityState.from_vector([0.0, 1.0], tol).dim == 2


class TestValuations:
    def test_variant_gates(self, p2, tol, e1_density, narrow_prop, cov_prop):
        mu = measure_from_state(e1_density, p2, tol)
        nu = covariant_state_from_state(e1_density, p2, tol)
        with pytest.raises(FrameMismatch):
            mu.value(cov_prop, next(iter(p2)).label)
        with pytest.raises(FrameMismatch):
            nu.value(narrow_prop, next(iter(p2)).label)

    def test_star_valuation_reverses(self, p2, p2_labels, tol, narrow_prop):
        diag, triv = p2_labels
        rho = DensityState.from_vector([0.0, 1.0], tol)
        val = measure_from_state(rho, p2, tol).valuation(narrow_prop)
        assert val.direction == "order-reversing"
        assert val.value(diag) == pytest.approx(0.0, abs=1e-12)
        assert val.value(triv) == pytest.approx(1.0)

    def test_costar_valuation_preserves(self, p2, p2_labels, tol, e1_density, cov_prop):
        diag, triv = p2_labels
        val = covariant_state_from_state(e1_density, p2, tol).valuation(cov_prop)
        assert val.direction == "order-preserving"
        assert val.value(diag) == pytest.approx(1.0)
        assert val.value(triv) == pytest.approx(0.0, abs=1e-12)

    def test_restrict_measure_rereads_the_same_state(
        self, p2, p2_labels, tol, e1_density, cov_prop
    ):
        diag, _ = p2_labels
        mu = measure_from_state(e1_density, p2, tol)
        nu = restrict_measure(mu)
        assert isinstance(nu, CovariantState)
        direct = covariant_state_from_state(e1_density, p2, tol)
        assert nu.value(cov_prop, diag) == pytest.approx(direct.value(cov_prop, diag))

    def test_monotone_validation(self, p2, p2_labels):
        diag, triv = p2_labels
        with pytest.raises(ValueError, match="not order-preserving"):
            MonotoneValuation(p2, {diag: 0.0, triv: 1.0}, "order-preserving")
        with pytest.raises(ValueError, match="not order-reversing"):
            MonotoneValuation(p2, {diag: 1.0, triv: 0.0}, "order-reversing")
        with pytest.raises(ValueError, match="outside"):
            MonotoneValuation(p2, {diag: 2.0, triv: 1.0}, "order-reversing")
        with pytest.raises(ValueError, match="unknown direction"):
            MonotoneValuation(p2, {diag: 1.0, triv: 1.0}, "sideways")

    def test_random_states_induce_valid_valuations(self, p2, tol):
        gen = rng(23)
        states = [DensityState(random_density(gen, 2), tol) for _ in range(4)]
        star_opens = list(enumerate_opens(p2, STAR, 4096))
        costar_opens = list(enumerate_opens(p2, COSTAR, 4096))
        for state in states:
            mu = measure_from_state(state, p2, tol)
            nu = covariant_state_from_state(state, p2, tol)
            for u in star_opens:
                mu.valuation(u)
            for u in costar_opens:
                nu.valuation(u)


class TestVectorTruth:
    def test_certain_masks_for_basis_vector(self, p2, p2_labels, tol, e_char):
        diag, triv = p2_labels
        c = p2.get(diag)
        m1 = 1 << e_char(c, np.diag([1.0, 0.0]))
        full = c.lattice_masks().stop - 1
        tobj = truth_object([1.0, 0.0], p2, tol)
        assert tobj.masks[diag] == frozenset({m1, full})
        assert tobj.masks[triv] == frozenset({1})
        assert tobj.holds(diag, m1) and not tobj.holds(diag, full ^ m1)

    def test_pseudo_state_fibers(self, p2, p2_labels, tol, e_char):
        diag, triv = p2_labels
        m1 = 1 << e_char(p2.get(diag), np.diag([1.0, 0.0]))
        w_contra = pseudo_state_contra([1.0, 0.0], p2, tol)
        w_cov = pseudo_state_cov([1.0, 0.0], p2, tol)
        assert w_contra.variant != COSTAR and w_cov.variant == COSTAR
        assert w_contra.fibers == {diag: m1, triv: 1}
        # no projection in the trivial context sits under a basis line
        assert w_cov.fibers == {diag: m1, triv: 0}

    def test_pseudo_state_fibers_are_certain(self, p2, tol, e1_density):
        w = pseudo_state_contra([1.0, 0.0], p2, tol)
        for c in p2:
            p = c.projection_of_mask(w.fibers[c.label])
            assert expectation(e1_density, p, tol) == pytest.approx(1.0)


class TestContravariantTruth:
    def test_certain_projection_is_totally_true(self, p2, p2_labels, tol, z_op):
        diag, triv = p2_labels
        tobj = truth_object([1.0, 0.0], p2, tol)
        p = spectral_projection(z_op, RealInterval(0.0, 2.0), tol)
        tv = truth_value_contra(tobj, p, diag, p2, tol)
        assert tv.kind == "sieve" and tv.is_total
        assert tv.sorted_members() == (diag, triv) or tv.sorted_members() == (
            triv,
            diag,
        )

    def test_orthogonal_projection_holds_only_coarsely(self, p2, p2_labels, tol):
        diag, triv = p2_labels
        tobj = truth_object([1.0, 0.0], p2, tol)
        e2 = Projection(np.diag([0.0, 1.0]), Tolerance.coerce(None))
        tv = truth_value_contra(tobj, e2, diag, p2, tol)
        assert tv.members == frozenset({triv}) and not tv.is_total
        zero = Projection(np.zeros((2, 2)), Tolerance.coerce(None))
        assert not truth_value_contra(tobj, zero, diag, p2, tol).members

    def test_inclusion_mode(self, p2, p2_labels, tol, z_op, narrow_prop):
        diag, triv = p2_labels
        wide = elementary_prop_contra(z_op, RealInterval(-2.0, 2.0), p2, tol)
        assert truth_value_contra(narrow_prop, wide, diag, p2, tol).is_total
        tv = truth_value_contra(wide, narrow_prop, diag, p2, tol)
        assert tv.members == frozenset({triv})

    def test_mode_and_frame_gates(self, p2, p2_labels, tol, narrow_prop, cov_prop, tilted, z_op):
        diag, _ = p2_labels
        with pytest.raises(ModeMismatch, match="star-like opens"):
            truth_value_contra(cov_prop, cov_prop, diag, p2, tol)
        tobj = truth_object([1.0, 0.0], p2, tol)
        with pytest.raises(ModeMismatch, match="expected"):
            truth_value_contra(tobj, narrow_prop, diag, p2, tol)
        foreign = elementary_prop_contra(z_op, RealInterval(0.0, 2.0), tilted, tol)
        with pytest.raises(FrameMismatch, match="different poset"):
            truth_value_contra(foreign, foreign, diag, p2, tol)


class TestCovariantTruth:
    def test_partial_truth_from_coarse_base(
        self, p2, p2_labels, tol, e1_density, cov_prop
    ):
        diag, triv = p2_labels
        nu = covariant_state_from_state(e1_density, p2, tol)
        tv = truth_value_cov(nu, cov_prop, triv, p2, tol)
        assert tv.kind == "cosieve" and not tv.is_total
        assert tv.members == frozenset({diag})
        assert truth_value_cov(nu, cov_prop, diag, p2, tol).is_total

    def test_star_open_rejected(self, p2, p2_labels, tol, e1_density, narrow_prop):
        _, triv = p2_labels
        nu = covariant_state_from_state(e1_density, p2, tol)
        with pytest.raises(FrameMismatch, match="costar"):
            truth_value_cov(nu, narrow_prop, triv, p2, tol)

    def test_sieve_cosieve_extractors(
        self, p2, p2_labels, tol, e1_density, cov_prop, narrow_prop
    ):
        diag, triv = p2_labels
        nu = covariant_state_from_state(e1_density, p2, tol)
        tv_cov = truth_value_cov(nu, cov_prop, triv, p2, tol)
        assert cosieve_of(tv_cov, p2).members == frozenset({diag})
        tv_sieve = truth_value_contra(narrow_prop, narrow_prop, diag, p2, tol)
        assert sieve_of(tv_sieve, p2).base == diag
        with pytest.raises(ModeMismatch):
            sieve_of(tv_cov, p2)
        with pytest.raises(ModeMismatch):
            cosieve_of(tv_sieve, p2)


class TestZeroOneValuation:
    def test_full_open_certain_everywhere(self, p2, tilted, tol):
        for poset in (p2, tilted):
            val = mu0([1.0, 0.0], poset, tol)
            full = BundleOpen.full(poset, COSTAR)
            assert all(val.value(full, c.label) == 1 for c in poset)

    def test_empty_open_needs_a_witnessing_stage(self, p2, p2_labels, tilted, tol):
        # over the tilted poset no refinement contains the basis line, so
        # the empty open is vacuously certain there; over p2 the diagonal
        # context witnesses the line and kills the empty open
        diag, _ = p2_labels
        plus_label = next(c for c in tilted if not c.is_trivial()).label
        empty_tilted = BundleOpen.empty(tilted, COSTAR)
        assert mu0([1.0, 0.0], tilted, tol).value(empty_tilted, plus_label) == 1
        empty_p2 = BundleOpen.empty(p2, COSTAR)
        assert mu0([1.0, 0.0], p2, tol).value(empty_p2, diag) == 0

    def test_matches_inclusion_of_pseudo_state(self, p2, tol):
        val = mu0([1.0, 0.0], p2, tol)
        w_cov = pseudo_state_cov([1.0, 0.0], p2, tol)
        for u in enumerate_opens(p2, COSTAR, 4096):
            for base in p2.labels:
                c0 = p2.get(base)
                for j in p2.up_indices(c0):
                    d = p2.contexts[j]
                    finer = [p2.contexts[k] for k in p2.up_indices(d)]
                    lhs = all(val.value(u, e.label) == 1 for e in finer)
                    rhs = all(
                        w_cov.fibers[e.label] & ~u.fibers[e.label] == 0
                        for e in finer
                    )
                    assert lhs == rhs

    def test_star_open_rejected(self, p2, p2_labels, tol, narrow_prop):
        diag, _ = p2_labels
        with pytest.raises(FrameMismatch):
            mu0([1.0, 0.0], p2, tol).value(narrow_prop, diag)


class TestReconstruction:
    def test_round_trip_on_projection_rich_poset(self, rich3, tol):
        gen = rng(11)
        for _ in range(5):
            state = DensityState(random_density(gen, rich3.dim), tol)
            nu = covariant_state_from_state(state, rich3, tol)
            back = reconstruct_state(canonical_measurements(nu, rich3, tol), rich3, tol)
            assert float(np.max(np.abs(back.op.mat - state.op.mat))) < 1e-6

    def test_underdetermined_on_two_contexts(self, p2, tol, e1_density):
        nu = covariant_state_from_state(e1_density, p2, tol)
        with pytest.raises(Underdetermined, match="span 2 of 4"):
            reconstruct_state(canonical_measurements(nu, p2, tol), p2, tol)

    def test_inconsistent_duplicate(self, p2, p2_labels, tol, e_char):
        diag, _ = p2_labels
        m1 = 1 << e_char(p2.get(diag), np.diag([1.0, 0.0]))
        data = [((diag, m1), 1.0), ((diag, m1), 0.0)]
        with pytest.raises(Inconsistent, match="previously"):
            reconstruct_state(data, p2, tol)

    def test_inconsistent_corrupted_data(self, rich3, tol):
        gen = rng(12)
        state = DensityState(random_density(gen, rich3.dim), tol)
        nu = covariant_state_from_state(state, rich3, tol)
        data = list(canonical_measurements(nu, rich3, tol))
        idx = next(i for i, (_, v) in enumerate(data) if 0.1 < v < 0.9)
        key, value = data[idx]
        data[idx] = (key, value + 0.3 if value < 0.5 else value - 0.3)
        with pytest.raises(Inconsistent):
            reconstruct_state(data, rich3, tol)

    def test_canonical_measurements_are_honest(self, rich3, tol):
        gen = rng(13)
        state = DensityState(random_density(gen, rich3.dim), tol)
        nu = covariant_state_from_state(state, rich3, tol)
        data = list(canonical_measurements(nu, rich3, tol))
        count = sum(c.lattice_masks().stop - 1 for c in rich3)
        assert len(data) == count
        for (label, mask), value in data:
            assert mask != 0
            p = rich3.get(label).projection_of_mask(mask)
            assert value == pytest.approx(expectation(state, p, tol))
