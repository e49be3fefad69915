"""Inner/outer approximation of projections and operators inside contexts."""

import numpy as np
import pytest

from qtopos import (
    COSTAR,
    CLOPEN_STAR,
    RealInterval,
    STAR,
    Character,
    DegenerateInterval,
    Interval,
    Projection,
    ScottBasic,
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
    antonymous_value,
    inf_embedding,
    observable_value,
    proj_leq,
    spectral_order_leq,
    spectrum,
    sup_embedding,
)
from qtopos.daseinisation import projection_join, projection_meet, \
    star_interval_discontinuity_witness
from qtopos.reference import (
    diag_context,
    golden_matrix,
    plus_projection,
    random_context,
    random_hermitian,
    random_projection,
    rng,
)

PHI = (1.0 + np.sqrt(5.0)) / 2.0


def brute_force_outer(p, c, tol):
    """Smallest lattice element of the context dominating p."""
    best = None
    for m in c.lattice_masks():
        q = c.projection_of_mask(m)
        if proj_leq(p, q, tol):
            if best is None or proj_leq(q, best, tol):
                best = q
    return best


def brute_force_inner(p, c, tol):
    best = None
    for m in c.lattice_masks():
        q = c.projection_of_mask(m)
        if proj_leq(q, p, tol):
            if best is None or proj_leq(best, q, tol):
                best = q
    return best


class TestProjectionApproximations:
    def test_match_brute_force_on_random_pairs(self, tol):
        gen = rng(20)
        for _ in range(30):
            dim = int(gen.integers(2, 4))
            c = random_context(gen, dim)
            p = random_projection(gen, dim)
            outer = das_outer_proj(p, c, tol)
            inner = das_inner_proj(p, c, tol)
            assert tol.matrix_close(outer.mat, brute_force_outer(p, c, tol).mat)
            assert tol.matrix_close(inner.mat, brute_force_inner(p, c, tol).mat)

    def test_masks_agree_with_projections(self, tol):
        gen = rng(21)
        c = random_context(gen, 3)
        p = random_projection(gen, 3)
        assert c.projection_of_mask(das_outer_mask(p, c, tol)).mat == pytest.approx(
            das_outer_proj(p, c, tol).mat
        )
        assert c.projection_of_mask(das_inner_mask(p, c, tol)).mat == pytest.approx(
            das_inner_proj(p, c, tol).mat
        )

    def test_members_are_fixed_points(self, tol):
        c = diag_context(3)
        p = c.projection_of_mask(0b101)
        assert tol.matrix_close(das_outer_proj(p, c, tol).mat, p.mat)
        assert tol.matrix_close(das_inner_proj(p, c, tol).mat, p.mat)

    def test_skew_line_collapses(self, tol):
        # the diagonal context sees nothing inside a tilted line and must
        # inflate it to the whole space
        c = diag_context(2)
        p = plus_projection()
        assert tol.matrix_zero(das_inner_proj(p, c, tol).mat)
        assert tol.matrix_close(das_outer_proj(p, c, tol).mat, np.eye(2))


class TestOperatorApproximations:
    def test_golden_matrix_at_diagonal_context(self, tol):
        a = golden_matrix()
        c = diag_context(2)
        outer = das_outer_sa(a, c, tol)
        inner = das_inner_sa(a, c, tol)
        assert np.allclose(outer.mat, PHI * np.eye(2), atol=1e-9)
        assert np.allclose(inner.mat, (1.0 - PHI) * np.eye(2), atol=1e-9)

    def test_member_operator_is_fixed(self, tol, z_op):
        c = diag_context(2)
        assert tol.matrix_close(das_outer_sa(z_op, c, tol).mat, z_op)
        assert tol.matrix_close(das_inner_sa(z_op, c, tol).mat, z_op)

    def test_sandwich_in_spectral_order(self, tol):
        gen = rng(22)
        for _ in range(20):
            dim = int(gen.integers(2, 4))
            c = random_context(gen, dim)
            a = random_hermitian(gen, dim)
            assert spectral_order_leq(das_inner_sa(a, c, tol), a, tol)
            assert spectral_order_leq(a, das_outer_sa(a, c, tol), tol)

    def test_approximations_degrade_toward_trivial(self, tol):
        from qtopos import trivial_context

        gen = rng(23)
        a = random_hermitian(gen, 3)
        c = random_context(gen, 3)
        triv = trivial_context(3)
        assert spectral_order_leq(
            das_inner_sa(a, triv, tol), das_inner_sa(a, c, tol), tol
        )
        assert spectral_order_leq(
            das_outer_sa(a, c, tol), das_outer_sa(a, triv, tol), tol
        )

    def test_trivial_context_gives_spectral_bounds(self, tol):
        from qtopos import trivial_context

        gen = rng(24)
        a = random_hermitian(gen, 3)
        vals = np.linalg.eigvalsh(a.mat)
        triv = trivial_context(3)
        iv = das_map(a, Character(triv, 0), tol)
        assert iv.lo == pytest.approx(vals.min(), abs=1e-9)
        assert iv.hi == pytest.approx(vals.max(), abs=1e-9)


class TestPointValues:
    def test_das_map_matches_threshold_scans(self, tol):
        gen = rng(25)
        for _ in range(15):
            dim = int(gen.integers(2, 4))
            c = random_context(gen, dim)
            a = random_hermitian(gen, dim)
            for ch in spectrum(c):
                iv = das_map(a, ch, tol)
                assert iv.lo == pytest.approx(antonymous_value(a, ch, tol), abs=1e-8)
                assert iv.hi == pytest.approx(observable_value(a, ch, tol), abs=1e-8)

    def test_interval_membership(self, tol):
        iv = Interval(0.0, 1.0)
        assert iv.contains(0.0, tol) and iv.contains(1.0, tol)
        assert not iv.contains(1.5, tol)
        with pytest.raises(DegenerateInterval):
            Interval(1.0, 0.0)

    def test_window_membership_is_strict(self, tol):
        w = ScottBasic(0.0, 2.0)
        assert w.member(Interval(0.5, 1.5), tol)
        assert not w.member(Interval(0.0, 1.0), tol)
        assert not w.member(Interval(0.5, 2.0), tol)
        with pytest.raises(DegenerateInterval):
            ScottBasic(1.0, 1.0)


class TestElementaryProps:
    def test_fixed_fibers_on_small_poset(self, p2, p2_labels, tol, z_op, e_char):
        diag, triv = p2_labels
        c = p2.get(diag)
        k1 = e_char(c, np.diag([1.0, 0.0]))
        for recipe in (elementary_prop_cov1, elementary_prop_cov2):
            u = recipe(z_op, ScottBasic(0.0, 2.0), p2, tol)
            assert u.variant == COSTAR
            assert u.fibers[diag] == 1 << k1
            assert u.fibers[triv] == 0

        s = elementary_prop_contra(z_op, RealInterval(0.0, 2.0), p2, tol)
        assert s.variant == CLOPEN_STAR
        assert s.fibers[diag] == 1 << k1
        assert s.fibers[triv] == 1

    def test_full_window_gives_top(self, p2, tol, z_op):
        u = elementary_prop_cov2(z_op, ScottBasic(-2.0, 2.0), p2, tol)
        assert all(u.fibers[c.label] == (1 << c.size) - 1 for c in p2)

    def test_strict_forms_agree_on_samples(self, tol):
        from qtopos.reference import random_poset, random_window

        gen = rng(26)
        for _ in range(10):
            po = random_poset(gen, 3, 2, include_trivial=True)
            a = random_hermitian(gen, 3)
            lo, hi = random_window(gen, a, tol)
            u1 = elementary_prop_cov1(a, ScottBasic(lo, hi), po, tol)
            u2 = elementary_prop_cov2(a, ScottBasic(lo, hi), po, tol)
            assert u1 == u2


class TestEmbeddings:
    def test_preserve_meet_and_join(self, diamond, tol):
        gen = rng(27)
        for _ in range(5):
            p = random_projection(gen, 3)
            q = random_projection(gen, 3)
            pm = projection_meet(p, q, tol)
            pj = projection_join(p, q, tol)
            assert inf_embedding(pm, diamond, tol) == inf_embedding(
                p, diamond, tol
            ).intersection(inf_embedding(q, diamond, tol))
            assert sup_embedding(pj, diamond, tol) == sup_embedding(
                p, diamond, tol
            ).union(sup_embedding(q, diamond, tol))

    def test_embedding_variants(self, p2, tol):
        p = Projection(np.diag([1.0, 0.0]))
        assert inf_embedding(p, p2, tol).variant == COSTAR
        assert sup_embedding(p, p2, tol).variant == STAR


class TestStarDiscontinuity:
    def test_witness_found_for_proper_window(self, p2, tol, z_op):
        hit = star_interval_discontinuity_witness(
            z_op, ScottBasic(0.0, 2.0), p2, tol
        )
        assert hit is not None
        label, k, coarser = hit
        iv_fine = das_map(z_op, Character(p2.get(label), k), tol)
        w = ScottBasic(0.0, 2.0)
        assert w.member(iv_fine, tol)
        iv_coarse = das_map(z_op, Character(p2.get(coarser), 0), tol)
        assert not w.member(iv_coarse, tol)

    def test_no_witness_for_spectrum_wide_window(self, p2, tol, z_op):
        assert star_interval_discontinuity_witness(
            z_op, ScottBasic(-2.0, 2.0), p2, tol
        ) is None
