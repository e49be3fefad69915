"""Heyting structure of bundle frames: arrows, negation, regularity."""

import pytest

from qtopos import (
    BundleOpen,
    CLOPEN_STAR,
    COSTAR,
    Frame,
    FrameMismatch,
    STAR,
    big_join,
    big_meet,
    embed_clopen,
    enumerate_opens,
    heyting_arrow,
    interior,
    negation,
    regularity_report,
    well_inside,
)
from qtopos.bundle import _full_mask
from qtopos.reference import diag_context, random_poset, rng, two_context_poset
from qtopos.contexts import build_poset


def opens_of(poset, variant, cap=100000):
    return list(enumerate_opens(poset, variant, cap))


class TestFrameElements:
    def test_bottom_top_and_partial_order(self, p2):
        fr = Frame(p2, STAR)
        bot, top = fr.bottom, fr.top
        assert bot.leq(top)
        assert bot.meet(top) == bot
        assert bot.join(top) == top

    def test_cross_frame_operations_rejected(self, p2, diamond):
        f1 = Frame(p2, STAR)
        f2 = Frame(p2, COSTAR)
        with pytest.raises(FrameMismatch):
            f1.bottom.meet(f2.bottom)
        f3 = Frame(diamond, STAR)
        with pytest.raises(FrameMismatch):
            f1.top.join(f3.top)

    def test_big_join_and_meet(self, p2):
        fr = Frame(p2, COSTAR)
        elems = list(fr.elements(4096))
        assert big_join(fr, elems) == fr.top
        assert big_meet(fr, elems) == fr.bottom
        assert big_join(fr, []) == fr.bottom
        assert big_meet(fr, []) == fr.top


class TestResiduation:
    @pytest.mark.parametrize("variant", [STAR, COSTAR])
    def test_arrow_is_exact_residual_exhaustively(self, p2, variant):
        # c <= (a -> b) iff c & a <= b, for every triple of opens
        opens = opens_of(p2, variant)
        for a in opens:
            for b in opens:
                arrow = heyting_arrow(a, b)
                for c in opens:
                    lhs = c.leq(arrow)
                    rhs = c.intersection(a).leq(b)
                    assert lhs == rhs

    def test_arrow_is_interior_of_material_implication(self, p2):
        # pointwise complement-union, then interior, is the same arrow
        for variant in (STAR, COSTAR):
            opens = opens_of(p2, variant)
            for a in opens:
                for b in opens:
                    pointwise = {
                        c.label: (_full_mask(c.size) & ~a.fibers[c.label])
                        | b.fibers[c.label]
                        for c in p2.contexts
                    }
                    assert heyting_arrow(a, b) == interior(p2, variant, pointwise)

    def test_sampled_residuation_on_diamond(self, diamond):
        gen = rng(13)
        opens = opens_of(diamond, COSTAR)
        idx = gen.integers(0, len(opens), size=(60, 3))
        for i, j, k in idx:
            a, b, c = opens[int(i)], opens[int(j)], opens[int(k)]
            assert c.leq(heyting_arrow(a, b)) == c.intersection(a).leq(b)


class TestNegation:
    def test_negation_is_arrow_to_bottom(self, p2):
        for variant in (STAR, COSTAR):
            bot = BundleOpen.empty(p2, variant)
            for u in opens_of(p2, variant):
                assert negation(u) == heyting_arrow(u, bot)

    def test_double_negation_inflates(self, diamond):
        for u in opens_of(diamond, STAR):
            assert u.leq(negation(negation(u)))

    def test_star_negation_collapses_over_trivial_context(self, p2):
        bot = BundleOpen.empty(p2, STAR)
        top = BundleOpen.full(p2, STAR)
        for u in opens_of(p2, STAR):
            if u != bot:
                assert negation(u) == bot
                assert negation(negation(u)) == top


class TestWellInside:
    @pytest.mark.parametrize("variant", [STAR, COSTAR])
    def test_matches_witness_definition(self, p2, variant):
        # u well inside v iff some z meets u at bottom and joins v to top
        opens = opens_of(p2, variant)
        bot = BundleOpen.empty(p2, variant)
        top = BundleOpen.full(p2, variant)
        for u in opens:
            for v in opens:
                witnessed = any(
                    z.intersection(u) == bot and z.union(v) == top
                    for z in opens
                )
                assert well_inside(u, v) == witnessed


class TestRegularity:
    def test_star_frame_with_trivial_context_is_irregular(self, p2):
        report = regularity_report(Frame(p2, STAR), 4096)
        assert not report.regular
        assert report.witness is not None
        # the witness really fails: it exceeds the join of all opens
        # well inside it
        acc = BundleOpen.empty(p2, STAR)
        for u in opens_of(p2, STAR):
            if well_inside(u, report.witness):
                acc = acc.union(u)
        assert acc != report.witness

    def test_frame_without_trivial_context_is_regular(self, tol):
        po = build_poset([diag_context(2)], include_trivial=False, tol=tol)
        report = regularity_report(Frame(po, STAR), 4096)
        assert report.regular
        assert report.witness is None

    def test_costar_frame_also_fails_over_trivial_context(self, p2):
        # the scalar context's character extends to every finer character,
        # so a proper nonempty costar open has only bottom well inside it
        report = regularity_report(Frame(p2, COSTAR), 4096)
        assert not report.regular

    def test_single_context_costar_frame_is_regular(self, tol):
        po = build_poset([diag_context(2)], include_trivial=False, tol=tol)
        report = regularity_report(Frame(po, COSTAR), 4096)
        assert report.regular


class TestClopenEmbedding:
    def test_embedding_preserves_lattice_ops(self, p2):
        clops = opens_of(p2, CLOPEN_STAR)
        for u in clops:
            for v in clops:
                eu, ev = embed_clopen(u), embed_clopen(v)
                assert embed_clopen(u.union(v)) == eu.union(ev)
                assert embed_clopen(u.intersection(v)) == eu.intersection(ev)

    def test_embedding_rejects_other_variants(self, p2):
        with pytest.raises(FrameMismatch):
            embed_clopen(BundleOpen.full(p2, STAR))


def test_negation_collapse_on_random_star_frames(tol):
    # every nonempty star open over a poset containing the scalars has
    # empty negation; checked on a few random posets per dimension
    gen = rng(14)
    for dim in (2, 3):
        for _ in range(2):
            po = random_poset(gen, dim, 2, include_trivial=True)
            bot = BundleOpen.empty(po, STAR)
            top = BundleOpen.full(po, STAR)
            for u in enumerate_opens(po, STAR, 100000):
                if u == bot:
                    continue
                assert negation(u) == bot
                assert negation(negation(u)) == top
