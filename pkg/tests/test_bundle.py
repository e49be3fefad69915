"""Bundle points, the two topologies, covering selections, and sections."""

import itertools

import numpy as np
import pytest

from qtopos import (
    BundleClosed,
    BundleOpen,
    CLOPEN_STAR,
    COSTAR,
    Character,
    STAR,
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
from qtopos.bundle import covering_subfunctor_from_masks, point_closure
from qtopos.errors import PointNotInBundle, TooLarge
from qtopos.reference import diag_context, random_poset, rng


def full_mask(c):
    return (1 << c.size) - 1


def all_fiber_families(poset):
    """Every subset of the bundle, as a fiber-mask dict per context."""
    ranges = [range(1 << c.size) for c in poset.contexts]
    for combo in itertools.product(*ranges):
        yield {
            c.label: m for c, m in zip(poset.contexts, combo)
        }


class TestCharacters:
    def test_spectrum_size(self, p2, p2_labels):
        diag, triv = p2_labels
        assert len(spectrum(p2.get(diag))) == 2
        assert len(spectrum(p2.get(triv))) == 1

    def test_evaluate_reads_block_coefficient(self, tol):
        c = diag_context(2)
        a = c.member_from_coefficients([3.0, 7.0])
        values = sorted(evaluate(ch, a, tol) for ch in spectrum(c))
        assert values == [3.0, 7.0]

    def test_restrict_character_to_trivial(self, p2, p2_labels, tol):
        diag, triv = p2_labels
        for ch in spectrum(p2.get(diag)):
            down = restrict_character(ch, p2.get(triv), tol)
            assert down.context.label == triv
            assert down.index == 0


class TestOpenValidation:
    def test_star_open_requires_downward_stability(self, p2, p2_labels):
        diag, triv = p2_labels
        with pytest.raises(PointNotInBundle):
            BundleOpen(p2, STAR, {diag: 1, triv: 0})
        BundleOpen(p2, STAR, {diag: 1, triv: 1})

    def test_costar_open_requires_upward_stability(self, p2, p2_labels):
        diag, triv = p2_labels
        with pytest.raises(PointNotInBundle):
            BundleOpen(p2, COSTAR, {diag: 1, triv: 1})
        BundleOpen(p2, COSTAR, {diag: 3, triv: 1})
        BundleOpen(p2, COSTAR, {diag: 1, triv: 0})

    def test_empty_and_full(self, p2):
        for variant in (STAR, COSTAR, CLOPEN_STAR):
            bot = BundleOpen.empty(p2, variant)
            top = BundleOpen.full(p2, variant)
            assert bot.leq(top)
            assert bot.union(top) == top
            assert bot.intersection(top) == bot

    def test_retag_between_star_like_variants(self, p2, p2_labels):
        diag, triv = p2_labels
        u = BundleOpen(p2, CLOPEN_STAR, {diag: 1, triv: 1})
        assert u.retag(STAR).variant == STAR


class TestInteriorClosure:
    @pytest.mark.parametrize("variant", [STAR, COSTAR])
    def test_interior_is_largest_open_inside(self, p2, variant):
        opens = list(enumerate_opens(p2, variant, 4096))
        for fibers in all_fiber_families(p2):
            inside = [
                u for u in opens
                if all(u.fibers[k] & ~fibers[k] == 0 for k in fibers)
            ]
            best = max(inside, key=lambda u: sum(
                bin(u.fibers[k]).count("1") for k in u.fibers
            ))
            got = interior(p2, variant, fibers)
            # the open of maximal size inside the family is unique: opens
            # are closed under union, so compare against the union instead
            acc = opens[0].empty(p2, variant)
            for u in inside:
                acc = acc.union(u)
            assert got == acc
            assert sum(bin(got.fibers[k]).count("1") for k in got.fibers) >= sum(
                bin(best.fibers[k]).count("1") for k in best.fibers
            )

    @pytest.mark.parametrize("variant", [STAR, COSTAR])
    def test_closure_complements_interior(self, p2, variant):
        for fibers in all_fiber_families(p2):
            closed = closure(p2, variant, fibers)
            comp = {
                c.label: full_mask(c) & ~fibers[c.label] for c in p2.contexts
            }
            assert closed.complement() == interior(p2, variant, comp)

    def test_saturate_is_smallest_open_containing(self, p2):
        for variant in (STAR, COSTAR):
            for fibers in all_fiber_families(p2):
                sat = saturate(p2, variant, fibers)
                assert all(
                    fibers[k] & ~sat.fibers[k] == 0 for k in fibers
                )
                smaller = [
                    u for u in enumerate_opens(p2, variant, 4096)
                    if all(fibers[k] & ~u.fibers[k] == 0 for k in fibers)
                    and u.leq(sat) and u != sat
                ]
                assert not smaller


class TestEnumeration:
    def test_small_poset_counts(self, p2):
        assert len(list(enumerate_opens(p2, STAR, 100))) == 5
        assert len(list(enumerate_opens(p2, COSTAR, 100))) == 5

    def test_counts_match_brute_force_on_diamond(self, diamond):
        for variant in (STAR, COSTAR):
            fast = {
                tuple(sorted(u.fibers.items()))
                for u in enumerate_opens(diamond, variant, 100000)
            }
            slow = set()
            for fibers in all_fiber_families(diamond):
                got = interior(diamond, variant, fibers)
                if got.fibers == fibers:
                    slow.add(tuple(sorted(fibers.items())))
            assert fast == slow

    def test_cap_is_enforced(self, diamond):
        with pytest.raises(TooLarge):
            list(enumerate_opens(diamond, STAR, 3))


class TestCoveringSelections:
    def test_l_class_and_covers(self, tol):
        c = diag_context(3)
        target = c.projection_of_mask(0b011)
        members = [
            l_class(c.projection_of_mask(0b001), c, tol),
            l_class(c.projection_of_mask(0b010), c, tol),
        ]
        assert covers(target, members, c, tol)
        assert not covers(c.projection_of_mask(0b111), members, c, tol)

    def test_psi_round_trip_on_all_costar_opens(self, p2, diamond, tol):
        for po in (p2, diamond):
            for u in enumerate_opens(po, COSTAR, 100000):
                sub = psi_inverse(u)
                assert psi(po, sub, tol) == u

    def test_selection_count_matches_open_count(self, p2, tol):
        maps = monotone_projection_maps(p2, 4096, tol)
        assert len(maps) == 5
        images = set()
        for choice in maps:
            masks = {
                label: p2.get(label).mask_of_projection(p, tol)
                for label, p in choice.items()
            }
            u = psi(p2, covering_subfunctor_from_masks(p2, masks), tol)
            images.add(tuple(sorted(u.fibers.items())))
        assert len(images) == 5


class TestGlobalSections:
    def test_counts(self, p2, diamond):
        assert len(global_sections(p2, 4096)) == 2
        assert len(global_sections(diamond, 4096)) == 5

    def test_sections_are_valid_choices(self, diamond):
        for sec in global_sections(diamond, 4096):
            assert set(sec) == set(diamond.labels)
            for c in diamond:
                assert 0 <= sec[c.label] < c.size


class TestIrreducibleClosed:
    @pytest.mark.parametrize("variant", [STAR, COSTAR])
    def test_matches_union_definition_oracle(self, p2, variant):
        # closed sets are complements of opens; A irreducible iff A is
        # nonempty and A = B union C forces A = B or A = C
        closed_sets = [
            u.complement() for u in enumerate_opens(p2, variant, 4096)
        ]
        def key(cl):
            return tuple(sorted(cl.fibers.items()))

        oracle = set()
        for a in closed_sets:
            if all(m == 0 for m in a.fibers.values()):
                continue
            reducible = False
            for b in closed_sets:
                for c in closed_sets:
                    if key(b.union(c)) == key(a) and key(b) != key(a) and key(c) != key(a):
                        reducible = True
                        break
                if reducible:
                    break
            if not reducible:
                oracle.add(key(a))
        got = {key(item.closed) for item in irreducible_closed_sets(p2, variant, 4096)}
        assert got == oracle

    @pytest.mark.parametrize("variant", [STAR, COSTAR])
    def test_generic_points_generate_their_closures(self, diamond, variant):
        for item in irreducible_closed_sets(diamond, variant, 100000):
            label, k = item.generic
            assert item.is_point_closure
            assert point_closure(diamond, variant, label, k) == item.closed

    def test_point_closures_are_distinct_on_random_posets(self, tol):
        gen = rng(12)
        for _ in range(3):
            po = random_poset(gen, 2, 2, include_trivial=True)
            for variant in (STAR, COSTAR):
                seen = {}
                for c in po:
                    for k in range(c.size):
                        cl = point_closure(po, variant, c.label, k)
                        seen[tuple(sorted(cl.fibers.items()))] = (c.label, k)
                items = irreducible_closed_sets(po, variant, 100000)
                assert len(items) == len(seen)
