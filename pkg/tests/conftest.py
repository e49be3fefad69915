"""Shared fixtures: default tolerance, reference posets, label helpers."""

import numpy as np
import pytest

from qtopos import Tolerance
from qtopos.reference import diamond_poset, projection_rich_poset, two_context_poset


@pytest.fixture(scope="session")
def tol():
    return Tolerance.coerce(None)


@pytest.fixture(scope="session")
def p2(tol):
    """Two contexts in dimension 2: diagonal matrices above the scalars."""
    return two_context_poset(tol)


@pytest.fixture(scope="session")
def diamond(tol):
    """Four contexts in dimension 3: two maximal, shared meet, scalars."""
    return diamond_poset(tol)


@pytest.fixture(scope="session")
def rich3(tol):
    return projection_rich_poset(tol)


@pytest.fixture(scope="session")
def p2_labels(p2):
    """(diagonal context label, trivial context label) of the small poset."""
    triv = next(c.label for c in p2 if c.is_trivial())
    diag = next(c.label for c in p2 if not c.is_trivial())
    return diag, triv


def char_index(c, p, tol=None):
    """Index of the character supported on a rank-one member projection."""
    mask = c.mask_of_projection(p, tol)
    assert mask and mask & (mask - 1) == 0, "projection is not a single block"
    return mask.bit_length() - 1


@pytest.fixture(scope="session")
def e_char(tol):
    """char_index helper importable from any test via fixture."""
    return lambda c, p: char_index(c, p, tol)


@pytest.fixture(scope="session")
def z_op():
    return np.diag([1.0, -1.0])
