import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerosum import GroupSpec, UniqueInvolution, complete_mapping, is_complete_mapping

from helpers import noncyclic_shapes

ALL_SHAPES = list(noncyclic_shapes(12))


def brute_is_complete(moduli, phi):
    """Bijectivity of phi and g + phi(g), checked on residue tuples."""
    g = GroupSpec(moduli)
    elems = [g.decode(c) for c in range(g.order)]
    imgs = [g.decode(int(c)) for c in phi]
    sums = [tuple((a + b) % m for a, b, m in zip(x, y, moduli)) for x, y in zip(elems, imgs)]
    return len(set(imgs)) == g.order and len(set(sums)) == g.order


@pytest.mark.parametrize("moduli", [s for s in ALL_SHAPES if np.prod(s) <= 64])
def test_small_shapes_against_tuple_oracle(moduli):
    cm = complete_mapping(GroupSpec(moduli))
    assert brute_is_complete(moduli, cm.phi)


def test_every_shape_up_to_4096():
    for moduli in ALL_SHAPES:
        cm = complete_mapping(GroupSpec(moduli))
        assert cm.certify(), moduli


@pytest.mark.parametrize("m", [2, 4, 8, 16, 1024])
def test_cyclic_two_groups_rejected(m):
    with pytest.raises(UniqueInvolution):
        complete_mapping(GroupSpec((m,)))


@pytest.mark.parametrize("moduli", [(3,), (5, 3), (4, 3), (8, 5)])
def test_unique_involution_with_odd_part(moduli):
    g = GroupSpec(moduli)
    if g.involution_count() == 1:
        with pytest.raises(UniqueInvolution):
            complete_mapping(g)
    else:
        assert complete_mapping(g).certify()


@pytest.mark.parametrize("moduli", [(3, 3), (9,), (2, 2, 3), (4, 2, 5)])
def test_mixed_and_odd_groups(moduli):
    cm = complete_mapping(GroupSpec(moduli))
    assert brute_is_complete(moduli, cm.phi)


def test_composite_even_modulus_rejected():
    with pytest.raises(ValueError):
        complete_mapping(GroupSpec((6, 2)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([s for s in ALL_SHAPES if np.prod(s) <= 1024]))
def test_psi_closes_the_triple(moduli):
    g = GroupSpec(moduli)
    cm = complete_mapping(g)
    total = g.add_codes(g.add_codes(g.all_codes(), cm.phi), cm.psi)
    assert not total.any()
    assert np.array_equal(np.sort(cm.psi), g.all_codes())


def test_is_complete_mapping_rejects():
    g = GroupSpec((2, 2))
    assert not is_complete_mapping(g, np.array([0, 1, 2, 3]))  # identity: g + g = 0
    assert not is_complete_mapping(g, np.array([0, 1, 2]))
    assert not is_complete_mapping(g, np.array([0, 0, 1, 2]))
    assert is_complete_mapping(g, np.array([0, 2, 3, 1]))
