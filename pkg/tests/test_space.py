import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxkit import (Alphabet, CapacityError, CylinderPattern, Event, ProductSpace, RealFunction,
                    SpaceMismatchError, as_mask, mask_members)
from boxkit.scenarios import grid2x3

from conftest import brute_cylinder, random_space

half = Fraction(1, 2)


def test_encode_examples():
    sp = ProductSpace.uniform([2, 2])
    assert sp.encode((0, 0)) == 0
    assert sp.encode((1, 1)) == 3
    cube = ProductSpace.uniform([3, 3, 3])
    assert cube.decode(cube.encode((2, 1, 0))) == (2, 1, 0)


def test_coordinate_zero_is_most_significant():
    sp = ProductSpace.uniform([2, 3])
    assert [sp.decode(i) for i in range(6)] == list(itertools.product(range(2), range(3)))


def test_encode_rejects_out_of_range():
    sp = ProductSpace.uniform([2, 3])
    with pytest.raises(ValueError):
        sp.encode((2, 0))
    with pytest.raises(ValueError):
        sp.encode((0,))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=5))
def test_encode_decode_bijection(sizes):
    sp = ProductSpace.uniform(sizes)
    vectors = list(itertools.product(*map(range, sizes)))
    assert [sp.encode(x) for x in vectors] == list(range(sp.outcome_count))
    assert all(sp.decode(sp.encode(x)) == x for x in vectors)


def test_alphabet_invariants():
    with pytest.raises(ValueError):
        Alphabet((half, Fraction(1, 3)))
    with pytest.raises(ValueError):
        Alphabet((Fraction(3, 2), Fraction(-1, 2)))
    with pytest.raises(TypeError):
        Alphabet((0.5, 0.5))
    a = Alphabet(("1/2", "1/2", "0"))
    assert a.size == 3 and list(a.support) == [0, 1]


def test_outcome_cap():
    with pytest.raises(CapacityError):
        ProductSpace.uniform([2] * 25)
    ProductSpace.uniform([2] * 24)


def test_cylinder_examples():
    sp = ProductSpace.uniform([2, 2])
    assert sp.cylinder((0, 1), 0b11).outcomes() == [(0, 1)]
    assert sp.cylinder((0, 1), 0).is_full()
    assert sp.cylinder((0, 1), {0}).outcomes() == [(0, 0), (0, 1)]


def test_cylinder_size(rng):
    for _ in range(20):
        sp = random_space(rng, int(rng.integers(1, 4)))
        x = sp.decode(int(rng.integers(sp.outcome_count)))
        K = int(rng.integers(1 << sp.n))
        cyl = sp.cylinder(x, K)
        assert len(cyl) == np.prod([sp.sizes[i] for i in range(sp.n) if not K >> i & 1])
        assert cyl.outcomes() == brute_cylinder(sp, x, K)


def test_prob_examples():
    sp = ProductSpace.uniform([2, 3])
    assert sp.prob(sp.full()) == 1
    assert sp.prob(sp.empty()) == 0
    assert grid2x3().A.prob() == Fraction(44, 128)


def test_prob_additive(rng):
    for _ in range(50):
        sp = random_space(rng, int(rng.integers(1, 4)), zero_atoms=True)
        A = Event(sp, rng.random(sp.outcome_count) < 0.5)
        B = Event(sp, rng.random(sp.outcome_count) < 0.5)
        assert (A | B).prob() + (A & B).prob() == A.prob() + B.prob()


def test_prob_matches_pointwise_sum(rng):
    for _ in range(20):
        sp = random_space(rng, 3, zero_atoms=True)
        A = Event(sp, rng.random(sp.outcome_count) < 0.5)
        assert A.prob() == sum((sp.point_prob(x) for x in A.outcomes()), Fraction(0))


def test_cylinder_prob_is_product_of_fixed_weights(rng):
    for _ in range(10):
        sp = random_space(rng, int(rng.integers(1, 4)), zero_atoms=True)
        for x in sp.outcomes():
            for K in range(1 << sp.n):
                expected = Fraction(1)
                for i in mask_members(K):
                    expected *= sp.alphabets[i].weights[x[i]]
                assert sp.cylinder(x, K).prob() == expected


def test_zero_atom_points():
    sp = ProductSpace([(half, half, 0)] * 2)
    for x in sp.outcomes():
        assert (sp.point_prob(x) == 0) == (2 in x)
        assert sp.event([x]).prob() == sp.point_prob(x)


def test_marginal_prob():
    sp = ProductSpace.coins(2)
    rest = [(0,), (1,)]
    assert sp.marginal_prob(rest, {1}) == 1
    assert sp.marginal_prob([], {1}) == 0
    assert sp.marginal_prob([(0,)], {1}) == half
    skew = ProductSpace([("1/3", "2/3"), ("1/4", "3/4"), ("1/2", "1/2")])
    assert skew.marginal_prob([(1, 0)], {1}) == Fraction(2, 3) * half


def test_expectation():
    sp = ProductSpace.coins(3)
    assert sp.expectation(RealFunction.constant(sp, 1)) == 1
    A = sp.event([(0, 0, 0), (1, 0, 1)])
    assert sp.expectation(RealFunction.indicator(A)) == A.prob()
    assert sp.expectation(RealFunction.of(sp, lambda x: x[0])) == half


def test_event_algebra():
    sp = ProductSpace.uniform([2, 2])
    A = sp.event([(0, 0), (0, 1)])
    B = sp.event([0, 3])
    assert (A & B).outcomes() == [(0, 0)]
    assert len(A | B) == 3
    assert (~A).outcomes() == [(1, 0), (1, 1)]
    assert (A & B) <= A and not A <= B
    assert (0, 1) in A and 3 not in A
    with pytest.raises(ValueError):
        A.bits[0] = False
    other = ProductSpace.uniform([2, 3])
    with pytest.raises(SpaceMismatchError):
        A & other.full()


def test_masks():
    assert as_mask({0, 2}, 3) == 0b101
    assert as_mask(5, 3) == 5
    assert mask_members(0b1010) == (1, 3)
    with pytest.raises(ValueError):
        as_mask({3}, 3)
    with pytest.raises(ValueError):
        as_mask(8, 3)


def test_cylinder_pattern_splice():
    y = CylinderPattern.of((2, 0, 1, 1), {0, 2})
    assert y.values == (2, 1)
    assert y.splice((0, 0), 4) == (2, 0, 1, 0)
    assert y.splice((9, 5, 9, 6), 4) == (2, 5, 1, 6)
    with pytest.raises(ValueError):
        CylinderPattern(0b11, (1,))


def test_real_function_flags():
    sp = ProductSpace.coins(1)
    with pytest.raises(ValueError):
        RealFunction(sp, [1, -1], nonnegative=True)
    f = RealFunction(sp, ["1/3", 2])
    assert f((0,)) == Fraction(1, 3)
