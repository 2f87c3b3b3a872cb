import itertools
from fractions import Fraction

import numpy as np
import pytest

from boxkit import (CylinderPattern, Event, ProductSpace, RealFunction, classical_box, cond_prob,
                    cond_prob_table, eleven_box, ess_inf, inflate, st_box, st_box_complementary,
                    functional_bound_sides, threshold_set)
from boxkit.measure import ThresholdPair
from boxkit.scenarios import coin, threesided, zeroatom
from boxkit.verify import oracle_st_box

from conftest import brute_cylinder, random_space

half, third = Fraction(1, 2), Fraction(1, 3)


def random_event(rng, sp, density=0.6):
    return Event(sp, rng.random(sp.outcome_count) < density)


def test_threshold_pair_validation():
    assert ThresholdPair("1/3", 1).s == third
    with pytest.raises(ValueError):
        ThresholdPair(Fraction(3, 2), 0)


def test_cond_prob_examples():
    sp = ProductSpace.coins(3)
    A = sp.event_where(lambda x: x[0] == 0 and x[1] == 0)
    assert cond_prob(CylinderPattern(0b010, (0,)), A) == half
    assert cond_prob(CylinderPattern(0, ()), A) == A.prob()
    for x in sp.outcomes():
        assert cond_prob(CylinderPattern.of(x, 0b111), A) == (x in A)


def brute_cond_prob(space, E, x, K):
    free = [i for i in range(space.n) if not K >> i & 1]
    total = Fraction(0)
    for y in brute_cylinder(space, x, K):
        if y in E:
            w = Fraction(1)
            for i in free:
                w *= space.alphabets[i].weights[y[i]]
            total += w
    return total


def test_cond_prob_matches_brute_force(rng):
    for _ in range(20):
        sp = random_space(rng, int(rng.integers(1, 4)), zero_atoms=True)
        E = random_event(rng, sp)
        for K in range(1 << sp.n):
            table = cond_prob_table(E, K)
            for x in sp.outcomes():
                y = CylinderPattern.of(x, K)
                q = brute_cond_prob(sp, E, x, K)
                assert cond_prob(y, E) == q == table[y.values]


def test_law_of_total_probability(rng):
    for _ in range(30):
        sp = random_space(rng, int(rng.integers(1, 5)), zero_atoms=True)
        E = random_event(rng, sp)
        for K, table in ((K, cond_prob_table(E, K)) for K in range(1 << sp.n)):
            total = sum((sp.marginal_prob([y], sp.full_mask ^ K) * q for y, q in table.entries.items()), Fraction(0))
            assert total == E.prob()


def test_threshold_set_examples():
    c = coin(1)
    sp = c.space
    A1 = threshold_set(c.A, half, {1})
    assert A1 == sp.event_where(lambda x: x[1] == 0)
    assert threshold_set(c.A, 0, {1}).is_full()
    assert threshold_set(c.A, 1, 0b111) == c.A
    assert threshold_set(c.A, 0, 0b111).is_full()
    assert threshold_set(c.A, Fraction(1, 4), 0).is_full()
    assert threshold_set(c.A, Fraction(1, 3), 0).is_empty()


def test_threshold_set_cylinder_constant_and_antitone(rng):
    grid = [Fraction(0), Fraction(1, 4), third, half, Fraction(2, 3), Fraction(1)]
    for _ in range(20):
        sp = random_space(rng, int(rng.integers(1, 4)), zero_atoms=True)
        E = random_event(rng, sp)
        for K in range(1 << sp.n):
            prev = sp.full()
            for r in grid:
                T = threshold_set(E, r, K)
                assert T <= prev
                prev = T
                for x in T.outcomes():
                    assert sp.cylinder(x, K) <= T


def test_inflate_contains_set(rng):
    for _ in range(30):
        sp = random_space(rng, int(rng.integers(1, 4)), zero_atoms=True)
        E = random_event(rng, sp)
        assert inflate(E, 0).is_full()
        assert inflate(sp.full(), half).is_full()
        for r in (third, half, 1):
            assert E <= inflate(E, r)


def test_coin_family_values():
    for m in range(1, 5):
        c = coin(m)
        box = st_box(c.A, c.B, (half, half))
        assert box.prob() == Fraction(m + 1, 4 ** m)
        assert len(box) == 2 * (m + 1)
        assert inflate(c.A, half).prob() == Fraction(m + 2, 2 ** (m + 1))
        assert st_box_complementary(c.A, c.B, (half, half)) == box
        assert (c.A & c.B).is_empty()


def test_three_sided_coin():
    c = threesided()
    x = tuple("HTS".index(ch) for ch in "HHSTT")
    st = (third, third)
    assert x in st_box(c.A, c.B, st)
    assert x not in st_box_complementary(c.A, c.B, st)
    assert st_box_complementary(c.A, c.B, st) <= st_box(c.A, c.B, st)


def test_st_box_matches_oracle(rng):
    for _ in range(60):
        sp = random_space(rng, int(rng.integers(1, 5)), zero_atoms=True)
        A, B = random_event(rng, sp), random_event(rng, sp)
        for st in [(third, half), (1, 1), (half, Fraction(2, 3))]:
            assert st_box(A, B, st) == oracle_st_box(A, B, st)


def test_st_box_trivial_thresholds(rng):
    for _ in range(30):
        sp = random_space(rng, int(rng.integers(1, 4)), zero_atoms=True)
        A, B = random_event(rng, sp), random_event(rng, sp)
        assert st_box(A, B, (0, 0)).is_full()
        pa, pb = A.prob(), B.prob()
        assert st_box(A, B, (pa, pb)).is_full()
        assert st_box(A, B, (1, 1)) <= st_box(A, B, (half, 1)) <= st_box(A, B, (half, half))


def test_eleven_box_equals_st_box_at_one(rng):
    for _ in range(100):
        sp = random_space(rng, int(rng.integers(1, 5)), zero_atoms=True)
        A, B = random_event(rng, sp, 0.7), random_event(rng, sp, 0.7)
        eleven = eleven_box(A, B)
        assert eleven == st_box(A, B, (1, 1))
        assert classical_box(A, B) <= eleven
        assert eleven_box(A, B, complementary=True) <= eleven


def test_eleven_box_complementary_differs_on_null_set():
    sp = ProductSpace([(half, half, 0)] * 3)
    A = sp.event_where(lambda x: x[0] < 2 and x[2] < 2)
    B = sp.event_where(lambda x: x[1] < 2 and x[2] < 2)
    x = (2, 2, 2)
    full, restricted = eleven_box(A, B), eleven_box(A, B, complementary=True)
    assert x in full and x not in restricted
    assert full.prob() == restricted.prob()


def test_zero_atom_eleven_box():
    z = zeroatom()
    eleven = eleven_box(z.A, z.B)
    assert eleven.outcomes() == [(2, 2)]
    assert not eleven <= z.A & z.B
    assert eleven.prob() == 0


def test_ess_inf_examples():
    z = zeroatom()
    f = RealFunction.indicator(z.A)
    assert ess_inf(f, (2, 0), {0}) == 1
    assert ess_inf(f, (2, 2), 0b11) == 0
    c = RealFunction.constant(z.space, Fraction(5, 7))
    assert all(ess_inf(c, x, K) == Fraction(5, 7) for x in z.space.outcomes() for K in range(4))


def brute_functional_lhs(f, g):
    sp = f.space
    support = [[v for v in range(a.size) if a.weights[v] > 0] for a in sp.alphabets]

    def inf(h, x, K):
        return min(h(y) for y in brute_cylinder(sp, x, K)
                   if all(y[i] in support[i] for i in range(sp.n) if not K >> i & 1))

    total = Fraction(0)
    for x in sp.outcomes():
        best = max(inf(f, x, K) * inf(g, x, L)
                   for K in range(1 << sp.n) for L in range(1 << sp.n) if not K & L)
        total += sp.point_prob(x) * best
    return total


def test_functional_bound_examples():
    z = zeroatom()
    lhs, rhs = functional_bound_sides(RealFunction.indicator(z.A), RealFunction.indicator(z.B))
    assert (lhs, rhs) == (eleven_box(z.A, z.B).prob(), z.A.prob() * z.B.prob())
    one = RealFunction.constant(z.space, 1)
    assert functional_bound_sides(one, one) == (1, 1)
    with pytest.raises(ValueError):
        functional_bound_sides(RealFunction(z.space, [0] * 9), one)


def test_functional_bound_matches_brute_force(rng):
    for _ in range(25):
        sp = random_space(rng, int(rng.integers(1, 4)), zero_atoms=True)
        f = RealFunction(sp, [Fraction(int(v), 4) for v in rng.integers(0, 5, sp.outcome_count)],
                         nonnegative=True)
        g = RealFunction(sp, [Fraction(int(v), 3) for v in rng.integers(0, 4, sp.outcome_count)],
                         nonnegative=True)
        lhs, rhs = functional_bound_sides(f, g)
        assert lhs == brute_functional_lhs(f, g)
        assert lhs <= rhs
