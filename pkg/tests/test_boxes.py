import itertools

import numpy as np
import pytest

from boxkit import Event, ProductSpace, SpaceMismatchError, classical_box, core, cylinder_set, find_witness
from boxkit.boxes import BoxWitness, witness_masks
from boxkit.scenarios import grid2x3, zeroatom
from boxkit.verify import oracle_classical_box, oracle_core

from conftest import brute_cylinder, random_space


def brute_cylinder_set(A, K):
    sp = A.space
    return sp.event([x for x in sp.outcomes() if all(y in A for y in brute_cylinder(sp, x, K))])


def random_event(rng, sp, density=0.6):
    return Event(sp, rng.random(sp.outcome_count) < density)


def random_instances(rng, count, n_max=4, zero_atoms=True):
    for _ in range(count):
        sp = random_space(rng, int(rng.integers(1, n_max + 1)), zero_atoms=zero_atoms)
        yield sp, random_event(rng, sp), random_event(rng, sp)


def test_cylinder_set_example():
    sp = ProductSpace.uniform([2, 2])
    A = sp.event([(0, 0), (0, 1)])
    assert cylinder_set(A, {0}).outcomes() == [(0, 0), (0, 1)]
    assert cylinder_set(A, {1}).is_empty()
    assert cylinder_set(A, 0b11) == A
    assert cylinder_set(A, 0).is_empty()
    assert cylinder_set(sp.full(), 0).is_full()


def test_cylinder_set_matches_brute_force(rng):
    for sp, A, _ in random_instances(rng, 40):
        for K in range(1 << sp.n):
            assert cylinder_set(A, K) == brute_cylinder_set(A, K)


def test_box_examples():
    g = grid2x3()
    assert classical_box(g.A, g.B).prob() == pytest.approx(1 / 16, abs=0)
    z = zeroatom()
    assert classical_box(z.A, z.B).is_empty()


def test_box_with_full_space_is_identity(rng):
    for sp, A, _ in random_instances(rng, 30):
        assert classical_box(A, sp.full()) == A
        assert classical_box(sp.full(), A) == A


def test_box_union_form_matches_definition(rng):
    for sp, A, B in random_instances(rng, 80):
        assert classical_box(A, B) == oracle_classical_box(A, B)


def test_box_inside_intersection_and_monotone(rng):
    for sp, A, B in random_instances(rng, 60):
        box = classical_box(A, B)
        assert box <= A & B
        bigger = A | random_event(rng, sp, 0.3)
        assert box <= classical_box(bigger, B)


def test_box_space_mismatch():
    a = ProductSpace.coins(2).full()
    b = ProductSpace.coins(3).full()
    with pytest.raises(SpaceMismatchError):
        classical_box(a, b)


def test_find_witness_grid():
    g = grid2x3()
    x = (1,) * 7
    w = find_witness(g.A, g.B, x)
    assert witness_masks(w) == ((0, 1), (2, 3))
    sp = g.space
    assert sp.cylinder(x, w.K) <= g.A and sp.cylinder(x, w.L) <= g.B


def test_find_witness_full_and_absent():
    sp = ProductSpace.coins(2)
    w = find_witness(sp.full(), sp.full(), (1, 0))
    assert (w.K, w.L) == (0, 0)
    g = grid2x3()
    assert find_witness(g.A, g.B, (0,) * 7) is None
    with pytest.raises(ValueError):
        BoxWitness(0, 0b11, 0b10)


def test_find_witness_agrees_with_box(rng):
    for sp, A, B in random_instances(rng, 30):
        box = classical_box(A, B)
        for idx in range(sp.outcome_count):
            w = find_witness(A, B, idx)
            assert (w is not None) == (idx in box)
            if w is not None:
                x = sp.decode(idx)
                assert sp.cylinder(x, w.K) <= A and sp.cylinder(x, w.L) <= B


def test_core_examples():
    sp = ProductSpace.coins(3)
    assert core(sp.full()).is_full()
    assert core(sp.empty()).is_empty()
    one = ProductSpace.uniform([3])
    assert core(one.event([0, 1])).is_empty()


def test_core_matches_union_of_cylinders(rng):
    for sp, A, _ in random_instances(rng, 60):
        c = core(A)
        assert c == oracle_core(A)
        assert c <= A
        assert core(c) <= c


def proper_events(sp):
    for bits in itertools.product([False, True], repeat=sp.outcome_count):
        if not all(bits):
            yield Event(sp, np.array(bits))


@pytest.mark.parametrize("sizes", [(2, 2), (3, 2), (2, 1, 2)])
def test_core_box_identities_exhaustive(sizes):
    sp = ProductSpace.uniform(sizes)
    events = list(proper_events(sp))
    cores = [core(E) for E in events]
    for A, a0 in zip(events, cores):
        for B, b0 in zip(events, cores):
            box = classical_box(A, B)
            assert classical_box(a0, B) == box
            assert classical_box(A, b0) == box
            assert classical_box(a0, b0) == box


def test_core_minimality_construction(rng):
    for _ in range(30):
        sizes = [int(v) for v in rng.integers(2, 4, size=int(rng.integers(1, 4)))]
        sp = ProductSpace.uniform(sizes)
        A = random_event(rng, sp, 0.7)
        a0 = core(A)
        for idx in a0.indices():
            x = sp.decode(int(idx))
            K = next(K for K in range(sp.full_mask) if sp.cylinder(x, K) <= A)
            B = sp.cylinder(x, sp.full_mask ^ K)
            assert not B.is_full()
            assert idx in classical_box(a0, B)
