"""Exact checkers for the BKR-type inequalities, seeded instances and
brute-force oracles that share no code with the bit-vector kernels.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .boxes import _same_space, classical_box, core
from .measure import ThresholdPair, eleven_box, inflate, st_box
from .space import Alphabet, CapacityError, Event, ProductSpace

__all__ = [
    "InequalityReport",
    "InstanceSpec",
    "InequalityViolation",
    "instance_digest",
    "serialize_instance",
    "check_bkr",
    "check_eleven",
    "check_core_bound",
    "check_st_bounds",
    "generate_instance",
    "oracle_st_box",
    "oracle_classical_box",
    "oracle_core",
    "shrink",
    "run_suite",
]

ORACLE_BUDGET = 10**8
PROFILES = ("fair", "random", "zero_atoms")


@dataclass(frozen=True)
class InequalityReport:
    """``lhs <= rhs`` for one inequality on one instance."""

    name: str
    lhs: Fraction
    rhs: Fraction
    instance_digest: str = ""
    notes: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def excess_multiple(self) -> Fraction | None:
        return self.rhs / self.lhs if self.lhs > 0 else None


class InequalityViolation(AssertionError):
    """An inequality failed; always an engine defect, never a counterexample.

    ``instance`` holds the serialized, shrunk instance that still fails.
    """

    def __init__(self, report: InequalityReport, instance: dict):
        super().__init__(f"{report.name}: {report.lhs} > {report.rhs}\n"
                         f"{json.dumps(instance, sort_keys=True)}")
        self.report = report
        self.instance = instance


def serialize_instance(space: ProductSpace, *events: Event) -> dict:
    return {
        "weights": [[str(w) for w in a.weights] for a in space.alphabets],
        "events": [[int(i) for i in e.indices()] for e in events],
    }


def instance_digest(space: ProductSpace, *events: Event) -> str:
    payload = json.dumps(serialize_instance(space, *events), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# -- instances ---------------------------------------------------------------

@dataclass(frozen=True)
class InstanceSpec:
    """Recipe for a reproducible random ``(space, A, B)`` triple."""

    seed: int
    n: int = 3
    sizes: tuple[int, ...] | None = None
    profile: str = "random"
    density: float = 0.5
    max_size: int = 3

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}")
        if self.sizes is not None and len(self.sizes) != self.n:
            raise ValueError("sizes must list one alphabet size per coordinate")


def _random_alphabet(rng: np.random.Generator, size: int, zero: int | None) -> Alphabet:
    raw = [int(v) for v in rng.integers(1, 10, size=size)]
    if zero is not None:
        raw[zero] = 0
    total = sum(raw)
    return Alphabet(tuple(Fraction(v, total) for v in raw))


def generate_instance(spec: InstanceSpec) -> tuple[ProductSpace, Event, Event]:
    """Deterministic random instance; identical specs give identical digests.

    The ``zero_atoms`` profile zeroes one symbol of at least one coordinate
    so that some outcome has probability zero.
    """
    rng = np.random.default_rng(spec.seed)
    sizes = spec.sizes
    if sizes is None:
        sizes = tuple(int(s) for s in rng.integers(2, spec.max_size + 1, size=spec.n))
    if np.prod(sizes, dtype=float) > 1 << 24:
        raise CapacityError(f"sizes {sizes} exceed the exact-engine cap")
    if spec.profile == "fair":
        alphabets = [Alphabet.uniform(s) for s in sizes]
    else:
        zeroed = set()
        if spec.profile == "zero_atoms":
            candidates = [i for i, s in enumerate(sizes) if s > 1]
            if not candidates:
                raise ValueError("zero_atoms needs an alphabet with at least two symbols")
            count = int(rng.integers(1, len(candidates) + 1))
            zeroed = set(int(i) for i in rng.choice(candidates, size=count, replace=False))
        alphabets = [
            _random_alphabet(rng, s, int(rng.integers(0, s)) if i in zeroed else None)
            for i, s in enumerate(sizes)
        ]
    space = ProductSpace(alphabets)
    A = Event(space, rng.random(space.outcome_count) < spec.density)
    B = Event(space, rng.random(space.outcome_count) < spec.density)
    return space, A, B


# -- oracles -----------------------------------------------------------------

def _completions(space: ProductSpace, x, K: int):
    """Every outcome agreeing with ``x`` on ``K``, with its ``K^c`` weight."""
    choices = [[(x[i], Fraction(1))] if K >> i & 1 else list(enumerate(a.weights))
               for i, a in enumerate(space.alphabets)]
    for combo in itertools.product(*choices):
        y = tuple(v for v, _ in combo)
        w = Fraction(1)
        for _, p in combo:
            w *= p
        yield y, w


def _cond(space, E: Event, x, K: int, cache: dict) -> Fraction:
    key = (K, tuple(x[i] if K >> i & 1 else None for i in range(space.n)))
    if key not in cache:
        cache[key] = sum((w for y, w in _completions(space, x, K) if y in E), Fraction(0))
    return cache[key]


def oracle_st_box(A: Event, B: Event, st) -> Event:
    """Per-outcome scan of the definition: some disjoint ``K, L`` with
    conditional probabilities of ``A`` given ``x_K`` at least ``s`` and of
    ``B`` given ``x_L`` at least ``t``.
    """
    _same_space(A, B)
    st = ThresholdPair.of(st)
    space = A.space
    if space.outcome_count * 3 ** space.n > ORACLE_BUDGET:
        raise CapacityError("oracle_st_box budget exceeded")
    masks = range(1 << space.n)
    cache_a: dict = {}
    cache_b: dict = {}
    members = []
    for x in space.outcomes():
        good_a = [K for K in masks if _cond(space, A, x, K, cache_a) >= st.s]
        if not good_a:
            continue
        good_b = [L for L in masks if _cond(space, B, x, L, cache_b) >= st.t]
        if any(not K & L for K in good_a for L in good_b):
            members.append(x)
    return space.event(members)


def _cylinder_inside(space, E: Event, x, K: int) -> bool:
    return all(y in E for y, _ in _completions(space, x, K))


def oracle_classical_box(A: Event, B: Event) -> Event:
    """Per-outcome scan over all disjoint pairs ``K, L`` of cylinder inclusions."""
    _same_space(A, B)
    space = A.space
    masks = range(1 << space.n)
    members = []
    for x in space.outcomes():
        good_a = [K for K in masks if _cylinder_inside(space, A, x, K)]
        if good_a and any(_cylinder_inside(space, B, x, L) and not K & L
                          for L in masks for K in good_a):
            members.append(x)
    return space.event(members)


def oracle_core(E: Event) -> Event:
    """Union of every cylinder ``[x]_K`` with ``|K| <= n - 1`` contained in ``E``.

    Outcomes are grouped by their ``K``-pattern key; a group whose members
    all lie in ``E`` is a qualifying cylinder.
    """
    space = E.space
    index = np.arange(space.outcome_count)
    coords = [space.coordinate(i) for i in range(space.n)]
    bits = np.zeros(space.outcome_count, dtype=bool)
    outside = (~E.bits).astype(np.int64)
    for K in range(space.full_mask):
        key = np.zeros_like(index)
        for i in range(space.n):
            if K >> i & 1:
                key = key * space.sizes[i] + coords[i]
        misses = np.bincount(key, weights=outside)
        bits |= misses[key] == 0
    return Event(space, bits)


# -- checks ------------------------------------------------------------------

def _report(name, lhs, rhs, space, A, B, notes=()) -> InequalityReport:
    return InequalityReport(name, lhs, rhs, instance_digest(space, A, B), tuple(notes))


def check_bkr(A: Event, B: Event) -> InequalityReport:
    """``P(A box B) <= P(A) P(B)``."""
    _same_space(A, B)
    box = classical_box(A, B)
    return _report("bkr", box.prob(), A.prob() * B.prob(), A.space, A, B)


def check_eleven(A: Event, B: Event) -> InequalityReport:
    """``P(A 11 B) <= P(A) P(B)``, after asserting ``A box B`` lies inside ``A 11 B``."""
    _same_space(A, B)
    eleven = eleven_box(A, B)
    if not classical_box(A, B) <= eleven:
        raise AssertionError("classical box not contained in the 11-box")
    return _report("eleven", eleven.prob(), A.prob() * B.prob(), A.space, A, B)


def check_core_bound(A: Event, B: Event) -> InequalityReport:
    """``P(A box B) <= P(A0) P(B0)`` with ``A0, B0`` the cylindrical cores.

    Also asserts ``A box B == A0 box B0``.  Refuses ``A`` or ``B`` equal to
    the whole space.
    """
    _same_space(A, B)
    if A.is_full() or B.is_full():
        raise ValueError("check_core_bound needs proper subsets of the space")
    a0, b0 = core(A), core(B)
    box = classical_box(A, B)
    if box != classical_box(a0, b0):
        raise AssertionError("A box B differs from core(A) box core(B)")
    gap = A.prob() * B.prob() - a0.prob() * b0.prob()
    return _report("core", box.prob(), a0.prob() * b0.prob(), A.space, A, B,
                   (f"core_gap={gap}",))


def check_st_bounds(A: Event, B: Event, st) -> tuple[InequalityReport, InequalityReport | None]:
    """Both lenient-box bounds.

    The first compares with the product of the inflated sets ``A_s, B_t``;
    the second with the product of their cores, and is ``None`` when
    ``A_s`` or ``B_t`` is the whole space.
    """
    _same_space(A, B)
    st = ThresholdPair.of(st)
    space = A.space
    lhs = st_box(A, B, st).prob()
    a_s, b_t = inflate(A, st.s), inflate(B, st.t)
    rhs1 = a_s.prob() * b_t.prob()
    first = _report("st", lhs, rhs1, space, A, B, (f"s={st.s}", f"t={st.t}"))
    if a_s.is_full() or b_t.is_full():
        return first, None
    rhs2 = core(a_s).prob() * core(b_t).prob()
    second = _report("st_core", lhs, rhs2, space, A, B,
                     (f"s={st.s}", f"t={st.t}", "uses core(B_t)", f"inflated_bound={rhs1}"))
    if rhs2 > rhs1:
        raise AssertionError("core-refined bound exceeds the inflated-set bound")
    return first, second


# -- shrinking ---------------------------------------------------------------

def _drop_coordinate(space: ProductSpace, events, i: int, value: int):
    alphabets = space.alphabets[:i] + space.alphabets[i + 1:]
    if not alphabets:
        return None
    sub = ProductSpace(alphabets)
    sliced = [Event(sub, np.take(e.grid, value, axis=i)) for e in events]
    return sub, sliced


def shrink(space: ProductSpace, events: list[Event],
           fails: Callable[[ProductSpace, list[Event]], bool]):
    """Greedy minimization of a failing instance.

    First removes coordinates by fixing them to a single value, then removes
    outcomes from the events one at a time, keeping every step that still
    fails.
    """
    changed = True
    while changed:
        changed = False
        for i in range(space.n):
            for value in range(space.sizes[i]):
                cand = _drop_coordinate(space, events, i, value)
                if cand is not None and fails(*cand):
                    space, events = cand
                    changed = True
                    break
            if changed:
                break
    for k in range(len(events)):
        for idx in events[k].indices():
            bits = events[k].bits.copy()
            bits[idx] = False
            trial = list(events)
            trial[k] = Event(space, bits)
            if fails(space, trial):
                events = trial
    return space, events


SUITES = ("bkr", "eleven", "core", "st")
ST_GRID = (Fraction(1, 3), Fraction(1, 2), Fraction(1))


def _suite_reports(suite: str, A: Event, B: Event) -> list[InequalityReport]:
    if suite == "bkr":
        return [check_bkr(A, B)]
    if suite == "eleven":
        return [check_eleven(A, B)]
    if suite == "core":
        if A.is_full() or B.is_full():
            return []
        return [check_core_bound(A, B)]
    reports = []
    for s in ST_GRID:
        for t in ST_GRID:
            reports.extend(r for r in check_st_bounds(A, B, (s, t)) if r is not None)
    return reports


def _violates(suite):
    def fails(space, events):
        try:
            return any(not r.holds for r in _suite_reports(suite, *events))
        except AssertionError:
            return True
    return fails


@dataclass
class SuiteResult:
    suite: str
    seed: int
    digest: str
    reports: list[InequalityReport] = field(default_factory=list)


def run_suite(suite: str, seeds, n_max: int = 4, max_size: int = 3) -> list[SuiteResult]:
    """Run one suite over seeded instances, cycling through the weight profiles.

    Raises
    ------
    InequalityViolation
        With a shrunk serialized instance, on the first failing check.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    results = []
    for seed in seeds:
        spec = InstanceSpec(seed=seed, n=1 + seed % n_max, profile=PROFILES[seed % 3],
                            max_size=max_size)
        if spec.profile == "zero_atoms" and max_size < 2:
            spec = InstanceSpec(seed=seed, n=spec.n, profile="random", max_size=max_size)
        space, A, B = generate_instance(spec)
        try:
            reports = _suite_reports(suite, A, B)
            bad = next((r for r in reports if not r.holds), None)
        except AssertionError as exc:
            bad = InequalityReport(f"{suite}:{exc}", Fraction(1), Fraction(0))
        if bad is not None:
            small_space, small = shrink(space, [A, B], _violates(suite))
            raise InequalityViolation(bad, serialize_instance(small_space, *small))
        results.append(SuiteResult(suite, seed, instance_digest(space, A, B), reports))
    return results


def report_dict(r: InequalityReport) -> dict:
    out = asdict(r)
    out.update(lhs=str(r.lhs), rhs=str(r.rhs), holds=r.holds,
               excess_multiple=None if r.excess_multiple is None else str(r.excess_multiple),
               notes=list(r.notes))
    return out
