"""Measure-dependent box operations.

Conditional probabilities use the canonical version
``Q(y; E) = P_{K^c}{v : <y, v>_K in E}``, evaluated exactly.  Essential
infima over a cylinder range over completions whose every coordinate has
positive weight, which is the product-measure support.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .boxes import MAX_TABLE_CELLS, _same_space, check_mask_budget, table_cells
from .space import (
    CapacityError,
    CylinderPattern,
    Event,
    ProductSpace,
    RealFunction,
    as_mask,
    mask_members,
    parse_rational,
)

__all__ = [
    "ThresholdPair",
    "CondProbTable",
    "cond_prob",
    "cond_prob_table",
    "threshold_set",
    "inflate",
    "st_box",
    "st_box_complementary",
    "ess_inf",
    "eleven_box",
    "functional_bound_sides",
]

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class ThresholdPair:
    s: Fraction
    t: Fraction

    def __post_init__(self):
        for name in ("s", "t"):
            v = parse_rational(getattr(self, name))
            if not 0 <= v <= 1:
                raise ValueError(f"threshold {name}={v} outside [0, 1]")
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, st) -> ThresholdPair:
        return st if isinstance(st, cls) else cls(*st)


@dataclass(frozen=True)
class CondProbTable:
    """``Q_{K^c}(y; E)`` for every pattern ``y`` on ``mask``."""

    mask: int
    entries: dict

    def __getitem__(self, y) -> Fraction:
        return self.entries[tuple(y)]


def _check_r(r) -> Fraction:
    r = parse_rational(r)
    if not 0 <= r <= 1:
        raise ValueError(f"threshold r={r} outside [0, 1]")
    return r


def _free_axes(space: ProductSpace, mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(space.n) if not mask >> i & 1)


def _denominator(space: ProductSpace, mask: int) -> int:
    d = 1
    for i in _free_axes(space, mask):
        d *= space.alphabets[i].denominator
    return d


def cond_prob(y: CylinderPattern, E: Event) -> Fraction:
    """Exact ``Q(y; E)``: the ``K^c``-marginal mass of completions of ``y`` in ``E``."""
    space = E.space
    if y.mask >> space.n:
        raise ValueError("pattern mask does not fit the space")
    fixed = dict(zip(mask_members(y.mask), y.values))
    for i, v in fixed.items():
        if not 0 <= v < space.sizes[i]:
            raise ValueError(f"pattern value {v} outside alphabet {i}")
    index = tuple(fixed.get(i, slice(None)) for i in range(space.n))
    # remaining axes of the slice are the free coordinates, in order
    total = np.asarray(E.grid[index], dtype=object)
    free = _free_axes(space, y.mask)
    for k, axis in reversed(list(enumerate(free))):
        total = np.tensordot(total, space.weight_vector(axis).astype(object), axes=([k], [0]))
    return Fraction(int(np.asarray(total).reshape(()).item()), _denominator(space, y.mask))


def _at_least(num: np.ndarray, den: int, r: Fraction) -> np.ndarray:
    """Exact ``num / den >= r`` elementwise."""
    if den * r.denominator < _INT64_SAFE and num.dtype != object:
        return num * r.denominator >= r.numerator * den
    return np.asarray(num.astype(object) * r.denominator >= r.numerator * den, dtype=bool)


@lru_cache(maxsize=16)
def _numerator_tables(E: Event) -> tuple[np.ndarray, ...]:
    """Numerators of ``Q_{K^c}(x_K; E)`` for every mask, keepdims layout."""
    space = E.space
    if table_cells(space) > MAX_TABLE_CELLS:
        raise CapacityError("per-mask conditional probability tables would exceed the memory cap")
    full = space.full_mask
    tables: list = [None] * (full + 1)
    tables[full] = E.grid.astype(np.int64 if space.denominator < _INT64_SAFE else object)
    for mask in range(full - 1, -1, -1):
        i = next(j for j in range(space.n) if not mask >> j & 1)
        tables[mask] = space.weighted_sum(tables[mask | 1 << i], [i])
    for t in tables:
        t.flags.writeable = False
    return tuple(tables)


def cond_prob_table(E: Event, K) -> CondProbTable:
    """All ``Q_{K^c}(y; E)`` for patterns ``y`` on ``K``."""
    space = E.space
    mask = as_mask(K, space.n)
    num = _numerator_tables(E)[mask]
    den = _denominator(space, mask)
    members = mask_members(mask)
    entries = {}
    for y in itertools.product(*(range(space.sizes[i]) for i in members)):
        idx = [0] * space.n
        for i, v in zip(members, y):
            idx[i] = v
        entries[y] = Fraction(int(num[tuple(idx)]), den)
    return CondProbTable(mask, entries)


def _threshold_tables(E: Event, r: Fraction) -> list[np.ndarray]:
    space = E.space
    nums = _numerator_tables(E)
    full = space.full_mask
    out = [_at_least(nums[m], _denominator(space, m), r) for m in range(full)]
    out.append(E.grid.copy() if r > 0 else np.ones(space.sizes, dtype=bool))
    return out


def threshold_set(E: Event, r, K) -> Event:
    """``E_{r,K}``: outcomes whose ``K`` coordinates give ``E`` conditional
    probability at least ``r``.  For ``K = [n]`` this is ``E`` when ``r > 0``
    and the whole space when ``r = 0``.
    """
    r = _check_r(r)
    space = E.space
    mask = as_mask(K, space.n)
    if mask == space.full_mask:
        return E if r > 0 else space.full()
    free = _free_axes(space, mask)
    num = space.weighted_sum(E.grid, free)
    keep = _at_least(num, _denominator(space, mask), r)
    return Event(space, np.broadcast_to(keep, space.sizes))


def inflate(E: Event, r) -> Event:
    """The ``r``-inflated set: union of ``E_{r,K}`` over all masks ``K``."""
    r = _check_r(r)
    space = E.space
    out = np.zeros(space.sizes, dtype=bool)
    for table in _threshold_tables(E, r):
        out |= table
    return Event(space, out)


def _subset_union_closure(tables: list[np.ndarray], n: int) -> list[np.ndarray]:
    """``up[M] = union of tables[L] over L subset of M`` (zeta transform)."""
    up = list(tables)
    for i in range(n):
        bit = 1 << i
        for M in range(len(up)):
            if M & bit:
                up[M] = up[M] | up[M ^ bit]
    return up


def st_box(A: Event, B: Event, st) -> Event:
    """Lenient box: ``union over disjoint K, L of A_{s,K} & B_{t,L}``.

    Every ordered disjoint pair is covered: for each ``K`` the union of
    ``B_{t,L}`` over ``L`` inside ``K^c`` is precomputed once by a subset
    closure, so the pair loop costs ``2^n`` intersections instead of ``3^n``.
    """
    _same_space(A, B)
    st = ThresholdPair.of(st)
    space = A.space
    check_mask_budget(space, 1 << space.n)
    ta = _threshold_tables(A, st.s)
    tb = _subset_union_closure(_threshold_tables(B, st.t), space.n)
    full = space.full_mask
    out = np.zeros(space.sizes, dtype=bool)
    for K in range(full + 1):
        out |= ta[K] & tb[full ^ K]
    return Event(space, out)


def st_box_complementary(A: Event, B: Event, st) -> Event:
    """The restricted variant of :func:`st_box` with ``L`` forced to ``K^c``."""
    _same_space(A, B)
    st = ThresholdPair.of(st)
    space = A.space
    ta = _threshold_tables(A, st.s)
    tb = _threshold_tables(B, st.t)
    full = space.full_mask
    out = np.zeros(space.sizes, dtype=bool)
    for K in range(full + 1):
        out |= ta[K] & tb[full ^ K]
    return Event(space, out)


def ess_inf(f: RealFunction, x, K) -> Fraction:
    """Essential infimum of ``f`` over the cylinder ``[x]_K``.

    The minimum of ``f(<x_K, v>_K)`` over completions ``v`` whose every
    coordinate has positive weight.
    """
    space = f.space
    if isinstance(x, (int, np.integer)):
        x = space.decode(int(x))
    mask = as_mask(K, space.n)
    index = [np.array([x[i]]) if mask >> i & 1 else space.alphabets[i].support
             for i in range(space.n)]
    return min(f.grid[np.ix_(*index)].flat)


def _ess_inf_tables(grid: np.ndarray, space: ProductSpace, reduce) -> list[np.ndarray]:
    """Per-mask essential infima, keepdims layout, via support-restricted scans."""
    full = space.full_mask
    tables: list = [None] * (full + 1)
    tables[full] = grid
    for mask in range(full - 1, -1, -1):
        i = next(j for j in range(space.n) if not mask >> j & 1)
        sub = np.take(tables[mask | 1 << i], space.alphabets[i].support, axis=i)
        tables[mask] = reduce(sub, axis=i, keepdims=True)
    return tables


def _disjoint_pairs(n: int):
    full = (1 << n) - 1
    for K in range(full + 1):
        rest = full ^ K
        L = 0
        while True:
            yield K, L
            if L == rest:
                break
            L = (L - rest) & rest


def eleven_box(A: Event, B: Event, complementary: bool = False) -> Event:
    """``A 11 B``: outcomes where disjoint ``K, L`` make ``A`` and ``B``
    hold almost surely given ``x_K`` and ``x_L`` respectively.

    Evaluated from support scans of the indicators, independently of the
    conditional-probability tables behind :func:`st_box`.  With
    ``complementary=True`` only ``L = K^c`` is tried; the two forms can
    differ, but only on outcomes of probability zero.
    """
    _same_space(A, B)
    space = A.space
    if table_cells(space) > MAX_TABLE_CELLS:
        raise CapacityError("per-mask support tables would exceed the memory cap")
    ia = _ess_inf_tables(A.grid, space, np.all)
    ib = _ess_inf_tables(B.grid, space, np.all)
    full = space.full_mask
    out = np.zeros(space.sizes, dtype=bool)
    if complementary:
        for K in range(full + 1):
            out |= ia[K] & ib[full ^ K]
    else:
        check_mask_budget(space, 3 ** space.n)
        for K, L in _disjoint_pairs(space.n):
            out |= ia[K] & ib[L]
    return Event(space, out)


def functional_bound_sides(f: RealFunction, g: RealFunction) -> tuple[Fraction, Fraction]:
    """Both sides of the functional inequality
    ``E max_{K, L disjoint} f_K(X) g_L(X) <= E f(X) E g(X)``,
    where ``f_K`` is the essential infimum of ``f`` over ``[x]_K``.

    Raises
    ------
    ValueError
        Unless both functions carry the nonnegative flag.
    """
    if f.space is not g.space and f.space != g.space:
        raise ValueError("functions live on different product spaces")
    if not (f.nonnegative and g.nonnegative):
        raise ValueError("functional_bound_sides needs functions flagged nonnegative")
    space = f.space
    fk = _ess_inf_tables(f.grid, space, np.min)
    gl = _ess_inf_tables(g.grid, space, np.min)
    best = np.full(space.sizes, Fraction(0), dtype=object)
    for K, L in _disjoint_pairs(space.n):
        best = np.maximum(best, fk[K] * gl[L])
    lhs = space.expectation(RealFunction(space, best.reshape(-1), nonnegative=True))
    rhs = space.expectation(f) * space.expectation(g)
    return lhs, rhs
