"""Measure-free box operations: cylinder sets, the classical box, cylindrical cores."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .space import CapacityError, Event, SpaceMismatchError, as_mask, mask_members

__all__ = [
    "BoxWitness",
    "MAX_TABLE_CELLS",
    "MAX_MASK_WORK",
    "cylinder_set",
    "cylinder_set_tables",
    "classical_box",
    "find_witness",
    "core",
]

#: Cap on the total cells of all 2^n per-mask tables of one event.
MAX_TABLE_CELLS = 1 << 27
#: Cap on (number of mask pairs visited) x (outcome count).
MAX_MASK_WORK = 1 << 38


@dataclass(frozen=True)
class BoxWitness:
    """Disjoint coordinate masks certifying ``outcome`` in ``A box B``."""

    outcome: int
    K: int
    L: int

    def __post_init__(self):
        if self.K & self.L:
            raise ValueError("witness masks must be disjoint")


def _same_space(A: Event, B: Event):
    if A.space is not B.space and A.space != B.space:
        raise SpaceMismatchError("events live on different product spaces")


def table_cells(space) -> int:
    """Total cells across one table per mask, each indexed by ``x_K`` only."""
    out = 1
    for s in space.sizes:
        out *= 1 + s
    return out


def check_mask_budget(space, pairs: int):
    if pairs * space.outcome_count > MAX_MASK_WORK:
        raise CapacityError(
            f"{pairs} mask pairs over {space.outcome_count} outcomes exceeds the work cap")


def _lowest_missing(mask: int, n: int) -> int:
    for i in range(n):
        if not mask >> i & 1:
            return i
    raise ValueError("mask is full")


def cylinder_set(A: Event, K) -> Event:
    """``[A]_K``: outcomes whose whole ``K`` cylinder lies inside ``A``.

    Marks every ``K``-pattern that occurs in the complement of ``A`` and
    keeps the outcomes whose pattern is unmarked.
    """
    space = A.space
    mask = as_mask(K, space.n)
    free = tuple(i for i in range(space.n) if not mask >> i & 1)
    marked = np.any(~A.grid, axis=free, keepdims=True)
    return Event(space, np.broadcast_to(~marked, space.sizes))


@lru_cache(maxsize=16)
def cylinder_set_tables(A: Event) -> tuple[np.ndarray, ...]:
    """``[A]_K`` for every mask ``K``, as boolean arrays over ``x_K``.

    Entry ``K`` has length-1 axes for the coordinates outside ``K`` so it
    broadcasts against the full grid.  The projection of ``A^c`` onto ``K``
    is obtained from the one onto ``K + {i}`` by a single-axis reduction.
    """
    space = A.space
    if table_cells(space) > MAX_TABLE_CELLS:
        raise CapacityError("per-mask cylinder tables would exceed the memory cap")
    full = space.full_mask
    marked: list = [None] * (full + 1)
    marked[full] = ~A.grid
    for mask in range(full - 1, -1, -1):
        i = _lowest_missing(mask, space.n)
        marked[mask] = marked[mask | 1 << i].any(axis=i, keepdims=True)
    tables = tuple(~m for m in marked)
    for t in tables:
        t.flags.writeable = False
    return tables


def classical_box(A: Event, B: Event) -> Event:
    """``A box B = union over K of [A]_K & [B]_{K^c}``."""
    _same_space(A, B)
    space = A.space
    check_mask_budget(space, 1 << space.n)
    ta = cylinder_set_tables(A)
    tb = cylinder_set_tables(B)
    full = space.full_mask
    out = np.zeros(space.sizes, dtype=bool)
    for K in range(full + 1):
        out |= ta[K] & tb[full ^ K]
    return Event(space, out)


def _at(table: np.ndarray, x: tuple[int, ...]) -> bool:
    return bool(table[tuple(v if dim > 1 else 0 for v, dim in zip(x, table.shape))])


def find_witness(A: Event, B: Event, x) -> BoxWitness | None:
    """Smallest ``K`` (as an integer mask) with ``[x]_K in A`` and some
    disjoint ``L`` with ``[x]_L in B``; ``L`` is then the smallest such mask
    inside ``K^c``.  ``None`` when ``x`` is not in ``A box B``.
    """
    _same_space(A, B)
    space = A.space
    index = x if isinstance(x, (int, np.integer)) else space.encode(x)
    vec = space.decode(int(index))
    ta = cylinder_set_tables(A)
    tb = cylinder_set_tables(B)
    full = space.full_mask
    for K in range(full + 1):
        rest = full ^ K
        if _at(ta[K], vec) and _at(tb[rest], vec):
            L = rest
            sub = 0
            # [B]_L grows with L, so the complement always qualifies
            while True:
                if _at(tb[sub], vec):
                    L = sub
                    break
                if sub == rest:
                    break
                sub = (sub - rest) & rest
            return BoxWitness(int(index), K, L)
    return None


def core(E: Event) -> Event:
    """Cylindrical core: union of ``[E]_K`` over ``|K| <= n - 1``."""
    space = E.space
    tables = cylinder_set_tables(E)
    out = np.zeros(space.sizes, dtype=bool)
    for K in range(space.full_mask):
        out |= tables[K]
    return Event(space, out)


def witness_masks(w: BoxWitness) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return mask_members(w.K), mask_members(w.L)
