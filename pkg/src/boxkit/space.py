"""Finite product probability spaces with exact rational weights.

Outcomes of ``S = S_0 x ... x S_{n-1}`` are numbered in row-major
mixed-radix order, coordinate 0 being the most significant digit.  Events
are dense boolean vectors over that numbering.  Coordinates are 0-based
throughout; a coordinate subset ``K`` is an ``int`` bitmask with bit ``i``
standing for coordinate ``i`` (any iterable of indices is accepted too).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "MAX_OUTCOMES",
    "CapacityError",
    "SpaceMismatchError",
    "Alphabet",
    "ProductSpace",
    "Event",
    "CylinderPattern",
    "RealFunction",
    "as_mask",
    "mask_members",
    "parse_rational",
]

#: Hard cap on ``outcome_count`` for every exact operation.
MAX_OUTCOMES = 1 << 24

# int64 accumulators are used while every partial sum is bounded by this.
_INT64_SAFE = 1 << 62


class CapacityError(RuntimeError):
    """An exact computation would exceed a resource cap."""


class SpaceMismatchError(ValueError):
    """Events bound to different product spaces were combined."""


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"`` strings, ints and Fractions; floats are refused."""
    if isinstance(value, float):
        raise TypeError(f"floats are not exact, pass a 'p/q' string instead of {value!r}")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def as_mask(K, n: int) -> int:
    """Normalize a coordinate subset to an ``n``-bit mask.

    ``K`` may be an int bitmask or an iterable of 0-based coordinate indices.
    """
    if isinstance(K, (int, np.integer)):
        mask = int(K)
        if mask < 0 or mask >> n:
            raise ValueError(f"mask {mask:#b} does not fit {n} coordinates")
        return mask
    mask = 0
    for i in K:
        if not 0 <= i < n:
            raise ValueError(f"coordinate {i} out of range for n={n}")
        mask |= 1 << int(i)
    return mask


def mask_members(mask: int) -> tuple[int, ...]:
    """Coordinates in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class Alphabet:
    """One coordinate space ``S_i`` with its exact weights ``P_i``.

    Zero weights are allowed; they model zero-probability atoms.
    """

    weights: tuple[Fraction, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        weights = tuple(parse_rational(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if not weights:
            raise ValueError("an alphabet needs at least one symbol")
        if any(w < 0 for w in weights):
            raise ValueError(f"negative weight in {weights}")
        if sum(weights) != 1:
            raise ValueError(f"weights must sum to exactly 1, got {sum(weights)}")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(weights):
                raise ValueError("one label per symbol is required")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, size: int, labels: Sequence[str] | None = None) -> Alphabet:
        return cls(tuple(Fraction(1, size) for _ in range(size)), labels)

    @property
    def size(self) -> int:
        return len(self.weights)

    @cached_property
    def denominator(self) -> int:
        return reduce(math.lcm, (w.denominator for w in self.weights), 1)

    @cached_property
    def numerators(self) -> tuple[int, ...]:
        """Integer weights over the common :attr:`denominator`."""
        d = self.denominator
        return tuple(w.numerator * (d // w.denominator) for w in self.weights)

    @cached_property
    def support(self) -> np.ndarray:
        """Indices of positive-weight symbols."""
        return np.array([a for a, w in enumerate(self.weights) if w > 0], dtype=np.intp)


class ProductSpace:
    """The product ``S = prod S_i`` carrying the product measure ``P = prod P_i``.

    Parameters
    ----------
    alphabets : sequence of Alphabet, or of weight sequences
        One entry per coordinate.  Plain weight sequences are wrapped in
        :class:`Alphabet`.

    Raises
    ------
    CapacityError
        If the number of outcomes exceeds :data:`MAX_OUTCOMES`.
    """

    def __init__(self, alphabets: Iterable):
        alphabets = tuple(a if isinstance(a, Alphabet) else Alphabet(tuple(a)) for a in alphabets)
        if not alphabets:
            raise ValueError("a product space needs at least one coordinate")
        self.alphabets = alphabets
        self.n = len(alphabets)
        self.sizes = tuple(a.size for a in alphabets)
        self.outcome_count = math.prod(self.sizes)
        if self.outcome_count > MAX_OUTCOMES:
            raise CapacityError(
                f"{self.outcome_count} outcomes exceeds the exact-engine cap of {MAX_OUTCOMES}"
            )
        strides = [1] * self.n
        for i in range(self.n - 2, -1, -1):
            strides[i] = strides[i + 1] * self.sizes[i + 1]
        self.radix_strides = tuple(strides)
        self.full_mask = (1 << self.n) - 1
        self.denominator = math.prod(a.denominator for a in alphabets)

    @classmethod
    def uniform(cls, sizes: Sequence[int]) -> ProductSpace:
        return cls(Alphabet.uniform(s) for s in sizes)

    @classmethod
    def coins(cls, n: int, labels=("H", "T")) -> ProductSpace:
        return cls(Alphabet.uniform(2, labels) for _ in range(n))

    def __repr__(self):
        return f"ProductSpace(sizes={self.sizes})"

    def __eq__(self, other):
        return isinstance(other, ProductSpace) and self.alphabets == other.alphabets

    def __hash__(self):
        return hash(self.alphabets)

    # -- encoding ----------------------------------------------------------

    def encode(self, x: Sequence[int]) -> int:
        """Index of the outcome with coordinate vector ``x``."""
        if len(x) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(x)}")
        index = 0
        for i, (xi, size) in enumerate(zip(x, self.sizes)):
            if not 0 <= xi < size:
                raise ValueError(f"coordinate {i} value {xi} outside alphabet of size {size}")
            index = index * size + int(xi)
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.outcome_count:
            raise ValueError(f"outcome index {index} out of range")
        out = []
        for size in reversed(self.sizes):
            index, digit = divmod(index, size)
            out.append(digit)
        return tuple(reversed(out))

    def outcomes(self) -> Iterator[tuple[int, ...]]:
        return (self.decode(i) for i in range(self.outcome_count))

    def label(self, x: Sequence[int]) -> str | tuple[int, ...]:
        """Render an outcome with symbol labels when every alphabet has them."""
        if all(a.labels is not None for a in self.alphabets):
            return "".join(a.labels[v] for a, v in zip(self.alphabets, x))
        return tuple(int(v) for v in x)

    def coordinate(self, i: int) -> np.ndarray:
        """Value of coordinate ``i`` for every outcome, as a flat array."""
        return (np.arange(self.outcome_count) // self.radix_strides[i]) % self.sizes[i]

    # -- events ------------------------------------------------------------

    def full(self) -> Event:
        return Event(self, np.ones(self.outcome_count, dtype=bool))

    def empty(self) -> Event:
        return Event(self, np.zeros(self.outcome_count, dtype=bool))

    def event(self, outcomes: Iterable) -> Event:
        """Event from outcome indices or coordinate vectors."""
        bits = np.zeros(self.outcome_count, dtype=bool)
        for o in outcomes:
            bits[o if isinstance(o, (int, np.integer)) else self.encode(o)] = True
        return Event(self, bits)

    def event_where(self, predicate: Callable[[tuple[int, ...]], bool]) -> Event:
        return Event(self, np.fromiter((bool(predicate(x)) for x in self.outcomes()),
                                       dtype=bool, count=self.outcome_count))

    def cylinder(self, x, K) -> Event:
        """The ``K`` cylinder ``[x]_K`` of outcome ``x`` (index or vector)."""
        if isinstance(x, (int, np.integer)):
            x = self.decode(int(x))
        else:
            self.encode(x)
        mask = as_mask(K, self.n)
        bits = np.ones(self.outcome_count, dtype=bool)
        for i in mask_members(mask):
            bits &= self.coordinate(i) == x[i]
        return Event(self, bits)

    # -- measure -----------------------------------------------------------

    def _dtype(self):
        return np.int64 if self.denominator < _INT64_SAFE else object

    def weight_vector(self, i: int) -> np.ndarray:
        """Integer weights of coordinate ``i`` over its own denominator."""
        return np.array(self.alphabets[i].numerators, dtype=self._dtype())

    def weighted_sum(self, grid: np.ndarray, axes: Iterable[int]) -> np.ndarray:
        """Contract ``grid`` against the integer weights along ``axes``.

        Summed axes are kept with length 1.  The result is a numerator over
        ``prod(alphabets[i].denominator for i in axes)``.
        """
        exact_objects = grid.dtype == object
        out = grid if exact_objects else grid.astype(self._dtype())
        for axis in sorted(axes, reverse=True):
            w = self.weight_vector(axis)
            if exact_objects:
                w = w.astype(object)
            out = np.expand_dims(np.tensordot(out, w, axes=([axis], [0])), axis)
        return out

    def point_prob(self, x) -> Fraction:
        if isinstance(x, (int, np.integer)):
            x = self.decode(int(x))
        return math.prod((a.weights[v] for a, v in zip(self.alphabets, x)), start=Fraction(1))

    def prob(self, A: Event) -> Fraction:
        """Exact ``P(A)``."""
        self._check(A)
        num = self.weighted_sum(A.grid, range(self.n))
        return Fraction(int(num.reshape(())), self.denominator)

    def marginal_prob(self, assignments: Iterable[Sequence[int]], K) -> Fraction:
        """``P_{K^c}`` mass of a set of assignments to the coordinates outside ``K``.

        Each assignment lists values for the coordinates of ``K^c`` in
        ascending coordinate order.  Duplicates count once.
        """
        rest = mask_members(self.full_mask & ~as_mask(K, self.n))
        total = Fraction(0)
        for v in set(tuple(a) for a in assignments):
            if len(v) != len(rest):
                raise ValueError(f"assignment {v} does not match coordinates {rest}")
            p = Fraction(1)
            for i, vi in zip(rest, v):
                if not 0 <= vi < self.sizes[i]:
                    raise ValueError(f"value {vi} outside alphabet {i}")
                p *= self.alphabets[i].weights[vi]
            total += p
        return total

    def expectation(self, f: RealFunction) -> Fraction:
        """Exact ``E f(X) = sum_x f(x) P({x})``."""
        self._check(f)
        num = self.weighted_sum(f.grid, range(self.n)).reshape(())[()]
        return Fraction(num) / self.denominator

    def _check(self, *objs):
        for o in objs:
            if o.space is not self and o.space != self:
                raise SpaceMismatchError("object is bound to a different product space")


class Event:
    """A subset of a :class:`ProductSpace`, stored as a read-only bit vector.

    Supports ``&``, ``|``, ``-``, ``^``, ``~``, ``<=`` (subset), ``==``,
    ``len`` and ``in`` with indices or coordinate vectors.
    """

    __slots__ = ("space", "bits")

    def __init__(self, space: ProductSpace, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool).reshape(-1)
        if bits.shape != (space.outcome_count,):
            raise ValueError(f"expected {space.outcome_count} bits, got {bits.shape[0]}")
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        self.space = space
        self.bits = bits

    @property
    def grid(self) -> np.ndarray:
        """The bits as an array of shape ``space.sizes``."""
        return self.bits.reshape(self.space.sizes)

    def prob(self) -> Fraction:
        return self.space.prob(self)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def outcomes(self) -> list[tuple[int, ...]]:
        return [self.space.decode(int(i)) for i in self.indices()]

    def is_full(self) -> bool:
        return bool(self.bits.all())

    def is_empty(self) -> bool:
        return not self.bits.any()

    def _other(self, other: Event) -> np.ndarray:
        if not isinstance(other, Event):
            return NotImplemented
        if other.space is not self.space and other.space != self.space:
            raise SpaceMismatchError("events live on different product spaces")
        return other.bits

    def __and__(self, other):
        return Event(self.space, self.bits & self._other(other))

    def __or__(self, other):
        return Event(self.space, self.bits | self._other(other))

    def __xor__(self, other):
        return Event(self.space, self.bits ^ self._other(other))

    def __sub__(self, other):
        return Event(self.space, self.bits & ~self._other(other))

    def __invert__(self):
        return Event(self.space, ~self.bits)

    def __le__(self, other):
        return not (self.bits & ~self._other(other)).any()

    def __ge__(self, other):
        return other <= self

    def __lt__(self, other):
        return self <= other and self != other

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return (other.space is self.space or other.space == self.space) and np.array_equal(
            self.bits, other.bits)

    def __hash__(self):
        return hash((self.space, self.bits.tobytes()))

    def __len__(self):
        return int(np.count_nonzero(self.bits))

    def __contains__(self, x):
        if not isinstance(x, (int, np.integer)):
            x = self.space.encode(x)
        return bool(self.bits[x])

    def __repr__(self):
        return f"Event({len(self)}/{self.space.outcome_count} outcomes of {self.space!r})"


@dataclass(frozen=True)
class CylinderPattern:
    """Values ``x_K`` fixed on the coordinates of ``mask`` (ascending order)."""

    mask: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(mask_members(self.mask)) != len(self.values):
            raise ValueError("one value per coordinate in the mask is required")

    @classmethod
    def of(cls, x: Sequence[int], K, n: int | None = None) -> CylinderPattern:
        """Project the outcome vector ``x`` onto ``K``."""
        mask = as_mask(K, len(x) if n is None else n)
        return cls(mask, tuple(int(x[i]) for i in mask_members(mask)))

    def splice(self, v: Sequence[int], n: int) -> tuple[int, ...]:
        """The outcome ``<y, v>_K``: pattern values on ``K``, ``v`` elsewhere.

        ``v`` is either a full length-``n`` vector (its ``K`` entries are
        ignored) or lists the ``K^c`` values in ascending coordinate order.
        """
        inside = dict(zip(mask_members(self.mask), self.values))
        if len(v) == n:
            return tuple(inside.get(i, int(v[i])) for i in range(n))
        rest = iter(v)
        out = tuple(inside[i] if i in inside else int(next(rest)) for i in range(n))
        if next(rest, None) is not None:
            raise ValueError("too many completion values")
        return out


class RealFunction:
    """An exact rational-valued function on the outcomes of a space."""

    __slots__ = ("space", "values", "nonnegative")

    def __init__(self, space: ProductSpace, values: Iterable, nonnegative: bool = False):
        vals = np.empty(space.outcome_count, dtype=object)
        items = list(values)
        if len(items) != space.outcome_count:
            raise ValueError(f"expected {space.outcome_count} values, got {len(items)}")
        vals[:] = [parse_rational(v) for v in items]
        if nonnegative and any(v < 0 for v in vals):
            raise ValueError("nonnegative flag set but a value is negative")
        vals.flags.writeable = False
        self.space = space
        self.values = vals
        self.nonnegative = nonnegative

    @classmethod
    def of(cls, space: ProductSpace, f: Callable[[tuple[int, ...]], object],
           nonnegative: bool = False) -> RealFunction:
        return cls(space, (f(x) for x in space.outcomes()), nonnegative)

    @classmethod
    def indicator(cls, event: Event) -> RealFunction:
        return cls(event.space, (int(b) for b in event.bits), nonnegative=True)

    @classmethod
    def constant(cls, space: ProductSpace, c) -> RealFunction:
        c = parse_rational(c)
        return cls(space, [c] * space.outcome_count, nonnegative=c >= 0)

    @property
    def grid(self) -> np.ndarray:
        return self.values.reshape(self.space.sizes)

    def __call__(self, x) -> Fraction:
        if not isinstance(x, (int, np.integer)):
            x = self.space.encode(x)
        return self.values[x]
