"""Exact numeration systems built from column-stochastic matrices.

A matrix is a finite prefix of probability columns plus a nonempty periodic
tail; column j (1-indexed) partitions every rank-(j-1) interval into n_j
subintervals whose relative lengths are the column entries.  All endpoint
arithmetic is done with `fractions.Fraction`, so cylinder identities
(tiling, nesting, length products) hold exactly at any rank.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    ColumnNotStochastic,
    DigitOutOfRange,
    EmptyPeriod,
    NonPositiveEntry,
    OutOfUnitInterval,
    ShapeMismatch,
)

RationalLike = Union[Fraction, int, str]
DigitWord = tuple  # tuple[int, ...]; the empty word addresses [0, 1)

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(value: RationalLike) -> Fraction:
    """Convert an int, "num/den" string, or Fraction to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        # floats are exact binary rationals; accept them verbatim
        return Fraction(*value.as_integer_ratio())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def ln(value: Fraction) -> float:
    """Natural log of a positive rational, safe for huge numerators/denominators."""
    if value <= 0:
        raise ValueError(f"ln of non-positive rational {value}")
    return math.log(value.numerator) - math.log(value.denominator)


@dataclass(frozen=True)
class ProbColumn:
    """One probability column: entries in [0, 1] summing to exactly 1.

    Strict positivity (needed for the geometry matrix) is enforced by
    QMatrix; the measure matrix may carry zero or unit entries.
    """

    entries: tuple  # tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(to_fraction(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) < 1:
            raise ColumnNotStochastic("column has no entries")
        for e in entries:
            if e < 0 or e > 1:
                raise NonPositiveEntry(f"entry {e} outside [0, 1]")
        if sum(entries) != ONE:
            raise ColumnNotStochastic(
                f"column sums to {sum(entries)}, expected 1"
            )

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def cumulative(self) -> tuple:
        """Prefix sums (c_0=0, c_1, ..., c_n=1); c_a is the left offset of digit a."""
        cached = self.__dict__.get("_cumulative")
        if cached is None:
            acc = ZERO
            sums = [ZERO]
            for e in self.entries:
                acc += e
                sums.append(acc)
            cached = tuple(sums)
            self.__dict__["_cumulative"] = cached
        return cached

    def min_entry(self) -> Fraction:
        return min(self.entries)


@dataclass(frozen=True)
class ColumnMatrix:
    """Finite prefix + periodic tail of probability columns, 1-indexed."""

    prefix: tuple  # tuple[ProbColumn, ...]
    period: tuple  # tuple[ProbColumn, ...], nonempty

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise EmptyPeriod("periodic tail must contain at least one column")

    def column(self, j: int) -> ProbColumn:
        if j < 1:
            raise DigitOutOfRange(f"column index {j} must be >= 1")
        m = len(self.prefix)
        if j <= m:
            return self.prefix[j - 1]
        return self.period[(j - m - 1) % len(self.period)]

    def n(self, j: int) -> int:
        return self.column(j).n

    def columns(self) -> tuple:
        return self.prefix + self.period

    def min_entry(self) -> Fraction:
        return min(c.min_entry() for c in self.columns())

    def shape_matches(self, other: "ColumnMatrix", upto: int | None = None) -> bool:
        if upto is not None:
            return all(self.n(j) == other.n(j) for j in range(1, upto + 1))
        lcm = math.lcm(len(self.period), len(other.period))
        upto = max(len(self.prefix), len(other.prefix)) + lcm
        return all(self.n(j) == other.n(j) for j in range(1, upto + 1))

    def is_digit_uniform(self) -> bool:
        """True when every column has all-equal entries."""
        return all(len(set(c.entries)) == 1 for c in self.columns())

    def to_dict(self) -> dict:
        return {
            "prefix": [[str(e) for e in c.entries] for c in self.prefix],
            "period": [[str(e) for e in c.entries] for c in self.period],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ColumnMatrix":
        prefix = [ProbColumn(tuple(to_fraction(e) for e in col))
                  for col in doc.get("prefix", [])]
        period = [ProbColumn(tuple(to_fraction(e) for e in col))
                  for col in doc.get("period", [])]
        return cls(tuple(prefix), tuple(period))


class QMatrix(ColumnMatrix):
    """Geometry matrix: every entry strictly inside (0, 1)."""

    def __post_init__(self):
        super().__post_init__()
        for col in self.columns():
            for e in col.entries:
                if e <= 0 or e >= 1:
                    raise NonPositiveEntry(
                        f"geometry entry {e} must lie strictly in (0, 1)"
                    )


class PMatrix(ColumnMatrix):
    """Measure matrix: zero (and hence unit) entries are permitted."""


def validate_matrix(prefix: Iterable[Sequence[RationalLike]],
                    period: Iterable[Sequence[RationalLike]]) -> QMatrix:
    """Build a QMatrix from raw column entry lists, validating everything."""
    pre = tuple(ProbColumn(tuple(to_fraction(e) for e in col)) for col in prefix)
    per = tuple(ProbColumn(tuple(to_fraction(e) for e in col)) for col in period)
    return QMatrix(pre, per)


def validate_pmatrix(prefix: Iterable[Sequence[RationalLike]],
                     period: Iterable[Sequence[RationalLike]],
                     paired: ColumnMatrix | None = None) -> PMatrix:
    """Build a PMatrix; optionally check digit counts against a paired matrix."""
    pre = tuple(ProbColumn(tuple(to_fraction(e) for e in col)) for col in prefix)
    per = tuple(ProbColumn(tuple(to_fraction(e) for e in col)) for col in period)
    p = PMatrix(pre, per)
    if paired is not None and not p.shape_matches(paired):
        raise ShapeMismatch("digit counts differ from the paired matrix")
    return p


def q_min(matrix: ColumnMatrix) -> Fraction:
    """Minimum entry over the prefix and one period (finite, so inf = min)."""
    return matrix.min_entry()


@dataclass(frozen=True)
class Cylinder:
    """A digit word together with its exact interval [left, right)."""

    word: tuple
    left: Fraction
    right: Fraction

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    @property
    def rank(self) -> int:
        return len(self.word)

    def contains(self, x: Fraction) -> bool:
        # left-closed convention: the left endpoint belongs to the cylinder
        return self.left <= x < self.right

    def midpoint(self) -> Fraction:
        return (self.left + self.right) / 2


def cylinder(matrix: ColumnMatrix, word: Sequence[int]) -> Cylinder:
    """Exact interval of the cylinder addressed by `word` under `matrix`.

    left = sum over positions of (cumulative column mass below the digit)
    scaled by the product of earlier digit lengths; length is the plain
    product of chosen entries.
    """
    left = ZERO
    length = ONE
    for j, a in enumerate(word, start=1):
        col = matrix.column(j)
        if not 0 <= a < col.n:
            raise DigitOutOfRange(
                f"digit {a} out of range for column {j} (n={col.n})"
            )
        left += col.cumulative[a] * length
        length *= col.entries[a]
    return Cylinder(tuple(word), left, left + length)


def expand(matrix: ColumnMatrix, x: RationalLike, rank: int) -> tuple:
    """The unique rank-`rank` digit word whose cylinder contains x.

    Cylinder endpoints use the left-closed convention, so every rational in
    [0, 1) has exactly one word per rank.
    """
    x = to_fraction(x)
    if not ZERO <= x < ONE:
        raise OutOfUnitInterval(f"{x} is not in [0, 1)")
    digits = []
    left = ZERO
    length = ONE
    for j in range(1, rank + 1):
        col = matrix.column(j)
        # position of x inside the current cylinder, in [0, 1)
        t = (x - left) / length
        a = bisect_right(col.cumulative, t) - 1
        if a >= col.n:  # t == 1 cannot happen for x < right
            a = col.n - 1
        digits.append(a)
        left += col.cumulative[a] * length
        length *= col.entries[a]
    return tuple(digits)
