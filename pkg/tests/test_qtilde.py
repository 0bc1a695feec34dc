import random
from fractions import Fraction

import pytest

from dimlab import cylinder, expand, fixtures, q_min, validate_matrix
from dimlab.errors import (
    ColumnNotStochastic,
    DigitOutOfRange,
    EmptyPeriod,
    NonPositiveEntry,
    OutOfUnitInterval,
)
from dimlab.qtilde import ProbColumn, QMatrix

HALF = Fraction(1, 2)


def random_word(matrix, rank, rng):
    return tuple(rng.randrange(matrix.n(j)) for j in range(1, rank + 1))


class TestValidation:
    def test_uniform_binary_valid(self):
        q = validate_matrix([], [["1/2", "1/2"]])
        assert q_min(q) == HALF

    def test_non_stochastic_column(self):
        with pytest.raises(ColumnNotStochastic):
            validate_matrix([], [["1/3", "1/3", "1/4"]])

    def test_mixed_prefix_period(self):
        q = validate_matrix([["1/4", "3/4"]], [["1/2", "1/2"]])
        assert q_min(q) == Fraction(1, 4)

    def test_empty_period(self):
        with pytest.raises(EmptyPeriod):
            validate_matrix([["1/2", "1/2"]], [])

    def test_zero_entry_rejected_for_geometry(self):
        with pytest.raises(NonPositiveEntry):
            validate_matrix([], [["0", "1"]])

    def test_ternary_q_min(self):
        assert q_min(fixtures.uniform_ternary()) == Fraction(1, 3)

    def test_roundtrip_dict(self):
        q = fixtures.mixed_prefix_period()
        assert QMatrix.from_dict(q.to_dict()) == q


class TestCylinder:
    def test_ternary_word(self):
        c = cylinder(fixtures.uniform_ternary(), (0, 2))
        assert (c.left, c.right) == (Fraction(2, 9), Fraction(1, 3))
        assert c.length == Fraction(1, 9)

    def test_binary_word(self):
        c = cylinder(fixtures.uniform_binary(), (1,))
        assert (c.left, c.right) == (HALF, Fraction(1))

    def test_mixed_word(self):
        c = cylinder(fixtures.mixed_prefix_period(), (1, 0))
        assert (c.left, c.right) == (Fraction(1, 4), Fraction(5, 8))
        assert c.length == Fraction(3, 8)

    def test_digit_out_of_range(self):
        with pytest.raises(DigitOutOfRange):
            cylinder(fixtures.uniform_binary(), (0, 2))

    def test_empty_word_is_unit_interval(self):
        c = cylinder(fixtures.uniform_binary(), ())
        assert (c.left, c.right) == (Fraction(0), Fraction(1))


class TestExpand:
    def test_zero(self):
        assert expand(fixtures.uniform_binary(), 0, 3) == (0, 0, 0)

    def test_quarter_ternary(self):
        # 1/4 = 0.020202... in base 3
        assert expand(fixtures.uniform_ternary(), Fraction(1, 4), 4) == (0, 2, 0, 2)

    def test_mixed_half(self):
        assert expand(fixtures.mixed_prefix_period(), HALF, 2) == (1, 0)

    def test_out_of_interval(self):
        with pytest.raises(OutOfUnitInterval):
            expand(fixtures.uniform_binary(), Fraction(3, 2), 2)
        with pytest.raises(OutOfUnitInterval):
            expand(fixtures.uniform_binary(), 1, 2)


TEST_MATRICES = [
    fixtures.uniform_binary(),
    fixtures.uniform_ternary(),
    fixtures.mixed_prefix_period(),
]


@pytest.mark.parametrize("matrix", TEST_MATRICES)
def test_tiling_and_disjointness(matrix):
    # rank-k cylinders tile [0, 1) exactly, in digit order
    for rank in range(1, 6):
        words = [()]
        for j in range(1, rank + 1):
            words = [w + (a,) for w in words for a in range(matrix.n(j))]
        cyls = [cylinder(matrix, w) for w in words]
        assert cyls[0].left == 0
        assert cyls[-1].right == 1
        for a, b in zip(cyls, cyls[1:]):
            assert a.right == b.left


@pytest.mark.parametrize("matrix", TEST_MATRICES)
def test_length_product_law(matrix):
    rng = random.Random(7)
    for _ in range(1000):
        w = random_word(matrix, rng.randrange(1, 12), rng)
        c = cylinder(matrix, w)
        product = Fraction(1)
        for j, a in enumerate(w, start=1):
            product *= matrix.column(j).entries[a]
        assert c.length == product


@pytest.mark.parametrize("matrix", TEST_MATRICES)
def test_nesting(matrix):
    rng = random.Random(11)
    for _ in range(200):
        w = random_word(matrix, rng.randrange(0, 8), rng)
        parent = cylinder(matrix, w)
        for a in range(matrix.n(len(w) + 1)):
            child = cylinder(matrix, w + (a,))
            assert parent.left <= child.left < child.right <= parent.right


@pytest.mark.parametrize("matrix", TEST_MATRICES)
def test_expand_round_trip(matrix):
    rng = random.Random(13)
    den = 999983  # prime, so x is never a cylinder endpoint
    for _ in range(1000):
        x = Fraction(rng.randrange(1, den), den)
        k = rng.randrange(1, 21)
        w = expand(matrix, x, k)
        c = cylinder(matrix, w)
        assert c.contains(x)
        assert expand(matrix, c.midpoint(), k) == w


def test_q_min_monotone_under_period_removal():
    cols = [ProbColumn((Fraction(1, 5), Fraction(4, 5))),
            ProbColumn((HALF, HALF)),
            ProbColumn((Fraction(1, 3), Fraction(2, 3)))]
    full = QMatrix((), tuple(cols))
    for drop in range(len(cols)):
        reduced = QMatrix((), tuple(c for i, c in enumerate(cols) if i != drop))
        assert q_min(reduced) >= q_min(full)
