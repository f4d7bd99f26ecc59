import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zhanchain.matrix import (
    DimensionMismatch,
    LogScaledTrace,
    Matrix,
    NegativeEntry,
    NonFiniteEntry,
    entrywise_square,
    hadamard,
    matmul,
    matrices_close,
    new_checked,
    parse_matrix_text,
    read_matrix,
    spectral_radius_2x2,
    trace_of_power,
    write_matrix,
)


def rand_matrix(rng, n, density=1.0):
    a = rng.random((n, n))
    if density < 1.0:
        a *= rng.random((n, n)) < density
    return Matrix(a)


# -- construction -------------------------------------------------------------

def test_new_checked_counterexample_a():
    a = new_checked(2, [0, 0, 1, 0])
    assert a.tolist() == [[0, 0], [1, 0]]
    assert a.entry(1, 0) == 1.0
    assert a.entries == (0.0, 0.0, 1.0, 0.0)


def test_new_checked_one_by_one_zero():
    a = new_checked(1, [0])
    assert a.n == 1 and a.is_zero()


def test_new_checked_negative_entry():
    with pytest.raises(NegativeEntry) as info:
        new_checked(2, [1, -1, 0, 1])
    assert (info.value.i, info.value.j) == (0, 1)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_new_checked_non_finite(bad):
    with pytest.raises(NonFiniteEntry) as info:
        new_checked(2, [1, 0, bad, 1])
    assert (info.value.i, info.value.j) == (1, 0)


@pytest.mark.parametrize("n, entries", [(2, [1, 2, 3]), (0, []), (3, [1] * 8)])
def test_new_checked_dimension(n, entries):
    with pytest.raises(DimensionMismatch):
        new_checked(n, entries)


def test_matrix_is_immutable():
    a = Matrix.ones(2)
    with pytest.raises(ValueError):
        a.array[0, 0] = 5.0
    src = np.ones((2, 2))
    b = Matrix(src)
    src[0, 0] = 7.0
    assert b.entry(0, 0) == 1.0


# -- products -----------------------------------------------------------------

def test_hadamard_counterexample_is_zero():
    a = Matrix.from_rows([[0, 0], [1, 0]])
    b = Matrix.from_rows([[1, 1], [0, 1]])
    assert hadamard(a, b) == Matrix.zeros(2)


def test_hadamard_with_ones_is_identity_op():
    a = rand_matrix(np.random.default_rng(3), 4)
    assert hadamard(a, Matrix.ones(4)) == a


@pytest.mark.parametrize("x, y", [(2.0, 3.0), (0.5, 10.0)])
def test_hadamard_unbounded_family_is_identity(x, y):
    a = Matrix.from_rows([[1, x], [0, 1]])
    b = Matrix.from_rows([[1, 0], [y, 1]])
    assert hadamard(a, b) == Matrix.identity(2)


@pytest.mark.parametrize("x, y", [(2.0, 3.0), (0.5, 10.0)])
def test_matmul_unbounded_family(x, y):
    a = Matrix.from_rows([[1, x], [0, 1]])
    b = Matrix.from_rows([[1, 0], [y, 1]])
    assert matmul(a, b) == Matrix.from_rows([[1 + x * y, x], [y, 1]])


def test_matmul_counterexample_pair():
    # by hand: row 0 of A is zero; row 1 of A picks row 0 of B
    a = Matrix.from_rows([[0, 0], [1, 0]])
    b = Matrix.from_rows([[1, 1], [0, 1]])
    assert matmul(a, b) == Matrix.from_rows([[0, 0], [1, 1]])


def test_matmul_identity():
    a = rand_matrix(np.random.default_rng(4), 5)
    assert matrices_close(matmul(Matrix.identity(5), a), a)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hadamard(Matrix.ones(2), Matrix.ones(3))
    with pytest.raises(DimensionMismatch):
        matmul(Matrix.ones(2), Matrix.ones(3))


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[1, 2], [0, 1]], [[1, 4], [0, 1]]),
        ([[0, 0], [0, 0]], [[0, 0], [0, 0]]),
        ([[1, 1], [1, 1]], [[1, 1], [1, 1]]),
    ],
)
def test_entrywise_square(rows, expected):
    assert entrywise_square(Matrix.from_rows(rows)) == Matrix.from_rows(expected)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_products_closed_and_hadamard_algebra(n, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rand_matrix(rng, n, 0.6) for _ in range(3))
    for m in (hadamard(a, b), matmul(a, b), entrywise_square(a)):
        new_checked(m.n, m.entries)
    assert hadamard(a, b) == hadamard(b, a)
    # floating multiplication is only associative up to rounding
    assert matrices_close(hadamard(hadamard(a, b), c), hadamard(a, hadamard(b, c)))
    assert entrywise_square(a) == hadamard(a, a)


# -- traces of powers ---------------------------------------------------------

def test_trace_of_power_swap():
    swap = Matrix.from_rows([[0, 1], [1, 0]])
    assert trace_of_power(swap, 3).value == 0.0
    assert trace_of_power(swap, 3).is_zero
    assert trace_of_power(swap, 4).value == 2.0


@pytest.mark.parametrize("n, m", [(1, 1), (3, 7), (5, 64)])
def test_trace_of_power_identity(n, m):
    assert trace_of_power(Matrix.identity(n), m).value == pytest.approx(n, rel=1e-15)


def test_trace_of_power_nilpotent():
    j = Matrix.from_rows([[0, 1], [0, 0]])
    assert trace_of_power(j, 1).is_zero
    assert trace_of_power(j, 5).is_zero


def test_trace_of_power_huge_stays_finite_in_log_domain():
    a = Matrix(np.full((4, 4), 1e200))
    t = trace_of_power(a, 10)
    # J^10 = 4^9 J, so Tr = 4^10 * 1e2000
    expected_log = 10 * math.log(4) + 2000 * math.log(10)
    assert t.log() == pytest.approx(expected_log, rel=1e-13)
    assert t.value == math.inf


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_trace_of_power_matches_naive_product(n, m, seed):
    rng = np.random.default_rng(seed)
    a = rand_matrix(rng, n, 0.7)
    naive = np.eye(n)
    for _ in range(m):
        naive = naive @ a.array
    expected = float(np.trace(naive))
    t = trace_of_power(a, m)
    if expected == 0.0:
        assert t.is_zero
    else:
        assert t.value == pytest.approx(expected, rel=1e-10)


def test_trace_of_power_rejects_zero_exponent():
    with pytest.raises(ValueError):
        trace_of_power(Matrix.ones(2), 0)


# -- log-scaled values --------------------------------------------------------

@settings(max_examples=300)
@given(st.floats(min_value=1e-300, max_value=1e300))
def test_log_scaled_round_trip(v):
    t = LogScaledTrace.from_value(v)
    assert 1.0 <= t.mantissa < math.e
    assert t.log_scale == math.floor(t.log_scale)
    assert t.value == pytest.approx(v, rel=1e-15)


def test_log_scaled_zero_and_uniqueness():
    assert LogScaledTrace.from_value(0.0) == LogScaledTrace(0.0, 0.0)
    u, v = LogScaledTrace.normalize(5.0, 3.0), LogScaledTrace.normalize(5.0 * math.e, 2.0)
    assert u.log_scale == v.log_scale == 4.0
    assert u.mantissa == pytest.approx(v.mantissa, rel=1e-15)


def test_log_scaled_comparisons():
    small, big = LogScaledTrace.from_value(2.0), LogScaledTrace.normalize(1.0, 800.0)
    assert small.le(big) and not big.le(small)
    assert LogScaledTrace(0.0).le(small)
    assert not small.le(LogScaledTrace(0.0))
    assert small.le(LogScaledTrace.from_value(2.0 * (1 - 1e-12)), rtol=1e-9)
    assert small.root(1) == pytest.approx(2.0)
    assert big.root(800) == pytest.approx(math.e)


# -- closed-form 2x2 ----------------------------------------------------------

def test_spectral_radius_2x2_examples():
    assert spectral_radius_2x2(Matrix.from_rows([[1, 1], [0, 1]])) == 1.0
    # trace 6, det 1: (6 + sqrt(32)) / 2
    assert spectral_radius_2x2(Matrix.from_rows([[5, 2], [2, 1]])) == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-15)
    assert spectral_radius_2x2(Matrix.from_rows([[0, 0], [1, 1]])) == 1.0
    assert spectral_radius_2x2(Matrix.zeros(2)) == 0.0


def test_spectral_radius_2x2_requires_2x2():
    with pytest.raises(DimensionMismatch):
        spectral_radius_2x2(Matrix.ones(3))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=4, max_size=4))
def test_spectral_radius_2x2_matches_eigvals(vals):
    a = new_checked(2, vals)
    ref = max(abs(np.linalg.eigvals(a.array)))
    assert spectral_radius_2x2(a) == pytest.approx(ref, rel=1e-9, abs=1e-9)


# -- file formats -------------------------------------------------------------

def test_text_round_trip(tmp_path):
    a = rand_matrix(np.random.default_rng(9), 4, 0.5)
    write_matrix(a, tmp_path / "a.mat")
    assert read_matrix(tmp_path / "a.mat") == a


def test_json_round_trip(tmp_path):
    a = rand_matrix(np.random.default_rng(10), 3)
    write_matrix(a, tmp_path / "a.json")
    assert read_matrix(tmp_path / "a.json") == a


def test_text_format_parses_example():
    a = parse_matrix_text("2\n0 1\n1 0\n")
    assert a == Matrix.from_rows([[0, 1], [1, 0]])


@pytest.mark.parametrize(
    "text, exc",
    [
        ("2\n1 -1\n0 1\n", NegativeEntry),
        ("2\n1 1\n", DimensionMismatch),
        ("2\n1 1 1\n0 1\n", DimensionMismatch),
        ("2\n1 nan\n0 1\n", NonFiniteEntry),
    ],
)
def test_text_format_rejects(text, exc):
    with pytest.raises(exc):
        parse_matrix_text(text)


def test_json_rejects_negative(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 2, "entries": [1, -1, 0, 1]}')
    with pytest.raises(NegativeEntry):
        read_matrix(p)
