from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qdiffcalc.qscalar import QMode, ScalarParseError, q_binomial, q_factorial, q_int

GEN = QMode.generic()
ints = st.integers(-6, 6)


def poly(mode, coeffs):
    return mode.polynomial(coeffs)


def generic_scalars():
    num = st.lists(ints, min_size=0, max_size=4)
    den = st.lists(ints, min_size=1, max_size=3).filter(any)
    return st.builds(lambda a, b: poly(GEN, a) / poly(GEN, b), num, den)


def root_scalars(N):
    mode = QMode.root_of_unity(N)
    return st.builds(lambda a, d: poly(mode, a) / d, st.lists(ints, max_size=2 * N), st.integers(1, 5))


def expand(*factors):
    """Oracle: multiply integer coefficient lists by hand."""
    out = [1]
    for f in factors:
        new = [0] * (len(out) + len(f) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(f):
                new[i + j] += a * b
        out = new
    return out


def test_q_int_examples():
    assert q_int(0, GEN) == 0
    assert q_int(2, GEN) == poly(GEN, [1, 1])
    assert q_int(3, QMode.root_of_unity(3)) == 0


def test_q_factorial_examples():
    assert q_factorial(0, GEN) == 1
    assert q_factorial(3, GEN) == poly(GEN, expand([1, 1], [1, 1, 1]))
    assert q_factorial(3, GEN) == poly(GEN, [1, 2, 2, 1])
    for N in range(2, 9):
        assert q_factorial(N, QMode.root_of_unity(N)) == 0


def test_q_binomial_examples():
    for n in range(6):
        assert q_binomial(n, 0, GEN) == 1
    # [4]_q [3]_q / [2]_q
    assert q_binomial(4, 2, GEN) == poly(GEN, [1, 1, 2, 1, 1])
    assert q_binomial(4, 2, GEN) == q_int(4, GEN) * q_int(3, GEN) / q_int(2, GEN)
    assert q_binomial(3, 1, QMode.root_of_unity(3)) == 0
    with pytest.raises(ValueError):
        q_binomial(2, 3, GEN)


@pytest.mark.parametrize("mode", [GEN] + [QMode.root_of_unity(N) for N in (1, 2, 3, 5, 7)])
def test_q_pascal(mode):
    for n in range(1, 13):
        for p in range(1, n + 1):
            rhs = q_binomial(n - 1, p - 1, mode) + mode.qpow(p) * (q_binomial(n - 1, p, mode) if p <= n - 1 else 0)
            assert q_binomial(n, p, mode) == rhs


def test_generic_binomials_are_nonnegative_polynomials():
    for n in range(13):
        for p in range(n + 1):
            b = q_binomial(n, p, GEN)
            assert b.den == (1,)
            assert all(c >= 0 and isinstance(c, int) for c in b.num)
            # sum of coefficients is the ordinary binomial
            from math import comb
            assert sum(b.num) == comb(n, p)


def test_specialization_coherence():
    for N in range(1, 9):
        mode = QMode.root_of_unity(N)
        for n in range(11):
            for p in range(n + 1):
                assert q_binomial(n, p, GEN).specialize(mode) == q_binomial(n, p, mode)


def test_root_of_unity_relations():
    for N in range(1, 13):
        mode = QMode.root_of_unity(N)
        assert mode.q ** N == 1
        if N > 1:
            assert q_int(N, mode) == 0
            assert mode.q != 1
            assert all(mode.q ** k != 1 for k in range(1, N))


def test_q_equals_one_and_minus_one():
    assert QMode.root_of_unity(1).q == 1
    assert QMode.root_of_unity(2).q == -1
    assert q_int(5, QMode.root_of_unity(1)) == 5


@given(generic_scalars(), generic_scalars(), generic_scalars())
def test_field_axioms_generic(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if a:
        assert a * a.inverse() == 1
        assert (b / a) * a == b


@pytest.mark.parametrize("N", [3, 4, 5, 6, 7, 12])
def test_field_axioms_root(N):
    @given(root_scalars(N), root_scalars(N), root_scalars(N))
    def check(a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if a:
            assert a * a.inverse() == 1

    check()


@given(generic_scalars())
def test_serialization_round_trip_generic(a):
    assert GEN.parse(str(a)) == a
    assert str(GEN.parse(str(a))) == str(a)


@pytest.mark.parametrize("N", [2, 3, 4, 7])
def test_serialization_round_trip_root(N):
    mode = QMode.root_of_unity(N)

    @given(root_scalars(N))
    def check(a):
        assert mode.parse(str(a)) == a
        assert str(mode.parse(str(a))) == str(a)

    check()


def test_formats():
    assert str(GEN.polynomial([1, 1])).endswith("/(1)")
    assert str(QMode.root_of_unity(3).polynomial([Fraction(1, 2), Fraction(3, 2)])) == "1/2 + 3/2*q (mod Phi_3)"
    with pytest.raises(ScalarParseError):
        GEN.parse("1 (mod Phi_3)")


def test_mixed_modes_rejected():
    with pytest.raises(TypeError):
        QMode.root_of_unity(3).q + QMode.root_of_unity(4).q


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        QMode.root_of_unity(5).zero.inverse()
    with pytest.raises(ZeroDivisionError):
        GEN.zero.inverse()
