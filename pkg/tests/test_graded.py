import itertools
import json
import random

import pytest
from hypothesis import given, strategies as st

from qdiffcalc.graded import (AssociativityViolation, GradedMap, GradingViolation, NonHomogeneous,
                              UnitViolation, algebra_to_json, covering, diagonal_algebra, dual_numbers,
                              lift_map, load_algebra, make_algebra, matrix_algebra)
from qdiffcalc.linalg import apply
from qdiffcalc.qscalar import QMode

GEN = QMode.generic()
M3 = QMode.root_of_unity(3)


def test_diagonal_algebra_is_valid():
    A = diagonal_algebra(2, GEN)
    assert A.dim == 2
    assert A.unit == {0: GEN.one, 1: GEN.one}
    assert A.mul_basis(0, 1) == {}
    assert A.mul_basis(1, 1) == {1: GEN.one}


def test_matrix_units_follow_the_product_rule():
    N = 3
    A = matrix_algebra(N, M3)
    one = M3.one
    for k, l, r, s in itertools.product(range(1, N + 1), repeat=4):
        got = A.mul_basis(A.index(f"E{k}_{l}"), A.index(f"E{r}_{s}"))
        want = {A.index(f"E{r}_{l}"): one} if k == s else {}
        assert got == want
        assert A.degree(A.index(f"E{k}_{l}")) == (k - l) % N


def test_m2_degrees_mod_2():
    A = matrix_algebra(2, QMode.root_of_unity(2))
    assert A.modulus == 2
    assert sorted(A.degree(A.index(x)) for x in ("E1_1", "E2_2", "E1_2", "E2_1")) == [0, 0, 1, 1]


def test_corrupted_matrix_product_is_rejected(fixtures):
    with pytest.raises(AssociativityViolation) as err:
        load_algebra(fixtures / "m2_corrupted.json", GEN)
    i, j, k = err.value.witness
    assert len({i, j, k}) >= 2


def test_grading_violation():
    with pytest.raises(GradingViolation):
        make_algebra(GEN, ["u", "x"], [0, 1], {("u", "u"): {"u": 1}, ("u", "x"): {"x": 1},
                                                ("x", "u"): {"x": 1}, ("x", "x"): {"u": 1}}, unit="u")


def test_unit_violation():
    with pytest.raises(UnitViolation):
        make_algebra(GEN, ["p1", "p2"], [0, 0], {(0, 0): {0: 1}, (1, 1): {1: 1}}, unit={"p1": 1})


def test_json_round_trip(fixtures):
    for name in ("c2.json", "c3.json", "dual_numbers.json", "m2.json", "m3.json"):
        A = load_algebra(fixtures / name, M3)
        data = algebra_to_json(A)
        B = load_algebra(json.loads(json.dumps(data)), M3)
        assert B.labels == A.labels and B.degrees == A.degrees and B.unit == A.unit
        for i, j in itertools.product(range(A.dim), repeat=2):
            assert A.mul_basis(i, j) == B.mul_basis(i, j)


def test_label_one_is_not_an_index(fixtures):
    D = load_algebra(fixtures / "dual_numbers.json", GEN)
    assert D.labels == ["1", "eps"]
    assert D.unit == {0: GEN.one}
    assert D.mul_basis(1, 1) == {}


def test_covering_of_m2_has_two_per_degree():
    cov = covering(matrix_algebra(2, QMode.root_of_unity(2)), 5)
    assert cov.dims() == [2] * 6
    even = {cov.base.labels[i] for n, i in cov.pairs if n % 2 == 0}
    odd = {cov.base.labels[i] for n, i in cov.pairs if n % 2 == 1}
    assert even == {"E1_1", "E2_2"} and odd == {"E1_2", "E2_1"}


def test_covering_of_trivially_graded_algebra():
    A = make_algebra(M3, ["p1", "p2"], [0, 0], {(0, 0): {0: 1}, (1, 1): {1: 1}}, grading="mod 3",
                     unit={0: 1, 1: 1})
    cov = covering(A, 7)
    assert cov.dims() == [2, 0, 0, 2, 0, 0, 2, 0]


def test_covering_dimensions_and_projection():
    for N in (2, 3, 4):
        mode = QMode.root_of_unity(N)
        A = matrix_algebra(N, mode)
        cov = covering(A, 2 * N + 1)
        for n in range(2 * N + 2):
            assert len(cov.basis_in_degree(n)) == len(A.basis_in_degree(n % N))
            # pi is onto A^{n mod N}
            images = {tuple(cov.project({i: mode.one})) for i in cov.basis_in_degree(n)}
            assert images == {(i,) for i in A.basis_in_degree(n % N)}


@given(st.integers(0, 10**6))
def test_projection_is_multiplicative(seed):
    rng = random.Random(seed)
    A = matrix_algebra(3, M3)
    cov = covering(A, 6)
    u = {rng.randrange(cov.dim): M3(rng.randint(-3, 3)) for _ in range(3)}
    v = {rng.randrange(cov.dim): M3(rng.randint(-3, 3)) for _ in range(3)}
    u = {k: c for k, c in u.items() if c}
    v = {k: c for k, c in v.items() if c}
    # restrict to products that stay inside the truncation
    u = {k: c for k, c in u.items() if cov.degree(k) <= 3}
    v = {k: c for k, c in v.items() if cov.degree(k) <= 3}
    assert cov.project(cov.mul(u, v)) == A.mul(cov.project(u), cov.project(v))


def test_lift_of_zero_is_zero():
    A = matrix_algebra(2, QMode.root_of_unity(2))
    cov = covering(A, 4)
    L = lift_map(GradedMap(A, {}, 1), cov)
    assert all(not v for v in L.images.values())
    assert L.degree == 1


def test_lift_of_left_multiplication_intertwines():
    mode = M3
    A = matrix_algebra(3, mode)
    e = {A.index("E2_1"): mode.one, A.index("E3_2"): mode(2)}
    D = GradedMap(A, {i: A.mul(e, {i: mode.one}) for i in range(A.dim)}, 1)
    cov = covering(A, 6)
    L = lift_map(D, cov)
    assert L.degree == 1
    for a, (n, i) in enumerate(cov.pairs):
        if n + 1 <= 6:
            assert cov.project(L({a: mode.one})) == D({i: mode.one})


def test_lift_rejects_mixed_residues():
    A = matrix_algebra(3, M3)
    mixed = {A.index("E1_1"): {A.index("E2_1"): M3.one, A.index("E1_2"): M3.one}}
    with pytest.raises(NonHomogeneous):
        lift_map(mixed, covering(A, 4))


def test_graded_map_rejects_inhomogeneous_images():
    A = dual_numbers(GEN)
    T = make_algebra(GEN, ["u", "x"], [0, 1], {("u", "u"): {"u": 1}, ("u", "x"): {"x": 1},
                                                ("x", "u"): {"x": 1}}, unit="u", max_degree=3)
    with pytest.raises(NonHomogeneous):
        GradedMap(T, {0: {0: GEN.one}}, 1)
    assert A.dim == 2


def test_truncated_products_vanish():
    T = make_algebra(GEN, ["u", "x"], [0, 1], {("u", "u"): {"u": 1}, ("u", "x"): {"x": 1},
                                                ("x", "u"): {"x": 1}}, unit="u", max_degree=1)
    assert T.mul_basis(1, 1) == {}
    assert apply({0: {1: GEN.one}}, {0: GEN(2)}) == {1: GEN(2)}
