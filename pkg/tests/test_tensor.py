import itertools

import pytest

from qdiffcalc.cochain import CochainAlgebra, cochain_calculus, psi
from qdiffcalc.graded import diagonal_algebra, dual_numbers, matrix_algebra
from qdiffcalc.linalg import axpy, vscale
from qdiffcalc.qdla import inner_differential
from qdiffcalc.qscalar import QMode, q_factorial, q_int
from qdiffcalc.tensor import (TensorCalculus, canonical_embedding, composition_count, embedding_ranks,
                              envelope_abstract, envelope_dimension, extend_hom, omega_classical,
                              omega_q_embedded, tensor_calculus, universal_extension)

GEN = QMode.generic()
MINUS = QMode.root_of_unity(2)


def test_tensor_dimensions_and_product():
    A = dual_numbers(GEN)
    T = TensorCalculus(A, 3)
    assert T.dims() == [2, 4, 8, 16]
    one = GEN.one
    for s, t in itertools.product(T.keys, repeat=2):
        if len(s) + len(t) - 2 > 3:
            continue
        got = T.mul({T.index_of(s): one}, {T.index_of(t): one})
        want = {T.index_of(s[:-1] + (k,) + t[1:]): c for k, c in A.mul_basis(s[-1], t[0]).items()}
        assert got == want


@pytest.mark.parametrize("mode", [GEN, QMode.root_of_unity(3)])
def test_generators_of_d(mode):
    A = dual_numbers(mode)
    for variant in ("d_q", "d_prime_q"):
        qda = tensor_calculus(A, 4, mode, variant=variant)
        T = qda.algebra
        for i in range(A.dim):
            x = T.from_base({i: mode.one})
            assert qda.d(x) == T.universal_derivative({i: mode.one})
            assert qda.d(x) == axpy(T.mul(T.tau, x), -1, T.mul(x, T.tau))
        tau2 = T.tau_power(2)
        want = tau2 if variant == "d_q" else vscale(-mode.q, tau2)
        assert qda.d(T.tau) == want


def test_d_squared_on_base():
    A = diagonal_algebra(2, GEN)
    qda = tensor_calculus(A, 3, GEN)
    T = qda.algebra
    u = A.unit
    for i in range(A.dim):
        x = {i: GEN.one}
        want = axpy(T.tensor(u, u, x), -1, T.tensor(u, x, u))
        assert qda.power(T.from_base(x), 2) == vscale(GEN.one + GEN.q, want)


@pytest.mark.parametrize("name", ["c2", "eps"])
def test_powers_of_d_generic(name):
    A = diagonal_algebra(2, GEN) if name == "c2" else dual_numbers(GEN)
    qda = tensor_calculus(A, 6, GEN)
    T = qda.algebra
    for k in range(1, 6):
        fk = q_factorial(k, GEN)
        assert qda.power(T.tau, k) == vscale(fk, T.tau_power(k + 1))
        for i in range(A.dim):
            x = T.from_base({i: GEN.one})
            want = T.mul(T.tau_power(k - 1), qda.d(x)) if k > 1 else qda.d(x)
            assert qda.power(x, k) == vscale(fk, want)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_d_prime_is_nilpotent(N):
    mode = QMode.root_of_unity(N)
    qda = tensor_calculus(dual_numbers(mode), N + 2, mode, variant="d_prime_q")
    assert qda.report["nilpotency"]["ok"] and qda.report["nilpotency"]["checked"] > 0


def test_extend_hom_reproduces_psi():
    A = diagonal_algebra(2, GEN)
    T = TensorCalculus(A, 3)
    C = CochainAlgebra(A, 3)
    phi = {i: {C.index_of((), i): GEN.one} for i in range(A.dim)}
    alpha = {C.index_of((y,), y): GEN.one for y in range(A.dim)}
    images = extend_hom(T, phi, alpha, C)
    for i in range(T.dim):
        assert images[i] == psi(T, {i: GEN.one}, C)


def test_extend_hom_with_zero_alpha():
    A = dual_numbers(GEN)
    T = TensorCalculus(A, 3)
    images = extend_hom(T, {i: T.from_base({i: GEN.one}) for i in range(A.dim)}, {}, T)
    for i, v in images.items():
        assert (v == {}) == (T.degree(i) > 0)


def test_extend_hom_identity():
    A = dual_numbers(GEN)
    T = TensorCalculus(A, 3)
    images = extend_hom(T, {i: T.from_base({i: GEN.one}) for i in range(A.dim)}, T.tau, T)
    assert images == {i: {i: GEN.one} for i in range(T.dim)}


def test_extend_hom_is_determined_by_generators():
    mode = QMode.root_of_unity(3)
    A = diagonal_algebra(3, mode)
    qda = inner_differential(matrix_algebra(3, mode), _e(mode), mode, max_degree=4)
    target = qda.algebra
    phi = _diag_inclusion(target, 3, mode)
    alpha = _lift(target, _e(mode), 1)
    T = TensorCalculus(A, 4)
    images = extend_hom(T, phi, alpha, target)
    for idx, t in enumerate(T.keys):
        v = dict(phi[t[0]])
        for x in t[1:]:
            v = target.mul(target.mul(v, alpha), phi[x])
        assert images[idx] == v


def _e(mode):
    M = matrix_algebra(3, mode)
    return {M.index(f"E{k % 3 + 1}_{k}"): mode.one for k in (1, 2, 3)}


def _lift(cover, v, n):
    out = {}
    for a, (m, i) in enumerate(cover.pairs):
        if m == n and i in v:
            out[a] = v[i]
    return out


def _diag_inclusion(cover, N, mode):
    base = cover.base
    return {i: _lift(cover, {base.index(f"E{i + 1}_{i + 1}"): mode.one}, 0) for i in range(N)}


def test_omega_classical_small_degrees():
    A = diagonal_algebra(2, MINUS)
    om = omega_classical(A, 5)
    assert om.dims() == [2] * 6
    T = om.T
    for i in range(A.dim):
        assert om.contains(T.universal_derivative({i: MINUS.one}))


@pytest.mark.parametrize("dim", [2, 3])
def test_omega_classical_matches_generated_subalgebra(dim):
    A = diagonal_algebra(dim, MINUS)
    om = omega_classical(A, 4)
    emb = omega_q_embedded(A, 4, MINUS)
    assert om.same_as(emb)
    assert om.dims() == [dim * (dim - 1) ** n for n in range(5)]


@pytest.mark.parametrize("mode", [GEN, QMode.root_of_unity(3), QMode.root_of_unity(4)])
def test_embedded_low_degrees(mode):
    A = diagonal_algebra(2, mode)
    emb = omega_q_embedded(A, 3, mode)
    om = omega_classical(diagonal_algebra(2, MINUS), 3)
    T = emb.T
    # degree 1 is the kernel of the product: same support patterns at any q
    assert emb.dim(1) == om.dim(1) == 2
    # degree 2 is A ⊗ Omega^1
    a_omega = [T.mul(T.from_base({a: mode.one}), T.universal_derivative({x: mode.one}))
               for a in range(A.dim) for x in range(A.dim)]
    assert all(emb.contains(v) for v in a_omega)
    assert emb.dim(2) == 4
    qda = emb.qda
    for x in range(A.dim):
        xv = T.from_base({x: mode.one})
        assert qda.power(xv, 2) == vscale(q_int(2, mode), T.mul(T.tau, qda.d(xv)))


def _compositions_oracle(n, max_part):
    # counts by number of parts, via brute force over binary cut patterns
    counts = {}
    for cuts in itertools.product([0, 1], repeat=max(n - 1, 0)):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        if n > 0 and max(parts) <= max_part:
            counts[len(parts)] = counts.get(len(parts), 0) + 1
    return counts


@pytest.mark.parametrize("max_part", [1, 2, 3, 5])
def test_composition_count(max_part):
    for n in range(1, 9):
        assert composition_count(n, max_part) == _compositions_oracle(n, max_part)


def test_envelope_dims_for_c2():
    mode = QMode.root_of_unity(3)
    A = diagonal_algebra(2, mode)
    emb = omega_q_embedded(A, 5, mode)
    assert emb.dims() == [2, 2, 4, 6, 10, 16]
    assert [envelope_dimension(2, n, 2) for n in range(6)] == [2, 2, 4, 6, 10, 16]


@pytest.mark.parametrize("N,dim", [(3, 2), (4, 2), (3, 3), (4, 3)])
def test_abstract_and_embedded_agree(N, dim):
    mode = QMode.root_of_unity(N)
    A = diagonal_algebra(dim, mode)
    top = 5 if dim == 2 else 4
    env = envelope_abstract(A, top, mode)
    emb = omega_q_embedded(A, top, mode)
    assert env.algebra.dims() == emb.dims() == [envelope_dimension(dim, n, N - 1) for n in range(top + 1)]
    T_qda = tensor_calculus(A, top, mode)
    images = canonical_embedding(env, T_qda)
    ranks = embedding_ranks(env.algebra, images, T_qda.algebra, emb)
    for n, (d, r, inside) in ranks.items():
        assert d == r and inside


def test_envelope_generators():
    mode = QMode.root_of_unity(3)
    A = dual_numbers(mode)
    env = envelope_abstract(A, 3, mode)
    E = env.algebra
    one = mode.one
    eps = A.index("eps")
    assert E.dims()[0] == A.dim
    assert env.d({E.index_of(eps, ()): one}) == {E.index_of(A.index("1"), ((1, eps),)): one}
    assert env.d({E.index_of(A.index("1"), ()): one}) == {}
    # d(x) b = d(xb) - x d(b)
    for x, b in itertools.product(range(A.dim), repeat=2):
        dx = env.d({E.index_of(x, ()): one})
        lhs = E.mul(dx, {E.index_of(b, ()): one})
        rhs = env.d({E.index_of(k, ()): c for k, c in A.mul_basis(x, b).items()})
        axpy(rhs, -one, E.mul({E.index_of(x, ()): one}, env.d({E.index_of(b, ()): one})))
        assert lhs == rhs


def test_universal_extension_to_itself():
    mode = QMode.root_of_unity(3)
    A = diagonal_algebra(2, mode)
    env = envelope_abstract(A, 3, mode)
    phi = {i: {env.algebra.index_of(i, ()): mode.one} for i in range(A.dim)}
    images = universal_extension(env, phi, env)
    assert images == {i: {i: mode.one} for i in range(env.algebra.dim)}


def test_universal_extension_into_matrices():
    mode = QMode.root_of_unity(3)
    A = diagonal_algebra(3, mode)
    env = envelope_abstract(A, 3, mode)
    target = inner_differential(matrix_algebra(3, mode), _e(mode), mode, max_degree=3)
    phi = _diag_inclusion(target.algebra, 3, mode)
    images = universal_extension(env, phi, target)
    E = env.algebra
    for u in E.quotient:
        g = {E.index_of(u, ()): mode.one}
        lhs = {}
        for i, c in env.d(g).items():
            axpy(lhs, c, images[i])
        assert lhs == target.d(phi[u])


def test_universal_extension_into_cochains_agrees_with_psi():
    mode = QMode.root_of_unity(3)
    A = diagonal_algebra(2, mode)
    env = envelope_abstract(A, 3, mode)
    cc = cochain_calculus(A, 3, mode)
    C = cc.algebra
    phi = {i: {C.index_of((), i): mode.one} for i in range(A.dim)}
    ext = universal_extension(env, phi, cc)
    T_qda = tensor_calculus(A, 3, mode)
    emb = canonical_embedding(env, T_qda)
    for idx, v in ext.items():
        assert v == psi(T_qda.algebra, emb[idx], C)
