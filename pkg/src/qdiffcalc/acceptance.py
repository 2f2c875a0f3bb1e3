"""The acceptance suite: twelve end-to-end checks with their own oracles.

Each check returns ``(passed, detail)``.  :func:`run` times one check and
:func:`run_all` runs the whole list, optionally in worker processes.
"""

from __future__ import annotations

import itertools
import os
import random
import time
from fractions import Fraction

from .cochain import (BilinearProduct, associativity_defect, cochain_calculus, coboundary_map,
                      CochainAlgebra, psi_map)
from .graded import diagonal_algebra, dual_numbers, matrix_algebra
from .homology import (ComplexView, UngradedComplex, cohomology, hexagon_check, long_sequences,
                       ordinary_cohomology, random_complex)
from .linalg import apply, rank
from .qdla import inner_differential, iterated_leibniz_sides
from .qscalar import QMode, q_binomial, q_factorial, q_int
from .tensor import (canonical_embedding, embedding_ranks, envelope_abstract, envelope_dimension,
                     omega_q_embedded, tensor_calculus, universal_extension)

__all__ = ["CRITERIA", "run", "run_all", "nonassociative_fixture"]


def nonassociative_fixture(mode):
    """Unital 3-dim product on 1, a, b with a.a = b, b.a = a and a.b = b.b = 0.

    (a a) a = a but a (a a) = 0, so it is not associative.  A two
    dimensional unital algebra is always associative, hence the third
    basis vector.
    """
    table = {}
    for i in range(3):
        table[(0, i)] = {i: 1}
        table[(i, 0)] = {i: 1}
    table[(1, 1)] = {2: 1}
    table[(2, 1)] = {1: 1}
    return BilinearProduct(mode, 3, table, unit={0: 1}, labels=["1", "a", "b"])


def c1_q_combinatorics():
    gen = QMode.generic()
    for n in range(1, 13):
        for p in range(1, n):
            # the mirrored recurrence, independent of the one used internally
            other = gen.qpow(n - p) * q_binomial(n - 1, p - 1, gen) + q_binomial(n - 1, p, gen)
            if q_binomial(n, p, gen) != other:
                return False, f"q-Pascal fails at ({n}, {p})"
            closed = q_factorial(n, gen) / (q_factorial(p, gen) * q_factorial(n - p, gen))
            if q_binomial(n, p, gen) != closed:
                return False, f"factorial formula fails at ({n}, {p})"
    for N in range(2, 13):
        mode = QMode.root_of_unity(N)
        if q_int(N, mode):
            return False, f"[{N}]_q != 0 mod Phi_{N}"
        if any(not q_int(k, mode) for k in range(1, N)):
            return False, f"[k]_q vanishes for some k < {N}"
    return True, "q-Pascal for n <= 12; [N]_q = 0 for N = 2..12"


def c2_iterated_leibniz():
    checked = 0
    for mode in (QMode.generic(), QMode.root_of_unity(3), QMode.root_of_unity(4)):
        qda = tensor_calculus(diagonal_algebra(2, mode), 8, mode, check=False)
        T = qda.algebra
        for n in range(1, 6):
            for a, b in itertools.product(range(9), repeat=2):
                if a + b + n > 8:
                    continue
                for i, j in itertools.product(T.basis_in_degree(a), T.basis_in_degree(b)):
                    lhs, rhs = iterated_leibniz_sides(qda, {i: mode.one}, {j: mode.one}, n)
                    checked += 1
                    if lhs != rhs:
                        return False, f"fails for n={n} on ({T.labels[i]}, {T.labels[j]}) in mode {mode}"
    return True, f"{checked} basis pairs"


def c3_matrix_example():
    rng = random.Random(3)
    for N in range(2, 6):
        mode = QMode.root_of_unity(N)
        M = matrix_algebra(N, mode)
        lam = []
        while len(lam) < N:
            x = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
            if x:
                lam.append(x)
        # e = lam_1 E^2_1 + ... + lam_{N-1} E^N_{N-1} + lam_N E^1_N
        e = {M.index(f"E{k % N + 1}_{k}"): mode(lam[k - 1]) for k in range(1, N + 1)}
        eN = M.unit_vector()
        for _ in range(N):
            eN = M.mul(eN, e)
        prod = Fraction(1)
        for x in lam:
            prod *= x
        if eN != {i: c * mode(prod) for i, c in M.unit.items()}:
            return False, f"e^N != prod(lambda) 1 for N={N}"
        qda = inner_differential(M, e, mode, max_degree=2 * N)
        cov = qda.algebra
        for i in range(cov.dim):
            if cov.degree(i) + N <= 2 * N and qda.d.power({i: mode.one}, N):
                return False, f"d^N != 0 on {cov.labels[i]} for N={N}"
    return True, "N = 2..5"


def c4_matrix_envelope():
    mode = QMode.root_of_unity(2)
    env = envelope_abstract(diagonal_algebra(2, mode), 5, mode)
    M = matrix_algebra(2, mode)
    e = {M.index("E2_1"): mode(2), M.index("E1_2"): mode(Fraction(1, 3))}
    target = inner_differential(M, e, mode, max_degree=5)
    cov = target.algebra
    phi = {0: cov.lift(0, {M.index("E1_1"): mode.one}), 1: cov.lift(0, {M.index("E2_2"): mode.one})}
    images = universal_extension(env, phi, target)  # checks d and products
    dims = []
    for n in range(6):
        src = env.algebra.basis_in_degree(n)
        tgt = cov.basis_in_degree(n)
        r = rank([images[i] for i in src])
        if not (len(src) == len(tgt) == r == 2):
            return False, f"degree {n}: dims {len(src)}, {len(tgt)}, rank {r}"
        dims.append(len(src))
    return True, f"dims {dims}, bijective"


def c5_nilpotency():
    top = 5
    for N in (2, 3, 4):
        mode = QMode.root_of_unity(N)
        for A in (diagonal_algebra(2, mode), dual_numbers(mode)):
            for which in ("delta_q", "delta_prime_q", "m_star_q"):
                kind = "forms" if which == "m_star_q" else "hochschild"
                C = CochainAlgebra(A, top + N, kind=kind)
                d = coboundary_map(C, mode, which)
                for i in range(C.dim):
                    if C.degree(i) <= top and d.power({i: mode.one}, N):
                        return False, f"({which})^{N} != 0 on {C.labels[i]} over {A.labels}"
    return True, "3 coboundaries x 2 algebras x N = 2, 3, 4"


def c6_psi():
    mode = QMode.root_of_unity(3)
    A = diagonal_algebra(2, mode)
    for variant, which in (("d_q", "delta_q"), ("d_prime_q", "delta_prime_q")):
        tq = tensor_calculus(A, 5, mode, variant=variant)
        cq = cochain_calculus(A, 5, mode, which=which)
        P = psi_map(tq.algebra, cq.algebra)
        T = tq.algebra
        for i in range(T.dim):
            if T.degree(i) > 4:
                continue
            if apply(P, tq.d({i: mode.one})) != cq.d(P[i]):
                return False, f"Psi does not intertwine {variant} on {T.labels[i]}"
    return True, "degrees <= 4, both differentials"


def c7_associativity():
    for N in (3, 4):
        mode = QMode.root_of_unity(N)
        for product in (BilinearProduct.of(diagonal_algebra(2, mode)), nonassociative_fixture(mode)):
            assoc = product.labels == ["p1", "p2"]
            d = product.dim
            for w, x, y, z in itertools.product(range(d), repeat=4):
                lhs, rhs = associativity_defect(product, N, {w: 1}, {x: 1}, {y: 1}, {z: 1})
                if lhs != rhs or (assoc and lhs):
                    return False, f"N={N} w={w} ({x},{y},{z}): {lhs} vs {rhs}"
    return True, "C^2 and the 3-dim non-associative fixture, N = 3, 4"


def c8_envelope():
    dims = {}
    for d in (2, 3):
        for N in (3, 4):
            mode = QMode.root_of_unity(N)
            A = diagonal_algebra(d, mode)
            env = envelope_abstract(A, 5, mode)
            tq = tensor_calculus(A, 5, mode)
            emb = omega_q_embedded(A, 5, mode, qda=tq)
            images = canonical_embedding(env, tq)
            rows = embedding_ranks(env.algebra, images, tq.algebra, emb)
            formula = [envelope_dimension(d, n, N - 1) for n in range(6)]
            for n, (ad, r, inside) in rows.items():
                if not (ad == r == emb.dim(n) == formula[n] and inside):
                    return False, f"C^{d}, N={N}, degree {n}: {ad}, {r}, {emb.dim(n)}, {formula[n]}"
            dims[(d, N)] = formula
    if dims[(2, 3)] != [2, 2, 4, 6, 10, 16]:
        return False, f"C^2 N=3 dims {dims[(2, 3)]}"
    return True, "C^2 N=3: " + " ".join(map(str, dims[(2, 3)]))


def c9_triviality():
    mode = QMode.root_of_unity(3)
    A = diagonal_algebra(2, mode)
    window = 7
    complexes = {
        "forms": cochain_calculus(A, window, mode, which="m_star_q"),
        "tensor": tensor_calculus(A, window, mode),
        "envelope": envelope_abstract(A, window, mode),
    }
    for name, qda in complexes.items():
        view = ComplexView.from_qdla(qda)
        for p in (1, 2):
            for n in range(4):
                h = cohomology(view, p, n)
                if h.dim != (1 if n == 0 else 0) or not h.stable:
                    return False, f"{name}: H^({p}),{n} = {h.dim}"
    return True, "forms, tensor, envelope; n <= 3"


def hochschild_pattern(N, p, r, ordinary):
    """Predicted dim H^(p),r from ordinary Hochschild dimensions."""
    if r % N == 0:
        return ordinary[2 * (r // N)]
    if (r + p) % N == 0:
        k = (r + p) // N - 1
        return ordinary[2 * k + 1]
    return 0


def c10_hochschild():
    N = 3
    m2 = QMode.root_of_unity(2)
    ordinary = ordinary_cohomology(ComplexView.from_qdla(cochain_calculus(dual_numbers(m2), 5, m2)))
    mode = QMode.root_of_unity(N)
    view = ComplexView.from_qdla(cochain_calculus(dual_numbers(mode), 6, mode))
    for p in (1, 2):
        for r in range(5):
            h = cohomology(view, p, r).dim
            want = hochschild_pattern(N, p, r, ordinary)
            if h != want:
                return False, f"H^({p}),{r} = {h}, pattern gives {want} (ordinary {ordinary})"
    return True, f"ordinary H^n = {ordinary[:4]}"


def admissible(N):
    return [(l, m) for l in range(1, N) for m in range(1, N - l + 1)]


def c11_exactness():
    count = 0
    for N in (3, 4, 5):
        mode = QMode.root_of_unity(N)
        for seed in range(100):
            view, _ = random_complex(mode, N, 8, max_dim=4, seed=seed)
            if sum(view.dims) > 40:
                return False, "random complex too large"
            for l, m in admissible(N):
                if not hexagon_check(view, l, m)["exact"]:
                    return False, f"hexagon ({l},{m}) not exact, N={N}, seed {seed}"
                for p in range(N):
                    for node in long_sequences(view, l, m, p):
                        if node["status"] != "exact":
                            return False, f"S^({l},{m})_{p} fails at {node}, N={N}, seed {seed}"
            count += 1
    mode = QMode.root_of_unity(3)
    M = matrix_algebra(3, mode)
    e = {M.index("E2_1"): mode.one, M.index("E3_2"): mode.one, M.index("E1_3"): mode.one}
    qda = inner_differential(M, e, mode, max_degree=8)
    view = ComplexView.from_qdla(qda)
    base = UngradedComplex(M.dim, qda.base_map.images, mode)
    tested = 0
    for l, m in admissible(3):
        if not hexagon_check(base, l, m)["exact"]:
            return False, f"M3 hexagon ({l},{m}) not exact"
        for p in range(3):
            for node in long_sequences(view, l, m, p):
                if node["status"] == "not exact":
                    return False, f"M3 S^({l},{m})_{p} fails at {node}"
                tested += node["status"] == "exact"
    return True, f"{count} random complexes; M3: {tested} interior nodes exact"


def c12_universality():
    m3 = QMode.root_of_unity(3)
    env = envelope_abstract(diagonal_algebra(3, m3), 3, m3)
    M = matrix_algebra(3, m3)
    e = {M.index("E2_1"): m3(1), M.index("E3_2"): m3(2), M.index("E1_3"): m3(-1)}
    target = inner_differential(M, e, m3, max_degree=3)
    cov = target.algebra
    phi = {i: cov.lift(0, {M.index(f"E{i + 1}_{i + 1}"): m3.one}) for i in range(3)}
    a = universal_extension(env, phi, target)
    env2 = envelope_abstract(diagonal_algebra(2, m3), 3, m3)
    cq = cochain_calculus(diagonal_algebra(2, m3), 3, m3)
    C = cq.algebra
    phi2 = {i: {C.index_of((), i): m3.one} for i in range(2)}
    b = universal_extension(env2, phi2, cq)
    return True, f"{len(a)} + {len(b)} basis elements checked"


CRITERIA = [
    ("1 q-combinatorics", c1_q_combinatorics),
    ("2 iterated q-Leibniz", c2_iterated_leibniz),
    ("3 matrix example", c3_matrix_example),
    ("4 p*M2 = Omega(C^2)", c4_matrix_envelope),
    ("5 nilpotent coboundaries", c5_nilpotency),
    ("6 Psi intertwines", c6_psi),
    ("7 associativity criterion", c7_associativity),
    ("8 envelope dimensions", c8_envelope),
    ("9 trivial cohomology", c9_triviality),
    ("10 Hochschild pattern", c10_hochschild),
    ("11 hexagons and sequences", c11_exactness),
    ("12 universality", c12_universality),
]


def run(index):
    name, fn = CRITERIA[index]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash counts as a failure with its reason
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return name, ok, detail, time.perf_counter() - t0


def run_all(workers=None):
    if workers is None:
        workers = int(os.environ.get("QDIFFCALC_THREADS", "1"))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(run, range(len(CRITERIA))))
    return [run(i) for i in range(len(CRITERIA))]
