"""Graded q-differential algebras: attaching d, law checks, iteration.

A q-differential is a degree one map d with

    d(ab) = d(a) b + q^deg(a) a d(b)

and d^N = 0 when q is a primitive N-th root of unity.  :func:`attach`
checks both laws exhaustively on basis vectors (bilinearity makes that
complete).  On truncated algebras the pairs whose product lies in the top
degree are skipped, since d of the top degree is not represented.
"""

from __future__ import annotations

from .graded import AlgebraError, DegreeOneMap, GradedMap, covering, lift_map
from .linalg import apply, axpy, vscale
from .qscalar import q_binomial

__all__ = [
    "LeibnizViolation",
    "NilpotencyViolation",
    "TruncationExceeded",
    "QDiffAlgebra",
    "attach",
    "law_report",
    "inner_map",
    "inner_differential",
    "iterate_d",
    "iterated_leibniz_sides",
]


class LeibnizViolation(AlgebraError):
    pass


class NilpotencyViolation(AlgebraError):
    pass


class TruncationExceeded(ValueError):
    pass


class QDiffAlgebra:
    """An N-graded algebra with a degree one map d; build with :func:`attach`."""

    def __init__(self, algebra, d, mode):
        if not isinstance(d, GradedMap):
            d = DegreeOneMap(algebra, d)
        self.algebra = algebra
        self.d = d
        self.mode = mode

    @property
    def N(self):
        return self.mode.N

    def top(self):
        return self.algebra.max_degree

    def apply(self, v):
        return self.d(v)

    def iterate(self, v, n):
        return iterate_d(self, v, n)

    def power_basis(self, i, k):
        """d^k of the i-th basis vector, memoized."""
        cache = self.__dict__.setdefault("_pow", {})
        key = (i, k)
        if key not in cache:
            if k == 0:
                cache[key] = {i: self.mode.one}
            else:
                cache[key] = self.d(self.power_basis(i, k - 1))
        return cache[key]

    def power(self, v, k):
        """d^k(v) by linearity from the memoized basis images."""
        if len(v) == 1:
            (i, c), = v.items()
            img = self.power_basis(i, k)
            return dict(img) if c == self.mode.one else vscale(c, img)
        out = {}
        for i, c in v.items():
            axpy(out, c, self.power_basis(i, k))
        return out

    def leibniz_defect(self, i, j):
        """d(b_i b_j) - d(b_i) b_j - q^deg(i) b_i d(b_j)."""
        alg = self.algebra
        one = self.mode.one
        bi, bj = {i: one}, {j: one}
        lhs = self.d(alg.mul_basis(i, j))
        rhs = alg.mul(self.d(bi), bj)
        axpy(rhs, self.mode.qpow(alg.degree(i)), alg.mul(bi, self.d(bj)))
        return axpy(lhs, -1, rhs)

    def leibniz_pairs(self):
        alg = self.algebra
        top = alg.max_degree
        for i in range(alg.dim):
            for j in range(alg.dim):
                if top is None or alg.degree(i) + alg.degree(j) + 1 <= top:
                    yield i, j

    def nilpotency_targets(self):
        if self.mode.N is None:
            return []
        top = self.algebra.max_degree
        N = self.mode.N
        return [i for i in range(self.algebra.dim) if top is None or self.algebra.degree(i) + N <= top]


def law_report(algebra, d, mode):
    """Check every law; returns a dict of per-law results with first witnesses."""
    qda = QDiffAlgebra(algebra, d, mode)
    report = {"leibniz": {"ok": True, "checked": 0}, "nilpotency": {"ok": True, "checked": 0},
              "unit": {"ok": True, "checked": 0}}
    if algebra.modulus is not None:
        raise ValueError("attach needs an N-graded algebra; use the covering first")
    if qda.d.degree != 1:
        raise ValueError("a q-differential has degree 1")
    for i, j in qda.leibniz_pairs():
        report["leibniz"]["checked"] += 1
        defect = qda.leibniz_defect(i, j)
        if defect:
            report["leibniz"].update(ok=False, witness=[i, j], defect=defect)
            break
    N = mode.N
    for i in qda.nilpotency_targets():
        report["nilpotency"]["checked"] += 1
        img = qda.d.power({i: mode.one}, N)
        if img:
            report["nilpotency"].update(ok=False, witness=[i], defect=img)
            break
    if algebra.unit is not None and algebra.in_range(1):
        report["unit"]["checked"] = 1
        du = qda.d(algebra.unit)
        if du:
            report["unit"].update(ok=False, defect=du)
    report["ok"] = all(v["ok"] for v in report.values() if isinstance(v, dict))
    return report


def attach(algebra, d, mode):
    """Validated :class:`QDiffAlgebra`; raises on the first law violation."""
    report = law_report(algebra, d, mode)
    lab = algebra.labels
    if not report["leibniz"]["ok"]:
        i, j = report["leibniz"]["witness"]
        raise LeibnizViolation(f"q-Leibniz fails on ({lab[i]}, {lab[j]})", (i, j), report["leibniz"]["defect"])
    if not report["nilpotency"]["ok"]:
        (i,) = report["nilpotency"]["witness"]
        raise NilpotencyViolation(f"d^{mode.N} does not vanish on {lab[i]}", (i,), report["nilpotency"]["defect"])
    if not report["unit"]["ok"]:
        raise LeibnizViolation("d(1) != 0", (), report["unit"]["defect"])
    qda = QDiffAlgebra(algebra, d, mode)
    qda.report = report
    return qda


def inner_map(algebra, e, mode):
    """Column storage of A -> eA - q^deg(A) Ae on the algebra's basis."""
    images = {}
    for i in range(algebra.dim):
        a = algebra.degree(i)
        if not algebra.in_range(a + 1):
            continue
        bi = {i: mode.one}
        v = algebra.mul(e, bi)
        axpy(v, -mode.qpow(a), algebra.mul(bi, e))
        images[i] = v
    return images


def inner_differential(algebra, e, mode, max_degree=None):
    """Inner q-differential d(A) = eA - q^a Ae, validated.

    For a Z_N-graded algebra the map is built there and lifted to the
    covering truncated at ``max_degree`` (default 2N + 2).
    """
    if algebra.modulus is not None:
        if mode.N is None or algebra.modulus % mode.N:
            raise ValueError("q^deg is only well defined on Z_N degrees when q^N = 1")
        if max_degree is None:
            max_degree = 2 * algebra.modulus + 2
        D = GradedMap(algebra, inner_map(algebra, e, mode), 1)
        cover = covering(algebra, max_degree)
        lifted = lift_map(D, cover)
        qda = attach(cover, DegreeOneMap(cover, lifted.images), mode)
        qda.base_map = D
        qda.generator = e
        return qda
    qda = attach(algebra, DegreeOneMap(algebra, inner_map(algebra, e, mode)), mode)
    qda.generator = e
    return qda


def iterate_d(qda, x, n):
    """d applied n times to the vector x."""
    if isinstance(x, dict):
        v = x
    else:
        v = x.coeffs
    top = qda.algebra.max_degree
    if top is not None and v:
        if max(qda.algebra.degree(i) for i in v) + n > top:
            raise TruncationExceeded(f"d^{n} leaves the truncation window (top degree {top})")
    for _ in range(n):
        v = qda.d(v)
    return v


def iterated_leibniz_sides(qda, alpha, beta, n):
    """Both sides of d^n(ab) = sum_p q^(a p) [n p]_q d^(n-p)(a) d^p(b).

    ``alpha`` must be homogeneous of degree a.  Returns (lhs, rhs).
    """
    alg = qda.algebra
    mode = qda.mode
    a = alg.vector_degree(alpha)
    if a is None:
        if alpha:
            raise ValueError("alpha must be homogeneous")
        return {}, {}
    prod = alg.mul(alpha, beta)
    top = alg.max_degree
    if top is not None and prod and alg.vector_degree(prod) + n > top:
        raise TruncationExceeded(f"d^{n} leaves the truncation window (top degree {top})")
    lhs = qda.power(prod, n)
    rhs = {}
    for p, left in enumerate(_weighted_powers(qda, alpha, a, n)):
        if left:
            alg.mul_into(rhs, left, qda.power(beta, p))
    return lhs, rhs


def _weighted_powers(qda, alpha, a, n):
    """[q^(a p) [n p]_q d^(n-p)(alpha) for p = 0..n], memoized for basis vectors."""
    key = None
    if len(alpha) == 1:
        (i, c), = alpha.items()
        if c == qda.mode.one:
            key = (i, n)
    cache = qda.__dict__.setdefault("_weighted", {})
    if key is not None and key in cache:
        return cache[key]
    mode = qda.mode
    out = [vscale(mode.qpow(a * p) * q_binomial(n, p, mode), qda.power(alpha, n - p)) for p in range(n + 1)]
    if key is not None:
        cache[key] = out
    return out


def scale_in_degrees(d, degrees, c):
    """Copy of a degree one map with columns from the given degrees scaled by c."""
    alg = d.space
    return DegreeOneMap(alg, {i: (vscale(c, v) if alg.degree(i) in degrees else v) for i, v in d.images.items()})


def ad_power(qda, k):
    """Column storage of x -> e^k x - x e^k on the base Z_N algebra (inner case)."""
    base = qda.base_map.space
    mode = qda.mode
    ek = base.unit_vector()
    for _ in range(k):
        ek = base.mul(ek, qda.generator)
    return {i: axpy(base.mul(ek, {i: mode.one}), -1, base.mul({i: mode.one}, ek)) for i in range(base.dim)}


def base_power(qda, k):
    """Column storage of D^k on the base Z_N algebra."""
    D = qda.base_map
    cols = {i: {i: qda.mode.one} for i in range(D.space.dim)}
    for _ in range(k):
        cols = {i: apply(D.images, v) for i, v in cols.items()}
    return cols
