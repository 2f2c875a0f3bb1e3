"""The tensor calculus T(A) and the universal q-differential envelope.

T^n(A) is A^{⊗(n+1)}, with basis the (n+1)-tuples of basis indices of A and
product

    (x1 ⊗ ... ⊗ xm)(y1 ⊗ ... ⊗ yn) = x1 ⊗ ... ⊗ x_{m-1} ⊗ x_m y1 ⊗ y2 ⊗ ... ⊗ yn.

It is generated by A in degree 0 and tau = 1 ⊗ 1 in degree 1.  d_q and
d'_q are the q-Leibniz extensions of the universal derivation
x -> 1 ⊗ x - x ⊗ 1 with d(tau) = tau^2 and d(tau) = -q tau^2.

The envelope Omega_q(A) is realized twice: abstractly as A ⊗ T(E), with E
the levels d^k(A/C1), k = 1..N-1, and inside T(A) as the d_q-closed
subalgebra generated by A.  The canonical map between them is the
universal extension of the identity.
"""

from __future__ import annotations

import itertools

from .graded import DegreeOneMap, GradedAlgebra, GradedMap
from .linalg import Span, apply, axpy, vscale
from .qdla import QDiffAlgebra, attach
from .qscalar import q_binomial

__all__ = [
    "TensorCalculus",
    "tensor_calculus",
    "extend_hom",
    "EmbeddedSubalgebra",
    "omega_classical",
    "omega_q_embedded",
    "EnvelopeAlgebra",
    "envelope_abstract",
    "universal_extension",
    "composition_count",
    "envelope_dimension",
    "canonical_embedding",
    "embedding_ranks",
]


class TensorCalculus(GradedAlgebra):
    """T(A) truncated at ``max_degree``; basis keys are index tuples."""

    def __init__(self, base, max_degree):
        if base.unit is None:
            raise ValueError("T(A) needs a unital algebra")
        if any(base.degree(i) != 0 for i in range(base.dim)):
            raise ValueError("T(A) needs A concentrated in degree 0")
        self.base = base
        m = base.dim
        keys = [t for n in range(max_degree + 1) for t in itertools.product(range(m), repeat=n + 1)]
        self.keys = keys
        self._index = {t: i for i, t in enumerate(keys)}
        names = base.labels

        def product(i, j):
            s, t = keys[i], keys[j]
            out = {}
            for k, c in base.mul_basis(s[-1], t[0]).items():
                out[self._index[s[:-1] + (k,) + t[1:]]] = c
            return out

        unit = {self._index[(i,)]: c for i, c in base.unit.items()}
        super().__init__(base.mode, [len(t) - 1 for t in keys], product,
                         labels=["⊗".join(names[i] for i in t) for t in keys],
                         unit=unit, max_degree=max_degree)

    def index_of(self, t):
        return self._index[tuple(t)]

    def tensor(self, *vectors):
        """x0 ⊗ ... ⊗ xn for base vectors x_i (multilinear expansion)."""
        out = {}
        for combo in itertools.product(*(v.items() for v in vectors)):
            c = self.mode.one
            for _, x in combo:
                c = c * x
            axpy(out, c, {self._index[tuple(k for k, _ in combo)]: self.mode.one})
        return out

    def from_base(self, v):
        return {self._index[(i,)]: c for i, c in v.items()}

    @property
    def tau(self):
        u = self.base.unit
        return self.tensor(u, u)

    def tau_power(self, k):
        u = self.base.unit
        return self.tensor(*([u] * (k + 1)))

    def universal_derivative(self, x):
        """1 ⊗ x - x ⊗ 1 for a base vector x."""
        u = self.base.unit
        return axpy(self.tensor(u, x), -1, self.tensor(x, u))

    def leibniz_extension(self, mode, dx, mu):
        """The unique q-Leibniz map with d(b_i) = dx(i) and d(tau) = mu.

        On x0 tau x1 ... tau xn the factor at position j (a base element or
        the tau following it) has j taus before it, hence weight q^j.
        """
        keys = self.keys
        dx_cache = {i: dx(i) for i in range(self.base.dim)}
        base_dx = {i: {self.keys[k]: c for k, c in v.items()} for i, v in dx_cache.items()}
        images = {}
        for idx, t in enumerate(keys):
            n = len(t) - 1
            if n + 1 > self.max_degree:
                continue
            out = {}
            for j in range(n + 1):
                w = mode.qpow(j)
                # d(x_j): splice the two-tensor in place of x_j
                for (y, z), c in base_dx[t[j]].items():
                    k = self._index[t[:j] + (y, z) + t[j + 1:]]
                    axpy(out, w * c, {k: mode.one})
                if j < n:
                    left = {self._index[t[: j + 1]]: mode.one}
                    right = {self._index[t[j + 1:]]: mode.one}
                    axpy(out, w, self.mul(self.mul(left, mu), right))
            images[idx] = out
        return DegreeOneMap(self, images)


def tensor_calculus(base, max_degree, mode, variant="d_q", check=True):
    """(T(A), d_q) or (T(A), d'_q) as a validated q-differential algebra."""
    T = TensorCalculus(base, max_degree)
    if variant in ("d_q", "d"):
        mu = T.tau_power(2)
    elif variant in ("d_prime_q", "d'_q", "dprime"):
        mu = vscale(-mode.q, T.tau_power(2))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if mode.N == 1:
        # q = 1: a 1-differential algebra carries d = 0
        d = DegreeOneMap(T, {i: {} for i in range(T.dim) if T.degree(i) < max_degree})
    else:
        d = T.leibniz_extension(mode, lambda i: T.universal_derivative({i: mode.one}), mu)
    if check:
        qda = attach(T, d, mode)
    else:
        qda = QDiffAlgebra(T, d, mode)
    qda.variant = variant
    return qda


def extend_hom(T, phi, alpha, target, check=True):
    """The graded homomorphism T(A) -> target with b_i -> phi[i] and tau -> alpha.

    x0 ⊗ ... ⊗ xn maps to phi(x0) alpha phi(x1) ... alpha phi(xn).  Returns
    column storage over the basis of T up to the common truncation.
    """
    limit = T.max_degree if target.max_degree is None else min(T.max_degree, target.max_degree)
    if alpha and target.vector_degree(alpha) != 1:
        raise ValueError("alpha must be homogeneous of degree 1")
    for i, v in phi.items():
        if v and target.vector_degree(v) != 0:
            raise ValueError("phi must land in degree 0")
    images = {}
    cache = {}
    for idx, t in enumerate(T.keys):
        n = len(t) - 1
        if n > limit:
            continue
        if n == 0:
            images[idx] = dict(phi.get(t[0], {}))
        else:
            prev = cache[t[:-1]] if t[:-1] in cache else images[T.index_of(t[:-1])]
            images[idx] = target.mul(target.mul(prev, alpha), phi.get(t[-1], {}))
        cache[t] = images[idx]
    if check:
        _check_unital(T.base, phi, target)
        for (i, a), (j, b) in itertools.product(images.items(), repeat=2):
            if T.degree(i) + T.degree(j) > limit:
                continue
            if apply(images, T.mul_basis(i, j)) != target.mul(a, b):
                raise AssertionError(f"extension is not multiplicative on ({T.labels[i]}, {T.labels[j]})")
    return images


def _check_unital(base, phi, target):
    if apply(phi, base.unit) != target.unit_vector():
        raise ValueError("phi is not unital")
    for i in range(base.dim):
        for j in range(base.dim):
            if apply(phi, base.mul_basis(i, j)) != target.mul(phi.get(i, {}), phi.get(j, {})):
                raise ValueError(f"phi is not multiplicative on ({base.labels[i]}, {base.labels[j]})")


# ---------------------------------------------------------------------------
# subspaces of T(A) closed under the A-bimodule action


def _idempotent_basis(base):
    """True when the basis is a complete set of orthogonal idempotents."""
    one = base.mode.one
    if base.unit != {i: one for i in range(base.dim)}:
        return False
    for i in range(base.dim):
        for j in range(base.dim):
            if base.mul_basis(i, j) != ({i: one} if i == j else {}):
                return False
    return True


class _Blocks:
    """Splits vectors of T^n(A) into (first, last) index blocks.

    A subspace stable under left and right multiplication by A is the
    direct sum of its blocks when A's basis consists of orthogonal
    idempotents; elimination then runs block by block.  Otherwise there is
    a single block.
    """

    def __init__(self, T):
        self.T = T
        self.split = _idempotent_basis(T.base)

    def key(self, i):
        t = self.T.keys[i]
        return (t[0], t[-1]) if self.split else None

    def parts(self, v):
        out = {}
        for i, c in v.items():
            out.setdefault(self.key(i), {})[i] = c
        return out


class EmbeddedSubalgebra:
    """Per-degree spans inside a TensorCalculus, stored block-wise."""

    def __init__(self, T, name=""):
        self.T = T
        self.name = name
        self.blocks = _Blocks(T)
        self.spans = {}

    def span(self, n):
        return self.spans.setdefault(n, {})

    def add(self, n, v):
        grew = False
        for key, part in self.blocks.parts(v).items():
            sp = self.span(n).setdefault(key, Span())
            if sp.add(part) is None:
                grew = True
        return grew

    def contains(self, v):
        if not v:
            return True
        n = self.T.vector_degree(v)
        if n is None or n not in self.spans:
            return False
        for key, part in self.blocks.parts(v).items():
            sp = self.spans[n].get(key)
            if sp is None or sp.reduce(part):
                return False
        return True

    def dim(self, n):
        return sum(len(sp) for sp in self.spans.get(n, {}).values())

    def dims(self):
        return [self.dim(n) for n in range(self.T.max_degree + 1)]

    def basis(self, n):
        out = []
        for key in sorted(self.spans.get(n, {}), key=repr):
            out.extend(self.spans[n][key].basis())
        return out

    def same_as(self, other):
        """Equality as per-degree spans (mutual containment)."""
        for n in range(self.T.max_degree + 1):
            if self.dim(n) != other.dim(n):
                return False
            if not all(other.contains(v) for v in self.basis(n)):
                return False
        return True


def _multiplication_kernel(T, n):
    """Vectors of T^n killed by multiplying every pair of neighbours."""
    base = T.base
    blocks = _Blocks(T)
    grouped = {}
    for i in T.basis_in_degree(n):
        grouped.setdefault(blocks.key(i), []).append(i)
    basis = []
    for key in sorted(grouped, key=repr):
        span = Span(track=True)
        for i in grouped[key]:
            t = T.keys[i]
            img = {}
            for j in range(n):
                for k, c in base.mul_basis(t[j], t[j + 1]).items():
                    axpy(img, c, {(j, t[:j] + (k,) + t[j + 2:]): T.mode.one})
            if not img:
                basis.append({i: T.mode.one})
                continue
            rel = span.add(img, label=i)
            if rel is not None:
                basis.append(rel)
    return basis


def omega_classical(base, max_degree, mode=None, check=True):
    """Omega(A) inside T(A): vectors killed by multiplying any two neighbours.

    Checked (``check=True``) to be stable under d_(-1) and equal, degree by
    degree, to the d_(-1)-closed subalgebra generated by A.
    """
    from .qscalar import QMode

    mode = mode or QMode.root_of_unity(2)
    if mode.N != 2:
        raise ValueError("the classical envelope lives at q = -1 (N = 2)")
    T = TensorCalculus(base, max_degree)
    omega = EmbeddedSubalgebra(T, "Omega")
    for n in range(max_degree + 1):
        omega.span(n)
        if n == 0:
            for i in T.basis_in_degree(0):
                omega.add(0, {i: mode.one})
            continue
        for v in _multiplication_kernel(T, n):
            omega.add(n, v)
    if check:
        qda = tensor_calculus(base, max_degree, mode, check=False)
        for n in range(max_degree):
            for v in omega.basis(n):
                if not omega.contains(qda.d(v)):
                    raise AssertionError(f"Omega^{n} is not d-stable")
        generated = omega_q_embedded(base, max_degree, mode, qda=qda, check=False)
        if not omega.same_as(generated):
            raise AssertionError("Omega(A) differs from the subalgebra generated by A")
        omega.qda = qda
    return omega


def omega_q_embedded(base, max_degree, mode, qda=None, check=True):
    """The q-differential subalgebra of (T(A), d_q) generated by A.

    It is the subalgebra generated by A and the d_q^k(b_i), k >= 1 (d of a
    product of those is again such a product by q-Leibniz), built degree by
    degree as spans of S^{n-k} * d^k(b_i) * b_j.
    """
    if qda is None:
        qda = tensor_calculus(base, max_degree, mode, check=False)
    T = qda.algebra
    one = mode.one
    S = EmbeddedSubalgebra(T, "Omega_q")
    gens = {}
    for i in range(base.dim):
        v = T.from_base({i: one})
        for k in range(1, max_degree + 1):
            v = qda.d(v)
            gens[(k, i)] = v
    for n in range(max_degree + 1):
        S.span(n)
        if n == 0:
            for i in T.basis_in_degree(0):
                S.add(0, {i: one})
            continue
        for k in range(1, n + 1):
            lower = S.basis(n - k)
            for i in range(base.dim):
                g = gens[(k, i)]
                if not g:
                    continue
                for s in lower:
                    sg = T.mul(s, g)
                    if not sg:
                        continue
                    for j in range(base.dim):
                        S.add(n, T.mul(sg, T.from_base({j: one})))
    if check:
        for n in range(max_degree):
            for v in S.basis(n):
                if not S.contains(qda.d(v)):
                    raise AssertionError(f"embedded envelope is not d-stable in degree {n}")
    S.qda = qda
    return S


# ---------------------------------------------------------------------------
# abstract envelope A ⊗ T(E)


def composition_count(n, max_part):
    """Compositions of n with parts in 1..max_part, counted by number of parts."""
    counts = {}
    for parts in _compositions(n, max_part):
        counts[len(parts)] = counts.get(len(parts), 0) + 1
    return counts


def _compositions(n, max_part):
    if n == 0:
        yield ()
        return
    for k in range(1, min(n, max_part) + 1):
        for rest in _compositions(n - k, max_part):
            yield (k,) + rest


def envelope_dimension(dim_a, n, max_part):
    """dim A * sum over compositions of n (parts <= max_part) of (dim A - 1)^r."""
    if n == 0:
        return dim_a
    return dim_a * sum(c * (dim_a - 1) ** r for r, c in composition_count(n, max_part).items())


class EnvelopeAlgebra(GradedAlgebra):
    """Omega_q(A) = A ⊗ T(E), truncated at ``max_degree``.

    Basis keys are (a, word): a indexes A's basis, word is a tuple of
    (level, u) with u indexing the basis of A/C1 (A's basis minus the pivot
    of the unit).  The product is the one determined by

        (y d^n(x)) b = y d^n(xb) - sum_{p=1}^n [n p]_q y d^{n-p}(x) d^p(b).
    """

    def __init__(self, base, max_degree, mode):
        if base.unit is None:
            raise ValueError("the envelope needs a unital algebra")
        self.base = base
        self.envelope_mode = mode
        self.cap = max_degree if mode.N is None else mode.N - 1
        unit = base.unit
        self.pivot = min(unit)
        self.quotient = [i for i in range(base.dim) if i != self.pivot]
        keys = []
        for n in range(max_degree + 1):
            for levels in _compositions(n, self.cap):
                for us in itertools.product(self.quotient, repeat=len(levels)):
                    word = tuple(zip(levels, us))
                    for a in range(base.dim):
                        keys.append((a, word))
        self.keys = keys
        self._index = {k: i for i, k in enumerate(keys)}
        self._rmul_cache = {}
        lab = base.labels

        def label(key):
            a, word = key
            return lab[a] + "".join(f"·d{'^' + str(k) if k > 1 else ''}({lab[u]})" for k, u in word)

        super().__init__(mode, [sum(k for k, _ in w) for _, w in keys], self._product,
                         labels=[label(k) for k in keys],
                         unit={self._index[(i, ())]: c for i, c in unit.items()},
                         max_degree=max_degree)

    def index_of(self, a, word):
        return self._index[(a, tuple(word))]

    def quotient_class(self, v):
        """Coordinates of the class of a base vector in A/C1."""
        unit = self.base.unit
        p = self.pivot
        xp = v.get(p)
        out = {}
        for u in self.quotient:
            c = v.get(u, self.mode.zero)
            if xp:
                c = c - xp * unit.get(u, self.mode.zero) / unit[p]
            if c:
                out[u] = c
        return out

    def _level(self, k, v):
        """Vector of words ((k, u),) for the class of base vector v, or {}."""
        if k > self.cap:
            return {}
        return {((k, u),): c for u, c in self.quotient_class(v).items()}

    def _rmul(self, a, word, b):
        """(b_a · word) · b_b as a dict over keys."""
        ck = (a, word, b)
        hit = self._rmul_cache.get(ck)
        if hit is not None:
            return hit
        mode = self.mode
        base = self.base
        out = {}
        if not word:
            for k, c in base.mul_basis(a, b).items():
                axpy(out, c, {(k, ()): mode.one})
        else:
            head, (k, u) = word[:-1], word[-1]
            ub = base.mul_basis(u, b)
            for w, c in self._level(k, ub).items():
                axpy(out, c, {(a, head + w): mode.one})
            bvec = {b: mode.one}
            uvec = {u: mode.one}
            for p in range(1, k):
                coeff = -q_binomial(k, p, mode)
                for w1, c1 in self._level(k - p, uvec).items():
                    for w2, c2 in self._level(p, bvec).items():
                        axpy(out, coeff * c1 * c2, {(a, head + w1 + w2): mode.one})
            # p = k: (b_a head) u d^k(b), recursively
            tail = self._level(k, bvec)
            if tail:
                for (a2, w2), c in self._rmul(a, head, u).items():
                    for w3, c3 in tail.items():
                        axpy(out, -c * c3, {(a2, w2 + w3): mode.one})
        self._rmul_cache[ck] = out
        return out

    def _product(self, i, j):
        (a, w), (b, w2) = self.keys[i], self.keys[j]
        out = {}
        for (a3, w3), c in self._rmul(a, w, b).items():
            key = (a3, w3 + w2)
            idx = self._index.get(key)
            if idx is None:
                continue  # above the truncation
            axpy(out, c, {idx: self.mode.one})
        return out

    def differential(self):
        """d(y ⊗ t) = 1 ⊗ d(y) t + y ⊗ d(t) on every basis vector below the top."""
        mode = self.mode
        unit = self.base.unit
        images = {}
        for idx, (a, word) in enumerate(self.keys):
            if self.degrees[idx] + 1 > self.max_degree:
                continue
            out = {}
            for w, c in self._level(1, {a: mode.one}).items():
                for i, cu in unit.items():
                    axpy(out, c * cu, {self._index[(i, w + word)]: mode.one})
            shift = 0
            for pos, (k, u) in enumerate(word):
                if k + 1 <= self.cap:
                    new = word[:pos] + ((k + 1, u),) + word[pos + 1:]
                    axpy(out, mode.qpow(shift), {self._index[(a, new)]: mode.one})
                shift += k
            images[idx] = out
        return DegreeOneMap(self, images)


def envelope_abstract(base, max_degree, mode, check=True):
    """Omega_q(A) as A ⊗ T(E) with its product and d, validated by attach."""
    env = EnvelopeAlgebra(base, max_degree, mode)
    d = env.differential()
    if check:
        return attach(env, d, mode)
    return QDiffAlgebra(env, d, mode)


def universal_extension(env_qda, phi, target_qda, check=True):
    """The q-differential homomorphism Omega_q(A) -> target inducing phi.

    phi maps A's basis indices to degree-0 vectors of the target.  The
    generator d^k(u) goes to d^k(phi(u)); a ⊗ t goes to phi(a) phi_1(t).
    Returns column storage; with ``check`` it verifies that phi is a unital
    homomorphism, that the map commutes with d, and that it is
    multiplicative, on every basis vector within the common truncation.
    """
    env = env_qda.algebra
    target = target_qda.algebra
    mode = env_qda.mode
    limit = env.max_degree if target.max_degree is None else min(env.max_degree, target.max_degree)
    if check:
        _check_unital(env.base, phi, target)
    gen = {}
    for u in env.quotient:
        v = phi.get(u, {})
        for k in range(1, env.cap + 1):
            if k > limit:
                break
            v = target_qda.d(v)
            gen[(k, u)] = v
    images = {}
    for idx, (a, word) in enumerate(env.keys):
        if env.degrees[idx] > limit:
            continue
        v = dict(phi.get(a, {}))
        for g in word:
            if not v:
                break
            v = target.mul(v, gen[g])
        images[idx] = v
    if check:
        for idx in images:
            if env.degrees[idx] + 1 > limit:
                continue
            lhs = apply(images, env_qda.d({idx: mode.one}))
            rhs = target_qda.d(images[idx])
            if lhs != rhs:
                raise AssertionError(f"extension does not commute with d on {env.labels[idx]}")
        for i, j in itertools.product(images, repeat=2):
            if env.degrees[i] + env.degrees[j] > limit:
                continue
            if apply(images, env.mul_basis(i, j)) != target.mul(images[i], images[j]):
                raise AssertionError(f"extension is not multiplicative on ({env.labels[i]}, {env.labels[j]})")
    return images


def canonical_embedding(env_qda, T_qda, check=True):
    """Id-bar: Omega_q(A) -> T(A), with per-degree rank data.

    Returns (images, report) where report[n] = (dim Omega_q^n, rank of the
    images, whether every image lies in ``embedded``).
    """
    env = env_qda.algebra
    T = T_qda.algebra
    phi = {i: T.from_base({i: env.mode.one}) for i in range(env.base.dim)}
    return universal_extension(env_qda, phi, T_qda, check=check)


def embedding_ranks(env, images, T, embedded):
    """Per degree: (abstract dim, rank of images, images inside the embedded span)."""
    blocks = _Blocks(T)
    out = {}
    top = min(env.max_degree, T.max_degree)
    for n in range(top + 1):
        spans = {}
        inside = True
        for idx in env.basis_in_degree(n):
            v = images[idx]
            if not embedded.contains(v):
                inside = False
            for key, part in blocks.parts(v).items():
                spans.setdefault(key, Span()).add(part)
        out[n] = (len(env.basis_in_degree(n)), sum(len(s) for s in spans.values()), inside)
    return out
