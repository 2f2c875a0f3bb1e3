"""Finite-dimensional graded algebras, graded maps, and the Z_N -> N covering.

An algebra is a list of basis vectors with degrees plus a product on basis
pairs.  Algebras given by explicit structure constants come from
:func:`make_algebra`, which checks grading compatibility, associativity and
the unit exhaustively.  Larger algebras built elsewhere in the package
(tensor calculus, cochains, envelopes) subclass :class:`GradedAlgebra` and
supply the product as a function.

N-graded algebras that are really infinite are truncated at ``max_degree``:
products landing above it are dropped, which is the quotient by the ideal
of high degrees and so stays associative.
"""

from __future__ import annotations

import json
from pathlib import Path

from .linalg import apply, axpy, vscale
from .qscalar import QMode

__all__ = [
    "AlgebraError",
    "AssociativityViolation",
    "GradingViolation",
    "UnitViolation",
    "NonHomogeneous",
    "GradedAlgebra",
    "Element",
    "GradedMap",
    "DegreeOneMap",
    "make_algebra",
    "load_algebra",
    "algebra_to_json",
    "CoveringAlgebra",
    "covering",
    "lift_map",
    "diagonal_algebra",
    "matrix_algebra",
    "dual_numbers",
]


class AlgebraError(ValueError):
    """Base class for law violations; ``witness`` names the basis indices."""

    def __init__(self, message, witness=(), defect=None):
        super().__init__(message)
        self.witness = tuple(witness)
        self.defect = defect

    def record(self):
        return {"error": type(self).__name__, "message": str(self), "witness": list(self.witness)}


class AssociativityViolation(AlgebraError):
    pass


class GradingViolation(AlgebraError):
    pass


class UnitViolation(AlgebraError):
    pass


class NonHomogeneous(AlgebraError):
    pass


class GradedAlgebra:
    """Graded algebra on a finite (possibly truncated) basis.

    ``modulus`` is None for N-grading and N for Z_N-grading.  ``unit`` is a
    vector (dict) or None.  ``product(i, j)`` returns the vector b_i*b_j.
    """

    def __init__(self, mode, degrees, product, *, labels=None, modulus=None, unit=None, max_degree=None):
        self.mode = mode
        self.degrees = list(degrees)
        self.modulus = modulus
        if modulus is not None:
            self.degrees = [d % modulus for d in self.degrees]
        self.max_degree = max_degree
        self.labels = list(labels) if labels is not None else [f"b{i}" for i in range(len(self.degrees))]
        self._product = product
        self._table = {}
        self.unit = dict(unit) if unit is not None else None
        by_degree = {}
        for i, d in enumerate(self.degrees):
            by_degree.setdefault(d, []).append(i)
        self._by_degree = by_degree

    # --- basis bookkeeping ------------------------------------------------

    @property
    def dim(self):
        return len(self.degrees)

    def degree(self, i):
        return self.degrees[i]

    def basis_in_degree(self, n):
        return self._by_degree.get(n, [])

    def dims(self):
        top = self.max_degree if self.max_degree is not None else max(self.degrees, default=-1)
        return [len(self.basis_in_degree(n)) for n in range(top + 1)]

    def add_degrees(self, a, b):
        s = a + b
        return s % self.modulus if self.modulus is not None else s

    def in_range(self, n):
        """Whether degree n is represented (inside the truncation window)."""
        if self.modulus is not None:
            return True
        return n >= 0 and (self.max_degree is None or n <= self.max_degree)

    def label(self, i):
        return self.labels[i]

    def index(self, label):
        if isinstance(label, int):
            return label
        return self.labels.index(label)

    # --- products ---------------------------------------------------------

    def mul_basis(self, i, j):
        key = (i, j)
        out = self._table.get(key)
        if out is None:
            if self.modulus is None and self.max_degree is not None and self.degrees[i] + self.degrees[j] > self.max_degree:
                out = {}
            else:
                # share the mode's one so products can skip multiplying by it
                one = self.mode.one
                out = {k: (one if c == one else c) for k, c in self._product(i, j).items()}
            self._table[key] = out
        return out

    def mul(self, u, v):
        return self.mul_into({}, u, v)

    def mul_into(self, out, u, v):
        """out += u*v in place; returns out."""
        # entries are Scalars of this algebra's mode, so _mul skips coercion
        table = self._table
        one = self.mode.one
        for i, a in u.items():
            for j, b in v.items():
                prod = table.get((i, j))
                if prod is None:
                    prod = self.mul_basis(i, j)
                if not prod:
                    continue
                c = a._mul(b)
                for k, x in prod.items():
                    t = c if x is one else c._mul(x)
                    w = out.get(k)
                    w = t if w is None else w._add(t)
                    if w:
                        out[k] = w
                    else:
                        del out[k]
        return out

    def basis_vector(self, i):
        return {i: self.mode.one}

    def unit_vector(self):
        if self.unit is None:
            raise ValueError("algebra has no unit")
        return dict(self.unit)

    def element(self, v):
        return Element(self, v)

    def vector_degree(self, v):
        """Common degree of a homogeneous vector, or None if mixed/zero."""
        degs = {self.degrees[i] for i in v}
        return degs.pop() if len(degs) == 1 else None

    # --- validation -------------------------------------------------------

    def grading_violations(self):
        for i in range(self.dim):
            for j in range(self.dim):
                target = self.add_degrees(self.degrees[i], self.degrees[j])
                for k in self.mul_basis(i, j):
                    if self.degrees[k] != target:
                        yield (i, j)
                        break

    def associativity_violations(self):
        n = self.dim
        for i in range(n):
            for j in range(n):
                ij = self.mul_basis(i, j)
                for k in range(n):
                    if self.modulus is None and self.max_degree is not None:
                        if self.degrees[i] + self.degrees[j] + self.degrees[k] > self.max_degree:
                            continue
                    left = self.mul(ij, {k: self.mode.one})
                    right = self.mul({i: self.mode.one}, self.mul_basis(j, k))
                    if left != right:
                        yield (i, j, k)

    def unit_violations(self):
        if self.unit is None:
            return
        for k in self.unit:
            if self.degrees[k] != 0:
                yield (k,)
                return
        for i in range(self.dim):
            e = {i: self.mode.one}
            if self.mul(self.unit, e) != e or self.mul(e, self.unit) != e:
                yield (i,)

    def validate(self):
        for w in self.grading_violations():
            raise GradingViolation(f"product of {self.labels[w[0]]} and {self.labels[w[1]]} is not homogeneous of the expected degree", w)
        for w in self.associativity_violations():
            i, j, k = w
            raise AssociativityViolation(f"({self.labels[i]}*{self.labels[j]})*{self.labels[k]} != {self.labels[i]}*({self.labels[j]}*{self.labels[k]})", w)
        for w in self.unit_violations():
            raise UnitViolation(f"unit fails on {self.labels[w[0]]}", w)
        return self

    def __repr__(self):
        kind = "nat" if self.modulus is None else f"mod {self.modulus}"
        return f"<{type(self).__name__} dim={self.dim} grading={kind} max_degree={self.max_degree}>"


class Element:
    """A vector of a graded algebra with arithmetic."""

    __slots__ = ("parent", "coeffs")

    def __init__(self, parent, coeffs=None):
        self.parent = parent
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v}

    def _check(self, other):
        if not isinstance(other, Element) or other.parent is not self.parent:
            raise TypeError("elements of different algebras")

    def __add__(self, other):
        self._check(other)
        return Element(self.parent, axpy(dict(self.coeffs), 1, other.coeffs))

    def __sub__(self, other):
        self._check(other)
        return Element(self.parent, axpy(dict(self.coeffs), -1, other.coeffs))

    def __neg__(self):
        return Element(self.parent, vscale(-1, self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check(other)
            return Element(self.parent, self.parent.mul(self.coeffs, other.coeffs))
        return Element(self.parent, vscale(other, self.coeffs))

    def __rmul__(self, other):
        return Element(self.parent, vscale(other, self.coeffs))

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        if not isinstance(other, Element):
            return NotImplemented
        return self.parent is other.parent and self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def degree(self):
        return self.parent.vector_degree(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"[{c}]*{self.parent.labels[i]}" for i, c in sorted(self.coeffs.items()))


class GradedMap:
    """Homogeneous linear endomorphism of a graded algebra, column stored.

    On a truncated N-graded algebra the map is only known on basis vectors
    whose image degree stays within the window; others are "undefined" and
    have no stored column.
    """

    def __init__(self, space, images, degree=1):
        self.space = space
        self.degree = degree
        self.images = {}
        for i, v in images.items():
            v = {k: c for k, c in v.items() if c}
            target = space.add_degrees(space.degree(i), degree)
            for k in v:
                if space.degree(k) != target:
                    raise NonHomogeneous(f"image of {space.label(i)} leaves degree {target}", (i, k))
            self.images[i] = v

    def defined(self, i):
        return self.space.in_range(self.space.add_degrees(self.space.degree(i), self.degree))

    def __call__(self, v):
        for i in v:
            if not self.defined(i):
                raise ValueError(f"map undefined on {self.space.label(i)} (outside truncation)")
        return apply(self.images, v)

    def power(self, v, n):
        for _ in range(n):
            v = self(v)
        return v

    def compose(self, other):
        return GradedMap(self.space, {i: apply(self.images, v) for i, v in other.images.items()
                                      if all(self.defined(k) for k in v)},
                         self.degree + other.degree)

    def scaled(self, c):
        return GradedMap(self.space, {i: vscale(c, v) for i, v in self.images.items()}, self.degree)

    def block(self, n):
        """Columns of the map restricted to degree n."""
        return {i: self.images.get(i, {}) for i in self.space.basis_in_degree(n)}


class DegreeOneMap(GradedMap):
    def __init__(self, space, images):
        super().__init__(space, images, 1)

    @classmethod
    def from_function(cls, space, f):
        """Build from a function on basis indices, skipping undefined ones."""
        images = {}
        for i in range(space.dim):
            if space.in_range(space.add_degrees(space.degree(i), 1)):
                images[i] = f(i)
        return cls(space, images)


# ---------------------------------------------------------------------------
# presentations


def _table_product(table):
    def product(i, j):
        return table.get((i, j), {})
    return product


def make_algebra(mode, basis, degrees, products, *, grading="nat", unit=None, max_degree=None):
    """Validated algebra from structure constants.

    ``products`` maps (i, j) to a dict k -> scalar (anything ``mode`` can
    coerce, including scalar strings).  Indices may be labels.  ``unit`` is
    a label/index or a dict label -> scalar.  ``grading`` is "nat" or
    "mod N".
    """
    labels = list(basis)
    idx = {lab: i for i, lab in enumerate(labels)}

    def ix(x):
        # labels win over digit strings, so a basis label "1" stays a label
        if isinstance(x, int):
            return x
        if x in idx:
            return idx[x]
        if x.isdigit():
            return int(x)
        raise KeyError(f"unknown basis element {x!r}")

    modulus = _parse_grading(grading)
    table = {}
    items = products.items() if isinstance(products, dict) else ((tuple(p[:2]), p[2]) for p in products)
    for (i, j), out in items:
        vec = {}
        for k, c in out.items():
            k = ix(k)
            c = mode(c)
            if c:
                vec[k] = vec.get(k, mode.zero) + c
        table[(ix(i), ix(j))] = {k: c for k, c in vec.items() if c}
    if unit is None:
        unit_vec = None
    elif isinstance(unit, dict):
        unit_vec = {ix(k): mode(c) for k, c in unit.items()}
    else:
        unit_vec = {ix(unit): mode.one}
    alg = GradedAlgebra(mode, degrees, _table_product(table), labels=labels, modulus=modulus,
                        unit=unit_vec, max_degree=max_degree)
    alg.structure_constants = table
    return alg.validate()


def _parse_grading(grading):
    if grading in (None, "nat"):
        return None
    g = str(grading).strip().lower()
    if g.startswith("mod"):
        return int(g[3:])
    raise ValueError(f"grading must be 'nat' or 'mod N', got {grading!r}")


def load_algebra(path_or_dict, mode, max_degree=None):
    """Algebra from a presentation file or dict; ``max_degree`` truncates N-graded ones."""
    data = path_or_dict
    if not isinstance(data, dict):
        data = json.loads(Path(path_or_dict).read_text())
    grading = data.get("grading", "nat")
    top = data.get("max_degree", max_degree) if grading == "nat" else None
    return make_algebra(mode, data["basis"], data["degrees"], data.get("products", []),
                        grading=grading, unit=data.get("unit"), max_degree=top)


def scalar_text(c):
    """Exact string for a scalar; rational constants are written mode-free."""
    k = c.constant()
    return str(k) if k is not None else str(c)


def algebra_to_json(alg):
    """Presentation dict for an algebra built by :func:`make_algebra`."""
    table = getattr(alg, "structure_constants", None)
    if table is None:
        table = {(i, j): alg.mul_basis(i, j) for i in range(alg.dim) for j in range(alg.dim)}
    lab = alg.labels
    products = [[lab[i], lab[j], {lab[k]: scalar_text(c) for k, c in sorted(v.items())}]
                for (i, j), v in sorted(table.items()) if v]
    return {
        "basis": alg.labels,
        "degrees": alg.degrees,
        "grading": "nat" if alg.modulus is None else f"mod {alg.modulus}",
        "unit": None if alg.unit is None else {lab[k]: scalar_text(c) for k, c in sorted(alg.unit.items())},
        "products": products,
    }


# ---------------------------------------------------------------------------
# standard algebras


def diagonal_algebra(n, mode):
    """C^n: orthogonal idempotents p1..pn, unit p1+...+pn, all in degree 0."""
    labels = [f"p{i + 1}" for i in range(n)]
    products = {(i, i): {i: 1} for i in range(n)}
    return make_algebra(mode, labels, [0] * n, products, unit={i: 1 for i in range(n)})


def matrix_algebra(N, mode, modulus=None):
    """M_N with matrix units E^k_l (label ``E{k}_{l}``), E^k_l E^r_s = delta^k_s E^r_l.

    Graded by k - l mod ``modulus`` (default N).
    """
    modulus = N if modulus is None else modulus
    pairs = [(k, l) for l in range(1, N + 1) for k in range(1, N + 1)]
    labels = [f"E{k}_{l}" for k, l in pairs]
    idx = {p: i for i, p in enumerate(pairs)}
    products = {}
    for (k, l), a in idx.items():
        for (r, s), b in idx.items():
            if k == s:
                products[(a, b)] = {idx[(r, l)]: 1}
    unit = {idx[(n, n)]: 1 for n in range(1, N + 1)}
    return make_algebra(mode, labels, [k - l for k, l in pairs], products,
                        grading=f"mod {modulus}", unit=unit)


def dual_numbers(mode):
    """C[eps]/(eps^2) with basis 1, eps in degree 0."""
    return make_algebra(mode, ["1", "eps"], [0, 0],
                        {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}, unit="1")


# ---------------------------------------------------------------------------
# covering


class CoveringAlgebra(GradedAlgebra):
    """p*A: degree n is a copy of A^{n mod N}; basis index <-> (n, i)."""

    def __init__(self, base, max_degree):
        if base.modulus is None:
            raise ValueError("covering needs a Z_N-graded algebra")
        N = base.modulus
        self.base = base
        pairs = [(n, i) for n in range(max_degree + 1) for i in base.basis_in_degree(n % N)]
        self.pairs = pairs
        self._index = {p: k for k, p in enumerate(pairs)}

        def product(a, b):
            (m, i), (n, j) = pairs[a], pairs[b]
            if m + n > max_degree:
                return {}
            return {self._index[(m + n, k)]: c for k, c in base.mul_basis(i, j).items()}

        unit = None
        if base.unit is not None:
            unit = {self._index[(0, i)]: c for i, c in base.unit.items()}
        super().__init__(base.mode, [n for n, _ in pairs], product,
                         labels=[f"({n},{base.labels[i]})" for n, i in pairs],
                         unit=unit, max_degree=max_degree)

    def lift(self, n, v):
        """The degree-n copy of a vector v of A^{n mod N}."""
        return {self._index[(n, i)]: c for i, c in v.items()}

    def project(self, v):
        """pi(n, a) = a, extended linearly."""
        out = {}
        for k, c in v.items():
            axpy(out, c, {self.pairs[k][1]: c.mode.one})
        return out


def covering(a, max_degree):
    return CoveringAlgebra(a, max_degree)


def lift_map(D, cover, degree=None):
    """p*(D) for a homogeneous map D on a Z_N-graded algebra.

    ``D`` is column stored over the base algebra's basis (dict index ->
    vector) or a :class:`GradedMap` on it.  The lift has the unique degree
    k in 0..N-1 congruent to D's degree and satisfies pi∘p*(D) = D∘pi.
    """
    base = cover.base
    N = base.modulus
    images = D.images if isinstance(D, GradedMap) else D
    if degree is None and isinstance(D, GradedMap):
        degree = D.degree
    shifts = set()
    for i, v in images.items():
        for k in v:
            shifts.add((base.degree(k) - base.degree(i)) % N)
    if len(shifts) > 1:
        raise NonHomogeneous("map mixes target residues", tuple(sorted(shifts)))
    if shifts:
        r = shifts.pop()
        if degree is not None and degree % N != r:
            raise NonHomogeneous(f"map has residue degree {r}, not {degree % N}")
    else:
        r = (degree if degree is not None else 1) % N
    k = r
    lifted = {}
    for a, (n, i) in enumerate(cover.pairs):
        if n + k > cover.max_degree:
            continue
        lifted[a] = cover.lift(n + k, images.get(i, {}))
    out = GradedMap(cover, lifted, k)
    # pi∘p*(D) = D∘pi on every defined basis vector
    for a, (n, i) in enumerate(cover.pairs):
        if a in lifted and cover.project(lifted[a]) != images.get(i, {}):
            raise AssertionError("lift does not intertwine the projection")
    return out
