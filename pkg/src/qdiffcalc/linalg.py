"""Sparse exact linear algebra over a field of Scalars.

Vectors are plain dicts ``index -> Scalar`` with no stored zeros.  Linear
maps are dicts ``source index -> image vector`` (column storage), which is
how every map in this package is produced: by evaluating on basis vectors.

Elimination is deterministic: pivots are the smallest column index of the
reduced vector and vectors are processed in the order given, so ranks,
kernels and representatives are reproducible run to run.
"""

from __future__ import annotations

__all__ = [
    "axpy",
    "vadd",
    "vsub",
    "vscale",
    "apply",
    "compose",
    "Span",
    "rank",
    "kernel",
    "solve",
]


def axpy(y, a, x):
    """y += a*x in place; returns y."""
    if not a:
        return y
    for i, v in x.items():
        w = y.get(i)
        w = a * v if w is None else w + a * v
        if w:
            y[i] = w
        else:
            y.pop(i, None)
    return y


def vadd(u, v):
    return axpy(dict(u), 1, v)


def vsub(u, v):
    return axpy(dict(u), -1, v)


def vscale(a, v):
    if not a:
        return {}
    out = {}
    for i, x in v.items():
        w = a * x
        if w:
            out[i] = w
    return out


def apply(matrix, v):
    """Apply a column-stored map to a vector; missing columns map to zero."""
    out = {}
    for j, c in v.items():
        col = matrix.get(j)
        if col:
            axpy(out, c, col)
    return out


def compose(a, b):
    """Column storage of a∘b."""
    return {j: apply(a, col) for j, col in b.items()}


class Span:
    """Incrementally maintained reduced row echelon basis of a subspace.

    With ``track=True`` every stored row also carries its expression as a
    combination of the labelled vectors that were added, which is what
    kernels and quotient coordinates need.
    """

    def __init__(self, vectors=(), track=False):
        self.rows = {}
        self.track = track
        self.combos = {} if track else None
        for v in vectors:
            self.add(v)

    def __len__(self):
        return len(self.rows)

    @property
    def pivots(self):
        return sorted(self.rows)

    def basis(self):
        return [self.rows[p] for p in sorted(self.rows)]

    def reduce(self, v):
        """Remainder of v modulo the span (zero iff v lies in the span)."""
        r = dict(v)
        for p in [p for p in r if p in self.rows]:
            c = r.get(p)
            if c:
                axpy(r, -c, self.rows[p])
        return r

    def express(self, v):
        """Return (remainder, coefficients) with v = sum coeff*labelled + remainder."""
        if not self.track:
            raise ValueError("express needs a tracking Span")
        r = dict(v)
        coeffs = {}
        for p in [p for p in r if p in self.rows]:
            c = r.get(p)
            if c:
                axpy(r, -c, self.rows[p])
                axpy(coeffs, c, self.combos[p])
        return r, coeffs

    def contains(self, v):
        return not self.reduce(v)

    def add(self, v, label=None):
        """Insert v; return the remainder's combination if v was dependent.

        Returns None when v enlarged the span.  For a dependent vector the
        return value is the relation it produced: a dict over labels that
        sums to zero (only meaningful with tracking, otherwise ``{}``).
        """
        if self.track:
            if label is None:
                raise ValueError("tracking Span needs labels")
            r, coeffs = self.express(v)
            combo = axpy({label: v_one(v)}, -1, coeffs)
        else:
            r = self.reduce(v)
            combo = None
        if not r:
            return combo if combo is not None else {}
        p = min(r)
        inv = r[p].inverse()
        r = vscale(inv, r)
        if combo is not None:
            combo = vscale(inv, combo)
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                axpy(row, -c, r)
                if combo is not None:
                    axpy(self.combos[q], -c, combo)
        self.rows[p] = r
        if combo is not None:
            self.combos[p] = combo
        return None


def v_one(v):
    """The scalar 1 of whatever field v's entries live in."""
    for x in v.values():
        return x.mode.one
    return 1


def rank(vectors):
    return len(Span(vectors))


def kernel(images, source=None, one=None):
    """Basis of the kernel of a column-stored map.

    ``source`` lists the source basis indices in elimination order (default:
    sorted keys of ``images``); indices absent from ``images`` map to zero.
    """
    if source is None:
        source = sorted(images)
    span = Span(track=True)
    basis = []
    for j in source:
        col = images.get(j, {})
        if not col:
            basis.append({j: one if one is not None else _unit_like(images)})
            continue
        rel = span.add(col, label=j)
        if rel is not None:
            basis.append(rel)
    return basis


def _unit_like(images):
    for col in images.values():
        for x in col.values():
            return x.mode.one
    return 1


def solve(columns, target):
    """Coefficients c with sum c[j]*columns[j] == target, or None."""
    span = Span(track=True)
    for j in sorted(columns):
        if columns[j]:
            span.add(columns[j], label=j)
    r, coeffs = span.express(target)
    return None if r else coeffs
