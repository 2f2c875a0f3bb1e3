"""Exact scalars in the two q-regimes, and q-combinatorics.

Two carriers are supported:

* generic q: the field Q(q) of rational functions, stored as a reduced
  fraction of integer polynomials;
* q a primitive N-th root of unity: the cyclotomic field Q[q]/Phi_N,
  stored as an integer polynomial of degree < phi(N) over a positive
  integer denominator.

Both carriers are fields, so every nonzero scalar is invertible.  Scalars
are immutable and hashable; equality is comparison of canonical forms.

>>> m = QMode.root_of_unity(3)
>>> q_int(3, m) == 0
True
>>> str(q_binomial(4, 2, QMode.generic()))
'(1 + q + 2*q^2 + q^3 + q^4)/(1)'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from flint import fmpz_poly
from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dup_invert

__all__ = [
    "QMode",
    "Scalar",
    "ScalarParseError",
    "q_int",
    "q_factorial",
    "q_binomial",
]


class ScalarParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer polynomials are flint fmpz_poly values; these helpers convert


_ONE = fmpz_poly([1])


def _poly(c):
    return c if type(c) is fmpz_poly else fmpz_poly(list(c))


def _ints(p):
    """Coefficient tuple of an fmpz_poly, lowest degree first."""
    return tuple(int(v) for v in p.coeffs())


def _to_dup(c, K=QQ):
    return [K(v) for v in reversed(c)] if c else []


@lru_cache(maxsize=None)
def _cyclotomic(N):
    return fmpz_poly.cyclotomic(N)


# ---------------------------------------------------------------------------
# modes


@dataclass(frozen=True)
class QMode:
    """Which field the scalars live in.

    ``N is None`` means q is an indeterminate; otherwise q is a primitive
    N-th root of unity (``N == 1`` means q = 1).
    """

    N: int | None = None

    def __post_init__(self):
        if self.N is not None and (not isinstance(self.N, int) or self.N < 1):
            raise ValueError(f"N must be a positive integer, got {self.N!r}")

    @classmethod
    def generic(cls):
        return cls(None)

    @classmethod
    def root_of_unity(cls, N):
        return cls(N)

    @classmethod
    def from_string(cls, s):
        s = str(s).strip().lower()
        if s in ("generic", "inf", "infinity"):
            return cls.generic()
        try:
            return cls(int(s))
        except ValueError:
            raise ValueError(f"mode must be a positive integer or 'generic', got {s!r}")

    @property
    def is_generic(self):
        return self.N is None

    def __str__(self):
        return "generic" if self.N is None else f"N={self.N}"

    # --- constructors ---------------------------------------------------

    def __call__(self, value):
        """Coerce an int, Fraction, scalar string or Scalar into this field."""
        if isinstance(value, Scalar):
            if value.mode != self:
                raise TypeError(f"scalar of mode {value.mode} used in mode {self}")
            return value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (int, Fraction)):
            value = Fraction(value)
            if self.N is None:
                return RationalFunction._make((value.numerator,), (value.denominator,), self)
            return CyclotomicElement._make((value.numerator,), value.denominator, self)
        raise TypeError(f"cannot convert {type(value).__name__} to a scalar")

    def polynomial(self, coeffs):
        """Scalar for sum(coeffs[k] * q**k); coefficients may be Fractions."""
        coeffs = [Fraction(c) for c in coeffs]
        den = 1
        for c in coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = tuple(int(c * den) for c in coeffs)
        if self.N is None:
            return RationalFunction._make(ints, (den,), self)
        return CyclotomicElement._make(ints, den, self)

    @property
    def zero(self):
        return _constants(self)[0]

    @property
    def one(self):
        return _constants(self)[1]

    @property
    def q(self):
        return _constants(self)[2]

    def qpow(self, k):
        """q**k for any integer k (negative powers allowed)."""
        return _qpow(self, k)

    def parse(self, s):
        return _parse_scalar(s, self)


@lru_cache(maxsize=None)
def _constants(mode):
    return mode(0), mode(1), mode.polynomial([0, 1])


@lru_cache(maxsize=4096)
def _qpow(mode, k):
    if k < 0:
        return _qpow(mode, -k).inverse()
    if mode.N is not None:
        k %= mode.N
    return mode.q ** k


# ---------------------------------------------------------------------------
# scalars


class Scalar:
    """Common operator plumbing; see the two concrete carriers below."""

    __slots__ = ()

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.mode is not self.mode and other.mode != self.mode:
                raise TypeError(f"mixing scalars of modes {self.mode} and {other.mode}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.mode(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._add(other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._add(-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other._add(-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._mul(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._mul(other.inverse())

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other._mul(self.inverse())

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.mode.one
        base = self
        while k:
            if k & 1:
                result = result._mul(base)
            base = base._mul(base)
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.mode(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.mode == other.mode and self._key() == other._key()

    def __hash__(self):
        return hash((self.mode, self._key()))

    def __repr__(self):
        return f"Scalar({str(self)!r})"


class CyclotomicElement(Scalar):
    """Element of Q[q]/Phi_N: ``sum(c[k] q^k) / den``.

    Canonical form: the residue polynomial has degree < phi(N), den > 0 and
    the integer content of the residue is coprime to den.
    """

    __slots__ = ("_c", "den", "mode")

    @classmethod
    def _make(cls, c, den, mode):
        c = _poly(c)
        mod = _cyclotomic(mode.N)
        if c.degree() >= mod.degree():
            c = c % mod
        if c.is_zero():
            den = 1
        else:
            if den < 0:
                c = -c
                den = -den
            if den != 1:
                g = gcd(int(c.content()), den)
                if g != 1:
                    c = c // g
                    den //= g
        self = object.__new__(cls)
        self._c = c
        self.den = den
        self.mode = mode
        return self

    @property
    def c(self):
        return _ints(self._c)

    def _key(self):
        return (self.c, self.den)

    def __eq__(self, other):
        if type(other) is CyclotomicElement:
            return self.mode == other.mode and self.den == other.den and self._c == other._c
        return Scalar.__eq__(self, other)

    __hash__ = Scalar.__hash__

    def __bool__(self):
        return not self._c.is_zero()

    def is_zero(self):
        return self._c.is_zero()

    def __neg__(self):
        return CyclotomicElement._raw(-self._c, self.den, self.mode)

    @classmethod
    def _raw(cls, c, den, mode):
        self = object.__new__(cls)
        self._c = c
        self.den = den
        self.mode = mode
        return self

    def _add(self, other):
        if other._c.is_zero():
            return self
        if self._c.is_zero():
            return other
        if self.den == 1 and other.den == 1:
            s = self._c + other._c
            return CyclotomicElement._raw(s, 1, self.mode) if not s.is_zero() else self.mode.zero
        return CyclotomicElement._make(self._c * other.den + other._c * self.den, self.den * other.den, self.mode)

    def _mul(self, other):
        if self._c.is_zero() or other._c.is_zero():
            return self.mode.zero
        if other.den == 1 and other._c == _ONE:
            return self
        if self.den == 1 and self._c == _ONE:
            return other
        return CyclotomicElement._make(self._c * other._c, self.den * other.den, self.mode)

    def inverse(self):
        if self._c.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        c = self.c
        if len(c) == 1:
            return CyclotomicElement._make((self.den,), c[0], self.mode)
        inv = dup_invert(_to_dup(c), _to_dup(_ints(_cyclotomic(self.mode.N))), QQ)
        coeffs = [Fraction(int(v.numerator), int(v.denominator)) * self.den for v in reversed(inv)]
        return self.mode.polynomial(coeffs)

    def constant(self):
        """The value as a Fraction when it lies in Q, else None."""
        if self._c.degree() > 0:
            return None
        return Fraction(int(self._c[0]), self.den)

    def coefficients(self):
        """Rational coefficients of the canonical residue, lowest degree first."""
        return [Fraction(v, self.den) for v in self.c]

    def __str__(self):
        return f"{_format_poly(self.coefficients())} (mod Phi_{self.mode.N})"


class RationalFunction(Scalar):
    """Element of Q(q): ``num / den`` with integer polynomials.

    Canonical form: gcd(num, den) = 1 over Q[q], the integer content of the
    pair is 1 and den has a positive leading coefficient.
    """

    __slots__ = ("_n", "_d", "mode")

    @classmethod
    def _make(cls, num, den, mode, reduce=True):
        num = _poly(num)
        den = _poly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = _ONE
        elif reduce and den != _ONE:
            g = num.gcd(den)
            if g != _ONE:
                num = num // g
                den = den // g
            if den.leading_coefficient() < 0:
                num = -num
                den = -den
        return cls._raw(num, den, mode)

    @classmethod
    def _raw(cls, num, den, mode):
        self = object.__new__(cls)
        self._n = num
        self._d = den
        self.mode = mode
        return self

    @property
    def num(self):
        return _ints(self._n)

    @property
    def den(self):
        return _ints(self._d)

    def _key(self):
        return (self.num, self.den)

    def __eq__(self, other):
        if type(other) is RationalFunction:
            return self.mode == other.mode and self._n == other._n and self._d == other._d
        return Scalar.__eq__(self, other)

    __hash__ = Scalar.__hash__

    def constant(self):
        """The value as a Fraction when it lies in Q, else None."""
        if self._n.degree() > 0 or self._d.degree() > 0:
            return None
        return Fraction(int(self._n[0]) if not self._n.is_zero() else 0, int(self._d[0]))

    def __bool__(self):
        return not self._n.is_zero()

    def is_zero(self):
        return self._n.is_zero()

    def __neg__(self):
        return RationalFunction._raw(-self._n, self._d, self.mode)

    def _add(self, other):
        if other._n.is_zero():
            return self
        if self._n.is_zero():
            return other
        if self._d == other._d:
            s = self._n + other._n
            if s.is_zero():
                return self.mode.zero
            if self._d == _ONE:
                return RationalFunction._raw(s, _ONE, self.mode)
            return RationalFunction._make(s, self._d, self.mode)
        return RationalFunction._make(self._n * other._d + other._n * self._d, self._d * other._d, self.mode)

    def _mul(self, other):
        if self._n.is_zero() or other._n.is_zero():
            return self.mode.zero
        if other._d == _ONE:
            if other._n == _ONE:
                return self
            if self._d == _ONE:
                return RationalFunction._raw(self._n * other._n, _ONE, self.mode)
        elif self._n == _ONE and self._d == _ONE:
            return other
        return RationalFunction._make(self._n * other._n, self._d * other._d, self.mode)

    def inverse(self):
        if self._n.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        return RationalFunction._make(self._d, self._n, self.mode)

    def specialize(self, mode):
        """Image under q -> the class of q in Q[q]/Phi_N (``mode`` a root of unity)."""
        if mode.is_generic:
            raise ValueError("specialize needs a root-of-unity mode")
        num = CyclotomicElement._make(self._n, 1, mode)
        den = CyclotomicElement._make(self._d, 1, mode)
        if not den:
            raise ZeroDivisionError(f"denominator vanishes at a primitive {mode.N}-th root of unity")
        return num / den

    def __str__(self):
        return f"({_format_poly(self.num)})/({_format_poly(self.den)})"


# ---------------------------------------------------------------------------
# serialization


def _format_coeff(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_poly(coeffs):
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        if k == 0:
            t = _format_coeff(c)
        else:
            mono = "q" if k == 1 else f"q^{k}"
            if c == 1:
                t = mono
            elif c == -1:
                t = "-" + mono
            else:
                t = f"{_format_coeff(c)}*{mono}"
        terms.append(t)
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)(?:\*(?=q))?)?(?:(q)(?:\^(\d+))?)?$")


def _parse_poly(s):
    s = s.replace(" ", "")
    if not s:
        raise ScalarParseError("empty polynomial")
    pieces = re.findall(r"[+-]?[^+-]+", s)
    if "".join(pieces) != s:
        raise ScalarParseError(f"malformed polynomial {s!r}")
    coeffs = {}
    for piece in pieces:
        sign = -1 if piece[0] == "-" else 1
        body = piece.lstrip("+-")
        m = _TERM.match(body)
        if not m or not body:
            raise ScalarParseError(f"malformed term {piece!r}")
        num, var, exp = m.groups()
        c = Fraction(num) if num else Fraction(1)
        if var is None:
            if num is None:
                raise ScalarParseError(f"malformed term {piece!r}")
            k = 0
        else:
            k = int(exp) if exp else 1
        coeffs[k] = coeffs.get(k, 0) + sign * c
    top = max(coeffs)
    return [coeffs.get(k, Fraction(0)) for k in range(top + 1)]


_CYC = re.compile(r"^(.*)\(mod\s*Phi_(\d+)\)\s*$")
_RAT = re.compile(r"^\((.*)\)\s*/\s*\((.*)\)$")


def _parse_scalar(s, mode):
    s = s.strip()
    m = _CYC.match(s)
    if m:
        if mode.N is None or int(m.group(2)) != mode.N:
            raise ScalarParseError(f"{s!r} is not a scalar of mode {mode}")
        return mode.polynomial(_parse_poly(m.group(1)))
    m = _RAT.match(s)
    if m:
        num, den = mode.polynomial(_parse_poly(m.group(1))), mode.polynomial(_parse_poly(m.group(2)))
        return num / den
    # bare polynomial shorthand, e.g. "1/2" or "1 + q"
    return mode.polynomial(_parse_poly(s))


# ---------------------------------------------------------------------------
# q-combinatorics


@lru_cache(maxsize=None)
def q_int(n, mode):
    """[n]_q = 1 + q + ... + q^(n-1)."""
    if n < 0:
        raise ValueError("q_int needs n >= 0")
    return mode.polynomial([1] * n)


@lru_cache(maxsize=None)
def q_factorial(n, mode):
    if n < 0:
        raise ValueError("q_factorial needs n >= 0")
    if n == 0:
        return mode.one
    return q_factorial(n - 1, mode) * q_int(n, mode)


@lru_cache(maxsize=None)
def q_binomial(n, p, mode):
    """Gaussian binomial via the q-Pascal rule (division free, so it is
    defined at roots of unity where factorials vanish)."""
    if p < 0 or n < 0 or p > n:
        raise ValueError(f"q_binomial needs 0 <= p <= n, got n={n}, p={p}")
    if p == 0 or p == n:
        return mode.one
    return q_binomial(n - 1, p - 1, mode) + mode.qpow(p) * q_binomial(n - 1, p, mode)
