"""Exact arithmetic: Gaussian rationals, sparse multivariate polynomials,
truncated power series and small exact matrices.

Rationals are plain :class:`fractions.Fraction`.  Everything else in the
package is built on the three classes below, which interoperate with
``int`` and ``Fraction`` through the usual operator protocol.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import factorial

__all__ = [
    "GaussianRational",
    "I",
    "MultiPoly",
    "PowerSeries",
    "ExactMatrix",
    "series_calculus",
    "special_numbers",
    "tangent_number",
    "arctangent_number",
    "bernoulli",
    "matrix_ops",
    "parse_scalar",
    "parse_entry",
    "fmt",
]

DEFAULT_ORDER = 16


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class GaussianRational:
    """Element ``re + im*I`` of Q(i)."""

    __slots__ = ("re", "im", "_hash")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)
        self._hash = None

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        if isinstance(x, MultiPoly) and x.is_constant():
            return x.constant_value()
        raise TypeError(f"cannot coerce {x!r} to GaussianRational")

    def _other(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if not o.im:
            return GaussianRational(self.re * o.re, self.im * o.re)
        if not self.im:
            return GaussianRational(self.re * o.re, self.re * o.im)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self):
        d = self.re * self.re + self.im * self.im
        if not d:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / d, -self.im / d)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = GaussianRational(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def is_real(self):
        return self.im == 0

    def real(self):
        """Return the real part, asserting the value is real."""
        if self.im:
            raise ValueError(f"expected a real value, got {self}")
        return self.re

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return other == self
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.re) if not self.im else hash((self.re, self.im))
        return self._hash

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if self.im == 1:
            im = "I"
        elif self.im == -1:
            im = "-I"
        else:
            im = f"{self.im}*I"
        if not self.re:
            return im
        if im.startswith("-"):
            return f"{self.re}{im}"
        return f"{self.re}+{im}"


I = GaussianRational(0, 1)

_SCALAR_RE = re.compile(
    r"""^\s*(?:
        (?P<re>[+-]?\d+(?:/\d+)?)?\s*
        (?:(?P<sign>[+-])?\s*(?P<im>\d+(?:/\d+)?)?\s*\*?\s*(?P<unit>[Ii]))?
    )\s*$""",
    re.VERBOSE,
)


def parse_scalar(text):
    """Parse ``"p/q"``, ``"p/q+r/s*I"``, ``"I"``, ``"-3*I"`` into Q(i)."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    m = _SCALAR_RE.match(s)
    if not m or (m.group("re") is None and m.group("unit") is None):
        raise ValueError(f"malformed exact scalar: {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im_part = Fraction(0)
    if m.group("unit"):
        im_part = Fraction(m.group("im")) if m.group("im") else Fraction(1)
        sign = m.group("sign")
        if sign == "-":
            im_part = -im_part
        elif sign is None and m.group("re") is not None:
            # "3I" style: the digits belong to the imaginary part
            if m.group("im") is None:
                im_part, re_part = re_part, Fraction(0)
            else:
                raise ValueError(f"malformed exact scalar: {text!r}")
    return GaussianRational(re_part, im_part)


def _natural_key(name):
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name))


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


class MultiPoly:
    """Sparse commutative polynomial over Q(i) in named indeterminates.

    Terms are stored as ``{monomial: coefficient}`` where a monomial is a
    sorted tuple of ``(name, exponent)`` pairs.  Zero coefficients are
    never stored.  Indeterminates are treated as real for conjugation.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {}
        self._hash = None
        if terms:
            for mono, c in terms.items():
                c = GaussianRational.coerce(c)
                if c:
                    self.terms[mono] = c

    @classmethod
    def _raw(cls, terms):
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def var(cls, name, exp=1):
        return cls._raw({((name, exp),): GaussianRational(1)})

    @classmethod
    def const(cls, c):
        c = GaussianRational.coerce(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def monomial(cls, mono, coeff=1):
        """Build ``coeff * mono`` from an iterable of variable names (with repeats)."""
        d = {}
        for v in mono:
            d[v] = d.get(v, 0) + 1
        return cls({tuple(sorted(d.items())): coeff})

    @classmethod
    def coerce(cls, x):
        if isinstance(x, MultiPoly):
            return x
        return cls.const(x)

    # ring structure -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, (MultiPoly, GaussianRational, int, Fraction)):
            return NotImplemented
        o = MultiPoly.coerce(other)
        t = dict(self.terms)
        for m, c in o.terms.items():
            s = t.get(m)
            if s is None:
                t[m] = c
            else:
                s = s + c
                if s:
                    t[m] = s
                else:
                    del t[m]
        return MultiPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({m: -c for m, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, (MultiPoly, GaussianRational, int, Fraction)):
            return NotImplemented
        return self + (-MultiPoly.coerce(other))

    def __rsub__(self, other):
        if not isinstance(other, (MultiPoly, GaussianRational, int, Fraction)):
            return NotImplemented
        return MultiPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            c = GaussianRational.coerce(other)
            if not c:
                return MultiPoly._raw({})
            return MultiPoly._raw({m: v * c for m, v in self.terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = t.get(m)
                t[m] = c1 * c2 if s is None else s + c1 * c2
        return MultiPoly._raw({m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            if not other.is_constant():
                return NotImplemented
            other = other.constant_value()
        if not isinstance(other, (int, Fraction, GaussianRational)):
            return NotImplemented
        inv = GaussianRational.coerce(other).inverse()
        return self * inv

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result, base = MultiPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # inspection -----------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"polynomial is not constant: {self}")
        return self.terms.get((), GaussianRational(0))

    def coefficient(self, mono):
        """Coefficient of a monomial given as ``{name: exp}`` or a canonical tuple."""
        if isinstance(mono, dict):
            mono = tuple(sorted((v, e) for v, e in mono.items() if e))
        return self.terms.get(mono, GaussianRational(0))

    def variables(self):
        return sorted({v for m in self.terms for v, _ in m}, key=_natural_key)

    def degree(self):
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    def conjugate(self):
        return MultiPoly._raw({m: c.conjugate() for m, c in self.terms.items()})

    def subs(self, values):
        """Substitute ``{name: value}``; the evaluation is a ring homomorphism."""
        out = MultiPoly.const(0)
        cache = {}
        for m, c in self.terms.items():
            term = MultiPoly.const(c)
            rest = []
            for v, e in m:
                if v in values:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = MultiPoly.coerce(values[v]) ** e
                    term = term * cache[key]
                else:
                    rest.append((v, e))
            if rest:
                term = term * MultiPoly._raw({tuple(rest): GaussianRational(1)})
            out = out + term
        return out

    def evaluate(self, values):
        """Full evaluation to a scalar; every variable must be assigned."""
        p = self.subs(values)
        if not p.is_constant():
            raise ValueError(f"unassigned variables {p.variables()}")
        return p.constant_value()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # rendering ------------------------------------------------------------

    def sorted_terms(self):
        """Terms in graded-lexicographic order, highest first."""
        names = self.variables()
        def key(item):
            d = dict(item[0])
            return (sum(d.values()), tuple(d.get(v, 0) for v in names))
        return sorted(self.terms.items(), key=key, reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            ms = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if not ms:
                s = str(c)
                if c.re and c.im:
                    s = f"({s})"
            elif c == 1:
                s = ms
            elif c == -1:
                s = "-" + ms
            elif c.im and c.re:
                s = f"({c})*{ms}"
            else:
                s = f"{c}*{ms}"
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out

    def __repr__(self):
        return f"MultiPoly({self})"


def parse_entry(text):
    """Parse a matrix entry: an exact scalar, or ``[-]coef*name`` / ``[-]name``."""
    s = text.strip()
    try:
        return parse_scalar(s)
    except ValueError:
        pass
    m = re.match(r"^([+-]?)(?:(.+?)\*)?([A-Za-z_][\w\[\],;]*)$", s.replace(" ", ""))
    if not m:
        raise ValueError(f"malformed matrix entry: {text!r}")
    coef = parse_scalar(m.group(2)) if m.group(2) else GaussianRational(1)
    if m.group(1) == "-":
        coef = -coef
    return MultiPoly.var(m.group(3)) * coef


def fmt(x):
    """Canonical exact text form used in JSON output."""
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, (Fraction, GaussianRational, MultiPoly)):
        return str(x)
    return x


def _is_zero(x):
    return not x


class PowerSeries:
    """Truncated power series ``sum c_k z^k`` for ``k = 0..order``.

    Coefficients may be any ring element supported by this module.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        coeffs = coeffs[: order + 1] + [0] * (order + 1 - len(coeffs))
        self.coeffs = tuple(coeffs)

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot truncate to a higher order")
        return PowerSeries(self.coeffs[: order + 1])

    def _check(self, other):
        if not isinstance(other, PowerSeries):
            raise TypeError("expected PowerSeries")
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([self.coeffs[0] + other] + list(self.coeffs[1:]))
        self._check(other)
        return PowerSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([a * other for a in self.coeffs])
        self._check(other)
        n = self.order
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if not _is_zero(b):
                    out[i + j] = out[i + j] + a * b
        return PowerSeries(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = PowerSeries([1], self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def hadamard(self, other):
        self._check(other)
        return PowerSeries([a * b for a, b in zip(self.coeffs, other.coeffs)])

    def compose(self, inner):
        """``self(inner(z))``; requires ``inner(0) = 0``."""
        self._check(inner)
        if not _is_zero(inner.coeffs[0]):
            raise ValueError("composition requires the inner series to have zero constant term")
        result = PowerSeries([self.coeffs[-1]], self.order)
        for c in reversed(self.coeffs[:-1]):
            result = result * inner + c
        return result

    def divide(self, other):
        """``self / other``; requires an invertible constant term in ``other``."""
        self._check(other)
        g0 = other.coeffs[0]
        if _is_zero(g0):
            raise ZeroDivisionError("division by a series with zero constant term")
        if isinstance(g0, MultiPoly):
            if not g0.is_constant():
                raise ValueError("constant term of divisor must be a scalar")
            g0 = g0.constant_value()
        inv = Fraction(1, g0) if isinstance(g0, int) else 1 / g0
        h = []
        for n in range(self.order + 1):
            acc = self.coeffs[n]
            for k in range(1, n + 1):
                if not _is_zero(other.coeffs[k]):
                    acc = acc - other.coeffs[k] * h[n - k]
            h.append(acc * inv)
        return PowerSeries(h)

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.order == other.order and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        return "PowerSeries([" + ", ".join(str(c) for c in self.coeffs) + "])"

    # common series --------------------------------------------------------

    @classmethod
    def z(cls, order=DEFAULT_ORDER):
        return cls([0, 1], order)

    @classmethod
    def arctan(cls, order=DEFAULT_ORDER):
        return cls([Fraction((-1) ** (k // 2), k) if k % 2 else 0 for k in range(order + 1)])

    @classmethod
    def sin(cls, order=DEFAULT_ORDER):
        return cls([Fraction((-1) ** (k // 2), factorial(k)) if k % 2 else 0 for k in range(order + 1)])

    @classmethod
    def cos(cls, order=DEFAULT_ORDER):
        return cls([0 if k % 2 else Fraction((-1) ** (k // 2), factorial(k)) for k in range(order + 1)])

    @classmethod
    def tan(cls, order=DEFAULT_ORDER):
        return cls([Fraction(tangent_number(k), factorial(k)) for k in range(order + 1)])


def series_calculus(f, g, mode):
    """Dispatch to the binary series operations by name."""
    if mode == "compose":
        return f.compose(g)
    if mode == "divide":
        return f.divide(g)
    if mode == "hadamard":
        return f.hadamard(g)
    if mode == "multiply":
        return f * g
    if mode == "add":
        return f + g
    raise ValueError(f"unknown series mode {mode!r}")


_bernoulli_cache = [Fraction(1)]


def bernoulli(n):
    """Bernoulli number B_n with B_1 = -1/2."""
    from math import comb

    while len(_bernoulli_cache) <= n:
        m = len(_bernoulli_cache)
        s = sum(comb(m + 1, k) * _bernoulli_cache[k] for k in range(m))
        _bernoulli_cache.append(-s / (m + 1))
    return _bernoulli_cache[n]


def tangent_number(n):
    """``T_n`` with ``tan z = sum T_n z^n / n!``; zero for even ``n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n % 2 == 0:
        return 0
    k = (n + 1) // 2
    t = (-1) ** (k + 1) * 4 ** k * (4 ** k - 1) * bernoulli(2 * k) / (2 * k)
    assert t.denominator == 1
    return int(t)


def arctangent_number(n, k):
    """``A_n^(k)`` with ``arctan(z)^k / k! = sum A_n^(k) z^n / n!``; zero for ``k > n``."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if k > n:
        return 0
    a = PowerSeries.arctan(n) ** k
    v = a[n] * factorial(n) / factorial(k)
    assert v.denominator == 1
    return int(v)


def special_numbers(kind, n, k=1):
    if kind == "tangent":
        if n < 1:
            raise ValueError("n must be >= 1")
        return tangent_number(n)
    if kind == "arctangent":
        return arctangent_number(n, k)
    raise ValueError(f"unknown kind {kind!r}")


class ExactMatrix:
    """Square matrix with exact entries (scalars or MultiPoly)."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.rows = tuple(tuple(_normalize(x) for x in r) for r in rows)

    @property
    def n(self):
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n):
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def toeplitz_band(cls, n, diag, upper, lower):
        """The matrix with constant diagonal, upper and lower triangles."""
        return cls([[diag if i == j else (upper if i < j else lower) for j in range(n)]
                    for i in range(n)])

    @classmethod
    def commutator_matrix(cls, n):
        """Diagonal 0, ``I`` above, ``-I`` below."""
        return cls.toeplitz_band(n, 0, I, -I)

    @classmethod
    def from_strings(cls, rows):
        return cls([[parse_entry(x) if isinstance(x, str) else x for x in r] for r in rows])

    def to_strings(self):
        return [[str(x) for x in r] for r in self.rows]

    def __add__(self, other):
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c):
        return ExactMatrix([[a * c for a in r] for r in self.rows])

    def __matmul__(self, other):
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        n = self.n
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = 0
                for a, b in zip(r, c):
                    if not _is_zero(a) and not _is_zero(b):
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ExactMatrix(out)

    def trace(self):
        acc = 0
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return _normalize(acc)

    def power(self, r):
        if r < 0:
            raise ValueError("negative power")
        result, base = ExactMatrix.identity(self.n), self
        while r:
            if r & 1:
                result = result @ base
            base = base @ base
            r >>= 1
        return result

    def transpose(self):
        return ExactMatrix(list(zip(*self.rows)))

    def adjoint(self):
        return ExactMatrix([[_conj(x) for x in r] for r in zip(*self.rows)])

    def is_selfadjoint(self):
        return self == self.adjoint()

    def is_skew(self):
        """``A = -A^T`` entrywise."""
        n = self.n
        return all(self.rows[i][j] == -self.rows[j][i] for i in range(n) for j in range(n))

    def diagonal_part(self):
        """Zero every off-diagonal entry."""
        n = self.n
        return ExactMatrix([[self.rows[i][j] if i == j else 0 for j in range(n)] for i in range(n)])

    def charpoly(self, var="lam"):
        """Monic ``det(var*I - A)`` by the Faddeev-LeVerrier recursion."""
        coeffs = _faddeev_leverrier(self)
        lam = MultiPoly.var(var)
        out = MultiPoly.const(0)
        for k, c in enumerate(coeffs):
            out = out + MultiPoly.coerce(c) * lam ** k
        return out

    def charpoly_coeffs(self):
        """``[c_0, ..., c_n]`` with ``c_n = 1``."""
        return _faddeev_leverrier(self)

    def determinant(self):
        c = _faddeev_leverrier(self)
        return _normalize(c[0] * (-1) ** self.n)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.n == other.n and all(
            a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s)
        )

    def __repr__(self):
        return f"ExactMatrix({self.to_strings()})"


def _normalize(x):
    """Collapse constant polynomials and real Gaussian rationals to Fraction."""
    if isinstance(x, MultiPoly) and x.is_constant():
        x = x.constant_value()
    if isinstance(x, GaussianRational) and not x.im:
        x = x.re
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _conj(x):
    if isinstance(x, (GaussianRational, MultiPoly)):
        return x.conjugate()
    return x


def _faddeev_leverrier(A):
    n = A.n
    c = [0] * (n + 1)
    c[n] = 1
    M = ExactMatrix.zeros(n)
    eye = ExactMatrix.identity(n)
    for k in range(1, n + 1):
        M = A @ M + eye.scale(c[n - k + 1])
        c[n - k] = _normalize((A @ M).trace() * Fraction(-1, k))
    return [_normalize(x) for x in c]


def matrix_ops(M, mode, r=None, var="lam"):
    if not isinstance(M, ExactMatrix):
        M = ExactMatrix(M)
    if mode == "charpoly":
        return M.charpoly(var)
    if mode == "trace_power":
        if r is None:
            raise ValueError("trace_power needs r")
        return M.power(r).trace()
    if mode == "determinant":
        return M.determinant()
    raise ValueError(f"unknown matrix mode {mode!r}")
