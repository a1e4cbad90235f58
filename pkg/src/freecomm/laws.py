"""Concrete laws: semicircle, free Poisson, tetilla and its generalizations."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
from scipy.integrate import quad

from .exactalg import (
    DEFAULT_ORDER,
    ExactMatrix,
    PowerSeries,
    arctangent_number,
    fmt,
    tangent_number,
)
from .freecalc import moments_from_cumulants

QUAD_TOL = 1e-11


@dataclass
class LawSpec:
    name: str
    kappa: list
    density: Callable[[float], float] | None = None
    support: tuple | None = None
    levy_atoms: list | None = None
    notes: dict = field(default_factory=dict)

    def moments(self, order=None):
        order = len(self.kappa) if order is None else order
        return moments_from_cumulants(self.kappa, order)

    def integrate(self, power=0):
        """Numerical integral of x^power against the density over the support."""
        if self.density is None:
            raise ValueError(f"{self.name} has no density")
        lo, hi = self.support
        f = lambda x: x**power * self.density(x)
        if lo == -hi:
            # split at 0, where some densities are only continuously extended
            a = quad(f, 0.0, hi, epsabs=QUAD_TOL, epsrel=1e-12, limit=400)[0]
            b = quad(f, lo, 0.0, epsabs=QUAD_TOL, epsrel=1e-12, limit=400)[0]
            return a + b
        return quad(f, lo, hi, epsabs=QUAD_TOL, epsrel=1e-12, limit=400)[0]

    def to_dict(self):
        out = {"name": self.name, "cumulants": [fmt(k) for k in self.kappa]}
        if self.support is not None:
            out["support"] = [float(x) for x in self.support]
        if self.levy_atoms is not None:
            out["levy_atoms"] = [[float(x), fmt(w)] for x, w in self.levy_atoms]
        out.update(self.notes)
        return out


# ---------------------------------------------------------------------------
# semicircle


def semicircle_density(x):
    return math.sqrt(4 - x * x) / (2 * math.pi) if abs(x) < 2 else 0.0


def semicircle_cauchy(z):
    """G(z) = (z - sqrt(z^2 - 4)) / 2 on the branch with G(z) ~ 1/z at infinity."""
    z = complex(z)
    if z.imag == 0 and -2 <= z.real <= 2:
        raise ValueError("Cauchy transform is not defined on the support [-2, 2]")
    # 2 / (z + sqrt) avoids cancellation for large |z|
    return 2 / (z + cmath.sqrt(z - 2) * cmath.sqrt(z + 2))


def semicircle_law(order=DEFAULT_ORDER, variance=1):
    kappa = [0, variance] + [0] * (order - 2)
    return LawSpec("semicircle", kappa, semicircle_density if variance == 1 else None,
                   (-2.0, 2.0) if variance == 1 else None)


# ---------------------------------------------------------------------------
# Poisson type laws


def free_poisson(lam, order=DEFAULT_ORDER):
    if lam <= 0:
        raise ValueError("rate must be positive")
    return LawSpec(f"free_poisson({fmt(lam)})", [lam] * order, levy_atoms=[(1, lam)])


def compound_free_poisson(lam, atoms, order=DEFAULT_ORDER):
    """K_n = lam * m_n(nu) for the finite jump law ``atoms`` = {location: weight}."""
    if lam <= 0:
        raise ValueError("rate must be positive")
    atoms = dict(atoms)
    if any(w <= 0 for w in atoms.values()):
        raise ValueError("jump weights must be positive")
    if sum(atoms.values()) != 1:
        raise ValueError("jump weights must sum to 1")
    kappa = [lam * sum(w * x**n for x, w in atoms.items()) for n in range(1, order + 1)]
    return LawSpec(f"compound_free_poisson({fmt(lam)})", kappa,
                   levy_atoms=[(x, lam * w) for x, w in sorted(atoms.items())])


def poisson_laws(kind, lam, atoms=None, order=DEFAULT_ORDER):
    if kind == "free_poisson":
        return free_poisson(lam, order)
    if kind == "compound":
        if atoms is None:
            raise ValueError("compound law needs jump atoms")
        return compound_free_poisson(lam, atoms, order)
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# tetilla


TETILLA_SUPPORT = math.sqrt((11 + 5 * math.sqrt(5)) / 2)


def _real_cbrt(u):
    return math.copysign(abs(u) ** (1 / 3), u)


def tetilla_density(x):
    """Density of i(XY - YX) for free standard semicirculars.

    The density solves the cubic x G^3 + G^2 - x G + 1 = 0 for the Cauchy
    transform; the radicand 3x^2 + 33x^4 - 3x^6 vanishes at the support
    edge x^2 = (11 + 5 sqrt 5) / 2.
    """
    x = float(x)
    if x == 0:
        return 0.0
    x2 = x * x
    rad = 3 * x2 + 33 * x2 * x2 - 3 * x2 * x2 * x2
    if rad <= 0:
        return 0.0
    s = 3 * math.sqrt(rad)
    u = 1 + 18 * x2
    return (_real_cbrt(u + s) - _real_cbrt(u - s)) / (2 * math.sqrt(3) * math.pi * abs(x))


def tetilla_law(order=DEFAULT_ORDER):
    kappa = [0 if k % 2 else 2 for k in range(1, order + 1)]
    return LawSpec("tetilla", kappa, tetilla_density, (-TETILLA_SUPPORT, TETILLA_SUPPORT),
                   levy_atoms=[(-1, 1), (1, 1)],
                   notes={"support_endpoint": "sqrt((11+5*sqrt(5))/2)"})


# ---------------------------------------------------------------------------
# generalized tetilla


def cumulants_by_trace(n, order):
    A = ExactMatrix.commutator_matrix(n)
    out = []
    P = ExactMatrix.identity(n)
    for _ in range(order):
        P = P @ A
        out.append(_as_rational(P.trace()))
    return out


def cumulants_by_tangent_numbers(n, order):
    out = []
    for r in range(1, order + 1):
        if r % 2:
            out.append(0)
            continue
        m = r // 2
        s = sum(n ** (2 * k) * arctangent_number(2 * m, 2 * k) * tangent_number(2 * k - 1)
                for k in range(1, m + 1))
        out.append(_as_rational((-1) ** m * n + Fraction(s, math.factorial(2 * m - 1))))
    return out


def r_transform_series(n, order):
    """(n tan(n arctan z) - n z) / (1 + z^2) truncated at z^order."""
    inner = PowerSeries.arctan(order) * n
    t = PowerSeries.tan(order).compose(inner)
    num = t * n - PowerSeries.z(order) * n
    den = PowerSeries([1, 0, 1], order)
    return num.divide(den)


def cumulants_by_r_transform(n, order):
    R = r_transform_series(n, order)
    return [_as_rational(R[m]) for m in range(order)]


def _as_rational(x):
    if hasattr(x, "is_real") and not isinstance(x, (int, Fraction)):
        if not x.is_real():
            raise ValueError(f"expected a real value, got {x}")
        x = x.real()
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def levy_atoms(n):
    return [(1 / math.tan(math.pi / (2 * n) + k * math.pi / n), 1) for k in range(n)]


class LawMismatchError(AssertionError):
    pass


def gen_tetilla(n, order=10):
    """Generalized tetilla law with cumulants computed three independent ways."""
    if n < 2:
        raise ValueError("n must be >= 2")
    a = cumulants_by_trace(n, order)
    b = cumulants_by_tangent_numbers(n, order)
    c = cumulants_by_r_transform(n, order)
    if not (a == b == c):
        bad = [k + 1 for k in range(order) if not (a[k] == b[k] == c[k])]
        raise LawMismatchError(f"generalized tetilla n={n}: routes disagree at orders {bad}: "
                               f"trace={a}, tangent={b}, series={c}")
    report = {
        "trace": [fmt(x) for x in a],
        "tangent_numbers": [fmt(x) for x in b],
        "r_transform": [fmt(x) for x in c],
        "agree": True,
        "odd_zero": all(x == 0 for x in a[::2]),
    }
    law = LawSpec(f"gen_tetilla({n})", a, levy_atoms=levy_atoms(n), notes={"n": n})
    return law, report


# ---------------------------------------------------------------------------
# dilation and skew decomposition


def dilate(law, s=None, scale_squared=None):
    """Cumulants K_n -> s^n K_n; ``scale_squared`` handles irrational s exactly for symmetric laws."""
    if (s is None) == (scale_squared is None):
        raise ValueError("give exactly one of s and scale_squared")
    if s is not None and s == 0 or scale_squared == 0:
        return LawSpec("delta0", [0] * len(law.kappa), notes={"dilation_of": law.name})
    kappa = []
    if s is not None:
        kappa = [s**k * x for k, x in enumerate(law.kappa, 1)]
        fs = float(s)
    else:
        if scale_squared < 0:
            raise ValueError("scale_squared must be non-negative")
        for k, x in enumerate(law.kappa, 1):
            if k % 2:
                if x != 0:
                    raise ValueError("odd cumulants need the scale itself, not its square")
                kappa.append(0)
            else:
                kappa.append(scale_squared ** (k // 2) * x)
        fs = math.sqrt(float(scale_squared))
    density = support = None
    if law.density is not None:
        base = law.density
        density = lambda x: base(x / fs) / abs(fs)
        lo, hi = law.support
        support = tuple(sorted((lo * fs, hi * fs)))
    label = fmt(s) if s is not None else f"sqrt({fmt(scale_squared)})"
    atoms = [(x * fs, w) for x, w in law.levy_atoms] if law.levy_atoms else None
    return LawSpec(f"D[{label}]({law.name})", kappa, density, support, atoms)


@dataclass
class SkewDecomposition:
    n: int
    charpoly: list
    parity_ok: bool
    scales: list
    scales_squared_exact: list
    trace_check: dict
    max_trace_error: float
    components: list
    compound_poisson: dict

    def to_dict(self):
        return {
            "n": self.n,
            "charpoly_coeffs": [fmt(c) for c in self.charpoly],
            "parity_ok": self.parity_ok,
            "scales": self.scales,
            "scales_squared_exact": [None if q is None else fmt(q) for q in self.scales_squared_exact],
            "trace_check": {str(r): v for r, v in self.trace_check.items()},
            "max_trace_error": self.max_trace_error,
            "components": self.components,
            "compound_poisson": self.compound_poisson,
        }


def _exact_rational_root(coeffs, approx):
    """A rational root of the polynomial (highest degree first) near ``approx``, if any."""
    q = Fraction(approx).limit_denominator(10**6)
    val = 0
    for c in coeffs:
        val = val * q + c
    return q if val == 0 else None


def skew_law_decompose(A, rmax=8):
    """Spectral decomposition of the law with selfadjoint skew system matrix A."""
    A = A if isinstance(A, ExactMatrix) else ExactMatrix(A)
    if not A.is_selfadjoint() or not A.is_skew():
        raise ValueError("matrix must be selfadjoint and skew symmetric")
    n = A.n
    chi = [_as_rational(c) for c in reversed(A.charpoly_coeffs())]  # lam^n, lam^(n-1), ...
    parity_ok = all(c == 0 for k, c in enumerate(chi) if k % 2)
    if not parity_ok:
        raise ValueError("characteristic polynomial is not of definite parity")
    # chi(lam) = lam^(n mod 2) q(lam^2)
    q = [chi[k] for k in range(0, n + 1, 2)]
    while len(q) > 1 and q[-1] == 0:
        q.pop()
    # odd n keeps one zero scale for the row and column of zeros
    half = (n + 1) // 2
    roots = []
    if len(q) > 1:
        for z in mpmath.polyroots([float(c) for c in q], maxsteps=200, extraprec=200):
            roots.append(max(float(mpmath.re(z)), 0.0))
    roots += [0.0] * (half - len(roots))
    roots.sort(reverse=True)
    exact = [_exact_rational_root(q, mu) if mu > 0 else Fraction(0) for mu in roots]
    scales = [math.sqrt(mu) for mu in roots]
    check = {}
    worst = 0.0
    for r in range(2, rmax + 1, 2):
        exact_tr = float(_as_rational(A.power(r).trace()))
        approx = sum(2 * lam**r for lam in scales)
        err = abs(exact_tr - approx) / max(1.0, abs(exact_tr))
        worst = max(worst, err)
        check[r] = {"trace": exact_tr, "sum": approx, "rel_error": err}
    components = [{"law": "tetilla", "scale": lam,
                   "scale_squared": None if e is None else fmt(e)}
                  for lam, e in zip(scales, exact) if lam > 0]
    jumps = {}
    for lam in scales:
        if lam > 0:
            jumps[lam] = jumps.get(lam, 0) + Fraction(1, n)
            jumps[-lam] = jumps.get(-lam, 0) + Fraction(1, n)
    rest = 1 - sum(jumps.values())
    if rest:
        jumps[0.0] = rest
    cp = {"rate": n, "jumps": [[x, fmt(w)] for x, w in sorted(jumps.items())]}
    return SkewDecomposition(n, chi, parity_ok, scales, exact, check, worst, components, cp)
