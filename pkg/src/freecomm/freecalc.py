"""Free cumulant calculus over exact coefficients.

Univariate sequences are plain lists with ``seq[k-1]`` holding the order-k
value.  Mixed moments and cumulants of free families are evaluated with the
vanishing of mixed cumulants; the symbolic mode of :func:`poly_cumulant`
assumes nothing beyond traciality and keeps every block as a joint
cumulant symbol ``K[w]`` with ``w`` the lexicographically least rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Sequence

from .errors import ResourceBoundError
from .exactalg import ExactMatrix, GaussianRational, MultiPoly
from .ncpart import (
    SetPartition,
    check_bound,
    connected_partitions,
    enumerate_nc,
    enumeration_bound,
    is_interval_partition,
    kreweras,
)


# ---------------------------------------------------------------------------
# cumulant bookkeeping


@dataclass(frozen=True)
class CumulantSpec:
    """Free cumulants K_1, K_2, ... of one variable.

    Entries past the end of ``kappa`` are filled by ``default``: ``"zero"``
    or ``"symbol"`` (a fresh indeterminate ``k[name;n]``).
    """

    name: str
    kappa: tuple = ()
    even_only: bool = False
    default: str = "zero"

    def __post_init__(self):
        object.__setattr__(self, "kappa", tuple(self.kappa))
        if self.default not in ("zero", "symbol"):
            raise ValueError(f"unknown default {self.default!r}")
        if self.even_only:
            for k, v in enumerate(self.kappa, 1):
                if k % 2 and v != 0:
                    raise ValueError(f"{self.name}: even_only but K_{k} = {v}")

    def __call__(self, n):
        if n < 1:
            raise ValueError("cumulant order must be >= 1")
        if self.even_only and n % 2:
            return 0
        if n <= len(self.kappa):
            return self.kappa[n - 1]
        if self.default == "symbol":
            return MultiPoly.var(univariate_symbol(self.name, n))
        return 0

    def sequence(self, order):
        return [self(n) for n in range(1, order + 1)]

    @classmethod
    def semicircular(cls, name, mean=0, variance=1):
        return cls(name, (mean, variance), even_only=(mean == 0))

    @classmethod
    def symbolic(cls, name, even_only=False):
        return cls(name, (), even_only=even_only, default="symbol")

    @classmethod
    def named_symbols(cls, name, prefix, order, even_only=False):
        """Cumulants given by indeterminates ``prefix1, prefix2, ...``."""
        vals = [0 if even_only and k % 2 else MultiPoly.var(f"{prefix}{k}")
                for k in range(1, order + 1)]
        return cls(name, vals, even_only=even_only)


class FreeFamily:
    """Mutually free variables, each described by a :class:`CumulantSpec`."""

    def __init__(self, specs):
        if isinstance(specs, dict):
            specs = specs.values()
        self.members = {s.name: s for s in specs}

    @classmethod
    def of(cls, *specs):
        return cls(specs)

    def __contains__(self, name):
        return name in self.members

    def names(self):
        return list(self.members)

    def cumulant(self, names):
        """K_n(X_{names[0]}, ...): zero unless all names agree."""
        first = names[0]
        if first not in self.members:
            raise KeyError(f"unknown variable {first!r}")
        if any(x != first for x in names):
            return 0
        return self.members[first](len(names))


def univariate_symbol(name, n):
    return f"k[{name};{n}]"


def canonical_rotation(word):
    """Lexicographically least rotation of a word."""
    word = tuple(word)
    if not word:
        return word
    return min(word[i:] + word[:i] for i in range(len(word)))


def mirror(word):
    return tuple(reversed(word))


@dataclass(frozen=True)
class JointCumulantSymbol:
    word: tuple

    def __post_init__(self):
        object.__setattr__(self, "word", canonical_rotation(self.word))

    @property
    def order(self):
        return len(self.word)

    def mirrored(self):
        """Optional mirror normalization (valid for selfadjoint letters with real cumulants)."""
        return JointCumulantSymbol(min(self.word, canonical_rotation(mirror(self.word))))

    def name(self):
        return joint_symbol_name(self.word)


def joint_symbol_name(word):
    return "K[" + ",".join(str(x) for x in canonical_rotation(word)) + "]"


# ---------------------------------------------------------------------------
# moments <-> cumulants


def _power_coeff_table(m, n):
    """``P[s][j]`` = coefficient of z^j in M(z)^s, where M = 1 + sum m_k z^k,
    for s <= n and j <= n - s (uses m_1..m_{n-1} only)."""
    coeffs = [1] + list(m)
    P = [[1] + [0] * n]
    for s in range(1, n + 1):
        prev = P[-1]
        row = [0] * (n + 1)
        for j in range(n - s + 1):
            acc = 0
            for i in range(j + 1):
                if i < len(coeffs) and coeffs[i] != 0 and prev[j - i] != 0:
                    acc = acc + coeffs[i] * prev[j - i]
            row[j] = acc
        P.append(row)
    return P


def moments_from_cumulants(kappa, order=None):
    """m_n = sum over NC(n) of products of block cumulants."""
    order = len(kappa) if order is None else order
    if order > len(kappa):
        raise ValueError("cumulant sequence too short")
    m = []
    for n in range(1, order + 1):
        P = _power_coeff_table(m, n)
        acc = 0
        for s in range(1, n + 1):
            k = kappa[s - 1]
            if k != 0 and P[s][n - s] != 0:
                acc = acc + k * P[s][n - s]
        m.append(acc)
    return m


def cumulants_from_moments(moments, order=None):
    order = len(moments) if order is None else order
    if order > len(moments):
        raise ValueError("moment sequence too short")
    kappa = []
    for n in range(1, order + 1):
        P = _power_coeff_table(moments[: n - 1], n)
        acc = moments[n - 1]
        for s in range(1, n):
            k = kappa[s - 1]
            if k != 0 and P[s][n - s] != 0:
                acc = acc - k * P[s][n - s]
        kappa.append(acc)
    return kappa


def moment_cumulant_convert(seq, direction, order=None):
    if direction == "moments_from_cumulants":
        return moments_from_cumulants(list(seq), order)
    if direction == "cumulants_from_moments":
        return cumulants_from_moments(list(seq), order)
    raise ValueError(f"unknown direction {direction!r}")


def moments_by_enumeration(kappa, order):
    """Oracle: the defining sum over NC(n)."""
    out = []
    for n in range(1, order + 1):
        acc = 0
        for p in enumerate_nc(n):
            term = 1
            for b in p.blocks:
                term = term * kappa[len(b) - 1]
                if term == 0:
                    break
            acc = acc + term
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# mixed moments


def _check_names(word, fam):
    for x in word:
        if x not in fam:
            raise KeyError(f"unknown variable {x!r}")


def mixed_moment(word, fam, method="dp"):
    """tau(X_{w1} ... X_{wn}) for a free family.

    ``method="dp"`` builds the first block recursively over intervals
    (polynomial time); ``method="enumerate"`` sums over NC(n) directly.
    """
    word = tuple(word)
    _check_names(word, fam)
    if method == "enumerate":
        check_bound(len(word)) if word else None
        return _mixed_moment_enum(word, fam)
    if method != "dp":
        raise ValueError(f"unknown method {method!r}")
    return _mixed_moment_dp(word, fam)


def _mixed_moment_enum(word, fam):
    if not word:
        return 1
    acc = 0
    for p in enumerate_nc(len(word)):
        term = 1
        for b in p.blocks:
            term = term * fam.cumulant([word[i - 1] for i in b])
            if term == 0:
                break
        acc = acc + term
    return acc


def _mixed_moment_dp(word, fam):
    n = len(word)
    if n == 0:
        return 1
    kcache = {}

    def K(name, c):
        key = (name, c)
        if key not in kcache:
            kcache[key] = fam.members[name](c)
        return kcache[key]

    @lru_cache(maxsize=None)
    def F(i, j):
        # moment of word[i:j]
        if i >= j:
            return 1
        return H(i, j, 1)

    @lru_cache(maxsize=None)
    def H(a, j, c):
        # block containing word[a] as its current last element, c elements so far
        lab = word[a]
        acc = 0
        k = K(lab, c)
        if k != 0:
            tail = F(a + 1, j)
            if tail != 0:
                acc = acc + k * tail
        for b in range(a + 1, j):
            if word[b] != lab:
                continue
            gap = F(a + 1, b)
            if gap == 0:
                continue
            rest = H(b, j, c + 1)
            if rest != 0:
                acc = acc + gap * rest
        return acc

    return F(0, n)


# ---------------------------------------------------------------------------
# cumulants of products


def _profile_from_groups(groups, n):
    if isinstance(groups, SetPartition):
        if groups.n != n or not is_interval_partition(groups):
            raise ValueError(f"{groups} is not an interval partition of [{n}]")
        return tuple(len(b) for b in groups.blocks)
    groups = tuple(groups)
    if sum(groups) != n or any(g < 1 for g in groups):
        raise ValueError(f"group lengths {groups} do not cover [{n}]")
    return groups


def product_cumulant(groups, word, fam):
    """K_r of the products of consecutive groups of ``word``."""
    word = tuple(word)
    _check_names(word, fam)
    profile = _profile_from_groups(groups, len(word))
    check_bound(len(word))
    acc = 0
    for p in connected_partitions(profile):
        term = 1
        for b in p.blocks:
            term = term * fam.cumulant([word[i - 1] for i in b])
            if term == 0:
                break
        acc = acc + term
    return acc


@dataclass
class NCPolynomial:
    """Noncommutative polynomial: list of ``(coefficient, word)`` terms."""

    terms: list = field(default_factory=list)

    def __post_init__(self):
        merged = {}
        order = []
        for c, w in self.terms:
            w = tuple(w)
            if w not in merged:
                merged[w] = 0
                order.append(w)
            merged[w] = merged[w] + c
        self.terms = [(merged[w], w) for w in order if merged[w] != 0]

    @classmethod
    def word(cls, *letters, coeff=1):
        return cls([(coeff, tuple(letters))])

    def __add__(self, other):
        return NCPolynomial(self.terms + other.terms)

    def __neg__(self):
        return NCPolynomial([(-c, w) for c, w in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NCPolynomial):
            return NCPolynomial([(c1 * c2, w1 + w2) for c1, w1 in self.terms for c2, w2 in other.terms])
        return NCPolynomial([(c * other, w) for c, w in self.terms])

    def __rmul__(self, other):
        return NCPolynomial([(other * c, w) for c, w in self.terms])

    def __pow__(self, k):
        out = NCPolynomial([(1, ())])
        for _ in range(k):
            out = out * self
        return out

    def letters(self):
        return sorted({x for _, w in self.terms for x in w})

    def degree(self):
        return max((len(w) for _, w in self.terms), default=0)

    def adjoint(self):
        """Reverse words and conjugate coefficients (letters selfadjoint)."""
        def conj(c):
            return c.conjugate() if hasattr(c, "conjugate") and not isinstance(c, (int, Fraction)) else c
        return NCPolynomial([(conj(c), tuple(reversed(w))) for c, w in self.terms])

    def is_selfadjoint(self):
        mine = dict((w, c) for c, w in self.terms)
        other = dict((w, c) for c, w in self.adjoint().terms)
        return set(mine) == set(other) and all(mine[w] == other[w] for w in mine)


def commutator(P, Q):
    return P * Q - Q * P


def _expansion_size(P, r):
    return r * P.degree()


def poly_cumulant(P, fam, r, mode="numeric", max_letters=None):
    """K_r(P, ..., P) by multilinear expansion and the product formula.

    ``numeric`` evaluates under freeness of ``fam``; ``symbolic`` keeps joint
    cumulant symbols and assumes no freeness (``fam`` may be ``None``).
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    limit = enumeration_bound() if max_letters is None else max_letters
    size = _expansion_size(P, r)
    if size > limit:
        raise ResourceBoundError(
            f"K_{r} of a degree-{P.degree()} polynomial needs NC({size}) (bound {limit})")
    if any(len(w) == 0 for _, w in P.terms):
        raise ValueError("constant terms are not supported; shift the cumulant by hand")
    if mode == "numeric":
        _check_names(P.letters(), fam)
        return _poly_cumulant_free(P, fam, r)
    if mode == "symbolic":
        return symbolic_expansion(P, r)
    raise ValueError(f"unknown mode {mode!r}")


def _poly_cumulant_free(P, fam, r):
    by_len = {}
    for c, w in P.terms:
        by_len.setdefault(len(w), {})[w] = c
    names = fam.names()
    total = 0
    for profile in product(sorted(by_len), repeat=r):
        tables = [by_len[d] for d in profile]
        starts = []
        pos = 0
        for d in profile:
            starts.append(pos)
            pos += d
        for p in connected_partitions(profile):
            # cumulant choices per block: (name, K_{|B|}(name)) with K != 0
            options = []
            for b in p.blocks:
                opts = [(x, fam.members[x](len(b))) for x in names]
                opts = [(x, k) for x, k in opts if k != 0]
                if not opts:
                    break
                options.append(opts)
            else:
                blocks = p.blocks
                labels = [None] * pos
                for choice in product(*options):
                    kprod = 1
                    for (x, k), b in zip(choice, blocks):
                        kprod = kprod * k
                        for i in b:
                            labels[i - 1] = x
                    coef = 1
                    for tab, s, d in zip(tables, starts, profile):
                        c = tab.get(tuple(labels[s:s + d]))
                        if c is None:
                            coef = 0
                            break
                        coef = coef * c
                    if coef != 0:
                        total = total + coef * kprod
    return total


def symbolic_expansion(P, r, keep=None, collect_by_partition=False):
    """Expand K_r(P, ..., P) with joint cumulant symbols, no freeness.

    ``keep`` optionally filters the partitions of the product formula.
    With ``collect_by_partition`` a dict partition -> contribution is
    returned instead of the total.
    """
    terms = P.terms
    by_len = {}
    for c, w in terms:
        by_len.setdefault(len(w), []).append((c, w))
    per_part = {}
    for profile in product(sorted(by_len), repeat=r):
        parts = [p for p in connected_partitions(profile) if keep is None or keep(p)]
        if not parts:
            continue
        for choice in product(*(by_len[d] for d in profile)):
            coef = 1
            word = ()
            for c, w in choice:
                coef = coef * c
                word += w
            if coef == 0:
                continue
            for p in parts:
                mono = {}
                for b in p.blocks:
                    s = joint_symbol_name(word[i - 1] for i in b)
                    mono[s] = mono.get(s, 0) + 1
                key = tuple(sorted(mono.items()))
                bucket = per_part.setdefault(p, {})
                bucket[key] = bucket[key] + coef if key in bucket else coef
    out = {}
    for p, bucket in per_part.items():
        acc = MultiPoly.const(0)
        for key, coef in bucket.items():
            if coef != 0:
                acc = acc + MultiPoly.coerce(coef) * MultiPoly._raw({key: GaussianRational(1)})
        out[p] = acc
    if collect_by_partition:
        return out
    total = MultiPoly.const(0)
    for v in out.values():
        total = total + v
    return total


def moments_of_polynomial(P, fam, order):
    """tau(P^m) for m = 1..order via word expansion and the interval recursion."""
    out = []
    power = NCPolynomial([(1, ())])
    cache = {}
    for _ in range(order):
        power = power * P
        acc = 0
        for c, w in power.terms:
            if w not in cache:
                cache[w] = _mixed_moment_dp(w, fam)
            m = cache[w]
            if m != 0:
                acc = acc + c * m
        out.append(acc)
    return out


def cumulants_of_polynomial(P, fam, order):
    """K_1..K_order of P through its moments; no enumeration bound applies."""
    _check_names(P.letters(), fam)
    return cumulants_from_moments(moments_of_polynomial(P, fam, order))


# ---------------------------------------------------------------------------
# free convolution and FID


def free_convolve(a, b):
    if len(a) != len(b):
        raise ValueError("sequences must have equal truncation")
    return [x + y for x, y in zip(a, b)]


@dataclass
class HankelReport:
    dets: list
    verdict: str
    index: int | None
    positive_semidefinite: bool
    note: str = ""

    def to_dict(self):
        return {
            "dets": [str(d) for d in self.dets],
            "verdict": self.verdict,
            "index": self.index,
            "positive_semidefinite": self.positive_semidefinite,
            "note": self.note,
        }


def hankel_matrix(kappa, m):
    return [[kappa[i + j - 1] for j in range(1, m + 1)] for i in range(1, m + 1)]


def _real_scalar(x):
    if isinstance(x, MultiPoly):
        x = x.constant_value()
    if isinstance(x, GaussianRational):
        x = x.real()
    return Fraction(x)


def is_positive_semidefinite(M):
    """Exact test by symmetric elimination; a zero pivot needs a zero row."""
    A = [[_real_scalar(x) for x in row] for row in M]
    n = len(A)
    for k in range(n):
        d = A[k][k]
        if d < 0:
            return False
        if d == 0:
            if any(A[k][j] != 0 for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            f = A[i][k] / d
            if f:
                for j in range(k + 1, n):
                    A[i][j] -= f * A[k][j]
    return True


def fid_hankel_check(kappa, depth):
    """Leading Hankel determinants det[K_{i+j}]_{i,j<=m}, m = 1..depth.

    PASS when all are positive, FAIL at the first negative one.  When a zero
    appears first the depth-``depth`` Hankel matrix is tested for positive
    semidefiniteness directly: PASS if it is (degenerate but conditionally
    positive), FAIL if not, BOUNDARY if the matrix vanishes identically.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if len(kappa) < 2 * depth:
        raise ValueError(f"need K_1..K_{2 * depth}, got {len(kappa)} values")
    dets = []
    for m in range(1, depth + 1):
        d = ExactMatrix(hankel_matrix(kappa, m)).determinant()
        dets.append(_real_scalar(d))
    first_zero = next((m for m, d in enumerate(dets, 1) if d == 0), None)
    first_neg = next((m for m, d in enumerate(dets, 1) if d < 0), None)
    H = hankel_matrix(kappa, depth)
    psd = is_positive_semidefinite(H)
    if first_zero is None and first_neg is None:
        return HankelReport(dets, "PASS", None, True)
    if first_neg is not None and (first_zero is None or first_neg < first_zero):
        return HankelReport(dets, "FAIL", first_neg, psd)
    if all(_real_scalar(x) == 0 for row in H for x in row):
        return HankelReport(dets, "BOUNDARY", first_zero, True, "Hankel matrix vanishes")
    if psd:
        return HankelReport(dets, "PASS", first_zero, True,
                            "singular but positive semidefinite Hankel matrix")
    neg = first_neg if first_neg is not None else first_zero
    return HankelReport(dets, "FAIL", neg, False, "Hankel matrix is not positive semidefinite")


# ---------------------------------------------------------------------------
# boxed convolution of word-indexed series


def _words(m, n):
    return product(range(1, m + 1), repeat=n)


def zeta_series(m, order):
    return {w: 1 for n in range(1, order + 1) for w in _words(m, n)}


def moebius_series(m, order):
    out = {}
    for n in range(1, order + 1):
        c = (-1) ** (n + 1) * Fraction(factorial(2 * n - 2), factorial(n - 1) * factorial(n))
        for w in _words(m, n):
            out[w] = c
    return out


def identity_series(m):
    return {(i,): 1 for i in range(1, m + 1)}


def univariate_series(seq):
    """Coefficient table on the one-letter alphabet from a sequence c_1, c_2, ..."""
    return {(1,) * n: c for n, c in enumerate(seq, 1)}


def _alphabet(table):
    return {x for w in table for x in w}


def _restricted(table, word, p):
    acc = 1
    for b in p.blocks:
        c = table.get(tuple(word[i - 1] for i in b), 0)
        if c == 0:
            return 0
        acc = acc * c
    return acc


def boxed_convolution(f, g, order, m=None):
    """Coefficients of f [*] g on every word of length <= order (right Kreweras complement)."""
    letters = _alphabet(f) | _alphabet(g)
    if m is None:
        m = max(letters, default=1)
    if any(x < 1 or x > m for x in letters):
        raise ValueError(f"coefficient tables use letters outside 1..{m}")
    check_bound(order)
    out = {}
    for n in range(1, order + 1):
        parts = [(p, kreweras(p, "right")) for p in enumerate_nc(n)]
        for w in _words(m, n):
            acc = 0
            for p, k in parts:
                a = _restricted(f, w, p)
                if a == 0:
                    continue
                b = _restricted(g, w, k)
                if b != 0:
                    acc = acc + a * b
            if acc != 0:
                out[w] = acc
    return out
