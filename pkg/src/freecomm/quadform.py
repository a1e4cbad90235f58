"""Free cumulants of quadratic forms Q = sum_{i,j} a_ij X_i X_j."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import ResourceBoundError
from .exactalg import ExactMatrix, GaussianRational, I, MultiPoly
from .freecalc import (
    CumulantSpec,
    FreeFamily,
    NCPolynomial,
    boxed_convolution,
    cumulants_of_polynomial,
    fid_hankel_check,
    hankel_matrix,
    poly_cumulant,
    symbolic_expansion,
    zeta_series,
)
from .involution import validate_involution
from .ncpart import SetPartition, check_bound, enumerate_nc, upper_complements

MODES = ("general", "even_family", "iid_even", "semicircular")


def _is_zero(x):
    return x == 0


@dataclass
class QuadraticForm:
    """Selfadjoint system matrix ``A`` together with the variables it acts on.

    ``names[i]`` is the variable multiplying row/column ``i``; by default the
    family's member names in order, or ``X1, ..., Xn``.
    """

    A: ExactMatrix
    family: FreeFamily | None = None
    names: list = field(default=None)

    def __post_init__(self):
        if not isinstance(self.A, ExactMatrix):
            self.A = ExactMatrix(self.A)
        n = self.A.n
        if self.names is None:
            if self.family is not None and len(self.family.names()) == n:
                self.names = self.family.names()
            else:
                self.names = [f"X{i}" for i in range(1, n + 1)]
        if len(self.names) != n:
            raise ValueError("one variable name per matrix row is required")
        if not self.A.is_selfadjoint():
            raise ValueError("system matrix must be selfadjoint")

    @property
    def n(self):
        return self.A.n

    @property
    def skew(self):
        return self.A.is_skew()

    def polynomial(self):
        terms = []
        for i in range(self.n):
            for j in range(self.n):
                a = self.A[i, j]
                if not _is_zero(a):
                    terms.append((a, (self.names[i], self.names[j])))
        return NCPolynomial(terms)

    def commutator_terms(self):
        """For skew A: the pairs (k, l, a_kl), k < l, of sum a_kl (X_k X_l - X_l X_k)."""
        if not self.skew:
            raise ValueError("matrix is not skew symmetric")
        out = []
        for k in range(self.n):
            for l in range(k + 1, self.n):
                if not _is_zero(self.A[k, l]):
                    out.append((k + 1, l + 1, self.A[k, l]))
        return out

    def member(self, i):
        return self.family.members[self.names[i]]


def cyclic_entry_product(A, idx):
    """Tr(A E_{i1} A E_{i2} ... A E_{ir}) = a_{ir i1} a_{i1 i2} ... a_{i(r-1) ir} (0-based idx)."""
    acc = A[idx[-1], idx[0]]
    for a, b in zip(idx, idx[1:]):
        if _is_zero(acc):
            return 0
        acc = acc * A[a, b]
    return acc


def ptrace(tau, A):
    """Cyclic entry product summed over index maps constant on the blocks of ``tau``."""
    A = A if isinstance(A, ExactMatrix) else ExactMatrix(A)
    r = tau.n
    n = A.n
    blocks = tau.blocks
    total = 0
    idx = [0] * r
    for choice in product(range(n), repeat=len(blocks)):
        for b, v in zip(blocks, choice):
            for x in b:
                idx[x - 1] = v
        c = cyclic_entry_product(A, idx)
        if not _is_zero(c):
            total = total + c
    return total


def _require_even(Q, identical=False):
    fam = Q.family
    if fam is None:
        raise ValueError("a free family is required")
    specs = [Q.member(i) for i in range(Q.n)]
    for s in specs:
        if not s.even_only and any(s(k) != 0 for k in range(1, 16, 2)):
            raise ValueError(f"{s.name} is not even")
    if identical:
        first = specs[0]
        if any((s.kappa, s.even_only, s.default) != (first.kappa, first.even_only, first.default) for s in specs):
            raise ValueError("members are not identically distributed")
    return specs


def _doubled_index_word(idx):
    r = len(idx)
    word = [idx[-1]]
    for j in range(r - 1):
        word += [idx[j], idx[j]]
    word.append(idx[-1])
    return word


def quad_cumulants(Q, r, mode="general"):
    """K_r(Q) by one of four routes, which agree where they overlap."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if mode == "semicircular":
        fam = Q.family
        if fam is not None:
            for i in range(Q.n):
                s = Q.member(i)
                if s(1) != 0 or s(2) != 1 or any(s(k) != 0 for k in range(3, 2 * r + 1)):
                    raise ValueError(f"{s.name} is not standard semicircular")
        return _normalize(Q.A.power(r).trace())
    if mode == "general":
        if Q.family is None:
            raise ValueError("a free family is required")
        P = Q.polynomial()
        if 2 * r > 14:
            return _normalize(cumulants_of_polynomial(P, Q.family, r)[r - 1])
        return _normalize(poly_cumulant(P, Q.family, r))
    if mode == "even_family":
        specs = _require_even(Q)
        check_bound(2 * r)
        parts = upper_complements(r, "Ce")
        total = 0
        for idx in product(range(Q.n), repeat=r):
            c = cyclic_entry_product(Q.A, idx)
            if _is_zero(c):
                continue
            word = _doubled_index_word(idx)
            inner = 0
            for p in parts:
                term = 1
                for b in p.blocks:
                    labels = {word[x - 1] for x in b}
                    if len(labels) > 1:
                        term = 0
                        break
                    term = term * specs[labels.pop()](len(b))
                    if _is_zero(term):
                        break
                inner = inner + term
            if not _is_zero(inner):
                total = total + c * inner
        return _normalize(total)
    if mode == "iid_even":
        specs = _require_even(Q, identical=True)
        s = specs[0]
        total = 0
        for tau in enumerate_nc(r):
            w = 1
            for b in tau.blocks:
                w = w * s(2 * len(b))
                if _is_zero(w):
                    break
            if _is_zero(w):
                continue
            total = total + ptrace(tau, Q.A) * w
        return _normalize(total)
    raise ValueError(f"unknown mode {mode!r}")


def _normalize(x):
    if isinstance(x, MultiPoly) and x.is_constant():
        x = x.constant_value()
    if isinstance(x, GaussianRational) and x.is_real():
        x = x.real()
        if x.denominator == 1:
            x = x.numerator
    return x


# ---------------------------------------------------------------------------
# Hadamard representation


def f_A_table(A, order):
    """Coefficients Tr(A E_{i1} ... A E_{ir}) on words over 1..n (1-based letters)."""
    table = {}
    for r in range(1, order + 1):
        for idx in product(range(A.n), repeat=r):
            c = cyclic_entry_product(A, idx)
            if not _is_zero(c):
                table[tuple(i + 1 for i in idx)] = c
    return table


def even_cumulant_table(specs, order):
    """Sum of the even cumulant series of each member, letter i for member i."""
    table = {}
    for i, s in enumerate(specs, 1):
        for m in range(1, order + 1):
            k = s(2 * m)
            if not _is_zero(k):
                table[(i,) * m] = k
    return table


def hadamard_representation(Q, order):
    """K_1..K_order as the diagonal of f_A (.) ((sum C^even_{X_i}) [*] zeta_n)."""
    specs = _require_even(Q)
    n = Q.n
    check_bound(order)
    f = f_A_table(Q.A, order)
    g = boxed_convolution(even_cumulant_table(specs, order), zeta_series(n, order), order, n)
    out = [0] * order
    for w, c in f.items():
        d = g.get(w)
        if d is not None and not _is_zero(d):
            out[len(w) - 1] = out[len(w) - 1] + c * d
    return [_normalize(x) for x in out]


# ---------------------------------------------------------------------------
# strong cancellation


def symbolic_skew_matrix(n, prefix="x"):
    """Entries I*x_kl above the diagonal and -I*x_kl below it."""
    rows = [[0] * n for _ in range(n)]
    for k in range(n):
        for l in range(k + 1, n):
            v = MultiPoly.var(f"{prefix}{k + 1}{l + 1}")
            rows[k][l] = I * v
            rows[l][k] = -I * v
    return ExactMatrix(rows)


def symmetric_perturbation(A, k=0, l=1, name="y"):
    """A plus a real symmetric symbol on the (k, l) and (l, k) entries."""
    rows = [[A[i, j] for j in range(A.n)] for i in range(A.n)]
    v = MultiPoly.var(f"{name}{k + 1}{l + 1}")
    rows[k][l] = rows[k][l] + v
    rows[l][k] = rows[l][k] + v
    return ExactMatrix(rows)


@dataclass
class CancellationReport:
    order: int
    n: int
    residual: MultiPoly
    even_part: MultiPoly
    verdict: bool
    pairing_source: str
    pairs_cancelling: int = 0
    pairs_total: int = 0
    pair_failures: list = field(default_factory=list)

    def to_dict(self):
        return {
            "order": self.order,
            "n": self.n,
            "residual": str(self.residual),
            "even_part": str(self.even_part),
            "verdict": self.verdict,
            "pairing_source": self.pairing_source,
            "pairs_cancelling": self.pairs_cancelling,
            "pairs_total": self.pairs_total,
            "pair_failures": self.pair_failures,
        }


def strong_cancellation_check(A=None, n=None, r=2, use_certificate=True):
    """Expand K_r(T) with joint cumulant symbols and split into C^e and C^o parts.

    Without freeness every block becomes a symbol ``K[w]``.  The verdict is
    that the C^o part vanishes identically; with ``use_certificate`` each pair
    of the involution is also checked to cancel on its own.
    """
    if A is None:
        if n is None:
            raise ValueError("give a matrix or a size")
        A = symbolic_skew_matrix(n)
    n = A.n
    if 2 * r > 12:
        raise ResourceBoundError(f"strong cancellation check limited to 2r <= 12 (got {2 * r})")
    Q = QuadraticForm(A, names=[str(i) for i in range(1, n + 1)])
    per_part = symbolic_expansion(Q.polynomial(), r, collect_by_partition=True)
    zero = MultiPoly.const(0)
    even = zero
    odd = zero
    for p, v in per_part.items():
        if p.is_even():
            even = even + v
        else:
            odd = odd + v
    report = CancellationReport(r, n, odd, even, odd.is_zero(), "brute-force")
    if use_certificate:
        cert = validate_involution(r)
        seen = set()
        for p in upper_complements(r, "Co"):
            if p in seen or p not in cert.records:
                continue
            q = cert.partner(p)
            seen.update((p, q))
            report.pairs_total += 1
            s = per_part.get(p, zero) + (per_part.get(q, zero) if q != p else zero)
            if s.is_zero():
                report.pairs_cancelling += 1
            else:
                report.pair_failures.append([str(p), str(q)])
        report.pairing_source = "certificate"
    return report


# ---------------------------------------------------------------------------
# the two-variable form with a mean-one semicircular pair


def t2_polynomial():
    a12 = MultiPoly.var("a") + I * MultiPoly.var("b")
    return NCPolynomial([(a12, ("1", "2")), (a12.conjugate(), ("2", "1"))])


def t2_family():
    return FreeFamily.of(CumulantSpec("1", (1, 1)), CumulantSpec("2", (1, 1)))


@dataclass
class T2Table:
    cumulants: list
    hankel: dict

    def to_dict(self):
        out = {f"K{k}": str(v) for k, v in enumerate(self.cumulants, 1)}
        out.update({k: str(v) for k, v in self.hankel.items()})
        return out


def t2_commutator_table(rmax=8):
    """Cumulants of a X1 X2 + conj(a) X2 X1 with a = a + I*b (mean and variance one)."""
    if rmax < 1:
        raise ValueError("rmax must be >= 1")
    kappa = [MultiPoly.coerce(k) for k in cumulants_of_polynomial(t2_polynomial(), t2_family(), rmax)]
    hankel = {}
    for m in range(2, rmax // 2 + 1):
        H = [[kappa[i + j - 1] for j in range(1, m + 1)] for i in range(1, m + 1)]
        hankel[f"h{m}"] = ExactMatrix(H).determinant()
    return T2Table(kappa, hankel)


def t2_expected():
    a, b = MultiPoly.var("a"), MultiPoly.var("b")
    kappa = [
        2 * a,
        2 * b**2 + 10 * a**2,
        24 * a**3,
        2 * b**4 + 4 * a**2 * b**2 + 66 * a**4,
        160 * a**5,
        2 * b**6 + 6 * a**2 * b**4 + 6 * a**4 * b**2 + 386 * a**6,
        896 * a**7,
        2 * b**8 + 8 * a**2 * b**6 + 12 * a**4 * b**4 + 8 * a**6 * b**2 + 2050 * a**8,
    ]
    hankel = {
        "h2": 4 * (b**6 + 7 * a**2 * b**4 + 43 * a**4 * b**2 + 21 * a**6),
        "h3": 32 * a**2 * (b**2 + a**2)
        * (b**8 - 12 * a**2 * b**6 + 2 * a**4 * b**4 - 52 * a**6 * b**2 - 131 * a**8),
        "h4": -256 * a**6 * (b**2 - 3 * a**2) ** 4 * (b**2 + a**2) ** 3,
    }
    return kappa, hankel


# ---------------------------------------------------------------------------
# equivalent characterizations of skew forms


def symbolic_family(names, even_only=False):
    return FreeFamily([CumulantSpec.symbolic(x, even_only=even_only) for x in names])


def skew_form_checks(Q, which, rmax=5):
    """Structural checks for a form with skew system matrix.

    ``skew``: A = -A^T and the commutator rewrite reproduces the form.
    ``symmetry`` / ``odd_vanish``: K_r = 0 for odd r <= rmax under a free
    family with symbolic cumulants.  ``traces``: odd traces and partitioned
    traces of A vanish.
    """
    A = Q.A
    if which == "skew":
        skew = A.is_skew()
        rewrite = None
        if skew:
            terms = []
            for k, l, a in Q.commutator_terms():
                terms += [(a, (Q.names[k - 1], Q.names[l - 1])), (-a, (Q.names[l - 1], Q.names[k - 1]))]
            rewrite = NCPolynomial(terms).terms
            same = sorted(map(repr, rewrite)) == sorted(map(repr, Q.polynomial().terms))
        else:
            same = False
        return {"skew": skew, "rewrite_matches": same,
                "commutators": [[k, l, str(a)] for k, l, a in (Q.commutator_terms() if skew else [])]}
    if which in ("symmetry", "odd_vanish"):
        fam = Q.family or symbolic_family(Q.names)
        vals = {}
        for r in range(1, rmax + 1, 2):
            vals[r] = _normalize(poly_cumulant(Q.polynomial(), fam, r))
        return {"odd_cumulants": {r: str(v) for r, v in vals.items()},
                "all_zero": all(_is_zero(v) for v in vals.values())}
    if which == "traces":
        traces = {r: _normalize(A.power(r).trace()) for r in range(1, rmax + 1, 2)}
        ptraces = {}
        for r in range(1, rmax + 1, 2):
            for tau in enumerate_nc(r):
                ptraces[str(tau)] = _normalize(ptrace(tau, A))
        return {"odd_traces": {r: str(v) for r, v in traces.items()},
                "partitioned_traces": {k: str(v) for k, v in ptraces.items()},
                "traces_zero": all(_is_zero(v) for v in traces.values()),
                "partitioned_zero": all(_is_zero(v) for v in ptraces.values())}
    raise ValueError(f"unknown check {which!r}")
