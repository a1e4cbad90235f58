"""Acceptance criteria, one test per criterion; each prints a PASS/FAIL line."""

import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from freecomm.exactalg import ExactMatrix, GaussianRational, I, MultiPoly, PowerSeries
from freecomm.freecalc import (
    CumulantSpec,
    FreeFamily,
    NCPolynomial,
    commutator,
    cumulants_of_polynomial,
    fid_hankel_check,
    moments_from_cumulants,
    poly_cumulant,
)
from freecomm.involution import CHECK_NAMES, PARTNER_TYPE, pivot_data, psi, sigma_type3_rule, validate_involution
from freecomm.laws import (
    cumulants_by_r_transform,
    cumulants_by_tangent_numbers,
    cumulants_by_trace,
    dilate,
    gen_tetilla,
    semicircle_law,
    skew_law_decompose,
    tetilla_density,
    tetilla_law,
)
from freecomm.ncpart import SetPartition, catalan, permute_partition, upper_complements
from freecomm.quadform import (
    QuadraticForm,
    hadamard_representation,
    quad_cumulants,
    strong_cancellation_check,
    symbolic_skew_matrix,
    symmetric_perturbation,
    t2_commutator_table,
    t2_expected,
)
from freecomm.rmt import MatrixModel, empirical_moments

a, b = MultiPoly.var("a"), MultiPoly.var("b")


def substitute_b_squared(poly, value):
    """Replace b^(2j) by value^j; the polynomial must be even in b."""
    out = MultiPoly.const(0)
    for mono, coef in poly.terms.items():
        term = MultiPoly.const(coef)
        for name, e in mono:
            if name == "b":
                assert e % 2 == 0
                term = term * value ** (e // 2)
            else:
                term = term * MultiPoly.var(name) ** e
        out = out + term
    return out


def test_criterion_01_t2_cumulant_table(criterion):
    start = time.perf_counter()
    table = t2_commutator_table(8)
    elapsed = time.perf_counter() - start
    expected, _ = t2_expected()
    ok = table.cumulants == expected and elapsed < 60
    ok = ok and table.cumulants[5] == 2 * b**6 + 6 * a**2 * b**4 + 6 * a**4 * b**2 + 386 * a**6
    criterion(1, "T2 cumulant table K1..K8", ok, f"({elapsed:.2f}s)")
    assert ok


def test_criterion_02_hankel_determinants(criterion):
    table = t2_commutator_table(8)
    _, expected = t2_expected()
    same = all(table.hankel[k] == expected[k] for k in ("h2", "h3", "h4"))
    h3_special = substitute_b_squared(table.hankel["h3"], 3 * a**2)
    special = h3_special == -65536 * a**12
    h4 = table.hankel["h4"]
    signs = []
    rng = np.random.default_rng(2024)
    for _ in range(40):
        av = Fraction(int(rng.integers(-20, 21)) or 1, int(rng.integers(1, 9)))
        bv = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 9)))
        if bv * bv == 3 * av * av:
            continue
        v = h4.evaluate({"a": av, "b": bv})
        signs.append(v.is_real() and v.real() < 0)
    ok = same and special and all(signs)
    criterion(2, "Hankel determinants h2, h3, h4", ok, f"(sampled {len(signs)} points)")
    assert ok


def test_criterion_03_nested_commutator_witness(criterion):
    X1, X2 = NCPolynomial.word("X1"), NCPolynomial.word("X2")
    fam = FreeFamily.of(CumulantSpec.named_symbols("X1", "r", 12), CumulantSpec.named_symbols("X2", "r", 12))
    K3 = poly_cumulant(commutator(commutator(X1, X2), X1), fam, 3)
    r2, r3, r4 = (MultiPoly.var(f"r{k}") for k in (2, 3, 4))
    ok = K3 == -6 * r2 * r3 * r4 + 6 * r3**3 - 6 * r2**3 * r3
    criterion(3, "K3([[X1,X2],X1]) witness", ok, str(K3))
    assert ok


def _involution_ok(n_max):
    cert = validate_involution(n_max)
    expected = {p for r in range(1, n_max + 1) for p in upper_complements(r, "Co")}
    problems = []
    if set(cert.records) != expected or cert.failed:
        problems.append("coverage")
    for p, rec in cert.records.items():
        q = rec.partner
        if psi(q) != p:
            problems.append(f"psi {p}")
        if cert.records[q].type != PARTNER_TYPE[rec.type]:
            problems.append(f"type {p}")
        if Counter(p.block_sizes()) != Counter(q.block_sizes()):
            problems.append(f"sizes {p}")
        if not all(rec.checks[c] for c in CHECK_NAMES):
            problems.append(f"checks {p}")
        if permute_partition(rec.sigma, p) != q:
            problems.append(f"image {p}")
    return cert, problems


def _display_regression():
    start = SetPartition.parse("{(1,2,6),(3,4,5)}")
    mid = permute_partition(sigma_type3_rule(6, pivot_data(start)), start)
    end = permute_partition(sigma_type3_rule(6, pivot_data(mid)), mid)
    return mid == SetPartition.parse("{(1,2,3),(4,5,6)}") and end == SetPartition.parse("{(2,3,4),(1,5,6)}")


def test_criterion_04_involution_suite(criterion):
    start = time.perf_counter()
    cert, problems = _involution_ok(5)
    regression = _display_regression()
    ok = not problems and regression
    criterion(4, "involution certificate n<=5", ok,
              f"({len(cert.records)} partitions, {len(problems)} problems, {time.perf_counter() - start:.1f}s)")
    assert ok, problems[:10]


@pytest.mark.slow
def test_criterion_04_involution_suite_slow_profile(criterion):
    cert, problems = _involution_ok(6)
    ok = not problems and _display_regression()
    criterion(4.6, "involution certificate n<=6 (slow profile)", ok, f"({len(cert.records)} partitions)")
    assert ok, problems[:10]


def test_criterion_05_strong_cancellation(criterion):
    results = {}
    for n, r in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)]:
        rep = strong_cancellation_check(n=n, r=r)
        results[(n, r)] = rep.residual.is_zero() and rep.pairs_cancelling == rep.pairs_total
    perturbed = strong_cancellation_check(A=symmetric_perturbation(symbolic_skew_matrix(2)), r=2,
                                          use_certificate=False)
    ok = all(results.values()) and not perturbed.residual.is_zero()
    criterion(5, "strong cancellation residuals", ok, str({k: v for k, v in results.items()}))
    assert ok


def _random_form(n, rng, identical):
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
        for j in range(i + 1, n):
            z = GaussianRational(Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4))),
                                 int(rng.integers(-2, 3)))
            rows[i][j], rows[j][i] = z, z.conjugate()
    base = [Fraction(int(rng.integers(-3, 6)), int(rng.integers(1, 5))) for _ in range(10)]
    specs = []
    for i in range(n):
        vals = base if identical else [Fraction(int(rng.integers(-3, 6)), int(rng.integers(1, 5)))
                                       for _ in range(10)]
        specs.append(CumulantSpec(f"X{i + 1}", [0 if k % 2 == 0 else v for k, v in enumerate(vals)],
                                  even_only=True))
    return QuadraticForm(ExactMatrix(rows), FreeFamily(specs))


def test_criterion_06_formula_concordance(criterion):
    rng = np.random.default_rng(6)
    ok = True
    for n in (1, 2, 3):
        for identical in (False, True):
            Q = _random_form(n, rng, identical)
            had = hadamard_representation(Q, 5)
            for r in range(1, 6):
                g = quad_cumulants(Q, r, "general")
                ok = ok and g == quad_cumulants(Q, r, "even_family") == had[r - 1]
                if identical:
                    ok = ok and g == quad_cumulants(Q, r, "iid_even")
    for n in (2, 3):
        A = _random_form(n, rng, False).A
        Q = QuadraticForm(A, FreeFamily([CumulantSpec.semicircular(f"X{i}") for i in range(1, n + 1)]))
        for r in range(1, 6):
            ok = ok and quad_cumulants(Q, r, "semicircular") == quad_cumulants(Q, r, "general") \
                == GaussianRational.coerce(A.power(r).trace())
    criterion(6, "formula concordance general / even / iid / Hadamard / trace", ok)
    assert ok


def _binomial_charpoly(n):
    from math import comb
    return [GaussianRational.coerce(comb(n, k)) * I ** (n - k) * ((-1) ** (n - k) + 1) / 2 for k in range(n + 1)]


def test_criterion_07_generalized_tetilla(criterion):
    ok = True
    for n in range(2, 6):
        t = cumulants_by_trace(n, 10)
        ok = ok and t == cumulants_by_tangent_numbers(n, 10) == cumulants_by_r_transform(n, 10)
        ok = ok and t[1] == n * (n - 1)
        got = [GaussianRational.coerce(c) for c in ExactMatrix.commutator_matrix(n).charpoly_coeffs()]
        ok = ok and got == _binomial_charpoly(n)
        # tan(n arctan z) as a quotient of binomial expansions, order 9
        order = 9
        lhs = PowerSeries.tan(order).compose(PowerSeries.arctan(order) * n)
        minus = PowerSeries([1, -I], order) ** n
        plus = PowerSeries([1, I], order) ** n
        rhs = ((minus - plus) * I).divide(minus + plus)
        ok = ok and all(GaussianRational.coerce(lhs[k]) == GaussianRational.coerce(rhs[k]) for k in range(order + 1))
    criterion(7, "generalized tetilla triple agreement n=2..5", ok)
    assert ok


def test_criterion_08_fid_verdicts(criterion):
    verdicts = {n: fid_hankel_check(gen_tetilla(n, 8)[0].kappa, 4).verdict for n in range(2, 6)}
    t2 = [k.evaluate({"a": 1, "b": 0}) for k in t2_commutator_table(8).cumulants]
    rep = fid_hankel_check(t2, 4)
    ok = all(v == "PASS" for v in verdicts.values()) and rep.verdict == "FAIL" and rep.dets[3] == -20736
    criterion(8, "FID verdicts", ok, f"gen_tetilla {verdicts}; T2(1,0) {rep.verdict} h4={rep.dets[3]}")
    assert ok


def _support_edge(density, lo=1.0, hi=10.0):
    """Bisection for the last point where the density is positive."""
    for _ in range(200):
        mid = (lo + hi) / 2
        if density(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def test_criterion_09_law_numerics(criterion):
    law = tetilla_law(6)
    mass = law.integrate(0)
    moments = {p: law.integrate(p) for p in (2, 4, 6)}
    mass_ok = abs(mass - 1) < 1e-6
    moments_ok = all(abs(moments[p] - e) < 1e-4 for p, e in ((2, 2), (4, 10), (6, 66)))
    semi_ok = semicircle_law(12).moments() == [0 if k % 2 else catalan(k // 2) for k in range(1, 13)]
    edge = _support_edge(tetilla_density)
    # independent estimate of the edge from the growth of the exact moments
    m = moments_from_cumulants([0 if k % 2 else 2 for k in range(1, 121)])
    growth = float(Fraction(m[119], m[117])) ** 0.5
    stated = math.sqrt(11 + 5 * math.sqrt(5))
    edge_ok = abs(edge - stated) < 1e-9
    ok = mass_ok and moments_ok and semi_ok and edge_ok
    criterion(9, "laws numerics", ok,
              f"mass={mass:.12f} moments={[round(v, 8) for v in moments.values()]} "
              f"semicircle={semi_ok} edge={edge:.10f} (moment growth {growth:.4f}) vs stated {stated:.10f}")
    assert mass_ok and moments_ok and semi_ok
    assert edge_ok, f"density support ends at {edge:.10f}, not at sqrt(11+5*sqrt(5)) = {stated:.10f}"


def test_criterion_10_decomposition(criterion):
    dec = skew_law_decompose(ExactMatrix.commutator_matrix(3))
    scales_ok = len(dec.scales) == 2 and abs(dec.scales[0] - math.sqrt(3)) < 1e-12 and dec.scales[1] == 0
    exact_ok = dec.scales_squared_exact[0] == 3
    t3 = gen_tetilla(3, 10)[0].kappa
    dil = dilate(gen_tetilla(2, 10)[0], scale_squared=3).kappa
    dil_ok = t3 == dil == [0 if k % 2 else 2 * 3 ** (k // 2) for k in range(1, 11)]
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 7))
        rows = [[0] * n for _ in range(n)]
        for k in range(n):
            for l in range(k + 1, n):
                v = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
                rows[k][l], rows[l][k] = I * v, -I * v
        worst = max(worst, skew_law_decompose(ExactMatrix(rows)).max_trace_error)
    ok = scales_ok and exact_ok and dil_ok and worst < 1e-9
    criterion(10, "skew decomposition", ok, f"scales={dec.scales} worst trace error={worst:.2e}")
    assert ok


def test_criterion_11_odd_cumulants_survive(criterion):
    X, Y, Z = (NCPolynomial.word(c) for c in "XYZ")
    C = commutator(X, Y)
    sym = FreeFamily.of(CumulantSpec.semicircular("X"), CumulantSpec.semicircular("Y"), CumulantSpec.symbolic("Z"))
    K1 = poly_cumulant(C * Z * C, sym, 1)
    symbolic_ok = K1 == -2 * MultiPoly.var("k[Z;1]")
    verdicts = {}
    inputs = {"free Poisson(1)": [1] * 4, "semicircle with mean 1": [1, 1, 0, 0]}
    for label, kz in inputs.items():
        fam = FreeFamily.of(CumulantSpec.semicircular("X"), CumulantSpec.semicircular("Y"), CumulantSpec("Z", kz))
        kappa = cumulants_of_polynomial(C * Z * C, fam, 4)
        floats = [float(GaussianRational.coerce(k).real()) for k in kappa]
        h1, h2 = floats[1], floats[1] * floats[3] - floats[2] ** 2
        verdicts[label] = (floats, h1 > 0 and h2 > 0)
    ok = symbolic_ok and all(v for _, v in verdicts.values())
    criterion(11, "K1([X,Y]Z[X,Y]) = -2K1(Z), Hankel depth 2", ok,
              f"K1={K1}; " + "; ".join(f"{k}: K={v[0]}" for k, v in verdicts.items()))
    assert ok


def test_criterion_12_monte_carlo(criterion):
    start = time.perf_counter()
    model = MatrixModel(500, ExactMatrix.commutator_matrix(2), seed=12)
    emp = empirical_moments(model, 4, 20)
    elapsed = time.perf_counter() - start
    (m1, e1), (m2, _), (m3, e3), (m4, _) = emp
    ok = (abs(m2 - 2) / 2 < 0.05 and abs(m4 - 10) / 10 < 0.07
          and abs(m1) <= 3 * e1 + 1e-12 and abs(m3) <= 3 * e3 and elapsed < 120)
    criterion(12, "Monte Carlo commutator model", ok,
              f"m2={m2:.4f} m4={m4:.4f} m1={m1:.2e}+-{e1:.1e} m3={m3:.2e}+-{e3:.1e} ({elapsed:.1f}s)")
    assert ok
