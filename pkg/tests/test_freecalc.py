from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from freecomm.errors import ResourceBoundError
from freecomm.exactalg import I, MultiPoly
from freecomm.freecalc import (
    CumulantSpec,
    FreeFamily,
    NCPolynomial,
    boxed_convolution,
    canonical_rotation,
    commutator,
    cumulants_from_moments,
    cumulants_of_polynomial,
    fid_hankel_check,
    free_convolve,
    identity_series,
    joint_symbol_name,
    mixed_moment,
    moebius_series,
    moment_cumulant_convert,
    moments_by_enumeration,
    moments_from_cumulants,
    poly_cumulant,
    product_cumulant,
    symbolic_expansion,
    univariate_series,
    zeta_series,
)

X, Y, Z = (NCPolynomial.word(c) for c in "XYZ")
semi = FreeFamily.of(CumulantSpec.semicircular("X"), CumulantSpec.semicircular("Y"))
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def functional_equation_moments(kappa, order):
    """m_n = sum_s k_s * sum_{i_1+..+i_s = n-s} m_{i_1}..m_{i_s}: an enumeration-free oracle."""
    m = [Fraction(1)]

    def compositions(total, parts):
        if parts == 0:
            if total == 0:
                yield ()
            return
        for first in range(total + 1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest
    for n in range(1, order + 1):
        acc = 0
        for s in range(1, n + 1):
            inner = 0
            for comp in compositions(n - s, s):
                term = 1
                for i in comp:
                    term *= m[i]
                inner += term
            acc += kappa[s - 1] * inner
        m.append(acc)
    return m[1:]


def test_semicircle_moments_are_catalan():
    assert moments_from_cumulants([0, 1, 0, 0, 0, 0]) == [0, 1, 0, 2, 0, 5]
    assert moments_by_enumeration([0, 1, 0, 0, 0, 0], 6) == [0, 1, 0, 2, 0, 5]


def test_free_poisson_moments():
    lam = MultiPoly.var("l")
    m = moments_from_cumulants([lam] * 3)
    assert m[0] == lam and m[1] == lam + lam * lam
    assert m[2] == lam + 3 * lam ** 2 + lam ** 3


@settings(max_examples=40)
@given(st.lists(rationals, min_size=1, max_size=8))
def test_moment_cumulant_round_trip(m):
    assert moments_from_cumulants(cumulants_from_moments(m)) == m
    assert cumulants_from_moments(moments_from_cumulants(m)) == m


@settings(max_examples=25)
@given(st.lists(rationals, min_size=1, max_size=7))
def test_moments_against_functional_equation(kappa):
    expected = functional_equation_moments(kappa, len(kappa))
    assert moments_from_cumulants(kappa) == expected
    assert moments_by_enumeration(kappa, len(kappa)) == expected


def test_convert_dispatch():
    assert moment_cumulant_convert([0, 1, 0, 2], "cumulants_from_moments") == [0, 1, 0, 0]
    with pytest.raises(ValueError):
        moment_cumulant_convert([1], "sideways")


def test_mixed_moment_examples():
    assert mixed_moment("XYXY", semi) == 0
    assert mixed_moment("XYYX", semi) == 1
    assert mixed_moment("XXXX", semi) == 2
    with pytest.raises(KeyError):
        mixed_moment("XW", semi)


@settings(max_examples=30)
@given(st.lists(st.sampled_from("XYZ"), min_size=1, max_size=9),
       st.lists(rationals, min_size=9, max_size=9))
def test_mixed_moment_dp_matches_enumeration(word, vals):
    fam = FreeFamily.of(CumulantSpec("X", vals[:3]), CumulantSpec("Y", vals[3:6]),
                        CumulantSpec("Z", vals[6:]))
    assert mixed_moment(word, fam) == mixed_moment(word, fam, method="enumerate")


def test_symbolic_defaults():
    s = CumulantSpec.symbolic("Z")
    assert str(s(3)) == "k[Z;3]"
    assert CumulantSpec.symbolic("Z", even_only=True)(3) == 0
    with pytest.raises(ValueError):
        CumulantSpec("X", (1, 1), even_only=True)


def test_canonical_symbols():
    assert tuple(canonical_rotation("YXZ")) == tuple("XZY")
    assert joint_symbol_name("YX") == joint_symbol_name("XY")


def test_product_cumulant_examples():
    fam1 = FreeFamily.of(CumulantSpec.semicircular("X"))
    assert product_cumulant([2], "XX", fam1) == 1
    assert product_cumulant([2, 2], "XYYX", semi) == 1
    with pytest.raises(ValueError):
        product_cumulant([1, 2], "XYYX", semi)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_product_formula_matches_moment_route(r):
    P = commutator(X, Y)
    via_products = poly_cumulant(P, semi, r)
    via_moments = cumulants_of_polynomial(P, semi, r)[r - 1]
    assert via_products == via_moments


def test_poly_cumulant_witnesses():
    K2 = poly_cumulant(commutator(X, Y) * I, semi, 2)
    assert K2 == 2
    fam = FreeFamily.of(CumulantSpec.semicircular("X"), CumulantSpec.semicircular("Y"),
                        CumulantSpec.symbolic("Z"))
    C = commutator(X, Y)
    assert str(poly_cumulant(C * Z * C, fam, 1)) == "-2*k[Z;1]"


def test_third_cumulant_of_nested_commutator():
    X1, X2 = NCPolynomial.word("X1"), NCPolynomial.word("X2")
    fam = FreeFamily.of(CumulantSpec.named_symbols("X1", "r", 12),
                        CumulantSpec.named_symbols("X2", "r", 12))
    K3 = poly_cumulant(commutator(commutator(X1, X2), X1), fam, 3)
    r2, r3, r4 = (MultiPoly.var(f"r{k}") for k in (2, 3, 4))
    assert K3 == -6 * r2 * r3 * r4 + 6 * r3 ** 3 - 6 * r2 ** 3 * r3


def test_resource_bound():
    P = NCPolynomial.word(*"XYXYXYXY")
    with pytest.raises(ResourceBoundError):
        poly_cumulant(P, semi, 4)


def test_ncpolynomial_algebra():
    C = commutator(X, Y)
    assert (C * I).is_selfadjoint()
    assert not C.is_selfadjoint()
    assert dict((w, c) for c, w in C.adjoint().terms) == dict((w, c) for c, w in (-C).terms)
    assert C.degree() == 2 and C.letters() == ["X", "Y"]


def test_symbolic_expansion_keeps_joint_symbols():
    tot = symbolic_expansion(X + Y, 2)
    names = {v for mono in tot.terms for v, _ in mono}
    assert names == {joint_symbol_name("XX"), joint_symbol_name("XY"), joint_symbol_name("YY")}


def test_free_convolution():
    s = [0, 1, 0, 0, 0, 0]
    assert free_convolve(s, s) == [0, 2, 0, 0, 0, 0]
    assert free_convolve(s, [0] * 6) == s


def test_free_convolution_moments_against_mixed_moments():
    fam = FreeFamily.of(CumulantSpec("X", (1, 2, Fraction(1, 3))), CumulantSpec("Y", (0, 1, 0, -1)))
    order = 6
    ka, kb = fam.members["X"].sequence(order), fam.members["Y"].sequence(order)
    expected = moments_from_cumulants(free_convolve(ka, kb))
    got = []
    for n in range(1, order + 1):
        got.append(sum(mixed_moment(w, fam) for w in product("XY", repeat=n)))
    assert got == expected


def test_fid_examples():
    rep = fid_hankel_check([0, 2, 0, 2, 0, 2], 2)
    assert rep.dets == [2, 4] and rep.verdict == "PASS"
    a = {"a": 1, "b": 0}
    from freecomm.quadform import t2_commutator_table
    kappa = [k.subs(a).constant_value() if isinstance(k, MultiPoly) else k
             for k in t2_commutator_table(8).cumulants]
    rep = fid_hankel_check(kappa, 4)
    assert rep.verdict == "FAIL" and rep.dets[3] == -20736
    zero = fid_hankel_check([0] * 4, 2)
    assert zero.verdict == "BOUNDARY" and zero.index == 1
    with pytest.raises(ValueError):
        fid_hankel_check([1, 2], 2)


def test_fid_singular_positive_semidefinite():
    # cumulants of a single free Poisson jump at 1: rank one Hankel matrix
    rep = fid_hankel_check([1] * 8, 4)
    assert rep.verdict == "PASS" and rep.dets[1] == 0
    bad = fid_hankel_check([0, 0, 1, 0], 2)
    assert bad.verdict == "FAIL"


def test_zeta_moebius_inverse():
    for m in (1, 2):
        out = boxed_convolution(zeta_series(m, 5), moebius_series(m, 5), 5, m)
        nonzero = {w: c for w, c in out.items() if c != 0}
        assert nonzero == identity_series(m)


def test_boxed_convolution_univariate():
    kappa = [1, 2, -1, 3, 0, Fraction(1, 2)]
    out = boxed_convolution(univariate_series(kappa), zeta_series(1, 6), 6, 1)
    assert [out[(1,) * n] for n in range(1, 7)] == moments_from_cumulants(kappa)
    f = {(1,): 2, (2,): 1, (1, 2): 5, (2, 2, 1): 3}
    g = boxed_convolution(f, identity_series(2), 4, 2)
    assert {w: c for w, c in g.items() if c != 0} == f
    with pytest.raises(ValueError):
        boxed_convolution({(3,): 1}, identity_series(2), 2, 2)
