from collections import Counter

import pytest

from freecomm.involution import (
    CHECK_NAMES,
    PARTNER_TYPE,
    PairingCertificate,
    classify,
    inner_odd_blocks,
    pair_checks,
    pivot_data,
    closed_form_sigma,
    psi,
    sigma_of,
    sigma_type3_rule,
    validate_involution,
)
from freecomm.ncpart import Permutation, SetPartition, enumerate_nc, permute_partition, upper_complements

P = SetPartition.parse


def test_inner_odd_blocks():
    assert inner_odd_blocks(P("{(1,2,3),(4,6),(5)}")) == [(1, 2, 3), (5,)]
    assert inner_odd_blocks(P("{(1,2,6),(3,4,5)}")) == [(3, 4, 5)]
    for p in enumerate_nc(6, "even"):
        assert inner_odd_blocks(p) == []


def test_classification_examples():
    assert classify(P("{(1,2,6),(3,4,5)}"))[0] == "IIb"
    assert classify(P("{(1,2,3),(4,5,6)}"))[0] == "I"
    tag, data = classify(P("{(2,3),(1),(4)}"))
    assert tag == "IIIb"
    assert data.pivot_brace == (1, 2) and data.pivot_element == 1
    with pytest.raises(ValueError):
        classify(P("{(1,2),(3,4)}"))


def test_closed_form_examples():
    img, complete = closed_form_sigma(P("{(1,2,3),(4,5,6)}"))
    assert complete and [img[i] for i in range(1, 7)] == [5, 6, 4, 3, 1, 2]
    s = Permutation([img[i] for i in range(1, 7)])
    assert permute_partition(s, P("{(1,2,3),(4,5,6)}")) == P("{(1,2,3),(4,5,6)}")
    img, complete = closed_form_sigma(P("{(1,2,6),(3,4,5)}"))
    assert complete and [img[i] for i in range(1, 7)] == [5, 6, 3, 4, 2, 1]
    s = Permutation([img[i] for i in range(1, 7)])
    assert permute_partition(s, P("{(1,2,6),(3,4,5)}")) == P("{(1,5,6),(2,3,4)}")


def test_degenerate_cycle_square_fails_sign():
    p = P("{(2,3),(1),(4)}")
    img, _ = closed_form_sigma(p)
    literal = Permutation([img[i] for i in range(1, 5)])
    assert literal == Permutation.identity(4)
    assert not pair_checks(p, literal)["sign"]
    assert sigma_of(p) == Permutation.cycle(4, (1, 2))
    assert psi(p) == P("{(1,3),(2),(4)}")


def test_psi_examples():
    a, b = P("{(1,2,6),(3,4,5)}"), P("{(1,5,6),(2,3,4)}")
    assert psi(a) == b and psi(b) == a
    c, d = P("{(2,3),(1),(4)}"), P("{(1,3),(2),(4)}")
    assert psi(c) == d and psi(d) == c


def test_naive_shift_loses_leftmost_block():
    # the plain shift moves (3,4,5) to the front, where a different block becomes leftmost
    start = P("{(1,2,6),(3,4,5)}")
    mid = permute_partition(sigma_type3_rule(6, pivot_data(start)), start)
    assert mid == P("{(1,2,3),(4,5,6)}")
    end = permute_partition(sigma_type3_rule(6, pivot_data(mid)), mid)
    assert end == P("{(2,3,4),(1,5,6)}")
    assert end != start


def test_certificate_r2():
    cert = validate_involution(2)
    recs = [r for p, r in cert.records.items() if p.n == 4]
    assert len(recs) == 8 and not cert.failed
    pairs = {frozenset((r.partition, r.partner)) for r in recs}
    assert len(pairs) == 4 and all(len(x) == 2 for x in pairs)


def _assert_certificate(cert, n_max):
    expected = {p for r in range(1, n_max + 1) for p in upper_complements(r, "Co")}
    assert set(cert.records) == expected
    assert cert.failed == []
    for p, rec in cert.records.items():
        assert all(rec.checks[c] for c in CHECK_NAMES), (p, rec.checks)
        q = rec.partner
        assert psi(q) == p
        assert cert.records[q].type == PARTNER_TYPE[rec.type]
        assert Counter(p.block_sizes()) == Counter(q.block_sizes())
        assert permute_partition(rec.sigma, p) == q


def test_certificate_exhaustive_r5():
    cert = validate_involution(5)
    _assert_certificate(cert, 5)
    summary = cert.summary()
    assert summary["failed"] == 0 and summary["all_checks_pass"]


@pytest.mark.slow
def test_certificate_exhaustive_r6():
    _assert_certificate(validate_involution(6), 6)


def test_certificate_round_trip(tmp_path):
    cert = validate_involution(3)
    path = tmp_path / "cert.json"
    cert.save(path)
    again = PairingCertificate.load(path)
    assert again.summary() == cert.summary()
    assert {p: r.partner for p, r in again.records.items()} == {p: r.partner for p, r in cert.records.items()}
    cached = validate_involution(3, cache_dir=tmp_path)
    assert cached.summary() == cert.summary()


@pytest.mark.parametrize("r", [2, 3, 4])
def test_sign_check_is_not_vacuous(r):
    # a brace-preserving permutation that reverses no brace never flips the sign
    for p in upper_complements(r, "Co")[:20]:
        assert not pair_checks(p, Permutation.identity(2 * r))["sign"]
