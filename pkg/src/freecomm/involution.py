"""The sign-reversing involution on odd upper complements.

Members of C^o_{2r} (noncrossing partitions of [2r] connected by the
standard matching and having an odd block) are classified by their
leftmost inner odd block and paired so that the associated terms of the
cumulant expansion of a quadratic form with skew system matrix cancel.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path

from .ncpart import (
    Permutation,
    SetPartition,
    check_bound,
    is_noncrossing,
    join_is_full,
    permute_partition,
    standard_matching,
    upper_complements,
)

TYPES = ("I", "IIa", "IIb", "IIIa", "IIIb")
PARTNER_TYPE = {"I": "I", "IIa": "IIb", "IIb": "IIa", "IIIa": "IIIb", "IIIb": "IIIa"}
CHECK_NAMES = ("nc", "membership", "involutive", "sign", "cumulant_invariant")


def padding(block):
    return range(block[0], block[-1] + 1)


def nested_in(inner, outer):
    """``inner`` lies inside the padding interval of ``outer``."""
    return inner is not outer and outer[0] <= inner[0] and inner[-1] <= outer[-1]


def inner_odd_blocks(p):
    """Odd blocks with no other odd block nested inside, ordered by minimum."""
    odd = [b for b in p.blocks if len(b) % 2]
    return [b for b in odd if not any(nested_in(c, b) for c in odd if c != b)]


@dataclass(frozen=True)
class PivotData:
    inner_odd_blocks: tuple
    leftmost: tuple
    pivot_brace: tuple
    pivot_element: int
    left_pivot_block: tuple
    right_pivot_block: tuple

    @property
    def brace_index(self):
        return self.pivot_brace[1] // 2


def in_upper_odd(p):
    if p.n % 2 or p.is_even() or not is_noncrossing(p):
        return False
    return join_is_full(p, standard_matching(p.n // 2))


def pivot_data(p):
    inner = inner_odd_blocks(p)
    if not inner:
        raise ValueError(f"{p} has no odd block")
    b = inner[0]
    a, w = b[0], b[-1]
    if (w - a) % 2:
        raise ValueError(f"padding interval of {b} has even length")
    if a % 2:
        brace, elem = (w, w + 1), w
    else:
        brace, elem = (a - 1, a), a
    if brace[0] < 1 or brace[1] > p.n:
        raise ValueError(f"pivot brace {brace} outside [1..{p.n}]")
    owner = p.block_of
    left = p.blocks[owner[brace[0]]]
    right = p.blocks[owner[brace[1]]]
    return PivotData(tuple(inner), b, brace, elem, left, right)


def is_flip(p, data=None):
    data = data or pivot_data(p)
    odd = [b for b in p.blocks if len(b) % 2]
    if len(odd) != 2:
        return False
    other_elem = data.pivot_brace[0] if data.pivot_element == data.pivot_brace[1] else data.pivot_brace[1]
    other = data.right_pivot_block if data.pivot_element == data.pivot_brace[0] else data.left_pivot_block
    if other == data.leftmost or len(other) % 2 == 0:
        return False
    return other_elem in (other[0], other[-1])


def classify(p):
    """Return ``(type_tag, PivotData)`` for a member of C^o_{2r}."""
    if not in_upper_odd(p):
        raise ValueError(f"{p} is not an odd upper complement")
    data = pivot_data(p)
    if is_flip(p, data):
        if len(data.inner_odd_blocks) == 2:
            return "I", data
        if data.pivot_brace == (1, 2):
            return "IIa", data
        if data.pivot_brace == (p.n - 1, p.n):
            return "IIb", data
        raise ValueError(f"flip partition {p} fits no flip type")
    return ("IIIa" if data.leftmost[0] % 2 == 0 else "IIIb"), data


def essentially_nested(p, block, brace):
    rest = [x for x in block if x not in brace]
    if not rest:
        return []
    lo, hi = rest[0], rest[-1]
    return [b for b in p.blocks if b != block and lo <= b[0] and b[-1] <= hi]


def flip_decomposition(p):
    """Blocks N(left), N(right) and the two pivot blocks of a flip partition."""
    _, data = classify(p)
    left, right = data.left_pivot_block, data.right_pivot_block
    return (essentially_nested(p, left, data.pivot_brace),
            essentially_nested(p, right, data.pivot_brace), left, right)


# ---------------------------------------------------------------------------
# closed-form permutations


def padding_k(data):
    return (len(padding(data.leftmost)) - 1) // 2


def sigma_type1(r, k):
    kp = r - k - 1
    img = {}
    for i in range(1, 2 * r + 1):
        if i <= 2 * k:
            img[i] = i + 2 * kp + 2
        elif i == 2 * k + 1:
            img[i] = 2 * kp + 2
        elif i == 2 * k + 2:
            img[i] = 2 * kp + 1
        else:
            img[i] = i - 2 * k - 2
    return img


def sigma_type2a(r, k):
    """Closed form; positions 2k+1 and 2k+2 are left unspecified."""
    kp = r - k - 1
    img = {1: 2 * r, 2: 2 * r - 1}
    for i in range(3, 2 * k + 1):
        img[i] = i + 2 * kp
    for i in range(2 * k + 3, 2 * r + 1):
        img[i] = i - 2 * k - 2
    return img


def sigma_type2b(r, k):
    kp = r - k - 1
    img = {}
    for i in range(1, 2 * r + 1):
        if i <= 2 * k:
            img[i] = i + 2 * kp + 2
        elif i <= 2 * r - 2:
            img[i] = i - 2 * k + 2
        elif i == 2 * r - 1:
            img[i] = 2
        else:
            img[i] = 1
    return img


def cycle_square(n, cyc):
    """The square of the cycle ``cyc`` as a permutation of [n]."""
    c = Permutation.cycle(n, tuple(cyc))
    return c * c


def sigma_type3_cycle(n, data):
    """Square of the cycle spanned by the padding interval and the pivot brace."""
    b = data.leftmost
    if b[0] % 2 == 0:
        cyc = list(range(b[-1], b[0] - 2, -1))
    else:
        cyc = list(range(b[0], b[-1] + 2))
    return cycle_square(n, cyc)


def sigma_type3_rule(n, data):
    """Shift the padding interval by one brace and reverse the pivot brace.

    For IIIb (block from 2k+1 to 2l-1) positions 2k+1..2l-2 move up by two and
    the pivot brace (2l-1, 2l) lands reversed on (2k+1, 2k+2); IIIa is the
    inverse motion.
    """
    b = data.leftmost
    img = list(range(1, n + 1))
    if b[0] % 2:
        lo, hi = b[0], b[-1] + 1
        for x in range(lo, hi - 1):
            img[x - 1] = x + 2
        img[hi - 2] = lo + 1
        img[hi - 1] = lo
    else:
        lo, hi = b[0] - 1, b[-1]
        for x in range(lo + 2, hi + 1):
            img[x - 1] = x - 2
        img[lo - 1] = hi
        img[lo] = hi - 1
    return Permutation(img)


def closed_form_sigma(p, tag=None, data=None):
    """The closed-form permutation for ``p``: (images dict, complete flag)."""
    if tag is None:
        tag, data = classify(p)
    r = p.n // 2
    k = padding_k(data)
    if tag == "I":
        img = sigma_type1(r, k)
    elif tag == "IIa":
        img = sigma_type2a(r, k)
    elif tag == "IIb":
        img = sigma_type2b(r, k)
    else:
        perm = sigma_type3_cycle(p.n, data)
        return {i: perm(i) for i in range(1, p.n + 1)}, True
    complete = len(img) == p.n and sorted(img.values()) == list(range(1, p.n + 1))
    return img, complete


# ---------------------------------------------------------------------------
# checks


def _joint_words(p, relabel):
    from .freecalc import canonical_rotation
    return sorted(canonical_rotation(tuple(relabel(q) for q in b)) for b in p.blocks)


def brace_report(sigma, r):
    """Images of the standard braces under sigma^{-1}: (reversed braces, all land on braces)."""
    inv = sigma.inverse()
    reversed_ = []
    ok = True
    for j in range(1, r + 1):
        u, v = inv(2 * j - 1), inv(2 * j)
        lo, hi = min(u, v), max(u, v)
        if lo % 2 == 0 or hi != lo + 1:
            ok = False
        if u > v:
            reversed_.append(j)
    return reversed_, ok


def sign_flip(sigma, r):
    """Symbolic brace product under skew entries: transported product equals minus the original."""
    from .exactalg import MultiPoly

    def entry(u, v):
        if u == v:
            return MultiPoly.var(f"d{u}")
        s = MultiPoly.var(f"a{min(u, v)}_{max(u, v)}")
        return s if u < v else -s

    inv = sigma.inverse()
    orig = MultiPoly.const(1)
    moved = MultiPoly.const(1)
    for j in range(1, r + 1):
        orig = orig * entry(2 * j - 1, 2 * j)
        moved = moved * entry(inv(2 * j - 1), inv(2 * j))
    return moved == -orig


def cumulant_invariant(p, q, sigma):
    """K_q(X_{j_1}, ...) with j = i o sigma^{-1} equals K_p(X_{i_1}, ...) for generic labels."""
    inv = sigma.inverse()
    return _joint_words(p, lambda x: x) == _joint_words(q, inv)


def pair_checks(p, sigma, partner_sigma=None):
    """Check dict for the pair (p, sigma.p); ``partner_sigma`` is the partner's permutation."""
    r = p.n // 2
    q = permute_partition(sigma, p)
    nc = is_noncrossing(q)
    member = nc and in_upper_odd(q)
    if partner_sigma is None:
        partner_sigma = sigma.inverse()
    if q == p:
        involutive = sigma * sigma == Permutation.identity(p.n)
    else:
        involutive = partner_sigma * sigma == Permutation.identity(p.n)
    return {
        "nc": nc,
        "membership": member,
        "involutive": involutive,
        "sign": sign_flip(sigma, r),
        "cumulant_invariant": cumulant_invariant(p, q, sigma),
    }


def extra_checks(p, sigma, tag, data):
    """Brace structure and type transition, beyond the five pair checks."""
    r = p.n // 2
    q = permute_partition(sigma, p)
    rev, onto = brace_report(sigma.inverse(), r)
    braces_ok = onto and rev == [data.brace_index]
    try:
        qtag, qdata = classify(q)
    except ValueError:
        return {"braces": False, "type_transition": False}
    braces_ok = braces_ok and tuple(sorted((sigma(data.pivot_brace[0]), sigma(data.pivot_brace[1])))) == qdata.pivot_brace
    return {"braces": braces_ok, "type_transition": qtag == PARTNER_TYPE[tag],
            "block_sizes": p.block_sizes() == q.block_sizes()}


# ---------------------------------------------------------------------------
# validation harness


@dataclass
class PairRecord:
    partition: SetPartition
    type: str
    sigma: Permutation
    partner: SetPartition
    checks: dict
    resolution: str
    rule: str
    literal_ok: bool
    literal_note: str = ""

    @property
    def ok(self):
        return all(self.checks[c] for c in CHECK_NAMES)

    def to_dict(self):
        return {
            "partition": str(self.partition),
            "type": self.type,
            "sigma": list(self.sigma.images),
            "partner": str(self.partner),
            "checks": dict(self.checks),
            "resolution": self.resolution,
            "rule": self.rule,
            "literal_ok": self.literal_ok,
            "literal_note": self.literal_note,
        }


@dataclass
class PairingCertificate:
    n_max: int
    records: dict = field(default_factory=dict)
    failed: list = field(default_factory=list)

    def record(self, p):
        return self.records[p]

    def partner(self, p):
        return self.records[p].partner

    def summary(self):
        by_r = {}
        for p, rec in self.records.items():
            s = by_r.setdefault(p.n // 2, Counter())
            s["partitions"] += 1
            s[f"type_{rec.type}"] += 1
            s[f"resolution_{rec.resolution}"] += 1
            s["literal_ok"] += rec.literal_ok
            if rec.partner == p:
                s["self_paired"] += 1
        for p in self.failed:
            by_r.setdefault(p.n // 2, Counter())["FAILED"] += 1
        return {
            "n_max": self.n_max,
            "partitions": len(self.records) + len(self.failed),
            "failed": len(self.failed),
            "all_checks_pass": all(rec.ok for rec in self.records.values()),
            "per_r": {r: dict(sorted(c.items())) for r, c in sorted(by_r.items())},
        }

    def to_json(self):
        recs = [self.records[p].to_dict() for p in sorted(self.records, key=lambda x: (x.n, x))]
        recs += [{"partition": str(p), "resolution": "FAILED"} for p in self.failed]
        return json.dumps({"n_max": self.n_max, "records": recs}, indent=1)

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path):
        doc = json.loads(Path(path).read_text())
        cert = cls(doc["n_max"])
        for rec in doc["records"]:
            p = SetPartition.parse(rec["partition"])
            if rec.get("resolution") == "FAILED":
                cert.failed.append(p)
                continue
            cert.records[p] = PairRecord(
                p, rec["type"], Permutation(rec["sigma"]), SetPartition.parse(rec["partner"], p.n),
                rec["checks"], rec["resolution"], rec["rule"], rec["literal_ok"], rec.get("literal_note", ""))
        return cert


def _brace_candidates(r, pivot_index):
    """Brace-preserving permutations reversing only the pivot brace, by image sequence."""
    out = []
    for f in permutations(range(1, r + 1)):
        img = []
        for j, t in enumerate(f, 1):
            if j == pivot_index:
                img += [2 * t, 2 * t - 1]
            else:
                img += [2 * t - 1, 2 * t]
        out.append(tuple(img))
    out.sort()
    return [Permutation(x) for x in out]


def _complete_with(partial, sigma):
    return all(sigma(i) == v for i, v in partial.items())


def _accept(p, sigma, info, cert, paired):
    """Try to pair p with sigma.p; returns the partner or None."""
    q = permute_partition(sigma, p)
    if q in paired:
        return None
    tag, data = info[p]
    checks = pair_checks(p, sigma)
    if not all(checks.values()):
        return None
    extra = extra_checks(p, sigma, tag, data)
    if not all(extra.values()):
        return None
    if q != p:
        if q not in info:
            return None
        qtag, qdata = info[q]
        qsigma = sigma.inverse()
        qchecks = pair_checks(q, qsigma)
        if not all(qchecks.values()) or not all(extra_checks(q, qsigma, qtag, qdata).values()):
            return None
    return q


def _literal_status(p, sigma, info):
    tag, data = info[p]
    img, complete = closed_form_sigma(p, tag, data)
    if complete:
        lit = Permutation(img[i] for i in range(1, p.n + 1))
        if lit == sigma:
            return "literal", True, ""
        checks = pair_checks(p, lit)
        bad = [c for c in CHECK_NAMES if not checks[c]]
        return None, False, "closed form fails: " + ",".join(bad) if bad else "closed form differs from partner's inverse"
    if _complete_with(img, sigma):
        return "completed", False, f"closed form covers {len(img)} of {p.n} positions; completion consistent"
    return None, False, "closed form incomplete and inconsistent with the pairing"


def _validate_r(r, cert):
    parts = upper_complements(r, "Co")
    info = {p: classify(p) for p in parts}
    paired = set()
    sig = {}
    rules = {}

    def commit(p, q, sigma, rule):
        sig[p], rules[p] = sigma, rule
        paired.add(p)
        if q != p:
            sig[q], rules[q] = sigma.inverse(), rule
            paired.add(q)

    # pass 1: closed forms (complete ones)
    for p in parts:
        if p in paired:
            continue
        tag, data = info[p]
        img, complete = closed_form_sigma(p, tag, data)
        if not complete:
            continue
        sigma = Permutation(img[i] for i in range(1, p.n + 1))
        q = _accept(p, sigma, info, cert, paired)
        if q is not None:
            commit(p, q, sigma, "closed-form")

    # pass 2: type III shift with reversed pivot brace
    for p in parts:
        if p in paired or info[p][0] not in ("IIIa", "IIIb"):
            continue
        sigma = sigma_type3_rule(p.n, info[p][1])
        q = _accept(p, sigma, info, cert, paired)
        if q is not None:
            commit(p, q, sigma, "shift-and-reverse")

    # pass 3: constraint search over brace-preserving permutations
    for p in parts:
        if p in paired:
            continue
        data = info[p][1]
        for sigma in _brace_candidates(r, data.brace_index):
            q = _accept(p, sigma, info, cert, paired)
            if q is not None:
                commit(p, q, sigma, "search")
                break
        else:
            cert.failed.append(p)

    for p in parts:
        if p not in paired:
            continue
        sigma = sig[p]
        q = permute_partition(sigma, p)
        res, lit_ok, note = _literal_status(p, sigma, info)
        if res is None:
            res = "searched"
        cert.records[p] = PairRecord(
            p, info[p][0], sigma, q, pair_checks(p, sigma, sig[q]), res, rules[p], lit_ok, note)


_CERTS = {}
_PER_R = {}


def _certify_r(r):
    if r not in _PER_R:
        cert = PairingCertificate(r)
        _validate_r(r, cert)
        _PER_R[r] = cert
    return _PER_R[r]


def validate_involution(n_max, cache_dir=None):
    """Pair every member of C^o_{2r}, r <= n_max, and certify each pair.

    With ``cache_dir`` the certificate is persisted as JSON and reloaded on
    later calls.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    check_bound(2 * n_max)
    if n_max in _CERTS:
        return _CERTS[n_max]
    path = Path(cache_dir) / f"involution_{n_max}.json" if cache_dir else None
    if path is not None and path.exists():
        cert = PairingCertificate.load(path)
    else:
        cert = PairingCertificate(n_max)
        for r in range(1, n_max + 1):
            part = _certify_r(r)
            cert.records.update(part.records)
            cert.failed.extend(part.failed)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            cert.save(path)
    _CERTS[n_max] = cert
    return cert


def _cert_for(p):
    if p.n % 2:
        raise ValueError(f"{p} is not an odd upper complement")
    check_bound(p.n)
    cert = _certify_r(p.n // 2)
    if p in cert.failed:
        raise ValueError(f"no valid partner found for {p}")
    if p not in cert.records:
        raise ValueError(f"{p} is not an odd upper complement")
    return cert.records[p]


def sigma_of(p):
    """The permutation pairing ``p`` with its partner."""
    classify(p)
    return _cert_for(p).sigma


def psi(p):
    return _cert_for(p).partner
