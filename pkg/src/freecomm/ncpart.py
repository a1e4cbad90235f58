"""Set partitions of [n], the noncrossing lattice NC(n) and Kreweras complements.

Partitions are 1-based and stored canonically: each block sorted, blocks
sorted by their minimum.  Text forms are ``{(1,2),(3)}`` and the compact
block-index form ``1,1,2``.
"""

from __future__ import annotations

import os
import re
from functools import lru_cache
from itertools import product

from .errors import ResourceBoundError

DEFAULT_BOUND = 14
BOUND_ENV = "FREECOMM_NC_BOUND"

# enumerations up to this size are cached in memory
_CACHE_LIMIT = 12


def enumeration_bound():
    try:
        return int(os.environ.get(BOUND_ENV, DEFAULT_BOUND))
    except ValueError:
        return DEFAULT_BOUND


def check_bound(n, bound=None):
    bound = enumeration_bound() if bound is None else bound
    if n > bound:
        raise ResourceBoundError(
            f"n={n} exceeds the enumeration bound {bound} "
            f"(set {BOUND_ENV} to raise it; NC({n}) has {catalan(n)} elements)"
        )


def catalan(n):
    from math import comb

    return comb(2 * n, n) // (n + 1)


class SetPartition:
    __slots__ = ("n", "blocks", "_block_of")

    def __init__(self, n, blocks):
        bl = tuple(sorted(tuple(sorted(b)) for b in blocks))
        seen = [b for blk in bl for b in blk]
        if any(not blk for blk in bl):
            raise ValueError("empty block")
        if sorted(seen) != list(range(1, n + 1)):
            raise ValueError(f"blocks {blocks} do not partition [1..{n}]")
        self.n = n
        self.blocks = bl
        self._block_of = None

    @classmethod
    def _trusted(cls, n, blocks):
        p = cls.__new__(cls)
        p.n = n
        p.blocks = blocks
        p._block_of = None
        return p

    @classmethod
    def one(cls, n):
        return cls._trusted(n, (tuple(range(1, n + 1)),))

    @classmethod
    def zero(cls, n):
        return cls._trusted(n, tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def from_labels(cls, labels):
        groups = {}
        for i, lab in enumerate(labels, 1):
            groups.setdefault(lab, []).append(i)
        return cls(len(labels), groups.values())

    @classmethod
    def parse(cls, text, n=None):
        """Accept ``{(1,2),(3)}`` or the block-index form ``1,1,2``."""
        s = text.strip().replace(" ", "")
        if s.startswith("{") or s.startswith("("):
            blocks = [tuple(int(x) for x in b.split(",") if x)
                      for b in re.findall(r"\(([\d,]*)\)", s)]
            size = max((max(b) for b in blocks if b), default=0) if n is None else n
            return cls(size, blocks)
        if not s:
            raise ValueError("empty partition text")
        return cls.from_labels([int(x) for x in s.split(",")])

    @property
    def block_of(self):
        """Tuple mapping element (1-based index) to block index; slot 0 unused."""
        if self._block_of is None:
            b = [0] * (self.n + 1)
            for k, blk in enumerate(self.blocks):
                for x in blk:
                    b[x] = k
            self._block_of = tuple(b)
        return self._block_of

    def labels(self):
        return self.block_of[1:]

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __eq__(self, other):
        return isinstance(other, SetPartition) and self.n == other.n and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.n, self.blocks))

    def __lt__(self, other):
        return (self.n, self.blocks) < (other.n, other.blocks)

    def __str__(self):
        return "{" + ",".join("(" + ",".join(map(str, b)) + ")" for b in self.blocks) + "}"

    def __repr__(self):
        return f"SetPartition({self})"

    def compact(self):
        return ",".join(str(k + 1) for k in self.labels())

    def block_sizes(self):
        return tuple(sorted(len(b) for b in self.blocks))

    def is_even(self):
        return all(len(b) % 2 == 0 for b in self.blocks)

    def same_block(self, i, j):
        return self.block_of[i] == self.block_of[j]


def is_noncrossing(p):
    """No ``a < b < c < d`` with ``a ~ c``, ``b ~ d`` in different blocks."""
    # blocks are noncrossing iff scanning left to right the open blocks form a stack
    stack = []
    last = {blk[-1]: k for k, blk in enumerate(p.blocks)}
    bo = p.block_of
    for x in range(1, p.n + 1):
        k = bo[x]
        if stack and stack[-1] == k:
            pass
        elif k in stack:
            return False
        else:
            stack.append(k)
        if last.get(x) == k:
            stack.pop()
    return True


def is_noncrossing_bruteforce(p):
    bo = p.block_of
    n = p.n
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if bo[a] == bo[b]:
                continue
            for c in range(b + 1, n + 1):
                if bo[c] != bo[a]:
                    continue
                for d in range(c + 1, n + 1):
                    if bo[d] == bo[b]:
                        return False
    return True


def _nc_interval(elems):
    """Noncrossing partitions of a sorted tuple of elements, as tuples of blocks.

    The block of the first element is chosen first; the gaps between its
    members and the tail after it are independent subproblems.
    """
    m = len(elems)
    if m == 0:
        yield ()
        return
    first = elems[0]
    rest = elems[1:]
    for mask in range(1 << (m - 1)):
        chosen = [first] + [rest[i] for i in range(m - 1) if mask >> i & 1]
        segments = []
        cur = []
        for i, x in enumerate(rest):
            if mask >> i & 1:
                if cur:
                    segments.append(tuple(cur))
                    cur = []
            else:
                cur.append(x)
        if cur:
            segments.append(tuple(cur))
        subs = [list(_nc_interval(s)) for s in segments]
        block = tuple(chosen)
        for combo in product(*subs):
            out = [block]
            for c in combo:
                out.extend(c)
            yield tuple(out)


@lru_cache(maxsize=None)
def _nc_cached(n):
    return tuple(SetPartition._trusted(n, tuple(sorted(bl))) for bl in _nc_interval(tuple(range(1, n + 1))))


def all_set_partitions(n):
    """Every set partition of [n] (restricted growth strings); small n only."""
    def rec(i, labels, k):
        if i == n:
            yield SetPartition.from_labels(labels)
            return
        for lab in range(k + 1):
            labels.append(lab)
            yield from rec(i + 1, labels, max(k, lab + 1))
            labels.pop()
    if n == 0:
        return
    yield from rec(0, [], 0)


def enumerate_nc(n, filter="all", bound=None):
    """Stream NC(n) in a deterministic order, optionally restricted to
    even partitions (``"even"``) or pairings (``"pairings"``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    check_bound(n, bound)
    if filter not in ("all", "even", "pairings"):
        raise ValueError(f"unknown filter {filter!r}")
    if n <= _CACHE_LIMIT:
        source = iter(_nc_cached(n))
    else:
        source = (SetPartition._trusted(n, tuple(sorted(bl)))
                  for bl in _nc_interval(tuple(range(1, n + 1))))
    for p in source:
        if filter == "even" and not p.is_even():
            continue
        if filter == "pairings" and any(len(b) != 2 for b in p.blocks):
            continue
        yield p


class Permutation:
    """Bijection of [n] stored as its one-line image list (1-based)."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation: {images}")
        self.images = images

    @property
    def n(self):
        return len(self.images)

    @classmethod
    def identity(cls, n):
        return cls(range(1, n + 1))

    @classmethod
    def cycle(cls, n, *cycles):
        """Product of disjoint cycles; ``(a b c)`` maps a->b->c->a."""
        img = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b
        return cls(img)

    def __call__(self, i):
        return self.images[i - 1]

    def __mul__(self, other):
        """Composition ``(self * other)(i) = self(other(i))``."""
        if other.n != self.n:
            raise ValueError("size mismatch")
        return Permutation(self.images[j - 1] for j in other.images)

    def inverse(self):
        inv = [0] * self.n
        for i, j in enumerate(self.images, 1):
            inv[j - 1] = i
        return Permutation(inv)

    def cycles(self):
        seen = set()
        out = []
        for i in range(1, self.n + 1):
            if i in seen:
                continue
            c = [i]
            seen.add(i)
            j = self(i)
            while j != i:
                c.append(j)
                seen.add(j)
                j = self(j)
            out.append(tuple(c))
        return out

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"


def permute_partition(s, p):
    """Blockwise image ``s . p = {s(B) : B in p}``."""
    if s.n != p.n:
        raise ValueError("size mismatch")
    img = s.images
    return SetPartition._trusted(p.n, tuple(sorted(tuple(sorted(img[x - 1] for x in b)) for b in p.blocks)))


def _as_permutation(p):
    """Each block becomes an increasing cycle."""
    img = [0] * p.n
    for b in p.blocks:
        for a, c in zip(b, b[1:] + b[:1]):
            img[a - 1] = c
    return Permutation(img)


def _from_cycles(perm):
    return SetPartition._trusted(perm.n, tuple(sorted(tuple(sorted(c)) for c in perm.cycles())))


def kreweras(p, side="right"):
    """Right complement (interlacing ``1, 1', 2, 2', ...``) or left complement
    (interlacing ``1', 1, 2', 2, ...``); the two are mutually inverse."""
    if not is_noncrossing(p):
        raise ValueError(f"Kreweras complement needs a noncrossing partition, got {p}")
    n = p.n
    gamma = Permutation(list(range(2, n + 1)) + [1])
    pp = _as_permutation(p)
    if side == "right":
        return _from_cycles(pp.inverse() * gamma)
    if side == "left":
        return _from_cycles(gamma * pp.inverse())
    raise ValueError(f"unknown side {side!r}")


def leq(p, q):
    """Refinement order: every block of p lies inside a block of q."""
    bo = q.block_of
    return all(len({bo[x] for x in b}) == 1 for b in p.blocks)


def meet(p, q):
    bp, bq = p.block_of, q.block_of
    groups = {}
    for x in range(1, p.n + 1):
        groups.setdefault((bp[x], bq[x]), []).append(x)
    return SetPartition._trusted(p.n, tuple(sorted(tuple(g) for g in groups.values())))


def join(p, q):
    """Join in NC(n), via Kreweras: K(p v q) = K(p) ^ K(q)."""
    for x in (p, q):
        if not is_noncrossing(x):
            raise ValueError(f"{x} is not noncrossing")
    return kreweras(meet(kreweras(p, "right"), kreweras(q, "right")), "left")


def _union_find_classes(n, partitions):
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in partitions:
        for b in p.blocks:
            r = find(b[0])
            for x in b[1:]:
                rx = find(x)
                if rx != r:
                    parent[rx] = r
    return find, parent


def join_is_full(p, q):
    """Connectivity of the union relation of p and q.

    This is the set-partition join; it agrees with the NC join being the
    one-block partition whenever one argument is an interval partition.
    """
    if p.n != q.n:
        raise ValueError("size mismatch")
    find, _ = _union_find_classes(p.n, (p, q))
    r = find(1)
    return all(find(x) == r for x in range(2, p.n + 1))


def set_join(p, q):
    find, _ = _union_find_classes(p.n, (p, q))
    groups = {}
    for x in range(1, p.n + 1):
        groups.setdefault(find(x), []).append(x)
    return SetPartition._trusted(p.n, tuple(sorted(tuple(g) for g in groups.values())))


def lattice_ops(p, q, mode):
    if p.n != q.n:
        raise ValueError(f"partitions live on different ground sets ({p.n} vs {q.n})")
    if mode == "leq":
        return leq(p, q)
    if mode == "meet":
        return meet(p, q)
    if mode == "join":
        return join(p, q)
    if mode == "join_is_full":
        return join_is_full(p, q)
    raise ValueError(f"unknown lattice mode {mode!r}")


def interval_partition(lengths):
    blocks = []
    start = 1
    for ell in lengths:
        if ell < 1:
            raise ValueError("interval lengths must be positive")
        blocks.append(tuple(range(start, start + ell)))
        start += ell
    return SetPartition._trusted(start - 1, tuple(blocks))


def is_interval_partition(p):
    return all(b == tuple(range(b[0], b[-1] + 1)) for b in p.blocks)


def standard_matching(r):
    return interval_partition([2] * r)


def nu0(r):
    """``{(2,3),(4,5),...,(2r-2,2r-1),(2r,1)}``."""
    if r == 1:
        return SetPartition.one(2)
    blocks = [(1, 2 * r)] + [(2 * j, 2 * j + 1) for j in range(1, r)]
    return SetPartition(2 * r, blocks)


@lru_cache(maxsize=None)
def connected_partitions(lengths):
    """All p in NC(n) with p v rho = 1_n, rho the interval partition of ``lengths``."""
    rho = interval_partition(lengths)
    return tuple(p for p in enumerate_nc(rho.n) if join_is_full(p, rho))


def upper_complements(r, kind="C"):
    """Members of C_{2r} (``"C"``), its even part (``"Ce"``) or odd part (``"Co"``)."""
    check_bound(2 * r)
    conn = connected_partitions((2,) * r)
    if kind == "C":
        return conn
    if kind == "Ce":
        return tuple(p for p in conn if p.is_even())
    if kind == "Co":
        return tuple(p for p in conn if not p.is_even())
    raise ValueError(f"unknown kind {kind!r}")


def special_partitions(r, kind):
    if r < 1:
        raise ValueError("r must be >= 1")
    if kind == "standard_matching":
        return standard_matching(r)
    if kind == "nu0":
        return nu0(r)
    return upper_complements(r, kind)


def _pair_class(j, r):
    return (2 * j, 2 * j + 1) if j < r else (2 * r, 1)


def interval_iso(r, direction, arg):
    """Order isomorphism NC(r) <-> [nu0_r, 1_2r] merging the pair classes
    ``{2j, 2j+1}`` (with ``{2r, 1}`` last) along the blocks of its argument."""
    if direction == "up":
        if arg.n != r or not is_noncrossing(arg):
            raise ValueError(f"expected an element of NC({r})")
        blocks = []
        for b in arg.blocks:
            blk = []
            for j in b:
                blk.extend(_pair_class(j, r))
            blocks.append(blk)
        return SetPartition(2 * r, blocks)
    if direction == "down":
        if arg.n != 2 * r or not leq(nu0(r), arg) or not arg.is_even() or not is_noncrossing(arg):
            raise ValueError(f"{arg} is not in the interval [nu0_{r}, 1_{2 * r}] of NCE({2 * r})")
        bo = arg.block_of
        return SetPartition.from_labels([bo[2 * j] for j in range(1, r)] + [bo[2 * r]])
    raise ValueError(f"unknown direction {direction!r}")
