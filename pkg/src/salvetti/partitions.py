"""Ordered set partitions, permutations and shuffles of {1, ..., k}.

A partition is a surjection ``lam: {1..k} -> {1..m}`` stored as the tuple
``(lam(1), ..., lam(k))``; its rank is ``k - m``.  A permutation is a tuple
``g`` with ``g[i-1] = g(i)``.  The symmetric group acts on partitions by
``g . lam = lam o g^{-1}``, matching the coordinate action
``(g . x)_{g(i)} = x_i`` on points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

Perm = tuple[int, ...]


class PartitionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Partition:
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if not vals:
            raise PartitionError("empty partition")
        m = max(vals)
        if sorted(set(vals)) != list(range(1, m + 1)):
            raise PartitionError(f"{vals} is not surjective onto 1..{m}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]]) -> "Partition":
        k = sum(len(b) for b in blocks)
        vals = [0] * k
        for idx, block in enumerate(blocks, start=1):
            for i in block:
                if not 1 <= i <= k or vals[i - 1]:
                    raise PartitionError(f"blocks {blocks} do not partition 1..{k}")
                vals[i - 1] = idx
        return cls(tuple(vals))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse bar notation such as ``(1|2,3)``."""
        body = text.strip().removeprefix("(").removesuffix(")")
        blocks = [[int(x) for x in part.split(",") if x.strip()] for part in body.split("|")]
        return cls.from_blocks(blocks)

    @classmethod
    def chamber(cls, perm: Perm) -> "Partition":
        """The chamber g . (1|2|...|k), i.e. the map i -> g^{-1}(i)."""
        return cls(inverse(perm))

    @property
    def k(self) -> int:
        return len(self.values)

    @property
    def n_blocks(self) -> int:
        return max(self.values)

    @property
    def rank(self) -> int:
        return self.k - self.n_blocks

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.n_blocks)]
        for i, v in enumerate(self.values, start=1):
            out[v - 1].append(i)
        return tuple(tuple(b) for b in out)

    @property
    def type(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def is_order_preserving(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def is_chamber(self) -> bool:
        return self.n_blocks == self.k

    def leq(self, other: "Partition") -> bool:
        """``self <= other`` iff ``other`` is a subdivision of ``self``."""
        if self.k != other.k:
            raise PartitionError("partitions of different sets")
        mu, lam = self.values, other.values
        for i in range(self.k):
            for j in range(self.k):
                if lam[i] == lam[j] and mu[i] != mu[j]:
                    return False
                if lam[i] < lam[j] and mu[i] > mu[j]:
                    return False
        return True

    def act(self, g: Perm) -> "Partition":
        ginv = inverse(g)
        return Partition(tuple(self.values[ginv[i] - 1] for i in range(self.k)))

    def __str__(self):
        return "(" + "|".join(",".join(str(i) for i in b) for b in self.blocks) + ")"


# -- permutations -----------------------------------------------------------

def identity(k: int) -> Perm:
    return tuple(range(1, k + 1))


def inverse(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, gi in enumerate(g, start=1):
        out[gi - 1] = i
    return tuple(out)


def compose_perms(g: Perm, h: Perm) -> Perm:
    """(g o h)(i) = g(h(i))."""
    return tuple(g[hi - 1] for hi in h)


def perm_sign(g: Perm) -> int:
    inv = sum(1 for i in range(len(g)) for j in range(i + 1, len(g)) if g[i] > g[j])
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def all_perms(k: int) -> tuple[Perm, ...]:
    return tuple(itertools.permutations(range(1, k + 1)))


# -- enumeration ------------------------------------------------------------

def compositions(k: int, parts: int) -> Iterator[tuple[int, ...]]:
    for cuts in itertools.combinations(range(1, k), parts - 1):
        bounds = (0,) + cuts + (k,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def _surjections(k: int, m: int) -> Iterator[tuple[int, ...]]:
    for vals in itertools.product(range(1, m + 1), repeat=k):
        if len(set(vals)) == m:
            yield vals


def enumerate_partitions(k: int, r: int, mode: str = "all") -> list[Partition]:
    """Partitions of {1..k} of rank r (k - r blocks), lexicographic order.

    ``mode='order_preserving'`` restricts to the monotone representatives
    O_{k,r} of the symmetric-group orbits.
    """
    if k < 1 or not 0 <= r < k:
        raise PartitionError(f"rank {r} out of range for k={k}")
    m = k - r
    if mode == "all":
        return [Partition(v) for v in _surjections(k, m)]
    if mode == "order_preserving":
        out = []
        for comp in compositions(k, m):
            out.append(Partition(tuple(i + 1 for i, size in enumerate(comp) for _ in range(size))))
        return sorted(out)
    raise PartitionError(f"unknown mode {mode!r}")


def all_partitions(k: int) -> list[Partition]:
    return [p for r in range(k) for p in enumerate_partitions(k, r)]


def fubini(k: int) -> int:
    """Number of ordered set partitions of a k-set."""
    a = [1]
    for n in range(1, k + 1):
        a.append(sum(_binom(n, i) * a[n - i] for i in range(1, n + 1)))
    return a[k]


def _binom(n, r):
    from math import comb
    return comb(n, r)


def shuffles(block_type: Sequence[int]) -> list[tuple[Perm, int]]:
    """All (p_1, ..., p_s)-shuffles with their signs.

    A shuffle is increasing on each consecutive block of positions.
    """
    block_type = tuple(int(p) for p in block_type)
    if not block_type or any(p < 1 for p in block_type):
        raise PartitionError(f"invalid composition {block_type}")
    k = sum(block_type)
    out = []

    def rec(remaining: tuple[int, ...], idx: int, acc: list[tuple[int, ...]]):
        if idx == len(block_type):
            perm = tuple(v for chunk in acc for v in chunk)
            out.append(perm)
            return
        for chosen in itertools.combinations(remaining, block_type[idx]):
            rest = tuple(v for v in remaining if v not in chosen)
            rec(rest, idx + 1, acc + [chosen])

    rec(tuple(range(1, k + 1)), 0, [])
    return [(g, perm_sign(g)) for g in sorted(out)]


def is_shuffle(g: Perm, block_type: Sequence[int]) -> bool:
    pos = 0
    for p in block_type:
        chunk = g[pos:pos + p]
        if any(a > b for a, b in zip(chunk, chunk[1:])):
            return False
        pos += p
    return pos == len(g)
