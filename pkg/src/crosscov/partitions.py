"""Non-crossing partitions: enumeration, refinement order, Kreweras complement
and the Mobius function of the lattice NC(n).

Elements of the ground set are ``1..n``.  A partition is stored canonically
(blocks ascending, ordered by least element), so equality is structural.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, SizeLimitError, current_limits

__all__ = [
    "SetPartition",
    "NCPartition",
    "catalan",
    "is_noncrossing",
    "is_pair_partition",
    "leq",
    "enumerate_nc",
    "enumerate_nc_pair",
    "kreweras_complement",
    "mobius_nc",
    "zero_partition",
    "one_partition",
    "nc_block_lists",
    "nc_mobius_table",
]


@dataclass(frozen=True, eq=False)
class SetPartition:
    """A partition of ``{1, ..., n}`` in canonical form.

    Equality and hashing look only at ``(n, blocks)``, so an
    :class:`NCPartition` equals the plain partition with the same blocks.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"ground set size must be >= 0, got {self.n}")
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        seen = [x for b in blocks for x in b]
        if any(len(b) == 0 for b in blocks):
            raise DomainError("empty block")
        if sorted(seen) != list(range(1, self.n + 1)):
            raise DomainError(f"blocks {blocks} do not partition 1..{self.n}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]):
        """Build from a restricted growth string (0-based block ids)."""
        groups: dict[int, list[int]] = {}
        for i, b in enumerate(rgs, start=1):
            groups.setdefault(int(b), []).append(i)
        return cls(len(rgs), tuple(tuple(g) for g in groups.values()))

    def rgs(self) -> tuple[int, ...]:
        out = [0] * self.n
        for idx, b in enumerate(self.blocks):
            for x in b:
                out[x - 1] = idx
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, SetPartition):
            return NotImplemented
        return self.n == other.n and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.n, self.blocks))

    def __len__(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(b) for b in self.blocks))

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


class NCPartition(SetPartition):
    """A :class:`SetPartition` with no crossing blocks."""

    def __post_init__(self):
        super().__post_init__()
        if not is_noncrossing(self):
            raise DomainError(f"{self} is crossing")


def _crossing(blocks: Iterable[Sequence[int]]) -> bool:
    owner = {}
    for idx, b in enumerate(blocks):
        for x in b:
            owner[x] = idx
    # a < b < c < d with a, c in one block and b, d in another
    pts = sorted(owner)
    for i, a in enumerate(pts):
        for j in range(i + 1, len(pts)):
            b = pts[j]
            if owner[b] == owner[a]:
                continue
            for k in range(j + 1, len(pts)):
                c = pts[k]
                if owner[c] != owner[a]:
                    continue
                for d in pts[k + 1:]:
                    if owner[d] == owner[b]:
                        return True
    return False


def is_noncrossing(p: SetPartition) -> bool:
    return not _crossing(p.blocks)


def is_pair_partition(p: SetPartition) -> bool:
    return all(len(b) == 2 for b in p.blocks)


def leq(s: SetPartition, p: SetPartition) -> bool:
    """Refinement order: every block of ``s`` lies inside a block of ``p``."""
    if s.n != p.n:
        raise DomainError(f"partitions of different sets ({s.n} vs {p.n})")
    where = p.rgs()
    return all(len({where[x - 1] for x in b}) == 1 for b in s.blocks)


def zero_partition(n: int) -> NCPartition:
    return NCPartition(n, tuple((i,) for i in range(1, n + 1)))


def one_partition(n: int) -> NCPartition:
    return NCPartition(n, (tuple(range(1, n + 1)),) if n else ())


def catalan(m: int) -> int:
    if m < 0:
        raise DomainError(f"catalan index must be >= 0, got {m}")
    if m > 30:
        raise SizeLimitError(f"catalan({m}) beyond supported range m <= 30")
    return comb(2 * m, m) // (m + 1)


@functools.lru_cache(maxsize=None)
def _nc_rgs(n: int) -> np.ndarray:
    arr = kernels.nc_rgs(n)
    arr.setflags(write=False)
    return arr


@functools.lru_cache(maxsize=None)
def _nc2_partners(two_k: int) -> np.ndarray:
    arr = kernels.nc2_partners(two_k)
    arr.setflags(write=False)
    return arr


@functools.lru_cache(maxsize=None)
def _enumerate_nc(n: int) -> tuple[NCPartition, ...]:
    # kernel output is non-crossing by construction; skip re-validation
    out = []
    for row in _nc_rgs(n).tolist():
        p = SetPartition.from_rgs(row)
        q = object.__new__(NCPartition)
        object.__setattr__(q, "n", p.n)
        object.__setattr__(q, "blocks", p.blocks)
        out.append(q)
    return tuple(out)


def enumerate_nc(n: int) -> list[NCPartition]:
    """All non-crossing partitions of ``{1..n}`` (``catalan(n)`` of them)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    cap = current_limits().nc_max
    if n > cap:
        raise SizeLimitError(f"enumerate_nc({n}) exceeds nc_max={cap}")
    return list(_enumerate_nc(n))


def enumerate_nc_pair(two_k: int) -> list[NCPartition]:
    """All non-crossing pair partitions of ``{1..2k}``."""
    if two_k < 2 or two_k % 2:
        raise DomainError(f"need a positive even size, got {two_k}")
    if two_k > 16:
        raise SizeLimitError(f"enumerate_nc_pair({two_k}) exceeds 16")
    out = []
    for row in _nc2_partners(two_k).tolist():
        blocks = tuple((i + 1, j + 1) for i, j in enumerate(row) if i < j)
        out.append(NCPartition(two_k, blocks))
    return out


def kreweras_complement(p: NCPartition) -> NCPartition:
    """Kreweras complement K(p), read off the interleaved circle 1, 1', ..., n, n'.

    Starting at the barred point i', step clockwise to the unbarred point
    i + 1 and then jump back along the block of i + 1 to its predecessor j;
    j' is the next point of the block of i' in K(p).  (As permutations,
    K(p) = p^{-1} o gamma with gamma the long cycle.)
    """
    if not is_noncrossing(p):
        raise DomainError(f"{p} is crossing")
    n = p.n
    pred = {}
    for b in p.blocks:
        for a, c in zip(b, b[1:] + b[:1]):
            pred[c] = a
    succ = {i: pred[i % n + 1] for i in range(1, n + 1)}
    seen: set[int] = set()
    blocks = []
    for start in range(1, n + 1):
        if start in seen:
            continue
        cyc, i = [], start
        while i not in seen:
            seen.add(i)
            cyc.append(i)
            i = succ[i]
        blocks.append(tuple(cyc))
    return NCPartition(n, tuple(blocks))


def _interval(s: SetPartition, p: SetPartition) -> list[NCPartition]:
    return [r for r in _enumerate_nc(s.n) if leq(s, r) and leq(r, p)]


@functools.lru_cache(maxsize=None)
def _mobius(s: SetPartition, p: SetPartition) -> int:
    if s == p:
        return 1
    return -sum(_mobius(s, r) for r in _interval(s, p) if r != p)


def mobius_nc(s: NCPartition, p: NCPartition) -> int:
    """Mobius function of NC(n) on the interval [s, p]."""
    if not leq(s, p):
        raise DomainError(f"{s} is not below {p}")
    if s.n > current_limits().nc_max:
        raise SizeLimitError(f"mobius_nc on n={s.n} exceeds nc_max")
    return _mobius(s, p)


@functools.lru_cache(maxsize=None)
def nc_block_lists(n: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Blocks (0-based positions) of every partition in NC(n), kernel order."""
    out = []
    for row in _nc_rgs(n).tolist():
        groups: dict[int, list[int]] = {}
        for i, b in enumerate(row):
            groups.setdefault(b, []).append(i)
        out.append(tuple(tuple(g) for g in groups.values()))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def nc_mobius_table(n: int) -> tuple[int, ...]:
    """mu(sigma, 1_n) for sigma in ``nc_block_lists(n)`` order."""
    return tuple(int(v) for v in kernels.mobius_to_top(_nc_rgs(n)))
