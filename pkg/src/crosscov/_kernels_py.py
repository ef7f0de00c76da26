"""Pure-Python/numpy implementations of the combinatorial kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and output; ``crosscov.kernels`` picks one at import time.

Partitions are passed around as restricted growth strings (RGS): row ``r``
of an ``(N, n)`` int8 array holds the block index of each element, blocks
numbered by first occurrence.  Tallies are dicts from an encoded exponent
vector (mixed radix ``n + 1``, see ``crosscov.kernels.decode_key``) to counts.
"""
from __future__ import annotations

import numpy as np


def _nc_blocks_rec(elems):
    # the block of the first element splits the rest into independent gaps
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    m = len(rest)
    for mask in range(1 << m):
        chosen = [rest[i] for i in range(m) if mask >> i & 1]
        cuts = [-1] + [i for i in range(m) if mask >> i & 1] + [m]
        gaps = [rest[cuts[j] + 1:cuts[j + 1]] for j in range(len(cuts) - 1)]
        for combo in _product_rec(gaps):
            yield [[first] + chosen] + combo


def _product_rec(gaps):
    if not gaps:
        yield []
        return
    for head in _nc_blocks_rec(gaps[0]):
        for tail in _product_rec(gaps[1:]):
            yield head + tail


def nc_rgs(n):
    """All non-crossing partitions of ``range(n)`` as RGS rows, lex order."""
    rows = []
    for blocks in _nc_blocks_rec(list(range(n))):
        row = [0] * n
        for b in blocks:
            for i in b:
                row[i] = b[0]
        # relabel by first occurrence
        ids = {}
        rows.append(tuple(ids.setdefault(v, len(ids)) for v in row))
    rows.sort()
    return np.array(rows, dtype=np.int8).reshape(len(rows), n)


def _pairings_rec(elems):
    if not elems:
        yield []
        return
    first = elems[0]
    for j in range(1, len(elems), 2):
        for inner in _pairings_rec(elems[1:j]):
            for outer in _pairings_rec(elems[j + 1:]):
                yield [(first, elems[j])] + inner + outer


def nc2_partners(two_k):
    """Non-crossing pairings of ``range(two_k)``; row[i] is the partner of i."""
    rows = []
    for pairs in _pairings_rec(list(range(two_k))):
        row = [0] * two_k
        for a, b in pairs:
            row[a], row[b] = b, a
        rows.append(tuple(row))
    rows.sort()
    return np.array(rows, dtype=np.int8).reshape(len(rows), two_k)


def mobius_to_top(rgs):
    """Mobius function mu(sigma, 1_n) for every row of ``rgs``.

    Uses the recursion mu(s, 1) = -sum_{s < r <= 1} mu(r, 1), processing rows
    from coarse to fine so every needed value already exists.
    """
    rgs = np.asarray(rgs)
    count, n = rgs.shape
    mu = np.zeros(count, dtype=np.int64)
    if count == 0:
        return mu
    nblocks = rgs.max(axis=1) + 1 if n else np.zeros(count, dtype=np.int64)
    order = np.argsort(nblocks, kind="stable")
    done = np.zeros(count, dtype=bool)
    for s in order:
        row = rgs[s]
        rep = np.empty(n, dtype=np.intp)
        first = {}
        for i in range(n):
            rep[i] = first.setdefault(int(row[i]), i)
        coarser = np.all(rgs == rgs[:, rep], axis=1) & (nblocks < nblocks[s])
        if not coarser.any():
            mu[s] = 1
        else:
            assert done[coarser].all()
            mu[s] = -mu[coarser].sum()
        done[s] = True
    return mu


def cc_tally(rgs, labels, etas, nlabels):
    """Exponent tally of the label-constant partitions of a starred word.

    For each partition whose blocks are all label-constant, the key encodes
    ``(y_0..y_{t-1}, rho_0..rho_{t-1})`` with y-exponent ``sum(|V| - 1)`` and
    rho-exponent ``sum(T(V))`` per label, T(V) being the cyclic count of equal
    neighbouring exponents inside V.
    """
    n = len(labels)
    base = n + 1
    tally = {}
    for row in np.asarray(rgs).tolist():
        first, last, lab, size, teq = {}, {}, {}, {}, {}
        ok = True
        for i, b in enumerate(row):
            if b not in first:
                first[b] = last[b] = i
                lab[b] = labels[i]
                size[b] = 1
                teq[b] = 0
            else:
                if labels[i] != lab[b]:
                    ok = False
                    break
                teq[b] += etas[i] == etas[last[b]]
                last[b] = i
                size[b] += 1
        if not ok:
            continue
        exps = [0] * (2 * nlabels)
        for b in first:
            exps[lab[b]] += size[b] - 1
            exps[nlabels + lab[b]] += teq[b] + (etas[first[b]] == etas[last[b]])
        key = 0
        for e in reversed(exps):
            key = key * base + e
        tally[key] = tally.get(key, 0) + 1
    return tally


def pair_tally(partners, labels, etas, nlabels):
    """Tally of equal-exponent pair counts per label over label-matched pairings."""
    n = len(labels)
    base = n + 1
    tally = {}
    for row in np.asarray(partners).tolist():
        exps = [0] * nlabels
        ok = True
        for i, j in enumerate(row):
            if i < j:
                if labels[i] != labels[j]:
                    ok = False
                    break
                exps[labels[i]] += etas[i] == etas[j]
        if not ok:
            continue
        key = 0
        for e in reversed(exps):
            key = key * base + e
        tally[key] = tally.get(key, 0) + 1
    return tally
