import itertools

import pytest
from hypothesis import given, settings, strategies as st

from crosscov import (
    DomainError,
    NCPartition,
    SetPartition,
    SizeLimitError,
    catalan,
    enumerate_nc,
    enumerate_nc_pair,
    is_noncrossing,
    is_pair_partition,
    kreweras_complement,
    leq,
    limits,
    mobius_nc,
    one_partition,
    zero_partition,
)
from crosscov.partitions import nc_mobius_table, nc_block_lists

from oracles import catalan_rec, kreweras_by_search, nc_by_filter


def P(*blocks, n=None):
    n = n or sum(len(b) for b in blocks)
    return NCPartition(n, blocks)


def test_canonical_form_and_equality():
    a = SetPartition(4, ((4, 2), (3, 1)))
    assert a.blocks == ((1, 3), (2, 4))
    assert a == SetPartition.from_rgs([0, 1, 0, 1])
    assert P((1, 2), (3,)) == SetPartition(3, ((3,), (2, 1)))
    assert len({P((1, 2), (3,)), SetPartition(3, ((1, 2), (3,)))}) == 1
    assert str(P((1, 4), (2, 3))) == "{{1,4}, {2,3}}"


@pytest.mark.parametrize("blocks", [((1, 2), (2, 3)), ((1,), (3,)), ((1, 2), ())])
def test_invalid_partitions_rejected(blocks):
    with pytest.raises(DomainError):
        SetPartition(3, blocks)


def test_crossing_partition_rejected():
    with pytest.raises(DomainError):
        NCPartition(4, ((1, 3), (2, 4)))


@pytest.mark.parametrize(
    "blocks, expected",
    [(((1, 2), (3, 4)), True), (((1, 3), (2, 4)), False), (((1, 4), (2, 3)), True), (((1, 3, 5), (2, 4)), False)],
)
def test_is_noncrossing(blocks, expected):
    assert is_noncrossing(SetPartition(sum(map(len, blocks)), blocks)) is expected


def test_enumerate_small_cases():
    assert enumerate_nc(1) == [P((1,))]
    assert len(enumerate_nc(3)) == 5
    four = enumerate_nc(4)
    assert len(four) == 14
    assert SetPartition(4, ((1, 3), (2, 4))) not in four


@pytest.mark.parametrize("n", range(1, 8))
def test_enumerate_matches_crossing_filter(n):
    assert set(enumerate_nc(n)) == set(nc_by_filter(n))
    assert len(enumerate_nc(n)) == len(set(enumerate_nc(n))) == catalan(n)


def test_enumerate_bounds():
    with pytest.raises(DomainError):
        enumerate_nc(0)
    with pytest.raises(SizeLimitError):
        enumerate_nc(11)
    with limits(nc_max=11):
        assert len(enumerate_nc(11)) == catalan(11)


def test_catalan():
    assert [catalan(m) for m in (0, 3, 8)] == [1, 5, 1430]
    assert all(catalan(m) == catalan_rec(m) for m in range(31))
    with pytest.raises(SizeLimitError):
        catalan(31)
    with pytest.raises(DomainError):
        catalan(-1)


def test_leq_examples():
    assert leq(zero_partition(2), one_partition(2))
    assert not leq(one_partition(2), zero_partition(2))
    assert leq(P((1, 2), (3,)), one_partition(3))
    with pytest.raises(DomainError):
        leq(zero_partition(2), zero_partition(3))


@pytest.mark.parametrize("n", range(1, 7))
def test_leq_is_partial_order(n):
    ps = enumerate_nc(n)
    for a in ps:
        assert leq(a, a)
    for a, b in itertools.product(ps, repeat=2):
        if leq(a, b) and leq(b, a):
            assert a == b
    if n <= 5:
        for a, b, c in itertools.product(ps, repeat=3):
            if leq(a, b) and leq(b, c):
                assert leq(a, c)


def test_kreweras_examples():
    assert kreweras_complement(zero_partition(5)) == one_partition(5)
    assert kreweras_complement(one_partition(5)) == zero_partition(5)
    assert kreweras_complement(P((1, 2), (3, 4))) == P((1,), (2, 4), (3,))


@pytest.mark.parametrize("n", range(1, 7))
def test_kreweras_against_maximality_search(n):
    for p in enumerate_nc(n):
        k = kreweras_complement(p)
        assert len(p) + len(k) == n + 1
        if n <= 5:
            assert k == kreweras_by_search(p)


@pytest.mark.parametrize("n", range(1, 8))
def test_kreweras_bijection_and_double_complement(n):
    ps = enumerate_nc(n)
    images = [kreweras_complement(p) for p in ps]
    assert len(set(images)) == len(ps)
    for p, k in zip(ps, images):
        kk = kreweras_complement(k)
        # K^2 rotates every point back by one step
        rotated = NCPartition(n, tuple(tuple((x - 2) % n + 1 for x in b) for b in p.blocks))
        assert kk == rotated
        assert kk.block_sizes() == p.block_sizes()


def test_mobius_examples():
    p = P((1, 2), (3,))
    assert mobius_nc(p, p) == 1
    assert mobius_nc(zero_partition(2), one_partition(2)) == -1
    with pytest.raises(DomainError):
        mobius_nc(one_partition(3), zero_partition(3))


@pytest.mark.parametrize("n", range(2, 8))
def test_mobius_zero_one_closed_form(n):
    assert mobius_nc(zero_partition(n), one_partition(n)) == (-1) ** (n - 1) * catalan_rec(n - 1)


@pytest.mark.parametrize("n", range(1, 6))
def test_mobius_defining_identity(n):
    ps = enumerate_nc(n)
    for s, p in itertools.product(ps, repeat=2):
        if s != p and leq(s, p):
            assert sum(mobius_nc(s, r) for r in ps if leq(s, r) and leq(r, p)) == 0


@pytest.mark.parametrize("n", range(1, 9))
def test_mobius_table_product_formula(n):
    # mu(sigma, 1) = prod over blocks W of K(sigma) of (-1)^(|W|-1) Cat(|W|-1)
    for blocks, mu in zip(nc_block_lists(n), nc_mobius_table(n)):
        sigma = NCPartition(n, tuple(tuple(i + 1 for i in b) for b in blocks))
        expected = 1
        for w in kreweras_complement(sigma).blocks:
            expected *= (-1) ** (len(w) - 1) * catalan_rec(len(w) - 1)
        assert mu == expected
        if n <= 6:
            assert mu == mobius_nc(sigma, one_partition(n))


def test_enumerate_nc_pair():
    assert enumerate_nc_pair(2) == [P((1, 2))]
    assert set(enumerate_nc_pair(4)) == {P((1, 2), (3, 4)), P((1, 4), (2, 3))}
    assert len(enumerate_nc_pair(6)) == 5
    for k in range(1, 9):
        pairs = enumerate_nc_pair(2 * k)
        assert len(pairs) == catalan(k)
        assert all(is_noncrossing(q) and is_pair_partition(q) for q in pairs)
        assert set(pairs) == {q for q in enumerate_nc(2 * k) if is_pair_partition(q)} if k <= 5 else True
    for bad in (3, 0, 18):
        with pytest.raises((DomainError, SizeLimitError)):
            enumerate_nc_pair(bad)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, catalan(n) - 1))))
def test_rgs_roundtrip(arg):
    n, i = arg
    p = enumerate_nc(n)[i]
    assert SetPartition.from_rgs(p.rgs()) == p
