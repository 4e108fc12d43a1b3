import math

import pytest

from salvetti.partitions import (
    Partition,
    PartitionError,
    all_partitions,
    all_perms,
    compose_perms,
    enumerate_partitions,
    fubini,
    identity,
    inverse,
    is_shuffle,
    perm_sign,
    shuffles,
)


def stirling2(n, k):
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


def test_counts_against_surjection_formula():
    for k in range(1, 6):
        for r in range(k):
            m = k - r
            assert len(enumerate_partitions(k, r)) == math.factorial(m) * stirling2(k, m)
    assert len(enumerate_partitions(3, 1)) == 6
    assert len(all_partitions(3)) == 13 == fubini(3)
    assert len(all_partitions(4)) == 75 == fubini(4)


def test_order_preserving_representatives():
    reps = enumerate_partitions(3, 1, "order_preserving")
    assert sorted(str(p) for p in reps) == ["(1,2|3)", "(1|2,3)"]
    for k in range(1, 7):
        for r in range(k):
            assert len(enumerate_partitions(k, r, "order_preserving")) == math.comb(k - 1, r)


def test_rank_out_of_range():
    with pytest.raises(PartitionError):
        enumerate_partitions(3, 3)
    with pytest.raises(PartitionError):
        Partition((1, 3))


def test_parse_and_blocks():
    p = Partition.parse("(2|1,3)")
    assert p.values == (2, 1, 2)
    assert p.type == (1, 2)
    assert p.rank == 1
    assert str(p) == "(2|1,3)"


def test_subdivision_order():
    coarse = Partition.parse("(1,2,3)")
    mid = Partition.parse("(1|2,3)")
    fine = Partition.parse("(1|3|2)")
    assert coarse.leq(mid) and mid.leq(fine) and coarse.leq(fine)
    assert not mid.leq(Partition.parse("(2|1|3)"))
    assert not fine.leq(mid)


def test_orbits_meet_order_preserving_once():
    for k in range(2, 5):
        for r in range(k):
            reps = set(enumerate_partitions(k, r, "order_preserving"))
            for lam in enumerate_partitions(k, r):
                orbit = {lam.act(g) for g in all_perms(k)}
                assert len(orbit & reps) == 1


def test_action_is_left_action():
    lam = Partition.parse("(1|2,3|4)")
    for g in all_perms(4)[:10]:
        for h in all_perms(4)[::5]:
            assert lam.act(compose_perms(g, h)) == lam.act(h).act(g)


def test_chamber_of_permutation():
    g = (2, 3, 1)
    ch = Partition.chamber(g)
    assert ch == Partition((1, 2, 3)).act(g)
    assert ch.is_chamber()


def test_shuffles():
    s11 = shuffles((1, 1))
    assert s11 == [((1, 2), 1), ((2, 1), -1)]
    assert len(shuffles((1, 2))) == 3
    assert len(shuffles((2, 2, 1))) == math.factorial(5) // (2 * 2 * 1)
    for typ in [(1, 2), (2, 1), (2, 2), (1, 1, 2)]:
        for g, sgn in shuffles(typ):
            assert is_shuffle(g, typ)
            assert sgn == perm_sign(g)
        assert dict(shuffles(typ))[identity(sum(typ))] == 1
    with pytest.raises(PartitionError):
        shuffles((0, 2))


def test_permutation_helpers():
    g = (3, 1, 2)
    assert compose_perms(g, inverse(g)) == identity(3)
    assert perm_sign((2, 1, 3)) == -1
    assert perm_sign(g) == 1
