import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from salvetti.arrangement import (
    Arrangement,
    ArrangementError,
    avoids_all_hyperplanes,
    braid_arrangement,
    braid_representative,
    braid_representative_raw,
    circuits,
    cocircuits,
    covector_partition,
    covectors,
    embed_vertex,
    face_records,
    localization,
    partition_covector,
    partition_dictionary,
    representative_map,
    sign_of_point,
)
from salvetti.matroid import FaceOrder, build_L_ell, leq_matrix
from salvetti.partitions import Partition, all_partitions, fubini
from salvetti.signs import SignVector

F = Fraction
h = F(1, 2)


def sv(text):
    return SignVector.parse(text, 1)


def graphic_circuits(k):
    """Signed circuits of K_k from its directed cycles (independent oracle)."""
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    pos = {p: n for n, p in enumerate(pairs)}
    out = set()
    for size in range(3, k + 1):
        for verts in itertools.combinations(range(1, k + 1), size):
            first = verts[0]
            for rest in itertools.permutations(verts[1:]):
                cycle = (first,) + rest + (first,)
                vals = [0] * len(pairs)
                for a, b in zip(cycle, cycle[1:]):
                    # traversing a -> b contributes e_a - e_b
                    vals[pos[(min(a, b), max(a, b))]] = 1 if a < b else -1
                out.add(SignVector(tuple(vals), 1))
    return out


def test_sign_of_point_examples():
    a1 = braid_arrangement(2)
    assert sign_of_point(a1, (-h, h)) == sv("-1")
    assert sign_of_point(a1, (0, 0)) == sv("0")
    a2 = braid_arrangement(3)
    assert sign_of_point(a2, (-1, 0, 1)) == sv("-1 -1 -1")
    with pytest.raises(ArrangementError):
        sign_of_point(a2, (0, 0))


def test_cocircuits():
    assert set(cocircuits(braid_arrangement(2))) == {sv("+1"), sv("-1")}
    assert len(cocircuits(braid_arrangement(3))) == 6
    # rays of the A_3 fan: ordered partitions of {1..4} into two blocks
    cc = cocircuits(braid_arrangement(4))
    assert len(cc) == 14 == sum(1 for p in all_partitions(4) if p.n_blocks == 2)
    assert set(cc) == {v for v in covectors(braid_arrangement(4)) if not v.is_zero()
                       and all(not (w.support() < v.support()) or w.is_zero() for w in covectors(braid_arrangement(4)))}


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_braid_covectors_are_partitions(k):
    l = covectors(braid_arrangement(k))
    assert len(l) == fubini(k)
    d = partition_dictionary(k)
    assert set(d.values()) == set(l.vectors)
    assert sum(1 for v in l if v.is_tope()) == len([p for p in d if p.is_chamber()])
    for lam, cov in d.items():
        assert covector_partition(cov, k) == lam


@pytest.mark.parametrize("k", [3, 4, 5])
def test_partition_order_isomorphism(k):
    d = list(partition_dictionary(k).items())
    leq = leq_matrix(np.array([c.values for _, c in d], dtype="int8"))
    for (i, (mu, _)), (j, (lam, _)) in itertools.product(enumerate(d), repeat=2):
        assert bool(leq[i, j]) == mu.leq(lam)


def test_generic_covectors_counts():
    assert len(covectors(Arrangement(1, ((1,),)))) == 3
    assert len(covectors(braid_arrangement(3))) == 13
    assert len(covectors(braid_arrangement(4))) == 75


def test_circuits():
    assert set(circuits(braid_arrangement(3)).circuits) == {sv("+1 -1 +1"), sv("-1 +1 -1")}
    assert len(circuits(Arrangement(2, ((1, 0),)))) == 0
    for k in (3, 4, 5):
        assert set(circuits(braid_arrangement(k)).circuits) == graphic_circuits(k)
    assert len(circuits(braid_arrangement(4))) == 14


def test_representatives_lie_in_their_faces():
    for a in [braid_arrangement(3), braid_arrangement(4), Arrangement(3, ((1, 2, 0), (0, 1, -1), (1, 0, 1), (2, 1, 3)))]:
        for rec in face_records(a):
            assert sign_of_point(a, rec.representative) == rec.covector


def test_localization():
    a = braid_arrangement(3)
    assert localization(a, sv("0 0 0")).normals == a.normals
    assert localization(a, sv("-1 -1 -1")).n == 0
    loc = localization(a, sv("0 -1 -1"))
    assert loc.labels == ("12",) and loc.normals == ((1, -1, 0),)
    with pytest.raises(ArrangementError):
        localization(a, sv("+1 -1 +1"))


def test_braid_arrangement_normals():
    assert braid_arrangement(2).normals == ((1, -1),)
    assert braid_arrangement(3).normals == ((1, -1, 0), (1, 0, -1), (0, 1, -1))
    a4 = braid_arrangement(4)
    assert a4.n == 6 and a4.dim == 4
    with pytest.raises(ArrangementError):
        braid_arrangement(1)


def test_partition_dictionary_examples():
    whole, split = Partition.parse("(1,2)"), Partition.parse("(1|2)")
    d = partition_dictionary(2)
    assert d[whole] == sv("0") and d[split] == sv("-1")
    assert braid_representative_raw(whole) == (1, 1)
    assert braid_representative(whole) == (0, 0)
    assert braid_representative(split) == (-h, h)
    lam = Partition.parse("(1|2,3)")
    assert partition_covector(lam) == sv("-1 -1 0")
    assert braid_representative_raw(lam) == (1, 2, 2)


def test_embedding_examples():
    a = braid_arrangement(2)
    reps = representative_map(a)
    center, c12, c21 = sv("0"), sv("-1"), sv("+1")
    assert embed_vertex((c12, center), reps) == ((0, 0), (-h, h))
    assert embed_vertex((c21, c21), reps) == ((h, -h), (0, 0))
    a2 = braid_arrangement(3)
    hf = build_L_ell(covectors(a2), 1)
    reps2 = representative_map(a2)
    assert len(hf) == 24
    assert all(avoids_all_hyperplanes(a2, embed_vertex(hf.chain_vectors(i), reps2)) for i in range(24))
    with pytest.raises(ArrangementError):
        embed_vertex((c12, center), {})


def test_avoidance_detects_a_hyperplane():
    a = braid_arrangement(3)
    assert not avoids_all_hyperplanes(a, [(0, 0, 0), (1, 1, 0)])
    assert avoids_all_hyperplanes(a, [(0, 0, 0), (1, 2, 3)])


def test_json_roundtrip_and_validation():
    a = Arrangement(2, ((F(1, 3), 1), (0, 1)), ("a", "b"))
    assert Arrangement.loads(json.dumps(a.to_json())) == a
    assert Arrangement.loads('{"dim": 2, "normals": [["1/3", "1"]]}').normals == ((F(1, 3), F(1)),)
    with pytest.raises(ArrangementError, match="zero"):
        Arrangement.loads('{"dim": 2, "normals": [["0", "0"]]}')
    with pytest.raises(ArrangementError, match="line 1"):
        Arrangement.loads('{"dim": 2, "normals": [')
    with pytest.raises(ArrangementError):
        Arrangement.loads('{"dim": 2, "normals": [[0.5, 1]]}')
    with pytest.raises(ArrangementError):
        Arrangement.loads('{"normals": [[1, 1]]}')
    with pytest.raises(ArrangementError):
        Arrangement(2, ((1, 2, 3),))


def test_duplicates_reported():
    a = Arrangement(2, ((1, 0), (2, 0), (0, 1)))
    assert a.duplicates == [(0, 1)]
    assert a.rank == 2


@st.composite
def arrangements(draw):
    dim = draw(st.integers(1, 3))
    n = draw(st.integers(1, 7))
    vecs = draw(st.lists(st.tuples(*[st.integers(-3, 3)] * dim).filter(any), min_size=n, max_size=n))
    return Arrangement(dim, tuple(vecs))


@settings(max_examples=30, deadline=None)
@given(arrangements())
def test_faces_consistent_on_random_arrangements(a):
    l = covectors(a, verify=True)
    recs = face_records(a)
    assert {r.covector for r in recs} == set(l.vectors)
    for r in recs:
        assert sign_of_point(a, r.representative) == r.covector
    order = FaceOrder.build(l)
    assert order.rank == a.rank
