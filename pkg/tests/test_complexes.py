import json

import numpy as np
import pytest

from salvetti.arrangement import braid_arrangement, covectors
from salvetti.complexes import (
    ChainComplex,
    Coefficients,
    ComplexError,
    Poset,
    RegularCWComplex,
    SimplicialComplex,
    betti_csv,
    betti_numbers,
    chain_complex,
    cw_from_poset,
    dumps,
    invariant_factors,
    order_complex,
    salvetti_cw,
    skeletal_filtration,
    smith_diagonal,
    smith_homology,
)
from salvetti.matroid import FaceOrder, build_L_ell, tensor_by_chains
from salvetti.signs import compose


def L(k, ell):
    return build_L_ell(covectors(braid_arrangement(k)), ell)


def sphere_betti(d):
    """Betti numbers of S^d with trailing zeros trimmed."""
    if d == 0:
        return (2,)
    return (1,) + (0,) * (d - 1) + (1,)


def test_poset_from_relation_and_covers():
    p = Poset.from_relation(3, [(0, 1), (1, 2)])
    assert p.lt(0, 2) and p.leq(1, 1) and not p.lt(2, 0)
    assert p.covers(0) == [1]
    with pytest.raises(ComplexError):
        Poset.from_relation(2, [(0, 1), (1, 0)])
    with pytest.raises(ComplexError):
        Poset.from_relation(1, [(0, 0)])


def test_order_complex_of_a_chain_is_a_simplex():
    s = order_complex(Poset.from_relation(3, [(0, 1), (1, 2)]))
    assert s.f_vector() == (3, 3, 1)
    assert s.check_closed()
    assert betti_numbers(s) == (1,)


def test_square_boundary():
    hf = L(2, 1)
    s = order_complex(hf.poset())
    assert s.f_vector() == (4, 4)
    m = chain_complex(s).matrix(1)
    assert m.shape == (4, 4)
    assert np.linalg.matrix_rank(m) == 3
    assert betti_numbers(s) == (1, 1)


def test_sphere_of_a1_tensor_r2():
    order = FaceOrder.build(covectors(braid_arrangement(2)))
    t = tensor_by_chains(order, 2)
    keep = np.array([not v.is_zero() for v in t.vectors])
    s = order_complex(Poset.from_sign_array(t.array[keep]))
    assert s.f_vector() == (4, 4)
    assert betti_numbers(s) == (1, 1)


def test_simplicial_closure():
    s = SimplicialComplex.from_simplices([(0, 1, 2)])
    assert s.f_vector() == (3, 3, 1)
    bad = SimplicialComplex([[(0,), (1,)], [(0, 1), (1, 2)]])
    assert not bad.check_closed()


def test_empty_complex():
    cc = chain_complex(SimplicialComplex([]))
    assert cc.ranks == []
    assert smith_homology(cc) == []


def test_smith_torsion_example():
    cc = ChainComplex([1, 1], [[{}], [{0: 2}]])
    z = smith_homology(cc)
    assert [(g.betti, g.torsion) for g in z] == [(0, (2,)), (0, ())]
    assert [g.betti for g in smith_homology(cc, "Q")] == [0, 0]
    assert [g.betti for g in smith_homology(cc, "Fp:2")] == [1, 1]
    assert [g.betti for g in smith_homology(cc, "F3")] == [0, 0]


def test_smith_diagonal_against_known_forms():
    cols = [{0: 2, 1: 4}, {0: 6, 1: 8}]
    assert invariant_factors(smith_diagonal(cols)) == [2, 4]
    assert invariant_factors(smith_diagonal([{0: 0}])) == []
    assert invariant_factors(smith_diagonal([{0: 1, 1: 1}, {0: 1, 1: -1}])) == [1, 2]


def test_real_projective_plane_torsion():
    # minimal 6-vertex triangulation of RP^2
    tri = [(0, 1, 3), (1, 3, 4), (1, 2, 4), (2, 4, 0), (2, 0, 3),
           (0, 4, 5), (3, 4, 5), (2, 3, 5), (1, 2, 5), (0, 1, 5)]
    s = SimplicialComplex.from_simplices([tuple(sorted(t)) for t in tri])
    groups = smith_homology(chain_complex(s))
    assert [g.betti for g in groups] == [1, 0, 0]
    assert groups[1].torsion == (2,)
    assert [g.betti for g in smith_homology(chain_complex(s, "Fp:2"))] == [1, 1, 1]


def test_coefficient_parsing():
    assert Coefficients.parse("Z").kind == "Z"
    assert str(Coefficients.parse("Fp:5")) == "Fp:5"
    assert Coefficients.parse("F7").p == 7
    for bad in ("Fp:4", "R", "Fp:x"):
        with pytest.raises(ComplexError):
            Coefficients.parse(bad)


def test_sal_a1_cells():
    cw = salvetti_cw(L(2, 1))
    assert cw.f_vector() == (2, 2)
    assert betti_numbers(cw) == (1, 1)
    for c in cw.cells_of_dim(1):
        assert sorted(cw.boundary[c].values()) == [-1, 1]


@pytest.mark.parametrize("k,ell,f", [
    (3, 1, (6, 12, 6)),
    (3, 2, (6, 12, 18, 12, 6)),
    (4, 1, (24, 72, 72, 24)),
])
def test_f_vectors(k, ell, f):
    assert salvetti_cw(L(k, ell)).f_vector() == f


@pytest.mark.parametrize("k,ell", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (4, 2), (5, 1)])
def test_boundary_squares_to_zero(k, ell):
    cw = salvetti_cw(L(k, ell))
    assert cw.check_boundary_squared()
    assert chain_complex(cw).check_squared()


@pytest.mark.parametrize("k,ell", [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2)])
def test_cellular_equals_simplicial(k, ell):
    hf = L(k, ell)
    assert betti_numbers(salvetti_cw(hf)) == betti_numbers(order_complex(hf.poset()))


@pytest.mark.parametrize("k,ell", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_closed_cells_are_balls_with_sphere_boundaries(k, ell):
    hf = L(k, ell)
    p = hf.poset()
    for i in range(len(hf)):
        up = p.up[i].tolist()
        assert betti_numbers(order_complex(p.subposet(up + [i]))) == (1,)
        d = hf.dims[i]
        if d == 0:
            assert up == []
        else:
            assert betti_numbers(order_complex(p.subposet(up))) == sphere_betti(d - 1)


def test_euler_characteristics():
    for k in range(2, 6):
        assert salvetti_cw(L(k, 1)).euler_characteristic() == 0
    assert salvetti_cw(L(3, 2)).euler_characteristic() == 6


@pytest.mark.parametrize("k", [2, 3, 4])
def test_up_set_rule_matches_classical_cells(k):
    hf = L(k, 1)
    cw = salvetti_cw(hf)
    vecs = hf.order.covectors.vectors
    for i in range(len(hf)):
        c, f = hf.chain_vectors(i)
        expected = {(compose(g, c), g) for g in vecs if _leq(f, g)}
        got = {cw.chains[j] for j in cw.closure([i])}
        assert got == expected


def _leq(a, b):
    return all(x == 0 or x == y for x, y in zip(a.values, b.values))


def test_cw_rejects_bad_grading():
    p = Poset.from_relation(2, [(0, 1)])
    with pytest.raises(ComplexError):
        cw_from_poset(p, [0, 1])


def test_skeletal_filtration_counts():
    stages = skeletal_filtration(salvetti_cw(L(2, 1)), 2)
    assert [(s.s, len(s.cells)) for s in stages] == [(2, 2), (1, 4)]
    stages = skeletal_filtration(salvetti_cw(L(3, 1)), 3)
    assert [(s.s, len(s.cells)) for s in stages] == [(3, 6), (2, 18), (1, 24)]
    with pytest.raises(ComplexError):
        skeletal_filtration(salvetti_cw(L(3, 2)), 3)


def test_exports():
    cw = salvetti_cw(L(2, 1))
    data = json.loads(dumps(cw.to_json()))
    assert {c["dim"] for c in data["cells"]} == {0, 1}
    assert all(set(c) >= {"id", "dim", "chain", "boundary"} for c in data["cells"])
    csv_text = betti_csv(smith_homology(chain_complex(cw)))
    assert csv_text.splitlines() == ["degree,betti,torsion", "0,1,", "1,1,"]


def test_regular_cw_helpers():
    cw = RegularCWComplex([0, 0, 1], [{}, {}, {0: -1, 1: 1}])
    assert cw.f_vector() == (2, 1)
    assert cw.euler_characteristic() == 1
    assert cw.closure([2]) == {0, 1, 2}
