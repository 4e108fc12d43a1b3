from fractions import Fraction

from hypothesis import given, settings, strategies as st

from salvetti import linalg


def test_rref_and_rank():
    m, piv = linalg.rref([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert piv == [0, 1]
    assert linalg.rank([[1, 2], [2, 4]]) == 1
    assert linalg.rank([]) == 0


def test_nullspace_of_braid_normals():
    # columns are the normals of the braid arrangement in R^3
    cols = linalg.transpose([[1, -1, 0], [1, 0, -1], [0, 1, -1]])
    null = linalg.nullspace(cols, 3)
    assert len(null) == 1
    v = null[0]
    assert [x / v[0] for x in v] == [1, -1, 1]


def test_nullspace_without_rows():
    assert linalg.nullspace([], 2) == [[1, 0], [0, 1]]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_nullspace_vectors_are_killed(nr, nc, data):
    rows = [[data.draw(st.integers(-3, 3)) for _ in range(nc)] for _ in range(nr)]
    null = linalg.nullspace(rows, nc)
    assert len(null) == nc - linalg.rank(rows)
    for v in null:
        assert all(linalg.dot(r, v) == 0 for r in rows)
    assert all(isinstance(x, Fraction) for v in null for x in v)
