"""Central hyperplane arrangements over Q.

Everything is exact: normals and points are tuples of ``Fraction``.  Sign
data is computed in the ambient space; the lineality space never changes a
sign, so no essentialization is performed.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

from . import linalg
from .matroid import CircuitSet, CovectorSet, faces_from_circuits, MAX_FACES_FROM_CIRCUITS, sort_key
from .partitions import Partition, all_partitions
from .signs import SignError, SignVector, compose_values

Point = tuple[Fraction, ...]


class ArrangementError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ArrangementError(f"not a rational number: {x!r}") from exc
    if isinstance(x, float):
        raise ArrangementError(f"floating point entry {x!r}; give rationals as strings 'p/q'")
    return Fraction(x)


@dataclass(frozen=True)
class Arrangement:
    dim: int
    normals: tuple[Point, ...]
    labels: tuple[str, ...] = ()
    braid_k: int | None = None

    def __post_init__(self):
        normals = tuple(tuple(_frac(x) for x in v) for v in self.normals)
        for i, v in enumerate(normals):
            if len(v) != self.dim:
                raise ArrangementError(f"normal {i} has length {len(v)}, expected {self.dim}")
            if not any(v):
                raise ArrangementError(f"normal {i} is zero")
        labels = tuple(self.labels) or tuple(str(i + 1) for i in range(len(normals)))
        if len(labels) != len(normals):
            raise ArrangementError("one label per hyperplane is required")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.normals)

    @cached_property
    def rank(self) -> int:
        return linalg.rank(self.normals)

    @cached_property
    def duplicates(self) -> list[tuple[int, int]]:
        """Pairs of hyperplanes with parallel normals."""
        out = []
        for i, j in itertools.combinations(range(self.n), 2):
            if linalg.rank([self.normals[i], self.normals[j]]) == 1:
                out.append((i, j))
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "normals": [[str(x) for x in v] for v in self.normals],
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Arrangement":
        if not isinstance(data, dict):
            raise ArrangementError("arrangement JSON must be an object")
        for key in ("dim", "normals"):
            if key not in data:
                raise ArrangementError(f"missing field {key!r}")
        if not isinstance(data["dim"], int) or data["dim"] < 1:
            raise ArrangementError("field 'dim' must be a positive integer")
        if not isinstance(data["normals"], list) or not data["normals"]:
            raise ArrangementError("field 'normals' must be a nonempty list")
        for i, v in enumerate(data["normals"]):
            if not isinstance(v, list):
                raise ArrangementError(f"normals[{i}] must be a list")
        return cls(data["dim"], tuple(tuple(v) for v in data["normals"]), tuple(data.get("labels", ())))

    @classmethod
    def loads(cls, text: str) -> "Arrangement":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ArrangementError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        return cls.from_json(data)


@dataclass(frozen=True)
class FaceRecord:
    covector: SignVector
    representative: Point
    codim: int


def sign_of_point(a: Arrangement, x: Sequence) -> SignVector:
    if len(x) != a.dim:
        raise ArrangementError(f"point of dimension {len(x)} in an arrangement of dimension {a.dim}")
    x = [Fraction(c) for c in x]
    vals = []
    for v in a.normals:
        s = linalg.dot(v, x)
        vals.append((s > 0) - (s < 0))
    return SignVector(tuple(vals), 1)


def _row_space_basis(rows) -> list[list[Fraction]]:
    m, piv = linalg.rref(rows)
    return m[: len(piv)]


def _cocircuit_points(a: Arrangement) -> dict[SignVector, Point]:
    """One direction vector for every cocircuit, keyed by its sign vector."""
    basis = _row_space_basis(a.normals)
    r = len(basis)
    gram = [[linalg.dot(v, b) for b in basis] for v in a.normals]
    out: dict[SignVector, Point] = {}
    for subset in itertools.combinations(range(a.n), r - 1):
        rows = [gram[i] for i in subset]
        if rows and linalg.rank(rows) != r - 1:
            continue
        null = linalg.nullspace(rows, r)
        if len(null) != 1:
            continue
        alpha = null[0]
        x = tuple(sum((alpha[j] * basis[j][c] for j in range(r)), Fraction(0)) for c in range(a.dim))
        for pt in (x, tuple(-c for c in x)):
            sv = sign_of_point(a, pt)
            out.setdefault(sv, pt)
    return out


def cocircuits(a: Arrangement) -> list[SignVector]:
    """Minimal nonzero covectors: sign vectors of the rays of the arrangement."""
    if a.rank < 1:
        raise ArrangementError("arrangement of rank 0")
    return sorted(_cocircuit_points(a), key=lambda v: sort_key(v.values))


def _closure_with_points(a: Arrangement) -> dict[SignVector, Point]:
    rays = _cocircuit_points(a)
    ray_vecs = list(rays)
    zero = SignVector.zero(a.n)
    points: dict[SignVector, Point] = {zero: tuple(Fraction(0) for _ in range(a.dim))}
    frontier = [zero]
    while frontier:
        new = []
        for f in frontier:
            for c in ray_vecs:
                g = SignVector(compose_values(f.values, c.values), 1)
                if g in points:
                    continue
                points[g] = _nudge(a, points[f], rays[c], g)
                new.append(g)
        frontier = new
    return points


def _nudge(a: Arrangement, base: Point, direction: Point, target: SignVector) -> Point:
    """base + eps * direction with eps halved until the signs are ``target``."""
    scale = max((abs(c) for c in base), default=Fraction(0))
    eps = Fraction(1, 1) / (1 + scale) if scale else Fraction(1)
    for _ in range(200):
        pt = tuple(b + eps * d for b, d in zip(base, direction))
        if sign_of_point(a, pt) == target:
            return pt
        eps /= 2
    raise ArrangementError(f"could not place a point in face {target}")


def covectors(a: Arrangement, verify: bool = False) -> CovectorSet:
    """Covectors as the closure of the cocircuits and zero under composition.

    With ``verify`` the result is compared with the circuit-side construction
    (only possible for at most 12 hyperplanes).
    """
    out = CovectorSet(a.n, 1, tuple(_closure_with_points(a)))
    if verify:
        if a.n > MAX_FACES_FROM_CIRCUITS:
            raise ArrangementError("dual check needs at most 12 hyperplanes")
        other = faces_from_circuits(circuits(a))
        if other.vectors != out.vectors:
            raise ArrangementError("covector closure disagrees with faces from circuits")
    return out


def _codim(a: Arrangement, cov: SignVector) -> int:
    zeros = [a.normals[i] for i, v in enumerate(cov.values) if v == 0]
    return linalg.rank(zeros) if zeros else 0


def face_records(a: Arrangement) -> list[FaceRecord]:
    """Every face with a representative point and its codimension.

    Braid arrangements use the partition representatives; otherwise points
    come from the cocircuit closure.
    """
    if a.braid_k is not None:
        recs = []
        for lam, cov in partition_dictionary(a.braid_k).items():
            recs.append(FaceRecord(cov, braid_representative(lam), lam.rank))
        return sorted(recs, key=lambda r: sort_key(r.covector.values))
    pts = _closure_with_points(a)
    recs = [FaceRecord(v, p, _codim(a, v)) for v, p in pts.items()]
    return sorted(recs, key=lambda r: sort_key(r.covector.values))


def circuits(a: Arrangement) -> CircuitSet:
    """Sign patterns of minimal linear dependencies among the normals."""
    if a.n > 14:
        raise ArrangementError("circuit enumeration limited to 14 hyperplanes")
    r = a.rank
    found: set[SignVector] = set()
    for size in range(2, r + 2):
        for subset in itertools.combinations(range(a.n), size):
            cols = linalg.transpose([a.normals[i] for i in subset])
            null = linalg.nullspace(cols, size)
            if len(null) != 1 or any(c == 0 for c in null[0]):
                continue
            vals = [0] * a.n
            for i, c in zip(subset, null[0]):
                vals[i] = 1 if c > 0 else -1
            x = SignVector(tuple(vals), 1)
            found.add(x)
            found.add(-x)
    return CircuitSet(a.n, tuple(found))


def localization(a: Arrangement, f: SignVector | FaceRecord) -> Arrangement:
    """The hyperplanes containing the face ``f``."""
    cov = f.covector if isinstance(f, FaceRecord) else f
    if len(cov) != a.n:
        raise ArrangementError("face has the wrong ground size")
    if cov not in covectors(a):
        raise ArrangementError(f"{cov} is not a face of the arrangement")
    keep = [i for i, v in enumerate(cov.values) if v == 0]
    if not keep:
        return Arrangement(a.dim, (), ())
    return Arrangement(a.dim, tuple(a.normals[i] for i in keep), tuple(a.labels[i] for i in keep))


# -- braid arrangements -------------------------------------------------------

def braid_pairs(k: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(1, k + 1), 2))


def braid_arrangement(k: int) -> Arrangement:
    """Hyperplanes x_i = x_j in R^k with normals e_i - e_j, i < j."""
    if k < 2:
        raise ArrangementError("braid arrangement needs k >= 2")
    normals = []
    labels = []
    for i, j in braid_pairs(k):
        v = [0] * k
        v[i - 1], v[j - 1] = 1, -1
        normals.append(tuple(v))
        labels.append(f"{i}{j}" if k < 10 else f"{i},{j}")
    return Arrangement(k, tuple(normals), tuple(labels), braid_k=k)


def partition_covector(lam: Partition) -> SignVector:
    vals = []
    for i, j in braid_pairs(lam.k):
        a, b = lam.values[i - 1], lam.values[j - 1]
        vals.append(-1 if a < b else (1 if a > b else 0))
    return SignVector(tuple(vals), 1)


def covector_partition(cov: SignVector, k: int) -> Partition:
    """Inverse of :func:`partition_covector`: rank i by the number of blocks below it."""
    pairs = braid_pairs(k)
    if len(cov) != len(pairs):
        raise SignError("covector length does not match the braid arrangement")
    less = {p: v for p, v in zip(pairs, cov.values)}

    def rel(i, j):  # sign of lam(i) - lam(j)
        if i == j:
            return 0
        return less[(i, j)] if i < j else -less[(j, i)]

    # lam(i) = 1 + number of distinct blocks strictly below i
    below = [{j for j in range(1, k + 1) if rel(j, i) < 0} for i in range(1, k + 1)]
    levels = sorted({frozenset(b) for b in below}, key=len)
    vals = tuple(levels.index(frozenset(b)) + 1 for b in below)
    lam = Partition(vals)
    if partition_covector(lam) != cov:
        raise SignError(f"{cov} is not the covector of an ordered partition")
    return lam


def partition_dictionary(k: int) -> dict[Partition, SignVector]:
    """Ordered partitions of {1..k} and their covectors in the braid arrangement."""
    if k < 2:
        raise ArrangementError("braid arrangement needs k >= 2")
    return {lam: partition_covector(lam) for lam in all_partitions(k)}


def braid_representative_raw(lam: Partition) -> Point:
    return tuple(Fraction(v) for v in lam.values)


def braid_representative(lam: Partition) -> Point:
    """(lam(1), ..., lam(k)) projected onto the sum-zero hyperplane."""
    raw = braid_representative_raw(lam)
    mean = sum(raw, Fraction(0)) / len(raw)
    return tuple(x - mean for x in raw)


# -- embedding ----------------------------------------------------------------

def embed_vertex(chain: Sequence[SignVector], representative: Callable[[SignVector], Point] | dict) -> tuple[Point, ...]:
    """Coordinates of a vertex with chain (C, F_1, ..., F_l) in V (x) R^(l+1).

    Component 0 is w(F_l); component i is w(F_(l-i)) - w(F_l) with F_0 = C.
    """
    rep = representative.__getitem__ if isinstance(representative, dict) else representative
    try:
        pts = [rep(f) for f in chain]
    except KeyError as exc:
        raise ArrangementError(f"missing representative for face {exc.args[0]}") from exc
    ell = len(chain) - 1
    base = pts[ell]
    comps = [base]
    for i in range(1, ell + 1):
        comps.append(tuple(x - y for x, y in zip(pts[ell - i], base)))
    return tuple(comps)


def avoids_all_hyperplanes(a: Arrangement, components: Sequence[Point]) -> bool:
    """True iff no hyperplane contains every component of the vertex."""
    for v in a.normals:
        if all(linalg.dot(v, c) == 0 for c in components):
            return False
    return True


def representative_map(a: Arrangement) -> dict[SignVector, Point]:
    return {r.covector: r.representative for r in face_records(a)}
