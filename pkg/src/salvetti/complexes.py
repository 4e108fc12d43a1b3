"""Posets, order complexes, regular CW complexes and their homology.

Boundary matrices are kept sparse, one dict per cell mapping boundary cell
ids to integer coefficients.  Homology over Z comes from a Smith normal form
computed by sparse elimination on unit pivots followed by a dense pass on the
remainder; ranks over Q and F_p are read off from the same diagonal.
"""

from __future__ import annotations

import csv
import io
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

import numpy as np


class ComplexError(ValueError):
    pass


# -- posets -------------------------------------------------------------------

def _upsets_from_sign_array(arr: np.ndarray, sources: Iterable[int] | None = None, chunk: int = 64) -> dict[int, np.ndarray]:
    """Strict up-sets under the componentwise S_l order, for the given rows."""
    arr = np.asarray(arr, dtype=np.int8)
    absa = np.abs(arr)
    src = list(range(len(arr))) if sources is None else list(sources)
    out: dict[int, np.ndarray] = {}
    for start in range(0, len(src), chunk):
        rows = src[start:start + chunk]
        a = arr[rows][:, None, :]
        ge = ((arr[None, :, :] == a) | (absa[None, :, :] > np.abs(a))).all(axis=2)
        for r, i in enumerate(rows):
            ge[r, i] = False
            out[i] = np.nonzero(ge[r])[0]
    return out


class Poset:
    """A finite poset on ``0..size-1`` held through strict up-sets."""

    def __init__(self, size: int, up: dict[int, np.ndarray] | Sequence[np.ndarray], labels: Sequence | None = None):
        self.size = size
        if isinstance(up, dict):
            self.up = [np.asarray(up.get(i, ()), dtype=np.int64) for i in range(size)]
        else:
            self.up = [np.asarray(u, dtype=np.int64) for u in up]
        self.labels = list(labels) if labels is not None else list(range(size))
        for i, u in enumerate(self.up):
            if i in set(u.tolist()):
                raise ComplexError(f"element {i} lies strictly above itself: cyclic relation")

    @classmethod
    def from_sign_array(cls, arr: np.ndarray, labels: Sequence | None = None) -> "Poset":
        return cls(len(arr), _upsets_from_sign_array(arr), labels)

    @classmethod
    def from_relation(cls, size: int, pairs: Iterable[tuple[int, int]], labels: Sequence | None = None) -> "Poset":
        """Poset generated by relations ``a < b``; rejects cycles."""
        succ = [set() for _ in range(size)]
        for a, b in pairs:
            if a == b:
                raise ComplexError("relation a < a")
            succ[a].add(b)
        up = []
        for i in range(size):
            seen: set[int] = set()
            stack = list(succ[i])
            while stack:
                x = stack.pop()
                if x in seen:
                    continue
                if x == i:
                    raise ComplexError("cyclic relation")
                seen.add(x)
                stack.extend(succ[x])
            up.append(np.array(sorted(seen), dtype=np.int64))
        return cls(size, up, labels)

    @cached_property
    def up_sets(self) -> list[frozenset[int]]:
        return [frozenset(u.tolist()) for u in self.up]

    def lt(self, a: int, b: int) -> bool:
        return b in self.up_sets[a]

    def leq(self, a: int, b: int) -> bool:
        return a == b or self.lt(a, b)

    def covers(self, i: int) -> list[int]:
        """Elements directly above ``i``."""
        u = self.up[i]
        if len(u) == 0:
            return []
        mask = np.zeros(self.size, dtype=bool)
        for w in u:
            mask[self.up[w]] = True
        return sorted(int(x) for x in u[~mask[u]])

    def subposet(self, keep: Sequence[int]) -> "Poset":
        keep = sorted(keep)
        pos = {x: i for i, x in enumerate(keep)}
        up = [np.array([pos[y] for y in self.up[x].tolist() if y in pos], dtype=np.int64) for x in keep]
        return Poset(len(keep), up, [self.labels[x] for x in keep])

    def chains(self) -> list[tuple[int, ...]]:
        """All nonempty chains, each listed bottom to top."""
        out = []
        stack = [(i,) for i in range(self.size)]
        while stack:
            c = stack.pop()
            out.append(c)
            for j in self.up[c[-1]]:
                stack.append(c + (int(j),))
        return out


# -- simplicial complexes -----------------------------------------------------

@dataclass
class SimplicialComplex:
    """Simplices are tuples of vertex ids in a fixed vertex order."""

    simplices: list[list[tuple[int, ...]]]

    @classmethod
    def from_simplices(cls, simplices: Iterable[Sequence[int]], close: bool = True) -> "SimplicialComplex":
        found: set[tuple[int, ...]] = set()
        for s in simplices:
            s = tuple(s)
            if close:
                n = len(s)
                for mask in range(1, 1 << n):
                    found.add(tuple(s[i] for i in range(n) if mask >> i & 1))
            else:
                found.add(s)
        by_dim: list[list[tuple[int, ...]]] = []
        for s in found:
            while len(by_dim) < len(s):
                by_dim.append([])
            by_dim[len(s) - 1].append(s)
        return cls([sorted(x) for x in by_dim])

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    def check_closed(self) -> bool:
        have = {s for layer in self.simplices for s in layer}
        return all(s[:i] + s[i + 1:] in have for layer in self.simplices[1:] for s in layer for i in range(len(s)))


def order_complex(p: Poset) -> SimplicialComplex:
    """Simplices are the chains of ``p`` (vertices listed in poset order)."""
    chains = p.chains()
    by_dim: list[list[tuple[int, ...]]] = []
    for c in chains:
        while len(by_dim) < len(c):
            by_dim.append([])
        by_dim[len(c) - 1].append(c)
    return SimplicialComplex([sorted(x) for x in by_dim])


# -- regular CW complexes -----------------------------------------------------

@dataclass
class RegularCWComplex:
    """Cells with dimensions and signed boundaries.

    ``boundary[i]`` maps each facet id of cell i to its incidence number.
    ``chains`` optionally records the face chain (chamber first) of a cell.
    """

    dims: list[int]
    boundary: list[dict[int, int]]
    labels: list = field(default_factory=list)
    chains: list = field(default_factory=list)

    def __len__(self):
        return len(self.dims)

    @property
    def dim(self) -> int:
        return max(self.dims, default=-1)

    def f_vector(self) -> tuple[int, ...]:
        out = [0] * (self.dim + 1)
        for d in self.dims:
            out[d] += 1
        return tuple(out)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self.dims)

    def cells_of_dim(self, d: int) -> list[int]:
        return [i for i, x in enumerate(self.dims) if x == d]

    def check_boundary_squared(self) -> bool:
        for i, bd in enumerate(self.boundary):
            acc: dict[int, int] = {}
            for t, s in bd.items():
                for r, s2 in self.boundary[t].items():
                    acc[r] = acc.get(r, 0) + s * s2
            if any(acc.values()):
                return False
        return True

    def closure(self, cells: Iterable[int]) -> set[int]:
        out: set[int] = set()
        stack = list(cells)
        while stack:
            c = stack.pop()
            if c in out:
                continue
            out.add(c)
            stack.extend(self.boundary[c])
        return out

    def to_json(self) -> dict:
        cells = []
        for i in range(len(self)):
            entry = {"id": i, "dim": self.dims[i]}
            if self.chains:
                entry["chain"] = [str(v) for v in self.chains[i]]
            if self.labels:
                entry["label"] = str(self.labels[i])
            entry["boundary"] = [[t, s] for t, s in sorted(self.boundary[i].items())]
            cells.append(entry)
        return {"cells": cells}


def _cell_structure(p: Poset, dims: Sequence[int]) -> list[list[int]]:
    """Facets of every cell under the up-set rule, with the grading checks.

    Every element of the strict up-set must have smaller dimension, and each
    element of codimension >= 2 must lie above some facet; together these say
    that the longest chain in the up-set has length ``dims[i]``.
    """
    facets = []
    for i in range(p.size):
        u = p.up[i]
        d = dims[i]
        ud = np.asarray([dims[x] for x in u], dtype=np.int64)
        if len(u) and ud.max() >= d:
            raise ComplexError(f"cell {i} of dimension {d} has a boundary cell of dimension {int(ud.max())}")
        top = u[ud == d - 1]
        deep = u[ud < d - 1]
        if len(deep):
            mask = np.zeros(p.size, dtype=bool)
            for w in top:
                mask[p.up[w]] = True
            if not mask[deep].all():
                raise ComplexError(f"cell {i}: dimension does not match the longest chain in its up-set")
        if d > 0 and len(top) == 0:
            raise ComplexError(f"cell {i} of dimension {d} has no facets")
        facets.append(sorted(int(x) for x in top))
    return facets


def _diamond_signs(i: int, d: int, facets: list[int], boundary: list[dict[int, int]]) -> dict[int, int]:
    if d == 1:
        if len(facets) != 2:
            raise ComplexError(f"1-cell {i} has {len(facets)} vertices")
        return {facets[0]: -1, facets[1]: 1}
    # ridges: codim-2 faces and the two facets containing each
    through: dict[int, list[int]] = {}
    for t in facets:
        for r in boundary[t]:
            through.setdefault(r, []).append(t)
    for r, ts in through.items():
        if len(ts) != 2:
            raise ComplexError(f"cell {i}: ridge {r} lies in {len(ts)} facets")
    adj: dict[int, list[tuple[int, int]]] = {t: [] for t in facets}
    for r, (t1, t2) in through.items():
        adj[t1].append((t2, r))
        adj[t2].append((t1, r))
    signs = {facets[0]: 1}
    queue = deque([facets[0]])
    while queue:
        t = queue.popleft()
        for t2, r in adj[t]:
            want = -signs[t] * boundary[t][r] * boundary[t2][r]
            if t2 in signs:
                if signs[t2] != want:
                    raise ComplexError(f"cell {i}: inconsistent diamond signs")
            else:
                signs[t2] = want
                queue.append(t2)
    if len(signs) != len(facets):
        raise ComplexError(f"cell {i}: facet graph is disconnected")
    return signs


def cw_from_poset(p: Poset, dims: Sequence[int], labels=None, chains=None) -> RegularCWComplex:
    """Regular CW complex whose face relation is the reversed order of ``p``.

    The boundary of a cell is its up-set; incidence numbers are found by
    propagating through codimension-2 diamonds and then checked globally.
    """
    facets = _cell_structure(p, dims)
    order = sorted(range(p.size), key=lambda i: dims[i])
    boundary: list[dict[int, int]] = [dict() for _ in range(p.size)]
    for i in order:
        if dims[i] == 0:
            continue
        boundary[i] = _diamond_signs(i, dims[i], facets[i], boundary)
    cw = RegularCWComplex(list(dims), boundary, list(labels or []), list(chains or []))
    if not cw.check_boundary_squared():
        raise ComplexError("boundary does not square to zero")
    return cw


def salvetti_cw(hf) -> RegularCWComplex:
    """The higher Salvetti complex on L^(l): one cell per element, dimension
    the sum of the codimensions of its chain, boundary its up-set."""
    p = hf.poset()
    chains = [hf.chain_vectors(i) for i in range(len(hf))]
    return cw_from_poset(p, hf.dims, labels=list(hf.elements), chains=chains)


# -- chain complexes and homology --------------------------------------------

@dataclass
class Coefficients:
    kind: str  # "Z", "Q" or "Fp"
    p: int = 0

    @classmethod
    def parse(cls, text: str) -> "Coefficients":
        t = text.strip()
        if t in ("Z", "Q"):
            return cls(t)
        if t.startswith("Fp:") or t.startswith("F"):
            body = t[3:] if t.startswith("Fp:") else t[1:]
            try:
                p = int(body)
            except ValueError as exc:
                raise ComplexError(f"bad coefficient spec {text!r}") from exc
            if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
                raise ComplexError(f"{p} is not prime")
            return cls("Fp", p)
        raise ComplexError(f"bad coefficient spec {text!r}; use Z, Q or Fp:p")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    def __str__(self):
        return f"Fp:{self.p}" if self.kind == "Fp" else self.kind


@dataclass
class ChainComplex:
    """``ranks[d]`` generators in degree d; ``boundaries[d]`` is a list with one
    sparse column per generator of degree d, mapping into degree d - 1."""

    ranks: list[int]
    boundaries: list[list[dict[int, int]]]
    coefficients: Coefficients = field(default_factory=lambda: Coefficients("Z"))

    def matrix(self, d: int) -> np.ndarray:
        """Dense matrix of the boundary out of degree d (rows: degree d - 1)."""
        rows = self.ranks[d - 1] if d >= 1 else 0
        cols = self.ranks[d] if d < len(self.ranks) else 0
        m = np.zeros((rows, cols), dtype=np.int64)
        if 1 <= d < len(self.boundaries):
            for j, col in enumerate(self.boundaries[d]):
                for i, v in col.items():
                    m[i, j] = v
        if self.coefficients.kind == "Fp":
            m %= self.coefficients.p
        return m

    def check_squared(self) -> bool:
        for d in range(2, len(self.ranks)):
            for col in self.boundaries[d]:
                acc: dict[int, int] = {}
                for r, v in col.items():
                    for r2, v2 in self.boundaries[d - 1][r].items():
                        acc[r2] = acc.get(r2, 0) + v * v2
                if self.coefficients.kind == "Fp":
                    if any(x % self.coefficients.p for x in acc.values()):
                        return False
                elif any(acc.values()):
                    return False
        return True


def chain_complex(c, coefficients: Coefficients | str = "Z") -> ChainComplex:
    """Cellular chains of a CW complex or simplicial chains of a simplicial one."""
    coeff = Coefficients.parse(coefficients) if isinstance(coefficients, str) else coefficients
    if isinstance(c, SimplicialComplex):
        index = [{s: i for i, s in enumerate(layer)} for layer in c.simplices]
        ranks = [len(layer) for layer in c.simplices]
        bds: list[list[dict[int, int]]] = [[{} for _ in c.simplices[0]]] if c.simplices else []
        for d in range(1, len(c.simplices)):
            cols = []
            for s in c.simplices[d]:
                col = {}
                for i in range(len(s)):
                    col[index[d - 1][s[:i] + s[i + 1:]]] = (-1) ** i
                cols.append(col)
            bds.append(cols)
        return ChainComplex(ranks, bds, coeff)
    if isinstance(c, RegularCWComplex):
        top = c.dim
        pos = {}
        ranks = [0] * (top + 1)
        for i, d in enumerate(c.dims):
            pos[i] = ranks[d]
            ranks[d] += 1
        bds = [[None] * r for r in ranks]
        for i, d in enumerate(c.dims):
            bds[d][pos[i]] = {pos[t]: s for t, s in c.boundary[i].items()}
        return ChainComplex(ranks, bds, coeff)
    raise ComplexError(f"cannot build chains for {type(c).__name__}")


def smith_diagonal(columns: Sequence[dict[int, int]]) -> list[int]:
    """Nonzero diagonal of a Smith form (up to normalisation) of a sparse
    integer matrix given column by column.

    Unit pivots are eliminated sparsely: clearing the pivot column by row
    operations and then dropping the pivot row and column is an equivalence
    over Z.  What remains is factored densely.
    """
    rows: dict[int, dict[int, int]] = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            if v:
                rows.setdefault(i, {})[j] = v
    colrows: dict[int, set[int]] = {}
    for i, r in rows.items():
        for j in r:
            colrows.setdefault(j, set()).add(i)
    diag: list[int] = []
    changed = True
    while changed:
        changed = False
        for i in sorted(rows, key=lambda x: len(rows[x])):
            r = rows.get(i)
            if r is None:
                continue
            units = [j for j, v in r.items() if v in (1, -1)]
            if not units:
                continue
            j = min(units, key=lambda c: len(colrows[c]))
            pv = r[j]
            for i2 in list(colrows[j]):
                if i2 == i:
                    continue
                r2 = rows[i2]
                f = r2[j] * pv  # pv = +-1, so r2 -= f * r clears column j
                for c, v in r.items():
                    nv = r2.get(c, 0) - f * v
                    if nv:
                        if c not in r2:
                            colrows[c].add(i2)
                        r2[c] = nv
                    elif c in r2:
                        del r2[c]
                        colrows[c].discard(i2)
                if not r2:
                    del rows[i2]
            for c in r:
                colrows[c].discard(i)
            del rows[i]
            diag.append(1)
            changed = True
    if rows:
        cols = sorted({c for r in rows.values() for c in r})
        cpos = {c: k for k, c in enumerate(cols)}
        dense = []
        for r in rows.values():
            row = [0] * len(cols)
            for c, v in r.items():
                row[cpos[c]] = v
            dense.append(row)
        diag.extend(_dense_smith(dense))
    return diag


def _dense_smith(m: list[list[int]]) -> list[int]:
    m = [row[:] for row in m]
    out = []
    while m and m[0]:
        entries = [(abs(v), i, j) for i, row in enumerate(m) for j, v in enumerate(row) if v]
        if not entries:
            break
        _, pi, pj = min(entries)
        while True:
            p = m[pi][pj]
            done = True
            for i in range(len(m)):
                if i != pi and m[i][pj]:
                    q = m[i][pj] // p
                    m[i] = [a - q * b for a, b in zip(m[i], m[pi])]
                    if m[i][pj]:
                        done = False
            for j in range(len(m[0])):
                if j != pj and m[pi][j]:
                    q = m[pi][j] // p
                    for row in m:
                        row[j] -= q * row[pj]
                    if m[pi][j]:
                        done = False
            if done:
                break
            entries = [(abs(m[i][pj]), i, pj) for i in range(len(m)) if m[i][pj]]
            entries += [(abs(m[pi][j]), pi, j) for j in range(len(m[0])) if m[pi][j]]
            _, pi, pj = min(entries)
        out.append(abs(m[pi][pj]))
        m = [[v for j, v in enumerate(row) if j != pj] for i, row in enumerate(m) if i != pi]
    return out


def invariant_factors(diag: Iterable[int]) -> list[int]:
    """Normalise a diagonal so that each entry divides the next."""
    d = sorted(abs(x) for x in diag if x)
    changed = True
    while changed:
        changed = False
        for a in range(len(d)):
            for b in range(a + 1, len(d)):
                if d[b] % d[a]:
                    g = gcd(d[a], d[b])
                    d[a], d[b] = g, d[a] * d[b] // g
                    changed = True
        d.sort()
    return d


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    betti: int
    torsion: tuple[int, ...] = ()


def _rank_over(diag: list[int], coeff: Coefficients) -> int:
    if coeff.kind == "Fp":
        return sum(1 for x in diag if x % coeff.p)
    return len(diag)


def smith_homology(cc: ChainComplex, coefficients: Coefficients | str | None = None) -> list[HomologyGroup]:
    """Betti numbers and torsion per degree.

    Over Z the torsion is read off from invariant factors above 1; over a
    field the Betti numbers are dimensions and there is no torsion.
    """
    coeff = cc.coefficients if coefficients is None else (
        Coefficients.parse(coefficients) if isinstance(coefficients, str) else coefficients)
    if not cc.check_squared():
        raise ComplexError("boundary does not square to zero")
    top = len(cc.ranks)
    diags = [[] for _ in range(top + 1)]
    for d in range(1, top):
        diags[d] = smith_diagonal(cc.boundaries[d])
    out = []
    for d in range(top):
        rk_out = _rank_over(diags[d], coeff) if d >= 1 else 0
        rk_in = _rank_over(diags[d + 1], coeff) if d + 1 < top else 0
        betti = cc.ranks[d] - rk_out - rk_in
        torsion: tuple[int, ...] = ()
        if coeff.kind == "Z" and d + 1 < top:
            torsion = tuple(x for x in invariant_factors(diags[d + 1]) if x > 1)
        out.append(HomologyGroup(d, betti, torsion))
    return out


def betti_numbers(c, coefficients: str = "Z") -> tuple[int, ...]:
    """Betti numbers with trailing zeros removed."""
    groups = smith_homology(chain_complex(c, coefficients))
    b = [g.betti for g in groups]
    while b and b[-1] == 0:
        b.pop()
    return tuple(b)


def betti_csv(groups: Sequence[HomologyGroup]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "betti", "torsion"])
    for g in groups:
        w.writerow([g.degree, g.betti, " ".join(str(t) for t in g.torsion)])
    return buf.getvalue()


# -- skeletal filtration ------------------------------------------------------

@dataclass
class FiltrationStage:
    s: int
    cells: frozenset[int]


def skeletal_filtration(c: RegularCWComplex, k: int) -> list[FiltrationStage]:
    """F_{-s}: cells whose face partition has at least s blocks, s = k..1.

    Each stage is checked to be a subcomplex equal to the (k - s)-skeleton.
    """
    from .arrangement import covector_partition

    if not c.chains or any(len(ch) != 2 for ch in c.chains):
        raise ComplexError("skeletal filtration needs a first-order braid Salvetti complex")
    n_pairs = k * (k - 1) // 2
    if len(c.chains[0][0]) != n_pairs:
        raise ComplexError(f"complex does not come from the braid arrangement with k={k}")
    blocks = [covector_partition(ch[1], k).n_blocks for ch in c.chains]
    out = []
    for s in range(k, 0, -1):
        cells = frozenset(i for i, b in enumerate(blocks) if b >= s)
        skeleton = frozenset(i for i, d in enumerate(c.dims) if d <= k - s)
        if cells != skeleton:
            raise ComplexError(f"F_-{s} differs from the {k - s}-skeleton")
        if c.closure(cells) != set(cells):
            raise ComplexError(f"F_-{s} is not a subcomplex")
        out.append(FiltrationStage(s, cells))
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False)
