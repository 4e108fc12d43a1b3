"""The symmetric group acting on braid Salvetti complexes.

Conventions.  A permutation ``g`` acts on points by ``(g x)_{g(i)} = x_i``,
on partitions by ``g . lam = lam o g^{-1}`` and on braid sign vectors by
``(g phi)(i, j) = phi(g^{-1} i, g^{-1} j)``, with the sign flipped when
``g^{-1} i > g^{-1} j``.  The identity chamber ``x_1 < ... < x_k`` has
covector all minus, and the cell with chamber ``g . id`` is the image of an
identity-chamber cell under ``g``.  Those identity-chamber cells are the
orbit representatives.

A representative is oriented so that the product of incidence numbers along
its lexicographically smallest maximal flag is +1; every other cell carries
the orientation transported from its representative.  Tensor words carry the
right action ``[x_1|...|x_k] . rho = [x_rho(1)|...|x_rho(k)]``, optionally with
Koszul signs.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .arrangement import braid_arrangement, braid_pairs, covector_partition, covectors
from .complexes import (
    ChainComplex,
    Coefficients,
    Poset,
    RegularCWComplex,
    _rank_over,
    _upsets_from_sign_array,
    cw_from_poset,
    smith_diagonal,
    smith_homology,
)
from .matroid import HigherFaces, build_L_ell
from .partitions import (
    Partition,
    Perm,
    all_perms,
    compose_perms,
    enumerate_partitions,
    identity,
    inverse,
    shuffles,
)
from .signs import SignVector

MAX_K = 6


class BraidError(ValueError):
    pass


# -- the action on sign vectors ----------------------------------------------

@lru_cache(maxsize=None)
def _action_table(g: Perm) -> tuple[np.ndarray, np.ndarray]:
    """Source pair index and sign flip for every target pair of ``g . phi``."""
    k = len(g)
    pairs = braid_pairs(k)
    pos = {p: n for n, p in enumerate(pairs)}
    ginv = inverse(g)
    src = np.empty(len(pairs), dtype=np.int64)
    flip = np.empty(len(pairs), dtype=np.int8)
    for n, (i, j) in enumerate(pairs):
        a, b = ginv[i - 1], ginv[j - 1]
        if a < b:
            src[n], flip[n] = pos[(a, b)], 1
        else:
            src[n], flip[n] = pos[(b, a)], -1
    return src, flip


def act_array(g: Perm, arr: np.ndarray) -> np.ndarray:
    """Apply ``g`` to every row of an array of braid sign vectors."""
    src, flip = _action_table(tuple(g))
    return arr[..., src] * flip


def act_vector(g: Perm, vec: SignVector) -> SignVector:
    out = act_array(g, np.asarray(vec.values, dtype=np.int64))
    return SignVector(tuple(int(x) for x in out), vec.max_level)


def chamber_of(vec_row: np.ndarray, k: int) -> Partition:
    """Chamber partition of an element of L^(l): its level-1 projection."""
    return covector_partition(SignVector(tuple(int(x) for x in np.sign(vec_row)), 1), k)


def chamber_element(vec_row: np.ndarray, k: int) -> Perm:
    """The g with chamber(vec) = g . id."""
    return inverse(chamber_of(vec_row, k).values)


# -- cube symbols ---------------------------------------------------------------

def _as_chamber(sigma) -> Partition:
    if isinstance(sigma, Partition):
        return sigma
    if isinstance(sigma, str):
        return Partition.parse(sigma)
    return Partition(tuple(sigma))


def symbol_columns(lam: Partition, sigma) -> list[list[int]]:
    """Each block of ``lam`` listed bottom to top in the order of ``sigma``."""
    sigma = _as_chamber(sigma)
    if not sigma.is_chamber():
        raise BraidError(f"{sigma} is not a chamber")
    if not lam.leq(sigma):
        raise BraidError(f"{sigma} does not subdivide {lam}")
    return [sorted(block, key=lambda i: sigma.values[i - 1]) for block in lam.blocks]


def render_symbol(lam: Partition, sigma) -> str:
    """Stacked boxes, one column per block, bottoms aligned."""
    cols = symbol_columns(lam, sigma)
    width = max(len(str(i)) for c in cols for i in c)
    height = max(len(c) for c in cols)
    rendered = []
    for col in cols:
        lines = ["┌" + "─" * width + "┐"]
        for n, i in enumerate(reversed(col)):
            if n:
                lines.append("├" + "─" * width + "┤")
            lines.append("│" + str(i).rjust(width) + "│")
        lines.append("└" + "─" * width + "┘")
        pad = 2 * (height - len(col))
        rendered.append([" " * (width + 2)] * pad + lines)
    rows = zip(*rendered)
    return "\n".join(" ".join(r).rstrip() for r in rows)


def all_symbols(k: int) -> list[tuple[Partition, Partition]]:
    """Pairs (lam, sigma) with sigma a chamber subdividing lam."""
    chambers = enumerate_partitions(k, 0)
    out = []
    for r in range(k):
        for lam in enumerate_partitions(k, r):
            out.extend((lam, s) for s in chambers if lam.leq(s))
    return out


# -- the equivariant complex ----------------------------------------------------

def _flag_product(boundary: list[dict[int, int]], flag: Sequence[int]) -> int:
    out = 1
    for a, b in zip(flag, flag[1:]):
        out *= boundary[a][b]
    return out


@dataclass
class EquivariantComplex:
    """Free Z[Sigma_k]-chains of the braid Salvetti complex of order l.

    ``boundary[r]`` lists ``(coefficient, g, target)``: the boundary of the
    representative ``r`` is the sum of ``coefficient * g . target``.
    Representatives and targets are indices into ``hf``.
    """

    k: int
    ell: int
    hf: HigherFaces
    reps: list[int]
    boundary: dict[int, list[tuple[int, Perm, int]]]
    min_flags: dict[int, list[int]]

    @cached_property
    def key_index(self) -> dict[bytes, int]:
        arr = self.hf.array.astype(np.int8)
        return {arr[i].tobytes(): i for i in range(len(arr))}

    def act_index(self, g: Perm, i: int) -> int:
        row = act_array(g, self.hf.array[i].astype(np.int64)).astype(np.int8)
        return self.key_index[row.tobytes()]

    def dim(self, r: int) -> int:
        return self.hf.dims[r]

    def reps_of_dim(self, d: int) -> list[int]:
        return [r for r in self.reps if self.hf.dims[r] == d]

    def ranks(self) -> tuple[int, ...]:
        top = max(self.hf.dims[r] for r in self.reps)
        return tuple(len(self.reps_of_dim(d)) for d in range(top + 1))

    def partition_of(self, r: int) -> Partition:
        """For l = 1 the face partition of a representative."""
        return covector_partition(self.hf.chain_vectors(r)[1], self.k)

    def expand(self) -> dict[int, dict[int, int]]:
        """Boundary of every cell g . r in transported orientations."""
        out: dict[int, dict[int, int]] = {}
        for g in all_perms(self.k):
            for r in self.reps:
                src = self.act_index(g, r)
                col: dict[int, int] = {}
                for c, h, t in self.boundary[r]:
                    tgt = self.act_index(compose_perms(g, h), t)
                    col[tgt] = col.get(tgt, 0) + c
                out[src] = {a: b for a, b in col.items() if b}
        return out

    def orientation_signs(self, cw: RegularCWComplex) -> dict[int, int]:
        """Transported orientation of each cell relative to ``cw``'s."""
        out = {}
        for g in all_perms(self.k):
            for r in self.reps:
                flag = [self.act_index(g, c) for c in self.min_flags[r]]
                out[flag[0]] = _flag_product(cw.boundary, flag)
        return out

    def matches(self, cw: RegularCWComplex) -> bool:
        """Expansion equals the cellular boundary up to a diagonal +-1 change."""
        exp = self.expand()
        eps = self.orientation_signs(cw)
        if set(exp) != set(range(len(cw))):
            return False
        for c, col in exp.items():
            want = {t: eps[c] * eps[t] * s for t, s in col.items()}
            if want != cw.boundary[c]:
                return False
        return True

    def coinvariant_columns(self, word_basis, act_word) -> dict:
        """Boundary of [r] (x) w in C (x)_{Sigma_k} M, keyed by (r, w)."""
        cols = {}
        for r in self.reps:
            for w in word_basis:
                col: dict = {}
                for c, g, t in self.boundary[r]:
                    s, w2 = act_word(w, g)
                    if s:
                        col[(t, w2)] = col.get((t, w2), 0) + c * s
                cols[(r, w)] = {a: b for a, b in col.items() if b}
        return cols


def equivariant_complex(k: int, ell: int = 1, hf: HigherFaces | None = None) -> EquivariantComplex:
    """Representatives, their transported incidences and orientation flags.

    Only the closed cells of the representatives are built, as a regular CW
    subcomplex; incidences are then corrected by the flag signs that
    transport orientations from representatives to their translates.
    """
    if not 2 <= k <= MAX_K:
        raise BraidError(f"k={k} outside 2..{MAX_K}")
    if hf is None:
        hf = build_L_ell(covectors(braid_arrangement(k)), ell)
    arr = hf.array.astype(np.int64)
    reps = [i for i in range(len(arr)) if (arr[i] < 0).all()]
    if len(reps) * _factorial(k) != len(arr):
        raise BraidError("the group does not act freely on chambers")
    ups = _upsets_from_sign_array(arr, sources=reps)
    local = sorted(set(reps).union(*(set(u.tolist()) for u in ups.values())))
    lpos = {g: i for i, g in enumerate(local)}
    sub = Poset.from_sign_array(arr[local])
    cw = cw_from_poset(sub, [hf.dims[i] for i in local])
    eq = EquivariantComplex(k, ell, hf, reps, {}, {})

    def min_flag(c_local: int) -> list[int]:
        flag = [c_local]
        while cw.boundary[flag[-1]]:
            flag.append(min(cw.boundary[flag[-1]]))
        return [local[x] for x in flag]

    for r in reps:
        eq.min_flags[r] = min_flag(lpos[r])
    for r in reps:
        lr = lpos[r]
        delta_r = _flag_product(cw.boundary, [lpos[x] for x in eq.min_flags[r]])
        col = []
        for chi_l, a in sorted(cw.boundary[lr].items()):
            chi = local[chi_l]
            g = chamber_element(arr[chi], k)
            target = eq.act_index(inverse(g), chi)
            flag = [lpos[eq.act_index(g, x)] for x in eq.min_flags[target]]
            if flag[0] != chi_l:
                raise BraidError("transported flag does not start at the facet")
            delta_chi = _flag_product(cw.boundary, flag)
            col.append((delta_r * delta_chi * a, g, target))
        eq.boundary[r] = col
    return eq


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# -- graded coefficients and the shuffle differential --------------------------

@dataclass(frozen=True)
class GradedModule:
    """Generators of reduced homology of X, by degree, over a field."""

    degrees: tuple[int, ...]
    field: Coefficients = Coefficients("Q")

    def __post_init__(self):
        if any(d < 0 for d in self.degrees):
            raise BraidError("generator degrees must be >= 0")
        if not self.field.is_field:
            raise BraidError("pages need field coefficients")

    def shifted(self, normalization: str) -> tuple[int, ...]:
        if normalization == "unshifted":
            return self.degrees
        if normalization == "shifted":
            return tuple(d + 1 for d in self.degrees)
        raise BraidError(f"unknown normalization {normalization!r}")


def words(n_gens: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(n_gens), repeat=k))


def act_word(word: Sequence[int], rho: Perm, degrees: Sequence[int], koszul: bool = True) -> tuple[int, tuple[int, ...]]:
    """``word . rho`` with its Koszul sign (factor a moves to slot rho^{-1}(a))."""
    new = tuple(word[rho[i] - 1] for i in range(len(rho)))
    sgn = 1
    if koszul:
        rinv = inverse(rho)
        odd = [degrees[w] % 2 for w in word]
        for a in range(len(word)):
            if not odd[a]:
                continue
            for b in range(a + 1, len(word)):
                if odd[b] and rinv[a] > rinv[b]:
                    sgn = -sgn
    return sgn, new


def _block_bounds(lam: Partition) -> list[tuple[int, int]]:
    out, start = [], 0
    for size in lam.type:
        out.append((start, start + size))
        start += size
    return out


def d1_targets(lam: Partition) -> list[tuple[Partition, int, int, int]]:
    """Order-preserving refinements tau of lam splitting one block in two.

    Returns ``(tau, block, p, q)`` with the 1-based index of the split block.
    """
    if not lam.is_order_preserving():
        raise BraidError(f"{lam} is not order preserving")
    out = []
    t = lam.type
    for i, size in enumerate(t):
        for p in range(1, size):
            new_type = t[:i] + (p, size - p) + t[i + 1:]
            vals = tuple(n + 1 for n, s in enumerate(new_type) for _ in range(s))
            out.append((Partition(vals), i + 1, p, size - p))
    return out


def compatible_shuffles(lam: Partition, block: int, p: int, q: int) -> list[tuple[Perm, int]]:
    """(p, q)-shuffles of the positions of ``block``, identity elsewhere."""
    lo, hi = _block_bounds(lam)[block - 1]
    k = lam.k
    out = []
    for sh, sgn in shuffles((p, q)):
        g = list(range(1, k + 1))
        for n, v in enumerate(sh):
            g[lo + n] = lo + v
        out.append((tuple(g), sgn))
    return out


def d1_apply(lam: Partition, word: Sequence[int], degrees: Sequence[int], koszul: bool = True) -> dict[tuple[Partition, tuple[int, ...]], int]:
    """d^1([D(lam, id)] (x) word) as a dict over (tau, word) basis elements.

    The term for tau splitting the i-th block carries (-1)^(i-1) times the
    signed sum over the compatible shuffles.
    """
    word = tuple(word)
    if len(word) != lam.k:
        raise BraidError("word length must equal k")
    out: dict[tuple[Partition, tuple[int, ...]], int] = {}
    for tau, block, p, q in d1_targets(lam):
        block_sign = -1 if (block - 1) % 2 else 1
        for rho, sgn in compatible_shuffles(lam, block, p, q):
            ks, w2 = act_word(word, rho, degrees, koszul)
            key = (tau, w2)
            out[key] = out.get(key, 0) + block_sign * sgn * ks
    return {a: b for a, b in out.items() if b}


def d1_squared_zero(k: int, degrees: Sequence[int], koszul: bool = True) -> bool:
    """d1 o d1 = 0 on every basis element of the k-th block."""
    for s in range(1, k + 1):
        for lam in enumerate_partitions(k, k - s, "order_preserving"):
            for w in words(len(degrees), k):
                acc: dict = {}
                for (tau, w2), v in d1_apply(lam, w, degrees, koszul).items():
                    for key, v2 in d1_apply(tau, w2, degrees, koszul).items():
                        acc[key] = acc.get(key, 0) + v * v2
                if any(acc.values()):
                    return False
    return True


# -- pages ----------------------------------------------------------------------

@dataclass
class PageBlock:
    k: int
    normalization: str
    E1: dict[tuple[int, int], int]
    E2: dict[tuple[int, int], int]
    d_squared_zero: bool = True

    def e1_by_s(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (s, _), d in self.E1.items():
            out[s] = out.get(s, 0) + d
        return out

    def e2_by_s(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (s, _), d in self.E2.items():
            out[s] = out.get(s, 0) + d
        return out

    def euler(self, which: str = "E1") -> dict[int, int]:
        """Alternating sum over s for each internal degree t."""
        table = self.E1 if which == "E1" else self.E2
        out: dict[int, int] = {}
        for (s, t), d in table.items():
            out[t] = out.get(t, 0) + (-1) ** s * d
        return out

    def to_json(self) -> dict:
        def rows(table):
            return [{"s": s, "t": t, "dim": d} for (s, t), d in sorted(table.items(), key=lambda x: (-x[0][0], x[0][1]))]
        return {"k": self.k, "normalization": self.normalization, "E1": rows(self.E1), "E2": rows(self.E2)}


def _degree(word: Sequence[int], degrees: Sequence[int]) -> int:
    return sum(degrees[w] for w in word)


def _pages_from_columns(k, normalization, basis: dict[int, list], columns: dict, degrees, coeff: Coefficients) -> PageBlock:
    """Assemble E1/E2 from a basis per s and sparse columns mapping s -> s+1."""
    E1: dict[tuple[int, int], int] = {}
    index: dict[int, dict] = {}
    for s, elems in basis.items():
        index[s] = {e: n for n, e in enumerate(elems)}
        for e in elems:
            t = _degree(e[1], degrees)
            E1[(s, t)] = E1.get((s, t), 0) + 1
    ranks: dict[tuple[int, int], int] = {}
    ok = True
    for s, elems in basis.items():
        by_t: dict[int, list] = {}
        for e in elems:
            by_t.setdefault(_degree(e[1], degrees), []).append(e)
        for t, es in by_t.items():
            cols = []
            for e in es:
                col = {}
                for tgt, v in columns[e].items():
                    if tgt not in index.get(s + 1, {}):
                        raise BraidError(f"differential leaves the page at {tgt}")
                    col[index[s + 1][tgt]] = v
                cols.append(col)
            ranks[(s, t)] = _rank_over(smith_diagonal(cols), coeff)
            # d o d = 0 on these columns
            inv = {n: e2 for e2, n in index.get(s + 1, {}).items()}
            for col in cols:
                acc: dict = {}
                for n, v in col.items():
                    for tgt2, v2 in columns[inv[n]].items():
                        acc[tgt2] = acc.get(tgt2, 0) + v * v2
                vals = acc.values()
                if coeff.kind == "Fp":
                    ok &= all(x % coeff.p == 0 for x in vals)
                else:
                    ok &= all(x == 0 for x in vals)
    if not ok:
        raise BraidError("d1 o d1 != 0")
    E2 = {}
    for (s, t), dim in E1.items():
        E2[(s, t)] = dim - ranks.get((s, t), 0) - ranks.get((s - 1, t), 0)
    return PageBlock(k, normalization, E1, E2, ok)


def page_block_formula(k: int, coefficients: GradedModule, normalization: str = "unshifted", koszul: bool = True) -> PageBlock:
    """E1/E2 of block k from the shuffle differential (order-two loops)."""
    degrees = coefficients.shifted(normalization)
    n = len(degrees)
    if k == 1:
        return _single_point_block(degrees, normalization)
    basis: dict[int, list] = {}
    columns: dict = {}
    for s in range(1, k + 1):
        basis[s] = [(lam, w) for lam in enumerate_partitions(k, k - s, "order_preserving") for w in words(n, k)]
        for lam, w in basis[s]:
            columns[(lam, w)] = d1_apply(lam, w, degrees, koszul)
    return _pages_from_columns(k, normalization, basis, columns, degrees, coefficients.field)


def page_block_geometric(k: int, coefficients: GradedModule, ell: int, normalization: str = "unshifted", koszul: bool = True) -> PageBlock:
    """E1/E2 of block k from coinvariants of the order-(l - 1) Salvetti complex.

    A representative cell of dimension p sits in filtration s = k - p.
    """
    if ell < 1:
        raise BraidError("loop order must be >= 1")
    degrees = coefficients.shifted(normalization)
    if k == 1:
        return _single_point_block(degrees, normalization)
    n = len(degrees)
    wb = words(n, k)
    if ell == 1:
        basis = {k: [("pt", w) for w in wb]}
        return _pages_from_columns(k, normalization, basis, {("pt", w): {} for w in wb}, degrees, coefficients.field)
    eq = equivariant_complex(k, ell - 1)
    cols = eq.coinvariant_columns(wb, lambda w, g: act_word(w, g, degrees, koszul))
    basis: dict[int, list] = {}
    for r in eq.reps:
        basis.setdefault(k - eq.dim(r), []).extend((r, w) for w in wb)
    for s in list(basis):
        basis.setdefault(s + 1, [])
    return _pages_from_columns(k, normalization, basis, cols, degrees, coefficients.field)


def _single_point_block(degrees, normalization) -> PageBlock:
    E1: dict[tuple[int, int], int] = {}
    for d in degrees:
        E1[(1, d)] = E1.get((1, d), 0) + 1
    return PageBlock(1, normalization, E1, dict(E1))


def _block_job(args):
    k, coefficients, ell, normalization, koszul = args
    if ell == 2:
        return page_block_formula(k, coefficients, normalization, koszul)
    return page_block_geometric(k, coefficients, ell, normalization, koszul)


def build_pages(coefficients: GradedModule, k_max: int, ell: int = 2, normalization: str = "unshifted",
                koszul: bool = True, workers: int = 1) -> list[PageBlock]:
    """One E1/E2 block per k = 1..k_max; blocks are independent."""
    if not 1 <= k_max <= MAX_K:
        raise BraidError(f"k_max={k_max} outside 1..{MAX_K}")
    if ell != 2 and ell > 1 and k_max > 5:
        raise BraidError("geometric pages are limited to k <= 5")
    jobs = [(k, coefficients, ell, normalization, koszul) for k in range(1, k_max + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_block_job, jobs))
    return [_block_job(j) for j in jobs]


def pages_json(blocks: Sequence[PageBlock]) -> list[dict]:
    return [b.to_json() for b in blocks]


# -- quotient oracle -------------------------------------------------------------

def quotient_homology(k: int, ell: int = 1, coefficients: str | Coefficients = "Q") -> tuple[int, ...]:
    """Betti numbers of the order complex of L^(l)(A_{k-1}) modulo Sigma_k.

    Simplices are chains whose bottom element is an identity-chamber cell;
    dropping the bottom vertex is followed by translating the chain back.
    """
    coeff = Coefficients.parse(coefficients) if isinstance(coefficients, str) else coefficients
    if k < 2:
        raise BraidError("k >= 2 required")
    hf = build_L_ell(covectors(braid_arrangement(k)), ell)
    arr = hf.array.astype(np.int64)
    poset = Poset.from_sign_array(arr)
    keys = {arr[i].astype(np.int8).tobytes(): i for i in range(len(arr))}
    perms = all_perms(k)
    table = {}
    for g in perms:
        moved = act_array(g, arr).astype(np.int8)
        table[g] = np.array([keys[row.tobytes()] for row in moved], dtype=np.int64)
        if g != identity(k) and (table[g] == np.arange(len(arr))).any():
            raise BraidError("fixed simplex: the action is not free")
    to_rep = {}
    for i in range(len(arr)):
        g = chamber_element(arr[i], k)
        to_rep[i] = inverse(g)
    reps = [i for i in range(len(arr)) if (arr[i] < 0).all()]
    layers: list[list[tuple[int, ...]]] = []
    stack = [(r,) for r in reps]
    while stack:
        c = stack.pop()
        while len(layers) < len(c):
            layers.append([])
        layers[len(c) - 1].append(c)
        for j in poset.up[c[-1]]:
            stack.append(c + (int(j),))
    layers = [sorted(x) for x in layers]
    index = [{c: n for n, c in enumerate(layer)} for layer in layers]
    bds: list[list[dict[int, int]]] = [[{} for _ in layers[0]]]
    for d in range(1, len(layers)):
        cols = []
        for c in layers[d]:
            col: dict[int, int] = {}
            for i in range(len(c)):
                face = c[:i] + c[i + 1:]
                if i == 0:
                    h = to_rep[face[0]]
                    face = tuple(int(table[h][x]) for x in face)
                n = index[d - 1][face]
                col[n] = col.get(n, 0) + (-1) ** i
            cols.append({a: b for a, b in col.items() if b})
        bds.append(cols)
    cc = ChainComplex([len(x) for x in layers], bds, coeff)
    b = [g.betti for g in smith_homology(cc)]
    while b and b[-1] == 0:
        b.pop()
    return tuple(b)
