"""Oriented matroids given by circuits or covectors, and their tensored
higher-order versions.

Large sets of sign vectors are held as ``int8`` arrays so that the
exhaustive axiom checks can be vectorised; the public types still hand out
:class:`SignVector` objects.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .signs import (
    SignError,
    SignVector,
    compose_values,
    project_level,
    sign,
    vector_leq,
)

MAX_FACES_FROM_CIRCUITS = 12


class AxiomError(ValueError):
    """Raised when an input that must satisfy an axiom system does not."""


def sort_key(values: Sequence[int]) -> tuple:
    """Lexicographic order on (level, sign) tuples."""
    return tuple((abs(v), sign(v)) for v in values)


def _sorted_vectors(vectors: Iterable[SignVector]) -> tuple[SignVector, ...]:
    return tuple(sorted(set(vectors), key=lambda v: sort_key(v.values)))


@dataclass(frozen=True)
class CircuitSet:
    n: int
    circuits: tuple[SignVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "circuits", _sorted_vectors(self.circuits))
        for c in self.circuits:
            if len(c) != self.n:
                raise SignError(f"circuit {c} has wrong ground size (expected {self.n})")

    def __len__(self):
        return len(self.circuits)

    def __iter__(self):
        return iter(self.circuits)

    def to_json(self) -> dict:
        return {"n": self.n, "max_level": 1, "vectors": [c.tokens() for c in self.circuits]}

    @classmethod
    def from_json(cls, data: dict) -> "CircuitSet":
        return cls(data["n"], tuple(SignVector.parse(v, 1) for v in data["vectors"]))


@dataclass(frozen=True)
class CovectorSet:
    n: int
    max_level: int
    vectors: tuple[SignVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "vectors", _sorted_vectors(self.vectors))
        for v in self.vectors:
            if len(v) != self.n or v.max_level != self.max_level:
                raise SignError(f"vector {v} does not match n={self.n}, max_level={self.max_level}")

    @classmethod
    def from_array(cls, arr: np.ndarray, max_level: int) -> "CovectorSet":
        n = arr.shape[1] if arr.ndim == 2 else 0
        return cls(n, max_level, tuple(SignVector(tuple(int(x) for x in row), max_level) for row in arr))

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __contains__(self, v: SignVector):
        return v in self._index

    @cached_property
    def _index(self) -> dict[SignVector, int]:
        return {v: i for i, v in enumerate(self.vectors)}

    def index(self, v: SignVector) -> int:
        return self._index[v]

    @cached_property
    def array(self) -> np.ndarray:
        if not self.vectors:
            return np.zeros((0, self.n), dtype=np.int8)
        return np.array([v.values for v in self.vectors], dtype=np.int8).reshape(len(self.vectors), self.n)

    def topes(self) -> list[SignVector]:
        return [v for v in self.vectors if v.is_tope()]

    def to_json(self) -> dict:
        return {"n": self.n, "max_level": self.max_level, "vectors": [v.tokens() for v in self.vectors]}

    @classmethod
    def from_json(cls, data: dict) -> "CovectorSet":
        lev = data["max_level"]
        return cls(data["n"], lev, tuple(SignVector.parse(v, lev) for v in data["vectors"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass
class AxiomReport:
    violations: list[tuple[str, tuple[SignVector, ...]]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, axiom: str, *witness: SignVector):
        self.violations.append((axiom, tuple(witness)))

    def axioms_violated(self) -> set[str]:
        return {a for a, _ in self.violations}

    def __bool__(self):
        return self.passed

    def summary(self) -> str:
        if self.passed:
            return "passed"
        lines = [f"{len(self.violations)} violation(s)"]
        for axiom, wit in self.violations[:10]:
            lines.append(f"  [{axiom}] " + " ; ".join(str(w) for w in wit))
        return "\n".join(lines)


# -- circuit axioms ----------------------------------------------------------

def check_circuit_axioms(c: CircuitSet) -> AxiomReport:
    """Circuit axioms: nonempty, closed under negation, incomparable, weak elimination."""
    rep = AxiomReport()
    circuits = list(c.circuits)
    cset = set(circuits)
    for x in circuits:
        if x.is_zero():
            rep.add("C0-nonempty", x)
        if -x not in cset:
            rep.add("C1-negation", x)
    supports = [x.support() for x in circuits]
    for i, x1 in enumerate(circuits):
        for j, x2 in enumerate(circuits):
            if i == j:
                continue
            # X1 subset of X2 u X2*  <=>  supp X1 within supp X2
            if supports[i] <= supports[j] and x1 != x2 and x1 != -x2:
                rep.add("C2-incomparable", x1, x2)
    for i, x1 in enumerate(circuits):
        for j, x2 in enumerate(circuits):
            if x1 == -x2:
                continue
            for a in range(c.n):
                if x1[a] == 0 or x1[a] != -x2[a]:
                    continue
                if not any(_inside_union(y, x1, x2, a) for y in circuits):
                    rep.add("C3-elimination", x1, x2)
    return rep


def _inside_union(y: SignVector, x1: SignVector, x2: SignVector, a: int) -> bool:
    for b, yb in enumerate(y.values):
        if yb == 0:
            continue
        if b == a or (yb != x1[b] and yb != x2[b]):
            return False
    return True


# -- covector and symmetric l-matroid axioms ---------------------------------

class _Lookup:
    """Membership and masked-key lookups over an int8 array of sign vectors."""

    def __init__(self, arr: np.ndarray, max_level: int):
        self.arr = arr.astype(np.int64)
        self.n = arr.shape[1]
        self.offset = max_level
        self.base = 2 * max_level + 2
        self.sentinel = 2 * max_level + 1
        if self.base ** max(self.n, 1) >= 2 ** 62:
            raise AxiomError("ground set too large for packed keys")
        self.weights = self.base ** np.arange(self.n, dtype=np.int64)
        self.full = np.sort(self.encode(self.arr))
        self._masked: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def encode(self, arr: np.ndarray, mask_bool: np.ndarray | None = None) -> np.ndarray:
        codes = arr.astype(np.int64) + self.offset
        if mask_bool is not None:
            codes = np.where(mask_bool, self.sentinel, codes)
        return codes @ self.weights

    def contains(self, arr: np.ndarray) -> np.ndarray:
        keys = self.encode(arr)
        pos = np.searchsorted(self.full, keys)
        pos = np.minimum(pos, len(self.full) - 1)
        return self.full[pos] == keys

    def masked(self, mask: int) -> tuple[np.ndarray, np.ndarray]:
        """Sorted keys of vectors with positions in ``mask`` hidden, and the
        minimum level observed at every position for each key."""
        if mask not in self._masked:
            mb = np.array([(mask >> a) & 1 for a in range(self.n)], dtype=bool)
            keys = self.encode(self.arr, np.broadcast_to(mb, self.arr.shape))
            uniq, inv = np.unique(keys, return_inverse=True)
            minlev = np.full((len(uniq), self.n), 127, dtype=np.int64)
            np.minimum.at(minlev, inv.ravel(), np.abs(self.arr))
            self._masked[mask] = (uniq, minlev)
        return self._masked[mask]


def _vec(row, max_level) -> SignVector:
    return SignVector(tuple(int(x) for x in row), max_level)


def _check_closure_axioms(l: CovectorSet, with_level_perms: bool, limit: int = 20) -> AxiomReport:
    rep = AxiomReport()
    lev = l.max_level
    arr = l.array.astype(np.int64)
    n = l.n
    if len(arr) == 0:
        rep.add("L0-zero")
        return rep
    look = _Lookup(arr, lev)
    if not look.contains(np.zeros((1, n), dtype=np.int64))[0]:
        rep.add("L0-zero")
    neg_ok = look.contains(-arr)
    for row in arr[~neg_ok][:limit]:
        rep.add("L1-negation", _vec(row, lev))
    if with_level_perms:
        for perm in itertools.permutations(range(1, lev + 1)):
            table = np.array([0] + list(perm), dtype=np.int64)
            moved = np.sign(arr) * table[np.abs(arr)]
            bad = ~look.contains(moved)
            for row in arr[bad][:limit]:
                rep.add("L2-level-permutation", _vec(row, lev))
    abs_arr = np.abs(arr)
    bits = 1 << np.arange(n, dtype=np.int64)
    n_comp = n_elim = 0
    for i in range(len(arr)):
        f1 = arr[i]
        comp = np.where(abs_arr > np.abs(f1), arr, f1)
        inside = look.contains(comp)
        if not inside.all() and n_comp < limit:
            for j in np.nonzero(~inside)[0][: limit - n_comp]:
                rep.add("L3-composition", _vec(f1, lev), _vec(arr[j], lev))
                n_comp += 1
        sep = (f1 != 0) & (arr == -f1)
        masks = sep.astype(np.int64) @ bits
        for mask in np.unique(masks):
            if mask == 0:
                continue
            rows = np.nonzero(masks == mask)[0]
            uniq, minlev = look.masked(int(mask))
            mb = sep[rows[0]]
            keys = look.encode(comp[rows], np.broadcast_to(mb, comp[rows].shape))
            pos = np.minimum(np.searchsorted(uniq, keys), len(uniq) - 1)
            found = uniq[pos] == keys
            xs = np.nonzero(mb)[0]
            ok = found[:, None] & (minlev[pos][:, xs] < np.abs(f1[xs])[None, :])
            bad = ~ok.all(axis=1)
            if bad.any() and n_elim < limit:
                for j in rows[bad][: limit - n_elim]:
                    rep.add("L4-elimination", _vec(f1, lev), _vec(arr[j], lev))
                    n_elim += 1
    return rep


def check_covector_axioms(l: CovectorSet) -> AxiomReport:
    """Covector axioms: zero, negation, composition closure, elimination.

    Elimination is searched exhaustively inside ``l``: for every pair and
    every separating element x some member vanishes at x and agrees with the
    product off the separation set.
    """
    if l.max_level != 1:
        raise SignError("covector axioms are stated for level-1 vectors")
    return _check_closure_axioms(l, with_level_perms=False)


def check_symmetric_ell_axioms(l: CovectorSet) -> AxiomReport:
    """The five axioms of a symmetric oriented l-matroid (l = max_level)."""
    return _check_closure_axioms(l, with_level_perms=True)


# -- faces from circuits ------------------------------------------------------

def faces_from_circuits(c: CircuitSet) -> CovectorSet:
    """All level-1 vectors meeting every circuit in {0} or in both signs.

    The same set is also computed through orthogonality to every circuit and
    the two results must coincide.
    """
    n = c.n
    if n > MAX_FACES_FROM_CIRCUITS:
        raise AxiomError(f"ground set of size {n} exceeds the 3^n scan limit {MAX_FACES_FROM_CIRCUITS}")
    cand = np.array(list(itertools.product((0, 1, -1), repeat=n)), dtype=np.int8).reshape(-1, n)
    gr_ok = np.ones(len(cand), dtype=bool)
    orth_ok = np.ones(len(cand), dtype=bool)
    for x in c.circuits:
        xv = np.array(x.values, dtype=np.int8)
        supp = xv != 0
        prod = cand[:, supp] * xv[supp]
        all_zero = (prod == 0).all(axis=1)
        both = (prod > 0).any(axis=1) & (prod < 0).any(axis=1)
        gr_ok &= all_zero | both
        # S(tau, X) and S(tau, X*) both empty or both nonempty
        s1 = ((cand == -xv) & (cand != 0)).any(axis=1)
        s2 = ((cand == xv) & (cand != 0)).any(axis=1)
        orth_ok &= s1 == s2
    if not np.array_equal(gr_ok, orth_ok):
        raise AxiomError("face criterion and orthogonality criterion disagree")
    return CovectorSet.from_array(cand[gr_ok], 1)


# -- order structure on level-1 faces ----------------------------------------

def leq_matrix(arr: np.ndarray) -> np.ndarray:
    """``M[i, j]`` is True iff row i <= row j in the componentwise S_l order."""
    arr = arr.astype(np.int8)
    absa = np.abs(arr)
    out = np.empty((len(arr), len(arr)), dtype=bool)
    for i in range(len(arr)):
        out[i] = ((arr == arr[i]) | (absa > absa[i])).all(axis=1)
    return out


@dataclass
class FaceOrder:
    """Level-1 covectors with their order relation and codimensions."""

    covectors: CovectorSet
    leq: np.ndarray
    codim: tuple[int, ...]

    @classmethod
    def build(cls, l: CovectorSet) -> "FaceOrder":
        if l.max_level != 1:
            raise SignError("face order expects level-1 covectors")
        leq = leq_matrix(l.array)
        # height above the zero face; the covector poset is graded
        height = [0] * len(l)
        order = sorted(range(len(l)), key=lambda i: len(l.vectors[i].support()))
        for i in order:
            below = np.nonzero(leq[:, i])[0]
            height[i] = max((height[j] + 1 for j in below if j != i), default=0)
        top = max(height) if height else 0
        return cls(l, leq, tuple(top - h for h in height))

    @property
    def rank(self) -> int:
        return max(self.codim) if self.codim else 0

    def below(self, i: int) -> np.ndarray:
        return np.nonzero(self.leq[:, i])[0]

    def codim_of(self, v: SignVector) -> int:
        return self.codim[self.covectors.index(v)]


# -- tensoring with R^l and chain encodings -----------------------------------

def chains_encode(chain: Sequence[SignVector], max_level: int | None = None) -> SignVector:
    """(G_1 (x) e_1) o ... o (G_l (x) e_l) for a decreasing chain G_1 >= ... >= G_l."""
    if not chain:
        raise SignError("empty chain")
    lev = len(chain) if max_level is None else max_level
    for g in chain:
        if g.max_level != 1:
            raise SignError("chain entries must be level-1 covectors")
    for a, b in zip(chain, chain[1:]):
        if not vector_leq(b, a):
            raise SignError(f"not a decreasing chain: {b} is not below {a}")
    vals = [0] * len(chain[0])
    for i, g in enumerate(chain, start=1):
        vals = list(compose_values(vals, [v * i for v in g.values]))
    return SignVector(tuple(vals), lev)


def chains_decode(vec: SignVector, covectors: CovectorSet | None = None) -> tuple[SignVector, ...]:
    """(pi_1 F, ..., pi_l F); optionally checks every entry is a covector."""
    chain = tuple(project_level(vec, i) for i in range(1, vec.max_level + 1))
    for a, b in zip(chain, chain[1:]):
        if not vector_leq(b, a):
            raise SignError(f"{vec} does not decode to a decreasing chain")
    if covectors is not None:
        for g in chain:
            if g not in covectors:
                raise SignError(f"{vec} projects to {g}, which is not a covector")
    return chain


def chains_encode_decode(direction: str, data, max_level: int | None = None):
    if direction == "encode":
        return chains_encode(data, max_level)
    if direction == "decode":
        return chains_decode(data)
    raise SignError(f"unknown direction {direction!r}")


def decreasing_chains(order: FaceOrder, length: int, top: Iterable[int] | None = None) -> list[tuple[int, ...]]:
    """Index tuples (i_1, ..., i_length) with face i_1 >= i_2 >= ...."""
    starts = range(len(order.covectors)) if top is None else top
    below = [order.below(i) for i in range(len(order.covectors))]
    out: list[tuple[int, ...]] = [(i,) for i in starts]
    for _ in range(length - 1):
        out = [c + (int(j),) for c in out for j in below[c[-1]]]
    return out


def tensor_by_chains(order: FaceOrder, ell: int) -> CovectorSet:
    """L (x) R^l built from decreasing l-chains of faces."""
    vecs = order.covectors.vectors
    if ell == 0:
        return CovectorSet(order.covectors.n, 0, (SignVector.zero(order.covectors.n, 0),))
    out = [chains_encode([vecs[i] for i in c], ell) for c in decreasing_chains(order, ell)]
    return CovectorSet(order.covectors.n, ell, tuple(out))


def tensor_by_products(l: CovectorSet, ell: int) -> CovectorSet:
    """L (x) R^l straight from its definition (L(x)e_1) o ... o (L(x)e_l)."""
    base = l.array.astype(np.int64)
    cur = base.copy()
    for i in range(2, ell + 1):
        lifted = base * i
        nxt = np.where(np.abs(lifted)[None, :, :] > np.abs(cur)[:, None, :], lifted[None, :, :], cur[:, None, :])
        cur = np.unique(nxt.reshape(-1, l.n), axis=0)
    return CovectorSet.from_array(np.unique(cur, axis=0), ell)


# -- the posets L^(l) ---------------------------------------------------------

@dataclass
class HigherFaces:
    """L^(l): topes of L (x) R^(l+1), each tagged with its chain (C, F_1, ..., F_l)."""

    ell: int
    order: FaceOrder
    elements: tuple[SignVector, ...]
    chains: tuple[tuple[int, ...], ...]  # face indices, chamber first

    @cached_property
    def index(self) -> dict[SignVector, int]:
        return {v: i for i, v in enumerate(self.elements)}

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([v.values for v in self.elements], dtype=np.int8).reshape(len(self.elements), self.order.covectors.n)

    def chain_vectors(self, i: int) -> tuple[SignVector, ...]:
        vecs = self.order.covectors.vectors
        return tuple(vecs[j] for j in self.chains[i])

    def cell_dim(self, i: int) -> int:
        return sum(self.order.codim[j] for j in self.chains[i][1:])

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.cell_dim(i) for i in range(len(self.elements)))

    def __len__(self):
        return len(self.elements)

    def poset(self):
        from .complexes import Poset
        return Poset.from_sign_array(self.array, labels=self.elements)


def build_L_ell(l: CovectorSet, ell: int, order: FaceOrder | None = None) -> HigherFaces:
    """Enumerate L^(l) through decreasing chains C >= F_1 >= ... >= F_l.

    Encoding puts the chamber at level 1 and F_i at level i + 1.
    """
    if ell < 0:
        raise SignError("ell must be >= 0")
    if order is None:
        order = FaceOrder.build(l)
    vecs = l.vectors
    chambers = [i for i, v in enumerate(vecs) if v.is_tope()]
    chains = decreasing_chains(order, ell + 1, top=chambers)
    elements = [chains_encode([vecs[i] for i in c], ell + 1) for c in chains]
    if len(set(elements)) != len(elements):
        raise AxiomError("chain encoding is not injective")
    if ell == 1:
        pairs = {(vecs[c[1]], vecs[c[0]]) for c in chains}
        decoded = {(chains_decode(e)[1], chains_decode(e)[0]) for e in elements}
        if pairs != decoded or len(pairs) != len(elements):
            raise AxiomError("L^(1) is not in bijection with pairs F <= C")
    perm = sorted(range(len(elements)), key=lambda i: sort_key(elements[i].values))
    return HigherFaces(ell, order, tuple(elements[i] for i in perm), tuple(tuple(chains[i]) for i in perm))
