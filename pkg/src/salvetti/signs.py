"""Leveled sign values and sign vectors.

A sign value of level ``l`` is stored as the signed integer ``+l`` or ``-l``;
the zero value is ``0``.  So ``+2`` stands for ``e_2`` and ``-1`` for
``-e_1``.  Sign vectors live on the ground set ``E`` only: the value at
``-a`` is implicitly the negation of the value at ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_LEVEL = 8


class SignError(ValueError):
    """Raised on malformed sign data or incompatible operands."""


def level(v: int) -> int:
    return v if v >= 0 else -v


def sign(v: int) -> int:
    return (v > 0) - (v < 0)


def sv_leq(x: int, y: int) -> bool:
    """Order on S_l: equal, or strictly lower level (signs free across levels)."""
    return x == y or abs(x) < abs(y)


def sv_lt(x: int, y: int) -> bool:
    return abs(x) < abs(y)


def format_value(v: int) -> str:
    if v == 0:
        return "0"
    return ("+" if v > 0 else "-") + str(abs(v))


def parse_value(token: str) -> int:
    token = token.strip()
    if token == "0":
        return 0
    if len(token) < 2 or token[0] not in "+-" or not token[1:].isdigit():
        raise SignError(f"bad sign token {token!r}; expected '0', '+l' or '-l'")
    lev = int(token[1:])
    if lev < 1 or lev > MAX_LEVEL:
        raise SignError(f"level {lev} outside 1..{MAX_LEVEL}")
    return lev if token[0] == "+" else -lev


@dataclass(frozen=True)
class SignVector:
    """A Z_2-equivariant map from the doubled ground set into S_l."""

    values: tuple[int, ...]
    max_level: int = 1

    def __post_init__(self):
        if not 0 <= self.max_level <= MAX_LEVEL:
            raise SignError(f"max_level {self.max_level} outside 0..{MAX_LEVEL}")
        vals = tuple(int(v) for v in self.values)
        for v in vals:
            if abs(v) > self.max_level:
                raise SignError(f"value {format_value(v)} exceeds max_level {self.max_level}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls, n: int, max_level: int = 1) -> "SignVector":
        return cls((0,) * n, max_level)

    @classmethod
    def parse(cls, text: str | Sequence[str], max_level: int | None = None) -> "SignVector":
        tokens = text.split() if isinstance(text, str) else list(text)
        vals = tuple(parse_value(t) for t in tokens)
        if max_level is None:
            max_level = max((abs(v) for v in vals), default=0) or 1
        return cls(vals, max_level)

    @property
    def ground_size(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __neg__(self) -> "SignVector":
        return SignVector(tuple(-v for v in self.values), self.max_level)

    def __str__(self):
        return " ".join(format_value(v) for v in self.values)

    def tokens(self) -> list[str]:
        return [format_value(v) for v in self.values]

    def zero_set(self) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.values) if v == 0)

    def support(self) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.values) if v != 0)

    def is_tope(self) -> bool:
        return all(self.values)

    def is_zero(self) -> bool:
        return not any(self.values)

    def compose(self, other: "SignVector") -> "SignVector":
        return compose(self, other)

    def __le__(self, other: "SignVector") -> bool:
        return vector_leq(self, other)

    def __lt__(self, other: "SignVector") -> bool:
        return self != other and vector_leq(self, other)


def _check_compatible(phi: SignVector, psi: SignVector, same_level: bool = True):
    if len(phi) != len(psi):
        raise SignError(f"ground-size mismatch: {len(phi)} vs {len(psi)}")
    if same_level and phi.max_level != psi.max_level:
        raise SignError(f"max_level mismatch: {phi.max_level} vs {psi.max_level}")


def compose_values(phi: Sequence[int], psi: Sequence[int]) -> tuple[int, ...]:
    """Raw matroid product: take psi where it is strictly higher, else phi."""
    return tuple(b if abs(b) > abs(a) else a for a, b in zip(phi, psi))


def compose(phi: SignVector, psi: SignVector) -> SignVector:
    _check_compatible(phi, psi)
    return SignVector(compose_values(phi.values, psi.values), phi.max_level)


def compose_all(vectors: Iterable[SignVector]) -> SignVector:
    it = iter(vectors)
    out = next(it)
    for v in it:
        out = compose(out, v)
    return out


def vector_leq(phi: SignVector, psi: SignVector) -> bool:
    _check_compatible(phi, psi)
    return all(a == b or abs(a) < abs(b) for a, b in zip(phi.values, psi.values))


def separation_set(sigma: SignVector, tau: SignVector) -> frozenset[int]:
    """Indices where the two vectors take opposite nonzero values of equal level."""
    _check_compatible(sigma, tau, same_level=False)
    return frozenset(i for i, (a, b) in enumerate(zip(sigma.values, tau.values)) if a != 0 and a == -b)


def separation_orthogonal(sigma: SignVector, tau: SignVector) -> tuple[frozenset[int], bool]:
    """Separation set S(sigma, tau) and the orthogonality verdict.

    Orthogonality holds when S(sigma, tau) and S(sigma, -tau) are both empty
    or both nonempty.  Only defined for level-1 vectors.
    """
    if sigma.max_level > 1 or tau.max_level > 1:
        raise SignError("orthogonality is only defined for level-1 sign vectors")
    s = separation_set(sigma, tau)
    s_star = separation_set(sigma, -tau)
    return s, bool(s) == bool(s_star)


def orthogonal(sigma: SignVector, tau: SignVector) -> bool:
    return separation_orthogonal(sigma, tau)[1]


def embed_level(vec: SignVector, i: int, max_level: int | None = None) -> SignVector:
    """F (x) e_i: move every nonzero level-1 entry to level i."""
    if vec.max_level > 1 or any(abs(v) > 1 for v in vec.values):
        raise SignError("embedding takes a level-1 vector")
    if max_level is None:
        max_level = i
    if not 1 <= i <= max_level:
        raise SignError(f"embed index {i} outside 1..{max_level}")
    return SignVector(tuple(v * i for v in vec.values), max_level)


def project_level(vec: SignVector, i: int) -> SignVector:
    """pi_i: keep the sign of entries at level >= i, send lower levels to zero."""
    if not 1 <= i <= max(vec.max_level, 1):
        raise SignError(f"project index {i} outside 1..{vec.max_level}")
    return SignVector(tuple(sign(v) if abs(v) >= i else 0 for v in vec.values), 1)


def level_maps(direction: str, i: int, vec: SignVector, max_level: int | None = None) -> SignVector:
    if direction == "embed":
        return embed_level(vec, i, max_level)
    if direction == "project":
        return project_level(vec, i)
    raise SignError(f"unknown direction {direction!r}")


def permute_levels(vec: SignVector, perm: Sequence[int]) -> SignVector:
    """Apply a permutation of levels; ``perm[j-1]`` is the new level of level j."""
    if sorted(perm) != list(range(1, vec.max_level + 1)):
        raise SignError(f"{perm!r} is not a permutation of 1..{vec.max_level}")
    return SignVector(tuple(sign(v) * perm[abs(v) - 1] if v else 0 for v in vec.values), vec.max_level)
