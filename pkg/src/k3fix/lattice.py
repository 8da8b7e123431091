"""Even lattices given by integer Gram matrices.

Root lattices follow the negative-definite convention: the Gram matrix of
``A_m``, ``D_n`` and ``E_l`` is minus the Cartan matrix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cyclotomic import euler_phi
from .errors import InfeasibleError, UsageError

K3_SECOND_BETTI = 22


@dataclass(frozen=True)
class Lattice:
    gram: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self) -> None:
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        n = len(gram)
        if any(len(row) != n for row in gram):
            raise UsageError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if gram[i][j] != gram[j][i]:
                    raise UsageError(f"Gram matrix not symmetric at ({i},{j})")
        object.__setattr__(self, "gram", gram)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def __add__(self, other: Lattice) -> Lattice:
        return direct_sum(self, other)

    def __str__(self) -> str:
        return self.name or f"<rank {self.rank} lattice>"


@dataclass(frozen=True)
class LatticeInvariants:
    rank: int
    determinant: int
    signature: tuple[int, int]
    nullity: int
    is_even: bool
    is_unimodular: bool

    @property
    def degenerate(self) -> bool:
        return self.determinant == 0


# ---------------------------------------------------------------------------
# named lattices
# ---------------------------------------------------------------------------

def _cartan_from_edges(n: int, edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = -2
    for a, b in edges:
        g[a][b] = g[b][a] = 1
    return g


def _root_lattice(kind: str, n: int) -> list[list[int]]:
    chain = [(i, i + 1) for i in range(n - 1)]
    if kind == "A":
        if n < 1:
            raise UsageError("A_m needs m >= 1")
        return _cartan_from_edges(n, chain)
    if kind == "D":
        if n < 4:
            raise UsageError("D_n needs n >= 4")
        # chain 0..n-2, with node n-1 attached to node n-3
        return _cartan_from_edges(n, [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)])
    if kind == "E":
        if n not in (6, 7, 8):
            raise UsageError("E_l needs l in {6, 7, 8}")
        # chain 0..n-2, with node n-1 attached to the third node of the chain
        return _cartan_from_edges(n, [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)])
    raise UsageError(f"unknown root system {kind}")


_NAME_RE = re.compile(r"^\s*(?:(U)(?:\((\d+)\))?|([ADE])_?(\d+)|(K7|K_7))\s*$")


def named_lattice(name: str) -> Lattice:
    """``U``, ``U(m)``, ``A_m``/``Am``, ``D_n``, ``E6``..``E8`` or ``K7``."""
    m = _NAME_RE.match(name)
    if not m:
        raise UsageError(f"unknown lattice name {name!r}")
    u, scale, root, n, k7 = m.groups()
    if u:
        s = int(scale) if scale else 1
        if s < 1:
            raise UsageError("U(m) needs m >= 1")
        label = f"U({s})" if scale else "U"
        return Lattice(((0, s), (s, 0)), label)
    if root:
        return Lattice(tuple(map(tuple, _root_lattice(root, int(n)))), f"{root}{n}")
    return Lattice(((-4, 1), (1, -2)), "K7")


def direct_sum(*lattices: Lattice) -> Lattice:
    n = sum(l.rank for l in lattices)
    gram = [[0] * n for _ in range(n)]
    offset = 0
    for l in lattices:
        for i, row in enumerate(l.gram):
            for j, x in enumerate(row):
                gram[offset + i][offset + j] = x
        offset += l.rank
    name = "+".join(l.name for l in lattices if l.name and l.rank)
    return Lattice(tuple(map(tuple, gram)), name)


def parse_lattice(expr: str) -> Lattice:
    """Direct sum written as ``U+E8+A6`` (``⊕`` is accepted as separator)."""
    parts = [p for p in re.split(r"[+⊕]", expr)]
    if any(not p.strip() for p in parts):
        raise UsageError(f"malformed lattice expression {expr!r}")
    return direct_sum(*(named_lattice(p) for p in parts))


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def determinant(gram: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free elimination; exact for integer matrices."""
    a = [list(map(int, row)) for row in gram]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def signature(gram: Sequence[Sequence[int]]) -> tuple[int, int, int]:
    """``(positive, negative, nullity)`` by symmetric elimination over Q.

    Uses congruence moves only, so the sign counts are exact.  A zero
    diagonal with a nonzero off-diagonal entry is fixed by adding the partner
    row and column, which makes the pivot ``2*a_ij`` nonzero.
    """
    a = [[Fraction(x) for x in row] for row in gram]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        k = next((i for i in active if a[i][i] != 0), None)
        if k is None:
            pair = next(((i, j) for i in active for j in active if i != j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            for r in range(n):
                a[i][r] += a[j][r]
            for r in range(n):
                a[r][i] += a[r][j]
            k = i
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(k)
        for i in active:
            f = a[i][k] / p
            if f:
                for j in active:
                    a[i][j] -= f * a[k][j]
        for i in active:
            a[i][k] = a[k][i] = Fraction(0)
    return pos, neg, n - pos - neg


def invariants(l: Lattice) -> LatticeInvariants:
    det = determinant(l.gram)
    pos, neg, null = signature(l.gram)
    return LatticeInvariants(
        rank=l.rank,
        determinant=det,
        signature=(pos, neg),
        nullity=null,
        is_even=l.is_even,
        is_unimodular=abs(det) == 1,
    )


# ---------------------------------------------------------------------------
# rank deduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RankScenario:
    order: int
    invariant_rank: int
    total_rank: int = K3_SECOND_BETTI

    def __post_init__(self) -> None:
        if self.order < 1:
            raise UsageError(f"order must be >= 1, got {self.order}")
        if not 0 <= self.invariant_rank <= self.total_rank:
            raise UsageError(f"invariant_rank must lie in [0, {self.total_rank}]")


@dataclass(frozen=True)
class RankDeduction:
    feasible_rank_T: tuple[int, ...]
    forced_trivial: bool

    @property
    def determined(self) -> bool:
        return len(self.feasible_rank_T) == 1

    @property
    def rank_T(self) -> int | None:
        return self.feasible_rank_T[0] if self.determined else None

    @property
    def rank_S(self) -> int | None:
        return None if self.rank_T is None else K3_SECOND_BETTI - self.rank_T


def deduce_ranks(s: RankScenario) -> RankDeduction:
    """Squeeze ``rk T`` between ``phi(I)`` from below and ``22 - rk S^sigma`` from above.

    ``rk T`` is a positive multiple of ``phi(I)`` and at least 2 (it carries the
    period).  The action on ``S`` is forced trivial exactly when the squeeze
    leaves ``rk S = rk S^sigma``.
    """
    phi = euler_phi(s.order)
    upper = s.total_rank - s.invariant_rank
    lower = max(phi, 2)
    feasible = tuple(r for r in range(lower, upper + 1) if r % phi == 0)
    if not feasible:
        raise InfeasibleError(
            f"no rank for T: need a multiple of phi({s.order}) = {phi} in [{lower}, {upper}]"
        )
    forced = len(feasible) == 1 and s.total_rank - feasible[0] == s.invariant_rank
    return RankDeduction(feasible, forced)
