"""Holomorphic and topological Lefschetz constraints for K3 automorphisms.

An isolated fixed point of an order-``I`` automorphism with local eigenvalues
``(zeta^i, zeta^j)`` contributes ``1/((1-zeta^i)(1-zeta^j))`` to the
holomorphic Lefschetz number; a fixed curve of genus ``g`` contributes
``(1-g)(1+zeta)/(1-zeta)^2`` once its self-intersection ``2g-2`` is
substituted.  The left-hand side is ``1 + zeta^(I-1)`` because
``H^1(X, O_X) = 0``.  Writing the single cyclotomic identity in the power
basis turns it into ``phi(I)`` rational linear equations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .cyclotomic import CyclotomicNumber, euler_phi, primitive_trace, root_power
from .errors import InconsistencyError, SingularTermError, UsageError
from .linalg import rref

G_SUM = "g_sum"
SENSES = ("==", "<=", ">=")


@dataclass(frozen=True, order=True)
class PointType:
    """Local type ``(i, j)`` of a fixed point, stored canonically ``0 <= i <= j < order``."""

    order: int
    i: int
    j: int

    def __post_init__(self) -> None:
        if self.order < 1:
            raise UsageError(f"order must be >= 1, got {self.order}")
        i, j = sorted((self.i % self.order, self.j % self.order))
        if (i + j - 1) % self.order:
            raise UsageError(
                f"({self.i},{self.j}) violates i+j = 1 mod {self.order}"
            )
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)

    @property
    def isolated(self) -> bool:
        return self.i >= 2

    @property
    def label(self) -> str:
        return f"m[{self.i},{self.j}]"

    def __str__(self) -> str:
        return f"P_{self.order}^({self.i},{self.j})"


def isolated_types(order: int) -> list[PointType]:
    """All isolated types ``2 <= i <= j <= order-1`` with ``i + j = order + 1``."""
    return [PointType(order, i, order + 1 - i) for i in range(2, (order + 1) // 2 + 1)]


def point_term(t: PointType) -> CyclotomicNumber:
    if t.i == 0 or t.j == 0:
        raise SingularTermError(f"{t} has a trivial eigenvalue; it lies on a fixed curve")
    return _point_term(t.order, t.i, t.j)


@lru_cache(maxsize=None)
def _point_term(order: int, i: int, j: int) -> CyclotomicNumber:
    one = CyclotomicNumber.one(order)
    return ((one - root_power(order, i)) * (one - root_power(order, j))).inverse()


@lru_cache(maxsize=None)
def curve_unit_term(order: int) -> CyclotomicNumber:
    """Contribution of one unit of ``1 - g`` from fixed curves: ``(1+zeta)/(1-zeta)^2``."""
    if order < 2:
        raise UsageError("curve terms need an automorphism of order >= 2")
    z = root_power(order, 1)
    return (1 + z) / ((1 - z) * (1 - z))


def holomorphic_lhs(order: int) -> CyclotomicNumber:
    """Trace on H^0(O) plus trace on H^2(O): ``1 + zeta^(order-1)``."""
    if order < 2:
        raise UsageError("holomorphic Lefschetz needs order >= 2")
    return 1 + root_power(order, order - 1)


def transcendental_trace(order: int, q: int) -> int:
    if q < 1:
        raise UsageError(f"q must be >= 1, got {q}")
    return q * primitive_trace(order)


def euler_characteristic(order: int, trace_on_S: int, q: int) -> int:
    """Topological Lefschetz number ``2 + tr(S) + tr(T)``."""
    return 2 + trace_on_S + transcendental_trace(order, q)


# ---------------------------------------------------------------------------
# linear systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearRow:
    coeffs: tuple[Fraction, ...]
    sense: str
    rhs: Fraction
    label: str = ""

    def __post_init__(self) -> None:
        if self.sense not in SENSES:
            raise UsageError(f"unknown sense {self.sense!r}")

    def value(self, values: Sequence) -> Fraction:
        return sum((c * v for c, v in zip(self.coeffs, values)), Fraction(0))

    def holds(self, values: Sequence) -> bool:
        lhs = self.value(values)
        if self.sense == "==":
            return lhs == self.rhs
        if self.sense == "<=":
            return lhs <= self.rhs
        return lhs >= self.rhs


@dataclass(frozen=True)
class AffineExpr:
    """``constant + sum(coeffs[v] * v)`` over named free variables."""

    constant: Fraction
    coeffs: Mapping[str, Fraction]

    def __str__(self) -> str:
        parts = []
        if self.constant:
            parts.append(str(self.constant))
        for name, c in self.coeffs.items():
            if c:
                mag = abs(c)
                term = name if mag == 1 else f"{mag}*{name}"
                parts.append(f"{'-' if c < 0 else '+'} {term}")
        if not parts:
            return "0"
        text = " ".join(parts)
        if text.startswith("+ "):
            return text[2:]
        return "-" + text[2:] if text.startswith("- ") else text


@dataclass(frozen=True)
class ConstraintSystem:
    """Rational linear equalities and inequalities over named integer unknowns."""

    variables: tuple[str, ...]
    equalities: tuple[LinearRow, ...] = ()
    inequalities: tuple[LinearRow, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.variables)
        for row in self.equalities + self.inequalities:
            if len(row.coeffs) != n:
                raise UsageError(f"row {row.label!r} has {len(row.coeffs)} coefficients, expected {n}")
        for row in self.equalities:
            if row.sense != "==":
                raise UsageError(f"equality row {row.label!r} has sense {row.sense}")

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def row(self, terms: Mapping[str, int | Fraction], sense: str, rhs, label: str = "") -> LinearRow:
        coeffs = [Fraction(0)] * len(self.variables)
        for name, c in terms.items():
            coeffs[self.index(name)] += Fraction(c)
        return LinearRow(tuple(coeffs), sense, Fraction(rhs), label)

    def extend(self, rows: Iterable[LinearRow]) -> ConstraintSystem:
        eqs = list(self.equalities)
        ineqs = list(self.inequalities)
        for r in rows:
            (eqs if r.sense == "==" else ineqs).append(r)
        return ConstraintSystem(self.variables, tuple(eqs), tuple(ineqs))

    def satisfied_by(self, assignment: Mapping[str, int | Fraction]) -> bool:
        values = [Fraction(assignment.get(v, 0)) for v in self.variables]
        return all(r.holds(values) for r in self.equalities + self.inequalities)

    def equality_rank(self) -> int:
        rows, piv = rref([list(r.coeffs) + [r.rhs] for r in self.equalities])
        return sum(1 for p in piv if p >= 0)

    def solve_for(self, free: Sequence[str]) -> dict[str, AffineExpr]:
        """Express every non-free variable through ``free`` using the equalities.

        Raises ``UsageError`` when the chosen free set does not parametrize the
        solution space (wrong size or dependent columns) and
        ``InconsistencyError`` when the equalities have no rational solution.
        """
        free = list(free)
        unknown = [v for v in free if v not in self.variables]
        if unknown:
            raise UsageError(f"unknown variables {unknown}")
        dependent = [v for v in self.variables if v not in free]
        order = [self.index(v) for v in dependent] + [self.index(v) for v in free]
        rows, piv = rref([list(r.coeffs) + [r.rhs] for r in self.equalities], order)
        if -1 in piv:
            raise InconsistencyError("equalities are inconsistent over Q")
        pivot_names = [self.variables[p] for p in piv]
        if sorted(pivot_names) != sorted(dependent):
            raise UsageError(
                f"free set {free} does not parametrize the solutions; "
                f"pivots would be {pivot_names}"
            )
        out: dict[str, AffineExpr] = {}
        for row, p in zip(rows, piv):
            coeffs = {v: -row[self.index(v)] for v in free}
            out[self.variables[p]] = AffineExpr(row[-1], coeffs)
        return {v: out[v] for v in dependent}


def type_variables(order: int) -> list[str]:
    return [t.label for t in isolated_types(order)] + [G_SUM]


@lru_cache(maxsize=None)
def build_holomorphic_system(order: int) -> ConstraintSystem:
    """``phi(order)`` rational equations from the holomorphic Lefschetz identity.

    Unknowns: one multiplicity per isolated type, plus ``g_sum = sum(1 - g)``
    over the fixed curves.
    """
    types = isolated_types(order)
    variables = tuple(type_variables(order))
    columns = [point_term(t).coords for t in types] + [curve_unit_term(order).coords]
    lhs = holomorphic_lhs(order).coords
    rows = []
    for k in range(euler_phi(order)):
        rows.append(LinearRow(tuple(col[k] for col in columns), "==", lhs[k], f"zeta^{k}"))
    return ConstraintSystem(variables, tuple(rows))


# ---------------------------------------------------------------------------
# fixed-locus configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class CurveContribution:
    """Fixed curves, recorded by their genera (sorted ascending)."""

    genera: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(g < 0 for g in self.genera):
            raise UsageError(f"negative genus in {self.genera}")
        object.__setattr__(self, "genera", tuple(sorted(self.genera)))

    @property
    def count(self) -> int:
        return len(self.genera)

    @property
    def g_sum(self) -> int:
        return sum(1 - g for g in self.genera)


@dataclass(frozen=True)
class FixedLocusConfig:
    order: int
    points: tuple[tuple[PointType, int], ...]
    curves: CurveContribution
    euler: int

    def __post_init__(self) -> None:
        pts = tuple(sorted((t, m) for t, m in self.points if m))
        for t, m in pts:
            if t.order != self.order or not t.isolated or m < 0:
                raise UsageError(f"bad point entry {t} x {m} for order {self.order}")
        object.__setattr__(self, "points", pts)
        if self.euler != self.isolated_count + 2 * self.curves.g_sum:
            raise InconsistencyError(
                f"euler {self.euler} != M + 2*g_sum = "
                f"{self.isolated_count} + 2*{self.curves.g_sum}"
            )

    @property
    def isolated_count(self) -> int:
        return sum(m for _, m in self.points)

    def multiplicity(self, t: PointType) -> int:
        return dict(self.points).get(t, 0)

    def assignment(self) -> dict[str, int]:
        values = {t.label: 0 for t in isolated_types(self.order)}
        values.update({t.label: m for t, m in self.points})
        values[G_SUM] = self.curves.g_sum
        return values

    def sort_key(self) -> tuple:
        return (
            tuple(self.multiplicity(t) for t in isolated_types(self.order)),
            self.curves.g_sum,
            self.curves.genera,
        )


def holomorphic_residual(config: FixedLocusConfig) -> CyclotomicNumber:
    """``sum(local terms) - lhs`` evaluated directly in Q(zeta); zero iff the identity holds."""
    order = config.order
    total = CyclotomicNumber.zero(order)
    for t, m in config.points:
        total = total + point_term(t) * m
    total = total + curve_unit_term(order) * config.curves.g_sum
    return total - holomorphic_lhs(order)
