"""Exhaustive integer enumeration of fixed-locus configurations.

A scenario fixes the order of the automorphism, the trace data entering the
topological Lefschetz formula, capacity bounds inherited from the fixed
loci of its powers, and a policy describing which fixed curves may occur.
The holomorphic system, the capacities and the Euler equality are reduced
exactly over Q; the remaining free variables are searched depth-first with
interval pruning on every inequality, so every non-negative integer
solution inside the search bounds is found.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterator, Mapping, Sequence

from .cyclotomic import euler_phi
from .errors import InconsistencyError, UnboundedError, UsageError
from .lefschetz import (
    G_SUM,
    ConstraintSystem,
    CurveContribution,
    FixedLocusConfig,
    LinearRow,
    PointType,
    build_holomorphic_system,
    euler_characteristic,
    holomorphic_residual,
    isolated_types,
)
from .linalg import rref

log = logging.getLogger(__name__)

DEFAULT_MAX_MULTIPLICITY = 24
DEFAULT_G_SUM_RANGE = (-21, 12)


# ---------------------------------------------------------------------------
# scenario data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    """Marker for a point whose image under a power lies on a fixed curve."""

    order: int

    def __str__(self) -> str:
        return f"Q_{self.order}"


@dataclass(frozen=True)
class Capacity:
    types: tuple[PointType, ...]
    bound: int
    sense: str = "<="
    note: str = ""

    def __post_init__(self) -> None:
        if self.sense not in ("<=", "=="):
            raise UsageError(f"capacity sense must be '<=' or '==', got {self.sense!r}")


@dataclass(frozen=True)
class ProjectionBound:
    """Bounds on how many points map to each isolated type of the power ``sigma^power``."""

    power: int
    bounds: Mapping[PointType, int]
    absent_zero: bool = False
    note: str = ""


@dataclass(frozen=True)
class CurvePolicy:
    """Which curve multisets may accompany a solution.

    ``exact`` pins the genus list.  ``contained_in`` lists genus multisets of
    a power's fixed locus; the curves must form a sub-multiset of one of them.
    ``max_curves`` and ``genus_max`` cap the count and the genera; ``None``
    leaves them open, which is only enumerable if something else bounds N.
    """

    max_curves: int | None = 12
    genus_max: int | None = 22
    contained_in: tuple[tuple[int, ...], ...] | None = None
    exact: tuple[int, ...] | None = None
    note: str = ""

    def _candidates(self) -> list[tuple[int, ...]] | None:
        """Finite list of allowed genus multisets, or ``None`` for an open policy."""
        if self.exact is not None:
            pool = [tuple(sorted(self.exact))]
        elif self.contained_in is not None:
            seen = set()
            for parent in self.contained_in:
                for sub in _sub_multisets(tuple(sorted(parent))):
                    seen.add(sub)
            pool = sorted(seen)
        else:
            return None
        return [
            c for c in pool
            if (self.max_curves is None or len(c) <= self.max_curves)
            and (self.genus_max is None or all(g <= self.genus_max for g in c))
        ]

    def is_bounded(self) -> bool:
        return self._candidates() is not None or self.max_curves is not None or self.genus_max == 0

    def g_sum_values(self, lo: int, hi: int) -> list[int]:
        cands = self._candidates()
        if cands is not None:
            return sorted({sum(1 - g for g in c) for c in cands if lo <= sum(1 - g for g in c) <= hi})
        if self.genus_max == 0 and self.max_curves is None:
            return list(range(max(lo, 0), hi + 1))
        if self.max_curves is None:
            return list(range(lo, hi + 1))
        gmax = self.genus_max
        values = set()
        for n in range(self.max_curves + 1):
            low = n * (1 - gmax) if gmax is not None else lo
            values.update(range(max(lo, low), min(hi, n) + 1))
        return sorted(values)

    def expand(self, g_sum: int) -> list[tuple[int, ...]]:
        """Every genus multiset with ``sum(1 - g) == g_sum`` allowed by the policy."""
        cands = self._candidates()
        if cands is not None:
            return [c for c in cands if sum(1 - g for g in c) == g_sum]
        if self.max_curves is None and self.genus_max == 0:
            return [(0,) * g_sum] if g_sum >= 0 else []
        if self.max_curves is None:
            raise UnboundedError(
                "curve policy leaves the number of fixed curves open; set max_curves, "
                "genus_max=0, contained_in or exact"
            )
        gmax = self.genus_max if self.genus_max is not None else 1 - g_sum + self.max_curves
        out: list[tuple[int, ...]] = []

        def reachable(remaining: int, slots: int, g_lo: int) -> bool:
            # can up to `slots` curves of genus in [g_lo, gmax] contribute exactly `remaining`?
            return remaining == 0 or any(
                k * (1 - gmax) <= remaining <= k * (1 - g_lo) for k in range(1, slots + 1)
            )

        def rec(prefix: list[int], start: int, remaining: int) -> None:
            # remaining = g_sum still to produce; genera are non-decreasing
            if remaining == 0:
                out.append(tuple(prefix))
            slots = self.max_curves - len(prefix)
            if slots == 0:
                return
            for g in range(start, gmax + 1):
                if not reachable(remaining - (1 - g), slots - 1, g):
                    continue
                prefix.append(g)
                rec(prefix, g, remaining - (1 - g))
                prefix.pop()

        rec([], 0, g_sum)
        return out


def _sub_multisets(parent: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    counts: dict[int, int] = {}
    for g in parent:
        counts[g] = counts.get(g, 0) + 1
    keys = sorted(counts)

    def rec(idx: int, acc: list[int]) -> Iterator[tuple[int, ...]]:
        if idx == len(keys):
            yield tuple(acc)
            return
        g = keys[idx]
        for c in range(counts[g] + 1):
            yield from rec(idx + 1, acc + [g] * c)

    yield from rec(0, [])


@dataclass(frozen=True)
class ExpectedEquality:
    types: tuple[PointType, ...]
    value: int
    note: str = ""


@dataclass(frozen=True)
class Scenario:
    order: int
    trace_on_S: int
    q: int = 1
    capacities: tuple[Capacity, ...] = ()
    projections: tuple[ProjectionBound, ...] = ()
    forced_zero: tuple[PointType, ...] = ()
    curve_policy: CurvePolicy = field(default_factory=CurvePolicy)
    max_multiplicity: int | None = DEFAULT_MAX_MULTIPLICITY
    g_sum_range: tuple[int | None, int | None] = DEFAULT_G_SUM_RANGE
    rank_S: int | None = None
    expected_equalities: tuple[ExpectedEquality, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        if self.order < 2:
            raise UsageError(f"order must be >= 2, got {self.order}")
        if self.q < 1:
            raise UsageError(f"q must be >= 1, got {self.q}")
        if self.rank_S is not None and self.q * euler_phi(self.order) + self.rank_S > 22:
            raise UsageError(
                f"q*phi(I) + rank_S = {self.q * euler_phi(self.order) + self.rank_S} exceeds 22"
            )
        for t in self._mentioned_types():
            if t.order != self.order:
                raise UsageError(f"{t} does not belong to order {self.order}")
            if not t.isolated:
                raise UsageError(f"{t} is not an isolated type")

    def _mentioned_types(self) -> Iterator[PointType]:
        for c in self.capacities:
            yield from c.types
        yield from self.forced_zero
        for e in self.expected_equalities:
            yield from e.types

    @property
    def euler(self) -> int:
        return euler_characteristic(self.order, self.trace_on_S, self.q)


# ---------------------------------------------------------------------------
# projections and capacities
# ---------------------------------------------------------------------------

def project_type(t: PointType, k: int) -> PointType | CurvePoint:
    """Type of the image of a fixed point of ``sigma`` under ``sigma^k``.

    The power has order ``I' = I / gcd(I, k)``; normalizing it by its action on
    the 2-form leaves the exponents as ``(i mod I', j mod I')``.
    """
    if k < 1:
        raise UsageError(f"power must be positive, got {k}")
    target = t.order // gcd(t.order, k)
    if target == 1:
        raise UsageError(f"sigma^{k} is the identity for order {t.order}")
    image = PointType(target, t.i, t.j)
    return image if image.isolated else CurvePoint(target)


def _fmt_sum(types: Sequence[PointType]) -> str:
    return " + ".join(t.label for t in types)


def capacity_constraints(s: Scenario, system: ConstraintSystem | None = None) -> list[LinearRow]:
    """Rows for explicit capacities, projection bounds and forced zeros."""
    system = system or build_holomorphic_system(s.order)
    rows: list[LinearRow] = []
    for c in s.capacities:
        rows.append(system.row({t.label: 1 for t in c.types}, c.sense, c.bound,
                               f"{_fmt_sum(c.types)} {c.sense} {c.bound}"))
    for p in s.projections:
        groups: dict[PointType, list[PointType]] = {}
        for t in isolated_types(s.order):
            image = project_type(t, p.power)
            if isinstance(image, PointType):
                groups.setdefault(image, []).append(t)
        for image, bound in sorted(p.bounds.items()):
            members = groups.get(image, [])
            if members:
                rows.append(system.row({t.label: 1 for t in members}, "<=", bound,
                                       f"{_fmt_sum(members)} <= {bound}"))
        if p.absent_zero:
            for image, members in sorted(groups.items()):
                if image not in p.bounds:
                    for t in members:
                        rows.append(system.row({t.label: 1}, "==", 0, f"{t.label} == 0"))
    for t in s.forced_zero:
        rows.append(system.row({t.label: 1}, "==", 0, f"{t.label} == 0"))
    return rows


def build_scenario_system(s: Scenario) -> ConstraintSystem:
    """Holomorphic system plus capacities plus ``M + 2*g_sum = chi``."""
    system = build_holomorphic_system(s.order)
    euler_terms = {t.label: 1 for t in isolated_types(s.order)}
    euler_terms[G_SUM] = 2
    euler_row = system.row(euler_terms, "==", s.euler, f"M + 2*g_sum == {s.euler}")
    return system.extend(capacity_constraints(s, system) + [euler_row])


# ---------------------------------------------------------------------------
# solution sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionSet:
    order: int
    configs: tuple[FixedLocusConfig, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        unique = {c.sort_key(): c for c in self.configs}
        object.__setattr__(self, "configs", tuple(unique[k] for k in sorted(unique)))

    def __len__(self) -> int:
        return len(self.configs)

    def __iter__(self) -> Iterator[FixedLocusConfig]:
        return iter(self.configs)

    def __getitem__(self, idx: int) -> FixedLocusConfig:
        return self.configs[idx]

    def to_json(self) -> dict:
        return {
            "scenario": self.name,
            "order": self.order,
            "status": "feasible" if self.configs else "infeasible",
            "solutions": [
                {
                    "points": [{"type": [t.i, t.j], "count": m} for t, m in c.points],
                    "M": c.isolated_count,
                    "N": c.curves.count,
                    "genera": list(c.curves.genera),
                    "g_sum": c.curves.g_sum,
                    "euler": c.euler,
                }
                for c in self.configs
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> SolutionSet:
        order = int(doc["order"])
        configs = []
        for sol in doc["solutions"]:
            points = tuple((PointType(order, *p["type"]), int(p["count"])) for p in sol["points"])
            cfg = FixedLocusConfig(order, points, CurveContribution(tuple(sol["genera"])), int(sol["euler"]))
            if cfg.isolated_count != sol["M"] or cfg.curves.count != sol["N"]:
                raise UsageError(f"inconsistent M/N in solution {sol}")
            configs.append(cfg)
        return cls(order, tuple(configs), doc.get("scenario", ""))


# ---------------------------------------------------------------------------
# the search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Compiled:
    """Integer-scaled reduced problem; plain tuples so it pickles for workers."""

    free: tuple[int, ...]                       # variable indices in search order
    domains: tuple[tuple[int, int], ...]        # per free variable
    pivots: tuple[tuple[int, int, tuple[int, ...], int], ...]  # (var, const, coeffs over free, denom)
    ineqs: tuple[tuple[tuple[int, ...], int], ...]             # sum(a_f * f) <= b
    g_index: int
    g_values: frozenset[int]
    nvars: int


def _var_domains(s: Scenario, system: ConstraintSystem) -> list[tuple[int | None, int | None]]:
    lo_g, hi_g = s.g_sum_range
    doms: list[tuple[int | None, int | None]] = []
    for v in system.variables:
        if v == G_SUM:
            doms.append((lo_g, hi_g))
        else:
            doms.append((0, s.max_multiplicity))
    # propagate every row (equalities in both directions) over the box
    rows: list[tuple[tuple[int, ...], int]] = []
    for row in system.equalities + system.inequalities:
        denom = reduce(lcm, (x.denominator for x in (*row.coeffs, row.rhs)), 1)
        coeffs = tuple(int(c * denom) for c in row.coeffs)
        rhs = int(row.rhs * denom)
        if row.sense in ("==", "<="):
            rows.append((coeffs, rhs))
        if row.sense in ("==", ">="):
            rows.append((tuple(-c for c in coeffs), -rhs))
    tightened = _propagate(doms, rows)
    return doms if tightened is None else tightened


def _compile(s: Scenario) -> _Compiled | None:
    system = build_scenario_system(s)
    names = system.variables
    g_index = names.index(G_SUM)
    doms = _var_domains(s, system)

    lo_g, hi_g = doms[g_index]
    if lo_g is None or hi_g is None:
        raise UnboundedError("g_sum has no finite search range; set g_sum_range (bounds.g_sum in scenario files)")
    if not s.curve_policy.is_bounded():
        raise UnboundedError(
            "curve policy leaves the number of fixed curves open; set max_curves, "
            "genus_max=0, contained_in or exact"
        )
    g_values = s.curve_policy.g_sum_values(lo_g, hi_g)
    if not g_values:
        return None
    doms[g_index] = (min(g_values), max(g_values))

    def size(k: int) -> float:
        lo, hi = doms[k]
        return float("inf") if lo is None or hi is None else hi - lo

    # big domains first, so they end up as pivots and the search runs over small ones
    col_order = sorted(range(len(names)), key=lambda k: (-size(k), k))
    rows, piv = rref([list(r.coeffs) + [r.rhs] for r in system.equalities], col_order)
    if -1 in piv:
        return None
    free = sorted((k for k in range(len(names)) if k not in piv), key=lambda k: (size(k), k))
    for k in free:
        if size(k) == float("inf"):
            raise UnboundedError(f"free variable {names[k]} has no finite bound")
    fpos = {k: n for n, k in enumerate(free)}

    pivots = []
    subst: dict[int, tuple[Fraction, list[Fraction]]] = {}
    for row, p in zip(rows, piv):
        coeffs = [-row[k] for k in free]
        subst[p] = (row[-1], coeffs)
        denom = reduce(lcm, (x.denominator for x in [row[-1], *coeffs]), 1)
        pivots.append((p, int(row[-1] * denom), tuple(int(c * denom) for c in coeffs), denom))

    def affine(coeffs: Sequence[Fraction]) -> tuple[Fraction, list[Fraction]]:
        const = Fraction(0)
        lin = [Fraction(0)] * len(free)
        for k, c in enumerate(coeffs):
            if not c:
                continue
            if k in subst:
                c0, cs = subst[k]
                const += c * c0
                for n, x in enumerate(cs):
                    lin[n] += c * x
            else:
                lin[fpos[k]] += c
        return const, lin

    ineqs = []

    def add_le(const: Fraction, lin: list[Fraction], bound: Fraction) -> None:
        # const + lin.f <= bound, scaled to integers
        denom = reduce(lcm, (x.denominator for x in [const, bound, *lin]), 1)
        ineqs.append((tuple(int(x * denom) for x in lin), int((bound - const) * denom)))

    for row in system.inequalities:
        const, lin = affine(row.coeffs)
        if row.sense == "<=":
            add_le(const, lin, row.rhs)
        else:
            add_le(-const, [-x for x in lin], -row.rhs)
    for p in subst:
        lo, hi = doms[p]
        unit = [Fraction(0)] * len(names)
        unit[p] = Fraction(1)
        const, lin = affine(unit)
        if hi is not None:
            add_le(const, lin, Fraction(hi))
        if lo is not None:
            add_le(-const, [-x for x in lin], Fraction(-lo))

    domains = _propagate([doms[k] for k in free], ineqs)
    if domains is None:
        return None
    return _Compiled(
        free=tuple(free),
        domains=tuple(domains),
        pivots=tuple(pivots),
        ineqs=tuple(ineqs),
        g_index=g_index,
        g_values=frozenset(g_values),
        nvars=len(names),
    )


def _propagate(domains: Sequence[tuple], ineqs: Sequence[tuple[tuple[int, ...], int]]) -> list[tuple] | None:
    """Shrink box domains against ``sum(a*f) <= b`` rows until nothing changes.

    A ``None`` endpoint is unbounded.  Returns ``None`` when some domain
    becomes empty.
    """
    doms = list(domains)

    def low_term(c: int, dom: tuple) -> int | None:
        end = dom[0] if c > 0 else dom[1]
        return None if end is None else c * end

    changed = True
    while changed:
        changed = False
        for coeffs, bound in ineqs:
            support = [n for n, c in enumerate(coeffs) if c]
            terms = {n: low_term(coeffs[n], doms[n]) for n in support}
            open_terms = [n for n in support if terms[n] is None]
            if len(open_terms) > 1:
                continue
            known = sum(v for v in terms.values() if v is not None)
            for n in support:
                if open_terms and open_terms[0] != n:
                    continue
                c = coeffs[n]
                slack = bound - (known - (terms[n] or 0))
                lo, hi = doms[n]
                if c > 0:
                    cap = slack // c
                    new = (lo, cap if hi is None else min(hi, cap))
                else:
                    floor_ = -(slack // -c)
                    new = (floor_ if lo is None else max(lo, floor_), hi)
                if new[0] is not None and new[1] is not None and new[0] > new[1]:
                    return None
                if new != (lo, hi):
                    doms[n] = new
                    changed = True
                    # later bounds in this row used the stale term; recheck next sweep
                    break
    return doms


def _search(prob: _Compiled, first_values: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    """Depth-first search over the free variables; returns full integer assignments.

    After each assignment the remaining box is re-propagated against every
    inequality, so infeasible branches are cut as early as interval reasoning
    allows.
    """
    nfree = len(prob.free)
    results: list[tuple[int, ...]] = []

    def leaf(values: Sequence[int]) -> None:
        full = [0] * prob.nvars
        for k, v in zip(prob.free, values):
            full[k] = v
        for var, const, coeffs, denom in prob.pivots:
            num = const + sum(c * v for c, v in zip(coeffs, values))
            if num % denom:
                return
            full[var] = num // denom
        if full[prob.g_index] in prob.g_values:
            results.append(tuple(full))

    def rec(depth: int, doms: list[tuple[int, int]]) -> None:
        if depth == nfree:
            leaf([lo for lo, _ in doms])
            return
        lo, hi = doms[depth]
        candidates = range(lo, hi + 1)
        if depth == 0 and first_values is not None:
            candidates = [v for v in first_values if lo <= v <= hi]
        for v in candidates:
            trial = list(doms)
            trial[depth] = (v, v)
            trial = _propagate(trial, prob.ineqs)
            if trial is not None:
                rec(depth + 1, trial)

    root = _propagate(list(prob.domains), prob.ineqs)
    if root is not None:
        rec(0, root)
    return results


def _search_chunk(args: tuple[_Compiled, list[int]]) -> list[tuple[int, ...]]:
    prob, chunk = args
    return _search(prob, chunk)


def solve_integer_points(s: Scenario, jobs: int = 1) -> list[dict[str, int]]:
    """All integer assignments of the scenario system within the search bounds."""
    prob = _compile(s)
    if prob is None:
        return []
    if jobs > 1 and prob.free:
        lo, hi = prob.domains[0]
        first = list(range(lo, hi + 1))
        chunks = [first[n::jobs] for n in range(jobs) if first[n::jobs]]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = [r for part in pool.map(_search_chunk, [(prob, c) for c in chunks]) for r in part]
    else:
        raw = _search(prob)
    names = build_holomorphic_system(s.order).variables
    return [dict(zip(names, r)) for r in sorted(raw)]


def enumerate_configs(s: Scenario, jobs: int = 1) -> SolutionSet:
    """Every fixed-locus configuration compatible with the scenario.

    An infeasible scenario yields an empty set.  Each emitted configuration is
    re-checked against the scenario system and, independently, against the
    holomorphic identity evaluated in the cyclotomic field.
    """
    system = build_scenario_system(s)
    types = isolated_types(s.order)
    chi = s.euler
    configs = []
    for point in solve_integer_points(s, jobs):
        if not system.satisfied_by(point):
            raise InconsistencyError(f"enumerated point violates the system: {point}")
        pts = tuple((t, point[t.label]) for t in types)
        for genera in s.curve_policy.expand(point[G_SUM]):
            cfg = FixedLocusConfig(s.order, pts, CurveContribution(genera), chi)
            if not holomorphic_residual(cfg).is_zero():
                raise InconsistencyError(f"holomorphic identity fails for {cfg}")
            configs.append(cfg)
    log.debug("scenario %s: %d configurations", s.name or s.order, len(configs))
    return SolutionSet(s.order, tuple(configs), s.name)


# ---------------------------------------------------------------------------
# equality checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualityCheck:
    equality: ExpectedEquality
    observed: tuple[int, ...]

    @property
    def holds(self) -> bool:
        return bool(self.observed) and all(v == self.equality.value for v in self.observed)

    def __str__(self) -> str:
        lhs = _fmt_sum(self.equality.types)
        status = "holds" if self.holds else "FAILS"
        return f"{lhs} = {self.equality.value}: {status} (observed {list(self.observed)})"


def verify_equalities(s: Scenario, solutions: SolutionSet | None = None) -> list[EqualityCheck]:
    """Evaluate each expected equality of the scenario in every solution.

    Report-only: a failing equality is returned with the observed sums, one per
    solution, rather than raised.
    """
    if solutions is None:
        solutions = enumerate_configs(s)
    out = []
    for eq in s.expected_equalities:
        observed = tuple(sum(c.multiplicity(t) for t in eq.types) for c in solutions)
        out.append(EqualityCheck(eq, observed))
    return out


def verify_equalities_42(s: Scenario, solutions: SolutionSet | None = None) -> list[EqualityCheck]:
    if s.order != 42:
        raise UsageError(f"expected an order-42 scenario, got order {s.order}")
    return verify_equalities(s, solutions)
