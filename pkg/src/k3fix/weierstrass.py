"""Diagonal automorphisms of monomial Weierstrass models ``y^2 = x^3 + sum a x^p t^q``.

A diagonal map ``(x, y, t) -> (zeta^wx x, zeta^wy y, zeta^wt t)`` preserves
the surface exactly when every monomial picks up the same power of zeta.
On the affine chart the holomorphic 2-form is proportional to
``dx ^ dt / y``, so it is scaled by ``zeta^(wx + wt - wy)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Any, Mapping, Sequence

from .errors import UsageError


@dataclass(frozen=True)
class Monomial:
    coeff: int
    x: int = 0
    y: int = 0
    t: int = 0

    def __post_init__(self) -> None:
        if min(self.x, self.y, self.t) < 0:
            raise UsageError(f"negative exponent in {self}")

    def __str__(self) -> str:
        parts = [f"{v}^{e}" if e > 1 else v for v, e in (("x", self.x), ("y", self.y), ("t", self.t)) if e]
        body = "*".join(parts) or "1"
        return body if self.coeff == 1 else f"{self.coeff}*{body}"


@dataclass(frozen=True)
class MonomialWeierstrass:
    """Right-hand side monomials of ``y^2 = ...``; must contain ``x^3``."""

    rhs: tuple[Monomial, ...]
    name: str = ""

    def __post_init__(self) -> None:
        if not any(m.x == 3 and m.y == 0 and m.t == 0 for m in self.rhs):
            raise UsageError("right-hand side must contain x^3")
        if any(m.coeff == 0 for m in self.rhs):
            raise UsageError("zero coefficient in right-hand side")

    def monomials(self) -> list[tuple[str, Monomial]]:
        """Every monomial of the equation, the left-hand ``y^2`` first."""
        return [("lhs", Monomial(1, y=2))] + [("rhs", m) for m in self.rhs]

    def __str__(self) -> str:
        return "y^2 = " + " + ".join(str(m) for m in self.rhs)


@dataclass(frozen=True)
class DiagonalAction:
    order: int
    wx: int
    wy: int
    wt: int

    def __post_init__(self) -> None:
        if self.order < 1:
            raise UsageError(f"order must be >= 1, got {self.order}")
        for name in ("wx", "wy", "wt"):
            object.__setattr__(self, name, getattr(self, name) % self.order)

    @property
    def weights(self) -> tuple[int, int, int]:
        return (self.wx, self.wy, self.wt)

    def power(self, k: int) -> DiagonalAction:
        return DiagonalAction(self.order, k * self.wx, k * self.wy, k * self.wt)

    def automorphism_order(self) -> int:
        """Order of the weight vector in ``(Z/n)^3``."""
        return self.order // gcd(self.order, *self.weights)


class NotInvariantError(UsageError):
    def __init__(self, weights: Sequence[tuple[str, int]], order: int) -> None:
        listing = ", ".join(f"{m}: {w}" for m, w in weights)
        super().__init__(f"monomial weights differ mod {order}: {listing}")
        self.weights = list(weights)


def monomial_weight(m: Monomial, a: DiagonalAction) -> int:
    return (m.x * a.wx + m.y * a.wy + m.t * a.wt) % a.order


def check_invariance(e: MonomialWeierstrass, a: DiagonalAction) -> int:
    """Common weight of all monomials mod ``a.order``.

    Raises ``NotInvariantError`` listing each monomial's weight when they differ.
    """
    weights = [(str(m), monomial_weight(m, a)) for _, m in e.monomials()]
    values = {w for _, w in weights}
    if len(values) != 1:
        raise NotInvariantError(weights, a.order)
    return values.pop()


@dataclass(frozen=True)
class TwoFormWeight:
    weight: int
    order: int

    @property
    def is_unit(self) -> bool:
        return gcd(self.weight, self.order) == 1

    @property
    def symplectic_or_trivial(self) -> bool:
        return self.weight == 0


def two_form_weight(a: DiagonalAction) -> TwoFormWeight:
    return TwoFormWeight((a.wx + a.wt - a.wy) % a.order, a.order)


@dataclass(frozen=True)
class WeierstrassReport:
    equation: MonomialWeierstrass
    action: DiagonalAction
    common_weight: int | None
    monomial_weights: tuple[tuple[str, int], ...]
    two_form: TwoFormWeight

    @property
    def non_symplectic(self) -> bool:
        return (
            self.common_weight is not None
            and self.two_form.is_unit
            and self.action.automorphism_order() == self.action.order
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.equation.name,
            "equation": str(self.equation),
            "order": self.action.order,
            "weights": list(self.action.weights),
            "automorphism_order": self.action.automorphism_order(),
            "invariant": self.common_weight is not None,
            "common_weight": self.common_weight,
            "monomial_weights": [{"monomial": m, "weight": w} for m, w in self.monomial_weights],
            "two_form_weight": self.two_form.weight,
            "two_form_weight_is_unit": self.two_form.is_unit,
            "non_symplectic": self.non_symplectic,
        }


def verify(e: MonomialWeierstrass, a: DiagonalAction) -> WeierstrassReport:
    weights = tuple((str(m), monomial_weight(m, a)) for _, m in e.monomials())
    try:
        common: int | None = check_invariance(e, a)
    except NotInvariantError:
        common = None
    return WeierstrassReport(e, a, common, weights, two_form_weight(a))


def parse_model(doc: Mapping[str, Any]) -> tuple[MonomialWeierstrass, DiagonalAction]:
    """Read ``{"name", "comment", "rhs": [{"coeff", "x", "t"}...], "action": {"order", "weights": [wx, wy, wt]}}``."""
    try:
        rhs = tuple(
            Monomial(int(m.get("coeff", 1)), int(m.get("x", 0)), int(m.get("y", 0)), int(m.get("t", 0)))
            for m in doc["rhs"]
        )
        action = doc["action"]
        wx, wy, wt = (int(w) for w in action["weights"])
        return (
            MonomialWeierstrass(rhs, str(doc.get("name", ""))),
            DiagonalAction(int(action["order"]), wx, wy, wt),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"malformed Weierstrass model: {exc!r}") from exc
