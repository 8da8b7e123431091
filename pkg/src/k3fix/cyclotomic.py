"""Exact arithmetic in the cyclotomic field Q(zeta_n).

Elements are stored as rational coordinates in the power basis
``1, zeta, ..., zeta^(phi(n)-1)`` modulo the n-th cyclotomic polynomial, so
every element has exactly one representation and zero-testing is a
coordinate comparison.

Polynomials are plain tuples of coefficients, lowest degree first.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from .errors import UsageError
from .linalg import solve_integer

Rational = Union[int, Fraction]
Poly = tuple  # coefficients, lowest degree first

__all__ = [
    "CyclotomicNumber",
    "add",
    "cyclotomic_polynomial",
    "divisors",
    "euler_phi",
    "invert",
    "mobius",
    "multiply",
    "negate",
    "poly_mul",
    "primitive_trace",
    "rational_coordinates",
    "root_power",
]


# ---------------------------------------------------------------------------
# integer helpers
# ---------------------------------------------------------------------------

def divisors(n: int) -> list[int]:
    if n < 1:
        raise UsageError(f"divisors need n >= 1, got {n}")
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    large = [n // d for d in reversed(small) if d * d != n]
    return small + large


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    if n < 1:
        raise UsageError(f"euler_phi needs n >= 1, got {n}")
    result = n
    for p in _factorize(n):
        result = result // p * (p - 1)
    return result


def mobius(n: int) -> int:
    """Moebius function by trial-division factorization."""
    if n < 1:
        raise UsageError(f"mobius needs n >= 1, got {n}")
    factors = _factorize(n)
    if any(e > 1 for e in factors.values()):
        return 0
    return -1 if len(factors) % 2 else 1


# ---------------------------------------------------------------------------
# polynomials over Q
# ---------------------------------------------------------------------------

def _trim(p: Sequence) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_mul(a: Sequence, b: Sequence) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _poly_divmod(a: Sequence, b: Sequence) -> tuple[Poly, Poly]:
    """Long division over Q; exact integer quotients are kept as int."""
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(_trim(a))
    lead = b[-1]
    if len(rem) < len(b):
        return (), tuple(rem)
    quot = [0] * (len(rem) - len(b) + 1)
    for k in range(len(rem) - len(b), -1, -1):
        c = rem[k + len(b) - 1]
        if c == 0:
            continue
        c = c * lead if lead in (1, -1) else Fraction(c) / lead
        quot[k] = c
        for i, y in enumerate(b):
            rem[k + i] -= c * y
    return _trim(quot), _trim(rem[: len(b) - 1])


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> Poly:
    """Integer coefficients of Phi_n, lowest degree first.

    Computed as (x^n - 1) divided by Phi_d for every proper divisor d of n.
    """
    if n < 1:
        raise UsageError(f"cyclotomic_polynomial needs n >= 1, got {n}")
    num: Poly = (-1,) + (0,) * (n - 1) + (1,)
    for d in divisors(n)[:-1]:
        num, rem = _poly_divmod(num, cyclotomic_polynomial(d))
        if rem:
            raise ArithmeticError(f"Phi_{d} does not divide x^{n}-1")
    return tuple(int(c) for c in num)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of zeta_n^k for k = 0 .. n-1 (all integral)."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x, then reduce the overflow with the monic Phi_n
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(rows)


@lru_cache(maxsize=None)
def _reduction_rows(n: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of x^k mod Phi_n for k = 0 .. 2*phi(n) - 2."""
    deg = euler_phi(n)
    table = _power_table(n)
    return tuple(table[k % n] for k in range(max(2 * deg - 1, 1)))


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------

def _as_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class CyclotomicNumber:
    """Immutable element of Q(zeta_n) in the power basis."""

    __slots__ = ("conductor", "coords", "_hash")

    def __init__(self, conductor: int, coords: Iterable[Rational]) -> None:
        if conductor < 1:
            raise UsageError(f"conductor must be >= 1, got {conductor}")
        coords = tuple(_as_fraction(c) for c in coords)
        if len(coords) != euler_phi(conductor):
            raise UsageError(
                f"Q(zeta_{conductor}) needs {euler_phi(conductor)} coordinates, got {len(coords)}"
            )
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicNumber is immutable")

    # constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> CyclotomicNumber:
        return cls(n, [0] * euler_phi(n))

    @classmethod
    def rational(cls, n: int, value: Rational) -> CyclotomicNumber:
        coords = [Fraction(0)] * euler_phi(n)
        coords[0] = _as_fraction(value)
        return cls(n, coords)

    @classmethod
    def one(cls, n: int) -> CyclotomicNumber:
        return cls.rational(n, 1)

    @classmethod
    def from_polynomial(cls, n: int, poly: Sequence[Rational]) -> CyclotomicNumber:
        """Reduce an arbitrary polynomial in zeta modulo Phi_n."""
        table = _power_table(n)
        out = [Fraction(0)] * euler_phi(n)
        for k, c in enumerate(poly):
            if c == 0:
                continue
            for i, t in enumerate(table[k % n]):
                if t:
                    out[i] += c * t
        return cls(n, out)

    # predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coords[0]

    # arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> CyclotomicNumber:
        if isinstance(other, CyclotomicNumber):
            if other.conductor != self.conductor:
                raise UsageError(
                    f"conductor mismatch: {self.conductor} vs {other.conductor}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber.rational(self.conductor, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicNumber(self.conductor, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self) -> CyclotomicNumber:
        return CyclotomicNumber(self.conductor, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.conductor, [a * other for a in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        deg = len(self.coords)
        prod = [Fraction(0)] * max(2 * deg - 1, 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        prod[i + j] += a * b
        rows = _reduction_rows(self.conductor)
        out = [Fraction(0)] * deg
        for k, c in enumerate(prod):
            if c:
                for i, t in enumerate(rows[k]):
                    if t:
                        out[i] += c * t
        return CyclotomicNumber(self.conductor, out)

    __rmul__ = __mul__

    def inverse(self) -> CyclotomicNumber:
        """Multiplicative inverse from the integer multiplication matrix.

        After clearing denominators, column ``k`` holds ``d * self * zeta^k``;
        solving against ``e_0`` with fraction-free elimination avoids the
        coefficient swell of a Euclidean algorithm over ``Q``.
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        phi = cyclotomic_polynomial(self.conductor)
        deg = len(self.coords)
        d = lcm(*(c.denominator for c in self.coords))
        col = [int(c * d) for c in self.coords]
        columns = []
        for _ in range(deg):
            columns.append(col)
            top = col[-1]
            col = [0] + col[:-1]
            if top:
                col = [c - top * phi[i] for i, c in enumerate(col)]
        matrix = [[columns[k][i] for k in range(deg)] for i in range(deg)]
        x = solve_integer(matrix, [1] + [0] * (deg - 1))
        return CyclotomicNumber(self.conductor, [c * d for c in x])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return CyclotomicNumber(self.conductor, [a / other for a in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> CyclotomicNumber:
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicNumber.one(self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # Galois action and embeddings -----------------------------------------

    def galois(self, k: int) -> CyclotomicNumber:
        """Image under the automorphism zeta -> zeta^k (k coprime to n)."""
        n = self.conductor
        if gcd(k, n) != 1:
            raise UsageError(f"{k} is not a unit mod {n}")
        poly = [Fraction(0)] * n
        for e, c in enumerate(self.coords):
            poly[(e * k) % n] += c
        return CyclotomicNumber.from_polynomial(n, poly)

    def trace(self) -> Fraction:
        """Sum of all Galois conjugates; always rational."""
        n = self.conductor
        total = CyclotomicNumber.zero(n)
        for k in range(1, n + 1):
            if gcd(k, n) == 1:
                total = total + self.galois(k)
        return total.to_rational()

    def to_complex(self, k: int = 1) -> complex:
        """Evaluate under the embedding zeta -> exp(2 pi i k / n)."""
        z = cmath.exp(2j * cmath.pi * k / self.conductor)
        return sum(float(c) * z**e for e, c in enumerate(self.coords))

    # comparison ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coords[0] == other
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return self.conductor == other.conductor and self.coords == other.coords

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.conductor, self.coords))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"CyclotomicNumber({self.conductor}, {[str(c) for c in self.coords]})"

    def __str__(self) -> str:
        terms = []
        for e, c in enumerate(self.coords):
            if c == 0:
                continue
            if e == 0:
                terms.append(str(c))
            else:
                mono = "z" if e == 1 else f"z^{e}"
                terms.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def root_power(n: int, k: int) -> CyclotomicNumber:
    """zeta_n^k in the power basis (k is taken mod n)."""
    return CyclotomicNumber(n, _power_table(n)[k % n])


def add(a: CyclotomicNumber, b: CyclotomicNumber) -> CyclotomicNumber:
    return a + b


def negate(a: CyclotomicNumber) -> CyclotomicNumber:
    return -a


def multiply(a: CyclotomicNumber, b: CyclotomicNumber) -> CyclotomicNumber:
    return a * b


def invert(a: CyclotomicNumber) -> CyclotomicNumber:
    return a.inverse()


def rational_coordinates(a: CyclotomicNumber) -> list[Fraction]:
    return list(a.coords)


def primitive_trace(n: int) -> int:
    """Sum of all primitive n-th roots of unity, computed in Q(zeta_n).

    The result always equals the Moebius function of n; it is derived here
    from the field arithmetic, not from a factorization.
    """
    total = CyclotomicNumber.zero(n)
    for k in range(1, n + 1):
        if gcd(k, n) == 1:
            total = total + root_power(n, k)
    value = total.to_rational()
    if value.denominator != 1:
        raise ArithmeticError(f"primitive trace of {n} is not integral: {value}")
    return int(value)
