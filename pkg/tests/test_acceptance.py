"""Acceptance criteria, one test each, with a timed PASS/FAIL line per criterion."""

from __future__ import annotations

import cmath
import random
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from math import gcd

import pytest
import sympy

from k3fix import cyclotomic, lefschetz
from k3fix.cyclotomic import (
    CyclotomicNumber,
    cyclotomic_polynomial,
    divisors,
    euler_phi,
    poly_mul,
    primitive_trace,
)
from k3fix.enumeration import build_scenario_system, enumerate_configs, verify_equalities_42
from k3fix.lattice import RankScenario, deduce_ranks
from k3fix.lefschetz import (
    G_SUM,
    AffineExpr,
    build_holomorphic_system,
    euler_characteristic,
    holomorphic_residual,
    isolated_types,
)
from k3fix.scenarios import SHIPPED, load_shipped
from k3fix.weierstrass import DiagonalAction, Monomial, MonomialWeierstrass, check_invariance, two_form_weight

from .conftest import ACCEPTANCE_LINES


def _clear_caches() -> None:
    for fn in (cyclotomic.cyclotomic_polynomial, cyclotomic._power_table, cyclotomic._reduction_rows,
               lefschetz._point_term, lefschetz.curve_unit_term, lefschetz.build_holomorphic_system):
        fn.cache_clear()


@contextmanager
def criterion(number: int, title: str, limit: float | None = None):
    _clear_caches()
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LINES.append(f"FAIL  [{number}] {title} ({elapsed:.2f}s): {exc}")
        print(ACCEPTANCE_LINES[-1])
        raise
    budget = f" < {limit:g}s" if limit is not None else ""
    ACCEPTANCE_LINES.append(f"PASS  [{number}] {title} ({elapsed:.2f}s{budget})")
    print(ACCEPTANCE_LINES[-1])


def _points(config) -> dict[tuple[int, int], int]:
    return {(t.i, t.j): m for t, m in config.points}


def test_criterion_1_traces():
    with criterion(1, "primitive traces 21 -> 1, 42 -> -1", 1.0):
        assert primitive_trace(21) == 1
        assert primitive_trace(42) == -1


def test_criterion_2_euler_characteristics():
    with criterion(2, "Euler characteristics 13 and 11", 1.0):
        assert euler_characteristic(21, 10, 1) == 13
        assert euler_characteristic(42, 10, 1) == 11


EXPECTED_21 = {
    "m[6,16]": (0, {"m[2,20]": Fraction(-1, 2), "m[3,19]": Fraction(-1, 2), "m[5,17]": Fraction(1, 2), G_SUM: 3}),
    "m[7,15]": (1, {"m[3,19]": -3, G_SUM: 8}),
    "m[8,14]": (1, {"m[2,20]": Fraction(-9, 2), "m[3,19]": Fraction(-3, 2), "m[5,17]": Fraction(-3, 2), G_SUM: 17}),
    "m[9,13]": (1, {"m[2,20]": -5, "m[3,19]": -1, "m[5,17]": -2, G_SUM: 18}),
    "m[10,12]": (3, {"m[2,20]": Fraction(-15, 2), "m[3,19]": Fraction(1, 2), "m[4,18]": -3,
                     "m[5,17]": Fraction(1, 2), G_SUM: 21}),
    "m[11,11]": (1, {"m[2,20]": -3, "m[4,18]": -1, G_SUM: 9}),
}


def test_criterion_3_order21_relations():
    with criterion(3, "order-21 relations reproduced coefficient for coefficient", 5.0):
        free = ["m[2,20]", "m[3,19]", "m[4,18]", "m[5,17]", G_SUM]
        solved = build_holomorphic_system(21).solve_for(free)
        assert set(solved) == set(EXPECTED_21)
        for name, (c, coeffs) in EXPECTED_21.items():
            expected = AffineExpr(Fraction(c), {v: Fraction(coeffs.get(v, 0)) for v in free})
            assert solved[name] == expected, f"{name}: {solved[name]}"


def test_criterion_4_order21_classification():
    with criterion(4, "order-21 scenario has exactly one configuration", 60.0):
        sol = enumerate_configs(load_shipped("order21"))
        assert len(sol) == 1
        c = sol[0]
        assert _points(c) == {(2, 20): 3, (3, 19): 2, (4, 18): 1, (5, 17): 1, (6, 16): 1, (7, 15): 3}
        assert c.isolated_count == 11 and c.curves.genera == (0,) and c.euler == 13


def test_criterion_5_order42_classification():
    with criterion(5, "order-42 scenario has exactly one configuration; six equalities tight", 60.0):
        s = load_shipped("order42")
        sol = enumerate_configs(s)
        assert len(sol) == 1
        c = sol[0]
        assert _points(c) == {(2, 41): 3, (3, 40): 2, (4, 39): 1, (5, 38): 1, (6, 37): 1, (7, 36): 1}
        assert c.isolated_count == 9 and c.curves.genera == (0,) and c.euler == 11
        checks = verify_equalities_42(s, sol)
        assert [chk.equality.value for chk in checks] == [3, 2, 1, 1, 1, 1]
        assert all(chk.holds for chk in checks), [str(chk) for chk in checks]


def test_criterion_6_order7_consistency():
    with criterion(6, "order 7 with two rational curves has 13 isolated points (brute-force checked)", 10.0):
        sol = enumerate_configs(load_shipped("order7"))
        assert len(sol) == 1 and sol[0].isolated_count == 13
        assert sol[0].curves.genera == (0, 0) and sol[0].euler == 17
        types = isolated_types(7)
        zeta = [cmath.exp(2j * cmath.pi * k / 7) for k in range(7)]
        lhs = 1 + zeta[6]
        curve = (1 + zeta[1]) / (1 - zeta[1]) ** 2
        terms = [1 / ((1 - zeta[t.i]) * (1 - zeta[t.j])) for t in types]
        brute = []
        for a in range(25):
            for b in range(25 - a):
                for c in range(25 - a - b):
                    if a + b + c + 4 != 17:
                        continue
                    if abs(a * terms[0] + b * terms[1] + c * terms[2] + 2 * curve - lhs) > 1e-6:
                        continue
                    brute.append((a, b, c))
        assert brute == [tuple(sol[0].multiplicity(t) for t in types)] == [(6, 5, 2)]


def test_criterion_7_rank_deduction():
    with criterion(7, "rank deduction for order 7 with invariant rank 16"):
        d = deduce_ranks(RankScenario(order=7, invariant_rank=16))
        assert d.rank_T == 6 and d.forced_trivial


def test_criterion_8_weierstrass():
    with criterion(8, "both order-7 Weierstrass models are invariant with unit 2-form weight"):
        ko = MonomialWeierstrass((Monomial(1, x=3), Monomial(1, x=1, t=3), Monomial(1, t=8)), "X_Ko")
        oz = MonomialWeierstrass((Monomial(1, x=3), Monomial(1, x=1, t=5), Monomial(1, t=4)), "X_OZ")
        for eq, a in ((ko, DiagonalAction(7, 3, 1, 2)), (oz, DiagonalAction(7, 3, 1, 4))):
            assert check_invariance(eq, a) is not None
            assert two_form_weight(a).is_unit


def _random_element(rng: random.Random, n: int) -> CyclotomicNumber:
    return CyclotomicNumber(
        n, [Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(euler_phi(n))]
    )


def test_criterion_9_property_suites():
    with criterion(9, "property suites: axioms x1000, mu, Phi products, embeddings, re-substitution"):
        rng = random.Random(20261016)
        for _ in range(1000):
            n = rng.randint(1, 30)
            a, b, c = (_random_element(rng, n) for _ in range(3))
            assert a + b == b + a and a * b == b * a
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            if not a.is_zero():
                assert a * a.inverse() == 1
            k = rng.choice([k for k in range(1, n + 1) if gcd(k, n) == 1])
            assert abs((a * b).to_complex(k) - a.to_complex(k) * b.to_complex(k)) < 1e-9 * max(1, abs(a.to_complex(k) * b.to_complex(k)))
        for n in range(1, 101):
            assert primitive_trace(n) == sympy.mobius(n)
            prod = (1,)
            for d in divisors(n):
                prod = poly_mul(prod, cyclotomic_polynomial(d))
            assert list(prod) == [-1] + [0] * (n - 1) + [1]
        for name in SHIPPED:
            s = load_shipped(name)
            system = build_scenario_system(s)
            for cfg in enumerate_configs(s):
                assert system.satisfied_by(cfg.assignment())
                assert holomorphic_residual(cfg).is_zero()
                assert cfg.euler == cfg.isolated_count + 2 * cfg.curves.g_sum


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
