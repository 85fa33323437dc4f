"""Acceptance gate: one timed pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as
they are produced.  Criteria 1-7 assert their stated tolerances;
criterion 8 is diagnostic (its tolerances are gated by the unit suite)
and asserts completion within budget only.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

from qhermite2 import PrecisionContext
from qhermite2.coherent import cs_eigen_residual
from qhermite2.exact import (
    GaussianRational,
    Poly,
    bn_squared_exact,
    moment_In_exact,
)
from qhermite2.extremal import carrier_roots, loadings, orthonormality_gram
from qhermite2.qcalculus import (
    deformed_derivative,
    ibp_residual,
    jackson_integral_poly,
    leibniz_residual,
    q_derivative_poly,
)
from qhermite2.qhermite import (
    generating_fn_report,
    hermite2_coeffs,
    hermite2_eval_direct,
    qdiff_equation_check,
)
from qhermite2.qkernel import gen_exponential
from qhermite2.qmeasure import lattice_weight, moment_In, unity_check
from qhermite2.qoscillator import spectrum, verify_algebra

Q_VALUES = (Fraction(3, 10), Fraction(1, 2), Fraction(4, 5))
X_GRID = tuple(
    Fraction(v) for v in (0, "1/2", "-1/2", 1, -1, 2, -2)
)

_CONTEXTS = {q: PrecisionContext(q=q) for q in Q_VALUES}


class _Criterion:
    """Times a criterion body and prints its single verdict line."""

    def __init__(self, number: int, label: str, budget_s: float):
        self.number = number
        self.label = label
        self.budget_s = budget_s
        self.elapsed = None

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self.t0
        verdict = "PASS" if exc_type is None else "FAIL"
        print(
            f"ACCEPTANCE CRITERION {self.number} ({self.label}): "
            f"{verdict} [{self.elapsed:.2f}s]"
        )
        return False

    def assert_budget(self):
        assert self.elapsed is not None and self.elapsed < self.budget_s, (
            f"criterion {self.number} took {self.elapsed:.2f}s, "
            f"budget {self.budget_s}s"
        )


def test_criterion_1_cross_representation():
    with _Criterion(1, "cross-representation agreement", 5.0) as crit:
        tol = 1e-25
        for q, ctx in _CONTEXTS.items():
            tol_mp = ctx.mpf(f"{tol}")
            for n in range(16):
                poly = hermite2_coeffs(n, ctx)
                for x in X_GRID:
                    xv = ctx.mpf(x)
                    direct = hermite2_eval_direct(n, xv, ctx)
                    via = poly.eval_mp(ctx, xv)
                    scale = max(abs(via), ctx.mpf(1))
                    assert abs(direct - via) / scale < tol_mp, (q, n, x)
    crit.assert_budget()


def test_criterion_2_operator_algebra():
    with _Criterion(2, "operator algebra within ulp budget", 5.0) as crit:
        for q, ctx in _CONTEXTS.items():
            for dim in (4, 8, 16, 32):
                report = verify_algebra(dim, ctx, ulp_bound=4)
                assert report.passed, (q, dim)
        half = _CONTEXTS[Fraction(1, 2)]
        levels = [float(v) for _, v in spectrum(2, half).levels]
        assert levels == [1.0, 7.0, 34.0]
    crit.assert_budget()


def test_criterion_3_lattice_moments():
    with _Criterion(3, "lattice moments against closed form", 10.0) as crit:
        ctx = _CONTEXTS[Fraction(1, 2)]
        tol = ctx.mpf("1e-8")
        weight = lattice_weight(61, 120, ctx)
        results = [
            moment_In(n, ctx, K=60, M=120, weight=weight) for n in range(9)
        ]
        for res in results:
            assert res.rel_deviation < tol, res.n
        for n in range(1, 9):
            ratio = results[n].lattice_value / results[n - 1].lattice_value
            want = ctx.mpf(bn_squared_exact(n - 1, ctx.q))
            assert abs(ratio - want) / want < tol, n
            assert moment_In_exact(n, ctx.q) == (
                bn_squared_exact(n - 1, ctx.q) * moment_In_exact(n - 1, ctx.q)
            )
    crit.assert_budget()


def test_criterion_4_resolution_of_unity():
    with _Criterion(4, "resolution-of-unity diagonal", 10.0) as crit:
        ctx = _CONTEXTS[Fraction(1, 2)]
        report = unity_check(6, ctx, K=60, M=120)
        assert report.max_abs_deviation < ctx.mpf("1e-6")
        assert "exact zero" in report.off_diagonal
    crit.assert_budget()


def test_criterion_5_coherent_residual():
    with _Criterion(5, "coherent eigenvector residual bound", 2.0) as crit:
        z_grid = (
            complex(0.5, 0),
            complex(0, 2),
            complex(1.2, -0.9),
            complex(-2, 0),
            complex(1.4, 1.4),
        )
        for q, ctx in _CONTEXTS.items():
            limit = ctx.mpf("1e-30")
            for zc in z_grid:
                rep = cs_eigen_residual(ctx.mpc(zc), 60, ctx)
                assert rep.residual <= rep.bound, (q, zc)
                assert rep.bound < limit, (q, zc)
    crit.assert_budget()


def _gr(v) -> GaussianRational:
    return GaussianRational(Fraction(v), Fraction(0))


def test_criterion_6_calculus_identities():
    with _Criterion(6, "calculus identities", 2.0) as crit:
        u = Poly((_gr(1), _gr(2), _gr(3)))
        v = Poly((_gr(0), _gr(-1), _gr(0), _gr(2)))
        for q, ctx in _CONTEXTS.items():
            tol = ctx.mpf("1e-20")
            # eigenfunction of the deformed derivative
            for x in (Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2)):
                def gex(t):
                    return gen_exponential(t, ctx)

                lhs = deformed_derivative(gex, x, ctx)
                rhs = gen_exponential(ctx.mpf(x), ctx)
                assert abs(lhs - rhs) / abs(rhs) < tol, (q, x)
            # product rule: exact zero residual polynomials
            for variant in ("first", "second"):
                assert leibniz_residual(u, v, variant, q).is_zero(), variant
            # integration by parts, finite and infinite
            for variant in ("ip1", "ip2"):
                assert ibp_residual(u, v, variant, Fraction(1), ctx) < tol
            k_inf = max(80, math.ceil(math.log(1e-20) / math.log(float(q))) + 40)

            def u_dec(t):
                return 1 / (1 + t * t) ** 3

            def v_dec(t):
                return t / (1 + t * t) ** 2

            assert ibp_residual(u_dec, v_dec, "ip3", None, ctx, K=k_inf) < tol
            # fundamental theorem, exact in Q(i)
            for x in (Fraction(1), Fraction(-3, 2)):
                recovered = jackson_integral_poly(q_derivative_poly(v, q), x, q)
                assert recovered == v(x) - v(Fraction(0))
    crit.assert_budget()


def test_criterion_7_difference_equation_and_generating_function():
    with _Criterion(
        7, "difference-equation and generating-function ledger", 5.0
    ) as crit:
        for q, ctx in _CONTEXTS.items():
            one_minus_q = Fraction(1) - q
            assert qdiff_equation_check(0, ctx).is_zero(), q
            expected_n1 = Poly(
                (
                    GaussianRational(Fraction(0), one_minus_q),
                    GaussianRational.ZERO,
                    GaussianRational.I,
                    GaussianRational(one_minus_q, Fraction(0)),
                )
            )
            assert qdiff_equation_check(1, ctx) == expected_n1, q

            rep = generating_fn_report(Fraction(1, 2), ctx.mpf("0.5"), 10, ctx)
            assert rep.matched_hypothesis == "divided-with-qpower-squared", q
            assert all(
                r.is_zero() for r in rep.residuals["divided-with-qpower-squared"]
            ), q
            assert rep.ratios["as-printed"][1] == one_minus_q, q
    crit.assert_budget()


def test_criterion_8_extremal_measure_diagnostics():
    with _Criterion(8, "extremal measure diagnostics", 60.0) as crit:
        ctx = _CONTEXTS[Fraction(1, 2)]
        shallow = carrier_roots(Fraction(6), ctx, k_terms=20)
        deep = carrier_roots(Fraction(6), ctx, k_terms=40)
        worst_move = max(
            abs(a.x - b.x) for a, b in zip(shallow, deep)
        ) if shallow and len(shallow) == len(deep) else None
        points = loadings(carrier_roots(Fraction(40), ctx), ctx)
        total = sum(p.sigma0 for p in points)
        _, gram_worst = orthonormality_gram(points, 3, ctx)
        print(
            "criterion 8 diagnostics: "
            f"root_count={len(points)}, "
            f"root_move_under_depth_doubling={ctx.nstr(worst_move, 3)}, "
            f"gram_max_deviation={ctx.nstr(gram_worst, 3)}, "
            f"total_mass={ctx.nstr(total, 20)}"
        )
        assert worst_move is not None
        assert len(points) == 6
    crit.assert_budget()
