"""Lattice weight, moments, discrete measures, resolution of unity."""

from __future__ import annotations

from fractions import Fraction

import pytest

from qhermite2.coherent import cs_norm_sq
from qhermite2.errors import DomainError
from qhermite2.exact import bn_squared_exact, moment_In_exact
from qhermite2.qkernel import rho_factorial
from qhermite2.qmeasure import (
    MEASURE_TARGETS,
    build_measure,
    formal_series_partial,
    lattice_weight,
    moment_In,
    unity_check,
)


@pytest.fixture(scope="module")
def weight_half(ctx_half):
    return lattice_weight(61, 120, ctx_half)


class TestLatticeWeight:
    def test_positive_and_tail_normalized(self, all_ctx):
        for ctx in all_ctx:
            w = lattice_weight(12, 40, ctx)
            assert w.negative_count == 0
            assert all(v > 0 for v in w.values.values())
            # telescoping the difference equation: 1 - f(q^m) ~ q^m/(1-q)
            tail = 2 * ctx.mpf(ctx.q ** 40 / (1 - ctx.q))
            assert abs(w.value(40) - 1) < tail

    def test_difference_equation_holds_on_retained_range(self, all_ctx):
        for ctx in all_ctx:
            w = lattice_weight(10, 20, ctx)
            q = ctx.qm
            for m in range(-10, 19):
                lhs = w.value(m + 2)
                rhs = w.value(m + 1) + q ** (m + 1) * w.value(m)
                scale = max(abs(lhs), ctx.mpf(1))
                assert abs(lhs - rhs) <= 16 * ctx.eps * scale
            assert w.residual_max <= ctx.mpf("1e-60")

    def test_range_enforced(self, ctx_half):
        w = lattice_weight(6, 8, ctx_half)
        with pytest.raises(DomainError):
            w.value(-7)
        with pytest.raises(DomainError):
            w.value(9)

    def test_parameter_validation(self, ctx_half):
        with pytest.raises(DomainError):
            lattice_weight(3, 40, ctx_half)
        with pytest.raises(DomainError):
            lattice_weight(12, 3, ctx_half)
        with pytest.raises(DomainError):
            lattice_weight(12, 40, ctx_half, buffer=4)


class TestMoments:
    def test_matches_closed_form_to_target(self, ctx_q3, ctx_half, weight_half):
        for n in range(9):
            res = moment_In(n, ctx_half, K=60, M=120, weight=weight_half)
            assert res.rel_deviation < ctx_half.mpf("1e-8"), n
        for n in range(9):
            res = moment_In(n, ctx_q3, K=60, M=120)
            assert res.rel_deviation < ctx_q3.mpf("1e-8"), n

    def test_shallow_lattice_honest_at_slow_decay(self, ctx_q8):
        # At q = 4/5 the shrinking-branch tail q^{K+3}/(1-q) at K=60 sits
        # near 5e-6, so the 1e-8 target needs the deeper lattice.
        shallow = moment_In(0, ctx_q8, K=60, M=120)
        assert shallow.rel_deviation > ctx_q8.mpf("1e-8")
        deep = moment_In(0, ctx_q8, K=140, M=282)
        assert deep.rel_deviation < ctx_q8.mpf("1e-8")

    def test_telescoping_ratio(self, ctx_half, weight_half):
        q = ctx_half.q
        for n in range(1, 9):
            assert moment_In_exact(n, q) == (
                bn_squared_exact(n - 1, q) * moment_In_exact(n - 1, q)
            )
            hi = moment_In(n, ctx_half, K=60, M=120, weight=weight_half)
            lo = moment_In(n - 1, ctx_half, K=60, M=120, weight=weight_half)
            ratio = hi.lattice_value / lo.lattice_value
            want = ctx_half.mpf(bn_squared_exact(n - 1, q))
            assert abs(ratio - want) / want < ctx_half.mpf("1e-8")

    def test_parameter_validation(self, ctx_half, weight_half):
        with pytest.raises(DomainError):
            moment_In(-1, ctx_half)
        with pytest.raises(DomainError):
            moment_In(0, ctx_half, K=60, M=40)
        shallow = lattice_weight(10, 30, ctx_half)
        with pytest.raises(DomainError):
            moment_In(0, ctx_half, K=60, M=120, weight=shallow)


class TestFormalSeries:
    def test_zero_point_is_exact(self, ctx_half):
        res = formal_series_partial(0, 100, ctx_half)
        assert res.value == 1
        assert not res.diverging
        assert res.error_estimate == 0

    def test_divergence_reported_with_smallest_term(self, ctx_half):
        res = formal_series_partial(Fraction(1, 4), 400, ctx_half)
        assert res.diverging
        assert res.optimal_index >= 1
        assert res.error_estimate > 0

    def test_optimal_index_shrinks_as_y_grows(self, ctx_half):
        small = formal_series_partial(Fraction(1, 1024), 400, ctx_half)
        large = formal_series_partial(Fraction(4), 400, ctx_half)
        assert small.optimal_index > large.optimal_index

    def test_asymptotic_to_lattice_weight_at_small_y(self, ctx_half, weight_half):
        # Optimal truncation tracks the true weight down to roughly the
        # smallest-term scale; allow a generous multiple of it.
        m = 10
        res = formal_series_partial(Fraction(1, 2) ** m, 400, ctx_half)
        true = weight_half.value(m)
        assert abs(res.value - true) <= 1000 * res.error_estimate

    def test_parameter_validation(self, ctx_half):
        with pytest.raises(DomainError):
            formal_series_partial(-1, 100, ctx_half)
        with pytest.raises(DomainError):
            formal_series_partial(Fraction(1, 4), 0, ctx_half)


class TestBuildMeasure:
    def test_branches_are_monotone_and_disjoint(self, ctx_half, weight_half):
        for target in MEASURE_TARGETS:
            mu = build_measure(target, ctx_half, K=60, M=120, weight=weight_half)
            split = mu.branch_split
            grow = mu.support[:split]
            shrink = mu.support[split:]
            assert all(a < b for a, b in zip(grow, grow[1:]))
            assert all(a > b for a, b in zip(shrink, shrink[1:]))
            assert len(set(mu.exponents)) == len(mu.exponents)
            assert all(w > 0 for w in mu.weights)

    def test_y_measure_reproduces_moments(self, ctx_half, weight_half):
        mu = build_measure("y-variable", ctx_half, K=60, M=120, weight=weight_half)
        for n in range(5):
            got = mu.moment(n, ctx_half)
            want = ctx_half.mpf(moment_In_exact(n, ctx_half.q))
            assert abs(got - want) / want < ctx_half.mpf("1e-8")
        assert abs(mu.total_mass - 1) < ctx_half.mpf("1e-8")

    def test_x_measure_gram_normalization(self, ctx_half, weight_half):
        mu = build_measure("x-variable", ctx_half, K=60, M=120, weight=weight_half)
        for n in range(5):
            g = ctx_half.mp.pi / rho_factorial(n, ctx_half) * mu.moment(n, ctx_half)
            assert abs(g - 1) < ctx_half.mpf("1e-6")

    def test_radial_masses_absorb_normalizer(self, ctx_half, weight_half):
        flat = build_measure("x-variable", ctx_half, K=60, M=120, weight=weight_half)
        ring = build_measure(
            "z-plane-radial", ctx_half, K=60, M=120, weight=weight_half
        )
        assert ring.support == flat.support
        for k in (0, 30, 61, 100):
            want = (
                ctx_half.mp.pi
                * cs_norm_sq(flat.support[k], ctx_half)
                * flat.weights[k]
            )
            assert abs(ring.weights[k] - want) <= 16 * ctx_half.eps * want

    def test_constants_documented(self, ctx_half, weight_half):
        for target in MEASURE_TARGETS:
            mu = build_measure(target, ctx_half, K=60, M=120, weight=weight_half)
            assert "mass_formula" in mu.constants

    def test_unknown_target_rejected(self, ctx_half):
        with pytest.raises(DomainError):
            build_measure("w-variable", ctx_half)


class TestUnityCheck:
    def test_diagonal_near_one_at_binary_q(self, ctx_half):
        report = unity_check(6, ctx_half)
        assert report.max_abs_deviation < ctx_half.mpf("1e-6")
        assert len(report.diagonal) == 7
        assert "exact zero" in report.off_diagonal

    def test_parameter_validation(self, ctx_half):
        with pytest.raises(DomainError):
            unity_check(-1, ctx_half)
