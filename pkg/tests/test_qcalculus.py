"""Lattice derivatives, Jackson and hat integrals, product/parts rules."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from qhermite2.errors import DomainError, NoConvergenceError
from qhermite2.exact import GaussianRational, Poly, bn_squared_exact, qbracket
from qhermite2.qcalculus import (
    LatticeFunction,
    deformed_derivative,
    deformed_derivative_poly,
    hat_q_integral,
    hat_q_integral_finite,
    ibp_residual,
    jackson_integral,
    jackson_integral_poly,
    leibniz_residual,
    q_derivative,
    q_derivative_poly,
)
from qhermite2.qkernel import gen_exponential
from qhermite2.qmeasure import moment_In


def gr(v) -> GaussianRational:
    return GaussianRational(Fraction(v), Fraction(0))


POLY_A = Poly((gr(1), gr(2), gr(3)))
POLY_B = Poly((gr(0), gr(-1), gr(0), gr(2)))


class TestExactDerivatives:
    def test_q_derivative_monomial_rule(self):
        q = Fraction(1, 2)
        out = q_derivative_poly(POLY_A, q)
        assert out == Poly((gr(2), gr(3) * gr(qbracket(2, q))))

    def test_deformed_derivative_monomial_rule(self):
        q = Fraction(3, 10)
        cubed = Poly((gr(0), gr(0), gr(0), gr(1)))
        out = deformed_derivative_poly(cubed, q)
        assert out == Poly((gr(0), gr(0), gr(bn_squared_exact(2, q))))

    def test_constants_annihilated(self):
        q = Fraction(4, 5)
        assert deformed_derivative_poly(Poly((gr(7),)), q).is_zero()
        assert q_derivative_poly(Poly((gr(7),)), q).is_zero()

    def test_numeric_matches_exact(self, all_ctx):
        for ctx in all_ctx:
            q = ctx.q
            for x in (Fraction(1, 3), Fraction(2), Fraction(-5, 4)):
                num = q_derivative(POLY_B, x, ctx)
                sym = q_derivative_poly(POLY_B, q).eval_mp(ctx, x)
                assert abs(num - sym) <= 64 * ctx.eps * max(abs(sym), ctx.mpf(1))
                num = deformed_derivative(POLY_B, x, ctx)
                sym = deformed_derivative_poly(POLY_B, q).eval_mp(ctx, x)
                assert abs(num - sym) <= 64 * ctx.eps * max(abs(sym), ctx.mpf(1))

    def test_zero_argument_rejected(self, ctx_half):
        with pytest.raises(DomainError):
            q_derivative(POLY_A, 0, ctx_half)
        with pytest.raises(DomainError):
            deformed_derivative(POLY_A, 0, ctx_half)


class TestProductRule:
    @pytest.mark.parametrize("variant", ["first", "second"])
    def test_residual_is_zero_polynomial(self, variant):
        for q in (Fraction(3, 10), Fraction(1, 2), Fraction(4, 5)):
            res = leibniz_residual(POLY_A, POLY_B, variant, q)
            assert all(
                res.coefficient(k).is_zero() for k in range(res.degree + 1)
            )

    def test_unknown_variant_rejected(self):
        with pytest.raises(DomainError):
            leibniz_residual(POLY_A, POLY_B, "third", Fraction(1, 2))


class TestEigenfunction:
    def test_deformed_derivative_fixes_gen_exponential(self, all_ctx):
        for ctx in all_ctx:
            for x in (Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2)):
                def f(t):
                    return gen_exponential(t, ctx)

                lhs = deformed_derivative(f, x, ctx)
                rhs = gen_exponential(ctx.mpf(x), ctx)
                assert abs(lhs - rhs) / abs(rhs) <= ctx.mpf("1e-20")


class TestJacksonIntegral:
    def test_poly_round_trip_is_exact(self):
        for q in (Fraction(3, 10), Fraction(1, 2), Fraction(4, 5)):
            for x in (Fraction(1), Fraction(3, 2), Fraction(-2)):
                dp = q_derivative_poly(POLY_B, q)
                recovered = jackson_integral_poly(dp, x, q)
                direct = POLY_B(x) - POLY_B(Fraction(0))
                assert recovered == direct

    def test_numeric_endpoint_matches_exact(self, all_ctx):
        for ctx in all_ctx:
            x = Fraction(3, 4)
            num = jackson_integral(POLY_A, "zero_to_x", x, ctx)
            sym = jackson_integral_poly(POLY_A, x, ctx.q)
            assert sym.im == 0
            assert abs(num - ctx.mpf(sym.re)) <= ctx.mpf("1e-60")

    def test_kind_and_domain_validation(self, ctx_half):
        with pytest.raises(DomainError):
            jackson_integral(POLY_A, "zero_to_x", Fraction(0), ctx_half)
        with pytest.raises(DomainError):
            jackson_integral(POLY_A, "sideways", Fraction(1), ctx_half)


def _decaying(t):
    return 1 / (1 + t * t) ** 3


class TestHatIntegral:
    def test_two_branch_split_covers_each_exponent_once(self, ctx_half):
        K = 12
        exponents = sorted(
            [1 - k for k in range(K + 1)] + [k + 2 for k in range(K + 1)]
        )
        assert exponents == list(range(1 - K, K + 3))

    def test_finite_agrees_with_geometric_closed_form(self, all_ctx):
        # f == 1 gives q^{-1} a sum q^j = a / (q (1 - q)).
        for ctx in all_ctx:
            a = Fraction(2, 3)
            got = hat_q_integral_finite(lambda t: ctx.mpf(1), a, ctx)
            want = ctx.mpf(a / (ctx.q * (1 - ctx.q)))
            assert abs(got - want) <= ctx.mpf("1e-70")

    def test_lattice_function_path_matches_callable_path(self, ctx_half):
        K = 40
        q = ctx_half.qm
        values = {
            m: _decaying(q**m) for m in range(1 - K, K + 3)
        }
        lattice = LatticeFunction(
            x0=Fraction(1), values=values, m_min=1 - K, m_max=K + 2
        )
        via_lattice = hat_q_integral(lattice, ctx_half, K=K)
        via_callable = hat_q_integral(_decaying, ctx_half, K=K)
        assert via_lattice == via_callable

    def test_diagnostics_returned_on_request(self, ctx_half):
        value, max_grow, max_shrink = hat_q_integral(
            _decaying, ctx_half, K=40, return_diagnostics=True
        )
        assert max_grow > 0 and max_shrink > 0
        assert value > 0

    def test_growing_branch_divergence_detected(self, ctx_half):
        with pytest.raises(NoConvergenceError):
            hat_q_integral(lambda t: t, ctx_half, K=20)

    def test_zigzag_parity_decay_is_not_flagged(self, ctx_q8):
        # High moments at q = 4/5 produce growing-branch terms whose
        # adjacent magnitudes alternate between two parity subsequences;
        # the decay certificate must consult both predecessors.
        result = moment_In(8, ctx_q8, K=60, M=120)
        assert result.rel_deviation < ctx_q8.mpf("1e-3")

    def test_domain_validation(self, ctx_half):
        with pytest.raises(DomainError):
            hat_q_integral(_decaying, ctx_half, K=0)
        with pytest.raises(DomainError):
            hat_q_integral_finite(_decaying, Fraction(-1), ctx_half)
        short = LatticeFunction(
            x0=Fraction(1), values={0: 1.0, 1: 0.5}, m_min=0, m_max=1
        )
        with pytest.raises(DomainError):
            hat_q_integral(short, ctx_half, K=10)


def _u_dec(t):
    return 1 / (1 + t * t) ** 3


def _v_dec(t):
    return t / (1 + t * t) ** 2


class TestIntegrationByParts:
    @pytest.mark.parametrize("variant", ["ip1", "ip2"])
    def test_finite_variants_close_at_machine_scale(self, all_ctx, variant):
        for ctx in all_ctx:
            res = ibp_residual(POLY_A, POLY_B, variant, Fraction(1), ctx)
            assert res <= ctx.mpf("1e-60")

    def test_infinite_variant_with_decaying_pair(self, all_ctx):
        tol = Fraction(1, 10**20)
        for ctx in all_ctx:
            qf = float(ctx.q)
            k_inf = max(80, math.ceil(math.log(float(tol)) / math.log(qf)) + 40)
            res = ibp_residual(_u_dec, _v_dec, "ip3", None, ctx, K=k_inf)
            assert res <= ctx.mpf(tol)

    def test_variant_validation(self, ctx_half):
        with pytest.raises(DomainError):
            ibp_residual(POLY_A, POLY_B, "ip9", Fraction(1), ctx_half)
        with pytest.raises(DomainError):
            ibp_residual(POLY_A, POLY_B, "ip1", None, ctx_half)
