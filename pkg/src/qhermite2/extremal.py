"""Extremal-measure machinery: carrier roots and point loadings.

The position operator of the oscillator is symmetric with deficiency
indices (1, 1), so its self-adjoint extensions carry a family of
extremal orthogonality measures.  For the zero-parameter extension the
measure is purely atomic; its carrier is the root set of the even
transcendental function

    D(x) = Psi_0(x) + x sum_{k>=1} (-1)^k sqrt([2k-2]!!/[2k-1]!!) Psi_{2k-1}(x)

written with the bracket scaling [s] = b_{s-1}^2 / b_0^2.  The series
coefficients are the origin values S_{2k-1}(0) (up to sign) of the
companion second-kind family S_n, normalized S_0 = 0, S_1 = 1, which
satisfies the same three-term recurrence as Psi_n.  The loading at a
root is the ratio

    sigma_0(x_k) = Num(x_k) / Den'(x_k),
    Num(x) = x sum_j S_{2j-1}(0) S_{2j-1}(x),      Den(x) = -D(x),

evaluated with monitored truncation.  When b_0 = 1 this reproduces the
reproducing-kernel masses 1 / sum_n Psi_n(x_k)^2 of the extremal
measure; for b_0 != 1 the closed-form coefficient polynomials live in
the rescaled variable x/b_0 (see the discrepancy registry, entries
``second_kind_scaling`` and ``carrier_variable_scaling``), so the
kernel mass is computed alongside every loading as a convention-free
cross-check and the total mass is reported as a diagnostic, never
assumed.

All alpha/beta polynomial coefficients and bracket factorials are exact
rationals; only square roots and series evaluation use working-precision
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple

from .context import PrecisionContext
from .errors import (
    AlgebraViolation,
    DegenerateRootError,
    DomainError,
    NoConvergenceError,
)
from .exact import extremal_bracket_exact
from .qhermite import psi_sequence
from .qkernel import b_coeff

__all__ = [
    "bracket_double_factorial",
    "bracket_factorial",
    "alpha_coeff",
    "beta_coeff",
    "first_kind_eval",
    "second_kind_eval",
    "carrier_function",
    "CarrierPoint",
    "carrier_roots",
    "loadings",
    "orthonormality_gram",
]

_STREAK = 3


def bracket_factorial(n: int, q: Fraction) -> Fraction:
    """Exact scaled factorial [n]! = [1][2]...[n] (empty product = 1)."""
    if n < 0:
        raise DomainError(f"bracket factorial needs n >= 0, got {n}")
    out = Fraction(1)
    for s in range(1, n + 1):
        out *= extremal_bracket_exact(s, q)
    return out


def bracket_double_factorial(n: int, q: Fraction) -> Fraction:
    """Exact [n]!! = [n][n-2][n-4]... down to [1] or [2]; [0]!! = [-1]!! = 1."""
    if n < -1:
        raise DomainError(f"bracket double factorial needs n >= -1, got {n}")
    out = Fraction(1)
    s = n
    while s >= 1:
        out *= extremal_bracket_exact(s, q)
        s -= 2
    return out


@lru_cache(maxsize=None)
def _nested_sum(levels: int, upper: int, start: int, q: Fraction) -> Fraction:
    """sum_{k=start-descending windows} [k1][k2]... with k_{j+1} <= k_j - 2.

    ``levels`` factors remain; the current index runs from its floor
    (start - 2*(levels-1) ... kept implicit via ``start``) up to
    ``upper``; each inner window tops out two below its outer index.
    """
    if levels == 0:
        return Fraction(1)
    total = Fraction(0)
    for k in range(start, upper + 1):
        total += extremal_bracket_exact(k, q) * _nested_sum(
            levels - 1, k - 2, start - 2, q
        )
    return total


def alpha_coeff(m: int, n: int, ctx: PrecisionContext) -> Fraction:
    """Exact first-kind coefficient alpha_{2m-1, n-1}.

    Nested descending sum sum_{k1=2m-1}^{n-1} [k1] sum_{k2=2m-3}^{k1-2}
    [k2] ... sum_{km=1}^{...} [km]; the m = 0 convention is
    alpha_{-1, .} = 1 and an empty outer window sums to 0.
    """
    if m < 0:
        raise DomainError(f"alpha_coeff needs m >= 0, got {m}")
    if m == 0:
        return Fraction(1)
    return _nested_sum(m, n - 1, 2 * m - 1, ctx.q)


def beta_coeff(m: int, n: int, ctx: PrecisionContext) -> Fraction:
    """Exact second-kind coefficient beta_{2m, n} (even descending windows).

    beta_{0, n} = 1; otherwise sum_{k1=2m}^{n} [k1] sum_{k2=2m-2}^{k1-2}
    [k2] ... sum_{km=2}^{...} [km], empty windows summing to 0.
    """
    if m < 0:
        raise DomainError(f"beta_coeff needs m >= 0, got {m}")
    if m == 0:
        return Fraction(1)
    return _nested_sum(m, n, 2 * m, ctx.q)


def first_kind_eval(n: int, x, ctx: PrecisionContext):
    """Closed-form first-kind polynomial P_n via the alpha coefficients.

    P_n(x) = sum_{m=0}^{floor(n/2)} (-1)^m alpha_{2m-1, n-1} x^{n-2m}
    / sqrt([n]!).  In this coefficient normalization the argument is
    the b_0-scaled one: P_n(x) = Psi_n(b_0 x).
    """
    if n < 0:
        raise DomainError(f"polynomial degree must be >= 0, got {n}")
    mp = ctx.mp
    xv = ctx.mpf(x)
    total = mp.mpf(0)
    for m in range(n // 2 + 1):
        total = total + ctx.mpf(alpha_coeff(m, n, ctx)) * (-1) ** m * xv ** (
            n - 2 * m
        )
    return total / mp.sqrt(ctx.mpf(bracket_factorial(n, ctx.q)))


def _second_kind_sequence(nmax: int, x, ctx: PrecisionContext):
    """S_0..S_nmax at x by the recurrence x S_n = b_n S_{n+1} + b_{n-1} S_{n-1}."""
    mp = ctx.mp
    xv = ctx.mpf(x)
    values = [mp.mpf(0), mp.mpf(1)]
    bs = [b_coeff(k, ctx) for k in range(max(nmax, 1))]
    for n in range(1, nmax):
        values.append((xv * values[n] - bs[n - 1] * values[n - 1]) / bs[n])
    return values[: nmax + 1]


def second_kind_eval(n: int, x, ctx: PrecisionContext):
    """Second-kind polynomial S_n(x), seeds S_0 = 0, S_1 = 1.

    Evaluated by the three-term recurrence and cross-checked against
    the beta-coefficient closed form at the rescaled argument x/b_0,
    where the two provably agree (AlgebraViolation if they do not
    within working tolerance).  At the same argument the closed form
    differs by the b_0 scaling unless b_0 = 1; that recorded deviation
    is registry entry ``second_kind_scaling``.
    """
    if n < 0:
        raise DomainError(f"polynomial degree must be >= 0, got {n}")
    mp = ctx.mp
    value = _second_kind_sequence(n, x, ctx)[n]
    if n == 0:
        return value
    t = ctx.mpf(x) / b_coeff(0, ctx)
    total = mp.mpf(0)
    deg = n - 1
    for m in range(deg // 2 + 1):
        total = total + ctx.mpf(beta_coeff(m, deg, ctx)) * (-1) ** m * t ** (
            deg - 2 * m
        )
    closed = total / mp.sqrt(ctx.mpf(bracket_factorial(n, ctx.q)))
    scale = max(abs(value), abs(closed), mp.mpf(1))
    if abs(value - closed) > ctx.mpf(ctx.series_tol) * scale:
        raise AlgebraViolation(
            f"second-kind recurrence and closed form disagree at n={n}, "
            f"x={ctx.nstr(ctx.mpf(x), 8)}"
        )
    return value


@lru_cache(maxsize=64)
def _carrier_coefficients(count: int, ctx: PrecisionContext):
    """S_{2j-1}(0) = (-1)^(j-1) sqrt([2j-2]!!/[2j-1]!!) for j = 1..count."""
    mp = ctx.mp
    coeffs = []
    ratio = Fraction(1) / extremal_bracket_exact(1, ctx.q)
    for j in range(1, count + 1):
        if j > 1:
            ratio *= extremal_bracket_exact(2 * j - 2, ctx.q) / (
                extremal_bracket_exact(2 * j - 1, ctx.q)
            )
        sign = 1 if j % 2 == 1 else -1
        coeffs.append(sign * mp.sqrt(ctx.mpf(ratio)))
    return tuple(coeffs)


def _carrier_value(x, ctx: PrecisionContext, k_terms: Optional[int]):
    """Carrier value with tail metadata: (value, terms_used, last_term)."""
    mp = ctx.mp
    xv = ctx.mpf(x)
    cap = k_terms if k_terms is not None else ctx.max_terms
    if cap < 1:
        raise DomainError(f"k_terms must be >= 1, got {cap}")
    tol = ctx.mpf(ctx.series_tol)
    block = 16
    coeffs = _carrier_coefficients(block, ctx)
    psis = psi_sequence(2 * block - 1, xv, ctx)
    total = mp.mpf(1)
    streak = 0
    last = mp.mpf(0)
    k = 0
    while k < cap:
        if k >= len(coeffs):
            block *= 2
            coeffs = _carrier_coefficients(block, ctx)
            psis = psi_sequence(2 * block - 1, xv, ctx)
        term = -coeffs[k] * xv * psis[2 * k + 1]
        total = total + term
        last = abs(term)
        k += 1
        if last <= tol * max(abs(total), tol):
            streak += 1
            if streak >= _STREAK:
                return total, k, last
        else:
            streak = 0
    if k_terms is not None:
        return total, k, last
    raise NoConvergenceError(
        f"carrier series terms failed to decay within {cap} terms at "
        f"x={ctx.nstr(xv, 8)}"
    )


def carrier_function(x, k_terms: Optional[int], ctx: PrecisionContext):
    """Even transcendental function whose roots carry the extremal measure.

    Psi_0(x) + x sum_{k>=1} (-1)^k sqrt([2k-2]!!/[2k-1]!!) Psi_{2k-1}(x),
    truncated adaptively once terms decay below series_tol (the square
    summability of (Psi_n(x))_n guarantees decay); pass k_terms to force
    a fixed truncation depth instead.
    """
    value, _, _ = _carrier_value(x, ctx, k_terms)
    return value


@dataclass(frozen=True)
class CarrierPoint:
    """One carrier root with its loading and truncation metadata."""

    x: object
    sigma0: Optional[object] = None
    kernel_mass: Optional[object] = None
    carrier_residual: Optional[object] = None
    bracket_width: Optional[object] = None
    terms_used: int = 0
    tail_estimate: Optional[object] = None


def carrier_roots(
    search_bound,
    ctx: PrecisionContext,
    k_terms: Optional[int] = None,
    grid_points: int = 512,
) -> Tuple[CarrierPoint, ...]:
    """All carrier roots in [-search_bound, search_bound].

    Sign-scans a merged geometric + linear grid on (0, search_bound]
    and bisects each bracket to 10^-(precision_bits/4); the function is
    even (checked on samples), so roots are emitted as symmetric +-
    pairs, sorted ascending.  No root sits at 0 (carrier value 1).
    """
    mp = ctx.mp
    bound = ctx.mpf(search_bound)
    if bound <= 0:
        raise DomainError("search_bound must be > 0")
    if grid_points < 16:
        raise DomainError(f"grid_points must be >= 16, got {grid_points}")

    lo_edge = bound * ctx.mpf(Fraction(1, 10000))
    grid = [lo_edge * (bound / lo_edge) ** (ctx.mpf(Fraction(i, grid_points - 1)))
            for i in range(grid_points)]
    grid += [bound * ctx.mpf(Fraction(i, grid_points)) for i in range(1, grid_points + 1)]
    grid = sorted(set(grid))

    for probe in (bound / 3, bound / 7):
        even_gap = abs(
            carrier_function(probe, k_terms, ctx)
            - carrier_function(-probe, k_terms, ctx)
        )
        if even_gap > ctx.mpf(ctx.series_tol) * 100:
            raise AlgebraViolation(
                "carrier function failed the evenness check at "
                f"x={ctx.nstr(probe, 8)}"
            )

    tol_root = mp.mpf(10) ** (-(ctx.precision_bits // 4))
    values = [_carrier_value(g, ctx, k_terms) for g in grid]
    points = []
    for (a, (fa, _, _)), (b, (fb, used, tail)) in zip(
        zip(grid, values), zip(grid[1:], values[1:])
    ):
        if fa == 0:
            continue
        if fa * fb > 0:
            continue
        lo, hi, flo = a, b, fa
        while hi - lo > tol_root:
            mid = (lo + hi) / 2
            fmid, used, tail = _carrier_value(mid, ctx, k_terms)
            if fmid == 0:
                lo = hi = mid
                break
            if flo * fmid < 0:
                hi = mid
            else:
                lo, flo = mid, fmid
        root = (lo + hi) / 2
        residual, used, tail = _carrier_value(root, ctx, k_terms)
        points.append(
            CarrierPoint(
                x=root,
                carrier_residual=abs(residual),
                bracket_width=hi - lo,
                terms_used=used,
                tail_estimate=tail,
            )
        )
    negatives = [replace(p, x=-p.x) for p in points]
    return tuple(sorted(negatives + points, key=lambda p: p.x))


def _kernel_mass(x, ctx: PrecisionContext, cap: int = 600):
    """1 / sum_n Psi_n(x)^2 with monitored decay of the squared terms."""
    mp = ctx.mp
    tol = ctx.mpf(ctx.series_tol)
    nmax = 64
    while True:
        psis = psi_sequence(nmax, x, ctx)
        total = mp.mpf(0)
        streak = 0
        for n, p in enumerate(psis):
            term = p * p
            total = total + term
            if term <= tol * max(total, tol):
                streak += 1
                if streak >= _STREAK:
                    return 1 / total, n + 1
            else:
                streak = 0
        if nmax >= cap:
            raise NoConvergenceError(
                f"kernel series failed to decay within {cap} terms at "
                f"x={ctx.nstr(ctx.mpf(x), 8)}"
            )
        nmax = min(2 * nmax, cap)


def _loading_at(x, ctx: PrecisionContext):
    """(sigma0, terms_used, last_term) via the Num / Den' series ratio."""
    mp = ctx.mp
    xv = ctx.mpf(x)
    tol = ctx.mpf(ctx.series_tol)
    block = 16
    cap = ctx.max_terms
    coeffs = _carrier_coefficients(block, ctx)
    psis = psi_sequence(2 * block - 1, xv, ctx)
    seconds = _second_kind_sequence(2 * block - 1, xv, ctx)
    dpsis = _psi_derivative_sequence(2 * block - 1, xv, ctx)
    num = mp.mpf(0)
    den = mp.mpf(0)
    den_scale = mp.mpf(0)
    streak = 0
    j = 0
    last = mp.mpf(0)
    while j < cap:
        if j >= len(coeffs):
            block *= 2
            coeffs = _carrier_coefficients(block, ctx)
            psis = psi_sequence(2 * block - 1, xv, ctx)
            seconds = _second_kind_sequence(2 * block - 1, xv, ctx)
            dpsis = _psi_derivative_sequence(2 * block - 1, xv, ctx)
        s0 = coeffs[j]
        idx = 2 * j + 1
        num_term = s0 * xv * seconds[idx]
        den_term = s0 * (psis[idx] + xv * dpsis[idx])
        num = num + num_term
        den = den + den_term
        den_scale = den_scale + abs(den_term)
        last = max(abs(num_term), abs(den_term))
        j += 1
        scale = max(abs(num), abs(den), tol)
        if last <= tol * scale:
            streak += 1
            if streak >= _STREAK:
                break
        else:
            streak = 0
    else:
        raise NoConvergenceError(
            f"loading series failed to decay within {cap} terms at "
            f"x={ctx.nstr(xv, 8)}"
        )
    if abs(den) <= ctx.eps * den_scale * 64:
        raise DegenerateRootError(
            f"loading denominator vanishes at x={ctx.nstr(xv, 8)}"
        )
    return num / den, j, last


def _psi_derivative_sequence(nmax: int, x, ctx: PrecisionContext):
    """Psi_n'(x) by differentiating the three-term recurrence."""
    mp = ctx.mp
    xv = ctx.mpf(x)
    psis = psi_sequence(nmax, xv, ctx)
    bs = [b_coeff(k, ctx) for k in range(max(nmax, 1))]
    derivs = [mp.mpf(0), 1 / bs[0]]
    for n in range(1, nmax):
        derivs.append(
            (psis[n] + xv * derivs[n] - bs[n - 1] * derivs[n - 1]) / bs[n]
        )
    return derivs[: nmax + 1]


def loadings(
    roots: Sequence[CarrierPoint], ctx: PrecisionContext
) -> Tuple[CarrierPoint, ...]:
    """Attach loadings sigma_0 and kernel masses to carrier roots.

    sigma_0(x_k) is the ratio of the second-kind double series
    x sum_j S_{2j-1}(0) S_{2j-1}(x) to the x-derivative of the negated
    carrier series at x_k, each truncated with monitored decay; the
    reproducing-kernel mass 1 / sum_n Psi_n(x_k)^2 rides along as a
    convention-free cross-check.  Each root is evaluated independently
    (no parity shortcut), so sigma_0(x) = sigma_0(-x) is measurable.
    """
    out = []
    for point in roots:
        sigma, used, last = _loading_at(point.x, ctx)
        kern, _ = _kernel_mass(point.x, ctx)
        out.append(
            replace(
                point,
                sigma0=sigma,
                kernel_mass=kern,
                terms_used=max(point.terms_used, used),
                tail_estimate=last,
            )
        )
    return tuple(out)


def orthonormality_gram(
    points: Sequence[CarrierPoint], n_max: int, ctx: PrecisionContext
):
    """Gram matrix sum_k sigma_0(x_k) Psi_m(x_k) Psi_n(x_k), m, n <= n_max.

    Measures how well the truncated atomic measure reproduces
    orthonormality; returns (matrix, max |G - identity| deviation).
    Points must already carry loadings.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    mp = ctx.mp
    for p in points:
        if p.sigma0 is None:
            raise DomainError("points must carry loadings; run loadings() first")
    gram = [[mp.mpf(0) for _ in range(n_max + 1)] for _ in range(n_max + 1)]
    for p in points:
        psis = psi_sequence(n_max, p.x, ctx)
        for mdx in range(n_max + 1):
            for ndx in range(n_max + 1):
                gram[mdx][ndx] = gram[mdx][ndx] + p.sigma0 * psis[mdx] * psis[ndx]
    worst = mp.mpf(0)
    for mdx in range(n_max + 1):
        for ndx in range(n_max + 1):
            target = 1 if mdx == ndx else 0
            worst = max(worst, abs(gram[mdx][ndx] - target))
    return gram, worst
