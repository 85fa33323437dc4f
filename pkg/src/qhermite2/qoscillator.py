"""Finite Fock-basis sections of the deformed oscillator operators.

Builds dense truncated matrices for position X, momentum P, the ladder
pair a-/a+, and the Hamiltonian, together with the exact spectrum table
and an algebraic-identity verifier.

Finite sections of infinite Jacobi matrices satisfy the operator
identities exactly only away from the truncation boundary, so every
check runs on the top-left ``valid_block = dim - 1`` block (products of
two tridiagonal operators corrupt exactly the last row/column).
Increasing dim leaves previously valid blocks bitwise unchanged (fixed
summation order, no normalization by dim anywhere).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from .context import PrecisionContext
from .errors import AlgebraViolation, DomainError
from .exact import lambda_exact, qbracket
from .qkernel import b_coeff

__all__ = [
    "TruncatedOperator",
    "SpectrumTable",
    "build_position",
    "build_momentum",
    "build_ladder",
    "build_hamiltonian",
    "spectrum",
    "verify_algebra",
    "mat_mul",
    "mat_sub",
    "mat_scale",
    "AlgebraReport",
]


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense dim x dim matrix over mpc with truncation metadata.

    ``valid_block`` is the size of the top-left block unaffected by the
    finite section; identity checks must not look past it.
    """

    dim: int
    entries: Tuple[Tuple[object, ...], ...]
    valid_block: int

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    def apply(self, vector):
        """Matrix-vector product with fixed ascending-index summation."""
        if len(vector) != self.dim:
            raise DomainError(
                f"vector length {len(vector)} != operator dim {self.dim}"
            )
        out = []
        for i in range(self.dim):
            acc = self.entries[i][0] * vector[0]
            for j in range(1, self.dim):
                acc = acc + self.entries[i][j] * vector[j]
            out.append(acc)
        return out


@dataclass(frozen=True)
class SpectrumTable:
    """Eigenvalue table [(n, lambda_n)]; strictly increasing in n."""

    levels: Tuple[Tuple[int, object], ...]

    def value(self, n: int):
        return self.levels[n][1]


def _zeros(dim: int, ctx: PrecisionContext) -> List[List[object]]:
    z = ctx.mp.mpc(0)
    return [[z for _ in range(dim)] for _ in range(dim)]


def _freeze(rows: List[List[object]], dim: int, valid_block: int) -> TruncatedOperator:
    return TruncatedOperator(
        dim=dim,
        entries=tuple(tuple(row) for row in rows),
        valid_block=valid_block,
    )


def _check_dim(dim: int, minimum: int) -> None:
    if not isinstance(dim, int) or dim < minimum:
        raise DomainError(f"dim must be an integer >= {minimum}, got {dim!r}")


def build_position(dim: int, ctx: PrecisionContext) -> TruncatedOperator:
    """Position operator section: column n gets b_n at row n+1 and
    b_{n-1} at row n-1 (symmetric tridiagonal, zero diagonal)."""
    _check_dim(dim, 2)
    mp = ctx.mp
    rows = _zeros(dim, ctx)
    for n in range(dim - 1):
        b = mp.mpc(b_coeff(n, ctx))
        rows[n + 1][n] = b
        rows[n][n + 1] = b
    return _freeze(rows, dim, dim - 1)


def build_momentum(dim: int, ctx: PrecisionContext) -> TruncatedOperator:
    """Momentum operator section: column n gets +i b_n at row n+1 and
    -i b_{n-1} at row n-1 (Hermitian, purely imaginary entries)."""
    _check_dim(dim, 2)
    mp = ctx.mp
    rows = _zeros(dim, ctx)
    for n in range(dim - 1):
        b = b_coeff(n, ctx)
        rows[n + 1][n] = mp.mpc(0, 1) * b
        rows[n][n + 1] = mp.mpc(0, -1) * b
    return _freeze(rows, dim, dim - 1)


def build_ladder(
    dim: int, ctx: PrecisionContext
) -> Tuple[TruncatedOperator, TruncatedOperator]:
    """(lowering, raising) = (a-, a+) with a+- = (1/2) sqrt(q/(1-q)) (X -+ iP).

    Built literally from the defining combination so the structural
    zeros are exact (the X and iP contributions cancel as b - b = 0,
    not to rounding).  Raising carries sqrt(q/(1-q)) b_n on the
    subdiagonal; lowering is its conjugate transpose and annihilates
    the first basis vector.
    """
    _check_dim(dim, 2)
    mp = ctx.mp
    q = ctx.qm
    half_root = mp.sqrt(ctx.mpf(ctx.q / (1 - ctx.q))) / 2
    X = build_position(dim, ctx)
    P = build_momentum(dim, ctx)
    i = mp.mpc(0, 1)
    lowering = _zeros(dim, ctx)
    raising = _zeros(dim, ctx)
    for r in range(dim):
        for c in range(dim):
            x = X.entries[r][c]
            p = P.entries[r][c]
            raising[r][c] = half_root * (x - i * p)
            lowering[r][c] = half_root * (x + i * p)
    return (
        _freeze(lowering, dim, dim - 1),
        _freeze(raising, dim, dim - 1),
    )


def mat_mul(a: TruncatedOperator, b: TruncatedOperator, ctx: PrecisionContext) -> TruncatedOperator:
    """Product with fixed (i, j, ascending-k) summation order.

    The product of operators valid to blocks va, vb is valid to
    min(va, vb) - 1 when both factors have tridiagonal bandwidth; for
    the degree-2 products used here valid_block = dim - 1 stays the
    binding contract, so we keep min(va, vb) - 1 capped below it.
    """
    if a.dim != b.dim:
        raise DomainError("operator dimensions differ")
    dim = a.dim
    rows = _zeros(dim, ctx)
    for i in range(dim):
        for j in range(dim):
            acc = a.entries[i][0] * b.entries[0][j]
            for k in range(1, dim):
                acc = acc + a.entries[i][k] * b.entries[k][j]
            rows[i][j] = acc
    return _freeze(rows, dim, min(a.valid_block, b.valid_block, dim - 1))


def mat_sub(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    if a.dim != b.dim:
        raise DomainError("operator dimensions differ")
    rows = [
        [a.entries[i][j] - b.entries[i][j] for j in range(a.dim)]
        for i in range(a.dim)
    ]
    return _freeze(rows, a.dim, min(a.valid_block, b.valid_block))


def mat_scale(a: TruncatedOperator, s) -> TruncatedOperator:
    rows = [[s * a.entries[i][j] for j in range(a.dim)] for i in range(a.dim)]
    return _freeze(rows, a.dim, a.valid_block)


def build_hamiltonian(dim: int, ctx: PrecisionContext) -> TruncatedOperator:
    """H = a+ a- + a- a+ (diagonal with entries lambda_n on the valid block)."""
    lowering, raising = build_ladder(dim, ctx)
    h1 = mat_mul(raising, lowering, ctx)
    h2 = mat_mul(lowering, raising, ctx)
    rows = [
        [h1.entries[i][j] + h2.entries[i][j] for j in range(dim)]
        for i in range(dim)
    ]
    return _freeze(rows, dim, dim - 1)


def spectrum(n_max: int, ctx: PrecisionContext) -> SpectrumTable:
    """Eigenvalue table lambda_n = q^{-2n}[n+1]_q + q^{-2(n-1)}[n]_q.

    Each level is computed exactly over rationals and rounded once;
    the equivalent path (q/(1-q))(b_{n-1}^2 + b_n^2) is exercised by
    the test suite.  Levels are strictly increasing for 0 < q < 1.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    levels = []
    prev = None
    for n in range(n_max + 1):
        lam = ctx.mpf(lambda_exact(n, ctx.q))
        if prev is not None and not lam > prev:
            raise AlgebraViolation(
                f"spectrum not strictly increasing at n={n}: {lam} <= {prev}"
            )
        levels.append((n, lam))
        prev = lam
    return SpectrumTable(levels=tuple(levels))


@dataclass(frozen=True)
class AlgebraReport:
    """Residual summary of the operator-identity checks.

    ``max_residuals`` maps identity name to the largest entrywise
    absolute deviation on the valid block; ``scale`` maps identity name
    to the matrix scale (largest reference entry) used for the ulp
    criterion; ``ulp_bound`` is the allowed multiple of scale * 2^-prec.
    """

    dim: int
    valid_block: int
    max_residuals: Dict[str, object]
    scales: Dict[str, object]
    ulp_bound: int
    passed: bool


def _diag_operator(values, dim: int, ctx: PrecisionContext) -> TruncatedOperator:
    rows = _zeros(dim, ctx)
    for n in range(dim):
        rows[n][n] = ctx.mp.mpc(values[n])
    return _freeze(rows, dim, dim - 1)


def _block_max_abs(op: TruncatedOperator, block: int):
    worst = abs(op.entries[0][0]) * 0
    for i in range(block):
        for j in range(block):
            worst = max(worst, abs(op.entries[i][j]))
    return worst


def verify_algebra(dim: int, ctx: PrecisionContext, ulp_bound: int = 4) -> AlgebraReport:
    """Check the four ladder identities and the Hamiltonian diagonal.

    On the valid block (dim-1):

      1. a- a+              = diag(q^{-2n} [n+1]_q)
      2. a+ a-              = diag(q^{-2(n-1)} [n]_q)
      3. a- a+ - q^-1 a+ a- = diag(q^{-2n})
      4. a- a+ - q^-2 a+ a- = diag(q^{-n})
      5. a+ a- + a- a+      = (1/2)(q/(1-q))(X^2 + P^2), diagonal with
                              entries lambda_n

    Entrywise tolerance is ``ulp_bound`` units in the last place of the
    comparison scale: the largest entry magnitude among all matrices
    entering the identity, operands included.  The commutator identities
    subtract two matrices of size q^{-2n} to produce entries of size
    q^{-n}, so measuring ulp against the reference alone would demand
    accuracy beyond what any finite precision can represent after the
    cancellation; the operand scale is where rounding actually occurs.
    Raises AlgebraViolation with the first offending entry otherwise.
    """
    _check_dim(dim, 3)
    mp = ctx.mp
    q = ctx.qm
    block = dim - 1

    lowering, raising = build_ladder(dim, ctx)
    minus_plus = mat_mul(lowering, raising, ctx)
    plus_minus = mat_mul(raising, lowering, ctx)

    # References rounded once from exact rationals; floating powers of
    # an inexact q would drift by about n/2 ulp at exponent n.
    qx = ctx.q
    d1 = [ctx.mpf(qx ** (-2 * n) * qbracket(n + 1, qx)) for n in range(dim)]
    d2 = [
        (
            mp.mpf(0)
            if n == 0
            else ctx.mpf(qx ** (-2 * (n - 1)) * qbracket(n, qx))
        )
        for n in range(dim)
    ]
    d3 = [ctx.mpf(qx ** (-2 * n)) for n in range(dim)]
    d4 = [ctx.mpf(qx ** (-n)) for n in range(dim)]

    X = build_position(dim, ctx)
    P = build_momentum(dim, ctx)
    h_direct = build_hamiltonian(dim, ctx)
    x2p2 = mat_mul(X, X, ctx)
    p2 = mat_mul(P, P, ctx)
    rows = [
        [
            (q / (1 - q)) / 2 * (x2p2.entries[i][j] + p2.entries[i][j])
            for j in range(dim)
        ]
        for i in range(dim)
    ]
    h_quadrature = _freeze(rows, dim, dim - 1)
    lam = [ctx.mpf(lambda_exact(n, ctx.q)) for n in range(dim)]

    scaled_pm1 = mat_scale(plus_minus, ctx.mpf(1 / ctx.q))
    scaled_pm2 = mat_scale(plus_minus, ctx.mpf(ctx.q**-2))
    checks = {
        "lowering-raising-product": (
            minus_plus,
            _diag_operator(d1, dim, ctx),
            (minus_plus,),
        ),
        "raising-lowering-product": (
            plus_minus,
            _diag_operator(d2, dim, ctx),
            (plus_minus,),
        ),
        "q-commutator-inverse-q": (
            mat_sub(minus_plus, scaled_pm1),
            _diag_operator(d3, dim, ctx),
            (minus_plus, scaled_pm1),
        ),
        "q-commutator-inverse-q2": (
            mat_sub(minus_plus, scaled_pm2),
            _diag_operator(d4, dim, ctx),
            (minus_plus, scaled_pm2),
        ),
        "hamiltonian-quadrature": (h_direct, h_quadrature, (h_direct,)),
        "hamiltonian-diagonal": (
            h_direct,
            _diag_operator(lam, dim, ctx),
            (h_direct,),
        ),
    }

    eps = mp.mpf(2) ** (-ctx.precision_bits)
    max_residuals: Dict[str, object] = {}
    scales: Dict[str, object] = {}
    for name, (lhs, rhs, operands) in checks.items():
        scale = max(
            _block_max_abs(rhs, block),
            max(_block_max_abs(m, block) for m in operands),
            mp.mpf(1),
        )
        tol = ulp_bound * scale * eps
        worst = mp.mpf(0)
        for i in range(block):
            for j in range(block):
                diff = abs(lhs.entries[i][j] - rhs.entries[i][j])
                if diff > tol:
                    raise AlgebraViolation(
                        f"{name}: entry ({i},{j}) residual {mp.nstr(diff, 8)} "
                        f"exceeds {ulp_bound} ulp of scale {mp.nstr(scale, 8)} "
                        f"at dim={dim}"
                    )
                worst = max(worst, diff)
        max_residuals[name] = worst
        scales[name] = scale
    return AlgebraReport(
        dim=dim,
        valid_block=block,
        max_residuals=max_residuals,
        scales=scales,
        ulp_bound=ulp_bound,
        passed=True,
    )
