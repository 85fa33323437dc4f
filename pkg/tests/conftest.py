"""Shared fixtures: precision contexts and an expensive extremal fixture."""

from __future__ import annotations

from fractions import Fraction

import pytest

from qhermite2 import PrecisionContext
from qhermite2.extremal import carrier_roots, loadings


@pytest.fixture(scope="session")
def ctx_half() -> PrecisionContext:
    return PrecisionContext(q=Fraction(1, 2))


@pytest.fixture(scope="session")
def ctx_q3() -> PrecisionContext:
    return PrecisionContext(q=Fraction(3, 10))


@pytest.fixture(scope="session")
def ctx_q8() -> PrecisionContext:
    return PrecisionContext(q=Fraction(4, 5))


@pytest.fixture(scope="session")
def all_ctx(ctx_q3, ctx_half, ctx_q8):
    return (ctx_q3, ctx_half, ctx_q8)


@pytest.fixture(scope="session")
def ctx_by_q(ctx_q3, ctx_half, ctx_q8):
    return {ctx.q: ctx for ctx in (ctx_q3, ctx_half, ctx_q8)}


@pytest.fixture(scope="session")
def extremal_points_half(ctx_half):
    """Carrier roots with loadings at q = 1/2 on [-40, 40] (expensive)."""
    roots = carrier_roots(Fraction(40), ctx_half)
    return loadings(roots, ctx_half)
