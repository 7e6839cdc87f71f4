"""Shared oracles and parameter generators for the test suite.

Every oracle here is independent of the code path it checks: loss integrals
are verified against adaptive quadrature of the defining integral, the
bivariate normal CDF against 2-D quadrature of the density, and EVPI against
direct Monte Carlo on the net-benefit scale.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from unli.loss import BvnParams



def quad_unli_1d(mu: float, sigma: float) -> float:
    """E[max(Y, 0)] by adaptive quadrature of y * normal density over (0, inf)."""

    def integrand(y: float) -> float:
        z = (y - mu) / sigma
        return y * math.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=300)
    return val


def bvn_cdf_dblquad(x1: float, x2: float, rho: float) -> float:
    """P(Z1 <= x1, Z2 <= x2) by 2-D adaptive quadrature of the BVN density.

    The domain is truncated at -8.5 (mass beyond is < 1e-17, far below the
    1e-13 quadrature tolerance).
    """
    ub1 = min(x1, 8.5)
    ub2 = min(x2, 8.5)
    if ub1 <= -8.5 or ub2 <= -8.5:
        return 0.0
    s = 1.0 - rho * rho

    def density(y: float, x: float) -> float:
        q = (x * x - 2.0 * rho * x * y + y * y) / s
        return math.exp(-0.5 * q) / (2.0 * math.pi * math.sqrt(s))

    val, _ = integrate.dblquad(density, -8.5, ub1, -8.5, ub2, epsabs=1e-13, epsrel=1e-13)
    return val


def mc_max_oracle(p: BvnParams, n: int, seed: int) -> tuple[float, float]:
    """Plain numpy Monte Carlo for E[max(Y1, Y2, 0)]; independent of unli.mc."""
    rng = np.random.default_rng(seed)
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    y1 = p.mu1 + p.sigma1 * z1
    y2 = p.mu2 + p.sigma2 * (p.rho * z1 + math.sqrt(1 - p.rho * p.rho) * z2)
    m = np.maximum(np.maximum(y1, y2), 0.0)
    return float(m.mean()), float(m.std(ddof=1) / math.sqrt(n))


def draw_params(
    rng: np.random.Generator,
    n: int,
    z_range: tuple[float, float] = (-2.0, 4.0),
    sigma_range: tuple[float, float] = (0.3, 4.0),
    rho_range: tuple[float, float] = (-0.9, 0.9),
) -> list[BvnParams]:
    """n independent draws; means are z * sigma so the loss never collapses
    to a pure cancellation of large terms (keeps relative tolerances fair)."""
    out = []
    for _ in range(n):
        s1 = float(rng.uniform(*sigma_range))
        s2 = float(rng.uniform(*sigma_range))
        out.append(
            BvnParams(
                float(rng.uniform(*z_range)) * s1,
                float(rng.uniform(*z_range)) * s2,
                s1,
                s2,
                float(rng.uniform(*rho_range)),
            )
        )
    return out


def draw_beta_negative(rng: np.random.Generator, n: int) -> list[BvnParams]:
    """Draws with sigma1 < rho * sigma2, the regime where beta(1,2) < 0."""
    out = []
    for _ in range(n):
        rho = float(rng.uniform(0.55, 0.9))
        s2 = float(rng.uniform(0.5, 3.0))
        s1 = rho * s2 * float(rng.uniform(0.3, 0.95))
        out.append(
            BvnParams(
                float(rng.uniform(-2.0, 4.0)) * s1,
                float(rng.uniform(-2.0, 4.0)) * s2,
                s1,
                s2,
                rho,
            )
        )
    return out


def draw_near_degenerate(rng: np.random.Generator, n: int) -> list[BvnParams]:
    """Draws with sigma1 within a relative 1e-9..1e-5 of rho * sigma2."""
    out = []
    for _ in range(n):
        rho = float(rng.uniform(0.3, 0.9))
        s2 = float(rng.uniform(0.5, 3.0))
        delta = float(rng.choice([-1.0, 1.0])) * 10.0 ** float(rng.uniform(-9.0, -5.0))
        s1 = rho * s2 * (1.0 + delta)
        out.append(
            BvnParams(
                float(rng.uniform(-2.0, 4.0)) * s1,
                float(rng.uniform(-2.0, 4.0)) * s2,
                s1,
                s2,
                rho,
            )
        )
    return out


def draw_pool_500(seed: int = 1234) -> list[BvnParams]:
    """The 500-draw pool used by the property suites: 380 generic draws plus
    60 beta < 0 and 60 near-degenerate regimes."""
    rng = np.random.default_rng(seed)
    return draw_params(rng, 380) + draw_beta_negative(rng, 60) + draw_near_degenerate(rng, 60)


def params_scale(p: BvnParams) -> float:
    return max(abs(p.mu1), abs(p.mu2), p.sigma1, p.sigma2)


def inb_params_from_moments(means, cov, ref: int) -> BvnParams:
    """INB parameterisation of a three-strategy problem against reference `ref`.

    means is length 3; cov is the 3x3 covariance of the mean net benefits.
    """
    means = np.asarray(means, dtype=float)
    cov = np.asarray(cov, dtype=float)
    a, b = [i for i in range(3) if i != ref]
    v1 = cov[a, a] + cov[ref, ref] - 2.0 * cov[a, ref]
    v2 = cov[b, b] + cov[ref, ref] - 2.0 * cov[b, ref]
    c12 = cov[a, b] - cov[a, ref] - cov[b, ref] + cov[ref, ref]
    return BvnParams(
        float(means[a] - means[ref]),
        float(means[b] - means[ref]),
        math.sqrt(v1),
        math.sqrt(v2),
        float(c12 / math.sqrt(v1 * v2)),
    )


def random_three_strategy(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random (means, covariance) with well-separated strategies."""
    a = rng.normal(size=(3, 3))
    cov = a @ a.T + 0.05 * np.eye(3)
    means = rng.uniform(-1.5, 1.5, size=3) * np.sqrt(np.diag(cov))
    return means, cov
