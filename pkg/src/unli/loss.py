"""Closed-form unit normal loss integrals in one and two dimensions.

One dimension, Y ~ N(mu, sigma^2):

    E[max(Y, 0)] = mu * Phi(mu/sigma) + sigma * phi(mu/sigma)

Two dimensions, (Y1, Y2) bivariate normal with means (mu1, mu2), standard
deviations (sigma1, sigma2) and correlation rho:

    E[max(Y1, Y2, 0)] = u(1,2) + v(1,2) + u(2,1) + v(2,1)

Each (i, j) pair contributes a boundary term u and an integral term v.  With

    d     = sigma_i - rho * sigma_j
    c     = (sigma_i * mu_j - rho * sigma_j * mu_i) / (sigma_i * sigma_j * sqrt(1 - rho^2))
    alpha = (sigma_i * mu_j - rho * sigma_j * mu_i) / d
    beta  = sigma_i * sigma_j * sqrt(1 - rho^2) / d
    a1 = (mu_i - alpha)/|beta|    b1 = sigma_i/|beta|    t1 = sqrt(1 + b1^2)
    a2 = (alpha - mu_i)/sigma_i   b2 = |beta|/sigma_i    t2 = sqrt(1 + b2^2)

the terms are

    u(i,j) = mu_i * [d > 0] - Phi(-c) * (mu_i * Phi(-mu_i/sigma_i) - sigma_i * phi(mu_i/sigma_i))
             (the bracket is Phi(-c) when d = 0 and 0 when d < 0)

    v(i,j) = -sgn(beta) * mu_i * [Phi(-a1/t1) - Phi2(-a1/t1, -alpha/|beta|, -1/t1)]
             + sgn(beta) * (sigma_i/t2) * phi(a2/t2) * Phi(trail)
    trail  = (alpha/|beta| + mu_i * b2 / sigma_i) / t2
             (identical to t2*alpha/|beta| - a2*b2/t2, rearranged so no
              inf - inf arises as d -> 0)

Two conventions are mathematically defensible for the second Phi2 limit and
the trailing Phi argument: |beta| throughout, or signed beta.  They coincide
for beta > 0 and disagree for beta < 0 (reachable whenever sigma_i <
rho * sigma_j).  Both were implemented and arbitrated against a 252-case
golden table and a seeded 100k-sample Monte Carlo oracle over beta < 0
regimes; the |beta| convention is correct and is hard-coded here.  The same
arbitration fixes the overall sign of v (the term enters the sum as
[uv] - integral, hence the leading minus).  See docs/closed_form.md.

d = 0 cannot be tested exactly in floating point; |d| <= 1e-10 * max(sigma_i,
sigma_j) is treated as degenerate, where v(i,j) = 0 and u(i,j) takes its
middle branch.  The closed form is continuous across that boundary, so the
switch perturbs the result by at most ~1e-10 * scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .kernels import _phi2, std_normal_cdf, std_normal_pdf, validate_correlation

# Relative threshold below which sigma_i - rho*sigma_j is treated as zero.
DEGENERACY_EPS = 1e-10

_NAN = float("nan")


@dataclass(frozen=True)
class BvnParams:
    """Bivariate normal parameters of the two quantities being maximised.

    In EVPI use these are the incremental net benefits of two alternatives
    against a common reference, but nothing here is unit-specific: mu and
    sigma may be in any common monetary unit.
    """

    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    rho: float

    def __post_init__(self) -> None:
        for name in ("mu1", "mu2", "sigma1", "sigma2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.sigma1 <= 0.0 or self.sigma2 <= 0.0:
            raise DomainError(
                f"standard deviations must be positive, got ({self.sigma1}, {self.sigma2})"
            )
        object.__setattr__(self, "rho", validate_correlation(self.rho))

    def swapped(self) -> "BvnParams":
        """Parameters with the two components exchanged."""
        return BvnParams(self.mu2, self.mu1, self.sigma2, self.sigma1, self.rho)


@dataclass(frozen=True)
class TermIntermediates:
    """Per-(i, j) quantities of the closed form; all NaN when degenerate.

    Satisfies b1 * b2 = 1 and t_k = sqrt(1 + b_k^2) whenever not degenerate.
    """

    alpha: float
    beta: float
    a1: float
    b1: float
    a2: float
    b2: float
    t1: float
    t2: float
    degenerate: bool


@dataclass(frozen=True)
class Unli2dBreakdown:
    """The four closed-form terms and their sum E[max(Y1, Y2, 0)]."""

    u12: float
    v12: float
    u21: float
    v21: float
    total: float


def unli_1d(mu: float, sigma: float) -> float:
    """E[max(Y, 0)] for Y ~ N(mu, sigma^2).

    Always >= max(mu, 0); equals sigma * phi(0) at mu = 0.
    """
    mu = float(mu)
    sigma = float(sigma)
    if not (math.isfinite(mu) and math.isfinite(sigma)):
        raise DomainError(f"unli_1d requires finite inputs, got mu={mu}, sigma={sigma}")
    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    z = mu / sigma
    # mu * Phi(z) + sigma * phi(z); clamp shields the subnormal tail where the
    # two addends cancel to within one ulp of zero.
    return max(0.0, mu * std_normal_cdf(z) + sigma * std_normal_pdf(z))


def _select(p: BvnParams, i: int, j: int) -> tuple[float, float, float, float]:
    if {i, j} != {1, 2}:
        raise DomainError(f"(i, j) must be (1, 2) or (2, 1), got ({i}, {j})")
    if i == 1:
        return p.mu1, p.sigma1, p.mu2, p.sigma2
    return p.mu2, p.sigma2, p.mu1, p.sigma1


def term_intermediates(p: BvnParams, i: int, j: int) -> TermIntermediates:
    """alpha, beta, a1, b1, a2, b2, t1, t2 for the (i, j) term.

    The degenerate flag is set when |sigma_i - rho*sigma_j| <=
    DEGENERACY_EPS * max(sigma_i, sigma_j), in which case the remaining
    fields are NaN (alpha and beta have no finite value there).
    """
    mu_i, sigma_i, mu_j, sigma_j = _select(p, i, j)
    d = sigma_i - p.rho * sigma_j
    if abs(d) <= DEGENERACY_EPS * max(sigma_i, sigma_j):
        return TermIntermediates(_NAN, _NAN, _NAN, _NAN, _NAN, _NAN, _NAN, _NAN, True)
    root = sigma_i * sigma_j * math.sqrt(1.0 - p.rho * p.rho)
    alpha = (sigma_i * mu_j - p.rho * sigma_j * mu_i) / d
    beta = root / d
    abs_beta = abs(beta)
    a1 = (mu_i - alpha) / abs_beta
    b1 = sigma_i / abs_beta
    a2 = (alpha - mu_i) / sigma_i
    b2 = abs_beta / sigma_i
    return TermIntermediates(
        alpha=alpha,
        beta=beta,
        a1=a1,
        b1=b1,
        a2=a2,
        b2=b2,
        t1=math.sqrt(1.0 + b1 * b1),
        t2=math.sqrt(1.0 + b2 * b2),
        degenerate=False,
    )


def u_term(p: BvnParams, i: int, j: int) -> float:
    """Boundary term u(i, j) of the closed form."""
    mu_i, sigma_i, mu_j, sigma_j = _select(p, i, j)
    d = sigma_i - p.rho * sigma_j
    # c is the argument shared by the indicator bracket and the second factor.
    c = (-sigma_i * mu_j + p.rho * sigma_j * mu_i) / (
        sigma_i * sigma_j * math.sqrt(1.0 - p.rho * p.rho)
    )
    phi_c = std_normal_cdf(c)
    if abs(d) <= DEGENERACY_EPS * max(sigma_i, sigma_j):
        bracket = phi_c
    elif d > 0.0:
        bracket = 1.0
    else:
        bracket = 0.0
    boundary_value = -sigma_i * std_normal_pdf(mu_i / sigma_i) + mu_i * std_normal_cdf(
        -mu_i / sigma_i
    )
    return mu_i * bracket - phi_c * boundary_value


def v_term(p: BvnParams, i: int, j: int) -> float:
    """Integral term v(i, j) of the closed form; 0 in the degenerate branch."""
    t = term_intermediates(p, i, j)
    if t.degenerate:
        return 0.0
    mu_i, sigma_i, _, _ = _select(p, i, j)
    sgn = 1.0 if t.beta > 0.0 else -1.0
    alpha_over_abs_beta = t.alpha / abs(t.beta)

    lead = std_normal_cdf(-t.a1 / t.t1) - _phi2(
        -t.a1 / t.t1, -alpha_over_abs_beta, -1.0 / t.t1
    )
    # trail = t2*alpha/|beta| - a2*b2/t2, combined over t2 so that the two
    # individually divergent pieces (d -> 0) never meet as inf - inf.
    trail = (alpha_over_abs_beta + mu_i * t.b2 / sigma_i) / t.t2
    tail_factor = (sigma_i / t.t2) * std_normal_pdf(t.a2 / t.t2) * std_normal_cdf(trail)
    return -sgn * mu_i * lead + sgn * tail_factor


def unli_2d(p: BvnParams) -> Unli2dBreakdown:
    """E[max(Y1, Y2, 0)] with its four-term decomposition.

    The total lies between max(unli_1d(mu1, sigma1), unli_1d(mu2, sigma2))
    and their sum, and is never below max(mu1, mu2, 0).
    """
    u12 = u_term(p, 1, 2)
    v12 = v_term(p, 1, 2)
    u21 = u_term(p, 2, 1)
    v21 = v_term(p, 2, 1)
    return Unli2dBreakdown(u12, v12, u21, v21, u12 + v12 + u21 + v21)
