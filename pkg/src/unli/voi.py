"""Expected value of perfect information for two- and three-strategy decisions.

EVPI is the expected gain in net benefit from resolving all decision
uncertainty: E[max over strategies of NB] minus the NB of the strategy that
is best on current expectations.  Working in incremental net benefits
against a reference strategy, the reference contributes the zero arm:

    two strategies   EVPI = E[max(Y, 0)]      - max(mu, 0)
    three strategies EVPI = E[max(Y1, Y2, 0)] - max(mu1, mu2, 0)

Both expectations come from the closed-form loss integrals, so the values
carry no Monte Carlo error.  Which strategy plays reference is immaterial:
relabelling shifts every term by the same amount.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import DomainError
from .loss import BvnParams, unli_1d, unli_2d

CURVE_CSV_COLUMNS = ("wtp", "evpi", "method")


def evpi_two(mu_inb: float, sigma_inb: float) -> float:
    """EVPI for a two-strategy comparison with INB ~ N(mu_inb, sigma_inb^2)."""
    mu_inb = float(mu_inb)
    return max(0.0, unli_1d(mu_inb, sigma_inb) - max(mu_inb, 0.0))


def evpi_three(p: BvnParams) -> float:
    """EVPI for a three-strategy comparison with bivariate-normal INBs."""
    return max(0.0, unli_2d(p).total - max(p.mu1, p.mu2, 0.0))


@dataclass(frozen=True)
class EvpiCurve:
    """EVPI evaluated over a willingness-to-pay sweep.

    points are (wtp, evpi) pairs with strictly increasing wtp and evpi >= 0;
    method tags how the values were produced ("closed" or "bootstrap").
    """

    points: tuple[tuple[float, float], ...]
    method: str

    def __post_init__(self) -> None:
        if self.method not in ("closed", "bootstrap"):
            raise DomainError(f"method must be 'closed' or 'bootstrap', got {self.method!r}")
        wtps = [w for w, _ in self.points]
        if any(b <= a for a, b in zip(wtps, wtps[1:])):
            raise DomainError("wtp values must be strictly increasing")
        if any(not math.isfinite(e) or e < 0.0 for _, e in self.points):
            raise DomainError("evpi values must be finite and >= 0")

    @property
    def wtps(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.points)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(e for _, e in self.points)


def evpi_curve_closed(
    params_at_wtp: Mapping[float, BvnParams] | Callable[[float], BvnParams],
    wtps: Sequence[float],
) -> EvpiCurve:
    """Closed-form EVPI at each wtp; params_at_wtp maps wtp to BvnParams.

    Accepts either a mapping keyed by the wtp values or a callable.
    """
    if callable(params_at_wtp):
        lookup = params_at_wtp
    else:
        lookup = params_at_wtp.__getitem__
    points = tuple((float(w), evpi_three(lookup(w))) for w in wtps)
    return EvpiCurve(points=points, method="closed")


def write_curve_csv(curves: EvpiCurve | Sequence[EvpiCurve], path: str) -> None:
    """Write one or more curves as CSV rows (wtp, evpi, method)."""
    if isinstance(curves, EvpiCurve):
        curves = [curves]
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CURVE_CSV_COLUMNS)
        for curve in curves:
            for wtp, evpi in curve.points:
                writer.writerow([f"{wtp:g}", f"{evpi:.17g}", curve.method])


def curve_to_json(curve: EvpiCurve) -> str:
    """JSON rendering of a curve: {"method": ..., "points": [[wtp, evpi], ...]}."""
    return json.dumps(
        {"method": curve.method, "points": [[w, e] for w, e in curve.points]}
    )
