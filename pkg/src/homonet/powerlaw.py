"""Discrete power-law fitting by maximum likelihood.

For each candidate lower cutoff the tail exponent is estimated by maximizing
the zeta-normalized likelihood, and the cutoff minimizing the
Kolmogorov-Smirnov distance between empirical and fitted tail CDFs is kept.
Least-squares fitting on log-log binned counts is deliberately not offered
(it is biased).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .errors import FitError

_ALPHA_LO = 1.0001
_ALPHA_HI = 20.0
MIN_DISTINCT_VALUES = 10
_MIN_TAIL_OBS = 10
_MIN_TAIL_DISTINCT = 3
DEFAULT_MIN_TAIL_FRACTION = 0.10


@dataclass(frozen=True)
class PowerLawFit:
    """MLE fit of p(x) ∝ x^(-exponent) for x >= x_min."""

    exponent: float
    x_min: int
    goodness: float  # KS distance on the fitted tail
    n_tail: int      # observations at or above x_min

    def as_dict(self) -> dict:
        return {"exponent": self.exponent, "x_min": self.x_min,
                "ks": self.goodness, "n_tail": self.n_tail}


def _mle_exponent(x_min: int, n_tail: float, sum_log: float) -> float:
    """Maximize n·(-ln zeta(a, x_min)) - a·sum_log over the exponent a."""

    def nll(alpha: float) -> float:
        return n_tail * np.log(zeta(alpha, x_min)) + alpha * sum_log

    res = minimize_scalar(nll, bounds=(_ALPHA_LO, _ALPHA_HI), method="bounded",
                          options={"xatol": 1e-6})
    return float(res.x)


def _ks_distance(values: np.ndarray, counts: np.ndarray, alpha: float,
                 x_min: int) -> float:
    """Max |empirical - model| tail CDF, evaluated at the observed values."""
    n = counts.sum()
    emp = np.cumsum(counts) / n
    z_min = zeta(alpha, x_min)
    model = 1.0 - zeta(alpha, values + 1) / z_min
    return float(np.max(np.abs(emp - model)))


def fit_power_law(hist: Mapping[int, int],
                  min_tail_fraction: float = DEFAULT_MIN_TAIL_FRACTION) -> PowerLawFit:
    """Fit a discrete power law to a degree histogram (degree -> count).

    Zero and negative degrees are ignored (the law is defined on x >= 1).
    Cutoff candidates must retain at least `min_tail_fraction` of the
    observations (and never fewer than 10); without that guard the KS search
    drifts into the finite-size far tail and fits its cutoff instead of the
    distribution body. Raises FitError when the histogram has fewer than 10
    distinct positive values or no cutoff leaves a usable tail.
    """
    items = sorted((int(x), int(c)) for x, c in hist.items() if x >= 1 and c > 0)
    if not items:
        raise FitError("empty histogram")
    values = np.array([x for x, _ in items], dtype=np.int64)
    counts = np.array([c for _, c in items], dtype=np.int64)
    if len(values) == 1:
        raise FitError("degenerate histogram: a single degree value")
    if len(values) < MIN_DISTINCT_VALUES:
        raise FitError(
            f"need at least {MIN_DISTINCT_VALUES} distinct values, "
            f"got {len(values)}")

    log_values = np.log(values)
    # suffix sums let each candidate cutoff reuse the same accumulations
    tail_counts = np.cumsum(counts[::-1])[::-1]
    tail_sum_log = np.cumsum((counts * log_values)[::-1])[::-1]
    tail_distinct = np.arange(len(values), 0, -1)

    min_tail = max(_MIN_TAIL_OBS, int(min_tail_fraction * counts.sum()))
    best: Tuple[float, float, int, int] | None = None  # (ks, alpha, x_min, n_tail)
    for k in range(len(values)):
        if tail_counts[k] < min_tail or tail_distinct[k] < _MIN_TAIL_DISTINCT:
            break
        x_min = int(values[k])
        n_tail = int(tail_counts[k])
        sum_log = float(tail_sum_log[k])
        alpha = _mle_exponent(x_min, n_tail, sum_log)
        ks = _ks_distance(values[k:], counts[k:], alpha, x_min)
        if best is None or ks < best[0]:
            best = (ks, alpha, x_min, n_tail)
    if best is None:
        raise FitError("no cutoff leaves a tail with enough observations")
    ks, alpha, x_min, n_tail = best
    return PowerLawFit(exponent=alpha, x_min=x_min, goodness=ks, n_tail=n_tail)
