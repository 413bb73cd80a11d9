"""Binomial acceptance tests shared by the Monte Carlo commands."""
from __future__ import annotations

from math import sqrt

from scipy.stats import binomtest

SIGMAS = 3.0


def binomial_sigma(p: float, trials: int) -> float:
    return sqrt(p * (1 - p) / trials)


def within_sigmas(successes: int, trials: int, p: float, sigmas: float = SIGMAS) -> bool:
    """Whether the empirical rate is within ``sigmas`` binomial deviations of ``p``.

    At ``p = 0`` (or 1) the deviation vanishes, so the count must be exact.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if p in (0.0, 1.0):
        return successes == p * trials
    return abs(successes / trials - p) <= sigmas * binomial_sigma(p, trials)


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def estimate(successes: int, trials: int, p: float | None = None) -> dict:
    lo, hi = wilson_interval(successes, trials)
    out = {
        "count": successes,
        "trials": trials,
        "estimate": successes / trials,
        "ci95": [lo, hi],
    }
    if p is not None:
        out.update(
            expected=p,
            sigma=binomial_sigma(p, trials),
            tolerance=f"{SIGMAS:g} sigma",
            within_tolerance=within_sigmas(successes, trials, p),
        )
    return out
