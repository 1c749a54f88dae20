"""Likelihood analysis of the attachment sample log.

Each logged record (k, e_prev, n_prev) contributes a linear-in-alpha factor
``alpha * (k/e_prev - 1/n_prev) + 1/n_prev`` to the likelihood, so the full
likelihood is a polynomial in alpha whose roots are ``e/(e - k*n)``.  The
positive/negative root structure brackets the maximizer; within the bracket
the log-likelihood is strictly concave, so the estimate is found by
bisecting the sign of the analytic derivative.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .netmodel import AttachmentRecord, SampleLog

#: margin kept from bracket endpoints and from {0, 1}
INTERIOR_MARGIN = 1e-9
#: bisection stops when the interval is narrower than this
BISECTION_WIDTH = 1e-10


class EvaluationError(ValueError):
    """A likelihood factor is non-positive at the requested alpha."""

    def __init__(self, message: str, record_index: int | None = None):
        super().__init__(message)
        self.record_index = record_index


class NoInformationError(ValueError):
    """Every record is degenerate: the likelihood does not depend on alpha."""


def _slope_intercept(log: SampleLog) -> tuple[np.ndarray, np.ndarray]:
    """Per-record factor coefficients d, c with factor(alpha) = d*alpha + c."""
    c = 1.0 / log.n_prev
    d = log.k / log.e_prev - c
    return d, c


def log_likelihood(log: SampleLog, alpha: float) -> float:
    """Sum of log factors over all records (the incomplete log-likelihood)."""
    if len(log) == 0:
        return 0.0
    d, c = _slope_intercept(log)
    factors = d * alpha + c
    if (factors <= 0).any():
        i = int(np.argmax(factors <= 0))
        raise EvaluationError(
            f"non-positive likelihood factor at alpha={alpha} for record "
            f"{i} (k={log.k[i]}, e_prev={log.e_prev[i]}, n_prev={log.n_prev[i]})",
            record_index=i,
        )
    return float(np.log(factors).sum())


def snapshot_log_likelihood(records: list[AttachmentRecord], alpha: float) -> float:
    """Log-likelihood of a single step's multiset (empty multiset gives 0)."""
    if not records:
        return 0.0
    return log_likelihood(SampleLog.from_steps([records]), alpha)


@dataclass
class RootProfile:
    """Roots of the likelihood polynomial, merged by value with multiplicity."""

    roots: list  # (value, multiplicity), ascending by value
    degenerate_count: int

    @property
    def positive_roots(self) -> list:
        return [(v, mu) for v, mu in self.roots if v > 0]

    @property
    def negative_roots(self) -> list:
        return [(v, mu) for v, mu in self.roots if v < 0]

    @property
    def degree(self) -> int:
        return sum(mu for _, mu in self.roots)

    @property
    def min_positive(self) -> float:
        pos = self.positive_roots
        return pos[0][0] if pos else math.inf

    @property
    def max_negative(self) -> float:
        neg = self.negative_roots
        return neg[-1][0] if neg else -math.inf

    @property
    def positive_multiplicity_sum(self) -> int:
        return sum(mu for _, mu in self.positive_roots)


def root_profile(log: SampleLog) -> RootProfile:
    """One root e/(e - k*n) per non-degenerate record, merged exactly.

    Roots are rationals of machine-integer counts, so merging uses exact
    fractions rather than a float tolerance.
    """
    if len(log) == 0:
        raise ValueError("root profile of an empty log")
    counts: dict[Fraction, int] = {}
    degenerate = 0
    denom = log.e_prev - log.k * log.n_prev
    for e, den in zip(log.e_prev.tolist(), denom.tolist()):
        if den == 0:
            degenerate += 1
            continue
        key = Fraction(e, den)
        counts[key] = counts.get(key, 0) + 1
    roots = sorted((float(v), mu) for v, mu in counts.items())
    return RootProfile(roots=roots, degenerate_count=degenerate)


def check_theorem1(profile: RootProfile) -> tuple[bool, str]:
    """Bracketing conditions: both root signs present, even positive multiplicity."""
    if not profile.positive_roots:
        return False, "no positive roots"
    if not profile.negative_roots:
        return False, "no negative roots"
    total = profile.positive_multiplicity_sum
    if total % 2 != 0:
        return False, f"sum of positive-root multiplicities is odd ({total})"
    return True, "ok"


@dataclass
class MleReport:
    alpha_hat: float
    bracket: tuple  # (max negative root, min positive root), +-inf sentinels
    theorem1_satisfied: bool
    positive_multiplicity_parity: str  # "even" | "odd"
    log_likelihood_at_max: float

    def to_dict(self) -> dict:
        def _finite(x):
            return x if math.isfinite(x) else None

        return {
            "alpha_hat": self.alpha_hat,
            "bracket": [_finite(self.bracket[0]), _finite(self.bracket[1])],
            "theorem1_satisfied": self.theorem1_satisfied,
            "positive_multiplicity_parity": self.positive_multiplicity_parity,
            "loglik": self.log_likelihood_at_max,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _derivative(d: np.ndarray, c: np.ndarray, alpha: float) -> float:
    return float((d / (d * alpha + c)).sum())


def mle_estimate(log: SampleLog) -> MleReport:
    """Maximize the log-likelihood over the admissible interval inside (0, 1).

    The interval is the root bracket intersected with (0, 1), shrunk by a
    small interior margin; the maximizer is located by bisection on the sign
    of the derivative, which is monotone by concavity.
    """
    if len(log) == 0:
        raise ValueError("cannot estimate from an empty log")
    profile = root_profile(log)
    if profile.degree == 0:
        raise NoInformationError("all records are degenerate; likelihood is flat in alpha")
    satisfied, _ = check_theorem1(profile)
    a = profile.max_negative
    b = profile.min_positive

    lo = max(a, 0.0) + INTERIOR_MARGIN
    hi = min(b, 1.0) - INTERIOR_MARGIN
    if not lo < hi:
        raise ValueError(f"empty maximization interval ({lo}, {hi})")

    d, c = _slope_intercept(log)
    if _derivative(d, c, lo) <= 0:
        alpha_hat = lo
    elif _derivative(d, c, hi) >= 0:
        alpha_hat = hi
    else:
        left, right = lo, hi
        while right - left > BISECTION_WIDTH:
            mid = 0.5 * (left + right)
            if _derivative(d, c, mid) > 0:
                left = mid
            else:
                right = mid
        alpha_hat = 0.5 * (left + right)

    return MleReport(
        alpha_hat=alpha_hat,
        bracket=(a, b),
        theorem1_satisfied=satisfied,
        positive_multiplicity_parity="even" if profile.positive_multiplicity_sum % 2 == 0 else "odd",
        log_likelihood_at_max=log_likelihood(log, alpha_hat),
    )
