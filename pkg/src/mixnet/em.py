"""Expectation-maximization estimate of the attachment mixture weight.

The E-step computes, for each logged record, the posterior probability that
its edge came from the preferential component; the M-step sets the next
alpha to the mean of those responsibilities.  The iteration monotonically
increases the incomplete log-likelihood and converges by its concavity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .likelihood import log_likelihood
from .netmodel import AttachmentRecord, SampleLog

#: a decrease of the objective beyond this slack indicates a bug
MONOTONICITY_SLACK = 1e-9


@dataclass(frozen=True)
class EmConfig:
    alpha_init: float = 0.5
    epsilon: float = 1e-8
    max_iter: int = 10000
    keep_zero_indegree: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha_init < 1.0:
            raise ValueError(f"alpha_init must be in (0, 1), got {self.alpha_init}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


def responsibility(record: AttachmentRecord, alpha: float) -> float:
    """Posterior probability that the record's edge used preferential attachment."""
    pref = record.k / record.e_prev * alpha
    rand = (1.0 - alpha) / record.n_prev
    if pref + rand <= 0:
        raise ValueError(
            f"zero mixture density for record {record} at alpha={alpha}"
        )
    return pref / (pref + rand)


def _responsibilities(log: SampleLog, alpha: float) -> np.ndarray:
    pref = log.k / log.e_prev * alpha
    rand = (1.0 - alpha) / log.n_prev
    total = pref + rand
    if (total <= 0).any():
        i = int(np.argmax(total <= 0))
        raise ValueError(
            f"zero mixture density at alpha={alpha} for record {i} "
            f"(k={log.k[i]}, e_prev={log.e_prev[i]}, n_prev={log.n_prev[i]})"
        )
    return pref / total


def em_step(log: SampleLog, alpha: float) -> float:
    """One update: the mean responsibility over all records."""
    if len(log) == 0:
        raise ValueError("EM step on an empty log")
    return float(_responsibilities(log, alpha).mean())


@dataclass
class EmTrace:
    iterations: list = field(default_factory=list)  # (alpha, incomplete loglik)
    converged: bool = False
    final_alpha: float = float("nan")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iter", "alpha", "loglik"])
            for i, (alpha, loglik) in enumerate(self.iterations):
                writer.writerow([i, repr(alpha), repr(loglik)])


def em_estimate(log: SampleLog, cfg: EmConfig = EmConfig()) -> EmTrace:
    """Iterate the EM update from alpha_init until |delta alpha| < epsilon.

    Records with k = 0 are dropped by default (they carry no preferential
    mass and their responsibility is identically 0); set
    ``cfg.keep_zero_indegree`` to include them.
    """
    if len(log) == 0:
        raise ValueError("cannot estimate from an empty log")
    if not cfg.keep_zero_indegree:
        log = log.drop_zero_indegree()
        if len(log) == 0:
            raise ValueError("log contains only zero-in-degree records")

    trace = EmTrace()
    alpha = cfg.alpha_init
    prev_loglik = log_likelihood(log, alpha)
    trace.iterations.append((alpha, prev_loglik))
    for _ in range(cfg.max_iter):
        new_alpha = em_step(log, alpha)
        loglik = log_likelihood(log, new_alpha)
        if loglik < prev_loglik - MONOTONICITY_SLACK:
            raise RuntimeError(
                f"EM objective decreased from {prev_loglik} to {loglik}; "
                "this violates EM monotonicity and indicates a bug"
            )
        trace.iterations.append((new_alpha, loglik))
        delta = abs(new_alpha - alpha)
        alpha, prev_loglik = new_alpha, loglik
        if delta < cfg.epsilon:
            trace.converged = True
            break
    trace.final_alpha = alpha
    return trace
