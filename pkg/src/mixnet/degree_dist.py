"""Theoretical and empirical in-degree distributions.

The stationary pmf is evaluated by iterating its ratio recurrence from the
closed base case; the Gamma-function solutions of the recurrence are kept
as cross-check oracles only, since their arguments grow with k and the
uniform-attachment limit degenerates them.  The finite-time pmf iterates
the one-step expectation recurrence of the growth model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .netmodel import GrowingNetwork, ModelParams


class UnsupportedRegimeError(ValueError):
    """alpha = 1 with m_hat = 0: every node keeps in-degree 0 at arrival."""


def _check_regime(params: ModelParams) -> None:
    if params.alpha == 1.0 and params.m_hat == 0:
        raise UnsupportedRegimeError(
            "alpha=1 with m_hat=0 is not supported: the stationary "
            "distribution requires m_hat >= 1 under pure preferential attachment"
        )


def _ratio(params: ModelParams, k: np.ndarray | int):
    """P(k) / P(k-1) of the stationary recurrence, for k > m_hat."""
    m, mh, a = params.m, params.m_hat, params.alpha
    num = a * (k * m - m * m - m * mh - m) + m * m + m * mh
    den = a * (k * m - m * m - m * mh) + m * m + m * mh + m + mh
    return num / den


def _base_pmf(params: ModelParams) -> float:
    m, mh, a = params.m, params.m_hat, params.alpha
    return (m + mh) / (m * m + m * mh + m + mh - a * m * m)


@dataclass
class StationaryDistribution:
    """Long-run in-degree pmf and CCDF; support starts at k = m_hat."""

    params: ModelParams
    _pmf: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def __post_init__(self):
        _check_regime(self.params)

    @property
    def support_start(self) -> int:
        return self.params.m_hat

    def _extend(self, k_max: int) -> None:
        mh = self.support_start
        if len(self._pmf) > k_max - mh:
            return
        ks = np.arange(mh, k_max + 1)
        ratios = np.empty(len(ks))
        ratios[0] = _base_pmf(self.params)
        if len(ks) > 1:
            ratios[1:] = _ratio(self.params, ks[1:])
        self._pmf = np.cumprod(ratios)

    def pmf_array(self, k_max: int) -> np.ndarray:
        """P(k) for k = m_hat .. k_max inclusive."""
        if k_max < self.support_start:
            raise ValueError(f"k_max={k_max} below support start {self.support_start}")
        self._extend(k_max)
        return self._pmf[: k_max - self.support_start + 1].copy()

    def pmf(self, k: int) -> float:
        if k < self.support_start:
            raise ValueError(f"k={k} below support start {self.support_start}")
        self._extend(k)
        return float(self._pmf[k - self.support_start])

    def ccdf(self, k: int) -> float:
        """P(K >= k); equals 1 at the support start by the empty sum."""
        if k < self.support_start:
            raise ValueError(f"k={k} below support start {self.support_start}")
        return float(self.ccdf_array(k)[-1])

    def _tail_masses(self, k_max: int) -> np.ndarray:
        """F-bar(k) for k = m_hat .. k_max by summing the pmf tail outward.

        The truncation remainder is bounded by a geometric estimate from the
        last pmf ratio, which is conservative for both the exponential and
        the power-law tail regimes of the recurrence.
        """
        k_top = max(2 * k_max, k_max + 64)
        while True:
            pmf = self.pmf_array(k_top)
            r = pmf[-1] / pmf[-2]
            remainder = pmf[-1] * r / (1.0 - r) if r < 1.0 else np.inf
            fbar_at_kmax = pmf[k_max - self.support_start:].sum() + remainder
            if remainder <= 1e-12 * fbar_at_kmax:
                break
            if k_top > 50_000_000:
                raise ValueError(f"tail summation did not converge by k={k_top}")
            k_top *= 2
        rev = np.cumsum(pmf[::-1])[::-1] + remainder
        return rev[: k_max - self.support_start + 1]

    def ccdf_array(self, k_max: int) -> np.ndarray:
        """CCDF for k = m_hat .. k_max inclusive."""
        pmf = self.pmf_array(k_max)
        out = np.empty(len(pmf))
        out[0] = 1.0
        out[1:] = 1.0 - np.cumsum(pmf[:-1])
        if out[-1] < 1e-8:
            # 1 - cumsum cancels catastrophically deep in the tail; recompute
            # the small entries by explicit tail summation
            tails = self._tail_masses(k_max)
            small = out < 1e-8
            out[small] = tails[small]
        return out

    def support_for_mass(self, mass: float = 1.0 - 1e-6, k_cap: int = 10_000_000) -> int:
        """Smallest k_max whose truncated pmf holds at least ``mass``."""
        k_max = self.support_start + 64
        while k_max <= k_cap:
            if self.pmf_array(k_max).sum() >= mass:
                arr = self.pmf_array(k_max)
                csum = np.cumsum(arr)
                return self.support_start + int(np.searchsorted(csum, mass))
            k_max *= 2
        raise ValueError(f"support above {k_cap} needed to hold mass {mass}")

    def quantile(self, q: float) -> int:
        """Smallest k with CDF(k) >= q."""
        k_max = self.support_for_mass(max(q, 0.5))
        pmf = self.pmf_array(k_max)
        csum = np.cumsum(pmf)
        return self.support_start + int(np.searchsorted(csum, q))


def stationary_pmf(params: ModelParams, k: int) -> float:
    return StationaryDistribution(params).pmf(k)


def stationary_ccdf(params: ModelParams, k: int) -> float:
    return StationaryDistribution(params).ccdf(k)


def stationary_pmf_closed_form(params: ModelParams, k: int) -> float:
    """Gamma/geometric solution of the stationary recurrence (cross-check path).

    For alpha = 1 the literature's printed constant factor is inconsistent
    with the recurrence base case; the constant used here is the one that
    satisfies it (the k-dependence is unchanged).
    """
    _check_regime(params)
    m, mh, a = params.m, params.m_hat, params.alpha
    if k < mh:
        raise ValueError(f"k={k} below support start {mh}")
    if a == 0.0:
        return 1.0 / (m + 1) * (m / (m + 1)) ** (k - mh)
    if a == 1.0:
        # P(mh) * Gamma(k) Gamma(mh + 2 + mh/m) / (Gamma(mh) Gamma(k + 2 + mh/m))
        c = 2.0 + mh / m
        log_p = (
            np.log(_base_pmf(params))
            + gammaln(k) + gammaln(mh + c) - gammaln(mh) - gammaln(k + c)
        )
        return float(np.exp(log_p))
    s = (m + mh) * (1.0 - a) / a
    log_p = (
        np.log((m + mh) / (m * a))
        + gammaln((mh + m * (1 + m + mh - m * a)) / (m * a))
        + gammaln(k + s)
        - gammaln((m + mh - m * a) / a)
        - gammaln((mh + m * (m + mh + k * a - (m + mh) * a + a + 1)) / (m * a))
    )
    return float(np.exp(log_p))


def stationary_ccdf_closed_form(params: ModelParams, k: int) -> float:
    """Closed-form CCDF matching the recurrence (cross-check path).

    As with the pmf, the alpha = 1 branch uses the constant that makes the
    CCDF equal 1 at the support start.
    """
    _check_regime(params)
    m, mh, a = params.m, params.m_hat, params.alpha
    if k < mh:
        raise ValueError(f"k={k} below support start {mh}")
    if a == 0.0:
        return (m / (1.0 + m)) ** (k - mh)
    if k == mh:
        return 1.0
    if a == 1.0:
        c = (m + mh) / m
        log_f = gammaln(mh + c) + gammaln(k) - gammaln(mh) - gammaln(k + c)
        return float(np.exp(log_f))
    s = (m + mh) * (1.0 - a) / a
    log_f = (
        gammaln((mh + m * (1 + m + mh - a * m)) / (m * a))
        + gammaln(k + s)
        - gammaln((mh + m * (1 - a)) / a)
        - gammaln((mh + m * (m + mh + k * a - (m + mh) * a + 1)) / (m * a))
    )
    return float(np.exp(log_f))


class SupportOverflowError(RuntimeError):
    """The finite-time iteration needs a wider support than allowed."""


def finite_t_pmf(
    params: ModelParams,
    seed_stats: tuple,
    steps: int,
    tail_tol: float = 1e-12,
    max_support: int = 1_000_000,
) -> np.ndarray:
    """Iterate the expected-in-degree recurrence for ``steps`` steps.

    ``seed_stats`` is (n0, e0, P0) with P0 the seed pmf as a mapping
    k -> probability.  Returns the pmf as an array indexed by k from 0.
    The support widens on demand; exceeding ``max_support`` raises with a
    diagnostic.  Mass is transferred between adjacent bins, so the total
    stays 1 up to rounding.
    """
    n0, e0, p0 = seed_stats
    if steps < 0:
        raise ValueError("steps must be >= 0")
    m, mh, a = params.m, params.m_hat, params.alpha

    k_top = max(max(p0) if p0 else 0, mh) + 8
    p = np.zeros(k_top + 1)
    for k, v in p0.items():
        if k < 0:
            raise ValueError(f"negative in-degree {k} in seed pmf")
        p[k] = v
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"seed pmf sums to {p.sum()}, expected 1")

    ks = np.arange(len(p), dtype=float)
    lost = 0.0
    for t in range(1, steps + 1):
        if p[-1] != 0.0:
            # top bin occupied: widen so the next transfer is not clipped
            grow = max(len(p) // 2, 64)
            if len(p) + grow > max_support:
                raise SupportOverflowError(
                    f"support of {len(p)} bins insufficient at step {t}; "
                    f"widening past max_support={max_support} refused"
                )
            p = np.concatenate([p, np.zeros(grow)])
            ks = np.arange(len(p), dtype=float)
        n_prev = n0 + t - 1
        e_prev = e0 + (m + mh) * (t - 1)
        out_rate = (m * a * n_prev / e_prev) * ks + m * (1.0 - a)
        flow = out_rate * p
        n_new = n_prev * p - flow
        n_new[1:] += flow[:-1]
        n_new[mh] += 1.0
        p = n_new / (n_prev + 1)
        # drop negligible boundary mass so the support tracks the bulk
        if 0.0 < p[-1] < tail_tol:
            lost += p[-1]
            p[-1] = 0.0
            if lost > 1e-6:
                raise SupportOverflowError(
                    f"dropped tail mass exceeds 1e-6 by step {t}; "
                    "raise tail_tol precision or max_support"
                )
    return p


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """TV distance between two pmfs indexed from 0 (padded to equal length)."""
    n = max(len(p), len(q))
    pp = np.zeros(n)
    qq = np.zeros(n)
    pp[: len(p)] = p
    qq[: len(q)] = q
    return 0.5 * float(np.abs(pp - qq).sum())


@dataclass
class EmpiricalDistribution:
    counts: dict  # in-degree -> node count
    total: int


def empirical_distribution(net: GrowingNetwork) -> EmpiricalDistribution:
    if net.node_count == 0:
        raise ValueError("empty network")
    binc = np.bincount(net.in_degree_array())
    counts = {int(k): int(c) for k, c in enumerate(binc) if c}
    return EmpiricalDistribution(counts=counts, total=net.node_count)


def empirical_ccdf(dist: EmpiricalDistribution) -> dict:
    """Map k -> fraction of nodes with in-degree >= k, for k = 0 .. max + 1."""
    k_max = max(dist.counts)
    ccdf = {}
    above = 0
    for k in range(k_max + 1, -1, -1):
        above += dist.counts.get(k, 0)
        ccdf[k] = above / dist.total
    return dict(sorted(ccdf.items()))


def ccdf_from_indegrees(in_degrees: np.ndarray, k_max: int) -> np.ndarray:
    """Empirical CCDF evaluated at k = 0 .. k_max as an array."""
    binc = np.bincount(in_degrees, minlength=k_max + 1)[: k_max + 1]
    n = len(in_degrees)
    tail_above = n - binc.sum()  # nodes with in-degree > k_max
    ccdf = (np.concatenate([binc[::-1].cumsum()[::-1], [0]]) + tail_above) / n
    return ccdf[: k_max + 1]
