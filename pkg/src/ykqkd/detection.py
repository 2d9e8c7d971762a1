"""Quantum detection bounds and a photon-counting receiver model.

Binary minimum-error discrimination of two density operators rho1, rho0 with
priors p1, p0 has the closed-form optimum

    P_e = (1/2) * (1 - || p1*rho1 - p0*rho0 ||_1),

which for two pure coherent states reduces to

    P_e = (1/2) * (1 - sqrt(1 - 4*p1*p0*|<a|b>|^2)).

For N-state identification no closed-form optimum is attempted here; the
module supplies the standard bracket instead: the closest-pair binary error
as the lower bound and the square-root-measurement error as the upper bound,
with pure guessing (N-1)/N as the no-information ceiling.  A Poisson
threshold receiver models direct detection of intensity-keyed pulses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import poisson

from .quantum_core import (
    CoherentState,
    AmplitudeGrid,
    SpanOperator,
    coherent_overlap,
    gram_matrix,
    hermitian_sqrt_and_invsqrt,
)

__all__ = [
    "DiscriminationResult",
    "PoissonReceiver",
    "helstrom_pure_binary",
    "helstrom_mixed_binary",
    "srm_error",
    "neighbor_lower_bound",
    "bob_error_ideal",
    "pure_guess_error",
    "poisson_threshold_receiver",
]


@dataclass(frozen=True)
class DiscriminationResult:
    """Error probability of a discrimination strategy, with diagnostics.

    `method` tags how the number was obtained: helstrom-pure, helstrom-mixed,
    srm, neighbor-lower-bound, pure-guess or poisson-threshold.
    """

    error_probability: float
    method: str
    eigenvalues: tuple[float, ...] | None = None
    threshold: int | None = None
    rank_deficiency: int | None = None


def _clip_probability(p: float) -> float:
    # eigenvalue sums can overshoot [0, 1] by double-precision dust
    return min(max(p, 0.0), 1.0)


def helstrom_pure_binary(
    a: CoherentState, b: CoherentState, p1: float = 0.5
) -> DiscriminationResult:
    """Minimum error probability for two pure coherent states.

    P_e = (1/2) * (1 - sqrt(1 - 4*p1*(1-p1)*|<a|b>|^2)).  Degenerate priors
    (p1 = 0 or 1) are rejected: with one hypothesis there is nothing to
    discriminate.
    """
    if not 0.0 < p1 < 1.0:
        raise ValueError(f"prior p1 must lie strictly between 0 and 1, got {p1}")
    overlap_sq = abs(coherent_overlap(a.amplitude, b.amplitude)) ** 2
    err = 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - 4.0 * p1 * (1.0 - p1) * overlap_sq)))
    return DiscriminationResult(_clip_probability(err), "helstrom-pure")


def helstrom_mixed_binary(
    rho1: SpanOperator, rho0: SpanOperator, p1: float = 0.5
) -> DiscriminationResult:
    """Minimum error probability for two mixed states on a common span.

    P_e = (1/2) * (1 - sum_i |lambda_i|) with lambda_i the eigenvalues of
    p1*rho1 - p0*rho0 (the trace-norm form of the binary optimum).
    """
    if not 0.0 < p1 < 1.0:
        raise ValueError(f"prior p1 must lie strictly between 0 and 1, got {p1}")
    if not rho1.same_span(rho0):
        raise ValueError("rho1 and rho0 are expressed on different spans")
    lam = np.linalg.eigvalsh(p1 * rho1.matrix - (1.0 - p1) * rho0.matrix)
    err = 0.5 * (1.0 - float(np.sum(np.abs(lam))))
    return DiscriminationResult(
        _clip_probability(err), "helstrom-mixed", eigenvalues=tuple(map(float, lam))
    )


def srm_error(
    constellation: Sequence[CoherentState], priors: Sequence[float] | None = None
) -> DiscriminationResult:
    """Square-root-measurement error for an N-state pure constellation.

    With the prior-weighted Gram matrix G'_ij = sqrt(p_i p_j) <psi_i|psi_j>,
    the SRM identifies state i correctly with probability ((G'^{1/2})_ii)^2,
    so the average error is 1 - sum_i ((G'^{1/2})_ii)^2.  For equal priors
    this is 1 - (1/N) sum_i ((G^{1/2})_ii)^2.  The SRM is optimal for binary
    symmetric pure states and is used as an upper bound elsewhere.

    A non-zero rank deficiency in the result flags duplicate (or numerically
    coincident) constellation states.
    """
    n = len(constellation)
    if priors is None:
        priors = np.full(n, 1.0 / n)
    else:
        priors = np.asarray(priors, dtype=float)
        if priors.shape != (n,):
            raise ValueError("need exactly one prior per constellation state")
        if np.any(priors < 0) or abs(priors.sum() - 1.0) > 1e-12:
            raise ValueError("priors must be non-negative and sum to 1")
    g = gram_matrix(constellation)
    weighted = np.sqrt(np.outer(priors, priors)) * g
    roots = hermitian_sqrt_and_invsqrt(weighted)
    correct = float(np.sum(np.abs(np.diag(roots.sqrt)) ** 2))
    return DiscriminationResult(
        _clip_probability(1.0 - correct), "srm", rank_deficiency=roots.n_cut
    )


def neighbor_lower_bound(grid: AmplitudeGrid, scale: float = 1.0) -> DiscriminationResult:
    """Closest-pair binary error: a lower bound on grid-state identification.

    No measurement distinguishing all 2M levels can beat the optimal binary
    test on the two closest ones, at distance scale * alpha_max / (2M).
    """
    if not scale > 0:
        raise ValueError(f"amplitude scale must be positive, got {scale}")
    d = scale * grid.spacing
    err = 0.5 * (1.0 - math.sqrt(1.0 - math.exp(-d * d)))
    return DiscriminationResult(_clip_probability(err), "neighbor-lower-bound")


def bob_error_ideal(
    pair_low: CoherentState, pair_high: CoherentState
) -> DiscriminationResult:
    """Ideal (quantum-limited) error for the receiver's two-level decision.

    Equal-prior pure-state optimum on the pair actually transmitted; depends
    only on the pair separation, not on how many pairs the grid holds.
    """
    result = helstrom_pure_binary(pair_low, pair_high, 0.5)
    return DiscriminationResult(result.error_probability, "helstrom-pure")


def pure_guess_error(n_hypotheses: int) -> DiscriminationResult:
    """Error (N-1)/N of guessing blindly among N equiprobable hypotheses."""
    if n_hypotheses < 1:
        raise ValueError(f"need at least one hypothesis, got {n_hypotheses}")
    return DiscriminationResult((n_hypotheses - 1) / n_hypotheses, "pure-guess")


@dataclass(frozen=True)
class PoissonReceiver:
    """Integer-threshold decision between two Poisson count hypotheses.

    Counting statistics: hypothesis b yields Poisson(mean_b + dark_mean)
    counts per slot.  `decide` returns 1 (the high-mean hypothesis) when the
    count reaches the threshold.
    """

    mean_low: float
    mean_high: float
    dark_mean: float
    threshold: int

    def decide(self, count: int) -> int:
        return 1 if count >= self.threshold else 0


def poisson_threshold_receiver(
    mean0: float,
    mean1: float,
    dark: float = 0.0,
    p1: float = 0.5,
) -> tuple[PoissonReceiver, DiscriminationResult]:
    """Optimal integer count threshold and its exact error probability.

    mean0 and mean1 are the signal photon means of the low and high
    hypotheses (mean0 <= mean1; relabel before calling otherwise); dark
    counts add to both.  The threshold minimizing

        P_e(t) = p1 * P[N1 < t] + p0 * P[N0 >= t]

    is found by exhaustive scan over t = 0 .. ceil(mean1 + dark) +
    10*sqrt(mean1 + dark) + 10, using exact Poisson tail sums rather than a
    Gaussian approximation (the means of interest are small).
    """
    if not (math.isfinite(mean0) and math.isfinite(mean1) and math.isfinite(dark)):
        raise ValueError("means must be finite")
    if min(mean0, mean1, dark) < 0:
        raise ValueError("means must be non-negative")
    if mean0 > mean1:
        raise ValueError(
            f"mean0 ={mean0} exceeds mean1 ={mean1}; relabel the hypotheses"
        )
    if not 0.0 < p1 < 1.0:
        raise ValueError(f"prior p1 must lie strictly between 0 and 1, got {p1}")
    lam0 = mean0 + dark
    lam1 = mean1 + dark
    t_max = int(math.ceil(lam1) + math.ceil(10.0 * math.sqrt(lam1)) + 10)
    thresholds = np.arange(t_max + 1)
    # P[N1 < t] + P[N0 >= t], evaluated for every candidate threshold at once
    errors = p1 * poisson.cdf(thresholds - 1, lam1) + (1.0 - p1) * poisson.sf(
        thresholds - 1, lam0
    )
    best = int(np.argmin(errors))
    receiver = PoissonReceiver(mean0, mean1, dark, best)
    result = DiscriminationResult(
        _clip_probability(float(errors[best])), "poisson-threshold", threshold=best
    )
    return receiver, result
