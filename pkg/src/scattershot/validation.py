"""Likelihood-ratio certification against the distinguishable-photon sampler.

For each Haar unitary the detected-pattern distribution is built under both
hypotheses with identical loss averaging, event streams are drawn from the
quantum side, and the running product of probability ratios is tracked. The
minimum sample size is the first stream length at which the required fraction
of independent streams exceeds ratio 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distribution import (
    DISTINGUISHABLE,
    INDISTINGUISHABLE,
    LossConfig,
    OutputDistribution,
    lossy_distribution,
    sample_event_indices,
)
from .errors import (
    DegenerateHypothesisError,
    InsufficientDataError,
    InvalidComparisonError,
    InvalidConfigurationError,
)
from .linalg import haar_random_unitary


def likelihood_trajectory(
    p_bs: OutputDistribution, p_dist: OutputDistribution, events
) -> np.ndarray:
    """Running products V_k of per-event probability ratios, log-space inside.

    events is a sequence of occupation vectors from the shared family.
    """
    if (p_bs.family, p_bs.m, p_bs.n_detected) != (p_dist.family, p_dist.m, p_dist.n_detected):
        raise InvalidComparisonError("hypothesis distributions must share one family")
    if not (p_bs.renormalized and p_dist.renormalized):
        raise InvalidComparisonError("hypothesis distributions must be renormalized")
    idx = np.array([p_bs.index_of(e) for e in events], dtype=np.int64)
    return np.exp(np.cumsum(_log_ratios(p_bs, p_dist)[idx]))


def _log_ratios(p_bs: OutputDistribution, p_dist: OutputDistribution) -> np.ndarray:
    support = p_bs.probs > 0.0
    if np.any(support & (p_dist.probs == 0.0)):
        raise DegenerateHypothesisError(
            "alternative hypothesis assigns zero probability to a reachable event"
        )
    out = np.full(p_bs.probs.size, -np.inf)
    out[support] = np.log(p_bs.probs[support]) - np.log(p_dist.probs[support])
    return out


@dataclass
class ValidationResult:
    """Minimum-sample-size estimate for one (n, loss) configuration."""

    m: int
    n: int
    n_detected: int
    loss: LossConfig
    min_samples_mean: float
    min_samples_std: float
    unitaries_used: int
    trials_per_unitary: int
    confidence: float
    seed: int
    per_unitary: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.min_samples_mean < 1:
            raise InvalidConfigurationError("minimum sample size below 1")
        if not 0.0 < self.confidence < 1.0:
            raise InvalidConfigurationError("confidence must lie in (0, 1)")


def _min_samples_single(u, n, loss, trials, confidence, stream_seed, max_samples):
    """Smallest N at which >= confidence of the trial streams have V_N > 1."""
    m = u.shape[0]
    heralded = np.zeros(m, dtype=np.uint8)
    heralded[: n + loss.n_lost_in] = 1
    p_bs = lossy_distribution(u, heralded, loss, model=INDISTINGUISHABLE)
    p_cl = lossy_distribution(u, heralded, loss, model=DISTINGUISHABLE)
    log_r = _log_ratios(p_bs, p_cl)
    rng = np.random.Generator(np.random.PCG64(stream_seed))
    idx = sample_event_indices(p_bs, rng, trials * max_samples).reshape(trials, max_samples)
    cums = np.cumsum(log_r[idx], axis=1)
    frac = np.mean(cums > 0.0, axis=0)
    hits = np.nonzero(frac >= confidence)[0]
    if hits.size == 0:
        raise InsufficientDataError(
            f"validation did not reach {confidence:.0%} within {max_samples} samples"
        )
    return int(hits[0]) + 1


def min_samples_to_validate(
    m: int,
    n: int,
    loss: LossConfig,
    ensemble: int = 50,
    trials: int = 500,
    confidence: float = 0.95,
    seed: int = 0,
    max_samples: int = 2000,
) -> ValidationResult:
    """Minimum data-set size to certify (lossy) sampling, Haar-ensemble averaged.

    n counts the photons propagated through the interferometer: n + n_lost_in
    are heralded and n - n_lost_out are detected. Per unitary, `trials`
    independent event streams are drawn from the lossy quantum distribution
    and the per-unitary minimum is the smallest N whose streams exceed V = 1
    at the confidence level. Seeds for unitaries and streams derive from the
    single seed, so results are reproducible and order-independent.
    """
    if ensemble < 2:
        raise InvalidConfigurationError("need an ensemble of at least 2 unitaries")
    if trials < 50:
        raise InvalidConfigurationError("need at least 50 trial streams per unitary")
    n_det = n - loss.n_lost_out
    if n_det < 1:
        raise InvalidConfigurationError("output losses leave no detected photons")
    if n + loss.n_lost_in > m:
        raise InvalidConfigurationError("heralded photons exceed mode count")
    root = np.random.SeedSequence(seed)
    per_unitary = np.empty(ensemble, dtype=np.int64)
    for i, child in enumerate(root.spawn(ensemble)):
        u_ss, stream_ss = child.spawn(2)
        u = haar_random_unitary(m, u_ss)
        per_unitary[i] = _min_samples_single(
            u, n, loss, trials, confidence, stream_ss, max_samples
        )
    return ValidationResult(
        m=m,
        n=n,
        n_detected=n_det,
        loss=loss,
        min_samples_mean=float(per_unitary.mean()),
        min_samples_std=float(per_unitary.std(ddof=1)),
        unitaries_used=ensemble,
        trials_per_unitary=trials,
        confidence=confidence,
        seed=seed,
        per_unitary=per_unitary,
    )


def fit_sample_scaling(points) -> tuple[float, float]:
    """Least-squares fit of min_samples = A + B n^-3 over (n, samples) pairs."""
    pts = [(float(n), float(s)) for n, s in points]
    if len({n for n, _ in pts}) < 3:
        raise InsufficientDataError("scaling fit needs at least 3 distinct n")
    ns = np.array([n for n, _ in pts])
    ys = np.array([s for _, s in pts])
    design = np.column_stack([np.ones_like(ns), ns**-3.0])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    return float(coef[0]), float(coef[1])
