"""Exact boson-sampling output distributions and their lossy averages.

Indistinguishable photons follow the squared-permanent rule; the
distinguishable-particle alternative uses the permanent of the elementwise
|u|^2 matrix. Lossy distributions average over every loss configuration
compatible with the detected pattern: uniform over injected input subsets,
and output loss marginalized by binning every n-photon output (bunched ones
included) onto its photon-subset sub-patterns, renormalizing once at the end
over the collision-free detected family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import states as st
from .errors import (
    InvalidComparisonError,
    InvalidConfigurationError,
    InvalidDistributionError,
)
from .linalg import build_submatrix, mode_indices, occupation_factorial, photon_number
from .permanent import permanent_glynn, permanents_batch

INDISTINGUISHABLE = "indistinguishable"
DISTINGUISHABLE = "distinguishable"

NORMALIZATION_TOL = 1e-9


@dataclass
class OutputDistribution:
    """Probability table over one n-photon state family.

    states holds the (K, m) occupation vectors in the canonical lexicographic
    order, probs the matching probabilities. raw_mass is the total probability
    mass before any renormalization.
    """

    m: int
    n_detected: int
    family: str
    states: np.ndarray
    probs: np.ndarray
    raw_mass: float
    renormalized: bool
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if np.any(self.probs < -1e-15):
            raise InvalidDistributionError("negative probability entry")
        self.probs = np.clip(self.probs, 0.0, None)
        if self.renormalized and abs(float(self.probs.sum()) - 1.0) > NORMALIZATION_TOL:
            raise InvalidDistributionError(
                f"renormalized distribution sums to {self.probs.sum()!r}"
            )

    def __len__(self) -> int:
        return self.probs.size

    def as_dict(self) -> dict:
        return {tuple(int(x) for x in row): float(p) for row, p in zip(self.states, self.probs)}

    def index_of(self, state) -> int:
        key = np.asarray(state, dtype=np.uint8)
        hits = np.nonzero(np.all(self.states == key, axis=1))[0]
        if hits.size != 1:
            raise InvalidConfigurationError(f"state {tuple(state)} not in family")
        return int(hits[0])


def bs_probability(u: np.ndarray, input_state, output_state) -> float:
    """|per(U_{S,T})|^2 / (prod s_i! prod t_j!) for indistinguishable photons."""
    sub = build_submatrix(u, input_state, output_state)
    per = permanent_glynn(sub)
    norm = occupation_factorial(input_state) * occupation_factorial(output_state)
    return float(abs(per) ** 2 / norm)


def distinguishable_probability(u: np.ndarray, input_state, output_state) -> float:
    """per(|U_{S,T}|^2) / prod t_j!, the classical-particle transition rule."""
    sub = build_submatrix(u, input_state, output_state)
    per = permanents_batch(np.abs(sub[None, :, :]) ** 2)[0]
    return float(per.real / occupation_factorial(output_state))


def _batch_probabilities(u, in_modes, out_modes_stack, out_occ, model) -> np.ndarray:
    """Probabilities of every output pattern in the stack, one einsum batch."""
    mats = u[out_modes_stack][:, :, in_modes]
    if model == INDISTINGUISHABLE:
        pers = permanents_batch(mats)
        probs = np.abs(pers) ** 2
        probs /= math.prod(math.factorial(int(c)) for c in np.bincount(in_modes))
    elif model == DISTINGUISHABLE:
        probs = permanents_batch(np.abs(mats) ** 2).real.copy()
    else:
        raise InvalidConfigurationError(f"unknown particle model {model!r}")
    n = out_modes_stack.shape[1]
    if np.any(out_occ > 1):
        fact = np.array([math.factorial(i) for i in range(n + 1)], dtype=np.float64)
        probs /= np.prod(fact[out_occ], axis=1)
    return probs


def full_distribution(
    u: np.ndarray,
    input_state,
    family: str = st.COLLISION_FREE,
    model: str = INDISTINGUISHABLE,
    renormalize: bool = False,
    cap: int = st.DEFAULT_STATE_CAP,
) -> OutputDistribution:
    """Exact output distribution of one input state over a whole family."""
    m = u.shape[0]
    n = photon_number(input_state)
    if n < 1:
        raise InvalidConfigurationError("need at least one photon")
    occ, modes = st.enumerate_states(m, n, family, cap=cap)
    in_modes = mode_indices(input_state)
    probs = _batch_probabilities(u, in_modes, modes, occ, model)
    raw = float(probs.sum())
    if renormalize:
        probs = probs / raw
    return OutputDistribution(
        m=m,
        n_detected=n,
        family=family,
        states=occ,
        probs=probs,
        raw_mass=raw,
        renormalized=renormalize,
        meta={"model": model, "input": tuple(int(x) for x in np.asarray(input_state))},
    )


@dataclass(frozen=True)
class LossConfig:
    """Photon losses before injection and before output detection."""

    n_lost_in: int = 0
    n_lost_out: int = 0

    def __post_init__(self):
        if self.n_lost_in < 0 or self.n_lost_out < 0:
            raise InvalidConfigurationError("loss counts must be >= 0")

    @property
    def total(self) -> int:
        return self.n_lost_in + self.n_lost_out


def _input_subsets(heralded_modes: np.ndarray, n_keep: int):
    """All heralded-mode subsets of size n_keep, as mode-index arrays."""
    from itertools import combinations

    return [np.array(c, dtype=np.int64) for c in combinations(heralded_modes.tolist(), n_keep)]


def _marginal_over_output_loss(probs_n, modes_n, m, n_lost_out):
    """Bin n-photon probabilities onto their detected sub-patterns.

    Every photon is equally likely to be among the n_lost_out lost, so each
    n-photon output splits its probability uniformly over its C(n, n_lost_out)
    photon-subset sub-patterns (counted with multiplicity when modes collide).
    Only collision-free detected patterns are kept; the caller renormalizes.
    Returns raw values aligned with the canonical detected-family enumeration.
    """
    from itertools import combinations

    n = modes_n.shape[1]
    n_det = n - n_lost_out
    det_occ, det_modes = st.enumerate_states(m, n_det, st.COLLISION_FREE)
    index = {tuple(row.tolist()): i for i, row in enumerate(det_modes)}
    out = np.zeros(det_modes.shape[0], dtype=np.float64)
    weight = 1.0 / math.comb(n, n_lost_out)
    for p, row in zip(probs_n, modes_n):
        mods = row.tolist()
        for keep in combinations(mods, n_det):
            hit = index.get(keep)
            if hit is not None:  # mode repeats in `keep` mean a collision survived
                out[hit] += p * weight
    return det_occ, out


def detected_distribution(
    u: np.ndarray,
    input_state,
    n_lost_out: int,
    model: str = INDISTINGUISHABLE,
    cap: int = st.DEFAULT_STATE_CAP,
) -> OutputDistribution:
    """Collision-free detected patterns after n_lost_out photons vanish at the output.

    The full Fock family of n-photon outputs (bunched ones included) feeds the
    marginalization, since a collided output that loses the right photon still
    yields a collision-free click pattern.
    """
    m = u.shape[0]
    n = photon_number(input_state)
    if not 0 < n_lost_out < n:
        raise InvalidConfigurationError(f"need 0 < n_lost_out < n, got {n_lost_out}, n={n}")
    occ, modes = st.enumerate_states(m, n, st.FULL_FOCK, cap=cap)
    probs = _batch_probabilities(u, mode_indices(input_state), modes, occ, model)
    det_occ, raw = _marginal_over_output_loss(probs, modes, m, n_lost_out)
    mass = float(raw.sum())
    return OutputDistribution(
        m=m,
        n_detected=n - n_lost_out,
        family=st.COLLISION_FREE,
        states=det_occ,
        probs=raw / mass,
        raw_mass=mass,
        renormalized=True,
        meta={
            "model": model,
            "input": tuple(int(x) for x in np.asarray(input_state)),
            "loss": (0, n_lost_out),
        },
    )


def lossy_distribution(
    u: np.ndarray,
    heralded_state,
    loss: LossConfig,
    model: str = INDISTINGUISHABLE,
    cap: int = st.DEFAULT_STATE_CAP,
) -> OutputDistribution:
    """Detected-pattern distribution of a heralded input under known losses.

    n_her photons are heralded, loss.n_lost_in are lost before the
    interferometer (uniform over the C(n_her, n_lost_in) injected subsets) and
    loss.n_lost_out of the propagated photons are lost before detection
    (marginalized over supersets). The result is renormalized over the
    collision-free detected family.
    """
    her = np.asarray(heralded_state)
    if np.any(her > 1):
        raise InvalidConfigurationError("heralded state must be collision-free")
    m = u.shape[0]
    n_her = photon_number(her)
    if loss.total >= n_her:
        raise InvalidConfigurationError(
            f"losses ({loss.total}) must be fewer than heralded photons ({n_her})"
        )
    n = n_her - loss.n_lost_in
    n_det = n - loss.n_lost_out

    # collision-free family when detection is direct; all bunched outputs count
    # as loss marginalization parents when photons vanish at the output
    family = st.COLLISION_FREE if loss.n_lost_out == 0 else st.FULL_FOCK
    occ_n, modes_n = st.enumerate_states(m, n, family, cap=cap)
    heralded_modes = mode_indices(her)
    acc = np.zeros(modes_n.shape[0], dtype=np.float64)
    subsets = _input_subsets(heralded_modes, n)
    for sub in subsets:
        acc += _batch_probabilities(u, sub, modes_n, occ_n, model)
    acc /= len(subsets)

    if loss.n_lost_out > 0:
        det_occ, raw = _marginal_over_output_loss(acc, modes_n, m, loss.n_lost_out)
    else:
        det_occ, raw = occ_n, acc
    mass = float(raw.sum())
    return OutputDistribution(
        m=m,
        n_detected=n_det,
        family=st.COLLISION_FREE,
        states=det_occ,
        probs=raw / mass,
        raw_mass=mass,
        renormalized=True,
        meta={
            "model": model,
            "heralded": tuple(int(x) for x in her),
            "loss": (loss.n_lost_in, loss.n_lost_out),
        },
    )


def lossy_distribution_combined(
    u: np.ndarray,
    heralded_state,
    n_lost: int,
    model: str = INDISTINGUISHABLE,
    split_weights=None,
    cap: int = st.DEFAULT_STATE_CAP,
) -> OutputDistribution:
    """Loss-location-unknown distribution: mixture over all (in, out) splits.

    Splits (k, n_lost - k) for k = 0..n_lost are averaged with the given
    weights (uniform by default), each split contributing its renormalized
    detected-pattern distribution.
    """
    if n_lost < 1:
        raise InvalidConfigurationError("combined loss needs n_lost >= 1")
    weights = np.full(n_lost + 1, 1.0 / (n_lost + 1)) if split_weights is None else np.asarray(
        split_weights, dtype=np.float64
    )
    if weights.size != n_lost + 1 or np.any(weights < 0) or weights.sum() <= 0:
        raise InvalidConfigurationError("need one non-negative weight per loss split")
    weights = weights / weights.sum()
    mix = None
    ref = None
    for k in range(n_lost + 1):
        part = lossy_distribution(
            u, heralded_state, LossConfig(k, n_lost - k), model=model, cap=cap
        )
        mix = weights[k] * part.probs if mix is None else mix + weights[k] * part.probs
        ref = part
    return OutputDistribution(
        m=ref.m,
        n_detected=ref.n_detected,
        family=ref.family,
        states=ref.states,
        probs=mix,
        raw_mass=1.0,
        renormalized=True,
        meta={
            "model": model,
            "heralded": tuple(int(x) for x in np.asarray(heralded_state)),
            "n_lost": n_lost,
            "split_weights": weights.tolist(),
        },
    )


def total_variation_distance(p: OutputDistribution, q: OutputDistribution) -> float:
    """0.5 * sum |p_i - q_i| over a shared, renormalized family."""
    if (p.family, p.m, p.n_detected) != (q.family, q.m, q.n_detected):
        raise InvalidComparisonError(
            f"family mismatch: {(p.family, p.m, p.n_detected)} vs {(q.family, q.m, q.n_detected)}"
        )
    if not (p.renormalized and q.renormalized):
        raise InvalidComparisonError("total variation distance needs renormalized inputs")
    return float(0.5 * np.sum(np.abs(p.probs - q.probs)))


def sample_event_indices(dist: OutputDistribution, seed, count: int) -> np.ndarray:
    """Inverse-CDF draws of state indices; deterministic for a fixed seed."""
    if not dist.renormalized:
        raise InvalidDistributionError("sampling needs a renormalized distribution")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed))
    )
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0
    u = rng.random(count)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def sample_events(dist: OutputDistribution, seed, count: int) -> np.ndarray:
    """I.i.d. sampled occupation vectors, (count, m)."""
    idx = sample_event_indices(dist, seed, count)
    return dist.states[idx]
