"""Closed-form source and loss models for the three sampling platforms.

SPDC scattershot: per-shot pair generation up to second order, heralding with
non-number-resolving triggers, shuttered injection and lumped propagation +
detection efficiency. The success, fake and lossy event probabilities are
closed-form sums over generation, heralding and injection outcomes; an
independent Monte-Carlo simulation of the physical process cross-checks each
of them.

Quantum dot: passive (1/n per photon) or active (eta_dm per photon)
demultiplexing of a single-photon train.

Microwave: deterministic qubit sources with input loss, output loss and dark
counts in vacuum modes.

All multinomial weights are assembled in log space so large mode counts do
not overflow or underflow intermediate factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, exp, inf, lgamma, log

import numpy as np

from .errors import InvalidConfigurationError

MC_CHUNK = 200_000


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidConfigurationError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class SpdcParams:
    """SPDC scattershot parameters: g, eta_t, p_in, eta_d, pump rate (Hz)."""

    g: float
    eta_t: float
    p_in: float
    eta_d: float
    pump_rate: float = 8.0e7

    def __post_init__(self):
        for name in ("g", "eta_t", "p_in", "eta_d"):
            _check_prob(name, getattr(self, name))
        if self.g + self.g**2 > 1.0:
            raise InvalidConfigurationError(f"g + g^2 must be <= 1, got g={self.g}")
        if self.pump_rate <= 0:
            raise InvalidConfigurationError("pump_rate must be positive")

    @property
    def eta_t2(self) -> float:
        """Pair-click trigger efficiency 1 - (1 - eta_t)^2."""
        return 1.0 - (1.0 - self.eta_t) ** 2

    def with_eta_d(self, eta_d: float) -> "SpdcParams":
        return SpdcParams(self.g, self.eta_t, self.p_in, eta_d, self.pump_rate)


@dataclass(frozen=True)
class QdParams:
    """Quantum-dot parameters: source, demux, injection, detection efficiencies."""

    eta: float
    eta_dm: float
    p_in: float
    eta_d: float

    def __post_init__(self):
        for name in ("eta", "eta_dm", "p_in", "eta_d"):
            _check_prob(name, getattr(self, name))

    def with_eta_d(self, eta_d: float) -> "QdParams":
        return QdParams(self.eta, self.eta_dm, self.p_in, eta_d)


@dataclass(frozen=True)
class MwParams:
    """Microwave parameters: creation and detection efficiency, dark counts, step time."""

    p_in: float
    eta_d: float
    p_dark: float
    t_step: float = 0.3e-6

    def __post_init__(self):
        for name in ("p_in", "eta_d", "p_dark"):
            _check_prob(name, getattr(self, name))
        if self.t_step <= 0:
            raise InvalidConfigurationError("t_step must be positive")


def _log_pow(base: float, k: float) -> float:
    """k * log(base) with the 0^0 = 1 convention; -inf for 0^positive."""
    if k == 0:
        return 0.0
    if base <= 0.0:
        return -inf
    return k * log(base)


def _log_comb(n: int, k: int) -> float:
    if k < 0 or k > n or n < 0:
        return -inf
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def spdc_number_prob(chi: float, s: int) -> float:
    """Pair-number distribution of a two-mode squeezed state, tanh^(2s)/cosh^2."""
    if chi < 0 or s < 0:
        raise InvalidConfigurationError("need chi >= 0 and s >= 0")
    if chi == 0.0:
        return 1.0 if s == 0 else 0.0
    th = math.tanh(chi)
    return th ** (2 * s) / math.cosh(chi) ** 2


def g_from_chi(chi: float) -> float:
    """Single-pair probability g = P(1) = tanh^2(chi) / cosh^2(chi)."""
    return spdc_number_prob(chi, 1)


def chi_from_g(g: float) -> float:
    """Inverse of g_from_chi on the physical branch tanh^2 <= 1/2; needs g <= 1/4."""
    if not 0.0 <= g <= 0.25:
        raise InvalidConfigurationError(f"g must lie in [0, 1/4] for inversion, got {g}")
    u = (1.0 - math.sqrt(1.0 - 4.0 * g)) / 2.0  # tanh^2(chi)
    return math.atanh(math.sqrt(u))


def p_gen2(m: int, s: int, t: int, g: float) -> float:
    """Probability that s sources make single pairs and t make double pairs."""
    if s < 0 or t < 0 or s + t > m:
        raise InvalidConfigurationError(f"need s + t <= m, got s={s}, t={t}, m={m}")
    lg = (
        lgamma(m + 1)
        - lgamma(m - s - t + 1)
        - lgamma(s + 1)
        - lgamma(t + 1)
        + _log_pow(g, s)
        + _log_pow(g * g, t)
        + _log_pow(1.0 - g - g * g, m - s - t)
    )
    return exp(lg)


def p_sbs(m: int, n: int, params: SpdcParams) -> float:
    """Probability of a correct n-photon scattershot run with m sources.

    n triggers click, each heralded mode injects exactly one photon (doubles
    inject exactly one of two) and all n photons are detected.
    """
    if not 1 <= n <= m:
        raise InvalidConfigurationError(f"need 1 <= n <= m, got n={n}, m={m}")
    g, eta_t, p_in, eta_d = params.g, params.eta_t, params.p_in, params.eta_d
    eta_t2 = params.eta_t2
    total = 0.0
    for q in range(n, m + 1):
        for t in range(0, q + 1):
            s = q - t
            pg = p_gen2(m, s, t, g)
            if pg == 0.0:
                continue
            inner = 0.0
            for n1 in range(max(n - t, 0), min(s, n) + 1):
                lt = (
                    _log_pow(p_in * eta_t, n1)
                    + _log_pow(2.0 * p_in * (1.0 - p_in) * eta_t2, n - n1)
                    + _log_pow(1.0 - eta_t, s - n1)
                    + _log_comb(s, n1)
                    + _log_pow(1.0 - eta_t2, t - n + n1)
                    + _log_comb(t, n - n1)
                )
                inner += exp(lt)
            total += pg * inner
    return exp(_log_pow(eta_d, n)) * total


def p_fake_in(n: int, n1: int, p_in: float) -> float:
    """Probability that n1 heralded singles and n - n1 heralded pairs inject a
    fake state carrying at least n photons.

    Sums over x pairs injecting both photons (x >= 1 makes the input wrong),
    z singles and y = w - z pairs injecting exactly one.
    """
    if not 0 <= n1 < n:
        raise InvalidConfigurationError(f"fake injection needs 0 <= n1 < n, got n1={n1}, n={n}")
    total = 0.0
    for x in range(1, n - n1 + 1):
        for w in range(max(n - 2 * x, 0), n - x + 1):
            for z in range(0, min(n1, w) + 1):
                y = w - z
                if y > n - n1 - x:
                    continue
                lt = (
                    (w - z) * log(2.0)
                    + _log_pow(p_in, w + 2 * x)
                    + _log_pow(1.0 - p_in, 2 * n - n1 - 2 * x - w)
                    + _log_comb(n1, z)
                    + lgamma(n - n1 + 1)
                    - lgamma(x + 1)
                    - lgamma(y + 1)
                    - lgamma(n - n1 - x - y + 1)
                )
                total += exp(lt)
    return total


def p_sbs_fake(m: int, n: int, params: SpdcParams) -> float:
    """Probability of an undetectably wrong run: n triggers and n detections
    with an injected state that differs from the heralded singles.

    The closed form's output factor fixes the detection
    combinatorics at the maximal 2n - n1 injected photons, so it carries a
    few-percent bias against the exact process (see the Monte-Carlo oracle).
    """
    if not 1 <= n <= m:
        raise InvalidConfigurationError(f"need 1 <= n <= m, got n={n}, m={m}")
    g, eta_t, p_in, eta_d = params.g, params.eta_t, params.p_in, params.eta_d
    eta_t2 = params.eta_t2
    total = 0.0
    for q in range(n, m + 1):
        for t in range(1, q + 1):
            s = q - t
            pg = p_gen2(m, s, t, g)
            if pg == 0.0:
                continue
            inner = 0.0
            # n1 = n would mean no heralded pair, which cannot fake; skip it
            for n1 in range(max(n - t, 0), min(s, n - 1) + 1):
                pf = p_fake_in(n, n1, p_in)
                if pf == 0.0:
                    continue
                lt = (
                    _log_pow(eta_t, n1)
                    + _log_pow(eta_t2, n - n1)
                    + _log_pow(1.0 - eta_t, s - n1)
                    + _log_comb(s, n1)
                    + _log_pow(1.0 - eta_t2, t - n + n1)
                    + _log_comb(t, n - n1)
                    + _log_pow(eta_d, n)
                    + _log_pow(1.0 - eta_d, n - n1)
                    + _log_comb(2 * n - n1, n)
                )
                inner += pf * exp(lt)
            total += pg * inner
    return total


def p_sbs_lossy(m: int, n: int, n_lost: int, params: SpdcParams) -> float:
    """Probability of an n-trigger run where n_lost photons vanish.

    i photons fail injection (j of them from heralded singles), the rest of
    the deficit is lost before detection; every heralded mode injects at most
    one photon, so the input is a subset of the heralded singles.
    """
    if not 0 <= n_lost < n:
        raise InvalidConfigurationError(f"need 0 <= n_lost < n, got n_lost={n_lost}, n={n}")
    if n > m:
        raise InvalidConfigurationError(f"need n <= m, got n={n}, m={m}")
    g, eta_t, p_in, eta_d = params.g, params.eta_t, params.p_in, params.eta_d
    eta_t2 = params.eta_t2
    total = 0.0
    for i in range(0, n_lost + 1):
        lpref = (
            _log_pow(eta_d, n - n_lost)
            + _log_pow(1.0 - eta_d, n_lost - i)
            + _log_comb(n - i, n_lost - i)
        )
        if lpref == -inf:
            continue
        pref = exp(lpref)
        acc = 0.0
        for q in range(n, m + 1):
            for t in range(0, q + 1):
                s = q - t
                pg = p_gen2(m, s, t, g)
                if pg == 0.0:
                    continue
                inner = 0.0
                for j in range(0, i + 1):
                    for n1 in range(max(n - t, 0), min(s, n) + 1):
                        lt = (
                            (n - n1 - i + j) * log(2.0)
                            + _log_pow(p_in, n - i)
                            + _log_pow(1.0 - p_in, n + i - n1)
                            + _log_pow(eta_t, n1)
                            + _log_pow(eta_t2, n - n1)
                            + _log_pow(1.0 - eta_t, q + t + n1 - 2 * n)
                            + _log_comb(n1, j)
                            + _log_comb(n - n1, i - j)
                            + _log_comb(s, n1)
                            + _log_comb(t, n - n1)
                        )
                        inner += exp(lt)
                acc += pg * inner
        total += pref * acc
    return total


@dataclass
class McEstimate:
    probability: float
    stderr: float

    def sigmas_from(self, value: float) -> float:
        se = max(self.stderr, 1e-300)
        return abs(value - self.probability) / se


@dataclass
class SpdcMcResult:
    """Monte-Carlo frequencies of the scattershot event classes at fixed n."""

    trials: int
    success: McEstimate
    fake: McEstimate
    lossy: dict[int, McEstimate]


def monte_carlo_spdc(
    m: int,
    n: int,
    n_lost: int,
    params: SpdcParams,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SpdcMcResult:
    """Simulate the physical scattershot process shot by shot.

    Per shot: each source makes 0/1/2 pairs; triggered singles click with
    eta_t, doubles with eta_t2; shutters keep unheralded modes closed; every
    signal photon behind an open shutter injects with p_in; every injected
    photon is detected with eta_d. Shots with exactly n triggers are classed
    as success (each heralded mode injected exactly one, n detected), fake
    (n detected, injected state wrong) or lossy-k (injected state a subset of
    the heralded singles, k photons short at detection).

    Trials are split into fixed-size chunks with seeds derived per chunk, and
    chunk counts are reduced in index order, so results do not depend on the
    worker count.
    """
    if trials < 10_000:
        raise InvalidConfigurationError("Monte-Carlo needs at least 1e4 trials")
    if not 0 <= n_lost < n:
        raise InvalidConfigurationError(f"need 0 <= n_lost < n, got n_lost={n_lost}, n={n}")
    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    tracked = range(1, n)

    def run_chunk(args):
        size, ss = args
        rng = np.random.Generator(np.random.PCG64(ss))
        g, eta_t, p_in, eta_d = params.g, params.eta_t, params.p_in, params.eta_d
        u = rng.random((size, m))
        pairs = np.where(u < g * g, 2, np.where(u < g * g + g, 1, 0)).astype(np.int8)
        trig_p = np.where(pairs == 1, eta_t, np.where(pairs == 2, params.eta_t2, 0.0))
        trig = rng.random((size, m)) < trig_p
        inj = (rng.random((size, m)) < p_in).astype(np.int8)
        inj += ((pairs == 2) & (rng.random((size, m)) < p_in)).astype(np.int8)
        inj = np.where(trig, inj, 0)
        sel = trig.sum(axis=1) == n
        inj = inj[sel]
        trig = trig[sel]
        detected = rng.binomial(inj.sum(axis=1).astype(np.int64), eta_d)
        all_one = np.all((~trig) | (inj == 1), axis=1)
        subset = np.all(inj <= 1, axis=1)
        counts = {
            "success": int(np.count_nonzero(all_one & (detected == n))),
            "fake": int(np.count_nonzero(~all_one & (detected == n))),
        }
        for k in tracked:
            counts[f"lossy{k}"] = int(np.count_nonzero(subset & (detected == n - k)))
        return counts

    jobs = list(zip(sizes, seeds))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk_counts = list(pool.map(run_chunk, jobs))
    else:
        chunk_counts = [run_chunk(j) for j in jobs]

    totals: dict[str, int] = {}
    for c in chunk_counts:
        for key, v in c.items():
            totals[key] = totals.get(key, 0) + v

    def est(key: str) -> McEstimate:
        p = totals.get(key, 0) / trials
        return McEstimate(p, math.sqrt(p * (1.0 - p) / trials))

    return SpdcMcResult(
        trials=trials,
        success=est("success"),
        fake=est("fake"),
        lossy={k: est(f"lossy{k}") for k in tracked},
    )


def p_qd(n_array: int, i: int, params: QdParams, demux: str = "passive") -> float:
    """Quantum-dot run probability for i photons from an n_array-port demux."""
    if not 1 <= i <= n_array:
        raise InvalidConfigurationError(f"need 1 <= i <= n_array, got i={i}, n_array={n_array}")
    if demux == "passive":
        route = 1.0 / n_array
    elif demux == "active":
        route = params.eta_dm
    else:
        raise InvalidConfigurationError(f"demux must be 'passive' or 'active', got {demux!r}")
    return (params.eta * route * params.p_in * params.eta_d) ** i


def p_qd_lossy_one(n_array: int, i: int, params: QdParams, demux: str = "passive") -> float:
    """One photon of i lost either at injection or at detection, rest correct."""
    if not 1 <= i <= n_array:
        raise InvalidConfigurationError(f"need 1 <= i <= n_array, got i={i}, n_array={n_array}")
    route = 1.0 / n_array if demux == "passive" else params.eta_dm
    per_photon = params.eta * route * params.p_in * params.eta_d
    loss_one = params.eta * route * (
        (1.0 - params.p_in) + params.p_in * (1.0 - params.eta_d)
    )
    return i * per_photon ** (i - 1) * loss_one


def p_mw_in(n: int, n_lost_in: int, p_in: float) -> float:
    """Binomial chance of losing n_lost_in of n photons at creation."""
    if not 0 <= n_lost_in <= n:
        raise InvalidConfigurationError(f"need 0 <= n_lost_in <= n, got {n_lost_in}, {n}")
    return exp(
        _log_pow(p_in, n - n_lost_in)
        + _log_pow(1.0 - p_in, n_lost_in)
        + _log_comb(n, n_lost_in)
    )


def p_mw_lossy(n: int, n_lost: int, params: MwParams) -> float:
    """Microwave run losing n_lost photons overall, split over input/output."""
    if not 0 <= n_lost <= n:
        raise InvalidConfigurationError(f"need 0 <= n_lost <= n, got {n_lost}, {n}")
    eta_d = params.eta_d
    total = 0.0
    for l in range(0, n_lost + 1):
        total += exp(
            _log_pow(eta_d, n - n_lost)
            + _log_pow(1.0 - eta_d, n_lost - l)
            + _log_comb(n - l, n_lost - l)
        ) * p_mw_in(n, l, params.p_in)
    return total


def p_mw_lossy_dark(m: int, n: int, n_lost: int, params: MwParams) -> float:
    """Microwave run with n_lost apparent losses including dark counts.

    Closed form where j dark counts substitute for real detections, with
    vacuum-mode weight p_d^j (1-p_d)^(m-n+l) C(m-n+l+j, j). The dark-count
    combinatorics are approximate for n_lost >= 1 (the Bernoulli-process
    oracle quantifies the gap); the p_dark = 0 reduction is exact.
    """
    if not 0 <= n_lost <= n or n > m:
        raise InvalidConfigurationError(
            f"need 0 <= n_lost <= n <= m, got n_lost={n_lost}, n={n}, m={m}"
        )
    eta_d, p_d = params.eta_d, params.p_dark
    total = 0.0
    for l in range(0, n_lost + 1):
        p_in_term = p_mw_in(n, l, params.p_in)
        for j in range(0, n - n_lost + 1):
            total += (
                exp(
                    _log_pow(eta_d, n - n_lost - j)
                    + _log_pow(1.0 - eta_d, n_lost + j - l)
                    + _log_comb(n - l, n_lost - l)
                    + _log_comb(n - n_lost, j)
                    + _log_pow(p_d, j)
                    + _log_pow(1.0 - p_d, m - n + l)
                    + _log_comb(m - n + l + j, j)
                )
                * p_in_term
            )
    return total


def monte_carlo_mw(
    m: int, n: int, params: MwParams, trials: int, seed: int, max_lost: int | None = None
) -> dict[int, McEstimate]:
    """Bernoulli-process oracle for the microwave model.

    Per shot: each of n photons is created with p_in; each created photon is
    detected with eta_d; each of the m - created vacuum modes fires a dark
    count with p_dark. Events are classed by the apparent deficit
    n - (real clicks + dark clicks).
    """
    if trials < 10_000:
        raise InvalidConfigurationError("Monte-Carlo needs at least 1e4 trials")
    if max_lost is None:
        max_lost = n
    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    counts: dict[int, int] = {}
    for size, ss in zip(sizes, seeds):
        rng = np.random.Generator(np.random.PCG64(ss))
        created = rng.binomial(n, params.p_in, size=size)
        real = rng.binomial(created, params.eta_d)
        dark = rng.binomial(m - created, params.p_dark)
        lost = n - (real + dark)
        vals, freq = np.unique(lost, return_counts=True)
        for v, f in zip(vals.tolist(), freq.tolist()):
            counts[v] = counts.get(v, 0) + f
    out = {}
    for k in range(0, max_lost + 1):
        p = counts.get(k, 0) / trials
        out[k] = McEstimate(p, math.sqrt(p * (1.0 - p) / trials))
    return out
