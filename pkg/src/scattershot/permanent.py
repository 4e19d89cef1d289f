"""Exact matrix permanents.

The workhorse is Glynn's formula over 2^(n-1) sign vectors, walked in Gray
code so each step updates the n column sums in O(n). The delta-space is split
into fixed power-of-two segments (a function of n only); each segment seeds
its own column sums directly and accumulates sequentially, and segment
partials are reduced in index order. Serial and parallel evaluation therefore
share one summation tree and return bit-identical results for any worker or
partition count.

A permutation-sum evaluator is kept as the independent small-n oracle, and a
vectorized batch evaluator serves distribution construction where many small
permanents of submatrices of one unitary are needed.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidDimensionError, OracleScaleExceededError

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, guard anyway
    numba = None
    HAVE_NUMBA = False

NAIVE_MAX_N = 10
GLYNN_MAX_N = 30
# at most 2^SEGMENT_BITS segments, each at least 2^SEGMENT_LEN_BITS deltas long,
# so call overhead stays negligible against per-segment work
SEGMENT_BITS = 6
SEGMENT_LEN_BITS = 12


def _require_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidDimensionError(f"permanent needs a square matrix, got shape {a.shape}")
    return np.ascontiguousarray(a, dtype=np.complex128)


_PERM_CACHE: dict[int, np.ndarray] = {}


def _permutation_table(n: int) -> np.ndarray:
    if n not in _PERM_CACHE:
        table = np.fromiter(
            (i for p in itertools.permutations(range(n)) for i in p),
            dtype=np.int8,
            count=n * math.factorial(n),
        ).reshape(-1, n)
        _PERM_CACHE[n] = table
    return _PERM_CACHE[n]


def permanent_naive(a: np.ndarray) -> complex:
    """Permutation-sum permanent, the n <= 10 oracle.

    Enumerates all n! permutations; column gathers are vectorized over blocks
    of permutations (cached up to n = 9) so the large oracle sizes stay cheap.
    """
    a = _require_square(a)
    n = a.shape[0]
    if n > NAIVE_MAX_N:
        raise OracleScaleExceededError(f"naive permanent capped at n={NAIVE_MAX_N}, got {n}")
    total = 0.0 + 0.0j
    rows = np.arange(n)
    if n <= 9:
        for lo in range(0, math.factorial(n), 40320):
            chunk = _permutation_table(n)[lo : lo + 40320]
            total += complex(np.sum(np.prod(a[rows, chunk], axis=1)))
        return total
    perms = itertools.permutations(range(n))
    while True:
        chunk = np.array(list(itertools.islice(perms, 40320)), dtype=np.int64)
        if chunk.size == 0:
            break
        total += complex(np.sum(np.prod(a[rows, chunk], axis=1)))
    return total


def _segment_bounds(n: int) -> np.ndarray:
    """Fixed split of the 2^(n-1) delta indices into power-of-two segments.

    Depends on n alone, so serial and parallel evaluation share one summation
    tree. Below 2^(SEGMENT_LEN_BITS+1) deltas the whole range is one segment.
    """
    bits = min(SEGMENT_BITS, max(0, n - 1 - SEGMENT_LEN_BITS))
    n_seg = 1 << bits
    seg_len = 1 << (n - 1 - bits)
    return np.arange(n_seg + 1, dtype=np.int64) * seg_len


def _glynn_segment_py(a: np.ndarray, start: int, stop: int) -> complex:
    """Sum of Glynn terms for delta indices in [start, stop), Gray-code order."""
    n = a.shape[0]
    gray = start ^ (start >> 1)
    col = a[0].copy()
    for i in range(1, n):
        if (gray >> (i - 1)) & 1:
            col -= a[i]
        else:
            col += a[i]
    sign = -1.0 if bin(gray).count("1") & 1 else 1.0
    total = 0.0 + 0.0j
    k = start
    while True:
        prod = 1.0 + 0.0j
        for j in range(n):
            prod *= col[j]
        total += sign * prod
        k += 1
        if k >= stop:
            return total
        bit = (k & -k).bit_length() - 1
        row = bit + 1
        if (k ^ (k >> 1)) >> bit & 1:
            col -= 2.0 * a[row]
        else:
            col += 2.0 * a[row]
        sign = -sign


if HAVE_NUMBA:

    @numba.njit("complex128(complex128[:, ::1], int64, int64)", cache=True, nogil=True)
    def _glynn_segment_nb(a, start, stop):  # pragma: no cover - exercised via wrapper
        n = a.shape[0]
        gray = start ^ (start >> 1)
        col = np.empty(n, dtype=np.complex128)
        for j in range(n):
            s = a[0, j]
            for i in range(1, n):
                if (gray >> (i - 1)) & 1:
                    s -= a[i, j]
                else:
                    s += a[i, j]
            col[j] = s
        pc = 0
        g = gray
        while g:
            g &= g - 1
            pc += 1
        sign = -1.0 if pc & 1 else 1.0
        total = 0.0 + 0.0j
        k = start
        while True:
            prod = 1.0 + 0.0j
            for j in range(n):
                prod *= col[j]
            total += sign * prod
            k += 1
            if k >= stop:
                return total
            bit = 0
            kk = k
            while not (kk & 1):
                kk >>= 1
                bit += 1
            row = bit + 1
            if (k ^ (k >> 1)) >> bit & 1:
                for j in range(n):
                    col[j] -= 2.0 * a[row, j]
            else:
                for j in range(n):
                    col[j] += 2.0 * a[row, j]
            sign = -sign
        return total

    _glynn_segment = _glynn_segment_nb
else:  # pragma: no cover
    _glynn_segment = _glynn_segment_py


def permanent_glynn(a: np.ndarray) -> complex:
    """Permanent by Glynn's 2^(n-1)-term formula with Gray-code updates."""
    a = _require_square(a)
    n = a.shape[0]
    if n > GLYNN_MAX_N:
        raise InvalidDimensionError(f"glynn permanent capped at n={GLYNN_MAX_N}, got {n}")
    if n == 1:
        return complex(a[0, 0])
    bounds = _segment_bounds(n)
    total = 0.0 + 0.0j
    for i in range(len(bounds) - 1):
        total += _glynn_segment(a, int(bounds[i]), int(bounds[i + 1]))
    return total * 2.0 ** (1 - n)


def permanent_glynn_parallel(a: np.ndarray, partitions: int) -> complex:
    """Glynn permanent with segments evaluated by a worker pool.

    The fixed segmentation makes the result bit-identical to permanent_glynn
    for every partition count; `partitions` only sets the pool width.
    """
    if partitions < 1:
        raise InvalidDimensionError(f"partitions must be >= 1, got {partitions}")
    a = _require_square(a)
    n = a.shape[0]
    if n > GLYNN_MAX_N:
        raise InvalidDimensionError(f"glynn permanent capped at n={GLYNN_MAX_N}, got {n}")
    if n == 1:
        return complex(a[0, 0])
    bounds = _segment_bounds(n)
    n_seg = len(bounds) - 1
    if partitions == 1 or n_seg == 1:
        return permanent_glynn(a)
    partials = [0.0 + 0.0j] * n_seg
    with ThreadPoolExecutor(max_workers=min(partitions, n_seg)) as pool:
        futures = {
            pool.submit(_glynn_segment, a, int(bounds[i]), int(bounds[i + 1])): i
            for i in range(n_seg)
        }
        for fut, i in futures.items():
            partials[i] = fut.result()
    total = 0.0 + 0.0j
    for p in partials:  # fixed-order reduction
        total += p
    return total * 2.0 ** (1 - n)


def _delta_matrix(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All 2^(n-1) Glynn sign vectors (first entry +1) and their products."""
    d = 1 << (n - 1)
    ks = np.arange(d, dtype=np.int64)[:, None]
    bits = (ks >> np.arange(n - 1, dtype=np.int64)[None, :]) & 1
    deltas = np.concatenate([np.ones((d, 1)), 1.0 - 2.0 * bits], axis=1)
    signs = 1.0 - 2.0 * (np.sum(bits, axis=1) & 1)
    return deltas, signs


def permanents_batch(mats: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Permanents of a (K, n, n) stack, vectorized over K.

    Direct Glynn evaluation (no Gray walk): per chunk an einsum contracts the
    sign vectors with all matrices at once. Intended for the many-small-
    permanents pattern of distribution construction, n up to ~14.
    """
    mats = np.asarray(mats)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise InvalidDimensionError(f"expected (K, n, n) stack, got shape {mats.shape}")
    k, n = mats.shape[0], mats.shape[1]
    if n == 1:
        return mats[:, 0, 0].astype(np.complex128 if np.iscomplexobj(mats) else np.float64)
    deltas, signs = _delta_matrix(n)
    out = np.empty(k, dtype=np.complex128 if np.iscomplexobj(mats) else np.float64)
    if not np.iscomplexobj(mats):
        deltas = deltas.astype(np.float64)
    for lo in range(0, k, chunk):
        hi = min(lo + chunk, k)
        colsums = np.einsum("di,kij->kdj", deltas, mats[lo:hi])
        out[lo:hi] = np.prod(colsums, axis=2) @ signs
    return out * 2.0 ** (1 - n)


@dataclass
class TimingModel:
    """Fit of wall time t(n) = A * n * 2^(B n)."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise InsufficientDataError(f"timing model needs A, B > 0, got {self.a}, {self.b}")

    def predict(self, n: int) -> float:
        return self.a * n * 2.0 ** (self.b * n)


def fit_timing_model(measurements) -> TimingModel:
    """Least squares of log(t/n) = log A + B n log 2 over (n, seconds) pairs."""
    pts = [(int(n), float(t)) for n, t in measurements]
    if len({n for n, _ in pts}) < 3:
        raise InsufficientDataError("timing fit needs at least 3 distinct n")
    ns = np.array([n for n, _ in pts], dtype=np.float64)
    ys = np.log(np.array([t for _, t in pts])) - np.log(ns)
    slope, intercept = np.polyfit(ns, ys, 1)
    return TimingModel(a=float(np.exp(intercept)), b=float(slope / np.log(2.0)))


def measure_glynn_times(ns, seed: int = 0, repeats: int = 3):
    """Best-of-`repeats` wall times of permanent_glynn on random matrices.

    Returns a list of (n, seconds). The kernel is warmed up first so JIT
    compilation does not leak into the measurements.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    warm = rng.random((4, 4)) + 1j * rng.random((4, 4))
    permanent_glynn(warm)
    out = []
    for n in ns:
        a = rng.random((n, n)) + 1j * rng.random((n, n))
        permanent_glynn(a)  # untimed pre-pass per size
        best = math.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            permanent_glynn(a)
            best = min(best, time.perf_counter() - t0)
        out.append((int(n), best))
    return out
