import itertools

import numpy as np
import pytest

from scattershot.errors import (
    InsufficientDataError,
    InvalidDimensionError,
    OracleScaleExceededError,
)
from scattershot.permanent import (
    TimingModel,
    fit_timing_model,
    permanent_glynn,
    permanent_glynn_parallel,
    permanent_naive,
    permanents_batch,
)


def permanent_reference(a):
    """Plain itertools permanent, independent of the package's vectorized paths."""
    n = a.shape[0]
    return sum(
        np.prod([a[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n))
    )


def random_complex(rng, n):
    return rng.random((n, n)) + 1j * rng.random((n, n)) - (0.5 + 0.5j)


def test_naive_identity():
    assert permanent_naive(np.eye(3, dtype=complex)) == 1.0


def test_naive_all_ones():
    assert permanent_naive(np.ones((4, 4), dtype=complex)) == 24.0


def test_naive_zero_row():
    a = np.ones((3, 3), dtype=complex)
    a[1] = 0.0
    assert permanent_naive(a) == 0.0


def test_naive_matches_reference():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4, 5):
        a = random_complex(rng, n)
        assert np.isclose(permanent_naive(a), permanent_reference(a), rtol=1e-12)


def test_naive_rejects_large_and_nonsquare():
    with pytest.raises(OracleScaleExceededError):
        permanent_naive(np.ones((11, 11), dtype=complex))
    with pytest.raises(InvalidDimensionError):
        permanent_naive(np.ones((2, 3), dtype=complex))


def test_glynn_base_case():
    z = 0.3 - 1.7j
    assert permanent_glynn(np.array([[z]])) == z


def test_glynn_all_ones_5():
    assert np.isclose(permanent_glynn(np.ones((5, 5), dtype=complex)), 120.0, rtol=1e-9)


def test_glynn_vs_naive_random():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = rng.random((6, 6)) + 1j * rng.random((6, 6))
        g = permanent_glynn(a)
        nv = permanent_naive(a)
        assert abs(g - nv) <= 1e-9 * max(1.0, abs(nv))


def test_glynn_rejects_nonsquare():
    with pytest.raises(InvalidDimensionError):
        permanent_glynn(np.ones((3, 4), dtype=complex))


def test_parallel_degenerate_split():
    rng = np.random.default_rng(11)
    a = random_complex(rng, 6)
    assert permanent_glynn_parallel(a, 1) == permanent_glynn(a)


def test_parallel_bit_identical_across_partitions():
    rng = np.random.default_rng(13)
    for n in (8, 14, 16):  # one, two and eight internal segments
        a = random_complex(rng, n)
        base = permanent_glynn(a)
        for partitions in (2, 4, 8):
            assert permanent_glynn_parallel(a, partitions) == base


def test_parallel_all_ones_8():
    value = permanent_glynn_parallel(np.ones((8, 8), dtype=complex), 4)
    assert np.isclose(value, 40320.0, rtol=1e-9)


def test_parallel_rejects_bad_partitions():
    with pytest.raises(InvalidDimensionError):
        permanent_glynn_parallel(np.ones((2, 2), dtype=complex), 0)


def test_multilinearity_in_rows():
    rng = np.random.default_rng(17)
    for _ in range(20):
        a = random_complex(rng, 5)
        c = rng.random() + 1j * rng.random()
        k = rng.integers(0, 5)
        scaled = a.copy()
        scaled[k] *= c
        assert np.isclose(permanent_glynn(scaled), c * permanent_glynn(a), rtol=1e-12)


def test_row_column_permutation_invariance():
    rng = np.random.default_rng(19)
    for _ in range(20):
        a = random_complex(rng, 5)
        p = rng.permutation(5)
        q = rng.permutation(5)
        assert np.isclose(permanent_glynn(a[p][:, q]), permanent_glynn(a), rtol=1e-12)


def test_transpose_invariance():
    rng = np.random.default_rng(23)
    for _ in range(20):
        a = random_complex(rng, 6)
        assert np.isclose(permanent_glynn(a.T), permanent_glynn(a), rtol=1e-12)


def test_batch_matches_naive():
    rng = np.random.default_rng(29)
    mats = rng.random((12, 5, 5)) + 1j * rng.random((12, 5, 5))
    batch = permanents_batch(mats)
    for i in range(12):
        assert np.isclose(batch[i], permanent_naive(mats[i]), rtol=1e-10)


def test_batch_real_input_stays_real():
    rng = np.random.default_rng(31)
    mats = rng.random((5, 4, 4))
    batch = permanents_batch(mats)
    assert batch.dtype == np.float64
    for i in range(5):
        assert np.isclose(batch[i], permanent_naive(mats[i].astype(complex)).real, rtol=1e-10)


def test_fit_recovers_reference_constants():
    a, b = 4.47e-8, 1.05
    pts = [(n, a * n * 2 ** (b * n)) for n in range(10, 21)]
    model = fit_timing_model(pts)
    assert np.isclose(model.a, a, rtol=1e-6)
    assert np.isclose(model.b, b, rtol=1e-6)


def test_fit_exact_power_model():
    pts = [(n, n * 2.0**n) for n in (5, 8, 11, 14)]
    model = fit_timing_model(pts)
    assert np.isclose(model.a, 1.0, rtol=1e-9)
    assert np.isclose(model.b, 1.0, rtol=1e-9)


def test_fit_needs_three_distinct_points():
    with pytest.raises(InsufficientDataError):
        fit_timing_model([(5, 1.0), (5, 1.1), (6, 2.0)])


def test_timing_model_validates():
    with pytest.raises(InsufficientDataError):
        TimingModel(a=-1.0, b=1.0)
    assert TimingModel(a=2.0, b=1.0).predict(3) == 2.0 * 3 * 8
