import math

import numpy as np
import pytest

from crowdmap import InvalidArgumentError, make_window


def test_default_window_center_is_one():
    win = make_window(15, 4.0, normalized=False)
    assert win.values.shape == (15, 15)
    assert win.values[7, 7] == 1.0
    assert win.k == 15 and win.sigma == 4.0


def test_single_cell_window_is_one_either_way():
    for normalized in (True, False):
        win = make_window(1, 4.0, normalized=normalized)
        assert win.values.shape == (1, 1)
        assert win.values[0, 0] == 1.0


def test_k3_values_match_direct_evaluation():
    win = make_window(3, 4.0, normalized=False)
    corner = math.exp(-2.0 / 32.0)
    edge = math.exp(-1.0 / 32.0)
    assert abs(win.values[0, 0] - corner) < 1e-12
    assert abs(win.values[0, 1] - edge) < 1e-12
    assert abs(corner - 0.939413) < 1e-6
    assert abs(edge - 0.969233) < 1e-6


def test_normalized_window_sums_to_one():
    for k, sigma in [(15, 4.0), (1, 1.0), (31, 2.5), (101, 16.0)]:
        win = make_window(k, sigma, normalized=True)
        assert abs(win.values.sum() - 1.0) <= 1e-9


def test_symmetry_and_center_max_random_parameters():
    rng = np.random.default_rng(11)
    for _ in range(25):
        k = int(rng.integers(0, 51)) * 2 + 1  # odd, <= 101
        sigma = float(rng.uniform(0.5, 16.0))
        normalized = bool(rng.integers(0, 2))
        win = make_window(k, sigma, normalized=normalized)
        v = win.values
        assert np.array_equal(v, v.T)
        assert np.array_equal(v, v[::-1, :])
        assert np.array_equal(v, v[:, ::-1])
        c = (k - 1) // 2
        center = v[c, c]
        others = v.copy()
        others[c, c] = -np.inf
        assert center > others.max() or k == 1
        if normalized:
            assert abs(v.sum() - 1.0) <= 1e-9
        else:
            assert center == 1.0


def test_monotone_decay_with_distance():
    win = make_window(15, 4.0, normalized=False)
    offsets = np.arange(15, dtype=float) - 7.0
    d2 = offsets[:, None] ** 2 + offsets[None, :] ** 2
    order = np.argsort(d2.ravel(), kind="stable")
    decayed = win.values.ravel()[order]
    assert np.all(np.diff(decayed) <= 0.0)


@pytest.mark.parametrize("k", [0, -3, 2, 14])
def test_bad_k_rejected(k):
    with pytest.raises(InvalidArgumentError):
        make_window(k, 4.0)


@pytest.mark.parametrize("sigma", [0.0, -1.5])
def test_bad_sigma_rejected(sigma):
    with pytest.raises(InvalidArgumentError):
        make_window(15, sigma)
