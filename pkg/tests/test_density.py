import numpy as np
import pytest

from crowdmap import (
    BORDER_RENORMALIZE,
    BORDER_TRUNCATE,
    HeadList,
    InvalidArgumentError,
    crop_window,
    generate_density_map,
    make_window,
    random_head_list,
)

WIN = make_window()


def test_empty_head_list_gives_zero_map():
    heads = HeadList(points=np.zeros((0, 2), dtype=np.int64), height=24, width=32)
    dmap = generate_density_map(heads, WIN)
    assert dmap.shape == (24, 32)
    assert not dmap.any()


def test_single_interior_head_places_the_window():
    heads = HeadList(points=[(15, 15)], height=31, width=31)
    dmap = generate_density_map(heads, WIN)
    assert np.array_equal(dmap[8:23, 8:23], WIN.values)
    outside = dmap.copy()
    outside[8:23, 8:23] = 0.0
    assert not outside.any()
    assert abs(dmap.sum() - 1.0) <= 1e-9


def test_mass_conservation_under_renormalize():
    rng = np.random.default_rng(5)
    for _ in range(100):
        height = int(rng.integers(20, 80))
        width = int(rng.integers(20, 80))
        n = int(rng.integers(1, 12))
        heads = random_head_list(rng, n, height, width)  # edges allowed
        dmap = generate_density_map(heads, WIN, border=BORDER_RENORMALIZE)
        assert abs(dmap.sum() - n * WIN.values.sum()) <= 1e-6


def test_truncate_drops_mass_at_edges():
    heads = HeadList(points=[(0, 0)], height=40, width=40)
    dmap = generate_density_map(heads, WIN, border=BORDER_TRUNCATE)
    assert dmap.sum() < WIN.values.sum()


def test_policies_agree_for_interior_heads():
    heads = HeadList(points=[(20, 11), (9, 28)], height=40, width=40)
    a = generate_density_map(heads, WIN, border=BORDER_TRUNCATE)
    b = generate_density_map(heads, WIN, border=BORDER_RENORMALIZE)
    assert np.array_equal(a, b)


def test_generation_is_linear_in_the_head_list():
    rng = np.random.default_rng(6)
    pts = random_head_list(rng, 14, 64, 64).points
    union = HeadList(points=pts, height=64, width=64)
    first = HeadList(points=pts[:6], height=64, width=64)
    second = HeadList(points=pts[6:], height=64, width=64)
    combined = generate_density_map(union, WIN)
    split = generate_density_map(first, WIN) + generate_density_map(second, WIN)
    assert np.abs(combined - split).max() <= 1e-9


def test_duplicates_accumulate():
    heads = HeadList(points=[(10, 10), (10, 10)], height=21, width=21)
    dmap = generate_density_map(heads, WIN)
    assert np.allclose(dmap[3:18, 3:18], 2.0 * WIN.values)


def test_bad_border_policy_rejected():
    heads = HeadList(points=[(1, 1)], height=8, width=8)
    with pytest.raises(InvalidArgumentError):
        generate_density_map(heads, WIN, border="reflect")


def test_crop_interior_is_a_plain_subgrid():
    arr = np.arange(100, dtype=np.float64).reshape(10, 10)
    crop = crop_window(arr, (5, 4), 3)
    assert np.array_equal(crop, arr[3:6, 4:7])


def test_crop_at_corner_zero_pads():
    arr = np.arange(16, dtype=np.float64).reshape(4, 4)
    crop = crop_window(arr, (0, 0), 5)
    expected = np.zeros((5, 5))
    expected[2:5, 2:5] = arr[0:3, 0:3]
    assert np.array_equal(crop, expected)


def test_large_crop_at_origin_lands_bottom_right():
    arr = np.arange(100, dtype=np.float64).reshape(10, 10)
    crop = crop_window(arr, (0, 0), 15)
    assert np.array_equal(crop[7:15, 7:15], arr[0:8, 0:8])
    assert not crop[:7, :].any() and not crop[:, :7].any()


def test_crop_round_trips_a_stamped_window():
    heads = HeadList(points=[(20, 13)], height=40, width=40)
    dmap = generate_density_map(heads, WIN)
    assert np.array_equal(crop_window(dmap, (20, 13), WIN.k), WIN.values)


def test_crop_rejects_bad_center_and_even_k():
    arr = np.zeros((6, 6))
    with pytest.raises(InvalidArgumentError):
        crop_window(arr, (6, 0), 3)
    with pytest.raises(InvalidArgumentError):
        crop_window(arr, (-1, 2), 3)
    with pytest.raises(InvalidArgumentError):
        crop_window(arr, (2, 2), 4)


def test_head_list_validates_bounds():
    with pytest.raises(InvalidArgumentError):
        HeadList(points=[(5, 3)], height=4, width=4)
    with pytest.raises(InvalidArgumentError):
        HeadList(points=[(-1, 0)], height=4, width=4)
    with pytest.raises(InvalidArgumentError):
        HeadList(points=[(0, 0)], height=0, width=4)


def test_from_pairs_rounds_half_up():
    heads = HeadList.from_pairs([(1.5, 2.4), (0.5, 0.49)], height=10, width=10)
    assert heads.points.tolist() == [[2, 2], [1, 0]]
