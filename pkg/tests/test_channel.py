"""Link classification, fading generation, estimation error, tensor IO."""

import math

import numpy as np
import pytest

from mimosim.channel import (
    KIND_LOS,
    KIND_NLOS,
    KIND_OUTDOOR,
    ChannelConfig,
    ChannelTensor,
    LinkProfile,
    add_estimation_error,
    apply_estimation_error,
    classify_link,
    classify_links,
    generate_channel,
    dump_tensor,
    load_tensor,
    pathloss_db,
    sample_error_unit,
)
from mimosim.geometry import (
    BsSite,
    Deployment,
    UeDrop,
    build_array,
    build_floor_plan,
    place_deployment,
    sample_ue_drop,
)
from mimosim.units import db_to_linear

CFG = ChannelConfig()


@pytest.fixture(scope="module")
def plan():
    return build_floor_plan()


def make_profiles(plan, dep, drop, seed, cfg=CFG):
    rng = np.random.default_rng(seed)
    return [classify_links(plan, s, drop.positions, cfg, rng) for s in dep.sites]


def test_pathloss_wall_terms():
    base = pathloss_db(CFG, KIND_NLOS, 10.0, 1)
    assert pathloss_db(CFG, KIND_NLOS, 10.0, 3) - base == pytest.approx(24.0)
    assert pathloss_db(CFG, KIND_NLOS, 10.0, 0) == pytest.approx(base)
    out = pathloss_db(CFG, KIND_OUTDOOR, 10.0, 2)
    expected = 14.0 + 36.8 + 43.8 + 20.0 * math.log10(2.1e9 / 5e9) + 24.0
    assert out == pytest.approx(expected, abs=1e-12)


def test_pathloss_distance_doubling_and_monotonicity():
    d = 7.0
    gain = pathloss_db(CFG, KIND_LOS, 2 * d, 0) - pathloss_db(CFG, KIND_LOS, d, 0)
    assert gain == pytest.approx(18.7 * math.log10(2.0), abs=1e-12)
    for kind in (KIND_LOS, KIND_NLOS, KIND_OUTDOOR):
        pl = [pathloss_db(CFG, kind, dist, 1) for dist in (2.0, 5.0, 20.0, 80.0)]
        assert all(a < b for a, b in zip(pl, pl[1:]))


def test_classify_same_room_los(plan):
    dep = place_deployment(plan, "single-central", 4)
    prof = classify_link(plan, dep.sites[0], (45.0, 20.0, 1.5), CFG, np.random.default_rng(5))
    assert prof.los and prof.num_walls == 0 and prof.kind == KIND_LOS
    assert prof.rice_k_linear == pytest.approx(db_to_linear(7.0))
    d = math.dist((49.5, 24.5, 3.0), (45.0, 20.0, 1.5))
    assert prof.distance_m == pytest.approx(d)
    assert prof.pathloss_db == pytest.approx(pathloss_db(CFG, KIND_LOS, d, 0))


def test_classify_nlos_has_zero_rice(plan):
    dep = place_deployment(plan, "single-central", 4)
    prof = classify_link(plan, dep.sites[0], (5.0, 5.0, 1.5), CFG, np.random.default_rng(5))
    assert not prof.los and prof.kind == KIND_NLOS
    assert prof.num_walls >= 1
    assert prof.rice_k_linear == 0.0


def test_classify_outdoor_path_via_wall_point(plan):
    dep = place_deployment(plan, "outdoor", 4)
    south = min(dep.sites, key=lambda s: s.position[1])
    rng = np.random.default_rng(5)
    prof = classify_link(plan, south, (52.0, 5.0, 1.5), CFG, rng)
    d_out = math.dist((50.0, -15.0, 10.0), (52.0, 0.0, 1.5))
    assert prof.kind == KIND_OUTDOOR and not prof.los
    assert prof.rice_k_linear == 0.0
    assert prof.num_walls == 0
    assert prof.distance_m == pytest.approx(d_out + 5.0)
    assert prof.pathloss_db == pytest.approx(
        pathloss_db(CFG, KIND_OUTDOOR, d_out + 5.0, 0)
    )
    deep = classify_link(plan, south, (52.0, 20.0, 1.5), CFG, rng)
    assert deep.num_walls == 2
    assert deep.pathloss_db == pytest.approx(
        pathloss_db(CFG, KIND_OUTDOOR, deep.distance_m, 2)
    )


def test_classify_deterministic(plan):
    dep = place_deployment(plan, "two-indoor", 4)
    drop = sample_ue_drop(plan, 6, seed=11)
    p1 = make_profiles(plan, dep, drop, seed=3)
    p2 = make_profiles(plan, dep, drop, seed=3)
    assert p1 == p2
    p3 = make_profiles(plan, dep, drop, seed=4)
    assert any(
        a.shadowing_db != b.shadowing_db for row1, row2 in zip(p1, p3) for a, b in zip(row1, row2)
    )


def test_generate_channel_deterministic(plan):
    dep = place_deployment(plan, "two-indoor", 4)
    drop = sample_ue_drop(plan, 3, seed=21)
    profiles = make_profiles(plan, dep, drop, seed=9)
    offsets = np.linspace(-9e6, 9e6, 5)
    h1 = generate_channel(profiles, dep, drop, CFG, offsets, 0, seed=1234)
    h2 = generate_channel(profiles, dep, drop, CFG, offsets, 0, seed=1234)
    h3 = generate_channel(profiles, dep, drop, CFG, offsets, 0, seed=1235)
    np.testing.assert_array_equal(h1.coeffs, h2.coeffs)
    assert not np.array_equal(h1.coeffs, h3.coeffs)
    assert h1.coeffs.shape == (3, 4, 5)
    assert np.all(np.isfinite(h1.coeffs.view(float)))
    np.testing.assert_allclose(h1.subcarrier_freqs, 2.1e9 + offsets)


def test_single_tap_channel_is_flat(plan):
    cfg = ChannelConfig(num_taps=1)
    dep = place_deployment(plan, "two-indoor", 4)
    drop = sample_ue_drop(plan, 3, seed=21)
    profiles = make_profiles(plan, dep, drop, seed=9, cfg=cfg)
    h = generate_channel(profiles, dep, drop, cfg, np.linspace(-9e6, 9e6, 7), 0, seed=5)
    mags = np.abs(h.coeffs)
    np.testing.assert_allclose(
        mags, np.broadcast_to(mags[:, :, :1], mags.shape), rtol=1e-12
    )


def test_pure_los_broadside_equal_phases():
    pos = np.array([0.0, 0.0, 1.5])
    ants = build_array(pos, "ula-outdoor", 2)
    site = BsSite(
        position=pos,
        array_kind="ula-outdoor",
        num_antennas=2,
        power_budget=1.0,
        antenna_positions=ants,
    )
    dep = Deployment(name="custom", sites=(site,), total_antennas=2)
    drop = UeDrop(positions=np.array([[0.0, 5.0, 1.5]]), drop_index=0, seed=0)
    profile = LinkProfile(
        pathloss_db=0.0,
        los=True,
        num_walls=0,
        shadowing_db=0.0,
        rice_k_linear=1e14,
        distance_m=5.0,
        kind=KIND_LOS,
    )
    h = generate_channel([[profile]], dep, drop, CFG, [-1e6, 0.0, 1e6], 0, seed=2)
    coeff = h.coeffs[0]
    np.testing.assert_allclose(np.abs(coeff), 1.0, atol=1e-5)
    phase_diff = np.angle(coeff[0] * coeff[1].conj())
    np.testing.assert_allclose(phase_diff, 0.0, atol=1e-6)
    # The deterministic tap sits at zero delay, so it is flat in frequency.
    np.testing.assert_allclose(coeff[:, 0], coeff[:, 1], atol=1e-5)


def test_mean_channel_power_matches_profile(plan):
    dep = place_deployment(plan, "two-indoor", 4)
    drop = sample_ue_drop(plan, 2, seed=33)
    profiles = make_profiles(plan, dep, drop, seed=13)
    offsets = np.linspace(-9e6, 9e6, 4)
    reps = 10_000
    acc = np.zeros((2, dep.num_sites))
    for r in range(reps):
        h = generate_channel(profiles, dep, drop, CFG, offsets, r, seed=50_000 + r)
        for i, rows in enumerate(dep.site_slices):
            acc[:, i] += (np.abs(h.coeffs[:, rows, :]) ** 2).mean(axis=(1, 2))
    acc /= reps
    for i in range(dep.num_sites):
        for k in range(2):
            target = profiles[i][k].gain_linear
            assert abs(acc[k, i] - target) <= 0.02 * target


def test_estimation_error_zero_is_identity(plan):
    dep = place_deployment(plan, "two-indoor", 4)
    drop = sample_ue_drop(plan, 3, seed=8)
    profiles = make_profiles(plan, dep, drop, seed=2)
    h = generate_channel(profiles, dep, drop, CFG, [0.0], 0, seed=77)
    noisy = add_estimation_error(h, 0.0, seed=5)
    assert noisy.coeffs is h.coeffs
    assert noisy.nmse == 0.0
    with pytest.raises(ValueError):
        add_estimation_error(h, -1e-3, seed=5)


def test_estimation_error_statistics(plan):
    dep = place_deployment(plan, "single-central", 9)
    drop = sample_ue_drop(plan, 1, seed=4)
    profiles = make_profiles(plan, dep, drop, seed=6)
    offsets = np.linspace(-9e6, 9e6, 50)
    h = generate_channel(profiles, dep, drop, CFG, offsets, 0, seed=3)
    mean_abs = np.abs(h.coeffs).mean()
    sigma = 0.1
    errors = []
    for s in range(220):
        noisy = add_estimation_error(h, sigma, seed=900 + s)
        errors.append((noisy.coeffs - h.coeffs).ravel())
    e = np.concatenate(errors)
    assert e.size >= 99_000
    ratio = (np.abs(e) ** 2).mean() / mean_abs**2
    assert abs(ratio - sigma) <= 0.02 * sigma
    # Independence: error entries decorrelated from the channel and from
    # their neighbours.
    hh = np.tile(h.coeffs.ravel(), 220)
    corr_eh = np.corrcoef(e.real, hh.real)[0, 1]
    corr_lag = np.corrcoef(e.real[:-1], e.real[1:])[0, 1]
    assert abs(corr_eh) <= 0.02
    assert abs(corr_lag) <= 0.02
    assert abs(e.mean()) <= 0.01 * mean_abs


def test_common_random_error_scaling(plan):
    dep = place_deployment(plan, "two-indoor", 4)
    drop = sample_ue_drop(plan, 2, seed=12)
    profiles = make_profiles(plan, dep, drop, seed=1)
    h = generate_channel(profiles, dep, drop, CFG, [0.0, 1e6], 0, seed=44)
    unit = sample_error_unit(h.coeffs.shape, seed=123)
    lo = apply_estimation_error(h, 1e-4, unit)
    hi = apply_estimation_error(h, 1e-2, unit)
    np.testing.assert_allclose(
        (hi.coeffs - h.coeffs), 10.0 * (lo.coeffs - h.coeffs), rtol=1e-12
    )


def test_dump_load_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    coeffs = rng.standard_normal((3, 4, 5)) + 1j * rng.standard_normal((3, 4, 5))
    path = tmp_path / "tensor.bin"
    dump_tensor(path, coeffs)
    with open(path, "rb") as fh:
        assert fh.readline() == b"3 4 5\n"
    back = load_tensor(path)
    np.testing.assert_array_equal(back, coeffs)
    with pytest.raises(ValueError):
        bad = tmp_path / "bad.bin"
        with open(bad, "wb") as fh:
            fh.write(b"3 4 5\n")
            fh.write(b"\x00" * 16)
        load_tensor(bad)


def test_hermitian_rows(plan):
    dep = place_deployment(plan, "two-indoor", 4)
    drop = sample_ue_drop(plan, 3, seed=8)
    profiles = make_profiles(plan, dep, drop, seed=2)
    h = generate_channel(profiles, dep, drop, CFG, [0.0, 1e6], 0, seed=7)
    np.testing.assert_array_equal(h.hermitian_rows(1), h.coeffs[:, :, 1].conj())
    noisy = add_estimation_error(h, 1e-3, seed=9)
    assert noisy.site_slices == h.site_slices
    np.testing.assert_array_equal(noisy.hermitian_rows(0), noisy.coeffs[:, :, 0].conj())
