"""Channel generator: determinism, normalization, binning, pathloss, DFT."""

import math

import numpy as np
import pytest

from uwbrelay.svchannel import (
    ChannelTaps,
    ContinuousImpulse,
    DegenerateChannelError,
    FrequencyResponse,
    PathlossParameters,
    SVParameters,
    apply_pathloss,
    dft_response,
    discretize_taps,
    sample_impulse_response,
    write_response_csv,
    write_taps_csv,
)


def test_impulse_deterministic():
    params = SVParameters()
    a = sample_impulse_response(params, np.random.default_rng(42))
    b = sample_impulse_response(params, np.random.default_rng(42))
    assert np.array_equal(a.delays, b.delays)
    assert np.array_equal(a.gains, b.gains)


def test_impulse_sorted_unit_energy_in_window():
    params = SVParameters()
    for seed in range(20):
        impulse = sample_impulse_response(params, np.random.default_rng(seed))
        assert impulse.delays[0] == 0.0
        assert np.all(np.diff(impulse.delays) >= 0)
        assert float(impulse.delays[-1]) <= params.max_delay
        assert impulse.energy == pytest.approx(1.0, abs=1e-12)


def test_tiny_window_forces_single_unit_path():
    # with a sub-nanosecond window no extra cluster or ray can land, so
    # every draw is one path at delay 0 normalized to unit magnitude
    params = SVParameters(max_delay=1e-6)
    for seed in range(50):
        impulse = sample_impulse_response(params, np.random.default_rng(seed))
        assert impulse.delays.size == 1
        assert impulse.delays[0] == 0.0
        assert abs(impulse.gains[0]) == pytest.approx(1.0, abs=1e-12)


def test_binning_sums_collisions_and_trims():
    impulse = ContinuousImpulse([0.0, 0.4, 1.2, 2.5, 2.7],
                                [1.0, 1.0j, 2.0, 1.0, -1.0])
    taps = discretize_taps(impulse, sample_period=1.0, max_taps=10)
    # bins 0 and 0 collide, bin 2 cancels exactly, so the span ends at bin 1
    assert taps.sample_period == 1.0
    assert np.array_equal(taps.taps, np.array([1.0 + 1.0j, 2.0 + 0.0j]))


def test_binning_drops_paths_beyond_max_taps():
    impulse = ContinuousImpulse([0.2, 5.5], [1.0j, 1.0])
    taps = discretize_taps(impulse, sample_period=1.0, max_taps=3)
    assert np.array_equal(taps.taps, np.array([1.0j]))


def test_binning_all_dropped_yields_one_zero_tap():
    impulse = ContinuousImpulse([5.5], [1.0])
    taps = discretize_taps(impulse, sample_period=1.0, max_taps=3)
    assert np.array_equal(taps.taps, np.array([0.0j]))


def test_discretize_validation():
    impulse = ContinuousImpulse([0.0], [1.0])
    with pytest.raises(ValueError):
        discretize_taps(impulse, sample_period=0.0, max_taps=4)
    with pytest.raises(ValueError):
        discretize_taps(impulse, sample_period=1.0, max_taps=0)


def test_continuous_impulse_validation():
    with pytest.raises(DegenerateChannelError):
        ContinuousImpulse([], [])
    with pytest.raises(ValueError):
        ContinuousImpulse([0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        ContinuousImpulse([-0.5], [1.0])
    with pytest.raises(ValueError):
        ContinuousImpulse([0.0], [np.nan])


def test_sv_parameters_validation():
    with pytest.raises(ValueError):
        SVParameters(max_delay=0.0)
    with pytest.raises(ValueError):
        SVParameters(mean_cluster_count=0.5)
    with pytest.raises(ValueError):
        SVParameters(ray_arrival_rate=-1.0)


def test_pathloss_exact_at_reference_distance():
    params = PathlossParameters(shadowing_sigma_db=0.0)
    taps = ChannelTaps([1.0 + 0.0j], sample_period=2.0)
    out = apply_pathloss(taps, params.ref_distance, params, np.random.default_rng(0))
    assert out.taps[0] == 10.0 ** (-params.ref_loss_db / 20.0)
    assert out.sample_period == 2.0


def test_pathloss_monotone_in_distance():
    params = PathlossParameters(shadowing_sigma_db=0.0)
    taps = ChannelTaps([1.0 + 0.0j], sample_period=2.0)
    amps = [abs(apply_pathloss(taps, d, params, np.random.default_rng(0)).taps[0])
            for d in (1.0, 2.0, 4.0)]
    assert amps[0] > amps[1] > amps[2]


def test_pathloss_consumes_exactly_one_normal_draw():
    # the shadowing draw must happen even at sigma = 0 so that downstream
    # streams stay aligned when shadowing is toggled
    params = PathlossParameters(shadowing_sigma_db=0.0)
    taps = ChannelTaps([1.0 + 0.0j], sample_period=2.0)
    used = np.random.default_rng(5)
    mirror = np.random.default_rng(5)
    apply_pathloss(taps, 2.0, params, used)
    mirror.normal(0.0, params.shadowing_sigma_db)
    assert used.uniform() == mirror.uniform()


def test_pathloss_deterministic_and_guards():
    params = PathlossParameters()
    taps = ChannelTaps([1.0, 0.5j], sample_period=2.0)
    a = apply_pathloss(taps, 2.5, params, np.random.default_rng(9))
    b = apply_pathloss(taps, 2.5, params, np.random.default_rng(9))
    assert np.array_equal(a.taps, b.taps)
    with pytest.raises(ValueError):
        apply_pathloss(taps, 0.0, params, np.random.default_rng(9))
    with pytest.raises(ValueError):
        PathlossParameters(shadowing_sigma_db=-1.0)


def test_dft_matches_definition():
    taps = ChannelTaps([1.0, 1.0j, -0.5], sample_period=2.0)
    block = 8
    resp = dft_response(taps, block)
    for i in range(block):
        expected = sum(g * np.exp(-2j * math.pi * i * k / block)
                       for k, g in enumerate(taps.taps))
        assert resp.gains[i] == pytest.approx(expected, abs=1e-12)


def test_dft_parseval():
    rng = np.random.default_rng(7)
    for block in (16, 64, 128):
        raw = rng.standard_normal(11) + 1j * rng.standard_normal(11)
        taps = ChannelTaps(raw, sample_period=2.0)
        resp = dft_response(taps, block)
        tone_mean = float(np.mean(np.abs(resp.gains) ** 2))
        assert tone_mean == pytest.approx(taps.energy, rel=1e-12)


def test_dft_block_must_cover_span():
    taps = ChannelTaps(np.ones(5), sample_period=2.0)
    with pytest.raises(ValueError):
        dft_response(taps, 4)
    assert dft_response(taps, 5).block_size == 5


def test_taps_csv_padding_and_write(tmp_path):
    links = {
        "sd": ChannelTaps([1.0, 2.0j], sample_period=2.0),
        "sr": ChannelTaps([0.5, 0.0, 1.0j], sample_period=2.0),
    }
    text = write_taps_csv(None, links, seed=3)
    lines = text.splitlines()
    assert lines[0] == "# span=3 sample_period_ns=2.0 seed=3"
    assert lines[1] == "tap,sd_re,sd_im,sr_re,sr_im"
    assert len(lines) == 2 + 3
    # shorter link zero-padded on its last row
    assert lines[-1].split(",")[1:3] == ["0.0", "0.0"]
    path = tmp_path / "taps.csv"
    assert write_taps_csv(path, links, seed=3) == text
    assert path.read_text() == text


def test_taps_csv_validation():
    with pytest.raises(ValueError):
        write_taps_csv(None, {}, seed=0)
    links = {
        "a": ChannelTaps([1.0], sample_period=1.0),
        "b": ChannelTaps([1.0], sample_period=2.0),
    }
    with pytest.raises(ValueError):
        write_taps_csv(None, links, seed=0)


def test_response_csv_roundtrip(tmp_path):
    links = {
        "sd": FrequencyResponse([1.0, 2.0j]),
        "rd": FrequencyResponse([0.5, -1.0]),
    }
    text = write_response_csv(None, links, sample_period=2.0, seed=4)
    lines = text.splitlines()
    assert lines[0] == "# block_size=2 sample_period_ns=2.0 seed=4"
    assert lines[1] == "tone,sd_re,sd_im,rd_re,rd_im"
    assert len(lines) == 2 + 2
    path = tmp_path / "resp.csv"
    assert write_response_csv(path, links, sample_period=2.0, seed=4) == text
    assert path.read_text() == text


def test_response_csv_validation():
    with pytest.raises(ValueError):
        write_response_csv(None, {}, sample_period=2.0, seed=0)
    links = {
        "a": FrequencyResponse([1.0]),
        "b": FrequencyResponse([1.0, 2.0]),
    }
    with pytest.raises(ValueError):
        write_response_csv(None, links, sample_period=2.0, seed=0)


def test_container_validation():
    with pytest.raises(ValueError):
        ChannelTaps([], sample_period=1.0)
    with pytest.raises(ValueError):
        ChannelTaps([1.0], sample_period=0.0)
    with pytest.raises(ValueError):
        ChannelTaps([[1.0, 2.0]], sample_period=1.0)
    with pytest.raises(ValueError):
        FrequencyResponse([])
    assert FrequencyResponse([1.0, 2.0]).block_size == 2
