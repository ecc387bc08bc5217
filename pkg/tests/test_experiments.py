"""Monte Carlo harness: power bookkeeping, seed pairing, sweeps."""

import math

import numpy as np
import pytest

from uwbrelay.experiments import (
    ExperimentConfig,
    Geometry,
    SweepResult,
    build_instance,
    draw_link_detail,
    link_rng,
    powers_from_config,
    run_trial,
    sweep_distance,
    sweep_rho,
)
from uwbrelay.optimizer import OptimizerSettings
from uwbrelay.svgplot import parse_sweep_csv

# small, fast configuration shared by the sweep tests
SMALL = dict(block_size=32, trials=2, d2_grid=(1.0, 2.0), rho_values=(0.0, 0.5),
             master_seed=11, optimizer=OptimizerSettings(tone_grid_points=21,
                                                         refine_steps=2))

# frozen single-trial reference at block_size 128 (default optimizer)
TRIAL_GOLDEN = {
    "pdf_rate": 4.999438368670295,
    "df_rate": 4.98498204481797,
    "cutset_rate": 5.702821389950325,
    "degraded_capacity": 4.984982044817974,
    "revdeg_capacity": 0.8496864199094566,
    "direct_rate": 1.326111576947827,
}


def test_psd_integration_golden():
    powers, n_dest, n_relay = powers_from_config(ExperimentConfig())
    assert powers.p_src == pytest.approx(3.706551206504588e-05, rel=1e-12)
    assert powers.p_rel == powers.p_src
    assert n_dest == pytest.approx(1.9905358527674843e-12, rel=1e-12)
    assert n_relay == n_dest
    # -41.3 dBm/MHz over -114 dBm/MHz is a 72.7 dB link budget
    assert 10.0 * math.log10(powers.p_src / n_dest) == pytest.approx(72.7, abs=1e-9)


def test_sample_period_from_bandwidth():
    assert ExperimentConfig().sample_period_ns == 2.0
    assert ExperimentConfig(bandwidth_mhz=250.0).sample_period_ns == 4.0


def test_link_rng_keying():
    assert link_rng(1, 2, 3).uniform() == link_rng(1, 2, 3).uniform()
    draws = {link_rng(1, 2, link).uniform() for link in (1, 2, 3)}
    assert len(draws) == 3
    with pytest.raises(ValueError):
        link_rng(1, -1, 3)


def test_build_instance_pairs_fading_across_rho_and_geometry():
    config = ExperimentConfig(**SMALL)
    base = build_instance(config, Geometry(3.0, 1.0), 0.0, trial_index=0)
    other_rho = build_instance(config, Geometry(3.0, 1.0), 0.5, trial_index=0)
    assert np.array_equal(base.g_sd, other_rho.g_sd)
    assert np.array_equal(base.g_sr, other_rho.g_sr)
    assert np.array_equal(base.g_rd, other_rho.g_rd)
    assert np.all(base.noise_corr == 0.0)
    assert np.all(other_rho.noise_corr == 0.5)
    # moving the relay keeps the direct link draw bit-identical
    moved = build_instance(config, Geometry(3.0, 2.0), 0.0, trial_index=0)
    assert np.array_equal(base.g_sd, moved.g_sd)
    assert not np.array_equal(base.g_sr, moved.g_sr)
    # a different trial redraws everything
    fresh = build_instance(config, Geometry(3.0, 1.0), 0.0, trial_index=1)
    assert not np.array_equal(base.g_sd, fresh.g_sd)


def test_run_trial_golden_values():
    config = ExperimentConfig(block_size=128, trials=1)
    report = run_trial(config, Geometry(3.0, 1.9), 0.6, trial_index=3)
    for name, expected in TRIAL_GOLDEN.items():
        assert getattr(report, name) == pytest.approx(expected, rel=1e-12), name
    assert report.flags == {
        "pdf_converged": True, "df_converged": True, "cutset_converged": True,
        "pdf_binding": "second", "cutset_binding": "second",
        "cutset_product_candidate_used": False,
    }
    assert sorted(report.per_tone) == [
        "auxiliary_at_dest", "auxiliary_at_relay", "broadcast_cut_snr",
        "cooperative_at_dest", "decode_cut_snr", "fresh_at_dest", "mac_cut_snr"]
    for arr in report.per_tone.values():
        assert arr.shape == (128,)


def test_run_trial_is_deterministic_and_consistent():
    config = ExperimentConfig(**SMALL)
    a = run_trial(config, Geometry(3.0, 1.0), 0.5, trial_index=1)
    b = run_trial(config, Geometry(3.0, 1.0), 0.5, trial_index=1)
    assert a.rows() == b.rows()
    assert a.df_rate <= a.pdf_rate + 1e-12
    assert a.pdf_rate <= a.cutset_rate + 1e-9
    # per-tone diagnostics are evaluated at the reported optimal split, so
    # they reproduce the scalar achievable rate
    from uwbrelay.rates import cap
    mac = float(np.mean(cap(a.per_tone["mac_cut_snr"])))
    dec = float(np.mean(cap(a.per_tone["decode_cut_snr"])))
    assert min(mac, dec) == pytest.approx(a.pdf_rate, rel=1e-12)


def test_single_trial_sweep_matches_run_trial():
    config = ExperimentConfig(block_size=32, trials=1, d2_grid=(1.9,),
                              rho_values=(0.0,), master_seed=11,
                              optimizer=OptimizerSettings(tone_grid_points=21,
                                                          refine_steps=2))
    report = run_trial(config, Geometry(3.0, 1.9), 0.0, trial_index=0)
    result = sweep_distance(config)
    assert result.axis_name == "source_relay_distance_m"
    assert result.trials == 1
    assert result.means["pdf"][0] == report.pdf_rate
    assert result.means["df"][0] == report.df_rate
    assert result.means["cutset"][0] == report.cutset_rate
    assert result.means["direct"][0] == report.direct_rate
    for arr in result.stderrs.values():
        assert np.all(arr == 0.0)


def test_sweep_rho_series_names_and_progress():
    config = ExperimentConfig(**SMALL)
    seen = []
    result = sweep_rho(config, progress=lambda done, total: seen.append((done, total)))
    assert set(result.means) == {"cutset[rho=0]", "cutset[rho=0.5]",
                                 "df", "direct", "pdf"}
    assert seen == [(1, 2), (2, 2)]
    for arr in result.means.values():
        assert arr.shape == (2,)
        assert np.all(np.isfinite(arr))


def test_keep_samples_backs_the_aggregates():
    config = ExperimentConfig(**SMALL)
    plain = sweep_distance(config)
    kept = sweep_distance(config, keep_samples=True)
    assert plain.samples is None
    assert sorted(kept.samples) == ["cutset", "df", "direct", "pdf"]
    for name, arr in kept.samples.items():
        assert arr.shape == (2, 2)  # (grid points, trials)
        assert np.array_equal(arr.mean(axis=1), kept.means[name])
        assert np.array_equal(kept.means[name], plain.means[name])


def test_write_csv_schema_scale_and_roundtrip(tmp_path):
    result = SweepResult("source_relay_distance_m", [1.0, 2.0],
                         means={"pdf": [1.5, 2.5]}, stderrs={"pdf": [0.1, 0.2]},
                         trials=4)
    text = result.write_csv(None)
    lines = text.splitlines()
    assert lines[0] == "source_relay_distance_m,bound,mean_bits_per_sample,stderr,trials"
    assert lines[1] == "1.0,pdf,1.5,0.1,4"
    axis_name, rate_name, groups = parse_sweep_csv(text)
    assert axis_name == "source_relay_distance_m"
    assert rate_name == "bits_per_sample"
    assert groups["pdf"] == ([1.0, 2.0], [1.5, 2.5], [0.1, 0.2])
    doubled = result.write_csv(None, rate_unit="bits_per_second", scale=2.0)
    assert "mean_bits_per_second" in doubled.splitlines()[0]
    assert parse_sweep_csv(doubled)[2]["pdf"][1] == [3.0, 5.0]
    path = tmp_path / "sweep.csv"
    assert result.write_csv(path) == text
    assert path.read_text() == text


def test_sweep_result_validation():
    with pytest.raises(ValueError):
        SweepResult("d", [1.0, 2.0], means={"pdf": [1.0]}, stderrs={}, trials=1)
    with pytest.raises(ValueError):
        SweepResult("d", [1.0], means={"pdf": [1.0]},
                     stderrs={"pdf": [-0.1]}, trials=1)


def test_geometry():
    assert Geometry(3.0, 1.9).relay_dest_distance == pytest.approx(1.1)
    assert Geometry(3.0, 1.0, collinear=False, d3=5.0).relay_dest_distance == 5.0
    with pytest.raises(ValueError):
        Geometry(3.0, 3.0)
    with pytest.raises(ValueError):
        Geometry(3.0, 1.0, collinear=False)
    with pytest.raises(ValueError):
        Geometry(3.0, 1.0, d3=2.0)


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(rho_values=(1.0,))
    with pytest.raises(ValueError):
        ExperimentConfig(rho_values=())
    with pytest.raises(ValueError):
        ExperimentConfig(d2_grid=(3.5,))
    with pytest.raises(ValueError):
        ExperimentConfig(master_seed=-1)


def test_draw_link_detail_consistency():
    config = ExperimentConfig(**SMALL)
    taps, response = draw_link_detail(config, 2.0, link_rng(11, 0, 1))
    assert taps.taps.size <= config.block_size
    assert response.block_size == config.block_size
    assert np.array_equal(response.gains,
                          np.fft.fft(taps.taps, n=config.block_size))
