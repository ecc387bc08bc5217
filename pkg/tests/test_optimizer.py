"""Split optimizers against frozen values and exhaustive search."""

import math

import numpy as np
import pytest

from conftest import make_instance
from uwbrelay import rates
from uwbrelay.optimizer import (
    OptimizerSettings,
    OracleComparison,
    align_phases,
    aligned_split,
    brute_force_oracle,
    optimize_cutset,
    optimize_degraded,
    optimize_pdf,
    oracle_suite,
    random_instance,
)
from uwbrelay.rates import PowerBudget, RelayChannelInstance

# frozen reference solutions; oracle values are grid-exhaustive at
# resolution 1e-3, optimizer values come from the scalarized search
K1_INSTANCE = dict(g_sd=[1.0], g_sr=[2.0], g_rd=[1.5],
                   n_dest=1.0, n_relay=1.0, noise_corr=[0.4 + 0.3j])
K1_POWERS = PowerBudget(p_src=2.0, p_rel=1.0)
K1_PDF_RATE = 2.8559846905528374
K1_CUTSET_ORACLE = 2.907467174187037
K1_CUTSET_RATE = 2.907866350353194

K2_SEED = 314
K2_PDF_ORACLE = 1.0270013724685807
K2_PDF_RATE = 1.0270013733815198
K2_CUTSET_RATE = 1.1341674705271545


def k2_instance():
    rng = np.random.default_rng(K2_SEED)
    g = (rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))) / math.sqrt(2)
    instance = make_instance(g[0], g[1], g[2], n_dest=0.8, n_relay=1.1,
                             noise_corr=[0.2 + 0.1j, -0.5 + 0.2j])
    return instance, PowerBudget(p_src=3.0, p_rel=2.0)


def test_align_phases_maximizes_coherent_term():
    rng = np.random.default_rng(31)
    for _ in range(20):
        instance, powers = random_instance(5, rng)
        snr = rates.mac_cut_snr(instance.g_sd, instance.g_rd, powers.p_src,
                                powers.p_rel, instance.n_dest,
                                *_split_arrays(instance, 1.0, 1.0))
        envelope = (np.abs(instance.g_sd) * math.sqrt(powers.p_src)
                    + np.abs(instance.g_rd) * math.sqrt(powers.p_rel)) ** 2
        assert np.allclose(snr, envelope / instance.n_dest, rtol=1e-12)


def _split_arrays(instance, relay_mag, aux_mag):
    split = aligned_split(instance, relay_mag, aux_mag)
    return split.relay_corr, split.aux_corr


def test_aligned_split_shapes_and_guards():
    instance = make_instance([1.0, 2.0], [1.0, 1.0], [1.0, 1.0j])
    split = aligned_split(instance, 0.25, [0.5, 1.0])
    assert split.relay_corr.shape == (2,)
    assert np.allclose(np.abs(split.relay_corr), 0.25)
    assert np.allclose(np.abs(split.aux_corr), [0.5, 1.0])
    assert np.allclose(np.angle(split.relay_corr), align_phases(instance))
    with pytest.raises(ValueError):
        aligned_split(instance, -0.1, 0.5)


def test_single_tone_golden_values():
    instance = make_instance(**K1_INSTANCE)
    pdf = optimize_pdf(instance, K1_POWERS)
    cut = optimize_cutset(instance, K1_POWERS)
    assert pdf.rate == pytest.approx(K1_PDF_RATE, abs=1e-9)
    assert cut.rate == pytest.approx(K1_CUTSET_RATE, abs=1e-9)
    assert brute_force_oracle(instance, K1_POWERS, "pdf") == pytest.approx(
        K1_PDF_RATE, abs=1e-9)
    assert brute_force_oracle(instance, K1_POWERS, "cutset") == pytest.approx(
        K1_CUTSET_ORACLE, abs=1e-9)
    assert abs(cut.rate - K1_CUTSET_ORACLE) <= 2e-3
    assert pdf.converged and cut.converged
    assert pdf.binding_term == "first"
    assert pdf.iterations > 0
    assert len(pdf.lambda_trace) >= 2
    # the reported rate is the rates-module evaluation of the reported split
    assert rates.pdf_rate(instance, K1_POWERS, pdf.split) == pdf.rate
    assert rates.cutset_rate(instance, K1_POWERS, cut.split) == cut.rate


def test_two_tone_golden_values():
    instance, powers = k2_instance()
    pdf = optimize_pdf(instance, powers)
    cut = optimize_cutset(instance, powers)
    assert pdf.rate == pytest.approx(K2_PDF_RATE, abs=1e-9)
    assert cut.rate == pytest.approx(K2_CUTSET_RATE, abs=1e-9)
    assert brute_force_oracle(instance, powers, "pdf") == pytest.approx(
        K2_PDF_ORACLE, abs=1e-8)
    assert brute_force_oracle(instance, powers, "cutset") == pytest.approx(
        K2_CUTSET_RATE, abs=1e-8)
    assert abs(pdf.rate - K2_PDF_ORACLE) <= 2e-3


def test_pdf_dominates_full_decode():
    rng = np.random.default_rng(32)
    for _ in range(20):
        instance, powers = random_instance(4, rng)
        pdf = optimize_pdf(instance, powers)
        df = optimize_degraded(instance, powers)
        assert pdf.rate >= df.rate - 1e-12
        assert df.objective == "degraded"
        assert np.allclose(np.abs(df.split.aux_corr), 1.0)


def test_degraded_matches_dense_restricted_grid():
    rng = np.random.default_rng(33)
    axis = np.linspace(0.0, 1.0, 2001)
    for _ in range(10):
        instance, powers = random_instance(1, rng)
        best = -np.inf
        for a in axis:
            best = max(best, rates.pdf_rate(
                instance, powers, aligned_split(instance, a, 1.0)))
        result = optimize_degraded(instance, powers)
        assert result.rate == pytest.approx(best, abs=2e-3)


def test_useless_relay_link_degenerates_to_direct():
    instance = make_instance([1.0, 0.5j], [1e-6, 1e-6], [0.8, 1.2],
                             n_dest=0.9, n_relay=1.1)
    powers = PowerBudget(p_src=2.0, p_rel=1.0)
    result = optimize_pdf(instance, powers)
    assert result.rate == pytest.approx(
        rates.direct_rate(instance.g_sd, powers.p_src, instance.n_dest),
        rel=1e-9)
    assert float(np.max(np.abs(result.split.aux_corr))) <= 0.011


def test_cutset_split_has_equal_magnitudes():
    instance = make_instance(**K1_INSTANCE)
    result = optimize_cutset(instance, K1_POWERS)
    assert np.allclose(np.abs(result.split.relay_corr),
                       np.abs(result.split.aux_corr), rtol=0, atol=1e-15)


def test_brute_force_oracle_guards():
    instance = make_instance(np.ones(3), np.ones(3), np.ones(3))
    powers = PowerBudget(p_src=1.0, p_rel=1.0)
    with pytest.raises(ValueError):
        brute_force_oracle(instance, powers)
    one = make_instance(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        brute_force_oracle(one, powers, "pdf", resolution=0.7)
    with pytest.raises(ValueError):
        brute_force_oracle(one, powers, "nope")


def test_two_tone_oracle_equals_pair_enumeration():
    # the suffix-maximum feasibility bisection must agree with literally
    # enumerating every pair of per-tone grid points
    instance, powers = k2_instance()
    resolution = 0.05
    axis = np.linspace(0.0, 1.0, round(1.0 / resolution) + 1)
    grid = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    rotor = np.exp(1j * align_phases(instance))

    def tone_tables(tone):
        g_sd = np.full(grid.shape[0], instance.g_sd[tone])
        g_sr = np.full(grid.shape[0], instance.g_sr[tone])
        g_rd = np.full(grid.shape[0], instance.g_rd[tone])
        rc = grid[:, 0] * rotor[tone]
        ac = grid[:, 1] * rotor[tone]
        mac = rates.cap(rates.mac_cut_snr(g_sd, g_rd, powers.p_src,
                                          powers.p_rel, instance.n_dest, rc, ac))
        dec = rates.cap(rates.decode_cut_snr(g_sd, g_sr, powers.p_src,
                                             instance.n_dest, instance.n_relay,
                                             rc, ac))
        return mac, dec

    u1, u2 = tone_tables(0)
    v1, v2 = tone_tables(1)
    pair_first = 0.5 * (u1[:, None] + v1[None, :])
    pair_second = 0.5 * (u2[:, None] + v2[None, :])
    enumerated = float(np.max(np.minimum(pair_first, pair_second)))
    oracle = brute_force_oracle(instance, powers, "pdf", resolution)
    assert oracle == pytest.approx(enumerated, abs=1e-8)


def test_oracle_suite_shape_and_determinism():
    rows_a = oracle_suite(2, 1, 1e-3, seed=5)
    rows_b = oracle_suite(2, 1, 1e-3, seed=5)
    assert rows_a == rows_b
    assert len(rows_a) == 6
    assert {(r.block_size, r.objective) for r in rows_a} == {
        (1, "pdf"), (1, "cutset"), (2, "pdf"), (2, "cutset")}
    for row in rows_a:
        assert isinstance(row, OracleComparison)
        assert row.deviation <= 2e-3


def test_optimizer_settings_validation():
    with pytest.raises(ValueError):
        OptimizerSettings(tone_grid_points=1)
    with pytest.raises(ValueError):
        OptimizerSettings(lambda_tolerance=0.0)
    with pytest.raises(ValueError):
        OptimizerSettings(max_lambda_iters=0)
    with pytest.raises(ValueError):
        OptimizerSettings(refine_steps=-1)


def test_random_instance_ranges():
    rng = np.random.default_rng(34)
    instance, powers = random_instance(16, rng)
    assert instance.block_size == 16
    assert float(np.max(np.abs(instance.noise_corr))) <= 0.9
    assert 10.0 ** -0.5 <= instance.n_dest <= 10.0 ** 0.5
    assert 10.0 ** -0.5 <= powers.p_src <= 10.0
