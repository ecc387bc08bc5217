"""Monte Carlo experiments over the UWB relay geometry.

A trial draws the three links of a source / relay / destination triangle
from the clustered-multipath model, applies distance pathloss, moves to
the frequency domain and evaluates every bound.  Trials are paired across
sweep points: the fading seed depends only on (master_seed, trial_index,
link), so moving the relay or changing the noise correlation reuses the
same small-scale realizations, which keeps sweep curves smooth and makes
the achievable rate exactly correlation-invariant across rho sweeps.

Transmit and noise levels follow the UWB regulatory convention: a flat
power spectral density in dBm/MHz integrated over the signal bandwidth.
Rates are bits per complex sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rates
from .optimizer import (OptimizerSettings, aligned_split, optimize_cutset,
                        optimize_degraded, optimize_pdf)
from .rates import PowerBudget, RateReport, RelayChannelInstance
from .svchannel import (PathlossParameters, SVParameters, apply_pathloss,
                        dft_response, discretize_taps, sample_impulse_response)

LINK_SOURCE_DEST = 1
LINK_SOURCE_RELAY = 2
LINK_RELAY_DEST = 3


@dataclass(frozen=True)
class Geometry:
    """Node placement.  With collinear=True the relay sits on the
    source-destination segment and the relay-destination distance is
    d1 - d2; otherwise d3 must be given explicitly."""

    d1: float
    d2: float
    collinear: bool = True
    d3: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.d1) and self.d1 > 0):
            raise ValueError(f"d1 must be > 0, got {self.d1!r}")
        if not (math.isfinite(self.d2) and self.d2 > 0):
            raise ValueError(f"d2 must be > 0, got {self.d2!r}")
        if self.collinear:
            if self.d3 is not None:
                raise ValueError("d3 is derived when collinear; leave it unset")
            if not self.d2 < self.d1:
                raise ValueError("collinear placement needs d2 < d1")
        else:
            if self.d3 is None or not (math.isfinite(self.d3) and self.d3 > 0):
                raise ValueError("non-collinear placement needs explicit d3 > 0")

    @property
    def relay_dest_distance(self) -> float:
        return self.d1 - self.d2 if self.collinear else float(self.d3)


def _default_d2_grid() -> tuple:
    return tuple(np.round(np.linspace(0.3, 2.7, 10), 10))


@dataclass
class ExperimentConfig:
    """Full experiment description; every field has a physically motivated
    default (UWB indoor emission limit, thermal-ish noise floor, 500 MHz
    band, residential NLOS multipath)."""

    psd_tx_dbm_per_mhz: float = -41.3
    psd_noise_dbm_per_mhz: float = -114.0
    bandwidth_mhz: float = 500.0
    block_size: int = 1024
    trials: int = 500
    master_seed: int = 20260814
    rho_values: tuple = (0.0, 0.6, 0.9)
    d2_grid: tuple = field(default_factory=_default_d2_grid)
    d1: float = 3.0
    sv: SVParameters = field(default_factory=SVParameters)
    pl: PathlossParameters = field(default_factory=PathlossParameters)
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.bandwidth_mhz) and self.bandwidth_mhz > 0):
            raise ValueError(f"bandwidth_mhz must be > 0, got {self.bandwidth_mhz!r}")
        if self.block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {self.block_size!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials!r}")
        if not (isinstance(self.master_seed, int) and self.master_seed >= 0):
            raise ValueError(f"master_seed must be a nonnegative int, got {self.master_seed!r}")
        self.rho_values = tuple(float(r) for r in self.rho_values)
        if not self.rho_values:
            raise ValueError("rho_values must not be empty")
        for rho in self.rho_values:
            if not (0.0 <= rho < 1.0):
                raise ValueError(f"rho values must lie in [0, 1), got {rho!r}")
        self.d2_grid = tuple(float(d) for d in self.d2_grid)
        if not self.d2_grid:
            raise ValueError("d2_grid must not be empty")
        if not (math.isfinite(self.d1) and self.d1 > 0):
            raise ValueError(f"d1 must be > 0, got {self.d1!r}")
        for d2 in self.d2_grid:
            Geometry(self.d1, d2)  # validates 0 < d2 < d1

    @property
    def sample_period_ns(self) -> float:
        """Baseband sample period implied by the bandwidth."""
        return 1e3 / self.bandwidth_mhz


def _psd_to_watts(psd_dbm_per_mhz: float, bandwidth_mhz: float) -> float:
    return 10.0 ** ((psd_dbm_per_mhz + 10.0 * math.log10(bandwidth_mhz) - 30.0) / 10.0)


def powers_from_config(config: ExperimentConfig):
    """Integrate the PSD levels over the band.

    Returns (PowerBudget, n_dest, n_relay).  Source and relay transmit at
    the same PSD cap; both receivers see the same integrated noise power.
    """
    p_tx = _psd_to_watts(config.psd_tx_dbm_per_mhz, config.bandwidth_mhz)
    noise = _psd_to_watts(config.psd_noise_dbm_per_mhz, config.bandwidth_mhz)
    return PowerBudget(p_src=p_tx, p_rel=p_tx), noise, noise


def link_rng(master_seed: int, trial_index: int, link_id: int) -> np.random.Generator:
    """Independent, reproducible stream for one link of one trial.  The
    key leaves out geometry and correlation on purpose (paired trials)."""
    if trial_index < 0:
        raise ValueError(f"trial_index must be >= 0, got {trial_index!r}")
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, trial_index, link_id)))


def draw_link_detail(config: ExperimentConfig, distance: float,
                     rng: np.random.Generator):
    """Sample one link end to end: impulse -> taps -> pathloss -> tones.
    Returns (taps, response) after pathloss."""
    impulse = sample_impulse_response(config.sv, rng)
    taps = discretize_taps(impulse, config.sample_period_ns, config.block_size)
    taps = apply_pathloss(taps, distance, config.pl, rng)
    return taps, dft_response(taps, config.block_size)


def draw_link(config: ExperimentConfig, distance: float,
              rng: np.random.Generator):
    """Frequency response of one freshly sampled link."""
    return draw_link_detail(config, distance, rng)[1]


def draw_links(config: ExperimentConfig, geometry: Geometry, trial_index: int):
    """All three links of a trial, keyed-seeded so changing one link's
    stream leaves the others bit-identical."""
    seed = config.master_seed
    return {
        "sd": draw_link(config, geometry.d1,
                        link_rng(seed, trial_index, LINK_SOURCE_DEST)),
        "sr": draw_link(config, geometry.d2,
                        link_rng(seed, trial_index, LINK_SOURCE_RELAY)),
        "rd": draw_link(config, geometry.relay_dest_distance,
                        link_rng(seed, trial_index, LINK_RELAY_DEST)),
    }


def build_instance(config: ExperimentConfig, geometry: Geometry, rho: float,
                   trial_index: int) -> RelayChannelInstance:
    """One frozen channel draw with a constant noise correlation."""
    links = draw_links(config, geometry, trial_index)
    _, n_dest, n_relay = powers_from_config(config)
    return RelayChannelInstance(
        g_sd=links["sd"].gains, g_sr=links["sr"].gains, g_rd=links["rd"].gains,
        n_dest=n_dest, n_relay=n_relay,
        noise_corr=np.full(config.block_size, complex(rho)))


def _cutset_with_product_candidate(instance, powers, settings, pdf_result):
    """Cut-set optimum, additionally evaluated at the product profile of
    the achievable optimum.  The extra point is feasible for the same
    maximization and dominates the achievable value term by term, so the
    reported upper bound can never dip below the achievable rate through
    discretization alone."""
    cut = optimize_cutset(instance, powers, settings)
    product = np.abs(pdf_result.split.relay_corr) * np.abs(pdf_result.split.aux_corr)
    root = np.sqrt(product)
    seeded_rate = rates.cutset_rate(instance, powers,
                                    aligned_split(instance, root, root))
    if seeded_rate > cut.rate:
        return seeded_rate, cut, True
    return cut.rate, cut, False


def run_trial(config: ExperimentConfig, geometry: Geometry, rho: float,
              trial_index: int) -> RateReport:
    """Evaluate every bound on one seeded channel draw.

    The direct-transmission baseline spends the whole power budget at the
    source (twice the per-node power), since without a relay only one
    node transmits.
    """
    instance = build_instance(config, geometry, rho, trial_index)
    powers, n_dest, _ = powers_from_config(config)
    settings = config.optimizer

    pdf_res = optimize_pdf(instance, powers, settings)
    df_res = optimize_degraded(instance, powers, settings)
    cut_value, cut_res, product_used = _cutset_with_product_candidate(
        instance, powers, settings, pdf_res)

    degraded_value = rates.degraded_capacity_rate(instance, powers,
                                                  df_res.split.relay_corr)
    revdeg_value = rates.reversely_degraded_capacity(instance, powers.p_src)
    direct_value = rates.direct_rate(instance.g_sd, 2.0 * powers.p_src, n_dest)

    mi = rates.mutual_information_terms(
        instance.g_sd, instance.g_sr, instance.g_rd, powers.p_src, powers.p_rel,
        instance.n_dest, instance.n_relay,
        pdf_res.split.relay_corr, pdf_res.split.aux_corr)
    per_tone = {
        "mac_cut_snr": rates.mac_cut_snr(
            instance.g_sd, instance.g_rd, powers.p_src, powers.p_rel,
            instance.n_dest, pdf_res.split.relay_corr, pdf_res.split.aux_corr),
        "decode_cut_snr": rates.decode_cut_snr(
            instance.g_sd, instance.g_sr, powers.p_src, instance.n_dest,
            instance.n_relay, pdf_res.split.relay_corr, pdf_res.split.aux_corr),
        "broadcast_cut_snr": rates.broadcast_cut_snr(
            instance.g_sd, instance.g_sr, powers.p_src, instance.n_dest,
            instance.n_relay, cut_res.split.relay_corr, cut_res.split.aux_corr,
            instance.noise_corr),
        "cooperative_at_dest": mi.cooperative_at_dest,
        "auxiliary_at_relay": mi.auxiliary_at_relay,
        "auxiliary_at_dest": mi.auxiliary_at_dest,
        "fresh_at_dest": mi.fresh_at_dest,
    }
    flags = {
        "pdf_converged": pdf_res.converged,
        "df_converged": df_res.converged,
        "cutset_converged": cut_res.converged,
        "pdf_binding": pdf_res.binding_term,
        "cutset_binding": cut_res.binding_term,
        "cutset_product_candidate_used": product_used,
    }
    return RateReport(
        pdf_rate=pdf_res.rate, df_rate=df_res.rate, cutset_rate=cut_value,
        degraded_capacity=degraded_value, revdeg_capacity=revdeg_value,
        direct_rate=direct_value, per_tone=per_tone, flags=flags)


@dataclass
class SweepResult:
    """Aggregated sweep: per bound, the mean and standard error of the
    rate at every axis value.  samples optionally keeps the raw
    (points, trials) values behind the aggregates."""

    axis_name: str
    axis_values: np.ndarray
    means: dict
    stderrs: dict
    trials: int
    samples: dict | None = None

    def __post_init__(self) -> None:
        self.axis_values = np.asarray(self.axis_values, dtype=float)
        n = self.axis_values.size
        for name, arr in list(self.means.items()):
            self.means[name] = np.asarray(arr, dtype=float)
            if self.means[name].shape != (n,):
                raise ValueError(f"means[{name!r}] must have shape ({n},)")
        for name, arr in list(self.stderrs.items()):
            self.stderrs[name] = np.asarray(arr, dtype=float)
            if np.any(self.stderrs[name] < 0):
                raise ValueError("standard errors must be >= 0")

    def write_csv(self, path, rate_unit: str = "bits_per_sample",
                  scale: float = 1.0) -> str:
        """Serialize as axis_value,bound,mean,stderr,trials rows; returns
        the text, path=None renders without writing."""
        lines = [f"{self.axis_name},bound,mean_{rate_unit},stderr,trials"]
        for i, x in enumerate(self.axis_values):
            for name in self.means:
                lines.append(
                    f"{float(x)!r},{name},{float(self.means[name][i] * scale)!r},"
                    f"{float(self.stderrs[name][i] * scale)!r},{self.trials}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _aggregate(samples: np.ndarray):
    """samples: (points, trials) -> mean, stderr per point."""
    mean = samples.mean(axis=1)
    if samples.shape[1] > 1:
        stderr = samples.std(axis=1, ddof=1) / math.sqrt(samples.shape[1])
    else:
        stderr = np.zeros(samples.shape[0])
    return mean, stderr


def _trial_bounds(config: ExperimentConfig, geometry: Geometry, trial_index: int,
                  rho_list) -> dict:
    """Shared per-trial work for sweeps: the correlation-independent
    bounds once, the cut-set bound per correlation value."""
    powers, n_dest, _ = powers_from_config(config)
    settings = config.optimizer
    instance0 = build_instance(config, geometry, rho_list[0], trial_index)
    pdf_res = optimize_pdf(instance0, powers, settings)
    df_res = optimize_degraded(instance0, powers, settings)
    out = {
        "pdf": pdf_res.rate,
        "df": df_res.rate,
        "direct": rates.direct_rate(instance0.g_sd, 2.0 * powers.p_src, n_dest),
    }
    for rho in rho_list:
        instance = instance0 if rho == rho_list[0] else RelayChannelInstance(
            g_sd=instance0.g_sd, g_sr=instance0.g_sr, g_rd=instance0.g_rd,
            n_dest=instance0.n_dest, n_relay=instance0.n_relay,
            noise_corr=np.full(config.block_size, complex(rho)))
        cut_value, _, _ = _cutset_with_product_candidate(
            instance, powers, settings, pdf_res)
        out[("cutset", rho)] = cut_value
    return out


def sweep_distance(config: ExperimentConfig, progress=None,
                   keep_samples: bool = False) -> SweepResult:
    """Move the relay along the source-destination segment and average
    each bound over the trials.  The upper bound uses uncorrelated noises
    here; correlation effects are sweep_rho's job."""
    names = ["cutset", "pdf", "df", "direct"]
    samples = {n: np.empty((len(config.d2_grid), config.trials)) for n in names}
    for i, d2 in enumerate(config.d2_grid):
        geometry = Geometry(config.d1, d2)
        for trial in range(config.trials):
            vals = _trial_bounds(config, geometry, trial, [0.0])
            samples["cutset"][i, trial] = vals[("cutset", 0.0)]
            samples["pdf"][i, trial] = vals["pdf"]
            samples["df"][i, trial] = vals["df"]
            samples["direct"][i, trial] = vals["direct"]
        if progress is not None:
            progress(i + 1, len(config.d2_grid))
    means, stderrs = {}, {}
    for n in names:
        means[n], stderrs[n] = _aggregate(samples[n])
    return SweepResult("source_relay_distance_m", np.asarray(config.d2_grid),
                       means, stderrs, config.trials,
                       samples=samples if keep_samples else None)


def sweep_rho(config: ExperimentConfig, progress=None,
              keep_samples: bool = False) -> SweepResult:
    """Distance sweep with one cut-set curve per noise-correlation value.
    The achievable curves do not depend on the correlation and are
    computed once."""
    rho_list = list(config.rho_values)
    names = [f"cutset[rho={rho:g}]" for rho in rho_list] + ["pdf", "df", "direct"]
    samples = {n: np.empty((len(config.d2_grid), config.trials)) for n in names}
    for i, d2 in enumerate(config.d2_grid):
        geometry = Geometry(config.d1, d2)
        for trial in range(config.trials):
            vals = _trial_bounds(config, geometry, trial, rho_list)
            for rho in rho_list:
                samples[f"cutset[rho={rho:g}]"][i, trial] = vals[("cutset", rho)]
            samples["pdf"][i, trial] = vals["pdf"]
            samples["df"][i, trial] = vals["df"]
            samples["direct"][i, trial] = vals["direct"]
        if progress is not None:
            progress(i + 1, len(config.d2_grid))
    means, stderrs = {}, {}
    for n in names:
        means[n], stderrs[n] = _aggregate(samples[n])
    return SweepResult("source_relay_distance_m", np.asarray(config.d2_grid),
                       means, stderrs, config.trials,
                       samples=samples if keep_samples else None)
