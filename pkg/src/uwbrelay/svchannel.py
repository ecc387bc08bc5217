"""Clustered-multipath UWB channel generation.

The model is a simplified Saleh-Valenzuela generator in the 802.15.4a
style: cluster arrivals form a Poisson process, rays inside each cluster
form another Poisson process, and mean path power decays exponentially in
both the cluster delay and the ray delay.  Path gains are complex with
Rayleigh magnitude and uniform phase, and every realization is scaled to
unit total energy before pathloss is applied.

The continuous profile is then binned into baseband taps on a uniform
sample grid, scaled by a log-distance pathloss law with optional
log-normal shadowing, and transformed with an unnormalized forward DFT to
obtain the per-tone frequency response used by the rate expressions.

All delays are in nanoseconds, all distances in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateChannelError(ValueError):
    """Raised when a parameter set cannot produce any path in the window."""


@dataclass(frozen=True)
class SVParameters:
    """Cluster/ray arrival and decay parameters.

    cluster_arrival_rate and ray_arrival_rate are in 1/ns, the decay
    constants in ns.  mean_cluster_count is the mean of the Poisson draw
    for the number of clusters (at least one cluster is always kept).
    Paths beyond max_delay are discarded.

    Defaults approximate a residential non-line-of-sight environment.
    """

    cluster_arrival_rate: float = 0.12
    ray_arrival_rate: float = 0.25
    cluster_decay: float = 26.27
    ray_decay: float = 17.5
    mean_cluster_count: float = 3.5
    max_delay: float = 200.0

    def __post_init__(self) -> None:
        for name in ("cluster_arrival_rate", "ray_arrival_rate",
                     "cluster_decay", "ray_decay", "max_delay"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"SVParameters.{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.mean_cluster_count) and self.mean_cluster_count >= 1):
            raise ValueError(
                f"SVParameters.mean_cluster_count must be >= 1, got {self.mean_cluster_count!r}")


@dataclass(frozen=True)
class PathlossParameters:
    """Log-distance pathloss: ref_loss_db at ref_distance, slope
    10*exponent dB per decade, plus Normal(0, shadowing_sigma_db^2) dB of
    shadowing per realization."""

    ref_loss_db: float = 48.7
    ref_distance: float = 1.0
    exponent: float = 4.58
    shadowing_sigma_db: float = 3.51

    def __post_init__(self) -> None:
        if not (math.isfinite(self.ref_distance) and self.ref_distance > 0):
            raise ValueError(f"ref_distance must be > 0, got {self.ref_distance!r}")
        if not (math.isfinite(self.exponent) and self.exponent > 0):
            raise ValueError(f"exponent must be > 0, got {self.exponent!r}")
        if not (math.isfinite(self.shadowing_sigma_db) and self.shadowing_sigma_db >= 0):
            raise ValueError(
                f"shadowing_sigma_db must be >= 0, got {self.shadowing_sigma_db!r}")
        if not math.isfinite(self.ref_loss_db):
            raise ValueError(f"ref_loss_db must be finite, got {self.ref_loss_db!r}")


@dataclass
class ContinuousImpulse:
    """Continuous-delay path list: parallel arrays of delay (ns) and
    complex gain, sorted by delay, unit total energy at generation."""

    delays: np.ndarray
    gains: np.ndarray

    def __post_init__(self) -> None:
        self.delays = np.asarray(self.delays, dtype=float)
        self.gains = np.asarray(self.gains, dtype=complex)
        if self.delays.ndim != 1 or self.delays.shape != self.gains.shape:
            raise ValueError("delays and gains must be 1-D arrays of equal length")
        if self.delays.size == 0:
            raise DegenerateChannelError("impulse response has no paths")
        if not np.all(np.isfinite(self.delays)) or np.any(self.delays < 0):
            raise ValueError("path delays must be finite and >= 0")
        if not np.all(np.isfinite(self.gains)):
            raise ValueError("path gains must be finite")

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.gains) ** 2))


@dataclass
class ChannelTaps:
    """Uniformly sampled baseband taps; length is the occupied span, i.e.
    one past the last nonzero bin (at least 1)."""

    taps: np.ndarray
    sample_period: float

    def __post_init__(self) -> None:
        self.taps = np.asarray(self.taps, dtype=complex)
        if self.taps.ndim != 1 or self.taps.size < 1:
            raise ValueError("taps must be a nonempty 1-D array")
        if not np.all(np.isfinite(self.taps)):
            raise ValueError("taps must be finite")
        if not (math.isfinite(self.sample_period) and self.sample_period > 0):
            raise ValueError(f"sample_period must be > 0, got {self.sample_period!r}")

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.taps) ** 2))


@dataclass
class FrequencyResponse:
    """Per-tone complex gains of one link over a DFT block."""

    gains: np.ndarray

    def __post_init__(self) -> None:
        self.gains = np.asarray(self.gains, dtype=complex)
        if self.gains.ndim != 1 or self.gains.size < 1:
            raise ValueError("gains must be a nonempty 1-D array")
        if not np.all(np.isfinite(self.gains)):
            raise ValueError("gains must be finite")

    @property
    def block_size(self) -> int:
        return int(self.gains.size)


def sample_impulse_response(params: SVParameters, rng: np.random.Generator) -> ContinuousImpulse:
    """Draw one continuous multipath profile.

    The first cluster arrives at delay 0 and the number of clusters is
    Poisson(mean_cluster_count) resampled until at least 1.  Inter-cluster
    gaps are Exponential(1/cluster_arrival_rate).  Each cluster carries a
    deterministic first ray at relative delay 0 plus a Poisson process of
    extra rays realized over the remaining window.  Mean path power decays
    as exp(-T/cluster_decay) * exp(-tau/ray_decay); magnitudes are Rayleigh
    around those means and phases uniform on [0, 2pi).  The realization is
    scaled to unit total energy.

    Deterministic for a fixed rng state.
    """
    n_clusters = 0
    while n_clusters == 0:
        n_clusters = int(rng.poisson(params.mean_cluster_count))
    if n_clusters > 1:
        gaps = rng.exponential(1.0 / params.cluster_arrival_rate, size=n_clusters - 1)
        cluster_times = np.concatenate(([0.0], np.cumsum(gaps)))
    else:
        cluster_times = np.array([0.0])
    cluster_times = cluster_times[cluster_times <= params.max_delay]

    delays = []
    mean_powers = []
    for t_cluster in cluster_times:
        window = params.max_delay - t_cluster
        n_extra = int(rng.poisson(params.ray_arrival_rate * window))
        if n_extra > 0:
            extra = np.sort(rng.uniform(0.0, window, size=n_extra))
            ray_delays = np.concatenate(([0.0], extra))
        else:
            ray_delays = np.array([0.0])
        delays.append(t_cluster + ray_delays)
        mean_powers.append(
            math.exp(-t_cluster / params.cluster_decay)
            * np.exp(-ray_delays / params.ray_decay))

    delays = np.concatenate(delays)
    mean_powers = np.concatenate(mean_powers)
    if delays.size == 0:
        raise DegenerateChannelError(
            "no path fell inside max_delay; parameters are degenerate")

    magnitudes = rng.rayleigh(scale=np.sqrt(mean_powers / 2.0))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=delays.size)
    gains = magnitudes * np.exp(1j * phases)

    total = np.sum(magnitudes ** 2)
    if total <= 0.0:
        raise DegenerateChannelError("all path gains vanished; cannot normalize")
    gains = gains / math.sqrt(total)

    order = np.argsort(delays, kind="stable")
    return ContinuousImpulse(delays[order], gains[order])


def discretize_taps(impulse: ContinuousImpulse, sample_period: float,
                    max_taps: int) -> ChannelTaps:
    """Bin path gains into uniform taps: every path adds its gain to bin
    floor(delay / sample_period); paths landing at or beyond max_taps are
    dropped.  The result is trimmed one past the last nonzero bin."""
    if not (math.isfinite(sample_period) and sample_period > 0):
        raise ValueError(f"sample_period must be > 0, got {sample_period!r}")
    if max_taps < 1:
        raise ValueError(f"max_taps must be >= 1, got {max_taps!r}")
    bins = np.floor(impulse.delays / sample_period).astype(int)
    keep = bins < max_taps
    taps = np.zeros(max_taps, dtype=complex)
    np.add.at(taps, bins[keep], impulse.gains[keep])
    nonzero = np.nonzero(taps)[0]
    span = int(nonzero[-1]) + 1 if nonzero.size else 1
    return ChannelTaps(taps[:span], sample_period)


def apply_pathloss(taps: ChannelTaps, distance: float, params: PathlossParameters,
                   rng: np.random.Generator) -> ChannelTaps:
    """Scale taps by the amplitude of the log-distance loss with one
    shadowing draw; returns a new ChannelTaps."""
    if not (math.isfinite(distance) and distance > 0):
        raise ValueError(f"distance must be > 0, got {distance!r}")
    shadowing_db = float(rng.normal(0.0, params.shadowing_sigma_db))
    loss_db = (params.ref_loss_db
               + 10.0 * params.exponent * math.log10(distance / params.ref_distance)
               + shadowing_db)
    scale = 10.0 ** (-loss_db / 20.0)
    return ChannelTaps(taps.taps * scale, taps.sample_period)


def dft_response(taps: ChannelTaps, block_size: int) -> FrequencyResponse:
    """Unnormalized forward DFT of the taps over block_size tones:
    G_i = sum_k g_k exp(-j 2 pi i k / block_size).

    block_size must cover the occupied tap span so the block sees the
    whole response (no circular truncation).
    """
    span = taps.taps.size
    if block_size < span:
        raise ValueError(
            f"block_size ({block_size}) must be >= occupied tap span ({span})")
    return FrequencyResponse(np.fft.fft(taps.taps, n=block_size))


def write_taps_csv(path, links: dict[str, ChannelTaps], seed: int) -> str:
    """Serialize per-link taps: one row per tap index, re/im per link.
    All links must share the sample period; shorter links are zero-padded.
    Returns the text; path=None renders without writing."""
    if not links:
        raise ValueError("need at least one link")
    periods = {taps.sample_period for taps in links.values()}
    if len(periods) != 1:
        raise ValueError("links must share a sample period")
    span = max(taps.taps.size for taps in links.values())
    names = list(links)
    lines = [f"# span={span} sample_period_ns={periods.pop()!r} seed={seed}"]
    lines.append("tap," + ",".join(f"{n}_re,{n}_im" for n in names))
    for k in range(span):
        cells = [str(k)]
        for n in names:
            g = links[n].taps[k] if k < links[n].taps.size else 0j
            cells.append(repr(float(g.real)))
            cells.append(repr(float(g.imag)))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def write_response_csv(path, links: dict[str, FrequencyResponse],
                       sample_period: float, seed: int) -> str:
    """Serialize per-link frequency responses: one row per tone, re/im per
    link; the header records the block size, sample period and seed.
    Returns the text; path=None renders without writing."""
    if not links:
        raise ValueError("need at least one link")
    sizes = {resp.block_size for resp in links.values()}
    if len(sizes) != 1:
        raise ValueError("links must share a block size")
    block = sizes.pop()
    names = list(links)
    lines = [f"# block_size={block} sample_period_ns={sample_period!r} seed={seed}"]
    lines.append("tone," + ",".join(f"{n}_re,{n}_im" for n in names))
    for i in range(block):
        cells = [str(i)]
        for n in names:
            g = links[n].gains[i]
            cells.append(repr(float(g.real)))
            cells.append(repr(float(g.imag)))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
