"""Frequency-sampled SI coupling tensors.

A tensor is indexed ``data[rx, tx, n]`` (0-based in memory, while antenna
and sub-array numbering elsewhere is 1-based). Entries are dimensionless
voltage coupling gains between Tx and Rx elements.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BandError, ConfigError, DegenerateBandError, GeometryError
from .geometry import SPEED_OF_LIGHT, ArrayGeometry, SubArraySpec, panel_positions


@dataclass(frozen=True)
class FrequencyGrid:
    f_start_hz: float
    f_stop_hz: float
    num_points: int

    def __post_init__(self):
        if self.num_points < 1:
            raise ConfigError(f"num_points must be >= 1, got {self.num_points}")
        if self.num_points == 1:
            if self.f_stop_hz != self.f_start_hz:
                raise ConfigError("a single-sample grid needs f_stop_hz == f_start_hz")
        elif not self.f_stop_hz > self.f_start_hz:
            raise ConfigError(f"f_stop_hz ({self.f_stop_hz}) must exceed f_start_hz ({self.f_start_hz})")

    @property
    def step_hz(self):
        if self.num_points == 1:
            return 0.0
        return (self.f_stop_hz - self.f_start_hz) / (self.num_points - 1)

    @property
    def frequencies(self):
        return np.linspace(self.f_start_hz, self.f_stop_hz, self.num_points)

    def band_indices(self, center_hz, bandwidth_hz):
        """Slice of sample indices covering ``[center - B/2, center + B/2]``.

        Band edges are snapped to the nearest grid sample. The result always
        holds ``round(B / step) + 1`` samples.
        """
        step = self.step_hz
        if self.num_points < 2:
            raise DegenerateBandError("cannot slice a single-sample grid")
        if bandwidth_hz < step:
            raise DegenerateBandError(
                f"bandwidth {bandwidth_hz} Hz is below the grid step {step} Hz"
            )
        n_steps = math.floor(bandwidth_hz / step + 0.5)
        lo_edge = center_hz - bandwidth_hz / 2
        lo = math.floor((lo_edge - self.f_start_hz) / step + 0.5)
        hi = lo + n_steps
        if lo < 0 or hi > self.num_points - 1:
            raise BandError(
                f"band [{lo_edge:.6g}, {center_hz + bandwidth_hz / 2:.6g}] Hz lies outside "
                f"the grid span [{self.f_start_hz:.6g}, {self.f_stop_hz:.6g}] Hz"
            )
        freqs = self.frequencies
        hi_edge = center_hz + bandwidth_hz / 2
        tol = step / 2 * (1 + 1e-9)
        if abs(freqs[lo] - lo_edge) > tol or abs(freqs[hi] - hi_edge) > tol:
            raise BandError("band edges do not align with the grid within half a step")
        return slice(lo, hi + 1)

    def subgrid(self, indices):
        freqs = self.frequencies[indices]
        return FrequencyGrid(float(freqs[0]), float(freqs[-1]), int(freqs.size))

    def to_dict(self):
        return {"f_start_hz": self.f_start_hz, "f_stop_hz": self.f_stop_hz, "num_points": self.num_points}


DEFAULT_GRID = FrequencyGrid(3.0e9, 4.0e9, 1601)


@dataclass(frozen=True, eq=False)
class SIChannelTensor:
    data: np.ndarray
    grid: FrequencyGrid
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        if data.ndim != 3:
            raise ConfigError(f"channel tensor must be 3-D (rx, tx, freq), got shape {data.shape}")
        if data.shape[2] != self.grid.num_points:
            raise ConfigError(
                f"tensor has {data.shape[2]} frequency samples but the grid has {self.grid.num_points}"
            )
        if not np.all(np.isfinite(data)):
            raise ConfigError("channel tensor contains non-finite entries")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def shape(self):
        return self.data.shape

    @property
    def frequencies(self):
        return self.grid.frequencies


@dataclass(frozen=True, eq=False)
class SubChannel:
    data: np.ndarray  # (M_U, M_D, N)
    tx_sub: SubArraySpec
    rx_sub: SubArraySpec
    freq_indices: tuple

    @property
    def num_samples(self):
        return self.data.shape[2]


def free_space_coupling(distance_m, freq_hz, isolation_db=0.0):
    """Complex LoS voltage gain over ``distance_m`` at ``freq_hz``."""
    k = 2 * np.pi * freq_hz / SPEED_OF_LIGHT
    gain = SPEED_OF_LIGHT / (4 * np.pi * freq_hz * distance_m)
    return gain * np.exp(-1j * k * distance_m) * 10.0 ** (-isolation_db / 20.0)


def generate_synthetic(geometry=None, grid=DEFAULT_GRID, isolation_db=0.0, diffuse_ratio=0.0, seed=0):
    """Spherical-wave line-of-sight coupling between every Tx/Rx element pair.

    Each entry is the free-space gain ``c / (4 pi f r) * exp(-j 2 pi f r / c)``
    attenuated by ``isolation_db``. With ``diffuse_ratio > 0`` a seeded
    circular complex Gaussian term is added whose power is that fraction of
    the mean LoS power; it is drawn in (freq, tx, rx) order.
    """
    geometry = geometry or ArrayGeometry()
    if diffuse_ratio < 0:
        raise ConfigError(f"diffuse_ratio must be non-negative, got {diffuse_ratio}")
    tx = panel_positions("tx", geometry)
    rx = panel_positions("rx", geometry)
    r = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=-1)
    if np.any(r <= 0):
        u, m = np.argwhere(r <= 0)[0] + 1
        raise GeometryError(f"Rx element {u} coincides with Tx element {m}; panels overlap")

    freqs = grid.frequencies
    data = np.empty(r.shape + (freqs.size,), dtype=np.complex128)
    for n, f in enumerate(freqs):
        data[:, :, n] = free_space_coupling(r, f, isolation_db)

    if diffuse_ratio > 0:
        rng = np.random.default_rng(seed)
        sigma = math.sqrt(diffuse_ratio * np.mean(np.abs(data) ** 2) / 2)
        for n in range(freqs.size):
            draw = rng.standard_normal((r.shape[1], r.shape[0], 2))
            data[:, :, n] += sigma * (draw[..., 0] + 1j * draw[..., 1]).T

    provenance = {
        "source": "synthetic",
        "seed": seed,
        "geometry": geometry.to_dict(),
        "isolation_db": isolation_db,
        "diffuse_ratio": diffuse_ratio,
    }
    return SIChannelTensor(data, grid, provenance)


def slice_bandwidth(tensor, center_hz, bandwidth_hz):
    idx = tensor.grid.band_indices(center_hz, bandwidth_hz)
    provenance = dict(tensor.provenance)
    provenance["slices"] = list(provenance.get("slices", [])) + [
        {"center_hz": center_hz, "bandwidth_hz": bandwidth_hz}
    ]
    return SIChannelTensor(tensor.data[:, :, idx], tensor.grid.subgrid(idx), provenance)


def extract_subchannel(tensor, tx_sub, rx_sub):
    """Rows from the Rx sub-array and columns from the Tx sub-array, all samples."""
    n_rx, n_tx, n = tensor.shape
    if max(rx_sub.elements) > n_rx or max(tx_sub.elements) > n_tx:
        raise ConfigError(
            f"sub-arrays need a 64x64 panel tensor, got {n_rx}x{n_tx} elements"
        )
    data = tensor.data[np.ix_(rx_sub.zero_based, tx_sub.zero_based, np.arange(n))]
    return SubChannel(data, tx_sub, rx_sub, tuple(range(n)))
