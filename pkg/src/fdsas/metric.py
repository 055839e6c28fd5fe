"""Achieved SI suppression of a Tx/Rx beam pair over a sampled band."""

import math
from dataclasses import dataclass

import numpy as np

# serialized stand-in for +inf suppression (all-zero channel)
SENTINEL_DB = 300.0


@dataclass(frozen=True, eq=False)
class SuppressionReport:
    a_si_db: float
    mean_power: float
    per_sample_power: np.ndarray
    degenerate: bool = False

    @property
    def num_samples(self):
        return self.per_sample_power.size

    def to_dict(self):
        return {
            "a_si_db": min(self.a_si_db, SENTINEL_DB),
            "N": self.num_samples,
            "degenerate": self.degenerate,
        }


def beamformed_power(data, f_u, f_d):
    """Per-sample ``|f_u^T H(:, :, n) f_d|^2`` for ``data`` shaped (M_U, M_D, N)."""
    y = np.tensordot(f_u, data, axes=(0, 0))
    y = f_d @ y
    return y.real**2 + y.imag**2


def mean_power(per_sample):
    # compensated, ascending-n accumulation keeps results order-stable
    return math.fsum(per_sample.tolist()) / len(per_sample)


def power_to_db(power):
    if power <= 0:
        return math.inf
    return -10 * math.log10(power)


def a_si(subchannel, f_u, f_d):
    """Suppression report for Rx beam ``f_u`` and Tx beam ``f_d`` on ``subchannel``.

    Larger ``a_si_db`` means more suppression. An all-zero channel yields
    ``inf`` with ``degenerate=True``.
    """
    data = getattr(subchannel, "data", subchannel)
    m_u, m_d, _ = data.shape
    wu = getattr(f_u, "weights", f_u)
    wd = getattr(f_d, "weights", f_d)
    if wu.size != m_u or wd.size != m_d:
        raise ValueError(
            f"beam sizes ({wu.size}, {wd.size}) do not match sub-channel ({m_u}, {m_d})"
        )
    per_sample = beamformed_power(data, wu, wd)
    power = mean_power(per_sample)
    return SuppressionReport(power_to_db(power), power, per_sample, degenerate=power == 0)
