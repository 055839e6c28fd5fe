"""Directivity-based beamforming (DBF) and a brute-force grid oracle."""

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import TX, RX, feasible_window, steering_vector
from .channel import extract_subchannel
from .geometry import SubArrayKind, SubArraySpec, subarray_count
from .errors import GridCapError
from .metric import SENTINEL_DB, a_si

DEFAULT_GRID_CAP = 50_000_000


class SubChannelCache:
    """Lazily extracted sub-channels of one tensor, keyed by (tx_index, rx_index)."""

    def __init__(self, channel, kind):
        self.channel = channel
        self.kind = SubArrayKind.parse(kind)
        self.count = subarray_count(self.kind)
        self._cache = {}

    def get(self, i, j):
        key = (int(i), int(j))
        sub = self._cache.get(key)
        if sub is None:
            sub = extract_subchannel(
                self.channel, SubArraySpec.of(self.kind, key[0]), SubArraySpec.of(self.kind, key[1])
            )
            self._cache[key] = sub
        return sub


def parse_pair_policy(policy):
    """``"best"`` or an ``(i, j)`` pair; ``None`` means the default ``(1, 1)``."""
    if policy is None:
        return (1, 1)
    if isinstance(policy, str):
        if policy.lower() != "best":
            raise ValueError(f"unknown pair policy {policy!r}")
        return "best"
    i, j = policy
    return (int(i), int(j))


@dataclass(frozen=True)
class DBFSolution:
    theta_D: float
    theta_U: float
    tx_index: int
    rx_index: int
    a_si_db: float
    mean_power: float
    policy: str

    def to_dict(self):
        return {
            "theta_D": self.theta_D,
            "theta_U": self.theta_U,
            "tx_index": self.tx_index,
            "rx_index": self.rx_index,
            "a_si_db": min(self.a_si_db, SENTINEL_DB),
            "policy": self.policy,
        }


def dbf(channel, theta_D, theta_U, kind, pair_policy=None, spacing_wl=0.5, max_index=None):
    """Beams steered exactly at the users on a fixed or the best sub-array pair.

    ``pair_policy`` is ``(i, j)`` (Tx index, Rx index; default ``(1, 1)``) or
    ``"best"``, which scans every pair up to ``max_index`` and keeps the one
    with the highest suppression (lowest pair on ties).
    """
    cache = channel if isinstance(channel, SubChannelCache) else SubChannelCache(channel, kind)
    M = cache.kind.size
    f_d = steering_vector(TX, M, theta_D, spacing_wl)
    f_u = steering_vector(RX, M, theta_U, spacing_wl)
    policy = parse_pair_policy(pair_policy)
    if policy == "best":
        top = max_index or cache.count
        pairs = [(i, j) for i in range(1, top + 1) for j in range(1, top + 1)]
        label = "best"
    else:
        pairs = [policy]
        label = f"fixed({policy[0]},{policy[1]})"
    best = None
    for i, j in pairs:
        report = a_si(cache.get(i, j), f_u, f_d)
        if best is None or report.mean_power < best[0].mean_power:
            best = (report, i, j)
    report, i, j = best
    return DBFSolution(float(theta_D), float(theta_U), i, j, report.a_si_db, report.mean_power, label)


@dataclass(frozen=True)
class OracleSolution:
    theta_hat_D: float
    theta_hat_U: float
    tx_index: int
    rx_index: int
    a_si_db: float
    mean_power: float
    grid_size: int

    def to_dict(self):
        return {
            "theta_hat_D": self.theta_hat_D,
            "theta_hat_U": self.theta_hat_U,
            "tx_index": self.tx_index,
            "rx_index": self.rx_index,
            "a_si_db": min(self.a_si_db, SENTINEL_DB),
            "grid_size": self.grid_size,
        }


def window_grid(center, window, step):
    """Angles ``center + k*step`` that fall inside ``window``, ascending."""
    k_lo = math.ceil((window.lo - center) / step - 1e-9)
    k_hi = math.floor((window.hi - center) / step + 1e-9)
    angles = center + step * np.arange(k_lo, k_hi + 1)
    return angles[(angles >= window.lo) & (angles <= window.hi)]


def exhaustive_oracle(
    channel,
    theta_D,
    theta_U,
    kind,
    eps_db,
    angle_step_deg,
    spacing_wl=0.5,
    max_index=None,
    grid_cap=DEFAULT_GRID_CAP,
):
    """Best point over an angle grid in both feasible windows and all sub-array pairs.

    The angle grids are anchored at the desired directions, so the DBF
    beams are always candidates. Ties go to the lexicographically smallest
    ``(theta_hat_D, theta_hat_U, i, j)``.

    Raises
    ------
    GridCapError
        When the grid holds more than ``grid_cap`` points.
    """
    if not angle_step_deg > 0:
        raise ValueError(f"angle_step_deg must be positive, got {angle_step_deg}")
    cache = channel if isinstance(channel, SubChannelCache) else SubChannelCache(channel, kind)
    M = cache.kind.size
    S = max_index or cache.count
    win_d = feasible_window(TX, M, theta_D, spacing_wl, eps_db)
    win_u = feasible_window(RX, M, theta_U, spacing_wl, eps_db)
    grid_d = window_grid(theta_D, win_d, angle_step_deg)
    grid_u = window_grid(theta_U, win_u, angle_step_deg)
    size = grid_d.size * grid_u.size * S * S
    if size > grid_cap:
        raise GridCapError(size, grid_cap)

    m = np.arange(M)
    F_d = np.exp(2j * np.pi * spacing_wl * np.outer(np.cos(np.radians(grid_d)), m)) / math.sqrt(M)
    F_u = np.exp(-2j * np.pi * spacing_wl * np.outer(np.cos(np.radians(grid_u)), m)) / math.sqrt(M)

    # power[d, u, i, j], mean over samples accumulated in ascending n
    power = np.empty((grid_d.size, grid_u.size, S, S))
    for i in range(1, S + 1):
        for j in range(1, S + 1):
            data = cache.get(i, j).data
            acc = np.zeros((grid_d.size, grid_u.size))
            for n in range(data.shape[2]):
                y = F_d @ (F_u @ data[:, :, n]).T
                acc += y.real**2 + y.imag**2
            power[:, :, i - 1, j - 1] = acc / data.shape[2]

    flat = int(np.argmin(power))
    d, u, i, j = np.unravel_index(flat, power.shape)
    th_d, th_u = float(grid_d[d]), float(grid_u[u])
    # report an exact re-evaluation at the chosen point
    report = a_si(
        cache.get(i + 1, j + 1),
        steering_vector(RX, M, th_u, spacing_wl),
        steering_vector(TX, M, th_d, spacing_wl),
    )
    return OracleSolution(th_d, th_u, int(i) + 1, int(j) + 1, report.a_si_db, report.mean_power, size)
