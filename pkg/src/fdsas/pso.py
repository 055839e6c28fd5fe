"""Particle swarm search over beam perturbations and sub-array indices.

A particle position is the 4-vector ``[theta_hat_D, theta_hat_U, i, j]``:
the Tx and Rx steering angles in degrees and continuous relaxations of the
Tx/Rx sub-array indices, which are rounded to the nearest integer whenever
the position is evaluated. Angle bounds are the feasible windows of the
directivity-loss budget, so every clipped position satisfies it.

Random draws come from ``numpy.random.Generator(PCG64(seed))`` in a fixed
serial order:

1. initialization, particle-major: 4 uniforms per particle in ``[0, 1)``
   mapped onto ``[low, upp]`` (particle 0 is then overwritten by the DBF
   seed when enabled);
2. each later iteration, particle-major: 4 draws of Omega_1 on
   ``[0, omega1_max)`` followed by 4 draws of Omega_2 on ``[0, omega2_max)``.

Fitness evaluations may be farmed out to a thread pool; results are
gathered in particle order so output never depends on the worker count.
"""

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .baselines import SubChannelCache, dbf, parse_pair_policy
from .beamforming import RX, TX, degradation_db, feasible_window, phase_response, steering_vector
from .errors import ConfigError, InfeasibleWindowError
from .geometry import SubArrayKind, subarray_count
from .metric import SENTINEL_DB, a_si, beamformed_power, mean_power, power_to_db

MIN_WINDOW_DEG = 1e-6


@dataclass(frozen=True)
class Inertia:
    """Velocity inertia: a constant weight, or ``(T - t) / T`` when decaying."""

    mode: str = "constant"
    value: float = 1.1

    def __post_init__(self):
        if self.mode not in ("constant", "decaying"):
            raise ConfigError(f"unknown inertia mode {self.mode!r}; use constant or decaying")

    def at(self, t, T):
        if self.mode == "constant":
            return self.value
        return (T - t) / T


@dataclass(frozen=True)
class PSOConfig:
    theta_D: float
    theta_U: float
    kind: SubArrayKind = SubArrayKind.LIN4
    eps_db: float = 2.0
    num_particles: int = 20
    num_iterations: int = 100
    omega1_max: float = 2.0
    omega2_max: float = 2.0
    inertia: Inertia = field(default_factory=Inertia)
    seed: int = 0
    spacing_wl: float = 0.5
    max_index: int = None
    dbf_pair: object = (1, 1)
    seed_dbf: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", SubArrayKind.parse(self.kind))
        if isinstance(self.inertia, dict):
            object.__setattr__(self, "inertia", Inertia(**self.inertia))
        try:
            object.__setattr__(self, "dbf_pair", parse_pair_policy(self.dbf_pair))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid dbf_pair: {exc}") from None
        if self.num_particles < 1 or self.num_iterations < 1:
            raise ConfigError("num_particles and num_iterations must be >= 1")
        if not (self.omega1_max > 0 and self.omega2_max > 0):
            raise ConfigError("omega1_max and omega2_max must be positive")
        if not self.eps_db > 0:
            raise ConfigError(f"eps_db must be positive, got {self.eps_db}")
        for name in ("theta_D", "theta_U"):
            angle = getattr(self, name)
            if not 0 < angle < 180:
                raise ConfigError(f"{name} must lie in the open interval (0, 180), got {angle}")
        S = subarray_count(self.kind)
        if self.max_index is not None and not 1 <= self.max_index <= S:
            raise ConfigError(f"max_index must be within 1..{S}, got {self.max_index}")
        if self.dbf_pair != "best" and not all(1 <= k <= self.index_limit for k in self.dbf_pair):
            raise ConfigError(f"dbf_pair {self.dbf_pair} outside 1..{self.index_limit}")

    @property
    def index_limit(self):
        return self.max_index or subarray_count(self.kind)

    def to_dict(self):
        out = asdict(self)
        out["kind"] = self.kind.value
        out["dbf_pair"] = self.dbf_pair if self.dbf_pair == "best" else list(self.dbf_pair)
        return out


@dataclass(frozen=True)
class PerturbationVector:
    theta_hat_D: float
    theta_hat_U: float
    i: float
    j: float

    @classmethod
    def from_array(cls, x):
        return cls(*(float(v) for v in x))

    def as_array(self):
        return np.array([self.theta_hat_D, self.theta_hat_U, self.i, self.j])

    def rounded(self):
        return replace(self, i=round_index(self.i), j=round_index(self.j))


def round_index(value):
    # half-up, so the result does not depend on banker's rounding
    return int(math.floor(value + 0.5))


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_fitness: np.ndarray
    gbest_position: np.ndarray
    gbest_fitness: float
    t: int = 0


def search_bounds(config):
    """``(low, upp, windows)`` for the 4-dimensional search space."""
    M = config.kind.size
    win_d = feasible_window(TX, M, config.theta_D, config.spacing_wl, config.eps_db)
    win_u = feasible_window(RX, M, config.theta_U, config.spacing_wl, config.eps_db)
    for name, win in (("DL", win_d), ("UL", win_u)):
        if win.width < MIN_WINDOW_DEG:
            raise InfeasibleWindowError(
                f"{name} feasible window [{win.lo}, {win.hi}] is empty for eps_db={config.eps_db}"
            )
    S = config.index_limit
    low = np.array([win_d.lo, win_u.lo, 1.0, 1.0])
    upp = np.array([win_d.hi, win_u.hi, float(S), float(S)])
    return low, upp, (win_d, win_u)


class _Fitness:
    """Mean SI power of a position; keeps the sub-channel cache and constants."""

    def __init__(self, channel, config):
        self.cache = channel if isinstance(channel, SubChannelCache) else SubChannelCache(channel, config.kind)
        self.M = config.kind.size
        self.S = config.index_limit
        self.spacing_wl = config.spacing_wl

    def __call__(self, x):
        i = min(max(round_index(x[2]), 1), self.S)
        j = min(max(round_index(x[3]), 1), self.S)
        data = self.cache.get(i, j).data
        f_d = steering_vector(TX, self.M, x[0], self.spacing_wl).weights
        f_u = steering_vector(RX, self.M, x[1], self.spacing_wl).weights
        return mean_power(beamformed_power(data, f_u, f_d))


def fitness(x, channel, config):
    """Mean beamformed SI power (linear) at position ``x``; lower is better."""
    if isinstance(x, PerturbationVector):
        x = x.as_array()
    return _Fitness(channel, config)(np.asarray(x, dtype=float))


def velocity_update(state, p, rng, config):
    """New velocity of particle ``p``; draws Omega_1 then Omega_2, 4 values each."""
    x = state.positions[p]
    omega1 = rng.uniform(0.0, config.omega1_max, 4)
    omega2 = rng.uniform(0.0, config.omega2_max, 4)
    omega3 = config.inertia.at(state.t, config.num_iterations)
    return (
        omega1 * (state.gbest_position - x)
        + omega2 * (state.pbest_positions[p] - x)
        + omega3 * state.velocities[p]
    )


def position_update(x, v, low, upp):
    return np.minimum(np.maximum(np.asarray(x) + v, low), upp)


@dataclass(frozen=True)
class OptimizationResult:
    solution: PerturbationVector
    a_si_db: float
    mean_power: float
    trace: tuple  # global-best fitness (linear) for t = 0..T
    dbf: object
    windows: tuple
    config: PSOConfig
    evaluations: int

    @property
    def trace_db(self):
        return [power_to_db(p) for p in self.trace]

    @property
    def gain_db(self):
        return self.a_si_db - self.dbf.a_si_db

    def to_dict(self):
        s = self.solution
        win_d, win_u = self.windows
        return {
            "theta_hat_D": s.theta_hat_D,
            "theta_hat_U": s.theta_hat_U,
            "tx_index": s.i,
            "rx_index": s.j,
            "a_si_db": min(self.a_si_db, SENTINEL_DB),
            "mean_power": self.mean_power,
            "windows": {"D": [win_d.lo, win_d.hi], "U": [win_u.lo, win_u.hi]},
            "dbf": self.dbf.to_dict(),
            "gain_db": min(self.a_si_db, SENTINEL_DB) - min(self.dbf.a_si_db, SENTINEL_DB),
            "evaluations": self.evaluations,
            "config": self.config.to_dict(),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def trace_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iteration", "best_a_si_db"])
        for t, value in enumerate(self.trace_db):
            writer.writerow([t, repr(min(value, SENTINEL_DB))])
        return buf.getvalue()


def _evaluate(func, positions, pool):
    if pool is None:
        return np.array([func(x) for x in positions])
    return np.array(list(pool.map(func, list(positions))))


def optimize(channel, config, workers=1):
    """Run the swarm and return the best feasible beam pair and sub-arrays.

    Iteration 0 initializes velocities to zero and positions uniformly in
    the bounds; iterations 1..T update velocities and clipped positions,
    then personal bests (strict improvement) and the global best (lowest
    particle on ties). The trace stores the global-best fitness after every
    iteration.
    """
    low, upp, windows = search_bounds(config)
    cache = channel if isinstance(channel, SubChannelCache) else SubChannelCache(channel, config.kind)
    func = _Fitness(cache, config)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    Np, T = config.num_particles, config.num_iterations

    baseline = dbf(
        cache, config.theta_D, config.theta_U, config.kind, config.dbf_pair,
        config.spacing_wl, config.max_index,
    )

    positions = low + rng.random((Np, 4)) * (upp - low)
    if config.seed_dbf:
        positions[0] = [config.theta_D, config.theta_U, baseline.tx_index, baseline.rx_index]
    velocities = np.zeros_like(positions)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        fit = _evaluate(func, positions, pool)
        g = int(np.argmin(fit))
        state = SwarmState(positions, velocities, positions.copy(), fit.copy(), positions[g].copy(), float(fit[g]))
        trace = [state.gbest_fitness]
        for t in range(1, T + 1):
            state.t = t
            new_v = np.empty_like(state.velocities)
            new_x = np.empty_like(state.positions)
            for p in range(Np):
                new_v[p] = velocity_update(state, p, rng, config)
                new_x[p] = position_update(state.positions[p], new_v[p], low, upp)
            state.velocities, state.positions = new_v, new_x
            fit = _evaluate(func, new_x, pool)
            improved = fit < state.pbest_fitness
            state.pbest_positions[improved] = new_x[improved]
            state.pbest_fitness[improved] = fit[improved]
            g = int(np.argmin(state.pbest_fitness))
            if state.pbest_fitness[g] < state.gbest_fitness:
                state.gbest_fitness = float(state.pbest_fitness[g])
                state.gbest_position = state.pbest_positions[g].copy()
            trace.append(state.gbest_fitness)
    finally:
        if pool is not None:
            pool.shutdown()

    solution = PerturbationVector.from_array(state.gbest_position).rounded()
    report = evaluate_solution(cache, solution, config)
    return OptimizationResult(
        solution, report.a_si_db, report.mean_power, tuple(trace), baseline,
        windows, config, Np * (T + 1),
    )


def evaluate_solution(channel, solution, config):
    """Fresh suppression report for an integer-index solution."""
    cache = channel if isinstance(channel, SubChannelCache) else SubChannelCache(channel, config.kind)
    M = config.kind.size
    return a_si(
        cache.get(solution.i, solution.j),
        steering_vector(RX, M, solution.theta_hat_U, config.spacing_wl),
        steering_vector(TX, M, solution.theta_hat_D, config.spacing_wl),
    )


def solution_degradations(solution, config):
    """(DL, UL) directivity loss in dB of a reported solution."""
    M = config.kind.size
    d = degradation_db(
        phase_response(TX, M, config.theta_D, config.spacing_wl),
        steering_vector(TX, M, solution.theta_hat_D, config.spacing_wl),
    )
    u = degradation_db(
        phase_response(RX, M, config.theta_U, config.spacing_wl),
        steering_vector(RX, M, solution.theta_hat_U, config.spacing_wl),
    )
    return d, u
