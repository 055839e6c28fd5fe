"""Phase responses, beamsteering vectors, directivity and beampatterns.

All beams are azimuth-only linear sub-array beams with elevation fixed at
90 degrees. Sign conventions:

* DL phase response ``exp(-j 2 pi d m cos(theta))``, UL the conjugate.
* Tx steering vector ``exp(+j 2 pi d m cos(theta_hat)) / sqrt(M)``, Rx the
  conjugate.

so that ``|phi^T f|^2`` equals ``M`` when the beam points at the user.
"""

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

INF_DB = math.inf
# |phi^T f|^2 below M * NULL_FLOOR is treated as an exact null
NULL_FLOOR = 1e-15
WINDOW_TOL_DEG = 1e-9


class Sense(str, Enum):
    """Which side of the link a vector belongs to.

    ``DL``/``TX`` share the downlink transmit side, ``UL``/``RX`` the
    uplink receive side.
    """

    DL = "dl"
    UL = "ul"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        value = str(value).lower()
        return {"dl": cls.DL, "tx": cls.DL, "ul": cls.UL, "rx": cls.UL}[value]


TX = Sense.DL
RX = Sense.UL


@dataclass(frozen=True, eq=False)
class PhaseResponse:
    entries: np.ndarray
    angle_deg: float
    sense: Sense


@dataclass(frozen=True, eq=False)
class SteeringVector:
    weights: np.ndarray
    angle_deg: float
    sense: Sense
    spacing_wl: float

    @property
    def size(self):
        return self.weights.size


def _progression(sign, M, angle_deg, spacing_wl):
    m = np.arange(M)
    return np.exp(sign * 2j * np.pi * spacing_wl * m * np.cos(np.radians(angle_deg)))


def phase_response(sense, M, angle_deg, spacing_wl=0.5):
    sense = Sense.parse(sense)
    sign = -1.0 if sense is Sense.DL else 1.0
    return PhaseResponse(_progression(sign, M, angle_deg, spacing_wl), float(angle_deg), sense)


def steering_vector(sense, M, angle_deg, spacing_wl=0.5):
    sense = Sense.parse(sense)
    sign = 1.0 if sense is Sense.DL else -1.0
    weights = _progression(sign, M, angle_deg, spacing_wl) / math.sqrt(M)
    return SteeringVector(weights, float(angle_deg), sense, float(spacing_wl))


def directivity(phase, steering):
    """Linear array gain ``|phi^T f|^2`` towards the phase-response direction."""
    if phase.entries.size != steering.weights.size:
        raise ValueError(
            f"length mismatch: phase response has {phase.entries.size} entries, "
            f"steering vector {steering.weights.size}"
        )
    return float(abs(phase.entries @ steering.weights) ** 2)


def degradation_db(phase, steering):
    """Directivity loss in dB relative to the maximum ``M``; ``inf`` at a null."""
    M = steering.weights.size
    gain = directivity(phase, steering)
    if gain <= M * NULL_FLOOR:
        return INF_DB
    return 10 * math.log10(M) - 10 * math.log10(gain)


def _degradation_at(sense, M, angle_deg, steer_deg, spacing_wl):
    return degradation_db(
        phase_response(sense, M, angle_deg, spacing_wl),
        steering_vector(sense, M, steer_deg, spacing_wl),
    )


def is_feasible(sense, M, angle_deg, steer_deg, eps_db, spacing_wl=0.5):
    return _degradation_at(sense, M, angle_deg, steer_deg, spacing_wl) <= eps_db


@dataclass(frozen=True)
class FeasibleWindow:
    lo: float
    hi: float
    clamped: bool = False

    @property
    def width(self):
        return self.hi - self.lo

    def __contains__(self, angle):
        return self.lo <= angle <= self.hi

    def __iter__(self):
        return iter((self.lo, self.hi))


def feasible_window(sense, M, angle_deg, spacing_wl, eps_db, tol_deg=WINDOW_TOL_DEG):
    """Largest interval around ``angle_deg`` whose steering loss stays within ``eps_db``.

    The loss is monotone in ``|cos(theta_hat) - cos(theta)|`` up to the first
    null, so each edge is bracketed by that null (or by the 0/180 degree
    endpoint) and located by bisection. The returned edges are always on the
    feasible side of the boundary.
    """
    if not eps_db > 0:
        raise ValueError(f"eps_db must be positive, got {eps_db}")
    cos0 = math.cos(math.radians(angle_deg))
    null_u = 1.0 / (M * spacing_wl)

    def loss(steer):
        return _degradation_at(sense, M, angle_deg, steer, spacing_wl)

    clamped = False
    edges = []
    for direction in (+1, -1):
        # direction +1 walks toward 0 deg (cos grows), -1 toward 180 deg
        u_edge = cos0 + direction * null_u
        if -1.0 < u_edge < 1.0:
            outer = math.degrees(math.acos(u_edge))
        else:
            outer = 0.0 if direction > 0 else 180.0
            if loss(outer) <= eps_db:
                clamped = True
                edges.append(outer)
                continue
        inner = float(angle_deg)
        while abs(outer - inner) > tol_deg:
            mid = 0.5 * (inner + outer)
            if loss(mid) <= eps_db:
                inner = mid
            else:
                outer = mid
        edges.append(inner)
    return FeasibleWindow(edges[0], edges[1], clamped)


def beampattern(steering, angles_deg):
    """Gain in dB of ``steering`` over ``angles_deg``; nulls floor at -300 dB.

    Returns an array of shape (len(angles), 2) with columns (angle, gain_db).
    """
    angles = np.asarray(angles_deg, dtype=float)
    sign = -1.0 if steering.sense is Sense.DL else 1.0
    m = np.arange(steering.size)
    phases = np.exp(sign * 2j * np.pi * steering.spacing_wl * np.outer(np.cos(np.radians(angles)), m))
    gain = np.abs(phases @ steering.weights) ** 2
    gain_db = 10 * np.log10(np.maximum(gain, 1e-30))
    return np.column_stack([angles, gain_db])


def first_null_beamwidth(pattern, steer_deg):
    """Width in degrees between the first pattern minima either side of the peak.

    ``pattern`` is the (angle, gain_db) array from :func:`beampattern` on a
    monotone grid. Each side walks outward from the sample nearest
    ``steer_deg`` while the gain keeps falling; a side that reaches the grid
    edge uses the edge angle.
    """
    angles, gain = pattern[:, 0], pattern[:, 1]
    k = int(np.argmin(np.abs(angles - steer_deg)))
    lo = k
    while lo > 0 and gain[lo - 1] < gain[lo]:
        lo -= 1
    hi = k
    while hi < len(gain) - 1 and gain[hi + 1] < gain[hi]:
        hi += 1
    return float(angles[hi] - angles[lo])


def write_beampattern_csv(path, pattern):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["angle_deg", "gain_db"])
        for angle, gain in pattern:
            writer.writerow([repr(float(angle)), repr(float(gain))])
