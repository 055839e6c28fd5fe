"""Tx/Rx panel layout and the linear sub-array index mappings.

Antennas on each 8x8 panel are numbered 1..64 row-major starting at the
top-left element. Linear sub-arrays run down a column, so consecutive
elements of a sub-array differ by ``cols`` in index.
"""

from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConfigError, GeometryError

SPEED_OF_LIGHT = 299_792_458.0  # m/s


class SubArrayKind(str, Enum):
    LIN4 = "lin4"
    LIN8 = "lin8"

    @property
    def size(self):
        return 4 if self is SubArrayKind.LIN4 else 8

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"unknown sub-array kind {value!r}; use lin4 or lin8") from None


class Panel(str, Enum):
    TX = "tx"
    RX = "rx"


@dataclass(frozen=True)
class ArrayGeometry:
    rows: int = 8
    cols: int = 8
    spacing_wl: float = 0.5
    tx_rx_gap_m: float = 0.1
    carrier_hz: float = 3.5e9

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise GeometryError(f"panel must have at least one row and column, got {self.rows}x{self.cols}")
        if not self.spacing_wl > 0:
            raise GeometryError(f"spacing_wl must be positive, got {self.spacing_wl}")
        if not self.tx_rx_gap_m >= 0:
            raise GeometryError(f"tx_rx_gap_m must be non-negative, got {self.tx_rx_gap_m}")
        if not self.carrier_hz > 0:
            raise GeometryError(f"carrier_hz must be positive, got {self.carrier_hz}")

    @property
    def num_elements(self):
        return self.rows * self.cols

    @property
    def pitch_m(self):
        """Element pitch in meters at the carrier frequency."""
        return self.spacing_wl * SPEED_OF_LIGHT / self.carrier_hz

    @property
    def rx_offset_m(self):
        # one panel width (outer element centers) plus the isolation gap
        return (self.cols - 1) * self.pitch_m + self.tx_rx_gap_m

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"rows", "cols", "spacing_wl", "tx_rx_gap_m", "carrier_hz"}
        if unknown:
            raise ConfigError(f"unknown geometry keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class SubArraySpec:
    kind: SubArrayKind
    index: int
    elements: tuple

    @classmethod
    def of(cls, kind, index):
        kind = SubArrayKind.parse(kind)
        return cls(kind, int(index), subarray_elements(kind, index))

    @property
    def zero_based(self):
        return np.asarray(self.elements) - 1


def subarray_count(kind):
    """Number of disjoint linear sub-arrays of ``kind`` on an 8x8 panel."""
    return 16 if SubArrayKind.parse(kind) is SubArrayKind.LIN4 else 8


def subarray_elements(kind, index):
    """1-based antenna indices of sub-array ``index`` (1-based), column-major order.

    Lin4 sub-arrays 1..8 cover the upper half of columns 1..8 and 9..16 the
    lower half; Lin8 sub-array ``s`` is the full column ``s``.
    """
    return _subarray_elements(SubArrayKind.parse(kind), _check_index(kind, index))


def _check_index(kind, index):
    count = subarray_count(kind)
    if int(index) != index or not 1 <= index <= count:
        raise IndexError(f"sub-array index {index} out of range; valid span is 1..{count}")
    return int(index)


@lru_cache(maxsize=None)
def _subarray_elements(kind, index):
    cols = 8
    if kind is SubArrayKind.LIN8:
        return tuple(index + cols * r for r in range(8))
    col = (index - 1) % cols + 1
    half = (index - 1) // cols
    return tuple(col + cols * (4 * half + r) for r in range(4))


def element_position(panel, antenna_index, geometry=None):
    """Cartesian position (x, y, z) in meters of a 1-based antenna index.

    The Tx panel's element 1 sits at the origin; rows grow along +y and
    columns along +x. The Rx panel is the same grid shifted along +x.
    """
    geometry = geometry or ArrayGeometry()
    n = geometry.num_elements
    if int(antenna_index) != antenna_index or not 1 <= antenna_index <= n:
        raise IndexError(f"antenna index {antenna_index} out of range; valid span is 1..{n}")
    row, col = divmod(int(antenna_index) - 1, geometry.cols)
    pitch = geometry.pitch_m
    x = col * pitch
    if Panel(panel) is Panel.RX:
        x += geometry.rx_offset_m
    return np.array([x, row * pitch, 0.0])


def panel_positions(panel, geometry=None):
    """All element positions of a panel, shape (rows*cols, 3), index order."""
    geometry = geometry or ArrayGeometry()
    k = np.arange(geometry.num_elements)
    row, col = np.divmod(k, geometry.cols)
    pos = np.zeros((k.size, 3))
    pos[:, 0] = col * geometry.pitch_m
    pos[:, 1] = row * geometry.pitch_m
    if Panel(panel) is Panel.RX:
        pos[:, 0] += geometry.rx_offset_m
    return pos
