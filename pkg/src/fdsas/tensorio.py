"""Binary reader/writer for SI channel tensors.

Layout, all little-endian::

    offset  size  field
    0       8     magic b"SICHTNSR"
    8       4     u32 version (1)
    12      4     u32 rx_count
    16      4     u32 tx_count
    20      4     u32 freq_count
    24      8     f64 f_start_hz
    32      8     f64 f_stop_hz
    40      ...   freq_count x tx_count x rx_count complex values,
                  each stored as (f64 re, f64 im); rx varies fastest

Provenance goes to an optional JSON sidecar next to the file
(``<path>.json``), never into the binary payload.
"""

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .channel import FrequencyGrid, SIChannelTensor
from .errors import ConfigError, FormatError, TruncationError

MAGIC = b"SICHTNSR"
VERSION = 1
_HEADER = struct.Struct("<8sIIIIdd")
HEADER_SIZE = _HEADER.size  # 40
_ITEM = np.dtype("<c16")


def file_size(rx_count, tx_count, freq_count):
    return HEADER_SIZE + _ITEM.itemsize * rx_count * tx_count * freq_count


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def save(tensor, path, sidecar=True):
    """Write ``tensor`` to ``path``; returns the SHA-256 of the written file."""
    path = Path(path)
    n_rx, n_tx, n_f = tensor.shape
    header = _HEADER.pack(
        MAGIC, VERSION, n_rx, n_tx, n_f, tensor.grid.f_start_hz, tensor.grid.f_stop_hz
    )
    payload = np.ascontiguousarray(tensor.data.transpose(2, 1, 0), dtype=_ITEM)
    digest = hashlib.sha256(header)
    with open(path, "wb") as fh:
        fh.write(header)
        for block in payload:
            raw = block.tobytes()
            digest.update(raw)
            fh.write(raw)
    checksum = digest.hexdigest()
    if sidecar:
        meta = {"sha256": checksum, "shape": [n_rx, n_tx, n_f], "provenance": tensor.provenance}
        sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return checksum


def load(path):
    """Read a tensor written by :func:`save`.

    Raises
    ------
    FormatError
        Bad magic, unsupported version, invalid dimensions or grid, or
        trailing bytes. ``offset`` points at the offending field.
    TruncationError
        The file ends before the header or payload is complete.
    """
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER_SIZE:
        raise TruncationError(HEADER_SIZE, len(raw), offset=len(raw))
    magic, version, n_rx, n_tx, n_f, f_start, f_stop = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=8)
    for offset, count, name in ((12, n_rx, "rx_count"), (16, n_tx, "tx_count"), (20, n_f, "freq_count")):
        if count == 0:
            raise FormatError(f"{name} is zero", offset=offset)
    try:
        grid = FrequencyGrid(f_start, f_stop, n_f)
    except ConfigError as exc:
        raise FormatError(f"invalid frequency grid: {exc}", offset=24) from None

    expected = file_size(n_rx, n_tx, n_f)
    if len(raw) < expected:
        raise TruncationError(expected, len(raw), offset=len(raw))
    if len(raw) > expected:
        raise FormatError(
            f"dimension mismatch: header implies {expected} bytes but file has {len(raw)}",
            offset=expected,
        )
    payload = np.frombuffer(raw, dtype=_ITEM, offset=HEADER_SIZE).reshape(n_f, n_tx, n_rx)
    if not np.all(np.isfinite(payload)):
        bad = int(np.flatnonzero(~np.isfinite(payload.ravel()))[0])
        raise FormatError("non-finite channel entry", offset=HEADER_SIZE + bad * _ITEM.itemsize)
    data = payload.transpose(2, 1, 0).astype(np.complex128)

    provenance = {"source": "file", "path": str(path), "sha256": hashlib.sha256(raw).hexdigest()}
    side = sidecar_path(path)
    if side.exists():
        provenance["sidecar"] = json.loads(side.read_text()).get("provenance", {})
    return SIChannelTensor(data, grid, provenance)
