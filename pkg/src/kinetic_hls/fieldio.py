"""Field serialisation: a flat little-endian binary container and CSV.

Binary layout (all little-endian)::

    magic     8 bytes  b"KHLSFLD1"
    version   uint32   (currently 1)
    d_x       uint32
    n_x       uint32
    n         uint32
    R         float64
    L         float64
    n_t       uint32
    reserved  uint32
    times     n_t x float64
    payload   n_t * n_x * n^3 x float64, lexicographic (t, x, v1, v2, v3)
"""
from __future__ import annotations

import csv
import hashlib
import io
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .grids import (DistributionField, PhaseSpaceField, SpatialGrid, Trajectory,
                    VelocityGrid)

MAGIC = b"KHLSFLD1"
VERSION = 1
_HEADER = struct.Struct("<8sIIIIddII")
CSV_MAX_NODES = 20_000


def _as_traj(obj) -> Trajectory:
    if isinstance(obj, Trajectory):
        return obj
    if isinstance(obj, PhaseSpaceField):
        return Trajectory(obj.space, obj.grid, [obj.t], obj.values[None])
    if isinstance(obj, DistributionField):
        return Trajectory(SpatialGrid(), obj.grid, [0.0], obj.values[None, None])
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_field(path, obj) -> None:
    tr = _as_traj(obj)
    buf = io.BytesIO()
    buf.write(_HEADER.pack(MAGIC, VERSION, tr.space.d_x, tr.space.n_x, tr.grid.n,
                           tr.grid.R, tr.space.L, tr.n_t, 0))
    buf.write(np.ascontiguousarray(tr.times, dtype="<f8").tobytes())
    buf.write(np.ascontiguousarray(tr.values, dtype="<f8").tobytes())
    Path(path).write_bytes(buf.getvalue())


def read_field(path) -> Trajectory:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ConfigurationError(f"{path}: truncated field header", "field")
    magic, ver, d_x, n_x, n, R, L, n_t, _ = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ConfigurationError(f"{path}: bad magic {magic!r}", "field")
    if ver != VERSION:
        raise ConfigurationError(f"{path}: unsupported container version {ver}", "field")
    off = _HEADER.size
    times = np.frombuffer(data, "<f8", n_t, off)
    off += 8 * n_t
    count = n_t * n_x * n ** 3
    if len(data) != off + 8 * count:
        raise ConfigurationError(f"{path}: payload size mismatch", "field")
    vals = np.frombuffer(data, "<f8", count, off).copy()
    space = SpatialGrid(int(d_x), float(L), int(n_x)) if d_x else SpatialGrid()
    return Trajectory(space, VelocityGrid(float(R), int(n)), times.copy(), vals)


def read_distribution(path) -> DistributionField:
    tr = read_field(path)
    return DistributionField(tr.grid, tr.values[0, 0])


def metadata_block(meta: dict) -> str:
    return "".join(f"# {k}: {meta[k]}\n" for k in meta)


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def format_csv(header, rows, meta: dict | None = None) -> str:
    """CSV text with a header row and a trailing '#' metadata block.

    Floats are written with ``repr`` so identical inputs give identical bytes.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    text = buf.getvalue()
    if meta:
        text += metadata_block(meta)
    return text


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def field_to_csv(obj, meta: dict | None = None) -> str:
    tr = _as_traj(obj)
    nodes = tr.values.size
    if nodes > CSV_MAX_NODES:
        raise ConfigurationError(f"CSV export limited to {CSV_MAX_NODES} values, field has {nodes}", "out.format")
    g = tr.grid
    pts = g.points()
    rows = []
    for k, t in enumerate(tr.times):
        for j, x in enumerate(tr.space.axis):
            vals = tr.values[k, j].ravel()
            for i in range(pts.shape[0]):
                rows.append((float(t), float(x), *map(float, pts[i]), float(vals[i])))
    return format_csv(["t", "x", "v1", "v2", "v3", "value"], rows, meta)
