"""Snapshot dump formats: plain-text CSV (canonical) and packed binary.

Both carry a header (t, nx, ny, dx, dy) followed by the row-major eps,
rho*u, rho*v interior arrays.  The binary variant is little-endian
float64 throughout (counts are stored as floats and cast back on read).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

_FIELDS = ("eps", "mom_x", "mom_y")


def write_snapshot_csv(path, t: float, eps: np.ndarray, mom_x: np.ndarray,
                       mom_y: np.ndarray, dx: float, dy: float) -> None:
    nx, ny = eps.shape
    with open(path, "w", newline="") as fh:
        fh.write("t,nx,ny,dx,dy\n")
        fh.write(f"{t:.17g},{nx},{ny},{dx:.17g},{dy:.17g}\n")
        for arr in (eps, mom_x, mom_y):
            for row in arr:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_snapshot_csv(path) -> dict:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["t", "nx", "ny", "dx", "dy"]:
            raise ConfigError(f"{path}: not a snapshot CSV")
        t, nx, ny, dx, dy = fh.readline().strip().split(",")
        nx, ny = int(nx), int(ny)
        values = np.loadtxt(fh, delimiter=",", ndmin=2)
    if values.shape != (3 * nx, ny):
        raise ConfigError(f"{path}: expected {3 * nx}x{ny} data rows, "
                          f"got {values.shape}")
    out = {"t": float(t), "nx": nx, "ny": ny, "dx": float(dx), "dy": float(dy)}
    for k, name in enumerate(_FIELDS):
        out[name] = values[k * nx:(k + 1) * nx]
    return out


def write_snapshot_bin(path, t: float, eps: np.ndarray, mom_x: np.ndarray,
                       mom_y: np.ndarray, dx: float, dy: float) -> None:
    nx, ny = eps.shape
    header = np.array([t, nx, ny, dx, dy], dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        for arr in (eps, mom_x, mom_y):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot_bin(path) -> dict:
    raw = np.fromfile(path, dtype="<f8")
    if raw.size < 5:
        raise ConfigError(f"{path}: truncated snapshot file")
    t, nx_f, ny_f, dx, dy = raw[:5]
    nx, ny = int(nx_f), int(ny_f)
    if raw.size != 5 + 3 * nx * ny:
        raise ConfigError(f"{path}: size mismatch for {nx}x{ny} snapshot")
    out = {"t": float(t), "nx": nx, "ny": ny, "dx": float(dx), "dy": float(dy)}
    for k, name in enumerate(_FIELDS):
        block = raw[5 + k * nx * ny: 5 + (k + 1) * nx * ny]
        out[name] = block.reshape(nx, ny)
    return out
