"""File formats: trajectory CSV, snapshot and basis binary containers.

Binary layout (all integers uint64, floats float64, little-endian):

snapshot container (magic ``SNPS``, version 1):
    magic[4] version dim ns n_params p_dim nt
    params   (n_params * p_dim floats, row-major)
    times    (nt floats)
    col_param (ns uint32)  col_time (ns uint32)
    data     (dim * ns floats, column-major)

basis container (magic ``RBAS``, version 1):
    magic[4] version dim two_k kind_code
    data     (dim * two_k floats, column-major)

kind codes: 1 orthonormal-symplectic, 2 symplectic-nonorthonormal,
3 orthonormal-nonsymplectic.
"""

import hashlib
import json
import struct

import numpy as np

from .integrate import SnapshotMatrix, Trajectory
from .symplectic import (
    KIND_ORTHONORMAL,
    KIND_ORTHOSYMPLECTIC,
    KIND_SYMPLECTIC,
    ReducedBasis,
)

__all__ = [
    "StorageError",
    "write_trajectory_csv",
    "write_snapshots",
    "read_snapshots",
    "write_basis",
    "read_basis",
    "file_sha256",
    "write_manifest",
]

_SNAP_MAGIC = b"SNPS"
_BASIS_MAGIC = b"RBAS"
_VERSION = 1

_KIND_CODE = {
    KIND_ORTHOSYMPLECTIC: 1,
    KIND_SYMPLECTIC: 2,
    KIND_ORTHONORMAL: 3,
}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


class StorageError(IOError):
    """Container file is malformed or cannot be written."""


def _f64(a):
    return np.ascontiguousarray(a, dtype="<f8")


def write_trajectory_csv(path, trajectory):
    """One row per time step: t, x_1 ... x_dim."""
    if not isinstance(trajectory, Trajectory):
        raise TypeError("expected a Trajectory")
    dim = trajectory.dim
    header = "t," + ",".join(f"x{i + 1}" for i in range(dim))
    table = np.vstack((trajectory.times, trajectory.states)).T
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in table:
            fh.write(",".join(f"{v:.17e}" for v in row) + "\n")


def write_snapshots(path, snapshots):
    if not isinstance(snapshots, SnapshotMatrix):
        raise TypeError("expected a SnapshotMatrix")
    n_params, p_dim = snapshots.params.shape
    with open(path, "wb") as fh:
        fh.write(_SNAP_MAGIC)
        fh.write(struct.pack(
            "<6Q", _VERSION, snapshots.dim, snapshots.ns,
            n_params, p_dim, len(snapshots.times),
        ))
        fh.write(_f64(snapshots.params).tobytes())
        fh.write(_f64(snapshots.times).tobytes())
        fh.write(np.ascontiguousarray(
            snapshots.col_param, dtype="<u4").tobytes())
        fh.write(np.ascontiguousarray(
            snapshots.col_time, dtype="<u4").tobytes())
        fh.write(np.asfortranarray(snapshots.data, dtype="<f8")
                 .tobytes(order="F"))


def read_snapshots(path):
    with open(path, "rb") as fh:
        if fh.read(4) != _SNAP_MAGIC:
            raise StorageError(f"{path}: not a snapshot container")
        version, dim, ns, n_params, p_dim, nt = struct.unpack(
            "<6Q", fh.read(48))
        if version != _VERSION:
            raise StorageError(f"{path}: unsupported version {version}")
        params = np.frombuffer(
            fh.read(8 * n_params * p_dim), "<f8").reshape(n_params, p_dim)
        times = np.frombuffer(fh.read(8 * nt), "<f8")
        col_param = np.frombuffer(fh.read(4 * ns), "<u4")
        col_time = np.frombuffer(fh.read(4 * ns), "<u4")
        data = np.frombuffer(fh.read(8 * dim * ns), "<f8").reshape(
            (dim, ns), order="F")
        if fh.read(1):
            raise StorageError(f"{path}: trailing bytes")
    return SnapshotMatrix(
        data=data.copy(), params=params.copy(),
        col_param=col_param.copy(), col_time=col_time.copy(),
        times=times.copy(),
    )


def write_basis(path, basis):
    if not isinstance(basis, ReducedBasis):
        raise TypeError("expected a ReducedBasis")
    V = basis.columns
    with open(path, "wb") as fh:
        fh.write(_BASIS_MAGIC)
        fh.write(struct.pack(
            "<4Q", _VERSION, V.shape[0], V.shape[1], _KIND_CODE[basis.kind]))
        fh.write(np.asfortranarray(V, dtype="<f8").tobytes(order="F"))


def read_basis(path):
    with open(path, "rb") as fh:
        if fh.read(4) != _BASIS_MAGIC:
            raise StorageError(f"{path}: not a basis container")
        version, dim, two_k, code = struct.unpack("<4Q", fh.read(32))
        if version != _VERSION:
            raise StorageError(f"{path}: unsupported version {version}")
        if code not in _CODE_KIND:
            raise StorageError(f"{path}: unknown basis kind code {code}")
        data = np.frombuffer(fh.read(8 * dim * two_k), "<f8").reshape(
            (dim, two_k), order="F")
        if fh.read(1):
            raise StorageError(f"{path}: trailing bytes")
    return ReducedBasis(columns=data.copy(), kind=_CODE_KIND[code])


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, container_path, snapshots):
    """JSON manifest with the container hash, dims and parameter table."""
    manifest = {
        "container": str(container_path),
        "sha256": file_sha256(container_path),
        "dim": int(snapshots.dim),
        "ns": int(snapshots.ns),
        "nt": int(len(snapshots.times)),
        "params": [list(map(float, row)) for row in snapshots.params],
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
