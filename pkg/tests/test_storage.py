import numpy as np
import pytest

from sympmor import (
    KIND_SYMPLECTIC,
    ReducedBasis,
    StorageError,
    Trajectory,
    read_basis,
    read_snapshots,
    snapshot_collect,
    standard_design,
    write_basis,
    write_snapshots,
    write_trajectory_csv,
)
from sympmor.storage import file_sha256, write_manifest


@pytest.fixture
def snapshots(small_lattice):
    design = standard_design(nt=4, sweep=(4,))
    return snapshot_collect(design, small_lattice.assemble)


def test_snapshot_roundtrip(tmp_path, snapshots):
    path = tmp_path / "snaps.snp"
    write_snapshots(path, snapshots)
    back = read_snapshots(path)
    assert np.array_equal(back.data, snapshots.data)
    assert np.array_equal(back.params, snapshots.params)
    assert np.array_equal(back.col_param, snapshots.col_param)
    assert np.array_equal(back.col_time, snapshots.col_time)
    assert np.array_equal(back.times, snapshots.times)


def test_snapshot_write_is_reproducible(tmp_path, snapshots):
    a, b = tmp_path / "a.snp", tmp_path / "b.snp"
    write_snapshots(a, snapshots)
    write_snapshots(b, snapshots)
    assert file_sha256(a) == file_sha256(b)


def test_manifest(tmp_path, snapshots):
    container = tmp_path / "snaps.snp"
    write_snapshots(container, snapshots)
    manifest = write_manifest(tmp_path / "m.json", container, snapshots)
    assert manifest["sha256"] == file_sha256(container)
    assert manifest["dim"] == snapshots.dim
    assert manifest["ns"] == snapshots.ns


def test_basis_roundtrip(tmp_path, rng):
    V = ReducedBasis(columns=np.diag([2.0, 0.5]), kind=KIND_SYMPLECTIC)
    path = tmp_path / "v.rbs"
    write_basis(path, V)
    back = read_basis(path)
    assert back.kind == V.kind
    assert np.array_equal(back.columns, V.columns)


def test_bad_magic(tmp_path):
    path = tmp_path / "junk.snp"
    path.write_bytes(b"NOPE" + b"\0" * 64)
    with pytest.raises(StorageError):
        read_snapshots(path)
    with pytest.raises(StorageError):
        read_basis(path)


def test_trailing_bytes_rejected(tmp_path, snapshots):
    path = tmp_path / "snaps.snp"
    write_snapshots(path, snapshots)
    with open(path, "ab") as fh:
        fh.write(b"\0")
    with pytest.raises(StorageError):
        read_snapshots(path)


def test_trajectory_csv(tmp_path):
    traj = Trajectory(states=np.arange(8.0).reshape(2, 4),
                      times=np.linspace(0.0, 1.0, 4))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, traj)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,x1,x2"
    assert len(lines) == 5
    row = [float(v) for v in lines[1].split(",")]
    assert row == [0.0, 0.0, 4.0]


def test_type_errors(tmp_path):
    with pytest.raises(TypeError):
        write_snapshots(tmp_path / "x.snp", np.zeros((2, 2)))
    with pytest.raises(TypeError):
        write_basis(tmp_path / "x.rbs", np.zeros((2, 2)))
    with pytest.raises(TypeError):
        write_trajectory_csv(tmp_path / "x.csv", np.zeros((2, 2)))
