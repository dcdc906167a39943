import numpy as np
import pytest

from trajtail.core import Trajectory, save_trajectory


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def write_trajectory(tmp_path):
    def _write(points, name="traj.csv"):
        path = tmp_path / name
        save_trajectory(Trajectory(np.asarray(points, dtype=float)), path)
        return path

    return _write
