import json
from pathlib import Path

import numpy as np
import pytest

from dispo.data.trajectory import Trajectory
from dispo.policy import DiSPoConfig, DiSPoModel


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow end-to-end tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def user_filesystem(tmp_path):
    base_dir = Path(tmp_path)
    run_dir = base_dir / "run"
    run_dir.mkdir(parents=True, exist_ok=True)
    config_data = {"seed": 3, "model": {"d_model": 8, "n_state": 4, "n_block": 2}}
    with open(base_dir / "run.json", "w") as f:
        json.dump(config_data, f)
    yield tmp_path


@pytest.fixture
def tiny_config():
    return DiSPoConfig(
        d_model=8,
        n_state=4,
        n_block=2,
        obs_horizon=1,
        action_horizon=2,
        diffusion_steps=2,
        d_obs=3,
        d_act=2,
    )


@pytest.fixture
def tiny_model(tiny_config):
    return DiSPoModel(tiny_config, rng=np.random.default_rng(0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def line_trajectory():
    """Ten samples at rate 0.5 moving along x with constant velocity."""

    def _make(n=10, rate=0.5, task="side_tapping"):
        t = np.arange(n, dtype=np.float64)
        obs = np.stack([t, -t, np.zeros(n)], axis=1)
        act = np.stack([t + 1.0, -(t + 1.0)], axis=1)
        return Trajectory(task, rate, obs, act, metadata={"seed": 0})

    return _make
