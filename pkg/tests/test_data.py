import re

import numpy as np
import pytest

from dispo.data.augment import AugmentConfig, WindowDataset, make_training_batch
from dispo.data.normalizer import Normalizer, denormalize, normalize
from dispo.data.serialization import read_csv, read_jsonl, read_trajectories, write_csv, write_trajectories
from dispo.data.trajectory import (
    Trajectory,
    coarsify_demo,
    extract_window,
    resample_trajectory,
    window_anchors,
)
from dispo.errors import UnsupportedTypeError


def _ramp(n, rate=1.0):
    t = np.arange(n, dtype=np.float64)
    return Trajectory("drawing_arc", rate, np.stack([t, 2 * t], axis=1), np.stack([t, -t], axis=1))


params_resample_trajectory = [
    # C1: same rate is the identity
    ([5, 1.0], [[0, 0], [1, -1], [2, -2], [3, -3], [4, -4]]),
    # C2: half rate keeps every other knot
    ([5, 0.5], [[0, 0], [2, -2], [4, -4]]),
    # C3: a rate that does not divide the span floors the count
    ([6, 0.3], [[0, 0], [10 / 3, -10 / 3]]),
]


@pytest.mark.parametrize("inputs, expected", params_resample_trajectory)
def test_resample_trajectory(inputs, expected):
    actual = resample_trajectory(_ramp(inputs[0]), inputs[1])
    assert np.allclose(actual.act, expected)
    assert actual.rate == inputs[1]
    assert len(actual.obs) == len(expected)


def test_resample_trajectory_bad():
    with pytest.raises(ValueError, match=re.escape("Cannot resample at 2.0 > 1.0")):
        resample_trajectory(_ramp(5), 2.0)
    with pytest.raises(ValueError, match=re.escape("Sample rate must be positive, got 0.")):
        resample_trajectory(_ramp(5), 0)


params_coarsify_demo = [
    # C1: stride 1 keeps every sample
    ([1, 0], [list(range(10)), list(range(10))]),
    # C2: stride 2 from offset 1, actions point one coarse step ahead
    ([2, 1], [[1, 3, 5, 7, 9], [2, 4, 6, 8, 9]]),
    # C3: stride 3 from offset 0
    ([3, 0], [[0, 3, 6, 9], [2, 5, 8, 9]]),
]


@pytest.mark.parametrize("inputs, expected", params_coarsify_demo)
def test_coarsify_demo(inputs, expected):
    stride, offset = inputs
    actual = coarsify_demo(_ramp(10), stride, offset=offset)
    assert np.array_equal(actual.obs[:, 0], expected[0])
    assert np.array_equal(actual.act[:, 0], expected[1])
    assert actual.rate == pytest.approx(1.0 / stride)
    assert actual.metadata == {"stride": stride, "offset": offset}


def test_coarsify_demo_random_offset():
    demos = [coarsify_demo(_ramp(10), 3, rng=np.random.default_rng(seed)) for seed in range(30)]
    offsets = {demo.metadata["offset"] for demo in demos}
    assert offsets == {0, 1, 2}
    with pytest.raises(ValueError, match=re.escape("Trajectory of length 10 is too short for stride 10.")):
        coarsify_demo(_ramp(10), 10)


params_window_anchors = [
    # C1: single rate
    ([10, 1, 2, 1], list(range(10))),
    # C2: doubled spacing needs one more native step
    ([10, 1, 2, 2], list(range(9))),
    # C3: longer tail
    ([10, 2, 5, 2], list(range(5))),
]


@pytest.mark.parametrize("inputs, expected", params_window_anchors)
def test_window_anchors(inputs, expected):
    n, obs_horizon, action_horizon, multiplier = inputs
    assert window_anchors(_ramp(n), obs_horizon, action_horizon, multiplier).tolist() == expected


def test_extract_window(line_trajectory):
    traj = line_trajectory()
    obs, act = extract_window(traj, 4, 1, 2)
    assert np.allclose(obs, [[4, -4, 0]])
    assert np.allclose(act, [[4, -4], [5, -5]])

    _, act = extract_window(traj, 4, 1, 2, multiplier=2)
    assert np.allclose(act, [[4, -4], [6, -6]])

    # the observation window repeats the earliest sample before the start
    obs, _ = extract_window(traj, 0, 2, 3)
    assert np.allclose(obs, [[0, 0, 0], [0, 0, 0]])

    with pytest.raises(ValueError, match=re.escape("Window at 9 with multiplier 2 runs past the trajectory end.")):
        extract_window(traj, 9, 1, 2, multiplier=2)


params_normalizer = [
    # C1: joint angle at the fitted maximum
    (["obs", [2.0, 4.0]], [0.0, 0.0]),
    # C2: joint angle at the fitted minimum
    (["obs", [0.0, 0.0]], [-1.0, -1.0]),
    # C3: action at the midpoint of its range
    (["act", [1.0, -1.0]], [0.0, 0.0]),
    # C4: actions at the bounds
    (["act", [2.0, 0.0]], [1.0, 1.0]),
]


@pytest.mark.parametrize("inputs, expected", params_normalizer)
def test_normalizer(inputs, expected):
    normalizer = Normalizer.fit([_ramp(3)])
    actual = normalize(np.array(inputs[1]), normalizer, kind=inputs[0])
    assert np.allclose(actual, expected)
    assert np.allclose(denormalize(actual, normalizer, kind=inputs[0]), inputs[1])
    assert normalizer.n_clamped == 0


def test_normalizer_clamps_and_degenerate_dims():
    normalizer = Normalizer([0.0, 0.0], [1.0, 1.0], [-1.0, 0.0], [1.0, 0.0], act_range=(-1.0, 1.0))
    clamped_wmsg = "2 observation values outside the fitted bounds were clamped."
    with pytest.warns(UserWarning, match=re.escape(clamped_wmsg)):
        clamped = normalizer.normalize_obs([[2.0, -1.0], [0.5, 0.5]])
    assert np.allclose(clamped, [[0.0, -1.0], [-0.5, -0.5]])
    assert normalizer.n_clamped == 2
    with pytest.warns(UserWarning, match=re.escape("Action dimensions [1] have identical minimum and maximum")):
        degenerate = Normalizer.fit([Trajectory("side_tapping", 1.0, [[0.0], [1.0]], [[0.0, 3.0], [1.0, 3.0]])])
    assert np.allclose(degenerate.normalize_act([[0.5, 3.0]]), [[0.0, 0.0]])
    assert np.allclose(degenerate.denormalize_act([[0.0, 0.0]]), [[0.5, 3.0]])
    with pytest.raises(ValueError, match=re.escape("kind must be 'act' or 'obs', got 'both'.")):
        normalize([0.0], degenerate, kind="both")


def test_normalizer_from_dict():
    normalizer = Normalizer.fit([_ramp(4)])
    restored = Normalizer.from_dict(normalizer.to_dict())
    assert restored.to_dict() == normalizer.to_dict()
    assert np.allclose(restored.act_bounds[0], [0, -3])


def test_window_dataset(line_trajectory):
    dataset = WindowDataset([line_trajectory()], 1, 2)
    assert len(dataset) == 10
    window = dataset.window(4, multiplier=2)
    assert window.rate == pytest.approx(0.25)
    assert np.allclose(window.r_act, [1.0, 2.0])
    assert np.allclose(dataset.normalizer.denormalize_act(window.act), [[4, -4], [6, -6]])
    assert dataset.window(9, multiplier=2) is None


params_augment_config = [
    # C1: default builds one half-rate variant
    ({}, [2]),
    # C2: more variants
    ({"n_variants": 3}, [2, 3, 4]),
    # C3: classic single-rate training
    ({"n_variants": 0}, []),
    # C4: explicit divisors
    ({"rate_divisors": [3, 5]}, [3, 5]),
]


@pytest.mark.parametrize("inputs, expected", params_augment_config)
def test_augment_config(inputs, expected):
    config = AugmentConfig(**inputs)
    assert config.rate_divisors == expected
    assert config.n_variants == len(expected)


def test_make_training_batch(line_trajectory):
    dataset = WindowDataset([line_trajectory(), line_trajectory(6)], 1, 2)
    rng = np.random.default_rng(0)
    with pytest.warns(UserWarning, match="variants were too short"):
        batch = make_training_batch(dataset, AugmentConfig(batch_size=16), rng)
    n_rows = 16 + 16 - batch.skipped
    assert batch.obs.shape == (n_rows, 1, 3)
    assert batch.actions.shape == (n_rows, 2, 2)
    assert batch.labels.shape == (n_rows, 4)
    assert batch.step_scale.values.shape == (n_rows, 4)
    assert set(np.unique(batch.step_scale.action_factors[:, -1])) <= {1.0, 2.0}
    assert np.all(np.bincount(batch.groups) <= 2)
    for window, labels in zip(batch.windows, batch.labels):
        assert np.allclose(dataset.normalizer.denormalize_act(window.act).reshape(-1), labels)


def test_make_training_batch_single_rate(line_trajectory):
    dataset = WindowDataset([line_trajectory()], 1, 2)
    batch = make_training_batch(dataset, AugmentConfig(batch_size=4, n_variants=0), np.random.default_rng(0))
    assert len(batch.windows) == 4
    assert len(set(batch.groups.tolist())) == 4
    assert np.all(batch.step_scale.values == 1.0)


def test_trajectories_jsonl(tmp_path, line_trajectory):
    trajectories = [line_trajectory(), line_trajectory(4, rate=0.25)]
    target = tmp_path / "demos.jsonl"
    assert write_trajectories(target, trajectories) == 2
    assert read_trajectories(target) == trajectories
    assert len(target.read_text().splitlines()) == 2


def test_jsonl_exceptions(tmp_path):
    with pytest.raises(
        UnsupportedTypeError,
        match=re.escape("The file demos.json is not supported. Supported file types include: .jsonl."),
    ):
        write_trajectories(tmp_path / "demos.json", [])
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.warns(RuntimeWarning, match="Loaded no records from empty.jsonl."):
        assert read_jsonl(empty) == []


def test_csv_rounding(tmp_path):
    target = tmp_path / "out" / "metrics.csv"
    write_csv(target, ["epoch", "L"], [[1, np.float64(1.0 / 3.0)], [2, ""]])
    assert read_csv(target) == [{"epoch": "1", "L": "0.333333333"}, {"epoch": "2", "L": ""}]
