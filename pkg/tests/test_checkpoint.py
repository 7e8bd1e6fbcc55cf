import json
import re

import numpy as np
import pytest
from freezegun import freeze_time

from dispo.checkpoint import BLOB, FORMAT, MANIFEST, load_checkpoint, read_manifest, save_checkpoint
from dispo.data.normalizer import Normalizer
from dispo.errors import CheckpointMismatchError


@pytest.fixture
def saved(tmp_path, mocker, tiny_model, line_trajectory):
    tiny_model.normalizer = Normalizer.fit([line_trajectory()])
    mocker.patch("importlib.metadata.version", return_value="3.3.0")
    with freeze_time("2012-01-14"):
        directory = save_checkpoint(tmp_path / "ckpt", tiny_model, extra={"task": "side_tapping", "epoch": 4})
    return directory, tiny_model


def _edit_manifest(directory, **changes):
    manifest = json.loads((directory / MANIFEST).read_text())
    manifest.update(changes)
    (directory / MANIFEST).write_text(json.dumps(manifest))
    return manifest


def test_save_checkpoint_manifest(saved):
    directory, model = saved
    manifest = read_manifest(directory)
    assert manifest["format"] == FORMAT
    assert manifest["creation_time"] == "2012-01-14T00:00:00"
    assert manifest["package_info"] == {"numpy": "3.3.0", "scipy": "3.3.0", "dispo": "3.3.0"}
    assert manifest["extra"] == {"task": "side_tapping", "epoch": 4}
    assert manifest["config"] == model.config.to_dict()
    assert [entry["name"] for entry in manifest["params"]] == list(model.parameters())
    total = sum(entry["nbytes"] for entry in manifest["params"])
    assert (directory / BLOB).stat().st_size == total
    assert total == 4 * sum(tensor.data.size for tensor in model.parameters().values())


def test_load_checkpoint_round_trip(saved):
    directory, model = saved
    restored, manifest = load_checkpoint(directory)
    assert restored.config == model.config
    assert restored.normalizer.to_dict() == model.normalizer.to_dict()
    for name, tensor in model.parameters().items():
        expected = tensor.data.astype(np.float32).astype(np.float64)
        assert np.array_equal(restored.parameters()[name].data, expected), name
    assert manifest["extra"]["epoch"] == 4


def test_load_checkpoint_format_mismatch(saved):
    directory, _ = saved
    _edit_manifest(directory, format="dispo-checkpoint-0")
    expected = "Checkpoint mismatch on 'format': task needs dispo-checkpoint-1, checkpoint has dispo-checkpoint-0."
    with pytest.raises(CheckpointMismatchError, match=re.escape(expected)):
        load_checkpoint(directory)


def test_load_checkpoint_schedule_mismatch(saved):
    directory, _ = saved
    manifest = json.loads((directory / MANIFEST).read_text())
    schedule = dict(manifest["schedule"], kind="linear", alpha_bars=[1.0, 0.9, 0.8])
    _edit_manifest(directory, schedule=schedule)
    with pytest.raises(CheckpointMismatchError, match=re.escape("Checkpoint mismatch on 'schedule'")):
        load_checkpoint(directory)


def test_load_checkpoint_truncated_blob(saved):
    directory, _ = saved
    blob = (directory / BLOB).read_bytes()
    (directory / BLOB).write_bytes(blob[:-4])
    last = read_manifest(directory)["params"][-1]
    size = len(blob)
    expected = (
        f"Checkpoint mismatch on '{last['name']}': task needs {size} bytes, checkpoint has {size - 4} bytes."
    )
    with pytest.raises(CheckpointMismatchError, match=re.escape(expected)):
        load_checkpoint(directory)


def test_load_checkpoint_unknown_parameter(saved):
    directory, _ = saved
    manifest = json.loads((directory / MANIFEST).read_text())
    params = manifest["params"]
    params[0] = dict(params[0], name="head.extra")
    _edit_manifest(directory, params=params)
    with pytest.raises(ValueError, match=re.escape("Parameter names differ.")):
        load_checkpoint(directory)
