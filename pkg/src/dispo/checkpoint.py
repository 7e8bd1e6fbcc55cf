#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Checkpoints: a JSON manifest plus one little-endian float32 blob.

``manifest.json`` holds the model config, the noise schedule, the frozen normalizer, package versions, the
creation time and one entry ``{name, shape, dtype, offset, nbytes}`` per parameter into ``params.bin``.
"""

import datetime
import json
from pathlib import Path

import numpy as np

from dispo.data.normalizer import Normalizer
from dispo.errors import CheckpointMismatchError
from dispo.policy import DiSPoConfig, DiSPoModel
from dispo.tools import get_package_info

FORMAT = "dispo-checkpoint-1"
MANIFEST = "manifest.json"
BLOB = "params.bin"
DTYPE = "<f4"


def save_checkpoint(directory, model, extra=None):
    """Write ``model`` into ``directory`` (created if needed); ``extra`` is stored verbatim in the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    offset = 0
    with open(directory / BLOB, "wb") as blob:
        for name, tensor in model.parameters().items():
            raw = np.ascontiguousarray(tensor.data, dtype=DTYPE).tobytes()
            blob.write(raw)
            entry = {"name": name, "shape": list(tensor.shape), "dtype": "float32"}
            entries.append(dict(entry, offset=offset, nbytes=len(raw)))
            offset += len(raw)
    manifest = {
        "format": FORMAT,
        "config": model.config.to_dict(),
        "schedule": model.schedule.to_dict(),
        "normalizer": None if model.normalizer is None else model.normalizer.to_dict(),
        "params": entries,
        "extra": extra or {},
        "creation_time": datetime.datetime.now().isoformat(),
    }
    manifest.update(get_package_info(["numpy", "scipy"]))
    with open(directory / MANIFEST, "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return directory


def read_manifest(directory):
    with open(Path(directory) / MANIFEST, "r") as f:
        manifest = json.load(f)
    if manifest.get("format") != FORMAT:
        raise CheckpointMismatchError("format", FORMAT, manifest.get("format"))
    return manifest


def load_checkpoint(directory):
    """Rebuild the model stored in ``directory``.

    Returns
    -------
    (DiSPoModel, dict):
        The model (with its normalizer) and the manifest.
    """
    directory = Path(directory)
    manifest = read_manifest(directory)
    config = DiSPoConfig.from_dict(manifest["config"])
    model = DiSPoModel(config)
    stored = manifest["schedule"]["alpha_bars"]
    if not np.allclose(stored, model.schedule.alpha_bars, rtol=0.0, atol=1e-12):
        raise CheckpointMismatchError("schedule", model.schedule.kind, manifest["schedule"]["kind"])
    blob = (directory / BLOB).read_bytes()
    arrays = {}
    for entry in manifest["params"]:
        end = entry["offset"] + entry["nbytes"]
        if end > len(blob):
            raise CheckpointMismatchError(entry["name"], f"{end} bytes", f"{len(blob)} bytes")
        values = np.frombuffer(blob[entry["offset"] : end], dtype=DTYPE)
        arrays[entry["name"]] = values.reshape(entry["shape"]).astype(np.float64)
    model.load_parameters(arrays)
    if manifest.get("normalizer") is not None:
        model.normalizer = Normalizer.from_dict(manifest["normalizer"])
    return model, manifest


# End of file
