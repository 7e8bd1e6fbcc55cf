#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""JSON-lines and CSV readers and writers for demonstrations, episodes, metrics and features."""

import csv
import json
import pathlib
import warnings

import numpy

from dispo.data.trajectory import Trajectory
from dispo.errors import UnsupportedTypeError

supported_formats = [".jsonl"]
SIGNIFICANT_DIGITS = 9


def _round(value):
    """Numbers to 9 significant digits; numpy arrays and scalars become plain lists and floats."""
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    if isinstance(value, numpy.ndarray):
        return _round(value.tolist())
    if isinstance(value, (bool, numpy.bool_)):
        return bool(value)
    if isinstance(value, (int, numpy.integer)):
        return int(value)
    if isinstance(value, (float, numpy.floating)):
        return float(f"{float(value):.{SIGNIFICANT_DIGITS}g}")
    return value


def _check_suffix(filename):
    path = pathlib.Path(filename)
    if path.suffix not in supported_formats:
        raise UnsupportedTypeError(path.name, supported_formats)
    return path


def write_jsonl(filename, records):
    """Write one JSON object per line; returns the number of lines written."""
    path = _check_suffix(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w") as f:
        for record in records:
            f.write(json.dumps(_round(record)) + "\n")
            count += 1
    return count


def read_jsonl(filename):
    """Read every non-empty line as a JSON object."""
    path = _check_suffix(filename)
    with open(path, "r") as f:
        records = [json.loads(line) for line in f if line.strip()]
    if not records:
        warnings.warn(f"Loaded no records from {path.name}.", RuntimeWarning)
    return records


def write_trajectories(filename, trajectories):
    return write_jsonl(filename, (t.to_dict() for t in trajectories))


def read_trajectories(filename):
    return [Trajectory.from_dict(record) for record in read_jsonl(filename)]


def write_csv(filename, header, rows):
    """Write a header line and rows; floats are written with 9 significant digits."""
    path = pathlib.Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow(_round(list(row)))


def read_csv(filename):
    """Rows as dictionaries keyed by the header, values as strings."""
    with open(filename, "r", newline="") as f:
        return list(csv.DictReader(f))


def write_json(filename, data):
    path = pathlib.Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(_round(data), f, indent=2, sort_keys=True)
        f.write("\n")


# End of file
