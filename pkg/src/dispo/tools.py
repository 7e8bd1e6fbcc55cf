import importlib.metadata
import json
from copy import copy, deepcopy
from pathlib import Path


def clean_dict(obj):
    """
    Drop the entries of a run configuration that were left unset.

    Entries whose value is None are removed, nested sections are cleaned the same way, and other falsy values
    (0, False, empty strings) stay.

    Parameters
    ----------
    obj: dict
        The configuration to clean in place. None is treated as an empty configuration.

    Returns
    -------
    dict:
        ``obj`` without its unset entries.

    """
    obj = {} if obj is None else obj
    for key, value in copy(obj).items():
        if value is None:
            del obj[key]
        elif isinstance(value, dict):
            obj[key] = clean_dict(value)
    return obj


def load_config(file_path):
    """
    Read a run configuration written as JSON.

    Parameters
    ----------
    file_path: Path or str
        Location of the configuration file.

    Returns
    -------
    dict or None:
        The parsed configuration, None when there is no file at ``file_path``.

    """
    path = Path(file_path).resolve()
    if not path.is_file():
        return None
    with open(path, "r") as f:
        return json.load(f)


def deep_merge(*dicts):
    """
    Merge dictionaries left to right; later values win, nested dictionaries are merged key by key.

    Parameters
    ----------
    dicts: dict
        Dictionaries in increasing order of precedence. None entries are skipped.

    Returns
    -------
    dict:
        A new dictionary; the inputs are not modified.

    """
    merged = {}
    for d in dicts:
        for key, value in (d or {}).items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = deep_merge(merged[key], value)
            else:
                merged[key] = deepcopy(value)
    return merged


def get_package_info(package_names, metadata=None):
    """
    Record installed versions of the given packages and of dispo itself.

    Versions go under ``metadata["package_info"]`` and replace versions already recorded there for the same
    package. Checkpoint manifests carry this record.

    Parameters
    ----------
    package_names : str or list of str
        Distributions to look up in addition to dispo.
    metadata : dict, optional
        Dictionary to extend. A new one is created when omitted.

    Returns
    -------
    dict:
        ``metadata`` with its ``package_info`` section filled in.

    """
    metadata = {} if metadata is None else metadata
    names = [package_names] if isinstance(package_names, str) else list(package_names)
    versions = metadata.setdefault("package_info", {})
    for name in names + ["dispo"]:
        versions[name] = importlib.metadata.version(name)
    return metadata
