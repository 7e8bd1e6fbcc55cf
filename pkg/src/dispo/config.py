#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Run configuration: built-in defaults, an optional JSON file and command-line overrides, merged in order."""

import json
import logging
import os
from pathlib import Path

from dispo.data.augment import AugmentConfig
from dispo.policy import DiSPoConfig
from dispo.tools import clean_dict, deep_merge, load_config

CONFIG_FILE = "config.json"
VERBOSITY_ENV = "DISPO_VERBOSITY"

DEFAULTS = {
    "task": "drawing_rectangle",
    "seed": 0,
    "model": {
        "d_model": 64,
        "n_state": 16,
        "n_block": 4,
        "obs_horizon": 2,
        "action_horizon": 5,
        "diffusion_steps": 25,
        "schedule": "squaredcos_cap_v2",
        "tau_rnc": 2.0,
        "mse_weight": 1.0,
        "rnc_weight": 1.0,
        "expand": 2,
        "conv_width": 4,
        "action_index": None,
        "clip_sample": True,
    },
    "optim": {"lr": 3e-4, "weight_decay": 1e-6, "betas": [0.9, 0.999], "eps": 1e-8, "batch_size": 64},
    "data": {"n_demos": 90, "stride": 2, "fine_rate": 1.0, "rate_divisors": [2]},
    "train": {"epochs": 200, "eval_every": 50, "eval_episodes": 10, "select_step_scale": 1.0, "ema_decay": 0.0},
    "eval": {
        "episodes": 50,
        "step_scales": [1.0, 0.5],
        "ablation": "none",
        "obs_mode": "native",
        "workers": 1,
        "max_steps": None,
    },
}

missing_config_emsg = "Configuration file {path} does not exist."


def _check_keys(values, reference, where="config"):
    unknown = sorted(set(values) - set(reference))
    if unknown:
        raise ValueError(f"Unknown settings in {where}: {unknown}.")
    for key, value in values.items():
        if isinstance(reference[key], dict):
            if not isinstance(value, dict):
                raise ValueError(f"Section '{key}' in {where} must be an object.")
            _check_keys(value, reference[key], where=f"{where}.{key}")


def load_run_config(config_file=None, overrides=None):
    """
    Merge the defaults, a JSON configuration file and overrides.

    Parameters
    ----------
    config_file: str or Path
        Optional JSON file with any subset of the settings.
    overrides: dict
        Nested overrides, typically from command-line flags; None values are ignored.

    Returns
    -------
    dict:
        The effective configuration.
    """
    file_config = {}
    if config_file is not None:
        file_config = load_config(config_file)
        if file_config is None:
            raise ValueError(missing_config_emsg.format(path=config_file))
    file_config = clean_dict(file_config)
    overrides = clean_dict(overrides)
    _check_keys(file_config, DEFAULTS, where=str(config_file))
    _check_keys(overrides, DEFAULTS, where="flags")
    config = deep_merge(DEFAULTS, file_config, overrides)
    model_config(config)
    augment_config(config)
    return config


def model_config(config, d_obs=None, d_act=None):
    """DiSPoConfig of a run configuration; feature sizes come from the task environment when given."""
    values = dict(config["model"])
    if d_obs is not None:
        values["d_obs"] = d_obs
    if d_act is not None:
        values["d_act"] = d_act
    return DiSPoConfig.from_dict(values)


def augment_config(config):
    return AugmentConfig(batch_size=config["optim"]["batch_size"], rate_divisors=config["data"]["rate_divisors"])


def write_config(out_dir, config):
    """Write the effective configuration as ``config.json`` in ``out_dir``."""
    path = Path(out_dir) / CONFIG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(config, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def configure_logging(verbose=False):
    """Root log level from ``DISPO_VERBOSITY`` (default WARNING); ``verbose`` raises it to at least INFO."""
    name = os.environ.get(VERBOSITY_ENV, "WARNING").upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ValueError(f"{VERBOSITY_ENV} must be DEBUG, INFO or WARNING, got '{name}'.")
    if verbose:
        level = min(level, logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)
    return level


# End of file
