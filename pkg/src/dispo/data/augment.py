#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Sample-rate augmentation: one source window, several coarser variants, each with its step-scale factors.

A variant at rate ``w_j = w_0 / m`` spaces its tail actions ``m`` native steps apart and carries ``r_act`` tail
factors ``w_0 / w_j = m``, so training sees the same continuous motion at several discretization steps.
"""

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from dispo.data.normalizer import Normalizer
from dispo.data.trajectory import extract_window, window_anchors
from dispo.ssm import StepScaleSequence

logger = logging.getLogger(__name__)

skipped_variant_wmsg = "{n} augmentation variants were too short for their rate and were skipped."


@dataclass
class AugmentConfig:
    """Batching and augmentation settings.

    Attributes
    ----------
    batch_size: int
        Source windows per batch.
    rate_divisors: list of int or None
        Divisors ``m`` of the variant rates ``w_0 / m``. None means ``[2, 3, ..., n_variants + 1]``.
    n_variants: int
        ``N_w``, number of coarser variants per source window when ``rate_divisors`` is None.
    """

    batch_size: int = 64
    rate_divisors: list = None
    n_variants: int = 1

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}.")
        if self.rate_divisors is None:
            self.rate_divisors = list(range(2, self.n_variants + 2))
        self.rate_divisors = [int(m) for m in self.rate_divisors]
        if any(m < 1 for m in self.rate_divisors):
            raise ValueError(f"Rate divisors must be at least 1, got {self.rate_divisors}.")
        self.n_variants = len(self.rate_divisors)


@dataclass
class AugmentedWindow:
    """One rate variant of a source window; ``act`` is normalized, ``r_act`` has length ``T_a``."""

    source_id: int
    rate: float
    obs: np.ndarray
    act: np.ndarray
    r_act: np.ndarray


@dataclass
class TrainingBatch:
    """Stacked variants: ``obs [M, T_o, d_obs]``, ``actions [M, T_a, d_act]`` (normalized), ``step_scale`` with
    values ``[M, L]``, ``groups [M]`` source ids, ``labels [M, T_a * d_act]`` denormalized flattened actions."""

    obs: np.ndarray
    actions: np.ndarray
    step_scale: StepScaleSequence
    groups: np.ndarray
    labels: np.ndarray
    skipped: int = 0
    windows: list = field(default_factory=list)


class WindowDataset:
    """Source windows of a set of trajectories, indexed by ``(trajectory, anchor)``.

    Parameters
    ----------
    trajectories: list of Trajectory
        Demonstrations at their native rate.
    obs_horizon, action_horizon: int
        ``T_o`` and ``T_a``.
    normalizer: Normalizer
        Fitted on ``trajectories`` when not given.
    """

    def __init__(self, trajectories, obs_horizon, action_horizon, normalizer=None):
        self.trajectories = list(trajectories)
        self.obs_horizon = int(obs_horizon)
        self.action_horizon = int(action_horizon)
        if normalizer is None and self.trajectories:
            normalizer = Normalizer.fit(self.trajectories)
        self.normalizer = normalizer
        self.index = [
            (i, int(s))
            for i, traj in enumerate(self.trajectories)
            for s in window_anchors(traj, self.obs_horizon, self.action_horizon)
        ]

    def __len__(self):
        return len(self.index)

    def window(self, item, multiplier=1):
        """Variant of source window ``item`` at rate ``w_0 / multiplier``, or None if it runs past the end."""
        traj_id, anchor = self.index[item]
        traj = self.trajectories[traj_id]
        if anchor not in window_anchors(traj, self.obs_horizon, self.action_horizon, multiplier):
            return None
        obs, act = extract_window(traj, anchor, self.obs_horizon, self.action_horizon, multiplier)
        r_act = np.ones(self.action_horizon)
        rate = traj.rate / multiplier
        r_act[self.obs_horizon :] = traj.rate / rate
        return AugmentedWindow(
            source_id=item,
            rate=rate,
            obs=self.normalizer.normalize_obs(obs),
            act=self.normalizer.normalize_act(act),
            r_act=r_act,
        )


def make_training_batch(dataset, cfg, rng):
    """Draw ``cfg.batch_size`` source windows and build variant 0 plus every configured rate variant of each.

    All variants of a source share its anchor time. Variants that run past the trajectory end are skipped and
    counted in ``TrainingBatch.skipped``.
    """
    if len(dataset) == 0:
        raise ValueError("The dataset holds no windows.")
    chosen = rng.choice(len(dataset), size=cfg.batch_size, replace=len(dataset) < cfg.batch_size)
    windows = []
    skipped = 0
    for item in chosen:
        windows.append(dataset.window(int(item)))
        for m in cfg.rate_divisors:
            variant = dataset.window(int(item), m)
            if variant is None:
                skipped += 1
            else:
                windows.append(variant)
    if skipped:
        warnings.warn(skipped_variant_wmsg.format(n=skipped), UserWarning)
        logger.debug("skipped %d variants", skipped)
    actions = np.stack([w.act for w in windows])
    labels = dataset.normalizer.denormalize_act(actions).reshape(len(windows), -1)
    return TrainingBatch(
        obs=np.stack([w.obs for w in windows]),
        actions=actions,
        step_scale=StepScaleSequence.from_action_factors(
            dataset.obs_horizon, np.stack([w.r_act for w in windows])
        ),
        groups=np.array([w.source_id for w in windows]),
        labels=labels,
        skipped=skipped,
        windows=windows,
    )


# End of file
