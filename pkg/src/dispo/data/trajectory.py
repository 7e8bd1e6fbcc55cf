#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Demonstration trajectories and their resampling in time."""

from copy import deepcopy

import numpy as np

rate_emsg = "Sample rate must be positive, got {rate}."
upsample_emsg = "Cannot resample at {new} > {old}: only equal or coarser rates are supported."


class Trajectory:
    """A demonstration sampled uniformly in time.

    ``act[t]`` is the desired position for step ``t + 1``, so the pair ``(obs[t], act[t])`` is what the agent saw
    and what it commanded at time ``t / rate``.

    Parameters
    ----------
    task: str
        Task id, e.g. ``side_tapping`` or ``drawing_rectangle``.
    rate: float
        Samples per unit time, positive.
    obs: array-like
        ``[T, d_obs]``.
    act: array-like
        ``[T, d_act]``.
    metadata: dict
        Free-form extras (seed, shape parameters, stride and offset of a coarsified copy).
    """

    def __init__(self, task, rate, obs, act, metadata=None):
        if rate <= 0:
            raise ValueError(rate_emsg.format(rate=rate))
        obs = np.atleast_2d(np.asarray(obs, dtype=np.float64))
        act = np.atleast_2d(np.asarray(act, dtype=np.float64))
        if obs.ndim != 2 or act.ndim != 2 or len(obs) != len(act):
            raise ValueError(f"obs and act must be 2-D with equal length, got {obs.shape} and {act.shape}.")
        self.task = task
        self.rate = float(rate)
        self.obs = obs
        self.act = act
        self.metadata = {} if metadata is None else dict(metadata)

    def __len__(self):
        return len(self.obs)

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.task == other.task
            and np.isclose(self.rate, other.rate)
            and self.obs.shape == other.obs.shape
            and self.act.shape == other.act.shape
            and np.allclose(self.obs, other.obs)
            and np.allclose(self.act, other.act)
            and self.metadata == other.metadata
        )

    def __repr__(self):
        return f"Trajectory(task='{self.task}', rate={self.rate}, length={len(self)})"

    @property
    def times(self):
        return np.arange(len(self)) / self.rate

    @property
    def duration(self):
        return (len(self) - 1) / self.rate

    def copy(self):
        return deepcopy(self)

    def to_dict(self):
        return {
            "task": self.task,
            "rate": self.rate,
            "obs": self.obs.tolist(),
            "act": self.act.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, record):
        return cls(record["task"], record["rate"], record["obs"], record["act"], record.get("metadata"))


def interpolate_columns(times, values, query):
    """Linear interpolation of every column of ``values`` sampled at ``times``; queries outside hold the ends."""
    values = np.asarray(values, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64)
    return np.stack([np.interp(query, times, values[:, d]) for d in range(values.shape[1])], axis=-1)


def resample_trajectory(trajectory, rate):
    """Resample on the uniform grid at ``rate`` over the same time span.

    The output has ``floor((T - 1) * rate / w0) + 1`` samples; samples falling on original knots are exact.

    Parameters
    ----------
    trajectory: Trajectory
    rate: float
        New rate, ``0 < rate <= trajectory.rate``.

    Returns
    -------
    Trajectory
    """
    if rate <= 0:
        raise ValueError(rate_emsg.format(rate=rate))
    if rate > trajectory.rate:
        raise ValueError(upsample_emsg.format(new=rate, old=trajectory.rate))
    if rate == trajectory.rate:
        return trajectory.copy()
    # guard the floor against (T - 1) * w / w0 landing a hair below an integer
    n = int(np.floor((len(trajectory) - 1) * rate / trajectory.rate + 1e-9)) + 1
    query = np.arange(n) / rate
    times = trajectory.times
    return Trajectory(
        trajectory.task,
        rate,
        interpolate_columns(times, trajectory.obs, query),
        interpolate_columns(times, trajectory.act, query),
        metadata=trajectory.metadata,
    )


def coarsify_demo(fine, stride, rng=None, offset=None):
    """Keep every ``stride``-th sample starting from ``offset`` (uniform in ``[0, stride)`` when not given).

    Parameters
    ----------
    fine: Trajectory
    stride: int
        At least 1; ``len(fine)`` must exceed it.
    rng: numpy.random.Generator
        Draws the offset. Default ``default_rng()``.
    offset: int
        Fixed start index instead of a random one.

    Returns
    -------
    Trajectory:
        Rate ``fine.rate / stride``; metadata records stride and offset.
    """
    stride = int(stride)
    if stride < 1:
        raise ValueError(f"Stride must be at least 1, got {stride}.")
    if len(fine) <= stride:
        raise ValueError(f"Trajectory of length {len(fine)} is too short for stride {stride}.")
    if offset is None:
        rng = np.random.default_rng() if rng is None else rng
        offset = int(rng.integers(0, stride))
    if not 0 <= offset < stride:
        raise ValueError(f"Offset must lie in [0, {stride}), got {offset}.")
    index = np.arange(offset, len(fine), stride)
    # actions are next-step positions: on the coarse grid the next step is `stride` fine steps ahead
    act_index = np.minimum(index + stride - 1, len(fine) - 1)
    metadata = dict(fine.metadata, stride=stride, offset=offset)
    return Trajectory(fine.task, fine.rate / stride, fine.obs[index], fine.act[act_index], metadata=metadata)


def window_anchors(trajectory, obs_horizon, action_horizon, multiplier=1):
    """Native indices ``s`` whose action window (tail spaced ``multiplier`` native steps) fits the trajectory."""
    last = len(trajectory) - (action_horizon - obs_horizon) * multiplier
    return np.arange(0, min(len(trajectory) - 1, last) + 1)


def action_query_times(anchor, rate, obs_horizon, action_horizon, multiplier=1):
    """Times at which the action signal is read for the window anchored at native index ``anchor``.

    Slot ``i`` targets ``tau_i = t_s - (T_o - 1 - i) dt`` for ``i < T_o`` and
    ``tau_i = t_s + (i - T_o + 1) * multiplier * dt`` for the tail; the action signal is read at ``tau_i - dt``.
    """
    dt = 1.0 / rate
    slots = np.arange(action_horizon)
    offsets = np.where(
        slots < obs_horizon,
        slots - obs_horizon,
        (slots - obs_horizon + 1) * multiplier - 1,
    )
    return (anchor + offsets) * dt


def extract_window(trajectory, anchor, obs_horizon, action_horizon, multiplier=1):
    """Observation and action window anchored at native index ``anchor``.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray):
        ``[T_o, d_obs]`` observations at ``anchor - T_o + 1 .. anchor`` (earliest repeated before the start) and
        ``[T_a, d_act]`` actions read from the linearly interpolated action signal.
    """
    obs_index = np.clip(np.arange(anchor - obs_horizon + 1, anchor + 1), 0, None)
    query = action_query_times(anchor, trajectory.rate, obs_horizon, action_horizon, multiplier)
    if query[-1] > trajectory.times[-1] + 1e-9:
        raise ValueError(f"Window at {anchor} with multiplier {multiplier} runs past the trajectory end.")
    act = interpolate_columns(trajectory.times, trajectory.act, query)
    return trajectory.obs[obs_index].copy(), act


# End of file
