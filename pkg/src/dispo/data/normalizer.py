#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Per-dimension min/max normalization of observations and actions."""

import warnings

import numpy as np

OBS_RANGE = (-1.0, 0.0)
ACT_RANGE = (-1.0, 1.0)


def _degenerate_wmsg(kind, dims):
    return (
        f"{kind} dimensions {dims} have identical minimum and maximum in the training set. "
        f"They normalize to the midpoint of the target range."
    )


def _clamped_wmsg(kind, n):
    return f"{n} {kind.lower()} values outside the fitted bounds were clamped."


class _Affine:
    def __init__(self, low, high, target):
        self.low = np.asarray(low, dtype=np.float64)
        self.high = np.asarray(high, dtype=np.float64)
        self.target = (float(target[0]), float(target[1]))
        self.degenerate = self.high <= self.low
        span = np.where(self.degenerate, 1.0, self.high - self.low)
        self.scale = np.where(self.degenerate, 0.0, (self.target[1] - self.target[0]) / span)

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        clipped = np.clip(x, self.low, self.high)
        n_clamped = int(np.count_nonzero(clipped != x))
        midpoint = 0.5 * (self.target[0] + self.target[1])
        y = np.where(self.degenerate, midpoint, self.target[0] + (clipped - self.low) * self.scale)
        return y, n_clamped

    def inverse(self, y):
        y = np.asarray(y, dtype=np.float64)
        safe = np.where(self.degenerate, 1.0, self.scale)
        return np.where(self.degenerate, self.low, self.low + (y - self.target[0]) / safe)

    def to_dict(self):
        return {"min": self.low.tolist(), "max": self.high.tolist(), "range": list(self.target)}


class Normalizer:
    """Affine maps fitted on training-set bounds: observations onto [-1, 0], actions onto [-1, 1].

    Values outside the fitted bounds are clamped on the way in, counted in ``n_clamped`` and warned about.

    Parameters
    ----------
    obs_min, obs_max: array-like
        Per-dimension observation bounds.
    act_min, act_max: array-like
        Per-dimension action bounds.
    obs_range, act_range: tuple of float
        Target intervals.
    """

    def __init__(self, obs_min, obs_max, act_min, act_max, obs_range=OBS_RANGE, act_range=ACT_RANGE):
        self._obs = _Affine(obs_min, obs_max, obs_range)
        self._act = _Affine(act_min, act_max, act_range)
        self.n_clamped = 0
        for kind, affine in (("Observation", self._obs), ("Action", self._act)):
            if np.any(affine.degenerate):
                warnings.warn(_degenerate_wmsg(kind, np.flatnonzero(affine.degenerate).tolist()), UserWarning)

    @classmethod
    def fit(cls, trajectories, obs_range=OBS_RANGE, act_range=ACT_RANGE):
        """Fit bounds on the samples of one or more trajectories."""
        if not trajectories:
            raise ValueError("Cannot fit a normalizer without trajectories.")
        obs = np.concatenate([t.obs for t in trajectories])
        act = np.concatenate([t.act for t in trajectories])
        return cls(obs.min(axis=0), obs.max(axis=0), act.min(axis=0), act.max(axis=0), obs_range, act_range)

    @property
    def act_bounds(self):
        return self._act.low.copy(), self._act.high.copy()

    def _forward(self, kind, affine, x):
        y, n = affine.forward(x)
        if n:
            warnings.warn(_clamped_wmsg(kind, n), UserWarning)
        self.n_clamped += n
        return y

    def normalize_obs(self, x):
        return self._forward("Observation", self._obs, x)

    def normalize_act(self, x):
        return self._forward("Action", self._act, x)

    def denormalize_obs(self, y):
        return self._obs.inverse(y)

    def denormalize_act(self, y):
        return self._act.inverse(y)

    def to_dict(self):
        return {"obs": self._obs.to_dict(), "act": self._act.to_dict()}

    @classmethod
    def from_dict(cls, record):
        obs, act = record["obs"], record["act"]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            return cls(obs["min"], obs["max"], act["min"], act["max"], tuple(obs["range"]), tuple(act["range"]))


def normalize(x, normalizer, kind="act"):
    """Map raw values of ``kind`` (``act`` or ``obs``) into the normalized range."""
    if kind == "act":
        return normalizer.normalize_act(x)
    if kind == "obs":
        return normalizer.normalize_obs(x)
    raise ValueError(f"kind must be 'act' or 'obs', got '{kind}'.")


def denormalize(y, normalizer, kind="act"):
    """Inverse of :func:`normalize` on in-range values."""
    if kind == "act":
        return normalizer.denormalize_act(y)
    if kind == "obs":
        return normalizer.denormalize_obs(y)
    raise ValueError(f"kind must be 'act' or 'obs', got '{kind}'.")


# End of file
