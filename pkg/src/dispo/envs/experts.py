#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Scripted experts: constant-speed piecewise-linear motion replayed through the environment."""

import numpy as np

from dispo.data.trajectory import Trajectory, interpolate_columns


def expert_positions(env, state, rate):
    """Expert positions sampled at ``k / rate`` for ``k = 0 .. round(duration * rate)``."""
    times, points = env.expert_waypoints(state)
    n = int(round(times[-1] * rate))
    return interpolate_columns(times, points, np.arange(n + 1) / rate)


def scripted_expert(env, seed, rate=1.0):
    """Demonstration of ``env`` from the initial state of ``seed`` at ``rate`` samples per fine step.

    Observations come from replaying the expert positions through ``env``; ``act[t]`` is the position commanded
    at step ``t``. The final sample holds the last position.

    Returns
    -------
    Trajectory:
        ``metadata`` holds the seed, the replayed score breakdown and ``ideal_steps`` (actions executed).
    """
    state = env.reset(seed)
    positions = expert_positions(env, state, rate)
    obs, act = [], []
    for target in positions[1:]:
        if env.done(state):
            break
        obs.append(env.observe(state))
        act.append(target)
        state = env.step(state, target)
    ideal_steps = len(act)
    obs.append(env.observe(state))
    act.append(env.position(state))
    breakdown = env.score(state, ideal_steps)
    metadata = {"seed": int(seed), "ideal_steps": ideal_steps, "score": breakdown}
    return Trajectory(env.task, rate, np.stack(obs), np.stack(act), metadata=metadata)


def ideal_steps(env, seed, rate):
    """Number of actions the expert executes from the initial state of ``seed`` at ``rate``.

    The replay can end before the last waypoint when a tap lands early.
    """
    return scripted_expert(env, seed, rate).metadata["ideal_steps"]


# End of file
