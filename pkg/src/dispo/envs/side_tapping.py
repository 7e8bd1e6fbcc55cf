#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Side Tapping: a two-link arm taps a left and a right target in the order left, right, left, right.

The action is the desired end-effector position, executed through inverse kinematics. The observation is
``(q1, q2, taps / 4)`` so the task phase stays observable.
"""

from dataclasses import dataclass, replace

import numpy as np

from dispo.envs.kinematics import LINK_LENGTHS, two_link_fk, two_link_ik

TARGETS = ((-0.6, 0.3), (0.6, 0.3))
TAP_ORDER = (0, 1, 0, 1)
TAP_RADIUS = 0.08
MAX_STEPS = 60
START_BOX = ((-0.2, 0.55), (0.2, 0.75))
EXPERT_SPEED = 0.1
EXPERT_HOLD = 2


@dataclass(frozen=True)
class SideTapState:
    q: tuple
    ee: tuple
    start: tuple
    taps: int = 0
    step: int = 0
    unreachable: int = 0


def side_tapping_score(taps, steps, ideal_steps):
    """``0.25 * taps - 0.01 * max(0, steps - ideal_steps)``, clipped to [-0.2, 1]."""
    score = 0.25 * taps - 0.01 * max(0, steps - ideal_steps)
    return float(np.clip(score, -0.2, 1.0))


def even_step_count(length, speed):
    """Fine steps to cover ``length`` at most ``speed`` per step, rounded up to an even count (at least 2)."""
    return max(2, 2 * int(np.ceil(length / (2.0 * speed) - 1e-9)))


class SideTappingEnv:
    """Kinematic Side Tapping task.

    Parameters
    ----------
    max_steps: int or None
        Episode budget; None for no limit.
    targets: tuple
        Left and right target positions.
    radius: float
        Distance within which the end effector taps the current target.
    link_lengths: tuple
        ``(l1, l2)``.
    hold_steps: int
        Even number of fine steps the expert rests on each target. A demonstration coarsened with a stride up to
        ``hold_steps + 1`` still commands every target exactly, whatever its sampling offset.
    """

    task = "side_tapping"
    obs_dim = 3
    act_dim = 2

    def __init__(
        self,
        max_steps=MAX_STEPS,
        targets=TARGETS,
        radius=TAP_RADIUS,
        link_lengths=LINK_LENGTHS,
        hold_steps=EXPERT_HOLD,
    ):
        if hold_steps < 0 or hold_steps % 2:
            raise ValueError(f"Hold must be a non-negative even number of steps, got {hold_steps}.")
        self.max_steps = max_steps
        self.hold_steps = int(hold_steps)
        self.targets = tuple(tuple(float(v) for v in t) for t in targets)
        self.radius = float(radius)
        self.link_lengths = tuple(link_lengths)

    def reset(self, seed):
        rng = np.random.default_rng(seed)
        start = rng.uniform(START_BOX[0], START_BOX[1])
        q, _ = two_link_ik(start, *self.link_lengths)
        ee = two_link_fk(q, *self.link_lengths)
        return SideTapState(q=tuple(q), ee=tuple(ee), start=tuple(ee))

    def current_target(self, state):
        if state.taps >= len(TAP_ORDER):
            return None
        return self.targets[TAP_ORDER[state.taps]]

    def step(self, state, action):
        q, clamped = two_link_ik(action, *self.link_lengths)
        ee = two_link_fk(q, *self.link_lengths)
        taps = state.taps
        target = self.current_target(state)
        if target is not None and np.hypot(ee[0] - target[0], ee[1] - target[1]) <= self.radius:
            taps += 1
        return replace(
            state,
            q=tuple(q),
            ee=tuple(ee),
            taps=taps,
            step=state.step + 1,
            unreachable=state.unreachable + int(clamped),
        )

    def observe(self, state):
        return np.array([state.q[0], state.q[1], state.taps / len(TAP_ORDER)])

    def position(self, state):
        return np.array(state.ee)

    def done(self, state):
        if state.taps >= len(TAP_ORDER):
            return True
        return self.max_steps is not None and state.step >= self.max_steps

    def expert_waypoints(self, state):
        """Waypoints start, L, R, L, R with a rest of ``hold_steps`` on each target, and their arrival times.

        All times are even fine steps. With ``hold_steps > 0`` every target appears twice in a row.
        """
        points = [np.array(state.start)]
        times = [0]
        for i in TAP_ORDER:
            target = np.array(self.targets[i])
            points.append(target)
            times.append(times[-1] + even_step_count(np.linalg.norm(target - points[-2]), EXPERT_SPEED))
            if self.hold_steps:
                points.append(target)
                times.append(times[-1] + self.hold_steps)
        return np.array(times, dtype=np.float64), np.stack(points)

    def score(self, state, ideal_steps):
        return {
            "score": side_tapping_score(state.taps, state.step, ideal_steps),
            "taps": state.taps,
            "steps": state.step,
            "ideal_steps": int(ideal_steps),
            "unreachable": state.unreachable,
        }


# End of file
