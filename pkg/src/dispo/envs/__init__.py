#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Kinematic coarse-to-fine benchmarks, scripted experts and the closed-loop rollout."""

from dispo.envs.drawing import ArcShape, DrawingEnv, DrawState, RectangleShape
from dispo.envs.side_tapping import SideTappingEnv, SideTapState, side_tapping_score

TASKS = ["side_tapping", "drawing_rectangle", "drawing_arc"]


def make_env(task, max_steps="default"):
    """Environment for a task id; ``max_steps=None`` removes the step budget (used to replay experts)."""
    options = {} if max_steps == "default" else {"max_steps": max_steps}
    if task == "side_tapping":
        return SideTappingEnv(**options)
    if task.startswith("drawing_") and task in TASKS:
        return DrawingEnv(shape=task[len("drawing_") :], **options)
    raise ValueError(f"Unknown task '{task}'. Choose from {TASKS}.")


__all__ = [
    "TASKS",
    "ArcShape",
    "DrawState",
    "DrawingEnv",
    "RectangleShape",
    "SideTapState",
    "SideTappingEnv",
    "make_env",
    "side_tapping_score",
]

# End of file
