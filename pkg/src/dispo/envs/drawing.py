#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Drawing Shapes: the agent position traces a rectangle or an arc; the drawn path is scored by IoU."""

from dataclasses import dataclass, replace

import numpy as np

from dispo.envs.raster import WORKSPACE, iou_score
from dispo.envs.side_tapping import even_step_count

SHAPES = ["rectangle", "arc"]
SHAPE_FEATURES = 5
MAX_STEPS = 80
DRAW_STEPS = 64
OUTLINE_POINTS = 512


@dataclass(frozen=True)
class RectangleShape:
    """Axis-aligned rectangle traversed counter-clockwise from corner ``start_corner``."""

    cx: float
    cy: float
    hx: float
    hy: float
    start_corner: int = 0

    kind = "rectangle"

    def vertices(self):
        corners = np.array(
            [
                [self.cx - self.hx, self.cy - self.hy],
                [self.cx + self.hx, self.cy - self.hy],
                [self.cx + self.hx, self.cy + self.hy],
                [self.cx - self.hx, self.cy + self.hy],
            ]
        )
        corners = np.roll(corners, -self.start_corner, axis=0)
        return np.concatenate([corners, corners[:1]])

    def features(self):
        return np.array([self.cx, self.cy, self.hx, self.hy, 0.0])

    def start(self):
        return self.vertices()[0]

    def outline(self, n=OUTLINE_POINTS):
        vertices = self.vertices()
        lengths = np.linalg.norm(np.diff(vertices, axis=0), axis=1)
        knots = np.concatenate([[0.0], np.cumsum(lengths)])
        s = np.union1d(np.linspace(0.0, knots[-1], n), knots)
        return np.stack([np.interp(s, knots, vertices[:, 0]), np.interp(s, knots, vertices[:, 1])], axis=-1)

    def expert_waypoints(self):
        """Corners at even fine steps, about ``DRAW_STEPS`` steps in total."""
        vertices = self.vertices()
        lengths = np.linalg.norm(np.diff(vertices, axis=0), axis=1)
        speed = lengths.sum() / DRAW_STEPS
        times = np.concatenate([[0], np.cumsum([even_step_count(d, speed) for d in lengths])])
        return times.astype(np.float64), vertices

    @classmethod
    def random(cls, rng):
        cx, cy = rng.uniform(-0.2, 0.2, size=2)
        hx, hy = rng.uniform(0.25, 0.45, size=2)
        return cls(float(cx), float(cy), float(hx), float(hy), int(rng.integers(0, 4)))


@dataclass(frozen=True)
class ArcShape:
    """Circular arc from ``theta_start`` to ``theta_end`` (radians, either direction)."""

    cx: float
    cy: float
    radius: float
    theta_start: float
    theta_end: float

    kind = "arc"

    def _point(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        return np.stack([self.cx + self.radius * np.cos(theta), self.cy + self.radius * np.sin(theta)], axis=-1)

    def features(self):
        return np.array([self.cx, self.cy, self.radius, self.theta_start, self.theta_end])

    def start(self):
        return self._point(self.theta_start)

    def outline(self, n=OUTLINE_POINTS):
        return self._point(np.linspace(self.theta_start, self.theta_end, n))

    def expert_waypoints(self):
        """Every fine step lies on the arc; ``DRAW_STEPS`` steps at constant angular speed."""
        return np.arange(DRAW_STEPS + 1, dtype=np.float64), self.outline(DRAW_STEPS + 1)

    @classmethod
    def random(cls, rng):
        cx, cy = rng.uniform(-0.2, 0.2, size=2)
        radius = rng.uniform(0.3, 0.5)
        span = np.deg2rad(rng.uniform(120.0, 270.0))
        start = rng.uniform(-np.pi, np.pi)
        direction = 1.0 if rng.random() < 0.5 else -1.0
        return cls(float(cx), float(cy), float(radius), float(start), float(start + direction * span))


@dataclass(frozen=True)
class DrawState:
    p: tuple
    path: tuple
    shape: object
    step: int = 0
    clamped: int = 0


class DrawingEnv:
    """Kinematic Drawing Shapes task; the action is the next agent position.

    Parameters
    ----------
    shape: str
        ``rectangle`` or ``arc``; drawn at random per episode.
    max_steps: int or None
        Episode budget; None for no limit.
    workspace: tuple
        Square workspace bounds; actions are clamped into it.
    """

    obs_dim = 2 + SHAPE_FEATURES
    act_dim = 2

    def __init__(self, shape="rectangle", max_steps=MAX_STEPS, workspace=WORKSPACE):
        if shape not in SHAPES:
            raise ValueError(f"Unknown shape '{shape}'. Choose from {SHAPES}.")
        self.shape = shape
        self.max_steps = max_steps
        self.workspace = tuple(workspace)

    @property
    def task(self):
        return f"drawing_{self.shape}"

    def reset(self, seed):
        rng = np.random.default_rng(seed)
        shape = RectangleShape.random(rng) if self.shape == "rectangle" else ArcShape.random(rng)
        p = tuple(float(v) for v in shape.start())
        return DrawState(p=p, path=(p,), shape=shape)

    def step(self, state, action):
        action = np.asarray(action, dtype=np.float64)
        p = np.clip(action, self.workspace[0], self.workspace[1])
        clamped = int(np.any(p != action))
        p = tuple(float(v) for v in p)
        return replace(state, p=p, path=state.path + (p,), step=state.step + 1, clamped=state.clamped + clamped)

    def observe(self, state):
        return np.concatenate([state.p, state.shape.features()])

    def position(self, state):
        return np.array(state.p)

    def done(self, state):
        return self.max_steps is not None and state.step >= self.max_steps

    def expert_waypoints(self, state):
        """Perimeter traversal followed by holding the end point until ``MAX_STEPS`` fine steps have passed."""
        times, points = state.shape.expert_waypoints()
        hold = max(float(MAX_STEPS), times[-1])
        return np.append(times, hold), np.concatenate([points, points[-1:]])

    def score(self, state, ideal_steps=None):
        last, best = iou_score(state.path, state.shape.outline(), workspace=self.workspace)
        return {"score": best, "iou_last": last, "iou_max": best, "steps": state.step, "clamped": state.clamped}


# End of file
