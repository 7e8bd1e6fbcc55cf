#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Planar two-link arm kinematics."""

import warnings

import numpy as np

LINK_LENGTHS = (0.6, 0.5)

unreachable_wmsg = "Target {target} is outside the reachable annulus and was clamped to {clamped}."


def two_link_fk(q, l1=LINK_LENGTHS[0], l2=LINK_LENGTHS[1]):
    """End-effector position of joint angles ``q = (q1, q2)`` in radians."""
    q1, q2 = np.asarray(q, dtype=np.float64)
    return np.array([l1 * np.cos(q1) + l2 * np.cos(q1 + q2), l1 * np.sin(q1) + l2 * np.sin(q1 + q2)])


def clamp_to_reach(p, l1=LINK_LENGTHS[0], l2=LINK_LENGTHS[1]):
    """Nearest point on the radial line through ``p`` with ``|l1 - l2| <= |p| <= l1 + l2``.

    Returns
    -------
    (numpy.ndarray, bool):
        The reachable point and whether clamping was needed.
    """
    p = np.asarray(p, dtype=np.float64)
    radius = float(np.hypot(p[0], p[1]))
    low, high = abs(l1 - l2), l1 + l2
    if low <= radius <= high:
        return p.copy(), False
    direction = p / radius if radius > 0.0 else np.array([1.0, 0.0])
    return direction * min(max(radius, low), high), True


def two_link_ik(p, l1=LINK_LENGTHS[0], l2=LINK_LENGTHS[1], warn=False):
    """Elbow-up analytic inverse kinematics (``q2 <= 0``).

    Parameters
    ----------
    p: array-like
        Desired end-effector position.
    l1, l2: float
        Link lengths.
    warn: bool
        Emit a UserWarning when ``p`` is unreachable.

    Returns
    -------
    (numpy.ndarray, bool):
        Joint angles, and whether ``p`` had to be clamped into reach.
    """
    target, clamped = clamp_to_reach(p, l1, l2)
    if clamped and warn:
        warnings.warn(unreachable_wmsg.format(target=np.asarray(p).tolist(), clamped=target.tolist()), UserWarning)
    x, y = target
    c2 = np.clip((x * x + y * y - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0)
    q2 = -np.arccos(c2)
    q1 = np.arctan2(y, x) - np.arctan2(l2 * np.sin(q2), l1 + l2 * np.cos(q2))
    return np.array([q1, q2]), clamped


# End of file
