#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Stroke rasterization of polylines and the intersection-over-union score of drawn paths."""

import numpy as np
import skimage.draw
from scipy.ndimage import binary_dilation

GRID_SIZE = 128
STROKE_WIDTH = 3
WORKSPACE = (-1.0, 1.0)


def world_to_pixel(points, grid=GRID_SIZE, workspace=WORKSPACE):
    """Row/column indices of workspace points; rows follow y, columns follow x. Points are clipped to the grid."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    low, high = workspace
    unit = (points - low) / (high - low)
    pixels = np.clip(np.floor(unit * grid), 0, grid - 1).astype(int)
    return pixels[:, 1], pixels[:, 0]


def _stroke(mask, width):
    if width <= 1:
        return mask
    return binary_dilation(mask, structure=np.ones((width, width), dtype=bool))


def rasterize_polyline(points, grid=GRID_SIZE, width=STROKE_WIDTH, workspace=WORKSPACE):
    """Boolean ``[grid, grid]`` mask of the polyline through ``points`` drawn ``width`` pixels wide.

    A single point rasterizes to a ``width x width`` dot; no points give an empty mask.
    """
    mask = np.zeros((grid, grid), dtype=bool)
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(points) == 0:
        return mask
    rows, cols = world_to_pixel(points, grid, workspace)
    mask[rows[0], cols[0]] = True
    for r0, c0, r1, c1 in zip(rows[:-1], cols[:-1], rows[1:], cols[1:]):
        rr, cc = skimage.draw.line(r0, c0, r1, c1)
        mask[rr, cc] = True
    return _stroke(mask, width)


def iou(mask_a, mask_b):
    """``|A & B| / |A | B|``; 0 when both masks are empty."""
    union = np.count_nonzero(np.logical_or(mask_a, mask_b))
    if union == 0:
        return 0.0
    return np.count_nonzero(np.logical_and(mask_a, mask_b)) / union


def iou_score(path, outline, grid=GRID_SIZE, width=STROKE_WIDTH, workspace=WORKSPACE):
    """IoU of the drawn path against the target outline, at the end and maximized over path prefixes.

    Parameters
    ----------
    path: array-like
        Visited positions ``[n, 2]``.
    outline: array-like
        Dense polyline of the target shape ``[m, 2]``.

    Returns
    -------
    (float, float):
        ``(iou_last, iou_max)``; both 0 for an empty path.
    """
    path = np.asarray(path, dtype=np.float64).reshape(-1, 2)
    if len(path) == 0:
        return 0.0, 0.0
    target = rasterize_polyline(outline, grid, width, workspace)
    rows, cols = world_to_pixel(path, grid, workspace)
    centerline = np.zeros((grid, grid), dtype=bool)
    drawn = np.zeros((grid, grid), dtype=bool)
    best = 0.0
    current = 0.0
    for i in range(len(path)):
        segment = np.zeros((grid, grid), dtype=bool)
        if i == 0:
            segment[rows[0], cols[0]] = True
        else:
            rr, cc = skimage.draw.line(rows[i - 1], cols[i - 1], rows[i], cols[i])
            segment[rr, cc] = True
        if not np.any(segment & ~centerline):
            best = max(best, current)
            continue
        centerline |= segment
        # dilation distributes over union
        drawn |= _stroke(segment, width)
        current = iou(drawn, target)
        best = max(best, current)
    return current, best


# End of file
