#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Demonstrations, normalization, windowing and sample-rate augmentation."""

from dispo.data.augment import AugmentConfig, AugmentedWindow, TrainingBatch, WindowDataset, make_training_batch
from dispo.data.normalizer import Normalizer, denormalize, normalize
from dispo.data.trajectory import Trajectory, coarsify_demo, extract_window, resample_trajectory, window_anchors

__all__ = [
    "AugmentConfig",
    "AugmentedWindow",
    "Normalizer",
    "TrainingBatch",
    "Trajectory",
    "WindowDataset",
    "coarsify_demo",
    "denormalize",
    "extract_window",
    "make_training_batch",
    "normalize",
    "resample_trajectory",
    "window_anchors",
]

# End of file
