#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Diffusion policies whose denoiser is a stack of step-scalable selective state-space blocks.

Training uses coarse demonstrations augmented at several sample rates; at deployment a step-scale factor below one
makes the same model emit finer-grained actions.
"""

# package version
from dispo.version import __version__  # noqa

# silence the pyflakes syntax checker
assert __version__ or True

# End of file
