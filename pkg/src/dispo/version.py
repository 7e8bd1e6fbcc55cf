#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Definition of __version__."""

# obtain version information
from importlib.metadata import version

__version__ = version("dispo")

# End of file
