#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Sphinx configuration for the dispo documentation."""

import sys
import time
from importlib.metadata import version
from pathlib import Path

# autodoc imports the package from the source tree
sys.path.insert(0, str(Path("../../src").resolve()))

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx.ext.intersphinx",
    "sphinx_rtd_theme",
]

master_doc = "index"
project = "dispo"
copyright = "%Y, dispo developers"

fullversion = version(project)
version = "".join(fullversion.split(".post")[:1])
release = fullversion
today = time.strftime("%B %d, %Y", time.localtime())

exclude_patterns = ["build"]
pygments_style = "sphinx"
modindex_common_prefix = ["dispo."]
autodoc_member_order = "bysource"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
}

html_theme = "sphinx_rtd_theme"
html_theme_options = {
    "navigation_with_keys": "true",
}
htmlhelp_basename = "dispodoc"

# End of file
