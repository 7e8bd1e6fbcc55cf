"""Unit tests for __version__.py
"""

import dispo


def test_package_version():
    """Ensure the package version is defined and not set to the initial placeholder."""
    assert hasattr(dispo, "__version__")
    assert dispo.__version__ != "0.0.0"
