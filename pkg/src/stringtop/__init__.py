"""Rational string topology from Sullivan, bar and Hochschild models."""

import os

from stringtop.kernel import BACKEND

__version__ = "0.1.0"

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    """Path of a bundled ``.alg`` fixture, e.g. ``fixture_path("s3")``."""
    if not name.endswith(".alg"):
        name += ".alg"
    return os.path.join(FIXTURES, name)


__all__ = ["BACKEND", "FIXTURES", "fixture_path", "__version__"]
