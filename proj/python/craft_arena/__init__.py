"""Craft arena: grid construction environments with sync/async simulators."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
