"""Coupled octocopter + slung-load simulation, control, and estimation."""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
    from ._core import ExperimentConfig, OctoloadError  # noqa: F401
except ImportError:  # source layout: build dir on sys.path provides _core
    from _core import *  # noqa: F401,F403
    from _core import ExperimentConfig, OctoloadError  # noqa: F401

__version__ = "0.1.0"
