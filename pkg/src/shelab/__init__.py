"""Simulation laboratory for the stochastic heat equation driven by
Levy space-time white noise.

Subpackages cover the measure layer (`levy`), jump sampling (`noise`),
heat-kernel engines (`kernels`), mild-solution evaluation (`solver`),
fractional Sobolev analysis (`sobolev`), and empirical regularity
studies (`regularity`).  The `shelab` command line drives reproducible
experiments; see `shelab.cli`.
"""

from shelab._accel import NUMBA_ENABLED

__version__ = "0.1.0"

__all__ = ["NUMBA_ENABLED", "__version__"]
