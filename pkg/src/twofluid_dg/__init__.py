"""Entropy-stable nodal DG solver for two-fluid relativistic plasmas."""

__version__ = "0.1.0"

from . import cases, dgsolver, entflux, physflux, sbp, state, timeint  # noqa: F401
