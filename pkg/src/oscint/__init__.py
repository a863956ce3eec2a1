"""Symmetric trigonometric integrators for oscillatory second-order systems.

q'' = -Omega^2 q + g(q) with a diagonal frequency matrix Omega. Compliant
filter pairs conserve a modified energy exactly in the linear case.
"""
from .filters import FilterPair, catalog, get_filter, sinc
from .integrator import IntegrationError, IntegratorConfig, integrate, make_workspace, step
from .series import EnergySeries
from .system import (
    OscillatorSystem,
    State,
    cubic_nonlinearity,
    energy,
    linear_nonlinearity,
    modified_energy,
)

__version__ = "0.1.0"

__all__ = [
    "FilterPair",
    "catalog",
    "get_filter",
    "sinc",
    "IntegrationError",
    "IntegratorConfig",
    "integrate",
    "make_workspace",
    "step",
    "EnergySeries",
    "OscillatorSystem",
    "State",
    "cubic_nonlinearity",
    "energy",
    "linear_nonlinearity",
    "modified_energy",
]
