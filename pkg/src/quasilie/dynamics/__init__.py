"""Numerical integration of time-dependent fields and quadrature-defined functions."""
from ._backend import BACKEND
from .antiderivative import Antiderivative, antiderivative
from .integrator import IntegratorConfig, Trajectory, integrate_ivp

__all__ = ["BACKEND", "Antiderivative", "antiderivative", "IntegratorConfig", "Trajectory", "integrate_ivp"]
