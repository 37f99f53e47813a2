"""Pick the integrator kernel: compiled extension if built, else pure Python.

Set QUASILIE_PURE_PYTHON=1 to force the Python kernel.
"""
import os

from . import _dopri_py
from ._dopri_py import STATUS_MAXSTEPS, STATUS_OK, STATUS_UNDERFLOW  # noqa: F401

python_kernel = _dopri_py.integrate_kernel

try:
    from ._dopri_ext import integrate_kernel as compiled_kernel
except ImportError:  # extension not built
    compiled_kernel = None

if compiled_kernel is not None and not os.environ.get("QUASILIE_PURE_PYTHON"):
    integrate_kernel = compiled_kernel
    BACKEND = "compiled"
else:
    integrate_kernel = python_kernel
    BACKEND = "python"
