"""Gauss hypergeometric function 2F1(a, b; c; z) for real arguments."""
import math

from ..errors import DomainError, NonConvergence

SERIES_RADIUS = 0.95
MAX_TERMS = 100_000
REL_STOP = 1e-15


def _series(a, b, c, z):
    total = 1.0
    term = 1.0
    for k in range(MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0.0 or abs(term) < REL_STOP * abs(total):
            return total
    raise NonConvergence(f"2F1({a}, {b}; {c}; {z}) did not converge in {MAX_TERMS} terms")


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Power series, after the Pfaff transformation z -> z/(z-1) when z < 0.

    Raises DomainError when the (transformed) argument has modulus >= 0.95.
    """
    if c <= 0 and float(c).is_integer():
        raise DomainError(f"c={c} is a non-positive integer")
    if z == 0:
        return 1.0
    if z < 0:
        w = z / (z - 1)
        if abs(w) >= SERIES_RADIUS:
            raise DomainError(f"2F1 argument {z} maps to {w} after the Pfaff transformation")
        # 2F1(a, b; c; z) = (1 - z)^(-a) 2F1(a, c - b; c; z/(z - 1))
        return (1 - z) ** (-a) * _series(a, c - b, c, w)
    if z >= SERIES_RADIUS:
        raise DomainError(f"2F1 argument {z} outside the series domain |z| < {SERIES_RADIUS}")
    return _series(a, b, c, z)


def _oracle_log(z):
    """2F1(1, 1; 2; z) = -log(1 - z)/z, used in tests."""
    return -math.log1p(-z) / z
