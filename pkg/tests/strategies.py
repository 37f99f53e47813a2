"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction

from hypothesis import strategies as st

from quasilie.algebra import Polynomial, RationalFunction
from quasilie.fields import SymbolicVectorField

VARS = ("x", "y", "z")

small_fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def polynomials(variables=VARS, max_degree=3, max_terms=4, nonzero=False):
    n = len(variables)
    exps = st.tuples(*[st.integers(0, max_degree)] * n).filter(lambda e: sum(e) <= max_degree)
    terms = st.dictionaries(exps, small_fractions, min_size=1 if nonzero else 0, max_size=max_terms)
    poly = terms.map(lambda t: Polynomial(variables, t))
    return poly.filter(lambda p: not p.is_zero()) if nonzero else poly


def rational_functions(variables=VARS, max_degree=2):
    return st.builds(RationalFunction, polynomials(variables, max_degree),
                     polynomials(variables, max_degree, nonzero=True))


def polynomial_fields(variables=VARS, max_degree=3):
    n = len(variables)
    return st.lists(polynomials(variables, max_degree, max_terms=3), min_size=n, max_size=n).map(
        lambda comps: SymbolicVectorField(variables, comps))
