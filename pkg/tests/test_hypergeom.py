import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasilie.catalog import gauss_2f1
from quasilie.catalog.hypergeom import _oracle_log
from quasilie.errors import DomainError


def test_zero_argument_is_exactly_one():
    assert gauss_2f1(0.3, 1.7, 2.5, 0.0) == 1.0


@pytest.mark.parametrize("z, value", [(0.5, 1.3862943611198906), (-1.0, 0.6931471805599453)])
def test_log_oracle(z, value):
    assert gauss_2f1(1, 1, 2, z) == pytest.approx(value, rel=1e-14)


def test_pfaff_branch():
    z = -3.0
    assert gauss_2f1(1, 1, 2, z) == pytest.approx(math.log(4) / 3, rel=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, 2, 0.97)
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, 2, -40.0)
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, -2, 0.1)


def test_elementary_cases():
    # 2F1(a, b; b; z) = (1 - z)^-a
    assert gauss_2f1(0.7, 1.3, 1.3, 0.4) == pytest.approx(0.6 ** -0.7, rel=1e-14)
    # 2F1(1/2, 1/2; 3/2; z^2) = arcsin(z)/z
    assert gauss_2f1(0.5, 0.5, 1.5, 0.25) == pytest.approx(math.asin(0.5) / 0.5, rel=1e-14)


@given(st.floats(-10, 0.9).filter(lambda z: abs(z) > 1e-6))
def test_matches_log_oracle(z):
    assert gauss_2f1(1, 1, 2, z) == pytest.approx(_oracle_log(z), rel=1e-12)


@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.5, 4), st.floats(-0.8, 0.8))
def test_symmetric_in_a_and_b(a, b, c, z):
    assert gauss_2f1(a, b, c, z) == pytest.approx(gauss_2f1(b, a, c, z), rel=1e-12)
