import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncoscillator.errors import NonUnimodalError
from ncoscillator.optimize import golden_section, scan_then_golden


@settings(max_examples=100, deadline=None)
@given(st.floats(-5.0, 5.0), st.floats(0.1, 10.0))
def test_golden_section_quadratic(x0, k):
    res = golden_section(lambda x: k * (x - x0) ** 2, -6.0, 6.0, tol=1e-10)
    assert abs(res.x - x0) < 1e-9


def test_golden_section_empty_bracket():
    with pytest.raises(ValueError):
        golden_section(lambda x: x * x, 1.0, 1.0)


def test_golden_section_mpmath_precision():
    with mpmath.workdps(40):
        x0 = mpmath.mpf(1) / 3
        res = golden_section(lambda x: (x - x0) ** 2 + 1, mpmath.mpf(0), mpmath.mpf(1), tol=mpmath.mpf("1e-20"))
        assert abs(res.x - x0) < mpmath.mpf("1e-19")


def test_golden_section_float_floor():
    # in doubles a quadratic bottom is flat to about sqrt(eps) in x
    res = golden_section(lambda x: (x - 1.0 / 3.0) ** 2, 0.0, 1.0, tol=1e-12)
    assert abs(res.x - 1.0 / 3.0) < 1e-7


def test_scan_then_golden_refines():
    res, scan = scan_then_golden(lambda x: math.cosh(x - 0.3), -2.0, 2.0, tol=1e-10)
    assert abs(res.x - 0.3) < 1e-7
    assert len(scan.x) == 64 and np.argmin(scan.values) not in (0, 63)


def test_edge_minimum_rejected():
    with pytest.raises(NonUnimodalError) as err:
        scan_then_golden(lambda x: x, -1.0, 1.0)
    assert err.value.scan is not None


def test_two_dips_rejected():
    with pytest.raises(NonUnimodalError):
        scan_then_golden(lambda x: math.cos(3 * x) + 0.1 * x * x, -3.0, 3.0)
