import math

import pytest

from inverse_ramsey.quadrature import adaptive_simpson


def test_polynomial_exact():
    v, err = adaptive_simpson(lambda x: 3 * x * x, 0.0, 2.0)
    assert v == pytest.approx(8.0, abs=1e-12)


@pytest.mark.parametrize("f,a,b,exact", [
    (math.sin, 0.0, math.pi, 2.0),
    (math.exp, -1.0, 1.0, math.e - 1 / math.e),
    (lambda x: math.sqrt(x), 0.0, 1.0, 2 / 3),
])
def test_tolerance(f, a, b, exact):
    v, err = adaptive_simpson(f, a, b, tol=1e-9)
    assert abs(v - exact) < 1e-8


def test_reversed_and_empty():
    assert adaptive_simpson(math.cos, 1.0, 0.0)[0] == pytest.approx(-math.sin(1.0))
    assert adaptive_simpson(math.cos, 0.5, 0.5) == (0.0, 0.0)
