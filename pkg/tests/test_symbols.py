import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wignerlab.exact import QuadSurd
from wignerlab.symbols import (
    TorusSymbol,
    XiProfile,
    average_along,
    ball,
    bump,
    constant,
    evaluate,
    gaussian,
    poisson_bracket_with_p,
)

SQRT2 = QuadSurd(0, 1, 2)


def random_symbol(rng, dim, count=3, real=True):
    terms = []
    for _ in range(count):
        l = tuple(int(v) for v in rng.integers(-3, 4, dim))
        c = rng.normal(size=dim)
        amp = complex(rng.normal(), rng.normal())
        prof = gaussian(c, float(rng.uniform(0.3, 1.5)), amp) if rng.random() < 0.6 else bump(c, 1.2, amp)
        terms.append((l, prof))
    return TorusSymbol.real(dim, terms) if real else TorusSymbol(dim, terms)


def test_empty_symbol_is_zero():
    s = TorusSymbol(2)
    assert len(s) == 0
    assert evaluate(s, [0.1, 0.2], [1.0, 0.0]) == 0


def test_gaussian_peak_value():
    s = TorusSymbol(1, [((0,), gaussian([0.7], 0.5, 2.5 - 1j))])
    assert evaluate(s, [1.3], [0.7]) == pytest.approx(2.5 - 1j)


def test_profile_families():
    xi = np.array([[0.0], [0.5], [2.0]])
    np.testing.assert_allclose(gaussian([0.0], 1.0)(xi), np.exp(-xi[:, 0] ** 2))
    np.testing.assert_allclose(ball([0.0], 1.0)(xi), [1, 1, 0])
    np.testing.assert_allclose(bump([0.0], 1.0)(xi), [1, math.exp(1 - 1 / 0.75), 0])
    np.testing.assert_allclose(constant(1, 3.0)(xi), [3, 3, 3])
    g = gaussian([0.0], 1.0)
    assert g(np.array([g.support_radius * 1.0001])) == 0
    assert g.truncation_error == pytest.approx(math.exp(-32))
    with pytest.raises(ValueError):
        XiProfile("wedge", (0.0,))
    with pytest.raises(ValueError):
        gaussian([0.0], -1.0)


def test_lipschitz_constants_bound_slopes():
    xs = np.linspace(-3, 3, 20001)[:, None]
    for p in [gaussian([0.2], 0.7, 1.3), bump([0.0], 0.9, 0.5)]:
        slope = np.max(np.abs(np.diff(p(xs)))) / (xs[1, 0] - xs[0, 0])
        assert slope <= p.lipschitz * (1 + 1e-6)
        assert slope >= 0.95 * p.lipschitz


def test_reality_at_random_points():
    rng = np.random.default_rng(0)
    s = random_symbol(rng, 2, 4)
    assert s.is_real
    x = rng.uniform(0, 2 * math.pi, (100, 2))
    xi = rng.normal(size=(100, 2))
    assert np.max(np.abs(evaluate(s, x, xi).imag)) <= 1e-14


def test_average_along_examples():
    g = gaussian([1.0, 0.0], 1.0)
    s = TorusSymbol(2, [((0, 3), g), ((2, 0), g)])
    assert list(average_along(s, [1, 0]).terms) == [(0, 3)]
    s2 = TorusSymbol(2, [((0, 0), g), ((1, 0), g), ((3, -2), g), ((0, 1), g)])
    assert list(average_along(s2, [1, SQRT2]).terms) == [(0, 0)]
    with pytest.raises(ValueError):
        average_along(s2, [0, 0])
    with pytest.raises(TypeError):
        average_along(s2, [1.0, 2**0.5])


def test_average_along_idempotent():
    rng = np.random.default_rng(1)
    dirs = [[1, 0], [1, SQRT2], [2, -1], [0, 1], [QuadSurd(1, 1, 3), 1]]
    for i in range(20):
        s = random_symbol(rng, 2, 4, real=False)
        d = dirs[i % len(dirs)]
        once = average_along(s, d)
        assert average_along(once, d).terms == once.terms


def test_bracket_examples():
    s = TorusSymbol(2, [((0, 0), gaussian([1.0, 0.0], 1.0))])
    assert len(poisson_bracket_with_p(s)) == 0
    rng = np.random.default_rng(2)
    a = random_symbol(rng, 2, 3)
    assert len(average_along(poisson_bracket_with_p(a), [1, SQRT2])) == 0


def test_bracket_matches_flow_derivative():
    # {a, p}(x, xi) = -2 d/ds a(x + 2 s xi, xi) at s = 0 (the flow of p = |xi|^2)
    rng = np.random.default_rng(3)
    s = TorusSymbol(2, [((1, -2), gaussian([0.4, -0.3], 0.9, 0.7 + 0.2j))])
    b = poisson_bracket_with_p(s)
    x = rng.uniform(0, 2 * math.pi, (50, 2))
    xi = rng.normal(size=(50, 2))
    eps = 1e-5
    fd = (evaluate(s, x + 2 * eps * xi, xi) - evaluate(s, x - 2 * eps * xi, xi)) / (2 * eps)
    np.testing.assert_allclose(evaluate(b, x, xi), -fd, atol=1e-8)


def test_symbol_algebra_and_json():
    rng = np.random.default_rng(4)
    a, b = random_symbol(rng, 2, 2), random_symbol(rng, 2, 3)
    x, xi = rng.normal(size=(10, 2)), rng.normal(size=(10, 2))
    np.testing.assert_allclose(evaluate(a + b, x, xi), evaluate(a, x, xi) + evaluate(b, x, xi), atol=1e-15)
    np.testing.assert_allclose(evaluate(2j * a, x, xi), 2j * evaluate(a, x, xi), atol=1e-15)
    c = TorusSymbol.from_json(b.to_json())
    np.testing.assert_array_equal(evaluate(c, x, xi), evaluate(b, x, xi))
    assert TorusSymbol(2, [((0, 1), constant(2))]).is_xi_independent
    assert not a.is_xi_independent


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=5), st.integers(1, 5), st.integers(-5, 5))
def test_average_keeps_exactly_orthogonal_terms(ls, p, q):
    s = TorusSymbol(2, [(l, gaussian([0.0, 0.0], 1.0)) for l in ls])
    kept = set(average_along(s, [p, q]).terms)
    assert kept == {l for l in s.terms if l[0] * p + l[1] * q == 0}
