import math

import numpy as np
import pytest

from wignerlab.windows import TestWindow


@pytest.mark.parametrize("family", ["fejer", "triangle-product"])
@pytest.mark.parametrize("R", [0.5, 1.0, 4.0])
def test_transform_pair_and_mass(family, R):
    w = TestWindow(family, R)
    assert w.transform_pair_error() <= 1e-12
    assert w.mass == 1.0
    assert w.ft(R) == 0 and w.ft(-1.0001 * R) == 0
    L = 400.0 / R
    t = np.linspace(-L, L, 800001)
    total = np.trapezoid(w(t), t)
    assert abs(total - 1.0) <= w.tail_mass(L) + 1e-8


@pytest.mark.parametrize("family", ["fejer", "triangle-product"])
def test_decay_constant_bounds_window(family):
    w = TestWindow(family, 1.7)
    t = np.linspace(-200, 200, 400001)
    assert np.all(w(t) <= w.decay_constant / (1 + t * t) * (1 + 1e-12))
    assert np.all(w(t) >= 0)


@pytest.mark.parametrize("family", ["fejer", "triangle-product"])
def test_periodization_against_direct_sum(family):
    w = TestWindow(family, 1.3)
    T = 4 * math.pi / 0.37
    t = np.linspace(0, T, 17, endpoint=False)
    vals, bound = w.periodized(t, T, 4)
    m = np.arange(-200000, 200001)
    direct = np.array([np.sum(w(tt + m * T)) for tt in t])
    assert np.max(np.abs(vals - direct)) <= bound + 1e-6 / T
    assert bound < 1e-3


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        TestWindow("boxcar", 1.0)
    with pytest.raises(ValueError):
        TestWindow("fejer", 0.0)
