import math

import mpmath
import numpy as np
import pytest

from wignerlab.phase import dd_mul, phase_factor, reduce_phase, two_prod, two_sum


def test_error_free_transforms():
    s, e = two_sum(1.0, 1e-17)
    assert s == 1.0 and e == 1e-17
    p, e = two_prod(1.0 + 2**-30, 1.0 - 2**-30)
    assert p + e == p  # e is the exact rounding error
    assert mpmath.mpf(p) + mpmath.mpf(e) == mpmath.mpf(1.0 + 2**-30) * mpmath.mpf(1.0 - 2**-30)


def test_reduce_phase_against_mpmath():
    rng = np.random.default_rng(0)
    mpmath.mp.dps = 60
    worst = 0.0
    for _ in range(300):
        xh = float(rng.uniform(0.01, 4.0))
        xh, xl = dd_mul(xh, float(rng.uniform(0.5, 2.0)))
        n = int(rng.integers(-(2**61), 2**61))
        got = float(reduce_phase(xh, xl, n))
        exact = (mpmath.mpf(xh) + mpmath.mpf(xl)) * n
        ref = exact - 2 * mpmath.pi * mpmath.nint(exact / (2 * mpmath.pi))
        worst = max(worst, abs(got - float(ref)))
    assert worst <= 4e-15


def test_reduce_phase_range_and_vectorization():
    n = np.arange(-1000, 1000, dtype=np.int64) * 123456789
    th = reduce_phase(0.5, 0.0, n)
    assert th.shape == n.shape
    assert np.all(np.abs(th) <= math.pi)


def test_phase_factor_periodicity():
    # phase 2 pi exactly (to double-double) for n = 1
    hi, lo = 2 * math.pi, 2.4492935982947064e-16
    assert phase_factor(hi, lo, 1) == pytest.approx(1.0, abs=1e-15)
