"""Quadratic phases ``x * n`` reduced modulo 2 pi in double-double arithmetic.

The torus propagator needs ``exp(-i r t |k|^2 / 2)`` with ``|k|^2`` up to
~1e12 and ``r t`` of order one or larger, so the raw phase can reach 1e13
where a double has no digits left below 1e-3.  The product is formed exactly
as an unevaluated sum of doubles (Dekker's algorithms; numpy has no fma) and
reduced against a three-word representation of 2 pi.
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2^27 + 1

# 2 pi = _C1 + _C2 + _C3 to ~160 bits
_C1 = 6.283185307179586
_C2 = 2.4492935982947064e-16
_C3 = -5.989539619436679e-33
TWO_PI = _C1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_sum(a, b):
    """``a + b = s + e`` exactly."""
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def two_prod(a, b):
    """``a * b = p + e`` exactly (barring overflow)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_mul(a: float, b: float) -> tuple[float, float]:
    """Double-double product of two doubles."""
    return two_prod(np.float64(a), np.float64(b))


def _accumulate(terms):
    # Neumaier-compensated sum of a list of equally shaped arrays
    s = terms[0]
    comp = np.zeros_like(s)
    for t in terms[1:]:
        s, e = two_sum(s, t)
        comp = comp + e
    return s + comp, s, comp


def reduce_phase(x_hi: float, x_lo: float, n) -> np.ndarray:
    """``(x_hi + x_lo) * n mod 2 pi`` in ``[-pi, pi]`` for int64 ``n``.

    ``n`` must satisfy ``|n| < 2^62``.  The result carries an absolute error
    of a few ulps of pi plus ``|x_lo * n|`` times machine epsilon.
    """
    n = np.asarray(n, dtype=np.int64)
    n_hi = n.astype(np.float64)
    n_lo = (n - n_hi.astype(np.int64)).astype(np.float64)
    x_hi = np.float64(x_hi)
    x_lo = np.float64(x_lo)

    p1, e1 = two_prod(x_hi, n_hi)
    p2, e2 = two_prod(x_hi, n_lo)
    p3, e3 = two_prod(x_lo, n_hi)
    tail = x_lo * n_lo

    q = np.rint(p1 / _C1)
    a1, b1 = two_prod(q, _C1)
    a2, b2 = two_prod(q, _C2)
    # p1 and a1 agree to within |q| ulps, so p1 - a1 is exact (Sterbenz)
    head = p1 - a1
    r, s, c = _accumulate([head, -a2, p2, e1, p3, -b1, -b2, e2, e3, tail, -q * _C3])

    # r may still be a few ulps of the raw phase; a second exact pass
    q2 = np.rint(r / _C1)
    a3, b3 = two_prod(q2, _C1)
    r2, _, _ = _accumulate([s - a3, c, -b3, -q2 * _C2])
    return r2


def phase_factor(x_hi: float, x_lo: float, n) -> np.ndarray:
    """``exp(-i (x_hi + x_lo) n)`` with the phase reduced exactly first."""
    th = reduce_phase(x_hi, x_lo, n)
    return np.exp(-1j * th)
