"""Time-averaging windows with compactly supported Fourier transform.

Convention: ``phihat(tau) = integral phi(t) exp(-i tau t) dt``, so
``integral phi = phihat(0)``.

* ``fejer``: ``phihat = max(0, 1 - |tau|/R)``,
  ``phi(t) = 2 sin^2(R t / 2) / (pi R t^2)``
* ``triangle-product``: ``phihat = max(0, 1 - |tau|/R)^2``,
  ``phi(t) = 2 (1 - sin(R t) / (R t)) / (pi R t^2)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

WINDOW_FAMILIES = ("fejer", "triangle-product")
_EPS = np.finfo(float).eps


def _hurwitz2(q):
    return zeta(2.0, q)


@dataclass(frozen=True)
class TestWindow:
    """A nonnegative integrable weight ``phi`` with ``supp phihat = [-R, R]``."""

    __test__ = False  # not a pytest class

    family: str = "fejer"
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.family not in WINDOW_FAMILIES:
            raise ValueError(f"unknown window family {self.family!r}")
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise ValueError("bandwidth must be positive")
        object.__setattr__(self, "bandwidth", float(self.bandwidth))
        err = self.transform_pair_error()
        if err > 1e-8:
            raise ArithmeticError(f"window transform pair inconsistent (error {err:.2e})")

    @property
    def R(self) -> float:
        return self.bandwidth

    def ft(self, tau) -> np.ndarray:
        """``phihat(tau)``; exactly zero for ``|tau| >= R``."""
        tau = np.asarray(tau, dtype=float)
        tri = np.maximum(0.0, 1.0 - np.abs(tau) / self.R)
        return tri if self.family == "fejer" else tri * tri

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        R = self.R
        x = R * t
        if self.family == "fejer":
            return R / (2 * math.pi) * np.sinc(x / (2 * math.pi)) ** 2
        small = np.abs(x) < 0.1
        xs = np.where(small, x, 1.0)
        xl = np.where(small, 1.0, x)
        x2 = xs * xs
        # (1 - sin x / x) / x^2 as a series near 0
        series = 1 / 6 - x2 / 120 + x2 * x2 / 5040 - x2 * x2 * x2 / 362880
        direct = (1.0 - np.sin(xl) / xl) / (xl * xl)
        return 2 * R / math.pi * np.where(small, series, direct)

    @property
    def mass(self) -> float:
        return float(self.ft(0.0))

    @property
    def decay_constant(self) -> float:
        """``C`` with ``phi(t) <= C / (1 + t^2)`` for all ``t``."""
        R = self.R
        if self.family == "fejer":
            # phi <= R/(2 pi) and phi <= 2/(pi R t^2)
            return R / (2 * math.pi) + 2 / (math.pi * R)
        # phi <= phi(0) = R/(3 pi) and, as 1 - sin(x)/x <= 1.2173,
        # phi <= 2.4346/(pi R t^2)
        return R / (3 * math.pi) + 2.4346 / (math.pi * R)

    def tail_mass(self, T: float) -> float:
        """Bound on ``integral_{|t| > T} phi``."""
        return 2 * self.decay_constant / max(T, 1e-300)

    def transform_pair_error(self, nodes: int = 4000) -> float:
        """Max deviation between ``phi`` and the inverse transform of ``phihat``.

        ``phi(t) = (1/pi) integral_0^R phihat(tau) cos(tau t) dtau`` is computed
        by Gauss-Legendre quadrature on the compact support.
        """
        x, w = np.polynomial.legendre.leggauss(200)
        tau = 0.5 * self.R * (x + 1)
        w = 0.5 * self.R * w
        t = np.linspace(-40.0 / self.R, 40.0 / self.R, nodes // 10 + 1)
        inv = (w * self.ft(tau)) @ np.cos(np.outer(tau, t)) / math.pi
        return float(np.max(np.abs(inv - self(t))))

    def periodized(self, t, period: float, M: int) -> tuple[np.ndarray, float]:
        """``Phi(t) = sum_m phi(t + m T)`` for ``t`` in ``[0, T)``.

        Terms with ``|m| <= M`` are summed directly; the rest of the
        ``1/(pi R tau^2)`` envelope is added in closed form via Hurwitz zeta.
        Returns the values and a bound on the remaining (oscillatory) tail.
        """
        t = np.asarray(t, dtype=float)
        T = float(period)
        R = self.R
        vals = np.zeros_like(t)
        for m in range(-M, M + 1):
            vals = vals + self(t + m * T)
        u = t / T
        q_pos = M + 1 + u  # m >= M+1:  (t + mT)^2 = T^2 (m + u)^2
        q_neg = M + 1 - u  # m <= -M-1: (t + mT)^2 = T^2 (n - u)^2
        env = (_hurwitz2(q_pos) + _hurwitz2(q_neg)) / T**2
        if self.family == "fejer":
            # phi = (1 - cos(R tau)) / (pi R tau^2)
            vals = vals + env / (math.pi * R)
            osc, bound = self._fejer_oscillatory_tail(t, T, M, env)
            vals = vals - osc / (math.pi * R)
            return vals, bound / (math.pi * R)
        # phi = 2/(pi R tau^2) - 2 sin(R tau)/(pi R^2 tau^3)
        vals = vals + 2 * env / (math.pi * R)
        bound = 2 / (math.pi * R**2 * T**3) * float(
            np.max(zeta(3.0, q_pos) + zeta(3.0, q_neg))
        )
        return vals, bound

    def _fejer_oscillatory_tail(self, t, T, M, env):
        """Estimate and bound ``sum_{|m|>M} cos(R(t+mT)) / (t+mT)^2``.

        If ``R T`` is close to a multiple of 2 pi, the cosine is nearly
        ``cos(R t)`` for every ``m``; otherwise summation by parts bounds
        the sum by ``f_{M+1} / |sin(R T / 2)|`` on each side.
        """
        R = self.R
        RT = R * T
        nu = round(RT / (2 * math.pi))
        delta = abs(RT - 2 * math.pi * nu) + 8 * _EPS * RT
        first = 1 / ((M + 1) * T - np.abs(t)) ** 2
        s = abs(math.sin(RT / 2))
        dirichlet = 2 * float(np.max(first)) / s if s > 0 else math.inf
        # commensurate route: |cos(Rt + m delta) - cos(Rt)| <= min(2, |m| delta)
        # with (t + mT)^2 >= ((|m| - 1) T)^2 on both sides
        if M >= 1 and delta * (M + 1) < 2:
            cut = 2 / delta
            near = delta / T**2 * (1 + 1 / M) * (math.log(cut / M) + 1 / M)
            far = 2 / (T**2 * max(cut - 2, 1.0))
            commensurate = 2 * (near + far)
        else:
            commensurate = math.inf
        if commensurate < dirichlet:
            return np.cos(R * t) * env, commensurate
        return np.zeros_like(t), dirichlet
