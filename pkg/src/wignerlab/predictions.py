"""Limiting values of pairings predicted by the semiclassical theory.

Each prediction is a functional on symbols (and windows when time averaged);
no measure is ever materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exact import as_exact, is_resonant, is_zero_vector, to_float
from .lattice import LatticeState, PairIndex, density_coefficients, l2_norm
from .propagators import squared_norms
from .symbols import TorusSymbol, average_along, evaluate
from .windows import TestWindow

KINDS = (
    "mu0-planewave",
    "mu0-pointmass",
    "mu1-resonant",
    "mu2-uniform",
    "zoll-average",
    "torus-average",
    "zero",
)


def _vec(xi0) -> np.ndarray:
    return np.array([to_float(c) if not isinstance(c, float) else c for c in xi0], dtype=float)


def predict_mu0_planewave(rho: LatticeState, xi0: Sequence, symbol: TorusSymbol) -> complex:
    """``integral a(x, xi0) |rho(x)|^2 dx``."""
    xi = _vec(xi0)
    shifts = [tuple(-c for c in l) for l in symbol.terms]
    dens = density_coefficients(rho, shifts)
    vol = (2 * math.pi) ** rho.dim
    total = 0j
    for l in symbol.terms:
        total += complex(symbol.coefficient(l, xi)) * vol * dens[tuple(-c for c in l)]
    return total


def predict_mu0_pointmass(x0: Sequence[float], xi0: Sequence, symbol: TorusSymbol) -> complex:
    """``a(x0, xi0)``: the measure of a coherent state at ``(x0, xi0)``."""
    return complex(evaluate(symbol, np.asarray(x0, dtype=float), _vec(xi0)))


def predict_mu1(rho: LatticeState, xi0: Sequence[int], symbol: TorusSymbol, window: TestWindow) -> complex:
    """Time-averaged limit for the plane-wave family at a resonant carrier.

    ``sum_{l.xi0 = 0} sum_{j - k = l} c_l(xi0) phihat((|k|^2 - |j|^2)/2)
    rhohat(k) conj(rhohat(j))``.
    """
    xi0 = [int(c) for c in xi0]
    xi = np.asarray(xi0, dtype=float)
    index = PairIndex(rho)
    norms = squared_norms(rho)
    total = 0j
    for l in symbol.terms:
        if int(np.dot(l, xi0)) != 0:
            continue
        ik, ij = index.pairs(l)
        if not len(ik):
            continue
        w = rho.amps[ik] * np.conj(rho.amps[ij])
        dn = (norms[ik] - norms[ij]).astype(float)
        total += complex(symbol.coefficient(l, xi)) * complex(np.sum(w * window.ft(0.5 * dn)))
    return total


def predict_mu1_density_form(
    rho: LatticeState, xi0: Sequence[int], symbol: TorusSymbol, window: TestWindow
) -> complex:
    """Same limit as :func:`predict_mu1`, written as a position pairing.

    ``integral phi(t) integral a_res(x, xi0) |exp(i t Delta / 2) rho|^2 dx dt``
    with ``a_res`` the resonant part of the symbol; computed from the
    density coefficients of the evolved profile over one revival period by
    the time-quadrature oracle (rate 1, h = 1).
    """
    from .pairings import oracle_time_quadrature
    from .propagators import TimeScale
    from .symbols import XiProfile

    xi = np.asarray([int(c) for c in xi0], dtype=float)
    terms = []
    for l in symbol.terms:
        if int(np.dot(l, [int(c) for c in xi0])) == 0:
            c = complex(symbol.coefficient(l, xi))
            if c != 0:
                terms.append((l, XiProfile("constant", (0.0,) * rho.dim, 1.0, c)))
    xsym = TorusSymbol(rho.dim, terms)
    return oracle_time_quadrature(rho, xsym, 1.0, TimeScale("constant", alpha=1.0), window, tol=1e-10).value


def predict_mu2(rho: LatticeState, xi0: Sequence, symbol: TorusSymbol, window: TestWindow) -> complex:
    """``(integral phi) |rho|^2 c_0(xi0)``: uniform position density."""
    zero = (0,) * symbol.dim
    c0 = complex(symbol.coefficient(zero, _vec(xi0))) if zero in symbol.terms else 0j
    return window.mass * l2_norm(rho) ** 2 * c0


def predict_zoll(x0: Sequence[float], xi0: Sequence, symbol: TorusSymbol) -> complex:
    """Average of ``a`` over the closed orbit through ``(x0, xi0)`` on the circle."""
    if symbol.dim != 1:
        raise ValueError("the Zoll prediction is implemented for the circle (d = 1)")
    xi0 = list(xi0)
    if len(xi0) != 1:
        raise ValueError("xi0 must be one-dimensional")
    v = xi0[0]
    if isinstance(v, float):
        if v == 0:
            raise ValueError("xi0 = 0 is excluded (the orbit is trivial)")
        direction = [1 if v > 0 else -1]
        xf = v
    else:
        if is_zero_vector([v]):
            raise ValueError("xi0 = 0 is excluded (the orbit is trivial)")
        direction = [as_exact(v)]
        xf = to_float(v)
    avg = average_along(symbol, direction)
    return complex(evaluate(avg, np.asarray([float(x0[0])]), np.asarray([xf])))


def predict_torus_average(x0: Sequence[float], xi0: Sequence, symbol: TorusSymbol) -> complex:
    """``c_0(xi0)`` for a non-resonant exact direction."""
    if is_resonant(xi0):
        raise ValueError("xi0 is resonant; the averaging limit is not a function of mu0 alone")
    avg = average_along(symbol, xi0)
    return complex(evaluate(avg, np.asarray(x0, dtype=float), _vec(xi0)))


def predict_dispersion() -> float:
    return 0.0


@dataclass(frozen=True)
class MeasurePrediction:
    """A named prediction with its parameters; call it on a symbol."""

    kind: str
    rho: LatticeState | None = None
    xi0: tuple = ()
    x0: tuple = ()
    window: TestWindow | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown prediction kind {self.kind!r}")
        if self.kind in ("mu1-resonant", "mu2-uniform") and self.window is None:
            raise ValueError(f"{self.kind} needs a window")

    def __call__(self, symbol: TorusSymbol | None = None) -> complex:
        k = self.kind
        if k == "mu0-planewave":
            return predict_mu0_planewave(self.rho, self.xi0, symbol)
        if k == "mu0-pointmass":
            return predict_mu0_pointmass(self.x0, self.xi0, symbol)
        if k == "mu1-resonant":
            return predict_mu1(self.rho, self.xi0, symbol, self.window)
        if k == "mu2-uniform":
            return predict_mu2(self.rho, self.xi0, symbol, self.window)
        if k == "zoll-average":
            return predict_zoll(self.x0, self.xi0, symbol)
        if k == "torus-average":
            return predict_torus_average(self.x0, self.xi0, symbol)
        return 0j
