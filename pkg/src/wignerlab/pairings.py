"""Wigner pairings on the torus.

For a state ``u`` and symbol ``a = sum_l c_l(xi) exp(i l.x)``:

    <W_u^h, a> = sum_{k, j : j - k = l} uhat(k) conj(uhat(j)) c_l(h (k + j) / 2)

which is the exact Weyl pairing ``<op_h(a) u, u>`` on T^d.  Averaging the
evolved pairing against ``phi(t) dt`` multiplies each pair by
``phihat(r (|k|^2 - |j|^2) / 2)`` with ``r = alpha_h h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .lattice import LatticeState, PairIndex, density_coefficients
from .propagators import TimeScale, evolve_torus, squared_norms
from .symbols import TorusSymbol
from .windows import TestWindow

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PairingValue:
    """A computed pairing with its accumulated error budget."""

    value: complex
    budget: float = 0.0
    within_tolerance: bool = True

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if not self.budget >= 0:
            raise ValueError("error budget must be nonnegative")

    @property
    def real(self) -> float:
        return self.value.real


def _pair_terms(state: LatticeState, symbol: TorusSymbol, index: PairIndex | None = None):
    """Yield ``(l, w, ksum, profiles)`` for every symbol frequency with pairs.

    ``w = uhat(k) conj(uhat(k + l))`` and ``ksum = 2k + l`` (int64).
    """
    if state.dim != symbol.dim:
        raise ValueError(f"state has dimension {state.dim}, symbol {symbol.dim}")
    if not len(state) or not len(symbol):
        return
    index = index or PairIndex(state)
    for l, profiles in symbol.terms.items():
        ik, ij = index.pairs(l)
        if not len(ik):
            continue
        w = state.amps[ik] * np.conj(state.amps[ij])
        ksum = state.modes[ik] + state.modes[ij]
        yield l, w, ksum, profiles


def pairing_instantaneous(state: LatticeState, symbol: TorusSymbol, h: float) -> PairingValue:
    """``<W_u^h, a>`` by the lattice double sum (cost linear in the support)."""
    total = 0j
    budget = 0.0
    for l, w, ksum, profiles in _pair_terms(state, symbol):
        xi = (0.5 * h) * ksum.astype(float)
        aw = float(np.sum(np.abs(w)))
        for p in profiles:
            total += complex(np.sum(w * p(xi)))
            budget += p.truncation_error * aw
    return PairingValue(total, budget)


def pairing_time_averaged(
    state: LatticeState,
    symbol: TorusSymbol,
    h: float,
    scale: TimeScale,
    window: TestWindow,
) -> PairingValue:
    """``integral phi(t) <W^h(evolve(u, t)), a> dt`` in closed form.

    Pairs whose frequency ``r (|k|^2 - |j|^2) / 2`` lies outside the open
    support of ``phihat`` are skipped, so they contribute exactly zero.
    """
    r = scale.rate(h)
    total = 0j
    budget = 0.0
    index = PairIndex(state) if len(state) else None
    for l, w, ksum, profiles in _pair_terms(state, symbol, index):
        # |k|^2 - |j|^2 = (k - j).(k + j) = -l.(2k + l), exact in int64
        dn = -(ksum @ np.asarray(l, dtype=np.int64))
        omega = 0.5 * r * dn.astype(float)
        live = np.abs(omega) < window.R
        if not np.any(live):
            continue
        wt = w[live] * window.ft(omega[live])
        xi = (0.5 * h) * ksum[live].astype(float)
        aw = float(np.sum(np.abs(wt)))
        for p in profiles:
            total += complex(np.sum(wt * p(xi)))
            budget += p.truncation_error * aw
    return PairingValue(total, budget)


def pairing_sup_bound(state: LatticeState, symbol: TorusSymbol, h: float) -> float:
    """A priori bound on ``sup_t |<W^h(evolve(u, t)), a>|``.

    Evolution only rotates amplitudes, so ``sum |w| sup|c_l|`` over pairs
    is time independent.
    """
    out = 0.0
    for l, w, ksum, profiles in _pair_terms(state, symbol):
        xi = (0.5 * h) * ksum.astype(float)
        sup = np.zeros(len(w))
        for p in profiles:
            sup = sup + np.abs(p(xi)) + p.truncation_error
        out += float(np.sum(np.abs(w) * sup))
    return out


def _truncation_budget(state: LatticeState, symbol: TorusSymbol) -> float:
    out = 0.0
    for l, w, ksum, profiles in _pair_terms(state, symbol):
        out += float(np.sum(np.abs(w))) * sum(p.truncation_error for p in profiles)
    return out


def _simpson_periodic(f: np.ndarray, step: float) -> complex:
    # composite Simpson on one period with f[N] = f[0]; N = len(f) even
    w = np.where(np.arange(len(f)) % 2 == 1, 4.0, 2.0)
    return step / 3.0 * complex(np.sum(w * f))


def oracle_time_quadrature(
    state: LatticeState,
    symbol: TorusSymbol,
    h: float,
    scale: TimeScale,
    window: TestWindow,
    horizon: float | None = None,
    step: float | None = None,
    tol: float = 1e-6,
    max_points: int = 2**20,
) -> PairingValue:
    """Independent check of :func:`pairing_time_averaged` by time quadrature.

    The evolved pairing ``P(t)`` is evaluated as a black box
    (``pairing_instantaneous`` after ``evolve_torus``).  Because the torus
    flow makes ``P`` periodic with period ``Tp = 4 pi / r``, the integral over
    the whole line is folded onto one period:
    ``integral phi P = integral_0^Tp P(t) Phi(t) dt`` with the periodized
    window ``Phi``.  Copies within ``horizon`` (all copies ``|m| <= M``) are
    summed directly, the rest of the ``1/t^2`` envelope in closed form, and
    the residual oscillatory tail is bounded.  The period integral uses
    composite Simpson on ``step`` (or adaptive doubling), which is exact
    once the band-limited integrand is resolved.
    """
    if state.dim != symbol.dim:
        raise ValueError("dimension mismatch")
    r = scale.rate(h)
    if not r > 0:
        raise ValueError("time scale must give a positive rate")
    if not len(state) or not len(symbol):
        return PairingValue(0j, 0.0, True)
    Tp = 4 * math.pi / r
    sup_p = pairing_sup_bound(state, symbol, h)

    def P(ts):
        return np.array(
            [pairing_instantaneous(evolve_torus(state, h, scale, t), symbol, h).value for t in ts]
        )

    # number of direct periodized copies
    if horizon is not None:
        M = max(1, math.ceil(horizon / Tp))
        fixed_m = True
    else:
        M, fixed_m = 8, False

    # time grid: the integrand is a trigonometric polynomial in 2 pi t / Tp
    # with harmonics below max|k^2 - j^2| + 2R/r, and the trapezoid part of
    # Simpson's rule is exact once N/2 exceeds that.
    harmonics = max(
        (int(np.max(np.abs(ksum @ np.asarray(l, dtype=np.int64)))) for l, _, ksum, _ in _pair_terms(state, symbol)),
        default=0,
    ) + math.ceil(2 * window.R / r)
    if step is not None:
        N = max(8, 4 * math.ceil(Tp / (4 * step)))
        fixed_n = True
    else:
        N = 64
        while N < 2 * harmonics + 4 and 2 * N <= max_points:
            N *= 2
        fixed_n = False

    t = np.arange(N) * (Tp / N)
    vals = P(t)
    prev = None
    while True:
        Phi, tail = window.periodized(t, Tp, M)
        while not fixed_m and tail * Tp * sup_p > tol / 8 and M < 2**16:
            M *= 2
            Phi, tail = window.periodized(t, Tp, M)
        est = _simpson_periodic(vals * Phi, Tp / N)
        if fixed_n:
            quad_err = abs(est - _simpson_periodic(vals[::2] * Phi[::2], 2 * Tp / N))
            break
        if prev is not None:
            quad_err = abs(est - prev)
            if quad_err <= tol / 8 or 2 * N > max_points:
                break
        prev = est
        # refine: keep old samples, add the midpoints
        mid = t + Tp / (2 * N)
        new = P(mid)
        t2 = np.empty(2 * N)
        v2 = np.empty(2 * N, dtype=complex)
        t2[0::2], t2[1::2] = t, mid
        v2[0::2], v2[1::2] = vals, new
        t, vals, N = t2, v2, 2 * N

    rounding = 16 * _EPS * Tp * sup_p * float(np.max(Phi)) + 16 * _EPS * abs(est)
    budget = tail * Tp * sup_p + quad_err + rounding
    budget += window.mass * _truncation_budget(state, symbol)
    return PairingValue(est, budget, budget <= tol)


def pairing_position_density(state: LatticeState, xsymbol: TorusSymbol) -> PairingValue:
    """``integral a(x) |u(x)|^2 dx`` for a symbol with constant profiles."""
    if state.dim != xsymbol.dim:
        raise ValueError("dimension mismatch")
    if not xsymbol.is_xi_independent:
        raise ValueError("position pairing needs xi-independent (constant) profiles")
    coeffs = density_coefficients(state, [tuple(-c for c in l) for l in xsymbol.terms])
    vol = (2 * math.pi) ** state.dim
    total = 0j
    for l, profiles in xsymbol.terms.items():
        amp = sum(p.amp for p in profiles)
        total += amp * vol * coeffs[tuple(-c for c in l)]
    return PairingValue(total, 0.0)


class HOscillation(NamedTuple):
    below: float
    inside: float
    above: float


def h_oscillation_profile(state: LatticeState, h: float, lower: float, upper: float) -> HOscillation:
    """Mass fractions with ``|h k|^2`` below, inside or above ``[lower, upper]``."""
    if not lower < upper:
        raise ValueError("need lower < upper")
    mass = np.abs(state.amps) ** 2
    total = float(np.sum(mass))
    if total == 0:
        return HOscillation(0.0, 0.0, 0.0)
    e = h * h * squared_norms(state).astype(float)
    below = float(np.sum(mass[e < lower])) / total
    above = float(np.sum(mass[e > upper])) / total
    inside = float(np.sum(mass[(e >= lower) & (e <= upper)])) / total
    return HOscillation(below, inside, above)


def pairing_time_derivative_fd(
    state: LatticeState, symbol: TorusSymbol, h: float, scale: TimeScale, t: float = 0.0, step: float = 1e-5
) -> complex:
    """Five-point centered difference of ``t -> <W^h(evolve(u, t)), a>``."""

    def P(s):
        return pairing_instantaneous(evolve_torus(state, h, scale, t + s), symbol, h).value

    return (P(-2 * step) - 8 * P(-step) + 8 * P(step) - P(2 * step)) / (12 * step)


def pairing_time_derivative(
    state: LatticeState, symbol: TorusSymbol, h: float, scale: TimeScale, t: float = 0.0
) -> complex:
    """Exact derivative: ``-(alpha_h / 2) <W^h(evolve(u, t)), {a, |xi|^2}>``."""
    from .symbols import poisson_bracket_with_p

    ut = evolve_torus(state, h, scale, t)
    return -0.5 * scale.alpha_of(h) * pairing_instantaneous(ut, poisson_bracket_with_p(symbol), h).value
