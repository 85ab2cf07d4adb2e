"""Exact Schrödinger propagation at rescaled time ``alpha_h t``.

On the torus the flow ``exp(i alpha_h h t Delta / 2)`` is diagonal:
``uhat(k) -> exp(-i r t |k|^2 / 2) uhat(k)`` with ``r = alpha_h h``.
On R^d only Gaussian packets are propagated, in closed form.  The
classical flow moves ``x`` with velocity ``xi`` (generator ``|xi|^2 / 2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .lattice import LatticeState
from .phase import dd_mul, reduce_phase, two_sum

RULES = ("reciprocal", "power", "constant", "table")


@dataclass(frozen=True)
class TimeScale:
    """The rescaling ``h -> alpha_h``.

    ``reciprocal``: ``alpha_h = 1/h``; ``power``: ``alpha_h = h^-gamma``;
    ``constant``: ``alpha_h = alpha``; ``table``: explicit ``(h, alpha)``.
    """

    rule: str = "reciprocal"
    gamma: float = 1.0
    alpha: float | None = None
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown time-scale rule {self.rule!r}")
        if self.rule == "power" and not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")
        if self.rule == "constant" and not (self.alpha is not None and self.alpha > 0):
            raise ValueError("constant rule needs alpha > 0")
        if self.rule == "table":
            tab = tuple((float(h), float(a)) for h, a in self.table)
            if not tab or any(a <= 0 or h <= 0 for h, a in tab):
                raise ValueError("table entries need positive h and alpha")
            object.__setattr__(self, "table", tab)

    def _lookup(self, h: float) -> float:
        for hh, a in self.table:
            if hh == h:
                return a
        raise KeyError(f"h = {h!r} is not in the time-scale table")

    def alpha_of(self, h: float) -> float:
        if self.rule == "reciprocal":
            return 1.0 / h
        if self.rule == "power":
            return h ** (-self.gamma)
        if self.rule == "constant":
            return float(self.alpha)
        return self._lookup(h)

    def rate(self, h: float) -> float:
        """``r = alpha_h h``, computed without forming ``alpha_h`` first."""
        if self.rule == "reciprocal":
            return 1.0
        if self.rule == "power":
            return 1.0 if self.gamma == 1 else h ** (1.0 - self.gamma)
        if self.rule == "constant":
            return float(self.alpha) * h
        return self._lookup(h) * h

    @property
    def within_hypothesis(self) -> bool:
        """True when ``alpha_h = o(1/h^2)``; flat tori need no such restriction."""
        if self.rule == "power":
            return self.gamma < 2
        return True

    def to_json(self) -> dict:
        out: dict = {"rule": self.rule}
        if self.rule == "power":
            out["gamma"] = self.gamma
        if self.rule == "constant":
            out["alpha"] = self.alpha
        if self.rule == "table":
            out["table"] = [list(p) for p in self.table]
        return out

    @classmethod
    def from_json(cls, obj) -> "TimeScale":
        return cls(
            rule=obj.get("rule", "reciprocal"),
            gamma=float(obj.get("gamma", 1.0)),
            alpha=obj.get("alpha"),
            table=tuple(tuple(p) for p in obj.get("table", ())),
        )


def squared_norms(state: LatticeState) -> np.ndarray:
    return np.sum(state.modes * state.modes, axis=1)


def evolve_torus(state: LatticeState, h: float, scale: TimeScale, t: float) -> LatticeState:
    """Apply ``exp(i alpha_h h t Delta / 2)`` exactly.

    The phase ``(r t / 2) |k|^2`` is reduced modulo 2 pi in double-double
    arithmetic; ``r t / 2`` is formed as an exact two-term product.
    """
    if t == 0 or not len(state):
        return state
    x_hi, x_lo = dd_mul(scale.rate(h), t)
    x_hi, x_lo = 0.5 * x_hi, 0.5 * x_lo
    theta = reduce_phase(x_hi, x_lo, squared_norms(state))
    return state.with_amps(state.amps * np.exp(-1j * theta))


@dataclass(frozen=True)
class GaussianPacket:
    """``u(x) = N exp(-|y|^2 / (2 h w) + i xi0.y / h + i theta)``, ``y = x - x0``.

    ``w`` is the complex width: ``sigma^2`` initially and ``sigma^2 + i s``
    after rescaled time ``s``.  ``N`` makes the L2 norm one.
    """

    x0: tuple[float, ...]
    xi0: tuple[float, ...]
    sigma: float
    h: float
    width: complex | None = None
    theta: float = 0.0

    def __post_init__(self):
        x0 = tuple(float(c) for c in np.atleast_1d(self.x0))
        xi0 = tuple(float(c) for c in np.atleast_1d(self.xi0))
        if len(x0) != len(xi0):
            raise ValueError("x0 and xi0 differ in dimension")
        if not (self.sigma > 0 and self.h > 0):
            raise ValueError("sigma and h must be positive")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "xi0", xi0)
        w = complex(self.sigma**2) if self.width is None else complex(self.width)
        if w.real <= 0:
            raise ValueError("complex width needs a positive real part")
        object.__setattr__(self, "width", w)

    @property
    def dim(self) -> int:
        return len(self.x0)

    @property
    def normalization(self) -> complex:
        d = self.dim
        s2 = self.sigma**2
        return (math.pi * self.h * s2) ** (-d / 4) * (s2 / self.width) ** (d / 2)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = x - np.asarray(self.x0)
        yy = np.sum(y * y, axis=-1)
        phase = (y @ np.asarray(self.xi0)) / self.h + self.theta
        return self.normalization * np.exp(-yy / (2 * self.h * self.width) + 1j * phase)

    def density(self, x) -> np.ndarray:
        """``|u(x)|^2`` in closed form."""
        x = np.asarray(x, dtype=float)
        y = x - np.asarray(self.x0)
        yy = np.sum(y * y, axis=-1)
        a = (1.0 / self.width).real
        return (a / (math.pi * self.h)) ** (self.dim / 2) * np.exp(-a * yy / self.h)


def evolve_free(packet: GaussianPacket, scale: TimeScale, t: float) -> GaussianPacket:
    """Free evolution by ``exp(i alpha_h h t Delta / 2)`` on R^d.

    With ``s = alpha_h t`` the center moves to ``x0 + s xi0``, the complex
    width becomes ``w + i s`` and the phase advances by ``s |xi0|^2 / (2h)``.
    """
    if t == 0:
        return packet
    s = scale.alpha_of(packet.h) * t
    xi0 = np.asarray(packet.xi0)
    x0 = tuple(float(v) for v in np.asarray(packet.x0) + s * xi0)
    xx = float(xi0 @ xi0)
    ph, pl = dd_mul(s / (2 * packet.h), xx)
    ph, pl = two_sum(ph, pl)
    theta = float(reduce_phase(ph, pl, np.array([1], dtype=np.int64))[0])
    theta = math.remainder(packet.theta + theta, 2 * math.pi)
    return replace(packet, x0=x0, width=packet.width + 1j * s, theta=theta)


@dataclass(frozen=True)
class PhaseSpaceGaussian:
    """Normal density on R^d x R^d with mean ``(x, xi)`` and covariance."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.mean) // 2

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        y = z - self.mean
        inv = np.linalg.inv(self.cov)
        q = np.einsum("...i,ij,...j->...", y, inv, y)
        n = len(self.mean)
        return np.exp(-0.5 * q) / math.sqrt((2 * math.pi) ** n * np.linalg.det(self.cov))


def wigner_gaussian(packet: GaussianPacket) -> PhaseSpaceGaussian:
    """The exact Wigner function of a Gaussian packet.

    For ``w = a + i b``: ``Cov(xi) = h / (2a)``, ``Cov(x, xi) = h b / (2a)``,
    ``Cov(x) = h |w|^2 / (2a)`` per coordinate.
    """
    d = packet.dim
    a, b = packet.width.real, packet.width.imag
    h = packet.h
    eye = np.eye(d)
    cov = np.block(
        [
            [h * abs(packet.width) ** 2 / (2 * a) * eye, h * b / (2 * a) * eye],
            [h * b / (2 * a) * eye, h / (2 * a) * eye],
        ]
    )
    mean = np.concatenate([np.asarray(packet.x0), np.asarray(packet.xi0)])
    return PhaseSpaceGaussian(mean=mean, cov=cov)
