"""Wigner pairings of free Gaussian packets on R^d.

Symbols are products ``chi(x) b(xi)`` with ``chi`` a bump (or a Gaussian)
in ``x`` and ``b`` an :class:`~wignerlab.symbols.XiProfile`.  The Wigner
function of a packet is an explicit Gaussian, and free evolution acts on it
by the shear ``W_t(x, xi) = W_0(x - s xi, xi)``, ``s = alpha_h t``.  Hence

    integral phi(t) <W_t, a> dt
        = E_{(y, xi) ~ W_0}[ b(xi) integral phi(t) chi(y + alpha_h t xi) dt ]

and the inner integral runs over the chord of the line through ``y`` in
direction ``xi`` with the support ball of ``chi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pairings import PairingValue
from .propagators import GaussianPacket, TimeScale, wigner_gaussian
from .symbols import XiProfile
from .windows import TestWindow

X_FAMILIES = ("bump", "gaussian")


@dataclass(frozen=True)
class EuclideanSymbol:
    """``a(x, xi) = chi(x) b(xi)`` on R^d x R^d.

    ``chi`` is ``exp(1 - 1/(1 - |x-c|^2/rho^2))`` inside the ball of radius
    ``rho`` (family ``bump``) or ``exp(-|x-c|^2/rho^2)`` (``gaussian``).
    """

    center: tuple[float, ...]
    radius: float
    profile: XiProfile
    family: str = "bump"

    def __post_init__(self):
        if self.family not in X_FAMILIES:
            raise ValueError(f"unknown x-family {self.family!r}")
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        if len(c) != self.profile.dim:
            raise ValueError("x and xi parts differ in dimension")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def support_radius(self) -> float:
        return self.radius if self.family == "bump" else 8.0 * self.radius / math.sqrt(2.0)

    def chi(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = x - np.asarray(self.center)
        u = np.sum(y * y, axis=-1) / self.radius**2
        if self.family == "gaussian":
            return np.where(u <= self.support_radius**2 / self.radius**2, np.exp(-u), 0.0)
        u = np.minimum(u, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(u < 1.0, np.exp(1.0 - 1.0 / (1.0 - u)), 0.0)

    def __call__(self, x, xi) -> np.ndarray:
        return self.chi(x) * self.profile(xi)


def _hermite(n: int):
    # nodes/weights for E[f(Z)], Z ~ N(0, 1)
    x, w = np.polynomial.hermite.hermgauss(n)
    return math.sqrt(2.0) * x, w / math.sqrt(math.pi)


def _tensor_normal(mean: np.ndarray, cov: np.ndarray, counts: list[int]):
    """Tensor Gauss-Hermite nodes for ``N(mean, cov)`` (one count per axis)."""
    L = np.linalg.cholesky(cov)
    rules = [_hermite(n) for n in counts]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    z = np.stack([g.reshape(-1) for g in grids], axis=1)
    w = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=1), axis=1)
    return mean + z @ L.T, w


def pairing_free(packet: GaussianPacket, symbol: EuclideanSymbol, nodes: int = 24) -> PairingValue:
    """``<W, a>`` for a Gaussian packet, by Gauss-Hermite over its Wigner law.

    The budget is the change when the node count grows by eight.
    """
    if packet.dim != symbol.dim:
        raise ValueError("dimension mismatch")
    g = wigner_gaussian(packet)
    d = packet.dim

    def run(n):
        z, w = _tensor_normal(g.mean, g.cov, [n] * (2 * d))
        return complex(np.sum(w * symbol(z[:, :d], z[:, d:])))

    a, b = run(nodes), run(nodes + 8)
    return PairingValue(b, abs(a - b))


def _ball_nodes(d: int, radius: float, n: int):
    """Gauss-Legendre nodes on the ball ``|z| <= radius`` (d = 1 or 2)."""
    x, w = np.polynomial.legendre.leggauss(n)
    if d == 1:
        return (radius * x)[:, None], radius * w
    if d != 2:
        raise NotImplementedError("free time-averaged pairings support d <= 2")
    # outer coordinate b in [-r, r], inner a in [-sqrt(r^2 - b^2), +]
    b = radius * x
    half = np.sqrt(np.maximum(radius**2 - b**2, 0.0))
    a = half[:, None] * x[None, :]
    pts = np.stack([a.reshape(-1), np.repeat(b, n)], axis=1)
    wts = (radius * w[:, None] * half[:, None] * w[None, :]).reshape(-1)
    return pts, wts


def _xi_rule(mean: np.ndarray, var: float, n: int):
    """Nodes and weights for ``E[f(xi)]``, ``xi ~ N(mean, var I)``.

    The time-averaged integrand has a ``|xi|`` kink at the origin (the window
    decays only like ``1/t^2``), which spoils Gauss-Hermite convergence once
    the origin lies within reach of the Gaussian.  In that case the rule
    splits at 0 (d = 1) or switches to polar coordinates about 0 (d = 2),
    where the integrand is smooth; Gauss-Legendre then covers 8 standard
    deviations.  Otherwise a tensor Gauss-Hermite rule is used.
    """
    d = len(mean)
    sd = math.sqrt(var)
    r0 = float(np.linalg.norm(mean))
    if r0 >= 8.0 * sd:
        return _tensor_normal(mean, var * np.eye(d), [n] * d)
    m = n + 12
    gx, gw = np.polynomial.legendre.leggauss(m)
    if d == 1:
        lo, hi = mean[0] - 8 * sd, mean[0] + 8 * sd
        pts, wts = [], []
        for a, b in ((lo, min(hi, 0.0)), (max(lo, 0.0), hi)):
            if b > a:
                pts.append(0.5 * (b - a) * (gx + 1) + a)
                wts.append(0.5 * (b - a) * gw)
        x = np.concatenate(pts)
        w = np.concatenate(wts) * np.exp(-0.5 * (x - mean[0]) ** 2 / var) / math.sqrt(2 * math.pi * var)
        return x[:, None], w
    if d != 2:
        raise NotImplementedError("free time-averaged pairings support d <= 2")
    top = r0 + 8 * sd
    rho = 0.5 * top * (gx + 1)
    rw = 0.5 * top * gw * rho
    theta = 2 * math.pi * np.arange(m) / m
    R, T = np.meshgrid(rho, theta, indexing="ij")
    xi = np.stack([(R * np.cos(T)).reshape(-1), (R * np.sin(T)).reshape(-1)], axis=1)
    w = np.repeat(rw, m) * (2 * math.pi / m)
    dens = np.exp(-0.5 * np.sum((xi - mean) ** 2, axis=1) / var) / (2 * math.pi * var)
    w = w * dens
    # nodes beyond ~9 standard deviations carry weight below 1e-17
    keep = w > 1e-17 * float(np.max(w))
    return xi[keep], w[keep]


def pairing_free_time_averaged(
    packet: GaussianPacket,
    symbol: EuclideanSymbol,
    scale: TimeScale,
    window: TestWindow,
    nodes_xi: int = 20,
    nodes_x: int = 48,
    nodes_t: int = 8,
) -> PairingValue:
    """``integral phi(t) <W_{u(t)}, a> dt`` for a free Gaussian packet.

    Conditionally on ``xi`` the position is Gaussian, ``N(m(xi), v I)``.
    Writing ``q = z - m(xi)`` for ``z`` in the support of ``chi``, the time
    integral of the sheared Gaussian factorizes into the transverse density
    of ``q`` times ``E[phi(tau)] / (alpha |xi|)`` with
    ``tau ~ N(q.e / (alpha |xi|), v / (alpha |xi|)^2)``, ``e = xi / |xi|``.
    Quadrature: :func:`_xi_rule` in ``xi``, Gauss-Legendre over the support
    ball in coordinates aligned with ``e``, Gauss-Hermite in ``tau``.  The
    budget is the change under refining every node count.
    """
    if packet.dim != symbol.dim:
        raise ValueError("dimension mismatch")
    d = packet.dim
    alpha = scale.alpha_of(packet.h)
    g = wigner_gaussian(packet)
    cxx, cxk, ckk = g.cov[0, 0], g.cov[0, d], g.cov[d, d]
    v = cxx - cxk * cxk / ckk  # conditional variance of x given xi
    mx, mk = g.mean[:d], g.mean[d:]
    rho = symbol.support_radius
    c = np.asarray(symbol.center)

    def run(nk, nz, nt):
        xis, wk = _xi_rule(mk, ckk, nk)
        bval = symbol.profile(xis)
        norm = np.linalg.norm(xis, axis=1)
        keep = (bval != 0) & (norm > 0) & (wk != 0)
        xis, wk, bval, norm = xis[keep], wk[keep], bval[keep], norm[keep]
        zloc, wz = _ball_nodes(d, rho, nz)
        ht, hw = _hermite(nt)
        total = 0j
        # chunks of xi nodes keep the (xi, z, tau) arrays small
        for s in range(0, len(xis), 64):
            xi, w0, b, nrm = xis[s : s + 64], wk[s : s + 64], bval[s : s + 64], norm[s : s + 64]
            speed = alpha * nrm
            e = xi / nrm[:, None]
            if d == 2:
                frame = np.stack([e, np.stack([-e[:, 1], e[:, 0]], axis=1)], axis=1)
            else:
                frame = e[:, None, :]
            z = c + np.einsum("pi,bij->bpj", zloc, frame)
            m = mx + cxk / ckk * (xi - mk)
            q = z - m[:, None, :]
            qe = np.einsum("bpj,bj->bp", q, e)
            qperp2 = np.maximum(np.sum(q * q, axis=2) - qe * qe, 0.0)
            trans = (2 * math.pi * v) ** (-(d - 1) / 2) * np.exp(-qperp2 / (2 * v))
            tau = (qe / speed[:, None])[:, :, None] + (math.sqrt(v) / speed)[:, None, None] * ht
            ephi = window(tau) @ hw
            inner = np.sum(wz * symbol.chi(z) * trans * ephi, axis=1) / speed
            total += complex(np.sum(w0 * b * inner))
        return total

    a = run(nodes_xi, nodes_x, nodes_t)
    b = run(nodes_xi + 8, nodes_x + 16, nodes_t + 4)
    return PairingValue(b, abs(a - b))
