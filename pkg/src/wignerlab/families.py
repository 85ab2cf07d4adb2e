"""Semiclassical families of torus states.

* plane-wave: ``uhat_n(k) = rhohat(k - lambda_n^2 xi0)`` at ``h_n = 1/lambda_n^2``
* resonant: ``vhat_n(k) = rhohat(k - lambda_n^2 xi0 - lambda_n k_n)``
* wave-packet: Gaussian coherent states centered at ``(x0, xi0)``
* eigenmode: a single unit mode

``k_n`` are coordinate-wise continued-fraction convergents of a
non-resonant surd vector ``theta0``; ``lambda_n`` is the product of the
successive least common multiples ``q_n`` of their denominators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .exact import as_exact, convergents, is_resonant
from .lattice import MAX_INDEX, LatticeState, l2_norm, modulate

KINDS = ("plane-wave", "resonant", "wave-packet", "eigenmode")


class LadderExhausted(ValueError):
    """Requested depth lies beyond the exactly representable range."""

    def __init__(self, n: int, largest: int):
        super().__init__(
            f"depth n={n} exceeds the representable lattice range; largest admissible n is {largest}"
        )
        self.n = n
        self.largest = largest


class RationalApproxStream:
    """Convergents ``k_n`` (n >= 1) of an exact, non-resonant direction.

    Rational coordinates have finite expansions; once exhausted they stay
    at their exact value.
    """

    def __init__(self, target: Sequence):
        self.target = tuple(as_exact(v) for v in target)
        if is_resonant(self.target):
            raise ValueError("target direction is resonant; the construction needs theta0 outside Omega")
        self._iters = [convergents(v) for v in self.target]
        self._cache: list[tuple[Fraction, ...]] = []
        self._last: list[Fraction | None] = [None] * len(self.target)

    @property
    def dim(self) -> int:
        return len(self.target)

    def _extend(self):
        row = []
        for i, it in enumerate(self._iters):
            nxt = next(it, None)
            if nxt is not None:
                self._last[i] = nxt
            row.append(self._last[i])
        self._cache.append(tuple(row))

    def convergent(self, n: int) -> tuple[Fraction, ...]:
        if n < 1:
            raise ValueError("convergents are indexed from n = 1")
        while len(self._cache) < n:
            self._extend()
        return self._cache[n - 1]

    def __iter__(self) -> Iterator[tuple[Fraction, ...]]:
        n = 1
        while True:
            yield self.convergent(n)
            n += 1


class LcmLadder:
    """``q_n = lcm(den k_n)``, ``lambda_1 = q_1``, ``lambda_n = q_n lambda_{n-1}``.

    ``xi0`` is the integer carrier; depth ``n`` is admissible while
    ``lambda_n^2 |xi0|_inf + lambda_n |k_n|_inf`` stays within the lattice
    index range.
    """

    def __init__(self, stream: RationalApproxStream, xi0: Sequence[int] = ()):
        self.stream = stream
        self.xi0 = tuple(int(c) for c in xi0) if xi0 else (1,) + (0,) * (stream.dim - 1)
        if len(self.xi0) != stream.dim:
            raise ValueError("carrier and direction dimensions differ")
        self._lams: list[int] = []

    def q(self, n: int) -> int:
        return math.lcm(*(f.denominator for f in self.stream.convergent(n)))

    def lam(self, n: int) -> int:
        while len(self._lams) < n:
            m = len(self._lams) + 1
            prev = self._lams[-1] if self._lams else 1
            self._lams.append(self.q(m) * prev)
        return self._lams[n - 1]

    def h(self, n: int) -> float:
        return 1.0 / float(self.lam(n)) ** 2

    def shift(self, n: int, resonant: bool) -> tuple[int, ...]:
        lam = self.lam(n)
        base = [lam * lam * c for c in self.xi0]
        if resonant:
            kn = self.stream.convergent(n)
            extra = [lam * f for f in kn]
            if any(e.denominator != 1 for e in extra):
                raise ArithmeticError("lambda_n k_n is not integral")
            base = [b + int(e) for b, e in zip(base, extra)]
        return tuple(base)

    def admissible(self, n: int, radius: int = 0) -> bool:
        return all(abs(s) + radius <= MAX_INDEX for s in self.shift(n, True)) and all(
            abs(s) + radius <= MAX_INDEX for s in self.shift(n, False)
        )

    def max_depth(self, radius: int = 0, limit: int = 64) -> int:
        """Largest ``n`` whose shifted support stays representable."""
        n = 0
        while n < limit and self.admissible(n + 1, radius):
            n += 1
        return n

    def check(self, n: int, radius: int = 0):
        if not self.admissible(n, radius):
            raise LadderExhausted(n, self.max_depth(radius))


def _support_radius(rho: LatticeState) -> int:
    return int(np.abs(rho.modes).max()) if len(rho) else 0


def plane_wave_family(rho: LatticeState, xi0: Sequence[int], ladder: LcmLadder, n: int):
    """``(h_n, modulate(rho, lambda_n^2 xi0))``."""
    if tuple(int(c) for c in xi0) != ladder.xi0:
        raise ValueError("carrier differs from the ladder's")
    ladder.check(n, _support_radius(rho))
    return ladder.h(n), modulate(rho, ladder.shift(n, False))


def resonant_family(
    rho: LatticeState,
    xi0: Sequence[int],
    stream: RationalApproxStream,
    ladder: LcmLadder,
    n: int,
):
    """``(h_n, modulate(rho, lambda_n^2 xi0 + lambda_n k_n))``."""
    if stream is not ladder.stream:
        raise ValueError("ladder was built from a different stream")
    if tuple(int(c) for c in xi0) != ladder.xi0:
        raise ValueError("carrier differs from the ladder's")
    ladder.check(n, _support_radius(rho))
    return ladder.h(n), modulate(rho, ladder.shift(n, True))


def wave_packet_torus(x0: Sequence[float], xi0: Sequence[float], h: float) -> LatticeState:
    """Coherent state ``uhat(k) ~ exp(-|hk - xi0|^2 / (2h)) exp(-i k.x0)``.

    Modes with ``|hk - xi0| > 8 sqrt(h)`` are dropped; the result has unit
    norm.
    """
    x0 = np.asarray(x0, dtype=float)
    xi0 = np.asarray(xi0, dtype=float)
    d = len(xi0)
    if len(x0) != d:
        raise ValueError("x0 and xi0 differ in dimension")
    if not h > 0:
        raise ValueError("h must be positive")
    cut = 8.0 * math.sqrt(h)
    lo = np.ceil((xi0 - cut) / h).astype(np.int64)
    hi = np.floor((xi0 + cut) / h).astype(np.int64)
    if np.any(np.maximum(np.abs(lo), np.abs(hi)) > MAX_INDEX):
        raise OverflowError("wave packet needs lattice indices beyond 2^30")
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    if any(len(a) == 0 for a in axes):
        raise ValueError("truncation window contains no lattice point")
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    dist2 = np.sum((h * grid - xi0) ** 2, axis=1)
    keep = dist2 <= cut * cut
    grid, dist2 = grid[keep], dist2[keep]
    if not len(grid):
        raise ValueError("truncation window contains no lattice point")
    # exp(-i k.x0) with k.x0 reduced mod 2 pi in float: |k.x0| stays modest
    phase = np.mod(grid.astype(float) @ x0, 2 * math.pi)
    amps = np.exp(-dist2 / (2 * h) - 1j * phase)
    amps = amps / math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    return LatticeState(d, grid, amps)


def eigenmode(k0: Sequence[int]) -> LatticeState:
    k0 = [int(c) for c in k0]
    return LatticeState(len(k0), [k0], [1.0])


@dataclass
class SemiclassicalFamily:
    """A rule producing ``(h, state)`` pairs, with its declared frequency window.

    ``window()`` returns ``(lower, upper)`` bounds for ``|h k|^2`` inside
    which the family is expected to carry all but ~1e-6 of its mass.
    """

    kind: str
    rho: LatticeState | None = None
    xi0: tuple = ()
    theta0: tuple = ()
    x0: tuple = ()
    h_grid: tuple[float, ...] = ()
    n_max: int = 4
    k0: tuple[int, ...] = ()
    _stream: RationalApproxStream | None = field(default=None, repr=False)
    _ladder: LcmLadder | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind in ("plane-wave", "resonant"):
            if self.rho is None:
                raise ValueError(f"{self.kind} family needs a base profile rho")
            xi0 = tuple(int(c) for c in self.xi0)
            if any(isinstance(c, float) and not float(c).is_integer() for c in self.xi0):
                raise ValueError("carrier xi0 must be an integer vector")
            self.xi0 = xi0
            theta = self.theta0 or xi0
            self._stream = RationalApproxStream(theta)
            self._ladder = LcmLadder(self._stream, xi0)
        elif self.kind == "wave-packet":
            if not self.h_grid:
                raise ValueError("wave-packet family needs an h grid")
            self.xi0 = tuple(float(c) for c in self.xi0)
            self.x0 = tuple(float(c) for c in (self.x0 or (0.0,) * len(self.xi0)))
        elif self.kind == "eigenmode":
            if not self.k0:
                raise ValueError("eigenmode family needs k0")
            if not self.h_grid:
                raise ValueError("eigenmode family needs an h grid")

    @property
    def ladder(self) -> LcmLadder | None:
        return self._ladder

    @property
    def stream(self) -> RationalApproxStream | None:
        return self._stream

    @property
    def expected_norm(self) -> float:
        if self.kind in ("plane-wave", "resonant"):
            return l2_norm(self.rho)
        return 1.0

    def indices(self) -> list[int]:
        if self.kind in ("plane-wave", "resonant"):
            return list(range(1, self.n_max + 1))
        return list(range(1, len(self.h_grid) + 1))

    def member(self, n: int) -> tuple[float, LatticeState]:
        if self.kind == "plane-wave":
            return plane_wave_family(self.rho, self.xi0, self._ladder, n)
        if self.kind == "resonant":
            return resonant_family(self.rho, self.xi0, self._stream, self._ladder, n)
        h = float(self.h_grid[n - 1])
        if self.kind == "wave-packet":
            return h, wave_packet_torus(self.x0, self.xi0, h)
        return h, eigenmode(self.k0)

    def members(self) -> Iterator[tuple[int, float, LatticeState]]:
        for n in self.indices():
            h, state = self.member(n)
            yield n, h, state

    def window(self, h: float | None = None) -> tuple[float, float]:
        """Declared h-oscillation window for ``|h k|^2``."""
        if self.kind == "eigenmode":
            e = float(np.dot(self.k0, self.k0)) * (h if h is not None else 1.0) ** 2
            return (0.5 * e, 2.0 * e) if e > 0 else (-1.0, 1e-300)
        xi2 = float(np.dot(np.asarray(self.xi0, dtype=float), np.asarray(self.xi0, dtype=float)))
        if self.kind == "wave-packet":
            return 0.25 * xi2, 4.0 * xi2
        return 0.5 * xi2, 2.0 * xi2
