"""Sparse Fourier states on the flat torus T^d = (R / 2 pi Z)^d.

Convention: ``u(x) = sum_k uhat(k) exp(i k.x) / (2 pi)^(d/2)``, so the
squared L2 norm of ``u`` equals ``sum_k |uhat(k)|^2``.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

# Lattice indices are int64.  Capping each component at 2^30 keeps |k|^2,
# k.l and |k|^2 - |j|^2 exactly representable for d <= 3.
MAX_INDEX = 2**30


class LatticeState:
    """Finitely supported amplitudes ``k -> uhat(k)`` on Z^d.

    Modes are stored lexicographically sorted with zero amplitudes dropped.
    Both arrays are read-only; every operation returns a new state.
    """

    __slots__ = ("dim", "modes", "amps")

    def __init__(self, dim: int, modes, amps):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        modes = np.asarray(modes, dtype=np.int64).reshape(-1, dim)
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if len(modes) != len(amps):
            raise ValueError("modes and amplitudes differ in length")
        if len(modes) and int(np.abs(modes).max()) > MAX_INDEX:
            raise OverflowError(
                f"lattice index exceeds the representable range |k_i| <= 2^30 "
                f"(largest component {int(np.abs(modes).max())})"
            )
        keep = amps != 0
        modes, amps = modes[keep], amps[keep]
        order = np.lexsort(modes.T[::-1]) if len(modes) else np.zeros(0, dtype=np.intp)
        modes, amps = modes[order], amps[order]
        if len(modes) > 1 and np.any(np.all(modes[1:] == modes[:-1], axis=1)):
            raise ValueError("duplicate lattice modes")
        modes.setflags(write=False)
        amps.setflags(write=False)
        self.dim = dim
        self.modes = modes
        self.amps = amps

    @classmethod
    def from_dict(cls, dim: int, mapping: Mapping[Sequence[int], complex]) -> "LatticeState":
        keys = list(mapping)
        return cls(dim, np.array(keys, dtype=np.int64).reshape(-1, dim), [mapping[k] for k in keys])

    @classmethod
    def zero(cls, dim: int) -> "LatticeState":
        return cls(dim, np.zeros((0, dim), dtype=np.int64), [])

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(c) for c in k): complex(a) for k, a in zip(self.modes, self.amps)}

    def __len__(self) -> int:
        return len(self.amps)

    def __repr__(self) -> str:
        return f"LatticeState(dim={self.dim}, modes={len(self)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeState):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.modes, other.modes)
            and np.array_equal(self.amps, other.amps)
        )

    __hash__ = None

    def scaled(self, c: complex) -> "LatticeState":
        return LatticeState(self.dim, self.modes, self.amps * c)

    def with_amps(self, amps) -> "LatticeState":
        """Same support, new amplitudes (used by the propagators)."""
        return LatticeState(self.dim, self.modes, amps)

    @property
    def radius(self) -> float:
        """Largest Euclidean length of a supported mode."""
        if not len(self):
            return 0.0
        return float(np.sqrt((self.modes.astype(float) ** 2).sum(axis=1)).max())

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "modes": [
                {"k": [int(c) for c in k], "re": float(a.real), "im": float(a.imag)}
                for k, a in zip(self.modes, self.amps)
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "LatticeState":
        if isinstance(obj, str):
            obj = json.loads(obj)
        dim = int(obj["dim"])
        entries = obj.get("modes", [])
        for e in entries:
            if len(e["k"]) != dim:
                raise ValueError(f"mode {e['k']} does not have dimension {dim}")
            if any(isinstance(c, float) for c in e["k"]):
                raise TypeError("lattice indices must be integers")
        modes = np.array([e["k"] for e in entries], dtype=np.int64).reshape(-1, dim)
        amps = [complex(e.get("re", 0.0), e.get("im", 0.0)) for e in entries]
        return cls(dim, modes, amps)


def l2_norm(state: LatticeState) -> float:
    return float(np.sqrt(np.sum(np.abs(state.amps) ** 2)))


def _mode_keys(modes: np.ndarray, lo: np.ndarray, span: np.ndarray) -> np.ndarray:
    # mixed-radix encoding of (k - lo) in int64; span bounded by the caller
    keys = np.zeros(len(modes), dtype=np.int64)
    for i in range(modes.shape[1]):
        keys = keys * span[i] + (modes[:, i] - lo[i])
    return keys


class PairIndex:
    """Fast lookup of the pairs ``(k, k + l)`` inside a state's support."""

    def __init__(self, state: LatticeState):
        self.state = state
        modes = state.modes
        self._lookup = None
        if len(modes):
            lo = modes.min(axis=0)
            span = modes.max(axis=0) - lo + 1
            if float(np.prod(span.astype(float))) < 2.0**62:
                self._lo, self._span = lo, span
                keys = _mode_keys(modes, lo, span)
                self._order = np.argsort(keys, kind="stable")
                self._sorted = keys[self._order]
            else:
                self._lookup = {tuple(int(c) for c in k): i for i, k in enumerate(modes)}

    def pairs(self, l: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """Index arrays ``(ik, ij)`` with ``modes[ij] == modes[ik] + l``."""
        modes = self.state.modes
        if not len(modes):
            e = np.zeros(0, dtype=np.intp)
            return e, e
        l = np.asarray(l, dtype=np.int64)
        target = modes + l
        if self._lookup is not None:
            ik, ij = [], []
            for i, t in enumerate(target):
                j = self._lookup.get(tuple(int(c) for c in t))
                if j is not None:
                    ik.append(i)
                    ij.append(j)
            return np.array(ik, dtype=np.intp), np.array(ij, dtype=np.intp)
        rel = target - self._lo
        inside = np.all((rel >= 0) & (rel < self._span), axis=1)
        cand = np.nonzero(inside)[0]
        keys = _mode_keys(target[cand], self._lo, self._span)
        pos = np.searchsorted(self._sorted, keys)
        pos = np.minimum(pos, len(self._sorted) - 1)
        hit = self._sorted[pos] == keys
        return cand[hit], self._order[pos[hit]]


def density_coefficients(
    state: LatticeState, shifts: Iterable[Sequence[int]] | None = None
) -> dict[tuple[int, ...], complex]:
    """Fourier coefficients ``c(l)`` of ``|u|^2 = sum_l c(l) exp(i l.x)``.

    ``c(l) = (2 pi)^-d sum_j uhat(j + l) conj(uhat(j))``.  With ``shifts``
    given, only those coefficients are computed (zeros included); otherwise
    every nonzero difference of support points is returned.
    """
    d = state.dim
    norm = (2 * math.pi) ** (-d)
    if not len(state):
        return {} if shifts is None else {tuple(int(c) for c in l): 0j for l in shifts}
    if shifts is None:
        diff = (state.modes[:, None, :] - state.modes[None, :, :]).reshape(-1, d)
        prod = (state.amps[:, None] * np.conj(state.amps)[None, :]).reshape(-1)
        uniq, inv = np.unique(diff, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        re = np.bincount(inv, weights=prod.real, minlength=len(uniq))
        im = np.bincount(inv, weights=prod.imag, minlength=len(uniq))
        return {tuple(int(c) for c in l): norm * complex(a, b) for l, a, b in zip(uniq, re, im)}
    index = PairIndex(state)
    out = {}
    for l in shifts:
        key = tuple(int(c) for c in l)
        # pairs (j, j + l): uhat(j + l) conj(uhat(j))
        ij, ijl = index.pairs(key)
        out[key] = norm * complex(np.sum(state.amps[ijl] * np.conj(state.amps[ij])))
    return out


def modulate(state: LatticeState, shift: Sequence[int]) -> LatticeState:
    """Translate the support by ``shift`` (multiplication by exp(i shift.x))."""
    shift = [int(s) for s in shift]
    if len(shift) != state.dim:
        raise ValueError("shift dimension mismatch")
    if not len(state):
        return state
    if any(abs(v) > 2 * MAX_INDEX for v in shift):
        raise OverflowError("modulation shift exceeds the representable lattice range")
    return LatticeState(state.dim, state.modes + np.asarray(shift, dtype=np.int64), state.amps)


def sample_on_grid(state: LatticeState, points_per_axis: int) -> np.ndarray:
    """Values of ``u`` on the tensor grid ``x_m = 2 pi m / n`` (shape n^d)."""
    n = int(points_per_axis)
    d = state.dim
    kmax = int(np.abs(state.modes).max()) if len(state) else 0
    if n < 2 * kmax + 1:
        raise ValueError(
            f"grid of {n} points per axis aliases modes up to |k_i| = {kmax}; "
            f"need at least {2 * kmax + 1}"
        )
    grid = np.zeros((n,) * d, dtype=np.complex128)
    idx = tuple((state.modes % n).T)
    np.add.at(grid, idx, state.amps)
    # ifftn carries 1/n^d; u(x) needs the plain sum over k
    return np.fft.ifftn(grid) * n**d / (2 * math.pi) ** (d / 2)
