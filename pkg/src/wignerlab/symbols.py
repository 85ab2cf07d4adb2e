"""Phase-space symbols ``a(x, xi) = sum_l c_l(xi) exp(i l.x)`` on T^d x R^d.

Each coefficient ``c_l`` is a finite sum of :class:`XiProfile` objects.  The
classical operations used downstream are all exact on this representation:
averaging along a straight line keeps the terms orthogonal to the direction,
and the bracket with ``p = |xi|^2`` multiplies term ``l`` by ``-2i l.xi``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exact import exact_dot, is_resonant, is_zero_vector

FAMILIES = ("gaussian", "bump", "constant-on-ball", "linear-times-gaussian", "constant")

GAUSSIAN_TRUNCATION_SIGMAS = 8.0
# max |d/du exp(1 - 1/(1 - u^2))| on (0, 1), attained near u = 0.76
_BUMP_SLOPE = 2.1704
# max over u of u exp(-u^2)
_LTG_PEAK = 1.0 / math.sqrt(2.0 * math.e)

Monomial = tuple[tuple[int, ...], complex]


def _poly_mul_linear(poly: tuple[Monomial, ...], g: Sequence[complex], d: int) -> tuple[Monomial, ...]:
    base = poly if poly else (((0,) * d, 1.0 + 0j),)
    acc: dict[tuple[int, ...], complex] = {}
    for exps, c in base:
        for i, gi in enumerate(g):
            if gi == 0:
                continue
            e = list(exps)
            e[i] += 1
            key = tuple(e)
            acc[key] = acc.get(key, 0j) + c * gi
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0))


@dataclass(frozen=True)
class XiProfile:
    """A scalar function of ``xi``, optionally times a polynomial in ``xi``.

    Families (with ``s = |xi - center|``, ``r = scale``):

    * ``gaussian``: ``amp exp(-s^2 / r^2)``, set to zero beyond
      ``8 r / sqrt(2)`` (eight standard deviations)
    * ``bump``: ``amp exp(1 - 1 / (1 - s^2 / r^2))`` for ``s < r``, else 0
    * ``constant-on-ball``: ``amp`` for ``s <= r``, else 0
    * ``linear-times-gaussian``: ``amp (v.(xi - center) / r) exp(-s^2 / r^2)``
      with unit ``direction`` v, truncated like the gaussian
    * ``constant``: ``amp`` everywhere (used for x-only symbols)

    ``poly`` holds monomials ``(exponents, coefficient)``; an empty tuple
    means the factor 1.
    """

    family: str
    center: tuple[float, ...]
    scale: float = 1.0
    amp: complex = 1.0
    direction: tuple[float, ...] | None = None
    poly: tuple[Monomial, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown profile family {self.family!r}; expected one of {FAMILIES}")
        center = tuple(float(c) for c in np.atleast_1d(self.center))
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "amp", complex(self.amp))
        object.__setattr__(self, "scale", float(self.scale))
        if not self.scale > 0 or not math.isfinite(self.scale):
            raise ValueError("profile scale must be positive and finite")
        if self.family == "linear-times-gaussian":
            if self.direction is None:
                raise ValueError("linear-times-gaussian needs a direction")
            v = np.asarray(self.direction, dtype=float)
            nv = float(np.linalg.norm(v))
            if len(v) != len(center) or nv == 0:
                raise ValueError("direction must be a nonzero vector of the profile's dimension")
            object.__setattr__(self, "direction", tuple(float(c) for c in v / nv))
        elif self.direction is not None:
            object.__setattr__(self, "direction", tuple(float(c) for c in self.direction))
        poly = tuple((tuple(int(e) for e in exps), complex(c)) for exps, c in self.poly)
        object.__setattr__(self, "poly", poly)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def support_radius(self) -> float:
        """Radius about ``center`` outside which the profile is exactly 0."""
        if self.family in ("gaussian", "linear-times-gaussian"):
            return GAUSSIAN_TRUNCATION_SIGMAS * self.scale / math.sqrt(2.0)
        if self.family == "constant":
            return math.inf
        return self.scale

    def _poly_bound(self, radius: float) -> float:
        if not self.poly:
            return 1.0
        return sum(abs(c) * radius ** sum(exps) for exps, c in self.poly)

    @property
    def truncation_error(self) -> float:
        """Bound on |exact profile - stored profile| caused by truncation."""
        if self.family not in ("gaussian", "linear-times-gaussian"):
            return 0.0
        u = GAUSSIAN_TRUNCATION_SIGMAS / math.sqrt(2.0)
        # both envelopes (and envelope times a low-degree polynomial) are
        # decreasing beyond u, so the value at the cut bounds the tail
        env = math.exp(-(u**2)) * (u if self.family == "linear-times-gaussian" else 1.0)
        reach = float(np.linalg.norm(self.center)) + self.support_radius
        return abs(self.amp) * env * self._poly_bound(reach)

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant in ``xi`` (infinite where none exists)."""
        if self.poly:
            return math.inf
        a = abs(self.amp)
        if self.family == "gaussian":
            return a * math.sqrt(2.0 / math.e) / self.scale
        if self.family == "bump":
            return a * _BUMP_SLOPE / self.scale
        if self.family == "linear-times-gaussian":
            return a / self.scale
        if self.family == "constant":
            return 0.0
        return math.inf

    def sup_bound(self, radius: float | None = None) -> float:
        """Bound on ``|profile|`` over R^d, or over ``|xi| <= radius``."""
        if self.family == "linear-times-gaussian":
            base = abs(self.amp) * _LTG_PEAK
        else:
            base = abs(self.amp)
        if not self.poly:
            return base
        # a polynomial factor is bounded on the support (or the given ball)
        bound_r = float(np.linalg.norm(self.center)) + self.support_radius
        if radius is not None:
            bound_r = min(bound_r, radius)
        if not math.isfinite(bound_r):
            return math.inf
        return base * self._poly_bound(bound_r)

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.dim:
            raise ValueError(f"xi has dimension {xi.shape[-1]}, profile has {self.dim}")
        y = xi - np.asarray(self.center)
        s2 = np.sum(y * y, axis=-1)
        r2 = self.scale**2
        fam = self.family
        if fam == "gaussian":
            val = np.where(s2 <= self.support_radius**2, np.exp(-s2 / r2), 0.0)
        elif fam == "bump":
            u = np.minimum(s2 / r2, 1.0)
            with np.errstate(divide="ignore", over="ignore"):
                val = np.where(u < 1.0, np.exp(1.0 - 1.0 / (1.0 - u)), 0.0)
        elif fam == "constant-on-ball":
            val = np.where(s2 <= r2, 1.0, 0.0)
        elif fam == "linear-times-gaussian":
            lin = (y @ np.asarray(self.direction)) / self.scale
            val = np.where(s2 <= self.support_radius**2, lin * np.exp(-s2 / r2), 0.0)
        else:
            val = np.ones(s2.shape)
        out = self.amp * val
        if self.poly:
            p = np.zeros(s2.shape, dtype=complex)
            for exps, c in self.poly:
                p = p + c * np.prod(xi ** np.asarray(exps), axis=-1)
            out = out * p
        return out

    def conj(self) -> "XiProfile":
        return replace(
            self,
            amp=self.amp.conjugate(),
            poly=tuple((e, c.conjugate()) for e, c in self.poly),
        )

    def scaled(self, c: complex) -> "XiProfile":
        return replace(self, amp=self.amp * complex(c))

    def times_linear(self, g: Sequence[complex]) -> "XiProfile":
        """Multiply by the linear form ``sum_i g_i xi_i``."""
        return replace(self, poly=_poly_mul_linear(self.poly, list(g), self.dim))

    @property
    def is_xi_independent(self) -> bool:
        return self.family == "constant" and not self.poly

    def to_json(self) -> dict:
        out = {
            "family": self.family,
            "center": list(self.center),
            "scale": self.scale,
            "amp_re": self.amp.real,
            "amp_im": self.amp.imag,
        }
        if self.direction is not None:
            out["direction"] = list(self.direction)
        if self.poly:
            out["poly"] = [
                {"exponents": list(e), "re": c.real, "im": c.imag} for e, c in self.poly
            ]
        return out

    @classmethod
    def from_json(cls, obj, dim: int | None = None) -> "XiProfile":
        center = obj.get("center")
        if center is None:
            if dim is None:
                raise ValueError("profile without center needs the symbol dimension")
            center = [0.0] * dim
        poly = tuple(
            (tuple(m["exponents"]), complex(m.get("re", 0.0), m.get("im", 0.0)))
            for m in obj.get("poly", [])
        )
        return cls(
            family=obj["family"],
            center=tuple(center),
            scale=float(obj.get("scale", 1.0)),
            amp=complex(obj.get("amp_re", 1.0), obj.get("amp_im", 0.0)),
            direction=tuple(obj["direction"]) if "direction" in obj else None,
            poly=poly,
        )


def gaussian(center, scale=1.0, amp=1.0) -> XiProfile:
    return XiProfile("gaussian", tuple(np.atleast_1d(center)), scale, amp)


def bump(center, scale=1.0, amp=1.0) -> XiProfile:
    return XiProfile("bump", tuple(np.atleast_1d(center)), scale, amp)


def ball(center, scale=1.0, amp=1.0) -> XiProfile:
    return XiProfile("constant-on-ball", tuple(np.atleast_1d(center)), scale, amp)


def constant(dim: int, amp=1.0) -> XiProfile:
    return XiProfile("constant", (0.0,) * dim, 1.0, amp)


def _key(l, dim: int) -> tuple[int, ...]:
    l = tuple(int(c) for c in np.atleast_1d(l))
    if len(l) != dim:
        raise ValueError(f"frequency {l} does not have dimension {dim}")
    return l


class TorusSymbol:
    """``a(x, xi) = sum_l c_l(xi) exp(i l.x)`` with ``c_l`` a sum of profiles."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping | Iterable = ()):
        self.dim = int(dim)
        acc: dict[tuple[int, ...], list[XiProfile]] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for l, profiles in items:
            if isinstance(profiles, XiProfile):
                profiles = (profiles,)
            key = _key(l, self.dim)
            for p in profiles:
                if p.dim != self.dim:
                    raise ValueError("profile dimension differs from symbol dimension")
                if p.amp != 0:
                    acc.setdefault(key, []).append(p)
        self.terms = MappingProxyType({k: tuple(v) for k, v in sorted(acc.items())})

    @classmethod
    def real(cls, dim: int, terms: Iterable) -> "TorusSymbol":
        """Real symbol: each given ``(l, profile)`` is joined by ``(-l, conj)``.

        Terms with ``l = 0`` are replaced by their real part.
        """
        out = []
        for l, p in terms:
            key = _key(l, dim)
            if all(c == 0 for c in key):
                out.append((key, p.scaled(0.5)))
                out.append((key, p.conj().scaled(0.5)))
            else:
                out.append((key, p))
                out.append((tuple(-c for c in key), p.conj()))
        return cls(dim, out)

    def __repr__(self) -> str:
        return f"TorusSymbol(dim={self.dim}, terms={list(self.terms)})"

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "TorusSymbol") -> "TorusSymbol":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return TorusSymbol(self.dim, [*self.items(), *other.items()])

    def __mul__(self, c: complex) -> "TorusSymbol":
        return TorusSymbol(self.dim, [(l, p.scaled(c)) for l, p in self.items()])

    __rmul__ = __mul__

    def items(self):
        for l, profiles in self.terms.items():
            for p in profiles:
                yield l, p

    def coefficient(self, l, xi) -> np.ndarray:
        """``c_l(xi)``."""
        key = _key(l, self.dim)
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape[:-1], dtype=complex)
        for p in self.terms.get(key, ()):
            out = out + p(xi)
        return out

    @property
    def is_real(self) -> bool:
        """Structural reality check: the profile multiset at ``-l`` is the
        conjugate of the one at ``l`` (sufficient for a real symbol)."""
        for l, profiles in self.terms.items():
            neg = tuple(-c for c in l)
            mirror = self.terms.get(neg, ())
            want = sorted((repr(p.conj()) for p in profiles))
            if sorted(repr(p) for p in mirror) != want:
                return False
        return True

    @property
    def is_xi_independent(self) -> bool:
        return all(p.is_xi_independent for _, p in self.items())

    @property
    def is_x_independent(self) -> bool:
        return all(all(c == 0 for c in l) for l in self.terms)

    def sup_bound(self) -> float:
        """Bound on ``sup |a|``: the sum of the profiles' sup bounds."""
        return sum(p.sup_bound() for _, p in self.items())

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"l": list(l), "profile": p.to_json()} for l, p in self.items()],
        }

    @classmethod
    def from_json(cls, obj) -> "TorusSymbol":
        if isinstance(obj, str):
            obj = json.loads(obj)
        dim = int(obj["dim"])
        terms = [(t["l"], XiProfile.from_json(t["profile"], dim)) for t in obj.get("terms", [])]
        return cls(dim, terms)


def evaluate(symbol: TorusSymbol, x, xi) -> np.ndarray:
    """``a(x, xi)``; ``x`` and ``xi`` broadcast over leading axes."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-1])
    out = np.zeros(shape, dtype=complex)
    for l, profiles in symbol.terms.items():
        wave = np.exp(1j * (x @ np.asarray(l, dtype=float)))
        coef = sum(p(xi) for p in profiles)
        out = out + coef * wave
    return out


def average_along(symbol: TorusSymbol, direction: Sequence) -> TorusSymbol:
    """Average of ``a`` along the straight-line flow in direction ``xi0``.

    Keeps exactly the terms with ``l . xi0 = 0``, decided in exact
    arithmetic; ``direction`` must hold ints, Fractions or QuadSurds.
    """
    if len(direction) != symbol.dim:
        raise ValueError("direction dimension mismatch")
    if is_zero_vector(direction):
        raise ValueError("averaging direction must be nonzero")
    keep = [(l, p) for l, p in symbol.items() if not exact_dot(l, direction)]
    return TorusSymbol(symbol.dim, keep)


def poisson_bracket_with_p(symbol: TorusSymbol) -> TorusSymbol:
    """``{a, p}`` for ``p = |xi|^2``: term ``l`` becomes ``-2i (l.xi) c_l``."""
    out = []
    for l, p in symbol.items():
        if all(c == 0 for c in l):
            continue
        out.append((l, p.times_linear([-2j * c for c in l])))
    return TorusSymbol(symbol.dim, out)


__all__ = [
    "FAMILIES",
    "XiProfile",
    "TorusSymbol",
    "gaussian",
    "bump",
    "ball",
    "constant",
    "evaluate",
    "average_along",
    "poisson_bracket_with_p",
    "is_resonant",
]
