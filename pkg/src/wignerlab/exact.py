"""Exact arithmetic for lattice directions: rationals and quadratic surds.

A direction component is an ``int``, a ``fractions.Fraction`` or a
:class:`QuadSurd`.  Floats are refused wherever a decision (orthogonality,
resonance, continued fractions) has to be exact.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence


def squarefree_split(m: int) -> tuple[int, int]:
    """Return ``(s, c)`` with ``m = s**2 * c`` and ``c`` squarefree."""
    if m < 0:
        raise ValueError("negative radicand")
    if m == 0:
        return 0, 1
    s, c, p = 1, m, 2
    while p * p <= c:
        while c % (p * p) == 0:
            c //= p * p
            s *= p
        p += 1
    return s, c


@dataclass(frozen=True)
class QuadSurd:
    """The real number ``(p + q*sqrt(m)) / r`` with integer entries."""

    p: int
    q: int
    m: int
    r: int = 1

    def __post_init__(self):
        for name in ("p", "q", "m", "r"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, numbers.Integral):
                raise TypeError(f"QuadSurd.{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.r == 0:
            raise ValueError("QuadSurd denominator is zero")
        if self.m < 0:
            raise ValueError("QuadSurd radicand must be nonnegative")

    def components(self) -> dict[int, Fraction]:
        """Coordinates over the basis {sqrt(c)}: squarefree ``c`` -> rational."""
        s, c = squarefree_split(self.m)
        out: dict[int, Fraction] = {}
        rat = Fraction(self.p, self.r)
        irr = Fraction(self.q * s, self.r)
        if c == 1:
            rat += irr
        elif irr != 0:
            out[c] = irr
        if rat != 0:
            out[1] = rat
        return out

    @property
    def is_rational(self) -> bool:
        return all(c == 1 for c in self.components())

    def __float__(self) -> float:
        s, c = squarefree_split(self.m)
        # Fraction arithmetic first so large integer entries do not overflow.
        rat = Fraction(self.p, self.r)
        irr = Fraction(self.q * s, self.r)
        return float(rat) + float(irr) * math.sqrt(c)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "m": self.m, "r": self.r}

    @classmethod
    def from_json(cls, obj) -> "QuadSurd":
        return cls(obj["p"], obj["q"], obj["m"], obj.get("r", 1))


Exact = int | Fraction | QuadSurd


def as_exact(value) -> Exact:
    """Validate an exact scalar; floats raise ``TypeError``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not directions")
    if isinstance(value, QuadSurd):
        return value
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    raise TypeError(
        f"exact direction component required (int, Fraction, QuadSurd); got {type(value).__name__}"
    )


def components(value) -> dict[int, Fraction]:
    v = as_exact(value)
    if isinstance(v, QuadSurd):
        return v.components()
    f = Fraction(v)
    return {1: f} if f != 0 else {}


def exact_dot(l: Sequence[int], xi: Sequence) -> dict[int, Fraction]:
    """``l . xi`` as basis coordinates; the empty dict means exactly zero."""
    if len(l) != len(xi):
        raise ValueError("dimension mismatch")
    acc: dict[int, Fraction] = {}
    for li, x in zip(l, xi):
        if li == 0:
            components(x)  # still validates the component
            continue
        for c, f in components(x).items():
            acc[c] = acc.get(c, Fraction(0)) + int(li) * f
    return {c: f for c, f in acc.items() if f != 0}


def is_zero_vector(xi: Sequence) -> bool:
    return all(not components(x) for x in xi)


def rational_rank(rows: list[list[Fraction]]) -> int:
    """Rank of a rational matrix by fraction-exact Gaussian elimination."""
    mat = [list(r) for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                f = mat[i][col] / mat[rank][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
    return rank


def is_resonant(xi: Sequence) -> bool:
    """True iff some nonzero integer vector is orthogonal to ``xi``.

    Writing each component over the basis of square roots of distinct
    squarefree integers (linearly independent over Q), ``k . xi = 0`` is a
    rational linear system; a nonzero integer solution exists iff its
    coefficient matrix has rank below ``d``.
    """
    d = len(xi)
    if d == 0:
        raise ValueError("empty direction")
    comps = [components(x) for x in xi]
    basis = sorted({c for comp in comps for c in comp})
    rows = [[comp.get(c, Fraction(0)) for comp in comps] for c in basis]
    if not rows:
        return True  # xi = 0: every k is orthogonal
    return rational_rank(rows) < d


def _rational_cf(x: Fraction) -> Iterator[int]:
    num, den = x.numerator, x.denominator
    while den:
        a = num // den
        yield a
        num, den = den, num - a * den


def _surd_cf(s: QuadSurd) -> Iterator[int]:
    """Partial quotients of an irrational quadratic surd (infinite)."""
    sq, c = squarefree_split(s.m)
    qq = s.q * sq
    # x = (P + sqrt(D)) / Q with Q | D - P^2
    if qq > 0:
        P, D, Q = s.p, qq * qq * c, s.r
    else:
        P, D, Q = -s.p, qq * qq * c, -s.r
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    root = math.isqrt(D)
    while True:
        if Q > 0:
            a = (P + root) // Q
        else:
            a = -((P + root) // (-Q) + 1)
        yield a
        P = a * Q - P
        Q = (D - P * P) // Q


def partial_quotients(value) -> Iterator[int]:
    """Continued-fraction digits; finite for rationals, infinite for surds."""
    v = as_exact(value)
    if isinstance(v, QuadSurd) and not v.is_rational:
        return _surd_cf(v)
    if isinstance(v, QuadSurd):
        return _rational_cf(v.components().get(1, Fraction(0)))
    return _rational_cf(Fraction(v))


def convergents(value) -> Iterator[Fraction]:
    """Successive convergents p_n/q_n in lowest terms."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    for a in partial_quotients(value):
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)


def exact_from_json(obj) -> Exact:
    """Decode an integer, ``[num, den]`` pair or ``{p,q,m,r}`` object."""
    if isinstance(obj, dict):
        return QuadSurd.from_json(obj)
    if isinstance(obj, list) and len(obj) == 2:
        return Fraction(int(obj[0]), int(obj[1]))
    if isinstance(obj, int) and not isinstance(obj, bool):
        return obj
    raise TypeError(f"cannot decode exact value from {obj!r}")


def exact_to_json(v):
    v = as_exact(v)
    if isinstance(v, QuadSurd):
        return v.to_json()
    if isinstance(v, Fraction):
        return [v.numerator, v.denominator]
    return v


def to_float(v) -> float:
    return float(as_exact(v))
