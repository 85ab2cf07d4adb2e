import numpy as np

from wignerlab.lattice import LatticeState
from wignerlab.symbols import TorusSymbol, bump, gaussian


def random_state(rng, dim, count, span=5):
    while (2 * span + 1) ** dim < 2 * count:
        span += 1
    modes = set()
    while len(modes) < count:
        modes.add(tuple(int(v) for v in rng.integers(-span, span + 1, dim)))
    amps = rng.normal(size=count) + 1j * rng.normal(size=count)
    return LatticeState(dim, sorted(modes), amps / np.linalg.norm(amps))


def random_symbol(rng, dim, count, real=False, lspan=3):
    terms = []
    for _ in range(count):
        l = tuple(int(v) for v in rng.integers(-lspan, lspan + 1, dim))
        c = rng.normal(scale=0.5, size=dim)
        amp = complex(rng.normal(), rng.normal())
        if rng.random() < 0.6:
            prof = gaussian(c, float(rng.uniform(0.3, 1.5)), amp)
        else:
            prof = bump(c, float(rng.uniform(0.5, 2.0)), amp)
        terms.append((l, prof))
    return TorusSymbol.real(dim, terms) if real else TorusSymbol(dim, terms)
