import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wignerlab.lattice import (
    MAX_INDEX,
    LatticeState,
    PairIndex,
    density_coefficients,
    l2_norm,
    modulate,
    sample_on_grid,
)


def random_state(rng, dim, count, span=6):
    modes = set()
    while len(modes) < count:
        modes.add(tuple(int(v) for v in rng.integers(-span, span + 1, dim)))
    amps = rng.normal(size=count) + 1j * rng.normal(size=count)
    return LatticeState(dim, sorted(modes), amps)


def test_norm_examples():
    assert l2_norm(LatticeState.zero(2)) == 0
    assert l2_norm(LatticeState(1, [[3]], [1.0])) == 1
    s = LatticeState(1, [[0], [1]], [2**-0.5, 2**-0.5])
    assert l2_norm(s) == pytest.approx(1.0, abs=1e-15)


def test_construction_rules():
    s = LatticeState(1, [[2], [0], [1]], [1.0, 0.0, 2.0])
    assert s.modes.tolist() == [[1], [2]]  # sorted, zeros dropped
    with pytest.raises(ValueError):
        LatticeState(1, [[0], [0]], [1.0, 1.0])
    with pytest.raises(OverflowError):
        LatticeState(1, [[MAX_INDEX + 1]], [1.0])
    with pytest.raises(ValueError):
        s.amps[0] = 3.0


def test_density_single_mode():
    c = density_coefficients(LatticeState(2, [[3, -1]], [1.0]))
    assert c == {(0, 0): pytest.approx((2 * math.pi) ** -2)}


def test_density_two_modes_against_grid():
    s = LatticeState(1, [[0], [1]], [2**-0.5, 2**-0.5])
    c = density_coefficients(s)
    assert c[(0,)] == pytest.approx(1 / (2 * math.pi))
    assert c[(1,)] == pytest.approx(1 / (4 * math.pi))
    assert c[(-1,)] == pytest.approx(1 / (4 * math.pi))
    # grid oracle: 64 points, discrete Fourier analysis of |u|^2
    u = sample_on_grid(s, 64)
    dens = np.fft.fft(np.abs(u) ** 2) / 64
    assert dens[0] == pytest.approx(c[(0,)], abs=1e-15)
    assert dens[1] == pytest.approx(c[(-1,)], abs=1e-15)  # fft uses exp(-i m x)


def test_density_hermitian_and_requested_shifts():
    rng = np.random.default_rng(1)
    s = random_state(rng, 2, 12)
    full = density_coefficients(s)
    for l, v in full.items():
        assert full[tuple(-c for c in l)] == pytest.approx(np.conj(v), abs=1e-15)
    picked = density_coefficients(s, [(1, 0), (40, 40)])
    assert picked[(1, 0)] == pytest.approx(full.get((1, 0), 0j), abs=1e-15)
    assert picked[(40, 40)] == 0


def test_modulate():
    s = LatticeState(1, [[5]], [1.0])
    assert modulate(s, [0]) == s
    assert modulate(s, [7]).modes.tolist() == [[12]]
    rng = np.random.default_rng(2)
    r = random_state(rng, 2, 10)
    assert l2_norm(modulate(r, [1000, -3])) == pytest.approx(l2_norm(r), rel=1e-15)
    with pytest.raises(OverflowError):
        modulate(s, [MAX_INDEX])


def test_sample_on_grid():
    assert np.all(sample_on_grid(LatticeState.zero(1), 8) == 0)
    u = sample_on_grid(LatticeState(1, [[1]], [1.0]), 8)
    x = 2 * math.pi * np.arange(8) / 8
    np.testing.assert_allclose(u, np.exp(1j * x) / math.sqrt(2 * math.pi), atol=1e-15)
    with pytest.raises(ValueError):
        sample_on_grid(LatticeState(1, [[5]], [1.0]), 8)


def test_parseval_on_grid():
    rng = np.random.default_rng(3)
    s = random_state(rng, 1, 5, span=4)
    u = sample_on_grid(s, 32)
    quad = np.sum(np.abs(u) ** 2) * 2 * math.pi / 32
    assert quad == pytest.approx(l2_norm(s) ** 2, abs=1e-12)


def test_pair_index_matches_brute_force():
    rng = np.random.default_rng(4)
    s = random_state(rng, 2, 15, span=3)
    idx = PairIndex(s)
    for l in [(0, 0), (1, 0), (-2, 3), (9, 9)]:
        ik, ij = idx.pairs(l)
        got = set(zip(ik.tolist(), ij.tolist()))
        want = {
            (a, b)
            for a in range(len(s))
            for b in range(len(s))
            if np.all(s.modes[b] - s.modes[a] == np.asarray(l))
        }
        assert got == want


def test_json_roundtrip():
    rng = np.random.default_rng(5)
    s = random_state(rng, 2, 6)
    assert LatticeState.from_json(s.to_json()) == s


@settings(max_examples=40, deadline=None)
@given(
    st.dictionaries(st.integers(-50, 50), st.complex_numbers(max_magnitude=10, allow_nan=False), max_size=10),
    st.integers(-10**6, 10**6),
)
def test_modulation_preserves_norm_and_density(mapping, shift):
    s = LatticeState.from_dict(1, {(k,): v for k, v in mapping.items()})
    m = modulate(s, [shift])
    assert l2_norm(m) == pytest.approx(l2_norm(s), rel=1e-12, abs=1e-300)
    a, b = density_coefficients(s), density_coefficients(m)
    assert a.keys() == b.keys()
    for k in a:
        assert a[k] == b[k]
