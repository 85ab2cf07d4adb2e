import math

import numpy as np
import pytest

from wignerlab.lattice import LatticeState, l2_norm
from wignerlab.propagators import GaussianPacket, TimeScale, evolve_free, evolve_torus, wigner_gaussian


def random_state(rng, dim=2, count=8, span=40):
    modes = {tuple(int(v) for v in rng.integers(-span, span + 1, dim)) for _ in range(count)}
    return LatticeState(dim, sorted(modes), rng.normal(size=len(modes)) + 1j * rng.normal(size=len(modes)))


def test_time_scales():
    assert TimeScale().alpha_of(0.01) == pytest.approx(100)
    assert TimeScale().rate(0.01) == 1.0
    p = TimeScale("power", gamma=1.5)
    assert p.alpha_of(0.01) == pytest.approx(1000)
    assert p.rate(0.01) == pytest.approx(10)
    assert not TimeScale("power", gamma=2.0).within_hypothesis
    c = TimeScale("constant", alpha=3.0)
    assert c.rate(0.5) == 1.5
    t = TimeScale("table", table=((0.1, 7.0),))
    assert t.alpha_of(0.1) == 7.0
    with pytest.raises(KeyError):
        t.alpha_of(0.2)
    with pytest.raises(ValueError):
        TimeScale("constant")
    assert TimeScale.from_json(p.to_json()) == p


def test_torus_identity_and_modulus():
    rng = np.random.default_rng(0)
    s = random_state(rng)
    assert evolve_torus(s, 0.1, TimeScale(), 0.0) == s
    e = evolve_torus(s, 0.1, TimeScale(), 3.7)
    np.testing.assert_allclose(np.abs(e.amps), np.abs(s.amps), rtol=1e-15)


def test_torus_period():
    s = LatticeState(1, [[1]], [1.0])
    e = evolve_torus(s, 1.0, TimeScale("constant", alpha=1.0), 4 * math.pi)
    assert abs(e.amps[0] - 1.0) <= 1e-12


def test_torus_group_law():
    rng = np.random.default_rng(1)
    s = random_state(rng)
    sc = TimeScale("power", gamma=1.3)
    a = evolve_torus(evolve_torus(s, 0.05, sc, 0.7), 0.05, sc, -1.9)
    b = evolve_torus(s, 0.05, sc, -1.2)
    assert np.max(np.abs(a.amps - b.amps)) <= 1e-12


def test_torus_large_frequencies_keep_exact_phase():
    # mode 10^8 at rate 1: phase t |k|^2 / 2 is ~1e16 rad
    s = LatticeState(1, [[10**8]], [1.0])
    e = evolve_torus(s, 1.0, TimeScale("constant", alpha=1.0), 2.0)
    # t |k|^2 / 2 = 1e16 is an integer; 1e16 mod 2 pi from exact arithmetic
    import mpmath

    mpmath.mp.dps = 50
    want = mpmath.mpf(10) ** 16
    want = float(want - 2 * mpmath.pi * mpmath.nint(want / (2 * mpmath.pi)))
    assert abs(e.amps[0] - np.exp(-1j * want)) <= 1e-12


def test_free_packet_norm_and_transport():
    p = GaussianPacket([0.0], [1.0], 1.0, 0.01)
    assert evolve_free(p, TimeScale(), 0.0) == p
    # rescaled time s = alpha_h t; with alpha = 1/h = 100, t = 0.01 gives s = 1
    q = evolve_free(p, TimeScale(), 0.01)
    assert q.x0 == (1.0,)
    assert q.xi0 == (1.0,)
    rng = np.random.default_rng(2)
    for _ in range(5):
        pk = GaussianPacket(rng.normal(size=1), rng.normal(size=1), float(rng.uniform(0.5, 2)), 0.05)
        e = evolve_free(pk, TimeScale(), float(rng.uniform(-0.5, 0.5)))
        sd = math.sqrt(e.h * abs(e.width) ** 2 / e.width.real)
        x = np.linspace(e.x0[0] - 12 * sd, e.x0[0] + 12 * sd, 20001)[:, None]
        norm = np.trapezoid(np.abs(e(x)) ** 2, x[:, 0])
        assert norm == pytest.approx(1.0, abs=1e-12)


def test_free_packet_solves_schrodinger():
    # i h d_s u = -(h^2 / 2) u'' with s = alpha t, checked by finite differences
    p = GaussianPacket([0.2], [0.8], 0.9, 0.1)
    sc = TimeScale()
    x = np.linspace(-1, 1.5, 41)[:, None]
    dt, dx = 1e-5, 1e-4
    a = sc.alpha_of(p.h)
    dudt = (evolve_free(p, sc, dt)(x) - evolve_free(p, sc, -dt)(x)) / (2 * dt)
    lap = (p(x + dx) - 2 * p(x) + p(x - dx)) / dx**2
    np.testing.assert_allclose(1j * p.h * dudt / a, -(p.h**2) / 2 * lap, atol=1e-4)


def test_wigner_gaussian_marginals():
    p = evolve_free(GaussianPacket([0.3], [1.0], 1.0, 0.05), TimeScale(), 0.02)
    g = wigner_gaussian(p)
    np.testing.assert_array_equal(g.mean[1:], [1.0])
    sx, sk = math.sqrt(g.cov[0, 0]), math.sqrt(g.cov[1, 1])
    xs = np.linspace(g.mean[0] - 8 * sx, g.mean[0] + 8 * sx, 801)
    ks = np.linspace(1 - 8 * sk, 1 + 8 * sk, 801)
    X, K = np.meshgrid(xs, ks, indexing="ij")
    W = g(np.stack([X, K], axis=-1))
    total = np.trapezoid(np.trapezoid(W, ks, axis=1), xs)
    assert total == pytest.approx(1.0, abs=1e-10)
    i0 = 400
    marg = np.trapezoid(W[i0], ks)
    assert marg == pytest.approx(float(p.density([[xs[i0]]])[0]), abs=1e-10)
