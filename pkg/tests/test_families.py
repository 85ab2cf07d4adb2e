import numpy as np
import pytest

from wignerlab.exact import QuadSurd
from wignerlab.families import (
    LadderExhausted,
    LcmLadder,
    RationalApproxStream,
    SemiclassicalFamily,
    plane_wave_family,
    resonant_family,
    wave_packet_torus,
)
from wignerlab.lattice import LatticeState, l2_norm
from wignerlab.pairings import h_oscillation_profile, pairing_instantaneous
from wignerlab.predictions import predict_mu0_pointmass
from wignerlab.propagators import TimeScale, evolve_torus
from wignerlab.symbols import TorusSymbol, bump, gaussian

SQRT2 = QuadSurd(0, 1, 2)
RHO = LatticeState(2, [(0, 0), (0, 1), (1, 0), (1, 1)], [0.5] * 4)


def test_ladder_for_sqrt2():
    stream = RationalApproxStream((1, SQRT2))
    ladder = LcmLadder(stream, (1, 0))
    assert [ladder.q(n) for n in range(1, 5)] == [1, 2, 5, 12]
    assert [ladder.lam(n) for n in range(1, 6)] == [1, 2, 10, 120, 3480]
    assert ladder.h(3) == pytest.approx(0.01)
    assert ladder.h(4) == pytest.approx(6.944444e-5, rel=1e-6)
    assert ladder.shift(3, False) == (100, 0)
    assert ladder.shift(3, True) == (110, 14)
    assert ladder.max_depth(1) == 5
    with pytest.raises(LadderExhausted) as err:
        ladder.check(6, 1)
    assert err.value.largest == 5


def test_stream_rejects_resonant_target():
    with pytest.raises(ValueError):
        RationalApproxStream((1, 2))
    with pytest.raises(TypeError):
        RationalApproxStream((1.0, 2**0.5))


def test_plane_wave_member_and_norm():
    stream = RationalApproxStream((1, SQRT2))
    ladder = LcmLadder(stream, (1, 0))
    h, u = plane_wave_family(LatticeState(2, [(0, 0)], [1.0]), (1, 0), ladder, 3)
    assert h == pytest.approx(0.01)
    assert u.modes.tolist() == [[100, 0]]
    for n in range(1, 6):
        _, u = plane_wave_family(RHO, (1, 0), ladder, n)
        _, v = resonant_family(RHO, (1, 0), stream, ladder, n)
        assert l2_norm(u) == pytest.approx(1.0) and l2_norm(v) == pytest.approx(1.0)


def test_plane_wave_diagonal_limit():
    b = gaussian([1.0, 0.0], 1.0)
    sym = TorusSymbol(2, [((0, 0), b)])
    fam = SemiclassicalFamily("plane-wave", rho=RHO, xi0=(1, 0), theta0=(1, SQRT2))
    for n in range(2, 6):
        h, u = fam.member(n)
        err = abs(pairing_instantaneous(u, sym, h).value - complex(b(np.array([1.0, 0.0]))))
        assert err <= b.lipschitz * h * 2**0.5


def test_same_t0_limit_for_u_and_v():
    sym = TorusSymbol.real(2, [((0, 0), gaussian([1, 0], 1.0)), ((0, 1), gaussian([1, 0], 1.0, 0.5))])
    fu = SemiclassicalFamily("plane-wave", rho=RHO, xi0=(1, 0), theta0=(1, SQRT2))
    fv = SemiclassicalFamily("resonant", rho=RHO, xi0=(1, 0), theta0=(1, SQRT2))
    gaps = []
    for n in range(2, 6):
        (hu, u), (hv, v) = fu.member(n), fv.member(n)
        gaps.append(abs(pairing_instantaneous(u, sym, hu).value - pairing_instantaneous(v, sym, hv).value))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4


def test_wave_packet_disjoint_symbol_is_zero():
    st = wave_packet_torus([0.5], [1.0], 0.01)
    sym = TorusSymbol(1, [((0,), bump([-1.0], 0.5)), ((1,), bump([3.0], 0.5))])
    assert pairing_instantaneous(st, sym, 0.01).value == 0


def test_wave_packet_concentrates():
    st = wave_packet_torus([0.3, 0.2], [1.0, 2**0.5], 1e-3)
    assert l2_norm(st) == pytest.approx(1.0)
    assert h_oscillation_profile(st, 1e-3, 1.5, 6.0).inside >= 1 - 1e-6
    sym = TorusSymbol.real(1, [((0,), gaussian([1.2], 0.5)), ((1,), gaussian([0.9], 0.7, 0.4 + 0.2j)), ((2,), bump([1.0], 0.8, 0.3))])
    errs = []
    for h in (1e-2, 2.5e-3, 6.25e-4):
        s = wave_packet_torus([0.0], [1.0], h)
        errs.append(abs(pairing_instantaneous(s, sym, h).value - predict_mu0_pointmass([0.0], [1.0], sym)))
    # error is O(h) for coherent states, so quartering h divides it by ~4
    for a, b in zip(errs, errs[1:]):
        assert 3.8 <= a / b <= 4.1


def test_eigenmode_family():
    fam = SemiclassicalFamily("eigenmode", k0=(3, 4), h_grid=(0.2, 0.02))
    sym = TorusSymbol(2, [((0, 0), gaussian([0.6, 0.8], 0.5)), ((1, 0), gaussian([0.6, 0.8], 0.5))])
    for n, h, st in fam.members():
        assert l2_norm(st) == 1.0
        p0 = pairing_instantaneous(st, sym, h).value
        for t in np.linspace(-2, 2, 100):
            assert abs(pairing_instantaneous(evolve_torus(st, h, TimeScale(), t), sym, h).value - p0) <= 1e-13
    # h |k0| = |xi0|: the pairing is b(xi0)
    assert pairing_instantaneous(fam.member(1)[1], sym, 0.2).value == pytest.approx(1.0)


@pytest.mark.parametrize(
    "fam",
    [
        SemiclassicalFamily("plane-wave", rho=RHO, xi0=(1, 0), theta0=(1, SQRT2)),
        SemiclassicalFamily("resonant", rho=RHO, xi0=(1, 0), theta0=(1, SQRT2)),
        SemiclassicalFamily("wave-packet", xi0=(1.0,), x0=(0.5,), h_grid=(0.01, 2.5e-3)),
        SemiclassicalFamily("wave-packet", xi0=(1.0, 2**0.5), x0=(0.3, 0.2), h_grid=(0.01, 5e-3)),
        SemiclassicalFamily("eigenmode", k0=(2, -1), h_grid=(0.1, 0.01)),
    ],
)
def test_declared_windows_hold(fam):
    # ladder families concentrate from depth 3 on (h = 0.01)
    for n, h, st in fam.members():
        if h > 0.01:
            continue
        lo, hi = fam.window(h)
        assert h_oscillation_profile(st, h, lo, hi).inside >= 1 - 1e-6


def test_family_validation():
    with pytest.raises(ValueError):
        SemiclassicalFamily("plane-wave")
    with pytest.raises(ValueError):
        SemiclassicalFamily("wave-packet", xi0=(1.0,))
    with pytest.raises(ValueError):
        SemiclassicalFamily("zigzag")
