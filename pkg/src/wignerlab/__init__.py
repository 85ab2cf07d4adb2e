"""Numerical lab for semiclassical measures of Schrodinger evolutions.

Exact sparse Fourier states on tori, symbols as finite Fourier series in
``x`` with analytic ``xi`` profiles, exact-phase propagators, closed-form
time-averaged Wigner pairings with a quadrature oracle, semiclassical
families and the limits they are predicted to reach.
"""

from .exact import QuadSurd, convergents, is_resonant, partial_quotients, rational_rank
from .lattice import LatticeState, density_coefficients, l2_norm, modulate, sample_on_grid
from .symbols import TorusSymbol, XiProfile, average_along, ball, bump, constant, evaluate, gaussian, poisson_bracket_with_p
from .propagators import GaussianPacket, TimeScale, evolve_free, evolve_torus, wigner_gaussian
from .windows import TestWindow
from .pairings import (
    PairingValue,
    h_oscillation_profile,
    oracle_time_quadrature,
    pairing_instantaneous,
    pairing_position_density,
    pairing_time_averaged,
    pairing_time_derivative,
    pairing_time_derivative_fd,
)
from .euclidean import EuclideanSymbol, pairing_free, pairing_free_time_averaged
from .families import LadderExhausted, LcmLadder, RationalApproxStream, SemiclassicalFamily, wave_packet_torus
from .predictions import (
    MeasurePrediction,
    predict_dispersion,
    predict_mu0_planewave,
    predict_mu0_pointmass,
    predict_mu1,
    predict_mu1_density_form,
    predict_mu2,
    predict_torus_average,
    predict_zoll,
)
from .scenarios import ConfigError, Report, ReportRow, egorov_invariant_check, invariance_residual, run_scenario

__version__ = "0.1.0"
