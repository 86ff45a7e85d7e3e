"""Bell-correlator detection of dynamical phase transitions in the
long-range anisotropic XY chain."""

__version__ = "0.1.0"

from .model import (ModelParams, PhaseGeometry, QuenchKind, QuenchSpec,
                    coupling_profile, coupling_quench, field_quench,
                    kac_factor, phase_geometry, same_phase, same_phase_area)
from .momentum import (BlockHamiltonian, BlockOperators, BlockState,
                       MomentumMode, build_block_hamiltonian,
                       build_block_operators, ground_block_state, mode_angles)
from .dynamics import (CorrelatorSet, OneBodyCorrelations, TimeGrid,
                       correlator_time_series, correlators_at, evolve_block,
                       one_body_correlations, steady_correlators)
from .bell import (BellDiagnostics, bell_eigenvalues, bell_time_average,
                   bell_value, eigenvalue_competition, log_negativity,
                   reconstruct_rho12)
# the bare `sweep` function stays on the submodule so that
# `bellquench.sweep` keeps naming the module
from .sweep import (COUPLING_GRID, FIELD_GRID, GridSpec, PhaseDiagram,
                    Quantifier, ThresholdReport, critical_threshold,
                    efficiency, sweep_all, threshold_curve,
                    threshold_curve_coupling)
from .fit import GaussianFit, TriGaussianFit, fit_gaussian, fit_trigaussian
