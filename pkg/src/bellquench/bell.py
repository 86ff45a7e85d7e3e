"""Bell-CHSH value, two-qubit state reconstruction and entanglement.

The maximal CHSH expectation of a two-qubit state is 2*sqrt(l1 + l2)
with l1 >= l2 the two largest eigenvalues of M = T^T T, where T is the
3x3 correlation matrix.  For the X-shaped states produced by this
model T block-diagonalizes into an xy 2x2 block and the scalar C_zz,
so M has eigenvalues {lambda_plus, lambda_minus, C_zz**2} in closed
form and

    B = 2*sqrt(max(lambda_plus + lambda_minus,
                   lambda_plus + C_zz**2)).

This remains the Horodecki maximum even when C_zz**2 exceeds
lambda_plus, since the two largest eigenvalues are then C_zz**2 and
lambda_plus; the generic-eigensolver cross-check in the tests covers
all orderings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import CorrelatorSet
from .errors import InconsistentCorrelatorsError


class BellBranch(enum.Enum):
    PLUS_MINUS = "plus_minus"
    PLUS_CZZ = "plus_czz"


@dataclass(frozen=True)
class BellDiagnostics:
    """Eigenvalues of T^T T and the resulting CHSH value."""

    lambda_plus: float
    lambda_minus: float
    czz_sq: float
    bell: float
    branch: BellBranch


def correlation_matrix(c: CorrelatorSet) -> np.ndarray:
    """3x3 matrix T with T[k][l] = C^{kl}, rows/columns ordered (x, y, z)."""
    return np.array([
        [c.cxx, c.cxy, 0.0],
        [c.cyx, c.cyy, 0.0],
        [0.0, 0.0, c.czz],
    ])


def bell_eigenvalues(c: CorrelatorSet) -> BellDiagnostics:
    """Closed-form eigenvalues of M = T^T T and the CHSH value."""
    s = c.cxx ** 2 + c.cyy ** 2 + c.cxy ** 2 + c.cyx ** 2
    det2 = c.cxx * c.cyy - c.cxy * c.cyx
    disc = s * s - 4.0 * det2 * det2
    root = np.sqrt(max(disc, 0.0))
    lam_plus = 0.5 * (s + root)
    lam_minus = max(0.5 * (s - root), 0.0)
    czz_sq = c.czz ** 2
    if lam_minus >= czz_sq:
        branch, second = BellBranch.PLUS_MINUS, lam_minus
    else:
        branch, second = BellBranch.PLUS_CZZ, czz_sq
    bell = 2.0 * np.sqrt(lam_plus + second)
    return BellDiagnostics(lambda_plus=lam_plus, lambda_minus=lam_minus,
                           czz_sq=czz_sq, bell=float(bell), branch=branch)


def bell_value(c: CorrelatorSet) -> float:
    return bell_eigenvalues(c).bell


def bell_time_average(series: list[CorrelatorSet]) -> float:
    """Trapezoidal time average of the Bell value over a uniform grid."""
    if not series:
        raise ValueError("empty correlator series")
    if len(series) == 1:
        return bell_value(series[0])
    times = np.array([c.t for c in series], dtype=float)
    values = np.array([bell_value(c) for c in series])
    span = times[-1] - times[0]
    if span <= 0:
        raise ValueError("series must span a positive time interval")
    return float(np.trapezoid(values, times) / span)


def eigenvalue_competition(c: CorrelatorSet) -> tuple[float, float]:
    """(lambda_plus - C_zz**2, lambda_minus - C_zz**2) for competition maps."""
    d = bell_eigenvalues(c)
    return d.lambda_plus - d.czz_sq, d.lambda_minus - d.czz_sq


def reconstruct_rho12(c: CorrelatorSet) -> np.ndarray:
    """Two-qubit X-state from the magnetization and correlators.

    Both local magnetizations equal m_z by translation invariance.
    Raises InconsistentCorrelatorsError if the result is not positive
    semidefinite (within -1e-6), which signals an upstream bug rather
    than a physical state.
    """
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 + 2.0 * c.mz + c.czz
    rho[1, 1] = 1.0 - c.czz
    rho[2, 2] = 1.0 - c.czz
    rho[3, 3] = 1.0 - 2.0 * c.mz + c.czz
    rho[0, 3] = c.cxx - c.cyy - 1j * (c.cxy + c.cyx)
    rho[3, 0] = np.conj(rho[0, 3])
    rho[1, 2] = c.cxx + c.cyy + 1j * (c.cxy - c.cyx)
    rho[2, 1] = np.conj(rho[1, 2])
    rho *= 0.25
    if np.linalg.eigvalsh(rho).min() < -1e-6:
        raise InconsistentCorrelatorsError(
            "correlators give a non-positive two-qubit state")
    return rho


def correlators_from_state(rho: np.ndarray, t: float | str = 0.0) -> CorrelatorSet:
    """Inverse of reconstruct_rho12 (site-averaged magnetization)."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    eye = np.eye(2, dtype=complex)

    def expval(op):
        return float(np.real(np.trace(rho @ op)))

    mz = 0.5 * (expval(np.kron(sz, eye)) + expval(np.kron(eye, sz)))
    return CorrelatorSet(mz=mz,
                         cxx=expval(np.kron(sx, sx)),
                         cyy=expval(np.kron(sy, sy)),
                         czz=expval(np.kron(sz, sz)),
                         cxy=expval(np.kron(sx, sy)),
                         cyx=expval(np.kron(sy, sx)), t=t)


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Partial transpose over the second qubit of a 4x4 state."""
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def log_negativity(rho: np.ndarray) -> float:
    """log2 of the trace norm of the partial transpose; 0 for PPT states."""
    eigs = np.linalg.eigvalsh(partial_transpose(rho))
    return float(np.log2(np.sum(np.abs(eigs))))
