"""Quench dynamics: block evolution, correlators, steady-state values.

Each momentum block is a two-level problem in its even sector, so the
state is tracked as a Bloch vector n(t) precessing around the final
Hamiltonian's field d_f at frequency 2*Lambda_f.  Evolution is the
exact rotation (no time stepping), the t -> infinity limit is the
projection of n onto d_f (diagonal ensemble), and all nearest-neighbor
spin correlators are fixed-order mode sums of closed-form weights:

    C_xx = (2/N) sum_phi [cos(phi) (1 - n_z) - sin(phi) n_y]
    C_yy = (2/N) sum_phi [cos(phi) (1 - n_z) + sin(phi) n_y]
    C_xy = C_yx = +(2/N) sum_phi sin(phi) n_x
    m_z  = (2/N) sum_phi n_z

C_zz has no single-block operator; it follows from Wick's theorem on
the one-body functions G0 = <c+_j c_j>, G = <c+_j c_{j+1}> and
F = <c_j c_{j+1}>:

    C_zz = m_z**2 + 4 (|F|**2 - |G|**2).

Sign conventions, both arbitrated by the dense solver (the transient
n_x sector flips under complex conjugation, so only a full dynamical
cross-check can pin them): the evolution operator is the physical
exp(-i H_p t), and with the standard sigma_y the xy weight is
+sin(phi) n_x; the opposite sign belongs to the conjugate
fermionization convention (sigma_y -> -sigma_y) in which the tau^{xy}
blocks of `momentum` are written.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import QuenchSpec
from .momentum import (DEGENERACY_TOL, BlockHamiltonian, BlockState,
                       dispersion, mode_angles)

STEADY = "steady"


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid t = 0, dt, ..., t_max."""

    t_max: float
    dt: float

    def __post_init__(self):
        if self.t_max <= 0 or self.dt <= 0:
            raise ValueError("t_max and dt must be positive")

    def times(self) -> np.ndarray:
        n = int(round(self.t_max / self.dt))
        return self.dt * np.arange(n + 1)


@dataclass(frozen=True)
class CorrelatorSet:
    """Magnetization and the five nonzero nearest-neighbor correlators.

    `t` is the sample time or the string "steady" for the dephased
    long-time limit.  All other two-point correlators vanish by the
    X-state structure of the reduced pair state.
    """

    mz: float
    cxx: float
    cyy: float
    czz: float
    cxy: float
    cyx: float
    t: float | str = 0.0

    def as_dict(self) -> dict:
        return {"mz": self.mz, "cxx": self.cxx, "cyy": self.cyy,
                "czz": self.czz, "cxy": self.cxy, "cyx": self.cyx}


@dataclass(frozen=True)
class OneBodyCorrelations:
    """Wick inputs at separations 0 and 1 (site-independent by PBC)."""

    G0: float
    G: complex
    F: complex


# ---------------------------------------------------------------------------
# Bloch-vector engine (arrays over modes, optionally broadcast over time)

def _quench_blocks(quench: QuenchSpec):
    """Per-mode data: phis, initial Bloch (gy, gz), final field (b_f, u_f)."""
    phis = mode_angles(quench.initial.N)
    a_i, b_i = dispersion(quench.initial, phis)
    a_f, b_f = dispersion(quench.final, phis)
    u_i = a_i + quench.initial.h
    u_f = a_f + quench.final.h
    lam_i = np.hypot(u_i, b_i)
    degen = lam_i < DEGENERACY_TOL
    safe = np.where(degen, 1.0, lam_i)
    gy = np.where(degen, 0.0, b_i / safe)
    gz = np.where(degen, -1.0, u_i / safe)
    return phis, gy, gz, b_f, u_f


def _steady_bloch(gy, gz, b_f, u_f):
    """Diagonal-ensemble Bloch vector: n projected on the final axis.

    Degenerate final blocks (Lambda_f ~ 0) do not dephase at all, so
    the full initial vector survives there.
    """
    lam_f = np.hypot(u_f, b_f)
    degen = lam_f < 1e-12
    safe = np.where(degen, 1.0, lam_f)
    dy = -b_f / safe
    dz = -u_f / safe
    kappa = gy * dy + gz * dz
    ny = np.where(degen, gy, kappa * dy)
    nz = np.where(degen, gz, kappa * dz)
    return ny, nz, int(np.count_nonzero(degen))


def _bloch_at_times(gy, gz, b_f, u_f, times):
    """Rotation of the initial Bloch vectors; shapes (T, M)."""
    lam_f = np.hypot(u_f, b_f)
    degen = lam_f < 1e-30
    safe = np.where(degen, 1.0, lam_f)
    dy = np.where(degen, 0.0, -b_f / safe)
    dz = np.where(degen, 0.0, -u_f / safe)
    kappa = gy * dy + gz * dz
    cross_x = dy * gz - dz * gy
    theta = 2.0 * np.multiply.outer(np.asarray(times, dtype=float), lam_f)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    para_y, para_z = kappa * dy, kappa * dz
    nx = sin_t * cross_x
    ny = para_y + cos_t * (gy - para_y)
    nz = para_z + cos_t * (gz - para_z)
    return nx, ny, nz


def _correlators_from_bloch(phis, nx, ny, nz, N):
    """Mode sums -> (mz, cxx, cyy, czz, cxy); broadcast over leading axes."""
    cos_p, sin_p = np.cos(phis), np.sin(phis)
    two_n = 2.0 / N
    mz = two_n * np.sum(nz, axis=-1)
    sum_cos = float(np.sum(cos_p))
    m_cos = np.sum(cos_p * nz, axis=-1)
    m_sin = np.sum(sin_p * ny, axis=-1)
    m_x = np.sum(sin_p * nx, axis=-1)
    cxx = two_n * (sum_cos - m_cos - m_sin)
    cyy = two_n * (sum_cos - m_cos + m_sin)
    cxy = two_n * m_x
    g1 = (sum_cos - m_cos) / N
    f_re = m_sin / N
    f_im = -m_x / N
    czz = mz * mz + 4.0 * (f_re * f_re + f_im * f_im - g1 * g1)
    return mz, cxx, cyy, czz, cxy


# ---------------------------------------------------------------------------
# Public operations

def evolve_block(rho0: BlockState, hfinal: BlockHamiltonian, t: float) -> BlockState:
    """Exact unitary evolution of one block: rho(t) = U rho0 U+ with
    U = exp(-i H_p t)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    a, b, h = hfinal.a, hfinal.b, hfinal.h
    u = a + h
    lam = np.hypot(u, b)
    # Even sector: exp(-i(a I + d.sigma) t) up to the global phase
    # exp(-i a t), which cancels in rho.  d = (0, -b, -u).
    c, s = np.cos(lam * t), np.sin(lam * t)
    if lam > 0:
        dy, dz = -b / lam, -u / lam
    else:
        dy = dz = 0.0
    u2 = np.array([[c - 1j * s * dz, -s * dy],
                   [s * dy, c + 1j * s * dz]], dtype=complex)
    rho = np.array(rho0.rho, dtype=complex, copy=True)
    rho[:2, :2] = u2 @ rho[:2, :2] @ u2.conj().T
    # Singles evolve by pure phases exp(-i a t) that cancel on the
    # diagonal; their off-diagonal is zero by the block structure.
    return BlockState(rho=rho)


def correlators_at(quench: QuenchSpec, t: float) -> CorrelatorSet:
    """Correlators of the evolved state at one instant."""
    if t < 0:
        raise ValueError("t must be >= 0")
    phis, gy, gz, b_f, u_f = _quench_blocks(quench)
    nx, ny, nz = _bloch_at_times(gy, gz, b_f, u_f, np.array([t]))
    mz, cxx, cyy, czz, cxy = _correlators_from_bloch(
        phis, nx[0], ny[0], nz[0], quench.initial.N)
    return CorrelatorSet(mz=float(mz), cxx=float(cxx), cyy=float(cyy),
                         czz=float(czz), cxy=float(cxy), cyx=float(cxy), t=t)


def one_body_correlations(quench: QuenchSpec, t: float) -> OneBodyCorrelations:
    """Fermionic one-body functions of the evolved state."""
    if t < 0:
        raise ValueError("t must be >= 0")
    phis, gy, gz, b_f, u_f = _quench_blocks(quench)
    nx, ny, nz = _bloch_at_times(gy, gz, b_f, u_f, np.array([t]))
    nx, ny, nz = nx[0], ny[0], nz[0]
    N = quench.initial.N
    cos_p, sin_p = np.cos(phis), np.sin(phis)
    g0 = float(np.sum(1.0 - nz)) / N
    g = complex(np.sum(cos_p * (1.0 - nz))) / N
    f = complex(np.sum(sin_p * ny) - 1j * np.sum(sin_p * nx)) / N
    return OneBodyCorrelations(G0=g0, G=g, F=f)


def steady_correlators(quench: QuenchSpec) -> CorrelatorSet:
    """Dephased (diagonal-ensemble) correlators; the t -> infinity limit.

    Every block keeps only the component of its Bloch vector along the
    final field axis, killing the oscillatory terms in closed form.
    The transverse n_x component dies entirely, so the steady state has
    C_xy = C_yx = 0.
    """
    phis, gy, gz, b_f, u_f = _quench_blocks(quench)
    ny, nz, _ = _steady_bloch(gy, gz, b_f, u_f)
    nx = np.zeros_like(ny)
    mz, cxx, cyy, czz, cxy = _correlators_from_bloch(
        phis, nx, ny, nz, quench.initial.N)
    return CorrelatorSet(mz=float(mz), cxx=float(cxx), cyy=float(cyy),
                         czz=float(czz), cxy=float(cxy), cyx=float(cxy),
                         t=STEADY)


def correlator_time_series(quench: QuenchSpec, grid: TimeGrid) -> list[CorrelatorSet]:
    """Correlators sampled on a uniform grid (exact at every sample)."""
    times = grid.times()
    if times.size == 0:
        raise ValueError("empty time grid")
    phis, gy, gz, b_f, u_f = _quench_blocks(quench)
    nx, ny, nz = _bloch_at_times(gy, gz, b_f, u_f, times)
    mz, cxx, cyy, czz, cxy = _correlators_from_bloch(
        phis, nx, ny, nz, quench.initial.N)
    return [CorrelatorSet(mz=float(mz[k]), cxx=float(cxx[k]), cyy=float(cyy[k]),
                          czz=float(czz[k]), cxy=float(cxy[k]),
                          cyx=float(cxy[k]), t=float(times[k]))
            for k in range(times.size)]
