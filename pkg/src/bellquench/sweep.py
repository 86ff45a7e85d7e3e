"""Quench-grid sweeps, benchmarking thresholds and efficiencies.

A steady-state phase diagram evaluates the dephased correlators for
every (q_i, q_f) pair on a grid.  The diagonal-ensemble Bloch vector
of each mode is bilinear in initial-side and final-side factors,

    n_y = gy_i * (b_f^2/L_f^2)   + gz_i * (u_f b_f/L_f^2)
    n_z = gy_i * (u_f b_f/L_f^2) + gz_i * (u_f^2/L_f^2),

so every mode sum needed by the correlators factorizes into a few
(grid x modes) @ (modes x grid) matrix products and a full 601 x 601
field sweep at N = 512 costs well under a second.  Worker parallelism
splits the initial-axis rows into fixed-size chunks whose results are
written into preallocated slots, so outputs are bitwise identical for
every worker count.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ThresholdUndefinedError
from .model import (BOUNDARY_TOL, ModelParams, QuenchKind,
                    field_quench, coupling_quench, same_phase_area)
from .momentum import dispersion, mode_angles

# Rows per work item; fixed so that chunking (and hence every BLAS call
# shape) does not depend on the worker count.
ROW_CHUNK = 64


class Quantifier(enum.Enum):
    BELL = "bell"
    ENTANGLEMENT = "entanglement"
    CZZ = "czz"


@dataclass(frozen=True)
class GridSpec:
    """Uniform closed grid q_min, q_min + step, ..., q_max."""

    q_min: float
    q_max: float
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.q_min >= self.q_max:
            raise ValueError("q_min must be below q_max")
        n = (self.q_max - self.q_min) / self.step
        if abs(n - round(n)) > 1e-9:
            raise ValueError("grid span must be an integer number of steps")

    @property
    def count(self) -> int:
        return int(round((self.q_max - self.q_min) / self.step)) + 1

    def values(self) -> np.ndarray:
        return self.q_min + self.step * np.arange(self.count)


FIELD_GRID = GridSpec(-3.0, 3.0, 0.01)
COUPLING_GRID = GridSpec(0.5, 3.0, 0.01)


@dataclass(frozen=True)
class PhaseDiagram:
    """Steady-state quantifier over a quench grid plus phase masks.

    values[i, j] belongs to the quench q_i = grid[i] -> q_f = grid[j].
    same_phase_mask marks strictly same-phase pairs; boundary_mask
    marks pairs with either endpoint on a critical line (counted as
    cross-phase by the conservative convention, but kept separately so
    threshold policies can be compared).
    """

    kind: QuenchKind
    fixed: ModelParams
    grid: GridSpec
    quantifier: Quantifier
    values: np.ndarray
    same_phase_mask: np.ndarray
    boundary_mask: np.ndarray

    @property
    def cross_phase_mask(self) -> np.ndarray:
        return ~self.same_phase_mask


@dataclass(frozen=True)
class ThresholdReport:
    q_c: float
    eta: float
    area_detected: float
    area_same: float
    n_cross_cells: int
    n_same_cells: int
    n_detected_cells: int


# ---------------------------------------------------------------------------
# Steady-state engine

def _axis_blocks(params_for, qs, kind):
    """Dispersion amplitudes (a, b) and u = a + h for each grid value."""
    if kind is QuenchKind.FIELD:
        phis = mode_angles(params_for.N)
        a, b = dispersion(params_for, phis)
        a = np.broadcast_to(a, (qs.size, phis.size))
        b = np.broadcast_to(b, (qs.size, phis.size))
        u = a + qs[:, None]
    else:
        phis = mode_angles(params_for.N)
        a = np.empty((qs.size, phis.size))
        b = np.empty((qs.size, phis.size))
        for k, alpha in enumerate(qs):
            a[k], b[k] = dispersion(params_for.replace(alpha=float(alpha)), phis)
        u = a + params_for.h
    return phis, a, b, u


def _steady_maps(fixed: ModelParams, grid: GridSpec, kind: QuenchKind,
                 workers: int = 1):
    """Steady mz, cxx, cyy, czz over the whole (q_i, q_f) grid."""
    qs = grid.values()
    phis, _, b, u = _axis_blocks(fixed, qs, kind)
    n = qs.size
    N = fixed.N

    lam = np.hypot(u, b)
    degen_i = lam < 1e-14
    safe = np.where(degen_i, 1.0, lam)
    gy = np.where(degen_i, 0.0, b / safe)
    gz = np.where(degen_i, -1.0, u / safe)

    lam2 = lam * lam
    degen_f = lam < 1e-12
    safe2 = np.where(degen_f, 1.0, lam2)
    ayy = np.where(degen_f, 1.0, b * b / safe2)
    ayz = np.where(degen_f, 0.0, u * b / safe2)
    azz = np.where(degen_f, 1.0, u * u / safe2)

    cos_p, sin_p = np.cos(phis), np.sin(phis)
    sum_cos = float(np.sum(cos_p))
    # j-side factor matrices, pre-weighted by the mode weights
    f_z_y, f_z_z = (cos_p * ayz).T, (cos_p * azz).T          # for sum cos*nz
    f_y_y, f_y_z = (sin_p * ayy).T, (sin_p * ayz).T          # for sum sin*ny
    f_m_y, f_m_z = ayz.T, azz.T                               # for sum nz

    mz = np.empty((n, n))
    m_cos = np.empty((n, n))
    m_sin = np.empty((n, n))

    def run_chunk(start):
        stop = min(start + ROW_CHUNK, n)
        gy_c, gz_c = gy[start:stop], gz[start:stop]
        mz[start:stop] = (2.0 / N) * (gy_c @ f_m_y + gz_c @ f_m_z)
        m_cos[start:stop] = gy_c @ f_z_y + gz_c @ f_z_z
        m_sin[start:stop] = gy_c @ f_y_y + gz_c @ f_y_z

    starts = range(0, n, ROW_CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_chunk, starts))
    else:
        for start in starts:
            run_chunk(start)

    cxx = (2.0 / N) * (sum_cos - m_cos - m_sin)
    cyy = (2.0 / N) * (sum_cos - m_cos + m_sin)
    g1 = (sum_cos - m_cos) / N
    f1 = m_sin / N
    czz = mz * mz + 4.0 * (f1 * f1 - g1 * g1)
    return mz, cxx, cyy, czz


def _bell_map(cxx, cyy, czz):
    """Horodecki value with C_xy = C_yx = 0 (always true in steady state)."""
    xx2, yy2, zz2 = cxx * cxx, cyy * cyy, czz * czz
    lam_plus = np.maximum(xx2, yy2)
    second = np.maximum(np.minimum(xx2, yy2), zz2)
    return 2.0 * np.sqrt(lam_plus + second)


def _entanglement_map(mz, cxx, cyy, czz):
    """Log-negativity of the steady X-state, elementwise."""
    r00 = (1.0 + 2.0 * mz + czz) / 4.0
    r11 = (1.0 - czz) / 4.0
    r33 = (1.0 - 2.0 * mz + czz) / 4.0
    outer_off = (cxx + cyy) / 4.0
    inner_off = (cxx - cyy) / 4.0
    half_sum = (r00 + r33) / 2.0
    rad = np.sqrt(((r00 - r33) / 2.0) ** 2 + outer_off ** 2)
    trace_norm = (np.abs(half_sum + rad) + np.abs(half_sum - rad)
                  + np.abs(r11 + np.abs(inner_off))
                  + np.abs(r11 - np.abs(inner_off)))
    return np.log2(trace_norm)


def _phase_codes(kind: QuenchKind, fixed: ModelParams, qs: np.ndarray):
    """Per-value phase index (0/1) and on-boundary flag, vectorized."""
    if kind is QuenchKind.FIELD:
        h_c = -1.0 + 2.0 ** (1.0 - fixed.alpha)
        boundary = (np.abs(qs - h_c) <= BOUNDARY_TOL) | (np.abs(qs - 1.0) <= BOUNDARY_TOL)
        code = np.where((qs > h_c) & (qs < 1.0), 0, 1)
    else:
        if fixed.h <= -1.0:
            return np.zeros(qs.size, dtype=int), np.zeros(qs.size, dtype=bool)
        alpha_c = 1.0 - np.log2(1.0 + fixed.h)
        boundary = np.abs(qs - alpha_c) <= BOUNDARY_TOL
        code = np.where(qs < alpha_c, 0, 1)
    return code, boundary


def sweep(kind: QuenchKind, fixed: ModelParams, grid: GridSpec,
          quantifier: Quantifier, workers: int = 1) -> PhaseDiagram:
    """Steady-state phase diagram of one quantifier over a quench grid."""
    qs = grid.values()
    mz, cxx, cyy, czz = _steady_maps(fixed, grid, kind, workers=workers)
    if quantifier is Quantifier.BELL:
        values = _bell_map(cxx, cyy, czz)
    elif quantifier is Quantifier.ENTANGLEMENT:
        values = _entanglement_map(mz, cxx, cyy, czz)
    else:
        values = czz
    code, boundary = _phase_codes(kind, fixed, qs)
    pair_boundary = boundary[:, None] | boundary[None, :]
    same = (code[:, None] == code[None, :]) & ~pair_boundary
    return PhaseDiagram(kind=kind, fixed=fixed, grid=grid,
                        quantifier=quantifier, values=values,
                        same_phase_mask=same, boundary_mask=pair_boundary)


def sweep_all(kind: QuenchKind, fixed: ModelParams, grid: GridSpec,
              workers: int = 1) -> dict[Quantifier, PhaseDiagram]:
    """All three quantifiers from one pass over the correlator maps."""
    qs = grid.values()
    mz, cxx, cyy, czz = _steady_maps(fixed, grid, kind, workers=workers)
    code, boundary = _phase_codes(kind, fixed, qs)
    pair_boundary = boundary[:, None] | boundary[None, :]
    same = (code[:, None] == code[None, :]) & ~pair_boundary
    out = {}
    for quantifier, values in ((Quantifier.BELL, _bell_map(cxx, cyy, czz)),
                               (Quantifier.ENTANGLEMENT,
                                _entanglement_map(mz, cxx, cyy, czz)),
                               (Quantifier.CZZ, czz)):
        out[quantifier] = PhaseDiagram(kind=kind, fixed=fixed, grid=grid,
                                       quantifier=quantifier, values=values,
                                       same_phase_mask=same,
                                       boundary_mask=pair_boundary)
    return out


def critical_threshold(diagram: PhaseDiagram, boundary: str = "cross",
                       cross_lines: str = "model",
                       absolute: bool = False) -> float:
    """Smallest sound threshold: the quantifier maximum over cross cells.

    `boundary` selects how exactly-critical cells enter: "cross" (the
    conservative default) includes them in the maximum, "exclude"
    drops them from both cell classes.

    `cross_lines` selects the critical lines that define the cross
    set.  "model" uses the fall-off-dependent boundary; "nn_limit"
    (field diagrams only) classifies against the fixed lines h = +-1
    of the short-range limit.  The benchmark field-quench thresholds
    track the nn_limit construction; areas and efficiencies always use
    the model topology.
    """
    if boundary not in ("cross", "exclude"):
        raise ValueError(f"unknown boundary policy {boundary!r}")
    if cross_lines == "model":
        cross = diagram.cross_phase_mask.copy()
        if boundary == "exclude":
            cross &= ~diagram.boundary_mask
    elif cross_lines == "nn_limit":
        if diagram.kind is not QuenchKind.FIELD:
            raise ValueError("nn_limit lines apply to field diagrams only")
        qs = diagram.grid.values()
        inside = (qs > -1.0) & (qs < 1.0)
        onb = (np.abs(qs + 1.0) <= BOUNDARY_TOL) | (np.abs(qs - 1.0) <= BOUNDARY_TOL)
        cross = inside[:, None] != inside[None, :]
        pair_onb = onb[:, None] | onb[None, :]
        if boundary == "exclude":
            cross &= ~pair_onb
        else:
            cross |= pair_onb
    else:
        raise ValueError(f"unknown cross_lines policy {cross_lines!r}")
    if not np.any(cross):
        raise ThresholdUndefinedError("phase diagram has no cross-phase cells")
    values = np.abs(diagram.values) if absolute else diagram.values
    return float(np.max(values[cross]))


def efficiency(diagram: PhaseDiagram, q_c: float,
               absolute: bool = False) -> ThresholdReport:
    """Fraction of the same-phase area certified by the threshold q_c.

    Detection is inclusive (value >= q_c); the denominator is the
    analytic same-phase area, not the discretized cell count.
    """
    values = np.abs(diagram.values) if absolute else diagram.values
    same = diagram.same_phase_mask
    detected = same & (values >= q_c)
    n_same = int(np.count_nonzero(same))
    n_detected = int(np.count_nonzero(detected))
    step = diagram.grid.step
    area_detected = n_detected * step * step
    fixed_param = (diagram.fixed.alpha if diagram.kind is QuenchKind.FIELD
                   else diagram.fixed.h)
    area_same = same_phase_area(diagram.kind, fixed_param)
    return ThresholdReport(q_c=q_c, eta=area_detected / area_same,
                           area_detected=area_detected, area_same=area_same,
                           n_cross_cells=int(np.count_nonzero(diagram.cross_phase_mask)),
                           n_same_cells=n_same, n_detected_cells=n_detected)


def threshold_curve(gamma: float, alphas, grid: GridSpec = FIELD_GRID,
                    N: int = 512, J: float = 1.0, workers: int = 1,
                    boundary: str = "cross",
                    cross_lines: str = "nn_limit") -> list[tuple[float, float]]:
    """Field-quench threshold B_c at each fall-off rate.

    Defaults follow the benchmark-threshold construction (nn_limit lines);
    pass cross_lines="model" for the fall-off-dependent topology.
    """
    alphas = list(alphas)
    if not alphas:
        raise ValueError("alphas must be nonempty")

    def one(alpha):
        fixed = ModelParams(N=N, gamma=gamma, alpha=float(alpha), h=0.0, J=J)
        diagram = sweep(QuenchKind.FIELD, fixed, grid, Quantifier.BELL)
        return float(alpha), critical_threshold(diagram, boundary=boundary,
                                                cross_lines=cross_lines)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, alphas))
    return [one(a) for a in alphas]


def threshold_curve_coupling(gamma: float, hs, grid: GridSpec = COUPLING_GRID,
                             N: int = 512, J: float = 1.0, workers: int = 1,
                             boundary: str = "exclude") -> list[tuple[float, float]]:
    """Coupling-quench threshold B_c at each field in the valid window.

    Exactly-critical grid columns (alpha_c on a grid point) are
    excluded by default, matching the benchmark-threshold construction.
    """
    hs = list(hs)
    if not hs:
        raise ValueError("hs must be nonempty")
    for h in hs:
        same_phase_area(QuenchKind.COUPLING, float(h))  # range check

    def one(h):
        fixed = ModelParams(N=N, gamma=gamma, alpha=1.0, h=float(h), J=J)
        diagram = sweep(QuenchKind.COUPLING, fixed, grid, Quantifier.BELL)
        return float(h), critical_threshold(diagram, boundary=boundary)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, hs))
    return [one(h) for h in hs]


def steady_cell(kind: QuenchKind, fixed: ModelParams, q_i: float, q_f: float):
    """Single-cell quench spec, for scalar cross-checks of the engine."""
    if kind is QuenchKind.FIELD:
        return field_quench(fixed, q_i, q_f)
    return coupling_quench(fixed, q_i, q_f)
