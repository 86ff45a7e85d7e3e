"""Nonlinear least-squares fits of the threshold curves.

Two fit families: a single Gaussian-in-alpha with offset,
A*exp(-B*alpha**2) + C, for field-quench thresholds, and a sum of
three Gaussians in h for coupling-quench thresholds.  Both use
derivative-free Nelder-Mead with deterministic multi-starts (data-
driven seeds plus seeded jitter); the best start wins, ties broken by
start index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import FitFailedError

N_STARTS = 5
MAX_FEV = 100_000
_PENALTY = 1e30


@dataclass(frozen=True)
class GaussianFit:
    """Parameters of y = A*exp(-B*x**2) + C."""

    A: float
    B: float
    C: float
    r_squared: float

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * np.exp(-self.B * x * x) + self.C


@dataclass(frozen=True)
class GaussComponent:
    amplitude: float
    center: float
    width: float


@dataclass(frozen=True)
class TriGaussianFit:
    """Sum of three Gaussian bumps, components sorted by center."""

    components: tuple[GaussComponent, GaussComponent, GaussComponent]
    r_squared: float
    low_confidence: bool = False

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for comp in self.components:
            out = out + comp.amplitude * np.exp(
                -((x - comp.center) ** 2) / (2.0 * comp.width ** 2))
        return out


def _r_squared(y, residual_ss):
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if residual_ss < 1e-30 else 0.0
    return 1.0 - residual_ss / ss_tot


def _polish(objective, starts):
    """Run Nelder-Mead from every start; return (params, ss) of the best.

    Deterministic: starts are evaluated in order and a strictly lower
    objective is required to displace the incumbent.
    """
    best = None
    for x0 in starts:
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxfev": MAX_FEV, "xatol": 1e-12,
                                "fatol": 1e-14})
        if not np.all(np.isfinite(res.x)) or not np.isfinite(res.fun):
            continue
        if best is None or res.fun < best[1]:
            best = (res.x, float(res.fun))
    if best is None or best[1] >= _PENALTY:
        raise FitFailedError("no start converged",
                             best_residual=None if best is None else best[1])
    return best


def fit_gaussian(points, seed: int = 0) -> GaussianFit:
    """Least-squares A*exp(-B*x**2) + C through (x, y) points."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 4:
        raise ValueError("need at least 4 (x, y) points")
    pts = pts[np.argsort(pts[:, 0])]
    x, y = pts[:, 0], pts[:, 1]
    if np.unique(x).size != x.size:
        raise ValueError("x values must be distinct")

    def objective(p):
        a, b, c = p
        if b <= 0:
            return _PENALTY * (1.0 + abs(b))
        return float(np.sum((a * np.exp(-b * x * x) + c - y) ** 2))

    # data-driven seeds: offset from the tail, amplitude from the head,
    # width from the half-decay point
    c0 = float(y[-1])
    a0 = float(y[0] - c0)
    b0 = 0.1
    if abs(a0) > 1e-12:
        decayed = np.nonzero(np.abs(y - c0) <= abs(a0) / 2.0)[0]
        if decayed.size and x[decayed[0]] > 0:
            b0 = float(np.log(2.0) / x[decayed[0]] ** 2)
    rng = np.random.default_rng(seed)
    starts = [np.array([a0, b0, c0]),
              np.array([a0, 5.0 * b0, c0]),
              np.array([a0, 0.2 * b0, c0])]
    while len(starts) < N_STARTS:
        jitter = rng.uniform(0.5, 1.5, size=3)
        starts.append(np.array([a0 * jitter[0], b0 * jitter[1],
                                c0 * (1.0 + 0.01 * (jitter[2] - 1.0))]))
    params, ss = _polish(objective, starts)
    return GaussianFit(A=float(params[0]), B=float(params[1]),
                       C=float(params[2]), r_squared=_r_squared(y, ss))


def _local_maxima(x, y):
    """Interior local maxima sorted by height (descending)."""
    idx = [i for i in range(1, len(y) - 1)
           if y[i] >= y[i - 1] and y[i] >= y[i + 1]
           and (y[i] > y[i - 1] or y[i] > y[i + 1])]
    idx.sort(key=lambda i: -y[i])
    # keep peaks separated by at least two samples
    kept = []
    for i in idx:
        if all(abs(i - j) > 2 for j in kept):
            kept.append(i)
    return kept


def fit_trigaussian(points, seed: int = 0) -> TriGaussianFit:
    """Least-squares sum of three Gaussians through (x, y) points.

    Initial centers sit at the three largest resolvable local maxima;
    with fewer than three, centers fall back to equal spacing and the
    result is flagged low-confidence.  Widths are bounded below by the
    data spacing to rule out delta-spike fits.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 10:
        raise ValueError("need at least 10 (x, y) points")
    pts = pts[np.argsort(pts[:, 0])]
    x, y = pts[:, 0], pts[:, 1]
    if np.unique(x).size != x.size:
        raise ValueError("x values must be distinct")
    sigma_min = float(np.min(np.diff(x)))
    span = float(x[-1] - x[0])

    def objective(p):
        amps, mus, sigmas = p[0:3], p[3:6], p[6:9]
        if np.any(amps < 0) or np.any(sigmas < sigma_min):
            return _PENALTY
        model = np.zeros_like(y)
        for a, m, s in zip(amps, mus, sigmas):
            model = model + a * np.exp(-((x - m) ** 2) / (2.0 * s * s))
        return float(np.sum((model - y) ** 2))

    peaks = _local_maxima(x, y)[:3]
    low_confidence = len(peaks) < 3
    if low_confidence:
        centers = x[0] + span * np.array([0.25, 0.5, 0.75])
        amps = np.full(3, max(float(y.max()), 1e-6))
    else:
        centers = x[np.array(peaks)]
        amps = y[np.array(peaks)]
    base = np.concatenate([amps, centers,
                           np.full(3, max(span / 6.0, sigma_min * 2.0))])
    rng = np.random.default_rng(seed)
    starts = [base,
              np.concatenate([amps, centers,
                              np.full(3, max(span / 12.0, sigma_min * 1.5))]),
              np.concatenate([amps * 0.7, centers, np.full(3, span / 3.0)])]
    while len(starts) < N_STARTS:
        jitter = rng.uniform(0.8, 1.2, size=9)
        starts.append(base * jitter)
    params, ss = _polish(objective, starts)
    comps = sorted((GaussComponent(amplitude=float(params[k]),
                                   center=float(params[3 + k]),
                                   width=float(params[6 + k]))
                    for k in range(3)), key=lambda c: c.center)
    return TriGaussianFit(components=tuple(comps),
                          r_squared=_r_squared(y, ss),
                          low_confidence=low_confidence)
