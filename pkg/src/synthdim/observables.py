"""Quantities read off trajectories: populations, emission asymmetry, decay fits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .model import LatticeSite


def population_series(tr: Trajectory, labels) -> np.ndarray:
    """Summed probability of ``labels`` at every sample."""
    idx = [tr.index(label) for label in labels]
    return tr.probs[:, idx].sum(axis=1)


def _site_columns(tr: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    cols = [i for i, lab in enumerate(tr.basis) if isinstance(lab, LatticeSite)]
    sites = np.array([tr.basis[i].m for i in cols], dtype=int)
    return np.array(cols, dtype=int), sites


def lattice_profile(tr: Trajectory, t: float) -> tuple[np.ndarray, np.ndarray]:
    """``(sites, P_m)`` at the sample nearest ``t``."""
    cols, sites = _site_columns(tr)
    return sites, tr.probs[tr.sample_index(t), cols]


def region_masses(tr: Trajectory, N: int) -> dict:
    """Per-sample lattice mass left of 0, inside ``[0, N]`` and right of ``N``; the rest is atomic."""
    cols, sites = _site_columns(tr)
    P = tr.probs[:, cols]
    left = P[:, sites < 0].sum(axis=1)
    right = P[:, sites > N].sum(axis=1)
    between = P[:, (sites >= 0) & (sites <= N)].sum(axis=1)
    other = np.setdiff1d(np.arange(len(tr.basis)), cols)
    atom = tr.probs[:, other].sum(axis=1)
    return {"left": left, "between": between, "right": right, "atom": atom}


@dataclass(frozen=True)
class ChiralityReport:
    left_mass: float
    right_mass: float
    between_mass: float
    atom_mass: float

    @property
    def asymmetry(self) -> float:
        total = self.right_mass + self.left_mass
        return 0.0 if total == 0 else (self.right_mass - self.left_mass) / total


def chirality(tr: Trajectory, N: int, t: float) -> ChiralityReport:
    """Left/right emission balance about the coupling span ``[0, N]`` at the sample nearest ``t``."""
    i = tr.sample_index(t)
    m = region_masses(tr, N)
    return ChiralityReport(float(m["left"][i]), float(m["right"][i]),
                           float(m["between"][i]), float(m["atom"][i]))


@dataclass(frozen=True)
class DecayFit:
    rate: float
    residual: float
    n_points: int


def fit_decay(times, series, window=(0.9, 0.05)) -> DecayFit:
    """Least-squares slope of ``-log P`` over samples with ``p_lo <= P <= p_hi``.

    Raises ``ValueError`` when fewer than 10 samples fall in the window.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    p_hi, p_lo = window
    mask = (series <= p_hi) & (series >= p_lo) & (series > 0)
    if mask.sum() < 10:
        raise ValueError(f"only {int(mask.sum())} samples inside the fit window {window}")
    t, y = times[mask], -np.log(series[mask])
    A = np.vstack([t, np.ones_like(t)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.sqrt(res[0] / len(t))) if res.size else 0.0
    return DecayFit(float(coef[0]), residual, int(mask.sum()))


def max_deviation(tr1: Trajectory, tr2: Trajectory, labels) -> float:
    """Largest per-label absolute probability difference over the common sample grid."""
    if tr1.times.shape != tr2.times.shape or not np.allclose(tr1.times, tr2.times, rtol=0, atol=1e-9):
        raise ValueError("trajectories are sampled on different grids")
    worst = 0.0
    for label in labels:
        worst = max(worst, float(np.max(np.abs(tr1.prob(label) - tr2.prob(label)))))
    return worst


def boundary_contamination(tr: Trajectory, edge_width: int) -> float:
    """Peak population found within ``edge_width`` sites of either lattice edge."""
    cols, sites = _site_columns(tr)
    if edge_width < 1 or 2 * edge_width > len(sites):
        raise ValueError(f"edge_width must lie in [1, {len(sites) // 2}]")
    lo, hi = sites.min(), sites.max()
    edge = (sites < lo + edge_width) | (sites > hi - edge_width)
    return float(tr.probs[:, cols[edge]].sum(axis=1).max())


__all__ = [
    "population_series", "lattice_profile", "region_masses", "ChiralityReport", "chirality",
    "DecayFit", "fit_decay", "max_deviation", "boundary_contamination",
]
