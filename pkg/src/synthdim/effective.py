"""Effective descriptions of the driven multi-level atom.

* adiabatic elimination of the intermediate levels (two-level giant atom with
  couplings ``g eta / Delta`` and Stark shifts),
* Markovian interference factors and decay constants of the giant/small-atom
  pair on a lattice,
* a second-order effective Hamiltonian for ``H(t) = sum_k h_k^dag e^{i D_k t} + h.c.``
  and its closed form for the ladder-type atom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (E, F, Generator, LatticeSite, ModelParams, _assemble, _check_extent,
                    _hopping, _lattice_labels)

BAND_CENTER_K0 = -math.pi / 2


def exact_phase(angle: float) -> complex:
    """``exp(i angle)``, exact when ``angle`` is a multiple of ``pi/2`` (to 1e-12)."""
    quarter = angle / (math.pi / 2)
    q = round(quarter)
    if abs(quarter - q) < 1e-12:
        return (1 + 0j, 1j, -1 + 0j, -1j)[q % 4]
    return complex(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class EffectiveParams:
    g_e1: float
    g_e2: float
    delta_ee: float
    delta_e1: float
    delta_e2: float
    theta: float = 0.0


def derive_effective(p: ModelParams) -> EffectiveParams:
    """Eliminate ``f1`` and ``f2`` for ``|delta| >> g, eta``."""
    if p.delta1 == 0 or p.delta2 == 0:
        raise ValueError("adiabatic elimination needs nonzero detunings")
    return EffectiveParams(
        g_e1=p.g1 * p.eta1 / p.delta1,
        g_e2=p.g2 * p.eta2 / p.delta2,
        delta_ee=(p.eta1 ** 2 * p.delta2 + p.eta2 ** 2 * p.delta1) / (p.delta1 * p.delta2),
        delta_e1=p.g1 ** 2 / p.delta1,
        delta_e2=p.g2 ** 2 / p.delta2,
        theta=p.theta,
    )


def build_effective_generator(ep: EffectiveParams, N: int, m_min: int, m_max: int,
                              include_shifts: bool = True, J: float = 1.0) -> Generator:
    """Two-level giant atom from eliminated parameters; ``<e|H|0> = g_e1 e^{i theta}``."""
    _check_extent(m_min, m_max, 0, N)
    basis = _lattice_labels(m_min, m_max) + [E]
    couplings = _hopping(J, m_min, m_max) + [
        (E, LatticeSite(0), ep.g_e1 * np.exp(1j * ep.theta)),
        (E, LatticeSite(N), ep.g_e2),
    ]
    diagonal = [(E, ep.delta_ee)]
    if include_shifts:
        diagonal += [(LatticeSite(0), ep.delta_e1), (LatticeSite(N), ep.delta_e2)]
    params = dict(vars(ep), N=N, m_min=m_min, m_max=m_max, include_shifts=include_shifts, J=J)
    return Generator(basis, _assemble(basis, couplings, diagonal), model="effective", params=params)


# ---------------------------------------------------------------------------
# Markovian giant/small-atom algebra


@dataclass(frozen=True)
class MarkovRates:
    gamma_b: float
    gamma_c: float
    gamma_bc: float
    v0: float = 2.0
    k0: float = BAND_CENTER_K0

    def __post_init__(self):
        if not math.isclose(self.gamma_bc ** 2, self.gamma_b * self.gamma_c, rel_tol=1e-12, abs_tol=1e-300):
            raise ValueError("need gamma_bc**2 == gamma_b * gamma_c")
        if self.v0 <= 0:
            raise ValueError("group speed must be positive")

    @classmethod
    def from_couplings(cls, g: float, xi: float, J: float = 1.0,
                       k0: float = BAND_CENTER_K0) -> "MarkovRates":
        v0 = -2 * J * math.sin(k0)
        return cls(g * g / v0, xi * xi / v0, g * xi / v0, v0, k0)


SIDES = ("between", "left", "right")
DIRECTIONS = ("G->S", "S->G", "symmetric")


def resolve_side(side: str, M: int, N: int) -> tuple[int, int]:
    """Distances ``(|M|, |N - M|)`` from the small atom at ``M`` to sites 0 and N."""
    if side == "between":
        ok = 0 < M < N
    elif side == "left":
        ok = M < 0
    elif side == "right":
        ok = M > N
    else:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if not ok:
        raise ValueError(f"M={M} inconsistent with side {side!r} for N={N}")
    return abs(M), abs(N - M)


def markov_coupling(direction: str, side: str, M: int, D: int, theta: float,
                    k0: float = BAND_CENTER_K0) -> complex:
    """Interference factor of the Markovian giant/small coupling.

    ``e^{i(k0 |M| - theta)} + e^{i k0 |D|}`` from the giant atom to the small one,
    ``e^{i(k0 |M| + theta)} + e^{i k0 |D|}`` for the reverse direction. ``D = N - M``.
    The ``symmetric`` form is only defined when ``sin(theta) = 0``.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    dM, dD = resolve_side(side, M, M + D)
    if direction == "symmetric":
        if exact_phase(theta).imag != 0:
            raise ValueError("symmetric coupling requires theta to be a multiple of pi")
        sign = 1
    else:
        sign = -1 if direction == "G->S" else 1
    return exact_phase(k0 * dM + sign * theta) + exact_phase(k0 * dD)


def giant_self_coefficient(gamma_b: float, theta: float, N: int, k0: float = BAND_CENTER_K0) -> complex:
    """Complex self-interaction ``2 gamma_b (1 + cos(theta) e^{i k0 N})`` of the giant atom."""
    return 2 * gamma_b * (1 + exact_phase(theta).real * exact_phase(k0 * N))


def giant_decay_rate(gamma_b: float, theta: float, N: int, k0: float = BAND_CENTER_K0) -> float:
    """Amplitude decay constant; the population decays at twice this rate."""
    if gamma_b < 0:
        raise ValueError("gamma_b must be non-negative")
    return giant_self_coefficient(gamma_b, theta, N, k0).real


# ---------------------------------------------------------------------------
# effective Hamiltonian theory


def effective_hamiltonian(terms, dim: int | None = None) -> np.ndarray:
    """Static part of ``-i H(t) int^t H(t') dt'`` for ``H(t) = sum_k h_k^dag e^{i D_k t} + h.c.``.

    ``terms`` is a list of ``(h_dag, detuning)`` pairs with ``h_dag`` the
    raising part as a square matrix. A product survives only when its net
    frequency ``D_m +- D_n`` is exactly zero::

        H_eff = sum_{m,n} -(1/D_n) [ (h_m^dag h_n^dag - h_m h_n) [D_m + D_n = 0]
                                     + (h_m h_n^dag - h_m^dag h_n) [D_m = D_n] ]

    For a single term this is ``[h^dag, h] / D``. ``dim`` sizes the (zero)
    result of an empty term list.
    """
    terms = [(np.asarray(op, dtype=complex), float(d)) for op, d in terms]
    if not terms:
        return np.zeros((dim or 0, dim or 0), dtype=complex)
    shape = terms[0][0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError("operators must be square matrices")
    for op, d in terms:
        if op.shape != shape:
            raise ValueError("operator dimensions differ")
        if d == 0:
            raise ValueError("detunings must be nonzero")
    raising = [op for op, _ in terms]
    lowering = [op.conj().T for op in raising]
    H = np.zeros(shape, dtype=complex)
    for m, (_, dm) in enumerate(terms):
        for n, (_, dn) in enumerate(terms):
            if dm + dn == 0:
                H -= (raising[m] @ raising[n] - lowering[m] @ lowering[n]) / dn
            if dm - dn == 0:
                H -= (lowering[m] @ raising[n] - raising[m] @ lowering[n]) / dn
    return H


def ladder_effective(J, g1, g2, eta1, eta2, delta1, delta2, theta, N, m_min, m_max) -> Generator:
    """Closed-form effective Hamiltonian of the ladder-type atom.

    Stark shift ``eta1^2/delta1 + eta2^2/delta2`` on ``e``, ``g1^2/delta1`` on
    site 0 and ``g2^2/delta2`` on site N, and couplings ``(g1 eta1/delta1) e^{i theta}``
    (site 0) and ``g2 eta2/delta2`` (site N) to ``e``. The intermediate level
    ``f`` stays in the basis but is left decoupled, without its Stark shift.
    """
    if delta1 == 0 or delta2 == 0:
        raise ValueError("ladder elimination needs nonzero detunings")
    _check_extent(m_min, m_max, 0, N)
    basis = _lattice_labels(m_min, m_max) + [F, E]
    couplings = _hopping(J, m_min, m_max) + [
        (E, LatticeSite(0), g1 * eta1 / delta1 * np.exp(1j * theta)),
        (E, LatticeSite(N), g2 * eta2 / delta2),
    ]
    diagonal = [
        (E, eta1 ** 2 / delta1 + eta2 ** 2 / delta2),
        (LatticeSite(0), g1 ** 2 / delta1),
        (LatticeSite(N), g2 ** 2 / delta2),
    ]
    params = {"J": J, "g1": g1, "g2": g2, "eta1": eta1, "eta2": eta2, "delta1": delta1,
              "delta2": delta2, "theta": theta, "N": N, "m_min": m_min, "m_max": m_max}
    return Generator(basis, _assemble(basis, couplings, diagonal), model="ladder_effective",
                     params=params)


__all__ = [
    "BAND_CENTER_K0", "exact_phase", "EffectiveParams", "derive_effective",
    "build_effective_generator", "MarkovRates", "SIDES", "DIRECTIONS", "resolve_side",
    "markov_coupling", "giant_self_coefficient", "giant_decay_rate", "effective_hamiltonian",
    "ladder_effective",
]
