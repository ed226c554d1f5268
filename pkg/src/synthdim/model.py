"""Single-excitation basis and Hamiltonian builders.

Every model lives in the one-excitation sector: either one photon sits on a
frequency-lattice site while the atom is in its ground state, or the photon
number is zero and the atom (or an auxiliary mode) carries the excitation.
The ground level therefore never appears as a basis state; a lattice site
label stands for ``a_m^dag |0, g>``.

Builders return :class:`Generator` objects holding a static Hermitian matrix
plus optional oscillating terms. Energies are in units of the hopping rate
``J`` (hbar = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

ATOM_LEVELS = ("g", "f1", "f2", "f", "e")
_LEVEL_ORDER = {"f1": 0, "f2": 1, "f": 2, "e": 3, "g": 4}


# ---------------------------------------------------------------------------
# basis labels


@dataclass(frozen=True)
class LatticeSite:
    m: int

    @property
    def name(self) -> str:
        return f"m<{self.m}>"


@dataclass(frozen=True)
class AtomLevel:
    """Excited level of an emitter; ``atom`` tags emitters in multi-atom models."""

    level: str
    atom: str = ""

    def __post_init__(self):
        if self.level not in ATOM_LEVELS:
            raise ValueError(f"unknown atomic level {self.level!r}")

    @property
    def name(self) -> str:
        if self.atom:
            return f"atom_{self.atom}_{self.level}"
        return f"atom_{self.level}"


@dataclass(frozen=True)
class AuxMode:
    idx: int

    def __post_init__(self):
        if self.idx not in (1, 2):
            raise ValueError("auxiliary mode index must be 1 or 2")

    @property
    def name(self) -> str:
        return f"aux_{self.idx}"


BasisLabel = Union[LatticeSite, AtomLevel, AuxMode]


def parse_label(text: str) -> BasisLabel:
    """Inverse of ``label.name``: ``"m<-3>"``, ``"atom_e"``, ``"atom_A_e"``, ``"aux_1"``."""
    text = text.strip()
    if text.startswith("m<") and text.endswith(">"):
        return LatticeSite(int(text[2:-1]))
    if text.startswith("aux_"):
        return AuxMode(int(text[4:]))
    if text.startswith("atom_"):
        parts = text[5:].split("_")
        if len(parts) == 1:
            return AtomLevel(parts[0])
        if len(parts) == 2:
            return AtomLevel(parts[1], atom=parts[0])
    raise ValueError(f"cannot parse basis label {text!r}")


def _sort_key(label: BasisLabel):
    if isinstance(label, LatticeSite):
        return (0, label.m, "", 0)
    if isinstance(label, AtomLevel):
        return (1, 0, label.atom, _LEVEL_ORDER[label.level])
    return (2, label.idx, "", 0)


def sort_basis(labels: Iterable[BasisLabel]) -> tuple:
    """Canonical ordering: sites ascending, then atomic levels, then aux modes."""
    return tuple(sorted(set(labels), key=_sort_key))


# ---------------------------------------------------------------------------
# parameters


def centered_extent(m_tot: int, span: int) -> tuple[int, int]:
    """Lattice window of ``m_tot`` sites with the coupling span ``[0, span]`` centred."""
    if m_tot < span + 1:
        raise ValueError(f"{m_tot} sites cannot hold coupling points 0..{span}")
    m_min = -((m_tot - span - 1) // 2)
    return m_min, m_min + m_tot - 1


def _check_extent(m_min: int, m_max: int, *points: int) -> None:
    if int(m_min) != m_min or int(m_max) != m_max:
        raise ValueError("lattice extent must be integer")
    if m_min >= m_max:
        raise ValueError(f"need m_min < m_max, got {m_min} >= {m_max}")
    for p in points:
        if not m_min <= p <= m_max:
            raise ValueError(f"site {p} outside lattice [{m_min}, {m_max}]")


def _check_finite(**values) -> None:
    for key, v in values.items():
        if not np.isfinite(v):
            raise ValueError(f"{key} must be finite, got {v!r}")


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the four-level giant-atom model.

    ``delta1``/``delta2`` are the one-photon detunings; the drives are
    assumed two-photon resonant. ``N`` is the separation of the two
    coupling points (sites ``0`` and ``N``).
    """

    J: float = 1.0
    g1: float = 3.0
    g2: float = 3.0
    eta1: float = 2.0
    eta2: float = 2.0
    delta1: float = 60.0
    delta2: float = 60.0
    theta: float = 0.0
    N: int = 2
    m_min: int = -11
    m_max: int = 13

    def __post_init__(self):
        _check_finite(J=self.J, g1=self.g1, g2=self.g2, eta1=self.eta1, eta2=self.eta2,
                      delta1=self.delta1, delta2=self.delta2, theta=self.theta)
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a non-negative integer, got {self.N!r}")
        _check_extent(self.m_min, self.m_max, 0, self.N)

    @classmethod
    def centered(cls, m_tot: int = 25, **kwargs) -> "ModelParams":
        N = int(kwargs.get("N", cls.N))
        m_min, m_max = centered_extent(m_tot, N)
        return cls(m_min=m_min, m_max=m_max, **kwargs)

    @property
    def m_tot(self) -> int:
        return self.m_max - self.m_min + 1

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


# ---------------------------------------------------------------------------
# generator


@dataclass(frozen=True)
class DriveSchedule:
    """Piecewise-constant amplitude; piece ``(t0, a)`` holds for ``t >= t0``."""

    pieces: tuple = ((0.0, 1.0),)

    def __post_init__(self):
        pieces = tuple((float(t), float(a)) for t, a in self.pieces)
        if not pieces or pieces[0][0] != 0.0:
            raise ValueError("first schedule piece must start at t=0")
        starts = [t for t, _ in pieces]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("schedule start times must be strictly increasing")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def switch_off(cls, t_off: float, amplitude: float = 1.0) -> "DriveSchedule":
        """``amplitude * (1 - Theta(t - t_off))``."""
        return cls(((0.0, amplitude), (t_off, 0.0)))

    def __call__(self, t: float) -> float:
        value = self.pieces[0][1]
        for t0, a in self.pieces:
            if t0 <= t:
                value = a
            else:
                break
        return value

    @property
    def breakpoints(self) -> tuple:
        return tuple(t for t, _ in self.pieces[1:])

    @property
    def is_constant(self) -> bool:
        return len(self.pieces) == 1


@dataclass(frozen=True)
class TDTerm:
    """Contributes ``schedule(t) * (operator e^{i w t} + operator^dag e^{-i w t})``."""

    operator: np.ndarray
    frequency: float
    schedule: DriveSchedule = DriveSchedule()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Generator:
    basis: tuple
    static: np.ndarray
    td_terms: tuple = ()
    model: str = ""
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "static", _frozen(self.static))
        n = len(self.basis)
        if self.static.shape != (n, n):
            raise ValueError(f"static part has shape {self.static.shape}, basis has {n} labels")
        if len(set(self.basis)) != n:
            raise ValueError("duplicate basis labels")
        terms = []
        for term in self.td_terms:
            op = _frozen(term.operator)
            if op.shape != (n, n):
                raise ValueError("time-dependent operator does not match basis")
            terms.append(TDTerm(op, float(term.frequency), term.schedule))
        object.__setattr__(self, "td_terms", tuple(terms))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label: BasisLabel) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise KeyError(f"{label!r} not in basis") from None

    @property
    def is_static(self) -> bool:
        return not self.td_terms

    @property
    def is_piecewise_static(self) -> bool:
        return all(t.frequency == 0.0 for t in self.td_terms)

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted({b for t in self.td_terms for b in t.schedule.breakpoints}))

    def hamiltonian(self, t: float = 0.0) -> np.ndarray:
        H = np.array(self.static)
        for term in self.td_terms:
            s = term.schedule(t)
            if s == 0.0:
                continue
            phase = np.exp(1j * term.frequency * t)
            H += s * (phase * term.operator + np.conj(phase) * term.operator.conj().T)
        return H

    def spectral_bound(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.static)))) if self.dim else 0.0

    def max_frequency(self) -> float:
        return max((abs(t.frequency) for t in self.td_terms), default=0.0)


@dataclass(frozen=True)
class StateVector:
    basis: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        amps = _frozen(self.amplitudes)
        if amps.shape != (len(self.basis),):
            raise ValueError("amplitude vector does not match basis")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-9:
            raise ValueError(f"state not normalized (norm {np.linalg.norm(amps):.12g})")
        object.__setattr__(self, "amplitudes", amps)


def init_state(basis, label: BasisLabel) -> StateVector:
    """Unit amplitude on ``label``; ``basis`` may be a Generator or a label sequence."""
    labels = tuple(basis.basis if isinstance(basis, Generator) else basis)
    if label not in labels:
        raise KeyError(f"{label!r} not in basis")
    amps = np.zeros(len(labels), dtype=complex)
    amps[labels.index(label)] = 1.0
    return StateVector(labels, amps)


def superpose(basis, weights: dict) -> StateVector:
    """Normalized superposition ``sum_label w * |label>``."""
    labels = tuple(basis.basis if isinstance(basis, Generator) else basis)
    amps = np.zeros(len(labels), dtype=complex)
    for label, w in weights.items():
        amps[labels.index(label)] += w
    return StateVector(labels, amps / np.linalg.norm(amps))


# ---------------------------------------------------------------------------
# builders


def _lattice_labels(m_min: int, m_max: int) -> list:
    return [LatticeSite(m) for m in range(m_min, m_max + 1)]


def _assemble(basis: Sequence, couplings=(), diagonal=()) -> np.ndarray:
    """Hermitian matrix from ``<a|H|b> = v`` entries (conjugates added) and diagonals."""
    idx = {lab: i for i, lab in enumerate(basis)}
    H = np.zeros((len(basis), len(basis)), dtype=complex)
    for a, b, v in couplings:
        if v == 0:
            continue
        H[idx[a], idx[b]] += v
        H[idx[b], idx[a]] += np.conj(v)
    for a, v in diagonal:
        H[idx[a], idx[a]] += v
    return H


def _transition(basis: Sequence, to: BasisLabel, frm: BasisLabel, amp: complex) -> np.ndarray:
    idx = {lab: i for i, lab in enumerate(basis)}
    op = np.zeros((len(basis), len(basis)), dtype=complex)
    op[idx[to], idx[frm]] = amp
    return op


def _hopping(J: float, m_min: int, m_max: int) -> list:
    return [(LatticeSite(m), LatticeSite(m + 1), J) for m in range(m_min, m_max)]


def build_lattice(J: float, m_min: int, m_max: int) -> Generator:
    """Open tight-binding chain ``J sum_m (a_m^dag a_{m+1} + h.c.)``."""
    _check_finite(J=J)
    _check_extent(m_min, m_max)
    basis = _lattice_labels(m_min, m_max)
    return Generator(basis, _assemble(basis, _hopping(J, m_min, m_max)), model="lattice",
                     params={"J": J, "m_min": m_min, "m_max": m_max})


F1, F2, F, E = AtomLevel("f1"), AtomLevel("f2"), AtomLevel("f"), AtomLevel("e")


def _four_level_terms(p: ModelParams, site0: int, siteN: int, tag: str = ""):
    f1, f2, e = AtomLevel("f1", tag), AtomLevel("f2", tag), AtomLevel("e", tag)
    lower = [(LatticeSite(site0), f1, p.g1), (LatticeSite(siteN), f2, p.g2)]
    upper = [(e, f1, p.eta1 * np.exp(1j * p.theta)), (e, f2, p.eta2)]
    diag = [(f1, -p.delta1), (f2, -p.delta2)]
    return [f1, f2, e], lower, upper, diag


def _drive_terms(basis, upper, drive: DriveSchedule) -> tuple:
    return tuple(TDTerm(_transition(basis, a, b, v), 0.0, drive) for a, b, v in upper)


def build_full_static(p: ModelParams, drive: DriveSchedule | None = None) -> Generator:
    """Four-level giant atom in the frame where the Hamiltonian is time independent.

    With ``drive`` given, the two pump couplings are moved into
    zero-frequency time-dependent terms scaled by the schedule.
    """
    levels, lower, upper, diag = _four_level_terms(p, 0, p.N)
    basis = _lattice_labels(p.m_min, p.m_max) + levels
    couplings = _hopping(p.J, p.m_min, p.m_max) + lower
    if drive is None:
        return Generator(basis, _assemble(basis, couplings + upper, diag),
                         model="full_static", params=p.as_dict())
    return Generator(basis, _assemble(basis, couplings, diag), _drive_terms(basis, upper, drive),
                     model="full_static", params=p.as_dict())


def build_full_td(p: ModelParams) -> Generator:
    """Four-level giant atom in the interaction picture (two-photon resonant drives)."""
    levels, lower, upper, _ = _four_level_terms(p, 0, p.N)
    basis = _lattice_labels(p.m_min, p.m_max) + levels
    freqs = [p.delta1, p.delta2, p.delta1, p.delta2]
    terms = tuple(TDTerm(_transition(basis, a, b, v), w)
                  for (a, b, v), w in zip(lower + upper, freqs))
    return Generator(basis, _assemble(basis, _hopping(p.J, p.m_min, p.m_max)), terms,
                     model="full_td", params=p.as_dict())


def build_real_space(lambda1: float, lambda2: float, N: int, m_min: int, m_max: int,
                     J: float = 1.0) -> Generator:
    """Two-level giant atom coupled at sites ``0`` and ``N`` with strengths ``lambda1``, ``lambda2``."""
    _check_finite(lambda1=lambda1, lambda2=lambda2, J=J)
    _check_extent(m_min, m_max, 0, N)
    basis = _lattice_labels(m_min, m_max) + [E]
    couplings = _hopping(J, m_min, m_max) + [(E, LatticeSite(0), lambda1), (E, LatticeSite(N), lambda2)]
    return Generator(basis, _assemble(basis, couplings), model="real_space",
                     params={"lambda1": lambda1, "lambda2": lambda2, "N": N,
                             "m_min": m_min, "m_max": m_max, "J": J})


def build_auxiliary(p: ModelParams, drive: DriveSchedule | None = None) -> Generator:
    """Full static model plus auxiliary modes cancelling the site Stark shifts.

    Mode 1 sits at ``+delta1`` and couples to site 0 with ``g1``; mode 2 sits
    at ``+delta2`` and couples to site ``N`` with ``g2``.
    """
    base = build_full_static(p, drive)
    b1, b2 = AuxMode(1), AuxMode(2)
    basis = list(base.basis) + [b1, b2]
    n = base.dim
    H = np.zeros((n + 2, n + 2), dtype=complex)
    H[:n, :n] = base.static
    H += _assemble(basis, [(b1, LatticeSite(0), p.g1), (b2, LatticeSite(p.N), p.g2)],
                   [(b1, p.delta1), (b2, p.delta2)])
    terms = []
    for t in base.td_terms:
        op = np.zeros((n + 2, n + 2), dtype=complex)
        op[:n, :n] = t.operator
        terms.append(TDTerm(op, t.frequency, t.schedule))
    return Generator(basis, H, tuple(terms), model="auxiliary", params=p.as_dict())


GIANT, SMALL = AtomLevel("e", "b"), AtomLevel("e", "c")


def build_giant_small(g: float, xi: float, theta: float, N: int, M: int, omega0: float,
                      m_min: int, m_max: int, J: float = 1.0) -> Generator:
    """Two-level giant atom ``b`` (sites 0, N) and small atom ``c`` (site M) on one lattice.

    The giant atom's site-0 channel carries the phase: ``<b|H|0> = g e^{i theta}``.
    """
    _check_finite(g=g, xi=xi, theta=theta, omega0=omega0, J=J)
    _check_extent(m_min, m_max, 0, N, M)
    basis = _lattice_labels(m_min, m_max) + [GIANT, SMALL]
    couplings = _hopping(J, m_min, m_max) + [
        (GIANT, LatticeSite(0), g * np.exp(1j * theta)),
        (GIANT, LatticeSite(N), g),
        (SMALL, LatticeSite(M), xi),
    ]
    H = _assemble(basis, couplings, [(GIANT, omega0), (SMALL, omega0)])
    return Generator(basis, H, model="giant_small",
                     params={"g": g, "xi": xi, "theta": theta, "N": N, "M": M, "omega0": omega0,
                             "m_min": m_min, "m_max": m_max, "J": J})


def ladder_terms(basis: Sequence, g1, g2, eta1, eta2, delta1, delta2, theta, N) -> list:
    """Raising parts ``h_k^dag`` and detunings of the ladder-type drive Hamiltonian.

    Order: ``g1 a_0^dag|g><f|``, ``g2 a_N^dag|g><f|``, ``eta1 e^{i theta}|e><f|``,
    ``eta2 |e><f|``.
    """
    return [
        (_transition(basis, LatticeSite(0), F, g1), delta1),
        (_transition(basis, LatticeSite(N), F, g2), delta2),
        (_transition(basis, E, F, eta1 * np.exp(1j * theta)), delta1),
        (_transition(basis, E, F, eta2), delta2),
    ]


def build_ladder_td(J, g1, g2, eta1, eta2, delta1, delta2, theta, N, m_min, m_max) -> Generator:
    """Ladder-type three-level atom (g, f, e) with two two-photon resonant paths."""
    _check_finite(J=J, g1=g1, g2=g2, eta1=eta1, eta2=eta2, delta1=delta1, delta2=delta2, theta=theta)
    _check_extent(m_min, m_max, 0, N)
    basis = _lattice_labels(m_min, m_max) + [F, E]
    terms = tuple(TDTerm(op, w) for op, w in
                  ladder_terms(basis, g1, g2, eta1, eta2, delta1, delta2, theta, N))
    return Generator(basis, _assemble(basis, _hopping(J, m_min, m_max)), terms, model="ladder_td",
                     params={"J": J, "g1": g1, "g2": g2, "eta1": eta1, "eta2": eta2,
                             "delta1": delta1, "delta2": delta2, "theta": theta, "N": N,
                             "m_min": m_min, "m_max": m_max})


def build_two_atoms(p: ModelParams, offset_b: int) -> Generator:
    """Two identical four-level giant atoms: A at sites (0, N), B at (offset_b, offset_b + N)."""
    _check_extent(p.m_min, p.m_max, 0, p.N, offset_b, offset_b + p.N)
    basis = _lattice_labels(p.m_min, p.m_max)
    couplings = _hopping(p.J, p.m_min, p.m_max)
    diagonal = []
    for tag, start in (("A", 0), ("B", offset_b)):
        levels, lower, upper, diag = _four_level_terms(p, start, start + p.N, tag)
        basis += levels
        couplings += lower + upper
        diagonal += diag
    params = dict(p.as_dict(), offset_b=offset_b)
    return Generator(basis, _assemble(basis, couplings, diagonal), model="two_atoms", params=params)


def is_hermitian(H: np.ndarray, atol: float = 0.0) -> bool:
    return bool(np.max(np.abs(H - H.conj().T), initial=0.0) <= atol)


def mirror_extent(m_min: int, m_max: int, N: int) -> tuple[int, int]:
    """Window obtained by reflecting ``[m_min, m_max]`` through ``m -> N - m``."""
    return N - m_max, N - m_min


__all__ = [
    "ATOM_LEVELS", "LatticeSite", "AtomLevel", "AuxMode", "BasisLabel", "parse_label", "sort_basis",
    "centered_extent", "ModelParams", "DriveSchedule", "TDTerm", "Generator", "StateVector",
    "init_state", "superpose", "build_lattice", "build_full_static", "build_full_td",
    "build_real_space", "build_auxiliary", "build_giant_small", "ladder_terms", "build_ladder_td",
    "build_two_atoms", "is_hermitian", "mirror_extent", "F1", "F2", "F", "E", "GIANT", "SMALL",
]
