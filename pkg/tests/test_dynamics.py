import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from synthdim.dynamics import (DelayConfig, IntegrationError, IntegratorConfig, integrate_dde,
                               integrate_markov, max_stable_dt, propagate, resolve_grid)
from synthdim.effective import MarkovRates
from synthdim.model import (E, GIANT, SMALL, DriveSchedule, Generator, LatticeSite, ModelParams,
                            StateVector, build_auxiliary, build_full_static, build_giant_small,
                            build_lattice, build_real_space, build_two_atoms, centered_extent,
                            init_state, superpose)

FIG2 = ModelParams.centered(25, g1=3, g2=3, eta1=2, eta2=2, delta1=60, delta2=60, N=2)


def test_zero_hamiltonian():
    G = build_lattice(0.0, 0, 4)
    psi = init_state(G, LatticeSite(2))
    tr = propagate(G, psi, IntegratorConfig(3.0))
    assert np.all(tr.amps == psi.amplitudes)


def test_two_site_rabi():
    G = build_lattice(1.0, 0, 1)
    tr = propagate(G, init_state(G, LatticeSite(0)), IntegratorConfig(math.pi / 2, n_samples=100))
    assert np.max(np.abs(tr.prob(LatticeSite(1)) - np.sin(tr.times) ** 2)) <= 1e-6
    assert abs(tr.prob(LatticeSite(1))[-1] - 1) <= 1e-6


def test_fig2a_full_vs_real_space_final():
    full = build_full_static(FIG2)
    real = build_real_space(0.1, 0.1, 2, FIG2.m_min, FIG2.m_max)
    a = propagate(full, init_state(full, E), IntegratorConfig(5.0))
    b = propagate(real, init_state(real, E), IntegratorConfig(5.0))
    assert abs(a.prob(E)[-1] - b.prob(E)[-1]) <= 0.05


@pytest.mark.parametrize("G", [
    build_full_static(FIG2),
    build_auxiliary(ModelParams.centered(25, g1=60, g2=60, eta1=5, eta2=5, delta1=200, delta2=200)),
    build_real_space(0.1, 0.1, 3, -10, 14),
    build_giant_small(0.1, 0.1, 0.4, 3, 1, 0.0, -10, 14),
    build_two_atoms(ModelParams(g1=10, g2=10, eta1=4, eta2=4, delta1=100, delta2=100, N=3,
                                m_min=-8, m_max=16, theta=math.pi / 2), 4),
], ids=["full", "aux", "real", "giant_small", "two_atoms"])
def test_norm_over_long_horizon(G):
    start = next(lab for lab in G.basis if not isinstance(lab, LatticeSite))
    tr = propagate(G, init_state(G, start), IntegratorConfig(50.0), keep_amplitudes=False)
    assert np.max(np.abs(tr.norms() - 1)) <= 1e-9


def test_step_halving():
    G = build_full_static(FIG2)
    psi = init_state(G, E)
    dt, n, stride = resolve_grid(G, IntegratorConfig(5.0))
    a = propagate(G, psi, IntegratorConfig(5.0, dt=dt, sample_stride=stride))
    b = propagate(G, psi, IntegratorConfig(5.0, dt=dt / 2, sample_stride=2 * stride))
    assert np.allclose(a.times, b.times)
    assert np.max(np.abs(a.probs - b.probs)) <= 1e-8


@settings(max_examples=15, deadline=None)
@given(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.integers(0, 2 ** 31))
def test_linearity(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    G = Generator(tuple(LatticeSite(m) for m in range(5)), A + A.conj().T)
    v1, v2 = (rng.normal(size=5) + 1j * rng.normal(size=5) for _ in range(2))
    v1, v2 = v1 / np.linalg.norm(v1), v2 / np.linalg.norm(v2)
    w = alpha * v1 + beta * v2
    if np.linalg.norm(w) < 1e-3:
        return
    cfg = IntegratorConfig(1.0, n_samples=20)
    run = lambda v: propagate(G, StateVector(G.basis, v / np.linalg.norm(v)), cfg).amps * np.linalg.norm(v)
    assert np.max(np.abs(run(w) - (alpha * run(v1) + beta * run(v2)))) <= 1e-9


def test_dt_guard():
    G = build_full_static(FIG2)
    with pytest.raises(IntegrationError):
        dt = 2 * max_stable_dt(G)
        propagate(G, init_state(G, E), IntegratorConfig(100 * dt, dt=dt))
    with pytest.raises(ValueError):
        IntegratorConfig(-1.0)


def test_switch_off_breakpoint():
    p = ModelParams.centered(25, g1=60, g2=60, eta1=5, eta2=5, delta1=200, delta2=200)
    G = build_auxiliary(p, DriveSchedule.switch_off(3.0))
    tr = propagate(G, init_state(G, LatticeSite(1)), IntegratorConfig(5.0))
    assert 3.0 in G.breakpoints
    assert np.max(np.abs(tr.norms() - 1)) <= 1e-9
    # after switch-off e only couples through the pumps, so its population freezes
    i = tr.sample_index(3.2)
    assert np.allclose(tr.prob(E)[i:], tr.prob(E)[i], atol=1e-10)


def test_trajectory_meta():
    G = build_real_space(0.1, 0.1, 2, -5, 7)
    tr = propagate(G, init_state(G, E), IntegratorConfig(2.0))
    assert tr.meta["model"] == "real_space"
    assert tr.meta["integrator"]["n_steps"] >= 500 and tr.times[0] == 0 and tr.times[-1] == 2.0


# delay equations

def test_dde_uncoupled_small_atom():
    r = MarkovRates(0.0, 0.02, 0.0)
    s = integrate_dde(r, 1, 3, 0.0, "between", (0.0, 1.0), DelayConfig(20.0))
    assert np.max(np.abs(s.u_c - np.exp(-0.02 * s.times))) <= 1e-6


def test_dde_zero_delays_match_markov():
    r = MarkovRates.from_couplings(0.1, 0.1)
    cfg = DelayConfig(20.0, 0.01)
    a = integrate_dde(r, 1, 3, 0.3, "between", (0.6, 0.8), cfg, delays=(0.0, 0.0, 0.0))
    b = integrate_markov(r, 1, 3, 0.3, "between", (0.6, 0.8), cfg)
    assert np.max(np.abs(a.u_b - b.u_b)) <= 1e-8 and np.max(np.abs(a.u_c - b.u_c)) <= 1e-8


def test_dde_one_step_delays_converge():
    r = MarkovRates.from_couplings(0.1, 0.1)
    ref = integrate_markov(r, 1, 3, 0.0, "between", (1.0, 0.0), DelayConfig(20.0, 0.001))
    errs = []
    for dt in (0.08, 0.04, 0.02, 0.01):
        s = integrate_dde(r, 1, 3, 0.0, "between", (1.0, 0.0), DelayConfig(20.0, dt),
                          delays=(dt, dt, dt))
        errs.append(abs(s.u_b[-1] - ref.u_b[-1]) + abs(s.u_c[-1] - ref.u_c[-1]))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_dde_decoherence_free():
    r = MarkovRates(0.005, 0.0, 0.0)
    s = integrate_dde(r, 1, 2, 0.0, "between", (1.0, 0.0), DelayConfig(50.0, 0.01), delays=(0.5, 0.5, 0.5))
    assert s.p_b[-1] >= 1.0 - 0.05


def test_markov_zero_channels():
    r = MarkovRates.from_couplings(0.1, 0.1)
    s = integrate_markov(r, 1, 4, 0.0, "between", (0.0, 1.0), DelayConfig(20.0))
    assert np.all(s.u_b == 0)
    s = integrate_markov(MarkovRates(0.005, 0.0, 0.0), 1, 2, 0.0, "between", (1.0, 0.0), DelayConfig(20.0))
    assert np.allclose(s.u_b, 1.0, atol=1e-15)
    s = integrate_markov(r, 4, 3, math.pi / 2, "right", (0.0, 1.0), DelayConfig(20.0))
    assert np.all(s.u_b == 0)


def test_dde_vs_lattice():
    m_min, m_max = centered_extent(105, 3)
    G = build_giant_small(0.1, 0.1, 0.0, 3, 1, 0.0, m_min, m_max)
    tr = propagate(G, superpose(G, {SMALL: 1.0}), IntegratorConfig(20.0))
    r = MarkovRates.from_couplings(0.1, 0.1)
    d = integrate_dde(r, 1, 3, 0.0, "between", (0.0, 1.0), DelayConfig(20.0))
    m = integrate_markov(r, 1, 3, 0.0, "between", (0.0, 1.0), DelayConfig(20.0))
    assert np.allclose(d.times, tr.times)
    assert np.max(np.abs(d.p_b - tr.prob(GIANT))) <= 0.05
    assert np.max(np.abs(m.p_c - tr.prob(SMALL))) <= 0.05


def test_delay_grid_errors():
    r = MarkovRates.from_couplings(0.1, 0.1)
    with pytest.raises(ValueError):
        integrate_dde(r, 1, 3, 0.0, "between", (1, 0), DelayConfig(20.0, 0.3))
