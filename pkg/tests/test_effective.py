import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from synthdim.dynamics import IntegratorConfig, propagate
from synthdim.effective import (EffectiveParams, MarkovRates, build_effective_generator,
                                derive_effective, effective_hamiltonian, exact_phase,
                                giant_decay_rate, ladder_effective, markov_coupling)
from synthdim.model import (E, F, LatticeSite, ModelParams, build_full_static, build_ladder_td,
                            build_lattice, build_real_space, centered_extent, init_state,
                            is_hermitian, ladder_terms)
from synthdim.observables import max_deviation

K0 = -math.pi / 2


def test_derive_fig2():
    ep = derive_effective(ModelParams(g1=3, g2=3, eta1=2, eta2=2, delta1=60, delta2=60))
    assert math.isclose(ep.g_e1, 0.1) and math.isclose(ep.g_e2, 0.1)


def test_derive_fig3():
    ep = derive_effective(ModelParams(g1=60, g2=60, eta1=5, eta2=5, delta1=200, delta2=200))
    assert ep.g_e1 == 1.5 and ep.delta_e1 == 18.0


def test_derive_no_pump():
    ep = derive_effective(ModelParams(eta1=0, eta2=0))
    assert ep.g_e1 == ep.g_e2 == ep.delta_ee == 0


@settings(max_examples=40)
@given(st.floats(0.5, 2.0), st.floats(0.5, 5), st.floats(0.5, 5), st.floats(30, 300))
def test_derive_rescaling(s, g, eta, delta):
    a = derive_effective(ModelParams(g1=g, g2=g, eta1=eta, eta2=eta, delta1=delta, delta2=delta))
    b = derive_effective(ModelParams(g1=s * g, g2=s * g, eta1=s * eta, eta2=s * eta,
                                     delta1=s * s * delta, delta2=s * s * delta))
    assert math.isclose(a.g_e1, b.g_e1, rel_tol=1e-12)
    assert math.isclose(a.delta_e1, b.delta_e1, rel_tol=1e-12)


def test_effective_reduces_to_real_space():
    ep = EffectiveParams(0.1, 0.2, 0.0, 0.0, 0.0)
    a = build_effective_generator(ep, 2, -11, 13, include_shifts=True)
    assert np.array_equal(a.static, build_real_space(0.1, 0.2, 2, -11, 13).static)


def test_effective_theta_pi():
    G = build_effective_generator(EffectiveParams(0.1, 0.1, 0, 0, 0, theta=math.pi), 2, -5, 7)
    assert np.isclose(G.static[G.index(E), G.index(LatticeSite(0))], -0.1)


def test_effective_matches_full_fig2a():
    p = ModelParams.centered(25, g1=3, g2=3, eta1=2, eta2=2, delta1=60, delta2=60, N=2)
    full, eff = build_full_static(p), build_effective_generator(derive_effective(p), 2, p.m_min, p.m_max)
    cfg = IntegratorConfig(5.0)
    a = propagate(full, init_state(full, E), cfg)
    b = propagate(eff, init_state(eff, E), cfg)
    assert max_deviation(a, b, [E]) <= 0.05


def test_markov_zero_cases():
    assert markov_coupling("symmetric", "between", 1, 3, 0.0, K0) == 0
    assert markov_coupling("G->S", "left", -1, 4, math.pi / 2, K0) == 0
    assert markov_coupling("S->G", "right", 4, -1, math.pi / 2, K0) == 0
    for M in (1, 2, 3):
        assert markov_coupling("G->S", "left", -M, 3 + M, math.pi / 2, K0) == 0
    for M in (4, 5, 6, 7):
        assert markov_coupling("S->G", "right", M, 3 - M, math.pi / 2, K0) == 0


def test_markov_errors():
    with pytest.raises(ValueError):
        markov_coupling("symmetric", "between", 1, 3, math.pi / 2)
    with pytest.raises(ValueError):
        markov_coupling("G->S", "left", 2, 1, 0.0)
    with pytest.raises(ValueError):
        markov_coupling("sideways", "left", -1, 4, 0.0)


@given(st.integers(1, 30), st.integers(1, 30))
def test_markov_symmetric_exchange(M, D):
    a = markov_coupling("symmetric", "between", M, D, 0.0)
    b = markov_coupling("symmetric", "between", D, M, 0.0)
    assert a == b and abs(a) <= 2


@given(st.sampled_from(["G->S", "S->G"]), st.integers(-30, 30), st.integers(1, 10),
       st.floats(-math.pi, math.pi))
def test_markov_bounded(direction, M, N, theta):
    side = "left" if M < 0 else "right" if M > N else "between"
    if side == "between" and not 0 < M < N:
        return
    assert abs(markov_coupling(direction, side, M, N - M, theta)) <= 2 + 1e-15


def test_decay_rate_cases():
    assert giant_decay_rate(0.005, 0.0, 2) == 0.0
    assert giant_decay_rate(0.005, 0.0, 4) == 4 * 0.005
    for N in range(1, 8):
        assert math.isclose(giant_decay_rate(0.005, math.pi / 2, N), 2 * 0.005)


@given(st.integers(0, 50), st.floats(1e-4, 1.0))
def test_decoherence_free_family(k, gamma):
    assert giant_decay_rate(gamma, 0.0, 4 * k + 2) == 0.0


def test_rates():
    r = MarkovRates.from_couplings(0.1, 0.1)
    assert math.isclose(r.gamma_b, 0.005) and r.v0 == 2.0
    with pytest.raises(ValueError):
        MarkovRates(0.1, 0.1, 0.2)


def test_exact_phase():
    assert exact_phase(-math.pi / 2 * 3) == 1j
    assert exact_phase(0.3) == complex(math.cos(0.3), math.sin(0.3))


def test_combinator_single_terms():
    eta, g, d = 2.0, 3.0, 60.0
    H = effective_hamiltonian([(eta * np.outer([0, 0, 1], [0, 1, 0]), d)])
    assert np.allclose(H, np.diag([0, -eta ** 2 / d, eta ** 2 / d]), atol=1e-15)
    H = effective_hamiltonian([(g * np.outer([1, 0, 0], [0, 1, 0]), d)])
    # n0 = 1 for the site state, n0 + 1 = 1 for |f>
    assert np.allclose(H, np.diag([g ** 2 / d, -g ** 2 / d, 0]), atol=1e-15)
    assert effective_hamiltonian([], dim=3).shape == (3, 3)
    assert not effective_hamiltonian([], dim=3).any()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_combinator_hermitian(seed):
    rng = np.random.default_rng(seed)
    n = 5
    terms = []
    for d in rng.choice([-3.0, -1.0, 1.0, 3.0], size=3):
        op = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        terms.append((op, d))
    H = effective_hamiltonian(terms)
    assert np.max(np.abs(H - H.conj().T)) <= 1e-12


def _ladder_block(G, *args):
    terms = ladder_terms(G.basis, *args)
    H = effective_hamiltonian(terms)
    H[G.index(F), G.index(F)] = 0.0
    closed = np.array(G.static)
    n = G.dim - 2
    closed[:n, :n] -= build_lattice(1.0, G.basis[0].m, G.basis[n - 1].m).static
    return H, closed


def test_ladder_matches_combinator_random():
    rng = np.random.default_rng(3)
    m_min, m_max = centered_extent(15, 3)
    for _ in range(20):
        g1, g2, eta1, eta2 = rng.uniform(0.5, 5, 4)
        lo = 50 * max(g1, g2, eta1, eta2)
        d1, d2 = rng.choice([-1, 1], 2) * rng.uniform(lo, 4 * lo, 2)
        theta = rng.uniform(-math.pi, math.pi)
        args = (g1, g2, eta1, eta2, d1, d2, theta, 3)
        G = ladder_effective(1.0, *args[:7], 3, m_min, m_max)
        H, closed = _ladder_block(G, *args)
        assert np.max(np.abs(H - closed)) <= 1e-12


def test_ladder_opposite_detunings():
    G = ladder_effective(1.0, 4, 4, 3, 3, 150, -150, 0.0, 3, -5, 8)
    e, s0, sN = G.index(E), G.index(LatticeSite(0)), G.index(LatticeSite(3))
    assert G.static[e, e] == 0
    assert G.static[s0, s0] + G.static[sN, sN] == 0
    assert np.isclose(G.static[e, s0], 4 * 3 / 150) and np.isclose(G.static[e, sN], -4 * 3 / 150)
    free = ladder_effective(1.0, 0, 0, 0, 0, 150, -150, 0.0, 3, -5, 8)
    assert np.array_equal(free.static[:14, :14], build_lattice(1.0, -5, 8).static)
    assert not free.static[14:].any() and is_hermitian(G.static)


@pytest.mark.parametrize("theta", [0.0, math.pi / 2])
def test_ladder_dynamics_match(theta):
    args = (1.0, 5.0, 5.0, 5.0, 5.0, 200.0, -200.0, theta, 3, -5, 8)
    td, eff = build_ladder_td(*args), ladder_effective(*args)
    cfg = IntegratorConfig(5.0)
    a = propagate(td, init_state(td, E), cfg, keep_amplitudes=False)
    b = propagate(eff, init_state(eff, E), cfg, keep_amplitudes=False)
    assert max_deviation(a, b, [E]) <= 0.05
