import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from synthdim.dynamics import IntegratorConfig, Trajectory, propagate
from synthdim.model import (E, LatticeSite, ModelParams, build_full_static, build_lattice,
                            build_real_space, init_state, mirror_extent)
from synthdim.observables import (boundary_contamination, chirality, fit_decay, lattice_profile,
                                  max_deviation, population_series, region_masses)

FIG2 = ModelParams.centered(25, g1=3, g2=3, eta1=2, eta2=2, delta1=60, delta2=60, N=2)


@pytest.fixture(scope="module")
def fig2a():
    G = build_full_static(FIG2)
    return propagate(G, init_state(G, E), IntegratorConfig(5.0))


def test_population_series(fig2a):
    assert np.allclose(population_series(fig2a, fig2a.basis), 1.0, atol=1e-9)
    assert population_series(fig2a, [E])[0] == 1.0


def test_lattice_profile(fig2a):
    sites, prof = lattice_profile(fig2a, 5.0)
    assert sites[0] == FIG2.m_min and len(prof) == 25


def test_chirality_atom_only(fig2a):
    rep = chirality(fig2a, 2, 0.0)
    assert rep.left_mass == rep.right_mass == 0 and rep.asymmetry == 0


def test_chirality_symmetric_profile():
    G = build_real_space(0.5, 0.5, 2, -11, 13)
    tr = propagate(G, init_state(G, E), IntegratorConfig(5.0))
    assert abs(chirality(tr, 2, 5.0).asymmetry) <= 0.02


def test_chirality_mirror_flip():
    p = ModelParams.centered(25, N=3, theta=math.pi / 2)
    lo, hi = mirror_extent(p.m_min, p.m_max, 3)
    q = ModelParams(**dict(p.as_dict(), theta=-math.pi / 2, m_min=lo, m_max=hi))
    runs = [propagate(build_full_static(x), init_state(build_full_static(x), E), IntegratorConfig(5.0))
            for x in (p, q)]
    a, b = (chirality(tr, 3, 5.0).asymmetry for tr in runs)
    assert a > 0.5 and abs(a + b) <= 1e-6


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 5.0))
def test_masses_sum_to_one(t):
    G = build_full_static(ModelParams.centered(25, N=3, theta=math.pi / 2))
    tr = _cached(G)
    rep = chirality(tr, 3, t)
    assert abs(rep.left_mass + rep.right_mass + rep.between_mass + rep.atom_mass - 1) <= 1e-9


_runs = {}


def _cached(G):
    key = id(G.model), G.params["theta"]
    if key not in _runs:
        _runs[key] = propagate(G, init_state(G, E), IntegratorConfig(5.0))
    return _runs[key]


def test_region_masses(fig2a):
    m = region_masses(fig2a, 2)
    assert np.allclose(m["left"] + m["between"] + m["right"] + m["atom"], 1.0, atol=1e-9)


def test_fit_exact_exponential():
    t = np.linspace(0, 100, 501)
    assert abs(fit_decay(t, np.exp(-0.05 * t)).rate - 0.05) <= 1e-9


def test_fit_constant_raises():
    with pytest.raises(ValueError):
        fit_decay(np.linspace(0, 1, 50), np.ones(50))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 0.2), st.integers(0, 2 ** 31))
def test_fit_with_noise(gamma, seed):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 4 / gamma, 801)
    y = np.exp(-gamma * t) + rng.uniform(-1e-4, 1e-4, t.size)
    assert abs(fit_decay(t, y).rate - gamma) <= 0.01 * gamma


def test_fit_effective_rate():
    N, lam = 3, 0.1
    G = build_real_space(lam, lam, N, -400, 403)
    tr = propagate(G, init_state(G, E), IntegratorConfig(200.0))
    rate = fit_decay(tr.times, tr.prob(E)).rate
    assert abs(rate - 4 * lam ** 2 / 2) <= 0.1 * 4 * lam ** 2 / 2


def test_max_deviation(fig2a):
    assert max_deviation(fig2a, fig2a, fig2a.basis) == 0
    t = np.linspace(0, 1, 5)
    a = Trajectory(t, np.tile([1.0, 0.0], (5, 1)), (LatticeSite(0), LatticeSite(1)))
    b = Trajectory(t, np.tile([0.0, 1.0], (5, 1)), (LatticeSite(0), LatticeSite(1)))
    assert max_deviation(a, b, [LatticeSite(0)]) == 1


def test_max_deviation_fig2a(fig2a):
    G = build_real_space(0.1, 0.1, 2, FIG2.m_min, FIG2.m_max)
    real = propagate(G, init_state(G, E), IntegratorConfig(5.0))
    assert max_deviation(fig2a, real, [E]) <= 0.05


def test_boundary_contamination(fig2a):
    G = build_lattice(1.0, -12, 12)
    tr = propagate(G, init_state(G, LatticeSite(0)), IntegratorConfig(20.0))
    assert boundary_contamination(tr, 2) > 0.1
    assert boundary_contamination(fig2a, 2) <= 1e-3
    first = Trajectory(fig2a.times[:1], fig2a.probs[:1], fig2a.basis)
    assert boundary_contamination(first, 2) == 0
