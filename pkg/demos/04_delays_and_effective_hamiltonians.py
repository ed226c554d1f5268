# %% [markdown]
# # Retardation and second-order effective Hamiltonians
#
# A giant atom and a small atom on the same lattice talk to each other with
# a delay set by the site separation. The delay equations are checked
# against exact lattice propagation. Then the generic second-order
# combinator is compared with the closed ladder form.

# %%
import numpy as np

from synthdim.dynamics import DelayConfig, IntegratorConfig, integrate_dde, integrate_markov, propagate
from synthdim.effective import MarkovRates, effective_hamiltonian, ladder_effective
from synthdim.model import GIANT, SMALL, build_giant_small, centered_extent, ladder_terms, superpose

# %%
m_min, m_max = centered_extent(105, 3)
G = build_giant_small(0.1, 0.1, 0.0, 3, 1, 0.0, m_min, m_max)
tr = propagate(G, superpose(G, {SMALL: 1.0}), IntegratorConfig(20.0))
r = MarkovRates.from_couplings(0.1, 0.1)
dde = integrate_dde(r, 1, 3, 0.0, "between", (0.0, 1.0), DelayConfig(20.0))
mk = integrate_markov(r, 1, 3, 0.0, "between", (0.0, 1.0), DelayConfig(20.0))
print("max |P_b lattice - P_b dde|   :", np.max(np.abs(tr.prob(GIANT) - dde.p_b)))
print("max |P_c lattice - P_c markov|:", np.max(np.abs(tr.prob(SMALL) - mk.p_c)))

# %%
Gl = ladder_effective(1.0, 4.0, 4.0, 3.0, 3.0, 200.0, -200.0, 0.5, 3, -5, 8)
H = effective_hamiltonian(ladder_terms(Gl.basis, 4.0, 4.0, 3.0, 3.0, 200.0, -200.0, 0.5, 3))
print("combinator e-shift:", H[-1, -1].real, " site shifts:", H[5, 5].real, H[8, 8].real)
