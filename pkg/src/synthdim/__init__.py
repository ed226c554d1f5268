"""Giant atoms on a synthetic frequency lattice: models, dynamics and figure scenarios."""

__version__ = "0.1.0"

from .dynamics import (AmplitudeSeries, DelayConfig, IntegrationError, IntegratorConfig,
                       NormDriftError, Trajectory, integrate_dde, integrate_markov, propagate)
from .effective import (EffectiveParams, MarkovRates, build_effective_generator, derive_effective,
                        effective_hamiltonian, giant_decay_rate, ladder_effective, markov_coupling)
from .model import (AtomLevel, AuxMode, DriveSchedule, Generator, LatticeSite, ModelParams,
                    StateVector, build_auxiliary, build_full_static, build_full_td,
                    build_giant_small, build_ladder_td, build_lattice, build_real_space,
                    build_two_atoms, init_state)
from .observables import chirality, fit_decay, lattice_profile, region_masses
from .scenarios import list_scenarios, run_acceptance, run_scenario
