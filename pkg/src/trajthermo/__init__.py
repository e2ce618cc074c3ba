"""Canonical trajectory dynamics, path ensembles and path-integral propagators.

The library has five layers:

- ``models``/``integrators``/``action``/``loops``: canonical-flow models,
  symplectic and RK4 evolution, the discrete action with its exact gradient,
  and the loop-integral invariance check;
- ``ensemble``: the exact canonical ensemble over an enumerable lattice of
  fixed-endpoint paths;
- ``sampler``: seeded Metropolis sampling of continuous path ensembles plus
  a deterministic action minimizer;
- ``quantum``: complex path amplitudes, time-sliced propagators and the
  closed-form oracles;
- ``thermo``: the ideal-gas flows whose canonical equations are the Maxwell
  relations, and the formal analogy table.
"""

from .action import action_gradient, action_of_path, one_form_action
from .ensemble import (
    MultiplierState,
    PathDistribution,
    PathLattice,
    boltzmann_distribution,
    enumerate_paths,
    maxent_stationarity,
    mean_action,
    most_probable_path,
    path_actions,
    path_entropy,
    solve_beta,
)
from .errors import (
    CapacityError,
    CausticError,
    DimensionMismatchError,
    DomainError,
    InfeasibleConstraintError,
    NonConvergenceError,
    TrajThermoError,
    UnsupportedModelError,
    UnsupportedSchemeError,
    ValidationError,
)
from .integrators import IntegratorConfig, evolve_batch, integrate_characteristic
from .loops import PhaseLoop, loop_1form_integral, loop_invariance_deviation, phase_circle
from .models import (
    DynamicalModel,
    LagrangianForm,
    PhasePoint,
    characteristic_rhs,
    eval_hamiltonian,
    free_particle,
    harmonic_oscillator,
    polynomial_potential_model,
)
from .quantum import (
    Amplitude,
    Propagator,
    SlicingConfig,
    analytic_propagator,
    path_amplitude,
    propagator_lattice_sum,
    propagator_time_sliced,
    quantum_probability,
    slice_normalization,
)
from .sampler import (
    ChainStats,
    McmcConfig,
    OptimizerConfig,
    anneal_to_classical,
    chain_samples,
    default_proposal_width,
    metropolis_chain,
    minimize_action,
)
from .thermo import (
    GasModelKind,
    GasState,
    analogy_table,
    format_analogy_table,
    gas_model,
    gibbs_form_integral,
    maxwell_residual,
    td_characteristic,
)
from .trajectory import Trajectory, read_trajectory_csv, write_trajectory_csv

__version__ = "0.1.0"
