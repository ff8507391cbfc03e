"""eblab: a desk-scale numerical laboratory for the low-Mach, mildly
stratified limit of a compressible heat-conducting flow toward the
Euler-Boussinesq system."""

from .field import Grid, ScalarField, VectorField, Regularizer, norm
from .thermo import (
    GasModel, TransportLaws, default_gas_model, default_transport_laws,
    eval_state, check_hypotheses, linearize, ballistic_free_energy,
    relative_entropy_density, coercivity_constant,
)
from .equilibrium import MassDistribution, potential, solve_equilibrium, verify_stratification
from .acoustic import AcousticState, acoustic_init, acoustic_propagate, acoustic_energy
from .transport import TransportState, transport_step, recover_RT, limit_temperature_solve
from .boussinesq import BoussinesqState, boussinesq_initial_data, boussinesq_step, boussinesq_energy
from .nsf import ScalingParams, FluidState, nsf_step, run_nsf, entropy_balance_check
from .limitlab import (
    ExperimentConfig, TestFunctionTriple, build_test_functions,
    relative_entropy_functional, ess_res_split, convergence_sweep,
)

__version__ = "0.1.0"
