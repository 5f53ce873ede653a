"""Ladder operators, coherent states and nonclassicality for the infinite square well."""

from .coherent import (
    CoherentSpec, bg_state, bg_weight, bg_weight_product, coherent_state, displacement_alpha,
    gp_state, identity_resolution_diag, moment_check, overlap,
)
from .factorization import FactorChain, apply_a, eigenpair_chain, null_eigenfunction, superpotential
from .grid import Grid, GridFunction, Units, differentiate, inner_product
from .jcsim import (
    AtomFieldState, JCConfig, analytic_final_state, conditional_field_state, exact_propagator,
    factored_propagator, fidelity,
)
from .nonclassical import MetricPoint, mandel_q, metric_sweep, squeezing
from .su11 import LevelOperator, LevelVector, adjoint_defect, hamiltonian_fock, ladder_matrices

__version__ = "0.1.0"
