"""Learning N-bit Boolean functions with classical and quantum circuits."""
from .boolean_task import BooleanTask, active_set, eval_boolean
from .circuits import (
    CLASSICAL,
    QUANTUM,
    ConditionalDistribution,
    circuit_distribution,
    classical_prob_zero,
    gate_unitary,
    optimized_phases,
    quantum_amplitude,
)
from .fidelity import (
    closed_form_fc_1bit,
    closed_form_fq_1bit,
    target_distribution,
    task_fidelity,
)
from .fitting import fit_exponential_cdf, fit_power_law
from .kernels import FidelityKernel, backend_name
from .learners import DEConfig, LearnConfig, LearningTrace, de_run, random_search
from .region import estimate_gamma, upper_bound

__version__ = "0.1.0"

__all__ = [
    "BooleanTask",
    "CLASSICAL",
    "QUANTUM",
    "ConditionalDistribution",
    "DEConfig",
    "FidelityKernel",
    "LearnConfig",
    "LearningTrace",
    "active_set",
    "backend_name",
    "circuit_distribution",
    "classical_prob_zero",
    "closed_form_fc_1bit",
    "closed_form_fq_1bit",
    "de_run",
    "estimate_gamma",
    "eval_boolean",
    "fit_exponential_cdf",
    "fit_power_law",
    "gate_unitary",
    "optimized_phases",
    "quantum_amplitude",
    "random_search",
    "target_distribution",
    "task_fidelity",
    "upper_bound",
]
