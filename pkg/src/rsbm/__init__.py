"""Regular stochastic block model: sampling, recovery and exact checks."""

__version__ = "0.1.0"

from .exceptions import (
    BudgetError,
    ConvergenceError,
    ParseError,
    RSBMError,
    SamplingError,
    ValidationError,
)
from .model import (
    DerivedQuantities,
    RsbmParams,
    check_thresholds,
    predicted_saw_eigenvalue1,
    tv_rates,
    z_sequence,
)
from .graph import Graph, PlantedInstance
from .graphgen import (
    sample_bipartite_config,
    sample_lift,
    sample_regular_config,
    sample_rsbm,
    validate_instance,
)
from .spectral import SpectrumSummary, matvec, second_eigenvector, top_eigenpairs
from .saw import build_saw, saw_quadratic_forms, saw_recover, tangle_audit
from .recovery import (
    RecoveryResult,
    majority_iterate,
    majority_step,
    overlap,
    spectral_recover,
)
from .rigidity import (
    edge_expansion_check,
    enumerate_regular_partitions,
    min_bisection_bruteforce,
    rsbm_membership,
)
from .estimators import MajorityDynamics, SpectralPartition
