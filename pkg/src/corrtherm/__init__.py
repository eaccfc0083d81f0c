"""Single-shot thermodynamics of block-diagonal states.

Probability-vector majorization and thermomajorization with explicit
stochastic witnesses, the full Renyi entropy and divergence family, and
correlating-catalyst constructions that realize state transitions governed
by the Shannon free energy alone, including executable work formation and
extraction protocols.
"""

from .catalysis import (
    BalanceCurve,
    ExtensionCertificate,
    ExtensionParams,
    ExtensionWitness,
    balance_curve,
    balance_limit,
    build_extension,
    construct_extension_witness,
    entropy_balance,
    extension_marginal_b,
    extension_mutual_information,
    find_extension_params,
    full_rank_lift,
    main_theorem_check,
    two_catalyst_construction,
    zero_split,
)
from .config import DEFAULT_GRID, DEFAULT_TOL, AlphaGrid, Tolerances
from .dist import (
    BipartiteDist,
    Dist,
    as_bipartite,
    mix,
    point_mass,
    tensor,
    tensor_many,
    trace_distance,
    uniform,
)
from .entropy import (
    BURG,
    Alpha,
    ThermalContext,
    burg_entropy,
    delta_f_alpha_example,
    eta,
    eta_bin,
    free_energy_alpha,
    mutual_information,
    renyi_divergence,
    renyi_entropy,
)
from .errors import CorrthermError
from .majorization import (
    StochasticMatrix,
    TrumpingVerdict,
    bistochastic_witness,
    catalyst_search,
    majorizes,
    trumping_conditions,
)
from .protocols import (
    EmbeddingSpec,
    ProtocolReport,
    SharpState,
    embed,
    embedded_entropy,
    rational_gibbs_approx,
    rational_work_gap,
    run_main_result_1,
    run_work_extraction,
    run_work_formation,
    sharp_state,
    shrink_map,
    sink_balance,
    unembed,
)
from .scenarios import (
    FIG3_P,
    FIG3_P_PRIME,
    FIG3_PARAMS,
    QubitScenario,
    figure3_data,
    figure3_limit,
    qubit_example_states,
    qubit_min_work_correlated,
    qubit_scenario,
)
from .thermo import (
    LorenzCurve,
    WithJoint,
    WorkBitSpec,
    WorkDirection,
    gibbs_preserving_witness,
    min_work_formation,
    thermal_lorenz,
    thermomajorizes,
)

__all__ = [
    "AlphaGrid",
    "Alpha",
    "BURG",
    "BalanceCurve",
    "BipartiteDist",
    "CorrthermError",
    "DEFAULT_GRID",
    "DEFAULT_TOL",
    "Dist",
    "EmbeddingSpec",
    "ExtensionCertificate",
    "ExtensionParams",
    "ExtensionWitness",
    "FIG3_P",
    "FIG3_PARAMS",
    "FIG3_P_PRIME",
    "LorenzCurve",
    "ProtocolReport",
    "QubitScenario",
    "SharpState",
    "StochasticMatrix",
    "ThermalContext",
    "Tolerances",
    "TrumpingVerdict",
    "WithJoint",
    "WorkBitSpec",
    "WorkDirection",
    "as_bipartite",
    "balance_curve",
    "balance_limit",
    "bistochastic_witness",
    "build_extension",
    "burg_entropy",
    "catalyst_search",
    "construct_extension_witness",
    "delta_f_alpha_example",
    "embed",
    "embedded_entropy",
    "entropy_balance",
    "eta",
    "eta_bin",
    "extension_marginal_b",
    "extension_mutual_information",
    "figure3_data",
    "figure3_limit",
    "find_extension_params",
    "free_energy_alpha",
    "full_rank_lift",
    "gibbs_preserving_witness",
    "main_theorem_check",
    "majorizes",
    "min_work_formation",
    "mix",
    "mutual_information",
    "point_mass",
    "qubit_example_states",
    "qubit_min_work_correlated",
    "qubit_scenario",
    "rational_gibbs_approx",
    "rational_work_gap",
    "renyi_divergence",
    "renyi_entropy",
    "run_main_result_1",
    "run_work_extraction",
    "run_work_formation",
    "sharp_state",
    "shrink_map",
    "sink_balance",
    "tensor",
    "tensor_many",
    "thermal_lorenz",
    "thermomajorizes",
    "trace_distance",
    "trumping_conditions",
    "two_catalyst_construction",
    "unembed",
    "uniform",
    "zero_split",
]
