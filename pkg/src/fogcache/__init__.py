"""Seeded simulator and optimizer for social-aware cooperative caching
at the network edge.

The pipeline: sample a scenario (geometry plus Zipf demand), derive
link rates, weigh the social ties between F-APs, cluster them through
a coalition game, then search for a cache placement minimizing a
delay/energy blend with a binary firefly algorithm, judged against
random, greedy, and exhaustive references.
"""

from ._kernels import HAS_NUMBA, get_backend
from .baselines import SCHEMES, exhaustive_optimal, greedy_local, random_caching
from .cache import (
    EvalResult,
    Partition,
    PlacementEvaluator,
    caching_energy,
    capacity_slots,
    cluster_has,
    delay_components,
    energy_components,
    evaluate,
    feasible,
    new_placement,
    request_delay,
    request_energy,
)
from .config import dbm_to_watts, gb_to_bits, load_config, mb_to_bits, mhz_to_hz
from .experiment import (
    ExperimentSpec,
    ResultRow,
    TraceRow,
    run_experiment,
    run_verification,
    write_csv,
    write_trace_csv,
)
from .firefly import (
    FaConfig,
    FaResult,
    attractiveness,
    brightness_normalize,
    move_firefly,
    repair,
    run_fa,
)
from .hcg import (
    HcgConfig,
    HcgResult,
    initial_partition,
    is_individually_stable,
    is_open,
    run_hcg,
)
from .radio import (
    LinkRateTable,
    access_rate,
    build_rate_table,
    coop_rate,
    interference_at,
)
from .scenario import (
    Scenario,
    SystemParams,
    all_local_popularity,
    generate_scenario,
    local_demand_mass,
    local_popularity,
    zipf_distribution,
)
from .social import (
    SocialGraph,
    build_social_graph,
    cluster_preference,
    contact_probability,
    pair_contact,
    popularity_similarity,
    social_loss,
    social_relationship,
)

__version__ = "0.1.0"

__all__ = [
    "HAS_NUMBA",
    "get_backend",
    "SCHEMES",
    "exhaustive_optimal",
    "greedy_local",
    "random_caching",
    "EvalResult",
    "Partition",
    "PlacementEvaluator",
    "caching_energy",
    "capacity_slots",
    "cluster_has",
    "delay_components",
    "energy_components",
    "evaluate",
    "feasible",
    "new_placement",
    "request_delay",
    "request_energy",
    "dbm_to_watts",
    "gb_to_bits",
    "load_config",
    "mb_to_bits",
    "mhz_to_hz",
    "ExperimentSpec",
    "ResultRow",
    "TraceRow",
    "run_experiment",
    "run_verification",
    "write_csv",
    "write_trace_csv",
    "FaConfig",
    "FaResult",
    "attractiveness",
    "brightness_normalize",
    "move_firefly",
    "repair",
    "run_fa",
    "HcgConfig",
    "HcgResult",
    "initial_partition",
    "is_individually_stable",
    "is_open",
    "run_hcg",
    "LinkRateTable",
    "access_rate",
    "build_rate_table",
    "coop_rate",
    "interference_at",
    "Scenario",
    "SystemParams",
    "all_local_popularity",
    "generate_scenario",
    "local_demand_mass",
    "local_popularity",
    "zipf_distribution",
    "SocialGraph",
    "build_social_graph",
    "cluster_preference",
    "contact_probability",
    "pair_contact",
    "popularity_similarity",
    "social_loss",
    "social_relationship",
    "__version__",
]
