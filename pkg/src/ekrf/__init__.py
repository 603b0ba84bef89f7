"""Exact tools for k-uniform set families under pair-sum intersection conditions.

The package is organized around a few small, composable layers:

* :mod:`ekrf.setcore` — ground sets, k-subsets, families, file formats.
* :mod:`ekrf.conditions` — pair-sum conditions, thresholds, exact checking.
* :mod:`ekrf.constructions` — extremal constructions, profiles, closed-form bounds.
* :mod:`ekrf.structure` — sunflowers, matchings, kernel decompositions, audits.
* :mod:`ekrf.search` — exact maximum-family search and ILP/CNF export.
* :mod:`ekrf.cli` — the ``ekrf`` command-line front end.

Everything is deterministic: no randomness is used anywhere in the library.
"""

from .setcore import (
    CapExceeded,
    DEFAULT_ENUM_CAP,
    EkrfError,
    Family,
    FormatError,
    GroundParams,
    KSet,
    MAX_GROUND,
    ParameterError,
    binomial,
    enumerate_ksets,
    intersection_size,
    load_family,
    parse_family,
    parse_family_json,
    save_family,
    serialize_family,
    serialize_family_json,
)
from .conditions import (
    CheckResult,
    ConditionSpec,
    Variant,
    Violation,
    check_condition,
    min_pairsum,
    pair_sum,
    pigeonhole_bound,
    threshold,
)
from .constructions import (
    Profile,
    ProfilePoint,
    construct_star,
    construct_sunflower,
    construct_thm6,
    construct_thm8,
    f_profile,
    g_profile,
    rhs_bound,
)
from .structure import (
    AuditCheck,
    AuditFailure,
    AuditReport,
    Decomposition,
    Sunflower,
    find_sunflower,
    is_cross_intersecting,
    is_t_intersecting,
    kernel_decompose,
    lemma_audit,
    matching_number,
)
from .search import (
    SearchOptions,
    SearchResult,
    SearchState,
    enumerate_bad_tuples,
    export_cnf,
    export_ilp,
    incremental_feasible,
    max_family,
)

__version__ = "0.1.0"

__all__ = [
    "AuditCheck",
    "AuditFailure",
    "AuditReport",
    "CapExceeded",
    "CheckResult",
    "ConditionSpec",
    "DEFAULT_ENUM_CAP",
    "Decomposition",
    "EkrfError",
    "Family",
    "FormatError",
    "GroundParams",
    "KSet",
    "MAX_GROUND",
    "ParameterError",
    "Profile",
    "ProfilePoint",
    "SearchOptions",
    "SearchResult",
    "SearchState",
    "Sunflower",
    "Variant",
    "Violation",
    "binomial",
    "check_condition",
    "construct_star",
    "construct_sunflower",
    "construct_thm6",
    "construct_thm8",
    "enumerate_bad_tuples",
    "enumerate_ksets",
    "export_cnf",
    "export_ilp",
    "f_profile",
    "find_sunflower",
    "g_profile",
    "incremental_feasible",
    "intersection_size",
    "is_cross_intersecting",
    "is_t_intersecting",
    "kernel_decompose",
    "lemma_audit",
    "load_family",
    "matching_number",
    "max_family",
    "min_pairsum",
    "pair_sum",
    "parse_family",
    "parse_family_json",
    "pigeonhole_bound",
    "rhs_bound",
    "save_family",
    "serialize_family",
    "serialize_family_json",
    "threshold",
    "__version__",
]
