"""Definable coherent ultrapowers: classes, Łoś, ``j``, derived filters and materialization."""

from cohult.ultrapower.ambient import (
    Ambient,
    DerivedCoherentFilter,
    MaterializedAmbient,
    OutsideFragment,
    WitnessNotFound,
    classes_equal,
    derive_filter,
    h_infinity,
    los_satisfies,
)
from cohult.ultrapower.classes import (
    UltrapowerClass,
    class_make,
    class_push,
    common_support,
    embedding_j,
)
from cohult.ultrapower.materialize import (
    UltrapowerStructure,
    VocabularyMismatch,
    check_transitions,
    coherent_ultraproduct_at,
    find_isomorphism,
    materialize_ultrapower,
    principal_map,
)
from cohult.ultrapower.scenario import (
    Scenario,
    ScenarioError,
    load_scenario,
    loads_scenario,
    verify_isomorphism,
)
