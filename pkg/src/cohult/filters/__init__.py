"""Exact combinatorics of coherent filter systems over finite base sets."""

from cohult.filters.construct import (
    coherent_extend,
    complete_to_ultra,
    enumerate_coherent_systems,
    enumerate_coherent_ultrafilters,
    filter_product,
    first_undecided,
    one_step_extend,
    product_contains,
    product_ultrafilter,
)
from cohult.filters.cube import (
    ArityMismatch,
    CubeSubset,
    NotSubset,
    ProjectionMap,
    all_tuples,
    fullify,
    index_tuple,
    is_full_over,
    project_tuple,
    projection_map,
    pullback,
    pushforward,
)
from cohult.filters.lemmas import du_equals_ud_check
from cohult.filters.systems import (
    CoherenceCertificate,
    CoherentFilterSystem,
    CoherentUltrafilterFinite,
    FiniteFilter,
    ImproperInput,
    check_coherence,
)

__all__ = [
    "ArityMismatch",
    "CoherenceCertificate",
    "CoherentFilterSystem",
    "CoherentUltrafilterFinite",
    "CubeSubset",
    "FiniteFilter",
    "ImproperInput",
    "NotSubset",
    "ProjectionMap",
    "all_tuples",
    "check_coherence",
    "coherent_extend",
    "complete_to_ultra",
    "du_equals_ud_check",
    "enumerate_coherent_systems",
    "enumerate_coherent_ultrafilters",
    "filter_product",
    "first_undecided",
    "fullify",
    "index_tuple",
    "is_full_over",
    "one_step_extend",
    "product_contains",
    "product_ultrafilter",
    "project_tuple",
    "projection_map",
    "pullback",
    "pushforward",
]
