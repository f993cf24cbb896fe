"""Distributed bee-colony search for continuous DCOPs."""

from .config import AnytimeTrace, SolverConfig, TraceRecord, agent_rng, DETERMINISTIC_FIELDS, VARIANTS
from .distributed import DistributedABCD, solve
from .operators import (
    candidate_update,
    clamp_to_domain,
    init_value,
    positive_fit,
    roulette_select,
    select_elite,
    selection_probabilities,
)

__all__ = [
    "AnytimeTrace",
    "DETERMINISTIC_FIELDS",
    "DistributedABCD",
    "SolverConfig",
    "TraceRecord",
    "VARIANTS",
    "agent_rng",
    "candidate_update",
    "clamp_to_domain",
    "init_value",
    "positive_fit",
    "roulette_select",
    "select_elite",
    "selection_probabilities",
    "solve",
]
