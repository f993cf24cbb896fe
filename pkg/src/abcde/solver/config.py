from dataclasses import dataclass, field, fields
import random

import numpy as np

from ..exceptions import ContractViolation
from ..io import dumps_trace, write_trace

VARIANTS = ("abcd-e", "abcd-c")


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one solver run.

    ``max_iter`` is the reference budget.  ``time_limit`` (seconds) stops the
    run at the first iteration boundary after the limit; with both set, the
    first one reached wins.  ``variant="abcd-c"`` disables the scout phase.
    """

    S: int = 100
    M: int = 10
    max_iter: int | None = 100
    time_limit: float | None = None
    seed: int = 0
    variant: str = "abcd-e"
    root_policy: str = "max-degree"

    def __post_init__(self):
        for name in ("S", "M"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ContractViolation(f"{name} must be an integer, got {v!r}")
        if not self.S >= self.M >= 1:
            raise ContractViolation(f"need S >= M >= 1, got S={self.S}, M={self.M}")
        if self.max_iter is None and self.time_limit is None:
            raise ContractViolation("set max_iter, time_limit or both")
        if self.max_iter is not None and self.max_iter < 1:
            raise ContractViolation(f"max_iter must be >= 1, got {self.max_iter}")
        if self.time_limit is not None and not self.time_limit > 0:
            raise ContractViolation(f"time_limit must be > 0, got {self.time_limit}")
        if self.variant not in VARIANTS:
            raise ContractViolation(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ContractViolation(f"seed must be a non-negative integer, got {self.seed!r}")

    @property
    def scouting(self):
        return self.variant == "abcd-e"

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def agent_rng(seed, agent_id):
    """Independent generator for one agent, keyed by ``(seed, agent_id)``."""
    state = np.random.SeedSequence([int(seed), int(agent_id)]).generate_state(4, dtype=np.uint32)
    return random.Random(int.from_bytes(state.tobytes(), "little"))


@dataclass
class TraceRecord:
    iteration: int
    elapsed_ms: float
    gbest_utility: float
    employed_requests: int
    onlooker_requests: int
    total_messages: int
    evaluations: int


# elapsed_ms is wall-clock and therefore excluded from trace equality
DETERMINISTIC_FIELDS = (
    "iteration",
    "gbest_utility",
    "employed_requests",
    "onlooker_requests",
    "total_messages",
    "evaluations",
)


@dataclass
class AnytimeTrace:
    """Per-iteration records plus the final best assignment."""

    records: list
    assignment: np.ndarray
    utility: float
    config: SolverConfig
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    @property
    def gbest(self):
        return np.array([r.gbest_utility for r in self.records])

    def header(self):
        return {"config": self.config.as_dict()}

    def to_csv(self):
        return dumps_trace(self.records, self.header())

    def write_csv(self, path, header=None):
        return write_trace(self.records, path, {**self.header(), **(header or {})})
