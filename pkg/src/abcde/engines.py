"""Pick between the message-passing solver and the lockstep replica."""

from .exceptions import ContractViolation
from .oracle import centralized_replica
from .solver.distributed import DistributedABCD

ENGINES = ("distributed", "replica")


def run_engine(inst, config, engine="distributed"):
    """Run one search.

    ``"distributed"`` simulates every message; ``"replica"`` computes the same
    trace (minus wall-clock timings) without the message layer and is much
    faster on large instances.
    """
    if engine == "distributed":
        return DistributedABCD(inst, config).run()
    if engine == "replica":
        return centralized_replica(inst, config)
    raise ContractViolation(f"unknown engine {engine!r}; use one of {ENGINES}")
