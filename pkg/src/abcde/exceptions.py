"""Exception types raised across the package."""


class ContractViolation(ValueError):
    """An argument or state broke a documented precondition."""


class ProtocolError(RuntimeError):
    """The simulated message protocol stalled or received something unexpected."""


class RoundAborted(ProtocolError):
    """An agent raised while being stepped; carries the round and agent id."""

    def __init__(self, round_no, agent, cause):
        self.round = round_no
        self.agent = agent
        super().__init__(f"round {round_no}: agent {agent} failed: {cause!r}")


class ReplicaDivergence(AssertionError):
    """Two traces that should be identical differ."""

    def __init__(self, iteration, field, left, right):
        self.iteration = iteration
        self.field = field
        super().__init__(
            f"traces diverge at iteration {iteration}: {field} {left!r} != {right!r}"
        )
