"""scikit-learn style front end for the solver."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .engines import run_engine
from .model import global_utility
from .solver.config import SolverConfig
from .utils.validation import check_problem, check_seed


class ABCDE(BaseEstimator):
    """Bee-colony search for a continuous DCOP instance.

    Parameters
    ----------
    S : int, default 100
        Population size.
    M : int, default 10
        Elite set size, ``1 <= M <= S``.
    max_iter : int or None, default 100
        Iteration budget.
    time_limit : float or None, default None
        Wall-clock budget in seconds.
    variant : {"abcd-e", "abcd-c"}, default "abcd-e"
        ``"abcd-c"`` runs without the scout (exploration) phase.
    root_policy : {"max-degree", "lowest-id"}, default "max-degree"
    engine : {"distributed", "replica"}, default "distributed"
    random_state : int, default 0

    Attributes
    ----------
    assignment_ : ndarray of shape (n,)
        Best assignment found.
    utility_ : float
        Its global utility.
    trace_ : AnytimeTrace
    n_agents_ : int
    """

    def __init__(
        self,
        S=100,
        M=10,
        max_iter=100,
        time_limit=None,
        variant="abcd-e",
        root_policy="max-degree",
        engine="distributed",
        random_state=0,
    ):
        self.S = S
        self.M = M
        self.max_iter = max_iter
        self.time_limit = time_limit
        self.variant = variant
        self.root_policy = root_policy
        self.engine = engine
        self.random_state = random_state

    def _config(self):
        return SolverConfig(
            S=self.S,
            M=self.M,
            max_iter=self.max_iter,
            time_limit=self.time_limit,
            seed=check_seed(self.random_state),
            variant=self.variant,
            root_policy=self.root_policy,
        )

    def fit(self, X, y=None):
        """Solve ``X`` (an instance, problem-file path or problem dict)."""
        inst = check_problem(X)
        trace = run_engine(inst, self._config(), self.engine)
        self.trace_ = trace
        self.assignment_ = np.asarray(trace.assignment, dtype=float)
        self.utility_ = float(trace.utility)
        self.n_agents_ = inst.n
        return self

    def predict(self, X=None):
        """Return the fitted assignment; ``X`` only has to match in size."""
        check_is_fitted(self, ["assignment_", "n_agents_"])
        if X is not None:
            inst = check_problem(X)
            if inst.n != self.n_agents_:
                raise ValueError(f"fitted on {self.n_agents_} agents, got {inst.n}")
        return self.assignment_.copy()

    def score(self, X, y=None):
        """Global utility of the fitted assignment on ``X``."""
        check_is_fitted(self, ["assignment_"])
        return global_utility(check_problem(X), self.assignment_)
