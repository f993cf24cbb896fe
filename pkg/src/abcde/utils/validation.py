"""Input validation helpers shared by the estimator, solver and CLI."""

import numbers
import os

import numpy as np

from ..exceptions import ContractViolation


def check_assignment(inst, x):
    """Return ``x`` as a float array after checking length and domains."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (inst.n,):
        raise ContractViolation(f"assignment must have shape ({inst.n},), got {arr.shape}")
    for i, (v, dom) in enumerate(zip(arr, inst.domains)):
        if not (dom.lb <= v <= dom.ub):
            raise ContractViolation(
                f"assignment value {v} for agent {i} outside [{dom.lb}, {dom.ub}]"
            )
    return arr


def check_problem(problem):
    """Accept an instance, a problem-file path or a parsed problem dict."""
    from ..io import load_problem, problem_from_dict
    from ..model import CDCOPInstance

    if isinstance(problem, CDCOPInstance):
        return problem
    if isinstance(problem, (str, os.PathLike)):
        return load_problem(problem)
    if isinstance(problem, dict):
        return problem_from_dict(problem)
    raise ContractViolation(
        f"expected a CDCOPInstance, path or dict, got {type(problem).__name__}"
    )


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ContractViolation(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ContractViolation(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_seed(seed):
    if seed is None:
        return 0
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or seed < 0:
        raise ContractViolation(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)
