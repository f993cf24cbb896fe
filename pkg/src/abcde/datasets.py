"""Small built-in instances used in examples and tests."""

import numpy as np

from .model import CDCOPInstance, FunctionConstraint, QuadraticConstraint


def _f12(x1, x2):
    return x1 * x1 - np.cos(2 * np.pi * x2)


def _f13(x1, x3):
    return np.exp(np.sqrt(x1 * x1 + x3 * x3))


def _f14(x1, x4):
    return (x1 + 2 * x4 - 7) ** 2


def _f23(x2, x3):
    return x2 * x2 + x3 * x3 - x2 * x3


FOUR_AGENT_FUNCTIONS = {"f12": _f12, "f13": _f13, "f14": _f14, "f23": _f23}


def make_four_agent():
    """Four agents, edges x1-x2, x1-x3, x1-x4, x2-x3, all domains [-10, 10].

    Agent ``k`` holds variable ``x_{k+1}``.
    """
    constraints = [
        FunctionConstraint(0, 1, _f12, "f12"),
        FunctionConstraint(0, 2, _f13, "f13"),
        FunctionConstraint(0, 3, _f14, "f14"),
        FunctionConstraint(1, 2, _f23, "f23"),
    ]
    return CDCOPInstance(4, [(-10.0, 10.0)] * 4, constraints)


def make_pair(func, domain=(-10.0, 10.0), name=None):
    """Two agents joined by a single constraint ``func(x0, x1)``."""
    return CDCOPInstance(2, [domain, domain], [FunctionConstraint(0, 1, func, name)])


def make_quadratic_pair(coeffs, domain=(-10.0, 10.0)):
    return CDCOPInstance(2, [domain, domain], [QuadraticConstraint(0, 1, coeffs)])


def make_chain(n, coeffs=(0, 0, 0, 0, 1, 0), domain=(-10.0, 10.0)):
    constraints = [QuadraticConstraint(k, k + 1, coeffs) for k in range(n - 1)]
    return CDCOPInstance(n, [domain] * n, constraints)
