"""Scalar building blocks of the bee-colony search.

Everything here is a pure function of its arguments.  The distributed solver
and the lockstep replica both call these, which is what lets the two produce
bit-identical traces.
"""

import math

PHI_RANGE = (-0.5, 0.5)
CAP_PHI_RANGE = (0.0, 1.0)


def init_value(dom, r):
    """Random point of ``dom`` from a uniform draw ``r`` in ``[0, 1]``."""
    return dom.lb + r * (dom.ub - dom.lb)


def clamp_to_domain(x, dom):
    if x < dom.lb:
        return dom.lb
    if x > dom.ub:
        return dom.ub
    return x


def candidate_update(e_h, gbest_i, p_h, e_i, phi, cap_phi, dom):
    """New value for agent i's variable.

    ``e_h``/``p_h`` are the helper agent's elite and population values,
    ``e_i`` the updating agent's own elite value and ``gbest_i`` its
    best-so-far component.  The result is clamped into ``dom``.
    """
    x = 0.5 * (e_h + gbest_i) + phi * (p_h - e_i) + cap_phi * (p_h - gbest_i)
    return clamp_to_domain(x, dom)


def draw_phi(rng):
    lo, hi = PHI_RANGE
    return lo + (hi - lo) * rng.random()


def draw_cap_phi(rng):
    lo, hi = CAP_PHI_RANGE
    return lo + (hi - lo) * rng.random()


def draw_index(rng, n):
    """Uniform integer in ``0..n-1`` from one ``random()`` draw."""
    k = int(rng.random() * n)
    # the product can round up to n when n is huge
    return k if k < n else n - 1


def draw_other_agent(rng, n, me):
    """Uniform agent id from ``0..n-1`` excluding ``me``."""
    k = draw_index(rng, n - 1)
    return k if k < me else k + 1


def positive_fit(fitness):
    if fitness < 0:
        return 1.0 / (1.0 + abs(fitness))
    return 1.0 + fitness


def selection_probabilities(fitnesses):
    """Return ``(fit, prob)`` lists for roulette selection."""
    fit = [positive_fit(float(v)) for v in fitnesses]
    total = 0.0
    for v in fit:
        total += v
    prob = [v / total for v in fit]
    return fit, prob


def roulette_select(prob, r):
    """Index picked by a uniform draw ``r`` in ``[0, 1)`` against ``prob``."""
    acc = 0.0
    last = None
    for u, p in enumerate(prob):
        if p > 0:
            last = u
        acc += p
        if r < acc:
            return u
    # accumulated rounding left r above the final sum
    return last


def select_elite(fitnesses, m):
    """Indices of the ``m`` best entries, best first, ties to the lower index."""
    order = sorted(range(len(fitnesses)), key=lambda u: (-fitnesses[u], u))
    return order[:m]


def best_index(fitnesses):
    """Index of the largest finite fitness (lowest index on ties), or None."""
    best = None
    for u, v in enumerate(fitnesses):
        if math.isnan(v):
            continue
        if best is None or v > fitnesses[best]:
            best = u
    return best
