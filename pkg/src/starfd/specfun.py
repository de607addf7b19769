"""Numerical kernels: hypergeometric series, Gauss-Legendre rules, and an
adaptive integrator.

The adaptive integrator is deliberately self-contained (no external
quadrature library): it serves as the ground-truth oracle for every
closed-form disk expectation in :mod:`starfd.geometry`, so its behavior
must be fully pinned by this module alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .exceptions import NumericError

__all__ = [
    "QuadratureRule",
    "hyper_pFq",
    "gauss_legendre",
    "integrate_adaptive",
]

# Convergence policy for hyper_pFq: a term is negligible when it is below
# REL_TERM_TOL * |partial sum|; we require three consecutive negligible
# terms before declaring convergence, and give up after MAX_TERMS.
REL_TERM_TOL = 1e-15
CONSECUTIVE_SMALL = 3
MAX_TERMS = 10_000


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a quadrature rule on [-1, 1].

    Invariants: weights are positive and sum to 2 (the measure of the
    interval) within 1e-12; nodes are strictly increasing and symmetric
    about zero.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D and equal length")
        if abs(weights.sum() - 2.0) > 1e-12:
            raise ValueError("quadrature weights must sum to 2 on [-1, 1]")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")

    def integrate(self, f: Callable[[np.ndarray], np.ndarray],
                  a: float, b: float) -> float:
        """Apply the rule to ``f`` on ``[a, b]`` via the affine map."""
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        return float(half * np.sum(self.weights * f(mid + half * self.nodes)))


def hyper_pFq(a: Sequence[float], b: Sequence[float], z: float) -> float:
    """Partial-sum evaluation of the generalized hypergeometric series pFq.

    Terms are built by the ratio recurrence
    ``term_{k+1} = term_k * prod(a_i + k) / prod(b_j + k) * z / (k + 1)``.
    The sum is declared converged when three consecutive terms are below
    1e-15 of the running sum, and aborts with :class:`NumericError` after
    10_000 terms (which is what happens for divergent parameter/argument
    combinations, e.g. p > q + 1 with z != 0).

    No ``b_j`` may be a non-positive integer (the recurrence would divide
    by zero at k = -b_j).
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    for bj in b:
        if bj <= 0 and float(bj).is_integer():
            raise ValueError(
                f"lower parameter {bj} is a non-positive integer; "
                "the series is undefined")
    if z == 0:
        return 1.0

    total = 1.0
    term = 1.0
    small_streak = 0
    for k in range(MAX_TERMS):
        num = 1.0
        for ai in a:
            num *= ai + k
        den = 1.0
        for bj in b:
            den *= bj + k
        term = term * num / den * z / (k + 1)
        total += term
        if not math.isfinite(total):
            raise NumericError(
                f"hypergeometric series overflowed at term {k + 1} "
                f"(|term| = {abs(term):.3e})")
        if abs(term) < REL_TERM_TOL * abs(total):
            small_streak += 1
            if small_streak >= CONSECUTIVE_SMALL:
                return total
        else:
            small_streak = 0
    raise NumericError(
        f"hypergeometric series did not converge in {MAX_TERMS} terms "
        f"(last |term| = {abs(term):.3e}, |sum| = {abs(total):.3e})")


def gauss_legendre(n: int) -> QuadratureRule:
    """Gauss-Legendre rule with ``n`` nodes (exact for degree <= 2n-1)."""
    if n < 1:
        raise ValueError("need at least one node")
    nodes, weights = leggauss(n)
    return QuadratureRule(nodes=nodes, weights=weights)


# 15-point Kronrod extension of the 7-point Gauss rule (positive half;
# the rule is symmetric). Nodes at even indices are the embedded Gauss
# nodes. Standard double-precision constants.
_K15_NODES_HALF = np.array([
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
])
_K15_WEIGHTS_HALF = np.array([
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
])
_G7_WEIGHTS_HALF = np.array([
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
])

_K15_NODES = np.concatenate([-_K15_NODES_HALF[:-1], _K15_NODES_HALF[::-1]])
_K15_WEIGHTS = np.concatenate([_K15_WEIGHTS_HALF[:-1],
                               _K15_WEIGHTS_HALF[::-1]])
# Gauss nodes sit at odd positions 1, 3, ..., 13 of the 15-node vector.
_G7_INDEX = np.arange(1, 15, 2)
_G7_WEIGHTS = np.concatenate([_G7_WEIGHTS_HALF[:-1], _G7_WEIGHTS_HALF[::-1]])

_MAX_DEPTH = 60


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 7/15 panel: returns (K15 estimate, |K15 - G7|)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.array([f(mid + half * t) for t in _K15_NODES], dtype=float)
    if not np.all(np.isfinite(fx)):
        raise NumericError(
            f"integrand returned a non-finite value on [{a!r}, {b!r}]")
    k15 = half * float(_K15_WEIGHTS @ fx)
    g7 = half * float(_G7_WEIGHTS @ fx[_G7_INDEX])
    return k15, abs(k15 - g7)


def integrate_adaptive(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-12) -> float:
    """Adaptive bisection with an embedded Gauss-Kronrod error estimate.

    Each subinterval is accepted once its 7/15-point error estimate fits
    within the share of the global budget proportional to its width, so the
    final result satisfies ``|error| <= tol * max(1, |result|)``. Intervals
    that still fail at bisection depth 60 raise :class:`NumericError`.
    """
    if not a < b:
        raise ValueError("integration interval must satisfy a < b")
    if tol <= 0:
        raise ValueError("tolerance must be positive")

    whole, _ = _gk15(f, a, b)
    budget = tol * max(1.0, abs(whole))
    width = b - a

    total = 0.0
    # Stack of (left, right, depth). Depth counts bisections from the
    # original interval.
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        est, err = _gk15(f, lo, hi)
        if err <= budget * (hi - lo) / width or err == 0.0:
            total += est
            continue
        if depth >= _MAX_DEPTH:
            raise NumericError(
                f"adaptive integration exceeded depth {_MAX_DEPTH} on "
                f"[{lo!r}, {hi!r}] (panel error {err:.3e}, budget "
                f"{budget * (hi - lo) / width:.3e})")
        mid = 0.5 * (lo + hi)
        stack.append((lo, mid, depth + 1))
        stack.append((mid, hi, depth + 1))
    return total
