"""Discrete optimal transport between nBOW marginals (word mover's distance).

The exact solver delegates to POT's network simplex. Lower bounds and the
entropic solver are implemented here.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

# POT probes every installed array backend at import time (seconds with torch/tf/jax).
for _backend in ("PYTORCH", "JAX", "TENSORFLOW", "CUPY"):
    os.environ.setdefault(f"POT_BACKEND_DISABLE_{_backend}", "1")
import ot  # noqa: E402

from .embeddings import EmbeddingTable  # noqa: E402
from .textproc import NBow  # noqa: E402

MARGINAL_TOL = 1e-9


class EmptyDistributionError(ValueError):
    pass


@dataclass(frozen=True)
class TransportResult:
    flow: np.ndarray
    objective: float
    iterations: int
    converged: bool = True


def _weights(x) -> np.ndarray:
    w = np.asarray(x.weights if isinstance(x, NBow) else x, dtype=np.float64)
    if w.size == 0:
        raise EmptyDistributionError("transport marginal has empty support")
    return w


def _check_marginal(w: np.ndarray, name: str) -> None:
    if np.any(w < 0):
        raise ValueError(f"{name} has negative weights")
    if abs(w.sum() - 1.0) > MARGINAL_TOL:
        raise ValueError(f"{name} sums to {w.sum()!r}, expected 1")


def cost_matrix(a: NBow, b: NBow, table: EmbeddingTable) -> np.ndarray:
    """Euclidean ground costs, ``costs[i, j] = |x_a[i] - x_b[j]|``."""
    if a.empty or b.empty:
        raise EmptyDistributionError("cost_matrix needs two non-empty supports")
    va = table.vectors[list(a.support)]
    vb = table.vectors[list(b.support)]
    return cdist(va, vb)


def _check_shapes(wa, wb, costs):
    costs = np.ascontiguousarray(costs, dtype=np.float64)
    if costs.shape != (wa.size, wb.size):
        raise ValueError(f"cost matrix shape {costs.shape} does not match supports ({wa.size}, {wb.size})")
    return costs


def solve_exact(a, b, costs: np.ndarray) -> TransportResult:
    """Globally optimal transportation plan.

    ``iterations`` is 0: the network-simplex backend does not report pivots.
    """
    wa, wb = _weights(a), _weights(b)
    _check_marginal(wa, "source")
    _check_marginal(wb, "target")
    costs = _check_shapes(wa, wb, costs)
    if wa.size == 1 or wb.size == 1:
        # one side is a point mass: the plan is forced
        flow = np.outer(wa, wb)
    else:
        flow = ot.emd(wa, wb, costs)
    return TransportResult(flow, float(np.sum(flow * costs)), 0)


def wcd_lower_bound(a: NBow, b: NBow, table: EmbeddingTable) -> float:
    """Distance between the weighted embedding centroids."""
    wa, wb = _weights(a), _weights(b)
    ca = wa @ table.vectors[list(a.support)]
    cb = wb @ table.vectors[list(b.support)]
    return float(np.linalg.norm(ca - cb))


def rwmd_lower_bound(a, b, costs: np.ndarray) -> float:
    """Relaxed WMD: the larger of the two one-sided nearest-neighbour relaxations."""
    wa, wb = _weights(a), _weights(b)
    costs = _check_shapes(wa, wb, costs)
    return float(max(wa @ costs.min(axis=1), wb @ costs.min(axis=0)))


def _round_to_feasible(plan: np.ndarray, wa: np.ndarray, wb: np.ndarray) -> np.ndarray:
    # Altschuler, Weed & Rigollet (2017), Algorithm 2
    r = plan.sum(axis=1)
    x = np.minimum(np.divide(wa, r, out=np.ones_like(wa), where=r > 0), 1.0)
    plan = plan * x[:, None]
    c = plan.sum(axis=0)
    y = np.minimum(np.divide(wb, c, out=np.ones_like(wb), where=c > 0), 1.0)
    plan = plan * y[None, :]
    err_r = wa - plan.sum(axis=1)
    err_c = wb - plan.sum(axis=0)
    mass = err_c.sum()
    if mass > 0:
        plan = plan + np.outer(err_r, err_c) / mass
    return plan


def solve_sinkhorn(a, b, costs: np.ndarray, epsilon: float = 0.01, max_iter: int = 10_000,
                   tol: float = 1e-9) -> TransportResult:
    """Entropic OT in the log domain, rounded onto the transportation polytope.

    The reported objective is the cost of the rounded (feasible) plan, so it
    never undercuts the exact optimum. ``converged`` is False when the marginal
    violation of the unrounded plan is still above ``tol`` after ``max_iter``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if max_iter <= 0:
        raise ValueError("max_iter must be positive")
    wa, wb = _weights(a), _weights(b)
    _check_marginal(wa, "source")
    _check_marginal(wb, "target")
    costs = _check_shapes(wa, wb, costs)

    log_a = np.log(wa, out=np.full_like(wa, -np.inf), where=wa > 0)
    log_b = np.log(wb, out=np.full_like(wb, -np.inf), where=wb > 0)
    f = np.zeros_like(wa)
    g = np.zeros_like(wb)
    scaled = costs / epsilon
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        f = log_a - logsumexp(g[None, :] - scaled, axis=1)
        g = log_b - logsumexp(f[:, None] - scaled, axis=0)
        if it % 10 == 0 or it == max_iter:
            # columns are exact after the g-update; rows carry the error
            row = np.exp(f[:, None] + g[None, :] - scaled).sum(axis=1)
            if np.abs(row - wa).sum() < tol:
                converged = True
                break
    plan = np.exp(f[:, None] + g[None, :] - scaled)
    plan = np.maximum(_round_to_feasible(plan, wa, wb), 0.0)
    return TransportResult(plan, float(np.sum(plan * costs)), it, converged)
