"""The non-contextual polytope: vertices, LP membership, contextuality cost.

The polytope NC_G is the convex hull of the deterministic boxes of a
hypergraph.  The contextuality cost of a consistent box b solves

    maximize  sum_D w_D   subject to   sum_D w_D * vertexbox_D <= b,  w >= 0

over deterministic assignments D; the cost is 1 minus the optimum, and the
residual (b - sum_D w_D vertexbox_D) / cost is the contextual remainder.
Dense mode materializes all columns; above the dense cap a column-generation
loop prices columns by an exhaustive vectorized scan over assignments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .boxes import (
    Box,
    DeterministicAssignment,
    Hypergraph,
    require_consistent,
    require_valid,
)
from .errors import CapExceededError, ContextualityError, InvalidBoxError

DENSE_VERTEX_CAP = 2**14
PRICING_SCAN_CAP = 2**22
_LP_TOL = 1e-9


@dataclass(frozen=True)
class NCPolytope:
    """Materialized deterministic vertices (lexicographic order)."""

    hypergraph: Hypergraph
    assignments: np.ndarray  # (vertex_count, k) integer outputs

    @property
    def vertex_count(self) -> int:
        return self.assignments.shape[0]

    def assignment(self, index: int) -> DeterministicAssignment:
        return DeterministicAssignment(self.assignments[index])


def enumerate_vertices(g: Hypergraph, cap: int = DENSE_VERTEX_CAP) -> NCPolytope:
    """All deterministic assignments of ``g``; refuses above ``cap``."""
    total = g.joint_dim
    if total > cap:
        raise CapExceededError(
            f"{total} vertices exceed cap {cap}; use column-generation mode"
        )
    grid = np.unravel_index(np.arange(total), g.joint_shape)
    assignments = np.stack(grid, axis=1).astype(np.int64)
    assignments.flags.writeable = False
    return NCPolytope(g, assignments)


def _stack_offsets(g: Hypergraph) -> np.ndarray:
    dims = [g.context_dim(ci) for ci in range(g.n_contexts)]
    return np.concatenate([[0], np.cumsum(dims)])


def _context_strides(g: Hypergraph, ci: int) -> np.ndarray:
    shape = g.context_shape(ci)
    strides = np.ones(len(shape), dtype=np.int64)
    for j in range(len(shape) - 2, -1, -1):
        strides[j] = strides[j + 1] * shape[j + 1]
    return strides


def _stacked_rows(g: Hypergraph, assignments: np.ndarray) -> np.ndarray:
    """Stacked-entry row index hit by each assignment, per context: (N, n_contexts)."""
    offsets = _stack_offsets(g)
    rows = np.empty((assignments.shape[0], g.n_contexts), dtype=np.int64)
    for ci, ctx in enumerate(g.contexts):
        strides = _context_strides(g, ci)
        idx = np.zeros(assignments.shape[0], dtype=np.int64)
        for j, i in enumerate(ctx):
            idx += assignments[:, i] * strides[j]
        rows[:, ci] = offsets[ci] + idx
    return rows


def _vertex_matrix(g: Hypergraph, assignments: np.ndarray) -> np.ndarray:
    """Dense constraint matrix: one column per assignment, one row per stacked entry."""
    offsets = _stack_offsets(g)
    total = int(offsets[-1])
    n = assignments.shape[0]
    a_mat = np.zeros((total, n))
    rows = _stacked_rows(g, assignments)
    cols = np.arange(n)
    for ci in range(g.n_contexts):
        a_mat[rows[:, ci], cols] = 1.0
    return a_mat


@dataclass(frozen=True)
class CostReport:
    """Optimal decomposition data for the contextuality cost LP."""

    cost: float
    interval: tuple[float, float]
    witness_weights: dict[DeterministicAssignment, float]
    lp_status: str
    residual_box: Box | None

    @property
    def noncontextual_weight(self) -> float:
        return sum(self.witness_weights.values())


def _assignment_chunks(g: Hypergraph, chunk: int = 1 << 16):
    total = g.joint_dim
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        grid = np.unravel_index(idx, g.joint_shape)
        yield np.stack(grid, axis=1).astype(np.int64)


def _price_columns(g: Hypergraph, duals: np.ndarray, count: int) -> tuple[float, np.ndarray]:
    """Scan all assignments for the smallest dual score sum_c y[row(D, c)].

    Returns the minimum score and up to ``count`` assignments with the
    smallest scores (candidate entering columns).
    """
    best_score = np.inf
    best_rows: list[np.ndarray] = []
    for chunk in _assignment_chunks(g):
        rows = _stacked_rows(g, chunk)
        scores = duals[rows].sum(axis=1)
        order = np.argsort(scores)[:count]
        for j in order:
            best_rows.append(np.array([scores[j], *chunk[j]]))
        best_score = min(best_score, float(scores.min()))
        best_rows.sort(key=lambda r: r[0])
        best_rows = best_rows[:count]
    picked = np.array([r[1:] for r in best_rows], dtype=np.int64)
    return best_score, picked


def _solve_restricted(stacked: np.ndarray, a_mat: np.ndarray):
    res = linprog(
        c=-np.ones(a_mat.shape[1]),
        A_ub=a_mat,
        b_ub=stacked,
        bounds=(0.0, None),
        method="highs",
    )
    return res


def contextuality_cost(
    box: Box,
    tol: float = _LP_TOL,
    dense_cap: int = DENSE_VERTEX_CAP,
    pricing_cap: int = PRICING_SCAN_CAP,
) -> CostReport:
    """Minimal contextual weight in any convex decomposition of ``box``.

    Defined only for consistent boxes; inconsistent input is refused rather
    than given a misleading number.
    """
    require_valid(box)
    require_consistent(box)
    g = box.hypergraph
    stacked = box.stacked()

    if g.joint_dim <= dense_cap:
        polytope = enumerate_vertices(g, cap=dense_cap)
        assignments = np.asarray(polytope.assignments)
        a_mat = _vertex_matrix(g, assignments)
        res = _solve_restricted(stacked, a_mat)
        if res.status != 0:
            raise ContextualityError(f"cost LP failed: {res.message}")
        duals = -np.asarray(res.ineqlin.marginals)
        dual_value = float(duals @ stacked)
    else:
        if g.joint_dim > pricing_cap:
            raise CapExceededError(
                f"{g.joint_dim} vertices exceed the pricing scan cap {pricing_cap}"
            )
        total = int(_stack_offsets(g)[-1])
        seed_idx = np.unique(np.linspace(0, g.joint_dim - 1, 512).astype(np.int64))
        grid = np.unravel_index(seed_idx, g.joint_shape)
        assignments = np.stack(grid, axis=1).astype(np.int64)
        res = None
        duals = np.zeros(total)
        for _ in range(200):
            a_mat = _vertex_matrix(g, assignments)
            res = _solve_restricted(stacked, a_mat)
            if res.status != 0:
                raise ContextualityError(f"cost LP failed: {res.message}")
            duals = -np.asarray(res.ineqlin.marginals)
            min_score, candidates = _price_columns(g, duals, count=64)
            if min_score >= 1.0 - 1e-9:
                break
            merged = np.vstack([assignments, candidates])
            merged = np.unique(merged, axis=0)
            if merged.shape[0] == assignments.shape[0]:
                break
            assignments = merged
        else:
            raise ContextualityError("column generation did not converge in 200 rounds")
        # The pricing bound certifies y / min_score is dual feasible.
        min_score = max(min(1.0, float(min_score)), 1e-12) if res is not None else 1.0
        dual_value = float(duals @ stacked) / min_score

    primal_value = -float(res.fun)
    weights = np.asarray(res.x)
    cost = min(1.0, max(0.0, 1.0 - primal_value))
    interval = (
        max(0.0, 1.0 - dual_value),
        min(1.0, 1.0 - primal_value),
    )

    witness: dict[DeterministicAssignment, float] = {}
    mass = np.zeros_like(stacked)
    rows = _stacked_rows(g, assignments)
    for j in np.nonzero(weights > 1e-12)[0]:
        witness[DeterministicAssignment(assignments[j])] = float(weights[j])
        mass[rows[j]] += weights[j]

    residual = None
    if cost > tol:
        offsets = _stack_offsets(g)
        res_stacked = np.maximum(stacked - mass, 0.0) / cost
        dists = []
        for ci in range(g.n_contexts):
            vec = res_stacked[offsets[ci] : offsets[ci + 1]]
            total_mass = vec.sum()
            dists.append(vec / total_mass if total_mass > 0 else vec)
        residual = Box(g, dists)
    return CostReport(
        cost=cost,
        interval=interval,
        witness_weights=witness,
        lp_status="optimal",
        residual_box=residual,
    )


def is_noncontextual(box: Box, tol: float = 1e-8) -> bool:
    """Membership test for the NC polytope via the cost LP."""
    return contextuality_cost(box).cost <= tol


@dataclass(frozen=True)
class LinearOptimum:
    value: float
    argopt: DeterministicAssignment
    direction: str


def optimize_linear(
    g: Hypergraph,
    weights: list[np.ndarray],
    direction: str = "max",
    cap: int = PRICING_SCAN_CAP,
) -> LinearOptimum:
    """Extremum of a per-(context, outcome) linear functional over NC_G.

    The optimum of a linear functional over the polytope is attained at a
    deterministic vertex, so an exhaustive vectorized scan is exact.
    """
    if direction not in ("max", "min"):
        raise InvalidBoxError(f"direction must be 'max' or 'min', got {direction!r}")
    if g.joint_dim > cap:
        raise CapExceededError(f"{g.joint_dim} assignments exceed scan cap {cap}")
    if len(weights) != g.n_contexts:
        raise InvalidBoxError("need one weight vector per context")
    stacked_w = np.concatenate([np.asarray(w, dtype=float).ravel() for w in weights])
    offsets = _stack_offsets(g)
    if stacked_w.size != int(offsets[-1]):
        raise InvalidBoxError("weight vector lengths do not match context outcome spaces")

    sign = 1.0 if direction == "max" else -1.0
    best = -np.inf
    best_assignment: np.ndarray | None = None
    for chunk in _assignment_chunks(g):
        rows = _stacked_rows(g, chunk)
        scores = sign * stacked_w[rows].sum(axis=1)
        j = int(np.argmax(scores))
        if scores[j] > best:
            best = float(scores[j])
            best_assignment = chunk[j]
    assert best_assignment is not None
    return LinearOptimum(
        value=sign * best,
        argopt=DeterministicAssignment(best_assignment),
        direction=direction,
    )
