"""Relative entropy of contextuality: fixed weights, uniform, and maximized.

For a consistent box with context distributions g_c and context weights w_c,
the fixed-weight measure minimizes

    F(p) = sum_c w_c * D(g_c || marginal_c(p))        (bits)

over joint distributions p on the full product alphabet.  F is convex; the
gradient coordinate at lambda is ``-log2(e) * r(lambda)`` with

    r(lambda) = sum_c w_c * g_c(lambda_c) / p_c(lambda_c),

so the Frank-Wolfe linear-minimization step is a coordinate argmax of r and
the duality gap ``(max r - 1) * log2(e)`` is free.  The default iteration is
the multiplicative step ``p <- p * r`` (an EM / iterative-scaling update that
never increases F and keeps every context marginal bounded below by
``w_c * g_c``), with Frank-Wolfe line-search steps as a stall fallback; every
iterate carries the same gap certificate, and ``value - gap`` is always a
valid lower bound on the optimum.

The maximized measure sup_w min_p is computed by multiplicative-weights
ascent on the context simplex; the supergradient at w is the vector of
per-context divergences at the inner minimizer.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .boxes import (
    Box,
    Hypergraph,
    JointDistribution,
    require_consistent,
    require_valid,
)
from .closed_form import chi
from .errors import CapExceededError, InvalidBoxError, NotXorBoxError

LOG2E = math.log2(math.e)
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITERS = 200_000
DEFAULT_DIM_CAP = 2**22


def relative_entropy(g, p) -> float:
    """D(g || p) in bits, with 0*log(0/x) = 0 and +inf on support mismatch."""
    g = np.asarray(g, dtype=float)
    p = np.asarray(p, dtype=float)
    if g.shape != p.shape:
        raise InvalidBoxError(f"length mismatch: {g.shape} vs {p.shape}")
    mask = g > 0.0
    if np.any(p[mask] <= 0.0):
        return float("inf")
    return float(np.sum(g[mask] * np.log2(g[mask] / p[mask])))


@dataclass(frozen=True)
class ContextWeights:
    """Probability vector over the contexts of a box."""

    weights: np.ndarray

    def __init__(self, weights):
        vec = np.asarray(weights, dtype=float).copy()
        if vec.ndim != 1 or vec.size == 0:
            raise InvalidBoxError("context weights must be a non-empty vector")
        if np.any(vec < -1e-15):
            raise InvalidBoxError("context weights must be nonnegative")
        vec = np.where(vec < 0.0, 0.0, vec)
        if abs(float(vec.sum()) - 1.0) > 1e-12:
            raise InvalidBoxError(f"context weights sum to {float(vec.sum())!r}")
        vec.flags.writeable = False
        object.__setattr__(self, "weights", vec)

    @classmethod
    def uniform(cls, n: int) -> "ContextWeights":
        return cls(np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class MeasureReport:
    """Value plus optimality certificates for one measure evaluation.

    ``value - duality_gap`` is a valid lower bound on the true optimum of the
    inner minimization; for maximized runs ``outer_gap`` additionally bounds
    the distance to the supremum over weights (it may stay looser than the
    inner tolerance and is informational).
    """

    value: float
    optimizer: JointDistribution | None
    duality_gap: float
    iterations: int
    wall_time_s: float
    converged: bool
    method: str
    outer_weights: ContextWeights | None = None
    outer_gap: float | None = None
    trace: tuple[tuple[int, float, float], ...] = ()


class _Workspace:
    """Per-hypergraph marginalization machinery for the joint tensor."""

    def __init__(self, g: Hypergraph):
        self.hypergraph = g
        self.shape = g.joint_shape
        self.dim = g.joint_dim
        k = g.n_observables
        self.sum_axes = []
        self.to_context = []
        self.to_sorted = []
        self.broadcast_shape = []
        for ctx in g.contexts:
            others = tuple(a for a in range(k) if a not in ctx)
            sorted_ctx = tuple(sorted(ctx))
            self.sum_axes.append(others)
            self.to_context.append(tuple(sorted_ctx.index(i) for i in ctx))
            self.to_sorted.append(tuple(ctx.index(i) for i in sorted_ctx))
            self.broadcast_shape.append(
                tuple(g.cardinalities[i] if i in ctx else 1 for i in range(k))
            )

    def marginal(self, tensor: np.ndarray, ci: int) -> np.ndarray:
        m = tensor.sum(axis=self.sum_axes[ci]) if self.sum_axes[ci] else tensor
        return np.transpose(m, self.to_context[ci])

    def broadcast(self, values: np.ndarray, ci: int) -> np.ndarray:
        """Context-order array lifted to a joint-shape broadcastable view."""
        return np.transpose(values, self.to_sorted[ci]).reshape(self.broadcast_shape[ci])


def _connected_components(g: Hypergraph) -> list[list[int]]:
    parent = list(range(g.n_observables))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ctx in g.contexts:
        root = find(ctx[0])
        for i in ctx[1:]:
            parent[find(i)] = root
    groups: dict[int, list[int]] = {}
    for i in range(g.n_observables):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _factorize_components(p_tensor: np.ndarray, g: Hypergraph) -> np.ndarray:
    """Replace p by the product of its marginals on hypergraph components.

    Context marginals are unchanged (each context lives in one component), so
    the objective value is preserved while the minimizer factorizes.
    """
    components = _connected_components(g)
    k = g.n_observables
    factors = []
    axis_order: list[int] = []
    for comp in components:
        comp = sorted(comp)
        others = tuple(a for a in range(k) if a not in comp)
        factors.append(p_tensor.sum(axis=others))
        axis_order.extend(comp)
    prod = factors[0]
    for f in factors[1:]:
        prod = np.multiply.outer(prod, f)
    perm = tuple(axis_order.index(j) for j in range(k))
    return np.ascontiguousarray(np.transpose(prod, perm))


class _FixedWeightProblem:
    def __init__(self, box: Box, weights: ContextWeights):
        self.box = box
        self.g = box.hypergraph
        self.ws = _Workspace(self.g)
        self.w = weights.weights
        self.active = [ci for ci in range(self.g.n_contexts) if self.w[ci] > 0.0]
        self.targets = [box.context_tensor(ci) for ci in range(self.g.n_contexts)]
        self.masks = [t > 0.0 for t in self.targets]

    def evaluate(self, p_tensor: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        """Objective value (bits), multiplier field r, and duality gap (bits)."""
        value = 0.0
        r = np.zeros(self.ws.shape)
        for ci in self.active:
            target, mask = self.targets[ci], self.masks[ci]
            m = self.ws.marginal(p_tensor, ci)
            supported = m[mask]
            if np.any(supported <= 0.0):
                return float("inf"), r, float("inf")
            value += self.w[ci] * float(
                np.sum(target[mask] * np.log2(target[mask] / supported))
            )
            ratio = np.zeros_like(target)
            ratio[mask] = target[mask] / supported
            r += self.ws.broadcast(ratio, ci) * self.w[ci]
        gap = (float(r.max()) - 1.0) * LOG2E
        return value, r, max(gap, 0.0)

    def divergences(self, p_tensor: np.ndarray) -> np.ndarray:
        """Per-context D(g_c || p_c) in bits at the given joint."""
        out = np.empty(self.g.n_contexts)
        for ci in range(self.g.n_contexts):
            target, mask = self.targets[ci], self.masks[ci]
            m = self.ws.marginal(p_tensor, ci)
            supported = m[mask]
            if np.any(supported <= 0.0):
                out[ci] = float("inf")
            else:
                out[ci] = float(np.sum(target[mask] * np.log2(target[mask] / supported)))
        return out

    def line_search(self, p_tensor: np.ndarray, vertex: tuple[int, ...]) -> float:
        """Exact step length toward a vertex: root of the 1-D directional derivative."""
        marginals = []
        for ci in self.active:
            m = self.ws.marginal(p_tensor, ci)
            s = np.zeros_like(m)
            s[tuple(vertex[i] for i in self.g.contexts[ci])] = 1.0
            marginals.append((self.targets[ci], self.masks[ci], m, s, self.w[ci]))

        def derivative(gamma: float) -> float:
            total = 0.0
            for target, mask, m, s, wc in marginals:
                mg = (1.0 - gamma) * m + gamma * s
                total -= wc * float(
                    np.sum(target[mask] * (s[mask] - m[mask]) / mg[mask])
                )
            return total * LOG2E

        lo, hi = 0.0, 1.0 - 1e-12
        if derivative(hi) <= 0.0:
            return hi
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            if derivative(mid) > 0.0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)


def _solve_fixed(
    box: Box,
    weights: ContextWeights,
    tol: float,
    max_iters: int,
    method: str,
    init: np.ndarray | None,
) -> tuple[float, np.ndarray, float, int, bool, tuple]:
    problem = _FixedWeightProblem(box, weights)
    dim = problem.ws.dim
    p = np.full(problem.ws.shape, 1.0 / dim) if init is None else init.reshape(problem.ws.shape).copy()

    trace: list[tuple[int, float, float]] = []
    next_trace = 1
    prev_value = float("inf")
    stall = 0
    value, r, gap = problem.evaluate(p)
    iteration = 0
    for iteration in range(1, max_iters + 1):
        if gap <= tol:
            break
        if method == "fw" or (method == "auto" and stall >= 3):
            vertex = np.unravel_index(int(np.argmax(r)), problem.ws.shape)
            gamma = problem.line_search(p, vertex)
            p *= 1.0 - gamma
            p[vertex] += gamma
            stall = 0
        else:
            p *= r
            total = p.sum()
            p /= total
        prev_value = value
        value, r, gap = problem.evaluate(p)
        if method == "auto":
            stall = stall + 1 if prev_value - value < 1e-15 * max(1.0, abs(value)) else 0
        if iteration >= next_trace:
            trace.append((iteration, value, gap))
            next_trace *= 2
    trace.append((iteration, value, gap))

    if len(_connected_components(problem.g)) > 1:
        # Factorizing across components keeps every context marginal, hence
        # the value; re-evaluate so the certificate refers to the returned point.
        p = _factorize_components(p, problem.g)
        value, _, gap = problem.evaluate(p)
    p_flat = np.maximum(p.reshape(-1), 0.0)
    p_flat /= p_flat.sum()
    return value, p_flat, gap, iteration, gap <= tol + 1e-14, tuple(trace)


def _check_dims(box: Box, dim_cap: int) -> None:
    if box.hypergraph.joint_dim > dim_cap:
        raise CapExceededError(
            f"joint dimension {box.hypergraph.joint_dim} exceeds cap {dim_cap}"
        )


def x_fixed(
    box: Box,
    weights: ContextWeights,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
    method: str = "auto",
    dim_cap: int = DEFAULT_DIM_CAP,
    init: np.ndarray | None = None,
) -> MeasureReport:
    """Relative entropy of contextuality at fixed context weights.

    ``method``: "auto" (multiplicative steps with Frank-Wolfe fallback),
    "em" (multiplicative only), or "fw" (Frank-Wolfe with exact line search).
    """
    require_valid(box)
    require_consistent(box)
    _check_dims(box, dim_cap)
    if len(weights) != box.hypergraph.n_contexts:
        raise InvalidBoxError("one weight per context required")
    if method not in ("auto", "em", "fw"):
        raise InvalidBoxError(f"unknown method {method!r}")
    start = time.perf_counter()
    value, p_flat, gap, iters, converged, trace = _solve_fixed(
        box, weights, tol, max_iters, method, init
    )
    return MeasureReport(
        value=value,
        optimizer=JointDistribution(box.hypergraph, p_flat),
        duality_gap=gap,
        iterations=iters,
        wall_time_s=time.perf_counter() - start,
        converged=converged,
        method=method,
        trace=trace,
    )


def x_u(box: Box, tol: float = DEFAULT_TOL, **kwargs) -> MeasureReport:
    """Uniform relative entropy of contextuality (weights 1/n)."""
    return x_fixed(box, ContextWeights.uniform(box.hypergraph.n_contexts), tol=tol, **kwargs)


def i_fixed(box: Box, weights: ContextWeights, tol: float = DEFAULT_TOL, **kwargs) -> MeasureReport:
    """Mutual information of contextuality at fixed weights.

    Computed through the equivalence with the divergence minimization; the
    report's method field records the route.
    """
    report = x_fixed(box, weights, tol=tol, **kwargs)
    return MeasureReport(
        value=report.value,
        optimizer=report.optimizer,
        duality_gap=report.duality_gap,
        iterations=report.iterations,
        wall_time_s=report.wall_time_s,
        converged=report.converged,
        method=report.method + "+mutual-information-equivalence",
        trace=report.trace,
    )


def x_max(
    box: Box,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
    method: str = "auto",
    dim_cap: int = DEFAULT_DIM_CAP,
    outer_improve_tol: float = 1e-7,
    outer_window: int = 200,
    max_outer: int = 2000,
    eta0: float = 4.0,
) -> MeasureReport:
    """Weight-maximized relative entropy of contextuality.

    Multiplicative-weights supergradient ascent over the context simplex;
    each inner solve supplies the supergradient (the per-context divergence
    vector) and a candidate upper bound ``max_c D_c`` at its minimizer.  The
    reported value is the best certified inner value found; no claim is made
    that the supremum is attained.
    """
    require_valid(box)
    require_consistent(box)
    _check_dims(box, dim_cap)
    start = time.perf_counter()
    n = box.hypergraph.n_contexts
    log_w = np.zeros(n)
    best_value = -float("inf")
    best_gap = float("inf")
    best_weights: ContextWeights | None = None
    best_p: np.ndarray | None = None
    upper = float("inf")
    total_inner = 0
    last_improve = 0
    warm: np.ndarray | None = None
    p_sum: np.ndarray | None = None
    problem = _FixedWeightProblem(box, ContextWeights.uniform(n))
    outer = 0
    for outer in range(1, max_outer + 1):
        shifted = log_w - log_w.max()
        w_vec = np.exp(shifted)
        w_vec /= w_vec.sum()
        weights = ContextWeights(w_vec)
        value, p_flat, gap, iters, _, _ = _solve_fixed(
            box, weights, tol, max_iters, method, warm
        )
        total_inner += iters
        warm = p_flat
        p_sum = p_flat.copy() if p_sum is None else p_sum + p_flat
        divergences = problem.divergences(p_flat.reshape(problem.ws.shape))
        finite = divergences[np.isfinite(divergences)]
        if finite.size == n:
            upper = min(upper, float(divergences.max()))
        if value > best_value + outer_improve_tol:
            last_improve = outer
        if value > best_value:
            best_value, best_gap, best_weights, best_p = value, gap, weights, p_flat
        if outer - last_improve >= outer_window:
            break
        if upper - best_value <= outer_improve_tol:
            break
        eta = eta0 / math.sqrt(outer)
        log_w = log_w + eta * np.where(np.isfinite(divergences), divergences, 0.0)
    if p_sum is not None:
        avg = p_sum / p_sum.sum()
        div_avg = problem.divergences(avg.reshape(problem.ws.shape))
        if np.all(np.isfinite(div_avg)):
            upper = min(upper, float(div_avg.max()))
    assert best_weights is not None and best_p is not None
    return MeasureReport(
        value=best_value,
        optimizer=JointDistribution(box.hypergraph, best_p),
        duality_gap=best_gap,
        iterations=total_inner,
        wall_time_s=time.perf_counter() - start,
        converged=best_gap <= tol and outer < max_outer,
        method=f"mw-ascent({method})",
        outer_weights=best_weights,
        outer_gap=max(0.0, upper - best_value) if math.isfinite(upper) else None,
    )


@dataclass(frozen=True)
class EquivalenceReport:
    residual: float
    mutual_information: float
    x_value: float
    measure_report: MeasureReport


def verify_equivalence(
    box: Box,
    weights: ContextWeights,
    tol: float = DEFAULT_TOL,
    report: MeasureReport | None = None,
    **kwargs,
) -> EquivalenceReport:
    """Numerically certify that the mutual-information game value matches X_w.

    From the optimal joint p* build the per-context extensions
    ``ext_c(lambda) = p*(lambda'_c | lambda_c) * g_c(lambda_c)`` and evaluate
    the mutual information directly as
    ``sum_c w_c D(ext_c || sum_c' w_c' ext_c')``; the absolute difference
    from the minimized value is the residual.  Conditionals where
    ``p*(lambda_c) = 0`` are taken uniform (those branches carry no weight).
    """
    if report is None:
        report = x_fixed(box, weights, tol=tol, **kwargs)
    if report.optimizer is None:
        raise InvalidBoxError("equivalence check needs a solver report with a minimizer")
    g = box.hypergraph
    ws = _Workspace(g)
    p_tensor = report.optimizer.probabilities.reshape(ws.shape)
    w = weights.weights
    extensions = []
    active = [ci for ci in range(g.n_contexts) if w[ci] > 0.0]
    for ci in active:
        target = box.context_tensor(ci)
        m = ws.marginal(p_tensor, ci)
        ratio = np.zeros_like(target)
        ok = m > 0.0
        ratio[ok] = target[ok] / m[ok]
        ext = p_tensor * ws.broadcast(ratio, ci)
        leftover = target * (~ok)
        if np.any(leftover > 0.0):
            cell_size = ws.dim // target.size
            ext = ext + np.broadcast_to(
                ws.broadcast(leftover / cell_size, ci), ws.shape
            )
        extensions.append(ext.reshape(-1))
    mixture = np.zeros(ws.dim)
    for ci, ext in zip(active, extensions):
        mixture += w[ci] * ext
    mutual = 0.0
    for ci, ext in zip(active, extensions):
        mutual += w[ci] * relative_entropy(ext, mixture)
    return EquivalenceReport(
        residual=abs(mutual - report.value),
        mutual_information=mutual,
        x_value=report.value,
        measure_report=report,
    )


def _golden_section(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Minimize a unimodal function on [lo, hi] to interval width ``tol``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def x_u_isotropic_reduced(
    reference: Box,
    alpha: float,
    group=None,
    tol: float = 1e-12,
) -> float:
    """Symmetry-reduced X_u for an isotropic family: one-dimensional search.

    For the family ``alpha*ref + (1-alpha)*ref'`` the measure collapses to a
    single binary divergence ``min_a0 chi(alpha, a0)`` over the non-contextual
    interval, so it stays exact for chain sizes far beyond the joint solver.
    """
    from .inequalities import classify_xor, nc_alpha_interval

    if not 0.0 <= alpha <= 1.0:
        raise InvalidBoxError(f"alpha {alpha} outside [0, 1]")
    profile = classify_xor(reference)
    if profile is None:
        raise NotXorBoxError("reduced solver needs an xor-box reference")
    lo, hi = nc_alpha_interval(profile)
    if group is not None:
        from .symmetry import apply

        for gen in group.generators:
            if not apply(gen, reference).allclose(reference, atol=1e-9):
                raise InvalidBoxError("reference is not fixed by the supplied group")

    eps = 1e-15

    def objective(a0: float) -> float:
        return chi(alpha, min(max(a0, eps), 1.0 - eps))

    _, value = _golden_section(objective, lo, hi, tol)
    return max(0.0, value)
