"""Measurement hypergraphs and the boxes compatible with them.

A hypergraph is a finite set of observables, each with a finite output
alphabet, together with a list of contexts (subsets of jointly measurable
observables).  A box assigns one probability distribution per context; a
joint distribution lives on the full product alphabet.  Everything here is
immutable and pure.

Outcome ordering convention (used everywhere, including the file format):
row-major with the first-listed observable most significant.  For a context
``(i, j)`` over binary observables the vector order is ``00, 01, 10, 11``
with ``i``'s value first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    HypergraphMismatchError,
    InconsistentBoxError,
    InvalidBoxError,
    NotXorBoxError,
)

# Absolute tolerance on distribution sums; below-tolerance negatives are
# clamped to zero, anything more negative is rejected (file round-trip rule).
NORMALIZATION_TOL = 1e-9
NEGATIVE_TOL = -1e-12


def probability_vector(values: Iterable[float], *, what: str = "distribution") -> np.ndarray:
    """Coerce ``values`` to a validated probability vector.

    Entries in ``[-1e-12, 0]`` are clamped to zero; entries below that or a
    sum off by more than 1e-9 raise :class:`InvalidBoxError`.
    """
    vec = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise InvalidBoxError(f"{what} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(vec)):
        raise InvalidBoxError(f"{what} contains non-finite entries")
    if np.any(vec < NEGATIVE_TOL):
        raise InvalidBoxError(f"{what} has negative entries below {NEGATIVE_TOL}")
    vec = np.where(vec < 0.0, 0.0, vec)
    total = float(vec.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise InvalidBoxError(f"{what} sums to {total!r}, expected 1 within {NORMALIZATION_TOL}")
    vec.flags.writeable = False
    return vec


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Hypergraph:
    """Observables with finite alphabets plus an ordered list of contexts.

    ``observables`` is an ordered sequence of ``(name, cardinality)`` pairs;
    ``contexts`` lists observable indices in the order that fixes each
    context's outcome layout.
    """

    observables: tuple[tuple[str, int], ...]
    contexts: tuple[tuple[int, ...], ...]

    def __init__(self, observables, contexts):
        object.__setattr__(
            self,
            "observables",
            tuple((str(name), int(card)) for name, card in observables),
        )
        object.__setattr__(self, "contexts", tuple(tuple(int(i) for i in c) for c in contexts))
        self._validate()

    def _validate(self) -> None:
        k = len(self.observables)
        if k == 0:
            raise InvalidBoxError("hypergraph needs at least one observable")
        names = [name for name, _ in self.observables]
        if len(set(names)) != k:
            raise InvalidBoxError("observable names must be unique")
        for name, card in self.observables:
            if card < 2:
                raise InvalidBoxError(f"observable {name!r} has cardinality {card} < 2")
        if not self.contexts:
            raise InvalidBoxError("hypergraph needs at least one context")
        seen_sets: set[frozenset[int]] = set()
        covered: set[int] = set()
        for c in self.contexts:
            if not c:
                raise InvalidBoxError("empty context")
            if any(i < 0 or i >= k for i in c):
                raise InvalidBoxError(f"context {c} references an invalid observable index")
            if len(set(c)) != len(c):
                raise InvalidBoxError(f"context {c} repeats an observable")
            key = frozenset(c)
            if key in seen_sets:
                raise InvalidBoxError(f"duplicate context {sorted(c)}")
            seen_sets.add(key)
            covered.update(c)
        if covered != set(range(k)):
            missing = sorted(set(range(k)) - covered)
            raise InvalidBoxError(f"observables {missing} appear in no context")

    @property
    def n_observables(self) -> int:
        return len(self.observables)

    @property
    def n_contexts(self) -> int:
        return len(self.contexts)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.observables)

    @cached_property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(card for _, card in self.observables)

    @cached_property
    def name_to_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    @cached_property
    def context_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(c) for c in self.contexts)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        """Number of contexts each observable belongs to."""
        deg = [0] * self.n_observables
        for c in self.contexts:
            for i in c:
                deg[i] += 1
        return tuple(deg)

    def context_shape(self, ci: int) -> tuple[int, ...]:
        return tuple(self.cardinalities[i] for i in self.contexts[ci])

    def context_dim(self, ci: int) -> int:
        return int(np.prod(self.context_shape(ci)))

    @property
    def joint_shape(self) -> tuple[int, ...]:
        return self.cardinalities

    @property
    def joint_dim(self) -> int:
        return int(np.prod(self.cardinalities, dtype=object))

    def find_context(self, observables: Iterable[int]) -> int:
        """Index of the context equal (as a set) to ``observables``; -1 if absent."""
        key = frozenset(observables)
        for ci, s in enumerate(self.context_sets):
            if s == key:
                return ci
        return -1


@dataclass(frozen=True)
class DeterministicAssignment:
    """One fixed output per observable; the vertex data of the NC polytope."""

    outputs: tuple[int, ...]

    def __init__(self, outputs):
        object.__setattr__(self, "outputs", tuple(int(v) for v in outputs))

    def validate_for(self, hypergraph: Hypergraph) -> None:
        cards = hypergraph.cardinalities
        if len(self.outputs) != len(cards):
            raise InvalidBoxError(
                f"assignment has {len(self.outputs)} outputs for {len(cards)} observables"
            )
        for i, (v, d) in enumerate(zip(self.outputs, cards)):
            if not 0 <= v < d:
                raise InvalidBoxError(f"output {v} outside alphabet of observable {i}")


@dataclass(frozen=True, eq=False)
class Box:
    """One probability vector per context of a hypergraph.

    The constructor only fixes the structure (one float vector per context);
    normalization and shape are checked by :func:`validate_box`, which is
    report-style so that broken inputs (e.g. from files) can be diagnosed.
    """

    hypergraph: Hypergraph
    distributions: tuple[np.ndarray, ...]

    def __init__(self, hypergraph: Hypergraph, distributions: Sequence):
        object.__setattr__(self, "hypergraph", hypergraph)
        dists = tuple(_frozen_array(d) for d in distributions)
        if len(dists) != hypergraph.n_contexts:
            raise InvalidBoxError(
                f"box needs {hypergraph.n_contexts} distributions, got {len(dists)}"
            )
        object.__setattr__(self, "distributions", dists)

    def context_tensor(self, ci: int) -> np.ndarray:
        return self.distributions[ci].reshape(self.hypergraph.context_shape(ci))

    def allclose(self, other: "Box", atol: float = 1e-12) -> bool:
        if self.hypergraph != other.hypergraph:
            return False
        return all(
            a.shape == b.shape and np.allclose(a, b, rtol=0.0, atol=atol)
            for a, b in zip(self.distributions, other.distributions)
        )

    def stacked(self) -> np.ndarray:
        """All context vectors concatenated in context order."""
        return np.concatenate([d.ravel() for d in self.distributions])


@dataclass(frozen=True)
class BoxIssue:
    context: int | None
    kind: str
    detail: str


@dataclass(frozen=True)
class BoxValidationReport:
    ok: bool
    issues: tuple[BoxIssue, ...]


def validate_box(box: Box) -> BoxValidationReport:
    """Report-style check of the Box invariants (shape, nonnegativity, sums)."""
    issues: list[BoxIssue] = []
    for ci in range(box.hypergraph.n_contexts):
        vec = box.distributions[ci]
        expected = box.hypergraph.context_dim(ci)
        if vec.ndim != 1 or vec.size != expected:
            issues.append(
                BoxIssue(ci, "shape", f"length {vec.size}, expected {expected}")
            )
            continue
        if not np.all(np.isfinite(vec)):
            issues.append(BoxIssue(ci, "nan", "non-finite entries"))
            continue
        if np.any(vec < NEGATIVE_TOL):
            issues.append(
                BoxIssue(ci, "negative", f"min entry {float(vec.min())!r} below {NEGATIVE_TOL}")
            )
        total = float(vec.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            issues.append(
                BoxIssue(ci, "normalization", f"sums to {total!r}")
            )
    return BoxValidationReport(ok=not issues, issues=tuple(issues))


def require_valid(box: Box) -> None:
    report = validate_box(box)
    if not report.ok:
        lines = "; ".join(
            f"context {i.context}: {i.kind} ({i.detail})" for i in report.issues
        )
        raise InvalidBoxError(f"invalid box: {lines}")


def _context_subset_marginal(box: Box, ci: int, subset: Sequence[int]) -> np.ndarray:
    """Marginal of context ``ci``'s distribution onto ``subset`` (given order)."""
    ctx = box.hypergraph.contexts[ci]
    tensor = box.context_tensor(ci)
    keep = [ctx.index(i) for i in subset]
    other = tuple(a for a in range(len(ctx)) if a not in keep)
    marg = tensor.sum(axis=other) if other else tensor
    kept_sorted = sorted(keep)
    perm = tuple(kept_sorted.index(a) for a in keep)
    return np.transpose(marg, perm).reshape(-1)


@dataclass(frozen=True)
class ConsistencyViolation:
    context_a: int
    context_b: int
    shared: tuple[int, ...]
    distance: float


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    max_deviation: float
    violations: tuple[ConsistencyViolation, ...]


def check_consistency(box: Box, tol: float = 1e-9) -> ConsistencyReport:
    """Pairwise shared-marginal agreement in total-variation distance.

    True iff for every pair of contexts with non-empty intersection the two
    marginals on the shared observables agree within ``tol``.
    """
    require_valid(box)
    g = box.hypergraph
    worst = 0.0
    violations: list[ConsistencyViolation] = []
    for a, b in itertools.combinations(range(g.n_contexts), 2):
        shared = tuple(sorted(g.context_sets[a] & g.context_sets[b]))
        if not shared:
            continue
        ma = _context_subset_marginal(box, a, shared)
        mb = _context_subset_marginal(box, b, shared)
        tv = 0.5 * float(np.abs(ma - mb).sum())
        worst = max(worst, tv)
        if tv > tol:
            violations.append(ConsistencyViolation(a, b, shared, tv))
    return ConsistencyReport(
        consistent=not violations, max_deviation=worst, violations=tuple(violations)
    )


def require_consistent(box: Box, tol: float = 1e-7) -> None:
    report = check_consistency(box, tol)
    if not report.consistent:
        raise InconsistentBoxError(
            f"box is inconsistent (max shared-marginal TV {report.max_deviation:.3e})"
        )


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability vector over the full product alphabet of a hypergraph."""

    hypergraph: Hypergraph
    probabilities: np.ndarray

    def __init__(self, hypergraph: Hypergraph, probabilities):
        object.__setattr__(self, "hypergraph", hypergraph)
        vec = probability_vector(probabilities, what="joint distribution")
        if vec.size != hypergraph.joint_dim:
            raise InvalidBoxError(
                f"joint has dimension {vec.size}, expected {hypergraph.joint_dim}"
            )
        object.__setattr__(self, "probabilities", vec)

    def tensor(self) -> np.ndarray:
        return self.probabilities.reshape(self.hypergraph.joint_shape)

    def allclose(self, other: "JointDistribution", atol: float = 1e-12) -> bool:
        return self.hypergraph == other.hypergraph and np.allclose(
            self.probabilities, other.probabilities, rtol=0.0, atol=atol
        )


def marginal(joint: JointDistribution, subset: Sequence[int]) -> np.ndarray:
    """Exact marginal of ``joint`` on ``subset``, row-major in the given order."""
    subset = tuple(int(i) for i in subset)
    if not subset:
        raise InvalidBoxError("marginal subset must be non-empty")
    k = joint.hypergraph.n_observables
    if len(set(subset)) != len(subset) or any(i < 0 or i >= k for i in subset):
        raise InvalidBoxError(f"invalid marginal subset {subset}")
    tensor = joint.tensor()
    other = tuple(a for a in range(k) if a not in subset)
    marg = tensor.sum(axis=other) if other else tensor
    kept_sorted = sorted(subset)
    perm = tuple(kept_sorted.index(i) for i in subset)
    return np.transpose(marg, perm).reshape(-1)


def box_of_joint(joint: JointDistribution, hypergraph: Hypergraph | None = None) -> Box:
    """The (non-contextual, hence consistent) box of marginals of ``joint``."""
    g = hypergraph if hypergraph is not None else joint.hypergraph
    if g != joint.hypergraph:
        raise HypergraphMismatchError("joint is not defined on the given hypergraph")
    return Box(g, [marginal(joint, c) for c in g.contexts])


def deterministic_joint(assignment: DeterministicAssignment, g: Hypergraph) -> JointDistribution:
    assignment.validate_for(g)
    vec = np.zeros(g.joint_dim)
    vec[np.ravel_multi_index(assignment.outputs, g.joint_shape)] = 1.0
    return JointDistribution(g, vec)


def deterministic_box(assignment: DeterministicAssignment, g: Hypergraph) -> Box:
    """The box whose every context distribution is the point mass induced by ``assignment``."""
    assignment.validate_for(g)
    dists = []
    for ci, ctx in enumerate(g.contexts):
        vec = np.zeros(g.context_dim(ci))
        idx = np.ravel_multi_index(
            tuple(assignment.outputs[i] for i in ctx), g.context_shape(ci)
        )
        vec[idx] = 1.0
        dists.append(vec)
    return Box(g, dists)


def mix(b1: Box, b2: Box, p: float) -> Box:
    """Context-wise convex combination ``p*b1 + (1-p)*b2``."""
    if b1.hypergraph != b2.hypergraph:
        raise HypergraphMismatchError("mix requires identical hypergraphs")
    if not 0.0 <= p <= 1.0:
        raise InvalidBoxError(f"mixing weight {p} outside [0, 1]")
    return Box(
        b1.hypergraph,
        [p * d1 + (1.0 - p) * d2 for d1, d2 in zip(b1.distributions, b2.distributions)],
    )


def parity_distribution(m: int, parity: int) -> np.ndarray:
    """Uniform distribution over m-bit strings of the given parity (0 or 1)."""
    if m < 1:
        raise InvalidBoxError("parity distribution needs m >= 1")
    idx = np.arange(2**m)
    bits = np.zeros(2**m, dtype=int)
    for b in range(m):
        bits += (idx >> b) & 1
    vec = np.where(bits % 2 == parity, 2.0 ** (1 - m), 0.0)
    return vec


def _parity_of_context(box: Box, ci: int, tol: float = 1e-9) -> int | None:
    """0/1 if the context distribution is exactly P_even/P_odd, else None."""
    ctx = box.hypergraph.contexts[ci]
    if any(box.hypergraph.cardinalities[i] != 2 for i in ctx):
        return None
    vec = box.distributions[ci]
    m = len(ctx)
    if vec.size != 2**m:
        return None
    for parity in (0, 1):
        if np.allclose(vec, parity_distribution(m, parity), rtol=0.0, atol=tol):
            return parity
    return None


def opposite(box: Box) -> Box:
    """Swap P_even and P_odd on every context of an xor-box."""
    require_valid(box)
    dists = []
    for ci in range(box.hypergraph.n_contexts):
        parity = _parity_of_context(box, ci)
        if parity is None:
            raise NotXorBoxError(
                f"context {ci} is not a parity-class distribution; opposite() needs an xor-box"
            )
        m = len(box.hypergraph.contexts[ci])
        dists.append(parity_distribution(m, 1 - parity))
    return Box(box.hypergraph, dists)


def _merged_observables(g1: Hypergraph, g2: Hypergraph) -> tuple[tuple[str, int], ...]:
    """Union observable list; name collisions get deterministic '#1'/'#2' suffixes."""
    collisions = set(g1.names) & set(g2.names)
    obs1 = [
        (f"{name}#1" if name in collisions else name, card) for name, card in g1.observables
    ]
    obs2 = [
        (f"{name}#2" if name in collisions else name, card) for name, card in g2.observables
    ]
    return tuple(obs1 + obs2)


def direct_sum(b1: Box, b2: Box) -> Box:
    """Disjoint union of hypergraphs; contexts concatenated, b1's first."""
    g1, g2 = b1.hypergraph, b2.hypergraph
    off = g1.n_observables
    g = Hypergraph(
        _merged_observables(g1, g2),
        tuple(g1.contexts) + tuple(tuple(i + off for i in c) for c in g2.contexts),
    )
    return Box(g, list(b1.distributions) + list(b2.distributions))


def tensor(b1: Box, b2: Box) -> Box:
    """Tensor product: contexts are all unions of context pairs, product distributions."""
    g1, g2 = b1.hypergraph, b2.hypergraph
    off = g1.n_observables
    contexts = []
    dists = []
    for c1, d1 in zip(g1.contexts, b1.distributions):
        for c2, d2 in zip(g2.contexts, b2.distributions):
            contexts.append(tuple(c1) + tuple(i + off for i in c2))
            dists.append(np.kron(d1, d2))
    g = Hypergraph(_merged_observables(g1, g2), contexts)
    return Box(g, dists)


ChannelMixture = Sequence[tuple[float, Sequence[np.ndarray]]]


def apply_independent_channels(box: Box, mixture: ChannelMixture) -> Box:
    """Apply a probabilistic mixture of independent per-observable channels.

    Each mixture term is ``(weight, [T_0, ..., T_{k-1}])`` where ``T_i`` is a
    column-stochastic matrix on observable i's alphabet (``T[y, x] = P(y|x)``).
    Such maps are linear, preserve consistency, and map non-contextual boxes
    to non-contextual boxes.
    """
    require_valid(box)
    g = box.hypergraph
    weights = np.array([w for w, _ in mixture], dtype=float)
    if np.any(weights < -1e-12) or abs(weights.sum() - 1.0) > 1e-9:
        raise InvalidBoxError("channel mixture weights must form a probability vector")
    for _, mats in mixture:
        if len(mats) != g.n_observables:
            raise InvalidBoxError("each mixture term needs one channel per observable")
        for i, t in enumerate(mats):
            t = np.asarray(t, dtype=float)
            d = g.cardinalities[i]
            if t.shape != (d, d):
                raise InvalidBoxError(f"channel for observable {i} has shape {t.shape}")
            if np.any(t < -1e-12) or not np.allclose(t.sum(axis=0), 1.0, atol=1e-9):
                raise InvalidBoxError(f"channel for observable {i} is not column-stochastic")
    new_dists = [np.zeros_like(d) for d in box.distributions]
    for w, mats in mixture:
        for ci, ctx in enumerate(g.contexts):
            t = box.context_tensor(ci)
            for axis, i in enumerate(ctx):
                t = np.moveaxis(
                    np.tensordot(np.asarray(mats[i], dtype=float), t, axes=([1], [axis])),
                    0,
                    axis,
                )
            new_dists[ci] = new_dists[ci] + w * t.reshape(-1)
    return Box(g, new_dists)


def apply_channels_to_joint(
    joint: JointDistribution, mixture: ChannelMixture
) -> JointDistribution:
    """Same channel action on a full joint distribution."""
    g = joint.hypergraph
    out = np.zeros(g.joint_dim)
    for w, mats in mixture:
        t = joint.tensor()
        for axis in range(g.n_observables):
            t = np.moveaxis(
                np.tensordot(np.asarray(mats[axis], dtype=float), t, axes=([1], [axis])),
                0,
                axis,
            )
        out = out + w * t.reshape(-1)
    return JointDistribution(g, out)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
