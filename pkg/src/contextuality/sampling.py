"""Seeded random boxes, hypergraphs, and channels for property tests.

Random consistent boxes follow the recipe: draw a Dirichlet-uniform joint
distribution, take its box of marginals (interior of the NC polytope), and
optionally mix with a contextual anchor at a random weight so samples cover
both sides of the polytope boundary.
"""

from __future__ import annotations

import numpy as np

from .boxes import (
    Box,
    ChannelMixture,
    Hypergraph,
    JointDistribution,
    box_of_joint,
    mix,
)


def random_joint(g: Hypergraph, rng: np.random.Generator) -> JointDistribution:
    return JointDistribution(g, rng.dirichlet(np.ones(g.joint_dim)))


def random_noncontextual_box(g: Hypergraph, rng: np.random.Generator) -> Box:
    return box_of_joint(random_joint(g, rng))


def random_consistent_box(
    g: Hypergraph,
    rng: np.random.Generator,
    anchor: Box | None = None,
    anchor_weight: float | None = None,
) -> Box:
    """Dirichlet-joint box, optionally mixed with a contextual anchor box."""
    box = random_noncontextual_box(g, rng)
    if anchor is not None:
        if anchor_weight is None:
            anchor_weight = float(rng.uniform())
        box = mix(anchor, box, anchor_weight)
    return box


def random_stochastic_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    """Column-stochastic d x d matrix with Dirichlet columns."""
    return rng.dirichlet(np.ones(d), size=d).T


def random_channel_mixture(
    g: Hypergraph, rng: np.random.Generator, terms: int = 2
) -> ChannelMixture:
    """Random mixture of independent per-observable channels."""
    weights = rng.dirichlet(np.ones(terms))
    return [
        (
            float(w),
            [random_stochastic_matrix(d, rng) for d in g.cardinalities],
        )
        for w in weights
    ]


def random_hypergraph(
    rng: np.random.Generator,
    n_observables: int,
    n_contexts: int,
    context_size_range: tuple[int, int] = (2, 3),
) -> Hypergraph:
    """Random binary hypergraph covering every observable, no duplicate contexts."""
    lo, hi = context_size_range
    hi = min(hi, n_observables)
    while True:
        seen: set[frozenset[int]] = set()
        contexts: list[tuple[int, ...]] = []
        guard = 0
        while len(contexts) < n_contexts and guard < 200:
            guard += 1
            size = int(rng.integers(lo, hi + 1))
            ctx = tuple(sorted(rng.choice(n_observables, size=size, replace=False).tolist()))
            if frozenset(ctx) in seen:
                continue
            seen.add(frozenset(ctx))
            contexts.append(ctx)
        covered = {i for c in contexts for i in c}
        if len(contexts) == n_contexts and covered == set(range(n_observables)):
            return Hypergraph([(f"O{i}", 2) for i in range(n_observables)], contexts)
