"""Hypergraph automorphisms, finite group closure, and twirling.

A group element is an observable permutation composed with per-observable
output relabelings (bit flips, in the binary case).  Such maps send contexts
to contexts, preserve consistency, and map non-contextual boxes to
non-contextual boxes; averaging a box over a finite group of its
automorphisms (twirling) projects onto the invariant family.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .boxes import Box, Hypergraph, require_valid
from .errors import CapExceededError, HypergraphMismatchError, InvalidBoxError

DEFAULT_GROUP_CAP = 2_000_000


@dataclass(frozen=True)
class GroupElement:
    """Observable permutation plus per-observable output relabelings.

    ``perm[i]`` is the image observable of source observable ``i``;
    ``relabelings[i]`` maps the source output ``v`` to the output reported at
    ``perm[i]``.  The permutation must map every context onto a context.
    """

    hypergraph: Hypergraph
    perm: tuple[int, ...]
    relabelings: tuple[tuple[int, ...], ...]

    def __init__(self, hypergraph, perm, relabelings):
        object.__setattr__(self, "hypergraph", hypergraph)
        object.__setattr__(self, "perm", tuple(int(i) for i in perm))
        object.__setattr__(
            self, "relabelings", tuple(tuple(int(v) for v in r) for r in relabelings)
        )
        self._validate()

    def _validate(self) -> None:
        g = self.hypergraph
        k = g.n_observables
        if sorted(self.perm) != list(range(k)):
            raise InvalidBoxError(f"{self.perm} is not a permutation of {k} observables")
        cards = g.cardinalities
        if len(self.relabelings) != k:
            raise InvalidBoxError("need one output relabeling per observable")
        for i, r in enumerate(self.relabelings):
            if cards[self.perm[i]] != cards[i]:
                raise InvalidBoxError(
                    f"permutation sends observable {i} (d={cards[i]}) to "
                    f"{self.perm[i]} (d={cards[self.perm[i]]})"
                )
            if sorted(r) != list(range(cards[i])):
                raise InvalidBoxError(f"relabeling {r} is not a bijection on {cards[i]} outputs")
        for c in g.contexts:
            image = frozenset(self.perm[i] for i in c)
            if g.find_context(image) < 0:
                raise InvalidBoxError(
                    f"permutation maps context {c} to non-context {sorted(image)}"
                )

    def key(self) -> tuple:
        return (self.perm, self.relabelings)

    @cached_property
    def context_image(self) -> tuple[int, ...]:
        """Index of the image context of each source context."""
        g = self.hypergraph
        return tuple(
            g.find_context(frozenset(self.perm[i] for i in c)) for c in g.contexts
        )

    @cached_property
    def index_maps(self) -> tuple[np.ndarray, ...]:
        """Per source context t: array src with new[t'][y] = old[t][src_t[y]].

        ``t'`` is ``context_image[t]``; ``src_t[y]`` is the flat source
        outcome obtained by undoing the relabelings and positions.
        """
        g = self.hypergraph
        inverse = [np.argsort(np.asarray(r)) for r in self.relabelings]
        maps = []
        for t, ctx in enumerate(g.contexts):
            tprime = self.context_image[t]
            tgt_ctx = g.contexts[tprime]
            tgt_shape = g.context_shape(tprime)
            src_shape = g.context_shape(t)
            ys = np.unravel_index(np.arange(int(np.prod(tgt_shape))), tgt_shape)
            xs = []
            for a, i in enumerate(ctx):
                q = tgt_ctx.index(self.perm[i])
                xs.append(inverse[i][ys[q]])
            maps.append(np.ravel_multi_index(tuple(xs), src_shape))
        return tuple(maps)


def identity_element(g: Hypergraph) -> GroupElement:
    return GroupElement(
        g, tuple(range(g.n_observables)), tuple(tuple(range(d)) for d in g.cardinalities)
    )


def compose(second: GroupElement, first: GroupElement) -> GroupElement:
    """Apply ``first``, then ``second``."""
    if second.hypergraph != first.hypergraph:
        raise HypergraphMismatchError("cannot compose elements on different hypergraphs")
    perm = tuple(second.perm[first.perm[i]] for i in range(len(first.perm)))
    relabelings = tuple(
        tuple(second.relabelings[first.perm[i]][v] for v in first.relabelings[i])
        for i in range(len(first.perm))
    )
    return GroupElement(first.hypergraph, perm, relabelings)


def inverse(element: GroupElement) -> GroupElement:
    k = len(element.perm)
    inv_perm = [0] * k
    for i, j in enumerate(element.perm):
        inv_perm[j] = i
    relabelings = []
    for j in range(k):
        i = inv_perm[j]
        relabelings.append(tuple(np.argsort(np.asarray(element.relabelings[i]))))
    return GroupElement(element.hypergraph, tuple(inv_perm), tuple(relabelings))


def apply(element: GroupElement, box: Box) -> Box:
    """Relabeled box: contexts permuted, outcome labels rewritten."""
    if element.hypergraph != box.hypergraph:
        raise HypergraphMismatchError("element and box live on different hypergraphs")
    require_valid(box)
    new_dists: list[np.ndarray | None] = [None] * box.hypergraph.n_contexts
    for t, src in enumerate(element.index_maps):
        new_dists[element.context_image[t]] = box.distributions[t][src]
    return Box(box.hypergraph, new_dists)


@dataclass(frozen=True)
class TwirlGroup:
    """A finite group of automorphisms, closed under composition and inverse."""

    hypergraph: Hypergraph
    generators: tuple[GroupElement, ...]
    elements: tuple[GroupElement, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def _stack_offsets(self) -> np.ndarray:
        dims = [self.hypergraph.context_dim(ci) for ci in range(self.hypergraph.n_contexts)]
        return np.concatenate([[0], np.cumsum(dims)])

    @cached_property
    def transfer_matrix(self) -> np.ndarray:
        """Linear map on stacked context vectors implementing the twirl."""
        offsets = self._stack_offsets
        total = int(offsets[-1])
        t_mat = np.zeros((total, total))
        rows = np.arange(total)
        for element in self.elements:
            src_flat = np.empty(total, dtype=np.int64)
            for t, src in enumerate(element.index_maps):
                tprime = element.context_image[t]
                src_flat[offsets[tprime] : offsets[tprime + 1]] = offsets[t] + src
            t_mat[rows, src_flat] += 1.0 / self.order
        return t_mat

    def unstack(self, stacked: np.ndarray) -> list[np.ndarray]:
        offsets = self._stack_offsets
        return [
            stacked[offsets[ci] : offsets[ci + 1]]
            for ci in range(self.hypergraph.n_contexts)
        ]


def generate_group(
    generators: list[GroupElement] | tuple[GroupElement, ...],
    cap: int = DEFAULT_GROUP_CAP,
) -> TwirlGroup:
    """Breadth-first closure of the generators under composition.

    Fails with :class:`CapExceededError` if the order would exceed ``cap``.
    Inverses come for free: in a finite closed monoid of bijections every
    element's powers cycle back through its inverse.
    """
    if not generators:
        raise InvalidBoxError("need at least one generator (use the identity for trivial groups)")
    g = generators[0].hypergraph
    for gen in generators:
        if gen.hypergraph != g:
            raise HypergraphMismatchError("all generators must share one hypergraph")
    ident = identity_element(g)
    elements: dict[tuple, GroupElement] = {ident.key(): ident}
    frontier = [ident]
    while frontier:
        new_frontier = []
        for element in frontier:
            for gen in generators:
                candidate = compose(gen, element)
                key = candidate.key()
                if key not in elements:
                    if len(elements) >= cap:
                        raise CapExceededError(f"group closure exceeded cap {cap}")
                    elements[key] = candidate
                    new_frontier.append(candidate)
        frontier = new_frontier
    return TwirlGroup(g, tuple(generators), tuple(elements.values()))


def twirl(group: TwirlGroup, box: Box) -> Box:
    """Uniform average of ``apply(f, box)`` over all group elements."""
    if group.hypergraph != box.hypergraph:
        raise HypergraphMismatchError("group and box live on different hypergraphs")
    require_valid(box)
    stacked = group.transfer_matrix @ box.stacked()
    return Box(box.hypergraph, group.unstack(stacked))


def _binary_flip_element(
    g: Hypergraph, perm: tuple[int, ...], flipped_targets: set[int]
) -> GroupElement:
    """Element from a permutation plus bit flips named at *target* observables."""
    relabelings = []
    for i in range(g.n_observables):
        d = g.cardinalities[i]
        if perm[i] in flipped_targets:
            if d != 2:
                raise InvalidBoxError("bit flips need binary observables")
            relabelings.append((1, 0))
        else:
            relabelings.append(tuple(range(d)))
    return GroupElement(g, perm, tuple(relabelings))


def _perm_from_pairs(k: int, pairs: list[tuple[int, int]]) -> tuple[int, ...]:
    perm = list(range(k))
    for a, b in pairs:
        perm[a], perm[b] = perm[b], perm[a]
    return tuple(perm)


def _pm_generators() -> tuple[GroupElement, ...]:
    from .builders import pm_hypergraph

    g = pm_hypergraph()
    gens = []
    # h1..h6: the 3! permutations of the three rows.
    for sigma in itertools.permutations(range(3)):
        perm = tuple(3 * sigma[r] + c for r in range(3) for c in range(3))
        gens.append(_binary_flip_element(g, perm, set()))
    # h7: swap of the two solid columns.
    gens.append(_binary_flip_element(g, _perm_from_pairs(9, [(0, 1), (3, 4), (6, 7)]), set()))
    # h8: reflection about the diagonal (transpose) with a bit flip on A9.
    transpose = tuple(3 * (i % 3) + i // 3 for i in range(9))
    gens.append(_binary_flip_element(g, transpose, {8}))
    return tuple(gens)


def _mermin_generators() -> tuple[GroupElement, ...]:
    from .builders import mermin_hypergraph

    g = mermin_hypergraph()
    # Indices: A,B,C,D,E = 0..4 and a,b,c,d,e = 5..9.
    reflections = [
        ([(1, 4), (2, 3), (6, 9), (7, 8)], set()),      # about the A-a axis
        ([(0, 4), (1, 3), (5, 9), (6, 8)], {7}),        # about C-c, flip on c
        ([(0, 1), (2, 4), (5, 6), (7, 9)], {8}),        # about D-d, flip on d
        ([(0, 3), (1, 2), (5, 8), (6, 7)], {4}),        # about E-e, flip on E
        ([(0, 2), (3, 4), (5, 7), (8, 9)], {1}),        # about B-b, flip on B
    ]
    gens = [
        _binary_flip_element(g, _perm_from_pairs(10, pairs), flips)
        for pairs, flips in reflections
    ]
    # Bit flips on the five triangles of the star.
    ident = tuple(range(10))
    for triangle in ({0, 7, 8}, {1, 8, 9}, {2, 5, 9}, {3, 5, 6}, {4, 6, 7}):
        gens.append(_binary_flip_element(g, ident, triangle))
    return tuple(gens)


def _chain_generators(n: int) -> tuple[GroupElement, ...]:
    from .builders import chain_hypergraph

    g = chain_hypergraph(n)
    gens = []
    for j in range(1, n):
        perm = tuple((i + j) % n for i in range(n))
        gens.append(_binary_flip_element(g, perm, set(range(j))))
    return tuple(gens)


def _kcbs_generators() -> tuple[GroupElement, ...]:
    from .builders import chain_hypergraph

    g = chain_hypergraph(5)
    rotation = tuple((i + 1) % 5 for i in range(5))
    reflection = tuple((5 - i) % 5 for i in range(5))
    return (
        _binary_flip_element(g, rotation, set()),
        _binary_flip_element(g, reflection, set()),
    )


def builtin_generators(name: str, n: int | None = None) -> tuple[GroupElement, ...]:
    """Generator sets for the named boxes: PM, M, CH(n), KCBS."""
    base = name.strip().upper()
    if base == "PM":
        return _pm_generators()
    if base == "M":
        return _mermin_generators()
    if base == "CH":
        if n is None or n < 3:
            raise InvalidBoxError("CH generators need n >= 3")
        return _chain_generators(n)
    if base == "KCBS":
        return _kcbs_generators()
    raise InvalidBoxError(f"no builtin generators named {name!r}")


def builtin_group(name: str, n: int | None = None, cap: int = DEFAULT_GROUP_CAP) -> TwirlGroup:
    return generate_group(list(builtin_generators(name, n)), cap=cap)


@dataclass(frozen=True)
class InvariantSetCheck:
    ok: bool
    samples: int
    max_idempotence_error: float
    max_invariance_error: float
    counterexample: Box | None


def invariant_set_check(
    group: TwirlGroup, samples: int = 100, seed: int | None = 0, tol: float = 1e-12
) -> InvariantSetCheck:
    """Sampled check that the twirl image equals the invariant set.

    For random consistent boxes b: twirl(twirl(b)) = twirl(b) (idempotence,
    so the image is inside the invariant set and invariant boxes are fixed
    points) and apply(h, twirl(b)) = twirl(b) for every generator h.
    """
    from .sampling import random_consistent_box

    rng = np.random.default_rng(seed)
    worst_idem = 0.0
    worst_inv = 0.0
    for _ in range(samples):
        box = random_consistent_box(group.hypergraph, rng)
        tb = twirl(group, box)
        ttb = twirl(group, tb)
        idem = max(
            float(np.abs(a - b).max()) for a, b in zip(tb.distributions, ttb.distributions)
        )
        worst_idem = max(worst_idem, idem)
        inv = 0.0
        for gen in group.generators:
            moved = apply(gen, tb)
            inv = max(
                inv,
                max(
                    float(np.abs(a - b).max())
                    for a, b in zip(tb.distributions, moved.distributions)
                ),
            )
        worst_inv = max(worst_inv, inv)
        if idem > tol or inv > tol:
            return InvariantSetCheck(False, samples, worst_idem, worst_inv, box)
    return InvariantSetCheck(True, samples, worst_idem, worst_inv, None)


def isotropic_parameter(
    box: Box, reference: Box, group: TwirlGroup, tol: float = 1e-9
) -> float:
    """Mixing weight alpha of a box inside an isotropic family.

    Requires ``box`` to be twirl-invariant within ``tol``; then
    ``alpha = beta_reference(box) / n``.
    """
    from .inequalities import beta

    twirled = twirl(group, box)
    if not twirled.allclose(box, atol=tol):
        raise InvalidBoxError("box is not invariant under the reference twirling group")
    return beta(reference, box) / box.hypergraph.n_contexts
