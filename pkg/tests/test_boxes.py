"""Box core: validation, consistency, marginals, and composition operators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import contextuality as cx
from contextuality.boxes import parity_distribution
from contextuality.sampling import random_joint

EVEN2 = np.array([0.5, 0.0, 0.0, 0.5])
ODD2 = np.array([0.0, 0.5, 0.5, 0.0])


def two_context_hypergraph():
    return cx.Hypergraph([("A1", 2), ("A2", 2), ("A3", 2)], [(0, 1), (1, 2)])


class TestHypergraph:
    def test_basic_properties(self):
        g = cx.pr_box().hypergraph
        assert g.n_observables == 4
        assert g.n_contexts == 4
        assert g.cardinalities == (2, 2, 2, 2)
        assert g.degrees == (2, 2, 2, 2)
        assert g.joint_dim == 16

    def test_rejects_bad_context_index(self):
        with pytest.raises(cx.InvalidBoxError):
            cx.Hypergraph([("A", 2), ("B", 2)], [(0, 2)])

    def test_rejects_duplicate_context_sets(self):
        with pytest.raises(cx.InvalidBoxError):
            cx.Hypergraph([("A", 2), ("B", 2)], [(0, 1), (1, 0)])

    def test_rejects_uncovered_observable(self):
        with pytest.raises(cx.InvalidBoxError):
            cx.Hypergraph([("A", 2), ("B", 2), ("C", 2)], [(0, 1)])

    def test_rejects_repeated_observable_in_context(self):
        with pytest.raises(cx.InvalidBoxError):
            cx.Hypergraph([("A", 2), ("B", 2)], [(0, 0), (0, 1)])

    def test_rejects_cardinality_below_two(self):
        with pytest.raises(cx.InvalidBoxError):
            cx.Hypergraph([("A", 1), ("B", 2)], [(0, 1)])


class TestValidateBox:
    def test_builtin_pr_is_valid(self, pr):
        assert cx.validate_box(pr).ok

    def test_scaled_distribution_reports_normalization(self, pr):
        bad = cx.Box(pr.hypergraph, [2.0 * pr.distributions[0], *pr.distributions[1:]])
        report = cx.validate_box(bad)
        assert not report.ok
        assert [i.kind for i in report.issues] == ["normalization"]
        assert report.issues[0].context == 0

    def test_wrong_length_reports_shape(self, pr):
        dists = list(pr.distributions)
        dists[2] = np.array([0.5, 0.5])
        report = cx.validate_box(cx.Box(pr.hypergraph, dists))
        assert not report.ok
        assert report.issues[0].kind == "shape"
        assert report.issues[0].context == 2


class TestConsistency:
    def test_pr_consistent(self, pr):
        assert cx.check_consistency(pr, 1e-9).consistent

    def test_pm_consistent(self, pm):
        assert cx.check_consistency(pm, 1e-9).consistent

    def test_point_mass_context_breaks_consistency(self, pr):
        # Context 0 becomes the point mass on (0,0): observable A1's marginal
        # is (1, 0) there but (1/2, 1/2) in its other context, so TV = 1/2.
        dists = list(pr.distributions)
        dists[0] = np.array([1.0, 0.0, 0.0, 0.0])
        report = cx.check_consistency(cx.Box(pr.hypergraph, dists), 1e-9)
        assert not report.consistent
        assert report.max_deviation == pytest.approx(0.5, abs=1e-12)


class TestMarginal:
    def test_uniform_joint_single_observable(self):
        g = cx.Hypergraph([("A1", 2), ("A2", 2)], [(0, 1)])
        j = cx.JointDistribution(g, np.full(4, 0.25))
        assert np.allclose(cx.marginal(j, [0]), [0.5, 0.5])

    def test_point_mass_subset(self):
        g = two_context_hypergraph()
        vec = np.zeros(8)
        vec[np.ravel_multi_index((1, 0, 1), (2, 2, 2))] = 1.0
        j = cx.JointDistribution(g, vec)
        out = cx.marginal(j, [0, 2])
        assert np.allclose(out, [0, 0, 0, 1])  # point mass on (1, 1)

    def test_ghz_style_mixture(self):
        g = two_context_hypergraph()
        vec = np.zeros(8)
        vec[0] = 0.5
        vec[7] = 0.5
        j = cx.JointDistribution(g, vec)
        out = cx.marginal(j, [0, 1])
        assert np.allclose(out, [0.5, 0, 0, 0.5])

    def test_empty_subset_rejected(self):
        g = two_context_hypergraph()
        j = cx.JointDistribution(g, np.full(8, 0.125))
        with pytest.raises(cx.InvalidBoxError):
            cx.marginal(j, [])

    def test_order_follows_subset(self):
        g = two_context_hypergraph()
        vec = np.zeros(8)
        vec[np.ravel_multi_index((1, 0, 0), (2, 2, 2))] = 1.0
        j = cx.JointDistribution(g, vec)
        assert np.allclose(cx.marginal(j, [0, 1]), [0, 0, 1, 0])
        assert np.allclose(cx.marginal(j, [1, 0]), [0, 1, 0, 0])


class TestBoxOfJoint:
    def test_contexts_equal_marginals_exactly(self, rng):
        g = cx.pm_box().hypergraph
        j = random_joint(g, rng)
        box = cx.box_of_joint(j)
        for ci, ctx in enumerate(g.contexts):
            assert np.array_equal(box.distributions[ci], cx.marginal(j, ctx))

    def test_always_consistent(self, rng):
        g = cx.chain_box(6).hypergraph
        for _ in range(5):
            box = cx.box_of_joint(random_joint(g, rng))
            assert cx.check_consistency(box, 1e-12).consistent

    def test_polytope_membership_cross_module(self, rng):
        g = cx.pr_box().hypergraph
        box = cx.box_of_joint(random_joint(g, rng))
        assert cx.is_noncontextual(box)


class TestDeterministicBox:
    def test_all_zeros_on_pr(self, pr):
        box = cx.deterministic_box(cx.DeterministicAssignment([0, 0, 0, 0]), pr.hypergraph)
        for d in box.distributions:
            assert np.allclose(d, [1, 0, 0, 0])

    def test_all_ones(self, pr):
        box = cx.deterministic_box(cx.DeterministicAssignment([1, 1, 1, 1]), pr.hypergraph)
        for d in box.distributions:
            assert np.allclose(d, [0, 0, 0, 1])

    def test_alternating_assignment_on_chain4(self, pr):
        box = cx.deterministic_box(cx.DeterministicAssignment([0, 1, 0, 1]), pr.hypergraph)
        expected = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0]]
        for d, e in zip(box.distributions, expected):
            assert np.allclose(d, e)

    def test_assignment_out_of_alphabet(self, pr):
        with pytest.raises(cx.InvalidBoxError):
            cx.deterministic_box(cx.DeterministicAssignment([0, 0, 0, 2]), pr.hypergraph)


class TestMix:
    def test_half_mix_of_pr_and_opposite_is_maximally_mixed(self, pr):
        mixed = cx.mix(pr, cx.opposite(pr), 0.5)
        for d in mixed.distributions:
            assert np.allclose(d, 0.25)

    def test_identity_case(self, pr):
        assert cx.mix(pr, cx.opposite(pr), 1.0).allclose(pr)

    def test_quantum_chain5(self):
        alpha = cx.quantum_chain_alpha(5)
        box = cx.mix(cx.chain_box(5), cx.opposite(cx.chain_box(5)), alpha)
        assert box.allclose(cx.chain_box(5, alpha))

    def test_hypergraph_mismatch(self, pr, pm):
        with pytest.raises(cx.HypergraphMismatchError):
            cx.mix(pr, pm, 0.5)

    @given(p=st.floats(0, 1))
    @settings(max_examples=25, deadline=None)
    def test_mix_is_affine_per_context(self, p):
        b1, b2 = cx.pr_box(), cx.opposite(cx.pr_box())
        mixed = cx.mix(b1, b2, p)
        for d, d1, d2 in zip(mixed.distributions, b1.distributions, b2.distributions):
            assert np.allclose(d, p * d1 + (1 - p) * d2, atol=1e-15)


class TestOpposite:
    def test_pr_swaps_parities(self, pr):
        opp = cx.opposite(pr)
        assert np.allclose(opp.distributions[0], ODD2)
        assert np.allclose(opp.distributions[3], EVEN2)

    def test_involution(self, pm):
        assert cx.opposite(cx.opposite(pm)).allclose(pm)

    def test_non_xor_rejected(self, kcbs):
        with pytest.raises(cx.NotXorBoxError):
            cx.opposite(kcbs)

    def test_mixture_rejected(self, pr):
        with pytest.raises(cx.NotXorBoxError):
            cx.opposite(cx.mix(pr, cx.opposite(pr), 0.9))


class TestDirectSum:
    def test_pr_plus_mixed_pr(self, pr):
        ds = cx.direct_sum(pr, cx.pr_box(alpha=0.5))
        assert ds.hypergraph.n_observables == 8
        assert ds.hypergraph.n_contexts == 8
        assert cx.check_consistency(ds).consistent

    def test_self_sum_renames_and_doubles_contexts(self, pm):
        ds = cx.direct_sum(pm, pm)
        assert ds.hypergraph.n_contexts == 12
        assert ds.hypergraph.names[0] == "A1#1"
        assert ds.hypergraph.names[9] == "A1#2"

    def test_det_sum_det_is_det(self, pr):
        d1 = cx.deterministic_box(cx.DeterministicAssignment([0, 1, 0, 1]), pr.hypergraph)
        ds = cx.direct_sum(d1, d1)
        joint_outputs = cx.DeterministicAssignment([0, 1, 0, 1, 0, 1, 0, 1])
        assert ds.allclose(cx.deterministic_box(joint_outputs, ds.hypergraph))


class TestTensor:
    def test_pr_squared_shape(self, pr):
        t = cx.tensor(pr, pr)
        assert t.hypergraph.n_contexts == 16
        assert all(len(c) == 4 for c in t.hypergraph.contexts)
        assert all(d.size == 16 for d in t.distributions)
        assert cx.check_consistency(t).consistent

    def test_context_count_multiplies(self, pm, kcbs):
        assert cx.tensor(pm, kcbs).hypergraph.n_contexts == 30

    def test_product_with_point_mass_context(self, pr):
        g1 = cx.Hypergraph([("Z", 2)], [(0,)])
        point = cx.Box(g1, [np.array([0.0, 1.0])])
        t = cx.tensor(pr, point)
        for d, d_pr in zip(t.distributions, pr.distributions):
            assert np.allclose(d, np.kron(d_pr, [0.0, 1.0]))

    def test_point_masses_tensor(self):
        g1 = cx.Hypergraph([("A", 2), ("B", 2)], [(0, 1)])
        d00 = cx.Box(g1, [np.array([1.0, 0, 0, 0])])
        g2 = cx.Hypergraph([("C", 2), ("D", 2)], [(0, 1)])
        d11 = cx.Box(g2, [np.array([0, 0, 0, 1.0])])
        t = cx.tensor(d00, d11)
        expected = np.zeros(16)
        expected[np.ravel_multi_index((0, 0, 1, 1), (2, 2, 2, 2))] = 1.0
        assert np.allclose(t.distributions[0], expected)


class TestChannels:
    def test_preserves_validity_and_consistency(self, rng, pr):
        from contextuality.sampling import random_channel_mixture

        channel = random_channel_mixture(pr.hypergraph, rng)
        out = cx.apply_independent_channels(pr, channel)
        assert cx.validate_box(out).ok
        assert cx.check_consistency(out, 1e-9).consistent

    def test_identity_channel_is_identity(self, pm):
        eye = [(1.0, [np.eye(2)] * 9)]
        assert cx.apply_independent_channels(pm, eye).allclose(pm)

    def test_commutes_with_box_of_joint(self, rng):
        # Independent channels act on the joint or on the box equivalently.
        from contextuality.boxes import apply_channels_to_joint
        from contextuality.sampling import random_channel_mixture

        g = cx.chain_box(4).hypergraph
        j = random_joint(g, rng)
        channel = random_channel_mixture(g, rng)
        via_joint = cx.box_of_joint(apply_channels_to_joint(j, channel))
        via_box = cx.apply_independent_channels(cx.box_of_joint(j), channel)
        assert via_joint.allclose(via_box, atol=1e-12)


class TestParityDistribution:
    def test_even_two_bits(self):
        assert np.allclose(parity_distribution(2, 0), EVEN2)

    def test_odd_three_bits(self):
        odd = parity_distribution(3, 1)
        assert odd[np.ravel_multi_index((0, 0, 1), (2, 2, 2))] == 0.25
        assert odd[0] == 0.0
        assert odd.sum() == 1.0
