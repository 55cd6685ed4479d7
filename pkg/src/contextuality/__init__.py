"""Contextuality boxes on measurement hypergraphs and their measures.

Core objects: :class:`Hypergraph`, :class:`Box`, :class:`JointDistribution`.
Measures: relative entropy of contextuality (uniform / fixed / maximized),
mutual information of contextuality, and the contextuality cost LP, with
twirling-based symmetry reduction and closed-form golden values.
"""

from .boxes import (
    Box,
    BoxValidationReport,
    ConsistencyReport,
    DeterministicAssignment,
    Hypergraph,
    JointDistribution,
    apply_independent_channels,
    box_of_joint,
    check_consistency,
    deterministic_box,
    direct_sum,
    marginal,
    mix,
    opposite,
    parity_distribution,
    tensor,
    validate_box,
)
from .builders import builtin, chain_box, kcbs_box, mermin_box, parse_builtin_uri, pm_box, pr_box
from .closed_form import (
    binary_entropy,
    chi,
    cost_closed_form,
    quantum_chain_alpha,
    total_chain_x,
    xmax_isotropic,
    xu_chain,
    xu_isotropic,
)
from .errors import (
    BoxFileError,
    CapExceededError,
    ContextualityError,
    HypergraphMismatchError,
    InconsistentBoxError,
    InvalidBoxError,
    NotXorBoxError,
)
from .inequalities import (
    XorBoxProfile,
    beta,
    beta_scalar_identity_check,
    classify_xor,
    nc_alpha_interval,
    verify_bounds_by_lp,
)
from .measures import (
    ContextWeights,
    EquivalenceReport,
    MeasureReport,
    i_fixed,
    relative_entropy,
    verify_equivalence,
    x_fixed,
    x_max,
    x_u,
    x_u_isotropic_reduced,
)
from .polytope import (
    CostReport,
    NCPolytope,
    contextuality_cost,
    enumerate_vertices,
    is_noncontextual,
    optimize_linear,
)
from .boxfile import emit_box, parse_box
from .symmetry import (
    GroupElement,
    TwirlGroup,
    apply,
    builtin_generators,
    builtin_group,
    generate_group,
    identity_element,
    invariant_set_check,
    isotropic_parameter,
    twirl,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "BoxFileError",
    "BoxValidationReport",
    "CapExceededError",
    "ConsistencyReport",
    "ContextWeights",
    "ContextualityError",
    "CostReport",
    "DeterministicAssignment",
    "EquivalenceReport",
    "GroupElement",
    "Hypergraph",
    "HypergraphMismatchError",
    "InconsistentBoxError",
    "InvalidBoxError",
    "JointDistribution",
    "MeasureReport",
    "NCPolytope",
    "NotXorBoxError",
    "TwirlGroup",
    "XorBoxProfile",
    "apply",
    "apply_independent_channels",
    "beta",
    "beta_scalar_identity_check",
    "binary_entropy",
    "box_of_joint",
    "builtin",
    "builtin_generators",
    "builtin_group",
    "chain_box",
    "check_consistency",
    "chi",
    "classify_xor",
    "contextuality_cost",
    "cost_closed_form",
    "deterministic_box",
    "direct_sum",
    "emit_box",
    "enumerate_vertices",
    "generate_group",
    "i_fixed",
    "identity_element",
    "invariant_set_check",
    "is_noncontextual",
    "isotropic_parameter",
    "kcbs_box",
    "marginal",
    "mermin_box",
    "mix",
    "nc_alpha_interval",
    "opposite",
    "optimize_linear",
    "parity_distribution",
    "parse_box",
    "parse_builtin_uri",
    "pm_box",
    "pr_box",
    "quantum_chain_alpha",
    "relative_entropy",
    "tensor",
    "total_chain_x",
    "twirl",
    "validate_box",
    "verify_bounds_by_lp",
    "verify_equivalence",
    "x_fixed",
    "x_max",
    "x_u",
    "x_u_isotropic_reduced",
    "xmax_isotropic",
    "xu_chain",
    "xu_isotropic",
]
