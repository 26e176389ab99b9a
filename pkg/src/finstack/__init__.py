"""Finite-instance checks for group actions, principal bundles, and
quotient-stack descent over the category of finite sets with its canonical
topology."""

from .action import (
    EquivariantMap,
    FinGroup,
    GAction,
    action_from_function,
    check_action,
    check_equivariant,
    check_group,
    group_from_table,
    gset_isomorphism_over,
    klein_four,
    orbits,
    product_action,
    pullback_action,
    regular_action,
    subgroups,
    sym,
    trivial_action,
    zmod,
)
from .bundle import (
    Bundle,
    BundleMorphism,
    NotBundle,
    NotTrivial,
    Trivialization,
    check_bundle_morphism,
    check_trivialization,
    enumerate_bundle_morphisms,
    enumerate_bundles,
    is_locally_trivial,
    is_principal_bundle,
    pullback_bundle,
    torsor_structures,
    trivial_bundle,
)
from .descent import (
    Corpus,
    DescentDatum,
    GluingResult,
    StackReport,
    check_cocycle,
    check_uniqueness,
    glue_morphisms,
    glue_object,
    make_datum,
    pullback_datum,
    restrict_to_datum,
    verify_stack,
)
from .finset import (
    Atom,
    CoequalizerCert,
    Colimit,
    Coproduct,
    FinMap,
    FinSet,
    MapPredicates,
    Product,
    PullbackCert,
    Tag,
    bang,
    coequalizer,
    colimit_of_diagram,
    compose,
    coproduct,
    copair,
    fiber,
    format_atom,
    identity,
    invert,
    mediate_coequalizer,
    mediate_pullback,
    morphism_predicates,
    pair_map,
    product,
    product_map,
    pullback,
    terminal,
)
from .stack import (
    ClassifyingReport,
    QSMorphism,
    QSObject,
    QuotientStack,
    check_qs_morphism,
    check_qs_object,
    classifying_fiber_equiv,
    classifying_stack,
    coherence_assoc,
    coherence_epsilon,
    coherence_iota,
    coherence_triangles,
    compose_qs,
    epsilon_component,
    iota_component,
    qs_identity,
    qs_inverse,
    qs_isomorphism,
    restrict,
    restrict_morphism,
)
from .errors import (
    AssocFail,
    BaseMismatch,
    BoundExceeded,
    CocycleFail,
    CocycleRequired,
    CodomainMismatch,
    CoverNotCanonical,
    CoverNotInTopology,
    DanglingArrow,
    EquivarianceFail,
    FinstackError,
    MissingOverlapIso,
    NoInverse,
    NotAssociative,
    NotCoequalized,
    NoUnit,
    OverlapMismatch,
    ShapeMismatch,
    SiteSyntaxError,
    SquareNotCommuting,
    SrcDstMismatch,
    SrcMismatch,
    TargetMismatch,
    TriangleFail,
    UnitFail,
    UnknownCommand,
    UnresolvedReference,
    ValidationError,
)
from .topology import (
    CoveringFamily,
    GeneratedSieve,
    check_sheaf_condition,
    is_canonical_cover,
    is_colim_sieve,
    is_effective_epi,
    is_jointly_surjective,
    is_universal_effective_epi,
    point_cover,
    pullback_family,
    sieve_member,
)

__all__ = [
    "AssocFail", "BaseMismatch", "BoundExceeded", "CocycleFail",
    "CocycleRequired", "CodomainMismatch", "CoverNotCanonical",
    "CoverNotInTopology", "DanglingArrow", "EquivarianceFail",
    "FinstackError", "MissingOverlapIso", "NoInverse", "NotAssociative",
    "NotCoequalized", "NoUnit", "OverlapMismatch", "ShapeMismatch",
    "SiteSyntaxError", "SquareNotCommuting", "SrcDstMismatch", "SrcMismatch",
    "TargetMismatch", "TriangleFail", "UnitFail", "UnknownCommand",
    "UnresolvedReference", "ValidationError",
    "Atom", "Bundle", "BundleMorphism", "ClassifyingReport", "CoequalizerCert",
    "Colimit", "Coproduct", "Corpus", "CoveringFamily", "DescentDatum",
    "EquivariantMap", "FinGroup", "FinMap", "FinSet", "GAction",
    "GeneratedSieve", "GluingResult", "MapPredicates", "NotBundle",
    "NotTrivial", "Product", "PullbackCert", "QSMorphism", "QSObject",
    "QuotientStack", "StackReport", "Tag", "Trivialization",
    "action_from_function", "bang", "check_action", "check_bundle_morphism",
    "check_cocycle", "check_equivariant", "check_group", "check_qs_morphism",
    "check_qs_object", "check_sheaf_condition", "check_trivialization",
    "check_uniqueness", "classifying_fiber_equiv", "classifying_stack",
    "coequalizer", "coherence_assoc", "coherence_epsilon", "coherence_iota",
    "coherence_triangles", "colimit_of_diagram", "compose", "compose_qs",
    "coproduct", "copair", "enumerate_bundle_morphisms", "enumerate_bundles",
    "epsilon_component", "fiber", "format_atom", "glue_morphisms",
    "glue_object", "group_from_table", "gset_isomorphism_over", "identity",
    "invert", "iota_component", "is_canonical_cover", "is_colim_sieve",
    "is_effective_epi", "is_jointly_surjective", "is_locally_trivial",
    "is_principal_bundle", "is_universal_effective_epi", "klein_four",
    "make_datum", "mediate_coequalizer", "mediate_pullback",
    "morphism_predicates", "orbits", "pair_map", "point_cover", "product",
    "product_action", "product_map", "pullback", "pullback_action",
    "pullback_bundle", "pullback_datum", "pullback_family", "qs_identity",
    "qs_inverse", "qs_isomorphism", "regular_action", "restrict",
    "restrict_morphism", "restrict_to_datum", "sieve_member", "subgroups",
    "sym", "terminal", "torsor_structures", "trivial_action",
    "trivial_bundle", "verify_stack", "zmod",
]

__version__ = "0.1.0"
