"""Fibers of the quotient prestack [X/G]: objects are bundles with an
equivariant map to X, morphisms are bundle maps compatible with those,
restriction is by base change, and the pseudofunctor coherence cells are
computed isos, not assumptions.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

from .action import (
    EquivariantMap,
    FinGroup,
    GAction,
    check_equivariant,
    gset_isomorphism_over,
    trivial_action,
)
from .bundle import (
    Bundle,
    BundleMorphism,
    check_bundle_morphism,
    enumerate_bundle_morphisms,
    enumerate_bundles,
    pullback_bundle,
    trivial_bundle,
)
from .errors import BaseMismatch, TriangleFail
from .finset import (
    FinMap,
    FinSet,
    bang,
    compose,
    identity,
    invert,
    mediate_pullback,
    morphism_predicates,
    pair_map,
    product,
    pullback,
    terminal,
)
from .topology import all_maps


@dataclass(frozen=True, eq=True)
class QuotientStack:
    """The stack handle: a group acting on a space, over a fixed topology."""

    group: FinGroup
    x_action: GAction
    topology: str = "canonical"

    @property
    def space(self) -> FinSet:
        return self.x_action.space


def classifying_stack(group: FinGroup) -> QuotientStack:
    """[T/G]: the classifying case, X the terminal set."""
    return QuotientStack(group, trivial_action(group, terminal()))


@dataclass(frozen=True, eq=True)
class QSObject:
    """An object of [X/G] over its base: a bundle P -> Y with an
    equivariant alpha : P -> X."""

    bundle: Bundle
    alpha: EquivariantMap

    @property
    def base(self) -> FinSet:
        return self.bundle.base

    @property
    def total(self) -> FinSet:
        return self.bundle.total.space

    @property
    def x_action(self) -> GAction:
        return self.alpha.dst_action

    def __repr__(self):
        return f"QSObject(|{len(self.total)}| over {self.base!r})"


def check_qs_object(bundle: Bundle, alpha: FinMap, x_action: GAction) -> QSObject:
    """Certify alpha as an equivariant map from the total action to X."""
    if x_action.group != bundle.group:
        raise ValueError("x-action is for a different group")
    eq = check_equivariant(alpha, bundle.total, x_action)
    return QSObject(bundle, eq)


@dataclass(frozen=True, eq=True)
class QSMorphism:
    """A bundle morphism whose map also commutes with the alphas."""

    src: QSObject
    dst: QSObject
    bundle_morphism: BundleMorphism

    @property
    def fn(self) -> FinMap:
        return self.bundle_morphism.fn

    def __repr__(self):
        return f"QSMorphism({self.src!r} => {self.dst!r})"


def check_qs_morphism(src: QSObject, dst: QSObject, m: FinMap) -> QSMorphism:
    bm = check_bundle_morphism(src.bundle, dst.bundle, m)
    for p in src.total:
        if dst.alpha.map.table[m.table[p]] != src.alpha.map.table[p]:
            raise TriangleFail(p, "alpha")
    return QSMorphism(src, dst, bm)


def qs_identity(obj: QSObject) -> QSMorphism:
    return check_qs_morphism(obj, obj, identity(obj.total))


def compose_qs(m2: QSMorphism, m1: QSMorphism) -> QSMorphism:
    if m1.dst != m2.src:
        raise ValueError("morphisms are not composable")
    return check_qs_morphism(m1.src, m2.dst, compose(m2.fn, m1.fn))


def qs_inverse(m: QSMorphism) -> QSMorphism:
    return check_qs_morphism(m.dst, m.src, invert(m.fn))


@functools.lru_cache(maxsize=4096)
def restrict(obj: QSObject, f: FinMap) -> QSObject:
    """Restriction along f : Z -> Y, by base change of the bundle; the new
    alpha is alpha after the projection to the old total."""
    if f.dst != obj.base:
        raise BaseMismatch(f"{f.dst!r} != {obj.base!r}")
    b = pullback_bundle(obj.bundle, f)
    cert = pullback(obj.bundle.proj.map, f)
    alpha = compose(obj.alpha.map, cert.proj1)
    return check_qs_object(b, alpha, obj.x_action)


def restrict_morphism(m: QSMorphism, f: FinMap) -> QSMorphism:
    """Restriction of a morphism, by the pullback's universal property."""
    src = restrict(m.src, f)
    dst = restrict(m.dst, f)
    cert_src = pullback(m.src.bundle.proj.map, f)
    cert_dst = pullback(m.dst.bundle.proj.map, f)
    t = mediate_pullback(cert_dst,
                         compose(m.fn, cert_src.proj1),
                         cert_src.proj2)
    return check_qs_morphism(src, dst, t)


def _assert_mutually_inverse(fwd: FinMap, bwd: FinMap) -> None:
    assert compose(bwd, fwd) == identity(fwd.src)
    assert compose(fwd, bwd) == identity(bwd.src)


def iota_component(obj: QSObject) -> QSMorphism:
    """The canonical iso restrict(obj, id) -> obj. Both directions are
    mediated and verified mutually inverse."""
    cert = pullback(obj.bundle.proj.map, identity(obj.base))
    fwd = cert.proj1
    bwd = mediate_pullback(cert, identity(obj.total), obj.bundle.proj.map)
    _assert_mutually_inverse(fwd, bwd)
    return check_qs_morphism(restrict(obj, identity(obj.base)), obj, fwd)


def epsilon_component(obj: QSObject, f: FinMap, g: FinMap) -> QSMorphism:
    """The canonical iso restrict(obj, f∘g) -> restrict(restrict(obj, f), g),
    both directions mediated and verified mutually inverse."""
    if f.dst != obj.base or g.dst != f.src:
        raise BaseMismatch("maps are not composable under the object's base")
    fg = compose(f, g)
    src = restrict(obj, fg)
    mid_cert = pullback(obj.bundle.proj.map, f)
    cert_fg = pullback(obj.bundle.proj.map, fg)
    restricted = restrict(obj, f)
    outer_cert = pullback(restricted.bundle.proj.map, g)
    to_mid = mediate_pullback(mid_cert, cert_fg.proj1, compose(g, cert_fg.proj2))
    fwd = mediate_pullback(outer_cert, to_mid, cert_fg.proj2)
    back_p = compose(mid_cert.proj1, outer_cert.proj1)
    bwd = mediate_pullback(cert_fg, back_p, outer_cert.proj2)
    _assert_mutually_inverse(fwd, bwd)
    return check_qs_morphism(src, restrict(restricted, g), fwd)


@dataclass(frozen=True, eq=True)
class CoherenceCell:
    """A family of verified canonical isos, with its naturality evidence."""

    kind: str
    components: tuple
    naturality_squares: int


def coherence_iota(base: FinSet, objects, morphisms=()) -> CoherenceCell:
    """ι on a sample of the fiber over `base`: components for each object,
    naturality checked on each sampled morphism."""
    objects = tuple(objects)
    comps = {}
    for obj in objects:
        if obj.base != base:
            raise BaseMismatch(f"object over {obj.base!r}, expected {base!r}")
        comps[obj] = iota_component(obj)
    checked = 0
    for m in morphisms:
        left = compose_qs(comps[m.dst], restrict_morphism(m, identity(base)))
        right = compose_qs(m, comps[m.src])
        assert left.fn == right.fn, "iota naturality square failed"
        checked += 1
    return CoherenceCell("iota", tuple(comps[o] for o in objects), checked)


def coherence_epsilon(f: FinMap, g: FinMap, objects, morphisms=()) -> CoherenceCell:
    """ε_{f,g} on a sample of the fiber over f's target."""
    objects = tuple(objects)
    comps = {obj: epsilon_component(obj, f, g) for obj in objects}
    fg = compose(f, g)
    checked = 0
    for m in morphisms:
        left = compose_qs(comps[m.dst], restrict_morphism(m, fg))
        right = compose_qs(restrict_morphism(restrict_morphism(m, f), g),
                           comps[m.src])
        assert left.fn == right.fn, "epsilon naturality square failed"
        checked += 1
    return CoherenceCell("epsilon", tuple(comps[o] for o in objects), checked)


def coherence_assoc(obj: QSObject, f: FinMap, g: FinMap, h: FinMap) -> bool:
    """The two ε routes restrict(obj, f∘g∘h) -> ((obj|f)|g)|h agree."""
    route_a = compose_qs(
        coherence_epsilon(g, h, [restrict(obj, f)]).components[0],
        epsilon_component(obj, f, compose(g, h)))
    route_b = compose_qs(
        restrict_morphism(epsilon_component(obj, f, g), h),
        epsilon_component(obj, compose(f, g), h))
    assert route_a.fn == route_b.fn, "epsilon associativity failed"
    return True


def coherence_triangles(obj: QSObject, f: FinMap) -> bool:
    """ε against ι: both unit triangles collapse to the identity."""
    r = restrict(obj, f)
    left = compose_qs(iota_component(r), epsilon_component(obj, f, identity(f.src)))
    assert left.fn == identity(r.total), "right unit triangle failed"
    eps = epsilon_component(obj, identity(obj.base), f)
    back = restrict_morphism(iota_component(obj), f)
    assert compose_qs(back, eps).fn == identity(r.total), "left unit triangle failed"
    return True


# ------------------------------------------------------- classifying stack ---

def qs_isomorphism(a: QSObject, b: QSObject) -> Optional[FinMap]:
    """An iso of a and b in their fiber: an equivariant bijection of totals
    over the base that also commutes with the alphas, or None.

    Both triangles are folded into one projection condition by pairing the
    bundle projection with alpha."""
    if a.base != b.base or a.x_action != b.x_action:
        return None
    prod = product(a.base, a.x_action.space)
    pa = pair_map(a.bundle.proj.map, a.alpha.map, prod)
    pb = pair_map(b.bundle.proj.map, b.alpha.map, prod)
    return gset_isomorphism_over(a.bundle.total, b.bundle.total, pa, pb)


@dataclass(frozen=True, eq=True)
class ClassifyingReport:
    """Evidence that [T/G](Y) and Bun_G(Y) agree on the enumerated corpus."""

    n_bundles: int
    n_objects: int
    iso_classes: int
    aut_trivial: int
    hom_pairs_checked: int
    hom_counts_equal: bool


def bundle_isomorphic(a: Bundle, b: Bundle) -> bool:
    h = gset_isomorphism_over(a.total, b.total, a.proj.map, b.proj.map)
    return h is not None


def classifying_fiber_equiv(group: FinGroup, base: FinSet,
                            bound: int = 65536) -> ClassifyingReport:
    """Enumerate Bun_G(base) and [T/G](base) within the bound, exhibit the
    object bijection (alpha to the point is forced) and hom-set equality."""
    bundles = enumerate_bundles(group, base, bound=bound)
    x_act = trivial_action(group, terminal())
    objects = []
    for b in bundles:
        alphas = list(all_maps(b.total.space, terminal()))
        assert len(alphas) == 1, "alpha must be forced"
        objects.append(check_qs_object(b, alphas[0], x_act))
    reps: list = []
    for b in bundles:
        if not any(bundle_isomorphic(b, r) for r in reps):
            reps.append(b)
    pairs_checked = 0
    hom_equal = True
    cap = min(len(bundles), 3)
    for i in range(cap):
        for j in range(cap):
            bms = enumerate_bundle_morphisms(bundles[i], bundles[j])
            qs = []
            for bm in bms:
                try:
                    qs.append(check_qs_morphism(objects[i], objects[j], bm.fn))
                except TriangleFail:
                    hom_equal = False
            if {bm.fn for bm in bms} != {q.fn for q in qs}:
                hom_equal = False
            pairs_checked += 1
    triv = trivial_bundle(group, base)
    aut = len(enumerate_bundle_morphisms(triv, triv))
    return ClassifyingReport(
        n_bundles=len(bundles),
        n_objects=len(objects),
        iso_classes=len(reps),
        aut_trivial=aut,
        hom_pairs_checked=pairs_checked,
        hom_counts_equal=hom_equal,
    )
