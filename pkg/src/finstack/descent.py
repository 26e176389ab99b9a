"""Descent for [X/G] along canonical covers: descent data, cocycle checking,
gluing of morphisms and of objects, and the three stack conditions.

Gluing realizes the colimit over a cover's overlap diagram concretely: the
glued total is the coequalizer of the pairwise-overlap relation on the
disjoint union of the locals, the action, projection and structure map are
mediated through it, and the comparison isos back to the datum are assembled
leg by leg and verified. Nothing is trusted: every produced object or
morphism is re-certified by the checking ops it must satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .action import FinGroup, GAction, check_action, check_equivariant
from .bundle import Bundle, _canonical_cover_cached, _trivial_action_cached, is_principal_bundle
from .errors import (
    CocycleFail,
    CocycleRequired,
    CoverNotCanonical,
    MissingOverlapIso,
    OverlapMismatch,
)
from .finset import (
    FinMap,
    FinSet,
    Tag,
    coequalizer,
    compose,
    coproduct,
    copair,
    identity,
    invert,
    mediate_coequalizer,
    mediate_pullback,
    morphism_predicates,
    pair_map,
    product,
    pullback,
)
from .stack import (
    QSMorphism,
    QSObject,
    check_qs_morphism,
    check_qs_object,
    restrict,
    restrict_morphism,
)
from .topology import CoveringFamily, pullback_family


def _require_canonical(cover: CoveringFamily) -> None:
    if not _canonical_cover_cached(cover, 2):
        raise CoverNotCanonical(f"over {cover.target!r}")


def overlap(cover: CoveringFamily, i: int, j: int):
    """The canonical pairwise overlap U_i ×_Y U_j with its projections."""
    return pullback(cover.legs[i], cover.legs[j])


@dataclass(frozen=True, eq=True)
class DescentDatum:
    """Objects over the legs of a cover plus overlap isos for every ordered
    pair of legs, diagonal included (a non-mono leg has real self-overlap).

    The cocycle condition is NOT checked at construction, so violating data
    are representable; glue_object rejects them first.
    """

    cover: CoveringFamily
    objects: tuple
    overlaps: dict

    def overlap_iso(self, i: int, j: int) -> QSMorphism:
        return self.overlaps[(i, j)]


def make_datum(cover: CoveringFamily, objects, overlaps) -> DescentDatum:
    """Validate shapes and isos; fill in the forced overlap isos (empty
    overlap, or the diagonal of a mono leg)."""
    objects = tuple(objects)
    if len(objects) != len(cover.legs):
        raise ValueError("need exactly one object per leg")
    for i, (obj, leg) in enumerate(zip(objects, cover.legs)):
        if obj.base != leg.src:
            raise ValueError(f"object {i} lives over {obj.base!r}, leg wants {leg.src!r}")
    overlaps = dict(overlaps)
    n = len(cover.legs)
    for i in range(n):
        for j in range(n):
            if (i, j) in overlaps:
                continue
            cert = overlap(cover, i, j)
            if len(cert.apex) == 0 or (i == j and cert.proj1 == cert.proj2):
                src = restrict(objects[i], cert.proj1)
                dst = restrict(objects[j], cert.proj2)
                overlaps[(i, j)] = check_qs_morphism(src, dst, identity(src.total))
            else:
                raise MissingOverlapIso(i, j)
    for (i, j), iso in overlaps.items():
        cert = overlap(cover, i, j)
        if iso.src != restrict(objects[i], cert.proj1):
            raise ValueError(f"overlap iso ({i},{j}) has the wrong source")
        if iso.dst != restrict(objects[j], cert.proj2):
            raise ValueError(f"overlap iso ({i},{j}) has the wrong target")
        if not morphism_predicates(iso.fn).iso:
            raise ValueError(f"overlap iso ({i},{j}) is not a bijection")
    return DescentDatum(cover, objects, overlaps)


def _phi_points(datum: DescentDatum, i: int, j: int):
    """The overlap iso (i,j) as a point function (w over a) -> (w' over b),
    keyed by (w, (a, b))."""
    fn = datum.overlaps[(i, j)].fn
    return {key: value[0] for key, value in fn.table.items()}


def check_cocycle(datum: DescentDatum) -> None:
    """For every ordered triple (i,j,k), the two composites around the
    triple overlap agree pointwise. Raises CocycleFail(i,j,k,point)."""
    cover = datum.cover
    n = len(cover.legs)
    phis = {(i, j): _phi_points(datum, i, j) for i in range(n) for j in range(n)}
    pis = [obj.bundle.proj.map.table for obj in datum.objects]
    totals = [tuple(obj.total) for obj in datum.objects]
    for i in range(n):
        fi = cover.legs[i].table
        for j in range(n):
            fj = cover.legs[j].table
            for k in range(n):
                fk = cover.legs[k].table
                for a in cover.legs[i].src:
                    for b in cover.legs[j].src:
                        if fi[a] != fj[b]:
                            continue
                        for c in cover.legs[k].src:
                            if fi[a] != fk[c]:
                                continue
                            for w in totals[i]:
                                if pis[i][w] != a:
                                    continue
                                w1 = phis[(i, j)][(w, (a, b))]
                                w2 = phis[(j, k)][(w1, (b, c))]
                                w3 = phis[(i, k)][(w, (a, c))]
                                if w2 != w3:
                                    raise CocycleFail(i, j, k, ((a, b), c))


def restrict_to_datum(obj: QSObject, cover: CoveringFamily) -> DescentDatum:
    """Restrict an object over Y to a datum on the cover, with the canonical
    overlap isos; the result passes check_cocycle."""
    _require_canonical(cover)
    if cover.target != obj.base:
        raise ValueError(f"cover is over {cover.target!r}, object over {obj.base!r}")
    objects = tuple(restrict(obj, f) for f in cover.legs)
    certs = [pullback(obj.bundle.proj.map, f) for f in cover.legs]
    overlaps = {}
    n = len(cover.legs)
    for i in range(n):
        for j in range(n):
            cert_ij = overlap(cover, i, j)
            rc_i = pullback(objects[i].bundle.proj.map, cert_ij.proj1)
            rc_j = pullback(objects[j].bundle.proj.map, cert_ij.proj2)
            into_total_j = mediate_pullback(
                certs[j],
                compose(certs[i].proj1, rc_i.proj1),   # ((p,a),(a,b)) -> p
                compose(cert_ij.proj2, rc_i.proj2),    # ((p,a),(a,b)) -> b
            )
            t = mediate_pullback(rc_j, into_total_j, rc_i.proj2)
            overlaps[(i, j)] = check_qs_morphism(
                restrict(objects[i], cert_ij.proj1),
                restrict(objects[j], cert_ij.proj2),
                t)
    datum = make_datum(cover, objects, overlaps)
    check_cocycle(datum)
    return datum


def glue_morphisms(cover: CoveringFamily, x: QSObject, y: QSObject,
                   locals_: list) -> QSMorphism:
    """Glue per-leg morphisms that agree on overlaps into the unique global
    one, through the kernel-pair coequalizer presentation of the total."""
    _require_canonical(cover)
    if x.base != cover.target or y.base != cover.target:
        raise ValueError("objects do not live over the cover's target")
    locals_ = list(locals_)
    if len(locals_) != len(cover.legs):
        raise ValueError("need exactly one local morphism per leg")
    for i, loc in enumerate(locals_):
        if loc.src != restrict(x, cover.legs[i]) or loc.dst != restrict(y, cover.legs[i]):
            raise ValueError(f"local {i} does not go between the leg restrictions")
    # overlap agreement, pointwise through the canonical identifications
    n = len(cover.legs)
    for i in range(n):
        for j in range(n):
            cert_ij = overlap(cover, i, j)
            for (a, b) in cert_ij.apex:
                for p in x.total:
                    if x.bundle.proj.map.table[p] != cover.legs[i].table[a]:
                        continue
                    qi = locals_[i].fn.table[(p, a)][0]
                    qj = locals_[j].fn.table[(p, b)][0]
                    if qi != qj:
                        raise OverlapMismatch(i, j, (p, (a, b)))
    certs_x = [pullback(x.bundle.proj.map, f) for f in cover.legs]
    certs_y = [pullback(y.bundle.proj.map, f) for f in cover.legs]
    big = coproduct([c.apex for c in certs_x])
    bigmap = copair(big, [c.proj1 for c in certs_x], dst=x.total)
    kp = pullback(bigmap, bigmap)
    cert = coequalizer(kp.proj1, kp.proj2)
    delta = copair(big,
                   [compose(certs_y[i].proj1, locals_[i].fn) for i in range(n)],
                   dst=y.total)
    eta_fn = compose(mediate_coequalizer(cert, delta),
                     invert(mediate_coequalizer(cert, bigmap)))
    eta = check_qs_morphism(x, y, eta_fn)
    for i in range(n):
        assert restrict_morphism(eta, cover.legs[i]).fn == locals_[i].fn, \
            f"glued morphism does not restrict to local {i}"
    return eta


class Distinguish(NamedTuple):
    """A leg and a point of its restriction where two morphisms differ."""

    leg_index: int
    point: object


def check_uniqueness(cover: CoveringFamily, m1: QSMorphism,
                     m2: QSMorphism) -> Optional[Distinguish]:
    """Two globals with equal restrictions along a canonical cover are equal.
    Returns None when all restrictions (and hence the morphisms) agree, else
    the first distinguishing leg and point."""
    _require_canonical(cover)
    if m1.src != m2.src or m1.dst != m2.dst:
        raise ValueError("morphisms do not share endpoints")
    if m1.src.base != cover.target:
        raise ValueError("morphisms do not live over the cover's target")
    for i, f in enumerate(cover.legs):
        r1 = restrict_morphism(m1, f)
        r2 = restrict_morphism(m2, f)
        if r1.fn != r2.fn:
            for pt in r1.fn.src:
                if r1.fn.table[pt] != r2.fn.table[pt]:
                    return Distinguish(i, pt)
    assert m1.fn == m2.fn, "all restrictions agree but the morphisms differ"
    return None


class GluingResult(NamedTuple):
    """The glued object and the verified comparison isos onto the datum."""

    glued: QSObject
    comparisons: tuple


def _glue_empty(cover: CoveringFamily, group: FinGroup, x_action: GAction) -> GluingResult:
    # the empty cover is canonical only over the empty base; the glued object
    # is the empty bundle with the empty structure map
    empty = FinSet(())
    act = check_action(group, empty, FinMap(product(group.carrier, empty).space, empty, {}))
    proj = check_equivariant(
        FinMap(empty, cover.target, {}), act, _trivial_action_cached(group, cover.target))
    bundle = is_principal_bundle(proj)
    assert isinstance(bundle, Bundle)
    alpha = FinMap(empty, x_action.space, {})
    return GluingResult(check_qs_object(bundle, alpha, x_action), ())


def glue_object(datum: DescentDatum, group=None, x_action=None) -> GluingResult:
    """Glue a descent datum to a global object.

    The total is the coequalizer of the overlap relation on the disjoint
    union of the locals; action, projection and structure map are mediated
    through it; the leg comparisons are assembled from the overlap isos and
    verified to be isos compatible with the datum.

    A datum with no legs carries no group or structure space of its own, so
    the empty cover of the empty base needs both passed in explicitly.
    """
    cover = datum.cover
    _require_canonical(cover)
    try:
        check_cocycle(datum)
    except CocycleFail as err:
        raise CocycleRequired(err) from err
    n = len(cover.legs)
    if n == 0:
        if group is None or x_action is None:
            raise ValueError("gluing over the empty cover needs group and x_action")
        return _glue_empty(cover, group, x_action)
    group = datum.objects[0].bundle.group
    x_action = datum.objects[0].x_action
    totals = [obj.total for obj in datum.objects]
    c1 = coproduct(totals)
    rel_parts = []
    d0_parts = []
    d1_parts = []
    for i in range(n):
        for j in range(n):
            cert_ij = overlap(cover, i, j)
            rc_i = pullback(datum.objects[i].bundle.proj.map, cert_ij.proj1)
            rc_j = pullback(datum.objects[j].bundle.proj.map, cert_ij.proj2)
            rel_parts.append(rc_i.apex)
            d0_parts.append(compose(c1.injections[i], rc_i.proj1))
            d1_parts.append(compose(
                c1.injections[j],
                compose(rc_j.proj1, datum.overlaps[(i, j)].fn)))
    c2 = coproduct(rel_parts)
    d0 = copair(c2, d0_parts, dst=c1.space)
    d1 = copair(c2, d1_parts, dst=c1.space)
    cert = coequalizer(d0, d1)
    members: dict = {}
    for atom in c1.space:
        members.setdefault(cert.proj.table[atom], []).append(atom)
    # the action descends because every relation map is equivariant; build
    # the table from any member and verify all members agree
    act_table = {}
    gxw = product(group.carrier, cert.quotient)
    for g in group.carrier:
        for q in cert.quotient:
            images = {
                cert.proj.table[Tag(t.part, datum.objects[t.part].bundle.total.act.table[(g, t.atom)])]
                for t in members[q]
            }
            assert len(images) == 1, "overlap relation is not equivariant"
            act_table[(g, q)] = images.pop()
    act = check_action(group, cert.quotient,
                       FinMap(gxw.space, cert.quotient, act_table))
    pi_w = mediate_coequalizer(cert, copair(
        c1,
        [compose(cover.legs[i], datum.objects[i].bundle.proj.map) for i in range(n)],
        dst=cover.target))
    alpha_w = mediate_coequalizer(cert, copair(
        c1, [obj.alpha.map for obj in datum.objects], dst=x_action.space))
    proj_eq = check_equivariant(pi_w, act,
                                _trivial_action_cached(group, cover.target))
    bundle = is_principal_bundle(proj_eq)
    assert isinstance(bundle, Bundle), f"glued projection is not a bundle: {bundle}"
    glued = check_qs_object(bundle, alpha_w, x_action)
    # comparison isos psi_i : glued|U_i -> W_i, assembled through the datum
    phis = {(i, j): _phi_points(datum, i, j) for i in range(n) for j in range(n)}
    pis = [obj.bundle.proj.map.table for obj in datum.objects]
    comparisons = []
    for i in range(n):
        fi = cover.legs[i]
        rcert = pullback(pi_w, fi)
        table = {}
        for (q, a) in rcert.apex:
            values = set()
            for t in members[q]:
                j, w = t.part, t.atom
                values.add(phis[(j, i)][(w, (pis[j][w], a))])
            assert len(values) == 1, "comparison is ill-defined; cocycle should have caught this"
            table[(q, a)] = values.pop()
        psi = check_qs_morphism(
            restrict(glued, fi), datum.objects[i],
            FinMap(rcert.apex, datum.objects[i].total, table))
        assert morphism_predicates(psi.fn).iso, f"comparison over leg {i} is not an iso"
        comparisons.append(psi)
    # compatibility of the comparisons against every overlap iso, pointwise
    for i in range(n):
        for j in range(n):
            cert_ij = overlap(cover, i, j)
            for (a, b) in cert_ij.apex:
                for q in cert.quotient:
                    if pi_w.table[q] != cover.legs[i].table[a]:
                        continue
                    w_i = comparisons[i].fn.table[(q, a)]
                    via_phi = phis[(i, j)][(w_i, (a, b))]
                    direct = comparisons[j].fn.table[(q, b)]
                    assert via_phi == direct, \
                        f"comparison isos disagree with overlap iso ({i},{j})"
    return GluingResult(glued, tuple(comparisons))


def pullback_datum(datum: DescentDatum, t: FinMap) -> DescentDatum:
    """Base change of a whole datum along t : Z -> Y; gluing commutes with
    this up to iso, which the tests exercise."""
    cover = datum.cover
    if t.dst != cover.target:
        raise ValueError(f"{t.dst!r} != {cover.target!r}")
    new_cover = pullback_family(cover, t)
    pcerts = [pullback(f, t) for f in cover.legs]
    new_objects = tuple(
        restrict(datum.objects[i], pcerts[i].proj1) for i in range(len(cover.legs)))
    overlaps = {}
    n = len(cover.legs)
    phis = {(i, j): _phi_points(datum, i, j) for i in range(n) for j in range(n)}
    for i in range(n):
        for j in range(n):
            cert_ij = pullback(new_cover.legs[i], new_cover.legs[j])
            src = restrict(new_objects[i], cert_ij.proj1)
            dst = restrict(new_objects[j], cert_ij.proj2)
            table = {}
            for ((w, az), (az2, bz)) in src.total:
                a, b = az2[0], bz[0]
                w2 = phis[(i, j)][(w, (a, b))]
                table[((w, az), (az2, bz))] = ((w2, bz), (az2, bz))
            overlaps[(i, j)] = check_qs_morphism(
                src, dst, FinMap(src.total, dst.total, table))
    return make_datum(new_cover, new_objects, overlaps)


# ------------------------------------------------------------ verify-stack ---

@dataclass
class Corpus:
    """Test cases for the three stack conditions."""

    effectiveness: list = field(default_factory=list)   # (datum, expected QSObject or None)
    morphism_gluings: list = field(default_factory=list)  # (cover, x, y, locals, expected or None)
    uniqueness_pairs: list = field(default_factory=list)  # (cover, m1, m2)
    invalid_data: list = field(default_factory=list)       # data expected to be rejected


@dataclass
class ConditionReport:
    name: str
    attempted: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.attempted and self.attempted >= 0


@dataclass
class StackReport:
    effectiveness: ConditionReport
    gluing: ConditionReport
    uniqueness: ConditionReport
    rejected: ConditionReport

    @property
    def ok(self) -> bool:
        return all(r.ok for r in
                   (self.effectiveness, self.gluing, self.uniqueness, self.rejected))


def verify_stack(group: FinGroup, x_action: GAction, corpus: Corpus) -> StackReport:
    """Run the three stack conditions over the corpus and report.

    Effectiveness: every datum glues, and round-trip data glue back to the
    object they came from, up to iso in the fiber. Gluing: compatible local
    morphisms glue to a global one restricting back to them. Uniqueness:
    globals agreeing on a canonical cover are equal.
    """
    from .stack import qs_isomorphism

    eff = ConditionReport("effectiveness")
    for datum, expected in corpus.effectiveness:
        eff.attempted += 1
        try:
            result = glue_object(datum, group=group, x_action=x_action)
            if expected is not None and qs_isomorphism(result.glued, expected) is None:
                eff.failures.append(("not isomorphic to the source object", datum))
                continue
            eff.passed += 1
        except Exception as err:  # noqa: BLE001 - reported, not swallowed
            eff.failures.append((repr(err), datum))
    glue = ConditionReport("gluing of morphisms")
    for cover, x, y, locals_, expected in corpus.morphism_gluings:
        glue.attempted += 1
        try:
            eta = glue_morphisms(cover, x, y, locals_)
            if expected is not None and eta.fn != expected.fn:
                glue.failures.append(("glued morphism differs from expected", cover))
                continue
            glue.passed += 1
        except Exception as err:  # noqa: BLE001
            glue.failures.append((repr(err), cover))
    uniq = ConditionReport("uniqueness of gluings")
    for cover, m1, m2 in corpus.uniqueness_pairs:
        uniq.attempted += 1
        witness = check_uniqueness(cover, m1, m2)
        if (witness is None) == (m1.fn == m2.fn):
            uniq.passed += 1
        else:
            uniq.failures.append(("uniqueness verdict inconsistent", cover))
    rej = ConditionReport("rejection of invalid data")
    for datum in corpus.invalid_data:
        rej.attempted += 1
        try:
            glue_object(datum, group=group, x_action=x_action)
            rej.failures.append(("invalid datum was not rejected", datum))
        except (CocycleRequired, CoverNotCanonical):
            rej.passed += 1
    return StackReport(eff, glue, uniq, rej)
