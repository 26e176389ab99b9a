"""Descent along canonical covers: data, cocycles, gluing of objects and
morphisms, uniqueness, and the stack verdict over generated corpora."""

from random import Random

import pytest

from finstack import (
    CocycleFail,
    CocycleRequired,
    CoverNotCanonical,
    CoveringFamily,
    FinMap,
    FinSet,
    MissingOverlapIso,
    OverlapMismatch,
    check_cocycle,
    check_uniqueness,
    compose_qs,
    glue_morphisms,
    glue_object,
    identity,
    klein_four,
    make_datum,
    point_cover,
    pullback_datum,
    qs_identity,
    qs_isomorphism,
    restrict,
    restrict_morphism,
    restrict_to_datum,
    sym,
    terminal,
    trivial_action,
    trivial_bundle,
    verify_stack,
    zmod,
)
from finstack.descent import Distinguish
from finstack.sample import (
    break_cocycle,
    build_corpus,
    conjugate_datum,
    constant_gauge,
    drop_leg,
    empty_object,
    exhaustive_corpus,
    fiber_gauge,
    random_cover,
    random_qsobject,
    relabel_qsobject,
)
from finstack.stack import check_qs_object


def point_x(group):
    return trivial_action(group, terminal())


def trivial_object(group, base):
    x = point_x(group)
    b = trivial_bundle(group, base)
    alpha = FinMap(b.total.space, x.space, {t: "*" for t in b.total.space})
    return check_qs_object(b, alpha, x)


# ------------------------------------------------------------- data

def test_make_datum_fills_forced_overlaps_only():
    z2 = zmod(2)
    obj = trivial_object(z2, FinSet(("p", "q")))
    cover = point_cover(obj.base)
    datum = restrict_to_datum(obj, cover)
    # disjoint point legs: every off-diagonal overlap is empty, so a datum
    # can be rebuilt from the objects alone
    rebuilt = make_datum(cover, datum.objects, {})
    assert rebuilt == datum
    # two legs sharing the point q have a real overlap that must be supplied
    base = obj.base
    f = FinMap(FinSet(("a", "b")), base, {"a": "p", "b": "q"})
    g = FinMap(FinSet(("c",)), base, {"c": "q"})
    sharing = CoveringFamily(base, [f, g])
    parts = restrict_to_datum(obj, sharing)
    partial = {k: v for k, v in parts.overlaps.items() if k != (0, 1)}
    with pytest.raises(MissingOverlapIso) as exc:
        make_datum(sharing, parts.objects, partial)
    assert (exc.value.i, exc.value.j) == (0, 1)


def test_round_trip_datum_passes_cocycle():
    z2 = zmod(2)
    obj = trivial_object(z2, FinSet(("p", "q")))
    datum = restrict_to_datum(obj, point_cover(obj.base))
    check_cocycle(datum)  # no raise
    assert len(datum.objects) == 2
    assert datum.overlap_iso(0, 1).src.base == datum.overlap_iso(0, 1).dst.base


def test_restrict_to_datum_needs_matching_base():
    z2 = zmod(2)
    obj = trivial_object(z2, FinSet(("p",)))
    with pytest.raises(ValueError):
        restrict_to_datum(obj, point_cover(FinSet(("z",))))


def test_restrict_to_datum_needs_canonical_cover():
    z2 = zmod(2)
    obj = trivial_object(z2, FinSet(("p", "q")))
    missing = CoveringFamily(obj.base, [point_cover(obj.base).legs[0]])
    with pytest.raises(CoverNotCanonical):
        restrict_to_datum(obj, missing)


def test_broken_cocycle_is_detected(rng):
    z2 = zmod(2)
    obj = trivial_object(z2, FinSet(("p", "q")))
    datum = restrict_to_datum(obj, point_cover(obj.base))
    bad = break_cocycle(datum, 1)
    with pytest.raises(CocycleFail) as exc:
        check_cocycle(bad)
    assert exc.value.i == exc.value.j == exc.value.k
    with pytest.raises(ValueError):
        break_cocycle(datum, 0)  # the unit twists nothing


# ------------------------------------------------------------- gluing

def test_glue_round_trip_point_cover(rng):
    for grp in (zmod(2), zmod(3), klein_four()):
        obj = random_qsobject(rng, grp, point_x(grp), FinSet(("p", "q")))
        datum = restrict_to_datum(obj, point_cover(obj.base))
        result = glue_object(datum)
        assert qs_isomorphism(result.glued, obj) is not None
        assert len(result.comparisons) == 2
        for i, psi in enumerate(result.comparisons):
            assert psi.src == restrict(result.glued, datum.cover.legs[i])
            assert psi.dst == datum.objects[i]


def test_glue_round_trip_overlapping_cover(rng):
    z2 = zmod(2)
    base = FinSet(("p", "q", "r"))
    obj = random_qsobject(rng, z2, point_x(z2), base)
    cover = random_cover(rng, base, max_legs=3, max_extra=2)
    datum = restrict_to_datum(obj, cover)
    result = glue_object(datum)
    assert qs_isomorphism(result.glued, obj) is not None


def test_glue_conjugated_datum_same_class(rng):
    z3 = zmod(3)
    base = FinSet(("p", "q"))
    obj = random_qsobject(rng, z3, point_x(z3), base)
    # legs must genuinely overlap, otherwise every overlap iso is forced and
    # conjugation is invisible
    f = FinMap(FinSet(("a", "b")), base, {"a": "p", "b": "q"})
    g = FinMap(FinSet(("c",)), base, {"c": "q"})
    datum = restrict_to_datum(obj, CoveringFamily(base, [f, g]))
    twisted = conjugate_datum(
        datum, [constant_gauge(w, k) for w, k in zip(datum.objects, (1, 2))])
    assert twisted != datum
    check_cocycle(twisted)
    result = glue_object(twisted)
    assert qs_isomorphism(result.glued, obj) is not None


def test_glue_rejects_broken_cocycle(rng):
    z2 = zmod(2)
    obj = trivial_object(z2, FinSet(("p", "q")))
    datum = restrict_to_datum(obj, point_cover(obj.base))
    bad = break_cocycle(datum, 1)
    with pytest.raises(CocycleRequired) as exc:
        glue_object(bad)
    assert isinstance(exc.value.__cause__, CocycleFail)


def test_glue_rejects_non_canonical_cover():
    z2 = zmod(2)
    obj = trivial_object(z2, FinSet(("p", "q")))
    datum = restrict_to_datum(obj, point_cover(obj.base))
    truncated = drop_leg(datum)
    assert truncated is not None  # dropping a point leg uncovers its point
    with pytest.raises(CoverNotCanonical):
        glue_object(truncated)


def test_empty_cover_gluing():
    z2 = zmod(2)
    empty_base = FinSet(())
    datum = restrict_to_datum(
        empty_object(z2, point_x(z2)), CoveringFamily(empty_base, []))
    with pytest.raises(ValueError):
        glue_object(datum)  # no legs to read group or structure space from
    result = glue_object(datum, group=z2, x_action=point_x(z2))
    assert len(result.glued.total) == 0
    assert result.comparisons == ()


# --------------------------------------------------- morphism gluing

def test_glue_morphisms_recovers_global(rng):
    z3 = zmod(3)
    base = FinSet(("p", "q"))
    x = random_qsobject(rng, z3, point_x(z3), base)
    y, m = relabel_qsobject(rng, x)
    cover = point_cover(base)
    locals_ = [restrict_morphism(m, f) for f in cover.legs]
    eta = glue_morphisms(cover, x, y, locals_)
    assert eta.fn == m.fn


def test_glue_morphisms_overlap_mismatch():
    z2 = zmod(2)
    base = FinSet(("p",))
    obj = trivial_object(z2, base)
    leg = FinMap(terminal(), base, {"*": "p"})
    cover = CoveringFamily(base, [leg, leg])  # both legs hit p
    id_loc = qs_identity(restrict(obj, leg))
    gauge = compose_qs(
        restrict_morphism(constant_gauge(obj, 1), leg), qs_identity(restrict(obj, leg)))
    with pytest.raises(OverlapMismatch) as exc:
        glue_morphisms(cover, obj, obj, [id_loc, gauge])
    assert (exc.value.i, exc.value.j) == (0, 1)


def test_glue_morphisms_validates_locals(rng):
    z2 = zmod(2)
    base = FinSet(("p", "q"))
    obj = trivial_object(z2, base)
    cover = point_cover(base)
    with pytest.raises(ValueError):
        glue_morphisms(cover, obj, obj, [qs_identity(restrict(obj, cover.legs[0]))])


def test_glue_morphisms_empty_cover():
    z2 = zmod(2)
    obj = empty_object(z2, point_x(z2))
    eta = glue_morphisms(CoveringFamily(FinSet(()), []), obj, obj, [])
    assert eta.fn == identity(obj.total)


# ------------------------------------------------------------- uniqueness

def test_uniqueness_detects_distinct_gauges():
    z2 = zmod(2)
    base = FinSet(("p", "q"))
    obj = trivial_object(z2, base)
    cover = point_cover(base)
    same = check_uniqueness(cover, qs_identity(obj), qs_identity(obj))
    assert same is None
    diff = check_uniqueness(cover, qs_identity(obj), constant_gauge(obj, 1))
    assert isinstance(diff, Distinguish)
    assert diff.leg_index in (0, 1)
    with pytest.raises(ValueError):
        check_uniqueness(cover, qs_identity(obj),
                         qs_identity(restrict(obj, cover.legs[0])))


def test_uniqueness_partial_gauge(rng):
    # gauges differing on a single fiber are caught at that leg
    z3 = zmod(3)
    base = FinSet(("p", "q"))
    obj = trivial_object(z3, base)
    g1 = fiber_gauge(obj, {"p": 1, "q": 2})
    g2 = fiber_gauge(obj, {"p": 1, "q": 1})
    diff = check_uniqueness(point_cover(base), g1, g2)
    assert diff is not None and diff.leg_index == 1


# ------------------------------------------------------------- base change

def test_pullback_datum_keeps_cocycle(rng):
    z2 = zmod(2)
    base = FinSet(("p", "q"))
    obj = random_qsobject(rng, z2, point_x(z2), base)
    datum = restrict_to_datum(obj, point_cover(base))
    two = FinSet(("a", "b"))
    t = FinMap(two, base, {"a": "q", "b": "q"})
    pulled = pullback_datum(datum, t)
    assert pulled.cover.target == two
    check_cocycle(pulled)
    result = glue_object(pulled)
    assert qs_isomorphism(result.glued, restrict(obj, t)) is not None


def test_pullback_datum_target_mismatch(rng):
    z2 = zmod(2)
    obj = trivial_object(z2, FinSet(("p",)))
    datum = restrict_to_datum(obj, point_cover(obj.base))
    with pytest.raises(ValueError):
        pullback_datum(datum, identity(FinSet(("z",))))


# ------------------------------------------------------------- verdicts

def test_verify_stack_exhaustive_small():
    z2 = zmod(2)
    x = point_x(z2)
    report = verify_stack(z2, x, exhaustive_corpus(z2, x, max_base=2))
    assert report.ok
    assert report.effectiveness.attempted >= 3
    assert report.uniqueness.attempted >= 10
    assert report.rejected.attempted >= 1


def test_verify_stack_random_corpora(rng):
    for grp in (zmod(3), sym(3)):
        x = point_x(grp)
        report = verify_stack(grp, x, build_corpus(grp, x, rng, cases=4))
        assert report.ok, (grp, report)


def test_verify_stack_reports_planted_failure(rng):
    z2 = zmod(2)
    x = point_x(z2)
    obj = trivial_object(z2, FinSet(("p", "q")))
    datum = restrict_to_datum(obj, point_cover(obj.base))
    corpus = exhaustive_corpus(z2, x, max_base=1)
    corpus.invalid_data.append(datum)  # a valid datum planted as invalid
    report = verify_stack(z2, x, corpus)
    assert not report.ok
    assert not report.rejected.ok
    assert report.effectiveness.ok
