"""Principal bundles: torsor fibers, trivializations, base change, and
morphism/automorphism enumeration against brute-force oracles."""

from random import Random

import pytest

from finstack import (
    BaseMismatch,
    BoundExceeded,
    Bundle,
    CoveringFamily,
    FinMap,
    FinSet,
    NotBundle,
    NotTrivial,
    TriangleFail,
    Trivialization,
    check_bundle_morphism,
    check_equivariant,
    check_trivialization,
    compose,
    enumerate_bundle_morphisms,
    enumerate_bundles,
    fiber,
    identity,
    invert,
    is_locally_trivial,
    is_principal_bundle,
    klein_four,
    morphism_predicates,
    point_cover,
    product,
    pullback_bundle,
    sym,
    terminal,
    torsor_structures,
    trivial_action,
    trivial_bundle,
    zmod,
)
from finstack.errors import CoverNotInTopology
from finstack.sample import random_bundle, twist_bundle
from finstack.topology import all_maps


def projection_to(group, space, base, values):
    total = trivial_action(group, space)
    return check_equivariant(
        FinMap(space, base, values), total, trivial_action(group, base))


# ------------------------------------------------------------ certification

def test_trivial_bundle_shape():
    z2 = zmod(2)
    base = FinSet(("p", "q"))
    b = trivial_bundle(z2, base)
    assert b.base == base
    assert sorted(b.total.space.elements) == [(0, "p"), (0, "q"), (1, "p"), (1, "q")]
    assert b.proj.map((1, "q")) == "q"
    assert b.trivialization is not None
    check_trivialization(b.proj, b.trivialization)


def test_wrong_fiber_size_is_rejected():
    z2 = zmod(2)
    base = FinSet(("p",))
    out = is_principal_bundle(projection_to(z2, terminal(), base, {"*": "p"}))
    assert isinstance(out, NotBundle)
    assert out.base_atom == "p"
    assert "1 atoms" in out.reason


def test_non_free_fiber_is_rejected():
    # right fiber size, but the action fixes every point
    z2 = zmod(2)
    base = FinSet(("p",))
    out = is_principal_bundle(
        projection_to(z2, FinSet(("a", "b")), base, {"a": "p", "b": "p"}))
    assert isinstance(out, NotBundle)
    assert out.reason == "fiber action is not free"


def test_non_transitive_fiber_is_rejected():
    # free z2-action on 4 points over one base point: fiber too big
    z2 = zmod(2)
    b4 = trivial_bundle(z2, FinSet(("u", "v")))
    base = FinSet(("p",))
    squash = check_equivariant(
        FinMap(b4.total.space, base, {x: "p" for x in b4.total.space}),
        b4.total, trivial_action(z2, base))
    out = is_principal_bundle(squash)
    assert isinstance(out, NotBundle)
    assert out.base_atom == "p"


def test_base_must_carry_trivial_action():
    z2 = zmod(2)
    from finstack import regular_action
    reg = regular_action(z2)
    with pytest.raises(ValueError):
        is_principal_bundle(check_equivariant(identity(reg.space), reg, reg))


def test_local_trivialization_failure_names_leg():
    z2 = zmod(2)
    base = FinSet(("p",))
    proj = projection_to(z2, FinSet(("a", "b")), base, {"a": "p", "b": "p"})
    out = is_locally_trivial(proj, point_cover(base))
    assert out == NotTrivial(0)


def test_local_trivialization_rejects_bad_cover():
    z2 = zmod(2)
    base = FinSet(("p", "q"))
    b = trivial_bundle(z2, base)
    missing = CoveringFamily(base, [FinMap(terminal(), base, {"*": "p"})])
    with pytest.raises(CoverNotInTopology):
        is_locally_trivial(b.proj, missing)
    with pytest.raises(BaseMismatch):
        is_locally_trivial(b.proj, point_cover(FinSet(("z",))))


def test_random_bundles_certify(rng):
    for grp in (zmod(2), zmod(3), klein_four()):
        for _ in range(10):
            base = FinSet(tuple(f"y{k}" for k in range(rng.randint(0, 3))))
            b = random_bundle(rng, grp, base)
            assert isinstance(b, Bundle)
            for y in base:
                assert len(fiber(b.proj.map, y)) == len(grp.carrier)


# ------------------------------------------------------------ enumeration

def test_torsor_structure_counts():
    assert len(torsor_structures(zmod(1))) == 1
    assert len(torsor_structures(zmod(2))) == 1
    assert len(torsor_structures(zmod(3))) == 2
    assert len(torsor_structures(zmod(4))) == 6
    assert len(torsor_structures(klein_four())) == 6


def test_bundle_enumeration_counts():
    two = FinSet(("p", "q"))
    assert len(enumerate_bundles(zmod(2), two)) == 1
    assert len(enumerate_bundles(zmod(3), two)) == 4
    assert len(enumerate_bundles(zmod(4), FinSet(("p",)))) == 6
    assert len(enumerate_bundles(zmod(3), FinSet(()))) == 1


def test_bundle_enumeration_bound():
    with pytest.raises(BoundExceeded):
        enumerate_bundles(zmod(4), FinSet(("p", "q")), bound=10)


def brute_morphisms(src, dst):
    """Raw filter over every map of total spaces; independent of the
    certified enumeration path."""
    grp = src.group
    out = []
    for m in all_maps(src.total.space, dst.total.space):
        if any(dst.proj.map(m(p)) != src.proj.map(p) for p in src.total.space):
            continue
        if any(m(src.total(g, p)) != dst.total(g, m(p))
               for g in grp.carrier for p in src.total.space):
            continue
        out.append(m)
    return out


def test_morphism_enumeration_matches_brute_force(rng):
    for grp in (zmod(2), zmod(3)):
        for _ in range(6):
            base = FinSet(tuple(f"y{k}" for k in range(rng.randint(0, 2))))
            a = random_bundle(rng, grp, base)
            b = random_bundle(rng, grp, base)
            fancy = {tuple(sorted(m.fn.table.items()))
                     for m in enumerate_bundle_morphisms(a, b)}
            brute = {tuple(sorted(m.table.items()))
                     for m in brute_morphisms(a, b)}
            assert fancy == brute


def test_all_bundle_morphisms_are_isos(rng):
    grp = zmod(3)
    base = FinSet(("p", "q"))
    a = random_bundle(rng, grp, base)
    b = random_bundle(rng, grp, base)
    ms = enumerate_bundle_morphisms(a, b)
    assert len(ms) == len(grp.carrier) ** len(base)
    assert all(morphism_predicates(m.fn).iso for m in ms)


def test_automorphism_counts():
    z2 = zmod(2)
    b = trivial_bundle(z2, FinSet(("p", "q")))
    assert len(enumerate_bundle_morphisms(b, b)) == 4
    z3pt = trivial_bundle(zmod(3), FinSet(("p",)))
    assert len(enumerate_bundle_morphisms(z3pt, z3pt)) == 3
    s3pt = trivial_bundle(sym(3), terminal())
    assert len(enumerate_bundle_morphisms(s3pt, s3pt)) == 6


def test_morphism_enumeration_bound():
    b = trivial_bundle(klein_four(), FinSet(("p", "q")))
    with pytest.raises(BoundExceeded):
        enumerate_bundle_morphisms(b, b, bound=100)


def test_bundle_morphism_triangle_witness():
    z2 = zmod(2)
    b = trivial_bundle(z2, FinSet(("p", "q")))
    # equivariant, but swaps the two fibers over the base
    swap = FinMap(b.total.space, b.total.space,
                  {(g, x): (g, "q" if x == "p" else "p")
                   for (g, x) in b.total.space})
    with pytest.raises(TriangleFail):
        check_bundle_morphism(b, b, swap)


# ------------------------------------------------------------ base change

def test_pullback_bundle_frozen_example():
    z2 = zmod(2)
    base = FinSet(("p", "q"))
    b = trivial_bundle(z2, base)
    two = FinSet(("a", "b"))
    f = FinMap(two, base, {"a": "p", "b": "p"})
    pb = pullback_bundle(b, f)
    assert pb.base == two
    assert len(pb.total.space) == 4
    # every total atom sits over its f-image
    assert all(f(pb.proj.map(t)) == b.proj.map(t[0]) for t in pb.total.space)
    assert pb.trivialization is not None
    check_trivialization(pb.proj, pb.trivialization)


def test_pullback_bundle_along_identity_preserves_fibers(rng):
    b = random_bundle(rng, zmod(3), FinSet(("p", "q")))
    pb = pullback_bundle(b, identity(b.base))
    assert pb.base == b.base
    for y in b.base:
        assert len(fiber(pb.proj.map, y)) == len(fiber(b.proj.map, y))


def test_pullback_bundle_base_mismatch():
    b = trivial_bundle(zmod(2), FinSet(("p",)))
    with pytest.raises(BaseMismatch):
        pullback_bundle(b, identity(FinSet(("z",))))


def test_pullback_of_twisted_bundle(rng):
    # twisting shuffles fibers but never changes the projection
    b0 = trivial_bundle(zmod(4), FinSet(("p", "q", "r")))
    b, h = twist_bundle(rng, b0)
    assert b.proj.map == b0.proj.map
    w = FinSet(("a", "b"))
    f = FinMap(w, b.base, {"a": "r", "b": "p"})
    pb = pullback_bundle(b, f)
    assert isinstance(pb, Bundle)
    assert len(pb.total.space) == 8
