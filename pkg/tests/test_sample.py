"""Generator determinism and the shapes of generated corpora."""

from random import Random

import pytest

from finstack import (
    BoundExceeded,
    FinSet,
    TriangleFail,
    is_canonical_cover,
    is_jointly_surjective,
    regular_action,
    terminal,
    trivial_action,
    zmod,
)
from finstack.sample import (
    build_corpus,
    equivariant_maps,
    exhaustive_corpus,
    fiber_gauge,
    group_catalog,
    random_bundle,
    random_cover,
    random_finset,
    random_gset,
    random_map,
    random_qsobject,
    random_surjection,
    twist_bundle,
)


def test_same_seed_same_corpus():
    z2 = zmod(2)
    x = trivial_action(z2, terminal())
    c1 = build_corpus(z2, x, Random(99), cases=3)
    c2 = build_corpus(z2, x, Random(99), cases=3)
    assert [d for d, _ in c1.effectiveness] == [d for d, _ in c2.effectiveness]
    assert len(c1.uniqueness_pairs) == len(c2.uniqueness_pairs)
    assert len(c1.invalid_data) == len(c2.invalid_data)


def test_same_seed_same_gset():
    z4 = zmod(4)
    a = random_gset(Random(5), z4, 6)
    b = random_gset(Random(5), z4, 6)
    assert a == b


def test_random_map_total(rng):
    src = random_finset(rng, 5)
    dst = random_finset(rng, 5, min_size=1)
    m = random_map(rng, src, dst)
    assert set(m.table) == set(src.elements)


def test_random_surjection(rng):
    for _ in range(20):
        dst = random_finset(rng, 3, min_size=1)
        src = random_finset(rng, 6, min_size=len(dst))
        s = random_surjection(rng, src, dst)
        assert set(s.table.values()) == set(dst.elements)
    with pytest.raises(ValueError):
        random_surjection(rng, FinSet((0,)), FinSet(("a", "b")))


def test_random_cover_canonical(rng):
    for _ in range(20):
        target = random_finset(rng, 4, min_size=1)
        cov = random_cover(rng, target)
        assert is_canonical_cover(cov)
        holed = random_cover(rng, target, surjective=False)
        assert not is_jointly_surjective(holed)


def test_twist_preserves_projection(rng):
    b0 = random_bundle(rng, zmod(3), FinSet(("p", "q")))
    b1, h = twist_bundle(rng, b0)
    assert b1.proj.map == b0.proj.map
    assert set(h.table) == set(b0.total.space.elements)


def test_fiber_gauge_guards_alpha(rng):
    z2 = zmod(2)
    x = regular_action(z2)
    obj = random_qsobject(rng, z2, x, terminal())
    if len(set(obj.alpha.map.table.values())) > 1:
        with pytest.raises(TriangleFail):
            fiber_gauge(obj, {"*": 1})
    triv_x = trivial_action(z2, terminal())
    obj2 = random_qsobject(rng, z2, triv_x, FinSet(("p",)))
    g = fiber_gauge(obj2, {"p": 1})
    assert g.fn != g.src.total and g.src == obj2


def test_equivariant_map_count():
    z2 = zmod(2)
    reg = regular_action(z2)
    ms = equivariant_maps(reg, reg)
    assert len(ms) == 2  # determined by the image of the unit
    with pytest.raises(BoundExceeded):
        equivariant_maps(
            trivial_action(z2, FinSet(tuple(range(8)))),
            trivial_action(z2, FinSet(tuple(range(8)))), bound=10)


def test_group_catalog_is_certified():
    for g in group_catalog():
        assert g.times(g.unit_atom, g.unit_atom) == g.unit_atom


def test_exhaustive_corpus_counts():
    z2 = zmod(2)
    x = trivial_action(z2, terminal())
    c = exhaustive_corpus(z2, x, max_base=1)
    # bases {} and {0}: one object each, point covers
    assert len(c.effectiveness) == 2
    assert len(c.invalid_data) >= 1
    assert all(len(pair) == 3 for pair in c.uniqueness_pairs)


def test_build_corpus_has_all_conditions(rng):
    z3 = zmod(3)
    x = trivial_action(z3, terminal())
    c = build_corpus(z3, x, rng, cases=5)
    assert len(c.effectiveness) >= 6  # empty base plus one per case
    assert len(c.morphism_gluings) >= 5
    assert len(c.uniqueness_pairs) >= 5
    assert len(c.invalid_data) >= 1
