"""Seeded generators for groups, covers, bundles and stack objects, plus the
corpus builders feeding verify_stack.

Everything here is deterministic given the Random instance passed in, so
test runs and CLI runs with the same seed see the same corpus. Generated
objects are always routed through the checking ops; nothing hand-assembled
escapes uncertified.
"""

from __future__ import annotations

import itertools
from random import Random
from typing import Optional

from .action import (
    EquivariantMap,
    FinGroup,
    GAction,
    check_action,
    check_equivariant,
    klein_four,
    orbits,
    subgroups,
    sym,
    trivial_action,
    zmod,
)
from .bundle import (
    Bundle,
    enumerate_bundles,
    is_principal_bundle,
    trivial_bundle,
)
from .descent import (
    Corpus,
    DescentDatum,
    restrict_to_datum,
)
from .errors import BoundExceeded, EquivarianceFail, TriangleFail
from .finset import (
    FinMap,
    FinSet,
    atom_key,
    compose,
    fiber,
    invert,
    product,
)
from .stack import (
    QSMorphism,
    QSObject,
    check_qs_morphism,
    check_qs_object,
    compose_qs,
    qs_identity,
    qs_inverse,
    restrict,
    restrict_morphism,
)
from .topology import (
    CoveringFamily,
    all_maps,
    is_jointly_surjective,
    point_cover,
)


def group_catalog(max_order: int = 6):
    """The stock groups used across tests: cyclic up to 6, Klein four, S3."""
    cat = [zmod(1), zmod(2), zmod(3), zmod(4), klein_four(), zmod(5), zmod(6), sym(3)]
    return [g for g in cat if len(g.carrier) <= max_order]


def random_finset(rng: Random, max_size: int, min_size: int = 0,
                  prefix: Optional[str] = None) -> FinSet:
    n = rng.randint(min_size, max_size)
    if prefix is None:
        return FinSet(range(n))
    return FinSet(f"{prefix}{i}" for i in range(n))


def random_map(rng: Random, src: FinSet, dst: FinSet) -> FinMap:
    if len(dst) == 0 and len(src) > 0:
        raise ValueError("no maps into the empty set from a nonempty one")
    return FinMap(src, dst, {a: rng.choice(dst.elements) for a in src})


def random_surjection(rng: Random, src: FinSet, dst: FinSet) -> FinMap:
    if len(src) < len(dst):
        raise ValueError("source too small to surject")
    if len(dst) == 0 and len(src) > 0:
        raise ValueError("no maps into the empty set from a nonempty one")
    picks = rng.sample(src.elements, len(dst))
    table = dict(zip(picks, dst.elements))
    for a in src:
        if a not in table:
            table[a] = rng.choice(dst.elements)
    return FinMap(src, dst, table)


def random_cover(rng: Random, target: FinSet, max_legs: int = 3,
                 max_extra: int = 2, surjective: bool = True) -> CoveringFamily:
    """A random family over the target. With surjective=True every target
    atom is assigned to some leg, so the family is canonical by construction;
    otherwise one atom's coverage is deliberately removed."""
    n_legs = rng.randint(1, max_legs)
    assignment = {y: rng.randrange(n_legs) for y in target}
    missing = rng.choice(target.elements) if (not surjective and len(target)) else None
    legs = []
    for i in range(n_legs):
        vals = [y for y in target if assignment[y] == i and y != missing]
        others = [y for y in target if y != missing]
        if others:
            vals += [rng.choice(others) for _ in range(rng.randint(0, max_extra))]
        src = FinSet(f"u{i}_{k}" for k in range(len(vals)))
        legs.append(FinMap(src, target, {f"u{i}_{k}": v for k, v in enumerate(vals)}))
    fam = CoveringFamily(target, legs)
    if surjective:
        assert is_jointly_surjective(fam)
    return fam


def _coset(group: FinGroup, a, sub) -> tuple:
    return tuple(sorted((group.times(a, h) for h in sub), key=atom_key))


def random_gset(rng: Random, group: FinGroup, max_size: int,
                stop: float = 0.3) -> GAction:
    """A random action assembled from coset orbits of random subgroups;
    atoms are (orbit index, coset) pairs."""
    subs = subgroups(group)
    order = len(group.carrier)
    chosen = []
    total = 0
    while total < max_size:
        options = [h for h in subs if order // len(h) <= max_size - total]
        if not options or (chosen and rng.random() < stop):
            break
        h = rng.choice(options)
        chosen.append(h)
        total += order // len(h)
    atoms = []
    table = {}
    for k, sub in enumerate(chosen):
        cosets = sorted({_coset(group, a, sub) for a in group.carrier},
                        key=atom_key)
        for c in cosets:
            atoms.append((k, c))
        for g in group.carrier:
            for c in cosets:
                table[(g, (k, c))] = (k, _coset(group, group.times(g, c[0]), sub))
    space = FinSet(atoms)
    act = FinMap(product(group.carrier, space).space, space, table)
    return check_action(group, space, act)


def random_gset_over(rng: Random, y: GAction, max_size: int,
                     stop: float = 0.3):
    """A random action with an equivariant map to y: each orbit is a coset
    space G/H for a subgroup H fixing a chosen point of y, mapping onto that
    point's orbit. Returns (action, certified map)."""
    group = y.group
    subs = subgroups(group)
    order = len(group.carrier)
    chosen = []
    total = 0
    while total < max_size and len(y.space):
        y0 = rng.choice(y.space.elements)
        stab = frozenset(h for h in group.carrier if y(h, y0) == y0)
        options = [h for h in subs
                   if set(h) <= stab and order // len(h) <= max_size - total]
        if not options or (chosen and rng.random() < stop):
            break
        h = rng.choice(options)
        chosen.append((h, y0))
        total += order // len(h)
    atoms = []
    act_table = {}
    map_table = {}
    for k, (sub, y0) in enumerate(chosen):
        cosets = sorted({_coset(group, a, sub) for a in group.carrier},
                        key=atom_key)
        for c in cosets:
            atoms.append((k, c))
            map_table[(k, c)] = y(c[0], y0)
        for g in group.carrier:
            for c in cosets:
                act_table[(g, (k, c))] = (k, _coset(group, group.times(g, c[0]), sub))
    space = FinSet(atoms)
    act = check_action(group, space,
                       FinMap(product(group.carrier, space).space, space, act_table))
    f = check_equivariant(FinMap(space, y.space, map_table), act, y)
    return act, f


def twist_bundle(rng: Random, b: Bundle):
    """Relabel a bundle by a random fiber-preserving permutation h of its
    total; returns the certified twist and h, which is an iso onto it."""
    perm = {}
    for y in b.base:
        fib = sorted(fiber(b.proj.map, y), key=atom_key)
        img = fib[:]
        rng.shuffle(img)
        perm.update(zip(fib, img))
    h = FinMap(b.total.space, b.total.space, perm)
    hinv = invert(h)
    prod = product(b.group.carrier, b.total.space)
    act = FinMap(prod.space, b.total.space,
                 {(g, q): h.table[b.total(g, hinv.table[q])] for (g, q) in prod.space})
    total2 = check_action(b.group, b.total.space, act)
    # h permutes within fibers, so the projection is untouched
    assert compose(b.proj.map, hinv) == b.proj.map
    proj2 = check_equivariant(b.proj.map, total2, b.proj.dst_action)
    b2 = is_principal_bundle(proj2)
    assert isinstance(b2, Bundle)
    return b2, h


def random_bundle(rng: Random, group: FinGroup, base: FinSet) -> Bundle:
    return twist_bundle(rng, trivial_bundle(group, base))[0]


def random_qsobject(rng: Random, group: FinGroup, x_action: GAction,
                    base: FinSet) -> QSObject:
    """A random object over the base: a twisted trivial bundle with an alpha
    chosen freely on one point per orbit and extended equivariantly."""
    if len(x_action.space) == 0 and len(base) > 0:
        raise ValueError("no structure map into an empty space")
    b = random_bundle(rng, group, base)
    table = {}
    for orb in orbits(b.total):
        x0 = rng.choice(x_action.space.elements)
        for g in group.carrier:
            table[b.total(g, orb[0])] = x_action(g, x0)
    alpha = FinMap(b.total.space, x_action.space, table)
    return check_qs_object(b, alpha, x_action)


def empty_object(group: FinGroup, x_action: GAction) -> QSObject:
    """The unique object over the empty base."""
    b = is_principal_bundle(trivial_bundle(group, FinSet(())).proj)
    assert isinstance(b, Bundle)
    alpha = FinMap(b.total.space, x_action.space, {})
    return check_qs_object(b, alpha, x_action)


def relabel_qsobject(rng: Random, obj: QSObject):
    """An isomorphic copy of the object with relabelled total, together with
    the iso onto it."""
    b2, h = twist_bundle(rng, obj.bundle)
    alpha2 = compose(obj.alpha.map, invert(h))
    obj2 = check_qs_object(b2, alpha2, obj.x_action)
    return obj2, check_qs_morphism(obj, obj2, h)


def fiber_gauge(obj: QSObject, k_by_base: dict) -> QSMorphism:
    """The automorphism acting on the fiber over y as the right translation
    by k_by_base[y] in the coordinates of the least fiber atom. Raises
    TriangleFail when some k moves the alpha values it must fix."""
    group = obj.bundle.group
    act = obj.bundle.total
    table = {}
    for y in obj.base:
        w0 = min(fiber(obj.bundle.proj.map, y), key=atom_key)
        k = k_by_base[y]
        for g in group.carrier:
            table[act(g, w0)] = act(group.times(g, k), w0)
    return check_qs_morphism(obj, obj, FinMap(obj.total, obj.total, table))


def constant_gauge(obj: QSObject, k) -> QSMorphism:
    return fiber_gauge(obj, {y: k for y in obj.base})


def conjugate_datum(datum: DescentDatum, leg_isos) -> DescentDatum:
    """Transport a datum along one iso per leg; the overlap isos are
    conjugated accordingly, so cocycle validity and the glued iso class are
    preserved."""
    leg_isos = list(leg_isos)
    cover = datum.cover
    n = len(cover.legs)
    if len(leg_isos) != n:
        raise ValueError("need exactly one iso per leg")
    for i, iso in enumerate(leg_isos):
        if iso.src != datum.objects[i]:
            raise ValueError(f"iso {i} does not start at the datum's object")
    from .descent import make_datum, overlap
    new_objects = tuple(iso.dst for iso in leg_isos)
    new_overlaps = {}
    for i in range(n):
        for j in range(n):
            cert = overlap(cover, i, j)
            lam_i = restrict_morphism(leg_isos[i], cert.proj1)
            lam_j = restrict_morphism(leg_isos[j], cert.proj2)
            new_overlaps[(i, j)] = compose_qs(
                lam_j, compose_qs(datum.overlap_iso(i, j), qs_inverse(lam_i)))
    return make_datum(cover, new_objects, new_overlaps)


def break_cocycle(datum: DescentDatum, k, rng: Optional[Random] = None) -> DescentDatum:
    """Twist one overlap iso by the right translation k != e; the result
    fails check_cocycle on some triple through that overlap."""
    candidates = [(i, j) for (i, j), iso in datum.overlaps.items()
                  if len(iso.src.total) > 0]
    if not candidates:
        raise ValueError("no nonempty overlap to twist")
    i, j = rng.choice(candidates) if rng is not None else min(candidates)
    group = datum.objects[0].bundle.group
    if k == group.unit_atom:
        raise ValueError("twisting by the unit changes nothing")
    twisted = dict(datum.overlaps)
    phi = datum.overlap_iso(i, j)
    twisted[(i, j)] = compose_qs(constant_gauge(phi.dst, k), phi)
    return DescentDatum(datum.cover, datum.objects, twisted)


def drop_leg(datum: DescentDatum) -> Optional[DescentDatum]:
    """Forget the last leg. Returns None when the rest still covers, else a
    datum over a non-canonical family, which gluing must refuse."""
    cover = datum.cover
    n = len(cover.legs)
    if n == 0:
        return None
    sub = CoveringFamily(cover.target, cover.legs[:-1])
    if is_jointly_surjective(sub):
        return None
    objects = datum.objects[:-1]
    overlaps = {(i, j): iso for (i, j), iso in datum.overlaps.items()
                if i < n - 1 and j < n - 1}
    return DescentDatum(sub, objects, overlaps)


def equivariant_maps(src: GAction, dst: GAction, bound: int = 4096):
    """All equivariant maps between two actions of the same group, by
    filtering the full function space; meant for small instances only."""
    total = len(dst.space) ** len(src.space)
    if total > bound:
        raise BoundExceeded("function space", total, bound)
    out = []
    for m in all_maps(src.space, dst.space):
        try:
            out.append(check_equivariant(m, src, dst))
        except EquivarianceFail:
            continue
    return out


def enumerate_qs_morphisms(a: QSObject, b: QSObject, bound: int = 65536):
    from .bundle import enumerate_bundle_morphisms
    out = []
    for bm in enumerate_bundle_morphisms(a.bundle, b.bundle, bound=bound):
        try:
            out.append(check_qs_morphism(a, b, bm.fn))
        except TriangleFail:
            continue
    return out


def build_corpus(group: FinGroup, x_action: GAction, rng: Random,
                 cases: int = 8, max_base: int = 3) -> Corpus:
    """A random verification corpus for [X/G].

    Each case contributes a round-trip datum, a leg-wise conjugated datum,
    a morphism gluing problem from a relabelled copy, and uniqueness pairs.
    When the structure space is a single point, gauge twists add distinct
    morphisms, cocycle violations and truncated covers as negative cases.
    """
    if len(x_action.space) == 0:
        raise ValueError("corpus needs a nonempty structure space")
    singleton_x = len(x_action.space) == 1
    corpus = Corpus()
    eobj = empty_object(group, x_action)
    corpus.effectiveness.append((restrict_to_datum(eobj, point_cover(eobj.base)), eobj))
    for _ in range(cases):
        base = FinSet(range(rng.randint(1, max_base)))
        obj = random_qsobject(rng, group, x_action, base)
        cover = point_cover(base) if rng.random() < 0.5 else random_cover(rng, base)
        datum = restrict_to_datum(obj, cover)
        corpus.effectiveness.append((datum, obj))
        leg_isos = []
        for i in range(len(cover.legs)):
            w = datum.objects[i]
            if rng.random() < 0.5 and len(w.total):
                leg_isos.append(relabel_qsobject(rng, w)[1])
            else:
                leg_isos.append(qs_identity(w))
        corpus.effectiveness.append((conjugate_datum(datum, leg_isos), obj))
        obj2, m = relabel_qsobject(rng, obj)
        locals_ = tuple(restrict_morphism(m, f) for f in cover.legs)
        corpus.morphism_gluings.append((cover, obj, obj2, locals_, m))
        corpus.uniqueness_pairs.append((cover, m, m))
        if singleton_x:
            k = rng.choice(group.carrier.elements)
            m2 = compose_qs(constant_gauge(obj2, k), m)
            locals2 = tuple(restrict_morphism(m2, f) for f in cover.legs)
            corpus.morphism_gluings.append((cover, obj, obj2, locals2, m2))
            if m2.fn != m.fn:
                corpus.uniqueness_pairs.append((cover, m, m2))
            nonunit = [g for g in group.carrier if g != group.unit_atom]
            if nonunit:
                corpus.invalid_data.append(
                    break_cocycle(datum, rng.choice(nonunit), rng=rng))
        bad = drop_leg(datum)
        if bad is not None:
            corpus.invalid_data.append(bad)
    return corpus


def exhaustive_corpus(group: FinGroup, x_action: GAction,
                      max_base: int = 2, bound: int = 4096) -> Corpus:
    """Every object, morphism and point-cover datum over bases of size up to
    max_base, paired into gluing and uniqueness cases exhaustively."""
    corpus = Corpus()
    nonunit = [g for g in group.carrier if g != group.unit_atom]
    singleton_x = len(x_action.space) == 1
    for size in range(max_base + 1):
        base = FinSet(range(size))
        cover = point_cover(base)
        objs = []
        for b in enumerate_bundles(group, base, bound=bound):
            for alpha in equivariant_maps(b.total, x_action, bound=bound):
                objs.append(QSObject(b, alpha))
        for o in objs:
            datum = restrict_to_datum(o, cover)
            corpus.effectiveness.append((datum, o))
            if size and nonunit and singleton_x:
                corpus.invalid_data.append(break_cocycle(datum, nonunit[0]))
        for a, b2 in itertools.product(objs, objs):
            ms = enumerate_qs_morphisms(a, b2, bound=bound)
            for m in ms:
                locals_ = tuple(restrict_morphism(m, f) for f in cover.legs)
                corpus.morphism_gluings.append((cover, a, b2, locals_, m))
            for m1, m2 in itertools.product(ms, ms):
                corpus.uniqueness_pairs.append((cover, m1, m2))
    return corpus
