"""Principal G-bundles over finite sets: local triviality certificates,
the torsor fast path, base change, and bundle morphisms.

A bundle is an equivariant map onto a trivially-acted base together with an
optional trivialization certificate: a canonical cover and, per leg, an
equivariant iso from the pulled-back action to the trivialized model G×U_i
over U_i. Certificates are stored, never recomputed behind the caller's back.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .action import (
    EquivariantMap,
    FinGroup,
    GAction,
    check_action,
    check_equivariant,
    gset_isomorphism_over,
    product_action,
    pullback_action,
    trivial_action,
)
from .errors import (
    BaseMismatch,
    BoundExceeded,
    CoverNotInTopology,
    EquivarianceFail,
    TriangleFail,
)
from .finset import (
    FinMap,
    FinSet,
    atom_key,
    compose,
    fiber,
    mediate_pullback,
    morphism_predicates,
    pair_map,
    product,
    pullback,
)
from .topology import (
    CoveringFamily,
    all_maps,
    is_canonical_cover,
    point_cover,
)


@functools.lru_cache(maxsize=None)
def _trivial_action_cached(group: FinGroup, space: FinSet) -> GAction:
    return trivial_action(group, space)


@functools.lru_cache(maxsize=None)
def _product_action_cached(group: FinGroup, u: FinSet) -> GAction:
    return product_action(group, u)


@functools.lru_cache(maxsize=None)
def _canonical_cover_cached(family: CoveringFamily, sample_budget: int) -> bool:
    return is_canonical_cover(family, sample_budget=sample_budget)


class TrivLeg(NamedTuple):
    """Per-leg trivialization: the pullback square over U_i and the
    equivariant iso phi from its apex onto the model G×U_i."""

    leg_index: int
    cert: object        # PullbackCert of (proj, leg)
    phi: FinMap         # apex -> G×U_i


@dataclass(frozen=True, eq=True)
class Trivialization:
    cover: CoveringFamily
    legs: tuple


@dataclass(frozen=True, eq=True)
class NotTrivial:
    """Witness that no trivializing iso exists over the given leg."""

    leg_index: int


@dataclass(frozen=True, eq=True)
class NotBundle:
    """Witness that some fiber is not a G-torsor."""

    base_atom: object
    reason: str


@dataclass(frozen=True, eq=True)
class Bundle:
    """A certified principal bundle."""

    group: FinGroup
    base: FinSet
    total: GAction
    proj: EquivariantMap
    trivialization: Optional[Trivialization] = None

    def __repr__(self):
        return f"Bundle(|{len(self.total.space)}| -> {self.base!r})"


def _require_trivial_base(proj: EquivariantMap) -> None:
    act = proj.dst_action
    if any(act(g, y) != y for g in act.group.carrier for y in act.space):
        raise ValueError("the base must carry the trivial action")


def is_locally_trivial(proj: EquivariantMap, cover: CoveringFamily,
                       sample_budget: int = 2) -> Union[Trivialization, NotTrivial]:
    """Search a trivializing iso over every leg of the cover.

    Raises CoverNotInTopology unless the cover is canonical. Returns the
    certificate, or NotTrivial naming the first leg with no iso.
    """
    _require_trivial_base(proj)
    if cover.target != proj.map.dst:
        raise BaseMismatch(f"cover target {cover.target!r} != base {proj.map.dst!r}")
    if not _canonical_cover_cached(cover, sample_budget):
        raise CoverNotInTopology(f"over {cover.target!r}")
    group = proj.src_action.group
    legs = []
    for i, f in enumerate(cover.legs):
        u = f.src
        cert = pullback(proj.map, f)
        triv_u = _trivial_action_cached(group, u)
        eq_f = check_equivariant(f, triv_u, proj.dst_action)
        psi = pullback_action(proj.src_action, triv_u, proj.dst_action, proj, eq_f)
        theta = _product_action_cached(group, u)
        pb = product(group.carrier, u).proj2
        phi = gset_isomorphism_over(psi, theta, cert.proj2, pb)
        if phi is None:
            return NotTrivial(i)
        legs.append(TrivLeg(i, cert, phi))
    return Trivialization(cover, tuple(legs))


def check_trivialization(proj: EquivariantMap, triv: Trivialization) -> None:
    """Re-verify a stored certificate: each phi is an equivariant iso over
    its leg. Linear in the stored tables."""
    group = proj.src_action.group
    for leg in triv.legs:
        f = triv.cover.legs[leg.leg_index]
        u = f.src
        triv_u = _trivial_action_cached(group, u)
        eq_f = check_equivariant(f, triv_u, proj.dst_action)
        psi = pullback_action(proj.src_action, triv_u, proj.dst_action, proj, eq_f)
        theta = _product_action_cached(group, u)
        if not morphism_predicates(leg.phi).iso:
            raise ValueError(f"stored phi over leg {leg.leg_index} is not an iso")
        check_equivariant(leg.phi, psi, theta)
        pb = product(group.carrier, u).proj2
        if compose(pb, leg.phi) != leg.cert.proj2:
            raise TriangleFail(leg.leg_index, "trivialization-base")


def _torsor_fibers(proj: EquivariantMap) -> Optional[NotBundle]:
    """The fast path: every fiber must be a free transitive G-set."""
    act = proj.src_action
    group = act.group
    e = group.unit_atom
    n = len(group.carrier)
    for x in proj.map.dst:
        fib = fiber(proj.map, x)
        if len(fib) != n:
            return NotBundle(x, f"fiber has {len(fib)} atoms, expected {n}")
        for p in fib:
            for g in group.carrier:
                if g != e and act(g, p) == p:
                    return NotBundle(x, "fiber action is not free")
        if fib and {act(g, fib[0]) for g in group.carrier} != set(fib):
            return NotBundle(x, "fiber action is not transitive")
    return None


def is_principal_bundle(proj: EquivariantMap) -> Union[Bundle, NotBundle]:
    """Decide bundlehood over the point cover of the base.

    The cover-based answer is authoritative; the torsor fast path is
    computed as well and asserted equal.
    """
    _require_trivial_base(proj)
    fast = _torsor_fibers(proj)
    cover = point_cover(proj.map.dst)
    slow = is_locally_trivial(proj, cover)
    assert isinstance(slow, Trivialization) == (fast is None), \
        "torsor fast path disagrees with the cover-based answer"
    if fast is not None:
        return fast
    return Bundle(proj.src_action.group, proj.map.dst,
                  proj.src_action, proj, slow)


def trivial_bundle(group: FinGroup, base: FinSet) -> Bundle:
    """The trivialized model G×X with the second projection."""
    total = _product_action_cached(group, base)
    proj = check_equivariant(product(group.carrier, base).proj2,
                             total, _trivial_action_cached(group, base))
    out = is_principal_bundle(proj)
    assert isinstance(out, Bundle)
    return out


def pullback_bundle(b: Bundle, f: FinMap) -> Bundle:
    """Base change of a bundle along f, with the trivialization transported
    along the pulled-back cover when one is stored."""
    if f.dst != b.base:
        raise BaseMismatch(f"{f.dst!r} != {b.base!r}")
    group = b.group
    z = f.src
    cert = pullback(b.proj.map, f)
    triv_z = _trivial_action_cached(group, z)
    eq_f = check_equivariant(f, triv_z, b.proj.dst_action)
    psi = pullback_action(b.total, triv_z, b.proj.dst_action, b.proj, eq_f)
    new_proj = check_equivariant(cert.proj2, psi, triv_z)
    if b.trivialization is None:
        out = is_principal_bundle(new_proj)
        assert isinstance(out, Bundle)
        return out
    new_legs = []
    pulled = []
    for leg in b.trivialization.legs:
        g_i = b.trivialization.cover.legs[leg.leg_index]
        pcert = pullback(g_i, f)              # V_i×_Y Z, atoms (v, z)
        pulled.append(pcert.proj2)
        ncert = pullback(cert.proj2, pcert.proj2)   # atoms ((p,z),(v,z))
        q = pullback(b.proj.map, g_i)
        to_pv = mediate_pullback(
            q,
            compose(cert.proj1, ncert.proj1),       # ((p,z),(v,z)) -> p
            compose(pcert.proj1, ncert.proj2),      # ((p,z),(v,z)) -> v
        )
        s1 = compose(product(group.carrier, g_i.src).proj1,
                     compose(leg.phi, to_pv))
        phi_new = pair_map(s1, ncert.proj2,
                           product(group.carrier, pcert.apex))
        new_legs.append(TrivLeg(leg.leg_index, ncert, phi_new))
    new_cover = CoveringFamily(z, pulled)
    triv = Trivialization(new_cover, tuple(new_legs))
    out = Bundle(group, z, psi, new_proj, triv)
    check_trivialization(new_proj, triv)
    assert _torsor_fibers(new_proj) is None
    return out


@dataclass(frozen=True, eq=True)
class BundleMorphism:
    """A certified map of bundles over a common base."""

    src: Bundle
    dst: Bundle
    map: EquivariantMap

    @property
    def fn(self) -> FinMap:
        return self.map.map

    def __repr__(self):
        return f"BundleMorphism({self.src!r} => {self.dst!r})"


def check_bundle_morphism(src: Bundle, dst: Bundle, m: FinMap) -> BundleMorphism:
    """Certify equivariance and the triangle over the base."""
    if src.group != dst.group:
        raise ValueError("bundles are for different groups")
    if src.base != dst.base:
        raise BaseMismatch(f"{src.base!r} != {dst.base!r}")
    for p in src.total.space:
        if dst.proj.map.table[m.table[p]] != src.proj.map.table[p]:
            raise TriangleFail(p, "proj")
    eq = check_equivariant(m, src.total, dst.total)
    return BundleMorphism(src, dst, eq)


def enumerate_bundle_morphisms(src: Bundle, dst: Bundle,
                               bound: int = 65536) -> list:
    """All bundle morphisms src => dst, by brute enumeration and filtering."""
    if src.group != dst.group:
        raise ValueError("bundles are for different groups")
    if src.base != dst.base:
        raise BaseMismatch(f"{src.base!r} != {dst.base!r}")
    n, k = len(dst.total.space), len(src.total.space)
    count = n ** k
    if count > bound:
        raise BoundExceeded("bundle-morphism enumeration", count, bound)
    out = []
    for m in all_maps(src.total.space, dst.total.space):
        try:
            out.append(check_bundle_morphism(src, dst, m))
        except (TriangleFail, EquivarianceFail):
            continue
    return out


@functools.lru_cache(maxsize=None)
def torsor_structures(group: FinGroup) -> tuple:
    """The distinct free transitive actions of G on its own carrier,
    as act tables; there are (|G|-1)! of them."""
    atoms = list(group.carrier)
    seen = {}
    for beta in itertools.permutations(atoms):
        b = dict(zip(atoms, beta))
        binv = {v: k for k, v in b.items()}
        table = {(g, h): b[group.times(g, binv[h])]
                 for g in atoms for h in atoms}
        key = tuple(sorted(table.items(), key=lambda kv: atom_key(kv[0])))
        seen.setdefault(key, table)
    out = tuple(seen.values())
    n = len(atoms)
    expected = 1
    for i in range(1, n):
        expected *= i
    assert len(out) == expected
    return out


def enumerate_bundles(group: FinGroup, base: FinSet,
                      bound: int = 65536) -> list:
    """All principal G-bundles on the canonical total set G×base with the
    canonical projection, one torsor structure per fiber.

    Up to iso this is every bundle over the base: any balanced projection
    relabels to the canonical one along a fiber-preserving bijection (the
    reduction is itself exercised in the tests).
    """
    prod = product(group.carrier, base)
    structures = torsor_structures(group)
    count = len(structures) ** len(base)
    if count > bound:
        raise BoundExceeded("bundle enumeration", count, bound)
    triv_base = _trivial_action_cached(group, base)
    out = []
    for choice in itertools.product(range(len(structures)), repeat=len(base)):
        table = {}
        for g in group.carrier:
            for (h, x) in prod.space:
                s = structures[choice[list(base).index(x)]]
                table[(g, (h, x))] = (s[(g, h)], x)
        act = check_action(group, prod.space,
                           FinMap(product(group.carrier, prod.space).space,
                                  prod.space, table))
        proj = check_equivariant(prod.proj2, act, triv_base)
        bundle = is_principal_bundle(proj)
        assert isinstance(bundle, Bundle)
        out.append(bundle)
    return out
