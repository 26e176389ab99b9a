"""Group objects in finite sets and their actions.

A group is a Cayley table certified by check_group; an action is a map
G×X -> X certified by check_action against both action diagrams, evaluated
pointwise. Equivariant maps are certified squares.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .errors import (
    AssocFail,
    EquivarianceFail,
    NoInverse,
    NotAssociative,
    NoUnit,
    UnitFail,
)
from .finset import (
    FinMap,
    FinSet,
    atom_key,
    compose,
    identity,
    mediate_pullback,
    product,
    product_map,
    pullback,
    terminal,
)


@dataclass(frozen=True, eq=True)
class FinGroup:
    """A group object: carrier with multiplication, unit and inverse tables.

    Only check_group constructs these, so holding a FinGroup is holding a
    certificate that the axioms were verified.
    """

    carrier: FinSet
    mul: FinMap
    unit: FinMap
    inv: FinMap

    @property
    def unit_atom(self):
        return self.unit.table["*"]

    def times(self, a, b):
        return self.mul.table[(a, b)]

    def inv_of(self, a):
        return self.inv.table[a]

    def __repr__(self):
        return f"FinGroup({self.carrier!r})"


def check_group(carrier: FinSet, mul: FinMap) -> FinGroup:
    """Certify a Cayley table, synthesizing unit and inverse maps.

    Raises NotAssociative(a,b,c), NoUnit, or NoInverse(a) at the first
    failed axiom, scanned in that order over the canonical atom order.
    """
    prod = product(carrier, carrier)
    if mul.src != prod.space or mul.dst != carrier:
        raise ValueError("multiplication must be a map G×G -> G")
    t = mul.table
    for a in carrier:
        for b in carrier:
            ab = t[(a, b)]
            for c in carrier:
                if t[(ab, c)] != t[(a, t[(b, c)])]:
                    raise NotAssociative(a, b, c)
    unit_atom = None
    for e in carrier:
        if all(t[(e, a)] == a and t[(a, e)] == a for a in carrier):
            unit_atom = e
            break
    if unit_atom is None:
        raise NoUnit()
    inv_table = {}
    for a in carrier:
        found = None
        for b in carrier:
            if t[(a, b)] == unit_atom and t[(b, a)] == unit_atom:
                found = b
                break
        if found is None:
            raise NoInverse(a)
        inv_table[a] = found
    return FinGroup(
        carrier, mul,
        FinMap(terminal(), carrier, {"*": unit_atom}),
        FinMap(carrier, carrier, inv_table),
    )


def group_from_table(elements, rows) -> FinGroup:
    """Build and certify a group from elements and a row-major Cayley table."""
    carrier = FinSet(elements)
    order = list(elements)
    if len(rows) != len(order) or any(len(r) != len(order) for r in rows):
        raise ValueError("table must be square over the given elements")
    prod = product(carrier, carrier)
    table = {}
    for i, a in enumerate(order):
        for j, b in enumerate(order):
            table[(a, b)] = rows[i][j]
    return check_group(carrier, FinMap(prod.space, carrier, table))


def zmod(n: int) -> FinGroup:
    elems = list(range(n))
    return group_from_table(elems, [[(i + j) % n for j in elems] for i in elems])


def klein_four() -> FinGroup:
    # xor on {0,1,2,3} is Z/2 × Z/2
    elems = [0, 1, 2, 3]
    return group_from_table(elems, [[i ^ j for j in elems] for i in elems])


def sym(n: int) -> FinGroup:
    """Symmetric group on n letters, elements numbered in itertools order."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    rows = [[index[tuple(p[q[k]] for k in range(n))] for q in perms] for p in perms]
    return group_from_table(list(range(len(perms))), rows)


def subgroups(g: FinGroup):
    """All subgroups as tuples of atoms; exhaustive, fine for |G| <= 8."""
    atoms = list(g.carrier)
    e = g.unit_atom
    rest = [a for a in atoms if a != e]
    found = []
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            sub = {e, *extra}
            if all(g.times(a, b) in sub for a in sub for b in sub):
                found.append(tuple(sorted(sub, key=atom_key)))
    return found


# ----------------------------------------------------------------- actions ---

@dataclass(frozen=True, eq=True)
class GAction:
    """A certified action: act : G×X -> X satisfying both action diagrams."""

    group: FinGroup
    space: FinSet
    act: FinMap

    def __call__(self, g, x):
        return self.act.table[(g, x)]

    def __repr__(self):
        return f"GAction({self.group!r} on {self.space!r})"


def check_action(group: FinGroup, space: FinSet, act: FinMap) -> GAction:
    """Certify act against both diagrams, pointwise over G×G×X and T×X.

    Raises AssocFail(g,h,x) or UnitFail(x) with the first witness.
    """
    prod = product(group.carrier, space)
    if act.src != prod.space or act.dst != space:
        raise ValueError("action must be a map G×X -> X")
    t = act.table
    for g in group.carrier:
        for h in group.carrier:
            gh = group.times(g, h)
            for x in space:
                if t[(gh, x)] != t[(g, t[(h, x)])]:
                    raise AssocFail(g, h, x)
    e = group.unit_atom
    for x in space:
        if t[(e, x)] != x:
            raise UnitFail(x)
    return GAction(group, space, act)


def action_from_function(group: FinGroup, space: FinSet, fn) -> GAction:
    prod = product(group.carrier, space)
    return check_action(
        group, space,
        FinMap(prod.space, space, {(g, x): fn(g, x) for (g, x) in prod.space}))


def trivial_action(group: FinGroup, space: FinSet) -> GAction:
    return action_from_function(group, space, lambda g, x: x)


def regular_action(group: FinGroup) -> GAction:
    """G acting on itself by left multiplication."""
    return GAction(group, group.carrier, group.mul)


def orbits(a: GAction):
    """Orbit partition of the space, each orbit sorted, listed by least atom."""
    seen = set()
    out = []
    for x in a.space:
        if x in seen:
            continue
        orb = sorted({a(g, x) for g in a.group.carrier}, key=atom_key)
        seen.update(orb)
        out.append(tuple(orb))
    return out


@dataclass(frozen=True, eq=True)
class EquivariantMap:
    """A certified equivariant map between two actions of the same group."""

    map: FinMap
    src_action: GAction
    dst_action: GAction

    @property
    def fn(self) -> FinMap:
        return self.map

    def __call__(self, x):
        return self.map.table[x]

    def __repr__(self):
        return f"EquivariantMap({self.map.src!r} -> {self.map.dst!r})"


def check_equivariant(f: FinMap, a: GAction, b: GAction) -> EquivariantMap:
    """Certify f(a.act(g,x)) = b.act(g, f(x)) for all g, x."""
    if a.group != b.group:
        raise ValueError("actions are for different groups")
    if f.src != a.space or f.dst != b.space:
        raise ValueError("map endpoints do not match the action spaces")
    for g in a.group.carrier:
        for x in a.space:
            if f.table[a(g, x)] != b(g, f.table[x]):
                raise EquivarianceFail(g, x)
    return EquivariantMap(f, a, b)


def pullback_action(p: GAction, z: GAction, y: GAction,
                    f: EquivariantMap, g: EquivariantMap) -> GAction:
    """The induced action on the pullback P×_Y Z of f along g.

    The structure map is the mediating map of (act_P ∘ (id×proj1),
    act_Z ∘ (id×proj2)) into the pullback, then certified as an action.
    """
    if f.src_action != p or f.dst_action != y:
        raise ValueError("f must be an equivariant map P -> Y")
    if g.src_action != z or g.dst_action != y:
        raise ValueError("g must be an equivariant map Z -> Y")
    group = p.group
    cert = pullback(f.map, g.map)
    u = compose(p.act, product_map(identity(group.carrier), cert.proj1))
    v = compose(z.act, product_map(identity(group.carrier), cert.proj2))
    psi = mediate_pullback(cert, u, v)
    return check_action(group, cert.apex, psi)


def product_action(group: FinGroup, u: FinSet) -> GAction:
    """The trivialized model: G acting on G×U by g·(h, u) = (gh, u)."""
    space = product(group.carrier, u).space
    return action_from_function(
        group, space, lambda g, hu: (group.times(g, hu[0]), hu[1]))


def gset_isomorphism_over(a: GAction, b: GAction,
                          pa: FinMap, pb: FinMap) -> Optional[FinMap]:
    """Search for an equivariant bijection h with pb ∘ h = pa.

    Backtracks over orbit representatives; deterministic (orbits and
    candidates in canonical order). Returns None when no such map exists.
    """
    if a.group != b.group:
        raise ValueError("actions are for different groups")
    if pa.src != a.space or pb.src != b.space or pa.dst != pb.dst:
        raise ValueError("projections must share a target and match the spaces")
    if len(a.space) != len(b.space):
        return None
    group = a.group.carrier
    orbs = orbits(a)
    assignment: dict = {}

    def try_rep(rep, y):
        # propagate the orbit of rep through the candidate image y
        local = {}
        for g in group:
            x2, y2 = a(g, rep), b(g, y)
            if local.get(x2, y2) != y2:
                return None
            local[x2] = y2
        for x2, y2 in local.items():
            if pb.table[y2] != pa.table[x2]:
                return None
        if len(set(local.values())) != len(local):
            return None
        if any(y2 in assignment.values() for y2 in local.values()):
            return None
        return local

    def search(k):
        if k == len(orbs):
            return True
        rep = orbs[k][0]
        for y in b.space:
            if pb.table[y] != pa.table[rep]:
                continue
            local = try_rep(rep, y)
            if local is None:
                continue
            assignment.update(local)
            if search(k + 1):
                return True
            for x2 in local:
                del assignment[x2]
        return False

    if not search(0):
        return None
    h = FinMap(a.space, b.space, assignment)
    # sound by construction, but verify anyway: the caller gets a certificate
    check_equivariant(h, a, b)
    assert compose(pb, h) == pa
    assert len(set(h.table.values())) == len(h.src)
    return h
