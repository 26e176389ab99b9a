"""Finite sets and total maps, with the limits and colimits the rest of the
package is built from.

Atoms are ints, strings, or tuples of atoms. Derived constructions name their
atoms canonically: products and pullbacks use pair tuples (a, b), coproducts
use Tag(part, atom), coequalizers pick the least representative of each class.
Everything is deterministic: same inputs, byte-for-byte same outputs.
"""

from __future__ import annotations

import functools
from typing import Iterable, NamedTuple, Union

from .errors import (
    CodomainMismatch,
    DanglingArrow,
    NotCoequalized,
    ShapeMismatch,
    SquareNotCommuting,
    SrcDstMismatch,
    SrcMismatch,
)

Atom = Union[int, str, tuple]


class Tag(NamedTuple):
    """A coproduct atom: `atom` from part number `part`."""

    part: int
    atom: Atom


def atom_key(a):
    """Sort key giving a total order on atoms: ints, then strs, then tuples."""
    if isinstance(a, int):
        return (0, a)
    if isinstance(a, str):
        return (1, a)
    return (2, tuple(atom_key(x) for x in a))


def format_atom(a) -> str:
    if isinstance(a, Tag):
        return f"{a.part}·{format_atom(a.atom)}"
    if isinstance(a, tuple):
        return "(" + ",".join(format_atom(x) for x in a) + ")"
    return str(a)


class FinSet:
    """An explicit finite set of atoms, kept in canonical sorted order."""

    __slots__ = ("elements", "_index")

    def __init__(self, elements: Iterable[Atom] = ()):
        elems = tuple(sorted(elements, key=atom_key))
        for a, b in zip(elems, elems[1:]):
            if a == b:
                raise ValueError(f"duplicate atom {format_atom(a)}")
        self.elements = elems
        self._index = frozenset(elems)

    def __contains__(self, a) -> bool:
        return a in self._index

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinSet) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return "{" + " ".join(format_atom(a) for a in self.elements) + "}"


class FinMap:
    """A total map between finite sets, given by an explicit table."""

    __slots__ = ("src", "dst", "table")

    def __init__(self, src: FinSet, dst: FinSet, table):
        table = dict(table)
        if len(table) != len(src) or any(a not in src for a in table):
            raise ValueError("table keys must be exactly the source atoms")
        for a, v in table.items():
            if v not in dst:
                raise ValueError(
                    f"table value {format_atom(v)} at {format_atom(a)} not in target")
        self.src, self.dst, self.table = src, dst, table

    def __call__(self, a):
        return self.table[a]

    def __eq__(self, other) -> bool:
        return (isinstance(other, FinMap) and self.src == other.src
                and self.dst == other.dst and self.table == other.table)

    def __hash__(self):
        return hash((self.src, self.dst, tuple(self.table[a] for a in self.src)))

    def __repr__(self) -> str:
        if len(self.src) <= 6:
            body = " ".join(
                f"{format_atom(a)}->{format_atom(self.table[a])}" for a in self.src)
            return f"FinMap({body} : {self.src!r} -> {self.dst!r})"
        return f"FinMap(|{len(self.src)}| -> |{len(self.dst)}|)"

    def image(self) -> FinSet:
        return FinSet(set(self.table.values()))


@functools.lru_cache(maxsize=None)
def identity(a: FinSet) -> FinMap:
    return FinMap(a, a, {x: x for x in a})


def compose(g: FinMap, f: FinMap) -> FinMap:
    """g after f."""
    if f.dst != g.src:
        raise SrcDstMismatch(f"cannot compose: {f.dst!r} != {g.src!r}")
    return FinMap(f.src, g.dst, {a: g.table[f.table[a]] for a in f.src})


@functools.lru_cache(maxsize=1)
def terminal() -> FinSet:
    return FinSet(("*",))


def bang(a: FinSet) -> FinMap:
    """The unique map to the terminal set."""
    return FinMap(a, terminal(), {x: "*" for x in a})


def fiber(f: FinMap, y) -> tuple:
    """Atoms of src sent to y, in canonical order."""
    return tuple(a for a in f.src if f.table[a] == y)


def is_mono(f: FinMap) -> bool:
    return len(set(f.table.values())) == len(f.src)


def is_epi(f: FinMap) -> bool:
    return set(f.table.values()) == set(f.dst.elements)


class MapPredicates(NamedTuple):
    mono: bool
    epi: bool
    iso: bool


def morphism_predicates(f: FinMap) -> MapPredicates:
    m, e = is_mono(f), is_epi(f)
    return MapPredicates(m, e, m and e)


def invert(f: FinMap) -> FinMap:
    if not (is_mono(f) and is_epi(f)):
        raise ValueError("cannot invert a non-bijective map")
    return FinMap(f.dst, f.src, {v: a for a, v in f.table.items()})


# ------------------------------------------------------------------ limits ---

class Product(NamedTuple):
    space: FinSet
    proj1: FinMap
    proj2: FinMap


@functools.lru_cache(maxsize=65536)
def product(a: FinSet, b: FinSet) -> Product:
    """Cartesian product with pair atoms (x, y)."""
    pairs = [(x, y) for x in a for y in b]
    space = FinSet(pairs)
    return Product(
        space,
        FinMap(space, a, {p: p[0] for p in space}),
        FinMap(space, b, {p: p[1] for p in space}),
    )


def pair_map(u: FinMap, v: FinMap, prod: Product | None = None) -> FinMap:
    """The mediating map <u, v> into product(u.dst, v.dst)."""
    if u.src != v.src:
        raise SrcMismatch(f"{u.src!r} != {v.src!r}")
    if prod is None:
        prod = product(u.dst, v.dst)
    return FinMap(u.src, prod.space, {s: (u.table[s], v.table[s]) for s in u.src})


def product_map(f: FinMap, g: FinMap) -> FinMap:
    """f × g between canonical product sets."""
    src = product(f.src, g.src)
    dst = product(f.dst, g.dst)
    return FinMap(src.space, dst.space,
                  {(x, y): (f.table[x], g.table[y]) for (x, y) in src.space})


class PullbackCert(NamedTuple):
    """Pullback of f and g: apex of pairs (a, b) with f(a) = g(b)."""

    apex: FinSet
    proj1: FinMap
    proj2: FinMap
    f: FinMap
    g: FinMap


@functools.lru_cache(maxsize=65536)
def pullback(f: FinMap, g: FinMap) -> PullbackCert:
    if f.dst != g.dst:
        raise CodomainMismatch(f"{f.dst!r} != {g.dst!r}")
    pairs = [(a, b) for a in f.src for b in g.src if f.table[a] == g.table[b]]
    apex = FinSet(pairs)
    return PullbackCert(
        apex,
        FinMap(apex, f.src, {p: p[0] for p in apex}),
        FinMap(apex, g.src, {p: p[1] for p in apex}),
        f, g,
    )


def mediate_pullback(cert: PullbackCert, u: FinMap, v: FinMap) -> FinMap:
    """The unique t with proj1 ∘ t = u and proj2 ∘ t = v."""
    if u.src != v.src:
        raise SrcMismatch(f"{u.src!r} != {v.src!r}")
    if u.dst != cert.f.src or v.dst != cert.g.src:
        raise SrcDstMismatch("mediating legs do not land in the pullback feet")
    for s in u.src:
        left, right = cert.f.table[u.table[s]], cert.g.table[v.table[s]]
        if left != right:
            raise SquareNotCommuting(s, left, right)
    return FinMap(u.src, cert.apex, {s: (u.table[s], v.table[s]) for s in u.src})


# ---------------------------------------------------------------- colimits ---

class Coproduct(NamedTuple):
    space: FinSet
    injections: tuple


def coproduct(parts: Iterable[FinSet]) -> Coproduct:
    """Disjoint union with atoms Tag(i, a)."""
    parts = tuple(parts)
    atoms = [Tag(i, a) for i, p in enumerate(parts) for a in p]
    space = FinSet(atoms)
    injections = tuple(
        FinMap(p, space, {a: Tag(i, a) for a in p}) for i, p in enumerate(parts))
    return Coproduct(space, injections)


def copair(cop: Coproduct, maps, dst: FinSet | None = None) -> FinMap:
    """The map out of a coproduct assembled from one map per part."""
    maps = tuple(maps)
    if len(maps) != len(cop.injections):
        raise ValueError("need exactly one map per coproduct part")
    if dst is None:
        if not maps:
            raise ValueError("empty coproduct needs an explicit target")
        dst = maps[0].dst
    table = {}
    for i, (inj, h) in enumerate(zip(cop.injections, maps)):
        if h.dst != dst:
            raise SrcDstMismatch(f"part {i} lands in {h.dst!r}, expected {dst!r}")
        if h.src != inj.src:
            raise SrcDstMismatch(f"part {i} has source {h.src!r}, expected {inj.src!r}")
        for a in inj.src:
            table[Tag(i, a)] = h.table[a]
    return FinMap(cop.space, dst, table)


class _UnionFind:
    """Union-find over atoms with path compression; rank-free, sizes are tiny."""

    def __init__(self, atoms):
        self.parent = {a: a for a in atoms}

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the least atom as the root so representatives are canonical
            if atom_key(rb) < atom_key(ra):
                ra, rb = rb, ra
            self.parent[rb] = ra


class CoequalizerCert(NamedTuple):
    """Coequalizer of a parallel pair: quotient by the generated relation."""

    gamma1: FinMap
    gamma2: FinMap
    quotient: FinSet
    proj: FinMap


def coequalizer(gamma1: FinMap, gamma2: FinMap) -> CoequalizerCert:
    if gamma1.src != gamma2.src or gamma1.dst != gamma2.dst:
        raise ShapeMismatch("coequalizer needs a parallel pair")
    uf = _UnionFind(gamma1.dst)
    for a in gamma1.src:
        uf.union(gamma1.table[a], gamma2.table[a])
    proj_table = {a: uf.find(a) for a in gamma1.dst}
    quotient = FinSet(set(proj_table.values()))
    return CoequalizerCert(
        gamma1, gamma2, quotient, FinMap(gamma1.dst, quotient, proj_table))


def mediate_coequalizer(cert: CoequalizerCert, d: FinMap) -> FinMap:
    """The unique m with m ∘ proj = d, for d coequalizing the pair."""
    if d.src != cert.proj.src:
        raise SrcDstMismatch(f"{d.src!r} != {cert.proj.src!r}")
    for a in cert.gamma1.src:
        left, right = d.table[cert.gamma1.table[a]], d.table[cert.gamma2.table[a]]
        if left != right:
            raise NotCoequalized(a, left, right)
    # class representatives are atoms of d's source, so evaluate d on them
    return FinMap(cert.quotient, d.dst, {q: d.table[q] for q in cert.quotient})


class Colimit(NamedTuple):
    space: FinSet
    cocone: tuple


def colimit_of_diagram(objects, arrows) -> Colimit:
    """Colimit of a finite diagram, via the standard coequalizer of coproducts.

    objects: list of FinSet. arrows: list of (src_index, dst_index, FinMap).
    Returns the colimit set and one cocone leg per object.
    """
    objects = tuple(objects)
    arrows = tuple(arrows)
    for i, j, m in arrows:
        if not (0 <= i < len(objects) and 0 <= j < len(objects)):
            raise DanglingArrow(f"arrow endpoints ({i},{j}) out of range")
        if m.src != objects[i] or m.dst != objects[j]:
            raise DanglingArrow(f"arrow ({i},{j}) table does not match its endpoints")
    cop_objects = coproduct(objects)
    cop_sources = coproduct([objects[i] for i, _, _ in arrows])
    left = copair(cop_sources,
                  [cop_objects.injections[i] for i, _, _ in arrows],
                  dst=cop_objects.space)
    right = copair(cop_sources,
                   [compose(cop_objects.injections[j], m) for _, j, m in arrows],
                   dst=cop_objects.space)
    cert = coequalizer(left, right)
    cocone = tuple(compose(cert.proj, inj) for inj in cop_objects.injections)
    return Colimit(cert.quotient, cocone)
