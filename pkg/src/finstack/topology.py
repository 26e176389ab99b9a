"""The canonical topology on finite sets: covering families, generated
sieves, effective epimorphisms, colim sieves, and the sheaf condition.

Sieves are kept intensionally as their generating family; membership is
decided by factorization through a generator, which for finite sets reduces
to an image-containment test that also produces the witness.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import BoundExceeded, TargetMismatch
from .finset import (
    FinMap,
    FinSet,
    Tag,
    coequalizer,
    compose,
    coproduct,
    copair,
    fiber,
    is_epi,
    mediate_coequalizer,
    morphism_predicates,
    pullback,
)


@dataclass(frozen=True, eq=True)
class CoveringFamily:
    """A finite family of maps into a common target.

    May be empty; over the canonical topology the empty family only covers
    the empty target.
    """

    target: FinSet
    legs: tuple

    def __init__(self, target, legs):
        legs = tuple(legs)
        for i, f in enumerate(legs):
            if f.dst != target:
                raise TargetMismatch(f"leg {i} has target {f.dst!r}, expected {target!r}")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "legs", legs)

    def __len__(self):
        return len(self.legs)


def point_cover(target: FinSet) -> CoveringFamily:
    """One leg T -> target per atom; the default cover for bundle checks."""
    from .finset import terminal
    t = terminal()
    return CoveringFamily(
        target, [FinMap(t, target, {"*": x}) for x in target])


@dataclass(frozen=True, eq=True)
class GeneratedSieve:
    """The sieve generated by a covering family, kept intensionally."""

    family: CoveringFamily

    @property
    def target(self):
        return self.family.target


class SieveWitness(NamedTuple):
    """Factorization g = leg ∘ via exhibiting sieve membership."""

    leg_index: int
    via: FinMap


def sieve_member(s: GeneratedSieve, g: FinMap) -> Optional[SieveWitness]:
    """Decide membership of g in the sieve; returns the witness or None.

    g factors through leg f iff im(g) ⊆ im(f); the factorization picks the
    least preimage of each value, so the witness is canonical.
    """
    if g.dst != s.target:
        raise TargetMismatch(f"{g.dst!r} is not the sieve target {s.target!r}")
    for i, f in enumerate(s.family.legs):
        image = set(f.table.values())
        if all(v in image for v in g.table.values()):
            via = FinMap(g.src, f.src,
                         {a: fiber(f, g.table[a])[0] for a in g.src})
            assert compose(f, via) == g
            return SieveWitness(i, via)
    return None


def is_effective_epi(f: FinMap) -> bool:
    """f is the coequalizer of its kernel pair.

    Computed by the definition: coequalize the kernel pair, mediate f
    through, and test that the comparison is an iso. Cross-checked against
    surjectivity, which is equivalent in finite sets.
    """
    kp = pullback(f, f)
    cert = coequalizer(kp.proj1, kp.proj2)
    comparison = mediate_coequalizer(cert, f)
    verdict = morphism_predicates(comparison).iso
    assert verdict == is_epi(f)
    return verdict


def all_maps(src: FinSet, dst: FinSet):
    """Every map src -> dst, in canonical order."""
    atoms = list(src)
    if not atoms:
        yield FinMap(src, dst, {})
        return
    for values in itertools.product(dst.elements, repeat=len(atoms)):
        yield FinMap(src, dst, dict(zip(atoms, values)))


def small_sets(max_size: int):
    """Canonical test sets {} , {0}, {0,1}, ... up to max_size atoms."""
    return [FinSet(range(n)) for n in range(max_size + 1)]


def base_change(f: FinMap, t: FinMap) -> FinMap:
    """The pullback of f along t, as a map into t's source."""
    return pullback(f, t).proj2


def is_universal_effective_epi(f: FinMap, sample_budget: int = 20,
                               seed: int = 0) -> bool:
    """Effective epi, stably under base change.

    Deterministic sample: all maps from sets of size <= 3 into the target,
    plus sample_budget random maps from larger sets (seeded).
    """
    if not is_effective_epi(f):
        return False
    for z in small_sets(3):
        for t in all_maps(z, f.dst):
            if not is_effective_epi(base_change(f, t)):
                return False
    rng = random.Random(seed)
    for _ in range(sample_budget):
        if len(f.dst) == 0:
            break
        z = FinSet(range(rng.randint(4, 6)))
        t = FinMap(z, f.dst, {a: rng.choice(f.dst.elements) for a in z})
        if not is_effective_epi(base_change(f, t)):
            return False
    return True


def family_map(family: CoveringFamily) -> FinMap:
    """The induced map from the coproduct of the sources to the target."""
    cop = coproduct([f.src for f in family.legs])
    return copair(cop, family.legs, dst=family.target)


def is_jointly_surjective(family: CoveringFamily) -> bool:
    hit = set()
    for f in family.legs:
        hit.update(f.table.values())
    return hit == set(family.target.elements)


def is_canonical_cover(family: CoveringFamily, sample_budget: int = 8,
                       seed: int = 0) -> bool:
    """Membership in the canonical topology: the induced coproduct map is a
    universal effective epi. Fast path (joint surjectivity) asserted equal."""
    verdict = is_universal_effective_epi(family_map(family), sample_budget, seed)
    assert verdict == is_jointly_surjective(family)
    return verdict


def pullback_family(family: CoveringFamily, t: FinMap) -> CoveringFamily:
    """Base change of a covering family along t, legs in the same order."""
    if t.dst != family.target:
        raise TargetMismatch(f"{t.dst!r} != {family.target!r}")
    return CoveringFamily(t.src, [base_change(f, t) for f in family.legs])


class CechColimit(NamedTuple):
    """Coequalizer of the pairwise-overlap diagram of a family."""

    space: FinSet
    cocone: tuple       # one leg per family leg, U_i -> space
    comparison: FinMap  # mediated map space -> target


def cech_colimit(family: CoveringFamily) -> CechColimit:
    """Realize the colimit of the generated sieve by its Čech diagram:
    coproduct of the legs' sources, coequalized over all pairwise overlaps."""
    legs = family.legs
    c1 = coproduct([f.src for f in legs])
    overlap_parts = []
    d0_parts = []
    d1_parts = []
    for i, fi in enumerate(legs):
        for j, fj in enumerate(legs):
            cert = pullback(fi, fj)
            overlap_parts.append(cert.apex)
            d0_parts.append(compose(c1.injections[i], cert.proj1))
            d1_parts.append(compose(c1.injections[j], cert.proj2))
    c2 = coproduct(overlap_parts)
    d0 = copair(c2, d0_parts, dst=c1.space)
    d1 = copair(c2, d1_parts, dst=c1.space)
    cert = coequalizer(d0, d1)
    comparison = mediate_coequalizer(cert, family_map(family))
    cocone = tuple(compose(cert.proj, inj) for inj in c1.injections)
    return CechColimit(cert.quotient, cocone, comparison)


def is_colim_sieve(s: GeneratedSieve) -> bool:
    """The sieve's colimit (Čech realization) maps isomorphically onto the
    target."""
    return morphism_predicates(cech_colimit(s.family).comparison).iso


def subcanonical_witness(family: CoveringFamily, a: FinSet,
                         bound: int = 4096) -> bool:
    """Representables are sheaves: the sheaf condition for Hom(-, a)."""
    return check_sheaf_condition(family, a, bound=bound)


def _overlap_certs(family: CoveringFamily):
    legs = family.legs
    return {(i, j): pullback(legs[i], legs[j])
            for i in range(len(legs)) for j in range(len(legs))}


def _is_matching(family, certs, maps) -> bool:
    for (i, j), cert in certs.items():
        si, sj = maps[i], maps[j]
        for (a, b) in cert.apex:
            if si.table[a] != sj.table[b]:
                return False
    return True


def check_sheaf_condition(family: CoveringFamily, a: FinSet,
                          strategy: str = "auto", bound: int = 4096) -> bool:
    """Every matching family of maps into `a` glues uniquely through the
    cover.

    strategy="exhaustive" enumerates all candidate families (|a|^Σ|U_i| of
    them, guarded by `bound`); "constructive" glues each abstract matching
    family on the images and decides totality and uniqueness directly;
    "auto" picks exhaustive when it fits in the bound.
    """
    legs = family.legs
    total = sum(len(f.src) for f in legs)
    cost = len(a) ** total if len(a) > 0 else (0 if total else 1)
    if strategy == "auto":
        strategy = "exhaustive" if cost <= bound else "constructive"
    if strategy == "exhaustive":
        if cost > bound:
            raise BoundExceeded("matching-family enumeration", cost, bound)
        certs = _overlap_certs(family)
        for maps in itertools.product(*[list(all_maps(f.src, a)) for f in legs]):
            if not _is_matching(family, certs, maps):
                continue
            gluings = [
                s for s in all_maps(family.target, a)
                if all(compose(s, legs[i]) == maps[i] for i in range(len(legs)))
            ]
            if len(gluings) != 1:
                return False
        return True
    if strategy != "constructive":
        raise ValueError(f"unknown strategy {strategy!r}")
    # Constructive: a matching family determines the gluing on the union of
    # the images (well-defined exactly by the matching condition), so the
    # condition reduces to totality and uniqueness of the extension.
    if is_jointly_surjective(family):
        return True
    # an uncovered point exists; matching families exist unless a is empty
    # and some leg source is nonempty
    if len(a) == 0:
        return any(len(f.src) > 0 for f in legs)
    return len(a) == 1
