"""Blocks and abelian-envelope tables for the interpolated category.

Indecomposable objects are labeled by Young diagrams; two of them
interact only inside one degeneracy class (young.nu_class), and all
morphism-space dimensions between them follow one small table. The
abelian envelope of a nontrivial block is modeled the same way: its
simples, standard and costandard objects, and projectives are pure
multiplicity data over chain positions, never realized as spaces.

The last operation here computes the gl(U)-character of the
multiplicity space of an indecomposable inside the interpolated tensor
power, which is what the restriction functor to the parabolic category
preserves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .parabolic import GlUCharacter
from .young import (
    NuClass,
    Partition,
    check_partition,
    format_partition,
    is_strip_extension,
    nu_class,
    pieri_plus_bounded,
)

ABELIAN_KINDS = ("simple", "standard", "costandard", "projective")


@dataclass(frozen=True)
class IndecompLabel:
    """Karoubian indecomposable attached to a Young diagram."""

    diagram: Partition

    def __post_init__(self):
        object.__setattr__(self, "diagram", check_partition(self.diagram))

    def __str__(self):
        return f"X({format_partition(self.diagram)})"


@dataclass(frozen=True)
class AbelianObjectLabel:
    """Standard-theoretic object of the envelope of one block.

    index is the chain position. In a trivial class only position 0
    exists and all four kinds name the same simple object.
    """

    kind: str
    cls: NuClass
    index: int

    def __post_init__(self):
        if self.kind not in ABELIAN_KINDS:
            raise ValueError(f"unknown abelian kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("negative chain position")
        if self.cls.trivial and self.index > 0:
            raise ValueError("trivial class has a single position")

    def diagram(self) -> Partition:
        return self.cls.member(self.index)


def hom_dim_indec(lam, lam2, nu) -> int:
    """dim Hom between the indecomposables at lam and lam2.

    Zero across classes. Within a nontrivial chain the dimension only
    depends on the distance between positions, with the base object
    rigid and every later one carrying a two-dimensional endomorphism
    algebra.
    """
    lam = check_partition(lam)
    lam2 = check_partition(lam2)
    cls = nu_class(lam, nu)
    if not cls.contains(lam2):
        return 0
    if cls.trivial:
        return 1
    i = cls.position_of(lam)
    j = cls.position_of(lam2)
    if abs(i - j) >= 2:
        return 0
    if abs(i - j) == 1:
        return 1
    return 2 if i >= 1 else 1


def lift(lam, nu) -> tuple[Partition, ...]:
    """Diagrams of the classical indecomposables a generic one degenerates to.

    At a generic parameter the object at lam stays simple, so the lift
    is lam alone; at chain position i >= 1 it picks up the previous
    member as a second summand.
    """
    lam = check_partition(lam)
    cls = nu_class(lam, nu)
    if cls.trivial:
        return (lam,)
    i = cls.position_of(lam)
    if i == 0:
        return (lam,)
    return (cls.member(i - 1), lam)


def hom_dim_X_mu_Delta(tau, mu, nu) -> int:
    """dim Hom from the twist of X_tau by the weight-mu local system into Delta_k.

    k = |mu|. The answer counts the members of lift(tau) whose Pieri
    family contains mu, which lands in {0, 1, 2}.
    """
    tau = check_partition(tau)
    mu = check_partition(mu)
    return sum(1 for beta in lift(tau, nu) if is_strip_extension(beta, mu))


@dataclass(frozen=True)
class AbelianObjectData:
    composition_factors: tuple[AbelianObjectLabel, ...]
    standard_filtration: tuple[AbelianObjectLabel, ...] | None
    socle_layers: tuple[tuple[AbelianObjectLabel, ...], ...]


def abelian_object_data(label: AbelianObjectLabel) -> AbelianObjectData:
    """Composition factors, standard filtration, and socle layers.

    Socle layers are listed bottom first. Unlike the parabolic side,
    nothing truncates: the chain of a nontrivial class is infinite and
    every label is a nonzero object. At position 0 the simple, standard,
    and costandard kinds coincide; the projective at position i is an
    extension of the standards at i and i + 1.
    """
    cls, i = label.cls, label.index

    def L(j: int) -> AbelianObjectLabel:
        return AbelianObjectLabel("simple", cls, j)

    def M(j: int) -> AbelianObjectLabel:
        return AbelianObjectLabel("standard", cls, j)

    kind = label.kind
    if cls.trivial or (i == 0 and kind != "projective"):
        return AbelianObjectData((L(0),), (M(0),), ((L(0),),))
    if kind == "simple":
        return AbelianObjectData((L(i),), None, ((L(i),),))
    if kind == "standard":
        return AbelianObjectData((L(i - 1), L(i)), (M(i),), ((L(i - 1),), (L(i),)))
    if kind == "costandard":
        return AbelianObjectData((L(i - 1), L(i)), None, ((L(i),), (L(i - 1),)))
    # projective at position i, an extension of M_i by M_{i+1}
    if i == 0:
        return AbelianObjectData(
            (L(0), L(0), L(1)),
            (M(0), M(1)),
            ((L(0),), (L(1),), (L(0),)),
        )
    return AbelianObjectData(
        (L(i - 1), L(i), L(i), L(i + 1)),
        (M(i), M(i + 1)),
        ((L(i),), (L(i + 1), L(i - 1)), (L(i),)),
    )


def multiplicity_space_char(mu, nu, d: int, cutoff: int) -> GlUCharacter:
    """gl(U)-character of the multiplicity space of X_mu in the tensor power.

    For a trivial class this is the full Pieri family over mu. At the
    base of a chain the family is clipped by the head entry of the
    weight; at later positions it is cut down to the part shared with
    the previous member.
    """
    mu = check_partition(mu)
    if cutoff < sum(mu):
        raise ValueError("cutoff smaller than |mu|")
    cls = nu_class(mu, nu)
    family = [rho for rho in pieri_plus_bounded(mu, cutoff) if len(rho) <= d]
    if cls.trivial:
        return GlUCharacter.from_support(family, d, cutoff)
    j = cls.position_of(mu)
    if j == 0:
        head = int(cls.nu) - sum(mu)
        support = [rho for rho in family if (rho[0] if rho else 0) <= head]
        return GlUCharacter.from_support(support, d, cutoff)
    prev = cls.member(j - 1)
    support = [rho for rho in family if is_strip_extension(prev, rho)]
    return GlUCharacter.from_support(support, d, cutoff)


def block_summary(lam, nu, upto: int) -> dict:
    """Members of the block of lam and their pairwise Hom dimensions.

    A trivial block reports its single member; a nontrivial one reports
    chain positions 0..upto. Shaped for direct JSON emission.
    """
    lam = check_partition(lam)
    cls = nu_class(lam, nu)
    members = [cls.base] if cls.trivial else cls.members(upto)
    return {
        "trivial": cls.trivial,
        "class": [format_partition(m) for m in members],
        "hom": [[hom_dim_indec(a, b, nu) for b in members] for a in members],
    }
