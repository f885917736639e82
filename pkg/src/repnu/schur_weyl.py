"""Object-level transport from the abelian envelope to the parabolic category.

The contravariant restriction functor sends each labeled object of one
block to a highest-weight module, and at desk scale the whole functor
is a finite table: simples shift one chain position up, standards map
to standards, costandards to duals of standards, and projectives to
the next injective, with the last surviving projective collapsing onto
a simple. Every image character is computed twice, once by summing
multiplicity-space characters of the graded tensor power and once from
the highest-weight tables, and the two routes must agree.

The localized comparisons (exactness of the two projective
presentation families, commutation with duality) hold only up to
characters of finite-dimensional modules, and the discrepancy is
checked to be a genuine such character rather than waved away. The
scalar normalization of the duality maps is not modeled; only labels
and characters are compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .deligne import AbelianObjectLabel, hom_dim_X_mu_Delta, multiplicity_space_char
from .parabolic import (
    GlUCharacter,
    OModuleLabel,
    char_of_label,
    dual_label,
    make_label,
    projective_char,
    simple_char,
)
from .young import (
    NuClass,
    Partition,
    check_partition,
    format_partition,
    hook_dim,
    k_lambda,
    nu_class,
    partitions_of,
    pieri_plus_bounded,
    schur_dim,
)


@dataclass(frozen=True)
class KernelLabel:
    """Formal kernel of the surjection from the projective at 1 onto its head.

    The image of the costandard object at position 1 is not itself a
    standard-theoretic module, so it keeps this formal name. Its
    character is the projective character minus the simple one.
    """

    cls: NuClass
    big_n: int

    def is_zero(self) -> bool:
        return False

    def describe(self) -> dict:
        return {"kind": "kernel", "index": 1, "diagram": None, "N": self.big_n}

    def __str__(self):
        return "Ker(P_1 -> L_1)"


@dataclass(frozen=True)
class SWImage:
    label: OModuleLabel | KernelLabel
    char: GlUCharacter


def _envelope_dual(x: AbelianObjectLabel) -> AbelianObjectLabel:
    """Dual of an envelope label: every object is self-dual except that
    the standard and costandard kinds trade places."""
    swap = {"standard": "costandard", "costandard": "standard"}
    return AbelianObjectLabel(swap.get(x.kind, x.kind), x.cls, x.index)


def _member_char(cls: NuClass, j: int, nu, d: int, cutoff: int) -> GlUCharacter:
    """Multiplicity-space character at chain position j, zero once the
    member diagram outgrows the cutoff."""
    mem = cls.member(j)
    if sum(mem) > cutoff:
        return GlUCharacter.zero(d, cutoff)
    return multiplicity_space_char(mem, nu, d, cutoff)


def _hom_route_char(x: AbelianObjectLabel, nu, big_n: int, cutoff: int) -> GlUCharacter:
    """Image character via maps into the graded tensor power.

    Each grade of the image is a sum of multiplicity spaces of the
    Karoubian indecomposables the object maps to. Projectives are
    themselves Karoubian, so for them the multiplicity of a weight is
    counted directly from the lift of the realizing diagram.
    """
    d = big_n - 1
    cls, i = x.cls, x.index
    if cls.trivial:
        return _member_char(cls, 0, nu, d, cutoff)
    if x.kind == "projective":
        tau = cls.member(i + 1)
        mults: dict[Partition, int] = {}
        for base in (cls.member(i), tau):
            for mu in pieri_plus_bounded(base, cutoff):
                if len(mu) <= d:
                    mults[mu] = hom_dim_X_mu_Delta(tau, mu, nu)
        return GlUCharacter(mults, cutoff, d)
    if i == 0:
        return _member_char(cls, 0, nu, d, cutoff) + _member_char(cls, 1, nu, d, cutoff)
    if x.kind == "simple":
        return _member_char(cls, i + 1, nu, d, cutoff)
    if x.kind == "standard" or i >= 2:
        return _member_char(cls, i, nu, d, cutoff) + _member_char(cls, i + 1, nu, d, cutoff)
    # costandard at position 1: the base image extended by the simple two up
    return (
        _member_char(cls, 0, nu, d, cutoff)
        + _member_char(cls, 1, nu, d, cutoff)
        + _member_char(cls, 2, nu, d, cutoff)
    )


def _image_label(x: AbelianObjectLabel, big_n: int) -> OModuleLabel | KernelLabel:
    cls, i = x.cls, x.index
    if cls.trivial or (i == 0 and x.kind != "projective"):
        return make_label("verma", cls, 0, big_n)
    k = k_lambda(cls, big_n)
    if x.kind == "simple":
        return make_label("simple", cls, i + 1, big_n)
    if x.kind == "standard":
        return make_label("verma", cls, i, big_n)
    if x.kind == "costandard":
        if i >= 2:
            return make_label("dual_verma", cls, i, big_n)
        # position 1; a block with any surviving module has at least two
        # (chain member lengths are max(len(base), i)), so the kernel is
        # honest whenever k > 0
        return KernelLabel(cls, big_n) if k > 0 else make_label("zero", cls, 0, big_n)
    # projective
    if i >= k:
        return make_label("zero", cls, 0, big_n)
    if i == k - 1:
        return make_label("simple", cls, k - 1, big_n)
    return make_label("projective", cls, i + 1, big_n)


def _o_route_char(label, nu, cutoff: int) -> GlUCharacter:
    """Image character from the highest-weight tables for the label."""
    if isinstance(label, KernelLabel):
        cls, big_n = label.cls, label.big_n
        p1 = projective_char(cls, 1, nu, big_n, cutoff)
        l1 = simple_char(cls, 1, nu, big_n, cutoff)
        return p1 - l1
    big_n = label.big_n
    if label.is_zero():
        return GlUCharacter.zero(big_n - 1, cutoff)
    if label.kind in ("verma", "dual_verma") and sum(label.diagram()) > cutoff:
        return GlUCharacter.zero(big_n - 1, cutoff)
    return char_of_label(label, nu, cutoff)


def sw_image(x: AbelianObjectLabel, nu, big_n: int, cutoff: int) -> SWImage:
    """Image of an envelope object, with its character double-checked.

    The label follows the transport table; the character is computed
    both from the tensor-power multiplicity spaces and from the
    highest-weight tables of the label, and any disagreement means the
    tables themselves are inconsistent, which is raised loudly.
    """
    if big_n < 2:
        raise ValueError("need dim V at least 2")
    if cutoff < 0:
        raise ValueError("negative cutoff")
    if x.cls.nu != Fraction(nu):
        raise ValueError("label belongs to a different parameter")
    label = _image_label(x, big_n)
    from_tables = _o_route_char(label, nu, cutoff)
    from_homs = _hom_route_char(x, nu, big_n, cutoff)
    if from_tables != from_homs:
        raise RuntimeError(
            f"character routes disagree for {x.kind} at position {x.index}: "
            f"tensor-power route {from_homs!r}, table route {from_tables!r}"
        )
    return SWImage(label, from_tables)


def sw_kernel(nu, big_n: int):
    """Predicate telling which simple objects the localized functor kills.

    A simple in a trivial class survives exactly when its diagram fits
    in N - 1 rows; in a nontrivial chain the last surviving position
    and everything past it die, and in particular the whole chain dies
    when even the base is too long.
    """
    if big_n < 2:
        raise ValueError("need dim V at least 2")

    def in_kernel(lam) -> bool:
        lam = check_partition(lam)
        cls = nu_class(lam, nu)
        if cls.trivial:
            return len(lam) > big_n - 1
        i = cls.position_of(lam)
        return i >= k_lambda(cls, big_n) - 1

    return in_kernel


def finite_dim_simple_char(tau, nu, big_n: int, cutoff: int) -> GlUCharacter:
    """Restricted character of the finite-dimensional simple with tail tau.

    The module exists only for integer parameter with the head entry
    nu - |tau| dominating the tail; its restriction is the bounded
    slice of the Pieri family of tau.
    """
    tau = check_partition(tau)
    d = big_n - 1
    nu = Fraction(nu)
    if nu.denominator != 1 or nu < 0:
        raise ValueError("finite-dimensional modules need a nonnegative integer parameter")
    head = int(nu) - sum(tau)
    if tau and head < tau[0]:
        raise ValueError("head entry does not dominate the tail")
    if len(tau) > d:
        raise ValueError(f"tail {tau} exceeds {d} rows")
    support = [
        mu
        for mu in pieri_plus_bounded(tau, cutoff)
        if len(mu) <= d and (mu[0] if mu else 0) <= head
    ]
    return GlUCharacter.from_support(support, d, cutoff)


def is_finite_dim_char(char: GlUCharacter, nu, big_n: int) -> bool:
    """Whether char is a character of a finite-dimensional module.

    Greedy peeling: the minimal surviving weight must be the tail of a
    finite-dimensional simple, whose character is then subtracted.
    Each peel only touches strictly larger weights, so the scan
    terminates within the cutoff.
    """
    if not char.is_nonnegative():
        return False
    work = dict(char.mults)
    if not work:
        return True
    nu = Fraction(nu)
    if nu.denominator != 1 or nu < 0:
        return False
    while work:
        tau = min(work, key=lambda p: (sum(p), p))
        m = work.pop(tau)
        if m < 0:
            return False
        head = int(nu) - sum(tau)
        if (tau and head < tau[0]) or head < 0:
            return False
        piece = finite_dim_simple_char(tau, nu, big_n, char.cutoff)
        for mu, c in piece.mults.items():
            if mu == tau:
                continue
            work[mu] = work.get(mu, 0) - m * c
            if work[mu] == 0:
                del work[mu]
    return True


def sw_exactness_check(cls: NuClass, nu, big_n: int, cutoff: int) -> bool:
    """Image characters across the two projective presentation families.

    For each position the projective sits in two short exact sequences,
    one with standard and one with costandard ends. After transport the
    middle character must match the sum of the end characters up to a
    finite-dimensional correction, and in the generic interior range of
    the standard family the match must be exact.
    """
    if cls.trivial:
        x = AbelianObjectLabel("simple", cls, 0)
        sw_image(x, nu, big_n, cutoff)  # the double route is the whole content
        return True
    k = k_lambda(cls, big_n)

    def image_char(kind: str, i: int) -> GlUCharacter:
        return sw_image(AbelianObjectLabel(kind, cls, i), nu, big_n, cutoff).char

    for i in range(k + 3):
        middle = image_char("projective", i)
        for kind, flip in (("standard", False), ("costandard", True)):
            below, above = image_char(kind, i), image_char(kind, i + 1)
            sub, quot = (below, above) if flip else (above, below)
            correction = sub + quot - middle
            if 1 <= i < k - 1 and not flip:
                if correction != GlUCharacter.zero(big_n - 1, cutoff):
                    return False
            elif correction != GlUCharacter.zero(big_n - 1, cutoff):
                if not is_finite_dim_char(correction, nu, big_n):
                    return False
    return True


def duality_check(x: AbelianObjectLabel, nu, big_n: int, cutoff: int | None = None) -> bool:
    """Whether transport commutes with the two dualities on x.

    Compares the image of the dual object against the dual of the
    image. Labels that agree settle it; otherwise the characters must
    differ by a finite-dimensional character, the localized notion of
    agreement.
    """
    if cutoff is None:
        deep = 0 if x.cls.trivial else x.index + 2
        cutoff = sum(x.cls.member(deep)) + 4
    img = sw_image(x, nu, big_n, cutoff)
    dual_img = sw_image(_envelope_dual(x), nu, big_n, cutoff)
    if isinstance(img.label, OModuleLabel) and isinstance(dual_img.label, OModuleLabel):
        if dual_img.label == dual_label(img.label):
            return True
    diff = dual_img.char - img.char
    if diff == GlUCharacter.zero(big_n - 1, cutoff):
        return True
    return is_finite_dim_char(diff, nu, big_n) or is_finite_dim_char(
        GlUCharacter.zero(big_n - 1, cutoff) - diff, nu, big_n
    )


def classical_sw(n: int, d: int) -> dict[Partition, tuple[int, int]]:
    """Decomposition of the n-th tensor power of a d-dimensional space.

    Each diagram of n with at most d rows contributes the product of
    its symmetric-group dimension (hook lengths) and its Schur-functor
    dimension (hook contents); together these must exhaust d^n.
    """
    if not (0 <= n <= 10):
        raise ValueError("n out of range")
    if not (1 <= d <= 5):
        raise ValueError("d out of range")
    out: dict[Partition, tuple[int, int]] = {}
    total = 0
    for lam in partitions_of(n):
        if len(lam) > d:
            continue
        f, s = hook_dim(lam), schur_dim(lam, d)
        out[lam] = (f, s)
        total += f * s
    if total != d**n:
        raise RuntimeError(
            f"dimension count failed: {total} != {d}^{n} "
            f"over {[format_partition(p) for p in out]}"
        )
    return out
