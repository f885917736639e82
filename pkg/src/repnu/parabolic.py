"""Characters and multiplicity tables for one block of a parabolic category O.

The ambient algebra is gl(V) with dim V = N, the parabolic is the
stabilizer of a line, and a block is indexed by a degeneracy class of
Young diagrams (see young.nu_class). Everything here is computed at the
level of gl(U)-characters, dim U = N - 1: a standard module with
highest-weight diagram lam restricts to one copy of S^mu(U) for every mu
obtained from lam by adding a horizontal strip, simples come from an
alternating sum of standard characters, and projectives carry a two-step
standard filtration. Weight bases are never materialized.

Characters are truncated by total degree; the truncation is recorded in
the value and arithmetic on mismatched truncations clips to the smaller
one and flags the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .young import (
    NuClass,
    Partition,
    check_partition,
    format_partition,
    k_lambda,
    nu_class,
    pieri_plus_bounded,
    schur_dim,
)

KINDS = ("verma", "dual_verma", "simple", "projective", "injective", "zero")


@dataclass(frozen=True)
class OModuleLabel:
    """Name of an indecomposable module in the block of `cls`.

    `index` is the chain position of the highest-weight diagram. The
    injective kind only arises as the dual of the projective cover at
    position 0; every other projective is self-dual.
    """

    kind: str
    cls: NuClass
    index: int
    big_n: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown module kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("negative chain position")
        if self.big_n < 1:
            raise ValueError("dim V must be positive")

    def diagram(self) -> Partition | None:
        if self.kind == "zero":
            return None
        return self.cls.member(self.index)

    def is_zero(self) -> bool:
        return self.kind == "zero"

    def describe(self) -> dict:
        d = self.diagram()
        return {
            "kind": self.kind,
            "index": self.index,
            "diagram": None if d is None else format_partition(d),
            "N": self.big_n,
        }


def make_label(kind: str, cls: NuClass, index: int, big_n: int) -> OModuleLabel:
    """Build a label, collapsing to the zero kind when the weight dies.

    A highest-weight diagram with more than N - 1 rows supports no
    module in the block, so any label pointing at it is the zero label.
    """
    if kind == "zero":
        return OModuleLabel("zero", cls, 0, big_n)
    diagram = cls.member(index)
    if len(diagram) > big_n - 1:
        return OModuleLabel("zero", cls, 0, big_n)
    return OModuleLabel(kind, cls, index, big_n)


@dataclass(eq=False)
class GlUCharacter:
    """Finitely supported multiplicity function on Young diagrams.

    Records the character of a polynomial gl(U)-module, a direct sum of
    S^mu(U), truncated at |mu| <= cutoff and len(mu) <= d. The
    cutoff_clipped flag marks values produced by clipping two operands
    to a common, smaller cutoff.
    """

    mults: dict[Partition, int]
    cutoff: int
    d: int
    cutoff_clipped: bool = field(default=False)

    def __post_init__(self):
        cleaned = {}
        for mu, m in self.mults.items():
            mu = check_partition(mu)
            if len(mu) > self.d:
                raise ValueError(f"support entry {mu} exceeds d={self.d} rows")
            if sum(mu) > self.cutoff:
                raise ValueError(f"support entry {mu} exceeds cutoff {self.cutoff}")
            if m != 0:
                cleaned[mu] = m
        self.mults = cleaned

    @staticmethod
    def zero(d: int, cutoff: int) -> "GlUCharacter":
        return GlUCharacter({}, cutoff, d)

    @staticmethod
    def from_support(support, d: int, cutoff: int) -> "GlUCharacter":
        return GlUCharacter({check_partition(mu): 1 for mu in support}, cutoff, d)

    def copy(self) -> "GlUCharacter":
        return GlUCharacter(dict(self.mults), self.cutoff, self.d, self.cutoff_clipped)

    def restrict_cutoff(self, new_cutoff: int) -> "GlUCharacter":
        if new_cutoff >= self.cutoff:
            return self.copy()
        kept = {mu: m for mu, m in self.mults.items() if sum(mu) <= new_cutoff}
        return GlUCharacter(kept, new_cutoff, self.d, True)

    def _combine(self, other: "GlUCharacter", sign: int) -> "GlUCharacter":
        if not isinstance(other, GlUCharacter):
            return NotImplemented
        if self.d != other.d:
            raise ValueError("characters live over different dim U")
        cut = min(self.cutoff, other.cutoff)
        clipped = self.cutoff != other.cutoff or self.cutoff_clipped or other.cutoff_clipped
        out: dict[Partition, int] = {}
        for mu, m in self.mults.items():
            if sum(mu) <= cut:
                out[mu] = out.get(mu, 0) + m
        for mu, m in other.mults.items():
            if sum(mu) <= cut:
                out[mu] = out.get(mu, 0) + sign * m
        return GlUCharacter(out, cut, self.d, clipped)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __eq__(self, other):
        if not isinstance(other, GlUCharacter):
            return NotImplemented
        return (self.d, self.cutoff, self.mults) == (other.d, other.cutoff, other.mults)

    def __bool__(self) -> bool:
        return bool(self.mults)

    def is_nonnegative(self) -> bool:
        return all(m >= 0 for m in self.mults.values())

    def support(self) -> list[Partition]:
        return sorted(self.mults, key=lambda mu: (sum(mu), mu))

    def multiplicity(self, mu) -> int:
        return self.mults.get(check_partition(mu), 0)

    def total_dimension(self) -> int:
        """Dimension of the underlying gl(U)-module, exact over the support."""
        return sum(m * schur_dim(mu, self.d) for mu, m in self.mults.items())

    def sorted_items(self) -> list[tuple[str, int]]:
        return [(format_partition(mu), self.mults[mu]) for mu in self.support()]

    def __repr__(self):
        body = ", ".join(f"{name}: {m}" for name, m in self.sorted_items()) or "0"
        return f"GlUCharacter({{{body}}}, cutoff={self.cutoff}, d={self.d})"


def verma_char(lam, nu, big_n: int, cutoff: int) -> GlUCharacter:
    """gl(U)-character of the standard module with diagram lam.

    The module restricts to S(U) tensor S^lam(U), one copy of S^mu(U)
    for each horizontal-strip extension mu of lam; it is zero when lam
    has N or more rows. nu pins the block but does not change the
    restricted character.
    """
    lam = check_partition(lam)
    if cutoff < sum(lam):
        raise ValueError("cutoff smaller than |lam|")
    d = big_n - 1
    if len(lam) > d:
        return GlUCharacter.zero(d, cutoff)
    support = [mu for mu in pieri_plus_bounded(lam, cutoff) if len(mu) <= d]
    return GlUCharacter.from_support(support, d, cutoff)


def verma_hom_dim(mu, tau, nu, big_n: int) -> int:
    """dim Hom from the standard module at mu to the one at tau.

    Nonzero only within a class: endomorphisms of a nonzero standard
    module are scalars, and one reducing map exists from each chain
    position i+1 down to i while position i+1 still fits in N - 1 rows.
    """
    mu = check_partition(mu)
    tau = check_partition(tau)
    cls_mu = nu_class(mu, nu)
    cls_tau = nu_class(tau, nu)
    if cls_mu != cls_tau:
        return 0
    if len(mu) > big_n - 1:
        return 0
    if mu == tau:
        return 1
    if cls_mu.trivial:
        return 0
    i = cls_tau.position_of(tau)
    j = cls_mu.position_of(mu)
    return 1 if j == i + 1 else 0


def verma_factors(cls: NuClass, i: int, big_n: int) -> tuple[OModuleLabel, ...]:
    """Simple composition factors of the standard module at position i.

    A nonzero standard module has head L_i, and its radical is the
    next simple up the chain when that one is nonzero.
    """
    kl = k_lambda(cls, big_n)
    if i >= kl:
        return ()
    factors = [make_label("simple", cls, i, big_n)]
    if not cls.trivial and i + 1 < kl:
        factors.append(make_label("simple", cls, i + 1, big_n))
    return tuple(factors)


def simple_char(cls: NuClass, i: int, nu, big_n: int, cutoff: int) -> GlUCharacter:
    """gl(U)-character of the simple module at chain position i.

    Computed from the resolution of the simple by the standard modules
    further up the chain: an alternating sum that terminates once the
    diagrams outgrow N - 1 rows. The truncation is exact entrywise, so
    a negative multiplicity would mean the table itself is wrong.
    """
    d = big_n - 1
    kl = k_lambda(cls, big_n)
    if i >= kl:
        return GlUCharacter.zero(d, cutoff)
    if cls.trivial:
        return verma_char(cls.base, nu, big_n, cutoff)
    total = GlUCharacter.zero(d, cutoff)
    for j in range(i, kl):
        diagram = cls.member(j)
        if sum(diagram) > cutoff:
            break  # chain sizes strictly increase, the rest truncate away
        term = verma_char(diagram, nu, big_n, cutoff)
        total = total + term if (j - i) % 2 == 0 else total - term
    if not total.is_nonnegative():
        bad = {format_partition(mu): m for mu, m in total.mults.items() if m < 0}
        raise ValueError(f"alternating character sum went negative: {bad}")
    return total


@dataclass(frozen=True)
class ProjectiveData:
    standard_filtration: tuple[OModuleLabel, ...]
    socle_layers: tuple[tuple[OModuleLabel, ...], ...]
    k_lambda: int


def projective_data(cls: NuClass, i: int, nu, big_n: int) -> ProjectiveData:
    """Standard filtration and socle layers of the projective cover P_i.

    Socle layers are listed bottom first. P_0 coincides with the
    standard module at the base; every later projective is an extension
    of two consecutive standard modules and is self-dual. Labels whose
    diagram outgrows N - 1 rows are dropped from the layers.
    """
    kl = k_lambda(cls, big_n)
    if i >= kl:
        if i > 0 and cls.trivial:
            cls.member(i)  # raises IndexError for positions a trivial class lacks
        return ProjectiveData((), (), kl)

    def simple(j: int) -> OModuleLabel:
        return make_label("simple", cls, j, big_n)

    def verma(j: int) -> OModuleLabel:
        return make_label("verma", cls, j, big_n)

    if cls.trivial:
        return ProjectiveData((verma(0),), ((simple(0),),), kl)
    if i == 0:
        # P_0 is the standard module at the base; its socle is the next
        # simple up the chain when that survives the row bound.
        layers = ((simple(1),), (simple(0),)) if kl > 1 else ((simple(0),),)
        return ProjectiveData((verma(0),), layers, kl)
    middle = (simple(i + 1), simple(i - 1)) if i + 1 < kl else (simple(i - 1),)
    layers = ((simple(i),), middle, (simple(i),))
    return ProjectiveData((verma(i - 1), verma(i)), layers, kl)


def projective_char(cls: NuClass, i: int, nu, big_n: int, cutoff: int) -> GlUCharacter:
    """Character of P_i, summed over its standard filtration."""
    data = projective_data(cls, i, nu, big_n)
    total = GlUCharacter.zero(big_n - 1, cutoff)
    for label in data.standard_filtration:
        if sum(label.diagram()) > cutoff:
            continue
        total = total + verma_char(label.diagram(), nu, big_n, cutoff)
    return total


def char_of_label(label: OModuleLabel, nu, cutoff: int) -> GlUCharacter:
    """Character of the module a label names.

    Duality preserves weight multiplicities, so the dual standard kind
    and the injective kind reuse the characters of their duals.
    """
    cls, i, big_n = label.cls, label.index, label.big_n
    if label.kind == "zero":
        return GlUCharacter.zero(big_n - 1, cutoff)
    if label.kind in ("verma", "dual_verma"):
        return verma_char(label.diagram(), nu, big_n, cutoff)
    if label.kind == "simple":
        return simple_char(cls, i, nu, big_n, cutoff)
    return projective_char(cls, i, nu, big_n, cutoff)


def bgg_reciprocity_check(cls: NuClass, nu, big_n: int, upto: int) -> bool:
    """Filtration multiplicities against composition factor counts.

    For every pair of positions i, j up to the bound, the multiplicity
    of the standard module at i in the filtration of P_j must equal the
    multiplicity of the simple at j among the factors of the standard
    module at i. The two sides come from independent tables.
    """
    positions = range(upto + 1) if not cls.trivial else range(1)
    for j in positions:
        filtration = projective_data(cls, j, nu, big_n).standard_filtration
        for i in positions:
            lhs = sum(1 for lab in filtration if lab.index == i and not lab.is_zero())
            factors = verma_factors(cls, i, big_n)
            rhs = sum(1 for lab in factors if lab.index == j)
            if lhs != rhs:
                return False
    return True


def dual_label(label: OModuleLabel) -> OModuleLabel:
    """Image of a label under the duality of the block.

    Duality fixes simples, swaps the two standard kinds, and fixes every
    projective except the cover at the base, whose dual is the injective
    hull, a genuinely different module.
    """
    kind, cls, i, big_n = label.kind, label.cls, label.index, label.big_n
    if kind in ("zero", "simple"):
        return label
    if kind == "verma":
        return OModuleLabel("dual_verma", cls, i, big_n)
    if kind == "dual_verma":
        return OModuleLabel("verma", cls, i, big_n)
    if kind == "projective":
        if not cls.trivial and i == 0:
            return OModuleLabel("injective", cls, 0, big_n)
        return label
    # injective: position 0 dualizes back to the cover, higher positions
    # already name self-dual projectives.
    return OModuleLabel("projective", cls, i, big_n)
