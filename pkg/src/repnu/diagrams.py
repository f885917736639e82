"""Partition diagram calculus.

A diagram in P_{r,s} is a set partition of r top vertices and s bottom
vertices. Top vertex i is encoded +i, bottom vertex j is encoded -j.
The bar family keeps only diagrams whose blocks meet each row at most
once; those index morphism bases between the interpolated objects.

Composition is read right to left: in compose(after, before) the
diagram `before` is applied first and its bottom row is glued to the
top row of `after`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Iterator, Mapping

from .exact_arith import (
    NuPolynomial,
    ResourceLimitError,
    falling_factorial,
)

MAX_ARITY = 8


def _vkey(v: int) -> tuple[int, int]:
    # top vertices before bottom vertices, each row left to right
    return (0, v) if v > 0 else (1, -v)


@dataclass(frozen=True)
class Diagram:
    """A set partition of {+1..+r, -1..-s}, stored canonically."""

    r: int
    s: int
    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def make(r: int, s: int, blocks: Iterable[Iterable[int]]) -> "Diagram":
        if r < 0 or s < 0:
            raise ValueError("negative arity")
        canon = tuple(
            sorted(
                (tuple(sorted(set(b), key=_vkey)) for b in blocks),
                key=lambda b: _vkey(b[0]),
            )
        )
        seen: set[int] = set()
        for b in canon:
            if not b:
                raise ValueError("empty block")
            for v in b:
                if v == 0 or not (-s <= v <= r):
                    raise ValueError(f"vertex {v} out of range for P_{{{r},{s}}}")
                if v in seen:
                    raise ValueError(f"vertex {v} appears in two blocks")
                seen.add(v)
        if len(seen) != r + s:
            raise ValueError("blocks do not cover all vertices")
        return Diagram(r, s, canon)

    def key(self):
        return (self.r, self.s, self.blocks)

    def num_blocks(self) -> int:
        return len(self.blocks)

    def is_bar(self) -> bool:
        """True when every block meets each row at most once."""
        for b in self.blocks:
            if sum(1 for v in b if v > 0) > 1:
                return False
            if sum(1 for v in b if v < 0) > 1:
                return False
        return True

    def require_bar(self) -> "Diagram":
        if not self.is_bar():
            raise ValueError(f"diagram is not in the bar family: {self}")
        return self

    def solitary_tops(self) -> tuple[int, ...]:
        return tuple(b[0] for b in self.blocks if len(b) == 1 and b[0] > 0)

    def solitary_bottoms(self) -> tuple[int, ...]:
        return tuple(-b[0] for b in self.blocks if len(b) == 1 and b[0] < 0)

    def edges(self) -> tuple[tuple[int, int], ...]:
        """For bar diagrams: the (top, bottom) pairs joined by a block."""
        self.require_bar()
        out = []
        for b in self.blocks:
            tops = [v for v in b if v > 0]
            bots = [-v for v in b if v < 0]
            if tops and bots:
                out.append((tops[0], bots[0]))
        return tuple(sorted(out))

    def __str__(self) -> str:
        return format_diagram(self)


def identity_diagram(k: int) -> Diagram:
    return Diagram.make(k, k, [(i, -i) for i in range(1, k + 1)])


_LIT_RE = re.compile(r"^\s*\[(\d+)\s*,\s*(\d+)\]\s*(.*)$")
_BLOCK_RE = re.compile(r"\{([^{}]*)\}")


def parse_diagram(text: str) -> Diagram:
    """Parse the literal form "[r,s] {1,1',3} {2'} ...".

    Unprimed numbers are top vertices, primed ones are bottom vertices.
    """
    m = _LIT_RE.match(text)
    if not m:
        raise ValueError(f"bad diagram literal: {text!r}")
    r, s = int(m.group(1)), int(m.group(2))
    body = m.group(3)
    rest = _BLOCK_RE.sub("", body).strip()
    if rest:
        raise ValueError(f"unexpected text in diagram literal: {rest!r}")
    blocks = []
    for inner in _BLOCK_RE.findall(body):
        block = []
        for tok in inner.split(","):
            tok = tok.strip()
            if not tok:
                raise ValueError(f"empty vertex in block {{{inner}}}")
            if tok.endswith("'"):
                block.append(-int(tok[:-1]))
            else:
                block.append(int(tok))
        blocks.append(block)
    return Diagram.make(r, s, blocks)


def format_diagram(d: Diagram) -> str:
    parts = []
    for b in d.blocks:
        parts.append(
            "{" + ",".join(str(v) if v > 0 else f"{-v}'" for v in b) + "}"
        )
    return f"[{d.r},{d.s}] " + " ".join(parts) if parts else f"[{d.r},{d.s}]"


def glue(before: Diagram, after: Diagram) -> tuple[Diagram, int]:
    """Stack `before` on top of `after` along the shared middle row.

    Returns the induced partition on the outer rows together with the
    number of connected components living entirely in the middle row.
    """
    if before.s != after.r:
        raise ValueError(
            f"arity mismatch: P_{{{before.r},{before.s}}} then P_{{{after.r},{after.s}}}"
        )
    # union-find over ('t', i) / ('m', j) / ('b', m)
    parent: dict[tuple[str, int], tuple[str, int]] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for b in before.blocks:
        nodes = [("t", v) if v > 0 else ("m", -v) for v in b]
        for n in nodes[1:]:
            union(nodes[0], n)
    for b in after.blocks:
        nodes = [("m", v) if v > 0 else ("b", -v) for v in b]
        for n in nodes[1:]:
            union(nodes[0], n)
    for i in range(1, before.r + 1):
        find(("t", i))
    for j in range(1, before.s + 1):
        find(("m", j))
    for m in range(1, after.s + 1):
        find(("b", m))

    comps: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for node in parent:
        comps.setdefault(find(node), []).append(node)

    blocks = []
    n_mid = 0
    for members in comps.values():
        outer = [v for kind, v in members if kind == "t"] + [
            -v for kind, v in members if kind == "b"
        ]
        if outer:
            blocks.append(outer)
        else:
            n_mid += 1
    return Diagram.make(before.r, after.s, blocks), n_mid


def compose_delta_pair(after: Diagram, before: Diagram) -> dict[Diagram, NuPolynomial]:
    """One basis pair of the interpolated-object composition rule.

    The result is supported on the glued partition together with the
    diagrams obtained from it by merging top vertices solitary in
    `before` with bottom vertices solitary in `after`, one coarsening
    per partial matching. A coarsening tau with l(tau) blocks picks up
    the falling factorial (v - l(tau))...(v - l(tau) - n + 1) where n
    counts middle-only components of the gluing.
    """
    before.require_bar()
    after.require_bar()
    star, n_mid = glue(before, after)
    free_tops = before.solitary_tops()
    free_bots = after.solitary_bottoms()
    out: dict[Diagram, NuPolynomial] = {}
    for mtch in _partial_matchings(free_tops, free_bots):
        if mtch:
            merged = {t: -b for t, b in mtch}
            dropped = {v for t, b in mtch for v in (t, -b)}
            blocks = [b for b in star.blocks if not (len(b) == 1 and b[0] in dropped)]
            blocks.extend([(t, m) for t, m in merged.items()])
            tau = Diagram.make(star.r, star.s, blocks)
        else:
            tau = star
        out[tau] = falling_factorial(n_mid, tau.num_blocks())
    return out


def _partial_matchings(
    tops: tuple[int, ...], bots: tuple[int, ...]
) -> Iterator[tuple[tuple[int, int], ...]]:
    for j in range(min(len(tops), len(bots)) + 1):
        for chosen in combinations(tops, j):
            for target in permutations(bots, j):
                yield tuple(zip(chosen, target))


class _LinearCombination:
    """Shared plumbing for formal sums of diagrams over Q[v]."""

    __slots__ = ("src", "dst", "terms")

    def __init__(self, src: int, dst: int, terms: Mapping[Diagram, NuPolynomial]):
        clean = {}
        for d, c in terms.items():
            c = NuPolynomial.coerce(c)
            if c.is_zero():
                continue
            if d.r != src or d.s != dst:
                raise ValueError(
                    f"term arity ({d.r},{d.s}) does not match morphism ({src},{dst})"
                )
            clean[d] = c
        self.src = src
        self.dst = dst
        self.terms = clean

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, type(self)):
            return NotImplemented
        return (
            self.src == other.src
            and self.dst == other.dst
            and self.terms == other.terms
        )

    def __add__(self, other):
        self._check_like(other)
        terms = dict(self.terms)
        for d, c in other.terms.items():
            terms[d] = terms.get(d, NuPolynomial()) + c
        return type(self)(self.src, self.dst, terms)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scalar):
        scalar = NuPolynomial.coerce(scalar)
        return type(self)(
            self.src, self.dst, {d: scalar * c for d, c in self.terms.items()}
        )

    def _check_like(self, other) -> None:
        if not isinstance(other, type(self)):
            raise TypeError(f"cannot combine {type(self).__name__} with {other!r}")
        if self.src != other.src or self.dst != other.dst:
            raise ValueError("arity mismatch")

    def sorted_terms(self) -> list[tuple[Diagram, NuPolynomial]]:
        return sorted(self.terms.items(), key=lambda t: t[0].key())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for d, c in self.sorted_terms():
            cs = str(c)
            if cs == "1":
                parts.append(str(d))
            else:
                if c.degree() > 0 and len([x for x in c.coeffs if x != 0]) > 1:
                    cs = f"({cs})"
                parts.append(f"{cs}*{d}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.src}->{self.dst}, {len(self.terms)} terms)"


class DeltaMorphism(_LinearCombination):
    """Morphism between interpolated objects, in the bar-diagram basis."""

    def __init__(self, src, dst, terms):
        super().__init__(src, dst, terms)
        for d in self.terms:
            d.require_bar()

    @staticmethod
    def from_diagram(d: Diagram, coeff=1) -> "DeltaMorphism":
        return DeltaMorphism(d.r, d.s, {d: NuPolynomial.coerce(coeff)})

    @staticmethod
    def zero(src: int, dst: int) -> "DeltaMorphism":
        return DeltaMorphism(src, dst, {})

    @staticmethod
    def identity(k: int) -> "DeltaMorphism":
        return DeltaMorphism.from_diagram(identity_diagram(k))


class HMorphism(_LinearCombination):
    """Morphism between tensor powers of the interpolating object."""

    @staticmethod
    def from_diagram(d: Diagram, coeff=1) -> "HMorphism":
        return HMorphism(d.r, d.s, {d: NuPolynomial.coerce(coeff)})

    @staticmethod
    def zero(src: int, dst: int) -> "HMorphism":
        return HMorphism(src, dst, {})

    @staticmethod
    def identity(k: int) -> "HMorphism":
        return HMorphism.from_diagram(identity_diagram(k))


def compose_delta(after: DeltaMorphism, before: DeltaMorphism) -> DeltaMorphism:
    """Bilinear extension of the coarsening rule; `before` acts first."""
    if before.dst != after.src:
        raise ValueError("arity mismatch in composition")
    total: dict[Diagram, NuPolynomial] = {}
    for d2, c2 in after.terms.items():
        for d1, c1 in before.terms.items():
            for tau, p in compose_delta_pair(d2, d1).items():
                cur = total.get(tau, NuPolynomial())
                total[tau] = cur + c1 * c2 * p
    return DeltaMorphism(before.src, after.dst, total)


def compose_h(after: HMorphism, before: HMorphism) -> HMorphism:
    """Tensor-power composition: glue and weight by v^(middle components)."""
    if before.dst != after.src:
        raise ValueError("arity mismatch in composition")
    total: dict[Diagram, NuPolynomial] = {}
    for d2, c2 in after.terms.items():
        for d1, c1 in before.terms.items():
            star, n_mid = glue(d1, d2)
            coeff = c1 * c2 * NuPolynomial([0, 1]) ** n_mid
            total[star] = total.get(star, NuPolynomial()) + coeff
    return HMorphism(before.src, after.dst, total)


def generator(kind: str, k: int, arg) -> Diagram:
    """Distinguished bar diagrams generating the calculus.

    res(k, l): arity k+1 -> k, drops the l-th strand.
    res_star(k, l): arity k -> k+1, inserts a solitary bottom at slot l.
    perm(k, sigma): arity k -> k, sigma given as a tuple of images.
    """
    if kind == "res":
        l = arg
        if not 1 <= l <= k + 1:
            raise ValueError(f"res slot {l} out of range for arity {k + 1}")
        blocks: list[tuple[int, ...]] = [(l,)]
        for i in range(1, k + 2):
            if i < l:
                blocks.append((i, -i))
            elif i > l:
                blocks.append((i, -(i - 1)))
        return Diagram.make(k + 1, k, blocks)
    if kind == "res_star":
        l = arg
        if not 1 <= l <= k + 1:
            raise ValueError(f"res_star slot {l} out of range for arity {k + 1}")
        blocks = [(-l,)]
        for i in range(1, k + 1):
            if i < l:
                blocks.append((i, -i))
            else:
                blocks.append((i, -(i + 1)))
        return Diagram.make(k, k + 1, blocks)
    if kind == "perm":
        sigma = tuple(arg)
        if sorted(sigma) != list(range(1, k + 1)):
            raise ValueError(f"not a permutation of 1..{k}: {sigma}")
        return Diagram.make(k, k, [(i, -sigma[i - 1]) for i in range(1, k + 1)])
    raise ValueError(f"unknown generator kind: {kind!r}")


def enumerate_diagrams(r: int, s: int, bar_only: bool = False) -> list[Diagram]:
    """All diagrams in P_{r,s}, or only the bar family, in canonical order."""
    if r > MAX_ARITY or s > MAX_ARITY:
        raise ResourceLimitError(f"arities ({r},{s}) exceed guard {MAX_ARITY}")
    verts = list(range(1, r + 1)) + [-j for j in range(1, s + 1)]
    out: list[Diagram] = []

    def rec(idx: int, blocks: list[list[int]]):
        if idx == len(verts):
            out.append(Diagram.make(r, s, [list(b) for b in blocks]))
            return
        v = verts[idx]
        for b in blocks:
            if bar_only and any((v > 0) == (w > 0) for w in b):
                continue
            b.append(v)
            rec(idx + 1, blocks)
            b.pop()
        blocks.append([v])
        rec(idx + 1, blocks)
        blocks.pop()

    rec(0, [])
    out.sort(key=Diagram.key)
    return out
