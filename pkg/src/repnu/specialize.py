"""Integer specialization oracle.

At an integer point n, the interpolated object of arity k becomes the
span of injections {1..k} -> {1..n}, and every diagram becomes an
explicit matrix. Symbolic composition identities are checked here by
exact matrix arithmetic, which is what makes the diagram calculus
falsifiable.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable

from .diagrams import (
    DeltaMorphism,
    Diagram,
    HMorphism,
    compose_delta_pair,
    generator,
)
from .exact_arith import (
    NuPolynomial,
    ResourceLimitError,
    interpolate,
    poly_eval,
)

# basis size guard: injections bases grow like n!/(n-k)!
MAX_BASIS = 200_000


class InjectionBasis:
    """Injections {1..k} -> {1..n} in lexicographic order."""

    def __init__(self, k: int, n: int):
        if k < 0 or n < 0:
            raise ValueError("negative size")
        size = math.perm(n, k) if n >= k else 0
        if size > MAX_BASIS:
            raise ResourceLimitError(f"injection basis of size {size} exceeds guard")
        self.k = k
        self.n = n
        self.elements: list[tuple[int, ...]] = (
            list(permutations(range(1, n + 1), k)) if n >= k else []
        )
        self.index = {f: i for i, f in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


class RationalMatrix:
    """Sparse exact matrix, stored row major."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, entries: Iterable[tuple[int, int, Fraction]] = ()):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, Fraction]] = {}
        for i, j, v in entries:
            self.add_entry(i, j, v)

    def add_entry(self, i: int, j: int, v) -> None:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"entry ({i},{j}) outside {self.nrows}x{self.ncols}")
        v = Fraction(v)
        row = self.rows.setdefault(i, {})
        new = row.get(j, Fraction(0)) + v
        if new == 0:
            row.pop(j, None)
            if not row:
                self.rows.pop(i, None)
        else:
            row[j] = new

    def get(self, i: int, j: int) -> Fraction:
        return self.rows.get(i, {}).get(j, Fraction(0))

    @staticmethod
    def identity(n: int) -> "RationalMatrix":
        m = RationalMatrix(n, n)
        for i in range(n):
            m.add_entry(i, i, 1)
        return m

    @staticmethod
    def zero(nrows: int, ncols: int) -> "RationalMatrix":
        return RationalMatrix(nrows, ncols)

    def copy(self) -> "RationalMatrix":
        m = RationalMatrix(self.nrows, self.ncols)
        m.rows = {i: dict(r) for i, r in self.rows.items()}
        return m

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (
            self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def is_zero(self) -> bool:
        return not self.rows

    def _check_shape(self, other: "RationalMatrix") -> None:
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError(
                f"shape mismatch: {self.nrows}x{self.ncols} vs {other.nrows}x{other.ncols}"
            )

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_shape(other)
        out = self.copy()
        for i, row in other.rows.items():
            for j, v in row.items():
                out.add_entry(i, j, v)
        return out

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "RationalMatrix":
        scalar = Fraction(scalar)
        out = RationalMatrix(self.nrows, self.ncols)
        if scalar == 0:
            return out
        out.rows = {
            i: {j: scalar * v for j, v in row.items()} for i, row in self.rows.items()
        }
        return out

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise ValueError(
                f"shape mismatch: {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}"
            )
        out = RationalMatrix(self.nrows, other.ncols)
        for i, row in self.rows.items():
            acc: dict[int, Fraction] = {}
            for k, v in row.items():
                orow = other.rows.get(k)
                if not orow:
                    continue
                for j, w in orow.items():
                    acc[j] = acc.get(j, Fraction(0)) + v * w
            acc = {j: v for j, v in acc.items() if v != 0}
            if acc:
                out.rows[i] = acc
        return out

    def trace(self) -> Fraction:
        if self.nrows != self.ncols:
            raise ValueError("trace of a non-square matrix")
        return sum((row.get(i, Fraction(0)) for i, row in self.rows.items()), Fraction(0))

    def transpose(self) -> "RationalMatrix":
        out = RationalMatrix(self.ncols, self.nrows)
        for i, row in self.rows.items():
            for j, v in row.items():
                out.rows.setdefault(j, {})[i] = v
        return out

    def kron(self, other: "RationalMatrix") -> "RationalMatrix":
        """Kronecker product; index (i, i') -> i * other.n + i'."""
        out = RationalMatrix(self.nrows * other.nrows, self.ncols * other.ncols)
        for i, row in self.rows.items():
            for j, v in row.items():
                for i2, row2 in other.rows.items():
                    base_i = i * other.nrows + i2
                    orow = out.rows.setdefault(base_i, {})
                    for j2, w in row2.items():
                        orow[j * other.ncols + j2] = v * w
        return out

    def __repr__(self) -> str:
        nnz = sum(len(r) for r in self.rows.values())
        return f"RationalMatrix({self.nrows}x{self.ncols}, {nnz} nonzero)"


def specialize_diagram(d: Diagram, n: int) -> RationalMatrix:
    """Matrix of a bar diagram on injection bases at the integer point n.

    Column f: sum over injections g that agree with f along every edge
    and whose values on solitary bottom slots avoid every value of f.
    """
    d.require_bar()
    src = InjectionBasis(d.r, n)
    dst = InjectionBasis(d.s, n)
    out = RationalMatrix(len(dst), len(src))
    edges = d.edges()
    sol_bots = sorted(d.solitary_bottoms())
    for ci, f in enumerate(src):
        g0 = [0] * d.s
        for i, j in edges:
            g0[j - 1] = f[i - 1]
        avail = [c for c in range(1, n + 1) if c not in f]
        for extra in permutations(avail, len(sol_bots)):
            g = list(g0)
            for slot, val in zip(sol_bots, extra):
                g[slot - 1] = val
            out.add_entry(dst.index[tuple(g)], ci, 1)
    return out


def specialize_delta(m: DeltaMorphism, n: int) -> RationalMatrix:
    total = RationalMatrix(
        len(InjectionBasis(m.dst, n)), len(InjectionBasis(m.src, n))
    )
    for d, c in m.terms.items():
        cv = poly_eval(c, n)
        if cv == 0:
            continue
        total = total + cv * specialize_diagram(d, n)
    return total


def specialize_h_diagram(d: Diagram, n: int) -> RationalMatrix:
    """Matrix of a diagram on full function bases: entry 1 when the pair
    of tuples is constant along every block of d."""
    if n**d.r > MAX_BASIS or n**d.s > MAX_BASIS:
        raise ResourceLimitError("function basis exceeds guard")
    out = RationalMatrix(n**d.s, n**d.r)
    for ci, f in enumerate(product(range(1, n + 1), repeat=d.r)):
        for ri, g in enumerate(product(range(1, n + 1), repeat=d.s)):
            ok = True
            for b in d.blocks:
                vals = {f[v - 1] if v > 0 else g[-v - 1] for v in b}
                if len(vals) != 1:
                    ok = False
                    break
            if ok:
                out.add_entry(ri, ci, 1)
    return out


def specialize_h(m: HMorphism, n: int) -> RationalMatrix:
    total = RationalMatrix(n**m.dst, n**m.src)
    for d, c in m.terms.items():
        cv = poly_eval(c, n)
        if cv == 0:
            continue
        total = total + cv * specialize_h_diagram(d, n)
    return total


def oracle_check_composition(after, before, rule: str, n: int) -> bool:
    """Matrix check of one symbolic composition at the integer point n."""
    if rule == "delta":
        lhs = specialize_delta(after, n) @ specialize_delta(before, n)
        from .diagrams import compose_delta

        rhs = specialize_delta(compose_delta(after, before), n)
    elif rule == "h":
        lhs = specialize_h(after, n) @ specialize_h(before, n)
        from .diagrams import compose_h

        rhs = specialize_h(compose_h(after, before), n)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return lhs == rhs


def _merge_pairs(d: Diagram, pairs) -> Diagram:
    dropped = {v for t, b in pairs for v in (t, -b)}
    blocks = [blk for blk in d.blocks if not (len(blk) == 1 and blk[0] in dropped)]
    blocks.extend([(t, -b) for t, b in pairs])
    return Diagram.make(d.r, d.s, blocks)


def _generator_chain(d: Diagram) -> list[Diagram]:
    """Factor d as inserts . permutation . deletes, order of application."""
    d.require_bar()
    edges = sorted(d.edges())
    tops_matched = [i for i, _ in edges]
    bots_matched = sorted(j for _, j in edges)
    e = len(edges)
    chain: list[Diagram] = []
    arity = d.r
    for t in sorted(d.solitary_tops(), reverse=True):
        chain.append(generator("res", arity - 1, t))
        arity -= 1
    rank_b = {j: a + 1 for a, j in enumerate(bots_matched)}
    sigma = tuple(rank_b[dict(edges)[i]] for i in tops_matched)
    if e:
        chain.append(generator("perm", e, sigma))
    for b in sorted(d.solitary_bottoms()):
        chain.append(generator("res_star", arity, b))
        arity += 1
    return chain


def _generator_matrix(g: Diagram, n: int) -> RationalMatrix:
    """Closed-form specialized matrix of a single generator diagram."""
    src = InjectionBasis(g.r, n)
    dst = InjectionBasis(g.s, n)
    out = RationalMatrix(len(dst), len(src))
    if g.r == g.s + 1:  # res at slot l
        (l,) = g.solitary_tops()
        for ci, f in enumerate(src):
            h = f[: l - 1] + f[l:]
            out.add_entry(dst.index[h], ci, 1)
    elif g.s == g.r + 1:  # res_star at slot l
        (l,) = g.solitary_bottoms()
        for ci, f in enumerate(src):
            for c in range(1, n + 1):
                if c in f:
                    continue
                h = f[: l - 1] + (c,) + f[l - 1 :]
                out.add_entry(dst.index[h], ci, 1)
    else:  # permutation
        sigma = {i: j for i, j in g.edges()}
        for ci, f in enumerate(src):
            h = [0] * g.s
            for i in range(1, g.r + 1):
                h[sigma[i] - 1] = f[i - 1]
            out.add_entry(dst.index[tuple(h)], ci, 1)
    return out


def specialize_via_generators(d: Diagram, n: int) -> RationalMatrix:
    """Independent route to the matrix of d: factor through generators.

    The product of generator matrices equals the sum of the matrices of
    d with any partial matching of its solitary tops to its solitary
    bottoms merged in (each merge arises once along the chain), so the
    matrix of d itself follows by inclusion-exclusion on merge count.
    """
    d.require_bar()
    chain = _generator_chain(d)
    prod = RationalMatrix.identity(len(InjectionBasis(d.r, n)))
    for g in chain:
        prod = _generator_matrix(g, n) @ prod
    tops = d.solitary_tops()
    bots = d.solitary_bottoms()
    from .diagrams import _partial_matchings

    for pairs in _partial_matchings(tops, bots):
        if not pairs:
            continue
        prod = prod - specialize_via_generators(_merge_pairs(d, pairs), n)
    return prod


def validate_avoidance_rule(rng: random.Random | None = None) -> None:
    """Cross-check the direct specialization against the generator route.

    Covers every bar diagram with both arities at most 2 and a random
    sample at arity 3. Raises AssertionError on any mismatch.
    """
    from .diagrams import enumerate_diagrams

    rng = rng or random.Random(7)
    small = []
    for r in range(3):
        for s in range(3):
            small.extend(enumerate_diagrams(r, s, bar_only=True))
    for d in small:
        if specialize_diagram(d, 5) != specialize_via_generators(d, 5):
            raise AssertionError(f"avoidance rule mismatch at n=5 for {d}")
    pool = enumerate_diagrams(3, 3, bar_only=True)
    for d in rng.sample(pool, 8):
        if specialize_diagram(d, 6) != specialize_via_generators(d, 6):
            raise AssertionError(f"avoidance rule mismatch at n=6 for {d}")


def categorical_dimension(e: DeltaMorphism) -> NuPolynomial:
    """Trace of an endomorphism as a polynomial in the parameter.

    Computed by specializing at k+2 integer points past 2k and
    interpolating; for the identity this is the falling factorial.
    """
    if e.src != e.dst:
        raise ValueError("dimension needs an endomorphism")
    k = e.src
    pts = []
    for n in range(2 * k + 1, 3 * k + 3):
        pts.append((Fraction(n), specialize_delta(e, n).trace()))
    return interpolate(pts)
