"""Exact rational and polynomial arithmetic.

Everything downstream works over Q or Q[v], where v is the interpolation
parameter. No floats anywhere; coefficients are fractions.Fraction.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction

Scalar = Union[int, Fraction]

# Degree guard: compositions only ever add one factor per middle component,
# so anything past this is a runaway, not a legitimate computation.
MAX_DEGREE = 64


class ResourceLimitError(RuntimeError):
    """Raised when an input exceeds a documented resource guard."""


def _coerce(x: Scalar) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class NuPolynomial:
    """Dense univariate polynomial over Q in the variable v.

    Immutable. Coefficients are stored low degree first with trailing
    zeros stripped, so equal polynomials compare and hash equal.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if len(cs) > MAX_DEGREE + 1:
            raise ResourceLimitError(
                f"polynomial degree {len(cs) - 1} exceeds guard {MAX_DEGREE}"
            )
        self.coeffs = tuple(cs)

    @staticmethod
    def constant(c: Scalar) -> "NuPolynomial":
        return NuPolynomial([c])

    @staticmethod
    def variable() -> "NuPolynomial":
        return NuPolynomial([0, 1])

    @staticmethod
    def coerce(x: "NuPolynomial | Scalar") -> "NuPolynomial":
        if isinstance(x, NuPolynomial):
            return x
        return NuPolynomial.constant(x)

    def degree(self) -> int:
        """Degree, with the zero polynomial reported as -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = NuPolynomial.constant(other)
        if not isinstance(other, NuPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> "NuPolynomial":
        if not isinstance(other, (NuPolynomial, int, Fraction)):
            return NotImplemented
        other = NuPolynomial.coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return NuPolynomial(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (other.coeffs[i] if i < len(other.coeffs) else 0)
                for i in range(n)
            ]
        )

    __radd__ = __add__

    def __neg__(self) -> "NuPolynomial":
        return NuPolynomial([-c for c in self.coeffs])

    def __sub__(self, other) -> "NuPolynomial":
        return self + (-NuPolynomial.coerce(other))

    def __rsub__(self, other) -> "NuPolynomial":
        return NuPolynomial.coerce(other) + (-self)

    def __mul__(self, other) -> "NuPolynomial":
        if not isinstance(other, (NuPolynomial, int, Fraction)):
            return NotImplemented
        other = NuPolynomial.coerce(other)
        if not self.coeffs or not other.coeffs:
            return NuPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return NuPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "NuPolynomial":
        if n < 0:
            raise ValueError("negative power")
        out = NuPolynomial.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, x: Scalar) -> Fraction:
        return poly_eval(self, x)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"NuPolynomial({list(self.coeffs)!r})"


ZERO = NuPolynomial()
ONE = NuPolynomial.constant(1)
V = NuPolynomial.variable()


def poly_eval(p: NuPolynomial, x: Scalar) -> Fraction:
    """Evaluate p at a rational point by Horner's rule."""
    x = _coerce(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def falling_factorial(k: int, offset: Scalar = 0) -> NuPolynomial:
    """(v - offset)(v - offset - 1) ... (v - offset - k + 1), k factors.

    The empty product (k = 0) is 1.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    off = _coerce(offset)
    out = ONE
    for j in range(k):
        out = out * NuPolynomial([-(off + j), 1])
    return out


def binomial_poly(k: int) -> NuPolynomial:
    """Binomial coefficient C(v, k) as a polynomial in v."""
    import math

    return falling_factorial(k) * Fraction(1, math.factorial(k))


_TERM_RE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?:(?P<coeff>\d+(?:/\d+)?)\s*\*?\s*)?"
    r"(?:(?P<var>v)(?:\^(?P<exp>\d+))?)?\s*$"
)


def format_poly(p: NuPolynomial) -> str:
    """Canonical text form, low degree first: "c0 + c1*v + c2*v^2".

    Zero coefficients are skipped and negatives render as "+ -c*v^k",
    which the parser accepts back. The zero polynomial prints as "0".
    """
    if p.is_zero():
        return "0"
    parts = []
    for e, c in enumerate(p.coeffs):
        if c == 0:
            continue
        if e == 0:
            parts.append(str(c))
        elif c == 1:
            parts.append("v" if e == 1 else f"v^{e}")
        elif c == -1:
            parts.append("-v" if e == 1 else f"-v^{e}")
        else:
            parts.append(f"{c}*v" if e == 1 else f"{c}*v^{e}")
    return " + ".join(parts)


def parse_poly(text: str) -> NuPolynomial:
    """Inverse of format_poly. Accepts "+"-joined terms like "3/2*v^2"."""
    text = text.strip()
    if text in ("0", ""):
        return ZERO
    coeffs: dict[int, Fraction] = {}
    for raw in text.split("+"):
        m = _TERM_RE.match(raw)
        if not m or (m.group("coeff") is None and m.group("var") is None):
            raise ValueError(f"bad polynomial term: {raw!r}")
        c = Fraction(m.group("coeff")) if m.group("coeff") else Fraction(1)
        if m.group("sign") == "-":
            c = -c
        if m.group("var"):
            e = int(m.group("exp")) if m.group("exp") else 1
        else:
            e = 0
        coeffs[e] = coeffs.get(e, Fraction(0)) + c
    out = [Fraction(0)] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return NuPolynomial(out)


def interpolate(points: Sequence[tuple[Scalar, Scalar]]) -> NuPolynomial:
    """Lagrange interpolation through distinct rational points, exact."""
    xs = [_coerce(x) for x, _ in points]
    ys = [_coerce(y) for _, y in points]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    total = ZERO
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        num = NuPolynomial.constant(yi)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            num = num * NuPolynomial([-xj, 1]) * Fraction(1, xi - xj)
        total = total + num
    return total


def rational_roots(p: NuPolynomial) -> list[Fraction]:
    """All rational roots of p, with multiplicity, via trial division.

    Candidates come from the rational root theorem applied after
    clearing denominators.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    roots: list[Fraction] = []
    cur = p
    while cur.degree() >= 1:
        den = 1
        for c in cur.coeffs:
            den = den * c.denominator // _gcd(den, c.denominator)
        ints = [c * den for c in cur.coeffs]
        lead = int(ints[-1])
        low = next(int(c) for c in ints if c != 0)
        found = None
        for q in _divisors(abs(lead)):
            for pnum in _divisors(abs(low)) if low else [0]:
                for cand in {Fraction(pnum, q), Fraction(-pnum, q)}:
                    if poly_eval(cur, cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None and poly_eval(cur, 0) == 0:
            found = Fraction(0)
        if found is None:
            break
        roots.append(found)
        cur = _divide_linear(cur, found)
    return roots


def _gcd(a: int, b: int) -> int:
    import math

    return math.gcd(a, b)


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [1]
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def _divide_linear(p: NuPolynomial, root: Fraction) -> NuPolynomial:
    # synthetic division by (v - root); remainder must vanish
    cs = list(reversed(p.coeffs))
    out = []
    acc = Fraction(0)
    for c in cs:
        acc = acc * root + c
        out.append(acc)
    rem = out.pop()
    if rem != 0:
        raise ValueError("not a root")
    return NuPolynomial(list(reversed(out)))


def format_factored(p: NuPolynomial) -> str:
    """Product-of-linear-factors rendering when p splits over Q.

    Examples: "(v-6)*(v-7)", "v*(v-1)*(v-2)/6". Falls back to the dense
    form when p has an irreducible factor of degree > 1.
    """
    if p.is_zero():
        return "0"
    if p.degree() == 0:
        return str(p.coeffs[0])
    roots = rational_roots(p)
    if len(roots) != p.degree():
        return format_poly(p)
    lead = p.leading()
    factors = []
    for r in sorted(roots):
        if r == 0:
            factors.append("v")
        elif r > 0:
            factors.append(f"(v-{r})")
        else:
            factors.append(f"(v+{-r})")
    body = "*".join(factors)
    if lead == 1:
        return body
    if lead.numerator == 1:
        return f"{body}/{lead.denominator}"
    if lead.numerator == -1:
        return f"-{body}/{lead.denominator}"
    return f"{lead}*{body}"
