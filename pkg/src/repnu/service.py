"""HTTP facade over the toolkit.

One POST route per desk operation. The pydantic request models double as
the option schemas for the command line, which mounts this app in
process through an ASGI transport, so both transports validate input
identically. Domain errors (bad literals, guard violations) become 400
responses; a verification suite that runs to completion but finds a
failing identity is still a 200, with ok set to False.

Guards only ratchet upward: a request with unsafe_limits=True raises the
process-wide resource limits and they stay raised, so a shared
deployment should not accept that flag from untrusted callers.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from . import diagrams as _diagrams
from . import tensor_ops as _tensor
from .deligne import AbelianObjectLabel, block_summary, hom_dim_indec
from .diagrams import (
    DeltaMorphism,
    HMorphism,
    compose_delta,
    compose_h,
    generator,
    parse_diagram,
)
from .exact_arith import (
    NuPolynomial,
    ResourceLimitError,
    format_factored,
    format_poly,
)
from .parabolic import (
    char_of_label,
    make_label,
    projective_data,
    verma_factors,
)
from .schur_weyl import duality_check, sw_image, sw_kernel
from .specialize import (
    oracle_check_composition,
    specialize_delta,
    specialize_h,
    validate_avoidance_rule,
)
from .tensor_ops import (
    TensorOperator,
    UnitalSpace,
    almost_injectivity_check,
    build_generator,
    check_res_star_equivariance,
    graded_dimension,
    specialize_and_compare,
    two_splittings_check,
    verify_commutators,
)
from .young import format_partition, nu_class, parse_partition

app = FastAPI(title="repnu", version=__version__)

# Desk-scale limits enforced at the boundary. unsafe_limits lifts these
# and raises the library-module guards they mirror.
GUARD_ARITY = 8
GUARD_K = 6
GUARD_N = 12


class DomainError(ValueError):
    pass


@app.exception_handler(ValueError)
@app.exception_handler(ResourceLimitError)
@app.exception_handler(IndexError)
async def _domain_error(request: Request, exc: Exception):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(RuntimeError)
async def _internal_error(request: Request, exc: Exception):
    # a route disagreement or a broken table is a bug, not a usage error
    return JSONResponse(status_code=500, content={"detail": str(exc)})


def _lift_guards() -> None:
    _diagrams.MAX_ARITY = max(_diagrams.MAX_ARITY, 12)
    _tensor.MAX_GRADE = max(_tensor.MAX_GRADE, 12)
    _tensor.MAX_SPECIALIZE_N = max(_tensor.MAX_SPECIALIZE_N, 12)
    _tensor.MAX_VERIFY_K = max(_tensor.MAX_VERIFY_K, 5)
    _tensor.MAX_VERIFY_D = max(_tensor.MAX_VERIFY_D, 3)


def _guard(value: int, bound: int, what: str, unsafe: bool) -> None:
    if unsafe:
        _lift_guards()
    elif value > bound:
        raise DomainError(
            f"{what} {value} exceeds the desk guard {bound}; pass unsafe_limits to override"
        )


SYMBOLIC_NU = ("T", "t", "v", "nu")


def parse_nu(text: str) -> Fraction | None:
    """Parameter literal: an integer, a/b, or T for a generic value."""
    t = str(text).strip()
    if t in SYMBOLIC_NU:
        return None
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"bad nu literal {text!r}: want an integer, a/b, or T")


def _numeric_nu(nu: Fraction | None) -> Fraction:
    # Any non-integer rational sees only trivial classes, so one generic
    # stand-in computes every symbolic-parameter table faithfully.
    return Fraction(1, 2) if nu is None else nu


def _integer_nu(nu: Fraction | None, what: str) -> Fraction:
    if nu is None or nu.denominator != 1:
        raise DomainError(
            f"{what} needs an integer parameter: away from nonnegative integers "
            "every class is a single diagram and there is no chain to tabulate"
        )
    return nu


KIND_SHORT = {"L": "simple", "M": "standard", "M*": "costandard", "P": "projective"}
O_KIND_TAG = {
    "simple": "L",
    "verma": "M",
    "dual_verma": "M^",
    "projective": "P",
    "injective": "I",
}


def _label_str(label) -> str:
    if not hasattr(label, "kind"):
        return str(label)  # formal kernel object
    if label.is_zero():
        return "0"
    return f"{O_KIND_TAG[label.kind]}({format_partition(label.diagram())})"


# ---------------------------------------------------------------------------
# composition and specialization


class ComposeRequest(BaseModel):
    rule: Literal["delta", "h"] = "delta"
    pi: str = Field(description="diagram applied first")
    rho: str = Field(description="diagram applied second")
    unsafe_limits: bool = False


class ComposeTerm(BaseModel):
    coeff: str
    factored: str
    diagram: str


class ComposeResponse(BaseModel):
    rule: str
    src: int
    dst: int
    terms: list[ComposeTerm]


@app.post("/compose", response_model=ComposeResponse)
def compose_endpoint(req: ComposeRequest) -> ComposeResponse:
    pi = parse_diagram(req.pi)
    rho = parse_diagram(req.rho)
    for d in (pi, rho):
        _guard(max(d.r, d.s), GUARD_ARITY, "arity", req.unsafe_limits)
    if req.rule == "delta":
        result = compose_delta(DeltaMorphism.from_diagram(rho), DeltaMorphism.from_diagram(pi))
    else:
        result = compose_h(HMorphism.from_diagram(rho), HMorphism.from_diagram(pi))
    terms = [
        ComposeTerm(coeff=format_poly(c), factored=format_factored(c), diagram=str(d))
        for d, c in result.sorted_terms()
    ]
    return ComposeResponse(rule=req.rule, src=result.src, dst=result.dst, terms=terms)


class SpecializeRequest(BaseModel):
    rule: Literal["delta", "h"] = "delta"
    pi: str
    n: int = Field(ge=0)
    unsafe_limits: bool = False


class SpecializeResponse(BaseModel):
    nrows: int
    ncols: int
    entries: list[tuple[int, int, str]]


@app.post("/specialize", response_model=SpecializeResponse)
def specialize_endpoint(req: SpecializeRequest) -> SpecializeResponse:
    d = parse_diagram(req.pi)
    _guard(max(d.r, d.s), GUARD_ARITY, "arity", req.unsafe_limits)
    _guard(req.n, GUARD_N, "n", req.unsafe_limits)
    if req.rule == "delta":
        mat = specialize_delta(DeltaMorphism.from_diagram(d), req.n)
    else:
        mat = specialize_h(HMorphism.from_diagram(d), req.n)
    entries = [
        (i, j, str(v))
        for i, row in sorted(mat.rows.items())
        for j, v in sorted(row.items())
    ]
    return SpecializeResponse(nrows=mat.nrows, ncols=mat.ncols, entries=entries)


# ---------------------------------------------------------------------------
# block structure


class ClassRequest(BaseModel):
    diagram: str
    nu: str
    upto: int = Field(default=6, ge=0, le=64)


class ClassResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    trivial: bool
    members: list[str] = Field(alias="class")
    hom: list[list[int]]


@app.post("/class", response_model=ClassResponse)
def class_endpoint(req: ClassRequest) -> ClassResponse:
    nu = _integer_nu(parse_nu(req.nu), "class structure")
    lam = parse_partition(req.diagram)
    summary = block_summary(lam, nu, req.upto)
    return ClassResponse(**summary)


class HomdimRequest(BaseModel):
    lam: str
    mu: str
    nu: str


@app.post("/homdim", response_model=ClassResponse)
def homdim_endpoint(req: HomdimRequest) -> ClassResponse:
    nu = _numeric_nu(parse_nu(req.nu))
    lam = parse_partition(req.lam)
    mu = parse_partition(req.mu)
    pair = [lam, mu]
    hom = [[hom_dim_indec(a, b, nu) for b in pair] for a in pair]
    return ClassResponse(
        trivial=nu_class(lam, nu).trivial and nu_class(mu, nu).trivial,
        members=[format_partition(p) for p in pair],
        hom=hom,
    )


# ---------------------------------------------------------------------------
# characters


class CharRequest(BaseModel):
    kind: Literal["simple", "verma", "dual_verma", "projective", "injective"] = "verma"
    diagram: str
    nu: str
    big_n: int = Field(alias="N", ge=2, le=16)
    cutoff: int = Field(default=8, ge=0, le=64)

    model_config = ConfigDict(populate_by_name=True)


class CharResponse(BaseModel):
    label: str
    char: list[tuple[str, int]]
    cutoff: int


def _char_payload(req: CharRequest) -> CharResponse:
    nu_val = parse_nu(req.nu)
    nu = _numeric_nu(nu_val)
    lam = parse_partition(req.diagram)
    cls = nu_class(lam, nu)
    index = 0 if cls.trivial else cls.position_of(lam)
    label = make_label(req.kind, cls, index, req.big_n)
    ch = char_of_label(label, nu, req.cutoff)
    return CharResponse(label=_label_str(label), char=ch.sorted_items(), cutoff=req.cutoff)


@app.post("/verma", response_model=CharResponse)
def verma_endpoint(req: CharRequest) -> CharResponse:
    if req.kind != "verma":
        raise DomainError("the verma route fixes kind=verma; use /char for other kinds")
    return _char_payload(req)


@app.post("/char", response_model=CharResponse)
def char_endpoint(req: CharRequest) -> CharResponse:
    return _char_payload(req)


class BggRequest(BaseModel):
    diagram: str
    nu: str
    big_n: int = Field(alias="N", ge=2, le=16)
    upto: int = Field(default=6, ge=0, le=32)

    model_config = ConfigDict(populate_by_name=True)


class BggResponse(BaseModel):
    label: str
    char: list[tuple[str, int]]
    cutoff: int
    ok: bool


@app.post("/bgg", response_model=BggResponse)
def bgg_endpoint(req: BggRequest) -> BggResponse:
    nu = _integer_nu(parse_nu(req.nu), "BGG reciprocity")
    lam = parse_partition(req.diagram)
    cls = nu_class(lam, nu)
    positions = range(1) if cls.trivial else range(req.upto + 1)
    rows: list[tuple[str, int]] = []
    ok = True
    for j in positions:
        filtration = projective_data(cls, j, nu, req.big_n).standard_filtration
        for i in positions:
            lhs = sum(1 for lab in filtration if lab.index == i and not lab.is_zero())
            rhs = sum(1 for lab in verma_factors(cls, i, req.big_n) if lab.index == j)
            if lhs != rhs:
                ok = False
                rows.append((f"(P_{j}:M_{i})={lhs} but [M_{i}:L_{j}]={rhs}", lhs - rhs))
            elif lhs:
                rows.append((f"(P_{j}:M_{i})=[M_{i}:L_{j}]", lhs))
    return BggResponse(
        label=f"block of {format_partition(cls.base)} at nu={nu}, N={req.big_n}",
        char=rows,
        cutoff=req.upto,
        ok=ok,
    )


# ---------------------------------------------------------------------------
# the transport functor


class SwRequest(BaseModel):
    object: str = Field(description="object literal KIND:INDEX, kinds L, M, M*, P")
    diagram: str = ""
    nu: str
    big_n: int = Field(alias="N", ge=2, le=16)
    cutoff: int = Field(default=10, ge=0, le=64)

    model_config = ConfigDict(populate_by_name=True)


class SwChecks(BaseModel):
    routes_agree: bool
    duality: bool
    image_zero: bool
    kernel_predicate: bool | None = None


class SwResponse(BaseModel):
    image_label: str
    char: list[tuple[str, int]]
    cutoff: int
    checks: SwChecks


def _parse_object(text: str) -> tuple[str, int]:
    head, sep, tail = text.partition(":")
    kind = KIND_SHORT.get(head.strip())
    if not sep or kind is None or not tail.strip().isdigit():
        raise DomainError(
            f"bad object literal {text!r}: want KIND:INDEX with KIND one of L, M, M*, P"
        )
    return kind, int(tail)


@app.post("/sw", response_model=SwResponse)
def sw_endpoint(req: SwRequest) -> SwResponse:
    nu = _numeric_nu(parse_nu(req.nu))
    kind, index = _parse_object(req.object)
    lam = parse_partition(req.diagram)
    cls = nu_class(lam, nu)
    if cls.trivial and index > 0:
        raise DomainError(
            f"the class of {format_partition(lam)} at nu={nu} is a single diagram; "
            "only index 0 exists"
        )
    x = AbelianObjectLabel(kind, cls, index)
    img = sw_image(x, nu, req.big_n, req.cutoff)
    image_zero = not img.char
    checks = SwChecks(
        routes_agree=True,  # sw_image recomputes the character both ways
        duality=duality_check(x, nu, req.big_n),
        image_zero=image_zero,
        kernel_predicate=(
            sw_kernel(nu, req.big_n)(cls.member(index)) if kind == "simple" else None
        ),
    )
    return SwResponse(
        image_label=_label_str(img.label),
        char=img.char.sorted_items(),
        cutoff=req.cutoff,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# dimension


class DimRequest(BaseModel):
    k: int = Field(ge=0)
    d: int = Field(default=1, ge=1, le=8)
    unsafe_limits: bool = False


class DimResponse(BaseModel):
    k: int
    d: int
    poly: str
    expanded: str


@app.post("/dim", response_model=DimResponse)
def dim_endpoint(req: DimRequest) -> DimResponse:
    _guard(req.k, GUARD_K, "grade", req.unsafe_limits)
    p = graded_dimension(req.k, req.d)
    return DimResponse(k=req.k, d=req.d, poly=format_factored(p), expanded=format_poly(p))


# ---------------------------------------------------------------------------
# verification suites

Report = list[tuple[str, bool, str]]


def _suite_commutators(req: "VerifyRequest") -> Report:
    return verify_commutators(req.k, req.d)


def _suite_generators(req: "VerifyRequest") -> Report:
    report: Report = []
    nu = NuPolynomial.variable()
    for k in range(1, req.k + 1):
        ok = True
        for l in range(1, k + 2):
            lhs = compose_delta(
                DeltaMorphism.from_diagram(generator("res", k, l)),
                DeltaMorphism.from_diagram(generator("res_star", k, l)),
            )
            if lhs != (nu - k) * DeltaMorphism.identity(k):
                ok = False
        report.append((f"res o res* = (v-{k})id on grade {k}", ok, ""))
    for k in range(1, min(req.k, 3) + 1):
        report.append(
            (f"res* equivariance on grade {k}", check_res_star_equivariance(k), "")
        )
    return report


def _suite_oracle(req: "VerifyRequest") -> Report:
    bars = {
        (r, s): _diagrams.enumerate_diagrams(r, s, bar_only=True)
        for r in range(req.max_arity + 1)
        for s in range(req.max_arity + 1)
    }
    checked = 0
    for (r, s), before_list in bars.items():
        for (s2, t), after_list in bars.items():
            if s2 != s:
                continue
            n = 2 * (r + s + t) + 1
            for before in before_list:
                for after in after_list:
                    pair = (
                        DeltaMorphism.from_diagram(after),
                        DeltaMorphism.from_diagram(before),
                    )
                    if not oracle_check_composition(*pair, "delta", n):
                        return [
                            (
                                "delta composition vs injection model",
                                False,
                                f"{before} then {after} at n={n}",
                            )
                        ]
                    checked += 1
    return [("delta composition vs injection model", True, f"{checked} pairs")]


def _suite_specialize(req: "VerifyRequest") -> Report:
    return specialize_and_compare(min(req.k, req.n), req.d, req.n)


def _suite_splittings(req: "VerifyRequest") -> Report:
    shifts = [Fraction(1, 2), Fraction(-3), Fraction(5), Fraction(-7)][: req.d]
    return two_splittings_check(req.d, shifts, grade_max=min(req.k, 3))


def _random_nonzero_operator(rng: random.Random, d: int) -> TensorOperator:
    space = UnitalSpace(d)
    k = rng.randrange(0, 3)
    kind = rng.choice(["F", "E", "GL", "Sym"])
    if kind == "F":
        u = [Fraction(rng.randrange(-3, 4)) for _ in range(d)]
        if all(x == 0 for x in u):
            u[0] = Fraction(1)
        return build_generator("F", k, space, u)
    if kind == "E":
        f = [Fraction(rng.randrange(-3, 4)) for _ in range(d)]
        if all(x == 0 for x in f):
            f[-1] = Fraction(2)
        return build_generator("E", k + 1, space, f)
    if kind == "GL":
        a = [[Fraction(rng.randrange(-2, 3)) for _ in range(d)] for _ in range(d)]
        if all(x == 0 for row in a for x in row):
            a[0][0] = Fraction(1)
        return build_generator("GL", k, space, a)
    return build_generator("Sym", k, space)


def _suite_injectivity(req: "VerifyRequest") -> Report:
    rng = random.Random(req.seed)
    failures = 0
    for _ in range(req.cases):
        d = rng.randrange(1, 3)
        phi = _random_nonzero_operator(rng, d)
        if phi.is_zero():
            phi = build_generator("Sym", 1, UnitalSpace(d))
        u = [Fraction(rng.randrange(-3, 4)) for _ in range(d)]
        if all(x == 0 for x in u):
            u[0] = Fraction(1)
        if not almost_injectivity_check(phi, u):
            failures += 1
    return [
        (
            "F composed with a nonzero map stays nonzero",
            failures == 0,
            f"{req.cases} cases, {failures} failures",
        )
    ]


def _suite_avoidance(req: "VerifyRequest") -> Report:
    validate_avoidance_rule(random.Random(req.seed))
    return [("solitary-bottom avoidance rule", True, "")]


def _suite_bgg(req: "VerifyRequest") -> Report:
    from .parabolic import bgg_reciprocity_check
    from .young import partitions_of

    ok = True
    checked = 0
    for nu in range(2, 9):
        for n in range(0, 5):
            for lam in partitions_of(n):
                cls = nu_class(lam, Fraction(nu))
                for big_n in range(2, 6):
                    if not bgg_reciprocity_check(cls, Fraction(nu), big_n, req.k):
                        ok = False
                    checked += 1
    return [("BGG reciprocity over small blocks", ok, f"{checked} blocks")]


SUITES = {
    "commutators": _suite_commutators,
    "generators": _suite_generators,
    "oracle": _suite_oracle,
    "specialize": _suite_specialize,
    "splittings": _suite_splittings,
    "injectivity": _suite_injectivity,
    "avoidance": _suite_avoidance,
    "bgg": _suite_bgg,
}


class VerifyRequest(BaseModel):
    suite: str = "all"
    max_arity: int = Field(default=2, ge=0, le=8)
    k: int = Field(default=2, ge=0)
    d: int = Field(default=2, ge=1)
    n: int = Field(default=4, ge=1)
    cases: int = Field(default=50, ge=1, le=10_000)
    seed: int = 0
    unsafe_limits: bool = False


class VerifyLine(BaseModel):
    name: str
    ok: bool
    detail: str


class VerifyResponse(BaseModel):
    suite: str
    ok: bool
    identities: int
    lines: list[VerifyLine]


@app.post("/verify", response_model=VerifyResponse)
def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
    if req.unsafe_limits:
        _lift_guards()
    else:
        _guard(req.k, GUARD_K, "grade", False)
        _guard(req.n, GUARD_N, "n", False)
    names = list(SUITES) if req.suite == "all" else [req.suite]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise DomainError(f"unknown suite {unknown[0]!r}: choose from {', '.join(SUITES)} or all")
    lines: list[VerifyLine] = []
    for name in names:
        for ident, ok, detail in SUITES[name](req):
            lines.append(VerifyLine(name=ident, ok=ok, detail=detail))
    return VerifyResponse(
        suite=req.suite,
        ok=all(line.ok for line in lines),
        identities=len(lines),
        lines=lines,
    )


class TensorVerifyRequest(BaseModel):
    k: int = Field(default=2, ge=0)
    d: int = Field(default=1, ge=1)
    unsafe_limits: bool = False


class TensorSpecializeRequest(BaseModel):
    n: int = Field(ge=1)
    k: int | None = Field(default=None, ge=1)
    d: int = Field(default=1, ge=1)
    unsafe_limits: bool = False


@app.post("/tensor/verify", response_model=VerifyResponse)
def tensor_verify_endpoint(req: TensorVerifyRequest) -> VerifyResponse:
    if req.unsafe_limits:
        _lift_guards()
    lines = [
        VerifyLine(name=name, ok=ok, detail=detail)
        for name, ok, detail in verify_commutators(req.k, req.d)
    ]
    return VerifyResponse(
        suite="tensor-verify",
        ok=all(line.ok for line in lines),
        identities=len(lines),
        lines=lines,
    )


@app.post("/tensor/specialize", response_model=VerifyResponse)
def tensor_specialize_endpoint(req: TensorSpecializeRequest) -> VerifyResponse:
    if req.unsafe_limits:
        _lift_guards()
    else:
        _guard(req.n, GUARD_N, "n", False)
    k_max = req.k if req.k is not None else req.n
    lines = [
        VerifyLine(name=name, ok=ok, detail=detail)
        for name, ok, detail in specialize_and_compare(k_max, req.d, req.n)
    ]
    return VerifyResponse(
        suite="tensor-specialize",
        ok=all(line.ok for line in lines),
        identities=len(lines),
        lines=lines,
    )


class HealthResponse(BaseModel):
    ok: bool
    version: str


@app.get("/health", response_model=HealthResponse)
def health_endpoint() -> HealthResponse:
    return HealthResponse(ok=True, version=__version__)
