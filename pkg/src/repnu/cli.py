"""Command line for the toolkit.

A thin client: every subcommand serializes its options into the request
body of one service route and renders the JSON that comes back. By
default the service app is mounted in process; --url points the same
requests at a remote server. Table output is the default, --json emits
the raw response, and exit codes are 0 for success, 1 for a
verification that ran and failed, 2 for usage errors.

The optional REPNU_CACHE_DIR environment variable, read by the library
itself, names a directory for the memoized Pieri sets.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import re
import sys

import httpx

EPILOG = (
    "nu literals: an integer (23), a fraction (7/2), or T for a generic value. "
    "Diagram literals: \"[r,s] {1,1'} {2} {2'}\". Partition literals: \"6,5,4,1\" "
    "(or - for the empty diagram). Set REPNU_CACHE_DIR to persist Pieri sets."
)


def _request(url: str | None, path: str, payload: dict) -> tuple[int, object]:
    async def go():
        if url:
            async with httpx.AsyncClient(base_url=url, timeout=600.0) as client:
                r = await client.post(path, json=payload)
                return r.status_code, r.json()
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://repnu.local", timeout=None
        ) as client:
            r = await client.post(path, json=payload)
            return r.status_code, r.json()

    return asyncio.run(go())


def _pretty_coeff(factored: str) -> str:
    s = factored.replace(")*(", ")(")
    return re.sub(r"v(?:\*v)+", lambda m: f"v^{m.group(0).count('v')}", s)


# --- renderers, one per route -------------------------------------------------


def _render_compose(body: dict) -> list[str]:
    terms = body["terms"]
    if not terms:
        return ["0"]
    parts, legend = [], []
    for i, term in enumerate(terms, 1):
        tag = f"t{i}"
        coeff = _pretty_coeff(term["factored"])
        parts.append(tag if coeff == "1" else f"{coeff}*{tag}")
        legend.append(f"  {tag} = {term['diagram']}")
    return [" + ".join(parts)] + legend


def _render_specialize(body: dict) -> list[str]:
    head = f"{body['nrows']} x {body['ncols']}"
    if not body["entries"]:
        return [head, "zero matrix"]
    return [head] + [f"({i},{j}) = {v}" for i, j, v in body["entries"]]


def _render_class(body: dict) -> list[str]:
    lines = [
        ("trivial class: " if body["trivial"] else "class: ")
        + " | ".join(body["class"])
    ]
    lines += ["hom: " + " ".join(str(v) for v in row) for row in body["hom"]]
    return lines


def _render_char(body: dict) -> list[str]:
    lines = [body["label"]]
    lines += [f"  {name}: {mult}" for name, mult in body["char"]]
    lines.append(f"cutoff: {body['cutoff']}")
    return lines


def _render_bgg(body: dict) -> list[str]:
    lines = [body["label"]]
    lines += [f"  {key} = {value}" for key, value in body["char"]]
    lines.append("OK" if body["ok"] else "FAILED")
    return lines


def _render_sw(body: dict) -> list[str]:
    lines = [f"image: {body['image_label']}"]
    lines += [f"  {name}: {mult}" for name, mult in body["char"]]
    checks = body["checks"]
    flat = ", ".join(f"{k}={v}" for k, v in checks.items() if v is not None)
    lines.append(f"checks: {flat}")
    return lines


def _render_dim(body: dict) -> list[str]:
    return [body["poly"]]


def _render_verify(body: dict) -> list[str]:
    if body["ok"]:
        return [f"OK ({body['identities']} identities)"]
    lines = []
    for line in body["lines"]:
        if not line["ok"]:
            lines.append(f"{line['name']}: {line['detail'] or 'FAIL'}")
    lines.append(f"FAILED ({len(lines)} of {body['identities']} identities)")
    return lines


def _render_tensor(body: dict) -> list[str]:
    out = []
    for line in body["lines"]:
        detail = f" ({line['detail']})" if line["ok"] and line["detail"] else ""
        out.append(
            f"{line['name']}: OK{detail}"
            if line["ok"]
            else f"{line['name']}: {line['detail'] or 'FAIL'}"
        )
    return out


def _ok_default(body: dict) -> bool:
    return bool(body.get("ok", True)) if isinstance(body, dict) else True


def _ok_sw(body: dict) -> bool:
    checks = body["checks"]
    return checks["routes_agree"] and checks["duality"]


ROUTES = {
    "compose": ("/compose", _render_compose, _ok_default),
    "specialize": ("/specialize", _render_specialize, _ok_default),
    "class": ("/class", _render_class, _ok_default),
    "homdim": ("/homdim", _render_class, _ok_default),
    "verma": ("/verma", _render_char, _ok_default),
    "char": ("/char", _render_char, _ok_default),
    "bgg": ("/bgg", _render_bgg, _ok_default),
    "sw": ("/sw", _render_sw, _ok_sw),
    "dim": ("/dim", _render_dim, _ok_default),
    "verify": ("/verify", _render_verify, _ok_default),
    "tensor-verify": ("/tensor/verify", _render_tensor, _ok_default),
    "tensor-specialize": ("/tensor/specialize", _render_tensor, _ok_default),
}


# --- argument parsing ----------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="emit the raw JSON response")
    p.add_argument("--url", help="send requests to a running server instead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repnu",
        description="Exact calculator for interpolated symmetric-group "
        "representation categories and the parabolic category they restrict to.",
        epilog=EPILOG,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("compose", help="compose two diagrams")
    p.add_argument("--pi", required=True, help="diagram applied first")
    p.add_argument("--rho", required=True, help="diagram applied second")
    p.add_argument("--rule", choices=["delta", "h"], default="delta")
    p.add_argument("--unsafe-limits", action="store_true")
    _add_common(p)

    p = sub.add_parser("specialize", help="evaluate a diagram at an integer rank")
    p.add_argument("--pi", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rule", choices=["delta", "h"], default="delta")
    p.add_argument("--unsafe-limits", action="store_true")
    _add_common(p)

    p = sub.add_parser(
        "class", aliases=["blocks"], help="chain members and their hom table"
    )
    p.add_argument("--lambda", dest="lam", required=True, metavar="LAMBDA")
    p.add_argument("--nu", required=True)
    p.add_argument("--upto", type=int, default=6)
    _add_common(p)

    p = sub.add_parser("homdim", help="hom dimensions between two indecomposables")
    p.add_argument("--lambda", dest="lam", required=True, metavar="LAMBDA")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    _add_common(p)

    for name, help_text in (
        ("verma", "restricted character of a standard module"),
        ("char", "restricted character of any labeled module"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--lambda", dest="lam", required=True, metavar="LAMBDA")
        p.add_argument("--nu", required=True)
        p.add_argument("--N", dest="big_n", type=int, required=True)
        p.add_argument("--cutoff", type=int, default=8)
        if name == "char":
            p.add_argument(
                "--kind",
                choices=["simple", "verma", "dual_verma", "projective", "injective"],
                default="verma",
            )
        _add_common(p)

    p = sub.add_parser("bgg", help="reciprocity table for one block")
    p.add_argument("--lambda", dest="lam", required=True, metavar="LAMBDA")
    p.add_argument("--nu", required=True)
    p.add_argument("--N", dest="big_n", type=int, required=True)
    p.add_argument("--upto", type=int, default=6)
    _add_common(p)

    p = sub.add_parser("sw", help="image of an envelope object under restriction")
    p.add_argument("--object", required=True, help="KIND:INDEX, kinds L, M, M*, P")
    p.add_argument("--lambda", dest="lam", default="-", metavar="LAMBDA")
    p.add_argument("--nu", required=True)
    p.add_argument("--N", dest="big_n", type=int, required=True)
    p.add_argument("--cutoff", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("dim", help="interpolated dimension of one grade")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--unsafe-limits", action="store_true")
    _add_common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all")
    p.add_argument("--max-arity", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unsafe-limits", action="store_true")
    _add_common(p)

    p = sub.add_parser("tensor", help="tensor-power operator checks")
    tsub = p.add_subparsers(dest="tensor_command", required=True)

    tp = tsub.add_parser("verify", help="commutator identities on one grade")
    tp.add_argument("--k", type=int, default=2)
    tp.add_argument("--d", type=int, default=1)
    tp.add_argument("--unsafe-limits", action="store_true")
    _add_common(tp)

    tp = tsub.add_parser("specialize", help="compare against an integer tensor power")
    tp.add_argument("--n", type=int, required=True)
    tp.add_argument("--k", type=int)
    tp.add_argument("--d", type=int, default=1)
    tp.add_argument("--unsafe-limits", action="store_true")
    _add_common(tp)

    return parser


def _payload(args: argparse.Namespace) -> tuple[str, dict]:
    sub = args.subcommand
    if sub == "blocks":
        sub = "class"
    if sub == "tensor":
        sub = f"tensor-{args.tensor_command}"
    if sub == "compose":
        body = {
            "rule": args.rule,
            "pi": args.pi,
            "rho": args.rho,
            "unsafe_limits": args.unsafe_limits,
        }
    elif sub == "specialize":
        body = {
            "rule": args.rule,
            "pi": args.pi,
            "n": args.n,
            "unsafe_limits": args.unsafe_limits,
        }
    elif sub == "class":
        body = {"diagram": args.lam, "nu": args.nu, "upto": args.upto}
    elif sub == "homdim":
        body = {"lam": args.lam, "mu": args.mu, "nu": args.nu}
    elif sub in ("verma", "char"):
        body = {
            "diagram": args.lam,
            "nu": args.nu,
            "N": args.big_n,
            "cutoff": args.cutoff,
            "kind": getattr(args, "kind", "verma"),
        }
    elif sub == "bgg":
        body = {"diagram": args.lam, "nu": args.nu, "N": args.big_n, "upto": args.upto}
    elif sub == "sw":
        body = {
            "object": args.object,
            "diagram": args.lam,
            "nu": args.nu,
            "N": args.big_n,
            "cutoff": args.cutoff,
        }
    elif sub == "dim":
        body = {"k": args.k, "d": args.d, "unsafe_limits": args.unsafe_limits}
    elif sub == "verify":
        body = {
            "suite": args.suite,
            "max_arity": args.max_arity,
            "k": args.k,
            "d": args.d,
            "n": args.n,
            "cases": args.cases,
            "seed": args.seed,
            "unsafe_limits": args.unsafe_limits,
        }
    elif sub == "tensor-verify":
        body = {"k": args.k, "d": args.d, "unsafe_limits": args.unsafe_limits}
    else:  # tensor-specialize
        body = {
            "n": args.n,
            "d": args.d,
            "unsafe_limits": args.unsafe_limits,
        }
        if args.k is not None:
            body["k"] = args.k
    return sub, body


def _describe_422(body: object) -> str:
    # pydantic validation detail: list of {loc, msg, ...}
    if isinstance(body, dict):
        detail = body.get("detail")
        if isinstance(detail, str):
            return detail
        if isinstance(detail, list):
            parts = []
            for item in detail:
                loc = ".".join(str(x) for x in item.get("loc", []) if x != "body")
                parts.append(f"{loc}: {item.get('msg', 'invalid')}")
            return "; ".join(parts)
    return str(body)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    sub, body = _payload(args)
    path, render, extract_ok = ROUTES[sub]
    try:
        status, response = _request(args.url, path, body)
    except httpx.HTTPError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # in-process app: bugs propagate through the transport
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1
    if status >= 500:
        print(_describe_422(response), file=sys.stderr)
        return 1
    if status >= 400:
        print(_describe_422(response), file=sys.stderr)
        return 2
    ok = extract_ok(response)
    if args.json:
        print(json.dumps(response, indent=2))
    else:
        for line in render(response):
            print(line)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
