import asyncio
import json
from importlib.resources import files

import httpx
import jsonschema
import pytest

import repnu.diagrams as diagrams_mod
import repnu.tensor_ops as tensor_mod
from repnu.cli import main
from repnu.diagrams import format_diagram, identity_diagram
from repnu.service import app

SCHEMA = json.loads(files("repnu").joinpath("data/cli_schema.json").read_text())

PI_DELTA = "[5,5] {1,1'} {2,3'} {4,2'} {3} {4'} {5} {5'}"
RHO_DELTA = "[5,4] {1,3'} {2,1'} {2'} {3,4'} {4} {5}"
PI_H = "[6,5] {1,1',3} {2,4,5} {2',3'} {4'} {5'} {6}"
RHO_H = "[5,4] {1,2',4,4'} {2,3} {5} {1',3'}"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def validate(subcommand: str, body: dict) -> None:
    jsonschema.validate(instance=body, schema=SCHEMA["$defs"][subcommand])


# --- exact rendered outputs ----------------------------------------------------


def test_dim_factored_line(capsys):
    code, out, _ = run(capsys, "dim", "--k", "3", "--d", "1")
    assert code == 0
    assert out.strip() == "v*(v-1)*(v-2)/6"


def test_verify_commutators_line(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "commutators", "--k", "2", "--d", "2")
    assert code == 0
    assert out.strip() == "OK (3 identities)"


def test_compose_worked_pair(capsys):
    code, out, _ = run(capsys, "compose", "--pi", PI_DELTA, "--rho", RHO_DELTA)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "(v-6)(v-7)*t1 + (v-5)(v-6)*t2 + (v-5)(v-6)*t3"
    assert len(lines) == 4 and all(line.startswith("  t") for line in lines[1:])


def test_compose_h_worked_pair(capsys):
    code, out, _ = run(capsys, "compose", "--rule", "h", "--pi", PI_H, "--rho", RHO_H)
    assert code == 0
    assert out.splitlines()[0] == "v^2*t1"


def test_class_chain_display(capsys):
    code, out, _ = run(capsys, "class", "--lambda", "6,5,4,1", "--nu", "23", "--upto", "2")
    assert code == 0
    assert out.splitlines()[0] == "class: 6,5,4,1 | 8,5,4,1 | 8,7,4,1"


def test_sw_formal_kernel_display(capsys):
    code, out, _ = run(
        capsys, "sw", "--object", "M*:1", "--nu", "2", "--N", "3", "--cutoff", "6"
    )
    assert code == 0
    assert out.splitlines()[0] == "image: Ker(P_1 -> L_1)"
    assert "duality=True" in out.splitlines()[-1]


def test_tensor_verify_one_line_per_identity(capsys):
    code, out, _ = run(capsys, "tensor", "verify", "--k", "1", "--d", "1")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    assert all(line.endswith(": OK") for line in lines)


# --- JSON mode is schema-stable -------------------------------------------------


@pytest.mark.parametrize(
    "subcommand,argv",
    [
        ("compose", ["compose", "--pi", PI_DELTA, "--rho", RHO_DELTA]),
        ("compose", ["compose", "--rule", "h", "--pi", PI_H, "--rho", RHO_H]),
        ("specialize", ["specialize", "--pi", "[2,2] {1,2'} {2,1'}", "--n", "3"]),
        ("class", ["class", "--lambda", "-", "--nu", "2", "--upto", "2"]),
        ("class", ["blocks", "--lambda", "2,1", "--nu", "5"]),
        ("homdim", ["homdim", "--lambda", "3", "--mu", "-", "--nu", "2"]),
        ("verma", ["verma", "--lambda", "1", "--nu", "5", "--N", "3", "--cutoff", "4"]),
        ("char", ["char", "--kind", "projective", "--lambda", "6", "--nu", "5", "--N", "3", "--cutoff", "8"]),
        ("char", ["char", "--kind", "simple", "--lambda", "2,1", "--nu", "T", "--N", "4", "--cutoff", "5"]),
        ("bgg", ["bgg", "--lambda", "1", "--nu", "5", "--N", "3", "--upto", "3"]),
        ("sw", ["sw", "--object", "P:2", "--nu", "5", "--N", "4", "--cutoff", "10"]),
        ("sw", ["sw", "--object", "L:1", "--lambda", "-", "--nu", "2", "--N", "2", "--cutoff", "6"]),
        ("dim", ["dim", "--k", "4", "--d", "3"]),
        ("verify", ["verify", "--suite", "generators", "--k", "2"]),
        ("tensor-verify", ["tensor", "verify", "--k", "1", "--d", "2"]),
        ("tensor-specialize", ["tensor", "specialize", "--n", "3", "--k", "2"]),
    ],
)
def test_json_output_matches_schema(capsys, subcommand, argv):
    code, out, _ = run(capsys, *argv, "--json")
    assert code == 0
    validate(subcommand, json.loads(out))


def test_health_matches_schema():
    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://x") as client:
            return (await client.get("/health")).json()

    body = asyncio.run(go())
    validate("health", body)
    assert body["ok"]


# --- exit codes ------------------------------------------------------------------


def test_usage_errors_exit_two(capsys):
    cases = [
        ("class", "--lambda", "1", "--nu", "7/2"),  # pointed integer rejection
        ("class", "--lambda", "1", "--nu", "T"),
        ("bgg", "--lambda", "1", "--nu", "7/2", "--N", "3"),
        ("compose", "--pi", "[2,0] {1,2}", "--rho", "[0,2] {1',2'}"),  # not bar
        ("compose", "--pi", "[1,1] {1} {2'}", "--rho", "[1,1] {1,1'}"),  # bad literal
        ("verma", "--lambda", "1", "--nu", "x", "--N", "3"),
        ("verify", "--suite", "nonsense"),
        ("sw", "--object", "Q:1", "--nu", "5", "--N", "3"),
        ("sw", "--object", "L:2", "--lambda", "2,1", "--nu", "7/2", "--N", "3"),
        ("dim", "--k", "9"),  # desk guard
        ("specialize", "--pi", "[1,1] {1,1'}", "--n", "13"),
    ]
    for argv in cases:
        code, _, err = run(capsys, *argv)
        assert code == 2, argv
        assert err.strip(), argv


def test_pointed_message_names_the_problem(capsys):
    _, _, err = run(capsys, "class", "--lambda", "1", "--nu", "7/2")
    assert "integer parameter" in err


def test_composition_arity_mismatch_is_usage_error(capsys):
    code, _, err = run(
        capsys, "compose", "--pi", "[1,1] {1,1'}", "--rho", "[2,2] {1,1'} {2,2'}"
    )
    assert code == 2
    assert "arity" in err


def test_failed_verification_exits_one(capsys, monkeypatch):
    import repnu.service as service

    monkeypatch.setitem(
        service.SUITES, "planted", lambda req: [("planted identity", False, "broken")]
    )
    code, out, _ = run(capsys, "verify", "--suite", "planted")
    assert code == 1
    assert "planted identity: broken" in out
    assert "FAILED (1 of 1 identities)" in out


def test_transport_error_exits_one(capsys):
    code, _, err = run(capsys, "dim", "--k", "2", "--url", "http://127.0.0.1:9")
    assert code == 1
    assert "transport error" in err


def test_unsafe_limits_lifts_the_desk_guard(capsys, monkeypatch):
    # the lift mutates module constants; pin them so other tests see the defaults
    for name in ("MAX_GRADE", "MAX_SPECIALIZE_N", "MAX_VERIFY_K", "MAX_VERIFY_D"):
        monkeypatch.setattr(tensor_mod, name, getattr(tensor_mod, name))
    monkeypatch.setattr(diagrams_mod, "MAX_ARITY", diagrams_mod.MAX_ARITY)

    code, out, _ = run(capsys, "dim", "--k", "8", "--unsafe-limits")
    assert code == 0
    assert out.strip().startswith("v*(v-1)*")

    big = format_diagram(identity_diagram(9))
    code, _, err = run(capsys, "compose", "--pi", big, "--rho", big)
    assert code == 2 and "guard" in err
    code, out, _ = run(capsys, "compose", "--pi", big, "--rho", big, "--unsafe-limits")
    assert code == 0
    assert out.splitlines()[0] == "t1"


# --- a couple of content spot checks through the client path ---------------------


def test_verma_json_content(capsys):
    code, out, _ = run(
        capsys, "verma", "--lambda", "1", "--nu", "5", "--N", "3", "--cutoff", "3", "--json"
    )
    assert code == 0
    body = json.loads(out)
    assert body["label"] == "M(1)"
    assert body["char"] == [["1", 1], ["1,1", 1], ["2", 1], ["2,1", 1], ["3", 1]]


def test_homdim_against_library(capsys):
    code, out, _ = run(capsys, "homdim", "--lambda", "3", "--mu", "-", "--nu", "2", "--json")
    assert code == 0
    body = json.loads(out)
    assert body["hom"] == [[2, 1], [1, 1]]


def test_specialize_h_permutation_is_a_permutation_matrix(capsys):
    code, out, _ = run(
        capsys, "specialize", "--rule", "h", "--pi", "[2,2] {1,2'} {2,1'}", "--n", "3", "--json"
    )
    assert code == 0
    body = json.loads(out)
    assert body["nrows"] == body["ncols"] == 9
    assert len(body["entries"]) == 9
    assert all(v == "1" for _, _, v in body["entries"])


def test_bgg_failure_would_exit_one(capsys):
    # the honest table passes, so ok=True and exit 0; the flag is wired through
    code, out, _ = run(capsys, "bgg", "--lambda", "-", "--nu", "3", "--N", "3", "--json")
    body = json.loads(out)
    assert code == 0 and body["ok"] is True
