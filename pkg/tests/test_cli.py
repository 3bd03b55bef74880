from pathlib import Path
import contextlib
import io
import json
import tempfile

from core.config_manager import ConfigManager
from euclid_engine.algebra_core import etale_from_poly
from euclid_engine.exact_linalg import PrimeField
from euclid_engine.incidence import sample_G_point
from euclid_engine.rng_streams import derive_rng
from euclid_engine.subspace import Side, random_subspace, unit_line
from grassmann_euclid import main

NON_ASSOCIATIVE = {
    "prime": "7",
    "kind": "table",
    "unit": ["1", "0", "0"],
    "structure": [
        [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
        [["0", "1", "0"], ["0", "0", "1"], ["0", "0", "0"]],
        [["0", "0", "1"], ["0", "1", "0"], ["0", "0", "0"]],
    ],
}


def _run(argv, base):
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        code = main(argv, manager=ConfigManager(base_dir=base, environ={}))
    return code, buffer.getvalue()


def test_alg_validate_polynomial():
    with tempfile.TemporaryDirectory() as td:
        code, out = _run(["alg", "validate", "--poly", "2,0,0", "--neg"], Path(td))
        assert code == 0
        payload = json.loads(out)
        assert payload["n"] == 3
        assert payload["algebra"]["kind"] == "monogenic"


def test_alg_validate_non_associative_table():
    with tempfile.TemporaryDirectory() as td:
        doc = Path(td) / "bad.json"
        doc.write_text(json.dumps(NON_ASSOCIATIVE), encoding="utf-8")
        code, out = _run(["alg", "validate", "--toy", "--algebra", str(doc)], Path(td))
        assert code == 2
        payload = json.loads(out)
        assert payload["detail"] == "not associative"
        assert payload["witness"][:2] == [1, 1]


def test_small_prime_without_toy_is_a_usage_error():
    with tempfile.TemporaryDirectory() as td:
        code, _ = _run(["alg", "validate", "--prime", "7", "--poly", "3,0"], Path(td))
        assert code == 2


def test_chain_run_writes_trace():
    with tempfile.TemporaryDirectory() as td:
        out_path = Path(td) / "trace.json"
        code, out = _run(
            ["chain", "run", "--poly", "2,0,0", "--neg", "--r", "2", "--seed", "7", "--out", str(out_path)],
            Path(td),
        )
        assert code == 0
        report = json.loads(out_path.read_text(encoding="utf-8"))
        assert report["gcd"] == 1
        assert report["remainders"] == [3, 2, 1, 0]
        assert report["dualized"] is True
        assert [step["case"] for step in report["steps"]] == ["reduce-dual", "reduce-primal"]
        assert report["output"]["side"] == "primal"
        assert len(report["output"]["basis"]) == 1
        assert json.loads(out) == report


def test_good_check_flag_and_pairs():
    with tempfile.TemporaryDirectory() as td:
        code, out = _run(["good", "check", "--poly", "2,0,0,0,0", "--neg", "--r", "3"], Path(td))
        assert code == 0
        payload = json.loads(out)
        assert payload["chain"]["quotients"] == [1, 1, 2]
        assert {c["stream"] for c in payload["flag"]["certificates"]} == {"0:1001"}

        algebra = etale_from_poly([-2, 0, 0, 0, 0], PrimeField())
        doc = Path(td) / "u.json"
        doc.write_text(json.dumps({"U": unit_line(algebra).to_json()}), encoding="utf-8")
        code, out = _run(
            ["good", "check", "--poly", "2,0,0,0,0", "--neg", "--pairs", "1,1;2,2", "--in", str(doc)], Path(td)
        )
        assert code == 0
        certificates = json.loads(out)["certificates"]
        assert [c["certified"] for c in certificates] == [True, True]
        assert all(c["stream"] == "0:1001" and c["attempts"] >= 1 for c in certificates)


def test_point_map_and_fiber():
    with tempfile.TemporaryDirectory() as td:
        field = PrimeField()
        algebra = etale_from_poly([-2, 0, 0, 0, 0], field)
        rng = derive_rng(12)
        u_one = random_subspace(field, 5, Side.PRIMAL, 1, rng)
        target = sample_G_point(algebra, 1, 2, u_one, rng)
        doc = Path(td) / "fiber.json"
        doc.write_text(
            json.dumps({"algebra": algebra.to_json(), "target": target.to_json(), "U": {
                "side": "primal", "ambient": 5, "basis": []}, "case": "reduce-dual"}),
            encoding="utf-8",
        )
        code, out = _run(["point", "fiber", "--in", str(doc)], Path(td))
        assert code == 0
        preimage = json.loads(out)["point"]
        assert len(preimage["X"]["basis"]) == 1 + 2

        doc = Path(td) / "map.json"
        doc.write_text(
            json.dumps({"algebra": algebra.to_json(), "point": preimage, "U_next": u_one.to_json(),
                        "case": "reduce-dual"}),
            encoding="utf-8",
        )
        code, out = _run(["point", "map", "--in", str(doc)], Path(td))
        assert code == 0
        assert json.loads(out)["point"] == target.to_json()


def test_verify_identity_suite():
    with tempfile.TemporaryDirectory() as td:
        out_path = Path(td) / "report.json"
        code, _ = _run(
            ["verify", "--suite", "identity", "--n", "6", "--r", "3", "--trials", "2", "--seed", "42",
             "--out", str(out_path)],
            Path(td),
        )
        assert code == 0
        report = json.loads(out_path.read_text(encoding="utf-8"))
        assert report["all_passed"] is True
        assert report["suites"][0]["passed"] == 2

        code, out = _run(["verify", "--replay", str(out_path)], Path(td))
        assert code == 0
        assert json.loads(out)["replayed"] == 0


def test_replay_reports_setup_failures_and_continues():
    with tempfile.TemporaryDirectory() as td:
        doc = Path(td) / "bad.json"
        doc.write_text(json.dumps(NON_ASSOCIATIVE), encoding="utf-8")
        out_path = Path(td) / "report.json"
        code, _ = _run(
            ["verify", "--suite", "equivariance", "--toy", "--prime", "7", "--algebra", str(doc), "--n", "3",
             "--r", "2", "--out", str(out_path)],
            Path(td),
        )
        assert code == 1
        report = json.loads(out_path.read_text(encoding="utf-8"))
        assert len(report["suites"][0]["failures"]) == 1

        code, out = _run(["verify", "--replay", str(out_path)], Path(td))
        assert code == 1
        payload = json.loads(out)
        assert (payload["replayed"], payload["reproduced"]) == (1, 1)
        assert payload["results"][0]["detail"].startswith("setup:")
