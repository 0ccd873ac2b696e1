import json

import numpy as np
import pytest

from nmrfmap.cli import main
from nmrfmap.generators import model_from_signed_edges
from nmrfmap.model import ASSOCIATIVE, REPULSIVE, model_to_json


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def chain_model(tmp_path):
    doc = {
        "variables": [{"name": n, "card": 2} for n in "ABC"],
        "potentials": [
            {"scope": ["A", "B"], "table": [2.0, 0.0, 0.0, 2.0]},
            {"scope": ["B", "C"], "table": [0.0, 1.0, 1.0, 0.0]},
            {"scope": ["A"], "table": [0.0, 0.5]},
        ],
    }
    return write_json(tmp_path / "model.json", doc)


@pytest.fixture
def frustrated_model(tmp_path):
    rng = np.random.default_rng(2)
    edges = [(0, 1, REPULSIVE), (1, 2, ASSOCIATIVE), (2, 3, ASSOCIATIVE),
             (0, 3, ASSOCIATIVE)]
    model = model_from_signed_edges(4, edges, rng)
    return write_json(tmp_path / "frustrated.json", model_to_json(model))


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate(chain_model, capsys):
    code, out, _ = run(capsys, "validate", chain_model)
    assert code == 0
    doc = json.loads(out)
    assert doc["valid"] and doc["binary_pairwise"]
    assert doc["variables"] == 3


def test_validate_rejects_garbage(tmp_path, capsys):
    bad = write_json(tmp_path / "bad.json", {"variables": [], "junk": 1})
    code, _, err = run(capsys, "validate", bad)
    assert code == 2
    assert "error" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/path.json")
    assert code == 2


def test_classify_tractable(chain_model, capsys):
    code, out, _ = run(capsys, "classify", chain_model)
    assert code == 0
    doc = json.loads(out)
    assert doc["tractable"]
    assert all(b["class"] == "BR" for b in doc["blocks"])


def test_classify_intractable(frustrated_model, capsys):
    code, out, _ = run(capsys, "classify", frustrated_model)
    assert code == 1
    doc = json.loads(out)
    assert not doc["tractable"]
    witness = next(b["witness"] for b in doc["blocks"]
                   if b["class"] == "INTRACTABLE")
    assert len(witness) >= 4


def test_compile_then_perfect_round_trip(chain_model, tmp_path, capsys):
    nmrf_path = tmp_path / "out.json"
    dot_path = tmp_path / "out.dot"
    code, out, _ = run(capsys, "compile", chain_model,
                       "--out", str(nmrf_path), "--dot", str(dot_path))
    assert code == 0
    doc = json.loads(nmrf_path.read_text())
    assert {"nodes", "edges", "constants"} <= set(doc)
    assert dot_path.read_text().startswith("graph nmrf {")

    code, out, _ = run(capsys, "perfect", str(nmrf_path))
    assert code == 0
    assert json.loads(out)["perfect"]


def test_perfect_rejects_with_witness(frustrated_model, tmp_path, capsys):
    # force the odd hole to survive: zero singletons, explicit biased ones
    doc = json.loads(open(frustrated_model).read())
    nmrf_path = tmp_path / "f.json"
    code, _, _ = run(capsys, "compile", frustrated_model, "--out", str(nmrf_path))
    assert code == 0
    code, out, _ = run(capsys, "perfect", str(nmrf_path))
    loaded = json.loads(out)
    if code == 1:
        assert not loaded["perfect"]
        assert loaded["witness_kind"] == "odd_hole"
    else:
        assert loaded["perfect"]


def test_solve_with_oracle_check(chain_model, capsys):
    code, out, _ = run(capsys, "solve", chain_model, "--oracle-check")
    assert code == 0
    doc = json.loads(out)
    assert doc["oracle"]["agree"]
    assert doc["assignment"] == {"A": 1, "B": 1, "C": 0}


def test_solve_intractable_reports_witness(frustrated_model, capsys):
    code, out, err = run(capsys, "solve", frustrated_model)
    assert code == 1
    doc = json.loads(out)
    assert doc["solved"] is False and doc["reason"] == "intractable"
    assert "witness" in err


def test_solve_bnb_method(frustrated_model, capsys):
    code, out, _ = run(capsys, "solve", frustrated_model, "--method", "bnb",
                       "--max-nodes", "64", "--oracle-check")
    assert code == 0
    assert json.loads(out)["oracle"]["agree"]


def test_submodular_k3(tmp_path, capsys):
    table = [0.0] * 8
    table[7] = 2.0  # nonnegative all-ones indicator
    path = write_json(tmp_path / "psi.json",
                      {"scope": ["A", "B", "C"], "table": table})
    code, out, _ = run(capsys, "submodular", path)
    assert code == 0
    doc = json.loads(out)
    assert doc["supermodular"] and doc["feasible"]
    assert "representation" in doc


def test_submodular_rejects_non_supermodular(tmp_path, capsys):
    table = [0.0] * 8
    table[0b011] = 1.0
    path = write_json(tmp_path / "psi.json",
                      {"scope": ["A", "B", "C"], "table": table})
    code, out, _ = run(capsys, "submodular", path)
    assert code == 1
    doc = json.loads(out)
    assert not doc["supermodular"]
    assert "witness" in doc


def test_submodular_k4_infeasible(tmp_path, capsys):
    table = [0.0] * 16
    table[0] = 2.0
    for idx in (0b1000, 0b0100, 0b0010, 0b0001):
        table[idx] = 1.0
    path = write_json(tmp_path / "psi.json",
                      {"scope": ["A", "B", "C", "D"], "table": table})
    code, out, _ = run(capsys, "submodular", path)
    assert code == 1
    doc = json.loads(out)
    assert doc["supermodular"] and not doc["feasible"]
    assert doc["alpha"] == -2.0


def test_bench_deterministic(capsys):
    code, out1, _ = run(capsys, "bench", "random-supermodular-k3",
                        "--seed", "5", "--count", "3")
    assert code == 0
    code, out2, _ = run(capsys, "bench", "random-supermodular-k3",
                        "--seed", "5", "--count", "3")
    assert code == 0
    strip = lambda text: [
        ",".join(c for i, c in enumerate(row.split(",")) if i != 3)
        for row in text.strip().splitlines()
    ]
    # identical apart from the timing column
    assert strip(out1) == strip(out2)
    assert all(row.endswith("ok") for row in strip(out1)[1:])


def test_bench_oracle_agreement(capsys):
    code, out, _ = run(capsys, "bench", "random-tractable", "--seed", "1",
                       "--count", "5", "--oracle-check")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 5
    assert all(row.endswith("agree") for row in rows)


def test_bench_unknown_family(capsys):
    code, _, err = run(capsys, "bench", "no-such-family")
    assert code == 2


def test_usage_error(capsys):
    assert main(["frobnicate"]) == 2
