import os

import pacs

DATA = os.environ.get(
    "PACS_DATA_DIR",
    os.path.join(os.path.dirname(__file__), "..", "..", "data"),
)


def test_render_canonicalizes():
    assert pacs.render("And(a,Or(b,c))") == "And(a, Or(b, c))"


def test_score_breakdown():
    assert pacs.score(["Implies(a, b)"]) == (3, 2, 0, 7)
    assert pacs.score(["a", "Implies(a, b)"]) == (1, 2, 2, 1)
    assert pacs.score(["a"]) == (1, 1, 1, 1)


def test_truth_value():
    assert pacs.truth_value("b", ["a", "Implies(a, b)"]) == "True"
    assert pacs.truth_value("b", ["Not(b)"]) == "False"
    assert pacs.truth_value("a", ["Implies(a, b)"]) == "Unknown"


def test_sat_and_counting():
    assert pacs.is_satisfiable(["Or(a, b)"])
    assert not pacs.is_satisfiable(["a", "Not(a)"])
    assert pacs.model_count(["Or(a, b)"]) == 3
    assert pacs.backbone_count(["a", "Or(a, b)"]) == 1


def test_eval_scripted_dataset():
    out = pacs.eval_dataset(
        dataset=os.path.join(DATA, "datasets", "synthetic12.jsonl"),
        script=os.path.join(DATA, "scripts", "synthetic12_script.json"),
        seed=7,
    )
    assert len(out["records"]) == 12
    assert out["metrics"]["accuracy"] == 1.0
    assert all(r["error"] == "" for r in out["records"])


def test_simulate_population():
    out = pacs.simulate(
        os.path.join(DATA, "populations", "split7030.json"), seed=3
    )
    assert out["root_value"] == "13/10"
    assert out["bellman_residual"] == "0"
    assert all(p["ok"] for p in out["policies"])
    assert out["enumeration"]["best"] == "13/10"
    assert out["enumeration"]["worst"] == "8/5"
