"""Smoke test for the lpform extension module.

Build and install first:  pip install maturin && maturin develop -m crates/python/Cargo.toml
Then run:                 python python/smoke_test.py
"""

import json
import sys
from pathlib import Path

import lpform

ROOT = Path(__file__).resolve().parent.parent
CORPUS = (ROOT / "fixtures" / "corpus.jsonl").read_text()
BEAMS = (ROOT / "fixtures" / "beams.jsonl").read_text()


def main():
    records = {r.id: r for r in lpform.parse_corpus(CORPUS)}
    assert len(records) == 6

    rafts = records["rafts-kayaks"]
    sol = rafts.solve()
    assert sol["status"] == "Optimal" and sol["objective_value"] == 1815.0, sol
    relaxed = rafts.solve(relax=True)
    assert relaxed["objective_value"] >= sol["objective_value"]
    lp_text = rafts.emit_lp()
    assert lpform.solve_lp_file(lp_text)["objective_value"] == sol["objective_value"]
    rows = rafts.canonicalize()["rows"]
    assert [r["coefficients"] for r in rows][:2] == [["10", "12"], ["200", "250"]]

    train = records["train-seats"]
    raw = json.loads(train.to_json())
    pred = lpform.Formulation.from_json(json.dumps(raw["prediction"]))
    m = lpform.match_declarations(pred, train.gold, train)
    assert (m["fp"], m["fn"], m["d"]) == (1, 0, 3), m
    assert lpform.execution_match(train.gold, train.gold, train)

    dentists = records["dentists"]
    pred = lpform.Formulation.from_json(json.dumps(json.loads(dentists.to_json())["prediction"]))
    ranked = lpform.rank_beams(dentists, [(pred.to_json(), -0.1), (dentists.gold.to_json(), -0.2)])
    assert ranked[0]["original_index"] == 1 and ranked[1]["penalties"].get("S5", 0) > 0, ranked

    report = lpform.evaluate(CORPUS, BEAMS, ks=[1, 5])
    assert report["aggregate"]["problems"] == 6
    pk = report["pass_at_k"]
    assert pk[1]["canonical_micro"] >= pk[0]["canonical_micro"]

    gold = records["workshop"].gold
    mutants = lpform.mutate(gold, seed=7, n=3)
    assert mutants == lpform.mutate(gold, seed=7, n=3)
    assert all(not mu.validate() for mu in mutants)
    facts = lpform.render_facts(gold)
    assert lpform.validate_generated(facts, gold)["accepted"]

    try:
        lpform.Formulation.from_json("{}")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed IR accepted")

    print("python smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
