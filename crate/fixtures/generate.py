"""Regenerates the fixture corpus and beam file in this directory.

Spans are located by searching the problem text, so offsets stay in sync
with the text. Run from any directory: python3 fixtures/generate.py
"""

import json
import re
from pathlib import Path

HERE = Path(__file__).resolve().parent


def obj(direction, name, terms=None, vars=None):
    if terms is not None:
        return {"type": "objective", "direction": direction, "name": name, "terms": terms}
    return {"type": "objvar", "direction": direction, "name": name, "vars": vars}


def con(kind, op, direction, **fields):
    d = {"type": kind, "direction": direction}
    d.update(fields)
    d["operator"] = op
    return d


LE, GE = "LESS_OR_EQUAL", "GREATER_OR_EQUAL"


def locate(text, surface, nth, taken):
    """Char offsets of the nth standalone occurrence of surface."""
    pat = r"(?<![\w.$])" + re.escape(surface) + r"(?![\w%]|\.\d)"
    hits = [m for m in re.finditer(pat, text) if (m.start(), m.end()) not in taken]
    m = hits[nth]
    taken.add((m.start(), m.end()))
    return m.start(), m.end()


def spans(text, items):
    taken = set()
    out = []
    for item in items:
        label, surface = item[0], item[1]
        nth = item[2] if len(item) > 2 else 0
        start, end = locate(text, surface, nth, taken)
        out.append({"start": start, "end": end, "label": label, "surface": surface})
    out.sort(key=lambda s: s["start"])
    return out


RECORDS = []

# --- rafts and kayaks -------------------------------------------------------
text = (
    "A sports warehouse stocks rafts and kayaks. Each raft takes 10 sq ft of space while each "
    "kayak takes 12 sq ft of space. The warehouse has 400 sq ft of space available. The "
    "warehouse has a budget of $10000 with each raft costing $200 and each kayak costing $250. "
    "With rafting being much more popular in the area, at least 55% of all items in stock must "
    "be rafts. If the profit per raft is $45 and the profit per kayak is $55, how many of each "
    "should be bought and sold to maximize profit?"
)
RECORDS.append({
    "id": "rafts-kayaks",
    "text": text,
    "spans": spans(text, [
        ("VAR", "rafts"), ("VAR", "kayaks"),
        ("PARAM", "10"), ("PARAM", "12"),
        ("LIMIT", "400"), ("CONST_DIR", "available"),
        ("CONST_DIR", "budget"), ("LIMIT", "$10000"), ("PARAM", "$200"), ("PARAM", "$250"),
        ("CONST_DIR", "at least"), ("LIMIT", "55%"),
        ("PARAM", "$45"), ("PARAM", "$55"),
        ("OBJ_DIR", "maximize"), ("OBJ_NAME", "profit", 2),
    ]),
    "variable_order": ["rafts", "kayaks"],
    "entity_mapping": {"raft": "rafts", "kayak": "kayaks"},
    "obj_declaration": obj("maximize", "profit", {"rafts": "45", "kayaks": "55"}),
    "const_declarations": [
        con("linear", LE, "available", limit="400", terms={"rafts": "10", "kayaks": "12"}),
        con("linear", LE, "budget", limit="10000", terms={"rafts": "200", "kayaks": "250"}),
        con("ratio", GE, "at least", limit="0.55", var="rafts"),
    ],
    "vars": ["rafts", "kayaks"],
})

# --- train seats: label misses the 500-passenger constraint -----------------
text = (
    "A train can carry at most 500 passengers. It has two seat types: AC seats, and non-AC "
    "seats (AC is air conditioned). A profit of $50 is made on each AC seat ticket and a profit "
    "of $30 is made on each non-AC seat ticket. The train company reserves at least 100 seats "
    "as AC seats. However, a minimum of 2 times as many passengers prefer to travel on non-AC "
    "seats than on AC seats. How many seat tickets of each type should be sold to maximize "
    "profit? What is that profit?"
)
RECORDS.append({
    "id": "train-seats",
    "text": text,
    "spans": spans(text, [
        ("CONST_DIR", "at most"), ("LIMIT", "500"),
        ("VAR", "AC seats"), ("VAR", "non-AC seats"),
        ("PARAM", "$50"), ("PARAM", "$30"),
        ("CONST_DIR", "at least"), ("LIMIT", "100"),
        ("CONST_DIR", "minimum"), ("PARAM", "2"),
        ("OBJ_DIR", "maximize"), ("OBJ_NAME", "profit", 2),
    ]),
    "variable_order": ["AC seats", "non-AC seats"],
    "entity_mapping": {"AC seat": "AC seats", "non-AC seat": "non-AC seats"},
    "obj_declaration": obj("maximize", "profit", {"AC seat": "50", "non-AC seat": "30"}),
    "const_declarations": [
        con("lowerbound", GE, "at least", limit="100", var="AC seats"),
        con("xby", GE, "minimum", x_var="non-AC seats", param="2", y_var="AC seats"),
    ],
    "vars": ["AC seats", "non-AC seats"],
    "prediction": {
        "obj_declaration": obj("maximize", "profit", {"AC seat": "50", "non-AC seat": "30"}),
        "const_declarations": [
            con("sum", LE, "at most", limit="500"),
            con("lowerbound", GE, "at least", limit="100", var="AC seats"),
            con("xby", GE, "minimum", x_var="non-AC seats", param="2", y_var="AC seats"),
        ],
        "vars": ["AC seats", "non-AC seats"],
        "id": "-996226930",
    },
})

# --- stores: prediction misses the xby constraint ---------------------------
text = (
    "A photo company is opening film-based and electrical-based stores. A film-based store "
    "develops 2 orders per hour while an electrical-based store processes four orders per hour, "
    "and together they must handle at least 170 orders per hour. A film-based store uses 10 kW "
    "of power and an electrical-based store uses 15 kW, with at most 600 kW available. There "
    "must be at least two times as many electrical-based stores as film-based stores, and at "
    "least 5 film-based stores. How many of each should be opened to minimize the total number "
    "of stores?"
)
stores_gold_constraints = [
    con("xby", GE, "at least", x_var="electrical-based stores", param="two", y_var="film-based stores"),
    con("lowerbound", GE, "at least", limit="5", var="film-based stores"),
    con("linear", GE, "at least", limit="170", terms={"Film-based stores": "2", "electrical-based store": "four"}),
    con("linear", LE, "at most", limit="600", terms={"electric-based stores": "15", "Film-based stores": "10"}),
]
RECORDS.append({
    "id": "stores",
    "text": text,
    "spans": spans(text, [
        ("VAR", "film-based"), ("VAR", "electrical-based stores"),
        ("PARAM", "2"), ("PARAM", "four"),
        ("CONST_DIR", "at least"), ("LIMIT", "170"),
        ("PARAM", "10"), ("PARAM", "15"),
        ("CONST_DIR", "at most"), ("LIMIT", "600"),
        ("CONST_DIR", "at least"), ("PARAM", "two"),
        ("CONST_DIR", "at least"), ("LIMIT", "5"),
        ("OBJ_DIR", "minimize"), ("OBJ_NAME", "total number of stores"),
    ]),
    "variable_order": ["film-based", "electrical-based stores"],
    "entity_mapping": {
        "film-based stores": "film-based",
        "film-based store": "film-based",
        "electrical-based store": "electrical-based stores",
        "electric-based stores": "electrical-based stores",
    },
    "obj_declaration": obj("minimize", "total number of stores", vars=["film-based", "electrical-based stores"]),
    "const_declarations": stores_gold_constraints,
    "vars": ["film-based", "electrical-based stores"],
    "prediction": {
        "obj_declaration": obj("minimize", "total number of stores", vars=["film-based", "electrical-based stores"]),
        "const_declarations": [
            con("lowerbound", GE, "at least", limit="5", var="film-based stores"),
            con("linear", GE, "at least", limit="170", terms={"Film-based stores": "2", "electrical-based store": "four"}),
            con("linear", LE, "at most", limit="600", terms={"Film-based stores": "10", "electric-based stores": "15"}),
        ],
        "vars": ["film-based", "electrical-based stores"],
        "id": "-1194187124",
    },
})

# --- dentists: prediction swaps the two limits ------------------------------
text = (
    "A dental clinic schedules shifts for dentists and oral hygienists. A dentist shift serves "
    "12 patients and an oral hygienist shift serves 5 patients, and the clinic must serve at "
    "least 1000 patients. A dentist shift costs $900 and an oral hygienist shift costs $250, "
    "within a budget of $65000. At least 20 shifts must be scheduled in total. How many shifts "
    "of each type minimize the total number of shifts?"
)
RECORDS.append({
    "id": "dentists",
    "text": text,
    "spans": spans(text, [
        ("VAR", "dentists"), ("VAR", "oral hygienists"),
        ("PARAM", "12"), ("PARAM", "5"),
        ("CONST_DIR", "at least"), ("LIMIT", "1000"),
        ("PARAM", "$900"), ("PARAM", "$250"),
        ("CONST_DIR", "budget"), ("LIMIT", "$65000"),
        ("CONST_DIR", "At least"), ("LIMIT", "20"),
        ("OBJ_DIR", "minimize"), ("OBJ_NAME", "total number of shifts"),
    ]),
    "variable_order": ["dentists", "oral hygienists"],
    "entity_mapping": {"Dentists": "dentists"},
    "obj_declaration": obj("minimize", "total number of shifts", vars=["dentists", "oral hygienists"]),
    "const_declarations": [
        con("linear", GE, "require", limit="1000", terms={"Dentists": "12", "oral hygienists": "5"}),
        con("sum", GE, "at least", limit="20"),
        con("linear", LE, "budget", limit="65000", terms={"dentists": "900", "oral hygienists": "250"}),
    ],
    "vars": ["dentists", "oral hygienists"],
    "prediction": {
        "obj_declaration": obj("minimize", "total number of shifts", vars=["dentists", "oral hygienists"]),
        "const_declarations": [
            con("linear", LE, "budget", limit="65000", terms={"Dentists": "12", "oral hygienists": "5"}),
            con("sum", GE, "at least", limit="20"),
            con("linear", GE, "require", limit="1000", terms={"Dentists": "900", "oral hygienists": "250"}),
        ],
        "vars": ["dentists", "oral hygienists"],
    },
})

# --- viewers: prediction drops a variable from the objective ----------------
text = (
    "A company has a budget of $5000 for advertising. A magazine ad costs $300, a flyer costs "
    "$20 and a billboard ad costs $1000. Each magazine ad reaches 10000 viewers, each flyer "
    "reaches 5000 viewers and each billboard ad reaches 25000 viewers. At most 4 billboard ads "
    "can be bought, and the number of flyers must be at least the number of magazine ads. How "
    "many of each should be bought to maximize viewers?"
)
RECORDS.append({
    "id": "viewers",
    "text": text,
    "spans": spans(text, [
        ("CONST_DIR", "budget"), ("LIMIT", "$5000"),
        ("VAR", "magazine ad"), ("PARAM", "$300"),
        ("VAR", "flyer"), ("PARAM", "$20"),
        ("VAR", "billboard ad"), ("PARAM", "$1000"),
        ("PARAM", "10000"), ("PARAM", "5000"), ("PARAM", "25000"),
        ("CONST_DIR", "At most"), ("LIMIT", "4"),
        ("CONST_DIR", "at least"),
        ("OBJ_DIR", "maximize"), ("OBJ_NAME", "viewers", 3),
    ]),
    "variable_order": ["magazine ads", "flyers", "billboard ads"],
    "entity_mapping": {"magazine ad": "magazine ads", "flyer": "flyers", "billboard ad": "billboard ads"},
    "obj_declaration": obj("maximize", "viewers", {"magazine ad": "10000", "flyer": "5000", "billboard ad": "25000"}),
    "const_declarations": [
        con("linear", LE, "budget", limit="5000", terms={"magazine ad": "300", "flyer": "20", "billboard ad": "1000"}),
        con("upperbound", LE, "At most", limit="4", var="billboard ads"),
        con("xy", GE, "at least", x_var="flyers", y_var="magazine ads"),
    ],
    "vars": ["magazine ads", "flyers", "billboard ads"],
    "prediction": {
        "obj_declaration": obj("maximize", "viewers", {"flyer": "5000", "billboard ad": "25000"}),
        "const_declarations": [
            con("linear", LE, "budget", limit="5000", terms={"magazine ad": "300", "flyer": "20", "billboard ad": "1000"}),
            con("upperbound", LE, "At most", limit="4", var="billboard ads"),
            con("xy", GE, "at least", x_var="flyers", y_var="magazine ads"),
        ],
        "vars": ["magazine ads", "flyers", "billboard ads"],
    },
})

# --- workshop: four linear constraints --------------------------------------
text = (
    "A furniture workshop makes chairs and tables. A chair needs 2 hours of carpentry and a "
    "table needs 5 hours, with at most 200 carpentry hours available. A chair needs 1 hour of "
    "finishing and a table needs 3 hours, with at most 90 finishing hours available. A chair "
    "uses 4 board feet of oak and a table uses 10 board feet, with at most 380 board feet in "
    "stock. To keep the assemblers busy, assembly must take at least 40 hours, where a chair "
    "takes 0.5 hours and a table takes 1.25 hours. Each chair earns $30 and each table earns "
    "$80. How many of each should be made to maximize profit?"
)
RECORDS.append({
    "id": "workshop",
    "text": text,
    "spans": spans(text, [
        ("VAR", "chairs"), ("VAR", "tables"),
        ("PARAM", "2"), ("PARAM", "5"), ("CONST_DIR", "at most"), ("LIMIT", "200"),
        ("PARAM", "1"), ("PARAM", "3"), ("CONST_DIR", "at most"), ("LIMIT", "90"),
        ("PARAM", "4"), ("PARAM", "10"), ("CONST_DIR", "at most"), ("LIMIT", "380"),
        ("CONST_DIR", "at least"), ("LIMIT", "40"), ("PARAM", "0.5"), ("PARAM", "1.25"),
        ("PARAM", "$30"), ("PARAM", "$80"),
        ("OBJ_DIR", "maximize"), ("OBJ_NAME", "profit"),
    ]),
    "variable_order": ["chairs", "tables"],
    "entity_mapping": {"chair": "chairs", "table": "tables"},
    "obj_declaration": obj("maximize", "profit", {"chairs": "30", "tables": "80"}),
    "const_declarations": [
        con("linear", LE, "carpentry hours", limit="200", terms={"chairs": "2", "tables": "5"}),
        con("linear", LE, "finishing hours", limit="90", terms={"chairs": "1", "tables": "3"}),
        con("linear", LE, "board feet", limit="380", terms={"chairs": "4", "tables": "10"}),
        con("linear", GE, "assembly hours", limit="40", terms={"chairs": "0.5", "tables": "1.25"}),
    ],
    "vars": ["chairs", "tables"],
})


def gold_of(rec):
    return {k: rec[k] for k in ("obj_declaration", "const_declarations", "vars")}


def beams():
    by_id = {r["id"]: r for r in RECORDS}
    lines = []

    def line(rid, cands):
        lines.append({"id": rid, "candidates": [{"ir": ir, "logprob": lp} for ir, lp in cands]})

    rafts = gold_of(by_id["rafts-kayaks"])
    wrong_budget = json.loads(json.dumps(rafts))
    wrong_budget["const_declarations"][1]["limit"] = "1000"
    line("rafts-kayaks", [(wrong_budget, -0.21), (rafts, -0.35)])
    train = by_id["train-seats"]
    line("train-seats", [(gold_of(train), -0.52), (train["prediction"], -0.40)])
    stores = by_id["stores"]
    line("stores", [(stores["prediction"], -0.18), (gold_of(stores), -0.66)])
    dentists = by_id["dentists"]
    line("dentists", [(dentists["prediction"], -0.30), (gold_of(dentists), -0.47)])
    viewers = by_id["viewers"]
    broken = "{'obj_declaration': {'type': 'objective', 'direction': 'maximize', 'name': 'viewers', 'terms': {'flyer': '5000'}} yield'}]"
    line("viewers", [(broken, -0.05), (viewers["prediction"], -0.12), (gold_of(viewers), -0.70)])
    line("workshop", [(gold_of(by_id["workshop"]), -0.10)])
    return lines


def dump(path, rows):
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    for r in RECORDS:
        for s in r["spans"]:
            assert r["text"][s["start"]:s["end"]] == s["surface"], (r["id"], s)
    dump(HERE / "corpus.jsonl", RECORDS)
    dump(HERE / "beams.jsonl", beams())
    print(f"wrote {len(RECORDS)} records")
