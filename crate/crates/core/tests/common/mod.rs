#![allow(dead_code)]

use std::path::PathBuf;

use lpform::beams::{BeamLine, parse_beam_file};
use lpform::ir::parse_corpus;
use lpform::{Formulation, ProblemRecord};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn corpus() -> Vec<ProblemRecord> {
    let text = std::fs::read_to_string(fixture_path("corpus.jsonl")).expect("fixture corpus");
    parse_corpus(&text).expect("fixture corpus parses")
}

pub fn beams() -> Vec<BeamLine> {
    let text = std::fs::read_to_string(fixture_path("beams.jsonl")).expect("fixture beams");
    parse_beam_file(&text).expect("fixture beams parse")
}

pub fn record(id: &str) -> ProblemRecord {
    corpus().into_iter().find(|r| r.id == id).unwrap_or_else(|| panic!("no fixture {id}"))
}

pub fn gold(rec: &ProblemRecord) -> Formulation {
    rec.gold.clone().expect("fixture has gold")
}

pub fn prediction(rec: &ProblemRecord) -> Formulation {
    Formulation::from_value(rec.extra.get("prediction").expect("fixture has prediction")).expect("prediction parses")
}
