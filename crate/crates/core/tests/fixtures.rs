mod common;

use common::{beams, corpus, gold, prediction, record};
use lpform::metrics::{execution_match, match_declarations, DEFAULT_EXEC_TOL};
use lpform::{canonicalize, validate_with, ConstraintType};

#[test]
fn corpus_golds_validate() {
    let recs = corpus();
    assert_eq!(recs.len(), 6);
    for r in &recs {
        let report = validate_with(&gold(r), &r.resolver());
        assert!(report.is_empty(), "{}: {report:?}", r.id);
        canonicalize(&gold(r), r).unwrap_or_else(|e| panic!("{}: {e}", r.id));
    }
}

#[test]
fn corpus_covers_every_constraint_type() {
    let recs = corpus();
    for kind in [
        ConstraintType::Sum,
        ConstraintType::UpperBound,
        ConstraintType::LowerBound,
        ConstraintType::Linear,
        ConstraintType::Ratio,
        ConstraintType::Xby,
        ConstraintType::Xy,
    ] {
        assert!(recs.iter().any(|r| gold(r).constraints.iter().any(|c| c.kind == kind)), "{kind:?}");
    }
}

#[test]
fn train_prediction_has_one_extra_row() {
    let r = record("train-seats");
    let m = match_declarations(&prediction(&r), &gold(&r), &r);
    assert_eq!((m.fp, m.fn_, m.d), (1, 0, 3));
}

#[test]
fn stores_prediction_misses_one_row() {
    let r = record("stores");
    let m = match_declarations(&prediction(&r), &gold(&r), &r);
    assert_eq!((m.fp, m.fn_, m.d), (0, 1, 5));
}

#[test]
fn dentists_swap_matches_only_the_sum_and_objective() {
    let r = record("dentists");
    let m = match_declarations(&prediction(&r), &gold(&r), &r);
    assert_eq!((m.fp, m.fn_, m.d), (2, 2, 4));
}

#[test]
fn viewers_prediction_differs_in_form_but_not_in_value() {
    let r = record("viewers");
    let m = match_declarations(&prediction(&r), &gold(&r), &r);
    assert_eq!((m.fp, m.fn_, m.d), (1, 1, 4));
    // flyers dominate, so the dropped magazine term never matters
    assert!(execution_match(&prediction(&r), &gold(&r), &r, DEFAULT_EXEC_TOL));
}

#[test]
fn beam_file_lines_align_with_corpus() {
    let recs = corpus();
    let lines = beams();
    assert_eq!(lines.len(), recs.len());
    for l in &lines {
        assert!(recs.iter().any(|r| r.id == l.id), "{}", l.id);
    }
    let viewers = lines.iter().find(|l| l.id == "viewers").unwrap();
    assert!(viewers.to_candidates()[0].formulation.is_none());
}
