mod common;

use lpform::augment::{MutationConfig, mutate_parameters};
use lpform::canonical::scale_normalize;
use lpform::metrics::{match_declarations, pass_at_k};
use lpform::quantity::{format_decimal, int, ratio};
use lpform::rules::{BeamCandidate, RuleConfig, apply_corrections};
use lpform::solver::{Status, brute_force_ilp, emit_lp_file, parse_lp_file, solve_ilp, solve_lp};
use lpform::{
    CanonicalLP, CanonicalRow, ConstraintDecl, ConstraintType, Formulation, ObjectiveDecl, ObjectiveDirection,
    Operator, ProblemRecord, Quantity, Rational, Sense, Terms, VarResolver, canonicalize_with, normalize_sense,
    parse_quantity, validate,
};
use proptest::prelude::*;

const NAMES: [&str; 3] = ["x", "y", "z"];

fn q(n: i64) -> Quantity {
    Quantity::from_integer(n)
}

fn vars(n: usize) -> Vec<String> {
    NAMES[..n].iter().map(|s| s.to_string()).collect()
}

fn op() -> impl Strategy<Value = Operator> {
    prop_oneof![Just(Operator::LessOrEqual), Just(Operator::GreaterOrEqual)]
}

fn constraint(n: usize) -> impl Strategy<Value = ConstraintDecl> {
    let linear = (prop::collection::vec(0i64..=9, n), 1i64..=60, op()).prop_filter("nonzero row", |(cs, _, _)| cs.iter().any(|&c| c != 0)).prop_map(move |(cs, l, o)| {
        let terms: Terms = NAMES[..n].iter().zip(&cs).map(|(v, c)| (*v, q(*c))).collect();
        ConstraintDecl::new(ConstraintType::Linear, o).with_terms(terms).with_limit(q(l))
    });
    let bound = (0..n, 0i64..=20, any::<bool>()).prop_map(|(i, l, upper)| {
        let (kind, o) =
            if upper { (ConstraintType::UpperBound, Operator::LessOrEqual) } else { (ConstraintType::LowerBound, Operator::GreaterOrEqual) };
        ConstraintDecl::new(kind, o).with_var(NAMES[i]).with_limit(q(l))
    });
    let sum = (1i64..=40, op()).prop_map(|(l, o)| ConstraintDecl::new(ConstraintType::Sum, o).with_limit(q(l)));
    let ratio_c = (0..n, 1i64..=99, op()).prop_map(|(i, p, o)| {
        ConstraintDecl::new(ConstraintType::Ratio, o).with_var(NAMES[i]).with_limit(Quantity::from_value(ratio(p, 100)))
    });
    let xby = (0..n, 0..n, 1i64..=4, op()).prop_filter("distinct", |(a, b, _, _)| a != b).prop_map(|(a, b, p, o)| {
        ConstraintDecl::new(ConstraintType::Xby, o).with_xy(NAMES[a], NAMES[b]).with_param(q(p))
    });
    let xy = (0..n, 0..n, op()).prop_filter("distinct", |(a, b, _)| a != b).prop_map(|(a, b, o)| {
        ConstraintDecl::new(ConstraintType::Xy, o).with_xy(NAMES[a], NAMES[b])
    });
    prop_oneof![linear, bound, sum, ratio_c, xby, xy]
}

fn formulation() -> impl Strategy<Value = Formulation> {
    (2usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(1i64..=9, n),
            any::<bool>(),
            prop::collection::vec(constraint(n), 1..=5),
        )
            .prop_map(move |(obj, maximize, constraints)| {
                let terms: Terms = NAMES[..n].iter().zip(&obj).map(|(v, c)| (*v, q(*c))).collect();
                let dir = if maximize { ObjectiveDirection::Maximize } else { ObjectiveDirection::Minimize };
                Formulation::new(ObjectiveDecl::linear(dir, "value", terms), constraints, vars(n))
            })
    })
}

/// Formulation with every variable boxed to [0, 10], so brute force over the
/// box is exact.
fn boxed(f: &Formulation) -> CanonicalLP {
    let mut lp = canonicalize_with(f, &VarResolver::new(&f.vars)).expect("generated formulations lower");
    let n = lp.n_vars();
    for i in 0..n {
        let mut cs = vec![int(0); n];
        cs[i] = int(1);
        lp.rows.push(CanonicalRow::new(cs, Sense::Le, int(10)));
    }
    lp
}

fn record_for(f: &Formulation) -> ProblemRecord {
    ProblemRecord {
        id: "p".into(),
        text: String::new(),
        spans: vec![],
        variable_order: f.vars.clone(),
        entity_mapping: Default::default(),
        gold: Some(f.clone()),
        extra: Default::default(),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_quantity_never_panics(s in "\\PC{0,12}") {
        let _ = parse_quantity(&s);
    }

    #[test]
    fn decimal_rendering_parses_back(n in -100_000i64..100_000, d in prop::sample::select(vec![1i64, 2, 4, 5, 8, 10, 20, 25, 100, 1000])) {
        let r = ratio(n, d);
        let text = format_decimal(&r).expect("terminating");
        let parsed = parse_quantity(&text).unwrap();
        prop_assert_eq!(parsed.value(), &r);
    }

    #[test]
    fn percent_is_hundredths(p in 0i64..1000) {
        let parsed = parse_quantity(&format!("{p}%")).unwrap();
        prop_assert_eq!(parsed.value(), &ratio(p, 100));
    }

    #[test]
    fn generated_formulations_validate_and_round_trip(f in formulation()) {
        prop_assert!(validate(&f).is_empty());
        let back = Formulation::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn sum_with_terms_is_rejected(f in formulation()) {
        let mut f = f;
        let terms: Terms = f.vars.iter().map(|v| (v.as_str(), q(1))).collect();
        f.constraints.push(ConstraintDecl::new(ConstraintType::Sum, Operator::LessOrEqual).with_limit(q(5)).with_terms(terms));
        prop_assert!(!validate(&f).is_empty());
    }

    #[test]
    fn normalize_sense_is_idempotent_and_keeps_solutions(
        cs in prop::collection::vec(-9i64..=9, 3),
        rhs in -50i64..=50,
        ge in any::<bool>(),
        points in prop::collection::vec(prop::collection::vec(-20i64..=20, 3), 20),
    ) {
        let row = CanonicalRow::new(cs.into_iter().map(int).collect(), if ge { Sense::Ge } else { Sense::Le }, int(rhs));
        let once = normalize_sense(&row);
        prop_assert_eq!(&normalize_sense(&once), &once);
        prop_assert_eq!(once.sense, Sense::Le);
        let scaled = scale_normalize(&once);
        for p in points {
            let p: Vec<Rational> = p.into_iter().map(int).collect();
            prop_assert_eq!(row.satisfied_by(&p), once.satisfied_by(&p));
            prop_assert_eq!(row.satisfied_by(&p), scaled.satisfied_by(&p));
        }
    }

    #[test]
    fn corrections_are_idempotent(f in formulation()) {
        let cfg = RuleConfig::default();
        let (once, _) = apply_corrections(&f, &cfg);
        let (twice, log) = apply_corrections(&once, &cfg);
        prop_assert_eq!(twice, once);
        prop_assert!(log.is_empty());
    }

    #[test]
    fn matching_is_symmetric(a in formulation(), b in formulation()) {
        // share a variable set so both lower over one order
        let mut b = b;
        b.vars = a.vars.clone();
        let rec = record_for(&a);
        if lpform::canonicalize(&b, &rec).is_ok() {
            let ab = match_declarations(&a, &b, &rec);
            let ba = match_declarations(&b, &a, &rec);
            prop_assert_eq!(ab.fp, ba.fn_);
            prop_assert_eq!(ab.fn_, ba.fp);
            prop_assert_eq!(ab.pairs.len(), ba.pairs.len());
            let self_match = match_declarations(&a, &a, &rec);
            prop_assert_eq!(self_match.accuracy(), 1.0);
        }
    }

    #[test]
    fn pass_at_k_is_monotone(gold in formulation(), others in prop::collection::vec(formulation(), 1..5), pos in 0usize..5) {
        let rec = record_for(&gold);
        let mut cands: Vec<BeamCandidate> = others
            .into_iter()
            .filter(|f| f.vars.len() == gold.vars.len())
            .enumerate()
            .map(|(i, f)| BeamCandidate::from_formulation(f, -(i as f64), i))
            .collect();
        let at = pos.min(cands.len());
        cands.insert(at, BeamCandidate::from_formulation(gold.clone(), 0.0, 99));
        let mut prev = (f64::NEG_INFINITY, false);
        for k in 1..=cands.len() {
            let cur = pass_at_k(&cands, &gold, &rec, k);
            prop_assert!(cur.0 >= prev.0);
            prop_assert!(cur.1 || !prev.1);
            prev = cur;
        }
        prop_assert_eq!(prev.0, 1.0);
    }

    #[test]
    fn lp_optimum_bounds_every_feasible_lattice_point(f in formulation()) {
        let lp = boxed(&f);
        let relaxed = solve_lp(&lp.relaxed()).unwrap();
        let ilp = solve_ilp(&lp).unwrap();
        let maximize = lp.objectives[0].direction == ObjectiveDirection::Maximize;
        if ilp.status == Status::Optimal {
            prop_assert_eq!(relaxed.status, Status::Optimal);
            let (r, i) = (relaxed.objective_value.unwrap(), ilp.objective_value.unwrap());
            let bounded = if maximize { r >= i - 1e-6 } else { r <= i + 1e-6 };
            prop_assert!(bounded);
        }
        if relaxed.status == Status::Optimal {
            let r = relaxed.objective_value.unwrap();
            let n = lp.n_vars();
            let mut point = vec![0i64; n];
            loop {
                let p: Vec<Rational> = point.iter().map(|&v| int(v)).collect();
                if lp.rows.iter().all(|row| row.satisfied_by(&p)) {
                    let v = lp.objectives[0].value_at(&point.iter().map(|&v| v as f64).collect::<Vec<_>>());
                    let bounded = if maximize { r >= v - 1e-6 } else { r <= v + 1e-6 };
                    prop_assert!(bounded);
                }
                let Some(i) = (0..n).find(|&i| point[i] < 10) else { break };
                point[i] += 1;
                point[..i].iter_mut().for_each(|v| *v = 0);
            }
        }
    }

    #[test]
    fn ilp_agrees_with_brute_force(f in formulation()) {
        let lp = boxed(&f);
        let bb = solve_ilp(&lp).unwrap();
        let bf = brute_force_ilp(&lp, &vec![(0, 10); lp.n_vars()]).unwrap();
        prop_assert_eq!(bb.status, bf.status);
        if bb.status == Status::Optimal {
            prop_assert!(close(bb.objective_value.unwrap(), bf.objective_value.unwrap()));
        }
    }

    #[test]
    fn lp_file_round_trip_keeps_the_optimum(f in formulation()) {
        let lp = boxed(&f);
        let text = emit_lp_file(&lp, "prop").unwrap();
        let again = emit_lp_file(&lp, "prop").unwrap();
        prop_assert_eq!(&again, &text);
        let back = parse_lp_file(&text).unwrap();
        let (a, b) = (solve_ilp(&lp).unwrap(), solve_ilp(&back).unwrap());
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.objective_value, b.objective_value);
    }

    #[test]
    fn mutation_is_deterministic_and_keeps_structure(f in formulation(), seed in any::<u64>()) {
        let cfg = MutationConfig { seed, mutations_per_record: 3, ..Default::default() };
        let a = mutate_parameters(&f, &cfg).unwrap();
        prop_assert_eq!(&a, &mutate_parameters(&f, &cfg).unwrap());
        for m in &a {
            prop_assert_eq!(m.constraints.len(), f.constraints.len());
            prop_assert!(validate(m).is_empty());
            for (c, d) in m.constraints.iter().zip(&f.constraints) {
                prop_assert_eq!(c.kind, d.kind);
                prop_assert_eq!(c.operator, d.operator);
            }
        }
    }
}
