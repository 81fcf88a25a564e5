use std::path::PathBuf;

use finf::cli::{main_with_args, run, CheckLevel, Command, JobConfig};
use finf::corpus::*;
use finf::exactq::Rational;
use finf::schema::*;
use finf::tangent::compute_bundle;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("finf-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn job(command: Command) -> JobConfig {
    JobConfig { command, truncation: 4, arity_cap: 3, check_level: CheckLevel::Full, out: None, seed: 0 }
}

fn args(list: &[&str]) -> Vec<String> {
    std::iter::once("finf").chain(list.iter().copied()).map(String::from).collect()
}

#[test]
fn fixtures_parse_to_the_corpus() {
    for (name, spec) in corpus() {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        assert_eq!(parse_spec(&text).unwrap(), spec, "{name}");
        // emitted JSON re-parses to identical bytes
        assert_eq!(spec_to_json(&parse_spec(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn coefficients_must_be_exact() {
    assert_eq!(parse_coeff("-3/6", "c").unwrap(), Rational::new(-1, 2));
    assert_eq!(parse_coeff("7", "c").unwrap(), Rational::from_int(7));
    for bad in ["1.5", "1e3", "1/0", "", "x"] {
        assert!(parse_coeff(bad, "c").is_err(), "{bad}");
    }
}

#[test]
fn malformed_documents_are_located() {
    let text = std::fs::read_to_string(fixture("odd-heisenberg")).unwrap();
    let err = parse_spec(&text.replacen("\"differential\"", "\"diferential\"", 1)).unwrap_err();
    assert!(matches!(err, SchemaError::Syntax { line, .. } if line > 1), "{err}");
    let skewed = text.replacen("\"coeff\": \"-1\"", "\"coeff\": \"1\"", 1);
    assert_ne!(skewed, text);
    assert!(parse_spec(&skewed).is_err());
    let decimal = text.replacen("\"coeff\": \"1\"", "\"coeff\": \"1.0\"", 1);
    assert!(matches!(parse_spec(&decimal), Err(SchemaError::Field { .. })));
}

#[test]
fn bundles_round_trip() {
    for name in ["abelian-unital", "nilmanifold", "bv-fiber"] {
        let b = compute_bundle(&by_name(name).unwrap(), 3, 3).unwrap().bundle;
        let doc = BundleDoc::from_bundle(&b);
        let text = to_json(&doc);
        let back: BundleDoc = from_json(&text).unwrap();
        assert_eq!(back, doc, "{name}");
        assert_eq!(to_json(&back), text, "{name}");
        assert_eq!(back.to_bundle().unwrap(), b, "{name}");
    }
}

#[test]
fn every_command_document_round_trips() {
    let cases: Vec<(Command, &str)> = vec![
        (Command::Validate { input: fixture("massey") }, "validate"),
        (Command::Cohomology { input: fixture("massey") }, "cohomology"),
        (Command::Solve { input: fixture("massey") }, "solve"),
        (Command::Transfer { input: fixture("massey") }, "transfer"),
        (Command::Tangent { input: fixture("nilmanifold") }, "tangent"),
        (Command::Finf { input: fixture("abelian-unital") }, "finf"),
        (Command::GaugeCheck { input: fixture("abelian-unital"), trials: 2 }, "gauge"),
        (Command::HochschildGen { input: fixture("dual-numbers"), n_max: 3 }, "hochschild"),
    ];
    for (cmd, label) in cases {
        let out = run(&job(cmd)).unwrap();
        assert!(out.failures.is_empty(), "{label}: {:?}", out.failures);
        let text = &out.document;
        let again = match label {
            "validate" => to_json(&from_json::<ValidateDoc>(text).unwrap()),
            "cohomology" => to_json(&from_json::<CohomologyDoc>(text).unwrap()),
            "solve" => to_json(&from_json::<SolveDoc>(text).unwrap()),
            "transfer" => to_json(&from_json::<TransferDoc>(text).unwrap()),
            "tangent" | "finf" => to_json(&from_json::<FinfDoc>(text).unwrap()),
            "gauge" => to_json(&from_json::<GaugeDoc>(text).unwrap()),
            _ => spec_to_json(&parse_spec(text).unwrap()),
        };
        assert_eq!(&again, text, "{label}");
    }
}

#[test]
fn solve_document_carries_the_quadratic_field() {
    let out = run(&job(Command::Solve { input: fixture("odd-heisenberg") })).unwrap();
    let doc: SolveDoc = from_json(&out.document).unwrap();
    assert!(doc.residual_zero && doc.chen_square_zero);
    assert_eq!(doc.euler_eigenvalue, Some(Rational::new(1, 2)));
    let degrees: Vec<usize> =
        doc.chen.iter().flat_map(|c| c.terms.iter().map(|t| t.exponents.iter().map(|&e| e as usize).sum())).collect();
    assert!(!degrees.is_empty());
    assert!(degrees.iter().all(|&d| d == 2));
}

#[test]
fn exit_codes() {
    let p = |n: &str| fixture(n).to_string_lossy().into_owned();
    let out = scratch("finf.json").to_string_lossy().into_owned();
    assert_eq!(main_with_args(args(&["finf", &p("abelian-unital"), "--out", &out])), 0);
    assert!(std::fs::read_to_string(&out).unwrap().contains("\"valid\": true"));
    assert_eq!(main_with_args(args(&["finf", &p("bv-fiber"), "--out", &out])), 0);
    assert_eq!(main_with_args(args(&["solve", &p("odd-sl2"), "--truncation", "3", "--out", &out])), 0);
    assert_eq!(main_with_args(args(&["validate", &p("massey"), "--check-level", "fast", "--out", &out])), 0);
    // a non-dG input to a dG-only stage is invalid input
    assert_eq!(main_with_args(args(&["finf", &p("massey"), "--out", &out])), 2);
    // inconsistent options
    assert_eq!(main_with_args(args(&["transfer", &p("massey"), "--truncation", "2", "--arity-cap", "3"])), 2);
    // an honest identity failure
    assert_eq!(main_with_args(args(&["gauge-check", &p("bv-fiber"), "--trials", "1", "--truncation", "3", "--out", &out])), 1);
    // unreadable and malformed inputs
    assert_eq!(main_with_args(args(&["validate", "/nonexistent/spec.json"])), 2);
    let bad = scratch("bad.json");
    let text = std::fs::read_to_string(fixture("odd-heisenberg")).unwrap();
    std::fs::write(&bad, text.replacen("\"coeff\": \"1\"", "\"coeff\": \"0.5\"", 1)).unwrap();
    assert_eq!(main_with_args(args(&["validate", &bad.to_string_lossy()])), 2);
}

#[test]
fn broken_inputs_fail_validation() {
    use finf::algebras::{q, AlgebraBuilder};
    let spec = AlgebraBuilder::new()
        .element("x", 1)
        .element("y", 1)
        .element("z", 1)
        .bracket("x", "y", &[("x", q(1))])
        .bracket("x", "z", &[("y", q(1))])
        .build()
        .unwrap();
    let path = scratch("broken.json");
    std::fs::write(&path, spec_to_json(&spec)).unwrap();
    let out = run(&job(Command::Validate { input: path })).unwrap();
    assert_eq!(out.exit_code(), 1);
    let doc: ValidateDoc = from_json(&out.document).unwrap();
    assert!(!doc.valid);
    assert!(doc.reports["dlie"].count("odd Jacobi identity") > 0);
}

mod props {
    use finf::exactq::Rational;
    use finf::graded::{CoordinateRing, Monomial, TruncatedSeries};
    use finf::schema::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn coefficient_text_round_trips(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = Rational::new(n, d);
            prop_assert_eq!(parse_coeff(&r.to_string(), "c").unwrap(), r);
        }

        #[test]
        fn series_documents_round_trip(terms in prop::collection::vec((prop::collection::vec(0u8..=2, 3), -5i64..=5), 0..8)) {
            let ring = CoordinateRing::for_degrees(vec!["a".into(), "b".into(), "c".into()], &[0, 1, 2], 4);
            let s = TruncatedSeries::from_terms(
                &ring,
                terms.into_iter().map(|(mut e, c)| {
                    e[1] = e[1].min(1);
                    (Monomial::from_exponents(&e), Rational::from_int(c))
                }),
            );
            let doc = series_doc(&s);
            let text = serde_json::to_string(&doc).unwrap();
            let back: Vec<TermDoc> = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(series_from_doc(&ring, &back, "s").unwrap(), s);
        }
    }
}
