use std::path::Path;
use std::process::{Command as Process, Output};

use proptest::prelude::*;
use sumprod::cli::{parse_args, Command, Format, Lemma, Parsed, RunConfig, SetOp};

fn sumprod(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_sumprod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn config(argv: &[&str]) -> RunConfig {
    let mut full = vec!["sumprod"];
    full.extend_from_slice(argv);
    match parse_args(full).unwrap() {
        Parsed::Run { config, .. } => config,
        Parsed::Info(_) => panic!("expected a run"),
    }
}

#[test]
fn parses_pluennecke_instance() {
    let c = config(&["verify", "pluennecke", "--field", "7", "--x", "[0,1]", "--b", "[0,1]", "--b", "[0,1]"]);
    assert_eq!(c.seed, 0);
    match c.command {
        Command::Verify { lemma, x, b, .. } => {
            assert_eq!(lemma, Lemma::Pluennecke);
            assert_eq!(x.as_deref(), Some("[0,1]"));
            assert_eq!(b, vec!["[0,1]", "[0,1]"]);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn parses_trace_and_search() {
    let c = config(&["trace", "--field", "7", "--set", "[1,2,3]", "--trace-out", "t.json"]);
    assert!(matches!(c.command, Command::Trace { ref trace_out, .. } if trace_out.as_deref() == Some(Path::new("t.json"))));
    let c = config(&["search", "--field", "2^4/[1,1,0,0,1]", "--m", "4", "--exhaustive", "--admissible"]);
    assert!(matches!(c.command, Command::Search { m: 4, exhaustive: true, admissible: true, .. }));
}

#[test]
fn parse_errors() {
    use sumprod::Error;
    let err = |argv: &[&str]| {
        let mut full = vec!["sumprod"];
        full.extend_from_slice(argv);
        parse_args(full).unwrap_err()
    };
    assert_eq!(err(&["frobnicate"]), Error::UnknownCommand("frobnicate".into()));
    assert_eq!(err(&["field", "--field", "2^x"]), Error::MalformedFieldSpec("2^x".into()));
    assert_eq!(err(&["trace", "--field", "7", "--set", "1,2"]), Error::MalformedSetLiteral("1,2".into()));
    assert!(matches!(err(&["trace", "--field", "7", "--set", "[9]"]), Error::ElementOutOfRange(9, 7)));
    assert!(matches!(err(&["field", "--field", "6"]), Error::NotPrime(6)));
    assert!(matches!(err(&["verify", "all", "--field", "7", "--x", "[1]"]), Error::InvalidArgument(_)));
}

#[test]
fn exit_codes() {
    let ok = sumprod(&["verify", "all", "--field", "7", "--max-size", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let small = sumprod(&["trace", "--field", "7", "--set", "[1]"]);
    assert_eq!(small.status.code(), Some(1));
    assert!(stderr(&small).contains("too small"));
    let unknown = sumprod(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));
    let help = sumprod(&["trace", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("max{|A+A|,|A·A|}/|A|"));
}

#[test]
fn instance_report_shape() {
    let out = sumprod(&["verify", "subfield", "--field", "2^4", "--b", "[2]", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["lhs"], "16");
    assert_eq!(v["rhs"], "16");
    for key in ["lemma", "inputs", "lhs", "rhs", "witnesses", "measured_constants"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn status_codes() {
    use sumprod::cli::{Status, EXIT_ERROR};
    assert_eq!(Status::Ok.exit_code(), 0);
    assert_eq!(Status::Violation.exit_code(), 2);
    assert_eq!(EXIT_ERROR, 1);
}

#[test]
fn search_f7_csv_row() {
    let out = sumprod(&["search", "--field", "7", "--m", "3", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let headers = rows.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        "field,p,n,m,method,seed,best_value,K_num,K_den,exponent,benchmark_12_11,admissible,evaluations"
            .split(',')
            .collect::<Vec<_>>()
    );
    let row = rows.records().next().unwrap().unwrap();
    assert_eq!(&row[6], "5");
    assert_eq!((&row[7], &row[8]), ("5", "3"));

    let annealed = sumprod(&["search", "--field", "7", "--m", "3", "--iters", "1000", "--seed", "3"]);
    assert!(stdout(&annealed).contains(",anneal,3,5,"));
}

#[test]
fn outputs_are_byte_identical_and_jobs_independent() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, jobs) in [(&a, "1"), (&b, "4")] {
        let out = sumprod(&[
            "trace",
            "--field",
            "7",
            "--set",
            "[1,2,3]",
            "--jobs",
            jobs,
            "--trace-out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let chart = |jobs: &str| {
        stdout(&sumprod(&["chart", "--field", "7", "--field", "3^2", "--m", "2,3,4", "--jobs", jobs]))
    };
    assert_eq!(chart("1"), chart("3"));
}

#[test]
fn order_cap_from_environment() {
    let out = Process::new(env!("CARGO_BIN_EXE_sumprod"))
        .args(["field", "--field", "11"])
        .env("SUMPROD_ORDER_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("exceeds the configured cap 8"));
    let out = Process::new(env!("CARGO_BIN_EXE_sumprod"))
        .args(["field", "--field", "7"])
        .env("SUMPROD_ORDER_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_files_reproduce_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let direct = sumprod(&[
        "--save-config",
        cfg.to_str().unwrap(),
        "search",
        "--field",
        "13",
        "--m",
        "4",
        "--iters",
        "2000",
        "--seed",
        "5",
    ]);
    let replay = sumprod(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(direct.stdout, replay.stdout);
}

#[test]
fn set_export_shape() {
    let out = sumprod(&["setops", "--field", "3^2", "--op", "product", "--a", "[1,3]", "--b", "[3]", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["field"], "3^2/[1,0,1]");
    assert!(v["indices"].is_array());
    assert_eq!(v.as_object().unwrap().len(), 2);
}

fn field_spec() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("7".to_string()),
        Just("3^2".to_string()),
        Just("2^4/[1,1,0,0,1]".to_string()),
        Just("5".to_string()),
    ]
}

fn set_literal() -> impl Strategy<Value = String> {
    prop::collection::btree_set(1u32..5, 1..4).prop_map(|s| {
        let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
        format!("[{}]", parts.join(","))
    })
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    let command = prop_oneof![
        field_spec().prop_map(|field| Command::Field { field }),
        (field_spec(), set_literal(), proptest::option::of(set_literal())).prop_map(|(field, a, b)| Command::Setops {
            field,
            op: if b.is_some() { SetOp::Sum } else { SetOp::Quotient },
            a,
            b,
            scalar: None,
        }),
        (field_spec(), set_literal(), prop::collection::vec(set_literal(), 0..3), 1usize..4).prop_map(
            |(field, x, b, max_size)| Command::Verify {
                lemma: if b.is_empty() { Lemma::All } else { Lemma::Pluennecke },
                field,
                x: (!b.is_empty()).then_some(x),
                b,
                y: None,
                epsilon: "1/10".into(),
                max_size,
            }
        ),
        (field_spec(), set_literal(), any::<bool>()).prop_map(|(field, set, out)| Command::Trace {
            field,
            set,
            epsilon: "1/3".into(),
            trace_out: out.then(|| "trace.json".into()),
        }),
        (field_spec(), 1usize..6, any::<bool>(), any::<bool>(), 1u64..100_000, 1u64..1_000_000_000).prop_map(
            |(field, m, exhaustive, admissible, iters, budget)| Command::Search {
                field,
                m,
                exhaustive,
                admissible,
                iters,
                budget,
                output: None,
            }
        ),
        (prop::collection::vec(field_spec(), 1..3), prop::collection::vec(1usize..6, 1..4)).prop_map(|(fields, m)| {
            Command::Chart { fields, m, admissible: false, iters: 10, budget: 1000, output: Some("chart.csv".into()) }
        }),
    ];
    (
        proptest::option::of(prop_oneof![Just(Format::Json), Just(Format::Csv), Just(Format::Text)]),
        0..=i64::MAX as u64,
        proptest::option::of(1usize..16),
        command,
    )
        .prop_map(|(format, seed, jobs, command)| RunConfig { format, seed, jobs, command })
}

proptest! {
    #[test]
    fn run_config_round_trips(c in run_config()) {
        let text = c.to_toml();
        let parsed = RunConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&parsed, &c);
        prop_assert_eq!(parsed.to_toml(), text);
    }
}
