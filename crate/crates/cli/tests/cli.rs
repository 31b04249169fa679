use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use ramsey_moments::arith::RationalPolynomial;
use ramsey_moments::moments::{raw_moment, EngineConfig};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ramsey-moments"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.json"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn json_of(args: &[&str], schema_name: &str) -> Value {
    let mut full: Vec<&str> = args.to_vec();
    full.push("--json");
    let o = run(&full);
    assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).expect("valid JSON");
    let validator = jsonschema::validator_for(&schema(schema_name)).expect("schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(&v)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(
        errors.is_empty(),
        "{args:?} violates {schema_name}.json: {errors:#?}"
    );
    // round trip
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
    v
}

#[test]
fn every_command_emits_schema_valid_json() {
    json_of(
        &["moments", "--k", "3", "--r", "2", "--eval-n", "6", "7"],
        "moments",
    );
    json_of(
        &[
            "moments", "--k", "4", "--r", "3", "--basis", "ff", "--family", "binomial",
        ],
        "moments",
    );
    json_of(
        &[
            "central",
            "--k",
            "4",
            "--m",
            "3",
            "--leading",
            "--eval-n",
            "100",
        ],
        "central",
    );
    json_of(
        &["oracle", "--n", "5", "--k", "3", "--max-r", "3"],
        "oracle",
    );
    json_of(
        &[
            "dist",
            "pmf",
            "delaporte",
            "--lambda",
            "1",
            "--alpha",
            "2",
            "--beta",
            "0.5",
        ],
        "dist",
    );
    json_of(
        &[
            "dist", "mgf", "negbin", "--alpha", "2", "--beta", "0.5", "--t", "0.1",
        ],
        "dist",
    );
    json_of(&["dist", "moments", "poisson", "--lambda", "3"], "dist");
    json_of(&["fit", "--k", "4", "--n", "100", "--regime", "big"], "fit");
    json_of(
        &["fit", "--k", "5", "--n", "20", "--regime", "small"],
        "fit",
    );
    json_of(
        &[
            "bounds",
            "--k",
            "5",
            "--m",
            "1,3",
            "--chebyshev",
            "--n",
            "11",
        ],
        "bounds",
    );
    json_of(
        &[
            "simulate",
            "--n",
            "6",
            "--k",
            "3",
            "--samples",
            "5000",
            "--seed",
            "3",
            "--fit",
            "delaporte,poisson,normal,delaporte-big-n",
        ],
        "simulate",
    );
    json_of(
        &["verify", "--only", "second-moment,erdos-threshold"],
        "verify",
    );
}

#[test]
fn schemas_reject_wrong_shapes() {
    let validator = jsonschema::validator_for(&schema("moments")).unwrap();
    assert!(!validator.is_valid(&serde_json::json!({"k": 3})));
    let validator = jsonschema::validator_for(&schema("oracle")).unwrap();
    let bad = serde_json::json!({
        "n": 5, "k": 3, "denominator": "1024", "counts": {"0": 12}, "p_zero": {"numerator": "3", "denominator": "256"},
        "moments": [], "elapsed_ms": 1.0
    });
    assert!(!validator.is_valid(&bad), "counts must be decimal strings");
}

#[test]
fn polynomial_json_round_trips() {
    let v = json_of(&["moments", "--k", "4", "--r", "2"], "moments");
    let p: RationalPolynomial = serde_json::from_value(v["polynomial"].clone()).unwrap();
    assert_eq!(p, raw_moment(4, 2, &EngineConfig::default()).unwrap());
}

#[test]
fn second_moment_example() {
    let o = run(&["moments", "--k", "3", "--r", "2", "--eval-n", "6"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("115/4"), "{}", stdout(&o));
    let v = json_of(
        &["moments", "--k", "3", "--r", "2", "--eval-n", "6"],
        "moments",
    );
    assert_eq!(v["evaluations"][0]["value"]["numerator"], "115");
    assert_eq!(v["evaluations"][0]["value"]["denominator"], "4");
}

#[test]
fn oracle_cap_is_a_resource_error() {
    let o = run(&["oracle", "--n", "9", "--k", "3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("2^36"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    // n = 8 needs the explicit override
    assert_eq!(code(&run(&["oracle", "--n", "8", "--k", "3"])), 3);
    assert_eq!(
        code(&run(&[
            "oracle",
            "--n",
            "5",
            "--k",
            "3",
            "--cap-oracle-n",
            "9"
        ])),
        2
    );
}

#[test]
fn exit_codes() {
    // usage
    for args in [
        vec!["moments", "--k", "3"],
        vec!["moments", "--k", "3", "--r", "2", "--bogus"],
        vec!["nonsense"],
        vec!["moments", "--k", "3", "--r", "2", "--precision", "32"],
        vec!["moments", "--k", "3", "--r", "2", "--output", "xml"],
        vec!["moments", "--k", "3", "--r", "2", "--json", "--csv"],
        vec!["dist", "pmf", "poisson"],
        vec!["dist", "pmf", "poisson", "--lambda", "1", "--alpha", "2"],
        vec!["dist", "mgf", "poisson", "--lambda", "1"],
        vec!["simulate", "--n", "6", "--k", "3", "--samples", "10"],
        vec!["bounds", "--k", "5", "--chebyshev"],
        vec!["verify", "--only", "no-such-check"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    // domain and regime
    for args in [
        vec!["fit", "--k", "4", "--n", "11", "--regime", "big"],
        vec!["oracle", "--n", "3", "--k", "5"],
        vec!["dist", "pmf", "poisson", "--lambda", "-1"],
        vec![
            "dist", "mgf", "negbin", "--alpha", "2", "--beta", "1", "--t", "1",
        ],
        vec!["bounds", "--k", "5", "--m", "2"],
        vec!["central", "--k", "4", "--m", "6", "--leading"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 1, "{args:?}: {}", stderr(&o));
    }
    // resource guards
    for args in [
        vec![
            "moments",
            "--k",
            "5",
            "--r",
            "4",
            "--cap-profile-nodes",
            "1000",
        ],
        vec![
            "simulate",
            "--n",
            "40",
            "--k",
            "8",
            "--samples",
            "1000000",
            "--seed",
            "1",
        ],
        vec![
            "simulate",
            "--n",
            "6",
            "--k",
            "3",
            "--samples",
            "100",
            "--seed",
            "1",
            "--cap-subset-cost",
            "10",
        ],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 3, "{args:?}: {}", stderr(&o));
    }
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

/// Long flags mentioned in a help text.
fn flags_in(text: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (i, _) in text.match_indices("--") {
        let rest = &text[i + 2..];
        let name: String = rest
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '-')
            .collect();
        if !name.is_empty() && name.chars().next().unwrap().is_ascii_alphabetic() {
            out.insert(name);
        }
    }
    out
}

#[test]
fn help_documents_every_flag() {
    let root = ramsey_moments_cli::command();
    let mut commands = vec![(Vec::<String>::new(), root.clone())];
    for sub in root.get_subcommands() {
        commands.push((vec![sub.get_name().to_string()], sub.clone()));
    }
    let globals: Vec<String> = root
        .get_arguments()
        .filter(|a| a.is_global_set())
        .filter_map(|a| a.get_long().map(String::from))
        .collect();
    assert!(globals.len() >= 9, "{globals:?}");
    for (path, cmd) in commands {
        let mut args: Vec<&str> = path.iter().map(String::as_str).collect();
        args.push("--help");
        let o = run(&args);
        assert_eq!(code(&o), 0);
        let help = stdout(&o);
        let mut declared: BTreeSet<String> = cmd
            .get_arguments()
            .filter_map(|a| a.get_long().map(String::from))
            .collect();
        if !path.is_empty() {
            declared.extend(globals.iter().cloned());
        }
        for a in cmd.get_arguments() {
            if let Some(long) = a.get_long() {
                assert!(
                    help.contains(&format!("--{long}")),
                    "{path:?}: --{long} missing from help"
                );
                assert!(
                    a.get_help().is_some() || a.get_long_help().is_some(),
                    "{path:?}: --{long} has no description"
                );
            } else if a.is_positional() {
                assert!(
                    a.get_help().is_some(),
                    "{path:?}: positional {} has no description",
                    a.get_id()
                );
            }
        }
        for g in &globals {
            if !path.is_empty() {
                assert!(
                    help.contains(&format!("--{g}")),
                    "{path:?}: global --{g} missing from help"
                );
            }
        }
        let mentioned = flags_in(&help);
        let undocumented: Vec<_> = mentioned
            .iter()
            .filter(|f| !declared.contains(*f) && *f != "help" && *f != "version")
            .collect();
        assert!(
            undocumented.is_empty(),
            "{path:?}: help mentions unknown flags {undocumented:?}"
        );
    }
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rm.conf");
    std::fs::write(&path, "# defaults\noutput = json\nseed = 11\n").unwrap();
    let p = path.to_str().unwrap();
    let o = run(&[
        "simulate",
        "--n",
        "5",
        "--k",
        "3",
        "--samples",
        "2000",
        "--config",
        p,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["seed"], 11);
    let o = run(&[
        "simulate",
        "--n",
        "5",
        "--k",
        "3",
        "--samples",
        "2000",
        "--config",
        p,
        "--seed",
        "12",
        "--output",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("value,count\n"), "{}", stdout(&o));
    std::fs::write(&path, "flavour = strange\n").unwrap();
    let o = run(&["moments", "--k", "3", "--r", "1", "--config", p]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 1"));
}

#[test]
fn simulation_output_is_reproducible() {
    let args = [
        "simulate",
        "--n",
        "6",
        "--k",
        "3",
        "--samples",
        "3000",
        "--seed",
        "5",
    ];
    let mut a = json_of(&[&args[..], &["--workers", "1"]].concat(), "simulate");
    let mut b = json_of(&[&args[..], &["--workers", "3"]].concat(), "simulate");
    a["report"]["elapsed_seconds"] = Value::Null;
    b["report"]["elapsed_seconds"] = Value::Null;
    assert_eq!(a, b);
    assert!(a["report"]["rng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn csv_and_pretty_outputs() {
    let o = run(&["oracle", "--n", "4", "--k", "3", "--csv"]);
    let text = stdout(&o);
    assert!(
        text.starts_with("value,count,probability_exact,probability\n"),
        "{text}"
    );
    assert!(text.contains("0,18,9/32,0.28125000000000000"), "{text}");
    let o = run(&["moments", "--k", "3", "--r", "1", "--csv"]);
    assert!(stdout(&o).starts_with("degree,numerator,denominator,basis\n"));
    let o = run(&["dist", "moments", "poisson", "--lambda", "2"]);
    assert!(
        stdout(&o).contains("mean = 2.0000000000000000"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn verify_filters_and_passes() {
    let o = run(&["verify", "--only", "leading-terms"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS leading-terms"), "{text}");
    assert!(!text.contains("engine-oracle"));
    let o = run(&["verify", "--list"]);
    assert!(stdout(&o).contains("no-improvement"));
}
