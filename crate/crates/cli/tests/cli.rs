use std::collections::BTreeSet;
use std::process::{Command, Output};

use clap::CommandFactory;
use pfam_cli::{Cli, OPERATIONS};

const M: &str = r#"{"dim":2,"gens":[[1,0],[0,1]]}"#;

fn pfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfam"))
        .args(args)
        .output()
        .expect("spawn pfam")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn m_power_factor(shift: u32) -> String {
    format!(r#"[{{"family":{{"op":"ordinary_power","ideal":{M}}},"shift":{shift}}}]"#)
}

#[test]
fn missing_dim_is_a_parse_error() {
    let o = pfam(&["hk", "--ideal", r#"{"gens":[[2,0],[0,3]]}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dim"));
}

#[test]
fn composite_characteristic_is_rejected() {
    let o = pfam(&["-p", "4", "hk", "--ideal", M]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn caps_need_unsafe_large() {
    let o = pfam(&["--emax", "13", "hk", "--ideal", M]);
    assert_eq!(o.status.code(), Some(3));
    let o = pfam(&["--emax", "13", "--unsafe-large", "hk", "--ideal", M]);
    assert_eq!(o.status.code(), Some(0));
    let d5 = r#"{"dim":5,"gens":[[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,1]]}"#;
    assert_eq!(pfam(&["hk", "--ideal", d5]).status.code(), Some(3));
}

#[test]
fn dimension_mismatch_exit_code() {
    let o = pfam(&["length", "--ideal", M, "--top", r#"{"dim":3,"gens":[[1,0,0]]}"#]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn non_m_primary_is_a_math_error() {
    let o = pfam(&["hk", "--ideal", r#"{"dim":2,"gens":[[1,0]]}"#]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn hilbert_kunz_of_small_staircase() {
    let o = pfam(&["hk", "--ideal", r#"{"dim":2,"gens":[[2,0],[1,1],[0,3]]}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["e_hk"], "4/1");
    assert_eq!(v["e_hk_decimal"], "4.00000000000");
}

#[test]
fn length_and_relative_length() {
    let i = r#"{"dim":2,"gens":[[3,0],[0,3]]}"#;
    let v: serde_json::Value = serde_json::from_str(&stdout(&pfam(&["length", "--ideal", i]))).unwrap();
    assert_eq!(v["length"], "9");
    let o = pfam(&["length", "--ideal", i, "--top", M]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["length"], "8");
}

#[test]
fn ideal_product_and_frobenius_power() {
    let o = pfam(&["ideal", "--ideal", M, "--op", "product", "--other", M, "--power", "2", "--mode", "frobenius"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gens"], serde_json::json!([[0, 4], [2, 2], [4, 0]]));
    assert_eq!(v["m_primary"], true);
}

#[test]
fn input_from_file() {
    let dir = std::env::temp_dir().join(format!("pfam-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ideal.json");
    std::fs::write(&path, r#"{"dim":2,"gens":[[2,0],[1,1],[0,3]]}"#).unwrap();
    let arg = format!("@{}", path.display());
    let o = pfam(&["hk", "--ideal", &arg]);
    std::fs::remove_dir_all(&dir).ok();
    assert!(stdout(&o).contains("\"4/1\""));
}

#[test]
fn double_limit_on_maximal_ideal_powers_passes() {
    let (j, i) = (m_power_factor(1), m_power_factor(0));
    let o = pfam(&["--bmax", "6", "--emax", "8", "double-limit", "--j", &j, "--i", &i]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("PASS"));
}

#[test]
fn double_limit_reports_axiom_failure() {
    let bad = format!(
        r#"[{{"family":{{"op":"table","ideals":[{M},{{"dim":2,"gens":[[2,0],[0,2]]}},{{"dim":2,"gens":[[8,0],[0,8]]}}]}},"shift":0}}]"#
    );
    let o = pfam(&["--bmax", "2", "--emax", "2", "double-limit", "--i", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().last().unwrap().starts_with("AXIOM_FAILURE"));
}

#[test]
fn staircase_pair_fit_has_a_residual() {
    let samples = r#"[
        {"point":[1,0],"value":"2"},
        {"point":[0,1],"value":"3"},
        {"point":[1,1],"value":"6"}
    ]"#;
    let o = pfam(&["fit", "--degree", "1", "--samples", samples]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["residuals"][0]["residual"], "1/1");
}

#[test]
fn limits_csv_columns() {
    let o = pfam(&["--format", "csv", "--emax", "3", "limits", "--i", &m_power_factor(0)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["b", "e", "q", "num", "den", "float"]);
    let last = rdr.records().last().unwrap().unwrap();
    assert_eq!(&last[1], "3");
    assert_eq!((&last[3], &last[4]), ("9", "16"));
}

#[test]
fn csv_rejected_for_scalar_commands() {
    assert_eq!(pfam(&["--format", "csv", "hk", "--ideal", M]).status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let args = ["--emax", "4", "--bmax", "3", "coeff-limits", "--families"];
    let fams = format!(r#"[{{"op":"frobenius","ideal":{M}}},{{"op":"frobenius","ideal":{{"dim":2,"gens":[[2,0],[0,3]]}}}}]"#);
    let run = || {
        let mut a: Vec<&str> = args.to_vec();
        a.push(&fams);
        pfam(&a).stdout
    };
    let first = run();
    assert!(!first.is_empty());
    assert_eq!(first, run());
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("pfam-out-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let o = pfam(&["--out", p, "mult", "--ideal", M]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.contains("\"e\": \"1\""));
}

#[test]
fn every_operation_has_exactly_one_subcommand() {
    let subcommands: BTreeSet<String> = Cli::command()
        .get_subcommands()
        .map(|c| c.get_name().to_string())
        .collect();
    let mut ops = BTreeSet::new();
    for (op, sub) in OPERATIONS {
        assert!(ops.insert(*op), "{op} listed twice");
        assert!(subcommands.contains(*sub), "{op} maps to missing subcommand {sub}");
    }
    let used: BTreeSet<String> = OPERATIONS.iter().map(|(_, s)| s.to_string()).collect();
    assert_eq!(used, subcommands, "subcommands without an operation");
}
