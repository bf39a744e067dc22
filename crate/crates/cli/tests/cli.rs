use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

const HEADER: &str = "rounds,x_rate,z_rate,merged_rate,ineff,kq,n_1q,n_2q,\
x_ci_lo,x_ci_hi,z_ci_lo,z_ci_hi,merged_ci_lo,merged_ci_hi";

fn hetbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetbell"))
        .args(args)
        .env_remove("HETBELL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hetbell-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn metadata(csv: &str) -> BTreeMap<String, String> {
    csv.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn run_emits_header_and_one_row() {
    let o = hetbell(&["run", "--scheme", "baseline", "--rounds", "1", "--trials", "500"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines = data_lines(&text);
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1,"));
    let m = metadata(&text);
    assert_eq!(m["seed"], "2015");
    assert_eq!(m["seed-source"], "default");
    assert_eq!(m["trials"], "500");
}

#[test]
fn metadata_replays_bit_exactly() {
    let first = hetbell(&[
        "run", "--scheme", "strict", "--code-a", "steane7", "--code-b", "physical", "--rounds", "2", "--p", "0.002",
        "--trials", "700", "--seed", "4242",
    ]);
    assert!(first.status.success());
    let text = stdout(&first);
    let m = metadata(&text);
    let replay = hetbell(&[
        "run",
        "--scheme",
        &m["scheme"],
        "--code-a",
        &m["code-a"],
        "--code-b",
        &m["code-b"],
        "--rounds",
        &m["rounds"],
        "--p",
        &m["p"],
        "--trials",
        &m["trials"],
        "--seed",
        &m["seed"],
        "--postselect",
        &m["postselect"],
        "--basis-order",
        &m["basis-order"],
        "--measurement-noise",
        &m["measurement-noise"],
        "--kq-budget-steane",
        &m["kq-budget-steane"],
        "--kq-budget-surface",
        &m["kq-budget-surface"],
        "--jobs",
        "3",
    ]);
    assert!(replay.status.success());
    let again = stdout(&replay);
    assert_eq!(data_lines(&text), data_lines(&again));
    assert_eq!(metadata(&again)["seed-source"], "flag");
}

#[test]
fn json_has_the_csv_fields() {
    let o = hetbell(&["run", "--scheme", "after", "--rounds", "1", "--trials", "300", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mut keys: Vec<&str> = v["rows"][0].as_object().unwrap().keys().map(String::as_str).collect();
    let mut want: Vec<&str> = HEADER.split(',').collect();
    keys.sort();
    want.sort();
    assert_eq!(keys, want);
    assert_eq!(v["metadata"]["scheme"], "after");
    assert_eq!(v["metadata"]["code-b"], "surface3");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = scratch("config");
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# sweep\nscheme = baseline\nrounds = 2\ntrials = 400\nseed = 77\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = hetbell(&["run", "--config", c]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = metadata(&stdout(&o));
    assert_eq!((m["seed"].as_str(), m["seed-source"].as_str()), ("77", "config"));
    assert!(data_lines(&stdout(&o))[1].starts_with("2,"));

    let o = hetbell(&["run", "--config", c, "--rounds", "1", "--seed", "5"]);
    let m = metadata(&stdout(&o));
    assert_eq!(m["seed"], "5");
    assert!(data_lines(&stdout(&o))[1].starts_with("1,"));

    std::fs::write(&cfg, "scheme = baseline\ncolour = blue\n").unwrap();
    assert_eq!(hetbell(&["run", "--config", c]).status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn seed_from_environment_is_logged() {
    let o = Command::new(env!("CARGO_BIN_EXE_hetbell"))
        .args(["run", "--scheme", "baseline", "--trials", "100"])
        .env("HETBELL_SEED", "31337")
        .output()
        .unwrap();
    let m = metadata(&stdout(&o));
    assert_eq!((m["seed"].as_str(), m["seed-source"].as_str()), ("31337", "env"));
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["run"],
        &["run", "--scheme", "sideways"],
        &["run", "--scheme", "baseline", "--p", "1.5"],
        &["run", "--scheme", "baseline", "--rounds", "-1"],
        &["run", "--scheme", "baseline", "--code-a", "steane7"],
        &["run", "--scheme", "baseline", "--trials", "0"],
        &["run", "--scheme", "baseline", "--source", "werner"],
        &["run", "--scheme", "baseline", "--config", "/nonexistent/hetbell.conf"],
        &["tables", "--which", "7"],
        &["tables"],
        &["analytic", "--f-min", "0.9", "--f-max", "0.6"],
        &["analytic", "--steps", "0"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = hetbell(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn runtime_failure_exits_1() {
    let o = hetbell(&["run", "--scheme", "baseline", "--trials", "10", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    assert!(hetbell(&["--help"]).status.success());
    assert!(hetbell(&["run", "--help"]).status.success());
}

#[test]
fn tables_writes_three_files_per_table() {
    let dir = scratch("tables");
    let o = hetbell(&["tables", "--which", "1", "--trials", "200", "--out-dir", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for (suffix, p) in [("a", "0.001"), ("b", "0.0001"), ("c", "0.00001")] {
        let text = std::fs::read_to_string(dir.join(format!("table1{suffix}.csv"))).unwrap();
        let m = metadata(&text);
        assert_eq!(m["scheme"], "baseline");
        assert_eq!(m["p"].parse::<f64>().unwrap(), p.parse::<f64>().unwrap());
        let rows = data_lines(&text);
        assert_eq!(rows[0], HEADER);
        let rounds: Vec<&str> = rows[1..].iter().map(|r| r.split(',').next().unwrap()).collect();
        assert_eq!(rounds, ["0", "1", "2", "3", "4"]);
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn analytic_rows() {
    let o = hetbell(&["analytic", "--f-min", "0.5", "--f-max", "1", "--steps", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: BTreeMap<String, Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (l.split(',').next().unwrap().to_string(), v)
        })
        .collect();
    assert_eq!(rows.len(), 11);
    let r = &rows["0.85"];
    assert!((r[1] - 0.969799).abs() < 5e-7);
    assert!((r[2] - 0.82).abs() < 1e-12);
    assert_eq!((rows["1"][1], rows["1"][2]), (1.0, 1.0));
    assert_eq!(rows["0.5"][1], 0.5);
}

#[test]
fn plotdata_covers_all_schemes() {
    let o = hetbell(&["plotdata", "--p", "0.001", "--trials", "100"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows = data_lines(&text);
    assert_eq!(rows[0], "p,scheme,rounds,ineff,merged_rate,merged_ci_lo,merged_ci_hi");
    assert_eq!(rows.len(), 1 + 4 * 5);
    for s in ["baseline", "before", "after", "strict"] {
        assert!(rows.iter().any(|r| r.split(',').nth(1) == Some(s)));
    }
}

#[test]
fn code_and_circuit_dumps() {
    let o = hetbell(&["code", "--code", "surface3"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("SX ") || l.starts_with("SZ ")).count(), 12);
    assert!(text.contains("LX IIIIXIXIIXIII"));
    let o = hetbell(&["circuit", "--code", "steane7"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 14);
    assert_eq!(text.lines().next(), Some("CNOT 3 1"));
}
