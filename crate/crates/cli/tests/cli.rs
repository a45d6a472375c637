use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use shapedrm_cli::config::{Command as Sub, MomentsArgs, SimulateArgs};
use shapedrm_cli::{run, Format, ResultRecord, Results, RunConfig};
use shapedrm_core::EntryKind;

fn shapedrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapedrm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn without_clock(mut v: Value) -> Value {
    v["provenance"]
        .as_object_mut()
        .unwrap()
        .remove("wall_clock_seconds");
    v
}

fn simulate_config(seed: u64, threads: Option<usize>) -> RunConfig {
    RunConfig {
        command: Sub::Simulate(SimulateArgs {
            r: 1,
            dilation: 50,
            entries: EntryKind::ComplexGaussian,
            trunc: None,
            replicas: 20,
            seed,
            kmax: 4,
            bins: 40,
            range: None,
        }),
        out: None,
        format: Format::Json,
        threads,
    }
}

#[test]
fn moments_reproduce_order_two_column() {
    let v = json_of(&shapedrm(&["moments", "--r", "2", "--kmax", "10"]));
    let column: Vec<&str> = v["results"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["gen_catalan"].as_str().unwrap())
        .collect();
    assert_eq!(
        column,
        ["2", "3", "10", "42", "198", "1001", "5304", "29070", "163438", "937365", "5462730"]
    );
    assert_eq!(v["results"]["edge"]["exact"], "27/4");
    assert_eq!(v["results"]["rows"][3]["moment"]["exact"], "21");
}

#[test]
fn tree_oracle_sits_beside_exact_values() {
    let record = run(&RunConfig {
        command: Sub::Moments(MomentsArgs {
            r: 3,
            kmax: 6,
            oracle_trees: true,
            tree_max_k: Some(5),
        }),
        out: None,
        format: Format::Json,
        threads: None,
    })
    .unwrap();
    let Results::Moments(m) = record.results else {
        panic!("wrong payload")
    };
    for row in &m.rows {
        if row.k <= 5 {
            assert_eq!(row.tree_count.as_deref(), Some(row.gen_catalan.as_str()));
            assert_eq!(row.trees_agree, Some(true));
        } else {
            assert_eq!(row.tree_count, None);
        }
    }
}

#[test]
fn simulate_marchenko_pastur_at_desk_scale() {
    let record = run(&simulate_config(7, None)).unwrap();
    let Results::Simulate(s) = &record.results else {
        panic!("wrong payload")
    };
    let catalan = [1.0, 1.0, 2.0, 5.0, 14.0];
    for (m, c) in s.moments.iter().zip(catalan) {
        assert!((m.mean - c).abs() < 0.05 * c, "k={}: {}", m.k, m.mean);
    }
    assert!(s.levy_distance < 0.05, "{}", s.levy_distance);
    assert_eq!(s.matrix_dim, 50);
    assert_eq!(record.provenance.seed, Some(7));
    assert_eq!(record.provenance.substreams[0].count, 20);
}

#[test]
fn reruns_are_identical_across_thread_counts() {
    let args = [
        "simulate",
        "--r",
        "2",
        "--dilation",
        "12",
        "--replicas",
        "8",
        "--seed",
        "11",
        "--kmax",
        "4",
        "--bins",
        "20",
    ];
    let one = json_of(&shapedrm(&[&args[..], &["--threads", "1"]].concat()));
    let again = json_of(&shapedrm(&[&args[..], &["--threads", "1"]].concat()));
    let four = json_of(&shapedrm(&[&args[..], &["--threads", "4"]].concat()));
    assert_eq!(without_clock(one.clone()), without_clock(again));
    assert_eq!(one["results"], four["results"]);
    assert_eq!(
        one["provenance"]["substreams"],
        four["provenance"]["substreams"]
    );
}

#[test]
fn sample_law_is_deterministic_and_chunked() {
    let base = [
        "sample-law",
        "--r",
        "2",
        "--samples",
        "150000",
        "--seed",
        "5",
        "--bins",
        "30",
    ];
    let a = json_of(&shapedrm(&[&base[..], &["--threads", "1"]].concat()));
    let b = json_of(&shapedrm(&[&base[..], &["--threads", "3"]].concat()));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["provenance"]["substreams"][0]["count"], 3);
    let counts: u64 = a["results"]["histogram"]["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(counts, 150000);
}

#[test]
fn json_record_has_documented_shape_and_round_trips() {
    let out = shapedrm(&[
        "triangular",
        "--size",
        "30",
        "--replicas",
        "4",
        "--seed",
        "2",
        "--bins",
        "10",
    ]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v = json_of(&out);
    for key in ["config", "results", "provenance", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["provenance"]["seed"], 2);
    assert!(v["provenance"]["substreams"].is_array());
    assert_eq!(v["config"]["subcommand"], "triangular");

    let record: ResultRecord = serde_json::from_str(&text).unwrap();
    let back = serde_json::to_value(&record).unwrap();
    assert_eq!(back, v);
}

#[test]
fn config_file_reproduces_flag_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = json_of(&shapedrm(&[
        "simulate",
        "--r",
        "1",
        "--dilation",
        "10",
        "--replicas",
        "3",
        "--seed",
        "9",
        "--kmax",
        "3",
    ]));
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, first["config"].to_string()).unwrap();
    let second = json_of(&shapedrm(&["--config", cfg.to_str().unwrap()]));
    assert_eq!(first["results"], second["results"]);
    assert_eq!(first["config"], second["config"]);
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

#[test]
fn csv_tables_have_one_row_per_bin_or_node() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("hist.csv");
    let out = shapedrm(&[
        "simulate",
        "--r",
        "2",
        "--dilation",
        "8",
        "--replicas",
        "3",
        "--seed",
        "1",
        "--bins",
        "17",
        "--format",
        "csv",
        "--out",
        hist.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = lines(&hist);
    assert_eq!(rows[0], "bin_left,bin_right,count,density");
    assert_eq!(rows.len(), 1 + 17);

    let grid = dir.path().join("grid.csv");
    let out = shapedrm(&[
        "law",
        "--r",
        "2",
        "--grid",
        "32",
        "--format",
        "csv",
        "--out",
        grid.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = lines(&grid);
    assert_eq!(rows[0], "x,density,abs_err");
    assert_eq!(rows.len(), 1 + 32);
    // last node is the soft edge
    assert!(rows[32].starts_with("6.75,0,"), "{}", rows[32]);
}

#[test]
fn default_histogram_range_overshoots_the_edge() {
    let v = json_of(&shapedrm(&[
        "simulate",
        "--r",
        "1",
        "--dilation",
        "5",
        "--replicas",
        "2",
        "--seed",
        "1",
        "--bins",
        "4",
    ]));
    let edges = v["results"]["histogram"]["edges"].as_array().unwrap();
    assert_eq!(edges[0].as_f64(), Some(0.0));
    assert!((edges[4].as_f64().unwrap() - 4.2).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| shapedrm(args).status.code();
    // seeds are mandatory
    assert_eq!(
        code(&["simulate", "--r", "1", "--dilation", "5", "--replicas", "2"]),
        Some(2)
    );
    assert_eq!(
        code(&["triangular", "--size", "5", "--replicas", "2"]),
        Some(2)
    );
    assert_eq!(code(&["shape", "--parts", "1,2"]), Some(2));
    assert_eq!(code(&["shape", "--parts", "2,-1"]), Some(2));
    assert_eq!(code(&["law", "--r", "9"]), Some(2));
    assert_eq!(code(&["trees", "--r", "2", "--vertices", "40"]), Some(2));
    assert_eq!(
        code(&[
            "simulate",
            "--r",
            "1",
            "--dilation",
            "5",
            "--replicas",
            "2",
            "--seed",
            "1",
            "--range",
            "3,1"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "simulate",
            "--r",
            "1",
            "--dilation",
            "5",
            "--replicas",
            "2",
            "--seed",
            "1",
            "--entries",
            "rademacher",
            "--trunc",
            "0.5"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&["trees", "--r", "2", "--vertices", "4", "--format", "csv"]),
        Some(2)
    );
    assert_eq!(code(&["--config", "/nonexistent/run.json"]), Some(2));
    // an unreachable tolerance is a numerical failure
    assert_eq!(
        code(&["law", "--r", "2", "--grid", "16", "--tol", "1e-300"]),
        Some(3)
    );
    assert_eq!(
        code(&["shape", "--parts", "3,1", "--format", "text"]),
        Some(0)
    );
}

#[test]
fn config_without_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"subcommand":"simulate","r":1,"dilation":5,"replicas":2}"#,
    )
    .unwrap();
    let out = shapedrm(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn shape_reports_dilated_statistics() {
    let v = json_of(&shapedrm(&["shape", "--parts", "2,1", "--dilation", "3"]));
    let r = &v["results"];
    assert_eq!(r["length"], 6);
    assert_eq!(r["weight"], 27);
    assert_eq!(r["conjugate"], serde_json::json!([6, 6, 6, 3, 3, 3]));
    assert_eq!(r["balance_ratio"]["exact"], "3/2");
    assert_eq!(r["diagram"], "□□\n□\n");
}
