//! End-to-end runs of the `qrate` binary against the files in `tests/data`.
//!
//! Each job's stdout must match `tests/data/golden/<name>.out` byte for
//! byte. Set `QRATE_BLESS=1` to rewrite the golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn qrate(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qrate"));
    cmd.current_dir(data_dir()).args(args).env_remove("QRATE_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

struct Job {
    name: &'static str,
    args: &'static [&'static str],
    exit: i32,
}

const JOBS: &[Job] = &[
    Job { name: "rd_curve_eaq_mm", args: &["rd-curve", "--flavor", "eaq", "--source", "mm_qubit.json", "--grid", "0:0.75:16"], exit: 0 },
    Job {
        name: "rd_curve_classical",
        args: &["rd-curve", "--flavor", "classical", "--source", "uniform_bit.json", "--grid", "0:0.5:6"],
        exit: 0,
    },
    Job {
        name: "rd_curve_eac_json",
        args: &["rd-curve", "--flavor", "eac", "--source", "biased_qubit.json", "--grid", "0:0.3:4", "--format", "json"],
        exit: 0,
    },
    Job { name: "eop_bell", args: &["eop", "--source", "bell.json", "--dims", "2,2", "--restarts", "8"], exit: 0 },
    Job { name: "eop_grid", args: &["eop", "--source", "biased_qubit.json", "--grid", "0:0.3:4", "--restarts", "8"], exit: 0 },
    Job { name: "capacity_identity", args: &["capacity", "--channel", "identity.json"], exit: 0 },
    Job { name: "capacity_erasure_ea", args: &["capacity", "--channel", "erasure_0.5.json", "--which", "ea"], exit: 0 },
    Job {
        name: "sepcheck_t7_identity",
        args: &["sepcheck", "--theorem", "T7", "--source", "mm_qubit.json", "--channel", "identity.json"],
        exit: 0,
    },
    Job {
        name: "sepcheck_t6_erasure",
        args: &["sepcheck", "--theorem", "T6", "--source", "mm_qubit.json", "--channel", "erasure_0.5.json"],
        exit: 3,
    },
    Job {
        name: "sepcheck_t8_depolarizing",
        args: &["sepcheck", "--theorem", "T8", "--source", "mm_qubit.json", "--channel", "depolarizing_full.json", "--distortion", "0.75"],
        exit: 0,
    },
    Job {
        name: "sepcheck_t5_classical",
        args: &["sepcheck", "--theorem", "t5", "--source", "uniform_bit.json", "--channel", "depolarizing_0.2.json", "--distortion", "0.1"],
        exit: 0,
    },
    Job { name: "schumacher_biased", args: &["schumacher", "--source", "biased_qubit.json", "--n", "20", "--rate", "0.6"], exit: 0 },
    Job {
        name: "lemma1_identity",
        args: &["lemma1", "--source", "mm_qubit.json", "--target", "identity.json", "--block", "identity_2q.json", "--n", "2"],
        exit: 0,
    },
];

#[test]
fn jobs_reproduce_golden_outputs() {
    let bless = std::env::var_os("QRATE_BLESS").is_some();
    let golden = data_dir().join("golden");
    for job in JOBS {
        let start = Instant::now();
        let out = qrate(job.args, &[]);
        assert!(start.elapsed() < Duration::from_secs(120), "{} is too slow", job.name);
        assert_eq!(out.status.code(), Some(job.exit), "{}: {}", job.name, String::from_utf8_lossy(&out.stderr));
        let path = golden.join(format!("{}.out", job.name));
        if bless {
            std::fs::create_dir_all(&golden).unwrap();
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(out.stdout == want, "{} differs from {}:\n{}", job.name, path.display(), String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn eaq_curve_endpoints() {
    let out = qrate(JOBS[0].args, &[]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "D,rate_bits,lambda,gap");
    assert_eq!(rows.len(), 17);
    let field = |row: &str, i: usize| row.split(',').nth(i).unwrap().parse::<f64>().unwrap();
    assert_eq!((field(rows[1], 0), field(rows[1], 1)), (0.0, 1.0));
    assert_eq!((field(rows[16], 0), field(rows[16], 1)), (0.75, 0.0));
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = ["eop", "--source", "bell.json", "--dims", "2,2", "--restarts", "6"];
    let one = qrate(&args, &[("QRATE_THREADS", "1")]);
    let four = qrate(&args, &[("QRATE_THREADS", "4")]);
    let seq = qrate(&[&args[..], &["--sequential"]].concat(), &[]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, seq.stdout);
}

#[test]
fn output_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qrate(&["schumacher", "--source", "biased_qubit.json", "--n", "20", "--rate", "0.6", "-o", path.to_str().unwrap()], &[]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["retained_dim"], 4096.0);
}

fn error_of(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(stderr.lines().last().expect("stderr has a line")).expect("stderr is JSON")
}

#[test]
fn malformed_json_exits_1_with_diagnostic() {
    let out = qrate(&["rd-curve", "--flavor", "eac", "--source", "malformed.json", "--grid", "0:0.5:3"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = error_of(&out);
    assert_eq!(err["error"], "Parse");
    assert_eq!(err["exit_code"], 1);
    assert!(err["message"].as_str().unwrap().contains("malformed.json"));
}

#[test]
fn usage_and_input_errors() {
    let cases: &[(&[&str], i32, &str)] = &[
        (&["rd-curve", "--flavor", "eac", "--source", "mm_qubit.json", "--grid", "0:1"], 1, "Parse"),
        (&["rd-curve", "--flavor", "eac", "--source", "missing.json", "--grid", "0:1:3"], 1, "Parse"),
        (&["schumacher", "--source", "biased_qubit.json", "--n", "101", "--rate", "0.5"], 4, "BlockTooLarge"),
        (&["schumacher", "--source", "biased_qubit.json", "--n", "10", "--rate", "1.5"], 1, "RateOutOfRange"),
        (&["sepcheck", "--theorem", "T8", "--source", "mm_qubit.json", "--channel", "identity.json"], 1, "MissingDistortion"),
        (&["sepcheck", "--theorem", "T9", "--source", "mm_qubit.json", "--channel", "identity.json"], 1, "Parse"),
        (&["capacity", "--channel", "mm_qubit.json"], 1, "Parse"),
        (&["--restarts", "0", "capacity", "--channel", "identity.json"], 1, "InvalidParameter"),
        (&["eop", "--source", "bell.json", "--dims", "3,3"], 1, "DimensionMismatch"),
    ];
    for (args, code, kind) in cases {
        let out = qrate(args, &[]);
        assert_eq!(out.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(error_of(&out)["error"], *kind, "{args:?}");
    }
    let bad_threads = qrate(&["capacity", "--channel", "identity.json"], &[("QRATE_THREADS", "many")]);
    assert_eq!(bad_threads.status.code(), Some(1));
}
