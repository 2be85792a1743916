use std::path::Path;
use std::process::{Command, Output};

use infocomp::Family;
use infocomp::Measure;
use infocomp_cli::figure::{FrontierRow, PlaneRow};
use infocomp_cli::output::sidecar_path;
use infocomp_cli::sweep::{record_for, SweepRecord};
use infocomp_cli::tomo_run::TomoRow;
use serde::de::DeserializeOwned;
use tempfile::tempdir;

fn infocomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infocomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn parse<T: DeserializeOwned>(csv_text: &[u8]) -> Vec<T> {
    csv::Reader::from_reader(csv_text)
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("well-formed csv")
}

fn read<T: DeserializeOwned>(path: &Path) -> Vec<T> {
    parse(&std::fs::read(path).unwrap())
}

fn assert_recomputes(rows: &[SweepRecord]) {
    for r in rows {
        let family = Family::from_tag(&r.family, r.param, r.exponent).unwrap();
        let measure: Measure = r.measure.parse().unwrap();
        let fresh = record_for(&family, measure).unwrap();
        let pairs = [
            (r.entropy_total, fresh.entropy_total),
            (r.tangle, fresh.tangle),
            (r.i_a, fresh.i_a),
            (r.i_b, fresh.i_b),
            (r.i_local, fresh.i_local),
            (r.i_corr, fresh.i_corr),
            (r.i_total, fresh.i_total),
            (r.lhs_duality_a, fresh.lhs_duality_a),
            (r.lhs_triality_a, fresh.lhs_triality_a),
        ];
        for (emitted, recomputed) in pairs {
            assert!((emitted - recomputed).abs() <= 1e-9, "{r:?} vs {fresh:?}");
        }
    }
}

#[test]
fn sweep_csv_reparses_and_recomputes() {
    for (family, measure) in [
        ("pure", "vn"),
        ("werner", "vn"),
        ("mems", "linear"),
        ("as", "vn"),
        ("s", "linear"),
        ("d", "vn"),
    ] {
        let out = infocomp(&[
            "sweep",
            "--family",
            family,
            "--grid",
            "17",
            "--measure",
            measure,
            "--exponent",
            "2",
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let rows: Vec<SweepRecord> = parse(&out.stdout);
        assert_eq!(rows.len(), 17);
        assert_recomputes(&rows);
    }
}

#[test]
fn sweep_family_examples() {
    let pure: Vec<SweepRecord> = parse(&infocomp(&["sweep", "--family", "pure"]).stdout);
    assert_eq!(pure.len(), 101);
    assert!(pure.iter().all(|r| (r.i_a - r.i_b).abs() < 1e-12));

    let werner: Vec<SweepRecord> = parse(&infocomp(&["sweep", "--family", "werner"]).stdout);
    assert!(werner
        .iter()
        .all(|r| r.i_a.abs() < 1e-12 && r.i_b.abs() < 1e-12));

    let as_rows: Vec<SweepRecord> = parse(&infocomp(&["sweep", "--family", "as"]).stdout);
    assert!(as_rows.iter().all(|r| r.i_corr.abs() < 1e-10));
    assert!(as_rows
        .windows(2)
        .all(|w| w[0].entropy_total <= w[1].entropy_total + 1e-12));
}

#[test]
fn figure_tables_and_sidecars() {
    let dir = tempdir().unwrap();

    let pure = dir.path().join("pure.csv");
    assert!(
        infocomp(&["figure", "pure", "--out", pure.to_str().unwrap()])
            .status
            .success()
    );
    let rows: Vec<SweepRecord> = read(&pure);
    let bell = rows.last().unwrap();
    assert!((bell.param - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    assert!((bell.i_corr - 2.0).abs() < 1e-9);
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(sidecar_path(&pure)).unwrap()).unwrap();
    assert_eq!(meta["figure"], "pure");
    assert_eq!(meta["grid"], 101);
    assert!(meta["tool_version"].is_string());

    let dephased = dir.path().join("dephased.csv");
    assert!(infocomp(&[
        "figure",
        "dephased",
        "--grid",
        "21",
        "--out",
        dephased.to_str().unwrap()
    ])
    .status
    .success());
    let rows: Vec<SweepRecord> = read(&dephased);
    let near_zero: Vec<_> = rows
        .iter()
        .filter(|r| r.family == "d" && r.param < 1e-9)
        .collect();
    assert_eq!(near_zero.len(), 5);
    assert!(near_zero.iter().all(|r| r.i_local.abs() < 1e-12));
    assert_recomputes(&rows);

    for id in ["werner_mems", "product", "linear"] {
        let path = dir.path().join(format!("{id}.csv"));
        assert!(infocomp(&[
            "figure",
            id,
            "--grid",
            "11",
            "--out",
            path.to_str().unwrap()
        ])
        .status
        .success());
        assert_recomputes(&read(&path));
    }
}

#[test]
fn plane_figure_has_frontier_at_one_bit() {
    let dir = tempdir().unwrap();
    let plane = dir.path().join("plane.csv");
    let args = [
        "figure",
        "plane",
        "--grid",
        "11",
        "--frontier-grid",
        "3",
        "--out",
        plane.to_str().unwrap(),
    ];
    assert!(infocomp(&args).status.success());
    let rows: Vec<PlaneRow> = read(&plane);
    let frontier: Vec<_> = rows.iter().filter(|r| r.series == "frontier").collect();
    assert_eq!(frontier.len(), 3);
    let mid = frontier
        .iter()
        .find(|r| (r.entropy - 1.0).abs() < 1e-12)
        .unwrap();
    assert!((mid.tangle - 0.48).abs() <= 0.01, "{mid:?}");
    for series in ["pure", "werner", "mems", "as1", "as2", "s"] {
        assert!(rows.iter().any(|r| r.series == series), "{series}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let path = dir.path().join(name);
        let mut args: Vec<&str> = extra.to_vec();
        args.extend(["--out", path.to_str().unwrap()]);
        let out = infocomp(&args);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        (
            std::fs::read(&path).unwrap(),
            std::fs::read(sidecar_path(&path)).unwrap(),
        )
    };
    let plane = [
        "figure",
        "plane",
        "--grid",
        "7",
        "--frontier-grid",
        "3",
        "--restarts",
        "4",
        "--seed",
        "5",
    ];
    assert_eq!(run("a.csv", &plane), run("b.csv", &plane));
    let tomo = [
        "tomo",
        "--family",
        "werner",
        "--param",
        "0.9",
        "--shots",
        "1000",
        "--resamples",
        "8",
        "--seed",
        "3",
    ];
    assert_eq!(run("c.csv", &tomo), run("d.csv", &tomo));
}

#[test]
fn frontier_command_reports_argmax_correlations() {
    let out = infocomp(&["frontier", "--grid", "3", "--restarts", "8"]);
    assert!(out.status.success());
    let rows: Vec<FrontierRow> = parse(&out.stdout);
    assert_eq!(rows.len(), 3);
    assert!((rows[0].max_tangle - 1.0).abs() < 1e-6);
    assert!((rows[1].i_corr - 0.94).abs() <= 0.01, "{:?}", rows[1]);
    assert!(rows[2].max_tangle.abs() < 1e-6);
    assert!(rows.iter().all(|r| r.converged));
}

#[test]
fn tomo_run_lands_near_ideal_werner() {
    let dir = tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    let out = infocomp(&[
        "tomo",
        "--family",
        "werner",
        "--param",
        "0.872",
        "--shots",
        "1000000",
        "--resamples",
        "40",
        "--counts",
        counts.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows: Vec<TomoRow> = parse(&out.stdout);
    let t = rows.iter().find(|r| r.measure == "tangle").unwrap();
    let c: f64 = (3.0 * 0.872 - 1.0) / 2.0;
    assert!((t.ideal - c * c).abs() < 1e-9);
    assert!((t.mean - t.ideal).abs() <= 3.0 * t.std, "{t:?}");
    let records = infocomp::tomo::read_counts_csv(std::fs::File::open(&counts).unwrap()).unwrap();
    assert_eq!(records.len(), 9);
}

#[test]
fn zero_shots_is_a_usage_error() {
    let out = infocomp(&[
        "tomo", "--family", "werner", "--param", "0.9", "--shots", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shots"));
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(
        infocomp(&["sweep", "--family", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        infocomp(&["sweep", "--family", "pure", "--grid", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        infocomp(&["state", "--family", "mems", "--param", "0.2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        infocomp(&["verify", "--samples", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_passes_and_catches_injected_fault() {
    let healthy = infocomp(&["verify", "--samples", "300"]);
    assert_eq!(healthy.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = String::from_utf8(healthy.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let summary = lines.last().unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(
        summary["checks"].as_u64().unwrap() as usize,
        lines.len() - 1
    );

    let faulty = infocomp(&[
        "verify",
        "--samples",
        "300",
        "--inject-fault",
        "skip-psd-projection",
    ]);
    assert_eq!(faulty.status.code(), Some(1));
    let report = String::from_utf8(faulty.stdout).unwrap();
    let failed: Vec<serde_json::Value> = report
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v["passed"] == false && v.get("check").is_some())
        .collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(
        failed[0]["check"],
        "tomography_mutual_information_nonnegative"
    );
}

#[test]
fn state_prints_validated_json() {
    let out = infocomp(&[
        "state",
        "--family",
        "d",
        "--param",
        "0.3",
        "--exponent",
        "2",
    ]);
    assert!(out.status.success());
    let rho: infocomp::DensityMatrix = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rho.dim(), 4);
}
