use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use morrey_core::cli::{parse_profile, ProfileDocument};
use morrey_core::{Annulus, MorreyParams, PiecewiseRadialPower, Segment};

const BIN: &str = env!("CARGO_BIN_EXE_morrey");
const COARSE: [&str; 4] = ["--center-grid", "48", "--radius-grid", "96"];

fn morrey(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("MORREY_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> toml::Table {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    toml::from_str(&text).unwrap_or_else(|e| panic!("not TOML: {e}\n{text}"))
}

fn float(t: &toml::Table, dotted: &str) -> f64 {
    let mut v: &toml::Value = &toml::Value::Table(t.clone());
    for part in dotted.split('.') {
        v = &v[part];
    }
    v.as_float().unwrap_or_else(|| panic!("{dotted} is not a float"))
}

fn write_profile(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn norm_of_pure_power() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_profile(
        dir.path(),
        "pure.toml",
        "p = 1.0\nq = 2.0\nd = 1\n[[segments]]\nr_lo = 0.0\nr_hi = inf\ncoeff = 1.0\n",
    );
    let out = morrey(&["norm", &path]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["format_version"].as_integer(), Some(1));
    assert!((float(&r, "closed.value") - 2.0 * 2f64.sqrt()).abs() < 1e-6);
    assert!((float(&r, "numeric.value") - 2.0 * 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn norm_both_methods_agree_on_annulus() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_profile(
        dir.path(),
        "ann.toml",
        "p = 1.0\nq = 2.0\nd = 1\n[[segments]]\nr_lo = 0.25\nr_hi = 1.0\ncoeff = 1.0\n",
    );
    let out = morrey(&["norm", &path, "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(float(&r, "relative_difference") < 1e-3);
    assert_eq!(r["closed"]["method"].as_str(), Some("closed_form"));
    assert_eq!(r["numeric"]["method"].as_str(), Some("offcenter_search"));

    let closed_only = report(&morrey(&["norm", &path, "--method", "closed"]));
    assert!(closed_only.get("numeric").is_none());
}

#[test]
fn norm_rejects_bad_documents() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_profile(dir.path(), "empty.toml", "p = 1.0\nq = 2.0\nd = 1\nsegments = []\n");
    let out = morrey(&["norm", &empty]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("segments"));

    let broken = write_profile(dir.path(), "broken.toml", "p = 1.0\nq = = 2.0\n");
    let out = morrey(&["norm", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let overlap = write_profile(
        dir.path(),
        "overlap.toml",
        "p = 1.0\nq = 2.0\nd = 1\n[[segments]]\nr_lo = 0.0\nr_hi = 1.0\ncoeff = 1.0\n\
         [[segments]]\nr_lo = 0.5\nr_hi = 2.0\ncoeff = 1.0\n",
    );
    assert_eq!(morrey(&["norm", &overlap]).status.code(), Some(2));
    assert_eq!(morrey(&["norm", "/nonexistent/profile.toml"]).status.code(), Some(2));
}

#[test]
fn norm_flags_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    // Outer tail only: the centered objective keeps growing toward its limit.
    let path = write_profile(
        dir.path(),
        "tail.toml",
        "p = 1.0\nq = 2.0\nd = 1\n[[segments]]\nr_lo = 1.0\nr_hi = inf\ncoeff = 1.0\n",
    );
    assert_eq!(morrey(&["norm", &path, "--method", "numeric"]).status.code(), Some(3));
}

#[test]
fn witness_defaults_pass() {
    let out = morrey(&["witness"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"].as_str(), Some("PASS"));
    assert_eq!(r["n"].as_integer(), Some(3));
    assert!(float(&r, "min_signed_norm") > 2.7);
    assert_eq!(float(&r, "threshold"), 3.0 * 0.9);
    assert_eq!(r["pattern"].as_table().unwrap().len(), 4);
    assert!((float(&r, "epsilon") - 0.005).abs() < 1e-12);
}

#[test]
fn witness_rejects_invalid_flags() {
    assert_eq!(morrey(&["witness", "--n", "1"]).status.code(), Some(2));
    assert_eq!(morrey(&["witness", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(morrey(&["witness", "--p", "2", "--q", "1"]).status.code(), Some(2));
    assert_eq!(morrey(&["witness", "--epsilon", "0.5"]).status.code(), Some(2));
    assert_eq!(morrey(&["witness", "--bogus"]).status.code(), Some(2));
    assert_eq!(morrey(&["witness", "--center-grid", "0"]).status.code(), Some(2));
}

#[test]
fn constants_ladder_rows() {
    let mut args = vec!["constants", "--n", "3", "--deltas", "0.3,0.1,0.01"];
    args.extend(COARSE);
    let out = morrey(&args);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let rows = r["row"].as_table().unwrap();
    assert_eq!(rows.len(), 3);
    let last = rows["2"].as_array().unwrap();
    assert_eq!(last[0].as_float(), Some(0.01));
    assert!(float(&r, "james_lower_bound") >= 2.97);
    assert!(float(&r, "von_neumann_jordan_lower_bound") >= 3.0 * 0.99 * 0.99);
    assert!(float(&r, "james_lower_bound") <= 3.0);
}

#[test]
fn constants_for_pairs_approach_two() {
    let mut args = vec!["constants", "--n", "2", "--deltas", "0.1,0.01,0.001"];
    args.extend(COARSE);
    let r = report(&morrey(&args));
    let j = float(&r, "james_lower_bound");
    let nj = float(&r, "von_neumann_jordan_lower_bound");
    assert!(j > 2.0 * 0.999 && j <= 2.0, "{j}");
    assert!(nj > 2.0 * 0.999 * 0.999 && nj <= 2.0, "{nj}");
}

#[test]
fn constants_reject_empty_or_unordered_deltas() {
    assert_eq!(morrey(&["constants", "--deltas"]).status.code(), Some(2));
    assert_eq!(morrey(&["constants", "--deltas", "0.1,0.3"]).status.code(), Some(2));
}

#[test]
fn epsilon_sweep_respects_chunk_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("eps.csv");
    let out = morrey(&[
        "sweep", "--vary", "epsilon", "--n", "2", "--delta", "0.3", "--from", "1e-4", "--to", "0.08",
        "--steps", "6", "--log", "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&out_path);
    assert_eq!(header, "epsilon,theoretical_lower_bound,min_signed_norm,nj_ratio");
    assert_eq!(rows.len(), 6);
    for row in rows {
        let bound = 2.0 * (1.0 - row[0].sqrt());
        assert!(row[2] >= bound, "eps {}: {} < {bound}", row[0], row[2]);
        assert!(row[2] >= row[1] * (1.0 - 1e-6));
    }
}

#[test]
fn single_point_sweep_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("one.csv");
    let out = morrey(&[
        "sweep", "--vary", "q", "--from", "3", "--to", "3", "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out_path);
    assert!(header.starts_with("q,"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 3.0);
}

#[test]
fn delta_sweep_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("delta.csv");
    let out = morrey(&[
        "sweep", "--vary", "delta", "--n", "3", "--from", "0.4", "--to", "0.005", "--steps", "7",
        "--log", "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&out_path);
    assert_eq!(rows.len(), 7);
    for w in rows.windows(2) {
        assert!(w[1][0] < w[0][0]);
        assert!(w[1][2] >= w[0][2], "{:?} then {:?}", w[0], w[1]);
    }
}

#[test]
fn sweep_rejects_bad_ranges_and_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.csv");
    let p = out_path.to_str().unwrap();
    assert_eq!(morrey(&["sweep", "--vary", "epsilon", "--from", "0.5", "--out", p]).status.code(), Some(2));
    assert_eq!(morrey(&["sweep", "--vary", "delta", "--from", "1.5", "--out", p]).status.code(), Some(2));
    assert_eq!(morrey(&["sweep", "--vary", "q", "--from", "0.5", "--out", p]).status.code(), Some(2));
    assert!(!out_path.exists());
    let missing = dir.path().join("no/such/dir/x.csv");
    let out = morrey(&["sweep", "--vary", "q", "--steps", "1", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(BIN)
            .args(["sweep", "--vary", "delta", "--n", "3", "--steps", "3", "--out"])
            .arg(&path)
            .env("MORREY_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn bad_thread_count_is_input_error() {
    let out = Command::new(BIN)
        .arg("witness")
        .env("MORREY_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_compare_default_and_off_center() {
    let out = morrey(&["oracle-compare", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["agreement"].as_str(), Some("PASS"));
    assert_eq!(r["monotone_profile"].as_bool(), Some(true));
    assert!(float(&r, "relative_difference") < 1e-3);

    let dir = tempfile::tempdir().unwrap();
    let ring = write_profile(
        dir.path(),
        "ring.toml",
        "p = 1.0\nq = 4.0\nd = 2\n[[segments]]\nr_lo = 0.95\nr_hi = 1.0\ncoeff = 1.0\n",
    );
    let r = report(&morrey(&["oracle-compare", &ring]));
    assert_eq!(r["monotone_profile"].as_bool(), Some(false));
    assert!(float(&r, "numeric.value") > float(&r, "closed.value"));
    assert!(float(&r, "montecarlo.z_score").abs() < 3.0);
}

#[test]
fn witness_report_is_deterministic() {
    let a = morrey(&["witness", "--n", "4", "--d", "2"]);
    let b = morrey(&["witness", "--n", "4", "--d", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

fn any_profile() -> impl Strategy<Value = PiecewiseRadialPower> {
    (
        (1.0f64..3.0, 0.01f64..5.0, 1usize..=5),
        prop::bool::ANY,
        prop::collection::vec((0.0f64..1.0, 1e-6f64..10.0, -1e3f64..1e3), 1..6),
        prop::bool::ANY,
    )
        .prop_map(|((p, gap, d), at_zero, segs, unbounded)| {
            let params = MorreyParams::new(p, p + gap, d).unwrap();
            let mut r = if at_zero { 0.0 } else { 1e-3 };
            let count = segs.len();
            let mut out = Vec::new();
            for (i, (skip, width, c)) in segs.into_iter().enumerate() {
                let lo = if i == 0 { r } else { r + skip };
                let hi = if unbounded && i + 1 == count { f64::INFINITY } else { lo + width };
                out.push(Segment::new(Annulus::new(lo, hi).unwrap(), c));
                r = hi;
            }
            PiecewiseRadialPower::new(params, out).unwrap()
        })
}

proptest! {
    #![proptest_config(Config {
        cases: 256,
        rng_seed: RngSeed::Fixed(11),
        failure_persistence: None,
        ..Config::default()
    })]

    #[test]
    fn profile_documents_round_trip(profile in any_profile()) {
        let text = ProfileDocument::from_profile(&profile).to_toml();
        let again = parse_profile(&text).unwrap();
        prop_assert_eq!(again, profile);
    }
}
