//! End-to-end tests of the `hboltz` binary: exit codes, cache lifecycle,
//! CSV output and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn hboltz(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hboltz"))
        .args(args)
        .current_dir(dir)
        .env_remove("HBOLTZ_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn info_reports_index_sizes_and_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = hboltz(&["info", "--m", "20", "--m0", "10"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1771"), "missing N_20: {text}");
    assert!(text.contains("0.1743"), "missing memory figure: {text}");
    assert!(
        text.contains("tau_s(eta = 5) = 1.000000"),
        "missing tau_s: {text}"
    );
}

#[test]
fn assemble_run_cache_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--eta",
        "5",
        "--m",
        "6",
        "--m0",
        "4",
        "--t-end",
        "0.1",
        "--experiment",
        "bkw",
    ];

    // run before assemble: instructive cache-miss failure
    let mut args = vec!["run"];
    args.extend_from_slice(&common);
    let out = hboltz(&args, dir.path());
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("hboltz assemble"));

    // assemble writes a cache, second call hits it
    let mut args = vec!["assemble"];
    args.extend_from_slice(&common);
    let out = hboltz(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(dir.path().join("cache/A_eta5_M4.bin").exists());
    let out = hboltz(&args, dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("cache hit"));

    // run produces the trajectory and marginal CSVs
    let mut args = vec!["run"];
    args.extend_from_slice(&common);
    let out = hboltz(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let trajectory = std::fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    let header = trajectory.lines().next().unwrap();
    assert_eq!(
        header,
        "t,rho,u1,u2,u3,theta,sigma11,sigma12,sigma13,sigma22,sigma23,sigma33,q1,q2,q3,f400,f220"
    );
    assert_eq!(trajectory.lines().count(), 12); // header + t = 0..0.1 in 0.01 steps
    assert!(dir.path().join("out/marginal1d_t0.0000.csv").exists());
    assert!(dir.path().join("out/marginal2d_t0.1000.csv").exists());
    assert!(stdout(&out).contains("max deviation from analytic coefficients"));

    // info reports the tail rate once the cache exists
    let mut args = vec!["info"];
    args.extend_from_slice(&common);
    let out = hboltz(&args, dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("nu_M0 (from cache"), "{}", stdout(&out));

    // cache ls sees the tensor; cache rm removes it
    let out = hboltz(&["cache", "ls", "--cache-dir", "cache"], dir.path());
    assert!(stdout(&out).contains("A_eta5_M4.bin"));
    let out = hboltz(
        &[
            "cache",
            "rm",
            "--eta",
            "5",
            "--m0",
            "4",
            "--cache-dir",
            "cache",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(!dir.path().join("cache/A_eta5_M4.bin").exists());
}

#[test]
fn memory_cap_refusal_cites_the_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let out = hboltz(
        &[
            "assemble",
            "--m",
            "20",
            "--m0",
            "20",
            "--set",
            "memory_cap_gib=16",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("41.3"), "stderr: {}", stderr(&out));
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = hboltz(&["info", "--eta", "2.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = hboltz(&["run", "--m0", "12", "--m", "6"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = hboltz(&["run", "--experiment", "bkw", "--eta", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_code_5() {
    let dir = tempfile::tempdir().unwrap();
    // unreachable quadrature tolerances with no subdivision budget
    let out = hboltz(
        &[
            "assemble",
            "--eta",
            "3.7",
            "--m",
            "4",
            "--m0",
            "2",
            "--set",
            "abs_tol=1e-300",
            "--set",
            "rel_tol=1e-300",
            "--set",
            "max_subdivisions=1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(5), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("did not converge"));
}

#[test]
fn config_subcommand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = hboltz(
        &[
            "config",
            "--eta",
            "3.1",
            "--m",
            "12",
            "--m0",
            "4",
            "--experiment",
            "discontinuous",
            "--set",
            "marginal_times=0.2,0.4",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let config_path = dir.path().join("echo.conf");
    std::fs::write(&config_path, &text).unwrap();
    let out2 = hboltz(&["config", "--config", "echo.conf"], dir.path());
    assert_eq!(text, stdout(&out2), "config round trip changed fields");
    assert!(text.contains("eta = 3.1"));
    assert!(text.contains("marginal_times = 0.2,0.4"));
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--eta",
        "10",
        "--m",
        "6",
        "--m0",
        "3",
        "--t-end",
        "0.2",
        "--experiment",
        "bigaussian",
        "--single-thread",
    ];
    let mut args = vec!["assemble"];
    args.extend_from_slice(&common);
    assert!(hboltz(&args, dir.path()).status.success());

    // a second assembly in a fresh process produces a bit-identical cache
    let mut args2 = vec!["assemble", "--cache-dir", "cache2"];
    args2.extend_from_slice(&common[..common.len() - 1]); // without --single-thread
    assert!(hboltz(&args2, dir.path()).status.success());
    assert_eq!(
        std::fs::read(dir.path().join("cache/A_eta10_M3.bin")).unwrap(),
        std::fs::read(dir.path().join("cache2/A_eta10_M3.bin")).unwrap(),
        "tensor caches differ between processes"
    );

    let mut first: Option<String> = None;
    for out_dir in ["out1", "out2"] {
        let mut args = vec!["run", "--out-dir", out_dir];
        args.extend_from_slice(&common);
        let out = hboltz(&args, dir.path());
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        let table =
            std::fs::read_to_string(dir.path().join(out_dir).join("trajectory.csv")).unwrap();
        match &first {
            None => first = Some(table),
            Some(reference) => assert_eq!(reference, &table, "trajectories differ between runs"),
        }
    }
}

#[test]
fn custom_coefficient_file_experiment() {
    let dir = tempfile::tempdir().unwrap();
    // shear-only normalized initial state
    std::fs::write(
        dir.path().join("init.csv"),
        "# k1,k2,k3,value\n0,0,0,1.0\n1,1,0,0.3\n",
    )
    .unwrap();
    let common = ["--eta", "5", "--m", "4", "--m0", "4", "--t-end", "0.1"];
    let mut args = vec!["assemble"];
    args.extend_from_slice(&common);
    assert!(hboltz(&args, dir.path()).status.success());
    let mut args = vec![
        "run",
        "--experiment",
        "file:init.csv",
        "--model",
        "quadratic",
    ];
    args.extend_from_slice(&common);
    let out = hboltz(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let table = std::fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    let second_line = table.lines().nth(1).unwrap();
    // sigma12 column carries the initial shear
    assert!(
        second_line.contains("3.000000000000e-1"),
        "row: {second_line}"
    );

    // a non-normalized file is rejected as a config-class error
    std::fs::write(dir.path().join("bad.csv"), "0,0,0,2.0\n").unwrap();
    let mut args = vec!["run", "--experiment", "file:bad.csv"];
    args.extend_from_slice(&common);
    let out = hboltz(&args, dir.path());
    assert!(!out.status.success());
}

#[test]
fn discontinuous_run_reports_scaled_time() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--eta",
        "3.1",
        "--m",
        "6",
        "--m0",
        "4",
        "--t-end",
        "0.05",
        "--experiment",
        "discontinuous",
    ];
    let mut args = vec!["assemble"];
    args.extend_from_slice(&common);
    assert!(hboltz(&args, dir.path()).status.success());
    let mut args = vec!["run"];
    args.extend_from_slice(&common);
    let out = hboltz(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("tau_s = 1.360170"));
    let table = std::fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    let header = table.lines().next().unwrap();
    assert!(header.ends_with(",t_scaled"), "header: {header}");
    // t_scaled = t / tau_s
    let last = table.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    let t: f64 = fields[0].parse().unwrap();
    let t_scaled: f64 = fields[fields.len() - 1].parse().unwrap();
    assert!((t_scaled - t / 1.36017).abs() < 1e-4);
}

#[test]
fn cache_dir_env_override_applies() {
    let dir = tempfile::tempdir().unwrap();
    let alt = dir.path().join("alt_cache");
    let out = Command::new(env!("CARGO_BIN_EXE_hboltz"))
        .args(["assemble", "--eta", "5", "--m", "4", "--m0", "2"])
        .current_dir(dir.path())
        .env("HBOLTZ_CACHE_DIR", &alt)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(alt.join("A_eta5_M2.bin").exists());
    assert!(!dir.path().join("cache").exists());
}
