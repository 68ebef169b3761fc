use std::process::Command;

fn bench(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_plate-bench"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn small_sweep_is_deterministic() {
    let args = ["--n", "6", "--dt", "0.25", "--t-list", "1,2,4"];
    let first = bench(&args);
    assert!(first.status.success());
    let second = bench(&args);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn single_horizon_has_no_rates() {
    let out = bench(&[
        "--scheme", "fem", "--n", "5", "--t-list", "2", "--format", "json",
    ]);
    assert!(out.status.success());
    let table =
        plate_bench::table::parse_json_table(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert!(table.rows[0].unorm_rate.is_none());
    assert!(table.rows[0].unorm > 0.0);
}

#[test]
fn bad_configuration_exits_with_two() {
    for args in [
        &["--scheme", "spectral"][..],
        &["--dt", "-1"][..],
        &["--n", "0"][..],
        &["--t-list", "2^a..2^3"][..],
        &["--init", "v0=sin(;w0=0"][..],
    ] {
        let out = bench(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn missing_mesh_files_fail() {
    let out = bench(&[
        "--scheme",
        "fem",
        "--mesh",
        "/nonexistent/nodes",
        "/nonexistent/elements",
    ]);
    assert!(!out.status.success());
}

#[test]
fn writes_table_and_loglog_files() {
    let dir = std::env::temp_dir().join(format!("plate-bench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("table.md");
    let loglog = dir.join("loglog.dat");
    let out = bench(&[
        "--n",
        "4",
        "--t-list",
        "2^1..2^2",
        "--format",
        "markdown",
        "--out",
        table.to_str().unwrap(),
        "--loglog",
        loglog.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&table).unwrap().contains('|'));
    assert_eq!(
        std::fs::read_to_string(&loglog)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count(),
        2
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
