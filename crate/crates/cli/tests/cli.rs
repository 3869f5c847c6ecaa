use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const STORAGE: &str = r#"
[scenario]
case = "sech_ideal"
kind = "storage"

[medium]
length_inv_kappa_a = 6.0

[[sequence]]
type = "targeted_pair"
x1_inv_kappa_a = 2.5
signal_area_rad = 6.283185307179586
duration_tau_a = 1.0
center_tau_a = 0.0
"#;

fn cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambda-imprint")).args(args).current_dir(cwd).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn run_writes_bundle_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("storage.toml"), STORAGE).unwrap();
    for out in ["a", "b"] {
        let o = cli(&["run", "storage.toml", "--out", out], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for table in ["imprints.csv", "observables.csv", "profiles.csv"] {
        let a = fs::read(dir.path().join("a").join(table));
        assert!(a.is_ok(), "{table} missing");
        assert_eq!(a.unwrap(), fs::read(dir.path().join("b").join(table)).unwrap(), "{table}");
    }
    assert!(dir.path().join("a/manifest.json").exists());
    assert!(!dir.path().join("a/fields.bin").exists());

    let o = cli(&["run", "storage.toml", "--out", "c", "--retain-fields", "--dt", "0.04"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("c/areas.csv").exists());
    assert!(dir.path().join("c/fields.bin").exists());
    let manifest = fs::read_to_string(dir.path().join("c/manifest.json")).unwrap();
    assert!(manifest.contains("\"dt\": 0.04"), "{manifest}");
}

#[test]
fn output_directory_defaults_to_config_then_results() {
    let dir = tempfile::tempdir().unwrap();
    let with_dir = format!("{STORAGE}\n[output]\ndir = \"from_config\"\n");
    fs::write(dir.path().join("a.toml"), with_dir).unwrap();
    fs::write(dir.path().join("b.toml"), STORAGE).unwrap();
    assert_eq!(code(&cli(&["run", "a.toml"], dir.path())), 0);
    assert_eq!(code(&cli(&["run", "b.toml"], dir.path())), 0);
    assert!(dir.path().join("from_config/manifest.json").exists());
    assert!(dir.path().join("results/manifest.json").exists());
}

#[test]
fn sweep_subcommand_tabulates_rows() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{STORAGE}\n[sweep]\ncontrol_area_rad = [0.5, 0.2]\n");
    fs::write(dir.path().join("s.toml"), text).unwrap();
    let o = cli(&["sweep", "s.toml", "--out", "out", "--workers", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(dir.path().join("out/sweep_sech_ideal.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.starts_with("theta23_over_pi,kappa_x1\n"));
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cli(&["run", "missing.toml"], dir.path())), 1);
    assert_eq!(code(&cli(&["reproduce", "fig9"], dir.path())), 1);
    assert_eq!(code(&cli(&["frobnicate"], dir.path())), 1);
    assert_eq!(code(&cli(&[], dir.path())), 1);

    fs::write(dir.path().join("unknown.toml"), format!("{STORAGE}\n[grid]\nbogus = 1\n")).unwrap();
    let o = cli(&["run", "unknown.toml"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));

    let empty = STORAGE.split("[[sequence]]").next().unwrap();
    fs::write(dir.path().join("empty.toml"), empty).unwrap();
    let o = cli(&["run", "empty.toml"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least one pulse event"));

    fs::write(dir.path().join("nosweep.toml"), STORAGE).unwrap();
    assert_eq!(code(&cli(&["sweep", "nosweep.toml"], dir.path())), 1);
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("storage.toml"), STORAGE).unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    let o = cli(&["run", "storage.toml", "--out", "blocker/out"], dir.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_and_version_exit_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cli(&["--help"], dir.path())), 0);
    let o = cli(&["--version"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
}
