use std::fs;

use lambda_imprint::io::records::decode_fields;
use lambda_imprint::io::{num, parse_config, run_bundle, serialize_config, sweep_bundle_for, write_results};
use proptest::prelude::*;

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

[output]
retain_fields = true
"#;

#[test]
fn storage_run_writes_tables_record_and_manifest() {
    let cfg = parse_config(STORAGE).unwrap();
    let bundle = run_bundle(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = write_results(&bundle, dir.path()).unwrap();
    assert!(written.iter().all(|p| p.exists()));

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hashes"].as_array().unwrap().len(), 1);
    assert!(manifest["tables"].as_array().unwrap().iter().any(|t| t == "imprints.csv"));

    let imprints = fs::read_to_string(dir.path().join("imprints.csv")).unwrap();
    let row: Vec<&str> = imprints.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "found");
    assert!((row[3].parse::<f64>().unwrap() - 2.5).abs() < 0.1);

    let record = decode_fields(&fs::read(dir.path().join("fields.bin")).unwrap()).unwrap();
    assert_eq!(record.nz(), 301);
    assert_eq!(record.nt(), bundle.manifest.grids[0].nt());
}

#[test]
fn sweep_bundle_has_one_row_per_value() {
    let text = format!("{STORAGE}\n[sweep]\ncontrol_area_rad = [0.5, 0.1]\n");
    let cfg = parse_config(&text).unwrap();
    let bundle = sweep_bundle_for(&cfg).unwrap();
    let table = bundle.table("sweep_sech_ideal").unwrap();
    assert_eq!(table.header, ["theta23_over_pi", "kappa_x1"].map(String::from));
    assert_eq!(table.rows.len(), 2);
    assert!(bundle.manifest.failures.is_empty());
}

#[test]
fn serialized_form_is_stable() {
    let cfg = parse_config(STORAGE).unwrap();
    let text = serialize_config(&cfg);
    assert_eq!(serialize_config(&parse_config(&text).unwrap()), text);
}

proptest! {
    #[test]
    fn numbers_read_back_exactly(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }
}

#[test]
fn shipped_configs_parse_and_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = parse_config(&fs::read_to_string(&path).unwrap()).unwrap();
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 2);
}
