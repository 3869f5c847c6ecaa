//! Result bundles: delimited tables, binary records and a JSON manifest.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::serialize_config;
use super::records::encode_fields;
use crate::analysis::PhaseFlip;
use crate::dynamics::{Advisory, Grid};
use crate::error::{Error, Result};
use crate::scenarios::{ImprintRecord, ScenarioConfig, ScenarioResult, SweepTable};

/// SHA-256 of the canonical text of `cfg`.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    hex::encode(Sha256::digest(serialize_config(cfg).as_bytes()))
}

/// Header row plus data rows, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for r in &self.rows {
            w.write_record(r).expect("writing to memory");
        }
        w.into_inner().expect("writing to memory")
    }
}

/// Shortest text that reads back as the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    ryu::Buffer::new().format(x).to_string()
}

/// Grid time with accumulated rounding removed, for labels and columns.
pub fn time_label(t: f64) -> String {
    num((t * 1e9).round() / 1e9)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    /// One entry per configuration run, in run order.
    pub config_hashes: Vec<String>,
    pub grids: Vec<Grid>,
    pub runtime_seconds: f64,
    pub tables: Vec<String>,
    pub records: Vec<String>,
    pub advisories: Vec<String>,
    /// Sweep rows or runs that failed, with their diagnostics.
    pub failures: Vec<String>,
}

impl Manifest {
    pub fn new(configs: &[&ScenarioConfig]) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hashes: configs.iter().map(|c| config_hash(c)).collect(),
            grids: Vec::new(),
            runtime_seconds: 0.0,
            tables: Vec::new(),
            records: Vec::new(),
            advisories: Vec::new(),
            failures: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub manifest: Manifest,
    pub tables: Vec<Table>,
    /// `(name, bytes)` binary records.
    pub records: Vec<(String, Vec<u8>)>,
}

impl ResultBundle {
    pub fn new(manifest: Manifest) -> Self {
        ResultBundle { manifest, tables: Vec::new(), records: Vec::new() }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn extend(&mut self, other: ResultBundle) {
        self.manifest.config_hashes.extend(other.manifest.config_hashes);
        self.manifest.grids.extend(other.manifest.grids);
        self.manifest.advisories.extend(other.manifest.advisories);
        self.manifest.failures.extend(other.manifest.failures);
        self.tables.extend(other.tables);
        self.records.extend(other.records);
    }
}

/// Writes `<name>.csv` per table, `<name>.bin` per record and
/// `manifest.json` into `dir`, creating it if needed.
pub fn write_results(bundle: &ResultBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for t in &bundle.tables {
        put(format!("{}.csv", t.name), &t.to_csv())?;
    }
    for (name, bytes) in &bundle.records {
        put(format!("{name}.bin"), bytes)?;
    }
    let mut manifest = bundle.manifest.clone();
    manifest.tables = bundle.tables.iter().map(|t| format!("{}.csv", t.name)).collect();
    manifest.records = bundle.records.iter().map(|(n, _)| format!("{n}.bin")).collect();
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    put("manifest.json".into(), &json)?;
    Ok(written)
}

fn advisory_text(a: &Advisory) -> String {
    match a {
        Advisory::GridTooCoarse { trace_drift } => {
            format!("trace drift {trace_drift:.3e} exceeds advisory level; consider finer steps")
        }
    }
}

fn imprint_label(k: usize, n_events: usize, r: &ImprintRecord) -> String {
    if k < n_events {
        format!("after_event_{k}")
    } else {
        format!("t_{}", time_label(r.snapshot.time))
    }
}

/// Tables for a single scenario run, prefixed with `prefix`.
pub fn scenario_bundle(cfg: &ScenarioConfig, res: &ScenarioResult, prefix: &str) -> ResultBundle {
    let mut manifest = Manifest::new(&[cfg]);
    manifest.grids.push(res.grid);
    manifest.advisories = res.advisories.iter().map(advisory_text).collect();
    let mut bundle = ResultBundle::new(manifest);
    let name = |s: &str| if prefix.is_empty() { s.to_string() } else { format!("{prefix}_{s}") };

    let mut imprints = Table::new(
        name("imprints"),
        &[
            "label",
            "t_tau_a",
            "status",
            "center_kappa_x",
            "fwhm_kappa_x",
            "peak_rho22",
            "peak_abs_rho12",
            "phase_sign",
        ],
    );
    let n_events = res.imprints.len();
    for (k, r) in res.imprints.iter().chain(&res.snapshots).enumerate() {
        let label = imprint_label(k, n_events, r);
        let time = time_label(r.snapshot.time);
        let row = match &r.outcome {
            Ok(c) => vec![
                label,
                time,
                "found".into(),
                num(c.center),
                num(c.width_fwhm),
                num(c.peak_population),
                num(c.peak_coherence),
                c.phase_sign.to_string(),
            ],
            Err(e) => {
                let status = match e {
                    crate::analysis::ImprintNotFound::PushedOut => "pushed_out",
                    crate::analysis::ImprintNotFound::Absent { .. } => "absent",
                };
                let mut row = vec![label, time, status.into()];
                row.extend(std::iter::repeat_n("NaN".to_string(), 5));
                row
            }
        };
        imprints.push(row);
    }
    bundle.tables.push(imprints);

    let mut obs = Table::new(name("observables"), &["quantity", "value"]);
    let mut add = |k: &str, v: f64| obs.push(vec![k.to_string(), num(v)]);
    add("theta13_in_over_pi", res.input_areas.0 / PI);
    add("theta23_in_over_pi", res.input_areas.1 / PI);
    add("theta13_out_over_pi", res.output_areas.0 / PI);
    add("theta23_out_over_pi", res.output_areas.1 / PI);
    if let Some(d) = &res.displacement {
        add("displacement_kappa", d.delta);
        add("predicted_displacement_kappa", d.predicted);
        add("flipped", d.flip.map_or(f64::NAN, |f| f64::from(u8::from(f == PhaseFlip::Flipped))));
        add("pushed_out", f64::from(u8::from(d.pushed_out)));
    }
    if let Some(r) = &res.retrieval {
        add("steps", r.steps as f64);
        add("eta", r.eta);
        add("r", r.r);
        add("output_inverted", f64::from(u8::from(r.phase == crate::scenarios::OutputPhase::Inverted)));
    }
    let d = &res.diagnostics;
    add("max_trace_drift", d.max_trace_drift);
    add("max_purity_drift", d.max_purity_drift);
    add("max_cauchy_schwarz_excess", d.max_cauchy_schwarz_excess);
    bundle.tables.push(obs);

    let snaps: Vec<&ImprintRecord> = res.imprints.iter().chain(&res.snapshots).collect();
    if let Some(first) = snaps.first() {
        let mut header = vec!["kappa_x".to_string()];
        for (k, r) in snaps.iter().enumerate() {
            let l = imprint_label(k, n_events, r);
            for q in ["rho11", "rho22", "re_rho12", "im_rho12"] {
                header.push(format!("{q}_{l}"));
            }
        }
        let mut profiles = Table { name: name("profiles"), header, rows: Vec::new() };
        for (i, &z) in first.snapshot.z.iter().enumerate() {
            let mut row = vec![num(z)];
            for r in &snaps {
                let s = &r.snapshot;
                row.extend([num(s.rho11[i]), num(s.rho22[i]), num(s.rho12[i].re), num(s.rho12[i].im)]);
            }
            profiles.push(row);
        }
        bundle.tables.push(profiles);
    }

    if let Some(a) = &res.areas {
        let mut t = Table::new(
            name("areas"),
            &["kappa_x", "theta13_over_pi", "theta23_over_pi", "theta_tot_over_pi"],
        );
        for i in 0..a.z.len() {
            t.push(vec![
                num(a.z[i]),
                num(a.theta13[i] / PI),
                num(a.theta23[i] / PI),
                num(a.theta_tot[i] / PI),
            ]);
        }
        bundle.tables.push(t);
    }
    if cfg.retain_fields {
        if let Some(f) = &res.propagation.fields {
            bundle.records.push((name("fields"), encode_fields(f)));
        }
    }
    bundle
}

/// One table per sweep: the swept value against the measured observable.
///
/// Storage sweeps have the two columns `<axis>, kappa_x1`; displacement sweeps
/// add the phase flip and push-out flags.
pub fn sweep_bundle(cfg: &ScenarioConfig, table: &SweepTable, name: &str) -> ResultBundle {
    let mut bundle = ResultBundle::new(Manifest::new(&[cfg]));
    let (col, scale) = table.axis.column();
    let storage = table.axis.is_storage();
    let mut t = if storage {
        Table::new(name, &[col, "kappa_x1"])
    } else {
        Table::new(name, &[col, "delta_kappa", "flipped", "pushed_out"])
    };
    for row in &table.rows {
        let v = num(row.value * scale);
        match &row.outcome {
            Ok(p) if storage => t.push(vec![v, num(p.location)]),
            Ok(p) => t.push(vec![
                v,
                num(p.displacement.unwrap_or(f64::NAN)),
                p.flipped.map_or("NaN".into(), |f| u8::from(f).to_string()),
                u8::from(p.pushed_out).to_string(),
            ]),
            Err(e) => {
                bundle.manifest.failures.push(format!("{name} at {v}: {e}"));
                let mut r = vec![v, "NaN".into()];
                if !storage {
                    r.extend(["NaN".into(), "NaN".into()]);
                }
                t.push(r);
            }
        }
    }
    bundle.tables.push(t);
    bundle
}

/// Table I layout: `case, steps, eta, r`.
pub fn retrieval_table(
    name: &str,
    runs: &[(&ScenarioConfig, std::result::Result<ScenarioResult, String>)],
) -> ResultBundle {
    let configs: Vec<&ScenarioConfig> = runs.iter().map(|(c, _)| *c).collect();
    let mut bundle = ResultBundle::new(Manifest::new(&configs));
    let mut t = Table::new(name, &["case", "steps", "eta", "r"]);
    for (cfg, res) in runs {
        let steps = cfg.sequence.len() - 1;
        match res.as_ref().map(|r| (r.retrieval, r.grid)) {
            Ok((Some(rep), grid)) => {
                bundle.manifest.grids.push(grid);
                t.push(vec![cfg.case.name().into(), steps.to_string(), num(rep.eta), num(rep.r)]);
            }
            Ok((None, _)) => unreachable!("retrieval runs always report"),
            Err(e) => {
                bundle.manifest.failures.push(format!("{} {steps} steps: {e}", cfg.case.name()));
                t.push(vec![cfg.case.name().into(), steps.to_string(), "NaN".into(), "NaN".into()]);
            }
        }
    }
    bundle.tables.push(t);
    bundle
}
