//! Configuration documents, result bundles and the experiment runners used
//! by the command line.

mod bundle;
mod config;
pub mod records;

use rayon::prelude::*;

pub use bundle::{
    config_hash, num, retrieval_table, scenario_bundle, sweep_bundle, time_label, write_results, Manifest,
    ResultBundle, Table,
};
pub use config::{
    parse_config, parse_document, serialize_config, ConfigDocument, EventEntry, GridSection, MediumSection,
    OutputSection, PairEntry, PulseEntry, ScenarioSection, SnapshotSection, SweepSection,
    TargetedControlEntry, TargetedPairEntry, ThresholdSection,
};

use crate::error::{Error, Result};
use crate::scenarios::figures::{figure_axis, figure_configs, FigureId};
use crate::scenarios::{run_scenario, run_sweep, ScenarioConfig};

/// Command-line adjustments applied on top of a configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub workers: Option<usize>,
    pub dt: Option<f64>,
    pub dz: Option<f64>,
    pub retain_fields: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(dt) = self.dt {
            cfg.steps.dt = dt;
        }
        if let Some(dz) = self.dz {
            cfg.steps.dz = dz;
        }
        cfg.retain_fields |= self.retain_fields;
    }
}

/// Runs a single scenario and tabulates it.
pub fn run_bundle(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    let res = run_scenario(cfg)?;
    Ok(scenario_bundle(cfg, &res, ""))
}

/// Runs the configuration's sweep. Failed rows are recorded in the manifest
/// and appear as `NaN` in the table.
pub fn sweep_bundle_for(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    let table = run_sweep(cfg)?;
    Ok(sweep_bundle(cfg, &table, &format!("sweep_{}", cfg.case.name())))
}

/// Built-in configurations for `id` with `overrides` applied.
pub fn reproduce_configs(id: FigureId, overrides: &Overrides) -> Vec<ScenarioConfig> {
    let mut cfgs = figure_configs(id);
    for c in &mut cfgs {
        overrides.apply(c);
    }
    cfgs
}

/// Runs every configuration behind a figure or table.
pub fn reproduce(id: FigureId, overrides: &Overrides) -> Result<ResultBundle> {
    let cfgs = reproduce_configs(id, overrides);
    let mut out: Option<ResultBundle> = None;
    let mut merge = |b: ResultBundle| match out.as_mut() {
        Some(o) => o.extend(b),
        None => out = Some(b),
    };
    if figure_axis(id).is_some() {
        for cfg in &cfgs {
            let table = run_sweep(cfg)?;
            merge(sweep_bundle(cfg, &table, &format!("{id}_{}", cfg.case.name())));
        }
    } else if id == FigureId::Table1 {
        let workers = cfgs.first().map_or(1, |c| c.workers);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        let results: Vec<_> =
            pool.install(|| cfgs.par_iter().map(|c| run_scenario(c).map_err(|e| e.to_string())).collect());
        let runs: Vec<_> = cfgs.iter().zip(results).collect();
        merge(retrieval_table(id.name(), &runs));
    } else {
        for cfg in &cfgs {
            let res = run_scenario(cfg)?;
            let mut b = scenario_bundle(cfg, &res, id.name());
            if id == FigureId::Fig3 {
                b.tables.push(snapshot_profiles(id.name(), &res));
            }
            merge(b);
        }
    }
    Ok(out.expect("every figure has at least one configuration"))
}

/// Profiles at the configured snapshot times only.
fn snapshot_profiles(name: &str, res: &crate::scenarios::ScenarioResult) -> Table {
    let mut header = vec!["kappa_x".to_string()];
    for r in &res.snapshots {
        let t = time_label(r.snapshot.time);
        for q in ["rho11", "rho22", "re_rho12", "im_rho12"] {
            header.push(format!("{q}_t{t}"));
        }
    }
    let mut table = Table { name: name.to_string(), header, rows: Vec::new() };
    if let Some(first) = res.snapshots.first() {
        for (i, &z) in first.snapshot.z.iter().enumerate() {
            let mut row = vec![num(z)];
            for r in &res.snapshots {
                let s = &r.snapshot;
                row.extend([num(s.rho11[i]), num(s.rho22[i]), num(s.rho12[i].re), num(s.rho12[i].im)]);
            }
            table.push(row);
        }
    }
    table
}
