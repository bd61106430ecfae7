//! Runs a validated experiment and writes its outputs and manifest.

use std::path::Path;
use std::time::Instant;

use cpi_core::analysis::{feature_contrast, fit_gaussian, normalized_l1, two_highest_peaks};
use cpi_core::budget::{continuous_plenoptic, resolution_limits, tradeoff_curve, Scheme, SensorBudget};
use cpi_core::correlator::{gamma_geometric, gamma_quadrature, QuadratureSpec};
use cpi_core::refocus::{ghost_image, refocus_grid, refocused_image, RefocusSpec};
use cpi_core::speckle::{estimate_gamma, max_cell_size, source_axis, SpeckleRun};
use cpi_core::{CorrelationGrid, MaskShape, SampledImage};
use serde_json::{json, Map, Value};

use crate::config::{Bench, ExperimentConfig, Mode};
use crate::error::CliError;
use crate::output::{num, FileEntry, OutputSet};

/// Default Monte Carlo emitter cell, capped by the unresolved-cell bound.
const DEFAULT_CELL: f64 = 5e-6;
const CONTINUOUS_SAMPLES: usize = 200;

#[derive(Debug, Clone)]
pub struct Stage {
    pub name: &'static str,
    pub wall_time_s: f64,
}

/// What a run produced. `results` holds the key scalars; `files` every
/// emitted file except the manifest itself.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub mode: Mode,
    pub seed: u64,
    pub config: Value,
    pub stages: Vec<Stage>,
    pub results: Map<String, Value>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn to_json(&self) -> Value {
        json!({
            "tool": {"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")},
            "mode": self.mode.as_str(),
            "seed": self.seed,
            "config": self.config,
            "stages": self.stages.iter().map(|s| json!({"name": s.name, "wall_time_s": s.wall_time_s})).collect::<Vec<_>>(),
            "results": self.results,
        })
    }

    pub fn result(&self, key: &str) -> Option<&Value> {
        self.results.get(key)
    }
}

struct Recorder {
    stages: Vec<Stage>,
    results: Map<String, Value>,
}

impl Recorder {
    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages.push(Stage {
            name,
            wall_time_s: start.elapsed().as_secs_f64(),
        });
        out
    }

    fn set(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }
}

/// Runs `config` and writes everything into `out_dir`. Sample files named
/// by the config are resolved against `base_dir`.
pub fn run_experiment(config: &ExperimentConfig, base_dir: &Path, out_dir: &Path) -> Result<RunManifest, CliError> {
    let bench = config.build(base_dir)?;
    let mut out = OutputSet::create(out_dir)?;
    let mut rec = Recorder {
        stages: Vec::new(),
        results: Map::new(),
    };
    match config.run.mode {
        Mode::Analytic => analytic(config, &bench, &mut out, &mut rec)?,
        Mode::Montecarlo => montecarlo(config, &bench, &mut out, &mut rec)?,
        Mode::Geometric => geometric(&bench, &mut out, &mut rec)?,
        Mode::Refocus => refocus(config, &bench, &mut out, &mut rec)?,
        Mode::Budget => budget(config, &bench, &mut out, &mut rec)?,
    }
    let mut manifest = RunManifest {
        mode: config.run.mode,
        seed: config.run.seed,
        config: serde_json::to_value(config.to_table()).expect("TOML tables convert to JSON"),
        stages: rec.stages,
        results: rec.results,
        files: Vec::new(),
    };
    manifest.files = out.finish(manifest.to_json())?;
    Ok(manifest)
}

fn quadrature(config: &ExperimentConfig, bench: &Bench, rec: &mut Recorder) -> Result<CorrelationGrid, CliError> {
    let span = config.grids.source_span;
    let quad = match config.grids.n_source {
        Some(n) => QuadratureSpec::new(n, span)?,
        None => QuadratureSpec::auto(&bench.geom, &bench.source, &bench.mask, &bench.axis_a, span)?,
    };
    rec.set("n_source", json!(quad.n_source()));
    let grid = rec.stage("quadrature", || {
        gamma_quadrature(&bench.geom, &bench.source, &bench.mask, bench.axis_a, bench.axis_b, &quad)
    })?;
    Ok(grid)
}

fn peaks(image: &SampledImage) -> Value {
    two_highest_peaks(image).map_or(Value::Null, |(l, r)| json!([l, r]))
}

/// Image summaries: peak positions, slit contrast for double slits probed
/// at `±separation/2 · scale`, and a Gaussian fit for single slits.
fn describe(rec: &mut Recorder, prefix: &str, image: &SampledImage, bench: &Bench, scale: f64) {
    rec.set(&format!("{prefix}_peaks"), peaks(image));
    match bench.mask.shape() {
        MaskShape::DoubleSlit { separation, .. } => {
            let x = 0.5 * separation * scale;
            let c = feature_contrast(image, -x, x).ok();
            rec.set(&format!("{prefix}_contrast"), json!(c));
        }
        MaskShape::SingleSlit { .. } => {
            let fit = fit_gaussian(&image.coordinates(), &image.values, 0.05).ok();
            rec.set(&format!("{prefix}_fit_width_e2"), json!(fit.map(|f| f.full_width_e2())));
            rec.set(&format!("{prefix}_fit_center"), json!(fit.map(|f| f.center)));
        }
        MaskShape::Sampled { .. } => {}
    }
}

fn emit_images(
    out: &mut OutputSet,
    rec: &mut Recorder,
    bench: &Bench,
    grid: &CorrelationGrid,
) -> Result<(), CliError> {
    let alpha = bench.geom.alpha();
    let ghost = ghost_image(grid);
    out.write_image_csv("ghost.csv", &ghost)?;
    describe(rec, "ghost", &ghost, bench, 1.0 / alpha);
    let spec = RefocusSpec::for_grid_on(grid, bench.out_axis);
    let refocused = rec.stage("refocus", || refocused_image(grid, &spec))?;
    out.write_image_csv("refocused.csv", &refocused)?;
    describe(rec, "refocused", &refocused, bench, 1.0);
    Ok(())
}

fn analytic(config: &ExperimentConfig, bench: &Bench, out: &mut OutputSet, rec: &mut Recorder) -> Result<(), CliError> {
    let grid = quadrature(config, bench, rec)?;
    out.write_grid_csv("gamma.csv", &grid, "gamma")?;
    out.write_pgm("gamma.pgm", &grid)?;
    emit_images(out, rec, bench, &grid)?;
    let geo = gamma_geometric(&bench.geom, &bench.source, &bench.mask, bench.axis_a, bench.axis_b);
    let l1 = normalized_l1(grid.values.as_slice().expect("standard layout"), geo.values.as_slice().expect("standard layout"));
    rec.set("l1_to_geometric", json!(l1));
    Ok(())
}

fn geometric(bench: &Bench, out: &mut OutputSet, rec: &mut Recorder) -> Result<(), CliError> {
    let grid = rec.stage("geometric", || {
        gamma_geometric(&bench.geom, &bench.source, &bench.mask, bench.axis_a, bench.axis_b)
    });
    out.write_grid_csv("gamma_geometric.csv", &grid, "gamma")?;
    out.write_pgm("gamma_geometric.pgm", &grid)?;
    emit_images(out, rec, bench, &grid)
}

fn refocus(config: &ExperimentConfig, bench: &Bench, out: &mut OutputSet, rec: &mut Recorder) -> Result<(), CliError> {
    let grid = quadrature(config, bench, rec)?;
    out.write_grid_csv("gamma.csv", &grid, "gamma")?;
    out.write_pgm("gamma.pgm", &grid)?;
    let spec = RefocusSpec::for_grid_on(&grid, bench.out_axis);
    let refocused = rec.stage("refocus", || refocus_grid(&grid, &spec))?;
    out.write_grid_csv("gamma_refocused.csv", &refocused, "gamma")?;
    out.write_pgm("gamma_refocused.pgm", &refocused)?;
    rec.set("refocused_valid_fraction", json!(refocused.valid_count() as f64 / refocused.values.len() as f64));
    emit_images(out, rec, bench, &grid)
}

fn montecarlo(config: &ExperimentConfig, bench: &Bench, out: &mut OutputSet, rec: &mut Recorder) -> Result<(), CliError> {
    let reference = quadrature(config, bench, rec)?;
    let cell = config
        .grids
        .cell
        .unwrap_or_else(|| DEFAULT_CELL.min(max_cell_size(&bench.geom, &bench.axis_a, &bench.axis_b)));
    let cells = source_axis(&bench.source, cell, config.grids.source_span)?;
    let n = config.run.n_realizations.expect("validated for montecarlo mode");
    let run = SpeckleRun::new(config.run.seed, n, config.run.n_batches, cells, bench.axis_a, bench.axis_b)?;
    let (estimate, report) = rec.stage("speckle", || {
        estimate_gamma(&run, &bench.geom, &bench.source, &bench.mask, &reference)
    })?;

    let comments = [
        format!("rho_a: n={} first={} step={} (m)", run.axis_a.len(), num(run.axis_a.first()), num(run.axis_a.step())),
        format!("rho_b: n={} first={} step={} (m)", run.axis_b.len(), num(run.axis_b.first()), num(run.axis_b.step())),
        format!("realizations={} batches={} seed={} cell={}", n, run.n_batches, run.seed, num(cells.step())),
    ];
    let rows = (0..run.axis_a.len()).flat_map(|i| {
        let est = &estimate;
        (0..run.axis_b.len()).map(move |j| {
            vec![
                num(est.axis_a.coordinate(i)),
                num(est.axis_b.coordinate(j)),
                num(est.gamma[[i, j]]),
                num(est.standard_error[[i, j]]),
            ]
        })
    });
    out.write_csv("gamma_mc.csv", &comments, &["rho_a", "rho_b", "gamma", "standard_error"], rows)?;
    let grid = estimate.grid();
    out.write_pgm("gamma_mc.pgm", &grid)?;
    let convergence = json!({
        "n_realizations": report.n_realizations,
        "n_batches": report.n_batches,
        "l1": report.l1,
        "linf": report.linf,
        "standard_error": report.standard_error,
    });
    out.write_json("convergence.json", &convergence)?;
    rec.set("convergence", convergence);
    rec.set("cell", json!(cells.step()));
    let ghost = ghost_image(&grid);
    out.write_image_csv("ghost_mc.csv", &ghost)?;
    describe(rec, "ghost", &ghost, bench, 1.0 / bench.geom.alpha());
    Ok(())
}

fn budget(config: &ExperimentConfig, bench: &Bench, out: &mut OutputSet, rec: &mut Recorder) -> Result<(), CliError> {
    let b = config.budget.expect("validated for budget mode");
    let curves = [Scheme::Plenoptic, Scheme::Cpi]
        .map(|scheme| SensorBudget::new(b.n_tot, b.delta, scheme).map(|s| tradeoff_curve(&s)));
    let [plenoptic, cpi] = curves;
    let (plenoptic, cpi) = (plenoptic?, cpi?);
    let comments = [format!("n_tot={} delta={} (m)", b.n_tot, num(b.delta))];
    let rows = [&plenoptic, &cpi]
        .into_iter()
        .flat_map(|c| c.pairs.iter().map(|(x, u)| vec![c.scheme.as_str().to_string(), x.to_string(), u.to_string()]));
    out.write_csv("tradeoff.csv", &comments, &["scheme", "n_x", "n_u"], rows)?;
    let rows = continuous_plenoptic(b.n_tot, CONTINUOUS_SAMPLES)
        .into_iter()
        .map(|(x, u)| vec![num(x), num(u)]);
    out.write_csv("plenoptic_continuous.csv", &comments, &["n_x", "n_u"], rows)?;

    let shared: Vec<Value> = plenoptic
        .pairs
        .iter()
        .filter_map(|&(x, u)| cpi.angular_for(x).map(|c| json!({"n_x": x, "plenoptic_n_u": u, "cpi_n_u": c})))
        .collect();
    rec.set("shared_n_x", Value::Array(shared));
    rec.set("plenoptic_pairs", json!(plenoptic.pairs.len()));
    rec.set("cpi_pairs", json!(cpi.pairs.len()));
    match resolution_limits(&bench.geom, &bench.source, &bench.mask) {
        Ok(r) => {
            rec.set("delta_rho_a", json!(r.delta_rho_a));
            rec.set("delta_rho_b", json!(r.delta_rho_b));
        }
        Err(_) => {
            rec.set("delta_rho_a", Value::Null);
            rec.set("delta_rho_b", Value::Null);
        }
    }
    Ok(())
}
