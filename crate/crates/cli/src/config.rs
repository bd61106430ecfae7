//! Experiment configuration: a TOML document with the sections
//! `[geometry]`, `[source]`, `[object]`, `[grids]`, `[run]` and `[budget]`.
//!
//! Parsing is strict. Unknown sections and keys are rejected, every problem
//! is reported with its dotted field path, and defaults are filled only for
//! the keys documented on [`GridConfig`], [`RunConfig`] and
//! [`ObjectConfig::Sampled`].

use std::fmt;
use std::path::{Path, PathBuf};

use cpi_core::{Axis, Complex64, LensSpec, ObjectMask, SetupGeometry, SourceProfile};
use toml::{Table, Value};

use crate::error::{CliError, FieldError};

/// Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig {
    pub z_a: f64,
    pub z_b: f64,
    pub s_o: f64,
    pub lens: LensSpec,
    pub lambda0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceConfig {
    Gaussian { sigma: f64 },
    TopHat { width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectConfig {
    DoubleSlit { separation: f64, width: f64 },
    SingleSlit { center: f64, width: f64 },
    /// Transmission samples read from a CSV file with columns `rho,re,im`
    /// on a uniform `rho` grid. A relative `file` is resolved against the
    /// directory of the config file. `feature_scale` is optional.
    Sampled { file: PathBuf, feature_scale: Option<f64> },
}

/// Detector grids and quadrature settings.
///
/// Defaults: `n_a = n_b = 64`, `half_a = 300 µm`, `half_b = 2.5·M·D_s/2`,
/// `out_n = n_a`, `out_half = half_a`, `source_span = 6`. `n_source` and
/// `cell` are chosen automatically when absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub n_a: usize,
    pub half_a: f64,
    pub n_b: usize,
    pub half_b: f64,
    /// Output `ρa` axis of refocused images.
    pub out_n: usize,
    pub out_half: f64,
    pub n_source: Option<usize>,
    /// Source integration half-width in units of σ (Gaussian sources).
    pub source_span: f64,
    /// Monte Carlo emitter cell width.
    pub cell: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Montecarlo,
    Geometric,
    Refocus,
    Budget,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Analytic, Mode::Montecarlo, Mode::Geometric, Mode::Refocus, Mode::Budget];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Montecarlo => "montecarlo",
            Mode::Geometric => "geometric",
            Mode::Refocus => "refocus",
            Mode::Budget => "budget",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Defaults: `seed = 0`, `n_batches = 20`. `n_realizations` is required in
/// montecarlo mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub n_realizations: Option<usize>,
    pub n_batches: usize,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetConfig {
    pub n_tot: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub source: SourceConfig,
    pub object: ObjectConfig,
    pub grids: GridConfig,
    pub run: RunConfig,
    pub budget: Option<BudgetConfig>,
}

/// Core objects built from a validated config.
#[derive(Debug, Clone)]
pub struct Bench {
    pub geom: SetupGeometry,
    pub source: SourceProfile,
    pub mask: ObjectMask,
    pub axis_a: Axis,
    pub axis_b: Axis,
    pub out_axis: Axis,
}

const SECTIONS: [&str; 6] = ["geometry", "source", "object", "grids", "run", "budget"];
const GEOMETRY_KEYS: [&str; 6] = ["z_a", "z_b", "s_o", "focal_length", "s_i", "lambda0"];
const SOURCE_KEYS: [&str; 3] = ["kind", "sigma", "width"];
const OBJECT_KEYS: [&str; 6] = ["kind", "separation", "width", "center", "file", "feature_scale"];
const GRID_KEYS: [&str; 9] = [
    "n_a",
    "half_a",
    "n_b",
    "half_b",
    "out_n",
    "out_half",
    "n_source",
    "source_span",
    "cell",
];
const RUN_KEYS: [&str; 5] = ["mode", "seed", "n_realizations", "n_batches", "output"];
const BUDGET_KEYS: [&str; 2] = ["n_tot", "delta"];

const DEFAULT_N: usize = 64;
const DEFAULT_HALF_A: f64 = 300e-6;
const DEFAULT_B_SPAN: f64 = 2.5;
const DEFAULT_SOURCE_SPAN: f64 = 6.0;
const DEFAULT_BATCHES: usize = 20;

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let table: Table = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        CliError::Parse {
            line,
            message: e.message().to_string(),
        }
    })?;
    let mut v = Validator::default();
    let config = v.config(&table);
    match config {
        Some(c) if v.errors.is_empty() => Ok(c),
        _ => Err(CliError::Validation(v.errors)),
    }
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

impl ExperimentConfig {
    /// TOML text that parses back to this config.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_table()).expect("config tables serialize")
    }

    pub fn to_table(&self) -> Table {
        let mut root = Table::new();
        let g = &self.geometry;
        let mut geometry = Table::new();
        geometry.insert("z_a".into(), g.z_a.into());
        geometry.insert("z_b".into(), g.z_b.into());
        geometry.insert("s_o".into(), g.s_o.into());
        match g.lens {
            LensSpec::FocalLength(f) => geometry.insert("focal_length".into(), f.into()),
            LensSpec::ImageDistance(s) => geometry.insert("s_i".into(), s.into()),
        };
        geometry.insert("lambda0".into(), g.lambda0.into());
        root.insert("geometry".into(), geometry.into());

        let mut source = Table::new();
        match self.source {
            SourceConfig::Gaussian { sigma } => {
                source.insert("kind".into(), "gaussian".into());
                source.insert("sigma".into(), sigma.into());
            }
            SourceConfig::TopHat { width } => {
                source.insert("kind".into(), "top_hat".into());
                source.insert("width".into(), width.into());
            }
        }
        root.insert("source".into(), source.into());

        let mut object = Table::new();
        match &self.object {
            ObjectConfig::DoubleSlit { separation, width } => {
                object.insert("kind".into(), "double_slit".into());
                object.insert("separation".into(), (*separation).into());
                object.insert("width".into(), (*width).into());
            }
            ObjectConfig::SingleSlit { center, width } => {
                object.insert("kind".into(), "single_slit".into());
                object.insert("center".into(), (*center).into());
                object.insert("width".into(), (*width).into());
            }
            ObjectConfig::Sampled { file, feature_scale } => {
                object.insert("kind".into(), "sampled".into());
                object.insert("file".into(), file.to_string_lossy().into_owned().into());
                if let Some(d) = feature_scale {
                    object.insert("feature_scale".into(), (*d).into());
                }
            }
        }
        root.insert("object".into(), object.into());

        let gr = &self.grids;
        let mut grids = Table::new();
        grids.insert("n_a".into(), count(gr.n_a));
        grids.insert("half_a".into(), gr.half_a.into());
        grids.insert("n_b".into(), count(gr.n_b));
        grids.insert("half_b".into(), gr.half_b.into());
        grids.insert("out_n".into(), count(gr.out_n));
        grids.insert("out_half".into(), gr.out_half.into());
        if let Some(n) = gr.n_source {
            grids.insert("n_source".into(), count(n));
        }
        grids.insert("source_span".into(), gr.source_span.into());
        if let Some(c) = gr.cell {
            grids.insert("cell".into(), c.into());
        }
        root.insert("grids".into(), grids.into());

        let r = &self.run;
        let mut run = Table::new();
        run.insert("mode".into(), r.mode.as_str().into());
        run.insert("seed".into(), Value::Integer(r.seed as i64));
        if let Some(n) = r.n_realizations {
            run.insert("n_realizations".into(), count(n));
        }
        run.insert("n_batches".into(), count(r.n_batches));
        if let Some(out) = &r.output {
            run.insert("output".into(), out.to_string_lossy().into_owned().into());
        }
        root.insert("run".into(), run.into());

        if let Some(b) = self.budget {
            let mut budget = Table::new();
            budget.insert("n_tot".into(), count(b.n_tot));
            budget.insert("delta".into(), b.delta.into());
            root.insert("budget".into(), budget.into());
        }
        root
    }

    /// Builds the core objects. Relative sample files are resolved against
    /// `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Bench, CliError> {
        let g = &self.geometry;
        let geom = SetupGeometry::new(g.z_a, g.z_b, g.s_o, g.lens, g.lambda0)
            .map_err(|e| CliError::field("geometry", e.to_string()))?;
        let source = match self.source {
            SourceConfig::Gaussian { sigma } => SourceProfile::gaussian(sigma),
            SourceConfig::TopHat { width } => SourceProfile::top_hat(width),
        }
        .map_err(|e| CliError::field("source", e.to_string()))?;
        let mask = match &self.object {
            ObjectConfig::DoubleSlit { separation, width } => ObjectMask::double_slit(*separation, *width),
            ObjectConfig::SingleSlit { center, width } => ObjectMask::single_slit(*center, *width),
            ObjectConfig::Sampled { file, feature_scale } => {
                let path = base_dir.join(file);
                let (start, step, values) = read_mask_samples(&path)?;
                ObjectMask::sampled(start, step, values, *feature_scale)
            }
        }
        .map_err(|e| CliError::field("object", e.to_string()))?;
        let gr = &self.grids;
        let axis = |n: usize, half: f64, path: &str| {
            Axis::symmetric(n, half).map_err(|e| CliError::field(path, e.to_string()))
        };
        Ok(Bench {
            axis_a: axis(gr.n_a, gr.half_a, "grids.n_a")?,
            axis_b: axis(gr.n_b, gr.half_b, "grids.n_b")?,
            out_axis: axis(gr.out_n, gr.out_half, "grids.out_n")?,
            geom,
            source,
            mask,
        })
    }
}

fn count(n: usize) -> Value {
    Value::Integer(n as i64)
}

/// Reads `rho,re,im` rows (header required, `#` comments allowed) on a
/// uniform `rho` grid.
fn read_mask_samples(path: &Path) -> Result<(f64, f64, Vec<Complex64>), CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let bad = |msg: String| CliError::field("object.file", format!("{}: {msg}", path.display()));
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["rho", "re", "im"] {
        return Err(bad("header must be rho,re,im".into()));
    }
    let mut rho = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let num = |k: usize| -> Result<f64, CliError> {
            record[k]
                .parse::<f64>()
                .map_err(|_| bad(format!("row {}: `{}` is not a number", i + 1, &record[k])))
        };
        rho.push(num(0)?);
        values.push(Complex64::new(num(1)?, num(2)?));
    }
    if rho.len() < 2 {
        return Err(bad("need at least two samples".into()));
    }
    let step = (rho[rho.len() - 1] - rho[0]) / (rho.len() - 1) as f64;
    let uniform = rho
        .iter()
        .enumerate()
        .all(|(i, r)| (r - (rho[0] + i as f64 * step)).abs() <= 1e-9 * step.abs());
    if !(step > 0.0 && uniform) {
        return Err(bad("rho must be increasing and uniformly spaced".into()));
    }
    Ok((rho[0], step, values))
}

/// Collects every validation problem before giving up.
#[derive(Default)]
struct Validator {
    errors: Vec<FieldError>,
}

impl Validator {
    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(FieldError {
            path: path.into(),
            message: message.into(),
        });
    }

    fn config(&mut self, root: &Table) -> Option<ExperimentConfig> {
        for key in root.keys() {
            if !SECTIONS.contains(&key.as_str()) {
                self.error(key.clone(), "unknown section");
            }
        }
        let geometry = self.section(root, "geometry", &GEOMETRY_KEYS).and_then(|t| self.geometry(t));
        let source = self.section(root, "source", &SOURCE_KEYS).and_then(|t| self.source(t));
        let object = self.section(root, "object", &OBJECT_KEYS).and_then(|t| self.object(t));
        let run = self.section(root, "run", &RUN_KEYS).and_then(|t| self.run(t));
        let empty = Table::new();
        let grids = match root.get("grids") {
            None => Some(&empty),
            Some(_) => self.section(root, "grids", &GRID_KEYS),
        }
        .and_then(|t| self.grids(t, geometry.as_ref(), source.as_ref()));
        let budget = match root.get("budget") {
            None => None,
            Some(_) => self.section(root, "budget", &BUDGET_KEYS).and_then(|t| self.budget(t)),
        };
        let run = run?;
        if run.mode == Mode::Budget && budget.is_none() && !root.contains_key("budget") {
            self.error("budget", "required in budget mode");
        }
        if run.mode == Mode::Montecarlo && run.n_realizations.is_none() {
            self.error("run.n_realizations", "required in montecarlo mode");
        }
        if let (Some(n), true) = (run.n_realizations, run.mode == Mode::Montecarlo) {
            if n < 2 * run.n_batches {
                self.error(
                    "run.n_realizations",
                    format!("need at least 2 per batch ({} batches), got {n}", run.n_batches),
                );
            }
        }
        Some(ExperimentConfig {
            geometry: geometry?,
            source: source?,
            object: object?,
            grids: grids?,
            run,
            budget,
        })
    }

    fn section<'t>(&mut self, root: &'t Table, name: &str, allowed: &[&str]) -> Option<&'t Table> {
        match root.get(name) {
            None => {
                self.error(name, "missing section");
                None
            }
            Some(Value::Table(t)) => {
                for key in t.keys() {
                    if !allowed.contains(&key.as_str()) {
                        self.error(format!("{name}.{key}"), "unknown key");
                    }
                }
                Some(t)
            }
            Some(_) => {
                self.error(name, "must be a table");
                None
            }
        }
    }

    fn float(&mut self, t: &Table, section: &str, key: &str) -> Option<f64> {
        let path = format!("{section}.{key}");
        match t.get(key) {
            None => None,
            Some(Value::Float(x)) if x.is_finite() => Some(*x),
            Some(Value::Integer(i)) => Some(*i as f64),
            Some(_) => {
                self.error(path, "must be a finite number");
                None
            }
        }
    }

    fn required_float(&mut self, t: &Table, section: &str, key: &str) -> Option<f64> {
        if !t.contains_key(key) {
            self.error(format!("{section}.{key}"), "missing");
        }
        self.float(t, section, key)
    }

    fn positive(&mut self, t: &Table, section: &str, key: &str) -> Option<f64> {
        let x = self.required_float(t, section, key)?;
        self.check_positive(section, key, x)
    }

    fn optional_positive(&mut self, t: &Table, section: &str, key: &str) -> Option<Option<f64>> {
        match self.float(t, section, key) {
            None if t.contains_key(key) => None,
            None => Some(None),
            Some(x) => self.check_positive(section, key, x).map(Some),
        }
    }

    fn check_positive(&mut self, section: &str, key: &str, x: f64) -> Option<f64> {
        if x > 0.0 {
            Some(x)
        } else {
            self.error(format!("{section}.{key}"), format!("must be positive, got {x}"));
            None
        }
    }

    fn integer(&mut self, t: &Table, section: &str, key: &str, min: i64) -> Option<Option<i64>> {
        match t.get(key) {
            None => Some(None),
            Some(Value::Integer(i)) if *i >= min => Some(Some(*i)),
            Some(Value::Integer(i)) => {
                self.error(format!("{section}.{key}"), format!("must be at least {min}, got {i}"));
                None
            }
            Some(_) => {
                self.error(format!("{section}.{key}"), "must be an integer");
                None
            }
        }
    }

    fn string<'t>(&mut self, t: &'t Table, section: &str, key: &str) -> Option<Option<&'t str>> {
        match t.get(key) {
            None => Some(None),
            Some(Value::String(s)) => Some(Some(s.as_str())),
            Some(_) => {
                self.error(format!("{section}.{key}"), "must be a string");
                None
            }
        }
    }

    fn kind<'t>(&mut self, t: &'t Table, section: &str, kinds: &[&str]) -> Option<&'t str> {
        match self.string(t, section, "kind")? {
            None => {
                self.error(format!("{section}.kind"), format!("missing; one of {}", kinds.join(", ")));
                None
            }
            Some(k) if kinds.contains(&k) => Some(k),
            Some(k) => {
                self.error(format!("{section}.kind"), format!("`{k}` is not one of {}", kinds.join(", ")));
                None
            }
        }
    }

    /// Flags keys that exist in the section but belong to another kind.
    fn unused(&mut self, t: &Table, section: &str, kind: &str, keys: &[&str]) {
        for key in keys {
            if t.contains_key(*key) {
                self.error(format!("{section}.{key}"), format!("not used by kind {kind}"));
            }
        }
    }

    fn geometry(&mut self, t: &Table) -> Option<GeometryConfig> {
        let s = "geometry";
        let z_a = self.positive(t, s, "z_a");
        let z_b = self.positive(t, s, "z_b");
        let s_o = self.positive(t, s, "s_o");
        let lambda0 = self.positive(t, s, "lambda0");
        let lens = match (t.contains_key("focal_length"), t.contains_key("s_i")) {
            (true, false) => self.positive(t, s, "focal_length").map(LensSpec::FocalLength),
            (false, true) => self.positive(t, s, "s_i").map(LensSpec::ImageDistance),
            _ => {
                self.error("geometry.focal_length", "give exactly one of focal_length and s_i");
                None
            }
        };
        let g = GeometryConfig {
            z_a: z_a?,
            z_b: z_b?,
            s_o: s_o?,
            lens: lens?,
            lambda0: lambda0?,
        };
        if let Err(e) = SetupGeometry::new(g.z_a, g.z_b, g.s_o, g.lens, g.lambda0) {
            self.error("geometry", e.to_string());
            return None;
        }
        Some(g)
    }

    fn source(&mut self, t: &Table) -> Option<SourceConfig> {
        let s = "source";
        match self.kind(t, s, &["gaussian", "top_hat"])? {
            "gaussian" => {
                self.unused(t, s, "gaussian", &["width"]);
                Some(SourceConfig::Gaussian {
                    sigma: self.positive(t, s, "sigma")?,
                })
            }
            _ => {
                self.unused(t, s, "top_hat", &["sigma"]);
                Some(SourceConfig::TopHat {
                    width: self.positive(t, s, "width")?,
                })
            }
        }
    }

    fn object(&mut self, t: &Table) -> Option<ObjectConfig> {
        let s = "object";
        match self.kind(t, s, &["double_slit", "single_slit", "sampled"])? {
            "double_slit" => {
                self.unused(t, s, "double_slit", &["center", "file", "feature_scale"]);
                let separation = self.positive(t, s, "separation");
                let width = self.positive(t, s, "width");
                let (separation, width) = (separation?, width?);
                if width >= separation {
                    self.error("object.width", "slits overlap: width must be below separation");
                    return None;
                }
                Some(ObjectConfig::DoubleSlit { separation, width })
            }
            "single_slit" => {
                self.unused(t, s, "single_slit", &["separation", "file", "feature_scale"]);
                let center = self.required_float(t, s, "center");
                let width = self.positive(t, s, "width");
                Some(ObjectConfig::SingleSlit {
                    center: center?,
                    width: width?,
                })
            }
            _ => {
                self.unused(t, s, "sampled", &["separation", "width", "center"]);
                let feature_scale = self.optional_positive(t, s, "feature_scale");
                let file = match self.string(t, s, "file")? {
                    Some(f) => PathBuf::from(f),
                    None => {
                        self.error("object.file", "missing");
                        return None;
                    }
                };
                Some(ObjectConfig::Sampled {
                    file,
                    feature_scale: feature_scale?,
                })
            }
        }
    }

    fn grids(
        &mut self,
        t: &Table,
        geometry: Option<&GeometryConfig>,
        source: Option<&SourceConfig>,
    ) -> Option<GridConfig> {
        let s = "grids";
        let n_a = self.integer(t, s, "n_a", 2);
        let n_b = self.integer(t, s, "n_b", 2);
        let out_n = self.integer(t, s, "out_n", 2);
        let n_source = self.integer(t, s, "n_source", 16);
        let half_a = self.optional_positive(t, s, "half_a");
        let half_b = self.optional_positive(t, s, "half_b");
        let out_half = self.optional_positive(t, s, "out_half");
        let cell = self.optional_positive(t, s, "cell");
        let source_span = self.optional_positive(t, s, "source_span")?.unwrap_or(DEFAULT_SOURCE_SPAN);
        if source_span < 5.0 {
            self.error("grids.source_span", format!("must be at least 5, got {source_span}"));
        }
        let n_a = n_a?.map_or(DEFAULT_N, |n| n as usize);
        let half_a = half_a?.unwrap_or(DEFAULT_HALF_A);
        let half_b = match half_b? {
            Some(h) => h,
            None => {
                let g = geometry?;
                let lens = SetupGeometry::new(g.z_a, g.z_b, g.s_o, g.lens, g.lambda0).ok()?;
                let radius = match source? {
                    SourceConfig::Gaussian { sigma } => *sigma,
                    SourceConfig::TopHat { width } => 0.5 * width,
                };
                DEFAULT_B_SPAN * lens.magnification() * radius
            }
        };
        Some(GridConfig {
            n_a,
            half_a,
            n_b: n_b?.map_or(DEFAULT_N, |n| n as usize),
            half_b,
            out_n: out_n?.map_or(n_a, |n| n as usize),
            out_half: out_half?.unwrap_or(half_a),
            n_source: n_source?.map(|n| n as usize),
            source_span,
            cell: cell?,
        })
    }

    fn run(&mut self, t: &Table) -> Option<RunConfig> {
        let s = "run";
        let names: Vec<&str> = Mode::ALL.iter().map(Mode::as_str).collect();
        let mode = match self.string(t, s, "mode")? {
            None => {
                self.error("run.mode", format!("missing; one of {}", names.join(", ")));
                None
            }
            Some(m) => {
                let found = Mode::ALL.iter().copied().find(|mode| mode.as_str() == m);
                if found.is_none() {
                    self.error("run.mode", format!("`{m}` is not one of {}", names.join(", ")));
                }
                found
            }
        };
        let seed = self.integer(t, s, "seed", 0);
        let n_realizations = self.integer(t, s, "n_realizations", 2);
        let n_batches = self.integer(t, s, "n_batches", 2);
        let output = self.string(t, s, "output");
        Some(RunConfig {
            mode: mode?,
            seed: seed?.map_or(0, |v| v as u64),
            n_realizations: n_realizations?.map(|n| n as usize),
            n_batches: n_batches?.map_or(DEFAULT_BATCHES, |n| n as usize),
            output: output?.map(PathBuf::from),
        })
    }

    fn budget(&mut self, t: &Table) -> Option<BudgetConfig> {
        let s = "budget";
        let n_tot = match self.integer(t, s, "n_tot", 2)? {
            Some(n) => Some(n as usize),
            None => {
                self.error("budget.n_tot", "missing");
                None
            }
        };
        let delta = self.positive(t, s, "delta");
        Some(BudgetConfig {
            n_tot: n_tot?,
            delta: delta?,
        })
    }
}
