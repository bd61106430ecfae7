//! Output files: CSV with `#` metadata lines, 16-bit binary PGM renders and
//! key-sorted JSON, each recorded with its SHA-256 digest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cpi_core::{Axis, CorrelationGrid, SampledImage};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileEntry {
    pub path: String,
    pub format: &'static str,
    pub bytes: usize,
    pub sha256: String,
}

/// PGM grey levels map `[min, max]` linearly onto `[0, 65535]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmScale {
    pub min: f64,
    pub max: f64,
}

/// Files written into one output directory.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<FileEntry>,
    scales: BTreeMap<String, PgmScale>,
}

impl OutputSet {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            scales: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn scales(&self) -> &BTreeMap<String, PgmScale> {
        &self.scales
    }

    fn write(&mut self, name: &str, format: &'static str, data: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, data).map_err(|e| CliError::io(&path, e))?;
        self.files.push(FileEntry {
            path: name.to_string(),
            format,
            bytes: data.len(),
            sha256: hex::encode(Sha256::digest(data)),
        });
        Ok(())
    }

    /// CSV with `# ` comment lines, a header row and LF line endings.
    pub fn write_csv(
        &mut self,
        name: &str,
        comments: &[String],
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        for c in comments {
            buf.extend_from_slice(format!("# {c}\n").as_bytes());
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        let io = |e: csv::Error| CliError::io(Path::new(name), e.into());
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(Path::new(name), e))?;
        drop(w);
        self.write(name, "csv", &buf)
    }

    /// Long-format grid: one `rho_a,rho_b,value[,valid]` row per node.
    pub fn write_grid_csv(&mut self, name: &str, grid: &CorrelationGrid, quantity: &str) -> Result<(), CliError> {
        let mut comments = vec![
            axis_comment("rho_a", &grid.axis_a),
            axis_comment("rho_b", &grid.axis_b),
            format!(
                "snapshot: z_a={} z_b={} magnification={}",
                num(grid.snapshot.z_a),
                num(grid.snapshot.z_b),
                num(grid.snapshot.magnification)
            ),
        ];
        let masked = grid.valid.is_some();
        let mut header = vec!["rho_a", "rho_b", quantity];
        if masked {
            header.push("valid");
            comments.push("valid=0 marks samples outside the acquired range".into());
        }
        let rows = (0..grid.axis_a.len()).flat_map(|i| {
            (0..grid.axis_b.len()).map(move |j| {
                let mut row = vec![
                    num(grid.axis_a.coordinate(i)),
                    num(grid.axis_b.coordinate(j)),
                    num(grid.values[[i, j]]),
                ];
                if masked {
                    row.push(u8::from(grid.is_valid(i, j)).to_string());
                }
                row
            })
        });
        self.write_csv(name, &comments, &header, rows)
    }

    pub fn write_image_csv(&mut self, name: &str, image: &SampledImage) -> Result<(), CliError> {
        let comments = [axis_comment("rho", &image.axis), format!("label: {}", image.label.as_str())];
        let rows = image
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![num(image.axis.coordinate(i)), num(*v)]);
        self.write_csv(name, &comments, &["rho", "value"], rows)
    }

    /// Binary P5 render of a grid: `n_b` columns by `n_a` rows, 16-bit
    /// big-endian, min-max scaled.
    pub fn write_pgm(&mut self, name: &str, grid: &CorrelationGrid) -> Result<(), CliError> {
        let (rows, cols) = grid.values.dim();
        let (bytes, scale) = pgm(rows, cols, grid.values.iter().copied());
        self.scales.insert(name.to_string(), scale);
        self.write(name, "pgm", &bytes)
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        self.write(name, "json", &json_bytes(value))
    }

    /// Writes `manifest.json` with the file list, which must come last.
    pub fn finish(self, mut manifest: Value) -> Result<Vec<FileEntry>, CliError> {
        let files: Vec<Value> = self
            .files
            .iter()
            .map(|f| json!({"path": f.path, "format": f.format, "bytes": f.bytes, "sha256": f.sha256}))
            .collect();
        let scales: serde_json::Map<String, Value> = self
            .scales
            .iter()
            .map(|(k, s)| (k.clone(), json!({"min": s.min, "max": s.max})))
            .collect();
        manifest["files"] = Value::Array(files);
        manifest["pgm_scaling"] = Value::Object(scales);
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, json_bytes(&manifest)).map_err(|e| CliError::io(&path, e))?;
        Ok(self.files)
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json_bytes(value: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("JSON values serialize");
    out.push(b'\n');
    out
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

fn axis_comment(name: &str, axis: &Axis) -> String {
    format!(
        "{name}: n={} first={} step={} (m)",
        axis.len(),
        num(axis.first()),
        num(axis.step())
    )
}

/// P5 bytes and the scale used. A constant image renders black.
pub fn pgm(rows: usize, cols: usize, values: impl Iterator<Item = f64> + Clone) -> (Vec<u8>, PgmScale) {
    let (min, max) = values
        .clone()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let mut bytes = format!("P5\n{cols} {rows}\n65535\n").into_bytes();
    let range = max - min;
    for v in values {
        let level = if range > 0.0 {
            ((v - min) / range * 65535.0).round() as u16
        } else {
            0
        };
        bytes.extend_from_slice(&level.to_be_bytes());
    }
    (bytes, PgmScale { min, max })
}
