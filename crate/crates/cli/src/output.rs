use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anisospec_core::discretize::{write_atomic, Grid, Scheme};
use serde::Serialize;

use crate::config::{Format, OutputSpec};
use crate::error::CliError;

/// Grid used by one solve, as recorded in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRecord {
    pub label: String,
    pub n: usize,
    pub cutoff_l: f64,
    pub scheme: Scheme,
}

impl GridRecord {
    pub fn new(label: impl Into<String>, grid: &Grid) -> Self {
        Self {
            label: label.into(),
            n: grid.len(),
            cutoff_l: grid.cutoff_l(),
            scheme: grid.scheme(),
        }
    }
}

/// Writes artifacts atomically into the output directory, honouring the
/// requested formats.
pub struct Artifacts {
    dir: PathBuf,
    spec: OutputSpec,
    written: Vec<String>,
}

impl Artifacts {
    pub fn new(spec: &OutputSpec) -> Result<Self, CliError> {
        fs::create_dir_all(&spec.dir)?;
        Ok(Self {
            dir: spec.dir.clone(),
            spec: spec.clone(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn wants(&self, f: Format) -> bool {
        self.spec.wants(f)
    }

    pub fn raw(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), bytes)?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if !self.wants(Format::Json) {
            return Ok(());
        }
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.raw(name, &bytes)
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        self.raw(name, &bytes)
    }

    /// Two-column whitespace-separated curve.
    pub fn plot(&mut self, name: &str, points: &[(f64, f64)]) -> Result<(), CliError> {
        if !self.wants(Format::Plotdata) {
            return Ok(());
        }
        let text = plot_text(points)?;
        self.raw(name, text.as_bytes())
    }
}

/// `x y` per line.
pub fn plot_text(points: &[(f64, f64)]) -> Result<String, CliError> {
    if points.is_empty() {
        return Err(CliError::Usage("plot data needs at least one point".into()));
    }
    let mut s = String::new();
    for (x, y) in points {
        writeln!(s, "{x:e} {y:e}").expect("write to string");
    }
    Ok(s)
}

/// Eigenvectors as a flat little-endian `f64` file, one vector after another,
/// with a JSON sidecar carrying the nodes.
pub fn write_vectors(
    out: &mut Artifacts,
    base: &str,
    grid: &Grid,
    vectors: &[&[f64]],
) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Sidecar<'a> {
        n: usize,
        count: usize,
        layout: &'static str,
        data_file: String,
        cutoff_l: f64,
        scheme: Scheme,
        nodes: &'a [f64],
        weights: &'a [f64],
    }
    if !out.wants(Format::Json) {
        return Ok(());
    }
    let mut bytes = Vec::with_capacity(8 * grid.len() * vectors.len());
    for v in vectors {
        for x in *v {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    let data_file = format!("{base}.bin");
    out.raw(&data_file, &bytes)?;
    out.json(
        &format!("{base}.json"),
        &Sidecar {
            n: grid.len(),
            count: vectors.len(),
            layout: "vector_major",
            data_file,
            cutoff_l: grid.cutoff_l(),
            scheme: grid.scheme(),
            nodes: grid.nodes(),
            weights: grid.weights(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_lines_and_empty() {
        let t = plot_text(&[(1.0, 2.0), (0.5, -1.0)]).unwrap();
        assert_eq!(t.lines().count(), 2);
        assert_eq!(t.lines().next().unwrap().split_whitespace().count(), 2);
        assert!(plot_text(&[]).is_err());
    }

    #[test]
    fn formats_are_honoured() {
        let dir = tempfile::tempdir().unwrap();
        let spec = OutputSpec {
            dir: dir.path().to_path_buf(),
            formats: vec![Format::Csv],
        };
        let mut a = Artifacts::new(&spec).unwrap();
        a.json("x.json", &1).unwrap();
        a.csv("x.csv", &[(1.0, 2.0)]).unwrap();
        a.plot("x.dat", &[(1.0, 2.0)]).unwrap();
        assert_eq!(a.written(), ["x.csv"]);
        assert!(dir.path().join("x.csv").exists() && !dir.path().join("x.json").exists());
    }
}
