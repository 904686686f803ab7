use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DiscreteOperator, Provenance, Scheme};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// JSON companion of a flat little-endian `f64` matrix file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSidecar {
    pub n: usize,
    pub cutoff_l: f64,
    pub scheme: Scheme,
    pub symmetric: bool,
    /// Row-major.
    pub layout: String,
    pub data_file: String,
    pub provenance: Provenance,
}

/// Writes `<base>.bin` (row-major little-endian `f64`) and `<base>.json`.
pub fn write_operator(op: &DiscreteOperator, base: &Path) -> Result<(PathBuf, PathBuf)> {
    let bin = base.with_extension("bin");
    let json = base.with_extension("json");
    let mut bytes = Vec::with_capacity(op.dim() * op.dim() * 8);
    for v in op.matrix().as_slice() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(&bin, &bytes)?;
    let sidecar = OperatorSidecar {
        n: op.dim(),
        cutoff_l: op.grid().cutoff_l(),
        scheme: op.grid().scheme(),
        symmetric: op.is_symmetric(),
        layout: "row_major_f64_le".into(),
        data_file: bin
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        provenance: op.provenance().clone(),
    };
    write_atomic(&json, &serde_json::to_vec_pretty(&sidecar)?)?;
    Ok((bin, json))
}

/// Reads back a matrix written by [`write_operator`].
pub fn read_operator(base: &Path) -> Result<(DenseMatrix, OperatorSidecar)> {
    let json = base.with_extension("json");
    let sidecar: OperatorSidecar = serde_json::from_slice(&fs::read(&json).map_err(io_err)?)?;
    let bin = json.with_file_name(&sidecar.data_file);
    let bytes = fs::read(&bin).map_err(io_err)?;
    if bytes.len() != sidecar.n * sidecar.n * 8 {
        return Err(Error::GridMismatch(format!(
            "{} holds {} bytes, expected {}",
            bin.display(),
            bytes.len(),
            sidecar.n * sidecar.n * 8
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((
        DenseMatrix::from_row_major(sidecar.n, sidecar.n, data),
        sidecar,
    ))
}

/// Writes to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension()
            .map(|e| e.to_string_lossy().into_owned())
            .unwrap_or_default(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{nystrom, Grid};
    use crate::kernels::KernelSpec;

    #[test]
    fn round_trip() {
        let dir = std::env::temp_dir().join(format!("anisospec-export-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let op = nystrom(
            &KernelSpec::m_t(0.7).unwrap(),
            &Grid::gauss_legendre(2.0, 3, 4).unwrap(),
        )
        .unwrap();
        let base = dir.join("mt");
        write_operator(&op, &base).unwrap();
        let (m, side) = read_operator(&base).unwrap();
        assert_eq!(&m, op.matrix());
        assert_eq!(side.n, 12);
        assert_eq!(side.scheme, Scheme::GaussLegendreComposite);
        assert_eq!(&side.provenance, op.provenance());
        fs::remove_dir_all(dir).unwrap();
    }
}
