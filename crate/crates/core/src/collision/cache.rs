//! Binary operator cache.
//!
//! Layout (little endian): the 8-byte magic `BZSLOP01`, a `u64` header
//! length, a JSON header carrying the grid hash, then `ν` and the row-major
//! `K` as `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::assembly::{AssemblyDiagnostics, AssemblyOptions, LinearizedOperator};
use super::grid::VelocityGrid;
use crate::cross_section::CrossSectionModel;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"BZSLOP01";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    grid_hash: String,
    model: String,
    options: AssemblyOptions,
    mode: u32,
    n: usize,
    diagnostics: AssemblyDiagnostics,
}

/// File name keyed by model, grid and assembly options.
pub fn cache_file_name(
    model: &CrossSectionModel,
    grid: &VelocityGrid,
    opts: &AssemblyOptions,
) -> String {
    let mut h = Sha256::new();
    h.update(model.fingerprint());
    h.update(grid.hash());
    h.update(serde_json::to_vec(opts).expect("options serialize"));
    format!("operator-{}.bin", &hex::encode(h.finalize())[..24])
}

pub fn save_operator(
    op: &LinearizedOperator,
    model: &CrossSectionModel,
    opts: &AssemblyOptions,
    path: &Path,
) -> Result<()> {
    let header = Header {
        grid_hash: op.grid().hash(),
        model: model.fingerprint(),
        options: opts.clone(),
        mode: op.mode(),
        n: op.grid().len(),
        diagnostics: op.diagnostics().clone(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    out.write_all(MAGIC).map_err(io)?;
    out.write_all(&(json.len() as u64).to_le_bytes())
        .map_err(io)?;
    out.write_all(&json).map_err(io)?;
    for v in op.nu().iter().chain(op.k().iter()) {
        out.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a cached operator. Returns `Ok(None)` if the file was written for a
/// different model, grid or option set.
pub fn load_operator(
    path: &Path,
    model: &CrossSectionModel,
    grid: &VelocityGrid,
    opts: &AssemblyOptions,
) -> Result<Option<LinearizedOperator>> {
    let io = |e| Error::io(path, e);
    let format = |message: &str| Error::Format {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    let mut input = BufReader::new(File::open(path).map_err(io)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(format("bad magic"));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len).map_err(io)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 20 {
        return Err(format("header too long"));
    }
    let mut json = vec![0u8; len];
    input.read_exact(&mut json).map_err(io)?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| format(&e.to_string()))?;
    if header.grid_hash != grid.hash()
        || header.model != model.fingerprint()
        || &header.options != opts
    {
        return Ok(None);
    }
    let n = grid.len();
    if header.n != n {
        return Err(format("node count does not match the grid hash"));
    }
    let mut buf = vec![0u8; 8 * (n + n * n)];
    input
        .read_exact(&mut buf)
        .map_err(|_| format("truncated data"))?;
    let mut values = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let nu: Array1<f64> = values.by_ref().take(n).collect();
    let k = Array2::from_shape_vec((n, n), values.collect()).map_err(|e| format(&e.to_string()))?;
    LinearizedOperator::from_parts(
        grid.clone(),
        model.clone(),
        header.mode,
        nu,
        k,
        header.diagnostics,
    )
    .map(Some)
}

/// Loads from `dir` if a matching file exists, otherwise assembles and stores.
pub fn assemble_cached(
    model: &CrossSectionModel,
    grid: &VelocityGrid,
    opts: &AssemblyOptions,
    dir: Option<&Path>,
) -> Result<(LinearizedOperator, Option<PathBuf>, bool)> {
    // Closures have no stable fingerprint.
    let cacheable = !matches!(model.beta(), crate::cross_section::AngularFactor::Custom(_));
    let Some(dir) = dir.filter(|_| cacheable) else {
        return Ok((
            super::assembly::assemble_operator(model, grid, opts)?,
            None,
            false,
        ));
    };
    let path = dir.join(cache_file_name(model, grid, opts));
    if path.exists() {
        if let Some(op) = load_operator(&path, model, grid, opts)? {
            return Ok((op, Some(path), true));
        }
    }
    let op = super::assembly::assemble_operator(model, grid, opts)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_operator(&op, model, opts, &path)?;
    Ok((op, Some(path), false))
}
