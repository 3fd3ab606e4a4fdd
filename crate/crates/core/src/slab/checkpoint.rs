//! Warm-restart checkpoints: the magic `BZSLCK01`, a `u64` header length, a
//! JSON header with the grid hash and x-nodes, then the iterate as
//! little-endian `f64` in row-major `(x, ζ)` order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::config::SlabConfig;
use super::transport::DistributionField;
use crate::collision::VelocityGrid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"BZSLCK01";

#[derive(Serialize, Deserialize)]
struct Header {
    grid_hash: String,
    x_nodes: Vec<f64>,
    n: usize,
}

pub fn save_checkpoint(field: &DistributionField, path: &Path) -> Result<()> {
    let header = Header {
        grid_hash: field.grid_hash.clone(),
        x_nodes: field.x.clone(),
        n: field.values.ncols(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    out.write_all(MAGIC).map_err(io)?;
    out.write_all(&(json.len() as u64).to_le_bytes())
        .map_err(io)?;
    out.write_all(&json).map_err(io)?;
    for v in field.values.iter() {
        out.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads an iterate written for exactly this grid and x-grid.
pub fn load_checkpoint(path: &Path, grid: &VelocityGrid, cfg: &SlabConfig) -> Result<Array2<f64>> {
    let io = |e| Error::io(path, e);
    let format = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut input = BufReader::new(File::open(path).map_err(io)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(format("bad magic".into()));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len).map_err(io)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 24 {
        return Err(format("header too long".into()));
    }
    let mut json = vec![0u8; len];
    input.read_exact(&mut json).map_err(io)?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| format(e.to_string()))?;
    if header.grid_hash != grid.hash() || header.n != grid.len() {
        return Err(format(
            "checkpoint was written for a different velocity grid".into(),
        ));
    }
    if header.x_nodes != cfg.x_nodes {
        return Err(format(
            "checkpoint was written for a different x-grid".into(),
        ));
    }
    let mut buf = vec![0u8; 8 * cfg.nx() * grid.len()];
    input
        .read_exact(&mut buf)
        .map_err(|_| format("truncated data".into()))?;
    let values = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(Array2::from_shape_vec((cfg.nx(), grid.len()), values).expect("size checked"))
}
