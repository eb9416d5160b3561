//! Parameter checkpoints.
//!
//! Format: a single ASCII header line `FEDBSS-PV v1 <count>\n` followed by
//! `<count>` little-endian IEEE-754 `f32` values, concatenated in the
//! parameter vector's flat segment order. The header makes files
//! self-describing enough to catch truncation and version drift; the payload
//! stays raw for exact round-trips.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::model::Architecture;
use crate::nn::param::ParamVector;

const MAGIC: &str = "FEDBSS-PV";
const VERSION: &str = "v1";

/// Writes `params` to `path`, overwriting any existing file.
pub fn write_params(path: &Path, params: &ParamVector<f32>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{MAGIC} {VERSION} {}", params.total_len())?;
    for v in params.iter_flat() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the flat payload of a checkpoint, validating the header, the length,
/// and that every value is finite.
pub fn read_flat(path: &Path) -> Result<Vec<f32>> {
    let err = |reason: String| Error::Checkpoint {
        path: path.to_path_buf(),
        reason,
    };
    let file = File::open(path)?;
    let mut r = BufReader::new(file);

    // Read the header byte-by-byte so the payload offset is unambiguous.
    let mut header = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte)? == 0 {
            return Err(err("missing header line".into()));
        }
        if byte[0] == b'\n' {
            break;
        }
        if header.len() >= 128 {
            return Err(err("header line too long".into()));
        }
        header.push(byte[0]);
    }
    let header = String::from_utf8(header).map_err(|_| err("header is not UTF-8".into()))?;
    let mut fields = header.split_ascii_whitespace();
    match (fields.next(), fields.next()) {
        (Some(MAGIC), Some(VERSION)) => {}
        (Some(MAGIC), Some(other)) => {
            return Err(err(format!("unsupported version {other:?}")));
        }
        _ => return Err(err(format!("bad magic in header {header:?}"))),
    }
    let count: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(format!("bad element count in header {header:?}")))?;
    if fields.next().is_some() {
        return Err(err(format!("trailing fields in header {header:?}")));
    }

    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != count * 4 {
        return Err(err(format!(
            "payload holds {} bytes, header promises {} values ({} bytes)",
            payload.len(),
            count,
            count * 4
        )));
    }
    let mut out = Vec::with_capacity(count);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("chunk of 4"));
        if !v.is_finite() {
            return Err(err(format!("non-finite value at element {i}")));
        }
        out.push(v);
    }
    Ok(out)
}

/// Reads a checkpoint back into the layout of `arch`.
///
/// Fails if the stored element count does not match the architecture.
pub fn read_params(path: &Path, arch: &Architecture) -> Result<ParamVector<f32>> {
    let flat = read_flat(path)?;
    let mut params = arch.param_template::<f32>();
    if flat.len() != params.total_len() {
        return Err(Error::Checkpoint {
            path: path.to_path_buf(),
            reason: format!(
                "holds {} values but the architecture needs {}",
                flat.len(),
                params.total_len()
            ),
        });
    }
    params.copy_from_flat(&flat).expect("length checked above");
    Ok(params)
}
