//! On-disk table cache.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic    8 bytes  "DIVSUMTB"
//! version  u32
//! x_max    u64
//! tau      x_max × u32
//! mu       x_max × i8
//! phi      x_max × u32
//! spf      x_max × u32
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ArithTables;

pub const CACHE_MAGIC: [u8; 8] = *b"DIVSUMTB";
pub const CACHE_VERSION: u32 = 1;

const HEADER_LEN: u64 = 8 + 4 + 8;

pub fn write_cache(tables: &ArithTables, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&tables.x_max().to_le_bytes())?;
    for &v in tables.tau_values() {
        w.write_all(&v.to_le_bytes())?;
    }
    for &v in tables.mu_values() {
        w.write_all(&v.to_le_bytes())?;
    }
    for &v in tables.phi_values() {
        w.write_all(&v.to_le_bytes())?;
    }
    for &v in tables.spf_values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<ArithTables> {
    let bad = |reason: String| Error::Cache { path: path.to_path_buf(), reason };
    let file = File::open(path)?;
    let file_len = file.metadata()?.len();
    let mut r = BufReader::new(file);

    let mut header = [0u8; HEADER_LEN as usize];
    r.read_exact(&mut header)
        .map_err(|_| bad("truncated header".into()))?;
    if header[..8] != CACHE_MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(bad(format!("version {version}, expected {CACHE_VERSION}")));
    }
    let x_max = u64::from_le_bytes(header[12..20].try_into().unwrap());
    if x_max == 0 || x_max > u32::MAX as u64 {
        return Err(bad(format!("implausible x_max {x_max}")));
    }
    let expected = HEADER_LEN + x_max * 13;
    if file_len != expected {
        return Err(bad(format!("length {file_len}, expected {expected} for x_max {x_max}")));
    }

    let n = x_max as usize;
    let read_u32s = |r: &mut BufReader<File>| -> Result<Vec<u32>> {
        let mut bytes = vec![0u8; n * 4];
        r.read_exact(&mut bytes)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(0);
        out.extend(bytes.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())));
        Ok(out)
    };
    let tau = read_u32s(&mut r)?;
    let mut mu_bytes = vec![0u8; n];
    r.read_exact(&mut mu_bytes)?;
    let mut mu = Vec::with_capacity(n + 1);
    mu.push(0i8);
    mu.extend(mu_bytes.into_iter().map(|b| b as i8));
    let phi = read_u32s(&mut r)?;
    let spf = read_u32s(&mut r)?;

    if tau[1] != 1 || mu[1] != 1 || phi[1] != 1 {
        return Err(bad("entry n=1 is not (1, 1, 1)".into()));
    }
    Ok(ArithTables::from_parts(x_max, tau, mu, phi, spf))
}
