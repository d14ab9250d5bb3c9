//! Binary coefficient cache, one file per table degree.
//!
//! ```text
//! "GNTB" | version u32 | L u32 | ny u64 | y records | nz u64 | z records | crc32 u32
//! record = l u16 | m i16 | u i16 | v i16 | re f64 | im f64
//! ```
//!
//! Everything is little-endian; the CRC covers every preceding byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use super::table::{build_conversion_table, ConversionTable, TableEntry};
use super::{install_table, lookup_table};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GNTB";
pub const FORMAT_VERSION: u32 = 1;
const RECORD_BYTES: usize = 2 + 2 + 2 + 2 + 8 + 8;

pub fn cache_file_name(lmax: usize) -> String {
    format!("gaunt_table_L{lmax:02}.gntb")
}

pub fn cache_file_path(dir: &Path, lmax: usize) -> PathBuf {
    dir.join(cache_file_name(lmax))
}

fn put_entries(buf: &mut Vec<u8>, entries: &[TableEntry]) {
    buf.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for e in entries {
        buf.extend_from_slice(&e.l.to_le_bytes());
        buf.extend_from_slice(&e.m.to_le_bytes());
        buf.extend_from_slice(&e.u.to_le_bytes());
        buf.extend_from_slice(&e.v.to_le_bytes());
        buf.extend_from_slice(&e.value.re.to_le_bytes());
        buf.extend_from_slice(&e.value.im.to_le_bytes());
    }
}

pub fn encode_table(t: &ConversionTable) -> Vec<u8> {
    let mut buf = Vec::with_capacity(28 + RECORD_BYTES * (t.y_entries().len() + t.z_entries().len()));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(t.lmax() as u32).to_le_bytes());
    put_entries(&mut buf, t.y_entries());
    put_entries(&mut buf, t.z_entries());
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let chunk = self.bytes.get(self.pos..end).ok_or_else(|| Error::Format("file is truncated".into()))?;
        self.pos = end;
        Ok(chunk.try_into().expect("slice has length N"))
    }

    fn entries(&mut self) -> Result<Vec<TableEntry>> {
        let n = u64::from_le_bytes(self.take()?) as usize;
        if n > (self.bytes.len() - self.pos) / RECORD_BYTES {
            return Err(Error::Format(format!("record count {n} exceeds the file size")));
        }
        (0..n)
            .map(|_| {
                Ok(TableEntry {
                    l: u16::from_le_bytes(self.take()?),
                    m: i16::from_le_bytes(self.take()?),
                    u: i16::from_le_bytes(self.take()?),
                    v: i16::from_le_bytes(self.take()?),
                    value: Complex64::new(f64::from_le_bytes(self.take()?), f64::from_le_bytes(self.take()?)),
                })
            })
            .collect()
    }
}

pub fn decode_table(bytes: &[u8]) -> Result<ConversionTable> {
    if bytes.len() < 4 + 4 + 4 + 8 + 8 + 4 {
        return Err(Error::Format("file is too short".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    if &body[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let stored = u32::from_le_bytes(tail.try_into().expect("4-byte tail"));
    if crc32fast::hash(body) != stored {
        return Err(Error::Format("CRC mismatch".into()));
    }
    let mut r = Reader { bytes: body, pos: 4 };
    let version = u32::from_le_bytes(r.take()?);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let lmax = u32::from_le_bytes(r.take()?) as usize;
    let y = r.entries()?;
    let z = r.entries()?;
    if r.pos != body.len() {
        return Err(Error::Format("trailing bytes after the z records".into()));
    }
    ConversionTable::from_entries(lmax, y, z)
}

pub fn write_table_file(dir: &Path, t: &ConversionTable) -> Result<PathBuf> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let path = cache_file_path(dir, t.lmax());
    // write-then-rename keeps concurrent readers from seeing partial files
    let tmp = dir.join(format!("{}.{}.tmp", cache_file_name(t.lmax()), std::process::id()));
    fs::write(&tmp, encode_table(t)).map_err(io(&tmp))?;
    fs::rename(&tmp, &path).map_err(io(&path))?;
    Ok(path)
}

pub fn read_table_file(path: &Path) -> Result<ConversionTable> {
    let bytes = fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    decode_table(&bytes)
}

/// How [`load_or_build`] obtained its table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheOutcome {
    /// Already present in process memory.
    InMemory,
    /// Read from a valid cache file.
    Loaded,
    /// No cache file existed; built and written.
    Built,
    /// The cache file was unreadable or invalid; rebuilt and overwritten.
    Rebuilt(String),
}

/// Table of degree `lmax` from memory, the cache directory, or a fresh build,
/// in that order. The result is installed in the in-process registry.
pub fn load_or_build(dir: &Path, lmax: usize) -> Result<(Arc<ConversionTable>, CacheOutcome)> {
    if let Some(t) = lookup_table(lmax) {
        return Ok((t, CacheOutcome::InMemory));
    }
    let path = cache_file_path(dir, lmax);
    let outcome = match read_table_file(&path) {
        Ok(t) if t.lmax() == lmax => return Ok((install_table(t), CacheOutcome::Loaded)),
        Ok(t) => CacheOutcome::Rebuilt(format!("file holds degree {} instead of {lmax}", t.lmax())),
        Err(Error::Io { source, .. }) if source.kind() == std::io::ErrorKind::NotFound => CacheOutcome::Built,
        Err(e) => CacheOutcome::Rebuilt(e.to_string()),
    };
    let t = build_conversion_table(lmax)?;
    write_table_file(dir, &t)?;
    Ok((install_table(t), outcome))
}
