//! Binary cache format for assembled collision tensors.
//!
//! Layout (little-endian):
//! magic `HBLTZA01` | version u32 | eta f64 | M0 u32 | drop floor f64 |
//! entry count u64 | entries (k u32, i u32, j u32, value f64)* |
//! FNV-1a 64 checksum of everything between magic and checksum.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{CollisionTensor, TensorEntry};
use crate::error::{CacheError, Error, Result};

const MAGIC: &[u8; 8] = b"HBLTZA01";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 8 + 4 + 8 + 8;
const ENTRY_LEN: usize = 4 + 4 + 4 + 8;

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// Parsed cache-file header.
#[derive(Debug, Clone, Copy)]
pub struct TensorHeader {
    pub version: u32,
    pub eta: f64,
    pub m0: u32,
    pub drop_floor: f64,
    pub entry_count: u64,
}

fn parse_header(bytes: &[u8]) -> Result<TensorHeader, CacheError> {
    if bytes.len() < 8 {
        return Err(CacheError::Truncated);
    }
    if &bytes[..8] != MAGIC {
        return Err(CacheError::BadMagic);
    }
    if bytes.len() < 8 + HEADER_LEN {
        return Err(CacheError::Truncated);
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(CacheError::UnsupportedVersion(version));
    }
    Ok(TensorHeader {
        version,
        eta: f64_at(12),
        m0: u32_at(20),
        drop_floor: f64_at(24),
        entry_count: u64_at(32),
    })
}

/// Reads and validates only the fixed-size header (no checksum pass).
pub fn read_header(path: &Path) -> Result<TensorHeader> {
    let mut file = File::open(path).map_err(CacheError::Io)?;
    let mut buf = [0u8; 8 + HEADER_LEN];
    let mut filled = 0;
    while filled < buf.len() {
        let n = file.read(&mut buf[filled..]).map_err(CacheError::Io)?;
        if n == 0 {
            break;
        }
        filled += n;
    }
    Ok(parse_header(&buf[..filled])?)
}

impl CollisionTensor {
    /// Writes the tensor; the round trip through [`CollisionTensor::load`]
    /// is bit-exact.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(CacheError::Io)?;
        let mut out = BufWriter::new(file);
        let mut hash = Fnv1a::new();
        let put = |out: &mut BufWriter<File>, hash: &mut Fnv1a, bytes: &[u8]| -> Result<()> {
            hash.update(bytes);
            out.write_all(bytes).map_err(CacheError::Io)?;
            Ok(())
        };
        out.write_all(MAGIC).map_err(CacheError::Io)?;
        put(&mut out, &mut hash, &VERSION.to_le_bytes())?;
        put(&mut out, &mut hash, &self.eta.to_le_bytes())?;
        put(&mut out, &mut hash, &self.m0.to_le_bytes())?;
        put(&mut out, &mut hash, &self.drop_floor.to_le_bytes())?;
        put(
            &mut out,
            &mut hash,
            &(self.entries.len() as u64).to_le_bytes(),
        )?;
        for e in &self.entries {
            put(&mut out, &mut hash, &e.k.to_le_bytes())?;
            put(&mut out, &mut hash, &e.i.to_le_bytes())?;
            put(&mut out, &mut hash, &e.j.to_le_bytes())?;
            put(&mut out, &mut hash, &e.value.to_le_bytes())?;
        }
        out.write_all(&hash.0.to_le_bytes())
            .map_err(CacheError::Io)?;
        out.flush().map_err(CacheError::Io)?;
        Ok(())
    }

    /// Loads a tensor, validating magic, version, length and checksum.
    pub fn load(path: &Path) -> Result<CollisionTensor> {
        let bytes = std::fs::read(path).map_err(CacheError::Io)?;
        let header = parse_header(&bytes)?;
        let body_len = 8 + HEADER_LEN + header.entry_count as usize * ENTRY_LEN;
        if bytes.len() != body_len + 8 {
            return Err(CacheError::Truncated.into());
        }
        let mut hash = Fnv1a::new();
        hash.update(&bytes[8..body_len]);
        let stored = u64::from_le_bytes(bytes[body_len..].try_into().unwrap());
        if stored != hash.0 {
            return Err(CacheError::ChecksumMismatch {
                stored,
                computed: hash.0,
            }
            .into());
        }
        let mut entries = Vec::with_capacity(header.entry_count as usize);
        let mut off = 8 + HEADER_LEN;
        for _ in 0..header.entry_count {
            entries.push(TensorEntry {
                k: u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()),
                i: u32::from_le_bytes(bytes[off + 4..off + 8].try_into().unwrap()),
                j: u32::from_le_bytes(bytes[off + 8..off + 12].try_into().unwrap()),
                value: f64::from_le_bytes(bytes[off + 12..off + 20].try_into().unwrap()),
            });
            off += ENTRY_LEN;
        }
        Ok(CollisionTensor {
            eta: header.eta,
            m0: header.m0,
            drop_floor: header.drop_floor,
            entries,
        })
    }

    /// Loads a tensor and rejects it as stale when the header does not
    /// match the requested kernel parameters (eta compared bit-exactly,
    /// both values originating from the same config parse).
    pub fn load_expecting(path: &Path, eta: f64, m0: u32) -> Result<CollisionTensor> {
        let tensor = Self::load(path)?;
        if tensor.eta.to_bits() != eta.to_bits() || tensor.m0 != m0 {
            return Err(Error::Cache(CacheError::Stale {
                file_eta: tensor.eta,
                file_m0: tensor.m0,
                want_eta: eta,
                want_m0: m0,
            }));
        }
        Ok(tensor)
    }
}
