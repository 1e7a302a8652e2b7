//! Binary snapshot of a many-body run.
//!
//! Little-endian layout:
//!
//! | offset | size      | content                                   |
//! |--------|-----------|-------------------------------------------|
//! | 0      | 4         | magic `PFCK`                              |
//! | 4      | 4         | format version, `u32` (= 1)               |
//! | 8      | 32        | sha256 of the resolved configuration      |
//! | 40     | 8         | particle number `N`, `u64`                |
//! | 48     | 8         | sample index, `u64`                       |
//! | 56     | 8         | time `t`, `f64`                           |
//! | 64     | 8         | state dimension `D`, `u64`                |
//! | 72     | 16 D      | amplitudes, `(re, im)` as `f64` pairs     |
//!
//! The mean-field trajectory is not stored: it is cheap and deterministic, and
//! is recomputed on resume.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::C64;

pub const MAGIC: &[u8; 4] = b"PFCK";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 72;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config_hash: [u8; 32],
    pub particles: usize,
    pub sample_index: usize,
    pub time: f64,
    pub amplitudes: Vec<C64>,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * self.amplitudes.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.config_hash);
        out.extend_from_slice(&(self.particles as u64).to_le_bytes());
        out.extend_from_slice(&(self.sample_index as u64).to_le_bytes());
        out.extend_from_slice(&self.time.to_le_bytes());
        out.extend_from_slice(&(self.amplitudes.len() as u64).to_le_bytes());
        for z in &self.amplitudes {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::Checkpoint(msg.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(bad("file shorter than the header"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(bad("bad magic"));
        }
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let dim = u64_at(64) as usize;
        if bytes.len() != HEADER_LEN + 16 * dim {
            return Err(Error::Checkpoint(format!(
                "expected {} bytes for dimension {dim}, found {}",
                HEADER_LEN + 16 * dim,
                bytes.len()
            )));
        }
        let amplitudes = (0..dim)
            .map(|i| {
                let o = HEADER_LEN + 16 * i;
                C64::new(f64_at(o), f64_at(o + 8))
            })
            .collect();
        Ok(Self {
            config_hash: bytes[8..40].try_into().unwrap(),
            particles: u64_at(40) as usize,
            sample_index: u64_at(48) as usize,
            time: f64_at(56),
            amplitudes,
        })
    }

    /// Writes through a temporary file so an interrupted write never leaves a
    /// truncated checkpoint behind.
    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("ckpt.tmp");
        {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}
