//! On-disk forms of a [`CutTable`].
//!
//! Binary layout, all fields little-endian:
//!
//! ```text
//! header (32 bytes)
//!   0  magic     b"OPTW"
//!   4  version   u16
//!   6  w_min     u16
//!   8  w_max     u32
//!  12  w_proof   u32   (0 when no length admits an optimal cut)
//!  16  delta     f64
//!  24  rho       f64
//! rows (20 bytes each, one per L in [w_min, w_max])
//!   0  nu_split  u32
//!   4  t_crit    f32
//!   8  f_crit    f32
//!  12  df        f32
//!  16  rho_temp  f32
//! ```
//!
//! `nu` is not stored: it is `nu_split / L` for `L >= w_proof` and `0.5`
//! below.

use std::io::{Read, Write};

use super::table::{CutRow, CutTable};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"OPTW";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;
pub const ROW_LEN: usize = 20;

pub const CSV_HEADER: &str = "L,nu,nu_split,t_crit,f_crit,df,rho_temp";

impl CutTable {
    /// Size in bytes of the binary encoding.
    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + ROW_LEN * self.rows.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.w_min as u16).to_le_bytes());
        out.extend_from_slice(&(self.w_max as u32).to_le_bytes());
        out.extend_from_slice(&(self.w_proof.unwrap_or(0) as u32).to_le_bytes());
        out.extend_from_slice(&self.delta.to_le_bytes());
        out.extend_from_slice(&self.rho.to_le_bytes());
        for row in &self.rows {
            out.extend_from_slice(&row.nu_split.to_le_bytes());
            for v in [row.t_crit, row.f_crit, row.df, row.rho_temp] {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        out
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let u16_at = |o: usize| u16::from_le_bytes(bytes[o..o + 2].try_into().unwrap());
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f32_at = |o: usize| f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as f64;
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());

        let version = u16_at(4);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let w_min = u16_at(6) as usize;
        let w_max = u32_at(8) as usize;
        let w_proof = match u32_at(12) as usize {
            0 => None,
            l => Some(l),
        };
        let delta = f64_at(16);
        let rho = f64_at(24);
        if w_min < 4 || w_max < w_min {
            return Err(Error::Format(format!("invalid window bounds {w_min}..={w_max}")));
        }
        let n_rows = w_max - w_min + 1;
        let expected = HEADER_LEN + ROW_LEN * n_rows;
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} bytes for {n_rows} rows, found {}",
                bytes.len()
            )));
        }
        let mut rows = Vec::with_capacity(n_rows);
        for i in 0..n_rows {
            let len = w_min + i;
            let o = HEADER_LEN + ROW_LEN * i;
            let nu_split = u32_at(o);
            if nu_split < 2 || nu_split as usize > len - 2 {
                return Err(Error::Format(format!("row L={len}: split {nu_split} out of range")));
            }
            let solved = w_proof.is_some_and(|p| len >= p);
            let nu = if solved { nu_split as f64 / len as f64 } else { 0.5 };
            rows.push(CutRow {
                nu,
                nu_split,
                t_crit: f32_at(o + 4),
                f_crit: f32_at(o + 8),
                df: f32_at(o + 12),
                rho_temp: f32_at(o + 16),
            });
        }
        Ok(Self { delta, rho, w_min, w_max, w_proof, rows })
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    /// Human-readable export, one row per window length.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for (i, row) in self.rows.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.w_min + i,
                row.nu,
                row.nu_split,
                row.t_crit,
                row.f_crit,
                row.df,
                row.rho_temp
            )?;
        }
        Ok(())
    }
}
