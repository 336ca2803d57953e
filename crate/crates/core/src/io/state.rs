//! Binary spectral-state snapshots.
//!
//! Layout (little endian): magic `RSPF`, format version `u32`, radius `u32`,
//! reality flag `u8`, basis tag length `u16` and bytes, slot count `u64`,
//! then `(re, im)` as `f64` pairs in slot order.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lattice::Basis;

const MAGIC: &[u8; 4] = b"RSPF";
pub const FORMAT_VERSION: u32 = 1;
/// Identifies the mode ordering and helical frame the amplitudes refer to.
pub const BASIS_TAG: &str = "helical/e3-frame/lex-order/v1";

pub fn encode_state(u: &SpectralField) -> Vec<u8> {
    encode_with_tag(u, BASIS_TAG)
}

fn encode_with_tag(u: &SpectralField, tag: &str) -> Vec<u8> {
    let amps = u.amplitudes();
    let mut out = Vec::with_capacity(32 + tag.len() + 16 * amps.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&u.radius().to_le_bytes());
    out.push(u.is_real() as u8);
    out.extend_from_slice(&(tag.len() as u16).to_le_bytes());
    out.extend_from_slice(tag.as_bytes());
    out.extend_from_slice(&(amps.len() as u64).to_le_bytes());
    for z in amps {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::StateFormat(format!("truncated while reading {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        Ok(self.take(N, what)?.try_into().unwrap())
    }
}

/// Decodes a snapshot. `basis` is reused when its radius matches.
pub fn decode_state(bytes: &[u8], basis: Option<Arc<Basis>>) -> Result<SpectralField> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::StateFormat("not a spectral state file".into()));
    }
    let version = u32::from_le_bytes(r.array("version")?);
    if version != FORMAT_VERSION {
        return Err(Error::StateFormat(format!(
            "format version {version}, this build reads {FORMAT_VERSION}"
        )));
    }
    let radius = u32::from_le_bytes(r.array("radius")?);
    let real = r.array::<1>("reality flag")?[0];
    let tag_len = u16::from_le_bytes(r.array("tag length")?) as usize;
    let tag = r.take(tag_len, "basis tag")?;
    if tag != BASIS_TAG.as_bytes() {
        return Err(Error::StateFormat(format!(
            "basis tag '{}' does not match '{BASIS_TAG}'",
            String::from_utf8_lossy(tag)
        )));
    }
    let count = u64::from_le_bytes(r.array("slot count")?);
    let basis = match basis {
        Some(b) if b.radius() == radius => b,
        Some(b) => {
            return Err(Error::Dimension {
                expected: b.radius(),
                found: radius,
            })
        }
        None => Arc::new(Basis::new(radius)?),
    };
    let slots = basis.num_slots() as u64;
    let payload = (bytes.len() - r.pos) as u64;
    if count != slots || payload != 16 * slots {
        return Err(Error::StateFormat(format!(
            "radius {radius} needs {slots} amplitudes ({} bytes); header says {count}, payload has {payload} bytes",
            16 * slots
        )));
    }
    let amps: Vec<Complex64> = r.bytes[r.pos..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let field = SpectralField::from_amplitudes(basis, amps)?;
    if real == 1 && !field.is_real() {
        return Err(Error::StateFormat("header marks the field real but amplitudes are not conjugate-symmetric".into()));
    }
    Ok(field)
}

pub fn save_state(u: &SpectralField, path: &Path) -> Result<()> {
    fs::write(path, encode_state(u))?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<SpectralField> {
    decode_state(&fs::read(path)?, None)
}
