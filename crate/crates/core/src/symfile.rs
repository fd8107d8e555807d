//! Binary symbol-file format shared with external encoders/decoders.
//!
//! Layout (all little-endian):
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `b"DTAT"`                         |
//! | 4      | 2    | version, `u16` = 1                      |
//! | 6      | 2    | flags, `u16`; bit 0 set = complex       |
//! | 8      | 8    | symbol count, `u64`                     |
//! | 16     | ...  | `f32` payload, complex interleaved I, Q |
//!
//! An optional JSON sidecar carries image dimensions and mapper side
//! information.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stream::{Layout, SymbolStream};

pub const MAGIC: [u8; 4] = *b"DTAT";
pub const VERSION: u16 = 1;
pub const FLAG_COMPLEX: u16 = 1;
const HEADER_LEN: usize = 16;

/// Serializes a stream; values are rounded to `f32`.
pub fn encode_symbols<T: Real>(stream: &SymbolStream<T>) -> Vec<u8> {
    let raw = stream.raw();
    let mut out = Vec::with_capacity(HEADER_LEN + raw.len() * 4);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let flags = match stream.layout() {
        Layout::Real => 0,
        Layout::Complex => FLAG_COMPLEX,
    };
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&(stream.len() as u64).to_le_bytes());
    for v in raw {
        let f = v.to_f32().unwrap_or(f32::NAN);
        out.extend_from_slice(&f.to_le_bytes());
    }
    out
}

pub fn decode_symbols(bytes: &[u8]) -> Result<SymbolStream<f32>> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedPayload {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(Error::VersionMismatch(version));
    }
    let flags = u16::from_le_bytes([bytes[6], bytes[7]]);
    let layout = if flags & FLAG_COMPLEX != 0 {
        Layout::Complex
    } else {
        Layout::Real
    };
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let payload = &bytes[HEADER_LEN..];
    let expected = count
        .checked_mul(layout.width() as u64 * 4)
        .ok_or(Error::TruncatedPayload {
            expected: u64::MAX,
            found: payload.len() as u64,
        })?;
    if (payload.len() as u64) < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len() as u64,
        });
    }
    let data = payload[..expected as usize]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    SymbolStream::from_raw(data, layout)
}

pub fn write_symbol_file<T: Real>(stream: &SymbolStream<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_symbols(stream))?;
    Ok(())
}

pub fn read_symbol_file(path: impl AsRef<Path>) -> Result<SymbolStream<f32>> {
    decode_symbols(&fs::read(path)?)
}

pub fn write_sidecar<M: Serialize>(meta: &M, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, serde_json::to_vec_pretty(meta)?)?;
    Ok(())
}

pub fn read_sidecar<M: DeserializeOwned>(path: impl AsRef<Path>) -> Result<M> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}
