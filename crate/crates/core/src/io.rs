//! Portable on-disk formats: binary field snapshots (JSON header + raw
//! little-endian IEEE-754 arrays) and CSV emission with fixed
//! 17-significant-digit scientific formatting for byte-stable goldens.

use crate::grid::GridField;
use crate::series::{ReceiverAxis, ScatterData};
use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 6] = b"BSGF1\n";

/// JSON header of the binary format; `meta` keys are sorted, so identical
/// inputs produce identical bytes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinaryHeader {
    pub dtype: String,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub offset: Vec<f64>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

fn write_binary(path: &Path, header: &BinaryHeader, payload: &[f64]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    let header_json = serde_json::to_vec(header).expect("header serializes");
    file.write_all(MAGIC)?;
    file.write_all(&(header_json.len() as u64).to_le_bytes())?;
    file.write_all(&header_json)?;
    for v in payload {
        file.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_binary(path: &Path) -> Result<(BinaryHeader, Vec<f64>)> {
    let mut file = std::fs::File::open(path)?;
    let mut magic = [0u8; 6];
    file.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Domain(format!("{}: not a field snapshot", path.display())));
    }
    let mut len = [0u8; 8];
    file.read_exact(&mut len)?;
    let header_len = u64::from_le_bytes(len) as usize;
    let mut header_json = vec![0u8; header_len];
    file.read_exact(&mut header_json)?;
    let header: BinaryHeader = serde_json::from_slice(&header_json)
        .map_err(|e| Error::Domain(format!("bad snapshot header: {e}")))?;
    let mut rest = Vec::new();
    file.read_to_end(&mut rest)?;
    if rest.len() % 8 != 0 {
        return Err(Error::Domain("snapshot payload is not a whole number of f64".into()));
    }
    let payload: Vec<f64> = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((header, payload))
}

pub fn write_field_f64(path: &Path, field: &GridField<f64>, meta: BTreeMap<String, String>) -> Result<()> {
    let header = BinaryHeader {
        dtype: "f64".into(),
        shape: field.shape().to_vec(),
        spacing: field.spacing().to_vec(),
        offset: field.offset().to_vec(),
        meta,
    };
    write_binary(path, &header, field.values())
}

pub fn read_field_f64(path: &Path) -> Result<GridField<f64>> {
    let (header, payload) = read_binary(path)?;
    if header.dtype != "f64" {
        return Err(Error::Domain(format!("expected f64 snapshot, found {}", header.dtype)));
    }
    GridField::new(payload, header.shape, header.spacing, header.offset)
}

pub fn write_field_c64(path: &Path, field: &GridField<C64>, meta: BTreeMap<String, String>) -> Result<()> {
    let header = BinaryHeader {
        dtype: "c64".into(),
        shape: field.shape().to_vec(),
        spacing: field.spacing().to_vec(),
        offset: field.offset().to_vec(),
        meta,
    };
    let mut payload = Vec::with_capacity(field.len() * 2);
    for v in field.values() {
        payload.push(v.re);
        payload.push(v.im);
    }
    write_binary(path, &header, &payload)
}

pub fn read_field_c64(path: &Path) -> Result<GridField<C64>> {
    let (header, payload) = read_binary(path)?;
    if header.dtype != "c64" {
        return Err(Error::Domain(format!("expected c64 snapshot, found {}", header.dtype)));
    }
    let values: Vec<C64> = payload.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
    GridField::new(values, header.shape, header.spacing, header.offset)
}

/// Receiver data as CSV rows `source, receiver, re, im`.
pub fn write_scatter_csv(path: &Path, data: &ScatterData, meta_lines: &[String]) -> Result<()> {
    let mut rows = Vec::with_capacity(data.n_receivers() * data.n_sources());
    for s in 0..data.n_sources() {
        for r in 0..data.n_receivers() {
            rows.push(vec![
                s.to_string(),
                r.to_string(),
                fmt_g17(data.values[[r, s]].re),
                fmt_g17(data.values[[r, s]].im),
            ]);
        }
    }
    let mut lines = meta_lines.to_vec();
    match data.recv_axis {
        ReceiverAxis::Points => lines.push("recv_axis=points".into()),
        ReceiverAxis::Grid { spacing } => lines.push(format!("recv_axis=grid spacing={}", fmt_g17(spacing))),
    }
    write_csv(path, &lines, &["source", "receiver", "re_phi", "im_phi"], &rows)
}

/// Fixed 17-significant-digit scientific formatting (golden-file stable).
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

/// Writes a CSV with `#`-prefixed metadata lines, a header row, then rows.
pub fn write_csv(path: &Path, meta_lines: &[String], columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    for m in meta_lines {
        out.push_str("# ");
        out.push_str(m);
        out.push('\n');
    }
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
