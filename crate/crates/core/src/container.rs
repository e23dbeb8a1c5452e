//! Binary container for a built `H`.
//!
//! Little-endian layout:
//!
//! ```text
//! header   : b"MCCH", version u32 (= 1), k u8
//! component: lo u16, hi u16, span flag u8 (0 = interval),
//!            b1 u16, b2 u16, vertex count u32,
//!            labels u16[count],
//!            adjacency: count rows of ceil(count / 8) bytes, LSB first
//! ```
//!
//! Components follow in canonical order until end of input.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::bits::BitMatrix;
use crate::mcc::{expected_component_count, Component, MccGraph, MAX_K};

pub const MAGIC: &[u8; 4] = b"MCCH";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("not an H container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0} (this reader handles {VERSION})")]
    UnsupportedVersion(u32),
    #[error("truncated container")]
    Truncated,
    #[error("container does not match k = {k}: {detail}")]
    KMismatch { k: u32, detail: String },
    #[error("malformed component record {index}: {detail}")]
    Malformed { index: usize, detail: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn save_h<W: Write>(h: &MccGraph, mut sink: W) -> Result<(), ContainerError> {
    let mut buf = Vec::with_capacity(16 + h.vertex_count() * 4);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(h.k() as u8);
    for comp in h.components() {
        write_component(&mut buf, comp);
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

fn write_component(buf: &mut Vec<u8>, comp: &Component) {
    buf.extend_from_slice(&comp.lo.to_le_bytes());
    buf.extend_from_slice(&comp.hi.to_le_bytes());
    buf.push(0);
    buf.extend_from_slice(&comp.b1.to_le_bytes());
    buf.extend_from_slice(&comp.b2.to_le_bytes());
    let n = comp.vertex_count();
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    for &l in &comp.labels {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    let row_bytes = n.div_ceil(8);
    for u in 0..n {
        let row = comp.adj.row(u);
        for b in 0..row_bytes {
            buf.push((row[b / 8] >> ((b % 8) * 8)) as u8);
        }
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ContainerError> {
        let end = self.pos.checked_add(n).ok_or(ContainerError::Truncated)?;
        let out = self.data.get(self.pos..end).ok_or(ContainerError::Truncated)?;
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, ContainerError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ContainerError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, ContainerError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn at_end(&self) -> bool {
        self.pos == self.data.len()
    }
}

pub fn load_h<R: Read>(mut source: R) -> Result<MccGraph, ContainerError> {
    let mut data = Vec::new();
    source.read_to_end(&mut data)?;
    let mut cur = Cursor { data: &data, pos: 0 };
    if cur.take(4).map_err(|_| ContainerError::BadMagic)? != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(ContainerError::UnsupportedVersion(version));
    }
    let k = cur.u8()? as u32;
    if !(1..=MAX_K).contains(&k) {
        return Err(ContainerError::KMismatch {
            k,
            detail: format!("k outside 1..={MAX_K}"),
        });
    }
    let top = 1u32 << k;
    let mut components = Vec::new();
    while !cur.at_end() {
        let index = components.len();
        let malformed = |detail: String| ContainerError::Malformed { index, detail };
        let lo = cur.u16()?;
        let hi = cur.u16()?;
        let flag = cur.u8()?;
        let b1 = cur.u16()?;
        let b2 = cur.u16()?;
        let n = cur.u32()? as usize;
        if flag != 0 {
            return Err(malformed(format!("unsupported span flag {flag}")));
        }
        if lo == 0 || lo > hi {
            return Err(malformed(format!("bad span [{lo}, {hi}]")));
        }
        if hi as u32 > top {
            return Err(ContainerError::KMismatch {
                k,
                detail: format!("component {index} spans label {hi} > {top}"),
            });
        }
        // Guard the allocation against garbage counts before reading rows.
        let row_bytes = n.div_ceil(8);
        let needed = n
            .checked_mul(2)
            .and_then(|l| n.checked_mul(row_bytes).and_then(|a| a.checked_add(l)))
            .ok_or(ContainerError::Truncated)?;
        if needed > data.len() - cur.pos {
            return Err(ContainerError::Truncated);
        }
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let l = cur.u16()?;
            if l < lo || l > hi {
                return Err(malformed(format!("label {l} outside span [{lo}, {hi}]")));
            }
            labels.push(l);
        }
        let mut adj = BitMatrix::new(n);
        for u in 0..n {
            let bytes = cur.take(row_bytes)?;
            let row = adj.row_mut(u);
            for (b, &byte) in bytes.iter().enumerate() {
                row[b / 8] |= (byte as u64) << ((b % 8) * 8);
            }
            if !n.is_multiple_of(64) && row.last().is_some_and(|w| w >> (n % 64) != 0) {
                return Err(malformed(format!("row {u} has bits past the vertex count")));
            }
        }
        for u in 0..n {
            if adj.get(u, u) {
                return Err(malformed(format!("self-loop at {u}")));
            }
            for v in crate::bits::ones(adj.row(u)) {
                if !adj.get(v, u) {
                    return Err(malformed(format!("asymmetric edge ({u},{v})")));
                }
            }
        }
        components.push(Component {
            lo,
            hi,
            b1,
            b2,
            labels,
            adj,
        });
    }
    let expected = expected_component_count(k);
    if components.len() as u64 != expected {
        return Err(ContainerError::KMismatch {
            k,
            detail: format!("{} components, expected {expected}", components.len()),
        });
    }
    Ok(MccGraph::from_components(k, components))
}
