//! On-disk stripe: a fixed little-endian header followed by the encoded
//! columns, one contiguous byte range per column.
//!
//! ```text
//! "AERC1" | family u8 | p u32 | r u32 | block_size u32 | payload_length u64 | body
//! ```

use crate::codes::{encode_bytes, extract_bytes, Code, CodeFamily, CodeGrid};
use crate::error::{Error, Result};
use crate::grid::Block;

pub const MAGIC: &[u8; 5] = b"AERC1";
pub const HEADER_LEN: usize = 5 + 1 + 4 + 4 + 4 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub family: CodeFamily,
    pub p: u32,
    /// Parity columns (the redundancy).
    pub r: u32,
    pub block_size: u32,
    pub payload_length: u64,
}

impl Header {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..5].copy_from_slice(MAGIC);
        out[5] = self.family.tag();
        out[6..10].copy_from_slice(&self.p.to_le_bytes());
        out[10..14].copy_from_slice(&self.r.to_le_bytes());
        out[14..18].copy_from_slice(&self.block_size.to_le_bytes());
        out[18..26].copy_from_slice(&self.payload_length.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Container(format!("{} bytes is too short for a header", bytes.len())));
        }
        if &bytes[..5] != MAGIC {
            return Err(Error::Container("bad magic".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let r = u32_at(10);
        Ok(Self {
            family: CodeFamily::from_tag(bytes[5], r)?,
            p: u32_at(6),
            r,
            block_size: u32_at(14),
            payload_length: u64::from_le_bytes(bytes[18..26].try_into().unwrap()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub header: Header,
    pub grid: CodeGrid,
}

/// Smallest block size whose stripe holds `len` bytes (at least 1).
pub fn auto_block_size(code: &Code, len: usize) -> usize {
    len.div_ceil(code.info_blocks() as usize).max(1)
}

impl Container {
    pub fn encode(code: Code, block_size: Option<usize>, data: &[u8]) -> Result<Self> {
        let block_size = block_size.unwrap_or_else(|| auto_block_size(&code, data.len()));
        let block_size_u32 = u32::try_from(block_size)
            .map_err(|_| Error::InvalidParameters(format!("block size {block_size} is too large")))?;
        let grid = encode_bytes(code, data, block_size)?;
        Ok(Self {
            header: Header {
                family: code.family(),
                p: code.p().get(),
                r: code.redundancy() as u32,
                block_size: block_size_u32,
                payload_length: data.len() as u64,
            },
            grid,
        })
    }

    pub fn code(&self) -> &Code {
        self.grid.code()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header.to_bytes().to_vec();
        for block in self.grid.columns().iter().flatten() {
            out.extend_from_slice(block.as_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = Header::parse(bytes)?;
        let code = Code::new(header.family, header.p)?;
        if header.r as usize != code.redundancy() {
            return Err(Error::Container(format!(
                "header r = {} does not match {} with p = {}",
                header.r,
                header.family,
                header.p
            )));
        }
        let bs = header.block_size as usize;
        if bs == 0 {
            return Err(Error::Container("block size 0".into()));
        }
        let capacity = code.info_blocks() * bs as u64;
        if header.payload_length > capacity {
            return Err(Error::Container(format!(
                "payload length {} exceeds capacity {capacity}",
                header.payload_length
            )));
        }
        let rows = code.rows() as usize;
        let body = &bytes[HEADER_LEN..];
        let want = code.n() as usize * rows * bs;
        if body.len() != want {
            return Err(Error::Container(format!("body has {} bytes, expected {want}", body.len())));
        }
        let columns = body
            .chunks(rows * bs)
            .map(|col| col.chunks(bs).map(Block::from_bytes).collect())
            .collect();
        Ok(Self {
            header,
            grid: CodeGrid::from_columns(code, bs, columns)?,
        })
    }

    /// The original payload.
    pub fn extract(&self) -> Vec<u8> {
        extract_bytes(&self.grid, self.header.payload_length as usize)
    }
}
