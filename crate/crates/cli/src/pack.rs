//! Block file format: row-major bits, each row MSB-first and padded to a
//! whole byte.

use anyhow::{bail, Result};

pub fn row_bytes(width: usize) -> usize {
    width.div_ceil(8)
}

pub fn block_bytes(width: usize) -> usize {
    width * row_bytes(width)
}

/// Splits `data` into square blocks of `width x width` bits.
pub fn unpack_blocks(data: &[u8], width: usize, what: &str) -> Result<Vec<Vec<u8>>> {
    let size = block_bytes(width);
    if data.is_empty() || !data.len().is_multiple_of(size) {
        bail!(
            "{what} file holds {} bytes, expected a positive multiple of {size} ({width}x{width} bits per block)",
            data.len()
        );
    }
    Ok(data
        .chunks_exact(size)
        .map(|b| unpack_block(b, width))
        .collect())
}

fn unpack_block(block: &[u8], width: usize) -> Vec<u8> {
    let mut bits = Vec::with_capacity(width * width);
    for row in block.chunks_exact(row_bytes(width)) {
        bits.extend((0..width).map(|c| (row[c / 8] >> (7 - c % 8)) & 1));
    }
    bits
}

pub fn pack_block(bits: &[u8], width: usize, out: &mut Vec<u8>) {
    debug_assert_eq!(bits.len(), width * width);
    for row in bits.chunks_exact(width) {
        let mut bytes = vec![0u8; row_bytes(width)];
        for (c, &b) in row.iter().enumerate() {
            bytes[c / 8] |= (b & 1) << (7 - c % 8);
        }
        out.extend_from_slice(&bytes);
    }
}
