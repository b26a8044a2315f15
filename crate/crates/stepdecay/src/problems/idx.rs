//! IDX binary format (the MNIST convention): big-endian magic and dimension
//! header followed by raw unsigned bytes.

use std::fs;
use std::path::Path;

use ndarray::Array1;
use thiserror::Error;

use super::LabeledSample;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Error)]
pub enum IdxError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("truncated payload: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("image/label count mismatch: {images} images vs {labels} labels")]
    DimensionMismatch { images: usize, labels: usize },
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn u32(&mut self) -> Result<u32, IdxError> {
        if self.pos + 4 > self.bytes.len() {
            return Err(IdxError::Truncated {
                needed: self.pos + 4,
                have: self.bytes.len(),
            });
        }
        let v = u32::from_be_bytes(self.bytes[self.pos..self.pos + 4].try_into().unwrap());
        self.pos += 4;
        Ok(v)
    }

    fn payload(&mut self, len: usize) -> Result<&'a [u8], IdxError> {
        if self.pos + len > self.bytes.len() {
            return Err(IdxError::Truncated {
                needed: self.pos + len,
                have: self.bytes.len(),
            });
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }
}

/// Parses an IDX image file into per-image vectors with pixels scaled to
/// `[0, 1]`.
pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Vec<Array1<f64>>, IdxError> {
    let bytes = fs::read(path)?;
    parse_images(&bytes)
}

pub(crate) fn parse_images(bytes: &[u8]) -> Result<Vec<Array1<f64>>, IdxError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.u32()?;
    if magic != IMAGES_MAGIC {
        return Err(IdxError::BadMagic {
            expected: IMAGES_MAGIC,
            found: magic,
        });
    }
    let count = r.u32()? as usize;
    let rows = r.u32()? as usize;
    let cols = r.u32()? as usize;
    let pixels = rows * cols;
    let payload = r.payload(count * pixels)?;
    Ok(payload
        .chunks_exact(pixels.max(1))
        .take(count)
        .map(|chunk| chunk.iter().map(|&b| b as f64 / 255.0).collect())
        .collect())
}

/// Parses an IDX label file.
pub fn load_idx_labels(path: impl AsRef<Path>) -> Result<Vec<u8>, IdxError> {
    let bytes = fs::read(path)?;
    parse_labels(&bytes)
}

pub(crate) fn parse_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.u32()?;
    if magic != LABELS_MAGIC {
        return Err(IdxError::BadMagic {
            expected: LABELS_MAGIC,
            found: magic,
        });
    }
    let count = r.u32()? as usize;
    Ok(r.payload(count)?.to_vec())
}

/// Loads an image/label pair, keeping only the two requested digit classes
/// mapped to labels `{−1, +1}`.
pub fn load_idx_pair(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    negative_digit: u8,
    positive_digit: u8,
) -> Result<Vec<LabeledSample>, IdxError> {
    let images = load_idx_images(images_path)?;
    let labels = load_idx_labels(labels_path)?;
    if images.len() != labels.len() {
        return Err(IdxError::DimensionMismatch {
            images: images.len(),
            labels: labels.len(),
        });
    }
    Ok(images
        .into_iter()
        .zip(labels)
        .filter_map(|(x, digit)| {
            let label = if digit == negative_digit {
                -1.0
            } else if digit == positive_digit {
                1.0
            } else {
                return None;
            };
            Some(LabeledSample { x, label })
        })
        .collect())
}
