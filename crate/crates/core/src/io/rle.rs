//! Row-major run-length encoding.
//!
//! Runs alternate background/foreground and always start with a background
//! run, which is zero when the first pixel is foreground. The canonical
//! encoding has no zero-length runs other than that leading one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, Dims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RunOrder {
    #[default]
    #[serde(rename = "row-major")]
    RowMajor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RleMask {
    pub width: u32,
    pub height: u32,
    #[serde(default)]
    pub order: RunOrder,
    pub runs: Vec<u64>,
}

impl RleMask {
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("RLE masks always serialize")
    }

    pub fn dims(&self) -> Result<Dims> {
        Dims::new(self.width, self.height)
    }

    /// Checks that the runs cover exactly `width * height` pixels.
    pub fn validate(&self) -> Result<Dims> {
        let dims = self.dims()?;
        let expected = dims.pixel_count() as u64;
        let total = self
            .runs
            .iter()
            .try_fold(0u64, |acc, &r| acc.checked_add(r))
            .ok_or_else(|| Error::InvalidRle("run lengths overflow".into()))?;
        if total != expected {
            return Err(Error::InvalidRle(format!(
                "runs sum to {total}, expected {expected} for a {dims} mask"
            )));
        }
        Ok(dims)
    }
}

pub fn rle_encode(mask: &BinaryMask) -> RleMask {
    let total = mask.dims().pixel_count() as u64;
    let mut runs = Vec::new();
    // End of the previous foreground run, as a flat index.
    let mut cursor = 0u64;
    let mut run_start: Option<u64> = None;
    let mut prev = 0u64;
    for idx in mask.indices() {
        let idx = idx as u64;
        match run_start {
            Some(_) if idx == prev + 1 => {}
            Some(start) => {
                runs.push(start - cursor);
                runs.push(prev + 1 - start);
                cursor = prev + 1;
                run_start = Some(idx);
            }
            None => run_start = Some(idx),
        }
        prev = idx;
    }
    if let Some(start) = run_start {
        runs.push(start - cursor);
        runs.push(prev + 1 - start);
        cursor = prev + 1;
    }
    if cursor < total || runs.is_empty() {
        runs.push(total - cursor);
    }
    RleMask {
        width: mask.width(),
        height: mask.height(),
        order: RunOrder::RowMajor,
        runs,
    }
}

pub fn rle_decode(rle: &RleMask) -> Result<BinaryMask> {
    let dims = rle.validate()?;
    let mut mask = BinaryMask::empty(dims);
    let mut pos = 0usize;
    for (i, &run) in rle.runs.iter().enumerate() {
        let end = pos + run as usize;
        if i % 2 == 1 {
            mask.fill_range(pos, end);
        }
        pos = end;
    }
    Ok(mask)
}

/// Decodes an RLE JSON document.
pub fn decode_rle_json(bytes: &[u8]) -> Result<BinaryMask> {
    rle_decode(&RleMask::from_json_slice(bytes)?)
}
