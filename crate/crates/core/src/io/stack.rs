//! Candidate stacks: several candidate masks for one image.
//!
//! A stack is either a JSON document
//!
//! ```json
//! {"image_id": "img01", "width": 4, "height": 4,
//!  "candidates": [{"id": "sam_0", "producer": "sam_auto",
//!                  "mask": {"width": 4, "height": 4, "runs": [5, 2, 9]}}]}
//! ```
//!
//! or a directory of mask files whose stems become candidate ids.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::CandidateSet;
use crate::io::mask_file::load_mask;
use crate::io::rle::{rle_decode, rle_encode, RleMask};
use crate::mask::Dims;

/// Upper bound on the summed pixel count of all candidates in one stack.
pub const MAX_STACK_PIXELS: u64 = 1 << 32;

/// Tool that produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Producer {
    SamAuto,
    SamPoint,
    SamBox,
    OrganoidTrained,
    OrganoidUntrained,
    GdinoBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub producer: Option<Producer>,
    pub mask: RleMask,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateStack {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_id: Option<String>,
    pub width: u32,
    pub height: u32,
    pub candidates: Vec<StackEntry>,
}

impl CandidateStack {
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("candidate stacks always serialize")
    }

    pub fn from_set(set: &CandidateSet, image_id: Option<String>) -> Self {
        let dims = set.dims();
        CandidateStack {
            image_id,
            width: dims.width,
            height: dims.height,
            candidates: set
                .iter()
                .map(|(id, m)| StackEntry {
                    id: id.to_owned(),
                    producer: None,
                    mask: rle_encode(m),
                })
                .collect(),
        }
    }

    /// Decodes every candidate; all must match the stack dimensions and ids
    /// must be unique.
    pub fn to_set(&self) -> Result<CandidateSet> {
        let dims = Dims::new(self.width, self.height)?;
        let total = self.candidates.len() as u64 * dims.pixel_count() as u64;
        if total > MAX_STACK_PIXELS {
            return Err(Error::InvalidConfig(format!(
                "stack of {} {dims} candidates exceeds the supported size",
                self.candidates.len()
            )));
        }
        let mut set = CandidateSet::new(dims);
        for entry in &self.candidates {
            let mask = rle_decode(&entry.mask)
                .map_err(|e| Error::InvalidRle(format!("candidate `{}`: {e}", entry.id)))?;
            set.push(entry.id.clone(), mask)?;
        }
        Ok(set)
    }
}

pub fn decode_stack_json(bytes: &[u8]) -> Result<CandidateSet> {
    CandidateStack::from_json_slice(bytes)?.to_set()
}

const MASK_EXTENSIONS: [&str; 5] = ["png", "json", "tif", "tiff", "bmp"];

/// Loads candidates from a stack JSON file or from a directory of mask
/// files (sorted by file name, id = file stem).
pub fn load_candidates(path: impl AsRef<Path>) -> Result<CandidateSet> {
    let path = path.as_ref();
    if !path.is_dir() {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        return decode_stack_json(&bytes).map_err(|e| e.at(path));
    }

    let mut files = Vec::new();
    for entry in std::fs::read_dir(path).map_err(|e| Error::io(path, e))? {
        let entry = entry.map_err(|e| Error::io(path, e))?;
        let p = entry.path();
        let is_mask = p
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| MASK_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if p.is_file() && is_mask {
            files.push(p);
        }
    }
    files.sort();

    let mut candidates = Vec::with_capacity(files.len());
    for f in files {
        let id = f
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| {
                Error::InvalidConfig(format!("{}: file name is not valid UTF-8", f.display()))
            })?
            .to_owned();
        candidates.push((id, load_mask(&f)?));
    }
    let Some(dims) = candidates.first().map(|(_, m)| m.dims()) else {
        return Err(Error::InvalidConfig(format!(
            "{}: directory holds no candidate masks",
            path.display()
        )));
    };
    CandidateSet::from_vec(dims, candidates).map_err(|e| e.at(path))
}
