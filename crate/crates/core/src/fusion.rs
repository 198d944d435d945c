//! Prototype-guided mask combination.
//!
//! * [`composite_fuse`] keeps every candidate whose overlap with a prototype
//!   mask exceeds a threshold and merges the survivors into one mask.
//! * [`centroid_prompts`] turns a prototype into one point prompt per
//!   connected component.
//! * [`hybrid_select`] picks, among finalist masks, the one agreeing best
//!   with the prototype, or abstains when none agrees well enough.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{
    centroid_of, connected_components, iou, overlap_fraction, BinaryMask, Dims, OverlapMode,
    Point,
};

/// Candidate masks sharing one set of dimensions, with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    dims: Dims,
    candidates: Vec<(String, BinaryMask)>,
}

impl CandidateSet {
    pub fn new(dims: Dims) -> Self {
        CandidateSet {
            dims,
            candidates: Vec::new(),
        }
    }

    pub fn from_vec(dims: Dims, candidates: Vec<(String, BinaryMask)>) -> Result<Self> {
        let mut set = CandidateSet::new(dims);
        let mut seen = HashSet::new();
        for (id, mask) in candidates {
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            if mask.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: mask.dims(),
                });
            }
            set.candidates.push((id, mask));
        }
        Ok(set)
    }

    pub fn push(&mut self, id: impl Into<String>, mask: BinaryMask) -> Result<()> {
        let id = id.into();
        if self.candidates.iter().any(|(existing, _)| *existing == id) {
            return Err(Error::DuplicateId(id));
        }
        if mask.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                found: mask.dims(),
            });
        }
        self.candidates.push((id, mask));
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BinaryMask)> {
        self.candidates.iter().map(|(id, m)| (id.as_str(), m))
    }

    pub fn get(&self, id: &str) -> Option<&BinaryMask> {
        self.candidates
            .iter()
            .find(|(cid, _)| cid == id)
            .map(|(_, m)| m)
    }

    pub fn into_vec(self) -> Vec<(String, BinaryMask)> {
        self.candidates
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionConfig {
    pub overlap_threshold: f64,
    #[serde(default)]
    pub mode: OverlapMode,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            overlap_threshold: 0.5,
            mode: OverlapMode::CandidateFraction,
        }
    }
}

impl FusionConfig {
    pub fn new(overlap_threshold: f64, mode: OverlapMode) -> Result<Self> {
        let config = FusionConfig {
            overlap_threshold,
            mode,
        };
        config.validate()?;
        Ok(config)
    }

    /// The threshold must lie in `(0, 1]`; zero would admit empty candidates.
    pub fn validate(&self) -> Result<()> {
        let t = self.overlap_threshold;
        if t > 0.0 && t <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "overlap threshold {t} must lie in (0, 1]"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateOverlap {
    pub id: String,
    pub overlap: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionResult {
    pub fused: BinaryMask,
    pub accepted_ids: Vec<String>,
    /// One entry per input candidate, in input order.
    pub per_candidate_overlap: Vec<CandidateOverlap>,
}

/// Unions every candidate whose overlap with `prototype` is strictly above
/// the configured threshold.
pub fn composite_fuse(
    prototype: &BinaryMask,
    candidates: &CandidateSet,
    config: &FusionConfig,
) -> Result<FusionResult> {
    config.validate()?;
    if prototype.dims() != candidates.dims() {
        return Err(Error::DimensionMismatch {
            expected: prototype.dims(),
            found: candidates.dims(),
        });
    }

    let mut fused = BinaryMask::empty(prototype.dims());
    let mut accepted_ids = Vec::new();
    let mut per_candidate_overlap = Vec::with_capacity(candidates.len());
    for (id, mask) in candidates.iter() {
        let overlap = overlap_fraction(mask, prototype, config.mode)?;
        let accepted = overlap > config.overlap_threshold;
        if accepted {
            fused.union_with(mask)?;
            accepted_ids.push(id.to_owned());
        }
        per_candidate_overlap.push(CandidateOverlap {
            id: id.to_owned(),
            overlap,
            accepted,
        });
    }

    Ok(FusionResult {
        fused,
        accepted_ids,
        per_candidate_overlap,
    })
}

/// Centroid of each 8-connected component, in label order.
pub fn centroid_prompts(mask: &BinaryMask) -> Vec<Point> {
    connected_components(mask)
        .pixels_by_label()
        .into_iter()
        .filter_map(|px| centroid_of(px).ok().map(Point::from))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridConfig {
    pub abstention_threshold: f64,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            abstention_threshold: 0.5,
        }
    }
}

impl HybridConfig {
    pub fn new(abstention_threshold: f64) -> Result<Self> {
        let config = HybridConfig {
            abstention_threshold,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.abstention_threshold;
        if (0.0..=1.0).contains(&t) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "abstention threshold {t} must lie in [0, 1]"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HybridResult {
    Selected {
        finalist_id: String,
        mask: BinaryMask,
        iou_with_prototype: f64,
    },
    Abstained {
        best_id: String,
        best_iou: f64,
    },
}

impl HybridResult {
    pub fn is_abstained(&self) -> bool {
        matches!(self, HybridResult::Abstained { .. })
    }

    pub fn mask(&self) -> Option<&BinaryMask> {
        match self {
            HybridResult::Selected { mask, .. } => Some(mask),
            HybridResult::Abstained { .. } => None,
        }
    }
}

/// Selects the finalist with the highest IOU against `prototype`, earliest
/// on ties. Abstains when that IOU is below the threshold; a best IOU equal
/// to the threshold is selected.
pub fn hybrid_select(
    prototype: &BinaryMask,
    finalists: &CandidateSet,
    config: &HybridConfig,
) -> Result<HybridResult> {
    config.validate()?;
    if finalists.is_empty() {
        return Err(Error::NoFinalists);
    }
    if prototype.is_empty() {
        return Err(Error::EmptyMask("hybrid selection prototype"));
    }

    let mut best: Option<(&str, &BinaryMask, f64)> = None;
    for (id, mask) in finalists.iter() {
        let score = iou(mask, prototype)?;
        if best.is_none_or(|(_, _, s)| score > s) {
            best = Some((id, mask, score));
        }
    }
    let (id, mask, score) = best.expect("finalists are nonempty");

    Ok(if score >= config.abstention_threshold {
        HybridResult::Selected {
            finalist_id: id.to_owned(),
            mask: mask.clone(),
            iou_with_prototype: score,
        }
    } else {
        HybridResult::Abstained {
            best_id: id.to_owned(),
            best_iou: score,
        }
    })
}
