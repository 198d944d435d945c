//! Prototype-guided fusion of binary segmentation masks, arbitration between
//! competing masks, and the morphometric evaluation of masks against ground
//! truth (IOU, relative area, eccentricity, solidity, agreement curves).
//!
//! Segmentation models are external: they hand this crate candidate masks
//! as images or run-length encoded JSON, and everything downstream of that
//! (combination, scoring, aggregation, reporting) lives here.

pub mod error;
pub mod evaluation;
pub mod fusion;
pub mod io;
pub mod mask;
pub mod morphometry;

pub use error::{Error, Result};
pub use evaluation::{
    agreement_curve, evaluate_image, iov_compare, mean_iou, AbstentionPolicy, AgreementCurve,
    EvaluationRecord, Grid, MeanIouTable, MetricKind, PairedCurveTable, RecordKey, Scores,
};
pub use fusion::{
    centroid_prompts, composite_fuse, hybrid_select, CandidateSet, FusionConfig, FusionResult,
    HybridConfig, HybridResult,
};
pub use mask::{
    area, centroid, connected_components, iou, largest_component, overlap_fraction, union,
    BinaryMask, Dims, LabeledMask, OverlapMode, Point,
};
pub use morphometry::{
    central_second_moments, convex_hull_mask, eccentricity, per_component_metrics,
    region_metrics, solidity, RegionMetrics,
};
