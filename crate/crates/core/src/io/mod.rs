//! Exchange formats, manifests, reports and the batch pipeline.

pub mod float;
pub mod manifest;
pub mod mask_file;
pub mod pipeline;
pub mod report;
pub mod rle;
pub mod stack;

pub use manifest::Manifest;
pub use mask_file::{decode_mask_bytes, encode_png, load_mask, save_mask};
pub use pipeline::{run_pipeline, PipelineOptions, ReportBundle};
pub use report::{read_records_csv, write_records_csv};
pub use rle::{rle_decode, rle_encode, RleMask};
pub use stack::{load_candidates, CandidateStack};
