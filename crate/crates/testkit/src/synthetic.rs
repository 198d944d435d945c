//! On-disk synthetic datasets: ground truth, a perturbed prototype, a stack
//! of candidate fragments and distractors, a second final mask and an
//! optional second annotation per image, plus the manifest tying them
//! together.
//!
//! Shapes are unions of axis-aligned ellipses and are written straight to
//! run-length JSON from their row spans, so megapixel images stay cheap.

use std::path::{Path, PathBuf};

use maskfuse::io::rle::{rle_decode, RleMask, RunOrder};
use maskfuse::io::save_mask;
use rand::Rng;
use serde_json::{json, Value};

use crate::{rng, TestRng};

#[derive(Debug, Clone, Copy)]
pub struct Ellipse {
    pub cr: f64,
    pub cc: f64,
    pub ar: f64,
    pub ac: f64,
    /// Rows outside `[row_lo, row_hi)` are cut away.
    pub row_lo: f64,
    pub row_hi: f64,
}

impl Ellipse {
    pub fn new(cr: f64, cc: f64, ar: f64, ac: f64) -> Self {
        Ellipse { cr, cc, ar, ac, row_lo: f64::NEG_INFINITY, row_hi: f64::INFINITY }
    }

    fn span(&self, row: u32, width: u32) -> Option<(u32, u32)> {
        let r = f64::from(row);
        if r < self.row_lo || r >= self.row_hi {
            return None;
        }
        let dy = (r - self.cr) / self.ar;
        if dy.abs() > 1.0 {
            return None;
        }
        let half = self.ac * (1.0 - dy * dy).sqrt();
        let lo = (self.cc - half).ceil().max(0.0);
        let hi = (self.cc + half).floor().min(f64::from(width) - 1.0);
        (lo <= hi).then_some((lo as u32, hi as u32))
    }
}

/// Canonical row-major runs of the union of `shapes`.
pub fn shape_rle(width: u32, height: u32, shapes: &[Ellipse]) -> RleMask {
    // Foreground intervals `[start, end)` as flat indices, merged when they
    // touch, including across row boundaries.
    let mut intervals: Vec<(u64, u64)> = Vec::new();
    let mut spans = Vec::new();
    for row in 0..height {
        spans.clear();
        spans.extend(shapes.iter().filter_map(|s| s.span(row, width)));
        spans.sort_unstable();
        let base = u64::from(row) * u64::from(width);
        for &(a, b) in &spans {
            let (start, end) = (base + u64::from(a), base + u64::from(b) + 1);
            match intervals.last_mut() {
                Some(last) if start <= last.1 => last.1 = last.1.max(end),
                _ => intervals.push((start, end)),
            }
        }
    }
    let total = u64::from(width) * u64::from(height);
    let mut runs = Vec::with_capacity(2 * intervals.len() + 1);
    let mut cursor = 0;
    for (start, end) in intervals {
        runs.push(start - cursor);
        runs.push(end - start);
        cursor = end;
    }
    if cursor < total || runs.is_empty() {
        runs.push(total - cursor);
    }
    RleMask { width, height, order: RunOrder::RowMajor, runs }
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub sets: usize,
    pub images_per_set: usize,
    pub width: u32,
    pub height: u32,
    pub candidates: usize,
    /// Every n-th image gets a second annotation (0 for none).
    pub annotate_every: usize,
    pub seed: u64,
}

fn jitter(r: &mut TestRng, e: Ellipse, amount: f64) -> Ellipse {
    Ellipse {
        cr: e.cr + r.random_range(-amount..=amount) * e.ar,
        cc: e.cc + r.random_range(-amount..=amount) * e.ac,
        ar: e.ar * r.random_range(1.0 - amount..=1.0 + amount),
        ac: e.ac * r.random_range(1.0 - amount..=1.0 + amount),
        ..e
    }
}

fn write_rle(path: &Path, rle: &RleMask) {
    std::fs::write(path, rle.to_json()).unwrap();
}

/// Writes a dataset under `dir` and returns the manifest path.
pub fn write_dataset(dir: &Path, spec: &DatasetSpec) -> PathBuf {
    let (w, h) = (spec.width, spec.height);
    let (wf, hf) = (f64::from(w), f64::from(h));
    let mut sets = Vec::new();
    for s in 0..spec.sets {
        let set_id = format!("set{}", (b'A' + s as u8) as char);
        let mut images = Vec::new();
        for i in 0..spec.images_per_set {
            let image_id = format!("img{i:03}");
            let mut r = rng(spec.seed ^ ((s as u64) << 32) ^ i as u64);
            let rel = PathBuf::from(&set_id).join(&image_id);
            let img_dir = dir.join(&rel);
            std::fs::create_dir_all(&img_dir).unwrap();

            let organoids: Vec<Ellipse> = (0..r.random_range(1..=3))
                .map(|_| {
                    Ellipse::new(
                        r.random_range(0.2..0.8) * hf,
                        r.random_range(0.2..0.8) * wf,
                        r.random_range(0.05..0.2) * hf,
                        r.random_range(0.05..0.2) * wf,
                    )
                })
                .collect();
            let truth = shape_rle(w, h, &organoids);
            let gt = rle_decode(&truth).unwrap();
            save_mask(&gt, img_dir.join("gt.png")).unwrap();

            let proto: Vec<Ellipse> = organoids.iter().map(|&e| jitter(&mut r, e, 0.15)).collect();
            write_rle(&img_dir.join("proto.json"), &shape_rle(w, h, &proto));
            let other: Vec<Ellipse> = organoids.iter().map(|&e| jitter(&mut r, e, 0.3)).collect();
            write_rle(&img_dir.join("other.json"), &shape_rle(w, h, &other));

            let mut candidates = Vec::new();
            for k in 0..spec.candidates {
                let shape = if k % 3 == 2 {
                    // distractor somewhere in the field
                    vec![Ellipse::new(
                        r.random_range(0.0..1.0) * hf,
                        r.random_range(0.0..1.0) * wf,
                        r.random_range(0.01..0.08) * hf,
                        r.random_range(0.01..0.08) * wf,
                    )]
                } else {
                    // horizontal band of one organoid
                    let e = jitter(&mut r, organoids[k % organoids.len()], 0.1);
                    let t0 = r.random_range(-1.0..0.8);
                    let t1 = t0 + r.random_range(0.2..1.2);
                    vec![Ellipse { row_lo: e.cr + t0 * e.ar, row_hi: e.cr + t1 * e.ar, ..e }]
                };
                candidates.push(json!({
                    "id": format!("cand{k:02}"),
                    "producer": "sam_auto",
                    "mask": shape_rle(w, h, &shape),
                }));
            }
            let stack = json!({
                "image_id": image_id,
                "width": w,
                "height": h,
                "candidates": candidates,
            });
            std::fs::write(img_dir.join("cands.json"), stack.to_string()).unwrap();

            let mut image = json!({
                "image_id": image_id,
                "ground_truth_path": rel.join("gt.png"),
                "methods": [
                    {"kind": "final_mask", "method_id": "PROTO", "mask_path": rel.join("proto.json")},
                    {"kind": "final_mask", "method_id": "OTHER", "mask_path": rel.join("other.json")},
                    {"kind": "prototype_plus_candidates", "method_id": "FUSED",
                     "prototype_path": rel.join("proto.json"), "candidates_path": rel.join("cands.json")},
                    {"kind": "hybrid_bundle", "method_id": "HYBRID",
                     "prototype_path": rel.join("proto.json"),
                     "finalists": [{"id": "FUSED", "method": "FUSED"},
                                   {"id": "OTHER", "path": rel.join("other.json")}]},
                ],
            });
            if spec.annotate_every > 0 && i % spec.annotate_every == 0 {
                let second: Vec<Ellipse> = organoids.iter().map(|&e| jitter(&mut r, e, 0.05)).collect();
                write_rle(&img_dir.join("second.json"), &shape_rle(w, h, &second));
                image["second_annotator_path"] = json!(rel.join("second.json"));
            }
            images.push(image);
        }
        sets.push(json!({"set_id": set_id, "images": images}));
    }
    let manifest: Value = json!({
        "fusion": {"overlap_threshold": 0.5, "mode": "candidate_fraction"},
        "hybrid": {"abstention_threshold": 0.5},
        "abstention_policy": "exclude",
        "sets": sets,
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    path
}
