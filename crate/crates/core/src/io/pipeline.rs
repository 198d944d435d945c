//! Manifest-driven batch evaluation.
//!
//! Images are processed in parallel; every output is assembled afterwards
//! from records sorted by `(set_id, image_id, method_id)`, so reports are
//! byte-identical no matter how work was scheduled.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluation::{
    agreement_curve, iov_compare, mean_iou, AbstentionPolicy, EvaluationRecord, MeanIouTable,
    MetricKind, RecordKey, Truth,
};
use crate::fusion::{composite_fuse, hybrid_select, CandidateSet, FusionConfig, HybridConfig, HybridResult};
use crate::io::manifest::{
    GridConfig, ImageEntry, Manifest, MethodEntry, ALL_SETS, ANNOTATOR_METHOD_ID,
};
use crate::io::mask_file::load_mask;
use crate::io::report::{
    write_curves_csv, write_iov_csv, write_mean_iou_csv, write_records_csv, ScopedCurve,
    ScopedPairedTable,
};
use crate::io::stack::load_candidates;
use crate::mask::BinaryMask;

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    /// Abort on the first per-image failure instead of recording it.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub set_id: String,
    pub image_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method_id: Option<String>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    pub sets: usize,
    pub images: usize,
    pub records: usize,
    pub scored: usize,
    pub abstentions: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub tool: &'static str,
    pub version: &'static str,
    pub fusion: FusionConfig,
    pub hybrid: HybridConfig,
    pub abstention_policy: AbstentionPolicy,
    pub grids: GridConfig,
    pub counts: Counts,
    pub abstentions_by_method: BTreeMap<String, usize>,
    pub failures: Vec<Failure>,
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    /// Sorted by `(set_id, image_id, method_id)`.
    pub records: Vec<EvaluationRecord>,
    pub mean_iou: MeanIouTable,
    pub curves: BTreeMap<MetricKind, Vec<ScopedCurve>>,
    /// Empty when no image has a second annotation.
    pub iov: BTreeMap<MetricKind, Vec<ScopedPairedTable>>,
    pub summary: RunSummary,
}

pub const RECORDS_FILE: &str = "records.csv";
pub const MEAN_IOU_FILE: &str = "mean_iou.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn curve_file(kind: MetricKind) -> String {
    format!("curve_{}.csv", kind.short_name())
}

pub fn iov_file(kind: MetricKind) -> String {
    format!("iov_{}.csv", kind.short_name())
}

impl ReportBundle {
    /// Writes every report file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, bytes: Vec<u8>| -> Result<()> {
            let p = dir.join(name);
            std::fs::write(&p, bytes).map_err(|e| Error::io(p, e))
        };

        let mut buf = Vec::new();
        write_records_csv(&self.records, &mut buf)?;
        write(RECORDS_FILE, buf)?;

        let mut buf = Vec::new();
        write_mean_iou_csv(&self.mean_iou, &mut buf)?;
        write(MEAN_IOU_FILE, buf)?;

        for (kind, curves) in &self.curves {
            let mut buf = Vec::new();
            write_curves_csv(curves, &mut buf)?;
            write(&curve_file(*kind), buf)?;
        }
        for (kind, tables) in &self.iov {
            let mut buf = Vec::new();
            write_iov_csv(tables, &mut buf)?;
            write(&iov_file(*kind), buf)?;
        }

        let mut json = serde_json::to_vec_pretty(&self.summary)?;
        json.push(b'\n');
        write(SUMMARY_FILE, json)
    }
}

#[derive(Default)]
struct ImageOutcome {
    records: Vec<EvaluationRecord>,
    failures: Vec<Failure>,
}

fn failure(set_id: &str, image_id: &str, method_id: Option<&str>, e: &Error) -> Failure {
    Failure {
        set_id: set_id.to_owned(),
        image_id: image_id.to_owned(),
        method_id: method_id.map(str::to_owned),
        error: e.to_string(),
    }
}

fn produce(
    manifest: &Manifest,
    method: &MethodEntry,
    produced: &HashMap<&str, BinaryMask>,
) -> Result<Option<BinaryMask>> {
    let load = |p: &Path| load_mask(manifest.resolve(p));
    match method {
        MethodEntry::FinalMask { mask_path, .. } => Ok(Some(load(mask_path)?)),
        MethodEntry::PrototypePlusCandidates {
            prototype_path,
            candidates_path,
            ..
        } => {
            let prototype = load(prototype_path)?;
            let candidates = load_candidates(manifest.resolve(candidates_path))?;
            Ok(Some(composite_fuse(&prototype, &candidates, &manifest.fusion)?.fused))
        }
        MethodEntry::HybridBundle {
            prototype_path,
            finalists,
            ..
        } => {
            let prototype = load(prototype_path)?;
            let mut set = CandidateSet::new(prototype.dims());
            for f in finalists {
                let mask = match (&f.path, &f.method) {
                    (Some(p), _) => load(p)?,
                    (None, Some(m)) => produced
                        .get(m.as_str())
                        .cloned()
                        .ok_or_else(|| {
                            Error::InvalidManifest(format!(
                                "finalist `{}`: method `{m}` produced no mask",
                                f.id
                            ))
                        })?,
                    (None, None) => unreachable!("manifest validation requires a source"),
                };
                set.push(f.id.clone(), mask)?;
            }
            Ok(match hybrid_select(&prototype, &set, &manifest.hybrid)? {
                HybridResult::Selected { mask, .. } => Some(mask),
                HybridResult::Abstained { .. } => None,
            })
        }
    }
}

fn process_image(manifest: &Manifest, set_id: &str, image: &ImageEntry) -> ImageOutcome {
    let mut out = ImageOutcome::default();
    let image_id = image.image_id.as_str();
    let truth_mask = match load_mask(manifest.resolve(&image.ground_truth_path)) {
        Ok(m) => m,
        Err(e) => {
            out.failures.push(failure(set_id, image_id, None, &e));
            return out;
        }
    };
    let truth = match Truth::new(&truth_mask) {
        Ok(t) => t,
        Err(e) => {
            out.failures
                .push(failure(set_id, image_id, None, &e.at(&image.ground_truth_path)));
            return out;
        }
    };

    let score = |method_id: &str, pred: Option<&BinaryMask>| -> Result<EvaluationRecord> {
        let key = RecordKey::new(set_id, image_id, method_id);
        match pred {
            None => Ok(EvaluationRecord::abstained(key)),
            Some(p) => Ok(EvaluationRecord {
                key,
                scores: Some(truth.evaluate(p)?),
            }),
        }
    };

    // Hybrid bundles may consume the outputs of the other methods.
    let mut produced: HashMap<&str, BinaryMask> = HashMap::new();
    let ordered = image
        .methods
        .iter()
        .filter(|m| !m.is_hybrid())
        .chain(image.methods.iter().filter(|m| m.is_hybrid()));
    for method in ordered {
        let id = method.method_id();
        let result = produce(manifest, method, &produced)
            .and_then(|pred| score(id, pred.as_ref()).map(|rec| (pred, rec)));
        match result {
            Ok((pred, rec)) => {
                out.records.push(rec);
                if let Some(p) = pred {
                    produced.insert(id, p);
                }
            }
            Err(e) => out.failures.push(failure(set_id, image_id, Some(id), &e)),
        }
    }

    if let Some(p) = &image.second_annotator_path {
        match load_mask(manifest.resolve(p)).and_then(|m| score(ANNOTATOR_METHOD_ID, Some(&m))) {
            Ok(rec) => out.records.push(rec),
            Err(e) => out
                .failures
                .push(failure(set_id, image_id, Some(ANNOTATOR_METHOD_ID), &e)),
        }
    }
    out
}

/// Scores every image of every set and assembles the report bundle.
pub fn run_pipeline(manifest: &Manifest, options: PipelineOptions) -> Result<ReportBundle> {
    let jobs: Vec<(&str, &ImageEntry)> = manifest
        .sets
        .iter()
        .flat_map(|s| s.images.iter().map(move |i| (s.set_id.as_str(), i)))
        .collect();

    let outcomes: Vec<ImageOutcome> = jobs
        .par_iter()
        .map(|(set_id, image)| process_image(manifest, set_id, image))
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        records.extend(o.records);
        failures.extend(o.failures);
    }
    records.sort_by(|a, b| a.key.cmp(&b.key));
    failures.sort();

    if options.strict {
        if let Some(f) = failures.first() {
            return Err(Error::InvalidManifest(format!(
                "{}/{}{}: {}",
                f.set_id,
                f.image_id,
                f.method_id
                    .as_deref()
                    .map(|m| format!(" ({m})"))
                    .unwrap_or_default(),
                f.error
            )));
        }
    }

    assemble(manifest, records, failures)
}

fn assemble(
    manifest: &Manifest,
    records: Vec<EvaluationRecord>,
    failures: Vec<Failure>,
) -> Result<ReportBundle> {
    let policy = manifest.abstention_policy;
    let mean = mean_iou(&records, policy);

    // (method, scope) -> records, scopes being each set plus the pool.
    let mut groups: BTreeMap<(&str, &str), Vec<EvaluationRecord>> = BTreeMap::new();
    for r in &records {
        for scope in [r.key.set_id.as_str(), ALL_SETS] {
            groups
                .entry((&r.key.method_id, scope))
                .or_default()
                .push(r.clone());
        }
    }

    let mut curves = BTreeMap::new();
    let mut iov = BTreeMap::new();
    for kind in MetricKind::ALL {
        let grid = manifest.grids.grid(kind)?;
        let mut kind_curves = Vec::new();
        let mut kind_iov = Vec::new();
        for (&(method_id, scope), group) in &groups {
            match agreement_curve(group, kind, &grid, policy) {
                Ok(curve) => kind_curves.push(ScopedCurve {
                    set_id: scope.to_owned(),
                    curve,
                }),
                Err(Error::NoScoredRecords) => {}
                Err(e) => return Err(e),
            }

            if method_id == ANNOTATOR_METHOD_ID {
                continue;
            }
            let Some(annot) = groups.get(&(ANNOTATOR_METHOD_ID, scope)) else {
                continue;
            };
            let annotated: BTreeSet<(&str, &str)> = annot
                .iter()
                .map(|r| (r.key.set_id.as_str(), r.key.image_id.as_str()))
                .collect();
            let paired: Vec<EvaluationRecord> = group
                .iter()
                .filter(|r| annotated.contains(&(r.key.set_id.as_str(), r.key.image_id.as_str())))
                .cloned()
                .collect();
            let annot: Vec<EvaluationRecord> = {
                let present: BTreeSet<(&str, &str)> = paired
                    .iter()
                    .map(|r| (r.key.set_id.as_str(), r.key.image_id.as_str()))
                    .collect();
                annot
                    .iter()
                    .filter(|r| present.contains(&(r.key.set_id.as_str(), r.key.image_id.as_str())))
                    .cloned()
                    .collect()
            };
            match iov_compare(&paired, &annot, kind, &grid, policy) {
                Ok(table) => kind_iov.push(ScopedPairedTable {
                    set_id: scope.to_owned(),
                    table,
                }),
                Err(Error::NoScoredRecords) => {}
                Err(e) => return Err(e),
            }
        }
        curves.insert(kind, kind_curves);
        if !kind_iov.is_empty() {
            iov.insert(kind, kind_iov);
        }
    }

    let mut abstentions_by_method = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_abstained()) {
        *abstentions_by_method
            .entry(r.key.method_id.clone())
            .or_insert(0) += 1;
    }
    let abstentions = abstentions_by_method.values().sum();

    let summary = RunSummary {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        fusion: manifest.fusion,
        hybrid: manifest.hybrid,
        abstention_policy: policy,
        grids: manifest.grids.clone(),
        counts: Counts {
            sets: manifest.sets.len(),
            images: manifest.image_count(),
            records: records.len(),
            scored: records.len() - abstentions,
            abstentions,
            failures: failures.len(),
        },
        abstentions_by_method,
        failures,
    };

    Ok(ReportBundle {
        records,
        mean_iou: mean,
        curves,
        iov,
        summary,
    })
}
