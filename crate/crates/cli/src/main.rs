//! `maskfuse` command-line tool.
//!
//! Exit status is 0 on success, 1 when an input is missing or malformed and
//! 2 on usage errors. Per-image problems during `evaluate` are recorded in
//! the run summary and do not fail the run unless `--strict` is given.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use maskfuse::io::manifest::{Manifest, ALL_SETS};
use maskfuse::io::mask_file::decode_mask_bytes;
use maskfuse::io::report::{write_curves_csv, ScopedCurve};
use maskfuse::io::stack::decode_stack_json;
use maskfuse::io::{load_candidates, load_mask, read_records_csv, run_pipeline, save_mask, PipelineOptions};
use maskfuse::{
    agreement_curve, centroid_prompts, composite_fuse, connected_components, hybrid_select,
    per_component_metrics, region_metrics, AbstentionPolicy, CandidateSet, EvaluationRecord,
    FusionConfig, Grid, HybridConfig, HybridResult, MetricKind, OverlapMode,
};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "maskfuse", version, about = "Fuse, arbitrate and evaluate binary segmentation masks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Union every candidate whose overlap with the prototype exceeds a threshold.
    Fuse {
        #[arg(long)]
        prototype: PathBuf,
        /// Candidate stack JSON, or a directory of mask files.
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value = "candidate_fraction")]
        mode: OverlapMode,
        /// Output mask (.png or .json).
        #[arg(short, long)]
        output: PathBuf,
        /// Per-candidate overlaps as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Pick the finalist with the highest IOU against the prototype, or abstain.
    Hybrid {
        #[arg(long)]
        prototype: PathBuf,
        /// Finalist as ID=PATH; repeat for each finalist.
        #[arg(long = "finalist", value_name = "ID=PATH", required = true, value_parser = parse_finalist)]
        finalists: Vec<(String, PathBuf)>,
        #[arg(long, default_value_t = 0.5)]
        abstain_iou: f64,
        /// Output mask; not written when abstaining.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Centroid of every 8-connected component, as prompt points.
    Centroids {
        #[arg(long)]
        mask: PathBuf,
        /// Defaults to standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Area, centroid, eccentricity, solidity and bounding box.
    Metrics {
        #[arg(long)]
        mask: PathBuf,
        /// Report every component instead of the whole mask.
        #[arg(long)]
        per_component: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Score every method of a manifest against ground truth.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        /// Report directory; defaults to the manifest's `output_dir`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Fail on the first per-image error.
        #[arg(long)]
        strict: bool,
    },
    /// Agreement curves from a records table, one per method and set.
    Agreement {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        metric: MetricKind,
        /// `linear:S:E:N`, `geometric:S:E:N` or a comma list.
        #[arg(long)]
        grid: Option<Grid>,
        #[arg(long, default_value = "exclude")]
        policy: AbstentionPolicy,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check that files decode, without processing them.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Kind::Auto)]
        kind: Kind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Auto,
    Mask,
    Stack,
    Manifest,
    Records,
}

fn parse_finalist(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((id, path)) if !id.is_empty() && !path.is_empty() => {
            Ok((id.to_owned(), PathBuf::from(path)))
        }
        _ => Err(format!("expected ID=PATH, found `{s}`")),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn fuse(
    prototype: &Path,
    candidates: &Path,
    threshold: f64,
    mode: OverlapMode,
    output: &Path,
    report: Option<&Path>,
) -> Result<()> {
    let config = FusionConfig::new(threshold, mode)?;
    let proto = load_mask(prototype)?;
    let set = load_candidates(candidates)?;
    let result = composite_fuse(&proto, &set, &config)?;
    save_mask(&result.fused, output)?;
    if let Some(r) = report {
        write_json(
            &json!({
                "mode": mode.as_str(),
                "threshold": threshold,
                "accepted_ids": result.accepted_ids,
                "overlaps": result.per_candidate_overlap,
            }),
            Some(r),
        )?;
    }
    eprintln!(
        "accepted {} of {} candidates",
        result.accepted_ids.len(),
        set.len()
    );
    Ok(())
}

fn hybrid(
    prototype: &Path,
    finalists: &[(String, PathBuf)],
    abstain_iou: f64,
    output: &Path,
    report: Option<&Path>,
) -> Result<()> {
    let config = HybridConfig::new(abstain_iou)?;
    let proto = load_mask(prototype)?;
    let mut set = CandidateSet::new(proto.dims());
    for (id, path) in finalists {
        set.push(id.clone(), load_mask(path)?)?;
    }
    let result = hybrid_select(&proto, &set, &config)?;
    let summary = match &result {
        HybridResult::Selected {
            finalist_id,
            mask,
            iou_with_prototype,
        } => {
            save_mask(mask, output)?;
            eprintln!("selected {finalist_id} (IOU {iou_with_prototype})");
            json!({
                "abstained": false,
                "finalist_id": finalist_id,
                "iou_with_prototype": iou_with_prototype,
                "abstain_iou": abstain_iou,
            })
        }
        HybridResult::Abstained { best_id, best_iou } => {
            eprintln!("abstained: best finalist {best_id} has IOU {best_iou} < {abstain_iou}");
            json!({
                "abstained": true,
                "best_id": best_id,
                "best_iou": best_iou,
                "abstain_iou": abstain_iou,
            })
        }
    };
    if let Some(r) = report {
        write_json(&summary, Some(r))?;
    }
    Ok(())
}

fn metrics(mask: &Path, per_component: bool, output: Option<&Path>) -> Result<()> {
    let m = load_mask(mask)?;
    if per_component {
        let comps: Vec<_> = per_component_metrics(&connected_components(&m))
            .into_iter()
            .map(|(label, metrics)| json!({"label": label, "metrics": metrics}))
            .collect();
        write_json(&json!({"components": comps}), output)
    } else {
        write_json(&region_metrics(&m)?, output)
    }
}

fn evaluate(manifest_path: &Path, output: Option<&Path>, strict: bool) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    let out = match (output, &manifest.output_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(d)) => manifest.resolve(d),
        (None, None) => bail!("no output directory: pass --output or set `output_dir`"),
    };
    let bundle = run_pipeline(&manifest, PipelineOptions { strict })?;
    bundle.write_to(&out)?;
    let c = &bundle.summary.counts;
    eprintln!(
        "{} images, {} records ({} abstained), {} failures -> {}",
        c.images,
        c.records,
        c.abstentions,
        c.failures,
        out.display()
    );
    for f in &bundle.summary.failures {
        eprintln!(
            "  failed {}/{}{}: {}",
            f.set_id,
            f.image_id,
            f.method_id.as_deref().map(|m| format!(" ({m})")).unwrap_or_default(),
            f.error
        );
    }
    Ok(())
}

fn agreement(
    records_path: &Path,
    metric: MetricKind,
    grid: Option<Grid>,
    policy: AbstentionPolicy,
    output: Option<&Path>,
) -> Result<()> {
    let file = File::open(records_path)
        .with_context(|| format!("opening {}", records_path.display()))?;
    let records = read_records_csv(file)
        .with_context(|| format!("reading {}", records_path.display()))?;
    let grid = grid.unwrap_or_else(|| Grid::default_for(metric));

    let mut groups: BTreeMap<(&str, &str), Vec<EvaluationRecord>> = BTreeMap::new();
    for r in &records {
        for scope in [r.key.set_id.as_str(), ALL_SETS] {
            groups
                .entry((&r.key.method_id, scope))
                .or_default()
                .push(r.clone());
        }
    }
    let mut curves = Vec::new();
    for ((method, scope), group) in &groups {
        match agreement_curve(group, metric, &grid, policy) {
            Ok(curve) => curves.push(ScopedCurve {
                set_id: (*scope).to_owned(),
                curve,
            }),
            Err(maskfuse::Error::NoScoredRecords) => {
                eprintln!("{method}/{scope}: no scored records, skipped")
            }
            Err(e) => return Err(e.into()),
        }
    }
    if curves.is_empty() {
        bail!("{}: no scored records", records_path.display());
    }
    match output {
        Some(p) => {
            let mut w = create(p)?;
            write_curves_csv(&curves, &mut w)?;
            w.flush()?;
        }
        None => write_curves_csv(&curves, std::io::stdout().lock())?,
    }
    Ok(())
}

fn sniff(path: &Path, bytes: &[u8]) -> Kind {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    if ext.as_deref() == Some("csv") {
        return Kind::Records;
    }
    if let Ok(serde_json::Value::Object(doc)) = serde_json::from_slice(bytes) {
        if doc.contains_key("candidates") {
            return Kind::Stack;
        }
        if doc.contains_key("sets") {
            return Kind::Manifest;
        }
    }
    Kind::Mask
}

fn validate_one(path: &Path, kind: Kind) -> Result<String> {
    if kind == Kind::Stack && path.is_dir() {
        let set = load_candidates(path)?;
        return Ok(format!("stack of {} candidates, {}", set.len(), set.dims()));
    }
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let kind = if kind == Kind::Auto { sniff(path, &bytes) } else { kind };
    Ok(match kind {
        Kind::Mask | Kind::Auto => {
            let m = decode_mask_bytes(&bytes)?;
            format!("mask {}, {} foreground pixels", m.dims(), m.area())
        }
        Kind::Stack => {
            let set = decode_stack_json(&bytes)?;
            format!("stack of {} candidates, {}", set.len(), set.dims())
        }
        Kind::Manifest => {
            let base = path.parent().unwrap_or(Path::new("."));
            let m = Manifest::from_json_slice(&bytes, base)?;
            m.validate_structure()?;
            m.validate_files()?;
            format!("manifest with {} sets, {} images", m.sets.len(), m.image_count())
        }
        Kind::Records => {
            let records = read_records_csv(bytes.as_slice())?;
            format!("{} records", records.len())
        }
    })
}

/// Prints one line per file; fails if any file is invalid.
fn validate(files: &[PathBuf], kind: Kind) -> Result<()> {
    let mut errors = 0;
    for f in files {
        match validate_one(f, kind) {
            Ok(desc) => println!("ok    {}: {desc}", f.display()),
            Err(e) => {
                errors += 1;
                println!("error {}: {e:#}", f.display());
            }
        }
    }
    if errors > 0 {
        bail!("{errors} of {} files failed validation", files.len());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fuse {
            prototype,
            candidates,
            threshold,
            mode,
            output,
            report,
        } => fuse(&prototype, &candidates, threshold, mode, &output, report.as_deref()),
        Command::Hybrid {
            prototype,
            finalists,
            abstain_iou,
            output,
            report,
        } => hybrid(&prototype, &finalists, abstain_iou, &output, report.as_deref()),
        Command::Centroids { mask, output } => {
            let points = centroid_prompts(&load_mask(&mask)?);
            write_json(&points, output.as_deref())
        }
        Command::Metrics {
            mask,
            per_component,
            output,
        } => metrics(&mask, per_component, output.as_deref()),
        Command::Evaluate {
            manifest,
            output,
            strict,
        } => evaluate(&manifest, output.as_deref(), strict),
        Command::Agreement {
            records,
            metric,
            grid,
            policy,
            output,
        } => agreement(&records, metric, grid, policy, output.as_deref()),
        Command::Validate { files, kind } => validate(&files, kind),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
