//! Ground-truth comparison and aggregation.
//!
//! Every comparison yields an [`EvaluationRecord`]. Aggregates (mean IOU,
//! agreement curves, inter-observer comparisons) are folds over records
//! sorted by `(set_id, image_id, method_id)`, so they do not depend on the
//! order records were produced in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{iou, largest_component, BinaryMask};
use crate::morphometry::region_metrics;

/// Eccentricity reported for an empty prediction.
pub const EMPTY_ECCENTRICITY: f64 = 1.0;
/// Solidity reported for an empty prediction.
pub const EMPTY_SOLIDITY: f64 = 0.0;

/// Identifies one (image, method) comparison.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordKey {
    pub set_id: String,
    pub image_id: String,
    pub method_id: String,
}

impl RecordKey {
    pub fn new(
        set_id: impl Into<String>,
        image_id: impl Into<String>,
        method_id: impl Into<String>,
    ) -> Self {
        RecordKey {
            set_id: set_id.into(),
            image_id: image_id.into(),
            method_id: method_id.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub iou: f64,
    /// Largest predicted component area over largest true component area.
    pub relative_area: f64,
    pub ecc_pred: f64,
    pub ecc_truth: f64,
    pub ecc_diff: f64,
    pub sol_pred: f64,
    pub sol_truth: f64,
    pub sol_diff: f64,
}

/// One prediction scored against ground truth. Abstentions carry no scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    #[serde(flatten)]
    pub key: RecordKey,
    pub scores: Option<Scores>,
}

impl EvaluationRecord {
    pub fn abstained(key: RecordKey) -> Self {
        EvaluationRecord { key, scores: None }
    }

    pub fn is_abstained(&self) -> bool {
        self.scores.is_none()
    }
}

/// Precomputed ground-truth descriptors, reused across methods.
#[derive(Debug, Clone)]
pub struct Truth<'a> {
    mask: &'a BinaryMask,
    largest_area: u64,
    eccentricity: f64,
    solidity: f64,
}

impl<'a> Truth<'a> {
    pub fn new(mask: &'a BinaryMask) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::EmptyTruth);
        }
        let largest = region_metrics(&largest_component(mask))?;
        Ok(Truth {
            mask,
            largest_area: largest.area,
            eccentricity: largest.eccentricity,
            solidity: largest.solidity,
        })
    }

    pub fn mask(&self) -> &BinaryMask {
        self.mask
    }

    pub fn evaluate(&self, pred: &BinaryMask) -> Result<Scores> {
        let iou = iou(pred, self.mask)?;
        let (relative_area, ecc_pred, sol_pred) = if pred.is_empty() {
            (0.0, EMPTY_ECCENTRICITY, EMPTY_SOLIDITY)
        } else {
            let m = region_metrics(&largest_component(pred))?;
            (
                m.area as f64 / self.largest_area as f64,
                m.eccentricity,
                m.solidity,
            )
        };
        Ok(Scores {
            iou,
            relative_area,
            ecc_pred,
            ecc_truth: self.eccentricity,
            ecc_diff: ecc_pred - self.eccentricity,
            sol_pred,
            sol_truth: self.solidity,
            sol_diff: sol_pred - self.solidity,
        })
    }
}

/// Scores `pred` against `truth`. Shape metrics and relative area use the
/// largest component of each mask; IOU uses the full masks.
pub fn evaluate_image(
    pred: &BinaryMask,
    truth: &BinaryMask,
    key: RecordKey,
) -> Result<EvaluationRecord> {
    if pred.dims() != truth.dims() {
        return Err(Error::DimensionMismatch {
            expected: truth.dims(),
            found: pred.dims(),
        });
    }
    let scores = Truth::new(truth)?.evaluate(pred)?;
    Ok(EvaluationRecord {
        key,
        scores: Some(scores),
    })
}

/// How abstained records enter aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbstentionPolicy {
    /// Left out of every denominator.
    #[default]
    Exclude,
    /// Counted in denominators as a total failure (IOU 0, never passes).
    CountAsZero,
}

impl AbstentionPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            AbstentionPolicy::Exclude => "exclude",
            AbstentionPolicy::CountAsZero => "count_as_zero",
        }
    }
}

impl FromStr for AbstentionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exclude" => Ok(AbstentionPolicy::Exclude),
            "count_as_zero" | "count-as-zero" => Ok(AbstentionPolicy::CountAsZero),
            other => Err(Error::InvalidConfig(format!(
                "unknown abstention policy `{other}` (expected exclude or count-as-zero)"
            ))),
        }
    }
}

fn sorted(records: &[EvaluationRecord]) -> Vec<&EvaluationRecord> {
    let mut v: Vec<&EvaluationRecord> = records.iter().collect();
    v.sort_by(|a, b| a.key.cmp(&b.key));
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanIouRow {
    pub set_id: String,
    pub method_id: String,
    pub mean_iou: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MeanIouTable {
    /// Sorted by `(set_id, method_id)`.
    pub rows: Vec<MeanIouRow>,
}

impl MeanIouTable {
    pub fn get(&self, set_id: &str, method_id: &str) -> Option<&MeanIouRow> {
        self.rows
            .iter()
            .find(|r| r.set_id == set_id && r.method_id == method_id)
    }
}

/// Mean IOU per `(set_id, method_id)`. Groups with nothing to average are
/// omitted.
pub fn mean_iou(records: &[EvaluationRecord], policy: AbstentionPolicy) -> MeanIouTable {
    let mut groups: BTreeMap<(&str, &str), (f64, usize)> = BTreeMap::new();
    for rec in sorted(records) {
        let value = match (&rec.scores, policy) {
            (Some(s), _) => s.iou,
            (None, AbstentionPolicy::CountAsZero) => 0.0,
            (None, AbstentionPolicy::Exclude) => continue,
        };
        let entry = groups
            .entry((&rec.key.set_id, &rec.key.method_id))
            .or_insert((0.0, 0));
        entry.0 += value;
        entry.1 += 1;
    }
    MeanIouTable {
        rows: groups
            .into_iter()
            .map(|((set_id, method_id), (sum, count))| MeanIouRow {
                set_id: set_id.to_owned(),
                method_id: method_id.to_owned(),
                mean_iou: sum / count as f64,
                count,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Iou,
    RelativeArea,
    Eccentricity,
    Solidity,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Iou,
        MetricKind::RelativeArea,
        MetricKind::Eccentricity,
        MetricKind::Solidity,
    ];

    /// Short name used on the command line and in report file names.
    pub fn short_name(self) -> &'static str {
        match self {
            MetricKind::Iou => "iou",
            MetricKind::RelativeArea => "area",
            MetricKind::Eccentricity => "ecc",
            MetricKind::Solidity => "sol",
        }
    }

    /// Whether the curve is non-increasing (threshold) rather than
    /// non-decreasing (tolerance) along the grid.
    pub fn is_threshold(self) -> bool {
        self == MetricKind::Iou
    }

    /// Pass test for one scored record at grid value `x`.
    pub fn passes(self, s: &Scores, x: f64) -> bool {
        match self {
            MetricKind::Iou => s.iou >= x,
            MetricKind::RelativeArea => 1.0 / x <= s.relative_area && s.relative_area <= x,
            MetricKind::Eccentricity => s.ecc_diff.abs() <= x,
            MetricKind::Solidity => s.sol_diff.abs() <= x,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iou" => Ok(MetricKind::Iou),
            "area" | "relative_area" => Ok(MetricKind::RelativeArea),
            "ecc" | "eccentricity" => Ok(MetricKind::Eccentricity),
            "sol" | "solidity" => Ok(MetricKind::Solidity),
            other => Err(Error::InvalidConfig(format!(
                "unknown metric `{other}` (expected iou, area, ecc or sol)"
            ))),
        }
    }
}

/// Ascending sequence of thresholds or tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite grid value {v}")));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidGrid("grid is not sorted ascending".into()));
        }
        Ok(Grid(values))
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linear(start: f64, stop: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Grid::new(vec![start]);
        }
        let step_den = (n - 1) as f64;
        let mut v: Vec<f64> = (0..n)
            .map(|i| start + (stop - start) * i as f64 / step_den)
            .collect();
        v[n - 1] = stop;
        Grid::new(v)
    }

    /// `n` geometrically spaced points from `start` to `stop` inclusive.
    pub fn geometric(start: f64, stop: f64, n: usize) -> Result<Self> {
        if !(start > 0.0 && stop > 0.0) {
            return Err(Error::InvalidGrid(
                "geometric grid bounds must be positive".into(),
            ));
        }
        if n < 2 {
            return Grid::new(vec![start]);
        }
        let ratio = stop / start;
        let step_den = (n - 1) as f64;
        let mut v: Vec<f64> = (0..n)
            .map(|i| start * ratio.powf(i as f64 / step_den))
            .collect();
        v[0] = start;
        v[n - 1] = stop;
        Grid::new(v)
    }

    /// 101 points on `[0, 1]`, or 101 geometric points on `[1, 10]` for
    /// relative area.
    pub fn default_for(kind: MetricKind) -> Self {
        match kind {
            MetricKind::RelativeArea => Grid::geometric(1.0, 10.0, 101),
            _ => Grid::linear(0.0, 1.0, 101),
        }
        .expect("default grids are valid")
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Grid::new(v)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Self {
        g.0
    }
}

/// Parses `linear:START:STOP:N`, `geometric:START:STOP:N` or a
/// comma-separated list of values.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("`{s}` is not a number")))
        };
        if let Some((kind, rest)) = spec.split_once(':') {
            let parts: Vec<&str> = rest.split(':').collect();
            let [start, stop, n] = parts.as_slice() else {
                return Err(Error::InvalidGrid(format!(
                    "`{spec}`: expected {kind}:START:STOP:N"
                )));
            };
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| Error::InvalidGrid(format!("`{n}` is not a point count")))?;
            if n == 0 || n > 1_000_000 {
                return Err(Error::InvalidGrid(format!(
                    "point count {n} must lie in 1..=1000000"
                )));
            }
            let (start, stop) = (num(start)?, num(stop)?);
            return match kind.trim() {
                "linear" => Grid::linear(start, stop, n),
                "geometric" => Grid::geometric(start, stop, n),
                other => Err(Error::InvalidGrid(format!("unknown grid kind `{other}`"))),
            };
        }
        Grid::new(spec.split(',').map(num).collect::<Result<Vec<_>>>()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub passed: usize,
    pub total: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementCurve {
    pub kind: MetricKind,
    pub method_id: String,
    pub points: Vec<CurvePoint>,
}

impl AgreementCurve {
    /// Non-increasing for IOU thresholds, non-decreasing for tolerances.
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| {
            if self.kind.is_threshold() {
                w[1].fraction <= w[0].fraction
            } else {
                w[1].fraction >= w[0].fraction
            }
        })
    }

    pub fn fraction_at(&self, threshold: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.threshold == threshold)
            .map(|p| p.fraction)
    }
}

/// Fraction of records passing at each grid value. All records must belong
/// to one method.
pub fn agreement_curve(
    records: &[EvaluationRecord],
    kind: MetricKind,
    grid: &Grid,
    policy: AbstentionPolicy,
) -> Result<AgreementCurve> {
    if kind == MetricKind::RelativeArea {
        if let Some(x) = grid.values().iter().find(|&&x| x < 1.0) {
            return Err(Error::InvalidGrid(format!(
                "relative-area tolerance {x} is below 1"
            )));
        }
    }
    let method_id = match records.first() {
        Some(r) => r.key.method_id.clone(),
        None => return Err(Error::NoScoredRecords),
    };
    if let Some(other) = records.iter().find(|r| r.key.method_id != method_id) {
        return Err(Error::MixedMethods(method_id, other.key.method_id.clone()));
    }

    let scored: Vec<&Scores> = records.iter().filter_map(|r| r.scores.as_ref()).collect();
    let total = match policy {
        AbstentionPolicy::Exclude => scored.len(),
        AbstentionPolicy::CountAsZero => records.len(),
    };
    if total == 0 {
        return Err(Error::NoScoredRecords);
    }

    let points = grid
        .values()
        .iter()
        .map(|&x| {
            let passed = scored.iter().filter(|s| kind.passes(s, x)).count();
            CurvePoint {
                threshold: x,
                passed,
                total,
                fraction: passed as f64 / total as f64,
            }
        })
        .collect();

    Ok(AgreementCurve {
        kind,
        method_id,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedPoint {
    pub threshold: f64,
    pub method_fraction: f64,
    pub annotator_fraction: f64,
    /// `method_fraction − annotator_fraction`.
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedCurveTable {
    pub kind: MetricKind,
    pub method_id: String,
    pub annotator_id: String,
    pub points: Vec<PairedPoint>,
}

fn image_ids(records: &[EvaluationRecord]) -> BTreeSet<(&str, &str)> {
    records
        .iter()
        .map(|r| (r.key.set_id.as_str(), r.key.image_id.as_str()))
        .collect()
}

fn join_ids(ids: &[&(&str, &str)]) -> String {
    ids.iter()
        .map(|(s, i)| format!("{s}/{i}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Agreement curves for a method and a second human annotator on a shared
/// grid, with their pointwise difference.
pub fn iov_compare(
    method_records: &[EvaluationRecord],
    annotator_records: &[EvaluationRecord],
    kind: MetricKind,
    grid: &Grid,
    policy: AbstentionPolicy,
) -> Result<PairedCurveTable> {
    let m_ids = image_ids(method_records);
    let a_ids = image_ids(annotator_records);
    if m_ids != a_ids {
        let missing_in_method: Vec<_> = a_ids.difference(&m_ids).collect();
        let missing_in_annotator: Vec<_> = m_ids.difference(&a_ids).collect();
        return Err(Error::IdMismatch {
            missing_in_method: join_ids(&missing_in_method),
            missing_in_annotator: join_ids(&missing_in_annotator),
        });
    }
    let method = agreement_curve(method_records, kind, grid, policy)?;
    let annotator = agreement_curve(annotator_records, kind, grid, policy)?;
    let points = method
        .points
        .iter()
        .zip(&annotator.points)
        .map(|(m, a)| PairedPoint {
            threshold: m.threshold,
            method_fraction: m.fraction,
            annotator_fraction: a.fraction,
            difference: m.fraction - a.fraction,
        })
        .collect();
    Ok(PairedCurveTable {
        kind,
        method_id: method.method_id,
        annotator_id: annotator.method_id,
        points,
    })
}
