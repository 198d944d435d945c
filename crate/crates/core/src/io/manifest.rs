//! Batch manifests.
//!
//! A manifest is a JSON document listing image sets, their images, the
//! ground truth for each image and the methods to score. Relative paths are
//! resolved against the manifest's directory.
//!
//! ```json
//! {
//!   "fusion": {"overlap_threshold": 0.5, "mode": "candidate_fraction"},
//!   "hybrid": {"abstention_threshold": 0.5},
//!   "abstention_policy": "exclude",
//!   "sets": [{
//!     "set_id": "A",
//!     "images": [{
//!       "image_id": "img01",
//!       "ground_truth_path": "gt/img01.png",
//!       "second_annotator_path": "iov/img01.png",
//!       "methods": [
//!         {"kind": "final_mask", "method_id": "OIDT", "mask_path": "oidt/img01.png"},
//!         {"kind": "prototype_plus_candidates", "method_id": "OTSAM",
//!          "prototype_path": "oidt/img01.png", "candidates_path": "sam/img01.json"},
//!         {"kind": "hybrid_bundle", "method_id": "Hybrid",
//!          "prototype_path": "oidt/img01.png",
//!          "finalists": [{"id": "OTSAM", "method": "OTSAM"},
//!                        {"id": "GDSAM", "path": "gdsam/img01.png"}]}
//!       ]
//!     }]
//!   }]
//! }
//! ```

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{AbstentionPolicy, Grid, MetricKind};
use crate::fusion::{FusionConfig, HybridConfig};

/// Method id under which second-annotator masks are scored.
pub const ANNOTATOR_METHOD_ID: &str = "IOV";
/// Set id of pooled (all-set) aggregate rows.
pub const ALL_SETS: &str = "ALL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub fusion: FusionConfig,
    #[serde(default)]
    pub hybrid: HybridConfig,
    #[serde(default)]
    pub abstention_policy: AbstentionPolicy,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub sets: Vec<ImageSet>,
    #[serde(skip)]
    base_dir: PathBuf,
}

/// Agreement-curve grids as grid specs (see [`Grid`]'s `FromStr`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub iou: String,
    pub area: String,
    pub ecc: String,
    pub sol: String,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            iou: "linear:0:1:101".into(),
            area: "geometric:1:10:101".into(),
            ecc: "linear:0:1:101".into(),
            sol: "linear:0:1:101".into(),
        }
    }
}

impl GridConfig {
    pub fn spec(&self, kind: MetricKind) -> &str {
        match kind {
            MetricKind::Iou => &self.iou,
            MetricKind::RelativeArea => &self.area,
            MetricKind::Eccentricity => &self.ecc,
            MetricKind::Solidity => &self.sol,
        }
    }

    pub fn grid(&self, kind: MetricKind) -> Result<Grid> {
        let grid: Grid = self.spec(kind).parse()?;
        if kind == MetricKind::RelativeArea && grid.values()[0] < 1.0 {
            return Err(Error::InvalidGrid(format!(
                "area grid `{}` has tolerances below 1",
                self.spec(kind)
            )));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageSet {
    pub set_id: String,
    pub images: Vec<ImageEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageEntry {
    pub image_id: String,
    pub ground_truth_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_annotator_path: Option<PathBuf>,
    pub methods: Vec<MethodEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodEntry {
    /// A finished mask produced elsewhere.
    FinalMask { method_id: String, mask_path: PathBuf },
    /// Composite fusion of candidates guided by a prototype.
    PrototypePlusCandidates {
        method_id: String,
        prototype_path: PathBuf,
        candidates_path: PathBuf,
    },
    /// Hybrid arbitration among finalists.
    HybridBundle {
        method_id: String,
        prototype_path: PathBuf,
        finalists: Vec<FinalistEntry>,
    },
}

impl MethodEntry {
    pub fn method_id(&self) -> &str {
        match self {
            MethodEntry::FinalMask { method_id, .. }
            | MethodEntry::PrototypePlusCandidates { method_id, .. }
            | MethodEntry::HybridBundle { method_id, .. } => method_id,
        }
    }

    pub fn is_hybrid(&self) -> bool {
        matches!(self, MethodEntry::HybridBundle { .. })
    }

    fn paths(&self) -> Vec<&Path> {
        match self {
            MethodEntry::FinalMask { mask_path, .. } => vec![mask_path],
            MethodEntry::PrototypePlusCandidates {
                prototype_path,
                candidates_path,
                ..
            } => vec![prototype_path, candidates_path],
            MethodEntry::HybridBundle {
                prototype_path,
                finalists,
                ..
            } => std::iter::once(prototype_path.as_path())
                .chain(finalists.iter().filter_map(|f| f.path.as_deref()))
                .collect(),
        }
    }
}

/// A hybrid finalist, read from `path` or taken from the output of another
/// method of the same image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalistEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

fn invalid(msg: String) -> Error {
    Error::InvalidManifest(msg)
}

impl Manifest {
    /// Parses a manifest document without touching the file system.
    /// Relative paths will resolve against `base_dir`.
    pub fn from_json_slice(bytes: &[u8], base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut m: Manifest =
            serde_json::from_slice(bytes).map_err(|e| invalid(e.to_string()))?;
        m.base_dir = base_dir.into();
        Ok(m)
    }

    /// Reads, parses and fully validates a manifest, including that every
    /// referenced file exists.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let m = Manifest::from_json_slice(&bytes, base).map_err(|e| e.at(path))?;
        m.validate_structure().map_err(|e| e.at(path))?;
        m.validate_files().map_err(|e| e.at(path))?;
        Ok(m)
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn image_count(&self) -> usize {
        self.sets.iter().map(|s| s.images.len()).sum()
    }

    /// Checks ids, cross references and configs.
    pub fn validate_structure(&self) -> Result<()> {
        self.fusion.validate()?;
        self.hybrid.validate()?;
        for kind in MetricKind::ALL {
            self.grids.grid(kind)?;
        }

        let mut set_ids = HashSet::new();
        for set in &self.sets {
            if set.set_id.is_empty() {
                return Err(invalid("empty set_id".into()));
            }
            if set.set_id == ALL_SETS {
                return Err(invalid(format!("set_id `{ALL_SETS}` is reserved")));
            }
            if !set_ids.insert(set.set_id.as_str()) {
                return Err(invalid(format!("duplicate set_id `{}`", set.set_id)));
            }

            let mut image_ids = HashSet::new();
            let mut expected_methods: Option<(BTreeSet<&str>, &str)> = None;
            for image in &set.images {
                let where_ = format!("set `{}`, image `{}`", set.set_id, image.image_id);
                if image.image_id.is_empty() {
                    return Err(invalid(format!("set `{}`: empty image_id", set.set_id)));
                }
                if !image_ids.insert(image.image_id.as_str()) {
                    return Err(invalid(format!(
                        "set `{}`: duplicate image_id `{}`",
                        set.set_id, image.image_id
                    )));
                }
                let methods = validate_methods(image, &where_)?;
                match &expected_methods {
                    None => expected_methods = Some((methods, &image.image_id)),
                    Some((expected, first)) if *expected != methods => {
                        return Err(invalid(format!(
                            "{where_}: method ids [{}] differ from image `{first}`'s [{}]",
                            methods.iter().copied().collect::<Vec<_>>().join(", "),
                            expected.iter().copied().collect::<Vec<_>>().join(", "),
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Checks that every referenced file exists, listing all that do not.
    pub fn validate_files(&self) -> Result<()> {
        let mut missing = Vec::new();
        for set in &self.sets {
            for image in &set.images {
                let mut paths: Vec<&Path> = vec![&image.ground_truth_path];
                paths.extend(image.second_annotator_path.as_deref());
                for m in &image.methods {
                    paths.extend(m.paths());
                }
                for p in paths {
                    let resolved = self.resolve(p);
                    if !resolved.exists() {
                        missing.push(format!(
                            "{}/{}: {}",
                            set.set_id,
                            image.image_id,
                            resolved.display()
                        ));
                    }
                }
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(invalid(format!("missing files: {}", missing.join("; "))))
        }
    }
}

fn validate_methods<'a>(image: &'a ImageEntry, where_: &str) -> Result<BTreeSet<&'a str>> {
    let mut ids = BTreeSet::new();
    let kinds: HashMap<&str, bool> = image
        .methods
        .iter()
        .map(|m| (m.method_id(), m.is_hybrid()))
        .collect();
    for m in &image.methods {
        let id = m.method_id();
        if id.is_empty() {
            return Err(invalid(format!("{where_}: empty method_id")));
        }
        if id == ANNOTATOR_METHOD_ID {
            return Err(invalid(format!(
                "{where_}: method_id `{ANNOTATOR_METHOD_ID}` is reserved for the second annotator"
            )));
        }
        if !ids.insert(id) {
            return Err(invalid(format!("{where_}: duplicate method_id `{id}`")));
        }
        if let MethodEntry::HybridBundle { finalists, .. } = m {
            if finalists.is_empty() {
                return Err(invalid(format!("{where_}, method `{id}`: no finalists")));
            }
            let mut finalist_ids = HashSet::new();
            for f in finalists {
                if !finalist_ids.insert(f.id.as_str()) {
                    return Err(invalid(format!(
                        "{where_}, method `{id}`: duplicate finalist id `{}`",
                        f.id
                    )));
                }
                match (&f.path, &f.method) {
                    (Some(_), None) => {}
                    (None, Some(target)) => match kinds.get(target.as_str()) {
                        None => {
                            return Err(invalid(format!(
                                "{where_}, method `{id}`: finalist `{}` references unknown method `{target}`",
                                f.id
                            )))
                        }
                        Some(true) => {
                            return Err(invalid(format!(
                                "{where_}, method `{id}`: finalist `{}` references hybrid method `{target}`",
                                f.id
                            )))
                        }
                        Some(false) => {}
                    },
                    _ => {
                        return Err(invalid(format!(
                            "{where_}, method `{id}`: finalist `{}` needs exactly one of `path` or `method`",
                            f.id
                        )))
                    }
                }
            }
        }
    }
    Ok(ids)
}
