//! Shape descriptors: second-moment eccentricity, convex-hull solidity and
//! the per-region metrics record.
//!
//! Geometry is over pixel centers. Hull vertices are therefore lattice
//! points, and hull rasterization is done in exact integer arithmetic: a
//! pixel belongs to the hull iff its center lies inside or on the polygon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, LabeledMask, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_row: u32,
    pub min_col: u32,
    pub max_row: u32,
    pub max_col: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMetrics {
    pub area: u64,
    pub centroid: Point,
    pub eccentricity: f64,
    pub solidity: f64,
    pub bbox: BoundingBox,
}

/// Area-normalized central second moments `(m_rr, m_cc, m_rc)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub rr: f64,
    pub cc: f64,
    pub rc: f64,
}

/// Raw integer sums over a pixel set, accumulated in raster order.
#[derive(Debug, Clone, Default)]
struct RegionStats {
    n: u64,
    sum_r: u128,
    sum_c: u128,
    sum_rr: u128,
    sum_cc: u128,
    sum_rc: u128,
    /// `(row, min_col, max_col)` per occupied row, rows ascending.
    spans: Vec<(u32, u32, u32)>,
    bbox: Option<BoundingBox>,
}

impl RegionStats {
    fn from_pixels(pixels: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut s = RegionStats::default();
        for (r, c) in pixels {
            let (r128, c128) = (u128::from(r), u128::from(c));
            s.n += 1;
            s.sum_r += r128;
            s.sum_c += c128;
            s.sum_rr += r128 * r128;
            s.sum_cc += c128 * c128;
            s.sum_rc += r128 * c128;
            match s.spans.last_mut() {
                Some(span) if span.0 == r => {
                    span.1 = span.1.min(c);
                    span.2 = span.2.max(c);
                }
                _ => s.spans.push((r, c, c)),
            }
            s.bbox = Some(match s.bbox {
                None => BoundingBox {
                    min_row: r,
                    min_col: c,
                    max_row: r,
                    max_col: c,
                },
                Some(b) => BoundingBox {
                    min_row: b.min_row.min(r),
                    min_col: b.min_col.min(c),
                    max_row: b.max_row.max(r),
                    max_col: b.max_col.max(c),
                },
            });
        }
        s
    }

    fn from_mask(mask: &BinaryMask) -> Self {
        Self::from_pixels(mask.pixels())
    }

    fn ensure_nonempty(&self, op: &'static str) -> Result<()> {
        if self.n == 0 {
            Err(Error::EmptyMask(op))
        } else {
            Ok(())
        }
    }

    /// Central moments scaled by `n²`: `(n·Σr² − (Σr)², n·Σc² − (Σc)², n·Σrc − ΣrΣc)`.
    fn scaled_central(&self) -> (i128, i128, i128) {
        let n = i128::from(self.n);
        let (sr, sc) = (self.sum_r as i128, self.sum_c as i128);
        (
            n * self.sum_rr as i128 - sr * sr,
            n * self.sum_cc as i128 - sc * sc,
            n * self.sum_rc as i128 - sr * sc,
        )
    }

    fn moments(&self) -> SecondMoments {
        let (a, c, b) = self.scaled_central();
        let n2 = (self.n as f64) * (self.n as f64);
        SecondMoments {
            rr: a as f64 / n2,
            cc: c as f64 / n2,
            rc: b as f64 / n2,
        }
    }

    fn eccentricity(&self) -> f64 {
        let (a, c, b) = self.scaled_central();
        let (a, c, b) = (a as f64, c as f64, b as f64);
        // Eigenvalues are (t ± d) / 2; 1 − λ2/λ1 = 2d / (t + d).
        let t = a + c;
        if t <= 0.0 {
            return 0.0;
        }
        let d = (a - c).hypot(2.0 * b);
        (2.0 * d / (t + d)).min(1.0).sqrt()
    }

    fn centroid(&self) -> Point {
        Point {
            row: self.sum_r as f64 / self.n as f64,
            col: self.sum_c as f64 / self.n as f64,
        }
    }

    fn hull(&self) -> ConvexHull {
        ConvexHull::from_spans(&self.spans)
    }
}

/// Convex hull of lattice points, vertices counter-clockwise in `(col, row)`
/// space with collinear points dropped.
#[derive(Debug, Clone)]
struct ConvexHull {
    vertices: Vec<(i64, i64)>,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl ConvexHull {
    /// The hull of a pixel set equals the hull of each row's two extremes.
    fn from_spans(spans: &[(u32, u32, u32)]) -> Self {
        let mut pts: Vec<(i64, i64)> = Vec::with_capacity(spans.len() * 2);
        for &(r, c0, c1) in spans {
            pts.push((i64::from(c0), i64::from(r)));
            if c1 != c0 {
                pts.push((i64::from(c1), i64::from(r)));
            }
        }
        pts.sort_unstable();
        pts.dedup();
        if pts.len() <= 2 {
            return ConvexHull { vertices: pts };
        }

        // Andrew's monotone chain.
        let mut hull: Vec<(i64, i64)> = Vec::with_capacity(pts.len() * 2);
        for &p in &pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        let lower_len = hull.len() + 1;
        for &p in pts.iter().rev().skip(1) {
            while hull.len() >= lower_len
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        ConvexHull { vertices: hull }
    }

    fn row_range(&self) -> Option<(i64, i64)> {
        let lo = self.vertices.iter().map(|v| v.1).min()?;
        let hi = self.vertices.iter().map(|v| v.1).max()?;
        Some((lo, hi))
    }

    /// Inclusive column range of lattice points on the hull at `row`.
    fn span_at(&self, row: i64) -> Option<(i64, i64)> {
        let n = self.vertices.len();
        let mut left = i64::MAX;
        let mut right = i64::MIN;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            if row < p.1.min(q.1) || row > p.1.max(q.1) {
                continue;
            }
            if p.1 == q.1 {
                left = left.min(p.0.min(q.0));
                right = right.max(p.0.max(q.0));
                continue;
            }
            // x = p.x + (row − p.y)(q.x − p.x)/(q.y − p.y), exactly.
            let mut num = (row - p.1) * (q.0 - p.0);
            let mut den = q.1 - p.1;
            if den < 0 {
                num = -num;
                den = -den;
            }
            let floor = p.0 + num.div_euclid(den);
            let ceil = p.0 - (-num).div_euclid(den);
            left = left.min(ceil);
            right = right.max(floor);
        }
        (left <= right).then_some((left, right))
    }

    fn spans(&self) -> impl Iterator<Item = (i64, i64, i64)> + '_ {
        let (lo, hi) = self.row_range().unwrap_or((1, 0));
        (lo..=hi).filter_map(move |r| self.span_at(r).map(|(a, b)| (r, a, b)))
    }

    fn pixel_count(&self) -> u64 {
        self.spans().map(|(_, a, b)| (b - a + 1) as u64).sum()
    }
}

pub fn central_second_moments(mask: &BinaryMask) -> Result<SecondMoments> {
    let stats = RegionStats::from_mask(mask);
    stats.ensure_nonempty("central second moments")?;
    Ok(stats.moments())
}

/// Eccentricity of the ellipse with the same second central moments:
/// `sqrt(1 − λ2/λ1)`, and 0 for a single pixel.
pub fn eccentricity(mask: &BinaryMask) -> Result<f64> {
    let stats = RegionStats::from_mask(mask);
    stats.ensure_nonempty("eccentricity")?;
    Ok(stats.eccentricity())
}

/// Rasterized convex hull of the foreground pixel centers.
pub fn convex_hull_mask(mask: &BinaryMask) -> Result<BinaryMask> {
    let stats = RegionStats::from_mask(mask);
    stats.ensure_nonempty("convex hull")?;
    let width = mask.width() as usize;
    let mut out = BinaryMask::empty(mask.dims());
    for (r, a, b) in stats.hull().spans() {
        let base = r as usize * width;
        out.fill_range(base + a as usize, base + b as usize + 1);
    }
    Ok(out)
}

/// `area / hull area`, both in pixels.
pub fn solidity(mask: &BinaryMask) -> Result<f64> {
    let stats = RegionStats::from_mask(mask);
    stats.ensure_nonempty("solidity")?;
    Ok(stats_solidity(&stats))
}

fn stats_solidity(stats: &RegionStats) -> f64 {
    stats.n as f64 / stats.hull().pixel_count() as f64
}

fn metrics_from_stats(stats: &RegionStats) -> RegionMetrics {
    RegionMetrics {
        area: stats.n,
        centroid: stats.centroid(),
        eccentricity: stats.eccentricity(),
        solidity: stats_solidity(stats),
        bbox: stats.bbox.expect("nonempty region has a bounding box"),
    }
}

pub fn region_metrics(mask: &BinaryMask) -> Result<RegionMetrics> {
    let stats = RegionStats::from_mask(mask);
    stats.ensure_nonempty("region metrics")?;
    Ok(metrics_from_stats(&stats))
}

/// Metrics for every labelled component, ordered by label.
pub fn per_component_metrics(labeled: &LabeledMask) -> Vec<(u32, RegionMetrics)> {
    labeled
        .pixels_by_label()
        .into_iter()
        .enumerate()
        .filter(|(_, px)| !px.is_empty())
        .map(|(i, px)| {
            let stats = RegionStats::from_pixels(px);
            (i as u32 + 1, metrics_from_stats(&stats))
        })
        .collect()
}
