//! Binary masks and the pixel-set algebra built on them.
//!
//! A [`BinaryMask`] stores its foreground as a row-major bitset: pixel
//! `(row, col)` is bit `row * width + col`. Pixel centers sit on the integer
//! lattice with the origin at the top-left. Every count is exact integer
//! arithmetic; ratios divide once, in `f64`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `width * height` for any mask this crate will allocate.
pub const MAX_PIXELS: u64 = 1 << 28;

const WORD_BITS: usize = 64;

/// A point in pixel-center coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub row: f64,
    pub col: f64,
}

impl From<(f64, f64)> for Point {
    fn from((row, col): (f64, f64)) -> Self {
        Point { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub width: u32,
    pub height: u32,
}

impl Dims {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        let (w, h) = (u64::from(width), u64::from(height));
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions {
                width: w,
                height: h,
                reason: "width and height must be positive",
            });
        }
        if w * h > MAX_PIXELS {
            return Err(Error::InvalidDimensions {
                width: w,
                height: h,
                reason: "pixel count exceeds the supported maximum",
            });
        }
        Ok(Dims { width, height })
    }

    pub fn pixel_count(self) -> usize {
        self.width as usize * self.height as usize
    }

    fn ensure_eq(self, other: Dims) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self,
                found: other,
            })
        }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// A rectangular grid of foreground/background pixels.
///
/// Bits past `width * height` in the last word are always zero, so derived
/// equality is pixel-set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    dims: Dims,
    words: Vec<u64>,
}

impl fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BinaryMask")
            .field("dims", &self.dims)
            .field("area", &self.area())
            .finish()
    }
}

impl BinaryMask {
    /// An empty (all background) mask.
    pub fn empty(dims: Dims) -> Self {
        BinaryMask {
            dims,
            words: vec![0; dims.pixel_count().div_ceil(WORD_BITS)],
        }
    }

    pub fn new(width: u32, height: u32) -> Result<Self> {
        Ok(Self::empty(Dims::new(width, height)?))
    }

    pub fn full(dims: Dims) -> Self {
        let mut mask = Self::empty(dims);
        mask.fill_range(0, dims.pixel_count());
        mask
    }

    pub fn from_pixels<I>(width: u32, height: u32, pixels: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut mask = Self::new(width, height)?;
        for (row, col) in pixels {
            mask.insert(row, col)?;
        }
        Ok(mask)
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut mask = Self::empty(dims);
        for row in 0..dims.height {
            for col in 0..dims.width {
                if f(row, col) {
                    mask.set_index(mask.index(row, col));
                }
            }
        }
        mask
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn width(&self) -> u32 {
        self.dims.width
    }

    pub fn height(&self) -> u32 {
        self.dims.height
    }

    #[inline]
    fn index(&self, row: u32, col: u32) -> usize {
        row as usize * self.dims.width as usize + col as usize
    }

    #[inline]
    fn set_index(&mut self, idx: usize) {
        self.words[idx / WORD_BITS] |= 1 << (idx % WORD_BITS);
    }

    #[inline]
    pub(crate) fn get_index(&self, idx: usize) -> bool {
        self.words[idx / WORD_BITS] >> (idx % WORD_BITS) & 1 == 1
    }

    fn check_bounds(&self, row: u32, col: u32) -> Result<()> {
        if row < self.dims.height && col < self.dims.width {
            Ok(())
        } else {
            Err(Error::PixelOutOfBounds {
                row,
                col,
                dims: self.dims,
            })
        }
    }

    /// Membership test; out-of-bounds coordinates are background.
    pub fn contains(&self, row: u32, col: u32) -> bool {
        row < self.dims.height && col < self.dims.width && self.get_index(self.index(row, col))
    }

    pub fn insert(&mut self, row: u32, col: u32) -> Result<()> {
        self.check_bounds(row, col)?;
        self.set_index(self.index(row, col));
        Ok(())
    }

    pub fn remove(&mut self, row: u32, col: u32) -> Result<()> {
        self.check_bounds(row, col)?;
        let idx = self.index(row, col);
        self.words[idx / WORD_BITS] &= !(1 << (idx % WORD_BITS));
        Ok(())
    }

    /// Sets the half-open run of flat row-major indices `[start, end)`.
    pub(crate) fn fill_range(&mut self, start: usize, end: usize) {
        debug_assert!(end <= self.dims.pixel_count());
        let mut i = start;
        while i < end {
            let word = i / WORD_BITS;
            let bit = i % WORD_BITS;
            let n = (WORD_BITS - bit).min(end - i);
            let bits = if n == WORD_BITS {
                u64::MAX
            } else {
                ((1u64 << n) - 1) << bit
            };
            self.words[word] |= bits;
            i += n;
        }
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Flat row-major indices of foreground pixels, ascending.
    pub(crate) fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + bit)
            })
        })
    }

    /// Foreground pixels as `(row, col)` in raster order.
    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.dims.width as usize;
        self.indices().map(move |i| ((i / w) as u32, (i % w) as u32))
    }

    /// Leftmost and rightmost foreground column of every row that has one.
    pub fn row_spans(&self) -> Vec<(u32, u32, u32)> {
        let mut spans = Vec::new();
        let mut current: Option<(u32, u32, u32)> = None;
        for (row, col) in self.pixels() {
            match current.as_mut() {
                Some(span) if span.0 == row => span.2 = col,
                _ => {
                    spans.extend(current.take());
                    current = Some((row, col, col));
                }
            }
        }
        spans.extend(current);
        spans
    }

    pub fn intersection_count(&self, other: &BinaryMask) -> Result<u64> {
        self.dims.ensure_eq(other.dims)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a & b).count_ones()))
            .sum())
    }

    pub fn union_count(&self, other: &BinaryMask) -> Result<u64> {
        self.dims.ensure_eq(other.dims)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a | b).count_ones()))
            .sum())
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> Result<bool> {
        self.dims.ensure_eq(other.dims)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    /// In-place union.
    pub fn union_with(&mut self, other: &BinaryMask) -> Result<()> {
        self.dims.ensure_eq(other.dims)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    pub fn transpose(&self) -> BinaryMask {
        let dims = Dims {
            width: self.dims.height,
            height: self.dims.width,
        };
        let mut out = BinaryMask::empty(dims);
        for (row, col) in self.pixels() {
            let idx = out.index(col, row);
            out.set_index(idx);
        }
        out
    }

    /// Rotation by 90 degrees clockwise.
    pub fn rotate90(&self) -> BinaryMask {
        let dims = Dims {
            width: self.dims.height,
            height: self.dims.width,
        };
        let mut out = BinaryMask::empty(dims);
        for (row, col) in self.pixels() {
            let idx = out.index(col, self.dims.height - 1 - row);
            out.set_index(idx);
        }
        out
    }
}

/// Integer-labelled component map; `0` is background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMask {
    dims: Dims,
    labels: Vec<u32>,
    count: u32,
}

impl LabeledMask {
    /// Builds a labelled mask from raw labels, renumbering nothing. Labels
    /// must lie in `0..=count`.
    pub fn from_labels(dims: Dims, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != dims.pixel_count() {
            return Err(Error::InvalidConfig(format!(
                "label grid has {} entries, expected {}",
                labels.len(),
                dims.pixel_count()
            )));
        }
        let count = labels.iter().copied().max().unwrap_or(0);
        Ok(LabeledMask {
            dims,
            labels,
            count,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Largest label present (the component count for masks produced by
    /// [`connected_components`]).
    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn label(&self, row: u32, col: u32) -> u32 {
        self.labels[row as usize * self.dims.width as usize + col as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Pixel count per label; entry `k - 1` is the size of label `k`.
    pub fn component_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.count as usize];
        for &l in &self.labels {
            if l > 0 {
                sizes[l as usize - 1] += 1;
            }
        }
        sizes
    }

    pub fn component_mask(&self, label: u32) -> BinaryMask {
        let mut mask = BinaryMask::empty(self.dims);
        if label == 0 {
            return mask;
        }
        for (i, &l) in self.labels.iter().enumerate() {
            if l == label {
                mask.set_index(i);
            }
        }
        mask
    }

    /// Foreground pixels grouped by label, each group in raster order.
    pub fn pixels_by_label(&self) -> Vec<Vec<(u32, u32)>> {
        let w = self.dims.width as usize;
        let mut groups = vec![Vec::new(); self.count as usize];
        for (i, &l) in self.labels.iter().enumerate() {
            if l > 0 {
                groups[l as usize - 1].push(((i / w) as u32, (i % w) as u32));
            }
        }
        groups
    }
}

/// How a candidate's overlap with a prototype is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMode {
    /// `|candidate ∩ prototype| / |candidate|`
    #[default]
    CandidateFraction,
    /// Intersection over union.
    Iou,
}

impl OverlapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OverlapMode::CandidateFraction => "candidate_fraction",
            OverlapMode::Iou => "iou",
        }
    }
}

impl fmt::Display for OverlapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OverlapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "candidate_fraction" => Ok(OverlapMode::CandidateFraction),
            "iou" => Ok(OverlapMode::Iou),
            other => Err(Error::InvalidConfig(format!(
                "unknown overlap mode `{other}` (expected candidate_fraction or iou)"
            ))),
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Intersection over union. Two empty masks score 0.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    let inter = a.intersection_count(b)?;
    let union = a.union_count(b)?;
    Ok(ratio(inter, union))
}

pub fn overlap_fraction(
    candidate: &BinaryMask,
    prototype: &BinaryMask,
    mode: OverlapMode,
) -> Result<f64> {
    match mode {
        OverlapMode::CandidateFraction => {
            let inter = candidate.intersection_count(prototype)?;
            Ok(ratio(inter, candidate.area()))
        }
        OverlapMode::Iou => iou(candidate, prototype),
    }
}

/// Set union of `masks`, all of which must have dimensions `dims`.
pub fn union(dims: Dims, masks: &[BinaryMask]) -> Result<BinaryMask> {
    let mut out = BinaryMask::empty(dims);
    for m in masks {
        out.union_with(m)?;
    }
    Ok(out)
}

/// 8-connected component labelling. Labels are assigned `1..=K` in the
/// order components are first met by a raster scan.
pub fn connected_components(mask: &BinaryMask) -> LabeledMask {
    let dims = mask.dims();
    let (w, h) = (dims.width as usize, dims.height as usize);
    let mut labels = vec![0u32; dims.pixel_count()];
    let mut next = 0u32;
    let mut stack = Vec::new();

    for start in mask.indices() {
        if labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (r, c) = (i / w, i % w);
            let r0 = r.saturating_sub(1);
            let r1 = (r + 1).min(h - 1);
            let c0 = c.saturating_sub(1);
            let c1 = (c + 1).min(w - 1);
            for nr in r0..=r1 {
                for nc in c0..=c1 {
                    let j = nr * w + nc;
                    if labels[j] == 0 && mask.get_index(j) {
                        labels[j] = next;
                        stack.push(j);
                    }
                }
            }
        }
    }

    LabeledMask {
        dims,
        labels,
        count: next,
    }
}

/// Label of the biggest component of `labeled`, ties to the smallest label.
pub(crate) fn largest_label(labeled: &LabeledMask) -> Option<u32> {
    let sizes = labeled.component_sizes();
    let mut best: Option<(u32, u64)> = None;
    for (i, &size) in sizes.iter().enumerate() {
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((i as u32 + 1, size));
        }
    }
    best.map(|(label, _)| label)
}

/// The component with the most pixels; ties go to the one met first in
/// raster order. An empty mask yields an empty mask.
pub fn largest_component(mask: &BinaryMask) -> BinaryMask {
    let labeled = connected_components(mask);
    match largest_label(&labeled) {
        Some(label) if labeled.count() > 1 => labeled.component_mask(label),
        Some(_) => mask.clone(),
        None => BinaryMask::empty(mask.dims()),
    }
}

pub fn area(mask: &BinaryMask) -> u64 {
    mask.area()
}

/// Mean pixel-center coordinate as `(row, col)`.
pub fn centroid(mask: &BinaryMask) -> Result<(f64, f64)> {
    centroid_of(mask.pixels())
}

pub(crate) fn centroid_of(pixels: impl IntoIterator<Item = (u32, u32)>) -> Result<(f64, f64)> {
    let (mut n, mut sr, mut sc) = (0u64, 0u64, 0u64);
    for (r, c) in pixels {
        n += 1;
        sr += u64::from(r);
        sc += u64::from(c);
    }
    if n == 0 {
        return Err(Error::EmptyMask("centroid"));
    }
    Ok((sr as f64 / n as f64, sc as f64 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(w: u32, h: u32, px: &[(u32, u32)]) -> BinaryMask {
        BinaryMask::from_pixels(w, h, px.iter().copied()).unwrap()
    }

    #[test]
    fn zero_dimensions_are_rejected() {
        assert!(BinaryMask::new(0, 3).is_err());
        assert!(BinaryMask::new(3, 0).is_err());
        assert!(BinaryMask::new(1 << 15, 1 << 15).is_err());
    }

    #[test]
    fn insert_out_of_bounds_is_rejected() {
        let mut m = BinaryMask::new(2, 2).unwrap();
        assert!(matches!(
            m.insert(2, 0),
            Err(Error::PixelOutOfBounds { .. })
        ));
        m.insert(1, 1).unwrap();
        assert!(m.contains(1, 1));
        m.remove(1, 1).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn fill_range_across_word_boundaries() {
        let dims = Dims::new(200, 1).unwrap();
        let mut m = BinaryMask::empty(dims);
        m.fill_range(60, 130);
        assert_eq!(m.area(), 70);
        assert!(!m.contains(0, 59));
        assert!(m.contains(0, 60) && m.contains(0, 129));
        assert!(!m.contains(0, 130));
        assert_eq!(BinaryMask::full(dims).area(), 200);
    }

    #[test]
    fn iou_examples() {
        let a = mask(2, 2, &[(0, 0), (0, 1)]);
        let b = mask(2, 2, &[(0, 1), (1, 1)]);
        assert_eq!(iou(&a, &b).unwrap(), 1.0 / 3.0);
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        let c = mask(2, 2, &[(1, 0)]);
        assert_eq!(iou(&a, &c).unwrap(), 0.0);
        let e = BinaryMask::new(2, 2).unwrap();
        assert_eq!(iou(&e, &e).unwrap(), 0.0);
    }

    #[test]
    fn iou_dimension_mismatch() {
        let a = BinaryMask::new(2, 2).unwrap();
        let b = BinaryMask::new(2, 3).unwrap();
        let err = iou(&a, &b).unwrap_err();
        assert!(err.to_string().contains("2x2"), "{err}");
        assert!(overlap_fraction(&a, &b, OverlapMode::Iou).is_err());
    }

    #[test]
    fn overlap_fraction_examples() {
        let proto = mask(4, 4, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let sub = mask(4, 4, &[(0, 0), (1, 1)]);
        assert_eq!(
            overlap_fraction(&sub, &proto, OverlapMode::CandidateFraction).unwrap(),
            1.0
        );
        let far = mask(4, 4, &[(3, 3)]);
        assert_eq!(
            overlap_fraction(&far, &proto, OverlapMode::CandidateFraction).unwrap(),
            0.0
        );
        let empty = BinaryMask::new(4, 4).unwrap();
        assert_eq!(
            overlap_fraction(&empty, &proto, OverlapMode::CandidateFraction).unwrap(),
            0.0
        );

        // 10 candidate pixels, 7 of them inside a 10x1 prototype strip.
        let proto = BinaryMask::from_pixels(10, 2, (0..7).map(|c| (0, c))).unwrap();
        let cand = BinaryMask::from_pixels(10, 2, (0..7).map(|c| (0, c)).chain((0..3).map(|c| (1, c))))
            .unwrap();
        assert_eq!(
            overlap_fraction(&cand, &proto, OverlapMode::CandidateFraction).unwrap(),
            0.7
        );
        assert_eq!(
            overlap_fraction(&cand, &proto, OverlapMode::Iou).unwrap(),
            iou(&cand, &proto).unwrap()
        );
    }

    #[test]
    fn overlap_mode_names() {
        for mode in [OverlapMode::CandidateFraction, OverlapMode::Iou] {
            assert_eq!(mode.as_str().parse::<OverlapMode>().unwrap(), mode);
            assert_eq!(
                serde_json::to_string(&mode).unwrap(),
                format!("\"{}\"", mode.as_str())
            );
        }
        assert!("IOU".parse::<OverlapMode>().is_err());
    }

    #[test]
    fn union_examples() {
        let dims = Dims::new(4, 4).unwrap();
        assert!(union(dims, &[]).unwrap().is_empty());
        let a = mask(4, 4, &[(0, 0), (0, 1)]);
        let b = mask(4, 4, &[(0, 1), (1, 1)]);
        assert_eq!(union(dims, std::slice::from_ref(&a)).unwrap(), a);
        let u = union(dims, &[a, b]).unwrap();
        assert_eq!(u, mask(4, 4, &[(0, 0), (0, 1), (1, 1)]));
        assert!(union(dims, &[BinaryMask::new(3, 4).unwrap()]).is_err());
    }

    #[test]
    fn components_examples() {
        let empty = BinaryMask::new(5, 5).unwrap();
        assert_eq!(connected_components(&empty).count(), 0);

        let diag = mask(2, 2, &[(0, 0), (1, 1)]);
        assert_eq!(connected_components(&diag).count(), 1);

        let split = mask(3, 3, &[(0, 1), (2, 1)]);
        let labeled = connected_components(&split);
        assert_eq!(labeled.count(), 2);
        assert_eq!(labeled.label(0, 1), 1);
        assert_eq!(labeled.label(2, 1), 2);
        assert_eq!(labeled.label(1, 1), 0);
    }

    #[test]
    fn labels_follow_raster_discovery() {
        // A U shape whose right arm is met first on row 0 but joins the left
        // arm further down: one component.
        let u = mask(5, 3, &[(0, 0), (0, 4), (1, 0), (1, 4), (2, 0), (2, 1), (2, 2), (2, 3), (2, 4)]);
        assert_eq!(connected_components(&u).count(), 1);

        let two = mask(6, 3, &[(2, 0), (0, 5)]);
        let labeled = connected_components(&two);
        assert_eq!(labeled.label(0, 5), 1);
        assert_eq!(labeled.label(2, 0), 2);
    }

    #[test]
    fn largest_component_examples() {
        let single = mask(4, 4, &[(0, 0), (0, 1)]);
        assert_eq!(largest_component(&single), single);

        let mut px: Vec<(u32, u32)> = (0..5).map(|c| (0, c)).collect();
        px.extend((0..3).map(|c| (2, c)));
        let m = mask(6, 3, &px);
        assert_eq!(largest_component(&m).area(), 5);

        let empty = BinaryMask::new(3, 3).unwrap();
        assert!(largest_component(&empty).is_empty());

        // Tie: earliest in raster order wins.
        let tie = mask(5, 3, &[(0, 3), (0, 4), (2, 0), (2, 1)]);
        assert_eq!(largest_component(&tie), mask(5, 3, &[(0, 3), (0, 4)]));
    }

    #[test]
    fn area_and_centroid_examples() {
        let sq = BinaryMask::from_fn(Dims::new(5, 5).unwrap(), |r, c| r < 3 && c < 3);
        assert_eq!(area(&sq), 9);
        assert_eq!(centroid(&sq).unwrap(), (1.0, 1.0));

        let one = mask(10, 10, &[(5, 7)]);
        assert_eq!(centroid(&one).unwrap(), (5.0, 7.0));

        let l = mask(3, 3, &[(0, 0), (1, 0), (1, 1)]);
        let (r, c) = centroid(&l).unwrap();
        assert_eq!(r, 2.0 / 3.0);
        assert_eq!(c, 1.0 / 3.0);

        assert!(matches!(
            centroid(&BinaryMask::new(2, 2).unwrap()),
            Err(Error::EmptyMask(_))
        ));
    }

    #[test]
    fn row_spans_track_extremes() {
        let m = mask(6, 3, &[(0, 2), (0, 4), (2, 0), (2, 5), (2, 3)]);
        assert_eq!(m.row_spans(), vec![(0, 2, 4), (2, 0, 5)]);
    }

    #[test]
    fn rotate_and_transpose_preserve_area() {
        let m = mask(4, 2, &[(0, 0), (0, 3), (1, 1)]);
        let r = m.rotate90();
        assert_eq!(r.dims(), Dims::new(2, 4).unwrap());
        assert!(r.contains(0, 1) && r.contains(3, 1) && r.contains(1, 0));
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(r.rotate90().rotate90().rotate90(), m);
    }
}
