//! Random mask generators and brute-force reference implementations used by
//! the maskfuse test suites.
//!
//! The reference code reads masks only through `contains`, `width` and
//! `height`, and never calls into the algorithms it checks.

use maskfuse::{BinaryMask, CandidateSet, Dims};
use nalgebra::{Matrix2, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod synthetic;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_dims(rng: &mut TestRng, max_w: u32, max_h: u32) -> Dims {
    Dims::new(rng.random_range(1..=max_w), rng.random_range(1..=max_h)).unwrap()
}

/// Independent Bernoulli pixels with a density drawn per mask.
pub fn random_noise(rng: &mut TestRng, dims: Dims) -> BinaryMask {
    let p: f64 = rng.random_range(0.0..1.0);
    BinaryMask::from_fn(dims, |_, _| rng.random_bool(p))
}

/// A union of a few random ellipses and rectangles, optionally sprinkled
/// with holes. Always nonempty.
pub fn random_blob(rng: &mut TestRng, dims: Dims) -> BinaryMask {
    let (w, h) = (dims.width as f64, dims.height as f64);
    let shapes = rng.random_range(1..=4);
    let mut parts = Vec::new();
    for _ in 0..shapes {
        let cr = rng.random_range(0.0..h);
        let cc = rng.random_range(0.0..w);
        let ar = rng.random_range(0.5..h.max(1.0));
        let ac = rng.random_range(0.5..w.max(1.0));
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let ellipse = rng.random_bool(0.7);
        parts.push((cr, cc, ar, ac, theta, ellipse));
    }
    let hole_p = if rng.random_bool(0.3) {
        rng.random_range(0.0..0.2)
    } else {
        0.0
    };
    let mut mask = BinaryMask::from_fn(dims, |r, c| {
        let (r, c) = (r as f64, c as f64);
        let inside = parts.iter().any(|&(cr, cc, ar, ac, th, ellipse)| {
            let (dr, dc) = (r - cr, c - cc);
            let u = dr * th.cos() + dc * th.sin();
            let v = -dr * th.sin() + dc * th.cos();
            if ellipse {
                (u / ar).powi(2) + (v / ac).powi(2) <= 1.0
            } else {
                u.abs() <= ar && v.abs() <= ac
            }
        });
        inside && !(hole_p > 0.0 && rng.random_bool(hole_p))
    });
    if mask.is_empty() {
        let r = rng.random_range(0..dims.height);
        let c = rng.random_range(0..dims.width);
        mask.insert(r, c).unwrap();
    }
    mask
}

/// Mixes blobs, noise and degenerate shapes (empty, full, lines, points).
pub fn random_mask(rng: &mut TestRng, dims: Dims) -> BinaryMask {
    match rng.random_range(0..10) {
        0 => BinaryMask::empty(dims),
        1 => BinaryMask::full(dims),
        2 => {
            let r = rng.random_range(0..dims.height);
            BinaryMask::from_fn(dims, |rr, _| rr == r)
        }
        3 | 4 => random_noise(rng, dims),
        _ => random_blob(rng, dims),
    }
}

pub fn foreground(mask: &BinaryMask) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for r in 0..mask.height() {
        for c in 0..mask.width() {
            if mask.contains(r, c) {
                out.push((r, c));
            }
        }
    }
    out
}

/// `(|A ∩ B|, |A ∪ B|)` by visiting every pixel.
pub fn brute_counts(a: &BinaryMask, b: &BinaryMask) -> (u64, u64) {
    assert_eq!(a.dims(), b.dims());
    let (mut inter, mut uni) = (0, 0);
    for r in 0..a.height() {
        for c in 0..a.width() {
            let (x, y) = (a.contains(r, c), b.contains(r, c));
            inter += u64::from(x && y);
            uni += u64::from(x || y);
        }
    }
    (inter, uni)
}

pub fn brute_iou(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let (i, u) = brute_counts(a, b);
    if u == 0 {
        0.0
    } else {
        i as f64 / u as f64
    }
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn join(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// 8-connected components by union-find, each sorted in raster order, and
/// the list ordered by first pixel.
pub fn union_find_components(mask: &BinaryMask) -> Vec<Vec<(u32, u32)>> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let mut sets = DisjointSets((0..w * h).collect());
    for r in 0..h {
        for c in 0..w {
            if !mask.contains(r as u32, c as u32) {
                continue;
            }
            for (dr, dc) in [(0i64, 1i64), (1, -1), (1, 0), (1, 1)] {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if nr < h as i64 && nc >= 0 && nc < w as i64 && mask.contains(nr as u32, nc as u32) {
                    sets.join(r * w + c, nr as usize * w + nc as usize);
                }
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<(u32, u32)>> = Default::default();
    for (r, c) in foreground(mask) {
        let root = sets.find(r as usize * w + c as usize);
        by_root.entry(root).or_default().push((r, c));
    }
    let mut comps: Vec<_> = by_root.into_values().collect();
    comps.sort_by_key(|px| px[0]);
    comps
}

/// Eccentricity from the eigenvalues of the central second-moment matrix.
///
/// Central sums are formed exactly as `Σ (n·x − Σx)²`, i.e. `n²` times the
/// usual sums, which leaves the eigenvalue ratio unchanged.
pub fn eccentricity_oracle(mask: &BinaryMask) -> f64 {
    let px = foreground(mask);
    assert!(!px.is_empty());
    let n = px.len() as i128;
    let sr: i128 = px.iter().map(|&(r, _)| r as i128).sum();
    let sc: i128 = px.iter().map(|&(_, c)| c as i128).sum();
    let (mut rr, mut cc, mut rc) = (0i128, 0i128, 0i128);
    for &(r, c) in &px {
        let dr = n * r as i128 - sr;
        let dc = n * c as i128 - sc;
        rr += dr * dr;
        cc += dc * dc;
        rc += dr * dc;
    }
    let m = Matrix2::new(rr as f64, rc as f64, rc as f64, cc as f64);
    let eig = SymmetricEigen::new(m).eigenvalues;
    let (lo, hi) = (eig[0].min(eig[1]), eig[0].max(eig[1]));
    if hi <= 0.0 {
        return 0.0;
    }
    (1.0 - lo.max(0.0) / hi).sqrt()
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist2(a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)
}

/// Counter-clockwise hull vertices of all foreground pixel centres, as
/// `(x, y) = (col, row)`, by gift wrapping over every pixel. Collinear
/// boundary points are skipped.
pub fn gift_wrap_hull(mask: &BinaryMask) -> Vec<(i64, i64)> {
    let pts: Vec<(i64, i64)> = foreground(mask)
        .into_iter()
        .map(|(r, c)| (c as i64, r as i64))
        .collect();
    let Some(&start) = pts.iter().min_by_key(|p| (p.1, p.0)) else {
        return Vec::new();
    };
    let mut hull = vec![start];
    let mut p = start;
    loop {
        let mut q = if pts[0] == p { pts[pts.len() - 1] } else { pts[0] };
        for &r in &pts {
            if r == p {
                continue;
            }
            let c = cross(p, q, r);
            if c < 0 || (c == 0 && dist2(p, r) > dist2(p, q)) {
                q = r;
            }
        }
        if q == start || q == p {
            break;
        }
        hull.push(q);
        p = q;
    }
    hull
}

/// Number of grid pixels whose centre lies in the closed convex hull of the
/// foreground, checked pixel by pixel with exact integer orientation tests.
pub fn hull_pixel_count_oracle(mask: &BinaryMask) -> u64 {
    let hull = gift_wrap_hull(mask);
    if hull.is_empty() {
        return 0;
    }
    let (x0, x1) = (
        hull.iter().map(|p| p.0).min().unwrap(),
        hull.iter().map(|p| p.0).max().unwrap(),
    );
    let (y0, y1) = (
        hull.iter().map(|p| p.1).min().unwrap(),
        hull.iter().map(|p| p.1).max().unwrap(),
    );
    let mut count = 0;
    for y in 0..mask.height() as i64 {
        for x in 0..mask.width() as i64 {
            if x < x0 || x > x1 || y < y0 || y > y1 {
                continue;
            }
            let inside = (0..hull.len())
                .all(|i| cross(hull[i], hull[(i + 1) % hull.len()], (x, y)) >= 0);
            count += u64::from(inside);
        }
    }
    count
}

pub fn solidity_oracle(mask: &BinaryMask) -> f64 {
    foreground(mask).len() as f64 / hull_pixel_count_oracle(mask) as f64
}

pub fn largest_component_oracle(mask: &BinaryMask) -> Vec<(u32, u32)> {
    let comps = union_find_components(mask);
    let mut best: Option<Vec<(u32, u32)>> = None;
    for comp in comps {
        if best.as_ref().is_none_or(|b| comp.len() > b.len()) {
            best = Some(comp);
        }
    }
    best.unwrap_or_default()
}

/// Index of the finalist with the highest IOU (earliest on ties), and that
/// IOU as an exact fraction `(num, den)`.
pub fn best_by_iou(prototype: &BinaryMask, finalists: &[BinaryMask]) -> (usize, (u64, u64)) {
    let mut best = (0, brute_counts(&finalists[0], prototype));
    for (i, f) in finalists.iter().enumerate().skip(1) {
        let (n, d) = brute_counts(f, prototype);
        let (bn, bd) = best.1;
        // n/d > bn/bd, with 0/0 read as 0
        let (n, d) = if d == 0 { (0, 1) } else { (n, d) };
        let (bn, bd) = if bd == 0 { (0, 1) } else { (bn, bd) };
        if n as u128 * bd as u128 > bn as u128 * d as u128 {
            best = (i, (n, d));
        }
    }
    best
}

/// Prototype plus candidates, some carved out of the prototype so that
/// overlaps spread over the whole range.
pub fn fusion_suite(r: &mut TestRng, n: usize) -> (BinaryMask, CandidateSet) {
    let dims = Dims::new(r.random_range(4..=40), r.random_range(4..=40)).unwrap();
    let proto = random_blob(r, dims);
    let mut set = CandidateSet::new(dims);
    for i in 0..n {
        let m = match r.random_range(0..3) {
            0 => {
                let keep: f64 = r.random_range(0.0..1.0);
                let noise = random_mask(r, dims);
                BinaryMask::from_fn(dims, |y, x| {
                    (proto.contains(y, x) && r.random_bool(keep)) || noise.contains(y, x) && r.random_bool(0.2)
                })
            }
            _ => random_mask(r, dims),
        };
        set.push(format!("c{i}"), m).unwrap();
    }
    (proto, set)
}

