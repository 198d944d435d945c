use maskfuse::{
    central_second_moments, connected_components, convex_hull_mask, eccentricity,
    per_component_metrics, region_metrics, solidity, BinaryMask, Dims,
};
use maskfuse_testkit::{
    eccentricity_oracle, hull_pixel_count_oracle, random_blob, random_dims, random_noise, rng,
    solidity_oracle,
};
use proptest::prelude::*;
use rand::Rng;

fn rect(w: u32, h: u32) -> BinaryMask {
    BinaryMask::full(Dims::new(w, h).unwrap())
}

fn arb_blob(max: u32) -> impl Strategy<Value = BinaryMask> {
    (1..=max, 1..=max, any::<u64>()).prop_map(|(w, h, seed)| {
        random_blob(&mut rng(seed), Dims::new(w, h).unwrap())
    })
}

#[test]
fn eccentricity_matches_eigen_oracle() {
    let mut r = rng(21);
    for _ in 0..300 {
        let dims = random_dims(&mut r, 48, 48);
        let m = random_blob(&mut r, dims);
        let got = eccentricity(&m).unwrap();
        let want = eccentricity_oracle(&m);
        assert!((got - want).abs() <= 1e-9, "{got} vs {want} on {dims}");
    }
}

#[test]
fn solidity_matches_point_in_hull_oracle() {
    let mut r = rng(22);
    for _ in 0..300 {
        let dims = random_dims(&mut r, 40, 40);
        let m = if r.random_bool(0.5) { random_blob(&mut r, dims) } else { random_noise(&mut r, dims) };
        if m.is_empty() {
            continue;
        }
        let hull = convex_hull_mask(&m).unwrap();
        assert_eq!(hull.area(), hull_pixel_count_oracle(&m), "{dims}");
        assert!(m.is_subset_of(&hull).unwrap());
        assert_eq!(solidity(&m).unwrap(), solidity_oracle(&m));
    }
}

#[test]
fn rectangles_have_closed_form_moments() {
    for h in 1..=12u32 {
        for w in 1..=12u32 {
            let m = rect(w, h);
            let mo = central_second_moments(&m).unwrap();
            let vr = (f64::from(h * h) - 1.0) / 12.0;
            let vc = (f64::from(w * w) - 1.0) / 12.0;
            assert!((mo.rr - vr).abs() < 1e-12 && (mo.cc - vc).abs() < 1e-12);
            assert_eq!(mo.rc, 0.0);
            let (lo, hi) = (vr.min(vc), vr.max(vc));
            let want = if hi == 0.0 { 0.0 } else { (1.0 - lo / hi).sqrt() };
            assert!((eccentricity(&m).unwrap() - want).abs() <= 1e-12, "{w}x{h}");
            assert_eq!(solidity(&m).unwrap(), 1.0);
        }
    }
}

#[test]
fn shape_golden_values() {
    for n in 1..=20 {
        assert!(eccentricity(&rect(n, n)).unwrap().abs() <= 1e-9);
    }
    for n in 2..=20 {
        assert_eq!(eccentricity(&rect(n, 1)).unwrap(), 1.0);
        assert_eq!(eccentricity(&rect(1, n)).unwrap(), 1.0);
    }
    assert!((eccentricity(&rect(4, 2)).unwrap() - 0.894427191).abs() <= 1e-9);
    assert!((eccentricity(&rect(2, 4)).unwrap() - 0.894427191).abs() <= 1e-9);

    let diag = BinaryMask::from_pixels(6, 6, (0..6).map(|i| (i, i))).unwrap();
    assert_eq!(eccentricity(&diag).unwrap(), 1.0);
    assert_eq!(solidity(&diag).unwrap(), 1.0);

    let l_shape = BinaryMask::from_pixels(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap();
    assert_eq!(solidity(&l_shape).unwrap(), 1.0);

    let ring = BinaryMask::from_fn(Dims::new(5, 5).unwrap(), |r, c| !(r == 2 && c == 2));
    assert_eq!(solidity(&ring).unwrap(), 24.0 / 25.0);
}

#[test]
fn per_component_metrics_match_isolated_regions() {
    let mut r = rng(23);
    for _ in 0..50 {
        let dims = random_dims(&mut r, 32, 32);
        let m = random_noise(&mut r, dims);
        let labeled = connected_components(&m);
        let metrics = per_component_metrics(&labeled);
        assert_eq!(metrics.len(), labeled.count() as usize);
        for (label, got) in metrics {
            let want = region_metrics(&labeled.component_mask(label)).unwrap();
            assert_eq!(got, want);
        }
    }
}

proptest! {
    #[test]
    fn hull_is_idempotent(m in arb_blob(32)) {
        let hull = convex_hull_mask(&m).unwrap();
        prop_assert_eq!(&convex_hull_mask(&hull).unwrap(), &hull);
        prop_assert_eq!(solidity(&hull).unwrap(), 1.0);
    }

    #[test]
    fn shape_metrics_survive_rotation_and_transpose(m in arb_blob(32)) {
        let e = eccentricity(&m).unwrap();
        let s = solidity(&m).unwrap();
        for t in [m.transpose(), m.rotate90(), m.rotate90().rotate90()] {
            prop_assert!((eccentricity(&t).unwrap() - e).abs() <= 1e-12);
            prop_assert_eq!(solidity(&t).unwrap(), s);
        }
    }

    #[test]
    fn metrics_are_translation_invariant(m in arb_blob(24), dr in 0u32..8, dc in 0u32..8) {
        let dims = Dims::new(m.width() + dc, m.height() + dr).unwrap();
        let shifted = BinaryMask::from_pixels(
            dims.width,
            dims.height,
            m.pixels().map(|(r, c)| (r + dr, c + dc)),
        )
        .unwrap();
        let a = region_metrics(&m).unwrap();
        let b = region_metrics(&shifted).unwrap();
        prop_assert_eq!(a.area, b.area);
        prop_assert_eq!(a.solidity, b.solidity);
        prop_assert!((a.eccentricity - b.eccentricity).abs() <= 1e-12);
        prop_assert!((a.centroid.row + f64::from(dr) - b.centroid.row).abs() < 1e-9);
        prop_assert!((a.centroid.col + f64::from(dc) - b.centroid.col).abs() < 1e-9);
    }

    #[test]
    fn bounds(m in arb_blob(32)) {
        let e = eccentricity(&m).unwrap();
        let s = solidity(&m).unwrap();
        prop_assert!((0.0..=1.0).contains(&e));
        prop_assert!(s > 0.0 && s <= 1.0);
    }
}

#[test]
fn empty_masks_are_rejected() {
    let empty = BinaryMask::new(4, 4).unwrap();
    assert!(eccentricity(&empty).is_err());
    assert!(solidity(&empty).is_err());
    assert!(convex_hull_mask(&empty).is_err());
    assert!(region_metrics(&empty).is_err());
}
