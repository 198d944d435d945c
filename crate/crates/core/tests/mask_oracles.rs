use maskfuse::{
    area, centroid, connected_components, iou, largest_component, overlap_fraction, union,
    BinaryMask, Dims, OverlapMode,
};
use maskfuse_testkit::{
    brute_counts, brute_iou, largest_component_oracle, random_dims, random_mask, rng,
    union_find_components,
};
use proptest::prelude::*;

fn arb_mask(max: u32) -> impl Strategy<Value = BinaryMask> {
    (1..=max, 1..=max, any::<u64>()).prop_map(|(w, h, seed)| {
        let dims = Dims::new(w, h).unwrap();
        random_mask(&mut rng(seed), dims)
    })
}

fn arb_pair(max: u32) -> impl Strategy<Value = (BinaryMask, BinaryMask)> {
    (1..=max, 1..=max, any::<u64>()).prop_map(|(w, h, seed)| {
        let dims = Dims::new(w, h).unwrap();
        let mut r = rng(seed);
        (random_mask(&mut r, dims), random_mask(&mut r, dims))
    })
}

#[test]
fn iou_matches_pixel_counting() {
    let mut r = rng(11);
    for _ in 0..300 {
        let dims = random_dims(&mut r, 64, 64);
        let a = random_mask(&mut r, dims);
        let b = random_mask(&mut r, dims);
        let (i, u) = brute_counts(&a, &b);
        assert_eq!(a.intersection_count(&b).unwrap(), i);
        assert_eq!(a.union_count(&b).unwrap(), u);
        assert_eq!(iou(&a, &b).unwrap(), brute_iou(&a, &b));
    }
}

#[test]
fn components_match_union_find() {
    let mut r = rng(12);
    for _ in 0..300 {
        let dims = random_dims(&mut r, 40, 40);
        let m = random_mask(&mut r, dims);
        let expected = union_find_components(&m);
        let labeled = connected_components(&m);
        assert_eq!(labeled.count() as usize, expected.len());
        assert_eq!(labeled.pixels_by_label(), expected);
        for (k, comp) in expected.iter().enumerate() {
            for &(row, col) in comp {
                assert_eq!(labeled.label(row, col), k as u32 + 1);
            }
        }
        let largest: Vec<_> = largest_component(&m).pixels().collect();
        assert_eq!(largest, largest_component_oracle(&m));
    }
}

#[test]
fn centroid_is_mean_pixel() {
    let mut r = rng(13);
    for _ in 0..100 {
        let dims = random_dims(&mut r, 30, 30);
        let m = random_mask(&mut r, dims);
        let px: Vec<_> = m.pixels().collect();
        if px.is_empty() {
            assert!(centroid(&m).is_err());
            continue;
        }
        let n = px.len() as f64;
        let row = px.iter().map(|p| p.0 as f64).sum::<f64>() / n;
        let col = px.iter().map(|p| p.1 as f64).sum::<f64>() / n;
        let (cr, cc) = centroid(&m).unwrap();
        assert!((cr - row).abs() < 1e-12 && (cc - col).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn iou_is_symmetric_and_bounded((a, b) in arb_pair(24)) {
        let x = iou(&a, &b).unwrap();
        prop_assert_eq!(x, iou(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&x));
        if !a.is_empty() {
            prop_assert_eq!(iou(&a, &a).unwrap(), 1.0);
        }
    }

    #[test]
    fn union_laws((a, b) in arb_pair(24)) {
        let dims = a.dims();
        let ab = union(dims, &[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(&ab, &union(dims, &[b.clone(), a.clone()]).unwrap());
        prop_assert_eq!(&union(dims, &[a.clone(), a.clone()]).unwrap(), &a);
        prop_assert!(a.is_subset_of(&ab).unwrap() && b.is_subset_of(&ab).unwrap());
        prop_assert_eq!(area(&ab), a.union_count(&b).unwrap());
        prop_assert_eq!(&union(dims, &[]).unwrap(), &BinaryMask::empty(dims));
    }

    #[test]
    fn overlap_fraction_counts((a, b) in arb_pair(24)) {
        let (i, _) = brute_counts(&a, &b);
        let frac = overlap_fraction(&a, &b, OverlapMode::CandidateFraction).unwrap();
        if a.is_empty() {
            prop_assert_eq!(frac, 0.0);
        } else {
            prop_assert_eq!(frac, i as f64 / area(&a) as f64);
        }
        prop_assert_eq!(overlap_fraction(&a, &b, OverlapMode::Iou).unwrap(), iou(&a, &b).unwrap());
    }

    #[test]
    fn components_partition_foreground(m in arb_mask(24)) {
        let labeled = connected_components(&m);
        let sizes = labeled.component_sizes();
        prop_assert_eq!(sizes.iter().sum::<u64>(), area(&m));
        prop_assert!(sizes.iter().all(|&s| s > 0));
        let dims = m.dims();
        let parts: Vec<_> = (1..=labeled.count()).map(|k| labeled.component_mask(k)).collect();
        prop_assert_eq!(&union(dims, &parts).unwrap(), &m);
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                prop_assert_eq!(parts[i].intersection_count(&parts[j]).unwrap(), 0);
            }
        }
    }

    #[test]
    fn transforms_preserve_counts((a, b) in arb_pair(24)) {
        prop_assert_eq!(iou(&a.transpose(), &b.transpose()).unwrap(), iou(&a, &b).unwrap());
        prop_assert_eq!(iou(&a.rotate90(), &b.rotate90()).unwrap(), iou(&a, &b).unwrap());
        prop_assert_eq!(a.transpose().transpose(), a.clone());
        let r4 = a.rotate90().rotate90().rotate90().rotate90();
        prop_assert_eq!(&r4, &a);
        prop_assert_eq!(
            connected_components(&a.rotate90()).count(),
            connected_components(&a).count()
        );
    }
}

#[test]
fn dimension_mismatch_is_an_error() {
    let a = BinaryMask::new(3, 3).unwrap();
    let b = BinaryMask::new(3, 4).unwrap();
    assert!(iou(&a, &b).is_err());
    assert!(union(a.dims(), &[a.clone(), b]).is_err());
}
