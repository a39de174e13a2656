mod support;

use proptest::prelude::*;
use shorefit::floodsim::{connected_components, largest_component, shoreline, Connectivity};
use shorefit::preprocess::{otsu_threshold, speckle_filter};
use shorefit::raster::{dilate_mask, rasterize_polygon, GeoTransform, Grid, Polygon, RegionMask};

use support::*;

fn mask_strategy() -> impl Strategy<Value = (usize, usize, Vec<bool>)> {
    (1usize..=32, 1usize..=32, 0.05f64..0.95).prop_flat_map(|(w, h, p)| {
        (
            Just(w),
            Just(h),
            proptest::collection::vec(proptest::bool::weighted(p), w * h),
        )
    })
}

fn grid(w: usize, h: usize) -> Grid {
    Grid::new(GeoTransform::north_up(0.0, h as f64, 1.0).unwrap(), w, h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn components_match_bfs((w, h, bits) in mask_strategy(), eight in any::<bool>()) {
        let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
        let mask = RegionMask::new(grid(w, h), bits.clone()).unwrap();
        let labels = connected_components(&mask, conn);
        let expect = bfs_labels(&bits, w, h, conn);
        prop_assert_eq!(labels.labels(), &expect[..]);
        prop_assert_eq!(labels.count() as usize, expect.iter().copied().max().unwrap_or(0) as usize);
    }

    #[test]
    fn largest_component_is_biggest_bfs_class((w, h, bits) in mask_strategy()) {
        let mask = RegionMask::new(grid(w, h), bits.clone()).unwrap();
        let largest = largest_component(&connected_components(&mask, Connectivity::Eight));
        let expect = bfs_labels(&bits, w, h, Connectivity::Eight);
        let n = expect.iter().copied().max().unwrap_or(0) as usize;
        let mut sizes = vec![0usize; n + 1];
        for &l in &expect {
            sizes[l as usize] += 1;
        }
        // first label reaching the maximum size
        let best = (1..=n).fold(0, |b, l| if b == 0 || sizes[l] > sizes[b] { l } else { b });
        let want: Vec<bool> = expect.iter().map(|&l| n > 0 && l as usize == best).collect();
        prop_assert_eq!(largest.bits(), &want[..]);
    }

    #[test]
    fn speckle_matches_sorted_median(
        (w, h) in (1usize..=32, 1usize..=32),
        radius in 0usize..=4,
        seed in any::<u64>(),
        with_nodata in any::<bool>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..w * h)
            .map(|_| if with_nodata && rng.random_bool(0.1) { -9999.0 } else { rng.random_range(-5i32..5) as f64 * 0.5 })
            .collect();
        let nodata = with_nodata.then_some(-9999.0);
        let input = shorefit::raster::Raster::new(w, h, values.clone(), GeoTransform::north_up(0.0, h as f64, 1.0).unwrap(), nodata, "").unwrap();
        let out = speckle_filter(&input, radius);
        let expect = if radius == 0 {
            values.clone()
        } else {
            sort_median(&values, w, h, radius, |v| v != -9999.0)
        };
        for (i, (&a, &b)) in out.values().iter().zip(&expect).enumerate() {
            if b.is_nan() {
                prop_assert!(out.is_nodata(a), "pixel {} should be nodata, got {}", i, a);
            } else {
                prop_assert_eq!(a, b, "pixel {}", i);
            }
        }
    }

    #[test]
    fn shoreline_matches_neighbor_check((w, h, bits) in mask_strategy()) {
        let mask = RegionMask::new(grid(w, h), bits.clone()).unwrap();
        prop_assert_eq!(shoreline(&mask), brute_shoreline(&bits, w, h));
    }

    #[test]
    fn otsu_matches_exhaustive_search(
        samples in proptest::collection::vec(-50.0f64..50.0, 2..=256),
        bins in 2usize..=64,
    ) {
        prop_assume!(samples.iter().any(|&v| v != samples[0]));
        let input = raster(samples.len(), 1, samples.clone());
        let region = RegionMask::full(input.grid());
        let t = otsu_threshold(&input, &region, bins).unwrap();
        // splits whose variances agree to rounding are ties; the first wins
        let splits = otsu_splits(&samples, bins);
        let best = splits.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * best;
        let chosen = splits.iter().position(|s| (s.0 - t).abs() <= 1e-9 * s.0.abs().max(1.0));
        prop_assert!(chosen.is_some(), "threshold {} is not a bin boundary", t);
        let k = chosen.unwrap();
        prop_assert!(splits[k].1 >= best - tol, "split {} variance {} < max {}", k, splits[k].1, best);
        prop_assert!(splits[..k].iter().all(|s| s.1 < best - tol || (s.1 - splits[k].1).abs() <= tol),
            "an earlier split is strictly better");
    }

    #[test]
    fn dilation_matches_pairwise_distances(
        (w, h, bits) in (1usize..=24, 1usize..=24, 0.01f64..0.2).prop_flat_map(|(w, h, p)| {
            (Just(w), Just(h), proptest::collection::vec(proptest::bool::weighted(p), w * h))
        }),
        sx in prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(10.0)],
        sy in prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(10.0)],
        distance in 0.0f64..40.0,
    ) {
        let g = Grid::new(GeoTransform::new(0.0, 0.0, sx, -sy).unwrap(), w, h);
        let mask = RegionMask::new(g, bits.clone()).unwrap();
        let out = dilate_mask(&mask, distance).unwrap();
        prop_assert_eq!(out.bits(), &brute_dilate(&bits, w, h, sx, sy, distance)[..]);
    }

    #[test]
    fn rasterization_matches_point_in_polygon(
        pts in proptest::collection::vec((-2.0f64..18.0, -2.0f64..18.0), 3..8),
        (w, h) in (1usize..=16, 1usize..=16),
    ) {
        let mut ring = pts.clone();
        ring.push(pts[0]);
        let Ok(poly) = Polygon::new(vec![ring]) else { return Ok(()); };
        let g = grid(w, h);
        let Ok(mask) = rasterize_polygon(&poly, g) else { return Ok(()); };
        for r in 0..h {
            for c in 0..w {
                let (x, y) = g.transform.pixel_center(r, c);
                prop_assert_eq!(mask.get(r, c), poly.contains(x, y), "pixel ({}, {})", r, c);
            }
        }
    }
}
