use mattekit_core::connectivity::{connected_components, refine, refine_detailed, Connectivity};
use mattekit_core::matte::{chroma_extract, composite, max_channel_error, solid_background};
use mattekit_core::metrics::{conn, grad, mad, mse, GRAD_SIGMA};
use mattekit_core::{AlphaMatte, KeyColor, MatteError};
use mattekit_testkit as tk;

#[test]
fn labeling_matches_union_find() {
    let mut rng = tk::rng(11);
    for case in 0..1200 {
        let density = [0.2, 0.45, 0.6, 0.8][case % 4];
        let mask = tk::random_mask(&mut rng, 16, 16, density);
        for (conn, eight) in [(Connectivity::Four, false), (Connectivity::Eight, true)] {
            let regions = connected_components(&mask, conn);
            let roots = tk::components(mask.as_slice(), 16, 16, eight);
            assert!(tk::same_partition(regions.label_map(), &roots), "case {case} eight={eight}");
            let distinct: std::collections::HashSet<_> = roots.iter().flatten().collect();
            assert_eq!(regions.region_count(), distinct.len());
        }
    }
}

#[test]
fn refinement_matches_step_by_step_reference() {
    let mut rng = tk::rng(12);
    for case in 0..600 {
        let (w, h) = (8 + case % 17, 8 + (case * 7) % 13);
        let a = tk::random_matte(&mut rng, w, h);
        let expected = tk::reference_refine(&a).unwrap();
        assert_eq!(refine(&a).unwrap().as_slice(), &expected[..], "case {case}");
    }
}

#[test]
fn refinement_invariants_on_random_mattes() {
    let mut rng = tk::rng(13);
    for case in 0..400 {
        let a = tk::random_matte(&mut rng, 20, 20);
        let pass = refine_detailed(&a).unwrap();
        let out = &pass.refined;

        assert_eq!(refine(out).unwrap(), *out, "idempotence, case {case}");

        let positive: Vec<bool> = out.as_slice().iter().map(|&v| v > 0).collect();
        let roots = tk::components(&positive, 20, 20, false);
        let distinct: std::collections::HashSet<_> = roots.iter().flatten().collect();
        assert_eq!(distinct.len(), 1, "single component, case {case}");

        // every pixel either keeps its value, becomes opaque (semi only) or is cleared
        for (i, (&before, &after)) in a.as_slice().iter().zip(out.as_slice()).enumerate() {
            let semi = before > 0 && before < 255;
            assert!(
                after == before || after == 0 || (semi && after == 255),
                "pixel {i}: {before} -> {after}"
            );
        }
        let changed_semi = a
            .as_slice()
            .iter()
            .zip(out.as_slice())
            .filter(|(&b, &o)| b > 0 && b < 255 && b != o)
            .count();
        assert_eq!(pass.corrected_semi_pixels(&a), changed_semi);

        // each remaining semi pixel connects to the background through semi pixels
        let semi_out: Vec<bool> = out.as_slice().iter().map(|&v| v > 0 && v < 255).collect();
        let semi_roots = tk::components(&semi_out, 20, 20, true);
        let zero: Vec<bool> = a.as_slice().iter().map(|&v| v == 0).collect();
        let touching: std::collections::HashSet<usize> = (0..400)
            .filter(|&i| semi_out[i])
            .filter(|&i| {
                let (r, c) = (i / 20, i % 20);
                (r.saturating_sub(1)..=(r + 1).min(19))
                    .any(|rr| (c.saturating_sub(1)..=(c + 1).min(19)).any(|cc| zero[rr * 20 + cc]))
            })
            .filter_map(|i| semi_roots[i])
            .collect();
        for (i, root) in semi_roots.iter().enumerate() {
            if let Some(r) = *root {
                assert!(touching.contains(&r), "case {case}: semi pixel {i} detached from background");
            }
        }
    }
}

#[test]
fn procedural_noise_is_removed_exactly() {
    let mut rng = tk::rng(14);
    for case in 0..40 {
        let clean = tk::clean_subject(&mut rng, 64, 48);
        let noisy = tk::inject_noise(&mut rng, &clean);
        assert_ne!(noisy, clean, "case {case} injected nothing");
        assert_eq!(refine(&noisy).unwrap(), clean, "case {case}");
    }
}

#[test]
fn empty_matte_is_rejected() {
    let a = AlphaMatte::filled(5, 5, 0).unwrap();
    assert!(matches!(refine(&a), Err(MatteError::EmptyForeground)));
}

#[test]
fn pixel_metrics_match_naive_sums() {
    let mut rng = tk::rng(15);
    for _ in 0..100 {
        let p = tk::random_matte(&mut rng, 32, 32);
        let g = tk::random_matte(&mut rng, 32, 32);
        let m = tk::random_mask(&mut rng, 32, 32, 0.5);
        for region in [None, Some(&m)] {
            assert!(tk::rel_close(mad(&p, &g, region).unwrap(), tk::naive_mad(&p, &g, region), 1e-12));
            assert!(tk::rel_close(mse(&p, &g, region).unwrap(), tk::naive_mse(&p, &g, region), 1e-12));
        }
    }
}

#[test]
fn grad_matches_direct_convolution() {
    let mut rng = tk::rng(16);
    for case in 0..40 {
        let (w, h) = (16 - case % 5, 16 - case % 3);
        let p = tk::random_matte(&mut rng, w, h);
        let g = tk::random_matte(&mut rng, w, h);
        let m = tk::random_mask(&mut rng, w, h, 0.6);
        for region in [None, Some(&m)] {
            let got = grad(&p, &g, region).unwrap();
            let want = tk::direct_grad(&p, &g, region, GRAD_SIGMA);
            assert!(tk::rel_close(got, want, 1e-9), "case {case}: {got} vs {want}");
        }
    }
}

#[test]
fn tiny_images_reflect_repeatedly() {
    let p = AlphaMatte::from_fn(3, 2, |r, c| (r * 90 + c * 40) as u8).unwrap();
    let g = AlphaMatte::filled(3, 2, 17).unwrap();
    let got = grad(&p, &g, None).unwrap();
    assert!(tk::rel_close(got, tk::direct_grad(&p, &g, None, GRAD_SIGMA), 1e-9));
}

#[test]
fn conn_matches_exhaustive_sweep() {
    let mut rng = tk::rng(17);
    let mut checked = 0;
    for case in 0..120 {
        let p = tk::blocky_matte(&mut rng, 16, 16);
        let g = tk::blocky_matte(&mut rng, 16, 16);
        let m = tk::random_mask(&mut rng, 16, 16, 0.6);
        for region in [None, Some(&m)] {
            match (conn(&p, &g, region), tk::exhaustive_conn(&p, &g, region)) {
                (Ok(got), Some(want)) => {
                    assert!(tk::rel_close(got, want, 1e-9), "case {case}: {got} vs {want}");
                    checked += 1;
                }
                (Err(MatteError::ConnUndefined), None) => {}
                (got, want) => panic!("case {case}: {got:?} vs {want:?}"),
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn conn_detached_blob_fixture() {
    let gt = AlphaMatte::from_fn(8, 8, |_, c| if c < 4 { 255 } else { 0 }).unwrap();
    let mut pred = gt.clone();
    pred.set(2, 6, 200);
    pred.set(2, 7, 200);
    let got = conn(&pred, &gt, None).unwrap();
    let want = tk::exhaustive_conn(&pred, &gt, None).unwrap();
    assert!(tk::rel_close(got, want, 1e-12));
    // both blob pixels: l = 0, phi_pred = 1 - 200/255, phi_gt = 1
    assert!(tk::rel_close(got, 2.0 * 200.0 / 255.0 * 1e-3, 1e-12));
}

#[test]
fn chroma_round_trip_on_random_foregrounds() {
    let mut rng = tk::rng(18);
    for case in 0..50 {
        let key = [KeyColor::GREEN, KeyColor { r: 0, g: 0, b: 255 }][case % 2];
        let fg = tk::random_rgb(&mut rng, 24, 20);
        let alpha = tk::random_matte(&mut rng, 24, 20);
        let bg = solid_background(key, 24, 20).unwrap();
        let comp = composite(&fg, &alpha, &bg).unwrap();
        let (a2, f2) = chroma_extract(&comp, key);
        let recomposed = composite(&f2, &a2, &bg).unwrap();
        assert!(max_channel_error(&recomposed, &comp).unwrap() <= 1, "case {case}");
    }
}
