use mattekit_core::batch::{evaluate_all, refine_all, EvalPair};
use mattekit_core::exec::with_workers;
use mattekit_core::io::{decode_png, encode_gray, encode_rgb, encode_rgba, PngImage};
use mattekit_core::metrics::Reduction;
use mattekit_core::trimap::trimap_from_alpha;
use mattekit_core::Execution;
use mattekit_testkit as tk;

#[test]
fn parallel_and_sequential_batches_agree() {
    let mut rng = tk::rng(21);
    let alphas: Vec<_> = (0..24).map(|_| tk::random_matte(&mut rng, 24, 24)).collect();
    let seq: Vec<_> = refine_all(&alphas, Execution::Sequential).into_iter().map(Result::unwrap).collect();
    let par: Vec<_> = with_workers(3, || refine_all(&alphas, Execution::Parallel))
        .into_iter()
        .map(Result::unwrap)
        .collect();
    assert_eq!(seq, par);

    let pairs: Vec<EvalPair> = alphas
        .chunks(2)
        .map(|c| EvalPair {
            trimap: Some(trimap_from_alpha(&c[1], 2, 2)),
            pred: c[0].clone(),
            gt: c[1].clone(),
        })
        .collect();
    let a: Vec<_> = evaluate_all(&pairs, Reduction::Sum, Execution::Sequential)
        .into_iter()
        .map(|r| r.ok())
        .collect();
    let b: Vec<_> = evaluate_all(&pairs, Reduction::Sum, Execution::Parallel)
        .into_iter()
        .map(|r| r.ok())
        .collect();
    assert_eq!(a, b);
}

#[test]
fn png_round_trips() {
    let mut rng = tk::rng(22);
    let alpha = tk::random_matte(&mut rng, 13, 7);
    let color = tk::random_rgb(&mut rng, 13, 7);

    let gray = encode_gray(13, 7, alpha.as_slice()).unwrap();
    assert_eq!(decode_png(&gray).unwrap(), PngImage::Gray(alpha.clone()));
    let rgb = encode_rgb(&color).unwrap();
    assert_eq!(decode_png(&rgb).unwrap(), PngImage::Rgb(color.clone()));
    let rgba = encode_rgba(&color, &alpha).unwrap();
    assert_eq!(decode_png(&rgba).unwrap(), PngImage::Rgba(color, alpha));
}
