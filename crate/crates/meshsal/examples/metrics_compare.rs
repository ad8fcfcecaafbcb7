//! Evaluate a heuristic saliency prediction against a synthetic ground-truth
//! map with the four comparison metrics (CC, SIM, KLD, SE).

use meshsal::features::gaussian_curvature;
use meshsal::saliency::{baseline_predict, compare_maps};
use meshsal::{shapes, SaliencyMap};

fn main() -> meshsal::Result<()> {
    let mesh = shapes::random_terrain(40, 40, 0.1, 0.35, 3);

    // Ground truth: attention concentrated on the bumpiest region.
    let curvature = gaussian_curvature(&mesh);
    let truth = SaliencyMap::new(
        curvature
            .iter()
            .map(|k| k.abs().sqrt())
            .collect(),
    )?
    .normalize()?;

    // Curvature-magnitude-rank baseline (no texture on this mesh).
    let magnitude: Vec<f64> = curvature.iter().map(|k| k.abs()).collect();
    let pred = baseline_predict(&magnitude, &magnitude, 1.0, 0.0)?;
    let report = compare_maps(&pred, &truth)?;
    println!("baseline vs curvature-derived truth:");
    println!("{}", report.pretty());
    println!("record: {}", report.record_line());

    // Self-comparison sanity check.
    let identity = compare_maps(&truth, &truth)?;
    println!("\ntruth vs itself: {}", identity.record_line());
    Ok(())
}
