//! Texture alignment demo: sample fixed-size square patches around each
//! face's UV triangle from a procedural texture and report per-face color
//! statistics.

use meshsal::texture_align::{expand_bounds, face_texture_features};
use meshsal::{shapes, TextureImage};

fn main() -> meshsal::Result<()> {
    // A grid in [0,1]^2 UV space over a checker-with-gradient texture.
    let mesh = shapes::planar_grid(8, 8, 0.125);
    let tex = TextureImage::from_fn(256, 256, |u, v| {
        let checker = (((u * 5.0) as u32 + (v * 5.0) as u32) % 2) as f64;
        [0.2 + 0.6 * checker, u, v]
    });

    let uvs = mesh.uv_corners().expect("grid carries UVs");
    let bounds = expand_bounds(&uvs[0])?;
    println!(
        "face 0 square bounds in (-1,1) texture space: [{:.3}, {:.3}] x [{:.3}, {:.3}]",
        bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max
    );

    let patches = face_texture_features(&mesh, &tex, 8)?;
    let (lo, hi) = patches
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p.color_variance), hi.max(p.color_variance))
        });
    let g = patches[0].grid_size();
    println!(
        "{} patches of {g}x{g} cells; color variance range [{lo:.4}, {hi:.4}]",
        patches.len(),
    );

    let flattest = patches
        .iter()
        .min_by(|a, b| a.color_variance.total_cmp(&b.color_variance))
        .unwrap();
    println!(
        "flattest face {} has mean color ({:.3}, {:.3}, {:.3})",
        flattest.face, flattest.mean_color[0], flattest.mean_color[1], flattest.mean_color[2]
    );
    Ok(())
}
