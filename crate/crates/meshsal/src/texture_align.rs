//! Texture alignment: map each face's irregular UV triangle onto a
//! fixed-size square sample grid over the texture, giving every face a
//! texture feature of uniform dimension.
//!
//! UV coordinates are rescaled from (0,1) to (-1,1), the triangle's bounds
//! are expanded symmetrically along the shorter dimension into a square,
//! and the square is sampled on a GxG cell-center grid with bilinear
//! interpolation (edge clamping fills area reaching past the chart).

use nalgebra::Vector2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::TexturedMesh;
use crate::texture::TextureImage;

pub const DEFAULT_GRID: usize = 8;
const EPS_UV_AREA: f64 = 1e-14;
const EPS_INSIDE: f64 = 1e-12;

/// Square bounds in (-1,1)-scaled UV space: [x_min, y_min, x_max, y_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareBounds {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone)]
pub struct FacePatch {
    pub face: u32,
    /// grid[row][col]: row follows y ascending, col follows x ascending.
    pub grid: Vec<Vec<[f64; 3]>>,
    pub bounds: SquareBounds,
    pub inside_mask: Vec<Vec<bool>>,
    pub mean_color: [f64; 3],
    pub color_variance: f64,
}

impl FacePatch {
    pub fn grid_size(&self) -> usize {
        self.grid.len()
    }

    pub fn grid_flat(&self) -> impl Iterator<Item = &[f64; 3]> {
        self.grid.iter().flat_map(|row| row.iter())
    }
}

/// Rescale a UV triangle to (-1,1) and expand the shorter bound dimension
/// symmetrically about its center until the bounds are square. Bounds may
/// extend past (-1,1) near the chart edge; sampling clamps there.
pub fn expand_bounds(uv_triangle: &[Vector2<f64>; 3]) -> Result<SquareBounds> {
    let t: Vec<Vector2<f64>> = uv_triangle.iter().map(|p| p * 2.0 - Vector2::new(1.0, 1.0)).collect();
    let area2 = ((t[1] - t[0]).perp(&(t[2] - t[0]))).abs() / 2.0;
    // Scaled area is 4x the [0,1] chart area.
    if area2 / 4.0 <= EPS_UV_AREA {
        return Err(Error::DegenerateUv {
            face: 0,
            epsilon: EPS_UV_AREA,
        });
    }
    let x_min = t.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let x_max = t.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let y_min = t.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let y_max = t.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let w = x_max - x_min;
    let h = y_max - y_min;
    let side = w.max(h);
    let cx = (x_min + x_max) / 2.0;
    let cy = (y_min + y_max) / 2.0;
    Ok(SquareBounds {
        x_min: cx - side / 2.0,
        x_max: cx + side / 2.0,
        y_min: cy - side / 2.0,
        y_max: cy + side / 2.0,
    })
}

/// Sample a GxG cell-center grid over the square bounds, mapping each point
/// back from (-1,1) to [0,1] UV and bilinearly interpolating the texture.
pub fn sample_patch(
    tex: &TextureImage,
    bounds: &SquareBounds,
    uv_triangle: &[Vector2<f64>; 3],
    grid_size: usize,
) -> (Vec<Vec<[f64; 3]>>, Vec<Vec<bool>>) {
    assert!(grid_size >= 2, "grid size must be >= 2");
    let scaled: Vec<Vector2<f64>> = uv_triangle
        .iter()
        .map(|p| p * 2.0 - Vector2::new(1.0, 1.0))
        .collect();
    let side = bounds.x_max - bounds.x_min;
    let cell = side / grid_size as f64;
    let mut grid = Vec::with_capacity(grid_size);
    let mut mask = Vec::with_capacity(grid_size);
    for row in 0..grid_size {
        let y = bounds.y_min + (row as f64 + 0.5) * cell;
        let mut grid_row = Vec::with_capacity(grid_size);
        let mut mask_row = Vec::with_capacity(grid_size);
        for col in 0..grid_size {
            let x = bounds.x_min + (col as f64 + 0.5) * cell;
            let u = ((x + 1.0) / 2.0).clamp(0.0, 1.0);
            let v = ((y + 1.0) / 2.0).clamp(0.0, 1.0);
            grid_row.push(tex.sample_uv(u, v));
            mask_row.push(point_in_triangle(&Vector2::new(x, y), &scaled));
        }
        grid.push(grid_row);
        mask.push(mask_row);
    }
    (grid, mask)
}

/// Edge-inclusive point-in-triangle test via signed areas.
fn point_in_triangle(p: &Vector2<f64>, t: &[Vector2<f64>]) -> bool {
    let sign = |a: &Vector2<f64>, b: &Vector2<f64>| (b - a).perp(&(p - a));
    let d0 = sign(&t[0], &t[1]);
    let d1 = sign(&t[1], &t[2]);
    let d2 = sign(&t[2], &t[0]);
    let has_neg = d0 < -EPS_INSIDE || d1 < -EPS_INSIDE || d2 < -EPS_INSIDE;
    let has_pos = d0 > EPS_INSIDE || d1 > EPS_INSIDE || d2 > EPS_INSIDE;
    !(has_neg && has_pos)
}

/// Build one patch for the given face.
pub fn face_patch(
    mesh: &TexturedMesh,
    tex: &TextureImage,
    face: usize,
    grid_size: usize,
) -> Result<FacePatch> {
    let uvs = mesh.uv_corners().ok_or(Error::MissingUv)?;
    let uv_triangle = &uvs[face];
    let bounds = expand_bounds(uv_triangle).map_err(|e| match e {
        Error::DegenerateUv { epsilon, .. } => Error::DegenerateUv { face, epsilon },
        other => other,
    })?;
    let (grid, inside_mask) = sample_patch(tex, &bounds, uv_triangle, grid_size);

    let mut mean = [0.0f64; 3];
    let mut count = 0usize;
    for (grow, mrow) in grid.iter().zip(&inside_mask) {
        for (color, &inside) in grow.iter().zip(mrow) {
            if inside {
                for ch in 0..3 {
                    mean[ch] += color[ch];
                }
                count += 1;
            }
        }
    }
    // A non-degenerate UV triangle always covers its bound center region,
    // but guard against an all-outside mask at tiny grid sizes.
    if count == 0 {
        return Err(Error::DegenerateUv {
            face,
            epsilon: EPS_UV_AREA,
        });
    }
    for ch in &mut mean {
        *ch /= count as f64;
    }
    let mut var = 0.0;
    for (grow, mrow) in grid.iter().zip(&inside_mask) {
        for (color, &inside) in grow.iter().zip(mrow) {
            if inside {
                for ch in 0..3 {
                    let d = color[ch] - mean[ch];
                    var += d * d;
                }
            }
        }
    }
    let color_variance = var / (3.0 * count as f64);

    Ok(FacePatch {
        face: face as u32,
        grid,
        bounds,
        inside_mask,
        mean_color: mean,
        color_variance,
    })
}

/// One patch per face; statistics are computed over inside-mask samples only.
pub fn face_texture_features(
    mesh: &TexturedMesh,
    tex: &TextureImage,
    grid_size: usize,
) -> Result<Vec<FacePatch>> {
    if mesh.uv_corners().is_none() {
        return Err(Error::MissingUv);
    }
    (0..mesh.face_count())
        .into_par_iter()
        .map(|f| face_patch(mesh, tex, f, grid_size))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn uv(x: f64, y: f64) -> Vector2<f64> {
        Vector2::new(x, y)
    }

    #[test]
    fn bounds_expand_shorter_dimension() {
        // UV triangle with scaled bounds [0.2,0.1,0.6,0.3]: w=0.4, h=0.2.
        let tri = [uv(0.6, 0.55), uv(0.8, 0.55), uv(0.7, 0.65)];
        let b = expand_bounds(&tri).unwrap();
        assert!((b.x_min - 0.2).abs() < 1e-12);
        assert!((b.x_max - 0.6).abs() < 1e-12);
        assert!((b.y_min - 0.0).abs() < 1e-12);
        assert!((b.y_max - 0.4).abs() < 1e-12);
    }

    #[test]
    fn square_bounds_unchanged() {
        let tri = [uv(0.25, 0.25), uv(0.75, 0.25), uv(0.25, 0.75)];
        let b = expand_bounds(&tri).unwrap();
        assert!((b.x_min - -0.5).abs() < 1e-12);
        assert!((b.x_max - 0.5).abs() < 1e-12);
        assert!((b.y_min - -0.5).abs() < 1e-12);
        assert!((b.y_max - 0.5).abs() < 1e-12);
        assert!(((b.x_max - b.x_min) - (b.y_max - b.y_min)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_uv_triangle_is_rejected() {
        let tri = [uv(0.1, 0.1), uv(0.5, 0.5), uv(0.9, 0.9)];
        assert!(matches!(
            expand_bounds(&tri),
            Err(Error::DegenerateUv { .. })
        ));
    }

    #[test]
    fn bounds_past_chart_edge_clamp_to_edge_pixels() {
        // Thin triangle hugging the left chart edge: the expanded square
        // extends past u=0; sampled values there equal edge-pixel values.
        let tex = TextureImage::from_fn(8, 8, |u, _| [u, 0.0, 0.0]);
        let tri = [uv(0.0, 0.2), uv(0.05, 0.2), uv(0.0, 0.8)];
        let b = expand_bounds(&tri).unwrap();
        assert!(b.x_min < -1.0);
        let (grid, _) = sample_patch(&tex, &b, &tri, 8);
        let edge_value = tex.sample_uv(0.0, 0.5)[0];
        for row in &grid {
            // Leftmost columns map to u<0 and must clamp to the edge column.
            assert!((row[0][0] - edge_value).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_texture_gives_zero_variance() {
        let mesh = shapes::textured_quad();
        let tex = TextureImage::constant(4, 4, [0.3, 0.6, 0.9]);
        let patches = face_texture_features(&mesh, &tex, 8).unwrap();
        for p in &patches {
            assert!(p.color_variance.abs() < 1e-15);
            for ch in 0..3 {
                assert!((p.mean_color[ch] - [0.3, 0.6, 0.9][ch]).abs() < 1e-12);
            }
            assert!(p.inside_mask.iter().flatten().any(|&m| m));
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn gradient_texture_rows_and_columns() {
        let tex = TextureImage::from_fn(32, 32, |u, _| [u, u, u]);
        let tri = [uv(0.2, 0.2), uv(0.8, 0.2), uv(0.5, 0.8)];
        let b = expand_bounds(&tri).unwrap();
        let (grid, _) = sample_patch(&tex, &b, &tri, 8);
        for row in &grid {
            for c in 1..row.len() {
                assert!(row[c][0] > row[c - 1][0]);
            }
        }
        for c in 0..8 {
            for r in 1..8 {
                assert!((grid[r][c][0] - grid[0][c][0]).abs() < 1e-9);
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn affine_texture_alignment_is_exact() {
        // Texture equal to a*u + b*v + c at pixel centers: the patch value
        // at every grid point equals the affine function at that point's UV.
        let (a, b, c) = (0.25, 0.35, 0.15);
        let tex = TextureImage::from_fn(64, 64, |u, v| [a * u + b * v + c; 3]);
        let tri = [uv(0.3, 0.25), uv(0.7, 0.35), uv(0.45, 0.75)];
        let bounds = expand_bounds(&tri).unwrap();
        let g = 8;
        let (grid, _) = sample_patch(&tex, &bounds, &tri, g);
        let side = bounds.x_max - bounds.x_min;
        for row in 0..g {
            for col in 0..g {
                let x = bounds.x_min + (col as f64 + 0.5) * side / g as f64;
                let y = bounds.y_min + (row as f64 + 0.5) * side / g as f64;
                let (u, v) = ((x + 1.0) / 2.0, (y + 1.0) / 2.0);
                // Stay inside the exactly-affine region (pixel centers).
                if !(0.5 / 64.0..=1.0 - 0.5 / 64.0).contains(&u) || !(0.5 / 64.0..=1.0 - 0.5 / 64.0).contains(&v)
                {
                    continue;
                }
                assert!((grid[row][col][0] - (a * u + b * v + c)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn variance_invariant_under_corner_permutation() {
        let tex = TextureImage::from_fn(16, 16, |u, v| [u, v, u * v]);
        let tri = [uv(0.2, 0.3), uv(0.7, 0.25), uv(0.5, 0.8)];
        let mesh_for = |t: [Vector2<f64>; 3]| {
            TexturedMesh::new(
                vec![
                    nalgebra::Point3::new(0.0, 0.0, 0.0),
                    nalgebra::Point3::new(1.0, 0.0, 0.0),
                    nalgebra::Point3::new(0.0, 1.0, 0.0),
                ],
                vec![[0, 1, 2]],
                Some(vec![t]),
                None,
            )
            .unwrap()
        };
        let base = face_patch(&mesh_for(tri), &tex, 0, 8).unwrap();
        for perm in [[1usize, 2, 0], [2, 0, 1], [0, 2, 1]] {
            let t = [tri[perm[0]], tri[perm[1]], tri[perm[2]]];
            let p = face_patch(&mesh_for(t), &tex, 0, 8).unwrap();
            assert!((p.color_variance - base.color_variance).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_color_within_inside_sample_range() {
        let tex = TextureImage::from_fn(16, 16, |u, v| [u, v, 0.5]);
        let mesh = shapes::textured_quad();
        let patches = face_texture_features(&mesh, &tex, 8).unwrap();
        for p in &patches {
            for ch in 0..3 {
                let inside: Vec<f64> = p
                    .grid
                    .iter()
                    .zip(&p.inside_mask)
                    .flat_map(|(g, m)| g.iter().zip(m).filter(|(_, &i)| i).map(|(c, _)| c[ch]))
                    .collect();
                let lo = inside.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = inside.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!(p.mean_color[ch] >= lo - 1e-12 && p.mean_color[ch] <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn checkerboard_face_variance_ordering() {
        // A face spanning many checker cells has higher variance than a face
        // inside a single cell; oracle is the direct variance computation.
        let cells = 8.0;
        let tex = TextureImage::from_fn(64, 64, |u, v| {
            let on = ((u * cells).floor() + (v * cells).floor()) as i64 % 2 == 0;
            if on {
                [1.0, 1.0, 1.0]
            } else {
                [0.0, 0.0, 0.0]
            }
        });
        let big = [uv(0.05, 0.05), uv(0.95, 0.1), uv(0.5, 0.95)];
        let small = [uv(0.02, 0.02), uv(0.08, 0.02), uv(0.05, 0.08)];
        let mk = |t: [Vector2<f64>; 3]| {
            TexturedMesh::new(
                vec![
                    nalgebra::Point3::new(0.0, 0.0, 0.0),
                    nalgebra::Point3::new(1.0, 0.0, 0.0),
                    nalgebra::Point3::new(0.0, 1.0, 0.0),
                ],
                vec![[0, 1, 2]],
                Some(vec![t]),
                None,
            )
            .unwrap()
        };
        let pb = face_patch(&mk(big), &tex, 0, 8).unwrap();
        let ps = face_patch(&mk(small), &tex, 0, 8).unwrap();
        assert!(pb.color_variance > ps.color_variance);
    }

    #[test]
    fn missing_uv_is_an_error() {
        let mesh = shapes::unit_cube();
        let tex = TextureImage::constant(2, 2, [0.5; 3]);
        assert!(matches!(
            face_texture_features(&mesh, &tex, 8),
            Err(Error::MissingUv)
        ));
    }
}
