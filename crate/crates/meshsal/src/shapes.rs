//! Procedural test geometry: cube, icosphere, planar grid, random terrain.
//!
//! These are the synthetic stimuli used by the examples and the test suites;
//! none of them require input files.

use nalgebra::{Point3, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use crate::mesh::TexturedMesh;

/// Axis-aligned unit cube centered at the origin, 12 triangles, outward winding.
pub fn unit_cube() -> TexturedMesh {
    cube(1.0)
}

pub fn cube(side: f64) -> TexturedMesh {
    let h = side / 2.0;
    let v = |x: f64, y: f64, z: f64| Point3::new(x * h, y * h, z * h);
    let vertices = vec![
        v(-1.0, -1.0, -1.0),
        v(1.0, -1.0, -1.0),
        v(1.0, 1.0, -1.0),
        v(-1.0, 1.0, -1.0),
        v(-1.0, -1.0, 1.0),
        v(1.0, -1.0, 1.0),
        v(1.0, 1.0, 1.0),
        v(-1.0, 1.0, 1.0),
    ];
    let faces = vec![
        // -z
        [0, 2, 1],
        [0, 3, 2],
        // +z
        [4, 5, 6],
        [4, 6, 7],
        // -y
        [0, 1, 5],
        [0, 5, 4],
        // +y
        [3, 6, 2],
        [3, 7, 6],
        // -x
        [0, 4, 7],
        [0, 7, 3],
        // +x
        [1, 2, 6],
        [1, 6, 5],
    ];
    TexturedMesh::new(vertices, faces, None, None).unwrap()
}

/// Icosphere of the given radius; `subdivisions` = 0 gives the icosahedron
/// (20 faces), each level quadruples the face count.
pub fn icosphere(radius: f64, subdivisions: u32) -> TexturedMesh {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = vec![
        Point3::new(-1.0, phi, 0.0),
        Point3::new(1.0, phi, 0.0),
        Point3::new(-1.0, -phi, 0.0),
        Point3::new(1.0, -phi, 0.0),
        Point3::new(0.0, -1.0, phi),
        Point3::new(0.0, 1.0, phi),
        Point3::new(0.0, -1.0, -phi),
        Point3::new(0.0, 1.0, -phi),
        Point3::new(phi, 0.0, -1.0),
        Point3::new(phi, 0.0, 1.0),
        Point3::new(-phi, 0.0, -1.0),
        Point3::new(-phi, 0.0, 1.0),
    ];
    for v in &mut vertices {
        let n = v.coords.norm();
        v.coords /= n;
    }
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0u32; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoint.entry(key).or_insert_with(|| {
                    let m = (vertices[a as usize].coords + vertices[b as usize].coords) / 2.0;
                    vertices.push(Point3::from(m / m.norm()));
                    (vertices.len() - 1) as u32
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        faces = next;
    }
    for v in &mut vertices {
        v.coords *= radius;
    }
    TexturedMesh::new(vertices, faces, None, None).unwrap()
}

/// Flat grid in the z=0 plane, `nx` by `ny` cells of the given size,
/// 2 triangles per cell, normals +z, with planar UVs covering [0,1]^2.
pub fn planar_grid(nx: usize, ny: usize, cell: f64) -> TexturedMesh {
    grid_mesh(nx, ny, cell, |_, _| 0.0)
}

/// Random-height terrain over an `nx` by `ny` grid, deterministic in `seed`.
pub fn random_terrain(nx: usize, ny: usize, cell: f64, amplitude: f64, seed: u64) -> TexturedMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heights: Vec<f64> = (0..(nx + 1) * (ny + 1))
        .map(|_| rng.gen_range(-amplitude..amplitude))
        .collect();
    grid_mesh(nx, ny, cell, |i, j| heights[j * (nx + 1) + i])
}

fn grid_mesh(nx: usize, ny: usize, cell: f64, height: impl Fn(usize, usize) -> f64) -> TexturedMesh {
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point3::new(i as f64 * cell, j as f64 * cell, height(i, j)));
        }
    }
    let uv_at = |i: usize, j: usize| Vector2::new(i as f64 / nx as f64, j as f64 / ny as f64);
    let mut faces = Vec::with_capacity(nx * ny * 2);
    let mut uvs = Vec::with_capacity(nx * ny * 2);
    let idx = |i: usize, j: usize| (j * (nx + 1) + i) as u32;
    for j in 0..ny {
        for i in 0..nx {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            uvs.push([uv_at(i, j), uv_at(i + 1, j), uv_at(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            uvs.push([uv_at(i, j), uv_at(i + 1, j + 1), uv_at(i, j + 1)]);
        }
    }
    TexturedMesh::new(vertices, faces, Some(uvs), None).unwrap()
}

/// Two triangles covering the unit square with UVs spanning the full chart.
pub fn textured_quad() -> TexturedMesh {
    let vertices = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(1.0, 1.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
    ];
    let faces = vec![[0, 1, 2], [0, 2, 3]];
    let uvs = vec![
        [
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(1.0, 1.0),
        ],
        [
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 1.0),
            Vector2::new(0.0, 1.0),
        ],
    ];
    TexturedMesh::new(vertices, faces, Some(uvs), None).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_face_counts() {
        assert_eq!(icosphere(1.0, 0).face_count(), 20);
        assert_eq!(icosphere(1.0, 2).face_count(), 320);
        assert_eq!(icosphere(1.0, 3).face_count(), 1280);
    }

    #[test]
    fn icosphere_normals_point_outward() {
        let s = icosphere(2.0, 2);
        for f in 0..s.face_count() {
            assert!(s.face_normal(f).dot(&s.face_center(f).coords) > 0.0);
        }
    }

    #[test]
    fn cube_normals_point_outward() {
        let c = unit_cube();
        for f in 0..c.face_count() {
            assert!(c.face_normal(f).dot(&c.face_center(f).coords) > 0.0);
        }
    }

    #[test]
    fn terrain_is_deterministic() {
        let a = random_terrain(10, 10, 1.0, 0.5, 42);
        let b = random_terrain(10, 10, 1.0, 0.5, 42);
        assert_eq!(a.vertices(), b.vertices());
    }
}
