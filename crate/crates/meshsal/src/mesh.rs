//! Indexed textured triangle mesh with derived geometry and adjacency.
//!
//! The mesh is immutable after construction: every derived quantity
//! (normals, centers, areas, corner vectors, edge adjacency) is computed
//! once in [`TexturedMesh::new`] and validated there. Shared read-only
//! access from parallel workers is safe.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use nalgebra::{Point3, Vector2, Vector3};

use crate::error::{Error, Result};

/// Faces with area at or below this are rejected as degenerate.
pub const EPS_AREA: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TexturedMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[u32; 3]>,
    /// Per-corner UV coordinates, one triple per face. Shared vertices may
    /// carry different UVs in different faces.
    uv_corners: Option<Vec<[Vector2<f64>; 3]>>,
    /// Diffuse texture image referenced by the material file, if any.
    texture_path: Option<PathBuf>,
    face_normals: Vec<Vector3<f64>>,
    face_centers: Vec<Point3<f64>>,
    face_areas: Vec<f64>,
    corner_vectors: Vec<[Vector3<f64>; 3]>,
    adjacency: Vec<Vec<u32>>,
    boundary_vertex: Vec<bool>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Wrap UV coordinates outside [0,1] modulo 1 instead of rejecting them.
    pub uv_wrap: bool,
}

/// Faces at BFS edge-adjacency depth <= `ring` from `face`, excluding the
/// face itself. Members are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingNeighborhood {
    pub face: u32,
    pub ring: u32,
    pub members: Vec<u32>,
}

impl TexturedMesh {
    pub fn new(
        vertices: Vec<Point3<f64>>,
        faces: Vec<[u32; 3]>,
        uv_corners: Option<Vec<[Vector2<f64>; 3]>>,
        texture_path: Option<PathBuf>,
    ) -> Result<Self> {
        let nv = vertices.len() as u32;
        for (i, f) in faces.iter().enumerate() {
            if f[0] >= nv || f[1] >= nv || f[2] >= nv {
                return Err(Error::invalid(format!(
                    "face {i} references vertex out of range (vertex count {nv})"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::invalid(format!(
                    "face {i} has repeated vertex indices {f:?}"
                )));
            }
        }
        if let Some(uvs) = &uv_corners {
            if uvs.len() != faces.len() {
                return Err(Error::invalid(format!(
                    "uv corner count {} does not match face count {}",
                    uvs.len(),
                    faces.len()
                )));
            }
        }

        let mut face_normals = Vec::with_capacity(faces.len());
        let mut face_centers = Vec::with_capacity(faces.len());
        let mut face_areas = Vec::with_capacity(faces.len());
        let mut corner_vectors = Vec::with_capacity(faces.len());
        let mut degenerate = Vec::new();
        for (i, f) in faces.iter().enumerate() {
            let (v0, v1, v2) = (
                vertices[f[0] as usize],
                vertices[f[1] as usize],
                vertices[f[2] as usize],
            );
            let cross = (v1 - v0).cross(&(v2 - v0));
            let area = 0.5 * cross.norm();
            if area <= EPS_AREA {
                degenerate.push(i);
                face_normals.push(Vector3::zeros());
            } else {
                face_normals.push(cross / cross.norm());
            }
            let center = Point3::from((v0.coords + v1.coords + v2.coords) / 3.0);
            face_centers.push(center);
            face_areas.push(area);
            corner_vectors.push([v0 - center, v1 - center, v2 - center]);
        }
        if !degenerate.is_empty() {
            return Err(Error::DegenerateFaces {
                faces: degenerate,
                epsilon: EPS_AREA,
            });
        }

        let (adjacency, boundary_vertex) = build_adjacency(&vertices, &faces);

        Ok(TexturedMesh {
            vertices,
            faces,
            uv_corners,
            texture_path,
            face_normals,
            face_centers,
            face_areas,
            corner_vectors,
            adjacency,
            boundary_vertex,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn uv_corners(&self) -> Option<&[[Vector2<f64>; 3]]> {
        self.uv_corners.as_deref()
    }

    pub fn texture_path(&self) -> Option<&Path> {
        self.texture_path.as_deref()
    }

    pub fn face_normal(&self, face: usize) -> Vector3<f64> {
        self.face_normals[face]
    }

    pub fn face_normals(&self) -> &[Vector3<f64>] {
        &self.face_normals
    }

    pub fn face_center(&self, face: usize) -> Point3<f64> {
        self.face_centers[face]
    }

    pub fn face_centers(&self) -> &[Point3<f64>] {
        &self.face_centers
    }

    pub fn face_area(&self, face: usize) -> f64 {
        self.face_areas[face]
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.face_areas
    }

    pub fn corner_vectors(&self, face: usize) -> &[Vector3<f64>; 3] {
        &self.corner_vectors[face]
    }

    /// Edge-sharing neighbor faces of `face` (up to 3 on manifold meshes;
    /// more across non-manifold edges).
    pub fn adjacent_faces(&self, face: usize) -> &[u32] {
        &self.adjacency[face]
    }

    pub fn is_boundary_vertex(&self, vertex: usize) -> bool {
        self.boundary_vertex[vertex]
    }

    pub fn face_vertices(&self, face: usize) -> (Point3<f64>, Point3<f64>, Point3<f64>) {
        let f = self.faces[face];
        (
            self.vertices[f[0] as usize],
            self.vertices[f[1] as usize],
            self.vertices[f[2] as usize],
        )
    }

    /// BFS over edge adjacency up to depth `ring` (1..=3), excluding the
    /// start face. Member ordering is ascending face index.
    pub fn ring_neighbors(&self, face: u32, ring: u32) -> Result<RingNeighborhood> {
        if (face as usize) >= self.faces.len() {
            return Err(Error::FaceIndexOutOfRange {
                face: face as usize,
                count: self.faces.len(),
            });
        }
        if !(1..=3).contains(&ring) {
            return Err(Error::invalid(format!("ring must be in 1..=3, got {ring}")));
        }
        let mut depth: HashMap<u32, u32> = HashMap::new();
        depth.insert(face, 0);
        let mut frontier = vec![face];
        for d in 1..=ring {
            let mut next = Vec::new();
            for &f in &frontier {
                for &n in &self.adjacency[f as usize] {
                    depth.entry(n).or_insert_with(|| {
                        next.push(n);
                        d
                    });
                }
            }
            frontier = next;
        }
        let mut members: Vec<u32> = depth.into_keys().filter(|&f2| f2 != face).collect();
        members.sort_unstable();
        Ok(RingNeighborhood {
            face,
            ring,
            members,
        })
    }

    /// Closest point on the given face to `p`, with its barycentric weights.
    pub fn closest_point_on_face(&self, face: usize, p: &Point3<f64>) -> (Point3<f64>, [f64; 3]) {
        let (a, b, c) = self.face_vertices(face);
        closest_point_on_triangle(p, &a, &b, &c)
    }
}

fn build_adjacency(vertices: &[Point3<f64>], faces: &[[u32; 3]]) -> (Vec<Vec<u32>>, Vec<bool>) {
    let mut edge_faces: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            edge_faces.entry(key).or_default().push(i as u32);
        }
    }
    let mut adjacency = vec![Vec::new(); faces.len()];
    let mut boundary_vertex = vec![false; vertices.len()];
    for (&(a, b), incident) in &edge_faces {
        if incident.len() == 1 {
            boundary_vertex[a as usize] = true;
            boundary_vertex[b as usize] = true;
        } else if incident.len() > 2 {
            log::warn!(
                "non-manifold edge ({a},{b}) shared by {} faces; adjacency keeps all",
                incident.len()
            );
        }
        for &f in incident {
            for &g in incident {
                if f != g {
                    adjacency[f as usize].push(g);
                }
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    (adjacency, boundary_vertex)
}

/// Closest point on triangle (a,b,c) to p, returned with barycentric weights.
pub fn closest_point_on_triangle(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> (Point3<f64>, [f64; 3]) {
    // Ericson, Real-Time Collision Detection, 5.1.5.
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (*a, [1.0, 0.0, 0.0]);
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (*b, [0.0, 1.0, 0.0]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, [1.0 - v, v, 0.0]);
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (*c, [0.0, 0.0, 1.0]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, [1.0 - w, 0.0, w]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, [0.0, 1.0 - w, w]);
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, [1.0 - v - w, v, w])
}
