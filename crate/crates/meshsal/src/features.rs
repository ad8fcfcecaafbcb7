//! Deterministic per-face geometric descriptors: spatial normalization,
//! triangle shape statistics, ring-neighborhood structure against a fixed
//! set of direction bases, and discrete (angle-deficit) Gaussian curvature.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::TexturedMesh;
use crate::texture_align::FacePatch;

/// K unit direction vectors placed by the spherical Fibonacci lattice.
/// Fixed (not learned): a deterministic well-spread basis.
#[derive(Debug, Clone)]
pub struct DirectionBases {
    vectors: Vec<Vector3<f64>>,
}

impl DirectionBases {
    pub const DEFAULT_K: usize = 64;

    pub fn fibonacci(k: usize) -> Self {
        assert!(k >= 1);
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let vectors = (0..k)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / k as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = 2.0 * PI * (i as f64 / golden);
                Vector3::new(r * phi.cos(), r * phi.sin(), z)
            })
            .collect();
        DirectionBases { vectors }
    }

    /// Bases rotated by the given rotation (used for rigid-invariance checks).
    pub fn rotated(&self, rotation: &nalgebra::Rotation3<f64>) -> Self {
        DirectionBases {
            vectors: self.vectors.iter().map(|v| rotation * v).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vector3<f64>] {
        &self.vectors
    }
}

impl Default for DirectionBases {
    fn default() -> Self {
        DirectionBases::fibonacci(Self::DEFAULT_K)
    }
}

/// Records translation and scale applied by [`normalize_spatial`] so the
/// original centers can be recovered exactly.
#[derive(Debug, Clone, Copy)]
pub struct SpatialTransform {
    pub centroid: Point3<f64>,
    pub scale: f64,
}

impl SpatialTransform {
    pub fn invert(&self, p: &Point3<f64>) -> Point3<f64> {
        self.centroid + p.coords * self.scale
    }
}

/// Translate the face-center centroid to the origin and scale so the
/// farthest center sits at distance 1.
pub fn normalize_spatial(mesh: &TexturedMesh) -> Result<(Vec<Point3<f64>>, SpatialTransform)> {
    let centers = mesh.face_centers();
    let n = centers.len() as f64;
    let centroid = Point3::from(
        centers
            .iter()
            .fold(Vector3::zeros(), |acc, c| acc + c.coords)
            / n,
    );
    let max_dist = centers
        .iter()
        .map(|c| (c - centroid).norm())
        .fold(0.0, f64::max);
    if max_dist <= 0.0 {
        return Err(Error::invalid("all face centers coincide; zero extent"));
    }
    let normalized = centers
        .iter()
        .map(|c| Point3::from((c - centroid) / max_dist))
        .collect();
    Ok((
        normalized,
        SpatialTransform {
            centroid,
            scale: max_dist,
        },
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct ShapeDescriptor {
    /// Edge lengths sorted ascending.
    pub edge_lengths: [f64; 3],
    /// Interior angles (radians) opposite the sorted edges.
    pub angles: [f64; 3],
    pub area: f64,
    /// Circumradius / (2 * inradius); 1 only for the equilateral triangle.
    pub irregularity: f64,
}

pub fn shape_descriptor(mesh: &TexturedMesh, face: usize) -> Result<ShapeDescriptor> {
    if face >= mesh.face_count() {
        return Err(Error::FaceIndexOutOfRange {
            face,
            count: mesh.face_count(),
        });
    }
    let (v0, v1, v2) = mesh.face_vertices(face);
    // Edge i is opposite vertex i.
    let mut edges = [(v2 - v1).norm(), (v0 - v2).norm(), (v1 - v0).norm()];
    edges.sort_by(f64::total_cmp);
    let [a, b, c] = edges;
    let area = mesh.face_area(face);
    if area <= 0.0 {
        return Err(Error::invalid(format!("face {face} is degenerate")));
    }
    // Law of cosines keeps the angle opposite each sorted edge.
    let angle = |opp: f64, e1: f64, e2: f64| {
        ((e1 * e1 + e2 * e2 - opp * opp) / (2.0 * e1 * e2))
            .clamp(-1.0, 1.0)
            .acos()
    };
    let angles = [angle(a, b, c), angle(b, a, c), angle(c, a, b)];
    let circumradius = a * b * c / (4.0 * area);
    let inradius = area / ((a + b + c) / 2.0);
    Ok(ShapeDescriptor {
        edge_lengths: edges,
        angles,
        area,
        irregularity: circumradius / (2.0 * inradius),
    })
}

/// Row R-1, column k: max cosine similarity between the normals of
/// {face} union its R-ring neighborhood and basis vector k. An empty ring
/// falls back to the face's own normal.
pub fn structural_descriptor(
    mesh: &TexturedMesh,
    face: usize,
    bases: &DirectionBases,
) -> Result<Vec<Vec<f64>>> {
    if face >= mesh.face_count() {
        return Err(Error::FaceIndexOutOfRange {
            face,
            count: mesh.face_count(),
        });
    }
    let mut rows = Vec::with_capacity(3);
    for ring in 1..=3u32 {
        let members = mesh.ring_neighbors(face as u32, ring)?.members;
        let mut normals = vec![mesh.face_normal(face)];
        normals.extend(members.iter().map(|&f| mesh.face_normal(f as usize)));
        let row = bases
            .vectors()
            .iter()
            .map(|v| {
                normals
                    .iter()
                    .map(|n| n.dot(v))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        rows.push(row);
    }
    Ok(rows)
}

/// Per-vertex angle deficits: 2*pi minus the incident angle sum (pi minus it
/// on boundary vertices). Summed over a closed mesh this is exactly
/// 2*pi*euler_characteristic.
pub fn vertex_angle_deficits(mesh: &TexturedMesh) -> Vec<f64> {
    let mut angle_sums = vec![0.0; mesh.vertex_count()];
    for f in 0..mesh.face_count() {
        let (v0, v1, v2) = mesh.face_vertices(f);
        let verts = [v0, v1, v2];
        let idx = mesh.faces()[f];
        for k in 0..3 {
            let p = verts[k];
            let q = verts[(k + 1) % 3];
            let r = verts[(k + 2) % 3];
            let a = (q - p).normalize();
            let b = (r - p).normalize();
            angle_sums[idx[k] as usize] += a.dot(&b).clamp(-1.0, 1.0).acos();
        }
    }
    angle_sums
        .iter()
        .enumerate()
        .map(|(v, &sum)| {
            let full = if mesh.is_boundary_vertex(v) { PI } else { 2.0 * PI };
            full - sum
        })
        .collect()
}

/// Pointwise discrete Gaussian curvature: angle deficit divided by the
/// barycentric vertex area (one third of incident face areas), averaged
/// onto faces.
pub fn gaussian_curvature(mesh: &TexturedMesh) -> Vec<f64> {
    let deficits = vertex_angle_deficits(mesh);
    let mut vertex_area = vec![0.0; mesh.vertex_count()];
    for f in 0..mesh.face_count() {
        let third = mesh.face_area(f) / 3.0;
        for &v in &mesh.faces()[f] {
            vertex_area[v as usize] += third;
        }
    }
    let vertex_curvature: Vec<f64> = deficits
        .iter()
        .zip(&vertex_area)
        .map(|(&d, &a)| if a > 0.0 { d / a } else { 0.0 })
        .collect();
    mesh.faces()
        .iter()
        .map(|f| {
            (vertex_curvature[f[0] as usize]
                + vertex_curvature[f[1] as usize]
                + vertex_curvature[f[2] as usize])
                / 3.0
        })
        .collect()
}

/// Per-face feature stack assembled from the individual extractors.
#[derive(Debug, Clone)]
pub struct FaceFeatureTable {
    pub centers: Vec<Point3<f64>>,
    pub transform: SpatialTransform,
    pub corner_vectors: Vec<[Vector3<f64>; 3]>,
    pub shape: Vec<ShapeDescriptor>,
    /// 3 rings x K max cosine similarities per face.
    pub structural: Vec<Vec<Vec<f64>>>,
    pub gaussian_curvature: Vec<f64>,
    /// Texture descriptors, present when the mesh has UVs and a texture.
    pub patches: Option<Vec<FacePatch>>,
    pub bases_k: usize,
}

pub fn extract_features(
    mesh: &TexturedMesh,
    bases: &DirectionBases,
    patches: Option<Vec<FacePatch>>,
) -> Result<FaceFeatureTable> {
    let (centers, transform) = normalize_spatial(mesh)?;
    let shape: Result<Vec<_>> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| shape_descriptor(mesh, f))
        .collect();
    let structural: Result<Vec<_>> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| structural_descriptor(mesh, f, bases))
        .collect();
    Ok(FaceFeatureTable {
        centers,
        transform,
        corner_vectors: (0..mesh.face_count())
            .map(|f| *mesh.corner_vectors(f))
            .collect(),
        shape: shape?,
        structural: structural?,
        gaussian_curvature: gaussian_curvature(mesh),
        patches,
        bases_k: bases.k(),
    })
}

impl FaceFeatureTable {
    /// One row per face; the fixed column order is documented by the header.
    pub fn write_csv(&self, path: impl AsRef<Path>, include_grids: bool) -> Result<()> {
        let path = path.as_ref();
        let mut header = String::from("face,cx,cy,cz");
        for c in 0..3 {
            for ax in ["x", "y", "z"] {
                header.push_str(&format!(",cv{c}{ax}"));
            }
        }
        header.push_str(",edge0,edge1,edge2,angle0,angle1,angle2,area,irregularity,gaussian_curvature");
        for r in 1..=3 {
            for k in 0..self.bases_k {
                header.push_str(&format!(",r{r}_k{k}"));
            }
        }
        if self.patches.is_some() {
            header.push_str(",mean_r,mean_g,mean_b,color_variance");
            if include_grids {
                if let Some(patches) = &self.patches {
                    let g = patches.first().map(|p| p.grid_size()).unwrap_or(0);
                    for row in 0..g {
                        for col in 0..g {
                            for ch in ["r", "g", "b"] {
                                header.push_str(&format!(",grid{row}_{col}_{ch}"));
                            }
                        }
                    }
                }
            }
        }
        header.push('\n');

        let mut out = header;
        for f in 0..self.centers.len() {
            let c = self.centers[f];
            out.push_str(&format!("{f},{:.8e},{:.8e},{:.8e}", c.x, c.y, c.z));
            for cv in &self.corner_vectors[f] {
                out.push_str(&format!(",{:.8e},{:.8e},{:.8e}", cv.x, cv.y, cv.z));
            }
            let s = &self.shape[f];
            out.push_str(&format!(
                ",{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}",
                s.edge_lengths[0],
                s.edge_lengths[1],
                s.edge_lengths[2],
                s.angles[0],
                s.angles[1],
                s.angles[2],
                s.area,
                s.irregularity,
                self.gaussian_curvature[f]
            ));
            for row in &self.structural[f] {
                for v in row {
                    out.push_str(&format!(",{v:.8e}"));
                }
            }
            if let Some(patches) = &self.patches {
                let p = &patches[f];
                out.push_str(&format!(
                    ",{:.8e},{:.8e},{:.8e},{:.8e}",
                    p.mean_color[0], p.mean_color[1], p.mean_color[2], p.color_variance
                ));
                if include_grids {
                    for color in p.grid_flat() {
                        for ch in color {
                            out.push_str(&format!(",{ch:.8e}"));
                        }
                    }
                }
            }
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}
