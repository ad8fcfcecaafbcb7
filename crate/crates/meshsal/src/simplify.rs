//! Quadric error metric edge-collapse simplification with optional per-face
//! saliency weighting: collapse cost is multiplied by (1 + lambda*s)^gamma
//! where s is the max saliency over the faces incident to the edge, so
//! salient regions keep their triangle budget.

use std::collections::{BinaryHeap, HashMap};

use nalgebra::{Matrix3, Matrix4, Point3, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::mesh::{TexturedMesh, EPS_AREA};
use crate::saliency::SaliencyMap;

#[derive(Debug, Clone, Copy)]
pub struct SimplifyParams {
    /// Saliency penalty strength; weight range is [1, 1+lambda].
    pub lambda: f64,
    /// Penalty exponent.
    pub gamma: f64,
    pub allow_seam_collapse: bool,
}

impl Default for SimplifyParams {
    fn default() -> Self {
        SimplifyParams {
            lambda: 9.0,
            gamma: 1.0,
            allow_seam_collapse: false,
        }
    }
}

/// Sum of squared plane distances as a symmetric 4x4 form.
#[derive(Debug, Clone, Copy)]
struct Quadric(Matrix4<f64>);

impl Quadric {
    fn zero() -> Self {
        Quadric(Matrix4::zeros())
    }

    fn from_plane(normal: &Vector3<f64>, d: f64) -> Self {
        let p = Vector4::new(normal.x, normal.y, normal.z, d);
        Quadric(p * p.transpose())
    }

    fn add(&mut self, other: &Quadric) {
        self.0 += other.0;
    }

    fn error(&self, v: &Point3<f64>) -> f64 {
        let h = Vector4::new(v.x, v.y, v.z, 1.0);
        (h.transpose() * self.0 * h)[0]
    }

    /// Minimizer of the quadratic form when the 3x3 block is well
    /// conditioned (condition estimate < 1e8).
    fn minimizer(&self) -> Option<Point3<f64>> {
        let a: Matrix3<f64> = self.0.fixed_view::<3, 3>(0, 0).into();
        let b = Vector3::new(self.0[(0, 3)], self.0[(1, 3)], self.0[(2, 3)]);
        let inv = a.try_inverse()?;
        let cond = a.norm() * inv.norm();
        if !cond.is_finite() || cond >= 1e8 {
            return None;
        }
        Some(Point3::from(-(inv * b)))
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    weighted_cost: f64,
    a: u32,
    b: u32,
    stamp_a: u64,
    stamp_b: u64,
    position: Point3<f64>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key() == other.cmp_key()
    }
}
impl Eq for Candidate {}
impl Candidate {
    fn cmp_key(&self) -> (u64, u32, u32) {
        (self.weighted_cost.to_bits(), self.a, self.b)
    }
}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // Reversed: BinaryHeap is a max-heap, we want the cheapest on top.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .weighted_cost
            .total_cmp(&self.weighted_cost)
            .then(other.a.cmp(&self.a))
            .then(other.b.cmp(&self.b))
    }
}

pub struct SimplifyOutcome {
    pub mesh: TexturedMesh,
    /// Original face indices that survived, in ascending order.
    pub surviving_faces: Vec<u32>,
}

pub fn simplify_mesh(
    mesh: &TexturedMesh,
    saliency: Option<&SaliencyMap>,
    target_faces: usize,
    params: &SimplifyParams,
) -> Result<TexturedMesh> {
    simplify_mesh_traced(mesh, saliency, target_faces, params).map(|o| o.mesh)
}

pub fn simplify_mesh_traced(
    mesh: &TexturedMesh,
    saliency: Option<&SaliencyMap>,
    target_faces: usize,
    params: &SimplifyParams,
) -> Result<SimplifyOutcome> {
    if target_faces < 4 || target_faces > mesh.face_count() {
        return Err(Error::invalid(format!(
            "target_faces must be in 4..={}, got {target_faces}",
            mesh.face_count()
        )));
    }
    let face_saliency: Option<Vec<f64>> = match saliency {
        Some(map) => {
            if map.len() != mesh.face_count() {
                return Err(Error::MapLengthMismatch {
                    expected: mesh.face_count(),
                    got: map.len(),
                });
            }
            // Sum-normalize then max-normalize onto [0,1].
            let normalized = map.clone().normalize()?;
            Some(normalized.max_normalized_values())
        }
        None => None,
    };

    let mut state = CollapseState::new(mesh, face_saliency, *params);
    state.run(target_faces);
    state.into_outcome(mesh)
}

struct CollapseState {
    positions: Vec<Point3<f64>>,
    faces: Vec<[u32; 3]>,
    face_uvs: Option<Vec<[nalgebra::Vector2<f64>; 3]>>,
    alive: Vec<bool>,
    alive_count: usize,
    vertex_alive: Vec<bool>,
    vertex_faces: Vec<Vec<u32>>,
    quadrics: Vec<Quadric>,
    versions: Vec<u64>,
    face_saliency: Option<Vec<f64>>,
    params: SimplifyParams,
    heap: BinaryHeap<Candidate>,
}

impl CollapseState {
    fn new(mesh: &TexturedMesh, face_saliency: Option<Vec<f64>>, params: SimplifyParams) -> Self {
        let positions: Vec<Point3<f64>> = mesh.vertices().to_vec();
        let faces: Vec<[u32; 3]> = mesh.faces().to_vec();
        let mut vertex_faces = vec![Vec::new(); positions.len()];
        let mut quadrics = vec![Quadric::zero(); positions.len()];
        for (f, face) in faces.iter().enumerate() {
            let n = mesh.face_normal(f);
            let d = -n.dot(&positions[face[0] as usize].coords);
            let q = Quadric::from_plane(&n, d);
            for &v in face {
                vertex_faces[v as usize].push(f as u32);
                quadrics[v as usize].add(&q);
            }
        }
        let alive_count = faces.len();
        let mut state = CollapseState {
            positions,
            faces,
            face_uvs: mesh.uv_corners().map(|u| u.to_vec()),
            alive: vec![true; alive_count],
            alive_count,
            vertex_alive: vec![true; mesh.vertex_count()],
            vertex_faces,
            quadrics,
            versions: vec![0; mesh.vertex_count()],
            face_saliency,
            params,
            heap: BinaryHeap::new(),
        };
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for face in &state.faces {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        for (a, b) in edges {
            state.push_candidate(a, b);
        }
        state
    }

    fn push_candidate(&mut self, a: u32, b: u32) {
        let mut q = self.quadrics[a as usize];
        q.add(&self.quadrics[b as usize]);
        let pa = self.positions[a as usize];
        let pb = self.positions[b as usize];
        let mid = Point3::from((pa.coords + pb.coords) / 2.0);
        let position = match q.minimizer() {
            Some(p) => p,
            None => *[pa, pb, mid]
                .iter()
                .min_by(|x, y| q.error(x).total_cmp(&q.error(y)))
                .unwrap(),
        };
        let base_cost = q.error(&position).max(0.0);
        let weighted_cost = base_cost * self.saliency_weight(a, b);
        self.heap.push(Candidate {
            weighted_cost,
            a,
            b,
            stamp_a: self.versions[a as usize],
            stamp_b: self.versions[b as usize],
            position,
        });
    }

    /// (1 + lambda*s)^gamma with s the max saliency over faces incident to
    /// the edge: every alive face touching either endpoint. The union (rather
    /// than just the two flanking faces) keeps cheap collapses outside a
    /// salient region from dragging its rim vertices around.
    fn saliency_weight(&self, a: u32, b: u32) -> f64 {
        let Some(sal) = &self.face_saliency else {
            return 1.0;
        };
        let mut s: f64 = 0.0;
        for v in [a, b] {
            for &f in &self.vertex_faces[v as usize] {
                if self.alive[f as usize] {
                    s = s.max(sal[f as usize]);
                }
            }
        }
        (1.0 + self.params.lambda * s).powf(self.params.gamma)
    }

    fn run(&mut self, target_faces: usize) {
        while self.alive_count > target_faces {
            let Some(cand) = self.heap.pop() else {
                log::warn!(
                    "no legal collapse remains at {} faces (target {target_faces})",
                    self.alive_count
                );
                break;
            };
            let (a, b) = (cand.a, cand.b);
            if !self.vertex_alive[a as usize]
                || !self.vertex_alive[b as usize]
                || cand.stamp_a != self.versions[a as usize]
                || cand.stamp_b != self.versions[b as usize]
            {
                continue;
            }
            if !self.edge_exists(a, b) || !self.collapse_is_legal(a, b, &cand.position) {
                continue;
            }
            self.collapse(a, b, cand.position);
        }
    }

    fn edge_exists(&self, a: u32, b: u32) -> bool {
        self.vertex_faces[a as usize]
            .iter()
            .any(|&f| self.alive[f as usize] && self.faces[f as usize].contains(&b))
    }

    fn vertex_neighbors(&self, v: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for &f in &self.vertex_faces[v as usize] {
            if self.alive[f as usize] {
                for &w in &self.faces[f as usize] {
                    if w != v {
                        out.push(w);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn is_seam_vertex(&self, v: u32) -> bool {
        let Some(uvs) = &self.face_uvs else {
            return false;
        };
        let mut first: Option<nalgebra::Vector2<f64>> = None;
        for &f in &self.vertex_faces[v as usize] {
            if !self.alive[f as usize] {
                continue;
            }
            let face = self.faces[f as usize];
            for k in 0..3 {
                if face[k] == v {
                    let uv = uvs[f as usize][k];
                    match first {
                        None => first = Some(uv),
                        Some(u0) => {
                            if (uv - u0).norm() > 1e-12 {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn collapse_is_legal(&self, a: u32, b: u32, position: &Point3<f64>) -> bool {
        if !self.params.allow_seam_collapse && (self.is_seam_vertex(a) || self.is_seam_vertex(b)) {
            return false;
        }

        // Link condition: shared neighbor vertices must be exactly the
        // opposite vertices of the faces shared by the edge.
        let na = self.vertex_neighbors(a);
        let nb = self.vertex_neighbors(b);
        let shared_neighbors = na.iter().filter(|v| nb.binary_search(v).is_ok()).count();
        let shared_faces = self.vertex_faces[a as usize]
            .iter()
            .filter(|&&f| self.alive[f as usize] && self.faces[f as usize].contains(&b))
            .count();
        if shared_neighbors != shared_faces {
            return false;
        }

        // No surviving face may flip or collapse to zero area.
        for &v in &[a, b] {
            for &f in &self.vertex_faces[v as usize] {
                if !self.alive[f as usize] {
                    continue;
                }
                let face = self.faces[f as usize];
                if face.contains(&a) && face.contains(&b) {
                    continue; // dies with the collapse
                }
                let old = self.face_cross(&face, None);
                let new = self.face_cross(&face, Some((v, *position)));
                if new.norm() / 2.0 <= EPS_AREA || old.normalize().dot(&new.normalize()) < 0.0 {
                    return false;
                }
            }
        }
        true
    }

    fn face_cross(&self, face: &[u32; 3], moved: Option<(u32, Point3<f64>)>) -> Vector3<f64> {
        let pos = |v: u32| match moved {
            Some((m, p)) if v == m => p,
            _ => self.positions[v as usize],
        };
        let (p0, p1, p2) = (pos(face[0]), pos(face[1]), pos(face[2]));
        (p1 - p0).cross(&(p2 - p0))
    }

    fn collapse(&mut self, a: u32, b: u32, position: Point3<f64>) {
        self.positions[a as usize] = position;
        let qb = self.quadrics[b as usize];
        self.quadrics[a as usize].add(&qb);

        let b_faces = std::mem::take(&mut self.vertex_faces[b as usize]);
        for &f in &b_faces {
            if !self.alive[f as usize] {
                continue;
            }
            if self.faces[f as usize].contains(&a) {
                self.alive[f as usize] = false;
                self.alive_count -= 1;
            } else {
                for v in self.faces[f as usize].iter_mut() {
                    if *v == b {
                        *v = a;
                    }
                }
                self.vertex_faces[a as usize].push(f);
            }
        }
        self.vertex_alive[b as usize] = false;
        self.versions[a as usize] += 1;
        self.versions[b as usize] += 1;
        self.vertex_faces[a as usize].retain(|&f| self.alive[f as usize]);
        self.vertex_faces[a as usize].sort_unstable();
        self.vertex_faces[a as usize].dedup();

        for n in self.vertex_neighbors(a) {
            let (lo, hi) = (a.min(n), a.max(n));
            self.push_candidate(lo, hi);
        }
    }

    fn into_outcome(self, original: &TexturedMesh) -> Result<SimplifyOutcome> {
        let mut vertex_map: HashMap<u32, u32> = HashMap::new();
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        let mut uvs = self.face_uvs.as_ref().map(|_| Vec::new());
        let mut surviving = Vec::new();
        for (f, face) in self.faces.iter().enumerate() {
            if !self.alive[f] {
                continue;
            }
            let mut mapped = [0u32; 3];
            for (k, &v) in face.iter().enumerate() {
                let next = vertices.len() as u32;
                mapped[k] = *vertex_map.entry(v).or_insert_with(|| {
                    vertices.push(self.positions[v as usize]);
                    next
                });
            }
            faces.push(mapped);
            if let (Some(out), Some(src)) = (uvs.as_mut(), self.face_uvs.as_ref()) {
                out.push(src[f]);
            }
            surviving.push(f as u32);
        }
        let mesh = TexturedMesh::new(
            vertices,
            faces,
            uvs,
            original.texture_path().map(|p| p.to_path_buf()),
        )?;
        Ok(SimplifyOutcome {
            mesh,
            surviving_faces: surviving,
        })
    }
}
