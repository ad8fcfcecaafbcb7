//! Ray-triangle intersection (Möller-Trumbore) and a median-split BVH for
//! accelerated closest-hit queries.
//!
//! Both front- and back-facing hits are reported; orientation filtering is
//! the caller's policy. Results are identical to a linear scan over all
//! faces taking minimal t, ties broken by smaller face index.

use nalgebra::{Point3, Vector3};

use crate::mesh::TexturedMesh;

/// Determinant threshold below which a ray counts as parallel to the plane.
pub const EPS_DET: f64 = 1e-12;
/// Slack on barycentric bounds so shared-edge hits are not dropped.
pub const EPS_BARY: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Point3<f64>,
    pub direction: Vector3<f64>,
    pub t_min: f64,
    pub t_max: f64,
}

impl Ray {
    /// Ray with unbounded positive range; the direction is normalized.
    pub fn new(origin: Point3<f64>, direction: Vector3<f64>) -> Self {
        Ray {
            origin,
            direction: direction.normalize(),
            t_min: 0.0,
            t_max: f64::INFINITY,
        }
    }

    pub fn point_at(&self, t: f64) -> Point3<f64> {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub face: u32,
    pub t: f64,
    /// Convex weights over the face's three vertices, summing to 1.
    pub barycentric: [f64; 3],
    pub point: Point3<f64>,
}

/// Möller-Trumbore with Cramer's-rule solve. Returns the hit iff
/// |det| > EPS_DET, t is in [t_min, t_max], and the barycentric
/// coordinates are within [-EPS_BARY, 1+EPS_BARY].
pub fn intersect_triangle(
    ray: &Ray,
    v0: &Point3<f64>,
    v1: &Point3<f64>,
    v2: &Point3<f64>,
) -> Option<(f64, [f64; 3])> {
    let edge1 = v1 - v0;
    let edge2 = v2 - v0;
    let pvec = ray.direction.cross(&edge2);
    let det = edge1.dot(&pvec);
    if det.abs() <= EPS_DET {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = ray.origin - v0;
    let u = tvec.dot(&pvec) * inv_det;
    if !(-EPS_BARY..=1.0 + EPS_BARY).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&edge1);
    let v = ray.direction.dot(&qvec) * inv_det;
    if v < -EPS_BARY || u + v > 1.0 + EPS_BARY {
        return None;
    }
    let t = edge2.dot(&qvec) * inv_det;
    if t < ray.t_min || t > ray.t_max {
        return None;
    }
    Some((t, [1.0 - u - v, u, v]))
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Point3<f64>,
    max: Point3<f64>,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow_point(&mut self, p: &Point3<f64>) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    fn grow(&mut self, other: &Aabb) {
        self.grow_point(&other.min);
        self.grow_point(&other.max);
    }

    fn widest_axis(&self) -> usize {
        let ext = self.max - self.min;
        let mut axis = 0;
        if ext.y > ext.x {
            axis = 1;
        }
        if ext.z > ext[axis] {
            axis = 2;
        }
        axis
    }

    /// Slab test; returns the entry distance when the ray overlaps [0, t_max].
    fn intersect(&self, ray: &Ray, inv_dir: &Vector3<f64>, t_max: f64) -> Option<f64> {
        let mut t0 = ray.t_min;
        let mut t1 = t_max;
        for k in 0..3 {
            if ray.direction[k] == 0.0 {
                // Parallel to the slab: no constraint when the origin lies
                // inside it; the product form below would produce NaN when
                // the origin sits exactly on a slab plane.
                if ray.origin[k] < self.min[k] || ray.origin[k] > self.max[k] {
                    return None;
                }
                continue;
            }
            let ta = (self.min[k] - ray.origin[k]) * inv_dir[k];
            let tb = (self.max[k] - ray.origin[k]) * inv_dir[k];
            let (near, far) = if ta <= tb { (ta, tb) } else { (tb, ta) };
            t0 = t0.max(near);
            t1 = t1.min(far);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

#[derive(Debug, Clone)]
enum BvhNode {
    Leaf {
        aabb: Aabb,
        /// Range into `face_order`.
        start: u32,
        len: u32,
    },
    Inner {
        aabb: Aabb,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<BvhNode>,
    face_order: Vec<u32>,
    root: u32,
}

pub const LEAF_SIZE: usize = 4;

impl Bvh {
    /// Binary BVH splitting at the median face centroid along the widest
    /// axis of the centroid bounds; deterministic for a given mesh.
    pub fn build(mesh: &TexturedMesh) -> Bvh {
        assert!(mesh.face_count() >= 1, "bvh requires at least one face");
        let face_aabbs: Vec<Aabb> = (0..mesh.face_count())
            .map(|f| {
                let (a, b, c) = mesh.face_vertices(f);
                let mut bb = Aabb::empty();
                bb.grow_point(&a);
                bb.grow_point(&b);
                bb.grow_point(&c);
                bb
            })
            .collect();
        let mut face_order: Vec<u32> = (0..mesh.face_count() as u32).collect();
        let mut nodes = Vec::new();
        let root = build_node(mesh, &face_aabbs, &mut face_order, 0, &mut nodes, 0);
        Bvh {
            nodes,
            face_order,
            root,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Faces per leaf, in face_order; used by structural tests.
    pub fn leaf_faces(&self) -> Vec<&[u32]> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                BvhNode::Leaf { start, len, .. } => {
                    Some(&self.face_order[*start as usize..(*start + *len) as usize])
                }
                _ => None,
            })
            .collect()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[BvhNode], i: u32) -> usize {
            match &nodes[i as usize] {
                BvhNode::Leaf { .. } => 1,
                BvhNode::Inner { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, self.root)
    }

    /// Closest hit along the ray, equal to a brute-force linear scan with
    /// ties broken by smaller face index. Also reports triangle test count.
    pub fn closest_hit_counted(&self, mesh: &TexturedMesh, ray: &Ray) -> (Option<Hit>, usize) {
        let inv_dir = Vector3::new(
            1.0 / ray.direction.x,
            1.0 / ray.direction.y,
            1.0 / ray.direction.z,
        );
        let mut best: Option<Hit> = None;
        let mut tests = 0usize;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(self.root);
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx as usize];
            let aabb = match node {
                BvhNode::Leaf { aabb, .. } | BvhNode::Inner { aabb, .. } => aabb,
            };
            let cutoff = best.as_ref().map(|h| h.t).unwrap_or(ray.t_max);
            if aabb.intersect(ray, &inv_dir, cutoff).is_none() {
                continue;
            }
            match node {
                BvhNode::Leaf { start, len, .. } => {
                    for &face in &self.face_order[*start as usize..(*start + *len) as usize] {
                        tests += 1;
                        let (v0, v1, v2) = mesh.face_vertices(face as usize);
                        if let Some((t, bary)) = intersect_triangle(ray, &v0, &v1, &v2) {
                            let better = match &best {
                                None => true,
                                Some(h) => t < h.t || (t == h.t && face < h.face),
                            };
                            if better {
                                best = Some(Hit {
                                    face,
                                    t,
                                    barycentric: bary,
                                    point: ray.point_at(t),
                                });
                            }
                        }
                    }
                }
                BvhNode::Inner { left, right, .. } => {
                    // Push the far child first so the near one is visited next.
                    let order = child_order(&self.nodes, *left, *right, ray, &inv_dir, cutoff);
                    stack.push(order.1);
                    stack.push(order.0);
                }
            }
        }
        (best, tests)
    }

    pub fn closest_hit(&self, mesh: &TexturedMesh, ray: &Ray) -> Option<Hit> {
        self.closest_hit_counted(mesh, ray).0
    }
}

fn child_order(
    nodes: &[BvhNode],
    left: u32,
    right: u32,
    ray: &Ray,
    inv_dir: &Vector3<f64>,
    cutoff: f64,
) -> (u32, u32) {
    let entry = |i: u32| {
        let aabb = match &nodes[i as usize] {
            BvhNode::Leaf { aabb, .. } | BvhNode::Inner { aabb, .. } => aabb,
        };
        aabb.intersect(ray, inv_dir, cutoff).unwrap_or(f64::INFINITY)
    };
    if entry(left) <= entry(right) {
        (left, right)
    } else {
        (right, left)
    }
}

fn build_node(
    mesh: &TexturedMesh,
    face_aabbs: &[Aabb],
    face_order: &mut [u32],
    offset: usize,
    nodes: &mut Vec<BvhNode>,
    depth: usize,
) -> u32 {
    let mut aabb = Aabb::empty();
    for &f in face_order.iter() {
        aabb.grow(&face_aabbs[f as usize]);
    }
    if face_order.len() <= LEAF_SIZE || depth >= 63 {
        nodes.push(BvhNode::Leaf {
            aabb,
            start: offset as u32,
            len: face_order.len() as u32,
        });
        return (nodes.len() - 1) as u32;
    }

    let mut centroid_bounds = Aabb::empty();
    for &f in face_order.iter() {
        centroid_bounds.grow_point(&mesh.face_center(f as usize));
    }
    let axis = centroid_bounds.widest_axis();
    let mid = face_order.len() / 2;
    face_order.sort_unstable_by(|&a, &b| {
        let ca = mesh.face_center(a as usize)[axis];
        let cb = mesh.face_center(b as usize)[axis];
        ca.total_cmp(&cb).then(a.cmp(&b))
    });

    let (left_slice, right_slice) = face_order.split_at_mut(mid);
    let left = build_node(mesh, face_aabbs, left_slice, offset, nodes, depth + 1);
    let right = build_node(mesh, face_aabbs, right_slice, offset + mid, nodes, depth + 1);
    nodes.push(BvhNode::Inner { aabb, left, right });
    (nodes.len() - 1) as u32
}

/// Brute-force closest hit over all faces; the oracle for BVH traversal.
pub fn linear_closest_hit(mesh: &TexturedMesh, ray: &Ray) -> Option<Hit> {
    let mut best: Option<Hit> = None;
    for face in 0..mesh.face_count() as u32 {
        let (v0, v1, v2) = mesh.face_vertices(face as usize);
        if let Some((t, bary)) = intersect_triangle(ray, &v0, &v1, &v2) {
            let better = match &best {
                None => true,
                Some(h) => t < h.t || (t == h.t && face < h.face),
            };
            if better {
                best = Some(Hit {
                    face,
                    t,
                    barycentric: bary,
                    point: ray.point_at(t),
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_solved_triangle_hit() {
        // Barycentric system solved by hand for the hit point (0.25, 0.25, 0).
        let ray = Ray::new(Point3::new(0.25, 0.25, 1.0), Vector3::new(0.0, 0.0, -1.0));
        let (t, w) = intersect_triangle(
            &ray,
            &Point3::new(0.0, 0.0, 0.0),
            &Point3::new(1.0, 0.0, 0.0),
            &Point3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert!((w[0] - 0.5).abs() < 1e-12);
        assert!((w[1] - 0.25).abs() < 1e-12);
        assert!((w[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn behind_origin_is_no_hit() {
        let ray = Ray::new(Point3::new(0.25, 0.25, 1.0), Vector3::new(0.0, 0.0, 1.0));
        assert!(intersect_triangle(
            &ray,
            &Point3::new(0.0, 0.0, 0.0),
            &Point3::new(1.0, 0.0, 0.0),
            &Point3::new(0.0, 1.0, 0.0),
        )
        .is_none());
    }

    #[test]
    fn parallel_ray_is_no_hit() {
        let ray = Ray::new(Point3::new(0.0, 0.0, 1.0), Vector3::new(1.0, 0.0, 0.0));
        assert!(intersect_triangle(
            &ray,
            &Point3::new(0.0, 0.0, 0.0),
            &Point3::new(1.0, 0.0, 0.0),
            &Point3::new(0.0, 1.0, 0.0),
        )
        .is_none());
    }

    #[test]
    fn single_face_is_one_leaf() {
        let mesh = TexturedMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
            None,
            None,
        )
        .unwrap();
        let bvh = Bvh::build(&mesh);
        assert_eq!(bvh.node_count(), 1);
        assert_eq!(bvh.depth(), 1);
    }

    #[test]
    fn eight_spread_faces_build_balanced_tree() {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for i in 0..8 {
            let x = i as f64 * 2.0;
            let base = vertices.len() as u32;
            vertices.push(Point3::new(x, 0.0, 0.0));
            vertices.push(Point3::new(x + 1.0, 0.0, 0.0));
            vertices.push(Point3::new(x, 1.0, 0.0));
            faces.push([base, base + 1, base + 2]);
        }
        let mesh = TexturedMesh::new(vertices, faces, None, None).unwrap();
        let bvh = Bvh::build(&mesh);
        assert_eq!(bvh.depth(), 2);
        for leaf in bvh.leaf_faces() {
            assert!(leaf.len() <= LEAF_SIZE);
        }
    }

    #[test]
    fn every_face_in_exactly_one_leaf() {
        let mesh = shapes::random_terrain(70, 70, 0.1, 0.05, 5);
        let bvh = Bvh::build(&mesh);
        let mut counts = vec![0usize; mesh.face_count()];
        for leaf in bvh.leaf_faces() {
            for &f in leaf {
                counts[f as usize] += 1;
            }
        }
        assert!(counts.iter().all(|&c| c == 1));
    }

    #[test]
    fn sphere_center_ray_hits_near_hemisphere() {
        let mesh = shapes::icosphere(1.0, 3);
        let bvh = Bvh::build(&mesh);
        let ray = Ray::new(Point3::new(0.0, 0.0, 5.0), Vector3::new(0.0, 0.0, -1.0));
        let hit = bvh.closest_hit(&mesh, &ray).unwrap();
        let brute = linear_closest_hit(&mesh, &ray).unwrap();
        assert_eq!(hit.face, brute.face);
        assert!((hit.t - 4.0).abs() < 0.02); // faceted sphere, slightly inside
        assert!(hit.point.z > 0.9);
    }

    #[test]
    fn miss_outside_aabb_costs_zero_tests() {
        let mesh = shapes::unit_cube();
        let bvh = Bvh::build(&mesh);
        let ray = Ray::new(Point3::new(10.0, 10.0, 10.0), Vector3::new(0.0, 0.0, 1.0));
        let (hit, tests) = bvh.closest_hit_counted(&mesh, &ray);
        assert!(hit.is_none());
        assert_eq!(tests, 0);
    }

    #[test]
    fn minimal_t_wins_on_coaxial_triangles() {
        let vertices = vec![
            Point3::new(0.0, 0.0, 1.0),
            Point3::new(1.0, 0.0, 1.0),
            Point3::new(0.0, 1.0, 1.0),
            Point3::new(0.0, 0.0, 2.0),
            Point3::new(1.0, 0.0, 2.0),
            Point3::new(0.0, 1.0, 2.0),
        ];
        let mesh = TexturedMesh::new(vertices, vec![[3, 4, 5], [0, 1, 2]], None, None).unwrap();
        let bvh = Bvh::build(&mesh);
        let ray = Ray::new(Point3::new(0.2, 0.2, 0.0), Vector3::new(0.0, 0.0, 1.0));
        let hit = bvh.closest_hit(&mesh, &ray).unwrap();
        assert_eq!(hit.face, 1);
        assert!((hit.t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn traversal_matches_linear_scan_on_random_rays() {
        let meshes = [shapes::unit_cube(), shapes::icosphere(1.0, 2)];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for mesh in &meshes {
            let bvh = Bvh::build(mesh);
            for _ in 0..2000 {
                let origin = Point3::new(
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                );
                let dir = Vector3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if dir.norm() < 1e-3 {
                    continue;
                }
                let ray = Ray::new(origin, dir);
                let fast = bvh.closest_hit(mesh, &ray);
                let slow = linear_closest_hit(mesh, &ray);
                match (fast, slow) {
                    (None, None) => {}
                    (Some(a), Some(b)) => {
                        assert_eq!(a.face, b.face);
                        assert!((a.t - b.t).abs() <= 1e-9);
                    }
                    other => panic!("bvh/linear disagree: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn barycentric_point_reconstruction() {
        let mesh = shapes::icosphere(1.0, 2);
        let bvh = Bvh::build(&mesh);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let dir = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if dir.norm() < 1e-3 {
                continue;
            }
            let ray = Ray::new(Point3::new(0.0, 0.0, 3.0), (dir - Vector3::new(0.0, 0.0, 3.0)).normalize());
            if let Some(hit) = bvh.closest_hit(&mesh, &ray) {
                let w = hit.barycentric;
                assert!((w[0] + w[1] + w[2] - 1.0).abs() < 1e-9);
                assert!(w.iter().all(|&x| x >= -1e-9));
                let (v0, v1, v2) = mesh.face_vertices(hit.face as usize);
                let recon = v0.coords * w[0] + v1.coords * w[1] + v2.coords * w[2];
                assert!((recon - hit.point.coords).norm() < 1e-9);
                assert!((ray.point_at(hit.t) - hit.point).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn build_is_deterministic() {
        let mesh = shapes::random_terrain(30, 30, 0.1, 0.05, 3);
        let a = Bvh::build(&mesh);
        let b = Bvh::build(&mesh);
        assert_eq!(a.face_order, b.face_order);
        assert_eq!(a.node_count(), b.node_count());
    }
}
