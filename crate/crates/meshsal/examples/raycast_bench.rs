//! Build a BVH over a random terrain and compare its closest-hit answers and
//! throughput against the brute-force linear scan.

use std::time::Instant;

use meshsal::raycast::linear_closest_hit;
use meshsal::{shapes, Bvh, Ray};
use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mesh = shapes::random_terrain(70, 70, 0.05, 0.2, 42);
    println!("terrain: {} faces", mesh.face_count());

    let t = Instant::now();
    let bvh = Bvh::build(&mesh);
    println!(
        "bvh: {} nodes, depth {}, built in {:.1} ms",
        bvh.node_count(),
        bvh.depth(),
        t.elapsed().as_secs_f64() * 1e3
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rays: Vec<Ray> = (0..5000)
        .map(|_| {
            Ray::new(
                Point3::new(rng.gen_range(0.0..3.5), rng.gen_range(0.0..3.5), 2.0),
                Vector3::new(
                    rng.gen_range(-0.3..0.3),
                    rng.gen_range(-0.3..0.3),
                    -1.0,
                ),
            )
        })
        .collect();

    let t = Instant::now();
    let mut mismatches = 0;
    let mut hits = 0;
    let mut tests = 0usize;
    for ray in &rays {
        let (fast, n) = bvh.closest_hit_counted(&mesh, ray);
        tests += n;
        let slow = linear_closest_hit(&mesh, ray);
        match (&fast, &slow) {
            (Some(a), Some(b)) if a.face == b.face && (a.t - b.t).abs() <= 1e-9 => hits += 1,
            (None, None) => {}
            _ => mismatches += 1,
        }
    }
    println!(
        "{} rays: {hits} hits, {mismatches} oracle mismatches, {:.1} triangle tests/ray, {:.1} ms total (incl. linear oracle)",
        rays.len(),
        tests as f64 / rays.len() as f64,
        t.elapsed().as_secs_f64() * 1e3
    );
}
