//! Saliency-guided simplification: decimate an icosphere to 25% of its faces
//! while a salient polar cap keeps most of its triangles.

use meshsal::simplify::{simplify_mesh_traced, SimplifyParams};
use meshsal::{shapes, SaliencyMap};

fn main() -> meshsal::Result<()> {
    let mesh = shapes::icosphere(1.0, 3);
    let cap = |f: usize| mesh.face_center(f).coords.normalize().z > 0.8;
    let map = SaliencyMap::new(
        (0..mesh.face_count())
            .map(|f| if cap(f) { 1.0 } else { 1e-6 })
            .collect(),
    )?;

    for lambda in [0.0, 4.0, 9.0] {
        let params = SimplifyParams {
            lambda,
            ..Default::default()
        };
        let out = simplify_mesh_traced(&mesh, Some(&map), 320, &params)?;
        let in_cap = out
            .mesh
            .face_centers()
            .iter()
            .filter(|c| c.coords.normalize().z > 0.8)
            .count();
        println!(
            "lambda={lambda}: {} -> {} faces, {in_cap} in the salient cap (cap is 10% of area)",
            mesh.face_count(),
            out.mesh.face_count()
        );
    }

    let out = simplify_mesh_traced(&mesh, Some(&map), 320, &SimplifyParams::default())?;
    let path = std::env::temp_dir().join("meshsal_simplified.obj");
    meshsal::obj::save_mesh(&out.mesh, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
