//! Export a saliency map as a vertex-colored binary PLY heatmap
//! (blue = cold, red = hot) for inspection in any mesh viewer.

use meshsal::ply::write_heatmap_ply;
use meshsal::{shapes, SaliencyMap};

fn main() -> meshsal::Result<()> {
    let mesh = shapes::icosphere(1.0, 3);
    // A synthetic hot spot around the +x pole, falling off with angle.
    let map = SaliencyMap::new(
        (0..mesh.face_count())
            .map(|f| {
                let d = mesh.face_center(f).coords.normalize();
                (d.x.max(0.0)).powi(4)
            })
            .collect(),
    )?;

    let path = std::env::temp_dir().join("meshsal_heatmap.ply");
    write_heatmap_ply(&mesh, &map, &path)?;
    println!(
        "wrote {} ({} vertices, {} faces)",
        path.display(),
        mesh.vertex_count(),
        mesh.face_count()
    );
    Ok(())
}
