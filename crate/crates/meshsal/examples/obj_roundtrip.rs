//! Load/save a textured OBJ: write a generated mesh out, read it back, and
//! confirm the geometry round-trips bit-exactly.

use meshsal::obj::{load_mesh, save_mesh};
use meshsal::{shapes, LoadOptions};

fn main() -> meshsal::Result<()> {
    let mesh = shapes::random_terrain(20, 20, 0.15, 0.25, 99);
    let path = std::env::temp_dir().join("meshsal_roundtrip.obj");
    save_mesh(&mesh, &path)?;

    let back = load_mesh(&path, LoadOptions::default())?;
    assert_eq!(mesh.vertices(), back.vertices());
    assert_eq!(mesh.faces(), back.faces());
    println!(
        "round-tripped {} vertices / {} faces bit-exactly via {}",
        mesh.vertex_count(),
        mesh.face_count(),
        path.display()
    );
    Ok(())
}
