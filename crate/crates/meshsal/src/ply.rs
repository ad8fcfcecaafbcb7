//! Vertex-colored binary PLY export for saliency heatmaps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::TexturedMesh;
use crate::saliency::SaliencyMap;

/// Three-stop linear colormap: 0 -> blue, 0.5 -> green, 1 -> red.
pub fn heat_color(value: f64) -> [u8; 3] {
    let v = value.clamp(0.0, 1.0);
    let (r, g, b) = if v <= 0.5 {
        let s = v / 0.5;
        (0.0, s, 1.0 - s)
    } else {
        let s = (v - 0.5) / 0.5;
        (s, 1.0 - s, 0.0)
    };
    [
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8,
    ]
}

/// Max-normalized per-face saliency averaged onto vertices.
pub fn vertex_heat_values(mesh: &TexturedMesh, map: &SaliencyMap) -> Result<Vec<f64>> {
    if map.len() != mesh.face_count() {
        return Err(Error::MapLengthMismatch {
            expected: mesh.face_count(),
            got: map.len(),
        });
    }
    let face_values = map.max_normalized_values();
    let mut sums = vec![0.0; mesh.vertex_count()];
    let mut counts = vec![0u32; mesh.vertex_count()];
    for (f, face) in mesh.faces().iter().enumerate() {
        for &v in face {
            sums[v as usize] += face_values[f];
            counts[v as usize] += 1;
        }
    }
    Ok(sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect())
}

/// Write a binary little-endian PLY with per-vertex heatmap colors.
pub fn write_heatmap_ply(
    mesh: &TexturedMesh,
    map: &SaliencyMap,
    path: impl AsRef<Path>,
) -> Result<()> {
    let values = vertex_heat_values(mesh, map)?;
    let colors: Vec<[u8; 3]> = values.iter().map(|&v| heat_color(v)).collect();
    write_vertex_colored_ply(mesh, &colors, path)
}

pub fn write_vertex_colored_ply(
    mesh: &TexturedMesh,
    colors: &[[u8; 3]],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    if colors.len() != mesh.vertex_count() {
        return Err(Error::invalid(format!(
            "color count {} does not match vertex count {}",
            colors.len(),
            mesh.vertex_count()
        )));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);

    write!(
        w,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertex_count(),
        mesh.face_count()
    )
    .map_err(io_err)?;

    for (v, c) in mesh.vertices().iter().zip(colors) {
        for k in 0..3 {
            w.write_all(&(v[k] as f32).to_le_bytes()).map_err(io_err)?;
        }
        w.write_all(c).map_err(io_err)?;
    }
    for f in mesh.faces() {
        w.write_all(&[3u8]).map_err(io_err)?;
        for &v in f {
            w.write_all(&(v as i32).to_le_bytes()).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn colormap_stops() {
        assert_eq!(heat_color(0.0), [0, 0, 255]);
        assert_eq!(heat_color(0.5), [0, 255, 0]);
        assert_eq!(heat_color(1.0), [255, 0, 0]);
    }

    #[test]
    fn zero_map_gives_all_blue() {
        let mesh = shapes::unit_cube();
        let map = SaliencyMap::new(vec![0.0; mesh.face_count()]).unwrap();
        let values = vertex_heat_values(&mesh, &map).unwrap();
        assert!(values.iter().all(|&v| v == 0.0));
        assert!(values.iter().all(|&v| heat_color(v) == [0, 0, 255]));
    }

    #[test]
    fn ply_file_has_expected_size() {
        let mesh = shapes::unit_cube();
        let map = SaliencyMap::new(vec![1.0; mesh.face_count()]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("heat.ply");
        write_heatmap_ply(&mesh, &map, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header_end = bytes
            .windows(11)
            .position(|w| w == b"end_header\n")
            .unwrap()
            + 11;
        let body = bytes.len() - header_end;
        assert_eq!(
            body,
            mesh.vertex_count() * (12 + 3) + mesh.face_count() * (1 + 12)
        );
    }
}
