//! Wavefront OBJ read/write.
//!
//! Supported records: `v`, `vt`, `f` (forms `v`, `v/vt`, `v//vn`, `v/vt/vn`),
//! `mtllib`. `vn` records are parsed but ignored; normals are always
//! recomputed from winding. The companion material file is scanned only for
//! the diffuse texture filename (`map_Kd`). Polygon faces are fan-triangulated.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{Point3, Vector2};

use crate::error::{Error, Result};
use crate::mesh::{LoadOptions, TexturedMesh};

pub fn load_mesh(path: impl AsRef<Path>, options: LoadOptions) -> Result<TexturedMesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut uvs: Vec<Vector2<f64>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut uv_corners: Vec<[Vector2<f64>; 3]> = Vec::new();
    let mut any_face_without_uv = false;
    let mut mtllib: Option<String> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap();
        match keyword {
            "v" => {
                let coords = parse_floats(path, lineno, &mut tokens, 3)?;
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            "vt" => {
                let coords = parse_floats(path, lineno, &mut tokens, 2)?;
                let mut uv = Vector2::new(coords[0], coords[1]);
                for c in uv.iter_mut() {
                    if *c < 0.0 || *c > 1.0 {
                        if options.uv_wrap {
                            *c = c.rem_euclid(1.0);
                        } else {
                            return Err(Error::parse(
                                path,
                                lineno,
                                format!("uv coordinate {c} outside [0,1] (use uv_wrap to wrap)"),
                            ));
                        }
                    }
                }
                uvs.push(uv);
            }
            "f" => {
                let mut corner_v: Vec<u32> = Vec::new();
                let mut corner_uv: Vec<Option<Vector2<f64>>> = Vec::new();
                for token in tokens {
                    let (vi, ti) = parse_face_corner(path, lineno, token)?;
                    if vi == 0 || vi as usize > vertices.len() {
                        return Err(Error::parse(
                            path,
                            lineno,
                            format!("vertex index {vi} out of range (have {})", vertices.len()),
                        ));
                    }
                    let uv = match ti {
                        Some(t) => {
                            if t == 0 || t as usize > uvs.len() {
                                return Err(Error::parse(
                                    path,
                                    lineno,
                                    format!("uv index {t} out of range (have {})", uvs.len()),
                                ));
                            }
                            Some(uvs[t as usize - 1])
                        }
                        None => None,
                    };
                    corner_v.push(vi - 1);
                    corner_uv.push(uv);
                }
                if corner_v.len() < 3 {
                    return Err(Error::parse(path, lineno, "face with fewer than 3 corners"));
                }
                for k in 1..corner_v.len() - 1 {
                    faces.push([corner_v[0], corner_v[k], corner_v[k + 1]]);
                    match (corner_uv[0], corner_uv[k], corner_uv[k + 1]) {
                        (Some(a), Some(b), Some(c)) => uv_corners.push([a, b, c]),
                        (None, None, None) => any_face_without_uv = true,
                        _ => {
                            return Err(Error::parse(
                                path,
                                lineno,
                                "face mixes corners with and without uv indices",
                            ))
                        }
                    }
                }
            }
            "mtllib" => {
                mtllib = line.split_whitespace().nth(1).map(String::from);
            }
            // vn, usemtl, o, g, s are accepted and ignored
            _ => {}
        }
    }

    if any_face_without_uv && !uv_corners.is_empty() {
        return Err(Error::invalid(
            "obj mixes faces with and without uv coordinates".to_string(),
        ));
    }
    let uv_corners = if uv_corners.is_empty() {
        None
    } else {
        Some(uv_corners)
    };

    let texture_path = match mtllib {
        Some(name) => {
            let dir = path.parent().unwrap_or_else(|| Path::new("."));
            parse_mtl_diffuse(&dir.join(&name)).map(|tex| dir.join(tex))
        }
        None => None,
    };

    TexturedMesh::new(vertices, faces, uv_corners, texture_path)
}

/// Scan a material file for the first `map_Kd` entry. Missing or unreadable
/// material files are tolerated (the mesh just has no texture).
fn parse_mtl_diffuse(path: &Path) -> Option<String> {
    let text = fs::read_to_string(path).ok()?;
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("map_Kd") {
            let name = rest.trim();
            if !name.is_empty() {
                return Some(name.to_string());
            }
        }
    }
    None
}

fn parse_face_corner(path: &Path, lineno: usize, token: &str) -> Result<(u32, Option<u32>)> {
    let mut parts = token.split('/');
    let v = parts
        .next()
        .filter(|s| !s.is_empty())
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| Error::parse(path, lineno, format!("bad face corner `{token}`")))?;
    let t = match parts.next() {
        Some("") | None => None,
        Some(s) => Some(
            s.parse::<u32>()
                .map_err(|_| Error::parse(path, lineno, format!("bad uv index in `{token}`")))?,
        ),
    };
    Ok((v, t))
}

fn parse_floats(
    path: &Path,
    lineno: usize,
    tokens: &mut dyn Iterator<Item = &str>,
    n: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let tok = tokens
            .next()
            .ok_or_else(|| Error::parse(path, lineno, "missing coordinate"))?;
        out.push(
            tok.parse::<f64>()
                .map_err(|_| Error::parse(path, lineno, format!("bad number `{tok}`")))?,
        );
    }
    Ok(out)
}

/// Write the mesh as OBJ. Numbers are printed with the shortest
/// representation that parses back to the identical f64, so a
/// save/load round trip is bit-exact.
pub fn save_mesh(mesh: &TexturedMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    if let Some(tex) = mesh.texture_path() {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "mesh".to_string());
        let mtl_name = format!("{stem}.mtl");
        out.push_str(&format!("mtllib {mtl_name}\n"));
        let mtl_path = path.with_file_name(&mtl_name);
        let tex_name = tex
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| tex.to_string_lossy().into_owned());
        fs::write(&mtl_path, format!("newmtl material0\nmap_Kd {tex_name}\n"))
            .map_err(|e| Error::io(&mtl_path, e))?;
    }
    for v in mesh.vertices() {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    match mesh.uv_corners() {
        Some(uvs) => {
            for face_uv in uvs {
                for uv in face_uv {
                    out.push_str(&format!("vt {} {}\n", uv.x, uv.y));
                }
            }
            for (i, f) in mesh.faces().iter().enumerate() {
                let t = 3 * i as u32;
                out.push_str(&format!(
                    "f {}/{} {}/{} {}/{}\n",
                    f[0] + 1,
                    t + 1,
                    f[1] + 1,
                    t + 2,
                    f[2] + 1,
                    t + 3
                ));
            }
        }
        None => {
            for f in mesh.faces() {
                out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
            }
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".obj").tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_cube_without_uvs() {
        let mut obj = String::new();
        let cube = shapes::unit_cube();
        for v in cube.vertices() {
            obj.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
        }
        for f in cube.faces() {
            obj.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
        }
        let f = write_temp(&obj);
        let mesh = load_mesh(f.path(), LoadOptions::default()).unwrap();
        assert_eq!(mesh.face_count(), 12);
        assert!(mesh.uv_corners().is_none());
        assert!(mesh.texture_path().is_none());
    }

    #[test]
    fn out_of_range_uv_index_reports_line() {
        let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nf 1/1 2/2 3/99\n";
        let f = write_temp(obj);
        let err = load_mesh(f.path(), LoadOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn single_triangle_analytic() {
        let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
        let f = write_temp(obj);
        let mesh = load_mesh(f.path(), LoadOptions::default()).unwrap();
        let c = mesh.face_center(0);
        assert!((c.x - 1.0 / 3.0).abs() < 1e-12 && (c.y - 1.0 / 3.0).abs() < 1e-12);
        assert!((mesh.face_area(0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uv_outside_range_rejected_unless_wrapped() {
        let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1.5 0\nvt 0 1\nf 1/1 2/2 3/3\n";
        let f = write_temp(obj);
        assert!(load_mesh(f.path(), LoadOptions::default()).is_err());
        let mesh = load_mesh(f.path(), LoadOptions { uv_wrap: true }).unwrap();
        let uv = mesh.uv_corners().unwrap()[0][1];
        assert!((uv.x - 0.5).abs() < 1e-12);
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let mesh = shapes::textured_quad();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.obj");
        save_mesh(&mesh, &path).unwrap();
        let back = load_mesh(&path, LoadOptions::default()).unwrap();
        assert_eq!(mesh.vertices(), back.vertices());
        assert_eq!(mesh.faces(), back.faces());
        assert_eq!(mesh.uv_corners().unwrap(), back.uv_corners().unwrap());
    }

    #[test]
    fn quad_faces_are_fan_triangulated() {
        let obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        let f = write_temp(obj);
        let mesh = load_mesh(f.path(), LoadOptions::default()).unwrap();
        assert_eq!(mesh.face_count(), 2);
    }
}
