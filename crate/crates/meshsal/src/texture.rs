//! Texture image loading and continuous bilinear sampling in UV space.
//!
//! UV (0,0) is the bottom-left of the image (OBJ convention): image row
//! index runs opposite to v. Queries beyond the outermost pixel centers
//! clamp to the edge row/column.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct TextureImage {
    width: usize,
    height: usize,
    /// Row-major, row 0 at the top of the image; channels in [0,1].
    pixels: Vec<[f64; 3]>,
}

impl TextureImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("texture dimensions must be >= 1"));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel count {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        if pixels
            .iter()
            .any(|p| p.iter().any(|&c| !(0.0..=1.0).contains(&c)))
        {
            return Err(Error::invalid("texture channel outside [0,1]"));
        }
        Ok(TextureImage {
            width,
            height,
            pixels,
        })
    }

    /// Build a texture by evaluating `f(u, v)` at every pixel center.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(f64, f64) -> [f64; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                let u = (col as f64 + 0.5) / width as f64;
                let v = 1.0 - (row as f64 + 0.5) / height as f64;
                let mut p = f(u, v);
                for c in &mut p {
                    *c = c.clamp(0.0, 1.0);
                }
                pixels.push(p);
            }
        }
        TextureImage {
            width,
            height,
            pixels,
        }
    }

    pub fn constant(width: usize, height: usize, color: [f64; 3]) -> Self {
        Self::from_fn(width, height, |_, _| color)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel at (row, col), row 0 at the top.
    pub fn pixel(&self, row: usize, col: usize) -> [f64; 3] {
        self.pixels[row * self.width + col]
    }

    /// Load a binary PPM (P6, maxval 255) or an 8-bit RGB(A) PNG.
    /// Channel values are byte/255 exactly.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let ext = path
            .extension()
            .map(|e| e.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        match ext.as_str() {
            "ppm" => load_ppm(path),
            "png" => load_png(path),
            other => Err(Error::UnsupportedTexture {
                path: path.to_path_buf(),
                message: format!("unsupported extension `{other}` (expected ppm or png)"),
            }),
        }
    }

    /// Bilinear interpolation of the four nearest pixel centers; total over
    /// [0,1]^2 and clamped beyond the outermost centers. Pixel (row, col)
    /// center maps to uv ((col+0.5)/W, 1-(row+0.5)/H).
    pub fn sample_uv(&self, u: f64, v: f64) -> [f64; 3] {
        let u = u.clamp(0.0, 1.0);
        let v = v.clamp(0.0, 1.0);
        let (c0, c1, fx) = axis_neighbors(u * self.width as f64 - 0.5, self.width);
        let (r0, r1, fy) = axis_neighbors((1.0 - v) * self.height as f64 - 0.5, self.height);
        let p00 = self.pixel(r0, c0);
        let p01 = self.pixel(r0, c1);
        let p10 = self.pixel(r1, c0);
        let p11 = self.pixel(r1, c1);
        let mut out = [0.0; 3];
        for ch in 0..3 {
            let top = p00[ch] * (1.0 - fx) + p01[ch] * fx;
            let bot = p10[ch] * (1.0 - fx) + p11[ch] * fx;
            out[ch] = top * (1.0 - fy) + bot * fy;
        }
        out
    }
}

/// Neighboring indices and interpolation fraction along one axis, with
/// clamping at the edge pixel centers.
fn axis_neighbors(x: f64, n: usize) -> (usize, usize, f64) {
    if x <= 0.0 {
        return (0, 0, 0.0);
    }
    if x >= (n - 1) as f64 {
        return (n - 1, n - 1, 0.0);
    }
    let i0 = x.floor() as usize;
    (i0, i0 + 1, x - i0 as f64)
}

fn load_ppm(path: &Path) -> Result<TextureImage> {
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut pos = 0usize;
    let mut next_token = |data: &[u8]| -> Option<(usize, usize)> {
        let mut i = pos;
        loop {
            while i < data.len() && data[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < data.len() && data[i] == b'#' {
                while i < data.len() && data[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            break;
        }
        let start = i;
        while i < data.len() && !data[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            None
        } else {
            pos = i;
            Some((start, i))
        }
    };
    let tok = |range: (usize, usize), data: &[u8]| -> String {
        String::from_utf8_lossy(&data[range.0..range.1]).into_owned()
    };

    let magic = next_token(&data)
        .map(|r| tok(r, &data))
        .ok_or_else(|| Error::UnsupportedTexture {
            path: path.to_path_buf(),
            message: "empty file".into(),
        })?;
    if magic != "P6" {
        return Err(Error::UnsupportedTexture {
            path: path.to_path_buf(),
            message: format!("magic `{magic}` (only P6 supported)"),
        });
    }
    let mut read_usize = |name: &str| -> Result<usize> {
        next_token(&data)
            .map(|r| tok(r, &data))
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::UnsupportedTexture {
                path: path.to_path_buf(),
                message: format!("bad or missing {name}"),
            })
    };
    let width = read_usize("width")?;
    let height = read_usize("height")?;
    let maxval = read_usize("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedTexture {
            path: path.to_path_buf(),
            message: format!("maxval {maxval} (only 255 supported)"),
        });
    }
    // Exactly one whitespace byte after maxval, then raw pixel data.
    let start = pos + 1;
    let expected = width * height * 3;
    if data.len() < start + expected {
        return Err(Error::TruncatedTexture {
            path: path.to_path_buf(),
            expected,
            found: data.len().saturating_sub(start),
        });
    }
    let pixels = data[start..start + expected]
        .chunks_exact(3)
        .map(|c| [c[0] as f64 / 255.0, c[1] as f64 / 255.0, c[2] as f64 / 255.0])
        .collect();
    TextureImage::new(width, height, pixels)
}

fn load_png(path: &Path) -> Result<TextureImage> {
    let img = image::open(path)
        .map_err(|e| Error::UnsupportedTexture {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .into_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels = img
        .pixels()
        .map(|p| {
            [
                p.0[0] as f64 / 255.0,
                p.0[1] as f64 / 255.0,
                p.0[2] as f64 / 255.0,
            ]
        })
        .collect();
    TextureImage::new(w, h, pixels)
}
