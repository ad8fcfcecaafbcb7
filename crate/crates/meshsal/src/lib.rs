//! Textured-mesh saliency toolkit.
//!
//! Converts timestamped VR gaze logs recorded against a rotating stimulus
//! into per-face saliency maps, extracts texture-aligned and geometric
//! face features, evaluates saliency maps (CC / SIM / KLD / SE), and runs
//! saliency-guided quadric mesh simplification.
//!
//! See the `examples/` directory for one runnable example per capability
//! and the `meshsal` binary for the batch CLI.

pub mod error;
pub mod mesh;
pub mod obj;
pub mod ply;
pub mod raycast;
pub mod shapes;
pub mod texture;

pub mod features;
pub mod gaze;
pub mod saliency;
pub mod simplify;
pub mod texture_align;

pub mod cli;

pub use error::{Error, Result};
pub use mesh::{LoadOptions, RingNeighborhood, TexturedMesh};
pub use raycast::{Bvh, Hit, Ray};
pub use saliency::SaliencyMap;
pub use texture::TextureImage;
