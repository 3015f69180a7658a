//! Alpha matte toolkit: compositing, chroma keying, connectivity-aware
//! refinement, trimaps and matting metrics.

pub mod batch;
pub mod connectivity;
pub mod error;
pub mod exec;
pub mod image;
pub mod io;
pub mod matte;
pub mod metrics;
pub mod trimap;

pub use error::{MatteError, Result};
pub use exec::Execution;
pub use image::{AlphaMatte, InverseAlpha, KeyColor, Mask, RgbImage};
