//! Small-object detection toolkit: IoU geometry, dense anchor generation,
//! MaxIoU and multi-criteria label assignment, FFT feature filtering, and a
//! simulation harness measuring how assigners distribute positives across
//! object sizes.

pub mod assign;
mod error;
pub mod freq;
pub mod geometry;
pub mod ingest;
pub mod priors;
pub mod sim;

pub use error::{Error, Result};
pub use geometry::{iou, BBox, BoxMatrix, CenterSize};
