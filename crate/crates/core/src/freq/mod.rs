//! Spectral feature filtering: centered 2D FFT, hierarchical highpass
//! purification with a residual branch, and the low/high frequency split
//! used ahead of decoupled detection heads.

mod fft;
pub mod ftm;
mod mask;
mod tensor;

pub use fft::{fft2_centered, ifft2_centered, Spectrum, IMAG_TOLERANCE};
pub use mask::{build_band_mask, build_hfp_mask, BandKind, FreqMask, HfpConfig};
pub use tensor::FeatureTensor;

use crate::error::{Error, Result};

/// `ifft(mask ⊙ fft(x))`, the mask broadcast across channels.
pub fn apply_mask(x: &FeatureTensor, mask: &FreqMask) -> Result<FeatureTensor> {
    let (h, w, _) = x.shape();
    if mask.shape() != (h, w) {
        return Err(Error::Shape(format!(
            "mask {:?} does not match tensor {h}x{w}",
            mask.shape()
        )));
    }
    ifft2_centered(&fft2_centered(x).apply_weights(&mask.weights())?)
}

/// Residual purification with an explicit mask: `filtered·omega + x`.
pub fn purify_with_mask(x: &FeatureTensor, mask: &FreqMask, omega: f64) -> Result<FeatureTensor> {
    let filtered = apply_mask(x, mask)?;
    filtered.axpby(omega as f32, x, 1.0)
}

/// Purifies pyramid level `level` with the level's adaptive highpass mask.
pub fn hfp_purify(x: &FeatureTensor, level: usize, cfg: &HfpConfig) -> Result<FeatureTensor> {
    let (h, w, _) = x.shape();
    let mask = build_hfp_mask(h, w, level, cfg)?;
    purify_with_mask(x, &mask, cfg.omega)
}

/// Frequency split settings: `d_l` is the lowpass cutoff, `d_h` the
/// highpass cutoff, both as fractions of the spectral extent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct FdConfig {
    pub d_l: f64,
    pub d_h: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            d_l: 0.85,
            d_h: 0.10,
        }
    }
}

/// Splits a RoI feature into its low-frequency (`d_l` lowpass) and
/// high-frequency (`d_h` highpass) components.
pub fn fd_split(roi: &FeatureTensor, d_l: f64, d_h: f64) -> Result<(FeatureTensor, FeatureTensor)> {
    let (h, w, _) = roi.shape();
    let low_mask = build_band_mask(h, w, d_l, BandKind::Lowpass)?;
    let high_mask = build_band_mask(h, w, d_h, BandKind::Highpass)?;
    let spectrum = fft2_centered(roi);
    let low = ifft2_centered(&spectrum.apply_weights(&low_mask.weights())?)?;
    let high = ifft2_centered(&spectrum.apply_weights(&high_mask.weights())?)?;
    Ok((low, high))
}
