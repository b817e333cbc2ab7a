//! Centered 2D transforms, one channel at a time.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::tensor::FeatureTensor;
use crate::error::{Error, Result};

/// Maximum imaginary part (relative to `max(1, peak |real|)`) tolerated when
/// returning to the spatial domain.
pub const IMAG_TOLERANCE: f64 = 1e-5;

/// Complex spectrum with the DC bin at `(h / 2, w / 2)`, channels last.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    h: usize,
    w: usize,
    c: usize,
    planes: Vec<Vec<Complex64>>,
}

impl Spectrum {
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.h, self.w, self.c)
    }

    pub fn center(&self) -> (usize, usize) {
        (self.h / 2, self.w / 2)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.planes[k][i * self.w + j]
    }

    pub fn channel(&self, k: usize) -> &[Complex64] {
        &self.planes[k]
    }

    /// Multiplies every channel by a real `h × w` weight plane.
    pub fn apply_weights(&self, weights: &[f64]) -> Result<Spectrum> {
        if weights.len() != self.h * self.w {
            return Err(Error::Shape(format!(
                "{} mask values for a {}x{} spectrum",
                weights.len(),
                self.h,
                self.w
            )));
        }
        let planes = self
            .planes
            .iter()
            .map(|p| p.iter().zip(weights).map(|(s, m)| s * m).collect())
            .collect();
        Ok(Spectrum { planes, ..*self })
    }

    pub fn energy(&self) -> f64 {
        self.planes
            .iter()
            .flat_map(|p| p.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Largest deviation from conjugate symmetry about the DC bin, relative
    /// to the largest magnitude.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let (ci, cj) = self.center();
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for plane in &self.planes {
            for i in 0..self.h {
                let ri = (2 * ci + self.h - i) % self.h;
                for j in 0..self.w {
                    let rj = (2 * cj + self.w - j) % self.w;
                    let a = plane[i * self.w + j];
                    let b = plane[ri * self.w + rj].conj();
                    worst = worst.max((a - b).norm());
                    peak = peak.max(a.norm());
                }
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            worst / peak
        }
    }
}

/// In-place unnormalized 2D transform of a row-major plane.
fn fft2_plane(plane: &mut [Complex64], h: usize, w: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(w, direction);
    let col_fft = planner.plan_fft(h, direction);
    row_fft.process(plane);
    let mut column = vec![Complex64::new(0.0, 0.0); h];
    for j in 0..w {
        for i in 0..h {
            column[i] = plane[i * w + j];
        }
        col_fft.process(&mut column);
        for i in 0..h {
            plane[i * w + j] = column[i];
        }
    }
}

/// Moves bin `(u, v)` to `((u + h/2) % h, (v + w/2) % w)`; `inverse` undoes it.
fn shift(plane: &[Complex64], h: usize, w: usize, inverse: bool) -> Vec<Complex64> {
    let (sh, sw) = if inverse {
        (h - h / 2, w - w / 2)
    } else {
        (h / 2, w / 2)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); plane.len()];
    for i in 0..h {
        let ti = (i + sh) % h;
        for j in 0..w {
            out[ti * w + (j + sw) % w] = plane[i * w + j];
        }
    }
    out
}

/// Per-channel forward 2D DFT (unnormalized) with DC moved to the center.
pub fn fft2_centered(x: &FeatureTensor) -> Spectrum {
    let (h, w, c) = x.shape();
    let planes = (0..c)
        .into_par_iter()
        .map(|k| {
            let mut plane = x.channel_plane(k);
            fft2_plane(&mut plane, h, w, FftDirection::Forward);
            shift(&plane, h, w, false)
        })
        .collect();
    Spectrum { h, w, c, planes }
}

/// Per-channel inverse of [`fft2_centered`], scaled by `1 / (h·w)`.
///
/// Fails if the result carries a non-negligible imaginary part, which means
/// the spectrum was not conjugate-symmetric (e.g. an asymmetric mask).
pub fn ifft2_centered(s: &Spectrum) -> Result<FeatureTensor> {
    let (h, w, _) = s.shape();
    let scale = 1.0 / (h * w) as f64;
    let planes: Vec<(Vec<f64>, f64, f64)> = s
        .planes
        .par_iter()
        .map(|p| {
            let mut plane = shift(p, h, w, true);
            fft2_plane(&mut plane, h, w, FftDirection::Inverse);
            let mut imag: f64 = 0.0;
            let mut peak: f64 = 0.0;
            let real = plane
                .iter()
                .map(|z| {
                    imag = imag.max((z.im * scale).abs());
                    peak = peak.max((z.re * scale).abs());
                    z.re * scale
                })
                .collect();
            (real, imag, peak)
        })
        .collect();
    for (_, imag, peak) in &planes {
        if *imag > IMAG_TOLERANCE * peak.max(1.0) {
            return Err(Error::ImaginaryResidue {
                residue: *imag,
                tolerance: IMAG_TOLERANCE * peak.max(1.0),
            });
        }
    }
    let real: Vec<Vec<f64>> = planes.into_iter().map(|(r, _, _)| r).collect();
    FeatureTensor::from_planes(h, w, &real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_dc_only() {
        let x = FeatureTensor::filled(6, 5, 1, 2.0).unwrap();
        let s = fft2_centered(&x);
        assert_eq!(s.center(), (3, 2));
        for i in 0..6 {
            for j in 0..5 {
                let z = s.get(i, j, 0);
                if (i, j) == (3, 2) {
                    assert!((z.re - 60.0).abs() < 1e-9 && z.im.abs() < 1e-9);
                } else {
                    assert!(z.norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn impulse_is_flat() {
        for (pi, pj) in [(0, 0), (3, 1), (7, 6)] {
            let x = FeatureTensor::from_fn(8, 7, 1, |i, j, _| ((i, j) == (pi, pj)) as u8 as f32)
                .unwrap();
            let s = fft2_centered(&x);
            assert!(s.channel(0).iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn shift_round_trip_odd_and_even() {
        for (h, w) in [(4, 4), (5, 3), (1, 6)] {
            let plane: Vec<Complex64> = (0..h * w).map(|v| Complex64::new(v as f64, 0.0)).collect();
            assert_eq!(shift(&shift(&plane, h, w, false), h, w, true), plane);
        }
    }

    #[test]
    fn asymmetric_spectrum_is_rejected() {
        let x = FeatureTensor::from_fn(8, 8, 1, |i, j, _| ((i * 3 + j) % 5) as f32).unwrap();
        let s = fft2_centered(&x);
        let mut weights = vec![1.0; 64];
        // Zero a single non-self-conjugate bin.
        weights[4 * 8 + 5] = 0.0;
        let filtered = s.apply_weights(&weights).unwrap();
        assert!(matches!(
            ifft2_centered(&filtered),
            Err(Error::ImaginaryResidue { .. })
        ));
    }
}
