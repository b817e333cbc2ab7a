use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// Real `h × w × c` feature map, row-major with channels last.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    h: usize,
    w: usize,
    c: usize,
    data: Vec<f32>,
}

impl FeatureTensor {
    pub fn new(h: usize, w: usize, c: usize, data: Vec<f32>) -> Result<Self> {
        if h == 0 || w == 0 || c == 0 {
            return Err(Error::Shape(format!(
                "tensor dimensions must be non-zero, got {h}x{w}x{c}"
            )));
        }
        if data.len() != h * w * c {
            return Err(Error::Shape(format!(
                "{} values for a {h}x{w}x{c} tensor",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Shape(format!(
                "non-finite value at flat index {pos}"
            )));
        }
        Ok(FeatureTensor { h, w, c, data })
    }

    pub fn filled(h: usize, w: usize, c: usize, value: f32) -> Result<Self> {
        Self::new(h, w, c, vec![value; h * w * c])
    }

    pub fn from_fn(
        h: usize,
        w: usize,
        c: usize,
        f: impl Fn(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(h * w * c);
        for i in 0..h {
            for j in 0..w {
                for k in 0..c {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::new(h, w, c, data)
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.h, self.w, self.c)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f32 {
        self.data[(i * self.w + j) * self.c + k]
    }

    /// One channel as a row-major `h × w` complex plane.
    pub(crate) fn channel_plane(&self, k: usize) -> Vec<Complex64> {
        self.data
            .iter()
            .skip(k)
            .step_by(self.c)
            .map(|&v| Complex64::new(v as f64, 0.0))
            .collect()
    }

    /// Interleaves real channel planes back into channel-last order.
    pub(crate) fn from_planes(h: usize, w: usize, planes: &[Vec<f64>]) -> Result<Self> {
        let c = planes.len();
        let mut data = vec![0f32; h * w * c];
        for (k, plane) in planes.iter().enumerate() {
            for (p, &v) in plane.iter().enumerate() {
                data[p * c + k] = v as f32;
            }
        }
        Self::new(h, w, c, data)
    }

    pub fn max_abs_diff(&self, other: &FeatureTensor) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a as f64 - *b as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Elementwise `a·self + b·other`.
    pub fn axpby(&self, a: f32, other: &FeatureTensor, b: f32) -> Result<FeatureTensor> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "cannot combine {:?} with {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| a * x + b * y)
            .collect();
        FeatureTensor::new(self.h, self.w, self.c, data)
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|&v| (v as f64) * (v as f64)).sum()
    }

    /// Per-channel spatial mean.
    pub fn channel_means(&self) -> Vec<f64> {
        let mut sums = vec![0f64; self.c];
        for (p, v) in self.data.iter().enumerate() {
            sums[p % self.c] += *v as f64;
        }
        let n = (self.h * self.w) as f64;
        sums.into_iter().map(|s| s / n).collect()
    }
}
