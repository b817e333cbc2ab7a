use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub image_h: u32,
    pub image_w: u32,
    pub n_gts: usize,
    /// Upper bound on either side of a generated box.
    pub max_dim: f64,
    /// Seed of the first trial; trial `t` uses `seed + t`.
    pub seed: u64,
    pub trials: usize,
    /// Aspect ratio `w / h`, sampled uniformly in `[lo, hi]`.
    pub aspect_range: (f64, f64),
    /// Box size `sqrt(w·h)`, sampled uniformly in `(lo, hi]`.
    pub size_range: (f64, f64),
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            image_h: 800,
            image_w: 800,
            n_gts: 2000,
            max_dim: 64.0,
            seed: 0,
            trials: 5,
            aspect_range: (0.5, 2.0),
            size_range: (2.0, 64.0),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.image_h == 0 || self.image_w == 0 {
            return bad(format!("empty image {}x{}", self.image_h, self.image_w));
        }
        let min_side = self.image_h.min(self.image_w) as f64;
        if !(self.max_dim > 0.0 && self.max_dim <= min_side) {
            return bad(format!(
                "max_dim {} must be positive and fit the {}x{} image",
                self.max_dim, self.image_h, self.image_w
            ));
        }
        let (lo, hi) = self.size_range;
        if !(lo >= 0.0 && hi > lo && hi <= self.max_dim) {
            return bad(format!(
                "size_range ({lo}, {hi}] must be non-empty, non-negative and at most max_dim {}",
                self.max_dim
            ));
        }
        let (alo, ahi) = self.aspect_range;
        if !(alo > 0.0 && ahi >= alo && ahi.is_finite()) {
            return bad(format!(
                "aspect_range [{alo}, {ahi}] must be positive and ordered"
            ));
        }
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.trials as u64)
            .map(|t| self.seed.wrapping_add(t))
            .collect()
    }
}

/// Draws `cfg.n_gts` boxes with uniform size, aspect ratio and position.
///
/// Boxes whose longer side would exceed `max_dim` are scaled down to it.
/// Centers are uniform over the positions that keep the box inside the
/// image.
pub fn sample_gts(cfg: &SimConfig, rng: &mut impl Rng) -> Result<Vec<BBox>> {
    cfg.validate()?;
    let (slo, shi) = cfg.size_range;
    let (alo, ahi) = cfg.aspect_range;
    let (img_w, img_h) = (cfg.image_w as f64, cfg.image_h as f64);
    let mut boxes = Vec::with_capacity(cfg.n_gts);
    for _ in 0..cfg.n_gts {
        // 1 - u lies in (0, 1], giving a size in (lo, hi].
        let size = slo + (1.0 - rng.gen::<f64>()) * (shi - slo);
        let aspect = alo + rng.gen::<f64>() * (ahi - alo);
        let sa = aspect.sqrt();
        let (mut w, mut h) = (size * sa, size / sa);
        let longest = w.max(h);
        if longest > cfg.max_dim {
            let k = cfg.max_dim / longest;
            w *= k;
            h *= k;
        }
        let cx = w / 2.0 + rng.gen::<f64>() * (img_w - w);
        let cy = h / 2.0 + rng.gen::<f64>() * (img_h - h);
        boxes.push(BBox {
            x1: (cx - w / 2.0).max(0.0),
            y1: (cy - h / 2.0).max(0.0),
            x2: (cx + w / 2.0).min(img_w),
            y2: (cy + h / 2.0).min(img_h),
        });
    }
    Ok(boxes)
}

/// Ground truths for trial `t` of a run.
pub fn trial_gts(cfg: &SimConfig, trial: usize) -> Result<Vec<BBox>> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    sample_gts(cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Binning key: the geometric mean of width and height.
pub fn gt_size(b: &BBox) -> f64 {
    (b.width() * b.height()).sqrt()
}
