//! Dense anchor generation over a feature pyramid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// One pyramid level: anchors are tiled every `stride` pixels with
/// `scales.len() * ratios.len()` shapes per location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub stride: f64,
    pub base_size: f64,
    pub scales: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl LevelSpec {
    pub fn anchors_per_location(&self) -> usize {
        self.scales.len() * self.ratios.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PyramidSpec {
    pub image_h: u32,
    pub image_w: u32,
    pub levels: Vec<LevelSpec>,
}

/// Which reference detector layout a pyramid follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorScheme {
    OneStage,
    TwoStage,
}

impl PriorScheme {
    pub fn spec(self, image_h: u32, image_w: u32) -> PyramidSpec {
        match self {
            PriorScheme::OneStage => PyramidSpec::one_stage(image_h, image_w),
            PriorScheme::TwoStage => PyramidSpec::two_stage(image_h, image_w),
        }
    }
}

const PYRAMID_RATIOS: [f64; 3] = [0.5, 1.0, 2.0];

impl PyramidSpec {
    /// RetinaNet-style pyramid: strides 8..128, octave base 4, three scales
    /// per octave and three ratios.
    pub fn one_stage(image_h: u32, image_w: u32) -> Self {
        let scales = vec![1.0, 2f64.powf(1.0 / 3.0), 2f64.powf(2.0 / 3.0)];
        let levels = [8.0, 16.0, 32.0, 64.0, 128.0]
            .into_iter()
            .map(|stride| LevelSpec {
                stride,
                base_size: 4.0 * stride,
                scales: scales.clone(),
                ratios: PYRAMID_RATIOS.to_vec(),
            })
            .collect();
        PyramidSpec {
            image_h,
            image_w,
            levels,
        }
    }

    /// Faster R-CNN RPN pyramid: strides 4..64, a single scale of 8 and
    /// three ratios.
    pub fn two_stage(image_h: u32, image_w: u32) -> Self {
        let levels = [4.0, 8.0, 16.0, 32.0, 64.0]
            .into_iter()
            .map(|stride| LevelSpec {
                stride,
                base_size: stride,
                scales: vec![8.0],
                ratios: PYRAMID_RATIOS.to_vec(),
            })
            .collect();
        PyramidSpec {
            image_h,
            image_w,
            levels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.image_h == 0 || self.image_w == 0 {
            return Err(Error::Config(format!(
                "image must be non-empty, got {}x{}",
                self.image_h, self.image_w
            )));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("pyramid needs at least one level".into()));
        }
        for (i, level) in self.levels.iter().enumerate() {
            let positive = |v: f64| v.is_finite() && v > 0.0;
            if !positive(level.stride) || !positive(level.base_size) {
                return Err(Error::Config(format!(
                    "level {i}: stride and base_size must be positive"
                )));
            }
            if level.scales.is_empty() || level.ratios.is_empty() {
                return Err(Error::Config(format!(
                    "level {i}: scales and ratios must be non-empty"
                )));
            }
            if !level
                .scales
                .iter()
                .chain(&level.ratios)
                .all(|&v| positive(v))
            {
                return Err(Error::Config(format!(
                    "level {i}: scales and ratios must be positive"
                )));
            }
        }
        if self.levels.windows(2).any(|w| w[1].stride <= w[0].stride) {
            return Err(Error::Config("strides must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Grid cells per level, `(rows, cols)`.
    pub fn grid(&self, level: usize) -> (usize, usize) {
        let stride = self.levels[level].stride;
        (
            (self.image_h as f64 / stride).ceil() as usize,
            (self.image_w as f64 / stride).ceil() as usize,
        )
    }

    pub fn prior_count(&self) -> usize {
        (0..self.levels.len())
            .map(|l| {
                let (rows, cols) = self.grid(l);
                rows * cols * self.levels[l].anchors_per_location()
            })
            .sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PriorSet {
    pub boxes: Vec<BBox>,
    pub level_index: Vec<u8>,
}

impl PriorSet {
    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

/// Tiles every level's anchors in level-major, row-major, scale-major,
/// ratio-minor order. Anchors are centered on cell centers and not clipped.
pub fn generate_priors(spec: &PyramidSpec) -> Result<PriorSet> {
    spec.validate()?;
    let mut set = PriorSet {
        boxes: Vec::with_capacity(spec.prior_count()),
        level_index: Vec::with_capacity(spec.prior_count()),
    };
    for (l, level) in spec.levels.iter().enumerate() {
        // Half extents per shape, computed once per level.
        let shapes: Vec<(f64, f64)> = level
            .scales
            .iter()
            .flat_map(|&s| {
                level.ratios.iter().map(move |&r| {
                    let side = level.base_size * s;
                    let sr = r.sqrt();
                    (side * sr / 2.0, side / sr / 2.0)
                })
            })
            .collect();
        let (rows, cols) = spec.grid(l);
        for i in 0..rows {
            let cy = level.stride * (i as f64 + 0.5);
            for j in 0..cols {
                let cx = level.stride * (j as f64 + 0.5);
                for &(hw, hh) in &shapes {
                    set.boxes.push(BBox {
                        x1: cx - hw,
                        y1: cy - hh,
                        x2: cx + hw,
                        y2: cy + hh,
                    });
                    set.level_index.push(l as u8);
                }
            }
        }
    }
    Ok(set)
}
