use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary `h × w` spectral mask aligned with a centered spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqMask {
    h: usize,
    w: usize,
    data: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandKind {
    Lowpass,
    Highpass,
}

impl FreqMask {
    pub fn all_pass(h: usize, w: usize) -> Self {
        FreqMask {
            h,
            w,
            data: vec![true; h * w],
        }
    }

    /// Marks bins inside the central rectangle `|i - h/2| <= frac·h/2`,
    /// `|j - w/2| <= frac·w/2` with `inside` and the rest with `!inside`.
    fn central_block(h: usize, w: usize, frac: f64, inside: bool) -> Self {
        let (ci, cj) = ((h / 2) as f64, (w / 2) as f64);
        let (ri, rj) = (frac * h as f64 / 2.0, frac * w as f64 / 2.0);
        let mut data = Vec::with_capacity(h * w);
        for i in 0..h {
            let in_row = (i as f64 - ci).abs() <= ri;
            for j in 0..w {
                let in_block = in_row && (j as f64 - cj).abs() <= rj;
                data.push(in_block == inside);
            }
        }
        FreqMask { h, w, data }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.h, self.w)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.w + j]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.data.iter().map(|&m| m as u8 as f64).collect()
    }

    pub fn zero_count(&self) -> usize {
        self.data.iter().filter(|m| !**m).count()
    }

    /// Unchanged under point reflection about the DC bin, so filtering a real
    /// signal keeps it real.
    pub fn is_point_symmetric(&self) -> bool {
        let (ci, cj) = (self.h / 2, self.w / 2);
        (0..self.h).all(|i| {
            let ri = (2 * ci + self.h - i) % self.h;
            (0..self.w).all(|j| {
                let rj = (2 * cj + self.w - j) % self.w;
                self.get(i, j) == self.get(ri, rj)
            })
        })
    }
}

/// Hierarchical purification settings: levels below `relay` are filtered,
/// `mu` sets the filtering strength and `omega` weights the filtered branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HfpConfig {
    pub relay: usize,
    pub mu: f64,
    pub omega: f64,
}

impl Default for HfpConfig {
    fn default() -> Self {
        HfpConfig {
            relay: 2,
            mu: 0.05,
            omega: 0.3,
        }
    }
}

impl HfpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::Config(format!(
                "mu must lie in [0, 1], got {}",
                self.mu
            )));
        }
        if !self.omega.is_finite() || self.omega < 0.0 {
            return Err(Error::Config(format!(
                "omega must be non-negative, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Filtering extent for `level`: stronger on lower levels, zero at the
    /// relay level.
    pub fn strength(&self, level: usize) -> Result<f64> {
        self.validate()?;
        if level >= self.relay {
            return Err(Error::LevelOutOfRange {
                level,
                relay: self.relay,
            });
        }
        Ok(self.mu * (self.relay - level) as f64 / self.relay as f64)
    }
}

/// Highpass mask removing a central block whose half-extent is the level's
/// strength times half the spectrum size.
pub fn build_hfp_mask(h: usize, w: usize, level: usize, cfg: &HfpConfig) -> Result<FreqMask> {
    let k = cfg.strength(level)?;
    Ok(FreqMask::central_block(h, w, k, false))
}

pub fn build_band_mask(h: usize, w: usize, cutoff: f64, kind: BandKind) -> Result<FreqMask> {
    if !(0.0..=1.0).contains(&cutoff) {
        return Err(Error::Config(format!(
            "cutoff must lie in [0, 1], got {cutoff}"
        )));
    }
    Ok(FreqMask::central_block(
        h,
        w,
        cutoff,
        kind == BandKind::Lowpass,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_level0_block_64() {
        let m = build_hfp_mask(64, 64, 0, &HfpConfig::default()).unwrap();
        assert_eq!(m.zero_count(), 9);
        for i in 31..=33 {
            for j in 31..=33 {
                assert!(!m.get(i, j));
            }
        }
        assert!(m.get(30, 32) && m.get(34, 32));
    }

    #[test]
    fn zero_strength_removes_only_dc() {
        let cfg = HfpConfig {
            mu: 0.0,
            ..Default::default()
        };
        let m = build_hfp_mask(16, 12, 0, &cfg).unwrap();
        assert_eq!(m.zero_count(), 1);
        assert!(!m.get(8, 6));
    }

    #[test]
    fn higher_levels_filter_less() {
        let cfg = HfpConfig {
            mu: 0.3,
            ..Default::default()
        };
        let l0 = build_hfp_mask(64, 64, 0, &cfg).unwrap();
        let l1 = build_hfp_mask(64, 64, 1, &cfg).unwrap();
        assert!(l1.zero_count() <= l0.zero_count());
        assert!(l1.zero_count() < l0.zero_count());
    }

    #[test]
    fn level_at_relay_rejected() {
        let cfg = HfpConfig::default();
        assert!(matches!(
            build_hfp_mask(8, 8, 2, &cfg),
            Err(Error::LevelOutOfRange { level: 2, relay: 2 })
        ));
        let none = HfpConfig { relay: 0, ..cfg };
        assert!(build_hfp_mask(8, 8, 0, &none).is_err());
        let bad = HfpConfig { mu: 1.5, ..cfg };
        assert!(build_hfp_mask(8, 8, 0, &bad).is_err());
    }

    #[test]
    fn band_mask_edges() {
        let low = build_band_mask(10, 7, 1.0, BandKind::Lowpass).unwrap();
        assert_eq!(low.zero_count(), 0);
        let high = build_band_mask(10, 7, 0.0, BandKind::Highpass).unwrap();
        assert_eq!(high.zero_count(), 1);
        assert!(!high.get(5, 3));
        assert!(build_band_mask(4, 4, -0.1, BandKind::Lowpass).is_err());
    }

    #[test]
    fn band_masks_partition() {
        for c in [0.0, 0.1, 0.37, 0.85, 1.0] {
            let low = build_band_mask(9, 12, c, BandKind::Lowpass).unwrap();
            let high = build_band_mask(9, 12, c, BandKind::Highpass).unwrap();
            for i in 0..9 {
                for j in 0..12 {
                    assert!(low.get(i, j) ^ high.get(i, j));
                }
            }
        }
    }

    #[test]
    fn masks_are_point_symmetric() {
        for (h, w) in [(8, 8), (7, 9), (64, 48), (1, 5)] {
            for c in [0.0, 0.05, 0.2, 0.5, 0.85, 1.0] {
                for kind in [BandKind::Lowpass, BandKind::Highpass] {
                    assert!(build_band_mask(h, w, c, kind).unwrap().is_point_symmetric());
                }
                let cfg = HfpConfig {
                    mu: c,
                    ..Default::default()
                };
                assert!(build_hfp_mask(h, w, 0, &cfg).unwrap().is_point_symmetric());
            }
        }
    }
}
