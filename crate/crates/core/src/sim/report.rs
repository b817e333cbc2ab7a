use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::sampler::{gt_size, SimConfig};
use crate::assign::{AssignConfig, AssignResult, AssignerKind, MclaWeights, Strategy};
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::priors::{LevelSpec, PriorScheme, PyramidSpec};

/// Size bins keyed on `sqrt(w·h)`: `[0, e0)`, `[e0, e1)`, ..., `[e_last, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBins {
    pub edges: Vec<f64>,
    pub labels: Vec<String>,
}

impl Default for SizeBins {
    fn default() -> Self {
        SizeBins {
            edges: vec![12.0, 20.0, 32.0],
            labels: ["eS", "rS", "gS", "larger"].map(String::from).to_vec(),
        }
    }
}

impl SizeBins {
    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.edges.len() + 1 {
            return Err(Error::Config(
                "size bins need one more label than edges".into(),
            ));
        }
        if self.edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "size bin edges must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn bin_of(&self, size: f64) -> usize {
        self.edges
            .iter()
            .position(|&e| size < e)
            .unwrap_or(self.edges.len())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn bounds(&self, bin: usize) -> (f64, Option<f64>) {
        let lo = if bin == 0 { 0.0 } else { self.edges[bin - 1] };
        (lo, self.edges.get(bin).copied())
    }
}

/// Where an assigner's priors come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorLayout {
    /// The standard layout of the assigner's detector family.
    Native,
    Scheme(PriorScheme),
    Custom(Vec<LevelSpec>),
}

impl PriorLayout {
    pub fn resolve(&self, kind: AssignerKind, image_h: u32, image_w: u32) -> PyramidSpec {
        match self {
            PriorLayout::Native => kind.native_scheme().spec(image_h, image_w),
            PriorLayout::Scheme(s) => s.spec(image_h, image_w),
            PriorLayout::Custom(levels) => PyramidSpec {
                image_h,
                image_w,
                levels: levels.clone(),
            },
        }
    }

    /// The concrete layout recorded in reports.
    pub fn describe(&self, kind: AssignerKind) -> PriorLayout {
        match self {
            PriorLayout::Native => PriorLayout::Scheme(kind.native_scheme()),
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    pub label: String,
    pub lo: f64,
    /// `None` for the open-ended last bin.
    pub hi: Option<f64>,
    pub gt_count: u64,
    pub positives: u64,
    pub mean_positives_per_gt: f64,
    /// Share of this assigner's positives, in percent.
    pub share_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignerStats {
    pub assigner: AssignerKind,
    pub config: AssignConfig,
    pub weights: Option<MclaWeights>,
    pub priors: PriorLayout,
    pub total_positives: u64,
    pub bins: Vec<BinStats>,
}

impl AssignerStats {
    pub fn share(&self, label: &str) -> f64 {
        self.bins
            .iter()
            .filter(|b| b.label == label)
            .map(|b| b.share_pct)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportSource {
    Simulation,
    Dataset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub source: ReportSource,
    pub sim_config: Option<SimConfig>,
    pub seeds: Vec<u64>,
    /// Trials for a simulation, annotated images for a dataset.
    pub images: u64,
    pub gts: u64,
    pub size_key: String,
    pub priors_clipped: bool,
    pub bins: SizeBins,
    /// Crowd annotations left out of the GT sets (dataset runs only).
    pub excluded_crowd: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub meta: ReportMeta,
    pub assigners: Vec<AssignerStats>,
}

impl SimReport {
    pub fn assigner(&self, kind: AssignerKind) -> Option<&AssignerStats> {
        self.assigners.iter().find(|a| a.assigner == kind)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is serializable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report JSON: {e}")))
    }

    /// One row per `(assigner, bin)`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("assigner,bin,lo,hi,gt_count,positives,mean_positives_per_gt,share_pct\n");
        for a in &self.assigners {
            for b in &a.bins {
                let hi = b.hi.map(|v| v.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    a.assigner,
                    b.label,
                    b.lo,
                    hi,
                    b.gt_count,
                    b.positives,
                    b.mean_positives_per_gt,
                    b.share_pct
                )
                .unwrap();
            }
        }
        out
    }
}

/// Integer counts for one assigner, additive across images and trials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tally {
    pub gt_count: Vec<u64>,
    pub positives: Vec<u64>,
}

impl Tally {
    pub fn new(bins: usize) -> Self {
        Tally {
            gt_count: vec![0; bins],
            positives: vec![0; bins],
        }
    }

    pub fn record(&mut self, bins: &SizeBins, gts: &[BBox], result: &AssignResult) {
        for (gt, n) in gts.iter().zip(result.positives_per_gt(gts.len())) {
            let bin = bins.bin_of(gt_size(gt));
            self.gt_count[bin] += 1;
            self.positives[bin] += n;
        }
    }

    pub fn merge(mut self, other: &Tally) -> Tally {
        for (a, b) in self.gt_count.iter_mut().zip(&other.gt_count) {
            *a += b;
        }
        for (a, b) in self.positives.iter_mut().zip(&other.positives) {
            *a += b;
        }
        self
    }

    pub fn finish(
        &self,
        bins: &SizeBins,
        strategy: &Strategy,
        priors: PriorLayout,
    ) -> AssignerStats {
        let total: u64 = self.positives.iter().sum();
        let bins = (0..bins.len())
            .map(|k| {
                let (lo, hi) = bins.bounds(k);
                let (gt_count, positives) = (self.gt_count[k], self.positives[k]);
                BinStats {
                    label: bins.labels[k].clone(),
                    lo,
                    hi,
                    gt_count,
                    positives,
                    mean_positives_per_gt: if gt_count == 0 {
                        0.0
                    } else {
                        positives as f64 / gt_count as f64
                    },
                    share_pct: if total == 0 {
                        0.0
                    } else {
                        100.0 * positives as f64 / total as f64
                    },
                }
            })
            .collect();
        AssignerStats {
            assigner: strategy.kind,
            config: strategy.config,
            weights: (strategy.kind == AssignerKind::Mcla).then_some(strategy.weights),
            priors,
            total_positives: total,
            bins,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_edges_are_lower_inclusive() {
        let bins = SizeBins::default();
        assert_eq!(bins.bin_of(0.0), 0);
        assert_eq!(bins.bin_of(11.999), 0);
        assert_eq!(bins.bin_of(12.0), 1);
        assert_eq!(bins.bin_of(20.0), 2);
        assert_eq!(bins.bin_of(31.9), 2);
        assert_eq!(bins.bin_of(32.0), 3);
        assert_eq!(bins.bin_of(64.0), 3);
    }

    #[test]
    fn bins_validate() {
        assert!(SizeBins::default().validate().is_ok());
        let bad = SizeBins {
            edges: vec![12.0, 12.0],
            labels: vec!["a".into(), "b".into(), "c".into()],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_positive_tally_has_zero_shares() {
        let bins = SizeBins::default();
        let stats = Tally::new(4).finish(
            &bins,
            &Strategy::new(AssignerKind::Mcla),
            PriorLayout::Native,
        );
        assert!(stats
            .bins
            .iter()
            .all(|b| b.share_pct == 0.0 && b.mean_positives_per_gt == 0.0));
        assert!(stats.weights.is_some());
    }

    #[test]
    fn shares_sum_to_hundred() {
        let bins = SizeBins::default();
        let tally = Tally {
            gt_count: vec![3, 4, 5, 6],
            positives: vec![1, 7, 13, 29],
        };
        let stats = tally.finish(
            &bins,
            &Strategy::new(AssignerKind::OneStageMaxiou),
            PriorLayout::Native,
        );
        let sum: f64 = stats.bins.iter().map(|b| b.share_pct).sum();
        assert!((sum - 100.0).abs() < 1e-9);
        assert_eq!(stats.total_positives, 50);
        assert!(stats.weights.is_none());
    }
}
