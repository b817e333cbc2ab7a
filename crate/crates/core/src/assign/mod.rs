//! Label assignment: MaxIoU-style thresholding over any pairwise quality
//! score, with the multi-criteria (MCLA) score as an alternative to IoU.

mod score;

pub use score::{
    center_mse_matrix, criterion_matrix, iou_matrix, mcla_scores, minmax_normalize, poc_score,
    scc_score, shape_mse_matrix, Criterion, IouScorer, MclaScorer, MclaWeights, PairScorer,
    ScoreMatrix,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::priors::PriorScheme;

/// Thresholds of the max-quality assignment protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssignConfig {
    pub pos_thr: f64,
    pub neg_thr: f64,
    pub match_low_quality: bool,
    pub min_pos_quality: f64,
}

impl AssignConfig {
    /// RetinaNet defaults.
    pub const ONE_STAGE: AssignConfig = AssignConfig {
        pos_thr: 0.5,
        neg_thr: 0.4,
        match_low_quality: true,
        min_pos_quality: 0.0,
    };

    /// Faster R-CNN RPN defaults.
    pub const TWO_STAGE: AssignConfig = AssignConfig {
        pos_thr: 0.7,
        neg_thr: 0.3,
        match_low_quality: true,
        min_pos_quality: 0.3,
    };

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.pos_thr) || !unit(self.neg_thr) || !unit(self.min_pos_quality) {
            return Err(Error::Config(format!(
                "thresholds must lie in [0, 1]: {self:?}"
            )));
        }
        if self.neg_thr > self.pos_thr {
            return Err(Error::Config(format!(
                "neg_thr {} exceeds pos_thr {}",
                self.neg_thr, self.pos_thr
            )));
        }
        Ok(())
    }
}

impl Default for AssignConfig {
    fn default() -> Self {
        AssignConfig::TWO_STAGE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Negative,
    Ignored,
    Positive(u32),
}

impl Label {
    /// Integer encoding: `-1` negative, `-2` ignored, GT index otherwise.
    pub fn code(self) -> i64 {
        match self {
            Label::Negative => -1,
            Label::Ignored => -2,
            Label::Positive(i) => i as i64,
        }
    }

    pub fn gt(self) -> Option<usize> {
        match self {
            Label::Positive(i) => Some(i as usize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignResult {
    pub labels: Vec<Label>,
    /// Best score of each proposal over all GTs (0 when there are no GTs).
    pub max_quality: Vec<f64>,
}

impl AssignResult {
    fn all_negative(n: usize) -> Self {
        AssignResult {
            labels: vec![Label::Negative; n],
            max_quality: vec![0.0; n],
        }
    }

    /// Number of positives per GT.
    pub fn positives_per_gt(&self, n_gts: usize) -> Vec<u64> {
        let mut counts = vec![0u64; n_gts];
        for gt in self.labels.iter().filter_map(|l| l.gt()) {
            counts[gt] += 1;
        }
        counts
    }

    pub fn num_positive(&self) -> usize {
        self.labels.iter().filter(|l| l.gt().is_some()).count()
    }
}

const COLUMN_CHUNK: usize = 2048;

/// Per-row state accumulated over one chunk of columns: the best score and
/// every column attaining it.
#[derive(Clone)]
struct RowBest {
    score: f64,
    cols: Vec<u32>,
}

struct ChunkPass {
    col_max: Vec<f64>,
    col_arg: Vec<u32>,
    rows: Vec<RowBest>,
}

fn scan_chunk(scorer: &impl PairScorer, cols: std::ops::Range<usize>) -> ChunkPass {
    let m = scorer.n_gts();
    let mut rows = vec![
        RowBest {
            score: f64::NEG_INFINITY,
            cols: Vec::new(),
        };
        m
    ];
    let mut col_max = Vec::with_capacity(cols.len());
    let mut col_arg = Vec::with_capacity(cols.len());
    for j in cols {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0u32;
        for (i, row) in rows.iter_mut().enumerate() {
            let s = scorer.score(i, j);
            if s > best {
                best = s;
                arg = i as u32;
            }
            if s > row.score {
                row.score = s;
                row.cols.clear();
                row.cols.push(j as u32);
            } else if s == row.score {
                row.cols.push(j as u32);
            }
        }
        col_max.push(best);
        col_arg.push(arg);
    }
    ChunkPass {
        col_max,
        col_arg,
        rows,
    }
}

/// Labels each proposal by its best score over all GTs.
///
/// Below `neg_thr` is negative, below `pos_thr` ignored, otherwise positive
/// to the best GT (lowest index on ties). With `match_low_quality`, each GT
/// then also claims every proposal attaining its row maximum, provided that
/// maximum is positive and at least `min_pos_quality`; GTs are visited in
/// index order, so a later GT overrides an earlier one on a shared proposal.
pub fn assign_max_quality(scorer: &impl PairScorer, cfg: &AssignConfig) -> Result<AssignResult> {
    cfg.validate()?;
    let (m, n) = (scorer.n_gts(), scorer.n_proposals());
    if m == 0 || n == 0 {
        return Ok(AssignResult::all_negative(n));
    }

    let chunks: Vec<ChunkPass> = (0..n)
        .step_by(COLUMN_CHUNK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| scan_chunk(scorer, start..(start + COLUMN_CHUNK).min(n)))
        .collect();

    let mut max_quality = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for chunk in &chunks {
        for (&q, &arg) in chunk.col_max.iter().zip(&chunk.col_arg) {
            max_quality.push(q);
            labels.push(if q < cfg.neg_thr {
                Label::Negative
            } else if q < cfg.pos_thr {
                Label::Ignored
            } else {
                Label::Positive(arg)
            });
        }
    }

    if cfg.match_low_quality {
        for i in 0..m {
            let best = chunks
                .iter()
                .map(|c| c.rows[i].score)
                .fold(f64::NEG_INFINITY, f64::max);
            if best <= 0.0 || best < cfg.min_pos_quality {
                continue;
            }
            for chunk in chunks.iter().filter(|c| c.rows[i].score == best) {
                for &j in &chunk.rows[i].cols {
                    labels[j as usize] = Label::Positive(i as u32);
                }
            }
        }
    }

    Ok(AssignResult {
        labels,
        max_quality,
    })
}

pub fn one_stage_maxiou(gts: &[BBox], proposals: &[BBox]) -> Result<AssignResult> {
    assign_max_quality(&IouScorer::new(gts, proposals), &AssignConfig::ONE_STAGE)
}

pub fn two_stage_maxiou(gts: &[BBox], proposals: &[BBox]) -> Result<AssignResult> {
    assign_max_quality(&IouScorer::new(gts, proposals), &AssignConfig::TWO_STAGE)
}

pub fn mcla_assign(
    gts: &[BBox],
    proposals: &[BBox],
    weights: MclaWeights,
    cfg: &AssignConfig,
) -> Result<AssignResult> {
    if gts.is_empty() || proposals.is_empty() {
        cfg.validate()?;
        return Ok(AssignResult::all_negative(proposals.len()));
    }
    assign_max_quality(&MclaScorer::new(gts, proposals, weights)?, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignerKind {
    OneStageMaxiou,
    TwoStageMaxiou,
    Mcla,
}

impl AssignerKind {
    pub const ALL: [AssignerKind; 3] = [
        AssignerKind::OneStageMaxiou,
        AssignerKind::TwoStageMaxiou,
        AssignerKind::Mcla,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AssignerKind::OneStageMaxiou => "one_stage_maxiou",
            AssignerKind::TwoStageMaxiou => "two_stage_maxiou",
            AssignerKind::Mcla => "mcla",
        }
    }

    /// Prior layout each assigner is evaluated with.
    pub fn native_scheme(self) -> PriorScheme {
        match self {
            AssignerKind::OneStageMaxiou => PriorScheme::OneStage,
            AssignerKind::TwoStageMaxiou | AssignerKind::Mcla => PriorScheme::TwoStage,
        }
    }

    pub fn default_config(self) -> AssignConfig {
        match self {
            AssignerKind::OneStageMaxiou => AssignConfig::ONE_STAGE,
            AssignerKind::TwoStageMaxiou | AssignerKind::Mcla => AssignConfig::TWO_STAGE,
        }
    }
}

impl std::fmt::Display for AssignerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AssignerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "one_stage_maxiou" | "one_stage" => Ok(AssignerKind::OneStageMaxiou),
            "two_stage_maxiou" | "two_stage" => Ok(AssignerKind::TwoStageMaxiou),
            "mcla" => Ok(AssignerKind::Mcla),
            other => Err(Error::Config(format!("unknown assigner `{other}`"))),
        }
    }
}

/// A fully parameterized assigner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: AssignerKind,
    pub config: AssignConfig,
    pub weights: MclaWeights,
}

impl Strategy {
    pub fn new(kind: AssignerKind) -> Self {
        Strategy {
            kind,
            config: kind.default_config(),
            weights: MclaWeights::default(),
        }
    }

    pub fn assign(&self, gts: &[BBox], proposals: &[BBox]) -> Result<AssignResult> {
        match self.kind {
            AssignerKind::Mcla => mcla_assign(gts, proposals, self.weights, &self.config),
            _ => assign_max_quality(&IouScorer::new(gts, proposals), &self.config),
        }
    }
}
