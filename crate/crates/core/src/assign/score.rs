//! Pairwise quality scores between ground truths (rows) and proposals
//! (columns).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{iou, BBox, BoxMatrix, CenterSize};

/// Anything that can score a `(gt, proposal)` pair on demand.
///
/// Assigners consume scores through this trait so that very large problems
/// can be evaluated without materializing the full matrix.
pub trait PairScorer: Sync {
    fn n_gts(&self) -> usize;
    fn n_proposals(&self) -> usize;
    fn score(&self, gt: usize, proposal: usize) -> f64;
}

/// Dense row-major `m × n` matrix; row = GT, column = proposal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl ScoreMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        Ok(ScoreMatrix { rows, cols, values })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                values.push(f(i, j));
            }
        }
        ScoreMatrix { rows, cols, values }
    }

    pub fn from_scorer(scorer: &impl PairScorer) -> Self {
        Self::from_fn(scorer.n_gts(), scorer.n_proposals(), |i, j| {
            scorer.score(i, j)
        })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        ScoreMatrix::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// True when either dimension is zero; assigners then label every
    /// proposal negative.
    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScoreMatrix {
        ScoreMatrix {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &ScoreMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with a header of proposal indices and one row per GT.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gt");
        for j in 0..self.cols {
            write!(out, ",{j}").unwrap();
        }
        out.push('\n');
        for i in 0..self.rows {
            write!(out, "{i}").unwrap();
            for v in self.row(i) {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

impl PairScorer for ScoreMatrix {
    fn n_gts(&self) -> usize {
        self.rows
    }

    fn n_proposals(&self) -> usize {
        self.cols
    }

    fn score(&self, gt: usize, proposal: usize) -> f64 {
        self.get(gt, proposal)
    }
}

/// Relative weights of the IoU, position-offset and shape-constraint
/// criteria, plus the two mapping factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MclaWeights {
    pub lambda: [f64; 3],
    pub c_poc: f64,
    pub c_scc: f64,
}

impl Default for MclaWeights {
    fn default() -> Self {
        MclaWeights {
            lambda: [1.0, 3.0, 1.0],
            c_poc: 20.0,
            c_scc: 0.25,
        }
    }
}

impl MclaWeights {
    pub fn with_lambda(lambda: [f64; 3]) -> Self {
        MclaWeights {
            lambda,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::Config(format!(
                "lambda weights must be non-negative, got {:?}",
                self.lambda
            )));
        }
        if self.lambda.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config("lambda weights must not all be zero".into()));
        }
        for (name, c) in [("c_poc", self.c_poc), ("c_scc", self.c_scc)] {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {c}")));
            }
        }
        Ok(())
    }
}

/// Position-offset criterion for a normalized center distance.
#[inline]
pub fn poc_score(e1_norm: f64, c_poc: f64) -> f64 {
    1.0 / (1.0 + (c_poc * e1_norm).sqrt())
}

/// Shape-constraint criterion for a squared extent difference.
#[inline]
pub fn scc_score(e2: f64, c_scc: f64) -> f64 {
    1.0 / (1.0 + (c_scc * e2).sqrt())
}

#[inline]
fn center_distance(g: &CenterSize, p: &CenterSize) -> f64 {
    let dx = g.cx - p.cx;
    let dy = g.cy - p.cy;
    (dx * dx + dy * dy).sqrt()
}

#[inline]
fn shape_sq_diff(g: &CenterSize, p: &CenterSize) -> f64 {
    let dw = g.w - p.w;
    let dh = g.h - p.h;
    dw * dw + dh * dh
}

/// Euclidean distance between every GT center and every proposal center.
pub fn center_mse_matrix(gts: &BoxMatrix, proposals: &BoxMatrix) -> ScoreMatrix {
    let (g, p) = (gts.rows(), proposals.rows());
    ScoreMatrix::from_fn(g.len(), p.len(), |i, j| center_distance(&g[i], &p[j]))
}

/// Squared norm of the `(w, h)` difference for every pair.
pub fn shape_mse_matrix(gts: &BoxMatrix, proposals: &BoxMatrix) -> ScoreMatrix {
    let (g, p) = (gts.rows(), proposals.rows());
    ScoreMatrix::from_fn(g.len(), p.len(), |i, j| shape_sq_diff(&g[i], &p[j]))
}

/// Whole-matrix min-max scaling to `[0, 1]`. A constant matrix maps to zeros.
pub fn minmax_normalize(m: &ScoreMatrix) -> ScoreMatrix {
    let (lo, hi) = min_max(m.values().iter().copied());
    m.map(|v| normalize(v, lo, hi))
}

#[inline]
fn normalize(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.0
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Plain IoU between GT and proposal sets.
pub struct IouScorer<'a> {
    gts: &'a [BBox],
    proposals: &'a [BBox],
}

impl<'a> IouScorer<'a> {
    pub fn new(gts: &'a [BBox], proposals: &'a [BBox]) -> Self {
        IouScorer { gts, proposals }
    }
}

impl PairScorer for IouScorer<'_> {
    fn n_gts(&self) -> usize {
        self.gts.len()
    }

    fn n_proposals(&self) -> usize {
        self.proposals.len()
    }

    #[inline]
    fn score(&self, gt: usize, proposal: usize) -> f64 {
        iou(&self.gts[gt], &self.proposals[proposal])
    }
}

pub fn iou_matrix(gts: &[BBox], proposals: &[BBox]) -> ScoreMatrix {
    ScoreMatrix::from_scorer(&IouScorer::new(gts, proposals))
}

/// Multi-criteria score: weighted mean of IoU, position-offset and
/// shape-constraint criteria.
///
/// Construction makes one pass over all pairs to find the extremes of the
/// center-distance matrix; scoring is then per pair.
pub struct MclaScorer<'a> {
    gts: &'a [BBox],
    proposals: &'a [BBox],
    gt_cs: Vec<CenterSize>,
    prop_cs: Vec<CenterSize>,
    weights: MclaWeights,
    lambda_sum: f64,
    e1_min: f64,
    e1_max: f64,
}

impl<'a> MclaScorer<'a> {
    pub fn new(gts: &'a [BBox], proposals: &'a [BBox], weights: MclaWeights) -> Result<Self> {
        weights.validate()?;
        let gt_cs: Vec<CenterSize> = gts.iter().map(BBox::center_size).collect();
        let prop_cs: Vec<CenterSize> = proposals.iter().map(BBox::center_size).collect();
        let (e1_min, e1_max) = center_distance_extremes(&gt_cs, &prop_cs);
        Ok(MclaScorer {
            gts,
            proposals,
            gt_cs,
            prop_cs,
            weights,
            lambda_sum: weights.lambda.iter().sum(),
            e1_min,
            e1_max,
        })
    }

    /// Position-offset criterion alone.
    #[inline]
    pub fn poc(&self, gt: usize, proposal: usize) -> f64 {
        let e1 = center_distance(&self.gt_cs[gt], &self.prop_cs[proposal]);
        poc_score(normalize(e1, self.e1_min, self.e1_max), self.weights.c_poc)
    }

    /// Shape-constraint criterion alone.
    #[inline]
    pub fn scc(&self, gt: usize, proposal: usize) -> f64 {
        scc_score(
            shape_sq_diff(&self.gt_cs[gt], &self.prop_cs[proposal]),
            self.weights.c_scc,
        )
    }
}

impl PairScorer for MclaScorer<'_> {
    fn n_gts(&self) -> usize {
        self.gts.len()
    }

    fn n_proposals(&self) -> usize {
        self.proposals.len()
    }

    #[inline]
    fn score(&self, gt: usize, proposal: usize) -> f64 {
        let [l1, l2, l3] = self.weights.lambda;
        let s_iou = iou(&self.gts[gt], &self.proposals[proposal]);
        let s_poc = self.poc(gt, proposal);
        let s_scc = self.scc(gt, proposal);
        (l1 * s_iou + l2 * s_poc + l3 * s_scc) / self.lambda_sum
    }
}

fn center_distance_extremes(gts: &[CenterSize], proposals: &[CenterSize]) -> (f64, f64) {
    use rayon::prelude::*;
    proposals
        .par_chunks(4096)
        .map(|chunk| {
            min_max(
                chunk
                    .iter()
                    .flat_map(|p| gts.iter().map(move |g| center_distance(g, p))),
            )
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        )
}

/// Full multi-criteria score matrix for the given sets.
pub fn mcla_scores(gts: &[BBox], proposals: &[BBox], weights: MclaWeights) -> Result<ScoreMatrix> {
    Ok(ScoreMatrix::from_scorer(&MclaScorer::new(
        gts, proposals, weights,
    )?))
}

/// Which single criterion (or the combination) to export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Iou,
    Poc,
    Scc,
    Mcla,
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iou" => Ok(Criterion::Iou),
            "poc" => Ok(Criterion::Poc),
            "scc" => Ok(Criterion::Scc),
            "mcla" => Ok(Criterion::Mcla),
            other => Err(Error::Config(format!("unknown criterion `{other}`"))),
        }
    }
}

pub fn criterion_matrix(
    gts: &[BBox],
    proposals: &[BBox],
    weights: MclaWeights,
    criterion: Criterion,
) -> Result<ScoreMatrix> {
    if criterion == Criterion::Iou {
        return Ok(iou_matrix(gts, proposals));
    }
    let scorer = MclaScorer::new(gts, proposals, weights)?;
    let (m, n) = (gts.len(), proposals.len());
    Ok(match criterion {
        Criterion::Poc => ScoreMatrix::from_fn(m, n, |i, j| scorer.poc(i, j)),
        Criterion::Scc => ScoreMatrix::from_fn(m, n, |i, j| scorer.scc(i, j)),
        _ => ScoreMatrix::from_scorer(&scorer),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(x1: f64, y1: f64, x2: f64, y2: f64) -> BBox {
        BBox::new(x1, y1, x2, y2).unwrap()
    }

    fn cs_box(cx: f64, cy: f64, w: f64, h: f64) -> BBox {
        CenterSize { cx, cy, w, h }.to_box()
    }

    #[test]
    fn iou_matrix_duplicates() {
        let g = bx(0., 0., 10., 10.);
        let m = iou_matrix(&[g], &[g, g]);
        assert_eq!(m.values(), &[1.0, 1.0]);
    }

    #[test]
    fn empty_sets_flagged() {
        assert!(iou_matrix(&[], &[bx(0., 0., 1., 1.)]).is_empty());
        assert!(
            mcla_scores(&[bx(0., 0., 1., 1.)], &[], MclaWeights::default())
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn center_distance_examples() {
        let g = BoxMatrix::from_boxes(&[cs_box(5., 5., 2., 2.)]);
        let p = BoxMatrix::from_boxes(&[cs_box(5., 5., 4., 4.), cs_box(8., 9., 2., 2.)]);
        assert_eq!(center_mse_matrix(&g, &p).values(), &[0.0, 5.0]);
    }

    #[test]
    fn shape_difference_examples() {
        let g = BoxMatrix::from_boxes(&[cs_box(0., 0., 10., 10.)]);
        let p = BoxMatrix::from_boxes(&[cs_box(3., 3., 10., 10.), cs_box(0., 0., 12., 14.)]);
        assert_eq!(shape_mse_matrix(&g, &p).values(), &[0.0, 20.0]);
    }

    #[test]
    fn minmax_examples() {
        let m = ScoreMatrix::new(1, 2, vec![0., 5.]).unwrap();
        assert_eq!(minmax_normalize(&m).values(), &[0., 1.]);
        let c = ScoreMatrix::new(2, 2, vec![3.; 4]).unwrap();
        assert_eq!(minmax_normalize(&c).values(), &[0.; 4]);
        let r = ScoreMatrix::new(2, 2, vec![1., 2., 3., 5.]).unwrap();
        assert_eq!(minmax_normalize(&r).values(), &[0., 0.25, 0.5, 1.0]);
    }

    #[test]
    fn mcla_identity_pair() {
        let g = bx(0., 0., 10., 10.);
        let s = mcla_scores(&[g], &[g], MclaWeights::default()).unwrap();
        assert_eq!(s.values(), &[1.0]);
    }

    #[test]
    fn mcla_worked_instance() {
        let g = bx(0., 0., 10., 10.);
        let p = [bx(0., 0., 10., 10.), bx(10., 0., 22., 14.)];
        let s = mcla_scores(&[g], &p, MclaWeights::default()).unwrap();
        // P2: IoU 0, E1 normalized to 1, E2 = 4 + 16.
        let expected = (3.0 / (1.0 + 20f64.sqrt()) + 1.0 / (1.0 + 5f64.sqrt())) / 5.0;
        assert_eq!(s.get(0, 0), 1.0);
        assert!((s.get(0, 1) - expected).abs() < 1e-12);
        assert!((s.get(0, 1) - 0.1714).abs() < 5e-5);
    }

    #[test]
    fn iou_only_weights_reduce_to_iou() {
        let g = [bx(0., 0., 10., 10.), bx(4., 4., 9., 12.)];
        let p = [
            bx(1., 1., 11., 9.),
            bx(20., 20., 30., 30.),
            bx(3., 5., 8., 10.),
        ];
        let s = mcla_scores(&g, &p, MclaWeights::with_lambda([1., 0., 0.])).unwrap();
        assert_eq!(s, iou_matrix(&g, &p));
    }

    #[test]
    fn weights_validation() {
        assert!(MclaWeights::with_lambda([0., 0., 0.]).validate().is_err());
        assert!(MclaWeights::with_lambda([-1., 2., 0.]).validate().is_err());
        let w = MclaWeights {
            c_scc: 0.0,
            ..Default::default()
        };
        assert!(w.validate().is_err());
        assert!(MclaWeights::default().validate().is_ok());
    }

    #[test]
    fn criterion_selection() {
        let g = [bx(0., 0., 10., 10.)];
        let p = [bx(0., 0., 10., 10.), bx(10., 0., 22., 14.)];
        let w = MclaWeights::default();
        let poc = criterion_matrix(&g, &p, w, Criterion::Poc).unwrap();
        assert_eq!(poc.get(0, 0), 1.0);
        assert!((poc.get(0, 1) - 1.0 / (1.0 + 20f64.sqrt())).abs() < 1e-15);
        let scc = criterion_matrix(&g, &p, w, Criterion::Scc).unwrap();
        assert!((scc.get(0, 1) - 1.0 / (1.0 + 5f64.sqrt())).abs() < 1e-15);
        assert_eq!(
            criterion_matrix(&g, &p, w, Criterion::Mcla).unwrap(),
            mcla_scores(&g, &p, w).unwrap()
        );
        assert_eq!("IoU".parse::<Criterion>().unwrap(), Criterion::Iou);
        assert!("giou".parse::<Criterion>().is_err());
    }

    #[test]
    fn csv_layout() {
        let m = ScoreMatrix::new(2, 2, vec![1.0, 0.5, 0.25, 0.0]).unwrap();
        assert_eq!(m.to_csv(), "gt,0,1\n0,1,0.5\n1,0.25,0\n");
    }
}
