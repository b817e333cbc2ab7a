//! Monte-Carlo label-assignment study: random small GTs on a fixed canvas,
//! dense priors, and per-size-bin positive counts for each assigner.

pub mod chart;
mod report;
mod sampler;

pub use report::{
    AssignerStats, BinStats, PriorLayout, ReportMeta, ReportSource, SimReport, SizeBins, Tally,
};
pub use sampler::{gt_size, sample_gts, trial_gts, SimConfig};

use std::collections::HashMap;

use rayon::prelude::*;

use crate::assign::{AssignConfig, AssignerKind, Strategy};
use crate::error::Result;
use crate::priors::{generate_priors, PriorScheme, PriorSet};

/// Assignment protocol of the simulation: plain thresholding with no
/// low-quality matching, so a GT only receives positives that clear the
/// threshold on their own.
///
/// MaxIoU variants keep their detectors' thresholds. MCLA is thresholded at
/// 0.5/0.4: a GT under 12 px scores at most about 0.64 against the smallest
/// two-stage anchor, so the 0.7 RPN threshold would exclude every small
/// object by construction.
pub fn simulation_strategy(kind: AssignerKind) -> Strategy {
    let base = match kind {
        AssignerKind::OneStageMaxiou | AssignerKind::Mcla => AssignConfig::ONE_STAGE,
        AssignerKind::TwoStageMaxiou => AssignConfig::TWO_STAGE,
    };
    Strategy {
        config: AssignConfig {
            match_low_quality: false,
            ..base
        },
        ..Strategy::new(kind)
    }
}

pub fn simulation_strategies() -> Vec<Strategy> {
    AssignerKind::ALL
        .into_iter()
        .map(simulation_strategy)
        .collect()
}

/// Runs every trial of `cfg` through each strategy with its native priors.
///
/// Trials are independent; counts are summed, so the report does not depend
/// on scheduling.
pub fn run_simulation(cfg: &SimConfig, strategies: &[Strategy]) -> Result<SimReport> {
    cfg.validate()?;
    let bins = SizeBins::default();

    let mut priors: HashMap<PriorScheme, PriorSet> = HashMap::new();
    for s in strategies {
        let scheme = s.kind.native_scheme();
        if let std::collections::hash_map::Entry::Vacant(e) = priors.entry(scheme) {
            e.insert(generate_priors(&scheme.spec(cfg.image_h, cfg.image_w))?);
        }
    }

    let per_trial: Vec<Vec<Tally>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let gts = trial_gts(cfg, t)?;
            strategies
                .iter()
                .map(|s| {
                    let result = s.assign(&gts, &priors[&s.kind.native_scheme()].boxes)?;
                    let mut tally = Tally::new(bins.len());
                    tally.record(&bins, &gts, &result);
                    Ok(tally)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let assigners = strategies
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let total = per_trial
                .iter()
                .fold(Tally::new(bins.len()), |acc, trial| acc.merge(&trial[k]));
            total.finish(&bins, s, PriorLayout::Native.describe(s.kind))
        })
        .collect();

    Ok(SimReport {
        meta: ReportMeta {
            source: ReportSource::Simulation,
            sim_config: Some(cfg.clone()),
            seeds: cfg.seeds(),
            images: cfg.trials as u64,
            gts: (cfg.trials * cfg.n_gts) as u64,
            size_key: "sqrt_area".into(),
            priors_clipped: false,
            bins,
            excluded_crowd: 0,
        },
        assigners,
    })
}
