use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use sodkit::assign::{criterion_matrix, AssignerKind, Strategy};
use sodkit::freq::{build_hfp_mask, fd_split, ftm, hfp_purify, FdConfig};
use sodkit::ingest::{dataset_assignment_stats, load_coco};
use sodkit::priors::PriorScheme;
use sodkit::sim::{chart, run_simulation, PriorLayout, SimReport};

use crate::boxes::{read_boxes, read_nonempty};
use crate::config::RunConfig;
use crate::{
    Command, Common, FdsplitArgs, PurifyArgs, ReportArgs, ScoreArgs, SimulateArgs, StatsArgs,
    UsageError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PriorChoice {
    Native,
    OneStage,
    TwoStage,
}

/// Parameter problems are usage errors, not data errors.
fn usage<T>(r: sodkit::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| UsageError(e.to_string()).into())
}

pub fn run(command: Command) -> anyhow::Result<()> {
    let common = match &command {
        Command::Simulate(a) => &a.common,
        Command::Score(a) => &a.common,
        Command::Purify(a) => &a.common,
        Command::Fdsplit(a) => &a.common,
        Command::Stats(a) => &a.common,
    };
    let cfg =
        RunConfig::load(common.config.as_deref()).map_err(|e| UsageError(format!("{e:#}")))?;
    let pool = thread_pool(common)?;
    pool.install(|| match command {
        Command::Simulate(a) => simulate(cfg, a),
        Command::Score(a) => score(cfg, a),
        Command::Purify(a) => purify(cfg, a),
        Command::Fdsplit(a) => fdsplit(cfg, a),
        Command::Stats(a) => stats(cfg, a),
    })
}

fn thread_pool(common: &Common) -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.jobs {
        if n == 0 {
            return Err(UsageError("--jobs must be at least 1".into()).into());
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

fn lambda3(v: &Option<Vec<f64>>) -> Option<[f64; 3]> {
    v.as_ref().map(|l| [l[0], l[1], l[2]])
}

fn strategies(cfg: &mut RunConfig, args: &ReportArgs) -> anyhow::Result<Vec<Strategy>> {
    if let Some(p) = args.protocol {
        cfg.protocol = p;
    }
    if let Some(l) = lambda3(&args.lambda) {
        cfg.mcla.lambda = l;
    }
    usage(cfg.mcla.validate())?;
    let kinds = args
        .assigners
        .clone()
        .unwrap_or_else(|| AssignerKind::ALL.to_vec());
    if kinds.is_empty() {
        return Err(UsageError("no assigners selected".into()).into());
    }
    let out: Vec<Strategy> = kinds.into_iter().map(|k| cfg.strategy(k)).collect();
    for s in &out {
        usage(s.config.validate())?;
    }
    Ok(out)
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_report(report: &SimReport, args: &ReportArgs) -> anyhow::Result<()> {
    let dir = &args.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(&dir.join("report.json"), report.to_json())?;
    write_file(&dir.join("report.csv"), report.to_csv())?;
    if !args.no_charts {
        write_file(&dir.join("bars.svg"), chart::bars_svg(report))?;
        write_file(&dir.join("pie.svg"), chart::pie_svg(report))?;
    }
    print_table(report);
    Ok(())
}

fn print_table(report: &SimReport) {
    let labels = &report.meta.bins.labels;
    print!("{:<18}", "share %");
    for l in labels {
        print!("{l:>9}");
    }
    println!("{:>10}", "positives");
    for a in &report.assigners {
        print!("{:<18}", a.assigner.name());
        for b in &a.bins {
            print!("{:>9.2}", b.share_pct);
        }
        println!("{:>10}", a.total_positives);
    }
}

fn simulate(mut cfg: RunConfig, a: SimulateArgs) -> anyhow::Result<()> {
    let sim = &mut cfg.sim;
    if let Some(v) = a.seed {
        sim.seed = v;
    }
    if let Some(v) = a.trials {
        sim.trials = v;
    }
    if let Some(v) = a.n_gts {
        sim.n_gts = v;
    }
    if let Some(v) = a.image_size {
        sim.image_h = v;
        sim.image_w = v;
    }
    if let Some(v) = a.max_dim {
        sim.max_dim = v;
    }
    usage(cfg.sim.validate())?;
    let strategies = strategies(&mut cfg, &a.report)?;
    let report = run_simulation(&cfg.sim, &strategies)?;
    write_report(&report, &a.report)
}

fn stats(mut cfg: RunConfig, a: StatsArgs) -> anyhow::Result<()> {
    let strategies = strategies(&mut cfg, &a.report)?;
    let layout = match (a.priors, cfg.pyramid.clone()) {
        (Some(PriorChoice::Native), _) | (None, None) => PriorLayout::Native,
        (Some(PriorChoice::OneStage), _) => PriorLayout::Scheme(PriorScheme::OneStage),
        (Some(PriorChoice::TwoStage), _) => PriorLayout::Scheme(PriorScheme::TwoStage),
        (None, Some(levels)) => PriorLayout::Custom(levels),
    };
    let ds = load_coco(&a.annotations)?;
    let report = dataset_assignment_stats(&ds, &layout, &strategies)?;
    write_report(&report, &a.report)
}

fn score(mut cfg: RunConfig, a: ScoreArgs) -> anyhow::Result<()> {
    if let Some(l) = lambda3(&a.lambda) {
        cfg.mcla.lambda = l;
    }
    if let Some(c) = a.c_poc {
        cfg.mcla.c_poc = c;
    }
    if let Some(c) = a.c_scc {
        cfg.mcla.c_scc = c;
    }
    usage(cfg.mcla.validate())?;
    let gts = read_boxes(&a.gts)?;
    let proposals = read_nonempty(&a.proposals, "proposal")?;
    let m = criterion_matrix(&gts, &proposals, cfg.mcla, a.criterion)?;
    write_file(&a.out, m.to_csv())
}

fn purify(mut cfg: RunConfig, a: PurifyArgs) -> anyhow::Result<()> {
    if let Some(v) = a.relay {
        cfg.hfp.relay = v;
    }
    if let Some(v) = a.mu {
        cfg.hfp.mu = v;
    }
    if let Some(v) = a.omega {
        cfg.hfp.omega = v;
    }
    usage(cfg.hfp.validate())?;
    usage(cfg.hfp.strength(a.level))?;
    let x = ftm::read(&a.input)?;
    let (h, w, _) = x.shape();
    let y = hfp_purify(&x, a.level, &cfg.hfp)?;
    ftm::write(&a.out, &y)?;
    if let Some(path) = &a.emit_mask {
        let mask = build_hfp_mask(h, w, a.level, &cfg.hfp)?;
        ftm::write(path, &ftm::mask_tensor(&mask))?;
    }
    Ok(())
}

fn fdsplit(cfg: RunConfig, a: FdsplitArgs) -> anyhow::Result<()> {
    let fd = FdConfig {
        d_l: a.d_l.unwrap_or(cfg.fd.d_l),
        d_h: a.d_h.unwrap_or(cfg.fd.d_h),
    };
    for (name, d) in [("--d-l", fd.d_l), ("--d-h", fd.d_h)] {
        if !(0.0..=1.0).contains(&d) {
            return Err(UsageError(format!("{name} must lie in [0, 1], got {d}")).into());
        }
    }
    let x = ftm::read(&a.input)?;
    let (low, high) = fd_split(&x, fd.d_l, fd.d_h)?;
    let stem = a
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "roi".into());
    let dir: PathBuf = match a.out_dir {
        Some(d) => d,
        None => a.input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    ftm::write(dir.join(format!("{stem}.low.ftm")), &low)?;
    ftm::write(dir.join(format!("{stem}.high.ftm")), &high)?;
    Ok(())
}
