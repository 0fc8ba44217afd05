//! Library side of the `ringcpd` command-line tool: ingestion, flag
//! resolution, segmentation and report rendering.

pub mod config;
pub mod error;
pub mod ingest;
pub mod report;
pub mod segment;

use ringcpd::pipeline::{detect_distances, DetectorConfig};
use ringcpd::rank_graph::{compute_distances, median_heuristic, EdgeWeight};
use ringcpd::scan::ConditionStatus;

pub use config::{Args, RunConfig};
pub use error::{CliError, CliResult};

use config::{AltArg, Weighting};
use ingest::{ingest, Ingested};
use report::InputSummary;
use segment::{segment, segment_seed, SegmentOutcome};

/// Report text plus warnings meant for stderr.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub warnings: Vec<String>,
}

fn detector(cfg: &RunConfig, bandwidth: Option<f64>, seed: u64, trace: bool) -> DetectorConfig {
    DetectorConfig {
        metric: cfg.metric,
        graph: cfg.graph,
        k: cfg.k,
        weight: match cfg.weighting {
            Weighting::Rank => None,
            Weighting::Kernel => Some(EdgeWeight::GaussianKernel { sigma: bandwidth }),
            Weighting::Negdist => Some(EdgeWeight::NegDistance),
        },
        kind: cfg.kind,
        alternative: cfg.base,
        window: cfg.window,
        analytic: cfg.analytic(),
        skewness_draws: cfg.skewness.then_some(cfg.skew_draws),
        permutations: cfg.permutation().then_some(cfg.perms),
        seed,
        diagnostics: true,
        keep_trace: trace,
    }
}

fn high_conditions(prefix: &str, det: &ringcpd::pipeline::Detection, warnings: &mut Vec<String>) {
    if let Some(rep) = &det.diagnostics {
        for c in rep.checks.iter().filter(|c| c.status != ConditionStatus::Ok) {
            warnings.push(format!(
                "warning: {prefix}condition c{} ratio {:.4} is {}; the analytic approximation may be unreliable",
                c.index,
                c.ratio,
                c.status.name()
            ));
        }
    }
}

/// Runs one invocation and returns the rendered report.
pub fn run(args: &Args) -> CliResult<Outcome> {
    let data = ingest(&args.input, args.format)?;
    let cfg = RunConfig::resolve(args, data.len())?;
    let (d, item_size) = match data {
        Ingested::Observations(seq) => {
            let size = seq.item_size();
            (compute_distances(&seq, cfg.metric)?, Some(size))
        }
        Ingested::Distances(d) => (d, None),
    };
    let bandwidth = match (cfg.weighting, cfg.bandwidth) {
        (Weighting::Kernel, None) => Some(median_heuristic(&d)),
        (_, b) => b,
    };
    let input = InputSummary { item_size, bandwidth };
    let mut warnings = Vec::new();

    let report = if cfg.alternative == AltArg::Segment {
        let rep = segment(&d, cfg.alpha, cfg.min_segment, |id, _| {
            detector(&cfg, bandwidth, segment_seed(cfg.seed, id), cfg.trace && id == 0)
        })?;
        for s in &rep.nodes {
            match &s.outcome {
                SegmentOutcome::Failed(msg) => {
                    warnings.push(format!("warning: segment {} [{}, {}) not tested: {msg}", s.id, s.start, s.end))
                }
                SegmentOutcome::Tested { detection, .. } if s.id == 0 => {
                    high_conditions("", detection, &mut warnings)
                }
                _ => {}
            }
        }
        report::render_segments(&cfg, &input, &rep)
    } else {
        let det = detect_distances(&d, &detector(&cfg, bandwidth, cfg.seed, cfg.trace))?;
        high_conditions("", &det, &mut warnings);
        report::render_detection(&cfg, &input, &det)
    };
    Ok(Outcome { report, warnings })
}
