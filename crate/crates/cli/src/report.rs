//! Text report: `key: value` lines followed by an optional CSV trace block.

use std::fmt::Write;

use ringcpd::permutation::empirical_critical_value;
use ringcpd::pipeline::Detection;
use ringcpd::scan::{Alternative, ChangeLocation, TraceEntry};

use crate::config::{AltArg, PValueMethod, RunConfig, Weighting};
use crate::segment::{SegmentOutcome, SegmentReport};

pub const REPORT_VERSION: u32 = 1;

/// Facts about the data that the configuration alone does not carry.
#[derive(Clone, Debug, PartialEq)]
pub struct InputSummary {
    /// Entries per observation; `None` for a distance matrix.
    pub item_size: Option<usize>,
    /// Kernel bandwidth actually used.
    pub bandwidth: Option<f64>,
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

struct Lines(String);

impl Lines {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.0, "{key}: {value}").unwrap();
    }
}

fn alternative_name(a: Alternative) -> &'static str {
    match a {
        Alternative::Single => "single",
        Alternative::Interval => "interval",
    }
}

fn echo_config(out: &mut Lines, cfg: &RunConfig, input: &InputSummary) {
    out.kv("report_version", REPORT_VERSION);
    out.kv("input", cfg.input.display());
    out.kv("format", cfg.format.name());
    out.kv("n", cfg.n);
    out.kv("item_size", opt(input.item_size));
    out.kv("metric", cfg.metric.name());
    out.kv("graph", match cfg.graph {
        ringcpd::rank_graph::GraphKind::Knn => "knn",
        ringcpd::rank_graph::GraphKind::Mst => "mst",
    });
    out.kv("k_mode", if cfg.k.is_some() { "fixed" } else { "auto" });
    out.kv("weighting", match cfg.weighting {
        Weighting::Rank => "rank",
        Weighting::Kernel => "kernel",
        Weighting::Negdist => "negdist",
    });
    out.kv("bandwidth", opt(input.bandwidth));
    out.kv("stat", cfg.kind.name().to_lowercase());
    out.kv("alternative", match cfg.alternative {
        AltArg::Single => "single",
        AltArg::Interval => "interval",
        AltArg::Segment => "segment",
    });
    out.kv("segment_base", if cfg.alternative == AltArg::Segment { alternative_name(cfg.base) } else { "-" });
    out.kv("pvalue_method", match cfg.pvalue {
        PValueMethod::Analytic => "analytic",
        PValueMethod::Permutation => "permutation",
        PValueMethod::Both => "both",
    });
    out.kv("perms", if cfg.permutation() { cfg.perms.to_string() } else { "-".into() });
    out.kv("skewness", if cfg.skewness { "on" } else { "off" });
    out.kv("skew_draws", if cfg.skewness { cfg.skew_draws.to_string() } else { "-".into() });
    out.kv("alpha", cfg.alpha);
    out.kv("min_segment", cfg.min_segment);
    out.kv("seed", cfg.seed);
}

fn location_lines(out: &mut Lines, prefix: &str, loc: ChangeLocation, offset: usize) {
    match loc {
        ChangeLocation::Single(t) => out.kv(&format!("{prefix}tau_hat"), offset + t),
        ChangeLocation::Interval(a, b) => {
            out.kv(&format!("{prefix}tau1_hat"), offset + a);
            out.kv(&format!("{prefix}tau2_hat"), offset + b);
        }
    }
}

fn detection_lines(out: &mut Lines, prefix: &str, det: &Detection, offset: usize, alpha: f64) {
    out.kv(&format!("{prefix}k"), det.k);
    out.kv(&format!("{prefix}window_lo"), det.spec.lo);
    out.kv(&format!("{prefix}window_hi"), det.spec.hi);
    out.kv(&format!("{prefix}statistic"), det.max_value);
    location_lines(out, prefix, det.location, offset);
    out.kv(&format!("{prefix}p_analytic"), opt(det.analytic_p));
    out.kv(&format!("{prefix}p_permutation"), opt(det.permutation.as_ref().map(|p| p.p_value)));
    let crit = det
        .permutation
        .as_ref()
        .and_then(|p| empirical_critical_value(&p.null_draws, alpha).ok());
    out.kv(&format!("{prefix}critical_permutation"), opt(crit));
    let p = det.p_value();
    out.kv(&format!("{prefix}p_value"), opt(p));
    out.kv(&format!("{prefix}reject"), p.is_some_and(|p| p <= alpha));
    out.kv(&format!("{prefix}diagnostics"), opt(det.diagnostics.as_ref().map(|d| d.summary())));
}

fn trace_block(out: &mut Lines, trace: &[TraceEntry]) {
    out.kv("trace_rows", trace.len());
    out.0.push_str("trace_begin\n");
    out.0.push_str("t1,t2,value\n");
    for e in trace {
        writeln!(out.0, "{},{},{}", e.t1, e.t2, opt(e.value)).unwrap();
    }
    out.0.push_str("trace_end\n");
}

pub fn render_detection(cfg: &RunConfig, input: &InputSummary, det: &Detection) -> String {
    let mut out = Lines(String::new());
    echo_config(&mut out, cfg, input);
    detection_lines(&mut out, "", det, 0, cfg.alpha);
    if cfg.trace {
        trace_block(&mut out, &det.trace);
    }
    out.0
}

pub fn render_segments(cfg: &RunConfig, input: &InputSummary, rep: &SegmentReport) -> String {
    let mut out = Lines(String::new());
    echo_config(&mut out, cfg, input);
    out.kv("segments", rep.nodes.len());
    let cps = rep.change_points();
    out.kv("change_points", if cps.is_empty() {
        "-".to_string()
    } else {
        cps.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    });
    for s in &rep.nodes {
        let p = format!("segment.{}.", s.id);
        out.kv(&format!("{p}parent"), opt(s.parent));
        out.kv(&format!("{p}depth"), s.depth);
        out.kv(&format!("{p}start"), s.start);
        out.kv(&format!("{p}end"), s.end);
        let children = s.children.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        out.kv(&format!("{p}children"), if children.is_empty() { "-".into() } else { children });
        match &s.outcome {
            SegmentOutcome::Short => out.kv(&format!("{p}status"), "short"),
            SegmentOutcome::Failed(msg) => {
                out.kv(&format!("{p}status"), "failed");
                out.kv(&format!("{p}error"), msg);
            }
            SegmentOutcome::Tested { detection, split, .. } => {
                out.kv(&format!("{p}status"), if *split { "split" } else { "leaf" });
                detection_lines(&mut out, &p, detection, s.start, cfg.alpha);
            }
        }
    }
    if cfg.trace {
        let root = rep.nodes.first().and_then(|r| match &r.outcome {
            SegmentOutcome::Tested { detection, .. } => Some(&detection.trace),
            _ => None,
        });
        trace_block(&mut out, root.map_or(&[][..], |t| &t[..]));
    }
    out.0
}
