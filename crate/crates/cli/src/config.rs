//! Command-line flags and their resolution into an effective run configuration.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use ringcpd::default_k;
use ringcpd::rank_graph::{GraphKind, Metric};
use ringcpd::scan::{default_interval_window, default_single_window, Alternative, StatisticKind};

use crate::error::{CliError, CliResult};
use crate::ingest::InputFormat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    /// `euclidean` for vectors, `frobenius` for matrices, `precomputed` for distances.
    Auto,
    Euclidean,
    L1,
    Frobenius,
    Precomputed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphArg {
    Knn,
    Mst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Weighting {
    /// Graph-induced ranks.
    Rank,
    /// Gaussian kernel on the graph edges.
    Kernel,
    /// Negative distance on the graph edges.
    Negdist,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    T,
    M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AltArg {
    Single,
    Interval,
    /// Sequential segmentation with the `--segment-base` detector.
    Segment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Single,
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PValueMethod {
    Analytic,
    Permutation,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "ringcpd", version, about = "Graph-induced rank change-point detection")]
pub struct Args {
    /// Input file.
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = InputFormat::CsvVectors)]
    pub format: InputFormat,

    #[arg(long, value_enum, default_value_t = MetricArg::Auto)]
    pub metric: MetricArg,

    #[arg(long, value_enum, default_value_t = GraphArg::Knn)]
    pub graph: GraphArg,

    /// Graph depth, or `auto` for [n^0.65].
    #[arg(long, default_value = "auto")]
    pub k: String,

    #[arg(long, value_enum, default_value_t = Weighting::Rank)]
    pub weighting: Weighting,

    /// Kernel bandwidth, or `median` for the median pairwise distance.
    #[arg(long)]
    pub bandwidth: Option<String>,

    #[arg(long, value_enum, default_value_t = StatArg::M)]
    pub stat: StatArg,

    #[arg(long, value_enum, default_value_t = AltArg::Single)]
    pub alternative: AltArg,

    /// Detector applied to each segment when `--alternative segment`.
    #[arg(long, value_enum, default_value_t = BaseArg::Single)]
    pub segment_base: BaseArg,

    /// Smallest candidate change-point (single).
    #[arg(long)]
    pub n0: Option<usize>,
    /// Largest candidate change-point (single).
    #[arg(long)]
    pub n1: Option<usize>,
    /// Shortest candidate interval (interval).
    #[arg(long)]
    pub l0: Option<usize>,
    /// Longest candidate interval (interval).
    #[arg(long)]
    pub l1: Option<usize>,

    /// Defaults to analytic when n >= 300, permutation otherwise.
    #[arg(long, value_enum)]
    pub pvalue: Option<PValueMethod>,

    #[arg(long, default_value_t = 1000)]
    pub perms: usize,

    /// Skewness correction of the analytic p-value; defaults to on for M.
    #[arg(long, value_enum)]
    pub skewness: Option<Toggle>,

    /// Monte-Carlo draws used to estimate the skewness.
    #[arg(long, default_value_t = 10_000)]
    pub skew_draws: usize,

    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Segments shorter than this are not tested.
    #[arg(long, default_value_t = 40)]
    pub min_segment: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Report destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Omit the trace block.
    #[arg(long)]
    pub no_trace: bool,
}

/// Everything a run uses, with defaults resolved for a sequence of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub n: usize,
    pub metric: Metric,
    pub graph: GraphKind,
    /// `None` means `[m^0.65]` for each (sub)sequence of length `m`.
    pub k: Option<usize>,
    pub weighting: Weighting,
    /// `None` means the median pairwise distance (kernel weighting only).
    pub bandwidth: Option<f64>,
    pub kind: StatisticKind,
    pub alternative: AltArg,
    pub base: Alternative,
    /// Scan window; `None` in segment mode, where each segment uses its own default.
    pub window: Option<(usize, usize)>,
    pub pvalue: PValueMethod,
    pub perms: usize,
    pub skewness: bool,
    pub skew_draws: usize,
    pub alpha: f64,
    pub min_segment: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub trace: bool,
}

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

impl RunConfig {
    /// Checks flag consistency once the input length `n` is known.
    pub fn resolve(args: &Args, n: usize) -> CliResult<Self> {
        let metric = match (args.format, args.metric) {
            (InputFormat::DistanceCsv, MetricArg::Auto | MetricArg::Precomputed) => Metric::Precomputed,
            (InputFormat::DistanceCsv, m) => {
                return config_err(format!("--metric {m:?} conflicts with --format distance_csv"))
            }
            (_, MetricArg::Precomputed) => return config_err("--metric precomputed needs --format distance_csv"),
            (InputFormat::TensorStack, MetricArg::Auto) => Metric::Frobenius,
            (_, MetricArg::Auto | MetricArg::Euclidean) => Metric::Euclidean,
            (_, MetricArg::L1) => Metric::L1,
            (_, MetricArg::Frobenius) => Metric::Frobenius,
        };

        let k = match args.k.trim() {
            "auto" => None,
            s => match s.parse::<usize>() {
                Ok(k) if k >= 1 => Some(k),
                _ => return config_err(format!("--k must be `auto` or a positive integer, got {s:?}")),
            },
        };

        let bandwidth = match (args.weighting, args.bandwidth.as_deref().map(str::trim)) {
            (Weighting::Kernel, None | Some("median")) => None,
            (Weighting::Kernel, Some(s)) => match s.parse::<f64>() {
                Ok(b) if b > 0.0 && b.is_finite() => Some(b),
                _ => return config_err(format!("--bandwidth must be `median` or a positive number, got {s:?}")),
            },
            (_, Some(_)) => return config_err("--bandwidth only applies to --weighting kernel"),
            (_, None) => None,
        };

        let kind = match args.stat {
            StatArg::T => StatisticKind::T,
            StatArg::M => StatisticKind::M,
        };

        let base = match (args.alternative, args.segment_base) {
            (AltArg::Single, _) | (AltArg::Segment, BaseArg::Single) => Alternative::Single,
            (AltArg::Interval, _) | (AltArg::Segment, BaseArg::Interval) => Alternative::Interval,
        };

        let single_flags = args.n0.is_some() || args.n1.is_some();
        let interval_flags = args.l0.is_some() || args.l1.is_some();
        let window = match args.alternative {
            AltArg::Segment => {
                if single_flags || interval_flags {
                    return config_err("window overrides are not accepted with --alternative segment");
                }
                None
            }
            AltArg::Single => {
                if interval_flags {
                    return config_err("--l0/--l1 apply to --alternative interval");
                }
                let (lo, hi) = default_single_window(n);
                Some((args.n0.unwrap_or(lo), args.n1.unwrap_or(hi)))
            }
            AltArg::Interval => {
                if single_flags {
                    return config_err("--n0/--n1 apply to --alternative single");
                }
                let (lo, hi) = default_interval_window(n);
                Some((args.l0.unwrap_or(lo), args.l1.unwrap_or(hi)))
            }
        };
        if let Some((lo, hi)) = window {
            if lo < 1 || lo > hi || hi + 1 > n {
                return config_err(format!("scan window [{lo}, {hi}] is empty or outside 1..={}", n.saturating_sub(1)));
            }
        }

        let pvalue = args
            .pvalue
            .unwrap_or(if n >= 300 { PValueMethod::Analytic } else { PValueMethod::Permutation });
        let analytic = pvalue != PValueMethod::Permutation;
        if pvalue != PValueMethod::Analytic && args.perms == 0 {
            return config_err("--perms must be at least 1");
        }

        let skewness = match args.skewness {
            None => kind == StatisticKind::M && analytic,
            Some(Toggle::Off) => false,
            Some(Toggle::On) => {
                if kind != StatisticKind::M {
                    return config_err("--skewness on requires --stat m");
                }
                if !analytic {
                    return config_err("--skewness on requires an analytic p-value");
                }
                true
            }
        };
        if skewness && args.skew_draws == 0 {
            return config_err("--skew-draws must be at least 1");
        }

        if !(args.alpha > 0.0 && args.alpha < 1.0) {
            return config_err(format!("--alpha must lie in (0, 1), got {}", args.alpha));
        }
        if args.min_segment < 4 {
            return config_err("--min-segment must be at least 4");
        }

        Ok(RunConfig {
            input: args.input.clone(),
            format: args.format,
            n,
            metric,
            graph: match args.graph {
                GraphArg::Knn => GraphKind::Knn,
                GraphArg::Mst => GraphKind::Mst,
            },
            k,
            weighting: args.weighting,
            bandwidth,
            kind,
            alternative: args.alternative,
            base,
            window,
            pvalue,
            perms: args.perms,
            skewness,
            skew_draws: args.skew_draws,
            alpha: args.alpha,
            min_segment: args.min_segment,
            seed: args.seed,
            output: args.output.clone(),
            trace: !args.no_trace,
        })
    }

    pub fn analytic(&self) -> bool {
        self.pvalue != PValueMethod::Permutation
    }

    pub fn permutation(&self) -> bool {
        self.pvalue != PValueMethod::Analytic
    }

    pub fn k_for(&self, n: usize) -> usize {
        self.k.unwrap_or_else(|| default_k(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(extra: &[&str]) -> Args {
        let mut v = vec!["ringcpd", "--input", "x.csv"];
        v.extend_from_slice(extra);
        Args::try_parse_from(v).unwrap()
    }

    #[test]
    fn defaults_resolve() {
        let c = RunConfig::resolve(&args(&[]), 200).unwrap();
        assert_eq!(c.pvalue, PValueMethod::Permutation);
        assert!(!c.skewness);
        assert_eq!(c.window, Some((10, 190)));
        assert_eq!(c.k_for(200), 31);
        let c = RunConfig::resolve(&args(&[]), 300).unwrap();
        assert_eq!(c.pvalue, PValueMethod::Analytic);
        assert!(c.skewness);
        assert_eq!(c.kind, StatisticKind::M);
    }

    #[test]
    fn inconsistent_flags_are_config_errors() {
        for extra in [
            &["--stat", "t", "--skewness", "on", "--pvalue", "analytic"][..],
            &["--skewness", "on", "--pvalue", "permutation"],
            &["--alpha", "1.5"],
            &["--bandwidth", "2"],
            &["--alternative", "interval", "--n0", "3"],
            &["--alternative", "segment", "--l0", "6"],
            &["--n0", "50", "--n1", "20"],
            &["--k", "zero"],
            &["--format", "distance_csv", "--metric", "l1"],
        ] {
            let err = RunConfig::resolve(&args(extra), 100).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{extra:?}");
        }
    }

    #[test]
    fn tensor_defaults_to_frobenius() {
        let c = RunConfig::resolve(&args(&["--format", "tensor_stack"]), 50).unwrap();
        assert_eq!(c.metric, Metric::Frobenius);
    }
}
