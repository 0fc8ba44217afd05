//! Simulation studies written as CSV tables.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ringcpd::scan::StatisticKind;
use ringcpd::simulate::{
    run_convergence_study, run_critical_value_study, run_power_study, AltKind, ConvergenceConfig,
    ConvergenceSetting, CriticalValueConfig, NullSetting, PowerConfig, PowerSetting,
};

#[derive(Parser)]
#[command(name = "ringcpd-sim", version, about = "Simulation studies for the ringcpd detectors")]
struct Cli {
    /// CSV destination; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    study: Study,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stat {
    T,
    M,
}

#[derive(Clone, Copy, ValueEnum)]
enum NullArg {
    I,
    Ii,
    Iii,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "UPPER")]
enum PowerArg {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
}

#[derive(Clone, Copy, ValueEnum)]
enum AltArg {
    A,
    B,
    C,
    D,
    E,
}

#[derive(Subcommand)]
enum Study {
    /// Analytic and permutation critical values under the null.
    Critical {
        #[arg(long, value_enum, default_value_t = NullArg::I)]
        setting: NullArg,
        #[arg(long, default_value_t = 100)]
        d: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Stat::M)]
        stat: Stat,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![100, 75, 50, 25])]
        n0: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Permutations for the empirical column (0 skips it).
        #[arg(long, default_value_t = 0)]
        perms: usize,
        /// Monte-Carlo draws for the skewness-corrected column (M only).
        #[arg(long)]
        skew_draws: Option<usize>,
    },
    /// Rejection rate and location accuracy of the permutation test.
    Power {
        #[arg(long, value_enum, default_value_t = PowerArg::I)]
        setting: PowerArg,
        #[arg(long, value_enum, default_value_t = AltArg::A)]
        alt: AltArg,
        #[arg(long, default_value_t = 200)]
        d: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        #[arg(long, default_value_t = 1000)]
        perms: usize,
        #[arg(long, value_enum, default_value_t = Stat::M)]
        stat: Stat,
        /// Simulate the null instead (no change).
        #[arg(long)]
        null: bool,
    },
    /// Scaled scan curves `T(t)/n` and `M(t)/sqrt(n)`.
    Convergence {
        #[arg(long, value_enum, default_value_t = NullArg::Iii)]
        setting: NullArg,
        #[arg(long, default_value_t = 500)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![200, 800, 1600])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
    },
}

fn kind(s: Stat) -> StatisticKind {
    match s {
        Stat::T => StatisticKind::T,
        Stat::M => StatisticKind::M,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(out);
    match &cli.study {
        &Study::Critical { setting, d, k, stat, n, ref n0, alpha, perms, skew_draws } => {
            let setting = match setting {
                NullArg::I => NullSetting::Gaussian,
                NullArg::Ii => NullSetting::StudentT5,
                NullArg::Iii => NullSetting::LogNormal,
            };
            let mut cfg = CriticalValueConfig::new(setting, d, k, kind(stat));
            cfg.n = n;
            cfg.n0s = n0.clone();
            cfg.alpha = alpha;
            cfg.permutations = perms;
            cfg.skewness_draws = skew_draws;
            cfg.seed = cli.seed;
            w.write_record(["setting", "d", "k", "n0", "stat", "a1", "a2", "permutation"])?;
            for r in run_critical_value_study(&cfg)? {
                w.write_record([
                    r.setting.name().to_string(),
                    r.d.to_string(),
                    r.k.to_string(),
                    r.n0.to_string(),
                    r.kind.name().to_string(),
                    r.a1.to_string(),
                    opt(r.a2),
                    opt(r.permutation),
                ])?;
            }
        }
        &Study::Power { setting, alt, d, n, replicates, perms, stat, null } => {
            let setting = match setting {
                PowerArg::I => PowerSetting::I,
                PowerArg::Ii => PowerSetting::II,
                PowerArg::Iii => PowerSetting::III,
                PowerArg::Iv => PowerSetting::IV,
                PowerArg::V => PowerSetting::V,
                PowerArg::Vi => PowerSetting::VI,
            };
            let alt = match alt {
                AltArg::A => AltKind::Location,
                AltArg::B => AltKind::SimpleScale,
                AltArg::C => AltKind::ComplexScale,
                AltArg::D => AltKind::LocationSimpleScale,
                AltArg::E => AltKind::LocationComplexScale,
            };
            let (pre, post) = setting.pair(alt, d);
            let mut cfg = PowerConfig::new(pre, post);
            cfg.n = n;
            cfg.tau = if null { n } else { ringcpd::round_nearest(n as f64 / 3.0) as usize };
            cfg.margin = ringcpd::round_nearest(0.05 * n as f64) as usize;
            cfg.replicates = replicates;
            cfg.detector.permutations = Some(perms);
            cfg.detector.kind = kind(stat);
            cfg.seed = cli.seed;
            let res = run_power_study(&cfg)?;
            w.write_record(["setting", "alt", "d", "n", "replicates", "rejections", "accurate", "power", "accuracy"])?;
            w.write_record([
                setting.name().to_string(),
                alt.name().to_string(),
                d.to_string(),
                n.to_string(),
                res.replicates.to_string(),
                res.rejections.to_string(),
                res.accurate.to_string(),
                res.power().to_string(),
                res.accuracy().to_string(),
            ])?;
        }
        &Study::Convergence { setting, d, ref n, runs, k } => {
            let setting = match setting {
                NullArg::I => ConvergenceSetting::Gaussian,
                NullArg::Ii => ConvergenceSetting::StudentT3,
                NullArg::Iii => ConvergenceSetting::Cauchy,
            };
            let mut cfg = ConvergenceConfig::new(setting);
            cfg.d = d;
            cfg.ns = n.clone();
            cfg.runs = runs;
            cfg.k = k;
            cfg.seed = cli.seed;
            w.write_record(["n", "run", "delta", "t_scaled", "m_scaled", "tau_hat_t", "tau_hat_m"])?;
            for c in run_convergence_study(&cfg)? {
                for i in 0..c.delta.len() {
                    w.write_record([
                        c.n.to_string(),
                        c.run.to_string(),
                        c.delta[i].to_string(),
                        c.t_scaled[i].to_string(),
                        c.m_scaled[i].to_string(),
                        c.tau_hat_t.to_string(),
                        c.tau_hat_m.to_string(),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.output {
        Some(path) => File::create(path)
            .map_err(|e| e.into())
            .and_then(|mut f| run(&cli, &mut f)),
        None => run(&cli, &mut io::stdout().lock()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
