use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::erf::erf;

use super::quadrature::GaussLegendre;
use super::skewness::{Component, SkewnessTable};
use crate::scan::{Alternative, ScanSpec, StatisticKind};
use crate::{Error, Result};

/// Upper end of the bracket searched by [`critical_value`].
const B_MAX: f64 = 300.0;

/// Quadrature settings: Gauss–Legendre node counts for `ω` and `x`, and the
/// absolute tolerance a node-doubling must meet to certify a tail value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub omega_nodes: usize,
    pub x_nodes: usize,
    pub tolerance: f64,
    pub max_refinements: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { omega_nodes: 64, x_nodes: 256, tolerance: 1e-6, max_refinements: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailConfig {
    pub n: usize,
    pub kind: StatisticKind,
    pub alternative: Alternative,
    /// `n0` or `l0`.
    pub lo: usize,
    /// `n1` or `l1`.
    pub hi: usize,
    /// Apply the skewness correction (M statistic only).
    pub skewness: bool,
    pub quadrature: Quadrature,
}

impl TailConfig {
    pub fn new(n: usize, kind: StatisticKind, alternative: Alternative, lo: usize, hi: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::TooFewObservations { n, min: 4 });
        }
        if lo == 0 || lo > hi || hi >= n {
            return Err(Error::WindowEmpty { lo, hi, n });
        }
        // h_w has poles at x = 1/n and x = 1 - 1/n.
        if lo < 2 {
            return Err(Error::ArgumentAtPole { n, x: lo as f64 / n as f64 });
        }
        if hi > n - 2 {
            return Err(Error::ArgumentAtPole { n, x: hi as f64 / n as f64 });
        }
        Ok(TailConfig { n, kind, alternative, lo, hi, skewness: false, quadrature: Quadrature::default() })
    }

    pub fn from_spec(n: usize, spec: ScanSpec) -> Result<Self> {
        TailConfig::new(n, spec.kind, spec.alternative, spec.lo, spec.hi)
    }

    pub fn with_skewness(mut self, on: bool) -> Self {
        self.skewness = on;
        self
    }

    pub fn with_quadrature(mut self, q: Quadrature) -> Result<Self> {
        if q.omega_nodes == 0 || q.x_nodes == 0 || !(q.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!("invalid quadrature settings {q:?}")));
        }
        self.quadrature = q;
        Ok(self)
    }

    fn x_range(&self) -> (f64, f64) {
        (self.lo as f64 / self.n as f64, self.hi as f64 / self.n as f64)
    }
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `ν(x) = (2/x)(Φ(x/2) - 1/2) / ((x/2)Φ(x/2) + φ(x/2))`, with `ν(0) = 1`.
pub(crate) fn nu(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let y = 0.5 * x;
    let half_erf = 0.5 * erf(y / SQRT_2);
    (2.0 / x) * half_erf / (y * (0.5 + half_erf) + std_normal_pdf(y))
}

/// Siegmund's overshoot correction `ν(x)`.
pub fn nu_approx(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeArgument(x));
    }
    Ok(nu(x))
}

fn h_unchecked(n: f64, x: f64) -> (f64, f64) {
    let hw = (n - 1.0) * (2.0 * n * x * x - 2.0 * n * x + 1.0)
        / (2.0 * x * (1.0 - x) * (n * x - 1.0) * (n * x - n + 1.0));
    (hw, 1.0 / (2.0 * x * (1.0 - x)))
}

/// Local covariance rates `(h_w(n, x), h_diff(n, x))` for `x ∈ (1/n, 1 - 1/n)`.
pub fn h_functions(n: usize, x: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    if !(nf * x - 1.0 > 1e-12 && nf - 1.0 - nf * x > 1e-12) {
        return Err(Error::ArgumentAtPole { n, x });
    }
    Ok(h_unchecked(nf, x))
}

fn rule(m: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(m).or_insert_with(|| Arc::new(GaussLegendre::new(m))).clone()
}

/// Skewness factor `K_j` at threshold `b` for third moment `γ`. Falls back to 1
/// where `θ̂` is undefined or `γ` is negligible.
pub(crate) fn skew_factor(gamma: f64, b: f64) -> f64 {
    let disc = 1.0 + 2.0 * gamma * b;
    if !gamma.is_finite() || gamma.abs() < 1e-12 || disc < 0.0 {
        return 1.0;
    }
    let theta = (-1.0 + disc.sqrt()) / gamma;
    let denom = 1.0 + gamma * theta;
    if denom <= 0.0 {
        return 1.0;
    }
    let k = (0.5 * (b - theta).powi(2) + gamma * theta.powi(3) / 6.0).exp() / denom.sqrt();
    if k.is_finite() {
        k
    } else {
        1.0
    }
}

/// Raw (unclamped) T tail with the given rules.
fn tail_t_raw(cfg: &TailConfig, b: f64, omega_nodes: usize, x_nodes: usize) -> f64 {
    let nf = cfg.n as f64;
    let (xa, xb) = cfg.x_range();
    let go = rule(omega_nodes);
    let gx = rule(x_nodes);
    let trig: Vec<(f64, f64, f64)> = go
        .mapped(0.0, 2.0 * PI)
        .map(|(w, ww)| (w.sin().powi(2), w.cos().powi(2), ww))
        .collect();
    let interval = cfg.alternative == Alternative::Interval;
    let mut total = 0.0;
    for (x, wx) in gx.mapped(xa, xb) {
        let (hw, hd) = h_unchecked(nf, x);
        let mut inner = 0.0;
        for &(s2, c2, ww) in &trig {
            let u = hw * s2 + hd * c2;
            let v = nu((2.0 * b * u / nf).sqrt());
            inner += ww * if interval { u * u * v * v } else { u * v };
        }
        total += wx * if interval { inner * (1.0 - x) } else { inner };
    }
    let pre = if interval { b * b } else { b };
    pre * (-0.5 * b).exp() / (2.0 * PI) * total
}

/// Raw one-sided tail of `max Z_j` with the given `x` rule.
fn tail_component_raw(
    cfg: &TailConfig,
    b: f64,
    comp: Component,
    skew: Option<&SkewnessTable>,
    x_nodes: usize,
) -> f64 {
    let nf = cfg.n as f64;
    let (xa, xb) = cfg.x_range();
    let interval = cfg.alternative == Alternative::Interval;
    let integrand = |x: f64| {
        let (hw, hd) = h_unchecked(nf, x);
        let h = match comp {
            Component::W => hw,
            Component::Diff => hd,
        };
        let hv = h * nu(b * (2.0 * h / nf).sqrt());
        let k = skew.map_or(1.0, |s| skew_factor(s.gamma_at(comp, nf * x), b));
        k * if interval { hv * hv * (1.0 - x) } else { hv }
    };
    let total: f64 = match skew {
        None => rule(x_nodes).integrate(xa, xb, integrand),
        // The interpolated γ has kinks at integer lengths: integrate piece by piece.
        Some(_) => {
            let per_piece = rule((x_nodes / 64).max(4));
            (cfg.lo..cfg.hi)
                .map(|t| per_piece.integrate(t as f64 / nf, (t + 1) as f64 / nf, integrand))
                .sum()
        }
    };
    let pre = if interval { b.powi(3) } else { b };
    pre * std_normal_pdf(b) * total
}

fn clamp01(p: f64) -> f64 {
    if p.is_nan() {
        1.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

fn tail_m_raw(cfg: &TailConfig, b: f64, skew: Option<&SkewnessTable>, x_nodes: usize) -> f64 {
    let pw = clamp01(tail_component_raw(cfg, b, Component::W, skew, x_nodes));
    let pd = clamp01(2.0 * tail_component_raw(cfg, b, Component::Diff, skew, x_nodes));
    1.0 - (1.0 - pw) * (1.0 - pd)
}

/// Tail evaluated at refinement level `level` (node counts doubled `level` times).
fn tail_at_level(cfg: &TailConfig, b: f64, skew: Option<&SkewnessTable>, level: u32) -> f64 {
    let q = cfg.quadrature;
    let (om, xn) = (q.omega_nodes << level, q.x_nodes << level);
    match cfg.kind {
        StatisticKind::T => clamp01(tail_t_raw(cfg, b, om, xn)),
        StatisticKind::M => clamp01(tail_m_raw(cfg, b, skew, xn)),
    }
}

/// Relative tolerance for skewness-corrected tails. `K_j` has an integrable
/// singularity where `1 + 2γb → 0⁺`, which caps the attainable accuracy.
const SKEW_RELATIVE_TOLERANCE: f64 = 1e-4;

/// Tail value certified by successive node doubling.
fn certified_tail(cfg: &TailConfig, b: f64, skew: Option<&SkewnessTable>) -> Result<f64> {
    let q = cfg.quadrature;
    let mut prev = tail_at_level(cfg, b, skew, 0);
    let mut change = f64::INFINITY;
    for level in 1..=q.max_refinements {
        let cur = tail_at_level(cfg, b, skew, level);
        change = (cur - prev).abs();
        let tol = match skew {
            Some(_) => q.tolerance.max(SKEW_RELATIVE_TOLERANCE * cur),
            None => q.tolerance,
        };
        if change <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure { change })
}

fn check_threshold(b: f64) -> Result<()> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold must be positive and finite, got {b}")));
    }
    Ok(())
}

fn skew_for<'a>(cfg: &TailConfig, skew: Option<&'a SkewnessTable>) -> Result<Option<&'a SkewnessTable>> {
    if !cfg.skewness || cfg.kind == StatisticKind::T {
        return Ok(None);
    }
    skew.map(Some).ok_or(Error::MissingSkewness)
}

/// `P(max T > b)` under the null.
pub fn tail_t(cfg: &TailConfig, b: f64) -> Result<f64> {
    if cfg.kind != StatisticKind::T {
        return Err(Error::InvalidParameter("tail_t needs a T configuration".into()));
    }
    check_threshold(b)?;
    certified_tail(cfg, b, None)
}

/// `P(max M > b)` under the null, optionally skewness-corrected.
pub fn tail_m(cfg: &TailConfig, b: f64, skew: Option<&SkewnessTable>) -> Result<f64> {
    if cfg.kind != StatisticKind::M {
        return Err(Error::InvalidParameter("tail_m needs an M configuration".into()));
    }
    check_threshold(b)?;
    certified_tail(cfg, b, skew_for(cfg, skew)?)
}

/// Tail for whichever statistic `cfg` describes.
pub fn tail_probability(cfg: &TailConfig, b: f64, skew: Option<&SkewnessTable>) -> Result<f64> {
    match cfg.kind {
        StatisticKind::T => tail_t(cfg, b),
        StatisticKind::M => tail_m(cfg, b, skew),
    }
}

/// Threshold where the (unclamped-shape) tail formula peaks. The formulas rise
/// from 0 at `b = 0` before decaying, and only the decaying branch is a tail.
fn tail_peak(cfg: &TailConfig, skew: Option<&SkewnessTable>) -> f64 {
    let q = cfg.quadrature;
    let raw = |b: f64| match cfg.kind {
        StatisticKind::T => tail_t_raw(cfg, b, q.omega_nodes, q.x_nodes),
        StatisticKind::M => {
            tail_component_raw(cfg, b, Component::W, skew, q.x_nodes)
                + 2.0 * tail_component_raw(cfg, b, Component::Diff, skew, q.x_nodes)
        }
    };
    let (mut a, mut c) = (1e-3, 40.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (c - g * (c - a), a + g * (c - a));
    let (mut f1, mut f2) = (raw(x1), raw(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (c - a);
            f2 = raw(x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - g * (c - a);
            f1 = raw(x1);
        }
    }
    0.5 * (a + c)
}

/// Threshold `b` with `tail(b) = alpha` on the decaying branch of the tail.
pub fn critical_value(cfg: &TailConfig, alpha: f64, skew: Option<&SkewnessTable>) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability(alpha));
    }
    let skew = skew_for(cfg, skew)?;
    let peak = tail_peak(cfg, skew);
    let bisect = |level: u32| -> Option<f64> {
        let f = |b: f64| tail_at_level(cfg, b, skew, level) - alpha;
        let (mut lo, mut hi) = (peak, B_MAX);
        if f(lo) < 0.0 || f(hi) > 0.0 {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-10 {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    };
    let b = bisect(0).ok_or(Error::BracketFailure { alpha })?;
    if (certified_tail(cfg, b, skew)? - alpha).abs() <= 1e-4 {
        return Ok(b);
    }
    // The base rule was not accurate enough near the root; redo on the finest rule.
    let b = bisect(cfg.quadrature.max_refinements).ok_or(Error::BracketFailure { alpha })?;
    Ok(b)
}

/// Analytic p-value of an observed scan maximum. Observations left of the
/// tail formula's peak get the (clamped) peak value, keeping the p-value
/// non-increasing in the statistic.
pub fn analytic_p_value(cfg: &TailConfig, observed: f64, skew: Option<&SkewnessTable>) -> Result<f64> {
    if !observed.is_finite() {
        return Err(Error::NonFiniteInput { what: "observed statistic".into() });
    }
    let skew_used = skew_for(cfg, skew)?;
    let b = observed.max(tail_peak(cfg, skew_used));
    tail_probability(cfg, b, skew)
}
