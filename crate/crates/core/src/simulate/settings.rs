//! Distribution settings used by the studies.

use super::sampler::{CovarianceSpec, Family, SamplerSpec};

/// Null distributions for the critical-value comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullSetting {
    /// `N_d(0, Σ(0.6))`.
    Gaussian,
    /// `t_5(0, Σ(0.5))`.
    StudentT5,
    /// `exp(N_d(0, Σ(0.4)))`.
    LogNormal,
}

impl NullSetting {
    pub fn name(&self) -> &'static str {
        match self {
            NullSetting::Gaussian => "i",
            NullSetting::StudentT5 => "ii",
            NullSetting::LogNormal => "iii",
        }
    }

    pub fn sampler(&self, d: usize) -> SamplerSpec {
        match self {
            NullSetting::Gaussian => SamplerSpec::shifted(Family::Gaussian, d, 0.0, CovarianceSpec::Ar1(0.6)),
            NullSetting::StudentT5 => {
                SamplerSpec::shifted(Family::StudentT { df: 5.0 }, d, 0.0, CovarianceSpec::Ar1(0.5))
            }
            NullSetting::LogNormal => SamplerSpec::shifted(Family::LogNormal, d, 0.0, CovarianceSpec::Ar1(0.4)),
        }
    }
}

/// Families I–VI of the power comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerSetting {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

/// Alternatives (a)–(e).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AltKind {
    Location,
    SimpleScale,
    ComplexScale,
    LocationSimpleScale,
    LocationComplexScale,
}

impl PowerSetting {
    pub fn name(&self) -> &'static str {
        match self {
            PowerSetting::I => "I",
            PowerSetting::II => "II",
            PowerSetting::III => "III",
            PowerSetting::IV => "IV",
            PowerSetting::V => "V",
            PowerSetting::VI => "VI",
        }
    }

    pub fn family(&self) -> Family {
        match self {
            PowerSetting::I => Family::Gaussian,
            PowerSetting::II => Family::StudentT { df: 5.0 },
            PowerSetting::III => Family::Cauchy,
            PowerSetting::IV => Family::ChisqShifted { df: 5.0 },
            PowerSetting::V => Family::GaussianMixture,
            PowerSetting::VI => Family::GaussianWithTOutliers { contamination: 0.1, df: 7.0 },
        }
    }

    fn sigma0(&self) -> CovarianceSpec {
        match self {
            PowerSetting::I | PowerSetting::II => CovarianceSpec::Ar1(0.6),
            PowerSetting::III => CovarianceSpec::Ar1(0.4),
            PowerSetting::IV => CovarianceSpec::Block { a: 0.0, b: 0.5 },
            PowerSetting::V => CovarianceSpec::Identity,
            PowerSetting::VI => CovarianceSpec::Ar1(0.5),
        }
    }

    /// `(δ, scale change, Σ₁)` for alternative `alt` in dimension `d`.
    /// The scale change is `(1 + σ)²`; `Σ₁ = None` keeps `Σ₀`.
    fn change(&self, alt: AltKind, d: usize) -> (f64, Option<f64>, Option<CovarianceSpec>) {
        use AltKind::*;
        use CovarianceSpec::Ar1;
        let df = d as f64;
        let l = df.ln();
        let sd = df.sqrt();
        let (a, b, c, d_delta, d_sigma, e_delta, e_sigma): (f64, f64, CovarianceSpec, f64, f64, f64, CovarianceSpec) =
            match self {
                PowerSetting::I => (
                    2.0 * l / (5.0 * sd),
                    (l / (16.0 * df)).sqrt(),
                    Ar1(0.16),
                    l / (10.0 * sd),
                    (l / (16.0 * df)).sqrt(),
                    (l / (4.0 * df)).sqrt(),
                    Ar1(0.3),
                ),
                PowerSetting::II => (
                    5.0 * l / (4.0 * sd),
                    3.0 * l / (10.0 * sd),
                    Ar1(0.1).scaled(0.6),
                    l / (3.0 * sd),
                    3.0 * l / (10.0 * sd),
                    l / (2.0 * sd),
                    Ar1(0.8),
                ),
                PowerSetting::III => (
                    11.0 * l / (20.0 * sd),
                    6.0 * l / (5.0 * df.powf(0.4)),
                    Ar1(0.85),
                    6.0 * l / (25.0 * df.powf(0.4)),
                    (l / (25.0 * df)).sqrt(),
                    6.0 * l / (25.0 * df.powf(0.4)),
                    Ar1(0.6),
                ),
                PowerSetting::IV => (
                    5.0 * l / (2.0 * sd),
                    9.0 / (10.0 * sd),
                    CovarianceSpec::Block { a: 0.3, b: 0.8 },
                    (49.0 * l / (16.0 * df)).sqrt(),
                    3.0 / (4.0 * sd),
                    (49.0 * l / (16.0 * df)).sqrt(),
                    CovarianceSpec::Block { a: 0.2, b: 0.7 },
                ),
                PowerSetting::V => (
                    3.0 / (5.0 * l),
                    (l / (25.0 * df)).sqrt(),
                    Ar1(0.55),
                    3.0 / (10.0 * l),
                    (l / (25.0 * df)).sqrt(),
                    3.0 / (10.0 * l),
                    Ar1(0.48),
                ),
                PowerSetting::VI => (
                    7.0 * l / (20.0 * sd),
                    l / (5.0 * sd),
                    Ar1(0.1),
                    l / (5.0 * sd),
                    l / (5.0 * sd),
                    l / (5.0 * sd),
                    Ar1(0.15),
                ),
            };
        let sq = |s: f64| (1.0 + s).powi(2);
        match alt {
            Location => (a, None, None),
            SimpleScale => (0.0, Some(sq(b)), None),
            ComplexScale => (0.0, None, Some(c)),
            LocationSimpleScale => (d_delta, Some(sq(d_sigma)), None),
            LocationComplexScale => (e_delta, None, Some(e_sigma)),
        }
    }

    /// `(F₀, F₁)` samplers.
    pub fn pair(&self, alt: AltKind, d: usize) -> (SamplerSpec, SamplerSpec) {
        let fam = self.family();
        let s0 = self.sigma0();
        let (delta, scale, s1) = self.change(alt, d);
        let sigma1 = match (scale, s1) {
            (_, Some(s)) => s,
            (Some(c), None) => s0.clone().scaled(c),
            (None, None) => s0.clone(),
        };
        (SamplerSpec::shifted(fam, d, 0.0, s0), SamplerSpec::shifted(fam, d, delta, sigma1))
    }
}

impl AltKind {
    pub fn name(&self) -> &'static str {
        match self {
            AltKind::Location => "a",
            AltKind::SimpleScale => "b",
            AltKind::ComplexScale => "c",
            AltKind::LocationSimpleScale => "d",
            AltKind::LocationComplexScale => "e",
        }
    }
}

/// Pairs used to check convergence of the scaled scan curves (`d` free).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceSetting {
    /// `N(0, I)` vs `N(0.1·1, I)`.
    Gaussian,
    /// `t_3(0, I)` vs `t_3(0.1·1, 1.02² I)`.
    StudentT3,
    /// Cauchy `(0, I)` vs Cauchy `(2·1, I)`.
    Cauchy,
}

impl ConvergenceSetting {
    pub fn name(&self) -> &'static str {
        match self {
            ConvergenceSetting::Gaussian => "i",
            ConvergenceSetting::StudentT3 => "ii",
            ConvergenceSetting::Cauchy => "iii",
        }
    }

    pub fn pair(&self, d: usize) -> (SamplerSpec, SamplerSpec) {
        use CovarianceSpec::Identity;
        match self {
            ConvergenceSetting::Gaussian => (
                SamplerSpec::shifted(Family::Gaussian, d, 0.0, Identity),
                SamplerSpec::shifted(Family::Gaussian, d, 0.1, Identity),
            ),
            ConvergenceSetting::StudentT3 => (
                SamplerSpec::shifted(Family::StudentT { df: 3.0 }, d, 0.0, Identity),
                SamplerSpec::shifted(Family::StudentT { df: 3.0 }, d, 0.1, Identity.scaled(1.02 * 1.02)),
            ),
            ConvergenceSetting::Cauchy => (
                SamplerSpec::shifted(Family::Cauchy, d, 0.0, Identity),
                SamplerSpec::shifted(Family::Cauchy, d, 2.0, Identity),
            ),
        }
    }
}
