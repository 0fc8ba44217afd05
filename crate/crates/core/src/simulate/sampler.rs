use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, ChiSquared, Distribution, StandardNormal, Uniform};

use crate::permutation::rng::stream_rng;
use crate::rank_graph::ObservationSeq;
use crate::{Error, Result};

/// Distribution family of a sampler. Every family is built from a location
/// `μ` and a scale matrix `Σ` through `Σ^{1/2}`, taken as the lower Cholesky
/// factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Gaussian,
    /// Multivariate t: `μ + L z / sqrt(χ²_df / df)`.
    StudentT { df: f64 },
    /// Multivariate t with one degree of freedom.
    Cauchy,
    /// `L (X - df·1 + μ)` with `X` i.i.d. `χ²_df` components.
    ChisqShifted { df: f64 },
    /// `W N(μ, Σ) + (1 - W) N(-μ, Σ)`, `W ~ Bernoulli(1/2)`.
    GaussianMixture,
    /// `W N(μ, Σ) + (1 - W) t_df(μ, Σ)`, `W ~ Bernoulli(1 - contamination)`.
    GaussianWithTOutliers { contamination: f64, df: f64 },
    /// `exp(N(μ, Σ))` componentwise.
    LogNormal,
}

/// Covariance (scale) specification.
#[derive(Clone, Debug, PartialEq)]
pub enum CovarianceSpec {
    Identity,
    /// `Σ(ρ)_{ij} = ρ^{|i-j|}`.
    Ar1(f64),
    /// `c · Σ_base`.
    Scaled(f64, Box<CovarianceSpec>),
    /// `V B V`: `V` diagonal with `U(1, 3)` entries, `B` block diagonal with
    /// 10×10 equicorrelation blocks whose correlations are drawn from `U(a, b)`.
    /// `V` is shared by the pre- and post-change samplers of one sequence.
    Block { a: f64, b: f64 },
    /// Row-major `d × d` matrix.
    Explicit(Vec<f64>),
}

impl CovarianceSpec {
    pub fn scaled(self, c: f64) -> Self {
        CovarianceSpec::Scaled(c, Box::new(self))
    }

    /// Dense matrix; `v_rng` and `rho_rng` feed the `Block` construction.
    pub fn matrix(&self, d: usize, v_diag: &[f64], rho_rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>> {
        Ok(match self {
            CovarianceSpec::Identity => DMatrix::identity(d, d),
            CovarianceSpec::Ar1(rho) => {
                check_rho(*rho)?;
                DMatrix::from_fn(d, d, |i, j| rho.powi(i.abs_diff(j) as i32))
            }
            CovarianceSpec::Scaled(c, base) => base.matrix(d, v_diag, rho_rng)? * *c,
            CovarianceSpec::Block { a, b } => {
                if !(a <= b) || *a < -1.0 || *b >= 1.0 {
                    return Err(Error::InvalidParameter(format!("block correlation range ({a}, {b})")));
                }
                let u = Uniform::new_inclusive(*a, *b).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                let mut m = DMatrix::identity(d, d);
                for start in (0..d).step_by(10) {
                    let end = (start + 10).min(d);
                    let rho = u.sample(rho_rng);
                    for i in start..end {
                        for j in start..end {
                            if i != j {
                                m[(i, j)] = rho;
                            }
                        }
                    }
                }
                DMatrix::from_fn(d, d, |i, j| v_diag[i] * m[(i, j)] * v_diag[j])
            }
            CovarianceSpec::Explicit(data) => {
                if data.len() != d * d {
                    return Err(Error::DimensionMismatch { expected: d * d, found: data.len() });
                }
                DMatrix::from_row_slice(d, d, data)
            }
        })
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("AR(1) correlation must lie in (-1, 1), got {rho}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerSpec {
    pub family: Family,
    pub mu: Vec<f64>,
    pub sigma: CovarianceSpec,
}

impl SamplerSpec {
    pub fn new(family: Family, mu: Vec<f64>, sigma: CovarianceSpec) -> Self {
        SamplerSpec { family, mu, sigma }
    }

    /// Sampler with mean `delta · 1_d`.
    pub fn shifted(family: Family, d: usize, delta: f64, sigma: CovarianceSpec) -> Self {
        SamplerSpec { family, mu: vec![delta; d], sigma }
    }

    pub fn d(&self) -> usize {
        self.mu.len()
    }

    fn validate(&self) -> Result<()> {
        let df_ok = |df: f64| df > 0.0 && df.is_finite();
        let ok = match self.family {
            Family::StudentT { df } | Family::ChisqShifted { df } => df_ok(df),
            Family::GaussianWithTOutliers { contamination, df } => {
                df_ok(df) && (0.0..=1.0).contains(&contamination)
            }
            _ => true,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid family parameters {:?}", self.family)));
        }
        if self.mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { what: "mean vector".into() });
        }
        Ok(())
    }
}

/// `Σ^{1/2}` application. AR(1) and identity factors are applied in O(d);
/// the AR(1) recursion is exactly the lower Cholesky factor of `Σ(ρ)`.
enum Factor {
    Identity(f64),
    Ar1 { rho: f64, scale: f64 },
    Dense(DMatrix<f64>),
}

impl Factor {
    fn new(spec: &CovarianceSpec, d: usize, v_diag: &[f64], rho_rng: &mut ChaCha8Rng) -> Result<Self> {
        let mut scale = 1.0;
        let mut s = spec;
        while let CovarianceSpec::Scaled(c, base) = s {
            if !(*c > 0.0) {
                return Err(Error::NonPositiveDefinite);
            }
            scale *= c;
            s = base;
        }
        match s {
            CovarianceSpec::Identity => Ok(Factor::Identity(scale.sqrt())),
            CovarianceSpec::Ar1(rho) => {
                check_rho(*rho)?;
                Ok(Factor::Ar1 { rho: *rho, scale: scale.sqrt() })
            }
            _ => {
                let m = spec.matrix(d, v_diag, rho_rng)?;
                if (0..d).any(|i| (0..i).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * m[(i, j)].abs().max(1.0))) {
                    return Err(Error::NonPositiveDefinite);
                }
                let chol = m.cholesky().ok_or(Error::NonPositiveDefinite)?;
                Ok(Factor::Dense(chol.l()))
            }
        }
    }

    fn apply(&self, z: &mut [f64]) {
        match self {
            Factor::Identity(s) => z.iter_mut().for_each(|v| *v *= s),
            Factor::Ar1 { rho, scale } => {
                let c = (1.0 - rho * rho).sqrt();
                let mut prev = z[0];
                z[0] *= scale;
                for i in 1..z.len() {
                    let x = rho * prev + c * z[i];
                    prev = x;
                    z[i] = scale * x;
                }
            }
            Factor::Dense(l) => {
                let d = z.len();
                let src = z.to_vec();
                for i in (0..d).rev() {
                    let mut acc = 0.0;
                    for j in 0..=i {
                        acc += l[(i, j)] * src[j];
                    }
                    z[i] = acc;
                }
            }
        }
    }
}

fn normals(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

struct Sampler<'a> {
    spec: &'a SamplerSpec,
    factor: Factor,
}

impl Sampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) -> Result<()> {
        let d = self.spec.d();
        let mu = &self.spec.mu;
        let gaussian = |rng: &mut ChaCha8Rng, sign: f64| {
            let mut z = normals(rng, d);
            self.factor.apply(&mut z);
            z.iter().zip(mu).map(|(v, m)| v + sign * m).collect::<Vec<f64>>()
        };
        let student = |rng: &mut ChaCha8Rng, df: f64| -> Result<Vec<f64>> {
            let mut z = normals(rng, d);
            self.factor.apply(&mut z);
            let chi = ChiSquared::new(df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let w = (chi.sample(rng) / df).sqrt();
            Ok(z.iter().zip(mu).map(|(v, m)| m + v / w).collect())
        };
        let x = match self.spec.family {
            Family::Gaussian => gaussian(rng, 1.0),
            Family::StudentT { df } => student(rng, df)?,
            Family::Cauchy => student(rng, 1.0)?,
            Family::ChisqShifted { df } => {
                let chi = ChiSquared::new(df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                let mut z: Vec<f64> = mu.iter().map(|m| chi.sample(rng) - df + m).collect();
                self.factor.apply(&mut z);
                z
            }
            Family::GaussianMixture => {
                let sign = if rng.sample(Bernoulli::new(0.5).expect("valid probability")) { 1.0 } else { -1.0 };
                gaussian(rng, sign)
            }
            Family::GaussianWithTOutliers { contamination, df } => {
                let clean = Bernoulli::new(1.0 - contamination).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                if rng.sample(clean) {
                    gaussian(rng, 1.0)
                } else {
                    student(rng, df)?
                }
            }
            Family::LogNormal => gaussian(rng, 1.0).into_iter().map(f64::exp).collect(),
        };
        out.extend(x);
        Ok(())
    }
}

/// `n` independent draws: the first `tau` from `pre`, the rest from `post`.
///
/// Streams of `seed`: 0 for the observations, 1 for the shared block-covariance
/// scales, 2 and 3 for the pre- and post-change block correlations.
pub fn sample_sequence(pre: &SamplerSpec, post: &SamplerSpec, n: usize, tau: usize, seed: u64) -> Result<ObservationSeq> {
    let d = pre.d();
    if post.d() != d {
        return Err(Error::DimensionMismatch { expected: d, found: post.d() });
    }
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if tau > n {
        return Err(Error::InvalidParameter(format!("change-point {tau} exceeds n = {n}")));
    }
    pre.validate()?;
    post.validate()?;
    let mut v_rng = stream_rng(seed, 1);
    let v_diag: Vec<f64> = (0..d).map(|_| v_rng.random_range(1.0..3.0)).collect();
    let pre_sampler = Sampler { spec: pre, factor: Factor::new(&pre.sigma, d, &v_diag, &mut stream_rng(seed, 2))? };
    let post_sampler = Sampler { spec: post, factor: Factor::new(&post.sigma, d, &v_diag, &mut stream_rng(seed, 3))? };
    let mut rng = stream_rng(seed, 0);
    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        let s = if i < tau { &pre_sampler } else { &post_sampler };
        s.draw(&mut rng, &mut data)?;
    }
    ObservationSeq::vectors(d, data)
}
