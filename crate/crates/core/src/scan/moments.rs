use crate::rank_graph::{RankMatrix, RankSummaries};
use crate::{Error, Result};

/// Largest condition number accepted for the 2×2 covariance of `(U₁, U₂)`.
const MAX_CONDITION: f64 = 1e12;

/// Permutation-null mean, variance and covariance of `(U₁, U₂)` for one window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullMoments {
    pub e_u1: f64,
    pub e_u2: f64,
    pub var_u1: f64,
    pub var_u2: f64,
    pub cov_u1u2: f64,
}

fn coef_a(n: f64, t: f64) -> f64 {
    2.0 * t * (t - 1.0) * (n - t) * (n - t - 1.0) / ((n - 2.0) * (n - 3.0))
}

fn coef_b(n: f64, t: f64) -> f64 {
    4.0 * t * (n - t) * (t - 1.0) * (t - 2.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0))
}

impl NullMoments {
    /// Moments for a window containing `len` observations out of `n`.
    pub fn for_length(n: usize, s: RankSummaries, len: usize) -> NullMoments {
        let (nf, t) = (n as f64, len as f64);
        let dd = s.rd_sq - s.r0 * s.r0;
        let d1 = s.r1_sq - s.r0 * s.r0;
        NullMoments {
            e_u1: t * (t - 1.0) * s.r0,
            e_u2: (nf - t) * (nf - t - 1.0) * s.r0,
            var_u1: coef_a(nf, t) * dd + coef_b(nf, t) * d1,
            var_u2: coef_a(nf, nf - t) * dd + coef_b(nf, nf - t) * d1,
            cov_u1u2: coef_a(nf, t) * (dd - 2.0 * (nf - 1.0) * d1),
        }
    }

    /// Degeneracy threshold for variances: `1e-10 · max(1, E[U₁]²)`.
    pub fn tolerance(&self) -> f64 {
        1e-10 * self.e_u1.powi(2).max(1.0)
    }
}

/// Exact permutation-null moments of `(U₁(t1, t2), U₂(t1, t2))`.
pub fn null_moments(r: &RankMatrix, t1: usize, t2: usize) -> Result<NullMoments> {
    let n = r.n();
    if n < 4 {
        return Err(Error::TooFewObservations { n, min: 4 });
    }
    if t1 >= t2 || t2 > n {
        return Err(Error::IndexOutOfRange { t1, t2, n });
    }
    Ok(NullMoments::for_length(n, r.summaries(), t2 - t1))
}

/// Everything needed to standardize `(U₁, U₂)` for windows of one length.
///
/// `U_w = a·U₁ + c·U₂` with `a = (n - t - 1)/(n - 2)`, `c = (t - 1)/(n - 2)`,
/// and `U_diff = U₁ - U₂`.
#[derive(Clone, Copy, Debug)]
pub struct LengthMoments {
    pub len: usize,
    pub moments: NullMoments,
    pub coef_w: (f64, f64),
    pub e_w: f64,
    pub sd_w: f64,
    pub e_diff: f64,
    pub sd_diff: f64,
    /// Both `Var(U_w)` and `Var(U_diff)` exceed the degeneracy tolerance.
    pub z_defined: bool,
    /// `Σ⁻¹` as `(s11, s12, s22)` when the covariance is well conditioned.
    pub inverse: Option<(f64, f64, f64)>,
}

impl LengthMoments {
    pub fn new(n: usize, s: RankSummaries, len: usize) -> LengthMoments {
        let m = NullMoments::for_length(n, s, len);
        let (nf, t) = (n as f64, len as f64);
        let a = (nf - t - 1.0) / (nf - 2.0);
        let c = (t - 1.0) / (nf - 2.0);
        let e_w = a * m.e_u1 + c * m.e_u2;
        let var_w = a * a * m.var_u1 + c * c * m.var_u2 + 2.0 * a * c * m.cov_u1u2;
        let e_diff = m.e_u1 - m.e_u2;
        let var_diff = m.var_u1 + m.var_u2 - 2.0 * m.cov_u1u2;
        let tol = m.tolerance();
        let z_defined = var_w > tol && var_diff > tol;
        LengthMoments {
            len,
            moments: m,
            coef_w: (a, c),
            e_w,
            sd_w: var_w.max(0.0).sqrt(),
            e_diff,
            sd_diff: var_diff.max(0.0).sqrt(),
            z_defined,
            inverse: inverse_2x2(m.var_u1, m.cov_u1u2, m.var_u2, tol),
        }
    }

    /// `(Z_w, Z_diff)` for observed rank sums, if defined.
    #[inline]
    pub fn z_pair(&self, u1: f64, u2: f64) -> Option<(f64, f64)> {
        if !self.z_defined {
            return None;
        }
        let uw = self.coef_w.0 * u1 + self.coef_w.1 * u2;
        Some(((uw - self.e_w) / self.sd_w, (u1 - u2 - self.e_diff) / self.sd_diff))
    }

    /// Mahalanobis form `(U - E)ᵀ Σ⁻¹ (U - E)`, if `Σ` is invertible.
    #[inline]
    pub fn quadratic_form(&self, u1: f64, u2: f64) -> Option<f64> {
        let (s11, s12, s22) = self.inverse?;
        let x = u1 - self.moments.e_u1;
        let y = u2 - self.moments.e_u2;
        Some(s11 * x * x + 2.0 * s12 * x * y + s22 * y * y)
    }
}

/// Inverse of the symmetric matrix `[[a, b], [b, c]]` when it is positive
/// definite with condition number below [`MAX_CONDITION`].
fn inverse_2x2(a: f64, b: f64, c: f64, tol: f64) -> Option<(f64, f64, f64)> {
    let mean = 0.5 * (a + c);
    let radius = (0.25 * (a - c).powi(2) + b * b).sqrt();
    let (hi, lo) = (mean + radius, mean - radius);
    if !(hi > tol) || !(lo > 0.0) || hi / lo >= MAX_CONDITION {
        return None;
    }
    let det = a * c - b * b;
    if !(det > 0.0) {
        return None;
    }
    Some((c / det, -b / det, a / det))
}
