//! The saturating two-point distribution.
//!
//! For prescribed `<sigma> > 0` and `<z>` there is exactly one two-point
//! distribution over `(sigma, z)` with the exchange symmetry, supported on
//! `{(a, b), (-a, -b)}`. It attains the variance floor
//! `var(z) = <z>^2 f(<sigma>)` with equality, which is where the tight bound
//! gets its name.

use crate::dist::{FtDistribution, SupportPoint};
use crate::special::inv_xtanhx;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinimalError {
    #[error("mean entropy production must be finite and > 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("no FT distribution has <sigma> = 0 with <z> = {0} != 0")]
    InconsistentMoments(f64),
    #[error("mean z must be finite, got {0}")]
    NonFiniteZ(f64),
}

/// The two-point saturating distribution, parametrized by its support
/// magnitudes: `sigma` takes values `+/- sigma_support` and `z` takes
/// `+/- z_support`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalDistribution {
    sigma_support: f64,
    z_support: f64,
}

impl MinimalDistribution {
    /// Magnitude of the entropy-production support (`a` such that
    /// `<sigma> = a tanh(a/2)`).
    pub fn sigma_support(&self) -> f64 {
        self.sigma_support
    }

    /// Magnitude of the projected-charge support.
    pub fn z_support(&self) -> f64 {
        self.z_support
    }

    /// Probability of the positive point, `e^{a/2} / (2 cosh(a/2))`,
    /// evaluated as `1/(1 + e^{-a})` so it cannot overflow.
    pub fn p_plus(&self) -> f64 {
        1.0 / (1.0 + (-self.sigma_support).exp())
    }

    /// Probability of the negative point, `e^{-a/2} / (2 cosh(a/2))`.
    pub fn p_minus(&self) -> f64 {
        let u = (-self.sigma_support).exp();
        u / (1.0 + u)
    }

    /// Materialize as a two-charge distribution over `(sigma, z)` with
    /// affinities `(1, 0)`, so that `A . q` is the entropy production.
    pub fn to_distribution(&self) -> FtDistribution {
        FtDistribution::new(
            vec![1.0, 0.0],
            vec![
                SupportPoint {
                    q: vec![self.sigma_support, self.z_support],
                    p: self.p_plus(),
                },
                SupportPoint {
                    q: vec![-self.sigma_support, -self.z_support],
                    p: self.p_minus(),
                },
            ],
        )
        .expect("minimal distribution is valid by construction")
    }
}

/// Construct the minimal distribution for the prescribed first moments.
///
/// `a = 2 g(<sigma>/2)` inverts `<sigma> = a tanh(a/2)`, and
/// `b = a <z> / <sigma>`.
pub fn build_minimal(mean_sigma: f64, mean_z: f64) -> Result<MinimalDistribution, MinimalError> {
    if !mean_z.is_finite() {
        return Err(MinimalError::NonFiniteZ(mean_z));
    }
    if mean_sigma == 0.0 && mean_z != 0.0 {
        return Err(MinimalError::InconsistentMoments(mean_z));
    }
    if !mean_sigma.is_finite() || mean_sigma <= 0.0 {
        return Err(MinimalError::NonPositiveSigma(mean_sigma));
    }
    let a = 2.0 * inv_xtanhx(0.5 * mean_sigma).expect("positive finite argument");
    let b = a * mean_z / mean_sigma;
    Ok(MinimalDistribution {
        sigma_support: a,
        z_support: b,
    })
}
