//! Uncertainty-bound checkers for moment reports.
//!
//! Every checker consumes a [`MomentReport`] and reports a margin: how far
//! the report sits above (positive) or below (negative) the bound. The
//! scalar check, the matrix positive-semidefiniteness check, the covariance
//! interval and the sign condition are theorems for any distribution with
//! the exchange symmetry; the classical `2/x` comparison is not and its
//! margin may legitimately be negative.
//!
//! Zero dissipation is a special case throughout: when `<sigma>` vanishes
//! the tight bound diverges while all means are forced to zero, so the
//! f-based checks become vacuous and are flagged instead of evaluated.

use crate::dist::MomentReport;
use crate::special::{classical_bound, hasegawa_bound, tight_bound};
use serde::Serialize;
use thiserror::Error;

/// Default numerical tolerance for bound verdicts.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("charge index {index} out of range for {n} charges")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("mean entropy production {0} is negative beyond tolerance")]
    NegativeSigma(f64),
    #[error("<sigma> = 0 but <Q_{index}> = {mean}; no FT distribution produces this")]
    ZeroSigmaInconsistent { index: usize, mean: f64 },
    #[error("covariance interval radicand {radicand} negative beyond -tol for pair ({i},{j}); scalar bound must hold first")]
    NegativeRadicand { i: usize, j: usize, radicand: f64 },
    #[error("covariance matrix is not symmetric at ({i},{j})")]
    NonSymmetricCovariance { i: usize, j: usize },
}

/// Covariance interval for one charge pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CovInterval {
    pub lower: f64,
    pub upper: f64,
    pub actual: f64,
    pub pass: bool,
}

/// Outcome of the covariance sign condition for one charge pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SignCondition {
    /// A variance is zero (or dissipation vanishes); nothing can be said.
    Indeterminate,
    /// The condition fails; no sign guarantee is made.
    DoesNotHold,
    /// The condition holds; `sign_consistent` records whether the actual
    /// covariance sign agrees with `sign(q_i q_j)` as guaranteed.
    Holds { sign_consistent: bool },
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEntry<T> {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub value: T,
}

/// Margins of every bound for one moment report.
#[derive(Debug, Clone, Serialize)]
pub struct BoundVerdict {
    pub tol: f64,
    pub mean_sigma: f64,
    /// True when `|<sigma>| <= tol`; f-based checks are then vacuous.
    pub zero_dissipation: bool,
    /// Per charge: `var(Q_i) - f(<sigma>) <Q_i>^2` (plain variance when vacuous).
    pub scalar_tur_margins: Vec<f64>,
    /// Smallest eigenvalue of `C - f(<sigma>) q q^T` (of `C` when vacuous).
    pub matrix_tur_min_eigenvalue: f64,
    /// Pass threshold for the matrix check: `-tol * (1 + trace C)`.
    pub matrix_tur_threshold: f64,
    pub covariance_intervals: Vec<PairEntry<CovInterval>>,
    pub sign_conditions: Vec<PairEntry<SignCondition>>,
    /// Per charge: `var(Q_i) - (2/<sigma>) <Q_i>^2`; may be negative.
    pub classical_margins: Vec<f64>,
    /// Per charge: `var(Q_i) - 2/(e^<sigma> - 1) <Q_i>^2`.
    pub hasegawa_margins: Vec<f64>,
}

impl BoundVerdict {
    /// True when every theorem-backed bound holds within tolerance.
    /// The classical comparison margins are excluded: they may be negative
    /// for perfectly valid distributions.
    pub fn theorems_pass(&self) -> bool {
        self.scalar_tur_margins.iter().all(|&m| m >= -self.tol)
            && self.matrix_tur_min_eigenvalue >= self.matrix_tur_threshold
            && self.covariance_intervals.iter().all(|e| e.value.pass)
            && self.hasegawa_margins.iter().all(|&m| m >= -self.tol)
    }
}

fn check_index(m: &MomentReport, index: usize) -> Result<(), BoundError> {
    let n = m.mean.len();
    if index >= n {
        return Err(BoundError::IndexOutOfRange { index, n });
    }
    Ok(())
}

fn check_sigma(m: &MomentReport, tol: f64) -> Result<bool, BoundError> {
    if m.mean_sigma < -tol {
        return Err(BoundError::NegativeSigma(m.mean_sigma));
    }
    Ok(m.mean_sigma.abs() <= tol)
}

/// Scalar bound margin `var(Q_i) - f(<sigma>) <Q_i>^2` for charge `i`.
///
/// At zero dissipation the mean must also vanish (otherwise the report is
/// inconsistent with the exchange symmetry) and the plain variance is
/// returned, the bound being vacuous.
pub fn check_scalar_tur(m: &MomentReport, i: usize, tol: f64) -> Result<f64, BoundError> {
    check_index(m, i)?;
    let var = m.covariance[(i, i)];
    if check_sigma(m, tol)? {
        if m.mean[i].abs() > tol * (1.0 + var.abs().sqrt()) {
            return Err(BoundError::ZeroSigmaInconsistent {
                index: i,
                mean: m.mean[i],
            });
        }
        return Ok(var);
    }
    let f = tight_bound(m.mean_sigma).expect("mean_sigma > 0");
    Ok(var - f * m.mean[i] * m.mean[i])
}

fn symmetry_check(m: &MomentReport) -> Result<(), BoundError> {
    let n = m.mean.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (m.covariance[(i, j)] - m.covariance[(j, i)]).abs();
            if d > 1e-12 * (1.0 + m.covariance[(i, j)].abs()) {
                return Err(BoundError::NonSymmetricCovariance { i, j });
            }
        }
    }
    Ok(())
}

/// Smallest eigenvalue of `C - f(<sigma>) q q^T`.
///
/// The verdict passes when it is at least `-tol * (1 + trace C)`; the
/// trace-relative scaling keeps the test meaningful for large-magnitude
/// charges. At zero dissipation the eigenvalue of `C` alone is returned.
pub fn check_matrix_tur(m: &MomentReport, tol: f64) -> Result<f64, BoundError> {
    symmetry_check(m)?;
    let zero = check_sigma(m, tol)?;
    let n = m.mean.len();
    let mat = if zero {
        m.covariance.clone()
    } else {
        let f = tight_bound(m.mean_sigma).expect("mean_sigma > 0");
        let mut mat = m.covariance.clone();
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] -= f * m.mean[i] * m.mean[j];
            }
        }
        mat
    };
    let eigs = mat.symmetric_eigenvalues();
    Ok(eigs.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Covariance interval `f q_i q_j +/- M_ij` for the pair `(i, j)`.
///
/// `M_ij` is the non-negative square root of the product of scalar margins;
/// a radicand below `-tol` means the scalar bound failed first and the
/// interval is not defined.
pub fn check_covariance_interval(
    m: &MomentReport,
    i: usize,
    j: usize,
    tol: f64,
) -> Result<CovInterval, BoundError> {
    check_index(m, i)?;
    check_index(m, j)?;
    let actual = m.covariance[(i, j)];
    if check_sigma(m, tol)? {
        // vacuous limit: plain Cauchy-Schwarz interval
        let half = (m.covariance[(i, i)] * m.covariance[(j, j)]).max(0.0).sqrt();
        return Ok(CovInterval {
            lower: -half,
            upper: half,
            actual,
            pass: actual >= -half - tol && actual <= half + tol,
        });
    }
    let f = tight_bound(m.mean_sigma).expect("mean_sigma > 0");
    let margin_i = m.covariance[(i, i)] - f * m.mean[i] * m.mean[i];
    let margin_j = m.covariance[(j, j)] - f * m.mean[j] * m.mean[j];
    let radicand = margin_i * margin_j;
    if radicand < -tol {
        return Err(BoundError::NegativeRadicand { i, j, radicand });
    }
    let half = radicand.max(0.0).sqrt();
    let center = f * m.mean[i] * m.mean[j];
    let (lower, upper) = (center - half, center + half);
    Ok(CovInterval {
        lower,
        upper,
        actual,
        pass: actual >= lower - tol && actual <= upper + tol,
    })
}

/// Sign condition `q_i^2/var_i + q_j^2/var_j >= 1/f(<sigma>)`.
///
/// When it holds, both interval endpoints share the sign of `q_i q_j`, so the
/// covariance sign is pinned; the cross-check against the actual covariance
/// is recorded in the outcome.
pub fn check_sign_condition(
    m: &MomentReport,
    i: usize,
    j: usize,
    tol: f64,
) -> Result<SignCondition, BoundError> {
    check_index(m, i)?;
    check_index(m, j)?;
    let var_i = m.covariance[(i, i)];
    let var_j = m.covariance[(j, j)];
    if var_i <= 0.0 || var_j <= 0.0 || check_sigma(m, tol)? {
        return Ok(SignCondition::Indeterminate);
    }
    let f = tight_bound(m.mean_sigma).expect("mean_sigma > 0");
    let lhs = m.mean[i] * m.mean[i] / var_i + m.mean[j] * m.mean[j] / var_j;
    if lhs < 1.0 / f {
        return Ok(SignCondition::DoesNotHold);
    }
    let expected = m.mean[i] * m.mean[j];
    let actual = m.covariance[(i, j)];
    Ok(SignCondition::Holds {
        sign_consistent: actual * expected >= -tol,
    })
}

/// Evaluate every bound and assemble a [`BoundVerdict`].
pub fn evaluate_bounds(m: &MomentReport, tol: f64) -> Result<BoundVerdict, BoundError> {
    symmetry_check(m)?;
    let zero_dissipation = check_sigma(m, tol)?;
    let n = m.mean.len();

    let mut scalar_tur_margins = Vec::with_capacity(n);
    for i in 0..n {
        scalar_tur_margins.push(check_scalar_tur(m, i, tol)?);
    }

    let (classical_margins, hasegawa_margins) = if zero_dissipation {
        let vars: Vec<f64> = (0..n).map(|i| m.covariance[(i, i)]).collect();
        (vars.clone(), vars)
    } else {
        let c = classical_bound(m.mean_sigma).expect("mean_sigma > 0");
        let h = hasegawa_bound(m.mean_sigma).expect("mean_sigma > 0");
        (
            (0..n)
                .map(|i| m.covariance[(i, i)] - c * m.mean[i] * m.mean[i])
                .collect(),
            (0..n)
                .map(|i| m.covariance[(i, i)] - h * m.mean[i] * m.mean[i])
                .collect(),
        )
    };

    let matrix_tur_min_eigenvalue = check_matrix_tur(m, tol)?;
    let matrix_tur_threshold = -tol * (1.0 + m.covariance.trace());

    let mut covariance_intervals = Vec::new();
    let mut sign_conditions = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            covariance_intervals.push(PairEntry {
                i,
                j,
                value: check_covariance_interval(m, i, j, tol)?,
            });
            sign_conditions.push(PairEntry {
                i,
                j,
                value: check_sign_condition(m, i, j, tol)?,
            });
        }
    }

    Ok(BoundVerdict {
        tol,
        mean_sigma: m.mean_sigma,
        zero_dissipation,
        scalar_tur_margins,
        matrix_tur_min_eigenvalue,
        matrix_tur_threshold,
        covariance_intervals,
        sign_conditions,
        classical_margins,
        hasegawa_margins,
    })
}
