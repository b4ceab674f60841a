//! Exact statistics of the two-qubit SWAP Otto engine.
//!
//! Two qubits with gaps `eps_a`, `eps_b` are thermalized at inverse
//! temperatures `beta_a < beta_b` (A is hot) and exchanged by a SWAP
//! unitary. With the excited state at energy `-eps`, the excitation
//! probability is `e^{beta eps} / (1 + e^{beta eps})`, and the heat given
//! to the hot bath and the work performed are
//!
//! ```text
//! q_h = eps_a * (n_b - n_a),    w = (eps_b - eps_a) * (n_b - n_a),
//! ```
//!
//! for initial occupations `(n_a, n_b)`. The two no-exchange outcomes
//! coalesce at the origin, so the joint distribution of `(q_h, w)` has at
//! most three support points and satisfies the exchange symmetry with
//! affinities `(beta_b - beta_a, beta_b)` exactly.

use crate::bounds::SignCondition;
use crate::dist::{FtDistribution, SupportPoint};
use crate::fmt::fmt_f64;
use crate::special::tight_bound;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Tolerance for regime-boundary classification.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("A must be the hot qubit: beta_a = {beta_a} must be < beta_b = {beta_b}")]
    NotHot { beta_a: f64, beta_b: f64 },
    #[error("sweep grid values must be positive and finite, got {0}")]
    InvalidGridValue(f64),
    #[error("beta_a/beta_b ratio must lie in (0, 1), got {0}")]
    InvalidBetaRatio(f64),
}

/// Validated engine parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineParams {
    eps_a: f64,
    eps_b: f64,
    beta_a: f64,
    beta_b: f64,
}

impl EngineParams {
    pub fn new(eps_a: f64, eps_b: f64, beta_a: f64, beta_b: f64) -> Result<Self, EngineError> {
        for (name, value) in [
            ("eps_a", eps_a),
            ("eps_b", eps_b),
            ("beta_a", beta_a),
            ("beta_b", beta_b),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(EngineError::InvalidParameter { name, value });
            }
        }
        if beta_a >= beta_b {
            return Err(EngineError::NotHot { beta_a, beta_b });
        }
        Ok(Self {
            eps_a,
            eps_b,
            beta_a,
            beta_b,
        })
    }

    pub fn eps_a(&self) -> f64 {
        self.eps_a
    }
    pub fn eps_b(&self) -> f64 {
        self.eps_b
    }
    pub fn beta_a(&self) -> f64 {
        self.beta_a
    }
    pub fn beta_b(&self) -> f64 {
        self.beta_b
    }

    /// Thermal occupation probabilities `(p_a0, p_a1, p_b0, p_b1)`.
    ///
    /// `p(n=1) = e^{beta eps}/(1 + e^{beta eps})`; the ground-state weight is
    /// computed directly from `u = e^{-beta eps}` rather than as `1 - p1`,
    /// which would lose relative precision when the gap is large.
    fn occupation_probs(&self) -> (f64, f64, f64, f64) {
        let ua = (-self.beta_a * self.eps_a).exp();
        let ub = (-self.beta_b * self.eps_b).exp();
        (
            ua / (1.0 + ua),
            1.0 / (1.0 + ua),
            ub / (1.0 + ub),
            1.0 / (1.0 + ub),
        )
    }
}

/// Operating regime, set by the gap ratio `eps_b/eps_a` against
/// `beta_a/beta_b` and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Refrigerator,
    Engine,
    Accelerator,
    Boundary,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Refrigerator => "refrigerator",
            Regime::Engine => "engine",
            Regime::Accelerator => "accelerator",
            Regime::Boundary => "boundary",
        }
    }
}

/// Refrigerator below `beta_a/beta_b`, engine between it and 1,
/// accelerator above 1; equalities (within [`BOUNDARY_TOL`]) are boundary.
pub fn classify_regime(p: &EngineParams) -> Regime {
    let gap_ratio = p.eps_b / p.eps_a;
    let beta_ratio = p.beta_a / p.beta_b;
    if (gap_ratio - beta_ratio).abs() <= BOUNDARY_TOL || (gap_ratio - 1.0).abs() <= BOUNDARY_TOL {
        Regime::Boundary
    } else if gap_ratio < beta_ratio {
        Regime::Refrigerator
    } else if gap_ratio < 1.0 {
        Regime::Engine
    } else {
        Regime::Accelerator
    }
}

/// Exact engine statistics.
#[derive(Debug, Clone)]
pub struct EngineReport {
    /// Joint distribution of `(q_h, w)` with affinities
    /// `(beta_b - beta_a, beta_b)`.
    pub distribution: FtDistribution,
    pub mean_qh: f64,
    pub mean_w: f64,
    pub mean_sigma: f64,
    pub var_qh: f64,
    pub var_w: f64,
    pub cov_wq: f64,
    /// `-<W>/<Q_H>`; NaN when no heat flows.
    pub efficiency: f64,
    pub regime: Regime,
}

/// Build the exact four-outcome distribution and its moments.
pub fn build_engine_distribution(p: &EngineParams) -> EngineReport {
    let (pa0, pa1, pb0, pb1) = p.occupation_probs();
    let qh = p.eps_a;
    let w = p.eps_b - p.eps_a;

    let distribution = FtDistribution::new(
        vec![p.beta_b - p.beta_a, p.beta_b],
        vec![
            SupportPoint {
                q: vec![0.0, 0.0],
                p: pa0 * pb0 + pa1 * pb1,
            },
            SupportPoint {
                q: vec![qh, w],
                p: pa0 * pb1,
            },
            SupportPoint {
                q: vec![-qh, -w],
                p: pa1 * pb0,
            },
        ],
    )
    .expect("engine outcomes form a valid distribution");

    let m = distribution.moments();
    let (mean_qh, mean_w) = (m.mean[0], m.mean[1]);
    let efficiency = if mean_qh != 0.0 {
        -mean_w / mean_qh
    } else {
        f64::NAN
    };
    EngineReport {
        mean_qh,
        mean_w,
        mean_sigma: m.mean_sigma,
        var_qh: m.covariance[(0, 0)],
        var_w: m.covariance[(1, 1)],
        cov_wq: m.covariance[(1, 0)],
        efficiency,
        regime: classify_regime(p),
        distribution,
    }
}

// ln(1 + e^x) without overflow
fn ln_one_plus_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

// ln(e^a + e^b)
fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Scaled cumulant generating function `ln <e^{lh q_h + lw w}>`.
///
/// Evaluated from the outcome sum. For small exponents the `expm1`/`ln_1p`
/// form keeps full relative accuracy (so finite differences at the origin
/// stay clean); large exponents fall back to log-sum-exp, which cannot
/// overflow. Debug builds cross-check the closed form on every call.
pub fn cgf(p: &EngineParams, lambda_h: f64, lambda_w: f64) -> f64 {
    let value = cgf_direct(p, lambda_h, lambda_w);
    debug_assert!(
        {
            let closed = cgf_closed_form(p, lambda_h, lambda_w);
            (value - closed).abs() <= 1e-11 * (1.0 + value.abs())
        },
        "direct and closed-form CGF disagree"
    );
    value
}

fn cgf_direct(p: &EngineParams, lambda_h: f64, lambda_w: f64) -> f64 {
    let (pa0, pa1, pb0, pb1) = p.occupation_probs();
    let p_plus = pa0 * pb1;
    let p_minus = pa1 * pb0;
    // exponent of the charge-carrying outcomes
    let c = lambda_h * p.eps_a + lambda_w * (p.eps_b - p.eps_a);
    if c.abs() <= 0.5 {
        let shifted = p_plus * c.exp_m1() + p_minus * (-c).exp_m1();
        shifted.ln_1p()
    } else {
        let origin = (pa0 * pb0 + pa1 * pb1).ln();
        log_add_exp(origin, log_add_exp(p_plus.ln() + c, p_minus.ln() - c))
    }
}

/// The closed-form CGF, an independent route to the same value:
///
/// ```text
/// C = -eps_a (lh + lw) - eps_b lw
///     + ln(e^{eps_a lh + eps_b lw} + e^{eps_a (beta_a + lw)})
///     + ln(e^{eps_a lh + beta_b eps_b + eps_b lw} + e^{eps_a lw})
///     - ln(1 + e^{beta_a eps_a}) - ln(1 + e^{beta_b eps_b})
/// ```
pub fn cgf_closed_form(p: &EngineParams, lambda_h: f64, lambda_w: f64) -> f64 {
    let (ea, eb) = (p.eps_a, p.eps_b);
    let (ba, bb) = (p.beta_a, p.beta_b);
    -ea * (lambda_h + lambda_w) - eb * lambda_w
        + log_add_exp(ea * lambda_h + eb * lambda_w, ea * (ba + lambda_w))
        + log_add_exp(ea * lambda_h + bb * eb + eb * lambda_w, ea * lambda_w)
        - ln_one_plus_exp(ba * ea)
        - ln_one_plus_exp(bb * eb)
}

/// Finite-difference cumulants versus direct moments.
#[derive(Debug, Clone, Serialize)]
pub struct CgfDerivativeReport {
    pub fd_mean_qh: f64,
    pub fd_mean_w: f64,
    pub fd_var_qh: f64,
    pub fd_var_w: f64,
    pub fd_cov_wq: f64,
    pub mean_qh: f64,
    pub mean_w: f64,
    pub var_qh: f64,
    pub var_w: f64,
    pub cov_wq: f64,
    pub max_first_order_err: f64,
    pub max_second_order_err: f64,
}

impl CgfDerivativeReport {
    /// First derivatives must match means to 1e-8 relative, second
    /// derivatives the covariance entries to 1e-6 relative.
    pub fn passes(&self) -> bool {
        self.max_first_order_err <= 1e-8 && self.max_second_order_err <= 1e-6
    }
}

// relative where the reference is resolvable, absolute near zero
fn rel_err(fd: f64, reference: f64) -> f64 {
    let diff = (fd - reference).abs();
    if reference.abs() > 1e-9 {
        diff / reference.abs()
    } else {
        diff
    }
}

/// Check the cumulant identities `<Q_H> = dC/dlh`, `<W> = dC/dlw`,
/// `var = d^2 C`, `cov = d^2 C/dlh dlw` by Richardson-extrapolated central
/// differences at the origin with base step `h = 1e-5`.
pub fn cgf_derivative_check(p: &EngineParams) -> CgfDerivativeReport {
    let h = 1e-5;
    let g = |lh: f64, lw: f64| cgf(p, lh, lw);

    let d1 = |f: &dyn Fn(f64) -> f64, step: f64| (f(step) - f(-step)) / (2.0 * step);
    let d2 = |f: &dyn Fn(f64) -> f64, step: f64| (f(step) + f(-step)) / (step * step);
    let richardson = |coarse: f64, fine: f64| (4.0 * fine - coarse) / 3.0;

    let along_h = |l: f64| g(l, 0.0);
    let along_w = |l: f64| g(0.0, l);
    let fd_mean_qh = richardson(d1(&along_h, h), d1(&along_h, 0.5 * h));
    let fd_mean_w = richardson(d1(&along_w, h), d1(&along_w, 0.5 * h));
    let fd_var_qh = richardson(d2(&along_h, h), d2(&along_h, 0.5 * h));
    let fd_var_w = richardson(d2(&along_w, h), d2(&along_w, 0.5 * h));

    let mixed = |step: f64| {
        (g(step, step) - g(step, -step) - g(-step, step) + g(-step, -step)) / (4.0 * step * step)
    };
    let fd_cov_wq = richardson(mixed(h), mixed(0.5 * h));

    let report = build_engine_distribution(p);
    let max_first_order_err = rel_err(fd_mean_qh, report.mean_qh).max(rel_err(fd_mean_w, report.mean_w));
    let max_second_order_err = rel_err(fd_var_qh, report.var_qh)
        .max(rel_err(fd_var_w, report.var_w))
        .max(rel_err(fd_cov_wq, report.cov_wq));

    CgfDerivativeReport {
        fd_mean_qh,
        fd_mean_w,
        fd_var_qh,
        fd_var_w,
        fd_cov_wq,
        mean_qh: report.mean_qh,
        mean_w: report.mean_w,
        var_qh: report.var_qh,
        var_w: report.var_w,
        cov_wq: report.cov_wq,
        max_first_order_err,
        max_second_order_err,
    }
}

/// One row of the gap-ratio sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Gap ratio `eps_b/eps_a`.
    pub r: f64,
    pub regime: Regime,
    pub mean_qh: f64,
    pub mean_w: f64,
    pub mean_sigma: f64,
    pub var_qh: f64,
    pub var_w: f64,
    pub cov_wq: f64,
    /// `f(<sigma>) <Q_H>^2`, the tight lower bound on `var(Q_H)`.
    pub f_bound_qh: f64,
    pub f_bound_w: f64,
    /// `(2/<sigma>) <Q_H>^2`, the classical comparison line.
    pub classical_bound_qh: f64,
    pub classical_bound_w: f64,
    /// Covariance interval endpoints for the `(W, Q_H)` pair.
    pub cov_lower: f64,
    pub cov_upper: f64,
    pub sign_condition: SignCondition,
}

pub const SWEEP_CSV_HEADER: &str = "r,regime,mean_qh,mean_w,mean_sigma,var_qh,var_w,cov_wq,\
f_bound_qh,f_bound_w,classical_bound_qh,classical_bound_w,cov_lower,cov_upper,sign_condition";

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        let sign = match self.sign_condition {
            SignCondition::Holds { .. } => "true",
            SignCondition::DoesNotHold => "false",
            SignCondition::Indeterminate => "indeterminate",
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.r),
            self.regime.as_str(),
            fmt_f64(self.mean_qh),
            fmt_f64(self.mean_w),
            fmt_f64(self.mean_sigma),
            fmt_f64(self.var_qh),
            fmt_f64(self.var_w),
            fmt_f64(self.cov_wq),
            fmt_f64(self.f_bound_qh),
            fmt_f64(self.f_bound_w),
            fmt_f64(self.classical_bound_qh),
            fmt_f64(self.classical_bound_w),
            fmt_f64(self.cov_lower),
            fmt_f64(self.cov_upper),
            sign,
        )
    }
}

fn sweep_row(beta_a: f64, beta_b: f64, r: f64) -> SweepRow {
    let params = EngineParams::new(1.0, r, beta_a, beta_b).expect("validated by sweep");
    let rep = build_engine_distribution(&params);

    // On the equilibrium line the bound diverges while all means vanish;
    // the vacuous limits are 0 for the bound lines and the Cauchy-Schwarz
    // interval for the covariance.
    if rep.mean_sigma <= 0.0 {
        let half = (rep.var_w * rep.var_qh).max(0.0).sqrt();
        return SweepRow {
            r,
            regime: rep.regime,
            mean_qh: rep.mean_qh,
            mean_w: rep.mean_w,
            mean_sigma: rep.mean_sigma,
            var_qh: rep.var_qh,
            var_w: rep.var_w,
            cov_wq: rep.cov_wq,
            f_bound_qh: 0.0,
            f_bound_w: 0.0,
            classical_bound_qh: 0.0,
            classical_bound_w: 0.0,
            cov_lower: -half,
            cov_upper: half,
            sign_condition: SignCondition::Indeterminate,
        };
    }

    let f = tight_bound(rep.mean_sigma).expect("mean_sigma > 0");
    let classical = 2.0 / rep.mean_sigma;
    let f_bound_qh = f * rep.mean_qh * rep.mean_qh;
    let f_bound_w = f * rep.mean_w * rep.mean_w;
    let margin_w = rep.var_w - f_bound_w;
    let margin_qh = rep.var_qh - f_bound_qh;
    let half = (margin_w * margin_qh).max(0.0).sqrt();
    let center = f * rep.mean_w * rep.mean_qh;

    let sign_condition = if rep.var_w <= 0.0 || rep.var_qh <= 0.0 {
        SignCondition::Indeterminate
    } else {
        let lhs = rep.mean_w * rep.mean_w / rep.var_w + rep.mean_qh * rep.mean_qh / rep.var_qh;
        if lhs >= 1.0 / f {
            SignCondition::Holds {
                sign_consistent: rep.cov_wq * rep.mean_w * rep.mean_qh >= -1e-12,
            }
        } else {
            SignCondition::DoesNotHold
        }
    };

    SweepRow {
        r,
        regime: rep.regime,
        mean_qh: rep.mean_qh,
        mean_w: rep.mean_w,
        mean_sigma: rep.mean_sigma,
        var_qh: rep.var_qh,
        var_w: rep.var_w,
        cov_wq: rep.cov_wq,
        f_bound_qh,
        f_bound_w,
        classical_bound_qh: classical * rep.mean_qh * rep.mean_qh,
        classical_bound_w: classical * rep.mean_w * rep.mean_w,
        cov_lower: center - half,
        cov_upper: center + half,
        sign_condition,
    }
}

/// Evaluate the engine across a grid of gap ratios `r = eps_b/eps_a`.
///
/// Units are fixed by `eps_a = 1`; `beta_b` is set by the supplied
/// `beta_b * eps_a` product and `beta_a = beta_ratio * beta_b`. Grid points
/// are independent and evaluated in parallel; the output order is the grid
/// order.
pub fn sweep(
    beta_ratio: f64,
    grid: &[f64],
    beta_b_eps_a: f64,
) -> Result<Vec<SweepRow>, EngineError> {
    if !beta_ratio.is_finite() || beta_ratio <= 0.0 || beta_ratio >= 1.0 {
        return Err(EngineError::InvalidBetaRatio(beta_ratio));
    }
    if !beta_b_eps_a.is_finite() || beta_b_eps_a <= 0.0 {
        return Err(EngineError::InvalidParameter {
            name: "beta_b_eps_a",
            value: beta_b_eps_a,
        });
    }
    for &r in grid {
        if !r.is_finite() || r <= 0.0 {
            return Err(EngineError::InvalidGridValue(r));
        }
    }
    let beta_b = beta_b_eps_a;
    let beta_a = beta_ratio * beta_b;
    Ok(grid
        .par_iter()
        .map(|&r| sweep_row(beta_a, beta_b, r))
        .collect())
}
