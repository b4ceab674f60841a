//! Numerical corroboration that the two-point distribution minimizes
//! variance.
//!
//! Three independent routes are provided:
//! - [`ThreePointFamily`]: the one-parameter family with support
//!   `{(-a,-b), (0,0), (a,b)}`; its variance is monotone in `a` and attains
//!   the floor exactly when the origin weight vanishes.
//! - [`four_point_min_variance`]: the two-pair family with fixed sigma
//!   support `{x_a, x_b}`; the free `z`-coordinate is minimized out
//!   analytically and the remaining minimum approaches the floor only as
//!   `x_b` collapses onto the two-point support.
//! - [`numeric_min_search`]: a seeded multistart simplex search over all
//!   symmetric-support distributions with up to three pairs, with moment
//!   constraints eliminated in closed form.
//!
//! None of these may ever produce a variance below
//! `<z>^2 f(<sigma>)`; the search corroborates that the floor is also
//! attained.

use crate::dist::{FtDistribution, SupportPoint};
use crate::minimal::build_minimal;
use crate::special::{inv_xtanhx, tight_bound};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Number of random starts per search.
const MULTISTART_COUNT: usize = 64;
const MAX_SIMPLEX_ITER: usize = 4000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("mean entropy production must be finite and > 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("three-point support needs a*tanh(a/2) >= <sigma>: a = {a} gives {got} < {needed}")]
    ThreePointConstraint { a: f64, got: f64, needed: f64 },
    #[error("four-point support must satisfy 0 <= x_a < x_bar < x_b, got x_a = {x_a}, x_b = {x_b}, x_bar = {x_bar}")]
    SupportOrdering { x_a: f64, x_b: f64, x_bar: f64 },
    #[error("four-point reduction needs <z> != 0")]
    ZeroMeanZ,
    #[error("support pair count must be between 1 and 3, got {0}")]
    PairCount(usize),
    #[error("support weights became negative: {0}")]
    Infeasible(f64),
}

fn require_positive_sigma(mean_sigma: f64) -> Result<(), SearchError> {
    if !mean_sigma.is_finite() || mean_sigma <= 0.0 {
        return Err(SearchError::NonPositiveSigma(mean_sigma));
    }
    Ok(())
}

/// Support magnitude `x_bar` of the two-point distribution with the given
/// mean entropy production: the root of `x tanh(x/2) = mean_sigma`.
fn sigma_support_of(mean_sigma: f64) -> f64 {
    2.0 * inv_xtanhx(0.5 * mean_sigma).expect("positive finite argument")
}

// ---------------------------------------------------------------------------
// Three-point family
// ---------------------------------------------------------------------------

/// The family `{(-a,-b), (0,0), (a,b)}` with prescribed first moments.
#[derive(Debug, Clone, Copy)]
pub struct ThreePointFamily {
    mean_sigma: f64,
    mean_z: f64,
    sigma_support: f64,
    z_support: f64,
    pair_weight: f64,
    origin_weight: f64,
}

impl ThreePointFamily {
    /// `a` is free subject to `a tanh(a/2) >= <sigma>` (the origin weight
    /// must stay non-negative); `b = a <z> / <sigma>` is then forced.
    pub fn new(mean_sigma: f64, mean_z: f64, a: f64) -> Result<Self, SearchError> {
        require_positive_sigma(mean_sigma)?;
        let got = a * (0.5 * a).tanh();
        if got < mean_sigma || got.is_nan() {
            return Err(SearchError::ThreePointConstraint {
                a,
                got,
                needed: mean_sigma,
            });
        }
        let pair_weight = mean_sigma / (2.0 * a * (0.5 * a).sinh());
        let origin_weight = (1.0 - mean_sigma / got).max(0.0);
        Ok(Self {
            mean_sigma,
            mean_z,
            sigma_support: a,
            z_support: a * mean_z / mean_sigma,
            pair_weight,
            origin_weight,
        })
    }

    pub fn sigma_support(&self) -> f64 {
        self.sigma_support
    }

    pub fn z_support(&self) -> f64 {
        self.z_support
    }

    pub fn pair_weight(&self) -> f64 {
        self.pair_weight
    }

    pub fn origin_weight(&self) -> f64 {
        self.origin_weight
    }

    /// `var(z) = (<z>^2/<sigma>) a / tanh(a/2) - <z>^2`, strictly increasing
    /// in `a`.
    pub fn variance_z(&self) -> f64 {
        let second = (self.mean_z * self.mean_z / self.mean_sigma) * self.sigma_support
            / (0.5 * self.sigma_support).tanh();
        second - self.mean_z * self.mean_z
    }

    pub fn to_distribution(&self) -> FtDistribution {
        let a = self.sigma_support;
        let b = self.z_support;
        // p e^{±a/2} with p = <sigma>/(2a sinh(a/2)), kept overflow-free:
        // p e^{a/2} = <sigma>/(a (1 - e^{-a}))
        let w_plus = self.mean_sigma / (a * -(-a).exp_m1());
        let w_minus = w_plus * (-a).exp();
        let mut points = vec![
            SupportPoint {
                q: vec![a, b],
                p: w_plus,
            },
            SupportPoint {
                q: vec![-a, -b],
                p: w_minus,
            },
        ];
        if self.origin_weight > 0.0 {
            points.push(SupportPoint {
                q: vec![0.0, 0.0],
                p: self.origin_weight,
            });
        }
        FtDistribution::new(vec![1.0, 0.0], points)
            .expect("three-point family is valid by construction")
    }
}

/// Convenience wrapper returning only `var(z)` of the three-point family.
pub fn three_point_variance(mean_sigma: f64, mean_z: f64, a: f64) -> Result<f64, SearchError> {
    Ok(ThreePointFamily::new(mean_sigma, mean_z, a)?.variance_z())
}

// ---------------------------------------------------------------------------
// Four-point family
// ---------------------------------------------------------------------------

/// Minimal `var(z)` over the two-pair family with sigma support
/// `{±x_a, ±x_b}` straddling `x_bar` and prescribed first moments.
///
/// After rescaling `z = x_bar y / y_bar`, the pair weights follow from
/// normalization and the sigma moment, the remaining `z`-freedom enters the
/// second moment as a quadratic `A z_a^2 + 2 B z_a + C`, and the analytic
/// minimum `C - B^2/A` is mapped back to the original units.
pub fn four_point_min_variance(
    mean_sigma: f64,
    mean_z: f64,
    x_a: f64,
    x_b: f64,
) -> Result<f64, SearchError> {
    require_positive_sigma(mean_sigma)?;
    if mean_z == 0.0 || !mean_z.is_finite() {
        return Err(SearchError::ZeroMeanZ);
    }
    let x_bar = sigma_support_of(mean_sigma);
    if !(0.0 <= x_a && x_a < x_bar && x_bar < x_b) {
        return Err(SearchError::SupportOrdering { x_a, x_b, x_bar });
    }

    let t_a = (0.5 * x_a).tanh();
    let t_b = (0.5 * x_b).tanh();
    let s_a = x_a * t_a;
    let s_b = x_b * t_b;
    // weights from normalization and the sigma moment
    let q_a = (s_b - mean_sigma) / (s_b - s_a);
    let q_b = (mean_sigma - s_a) / (s_b - s_a);
    if q_a < 0.0 || q_b < 0.0 {
        return Err(SearchError::Infeasible(q_a.min(q_b)));
    }

    // z_b = x_b + lambda (z_a - x_a) with the coupling fixed by the moments
    let lambda = -q_a * t_a / (q_b * t_b);
    let quad_a = q_a + q_b * lambda * lambda;
    let quad_b = lambda * q_b * (x_b - lambda * x_a);
    let quad_c = q_b * (x_b - lambda * x_a) * (x_b - lambda * x_a);
    let second_z = quad_c - quad_b * quad_b / quad_a;

    // undo the z = x_bar y / y_bar rescaling
    let y_bar = mean_z / (0.5 * x_bar).tanh();
    let scale = y_bar / x_bar;
    Ok(scale * scale * second_z - mean_z * mean_z)
}

// ---------------------------------------------------------------------------
// Multistart simplex search
// ---------------------------------------------------------------------------

/// Outcome of [`numeric_min_search`].
#[derive(Debug, Clone)]
pub struct MinSearchResult {
    /// Best distribution found, over charges `(sigma, z)` with affinities
    /// `(1, 0)`.
    pub distribution: FtDistribution,
    /// Its `var(z)`.
    pub variance: f64,
    /// The theoretical floor `<z>^2 f(<sigma>)`.
    pub floor: f64,
}

impl MinSearchResult {
    pub fn gap(&self) -> f64 {
        self.variance - self.floor
    }
}

/// A symmetric-support candidate: pairs `(x_k, y_k)` with pair weights
/// `q_k`, where `P(±(x_k, y_k)) = q_k e^{±x_k/2} / (2 cosh(x_k/2))`.
#[derive(Debug, Clone)]
struct Candidate {
    pairs: Vec<(f64, f64, f64)>, // (x, y, q)
}

impl Candidate {
    fn to_distribution(&self) -> FtDistribution {
        let mut points = Vec::with_capacity(2 * self.pairs.len());
        for &(x, y, q) in &self.pairs {
            if q <= 0.0 {
                continue;
            }
            // q e^{±x/2} / (2 cosh(x/2)), in the overflow-free form
            let u = (-x).exp();
            points.push(SupportPoint {
                q: vec![x, y],
                p: q / (1.0 + u),
            });
            points.push(SupportPoint {
                q: vec![-x, -y],
                p: q * u / (1.0 + u),
            });
        }
        let total: f64 = points.iter().map(|pt| pt.p).sum();
        for pt in &mut points {
            pt.p /= total;
        }
        FtDistribution::new(vec![1.0, 0.0], points).expect("candidate pairs form a valid support")
    }
}

/// Decode a two-pair parameter vector `[x1, x2, y_free]`: the weights come
/// from normalization and the sigma moment, and the z moment fixes the `y`
/// of the heavier pair (stable pivot).
fn decode_two_pairs(params: &[f64], mean_sigma: f64, mean_z: f64) -> Option<[(f64, f64, f64); 2]> {
    let x1 = params[0].abs();
    let x2 = params[1].abs();
    let y_free = params[2];
    let t1 = (0.5 * x1).tanh();
    let t2 = (0.5 * x2).tanh();
    let s1 = x1 * t1;
    let s2 = x2 * t2;
    if (s2 - s1).abs() < 1e-13 {
        return None;
    }
    let q1 = (s2 - mean_sigma) / (s2 - s1);
    let q2 = (mean_sigma - s1) / (s2 - s1);
    if q1 < 0.0 || q2 < 0.0 {
        return None;
    }
    let (y1, y2) = if q1 * t1 >= q2 * t2 {
        if q1 * t1 <= 0.0 {
            return None;
        }
        let y1 = (mean_z - q2 * y_free * t2) / (q1 * t1);
        (y1, y_free)
    } else {
        let y2 = (mean_z - q1 * y_free * t1) / (q2 * t2);
        (y_free, y2)
    };
    Some([(x1, y1, q1), (x2, y2, q2)])
}

/// Decode a three-pair parameter vector `[x1, x2, x3, y1, y2, y3]`: all
/// three weights are solved from normalization and the two moments (Cramer
/// on the 3x3 system).
fn decode_three_pairs(
    params: &[f64],
    mean_sigma: f64,
    mean_z: f64,
) -> Option<[(f64, f64, f64); 3]> {
    let x = [params[0].abs(), params[1].abs(), params[2].abs()];
    let y = [params[3], params[4], params[5]];
    let t = [(0.5 * x[0]).tanh(), (0.5 * x[1]).tanh(), (0.5 * x[2]).tanh()];
    let sig = [x[0] * t[0], x[1] * t[1], x[2] * t[2]];
    let zet = [y[0] * t[0], y[1] * t[1], y[2] * t[2]];

    let det3 = |a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]| {
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
    };
    let ones = [1.0, 1.0, 1.0];
    let det = det3(&ones, &sig, &zet);
    if det.abs() < 1e-13 {
        return None;
    }
    let rhs = [1.0, mean_sigma, mean_z];
    let mut q = [0.0; 3];
    for (col, slot) in q.iter_mut().enumerate() {
        let mut ones_c = ones;
        let mut sig_c = sig;
        let mut zet_c = zet;
        ones_c[col] = rhs[0];
        sig_c[col] = rhs[1];
        zet_c[col] = rhs[2];
        *slot = det3(&ones_c, &sig_c, &zet_c) / det;
    }
    if q.iter().any(|&v| v < 0.0) {
        return None;
    }
    Some([(x[0], y[0], q[0]), (x[1], y[1], q[1]), (x[2], y[2], q[2])])
}

fn pairs_variance(pairs: &[(f64, f64, f64)], mean_z: f64) -> f64 {
    let second: f64 = pairs.iter().map(|&(_, y, q)| q * y * y).sum();
    second - mean_z * mean_z
}

/// Plain Nelder-Mead with deterministic tie-breaking (scans keep the lowest
/// index on ties). Infeasible points return `INFINITY` and are repelled
/// naturally. Work buffers are reused across iterations.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    objective: F,
    start: &[f64],
    step: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    use std::cmp::Ordering;
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step * v[i].abs().max(0.1);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| objective(v)).collect();

    let mut centroid = vec![0.0; n];
    let mut reflect = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut anchor = vec![0.0; n];

    for _ in 0..max_iter {
        let mut best = 0;
        let mut worst = 0;
        for i in 1..=n {
            if values[i].total_cmp(&values[best]) == Ordering::Less {
                best = i;
            }
            if values[i].total_cmp(&values[worst]) == Ordering::Greater {
                worst = i;
            }
        }
        let mut second_worst = if worst == 0 { 1 } else { 0 };
        for i in 0..=n {
            if i != worst && values[i].total_cmp(&values[second_worst]) == Ordering::Greater {
                second_worst = i;
            }
        }

        let spread = values[worst] - values[best];
        if spread.is_finite() && spread <= 1e-15 * (1.0 + values[best].abs()) {
            break;
        }

        for (j, slot) in centroid.iter_mut().enumerate() {
            let mut sum = 0.0;
            for (i, point) in simplex.iter().enumerate() {
                if i != worst {
                    sum += point[j];
                }
            }
            *slot = sum / n as f64;
        }
        for j in 0..n {
            reflect[j] = 2.0 * centroid[j] - simplex[worst][j];
        }
        let f_reflect = objective(&reflect);

        if f_reflect < values[best] {
            for j in 0..n {
                trial[j] = 3.0 * centroid[j] - 2.0 * simplex[worst][j];
            }
            let f_expand = objective(&trial);
            if f_expand < f_reflect {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_expand;
            } else {
                simplex[worst].copy_from_slice(&reflect);
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[second_worst] {
            simplex[worst].copy_from_slice(&reflect);
            values[worst] = f_reflect;
        } else {
            for j in 0..n {
                trial[j] = 0.5 * (centroid[j] + simplex[worst][j]);
            }
            let f_contract = objective(&trial);
            if f_contract < values[worst] {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_contract;
            } else {
                anchor.copy_from_slice(&simplex[best]);
                for (i, point) in simplex.iter_mut().enumerate() {
                    if i == best {
                        continue;
                    }
                    for (coord, &base) in point.iter_mut().zip(&anchor) {
                        *coord = 0.5 * (base + *coord);
                    }
                    values[i] = objective(point);
                }
            }
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    (simplex[best].clone(), values[best])
}

fn lexicographic_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Minimize `var(z)` over exchange-symmetric distributions with up to
/// `max_pairs` symmetric support pairs and the prescribed first moments.
///
/// One pair admits exactly one solution (the minimal distribution), so the
/// search is only run for two and three pairs, from `MULTISTART_COUNT`
/// seeded random starts. The winner is the smallest variance found, ties
/// broken by lexicographic parameter order.
pub fn numeric_min_search(
    mean_sigma: f64,
    mean_z: f64,
    max_pairs: usize,
    seed: u64,
) -> Result<MinSearchResult, SearchError> {
    require_positive_sigma(mean_sigma)?;
    if max_pairs == 0 || max_pairs > 3 {
        return Err(SearchError::PairCount(max_pairs));
    }

    let floor = if mean_z == 0.0 {
        0.0
    } else {
        mean_z * mean_z * tight_bound(mean_sigma).expect("mean_sigma > 0")
    };

    // one pair is fully determined; zero mean z makes it the global optimum
    // outright (variance 0 is unbeatable)
    let minimal = build_minimal(mean_sigma, mean_z).expect("moments validated");
    let minimal_dist = minimal.to_distribution();
    let minimal_var = minimal_dist.moments().covariance[(1, 1)];
    if max_pairs == 1 || mean_z == 0.0 {
        return Ok(MinSearchResult {
            distribution: minimal_dist,
            variance: minimal_var,
            floor,
        });
    }

    let x_bar = sigma_support_of(mean_sigma);
    let y_bar = mean_z / (0.5 * x_bar).tanh();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best: Option<(f64, Vec<f64>, Candidate)> = None;
    for _ in 0..MULTISTART_COUNT {
        // the first two sigma supports straddle x_bar, which makes the
        // two-pair weight solve feasible at every start
        let below = x_bar * rng.random_range(-1.2f64..0.0).exp();
        let above = x_bar * rng.random_range(0.0f64..1.2).exp();
        let start: Vec<f64> = if max_pairs == 2 {
            vec![below, above, y_bar * (1.0 + rng.random_range(-1.5..1.5))]
        } else {
            let mut v = vec![below, above, x_bar * rng.random_range(-1.2f64..1.2).exp()];
            v.extend((0..3).map(|_| y_bar * (1.0 + rng.random_range(-1.5..1.5))));
            v
        };

        let objective = |params: &[f64]| -> f64 {
            let var = if max_pairs == 2 {
                decode_two_pairs(params, mean_sigma, mean_z)
                    .map(|pairs| pairs_variance(&pairs, mean_z))
            } else {
                decode_three_pairs(params, mean_sigma, mean_z)
                    .map(|pairs| pairs_variance(&pairs, mean_z))
            };
            var.unwrap_or(f64::INFINITY)
        };

        let (params, value) = nelder_mead(objective, &start, 0.25, MAX_SIMPLEX_ITER);
        if !value.is_finite() {
            continue;
        }
        let pairs: Vec<(f64, f64, f64)> = if max_pairs == 2 {
            decode_two_pairs(&params, mean_sigma, mean_z).map(|p| p.to_vec())
        } else {
            decode_three_pairs(&params, mean_sigma, mean_z).map(|p| p.to_vec())
        }
        .expect("finite objective value implies a feasible decode");
        let cand = Candidate { pairs };

        let better = match &best {
            None => true,
            Some((best_value, best_params, _)) => {
                value < *best_value
                    || (value == *best_value && lexicographic_less(&params, best_params))
            }
        };
        if better {
            best = Some((value, params, cand));
        }
    }

    // every start is feasible by construction, so this fallback to the
    // closed-form solution is a safety net rather than an expected path
    let (distribution, variance) = match best {
        Some((_, _, cand)) => {
            let d = cand.to_distribution();
            let v = d.moments().covariance[(1, 1)];
            (d, v)
        }
        None => (minimal_dist, minimal_var),
    };
    Ok(MinSearchResult {
        distribution,
        variance,
        floor,
    })
}
