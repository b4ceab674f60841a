//! Discrete multivariate charge distributions with thermodynamic affinities.
//!
//! An [`FtDistribution`] is a finite joint distribution of `n` exchanged
//! charges `Q_1..Q_n` together with an affinity vector `A`. Its support is
//! symmetric under negation, and a well-behaved distribution satisfies the
//! exchange symmetry `P(q)/P(-q) = exp(A . q)`, which is checked by
//! [`FtDistribution::validate_ft`]. The entropy production of a support
//! point is the dimensionless combination `sigma = A . q`.
//!
//! Structural requirements (normalization, symmetric support) are enforced
//! at construction, so every `FtDistribution` in memory is structurally
//! valid; the exchange symmetry itself is a separate, tolerance-based check.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Tolerance on the probability sum at construction.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("projection weight vector has length {got}, expected {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("point {index} has invalid probability {p}")]
    InvalidProbability { index: usize, p: f64 },
    #[error("point {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("affinity {index} is not finite")]
    NonFiniteAffinity { index: usize },
    #[error("probabilities sum to {sum}, more than {tol} away from 1")]
    NotNormalized { sum: f64, tol: f64 },
    #[error("support is not symmetric: point {point:?} with p > 0 has no negated partner")]
    AsymmetricSupport { point: Vec<f64> },
    #[error("distribution has an empty support")]
    EmptySupport,
    #[error("failed to parse distribution JSON: {0}")]
    Json(String),
}

/// One support point: charge vector and probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint {
    pub q: Vec<f64>,
    pub p: f64,
}

/// A discrete joint charge distribution with affinities.
#[derive(Debug, Clone, PartialEq)]
pub struct FtDistribution {
    affinities: Vec<f64>,
    points: Vec<SupportPoint>,
}

/// Result of the exchange-symmetry check.
#[derive(Debug, Clone, Serialize)]
pub struct FtValidation {
    /// Largest observed `|ln P(q) - ln P(-q) - A.q|` over paired points.
    pub max_deviation: f64,
    /// Charge vector of the worst pair, if any pair was checked.
    pub worst_point: Option<Vec<f64>>,
    /// A point with `p > 0` whose partner has `p = 0` (undefined FT ratio).
    pub undefined_ratio_point: Option<Vec<f64>>,
    /// Tolerance the check ran at.
    pub tol: f64,
}

impl FtValidation {
    pub fn passed(&self) -> bool {
        self.undefined_ratio_point.is_none() && self.max_deviation <= self.tol
    }
}

/// First and second moments of a distribution.
#[derive(Debug, Clone)]
pub struct MomentReport {
    /// Mean charge vector.
    pub mean: DVector<f64>,
    /// Covariance matrix `C_ij = <Q_i Q_j> - <Q_i><Q_j>`.
    pub covariance: DMatrix<f64>,
    /// Mean entropy production `sum_i A_i <Q_i>`.
    pub mean_sigma: f64,
}

/// Joint distribution of entropy production and one projected charge.
///
/// Stored as a two-charge [`FtDistribution`] over `(sigma, z)` with affinity
/// vector `(1, 0)`, so `A . q` recovers `sigma` exactly and every validator
/// applies unchanged.
#[derive(Debug, Clone)]
pub struct ProjectedDistribution {
    weights: Vec<f64>,
    dist: FtDistribution,
}

impl ProjectedDistribution {
    /// Projection coefficients that produced this distribution.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The underlying `(sigma, z)` distribution with affinities `(1, 0)`.
    pub fn distribution(&self) -> &FtDistribution {
        &self.dist
    }

    /// Support as `(sigma, z, p)` triples.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.dist.points().iter().map(|pt| (pt.q[0], pt.q[1], pt.p))
    }
}

/// Canonical key for a coordinate: sign split off, magnitude rounded to
/// 12 significant digits. Makes negation pairing and point coalescing
/// deterministic without epsilon-ball matching.
fn canon_component(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v < 0.0 {
        format!("-{:.11e}", -v)
    } else {
        format!("{:.11e}", v)
    }
}

fn canon_key(q: &[f64]) -> String {
    let parts: Vec<String> = q.iter().map(|&v| canon_component(v)).collect();
    parts.join(",")
}

fn negated(q: &[f64]) -> Vec<f64> {
    q.iter().map(|&v| -v).collect()
}

impl FtDistribution {
    /// Build a distribution, enforcing the structural invariants.
    ///
    /// Probabilities must be finite and non-negative and sum to 1 within
    /// [`NORMALIZATION_TOL`]; every point with `p > 0` must have its negation
    /// present in the support (possibly with zero probability). Points whose
    /// coordinates agree to 12 significant digits are coalesced by summing
    /// their probabilities.
    pub fn new(affinities: Vec<f64>, points: Vec<SupportPoint>) -> Result<Self, DistError> {
        let n = affinities.len();
        for (index, a) in affinities.iter().enumerate() {
            if !a.is_finite() {
                return Err(DistError::NonFiniteAffinity { index });
            }
        }
        if points.is_empty() {
            return Err(DistError::EmptySupport);
        }

        let mut merged: Vec<SupportPoint> = Vec::with_capacity(points.len());
        let mut index_of: HashMap<String, usize> = HashMap::new();
        let mut sum = 0.0;
        for (index, pt) in points.into_iter().enumerate() {
            if pt.q.len() != n {
                return Err(DistError::DimensionMismatch {
                    index,
                    got: pt.q.len(),
                    expected: n,
                });
            }
            if pt.q.iter().any(|v| !v.is_finite()) {
                return Err(DistError::NonFiniteCoordinate { index });
            }
            if !pt.p.is_finite() || pt.p < 0.0 {
                return Err(DistError::InvalidProbability { index, p: pt.p });
            }
            sum += pt.p;
            match index_of.entry(canon_key(&pt.q)) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    merged[*e.get()].p += pt.p;
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(merged.len());
                    merged.push(pt);
                }
            }
        }

        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(DistError::NotNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }

        for pt in &merged {
            if pt.p > 0.0 && !index_of.contains_key(&canon_key(&negated(&pt.q))) {
                return Err(DistError::AsymmetricSupport {
                    point: pt.q.clone(),
                });
            }
        }

        Ok(Self {
            affinities,
            points: merged,
        })
    }

    /// Number of charges.
    pub fn num_charges(&self) -> usize {
        self.affinities.len()
    }

    pub fn affinities(&self) -> &[f64] {
        &self.affinities
    }

    pub fn points(&self) -> &[SupportPoint] {
        &self.points
    }

    /// Entropy production of one support point, `A . q`.
    pub fn sigma_of(&self, q: &[f64]) -> f64 {
        self.affinities.iter().zip(q).map(|(a, v)| a * v).sum()
    }

    /// Check the exchange symmetry `ln P(q) - ln P(-q) = A . q` on every
    /// support pair with both probabilities positive. A point with `p > 0`
    /// whose partner has `p = 0` makes the ratio undefined and fails hard.
    pub fn validate_ft(&self, tol: f64) -> FtValidation {
        let mut prob_of: HashMap<String, f64> = HashMap::new();
        for pt in &self.points {
            *prob_of.entry(canon_key(&pt.q)).or_insert(0.0) += pt.p;
        }

        let mut max_deviation = 0.0f64;
        let mut worst_point = None;
        let mut undefined_ratio_point = None;
        for pt in &self.points {
            if pt.p == 0.0 {
                continue;
            }
            let partner = prob_of
                .get(&canon_key(&negated(&pt.q)))
                .copied()
                .unwrap_or(0.0);
            if partner == 0.0 {
                if undefined_ratio_point.is_none() {
                    undefined_ratio_point = Some(pt.q.clone());
                }
                continue;
            }
            let dev = (pt.p.ln() - partner.ln() - self.sigma_of(&pt.q)).abs();
            if dev > max_deviation {
                max_deviation = dev;
                worst_point = Some(pt.q.clone());
            }
        }

        FtValidation {
            max_deviation,
            worst_point,
            undefined_ratio_point,
            tol,
        }
    }

    /// Exact first and second moments by weighted sums over the support.
    pub fn moments(&self) -> MomentReport {
        let n = self.num_charges();
        let mut mean = DVector::zeros(n);
        for pt in &self.points {
            for i in 0..n {
                mean[i] += pt.p * pt.q[i];
            }
        }
        let mut covariance = DMatrix::zeros(n, n);
        for pt in &self.points {
            for i in 0..n {
                for j in i..n {
                    covariance[(i, j)] += pt.p * pt.q[i] * pt.q[j];
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let c = covariance[(i, j)] - mean[i] * mean[j];
                covariance[(i, j)] = c;
                covariance[(j, i)] = c;
            }
        }
        let mean_sigma = self
            .affinities
            .iter()
            .zip(mean.iter())
            .map(|(a, m)| a * m)
            .sum();
        MomentReport {
            mean,
            covariance,
            mean_sigma,
        }
    }

    /// Change of variables to `(sigma, z) = (A . q, z_weights . q)`.
    ///
    /// Points mapping to the same `(sigma, z)` (12-significant-digit
    /// canonical equality) are coalesced by summing probabilities. The
    /// result keeps the exchange symmetry of the source.
    pub fn project(&self, z_weights: &[f64]) -> Result<ProjectedDistribution, DistError> {
        let n = self.num_charges();
        if z_weights.len() != n {
            return Err(DistError::WeightLength {
                got: z_weights.len(),
                expected: n,
            });
        }
        let points = self
            .points
            .iter()
            .map(|pt| {
                let sigma = self.sigma_of(&pt.q);
                let z: f64 = z_weights.iter().zip(&pt.q).map(|(w, v)| w * v).sum();
                SupportPoint {
                    q: vec![sigma, z],
                    p: pt.p,
                }
            })
            .collect();
        let dist = FtDistribution::new(vec![1.0, 0.0], points)?;
        Ok(ProjectedDistribution {
            weights: z_weights.to_vec(),
            dist,
        })
    }

    /// Marginal distribution of the entropy production, as a one-charge
    /// distribution with affinity 1 (so its own `A . q` is sigma again).
    pub fn entropy_production_distribution(&self) -> FtDistribution {
        let points = self
            .points
            .iter()
            .map(|pt| SupportPoint {
                q: vec![self.sigma_of(&pt.q)],
                p: pt.p,
            })
            .collect();
        FtDistribution::new(vec![1.0], points)
            .expect("sigma marginal of a valid distribution is valid")
    }

    /// The integral fluctuation average `<exp(-sigma)>`, equal to 1 for any
    /// distribution satisfying the exchange symmetry.
    pub fn mean_exp_neg_sigma(&self) -> f64 {
        self.points
            .iter()
            .map(|pt| pt.p * (-self.sigma_of(&pt.q)).exp())
            .sum()
    }
}

// ---------------------------------------------------------------------------
// JSON document format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DistributionDoc {
    affinities: Vec<f64>,
    points: Vec<SupportPoint>,
}

impl FtDistribution {
    /// Parse the standard JSON document
    /// `{"affinities": [...], "points": [{"q": [...], "p": ...}, ...]}`.
    ///
    /// Zero-probability points are permitted in files and dropped on load.
    pub fn from_json_str(s: &str) -> Result<Self, DistError> {
        let doc: DistributionDoc =
            serde_json::from_str(s).map_err(|e| DistError::Json(e.to_string()))?;
        let points = doc.points.into_iter().filter(|pt| pt.p != 0.0).collect();
        FtDistribution::new(doc.affinities, points)
    }

    /// Serialize to the standard JSON document format.
    pub fn to_json_string(&self) -> String {
        let doc = DistributionDoc {
            affinities: self.affinities.clone(),
            points: self.points.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("distribution serializes")
    }
}

// ---------------------------------------------------------------------------
// Random FT distributions (exchange symmetry by construction)
// ---------------------------------------------------------------------------

/// Sample a random distribution satisfying the exchange symmetry exactly.
///
/// Symmetric support pairs `(q, -q)` get weights `s(q) e^{A.q/2}` with a
/// symmetric positive `s`, which enforces `P(q)/P(-q) = e^{A.q}` by
/// construction; the origin is included with probability 1/2. Support size
/// is at most `2 * max_pairs + 1` points.
pub fn random_ft_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    num_charges: usize,
    max_pairs: usize,
) -> FtDistribution {
    assert!(num_charges >= 1 && max_pairs >= 1);
    let affinities: Vec<f64> = (0..num_charges)
        .map(|_| rng.random_range(-1.5..1.5))
        .collect();
    let n_pairs = rng.random_range(1..=max_pairs);
    let with_origin = rng.random_bool(0.5);

    let mut raw: Vec<(Vec<f64>, f64)> = Vec::new();
    for _ in 0..n_pairs {
        let q: Vec<f64> = (0..num_charges)
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        let s = rng.random_range(0.05..1.0);
        let sigma: f64 = affinities.iter().zip(&q).map(|(a, v)| a * v).sum();
        raw.push((q.clone(), s * (0.5 * sigma).exp()));
        raw.push((negated(&q), s * (-0.5 * sigma).exp()));
    }
    if with_origin {
        raw.push((vec![0.0; num_charges], rng.random_range(0.05..1.0)));
    }

    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    let points = raw
        .into_iter()
        .map(|(q, w)| SupportPoint { q, p: w / total })
        .collect();
    FtDistribution::new(affinities, points).expect("construction yields a valid distribution")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_point(a: f64, q: f64) -> FtDistribution {
        // single charge, affinity a, support {q, -q} with exact FT weights
        let w_plus = f64::exp(0.5 * a * q);
        let w_minus = f64::exp(-0.5 * a * q);
        let total = w_plus + w_minus;
        FtDistribution::new(
            vec![a],
            vec![
                SupportPoint {
                    q: vec![q],
                    p: w_plus / total,
                },
                SupportPoint {
                    q: vec![-q],
                    p: w_minus / total,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn singleton_origin_passes() {
        let d = FtDistribution::new(
            vec![0.7, -0.3],
            vec![SupportPoint {
                q: vec![0.0, 0.0],
                p: 1.0,
            }],
        )
        .unwrap();
        let v = d.validate_ft(1e-12);
        assert!(v.passed());
        assert_eq!(v.max_deviation, 0.0);
    }

    #[test]
    fn exact_pair_passes_and_scaled_pair_fails() {
        let d = two_point(0.8, 1.3);
        assert!(d.validate_ft(1e-12).passed());

        // p(q)/p(-q) = 2 e^{A q}: deviation should be ln 2
        let a: f64 = 0.8;
        let q: f64 = 1.3;
        let w_plus = 2.0 * (0.5 * a * q).exp();
        let w_minus = (-0.5 * a * q).exp();
        let total = w_plus + w_minus;
        let bad = FtDistribution::new(
            vec![a],
            vec![
                SupportPoint {
                    q: vec![q],
                    p: w_plus / total,
                },
                SupportPoint {
                    q: vec![-q],
                    p: w_minus / total,
                },
            ],
        )
        .unwrap();
        let v = bad.validate_ft(1e-12);
        assert!(!v.passed());
        assert!((v.max_deviation - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_partner_is_hard_failure() {
        let d = FtDistribution::new(
            vec![1.0],
            vec![
                SupportPoint {
                    q: vec![1.0],
                    p: 0.5,
                },
                SupportPoint {
                    q: vec![-1.0],
                    p: 0.0,
                },
                SupportPoint {
                    q: vec![0.0],
                    p: 0.5,
                },
            ],
        )
        .unwrap();
        let v = d.validate_ft(1e-9);
        assert!(!v.passed());
        assert_eq!(v.undefined_ratio_point, Some(vec![1.0]));
    }

    #[test]
    fn structural_errors_are_distinct() {
        // unnormalized
        let err = FtDistribution::new(
            vec![1.0],
            vec![SupportPoint {
                q: vec![0.0],
                p: 0.5,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, DistError::NotNormalized { .. }));

        // asymmetric support
        let err = FtDistribution::new(
            vec![1.0],
            vec![
                SupportPoint {
                    q: vec![1.0],
                    p: 0.5,
                },
                SupportPoint {
                    q: vec![2.0],
                    p: 0.5,
                },
            ],
        )
        .unwrap_err();
        assert!(matches!(err, DistError::AsymmetricSupport { .. }));
    }

    #[test]
    fn duplicate_points_coalesce() {
        let d = FtDistribution::new(
            vec![0.0],
            vec![
                SupportPoint {
                    q: vec![0.0],
                    p: 0.25,
                },
                SupportPoint {
                    q: vec![0.0],
                    p: 0.75,
                },
            ],
        )
        .unwrap();
        assert_eq!(d.points().len(), 1);
        assert_eq!(d.points()[0].p, 1.0);
    }

    #[test]
    fn moments_of_symmetric_zero_affinity() {
        let d = FtDistribution::new(
            vec![0.0, 0.0],
            vec![
                SupportPoint {
                    q: vec![1.0, -2.0],
                    p: 0.5,
                },
                SupportPoint {
                    q: vec![-1.0, 2.0],
                    p: 0.5,
                },
            ],
        )
        .unwrap();
        let m = d.moments();
        assert_eq!(m.mean[0], 0.0);
        assert_eq!(m.mean[1], 0.0);
        assert_eq!(m.mean_sigma, 0.0);
        assert!((m.covariance[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((m.covariance[(0, 1)] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn minimal_two_point_moments() {
        // support {(2,1), (-2,-1)} over (sigma, z), affinities (1, 0):
        // <sigma> = 2 tanh(1), <z> = tanh(1), var(z) = 1 - tanh^2(1)
        let d = FtDistribution::new(
            vec![1.0, 0.0],
            vec![
                SupportPoint {
                    q: vec![2.0, 1.0],
                    p: 1.0f64.exp() / (2.0 * 1.0f64.cosh()),
                },
                SupportPoint {
                    q: vec![-2.0, -1.0],
                    p: (-1.0f64).exp() / (2.0 * 1.0f64.cosh()),
                },
            ],
        )
        .unwrap();
        let m = d.moments();
        let t = 1.0f64.tanh();
        assert!((m.mean_sigma - 2.0 * t).abs() < 1e-14);
        assert!((m.mean[1] - t).abs() < 1e-14);
        assert!((m.covariance[(1, 1)] - (1.0 - t * t)).abs() < 1e-14);
        assert!((m.mean_sigma - 1.5231883119115298).abs() < 1e-13);
        assert!((m.covariance[(1, 1)] - 0.4199743416140261).abs() < 1e-13);
    }

    #[test]
    fn project_with_affinity_weights_gives_sigma_twice() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = random_ft_distribution(&mut rng, 3, 4);
        let a = d.affinities().to_vec();
        let proj = d.project(&a).unwrap();
        for (sigma, z, _) in proj.points() {
            assert!((sigma - z).abs() < 1e-14);
        }
    }

    #[test]
    fn project_unit_vector_recovers_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = random_ft_distribution(&mut rng, 2, 3);
        let proj = d.project(&[0.0, 1.0]).unwrap();
        let m = d.moments();
        let pm = proj.distribution().moments();
        assert!((pm.mean[1] - m.mean[1]).abs() < 1e-14);
        assert!((pm.covariance[(1, 1)] - m.covariance[(1, 1)]).abs() < 1e-14);
    }

    #[test]
    fn project_coalesces_equal_images() {
        // two distinct points with equal (sigma, z) merge
        let d = FtDistribution::new(
            vec![1.0, 1.0],
            vec![
                SupportPoint {
                    q: vec![1.0, -1.0],
                    p: 0.25,
                },
                SupportPoint {
                    q: vec![-1.0, 1.0],
                    p: 0.25,
                },
                SupportPoint {
                    q: vec![2.0, -2.0],
                    p: 0.25,
                },
                SupportPoint {
                    q: vec![-2.0, 2.0],
                    p: 0.25,
                },
            ],
        )
        .unwrap();
        // z weights equal affinities: every point maps to (0, 0)
        let proj = d.project(&[1.0, 1.0]).unwrap();
        assert_eq!(proj.distribution().points().len(), 1);
        let (sigma, z, p) = proj.points().next().unwrap();
        assert_eq!((sigma, z, p), (0.0, 0.0, 1.0));
    }

    #[test]
    fn project_dimension_mismatch() {
        let d = two_point(0.5, 1.0);
        assert!(matches!(
            d.project(&[1.0, 2.0]),
            Err(DistError::WeightLength { .. })
        ));
    }

    #[test]
    fn sigma_marginal_and_integral_ft() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let d = random_ft_distribution(&mut rng, 3, 5);
            let s = d.entropy_production_distribution();
            assert!(s.validate_ft(1e-10).passed());
            assert!((d.mean_exp_neg_sigma() - 1.0).abs() < 1e-12);
            assert!((s.mean_exp_neg_sigma() - 1.0).abs() < 1e-12);
            assert!(s.moments().mean_sigma >= -1e-14);
        }
    }

    #[test]
    fn support_on_zero_sigma_hyperplane_has_zero_mean_sigma() {
        // nonzero affinities, but every point satisfies A.q = 0: the
        // symmetry then forces equal pair weights and all means vanish
        let d = FtDistribution::new(
            vec![1.0, 1.0],
            vec![
                SupportPoint {
                    q: vec![1.0, -1.0],
                    p: 0.5,
                },
                SupportPoint {
                    q: vec![-1.0, 1.0],
                    p: 0.5,
                },
            ],
        )
        .unwrap();
        assert!(d.validate_ft(1e-15).passed());
        let m = d.moments();
        assert_eq!(m.mean_sigma, 0.0);
        assert_eq!(m.mean[0], 0.0);
    }

    #[test]
    fn sigma_marginal_zero_affinity() {
        let d = FtDistribution::new(
            vec![0.0],
            vec![
                SupportPoint {
                    q: vec![3.0],
                    p: 0.5,
                },
                SupportPoint {
                    q: vec![-3.0],
                    p: 0.5,
                },
            ],
        )
        .unwrap();
        let s = d.entropy_production_distribution();
        assert_eq!(s.points().len(), 1);
        assert_eq!(s.points()[0].q, vec![0.0]);
        assert_eq!(s.points()[0].p, 1.0);
    }

    #[test]
    fn json_round_trip_drops_zero_probability_points() {
        let json = r#"{
            "affinities": [0.5],
            "points": [
                {"q": [1.0], "p": 0.6224593312018546},
                {"q": [-1.0], "p": 0.3775406687981454},
                {"q": [9.0], "p": 0.0}
            ]
        }"#;
        let d = FtDistribution::from_json_str(json).unwrap();
        assert_eq!(d.points().len(), 2);
        assert!(d.validate_ft(1e-12).passed());
        let back = FtDistribution::from_json_str(&d.to_json_string()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_malformed_reports_field() {
        let err = FtDistribution::from_json_str(r#"{"points": []}"#).unwrap_err();
        match err {
            DistError::Json(msg) => assert!(msg.contains("affinities"), "got: {msg}"),
            other => panic!("expected Json error, got {other:?}"),
        }
    }

    #[test]
    fn random_distributions_satisfy_ft_and_moment_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(1..=4);
            let d = random_ft_distribution(&mut rng, n, 5);
            assert!(d.validate_ft(1e-10).passed());
            let m = d.moments();
            assert!(m.mean_sigma >= -1e-13);

            // projected moments equal linear images of the full moments
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let proj = d.project(&z).unwrap();
            let pm = proj.distribution().moments();
            let mean_z: f64 = z.iter().zip(m.mean.iter()).map(|(w, q)| w * q).sum();
            let mut var_z = 0.0;
            for i in 0..n {
                for j in 0..n {
                    var_z += z[i] * m.covariance[(i, j)] * z[j];
                }
            }
            assert!((pm.mean[1] - mean_z).abs() <= 1e-12 * (1.0 + mean_z.abs()));
            assert!((pm.covariance[(1, 1)] - var_z).abs() <= 1e-12 * (1.0 + var_z.abs()));
            assert!(proj.distribution().validate_ft(1e-10).passed());
        }
    }
}
