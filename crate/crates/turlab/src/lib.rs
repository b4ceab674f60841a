//! Uncertainty relations from exchange fluctuation theorems.
//!
//! Discrete multivariate charge distributions with thermodynamic
//! affinities, the tight saturable bound on any charge's signal-to-noise
//! ratio, its matrix-valued extension to covariances, the two-point
//! distribution that attains the bound, an exactly solvable two-qubit SWAP
//! Otto engine, and a brute-force search corroborating minimality on small
//! supports.
//!
//! The type at the center is [`FtDistribution`]; everything else consumes
//! either it or its [`MomentReport`].
//!
//! ```
//! use turlab::{build_minimal, evaluate_bounds, DEFAULT_TOL};
//!
//! let dist = build_minimal(1.0, 0.5).unwrap().to_distribution();
//! let verdict = evaluate_bounds(&dist.moments(), DEFAULT_TOL).unwrap();
//! assert!(verdict.theorems_pass());
//! // saturation: var(Z) equals <Z>^2 f(<sigma>)
//! assert!(verdict.scalar_tur_margins[1].abs() < 1e-10);
//! ```

pub mod bounds;
pub mod dist;
pub mod engine;
pub mod fmt;
pub mod minimal;
pub mod search;
pub mod special;

pub use bounds::{evaluate_bounds, BoundVerdict, SignCondition, DEFAULT_TOL};
pub use dist::{random_ft_distribution, FtDistribution, MomentReport, SupportPoint};
pub use engine::{
    build_engine_distribution, cgf, cgf_derivative_check, classify_regime, sweep, EngineParams,
    EngineReport, Regime, SweepRow,
};
pub use minimal::{build_minimal, MinimalDistribution};
pub use search::{four_point_min_variance, numeric_min_search, three_point_variance};
pub use special::{classical_bound, hasegawa_bound, inv_xtanhx, tight_bound};
