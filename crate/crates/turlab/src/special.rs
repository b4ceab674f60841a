//! Scalar bound functions for exchange-fluctuation-theorem uncertainty relations.
//!
//! The central object is [`tight_bound`], the saturable lower bound on the
//! inverse signal-to-noise ratio of any exchanged charge, expressed through
//! the inverse of `x tanh(x)` (see [`inv_xtanhx`]). Two looser comparison
//! bounds, [`classical_bound`] (`2/x`) and [`hasegawa_bound`] (`2/(e^x - 1)`),
//! are provided for side-by-side evaluation.

use thiserror::Error;

/// Relative tolerance of the `inv_xtanhx` inversion.
pub const INVERSION_TOL: f64 = 1e-12;

const MAX_NEWTON_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("argument must be finite and non-negative, got {0}")]
    NegativeOrNonFinite(f64),
    #[error("argument must be finite and strictly positive, got {0}")]
    NonPositive(f64),
}

/// Inverse of `y tanh(y)` on `y >= 0`.
///
/// Returns the unique `y >= 0` with `y*tanh(y) = s`, accurate to
/// `|y*tanh(y) - s| <= INVERSION_TOL * max(1, s)`.
///
/// Uses a bracketed Newton iteration with bisection fallback. The root is
/// always contained in `[max(s, sqrt(s)), s + 1]`: `y tanh(y) < min(y, y^2)`
/// for `y > 0` gives the lower end, and `(s+1) tanh(s+1) >= s` follows from
/// `e^{2(s+1)} + 1 >= 2(s+1)`.
pub fn inv_xtanhx(s: f64) -> Result<f64, SpecialError> {
    if !s.is_finite() || s < 0.0 {
        return Err(SpecialError::NegativeOrNonFinite(s));
    }
    if s == 0.0 {
        return Ok(0.0);
    }

    let target = |y: f64| y * y.tanh() - s;
    let mut lo = s.max(s.sqrt());
    let mut hi = s + 1.0;
    // iterate to machine precision relative to s, so the round trip stays
    // accurate even for tiny arguments
    let tol = 4.0 * f64::EPSILON * s;

    // tanh saturates to 1 in double precision near y ~ 19, after which
    // y*tanh(y) == y exactly and the root is s itself.
    if lo.tanh() == 1.0 {
        return Ok(s);
    }

    let mut y = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON_ITER {
        let h = target(y);
        if h.abs() <= tol {
            return Ok(y);
        }
        if h > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let th = y.tanh();
        let sech2 = 1.0 - th * th;
        let deriv = th + y * sech2;
        let step = h / deriv;
        let mut next = y - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == y {
            break;
        }
        y = next;
    }
    Ok(y)
}

/// The tight signal-to-noise bound `csch^2(inv_xtanhx(x/2))`.
///
/// Strictly decreasing and positive on `x > 0`, with the small-`x` behaviour
/// `2/x - 2/3`. At `x = 0` the bound diverges; an explicit `+inf` sentinel is
/// returned so that callers can branch on zero dissipation instead of
/// handling an error.
pub fn tight_bound(x: f64) -> Result<f64, SpecialError> {
    if !x.is_finite() || x < 0.0 {
        return Err(SpecialError::NegativeOrNonFinite(x));
    }
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    let y = inv_xtanhx(0.5 * x)?;
    let sh = y.sinh();
    Ok(1.0 / (sh * sh))
}

/// Comparison bound `2/x`.
pub fn classical_bound(x: f64) -> Result<f64, SpecialError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(SpecialError::NonPositive(x));
    }
    Ok(2.0 / x)
}

/// Comparison bound `2/(e^x - 1)`.
pub fn hasegawa_bound(x: f64) -> Result<f64, SpecialError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(SpecialError::NonPositive(x));
    }
    Ok(2.0 / x.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain bisection on y*tanh(y) = s.
    fn bisect_inv_xtanhx(s: f64) -> f64 {
        assert!(s > 0.0);
        let mut lo = 0.0f64;
        let mut hi = s + 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.tanh() < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn inverse_at_zero() {
        assert_eq!(inv_xtanhx(0.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_at_one_matches_bisection_oracle() {
        // bisection oracle to 1e-10: 1.19967864025773...
        let y = inv_xtanhx(1.0).unwrap();
        assert!((y - 1.1996786402577338).abs() < 1e-10);
        assert!((y - bisect_inv_xtanhx(1.0)).abs() < 1e-10);
    }

    #[test]
    fn inverse_at_tanh_one_is_one() {
        // forced by 1*tanh(1) = tanh(1)
        let y = inv_xtanhx(1.0f64.tanh()).unwrap();
        assert!((y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_rejects_bad_input() {
        assert!(inv_xtanhx(-1.0).is_err());
        assert!(inv_xtanhx(f64::NAN).is_err());
        assert!(inv_xtanhx(f64::INFINITY).is_err());
    }

    #[test]
    fn round_trip_log_grid() {
        let n = 1000;
        for k in 0..n {
            let t = k as f64 / (n - 1) as f64;
            let s = 10f64.powf(-8.0 + 11.0 * t); // 1e-8 ..= 1e3
            let y = inv_xtanhx(s).unwrap();
            let back = y * y.tanh();
            assert!(
                (back - s).abs() <= INVERSION_TOL * s.max(1.0),
                "round trip failed at s={s}: got {back}"
            );
        }
    }

    #[test]
    fn tight_bound_at_forced_points() {
        // inv_xtanhx(tanh(1)) = 1, so tight_bound(2 tanh 1) = 1/sinh^2(1)
        let x = 2.0 * 1.0f64.tanh();
        let expected = 1.0 / (1.0f64.sinh() * 1.0f64.sinh()); // 0.7240616609663105
        assert!((tight_bound(x).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.7240616609663105).abs() < 1e-15);
    }

    #[test]
    fn tight_bound_at_two_matches_oracle() {
        // csch^2 of the bisection root of y*tanh(y) = 1
        let y = bisect_inv_xtanhx(1.0);
        let expected = 1.0 / (y.sinh() * y.sinh()); // 0.4392288398906452
        let got = tight_bound(2.0).unwrap();
        assert!((got - expected).abs() < 1e-10);
        assert!((got - 0.4392288398906452).abs() < 1e-10);
    }

    #[test]
    fn tight_bound_zero_is_infinite_sentinel() {
        assert_eq!(tight_bound(0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn tight_bound_rejects_negative() {
        assert!(tight_bound(-0.1).is_err());
    }

    #[test]
    fn comparison_bounds() {
        assert_eq!(classical_bound(2.0).unwrap(), 1.0);
        assert!((hasegawa_bound(3.0f64.ln()).unwrap() - 1.0).abs() < 1e-14);
        assert!(classical_bound(0.0).is_err());
        assert!(hasegawa_bound(-1.0).is_err());
    }

    #[test]
    fn ordering_at_two() {
        let f = tight_bound(2.0).unwrap();
        let c = classical_bound(2.0).unwrap();
        let h = hasegawa_bound(2.0).unwrap();
        assert!((h - 0.3130352854993313).abs() < 1e-12);
        assert!(h < f && f < c);
    }

    #[test]
    fn ordering_on_grid() {
        // hasegawa <= tight <= classical, strict on (0, 50]
        let n = 1000;
        for k in 0..n {
            let x = 50.0 * (k + 1) as f64 / n as f64;
            let f = tight_bound(x).unwrap();
            let c = classical_bound(x).unwrap();
            let h = hasegawa_bound(x).unwrap();
            assert!(h < f, "hasegawa !< tight at x={x}: {h} vs {f}");
            assert!(f < c, "tight !< classical at x={x}: {f} vs {c}");
        }
    }

    #[test]
    fn small_x_expansion() {
        for &x in &[1e-3, 1e-4, 1e-6] {
            let f = tight_bound(x).unwrap();
            assert!(
                (f * x - 2.0).abs() <= 1e-3,
                "expansion failed at x={x}: f*x = {}",
                f * x
            );
        }
        // deviation from the two-term expansion 2/x - 2/3 shrinks with x
        let d1 = (tight_bound(1e-2).unwrap() - (2.0 / 1e-2 - 2.0 / 3.0)).abs();
        let d2 = (tight_bound(1e-3).unwrap() - (2.0 / 1e-3 - 2.0 / 3.0)).abs();
        assert!(d2 < d1);
    }

    #[test]
    fn tight_bound_strictly_decreasing() {
        let n = 2000;
        let mut prev = f64::INFINITY;
        for k in 0..n {
            let x = 50.0 * (k + 1) as f64 / n as f64;
            let f = tight_bound(x).unwrap();
            assert!(f < prev, "not decreasing at x={x}");
            prev = f;
        }
    }
}
