//! Continued fractions attached to the power maps `σ(x) = sgn(x)|x|^α`.
//!
//! A point `(r·σ⁻¹(y), y)` with `r > 1` has σ-slope `r`. One application of
//! `U = v^{-b}∘h^{-a}` produces a point of the same shape with slope `R`, and
//!
//! ```text
//! r = S_{a,b}(R) = a + 1 / σ⁻¹(b + 1/σ(R)).
//! ```
//!
//! Iterating gives the digit pairs `(a₁, b₁), (a₂, b₂), …`. For `α = 1` these
//! are the ordinary continued-fraction digits taken two at a time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::{u_step_pair, EuclidError, RegionLabel};
use crate::sigma::{Point2, SigmaError, SigmaMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CfracError {
    #[error("slope must exceed 1, got {0}")]
    SlopeDomain(f64),
    #[error("digits must be positive")]
    ZeroDigit,
    #[error("point {0} is not in the cone 0 < σ⁻¹(y) < x")]
    NotInCone(Point2),
    #[error("no fixed point of S_1,1 found for alpha = {0}")]
    NoFixedPoint(f64),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitPair {
    pub a: u64,
    pub b: u64,
}

/// A point `(r·σ⁻¹(y), y)` described by its slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeState {
    pub r: f64,
    pub y: f64,
}

/// Why an expansion stopped before the requested number of pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    /// An iterate reached an axis: the start is σ-rational.
    Rational,
    /// The iterate is within the diagonal band or a digit overflowed binary64.
    Precision(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub pairs: Vec<DigitPair>,
    /// State after the last complete pair.
    pub residual: SlopeState,
    pub terminated: Option<Termination>,
}

fn power_sigma(alpha: f64) -> Result<SigmaMap, CfracError> {
    Ok(SigmaMap::power(alpha)?)
}

/// `S_{a,b}(R) = a + 1/σ⁻¹(b + 1/σ(R))` for `σ` the power map of exponent `α`.
pub fn s_ab(alpha: f64, a: u64, b: u64, big_r: f64) -> Result<f64, CfracError> {
    if big_r.is_nan() || big_r <= 1.0 {
        return Err(CfracError::SlopeDomain(big_r));
    }
    if a == 0 || b == 0 {
        return Err(CfracError::ZeroDigit);
    }
    let s = power_sigma(alpha)?;
    Ok(s_ab_with(&s, a, b, big_r))
}

fn s_ab_with(s: &SigmaMap, a: u64, b: u64, big_r: f64) -> f64 {
    a as f64 + 1.0 / s.inv(b as f64 + 1.0 / s.eval(big_r))
}

/// `S_{a₁,b₁}∘…∘S_{aₙ,bₙ}(R)`.
pub fn reconstruct(alpha: f64, pairs: &[DigitPair], big_r: f64) -> Result<f64, CfracError> {
    let s = power_sigma(alpha)?;
    Ok(pairs.iter().rev().fold(big_r, |r, d| s_ab_with(&s, d.a, d.b, r)))
}

/// The first `n` digit pairs of the point `p`, obtained by iterating `U`.
pub fn digits(alpha: f64, p: Point2, n: usize) -> Result<Expansion, CfracError> {
    let s = power_sigma(alpha)?;
    let si = s.inv(p.y);
    if !(p.is_finite() && si > 0.0 && si < p.x) {
        return Err(CfracError::NotInCone(p));
    }
    let mut pairs = Vec::with_capacity(n);
    let mut q = p;
    let mut terminated = None;
    for _ in 0..n {
        match u_step_pair(&s, q) {
            Ok((first, second)) => {
                debug_assert_eq!(first.label, RegionLabel::A);
                pairs.push(DigitPair { a: first.digit, b: second.digit });
                q = second.result;
            }
            Err(EuclidError::AxisHit { .. }) => {
                terminated = Some(Termination::Rational);
                break;
            }
            Err(e) => {
                terminated = Some(Termination::Precision(e.to_string()));
                break;
            }
        }
    }
    let residual = SlopeState { r: q.x / s.inv(q.y), y: q.y };
    Ok(Expansion { pairs, residual, terminated })
}

/// Digit pairs of a slope, starting from the point `(r, 1)`.
pub fn digits_of_slope(alpha: f64, r: f64, n: usize) -> Result<Expansion, CfracError> {
    if r.is_nan() || r <= 1.0 {
        return Err(CfracError::SlopeDomain(r));
    }
    digits(alpha, Point2::new(r, 1.0), n)
}

/// The fixed point of `S_{1,1}` in `]1, ∞[`, by bisection of
/// `g(r) = S_{1,1}(r) - r` on `[1 + 1e-9, 4]`, run to full binary64 resolution.
///
/// For small `α` the root sits closer to 1 than `1e-9`; the lower end is then
/// pulled towards 1 until `g` changes sign.
pub fn golden_slope(alpha: f64) -> Result<f64, CfracError> {
    let s = power_sigma(alpha)?;
    let g = |r: f64| s_ab_with(&s, 1, 1, r) - r;
    let mut lo = 1.0 + 1e-9;
    let mut hi = 4.0;
    while g(lo) <= 0.0 {
        let next = 1.0 + (lo - 1.0) / 16.0;
        if next <= 1.0 || next == lo {
            return Err(CfracError::NoFixedPoint(alpha));
        }
        lo = next;
    }
    if g(hi) >= 0.0 {
        return Err(CfracError::NoFixedPoint(alpha));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if g(hi).abs() < g(lo).abs() { hi } else { lo })
}

/// `r⁴ - 2r³ + r² - 2r + 1`, whose root in `]1, ∞[` is the golden slope for `α = 2`.
pub fn golden_quartic(r: f64) -> f64 {
    (((r - 2.0) * r + 1.0) * r - 2.0) * r + 1.0
}

/// `½(1 + √2 + √(2√2 - 1))`.
pub fn golden_slope_square_closed_form() -> f64 {
    let s2 = 2f64.sqrt();
    0.5 * (1.0 + s2 + (2.0 * s2 - 1.0).sqrt())
}
