//! Odd increasing homeomorphisms of the line and the transvections they induce.
//!
//! For a map `σ` the two plane transvections are
//!
//! ```text
//! h(x, y) = (x + σ⁻¹(y), y)
//! v(x, y) = (x, y + σ(x))
//! ```
//!
//! which are the elementary shear matrices when `σ` is the identity.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SigmaError {
    #[error("invalid sigma parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse sigma descriptor `{0}` (expected id, pow:<a>, lin:<a>:<b> or sine:<c>)")]
    Descriptor(String),
    #[error("transvection indices must satisfy i < j < n, got i={i}, j={j}, n={n}")]
    BadIndices { i: usize, j: usize, n: usize },
    #[error("points of R^n need n >= 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("the scaling flow only commutes with power maps")]
    NotPowerFamily,
}

/// The concrete families of `σ` shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Identity,
    /// `σ(x) = sgn(x)|x|^α`.
    Power(f64),
    /// `σ(x) = a·x` on `[-b, b]`, slope one outside.
    LinearNearOrigin {
        a: f64,
        b: f64,
    },
    /// `σ(x) = x + c·sin(2πx)/(2π)`, `|c| < 1`. Commutes with integer translations.
    SineWobble(f64),
}

/// How `σ⁻¹` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseStrategy {
    ClosedForm,
    Bisection,
}

/// Exponent with the shortcuts that keep integer powers and square/cube roots
/// correctly rounded.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Exponent {
    One,
    Int(i32),
    Root(u32),
    Real(f64),
}

impl Exponent {
    fn new(e: f64) -> Self {
        if e == 1.0 {
            return Exponent::One;
        }
        if e.fract() == 0.0 && e <= 64.0 {
            return Exponent::Int(e as i32);
        }
        let inv = 1.0 / e;
        let n = inv.round();
        if (inv - n).abs() < 1e-12 && (2.0..=64.0).contains(&n) {
            return Exponent::Root(n as u32);
        }
        Exponent::Real(e)
    }

    /// `t^e` for `t >= 0`.
    fn apply(self, t: f64) -> f64 {
        match self {
            Exponent::One => t,
            Exponent::Int(2) => t * t,
            Exponent::Int(n) => t.powi(n),
            Exponent::Root(2) => t.sqrt(),
            Exponent::Root(3) => t.cbrt(),
            Exponent::Root(n) => t.powf(1.0 / n as f64),
            Exponent::Real(e) => t.powf(e),
        }
    }
}

/// An odd increasing homeomorphism `σ: ℝ → ℝ` from one of the shipped families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaMap {
    family: Family,
    forward: Exponent,
    backward: Exponent,
}

/// Absolute tolerance requested from the bisection inverse. The loop actually
/// runs to full binary64 resolution, which is never coarser than this.
pub const BISECTION_TOL: f64 = 1e-13;

impl SigmaMap {
    pub fn identity() -> Self {
        SigmaMap { family: Family::Identity, forward: Exponent::One, backward: Exponent::One }
    }

    pub fn power(alpha: f64) -> Result<Self, SigmaError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(SigmaError::InvalidParameter(format!("power exponent must be positive, got {alpha}")));
        }
        Ok(SigmaMap {
            family: Family::Power(alpha),
            forward: Exponent::new(alpha),
            backward: Exponent::new(1.0 / alpha),
        })
    }

    pub fn linear_near_origin(a: f64, b: f64) -> Result<Self, SigmaError> {
        if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
            return Err(SigmaError::InvalidParameter(format!("lin needs a > 0 and b > 0, got a={a}, b={b}")));
        }
        Ok(SigmaMap { family: Family::LinearNearOrigin { a, b }, forward: Exponent::One, backward: Exponent::One })
    }

    /// Rejects `|c| >= 1`, where the map stops being monotone.
    pub fn sine_wobble(c: f64) -> Result<Self, SigmaError> {
        if !(c.is_finite() && c.abs() < 1.0) {
            return Err(SigmaError::InvalidParameter(format!("sine needs |c| < 1, got {c}")));
        }
        Ok(SigmaMap { family: Family::SineWobble(c), forward: Exponent::One, backward: Exponent::One })
    }

    pub fn from_family(family: Family) -> Result<Self, SigmaError> {
        match family {
            Family::Identity => Ok(Self::identity()),
            Family::Power(a) => Self::power(a),
            Family::LinearNearOrigin { a, b } => Self::linear_near_origin(a, b),
            Family::SineWobble(c) => Self::sine_wobble(c),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The exponent when `σ` is a power map (the identity counts as `α = 1`).
    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            Family::Identity => Some(1.0),
            Family::Power(a) => Some(a),
            _ => None,
        }
    }

    /// True when `σ(k) = k` for every integer `k`.
    pub fn fixes_integers(&self) -> bool {
        match self.family {
            Family::Identity | Family::SineWobble(_) => true,
            Family::Power(a) => a == 1.0,
            Family::LinearNearOrigin { a, .. } => a == 1.0,
        }
    }

    pub fn inverse_strategy(&self) -> InverseStrategy {
        match self.family {
            Family::SineWobble(c) if c != 0.0 => InverseStrategy::Bisection,
            _ => InverseStrategy::ClosedForm,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.family {
            Family::Identity => x,
            Family::Power(_) => self.forward.apply(x.abs()).copysign(x),
            Family::LinearNearOrigin { a, b } => {
                let t = x.abs();
                let s = if t <= b { a * t } else { a * b + (t - b) };
                s.copysign(x)
            }
            Family::SineWobble(c) => sine_wobble(c, x),
        }
    }

    pub fn inv(&self, y: f64) -> f64 {
        match self.family {
            Family::Identity => y,
            Family::Power(_) => self.backward.apply(y.abs()).copysign(y),
            Family::LinearNearOrigin { a, b } => {
                let t = y.abs();
                let s = if t <= a * b { t / a } else { b + (t - a * b) };
                s.copysign(y)
            }
            Family::SineWobble(c) => {
                if y.fract() == 0.0 {
                    // σ fixes the integers.
                    return y;
                }
                let x = sine_wobble_inv(c, y.abs());
                x.copysign(y)
            }
        }
    }

    pub fn h(&self, p: Point2) -> Point2 {
        Point2::new(p.x + self.inv(p.y), p.y)
    }

    pub fn h_inv(&self, p: Point2) -> Point2 {
        Point2::new(p.x - self.inv(p.y), p.y)
    }

    pub fn v(&self, p: Point2) -> Point2 {
        Point2::new(p.x, p.y + self.eval(p.x))
    }

    pub fn v_inv(&self, p: Point2) -> Point2 {
        Point2::new(p.x, p.y - self.eval(p.x))
    }

    /// `h_{i,j}` on `ℝⁿ`: adds `σ⁻¹(x_j)` to `x_i`. Indices are zero-based.
    pub fn h_ij(&self, i: usize, j: usize, p: &PointN) -> Result<PointN, SigmaError> {
        check_indices(i, j, p.dim())?;
        let mut out = p.clone();
        out.coords[i] += self.inv(p.coords[j]);
        Ok(out)
    }

    /// `v_{i,j}` on `ℝⁿ`: adds `σ(x_i)` to `x_j`. Indices are zero-based.
    pub fn v_ij(&self, i: usize, j: usize, p: &PointN) -> Result<PointN, SigmaError> {
        check_indices(i, j, p.dim())?;
        let mut out = p.clone();
        out.coords[j] += self.eval(p.coords[i]);
        Ok(out)
    }

    /// The scaling flow `(x, y) ↦ (t·x, σ(t)·y)`, which commutes with `h` and `v`
    /// exactly when `σ` is multiplicative.
    pub fn flow_scale(&self, t: f64, p: Point2) -> Result<Point2, SigmaError> {
        let alpha = self.power_exponent().ok_or(SigmaError::NotPowerFamily)?;
        flow_scale(alpha, t, p)
    }
}

fn sine_wobble(c: f64, x: f64) -> f64 {
    // Reducing modulo 1 first keeps integer inputs exact.
    let frac = x - x.round();
    x + c * (TAU * frac).sin() / TAU
}

/// Bisection for `y > 0`. Uses `(1-|c|)x <= σ(x) <= (1+|c|)x` and
/// `|σ(x) - x| <= |c|/2π` to bracket the root.
fn sine_wobble_inv(c: f64, y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let w = c.abs();
    let mut lo = (y / (1.0 + w)).max(y - w / TAU);
    let mut hi = (y / (1.0 - w)).min(y + w / TAU);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sine_wobble(c, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (sine_wobble(c, hi) - y).abs() < (sine_wobble(c, lo) - y).abs() {
        hi
    } else {
        lo
    }
}

fn check_indices(i: usize, j: usize, n: usize) -> Result<(), SigmaError> {
    if i < j && j < n {
        Ok(())
    } else {
        Err(SigmaError::BadIndices { i, j, n })
    }
}

/// `(x, y) ↦ (t·x, sgn(t)|t|^α·y)`.
pub fn flow_scale(alpha: f64, t: f64, p: Point2) -> Result<Point2, SigmaError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(SigmaError::InvalidParameter(format!("flow exponent must be positive, got {alpha}")));
    }
    let s = SigmaMap::power(alpha)?.eval(t);
    Ok(Point2::new(t * p.x, s * p.y))
}

impl fmt::Display for SigmaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Identity => write!(f, "id"),
            Family::Power(a) => write!(f, "pow:{a}"),
            Family::LinearNearOrigin { a, b } => write!(f, "lin:{a}:{b}"),
            Family::SineWobble(c) => write!(f, "sine:{c}"),
        }
    }
}

impl FromStr for SigmaMap {
    type Err = SigmaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SigmaError::Descriptor(s.to_string());
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["id"] => Ok(SigmaMap::identity()),
            ["pow", a] => SigmaMap::power(num(a)?),
            ["lin", a, b] => SigmaMap::linear_near_origin(num(a)?, num(b)?),
            ["sine", c] => SigmaMap::sine_wobble(num(c)?),
            _ => Err(bad()),
        }
    }
}

/// A point of the plane. The norm used throughout is `|x| + |y|`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.abs() + self.y.abs()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: Point2) -> f64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

impl std::ops::Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point of `ℝⁿ`, `n >= 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointN {
    coords: Vec<f64>,
}

impl PointN {
    pub fn new(coords: Vec<f64>) -> Result<Self, SigmaError> {
        if coords.len() < 3 {
            return Err(SigmaError::DimensionTooSmall(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(SigmaError::NonFinite);
        }
        Ok(PointN { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}
