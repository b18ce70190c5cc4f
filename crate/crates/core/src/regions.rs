//! The four-cell partition of the punctured plane and the Euclidean algorithms
//! built on it.
//!
//! With `X = {xy >= 0, x != 0}` and `Y = {xy <= 0, y != 0}` the cells are
//! `A = h(X)`, `B = v(X)`, `C = h⁻¹(Y)` and `D = v⁻¹(Y)`. The subtractive
//! algorithm `E` undoes the letter that produced the cell:
//!
//! | cell | letter applied |
//! |------|----------------|
//! | A    | `h⁻¹`          |
//! | B    | `v⁻¹`          |
//! | C    | `h`            |
//! | D    | `v`            |
//!
//! Ties are resolved by evaluating the membership predicates with weak
//! inequalities. In the first and third quadrants the diagonal `|y| = σ(|x|)`
//! belongs to B, in the second and fourth quadrants it belongs to C. Points on
//! the coordinate axes are fixed by `E` and carry the label `AxisFixed`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sigma::{Point2, SigmaMap};
use crate::words::Letter;

/// Relative width of the band around `|y| = σ(|x|)` treated as the diagonal.
pub const DIAGONAL_FUZZ: f64 = 1e-12;

/// Beyond this the digit cannot be represented exactly in binary64.
pub const MAX_DIGIT: u64 = 1 << 53;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EuclidError {
    #[error("the origin is not in the domain of the Euclidean algorithm")]
    Origin,
    #[error("point {0} lies on an axis or a diagonal, where the accelerated map is undefined")]
    DiagonalOrAxis(Point2),
    #[error("iterate reached the axis after {digit} steps (the start is sigma-rational)")]
    AxisHit { digit: u64, point: Point2 },
    #[error("digit exceeds 2^53 at {0}; the point is indistinguishable from a sigma-rational one in binary64")]
    DigitOverflow(Point2),
    #[error("ping-pong precondition violated: {0}")]
    PingPong(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    A,
    B,
    C,
    D,
    AxisFixed,
    Origin,
}

impl RegionLabel {
    /// The letter `E` applies on this cell.
    pub fn euclid_letter(self) -> Option<Letter> {
        match self {
            RegionLabel::A => Some(Letter::HInv),
            RegionLabel::B => Some(Letter::VInv),
            RegionLabel::C => Some(Letter::H),
            RegionLabel::D => Some(Letter::V),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::A => "A",
            RegionLabel::B => "B",
            RegionLabel::C => "C",
            RegionLabel::D => "D",
            RegionLabel::AxisFixed => "axis",
            RegionLabel::Origin => "origin",
        }
    }

    fn partner(self) -> Option<RegionLabel> {
        match self {
            RegionLabel::A => Some(RegionLabel::B),
            RegionLabel::B => Some(RegionLabel::A),
            RegionLabel::C => Some(RegionLabel::D),
            RegionLabel::D => Some(RegionLabel::C),
            _ => None,
        }
    }
}

/// `X = {xy >= 0, x != 0}`.
pub fn in_x(p: Point2) -> bool {
    p.x != 0.0 && (p.y == 0.0 || p.x.is_sign_positive() == p.y.is_sign_positive())
}

/// `Y = {xy <= 0, y != 0}`.
pub fn in_y(p: Point2) -> bool {
    p.y != 0.0 && (p.x == 0.0 || p.x.is_sign_positive() != p.y.is_sign_positive())
}

/// Cell of `p` in the partition.
pub fn classify(s: &SigmaMap, p: Point2) -> RegionLabel {
    if p.x == 0.0 && p.y == 0.0 {
        return RegionLabel::Origin;
    }
    if p.x == 0.0 || p.y == 0.0 {
        return RegionLabel::AxisFixed;
    }
    if in_x(p) {
        match (in_x(s.h_inv(p)), in_x(s.v_inv(p))) {
            (true, false) => RegionLabel::A,
            _ => RegionLabel::B,
        }
    } else {
        match (in_y(s.h(p)), in_y(s.v(p))) {
            (false, true) => RegionLabel::D,
            _ => RegionLabel::C,
        }
    }
}

/// True when `p` is within [`DIAGONAL_FUZZ`] (relative) of `|y| = σ(|x|)`.
pub fn near_diagonal(s: &SigmaMap, p: Point2) -> bool {
    let sx = s.eval(p.x.abs());
    let ay = p.y.abs();
    (ay - sx).abs() <= DIAGONAL_FUZZ * (ay + sx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclidStep {
    pub label: RegionLabel,
    /// `None` on the axes, where `E` is the identity.
    pub letter: Option<Letter>,
    pub result: Point2,
}

/// One step of the subtractive algorithm `E`.
pub fn euclid_step(s: &SigmaMap, p: Point2) -> Result<EuclidStep, EuclidError> {
    let label = classify(s, p);
    match label.euclid_letter() {
        Some(letter) => Ok(EuclidStep { label, letter: Some(letter), result: letter.apply(s, p) }),
        None if label == RegionLabel::Origin => Err(EuclidError::Origin),
        None => Ok(EuclidStep { label, letter: None, result: p }),
    }
}

/// `Eⁿ(p)`.
pub fn euclid_iterate(s: &SigmaMap, p: Point2, n: usize) -> Result<Point2, EuclidError> {
    let mut q = p;
    for _ in 0..n {
        q = euclid_step(s, q)?.result;
    }
    Ok(q)
}

/// The first-quadrant form of `E`: subtract `σ⁻¹(y)` from `x` when `y < σ(x)`,
/// otherwise subtract `σ(x)` from `y`.
pub fn euclid_step_first_quadrant(s: &SigmaMap, p: Point2) -> Point2 {
    if p.y < s.eval(p.x) {
        Point2::new(p.x - s.inv(p.y), p.y)
    } else {
        Point2::new(p.x, p.y - s.eval(p.x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelStep {
    /// Cell of the input point.
    pub label: RegionLabel,
    pub digit: u64,
    /// The letter that was applied `digit` times.
    pub letter: Letter,
    pub result: Point2,
}

/// `letter^k(p)` evaluated in closed form (one σ evaluation).
fn power_of_letter(s: &SigmaMap, letter: Letter, k: f64, p: Point2) -> Point2 {
    match letter {
        Letter::H => Point2::new(p.x + k * s.inv(p.y), p.y),
        Letter::HInv => Point2::new(p.x - k * s.inv(p.y), p.y),
        Letter::V => Point2::new(p.x, p.y + k * s.eval(p.x)),
        Letter::VInv => Point2::new(p.x, p.y - k * s.eval(p.x)),
    }
}

/// One step of the accelerated algorithm `F`: the maximal power of the
/// current letter, which moves A to B, B to A, C to D and D to C.
///
/// The digit is located by doubling then bisection on the monotone predicate
/// "`letter^k(p)` is still in the starting cell"; each probe is closed form.
pub fn accel_step(s: &SigmaMap, p: Point2) -> Result<AccelStep, EuclidError> {
    if p.x == 0.0 || p.y == 0.0 || near_diagonal(s, p) || !p.is_finite() {
        return Err(EuclidError::DiagonalOrAxis(p));
    }
    let label = classify(s, p);
    let letter = label.euclid_letter().expect("off-axis points have a cell");
    // `letter^k(p)` is in the starting cell iff `letter^{k+1}(p)` is in X (for
    // A, B) or Y (for C, D).
    let (shift, in_base): (f64, fn(Point2) -> bool) = match label {
        RegionLabel::A | RegionLabel::C => (s.inv(p.y), if label == RegionLabel::A { in_x } else { in_y }),
        _ => (s.eval(p.x), if label == RegionLabel::B { in_x } else { in_y }),
    };
    let probe = |k: f64| -> Point2 {
        match letter {
            Letter::HInv => Point2::new(p.x - k * shift, p.y),
            Letter::H => Point2::new(p.x + k * shift, p.y),
            Letter::VInv => Point2::new(p.x, p.y - k * shift),
            Letter::V => Point2::new(p.x, p.y + k * shift),
        }
    };
    let still = |k: u64| in_base(probe((k + 1) as f64));
    if !still(0) {
        return Err(EuclidError::DiagonalOrAxis(p));
    }
    let digit = if !still(1) {
        1
    } else {
        let mut lo = 1u64;
        let mut hi = 2u64;
        while still(hi) {
            lo = hi;
            hi = hi.checked_mul(2).filter(|&h| h <= MAX_DIGIT).ok_or(EuclidError::DigitOverflow(p))?;
        }
        // still(lo) holds, still(hi) fails
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if still(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let result = probe(digit as f64);
    let got = classify(s, result);
    if got == RegionLabel::AxisFixed {
        return Err(EuclidError::AxisHit { digit, point: result });
    }
    if Some(got) != label.partner() {
        return Err(EuclidError::DiagonalOrAxis(result));
    }
    Ok(AccelStep { label, digit, letter, result })
}

/// `U = F∘F`; returns both halves.
pub fn u_step_pair(s: &SigmaMap, p: Point2) -> Result<(AccelStep, AccelStep), EuclidError> {
    let first = accel_step(s, p)?;
    let second = accel_step(s, first.result)?;
    Ok((first, second))
}

/// `U(p) = F(F(p))`. On σ-irrational points `‖U(p)‖ <= ‖p‖/2`.
pub fn u_step(s: &SigmaMap, p: Point2) -> Result<Point2, EuclidError> {
    Ok(u_step_pair(s, p)?.1.result)
}

/// Which half of the ping-pong pair to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PingPongSide {
    /// `p ∈ P = C ∪ A`, test `v^{2k}(p) ∈ Q`.
    V,
    /// `p ∈ Q = B ∪ D`, test `h^{2k}(p) ∈ P`.
    H,
}

pub fn in_p(s: &SigmaMap, p: Point2) -> bool {
    matches!(classify(s, p), RegionLabel::A | RegionLabel::C)
}

pub fn in_q(s: &SigmaMap, p: Point2) -> bool {
    matches!(classify(s, p), RegionLabel::B | RegionLabel::D)
}

/// Ping-pong test for `Γ₂(σ) = ⟨h², v²⟩`.
pub fn pingpong_check(s: &SigmaMap, p: Point2, k: i64, side: PingPongSide) -> Result<bool, EuclidError> {
    if k == 0 {
        return Err(EuclidError::PingPong("exponent must be nonzero".into()));
    }
    let n = 2.0 * k as f64;
    match side {
        PingPongSide::V => {
            if !in_p(s, p) {
                return Err(EuclidError::PingPong(format!("{p} is not in P = C ∪ A")));
            }
            Ok(in_q(s, power_of_letter(s, Letter::V, n, p)))
        }
        PingPongSide::H => {
            if !in_q(s, p) {
                return Err(EuclidError::PingPong(format!("{p} is not in Q = B ∪ D")));
            }
            Ok(in_p(s, power_of_letter(s, Letter::H, n, p)))
        }
    }
}
