//! σ-lines for the power maps `σ(x) = sgn(x)|x|^α`.
//!
//! Every positive word maps the closed first quadrant onto a region bounded by
//! two curves `c_a(x) = (x, a·σ(x))`. Letters act on the parameter `a` by
//!
//! ```text
//! h: a ↦ a / (1 + a^{1/α})^α        v: a ↦ a + 1
//! ```
//!
//! so an infinite word `w` determines nested parameter intervals whose limit
//! `a(w)` gives the σ-line `L_w = c_{a(w)}(ℝ≥0)`. One step of the Euclidean
//! algorithm moves abscissas along σ-lines by the factor `k(w)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::euclid_step;
use crate::sigma::{Point2, SigmaError, SigmaMap};
use crate::words::Letter;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinesError {
    #[error("alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("curve parameter must be nonnegative, got {0}")]
    NegativeParam(f64),
    #[error("word spec {0:?}: expected letters h/v as `pre:per`")]
    BadSpec(String),
    #[error("interval width {width:e} still above {tol:e} after {letters} letters")]
    NonConvergence { width: f64, tol: f64, letters: usize },
    #[error("nesting gives {nested}, fixed point gives {fixed}")]
    MethodDisagreement { nested: f64, fixed: f64 },
    #[error("k(w) = 0 for {0}: the σ-line is a boundary line")]
    BoundaryWord(String),
    #[error("word {0} is a finite prefix; k(w) needs an infinite word")]
    FiniteWord(String),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

/// Letters consumed before giving up on interval nesting.
pub const MAX_LETTERS: usize = 10_000;

/// Tolerance of [`kernel_invariance_check`].
pub const KERNEL_TOL: f64 = 1e-14;

/// Parameter of the curve `c_a(x) = (x, a·σ(x))`; `Infinite` stands for `Oy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CurveParam {
    Finite(f64),
    Infinite,
}

impl CurveParam {
    pub fn new(a: f64) -> Result<Self, LinesError> {
        if a == f64::INFINITY {
            Ok(CurveParam::Infinite)
        } else if a >= 0.0 {
            Ok(CurveParam::Finite(a))
        } else {
            Err(LinesError::NegativeParam(a))
        }
    }

    /// `f64::INFINITY` for `Infinite`.
    pub fn value(self) -> f64 {
        match self {
            CurveParam::Finite(a) => a,
            CurveParam::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, CurveParam::Infinite)
    }
}

impl fmt::Display for CurveParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveParam::Finite(a) => write!(f, "{a}"),
            CurveParam::Infinite => f.write_str("inf"),
        }
    }
}

/// Nested-interval state for a word prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamInterval {
    pub lo: CurveParam,
    pub hi: CurveParam,
}

impl ParamInterval {
    /// `[0, ∞]`, the whole quadrant.
    pub fn full() -> Self {
        ParamInterval { lo: CurveParam::Finite(0.0), hi: CurveParam::Infinite }
    }

    pub fn width(&self) -> f64 {
        self.hi.value() - self.lo.value()
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo.value() + self.hi.value())
    }

    fn push(self, alpha: f64, l: Letter) -> Self {
        ParamInterval { lo: push(alpha, l, self.lo), hi: push(alpha, l, self.hi) }
    }
}

fn check_alpha(alpha: f64) -> Result<(), LinesError> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(LinesError::Alpha(alpha))
    }
}

/// Parameter of `h∘c_a`; `push_h(∞) = 1`.
pub fn push_h(alpha: f64, a: CurveParam) -> CurveParam {
    match a {
        CurveParam::Infinite => CurveParam::Finite(1.0),
        CurveParam::Finite(a) => CurveParam::Finite(a / (1.0 + a.powf(1.0 / alpha)).powf(alpha)),
    }
}

/// Parameter of `v∘c_a`; `push_v(∞) = ∞`.
pub fn push_v(a: CurveParam) -> CurveParam {
    match a {
        CurveParam::Infinite => CurveParam::Infinite,
        CurveParam::Finite(a) => CurveParam::Finite(a + 1.0),
    }
}

fn push(alpha: f64, l: Letter, a: CurveParam) -> CurveParam {
    match l {
        Letter::H => push_h(alpha, a),
        _ => push_v(a),
    }
}

/// `c_a(x) = (x, a·σ(x))` for the power map of exponent `α`.
pub fn curve_point(alpha: f64, a: f64, x: f64) -> Point2 {
    Point2::new(x, a * x.abs().powf(alpha).copysign(x))
}

/// An eventually periodic word `pre·per^∞` over `{h, v}`; an empty period
/// makes it a finite prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordSpec {
    pub pre: Vec<Letter>,
    pub per: Vec<Letter>,
}

impl WordSpec {
    pub fn new(pre: Vec<Letter>, per: Vec<Letter>) -> Result<Self, LinesError> {
        let spec = WordSpec { pre, per };
        if spec.pre.iter().chain(&spec.per).any(|l| !l.is_positive()) {
            return Err(LinesError::BadSpec(spec.to_string()));
        }
        Ok(spec)
    }

    pub fn periodic(per: Vec<Letter>) -> Result<Self, LinesError> {
        WordSpec::new(Vec::new(), per)
    }

    pub fn is_finite(&self) -> bool {
        self.per.is_empty()
    }

    /// Letter at position `i`, `None` past the end of a finite prefix.
    pub fn letter(&self, i: usize) -> Option<Letter> {
        if i < self.pre.len() {
            Some(self.pre[i])
        } else if self.per.is_empty() {
            None
        } else {
            Some(self.per[(i - self.pre.len()) % self.per.len()])
        }
    }

    pub fn first(&self) -> Option<Letter> {
        self.letter(0)
    }

    /// The shifted word `s(w)`.
    pub fn shift(&self) -> WordSpec {
        if !self.pre.is_empty() {
            WordSpec { pre: self.pre[1..].to_vec(), per: self.per.clone() }
        } else if self.per.is_empty() {
            self.clone()
        } else {
            let mut per = self.per.clone();
            per.rotate_left(1);
            WordSpec { pre: Vec::new(), per }
        }
    }

    /// The letter of a constant tail, if any.
    fn constant_tail(&self) -> Option<Letter> {
        let first = *self.per.first()?;
        self.per.iter().all(|&l| l == first).then_some(first)
    }
}

impl fmt::Display for WordSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.pre {
            write!(f, "{}", l.as_char().to_ascii_lowercase())?;
        }
        f.write_str(":")?;
        for l in &self.per {
            write!(f, "{}", l.as_char().to_ascii_lowercase())?;
        }
        Ok(())
    }
}

impl FromStr for WordSpec {
    type Err = LinesError;

    /// `pre:per`, letters `h`/`v` in either case; a bare string is a period.
    fn from_str(s: &str) -> Result<Self, LinesError> {
        let bad = || LinesError::BadSpec(s.to_string());
        let parse = |part: &str| -> Result<Vec<Letter>, LinesError> {
            part.trim()
                .chars()
                .map(|c| match c.to_ascii_lowercase() {
                    'h' => Ok(Letter::H),
                    'v' => Ok(Letter::V),
                    _ => Err(bad()),
                })
                .collect()
        };
        let (pre, per) = match s.split_once(':') {
            Some((pre, per)) => (parse(pre)?, parse(per)?),
            None => (Vec::new(), parse(s)?),
        };
        if pre.is_empty() && per.is_empty() {
            return Err(bad());
        }
        WordSpec::new(pre, per)
    }
}

/// Result of [`a_of_word`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineParam {
    pub a: CurveParam,
    /// Final nesting interval (degenerate for constant tails).
    pub interval: ParamInterval,
    pub letters_used: usize,
    /// Bisection value for the periodic part, mapped through the preperiod.
    pub fixed_point: Option<f64>,
}

/// `push_{w₀}∘…∘push_{w_{n-1}}([0, ∞])`. Endpoints that cross by rounding
/// are merged at their midpoint.
pub fn prefix_interval(alpha: f64, w: &WordSpec, n: usize) -> ParamInterval {
    let iv = (0..n).rev().filter_map(|i| w.letter(i)).fold(ParamInterval::full(), |iv, l| iv.push(alpha, l));
    if iv.lo.value() > iv.hi.value() {
        let m = CurveParam::Finite(iv.mid());
        ParamInterval { lo: m, hi: m }
    } else {
        iv
    }
}

fn push_word(alpha: f64, letters: &[Letter], a: CurveParam) -> CurveParam {
    letters.iter().rev().fold(a, |a, &l| push(alpha, l, a))
}

/// Fixed point of the period's composite push map, by bisection on
/// `[P(0), P(∞)]`, where `P(a) - a` changes sign.
fn periodic_fixed_point(alpha: f64, per: &[Letter]) -> f64 {
    let p = |a: f64| push_word(alpha, per, CurveParam::Finite(a)).value();
    let mut lo = p(0.0);
    let mut hi = push_word(alpha, per, CurveParam::Infinite).value();
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) >= mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The limit parameter `a(w)`.
///
/// Prefix intervals are nested; the prefix length is doubled until the width
/// drops below `tol`, then the shortest such prefix is located by bisection.
/// For periodic words the fixed point of the period is also computed and the
/// two values must agree within `10·tol`. Words ending in `v^∞` or `h^∞` are
/// evaluated symbolically.
pub fn a_of_word(alpha: f64, w: &WordSpec, tol: f64) -> Result<LineParam, LinesError> {
    check_alpha(alpha)?;
    if let Some(tail) = w.constant_tail() {
        let base = if tail == Letter::V { CurveParam::Infinite } else { CurveParam::Finite(0.0) };
        let a = push_word(alpha, &w.pre, base);
        return Ok(LineParam {
            a,
            interval: ParamInterval { lo: a, hi: a },
            letters_used: w.pre.len(),
            fixed_point: Some(a.value()),
        });
    }
    let limit = if w.is_finite() { w.pre.len() } else { MAX_LETTERS };
    let converged = |n: usize| prefix_interval(alpha, w, n).width() < tol;
    let mut n = 1;
    while !converged(n) {
        if n >= limit {
            let iv = prefix_interval(alpha, w, limit);
            if w.is_finite() {
                // truncation error is reported through the interval
                return Ok(LineParam {
                    a: CurveParam::Finite(iv.mid()),
                    interval: iv,
                    letters_used: limit,
                    fixed_point: None,
                });
            }
            return Err(LinesError::NonConvergence { width: iv.width(), tol, letters: limit });
        }
        n = (2 * n).min(limit);
    }
    let (mut lo, mut hi) = (n / 2, n);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if converged(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let interval = prefix_interval(alpha, w, hi);
    let nested = interval.mid();
    let fixed_point = if w.is_finite() {
        None
    } else {
        let star = periodic_fixed_point(alpha, &w.per);
        let fixed = push_word(alpha, &w.pre, CurveParam::Finite(star)).value();
        if (fixed - nested).abs() > 10.0 * tol {
            return Err(LinesError::MethodDisagreement { nested, fixed });
        }
        Some(fixed)
    };
    Ok(LineParam { a: CurveParam::Finite(nested), interval, letters_used: hi, fixed_point })
}

/// `k(w) = 1 - a(w)^{1/α}` when `w` starts with `h`, else `1`.
pub fn k_of_word(alpha: f64, w: &WordSpec, tol: f64) -> Result<f64, LinesError> {
    check_alpha(alpha)?;
    match w.first() {
        Some(Letter::H) => {
            if w.is_finite() {
                return Err(LinesError::FiniteWord(w.to_string()));
            }
            let a = a_of_word(alpha, w, tol)?.a.value();
            let k = 1.0 - a.powf(1.0 / alpha);
            if k <= tol {
                return Err(LinesError::BoundaryWord(w.to_string()));
            }
            Ok(k)
        }
        Some(_) => Ok(1.0),
        None => Err(LinesError::FiniteWord(w.to_string())),
    }
}

/// One step of the chart dynamics: `H_σ(x, w) = (k(w)·x, s(w))`.
pub fn h_sigma_step(alpha: f64, x: f64, w: &WordSpec, tol: f64) -> Result<(f64, WordSpec), LinesError> {
    Ok((k_of_word(alpha, w, tol)? * x, w.shift()))
}

/// Comparison of one Euclidean step in the plane with the chart prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartCheck {
    /// `E_σ(c_{a(w)}(x))`.
    pub plane: Point2,
    /// `c_{a(s(w))}(k(w)·x)`.
    pub predicted: Point2,
    pub rel_err: f64,
}

/// Applies `E_σ` to `c_{a(w)}(x)` and compares with `c_{a(s(w))}(k(w)·x)`.
pub fn chart_consistency(alpha: f64, x: f64, w: &WordSpec, tol: f64) -> Result<ChartCheck, LinesError> {
    let s = SigmaMap::power(alpha)?;
    let a = a_of_word(alpha, w, tol)?.a.value();
    let (kx, tail) = h_sigma_step(alpha, x, w, tol)?;
    let a_next = a_of_word(alpha, &tail, tol)?.a.value();
    let p = curve_point(alpha, a, x);
    let plane = euclid_step(&s, p).map(|st| st.result).unwrap_or(p);
    let predicted = curve_point(alpha, a_next, kx);
    let rel_err = plane.dist(predicted) / plane.norm().max(f64::MIN_POSITIVE);
    Ok(ChartCheck { plane, predicted, rel_err })
}

/// Whether `∫_u^v dx/x = ∫_{ku}^{kv} dx/x`, to [`KERNEL_TOL`]; inputs outside
/// `0 < u < v`, `k > 0` give `false`.
pub fn kernel_invariance_check(u: f64, v: f64, k: f64) -> bool {
    if !(u > 0.0 && v > u && k > 0.0 && v.is_finite() && k.is_finite()) {
        return false;
    }
    let before = (v / u).ln();
    let after = (k * v / (k * u)).ln();
    (before - after).abs() <= KERNEL_TOL * before.abs().max(1.0)
}
