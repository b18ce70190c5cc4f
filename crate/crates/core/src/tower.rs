//! Exact arithmetic in towers of real quadratic extensions
//! `ℚ ⊂ ℚ(√g₀) ⊂ ℚ(√g₀)(√g₁) ⊂ …` and the certified orbit of the accelerated
//! Euclidean algorithm for `σ(x) = sgn(x)x²`.
//!
//! An element of depth `d > 0` is a pair `re + im·√g_{d-1}` with `re` and `im`
//! of depth below `d`. Elements are kept normalized (`im ≠ 0` whenever the
//! pair form is used), so structural equality is field equality as long as
//! every generator is a non-square in the field below it, which
//! [`Tower::push`] enforces.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("generator {index} must be positive")]
    NonPositiveGenerator { index: usize },
    #[error("generator {index} is a square in the field below it")]
    SquareGenerator { index: usize },
    #[error("element of depth {depth} does not fit in a tower with {levels} generators")]
    DepthMismatch { depth: usize, levels: usize },
    #[error("√({0}) is not an element of the tower")]
    NotRepresentable(String),
    #[error("orbit hypothesis {clause} fails at n = {n}")]
    InvariantViolation { clause: &'static str, n: usize },
    #[error("depth {0} exceeds the hard cap of {HARD_DEPTH_CAP}")]
    DepthCap(usize),
}

/// Default number of certified steps.
pub const DEFAULT_DEPTH: usize = 5;
/// Coefficient growth makes deeper runs impractical.
pub const HARD_DEPTH_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TowerElement {
    Rational(BigRational),
    /// `re + im·√g_level`.
    Ext {
        level: usize,
        re: Box<TowerElement>,
        im: Box<TowerElement>,
    },
}

use TowerElement::{Ext, Rational};

impl TowerElement {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// `re + im·√g_level`, collapsed when `im = 0`.
    pub fn ext(level: usize, re: TowerElement, im: TowerElement) -> Self {
        debug_assert!(re.depth() <= level && im.depth() <= level);
        if im.is_zero() {
            re
        } else {
            Ext { level, re: Box::new(re), im: Box::new(im) }
        }
    }

    /// `√g_level` itself.
    pub fn sqrt_of_generator(level: usize) -> Self {
        Self::ext(level, Self::zero(), Self::one())
    }

    pub fn depth(&self) -> usize {
        match self {
            Rational(_) => 0,
            Ext { level, .. } => level + 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational(q) if q.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Rational(q) => Some(q),
            Ext { .. } => None,
        }
    }

    /// Splits into `(re, im)` over the generator `level`; lower elements have
    /// `im = 0`.
    fn split(&self, level: usize) -> (TowerElement, TowerElement) {
        match self {
            Ext { level: l, re, im } if *l == level => ((**re).clone(), (**im).clone()),
            _ => (self.clone(), TowerElement::zero()),
        }
    }

    fn scale_by_rational(&self, q: &BigRational) -> TowerElement {
        if q.is_zero() {
            return TowerElement::zero();
        }
        match self {
            Rational(r) => Rational(r * q),
            Ext { level, re, im } => {
                Ext { level: *level, re: Box::new(re.scale_by_rational(q)), im: Box::new(im.scale_by_rational(q)) }
            }
        }
    }

    /// Largest bit length among all numerators and denominators.
    pub fn max_bits(&self) -> u64 {
        match self {
            Rational(q) => q.numer().bits().max(q.denom().bits()),
            Ext { re, im, .. } => re.max_bits().max(im.max_bits()),
        }
    }
}

impl Add for &TowerElement {
    type Output = TowerElement;

    fn add(self, other: &TowerElement) -> TowerElement {
        match (self, other) {
            (Rational(a), Rational(b)) => Rational(a + b),
            _ => {
                let level = self.depth().max(other.depth()) - 1;
                let (ar, ai) = self.split(level);
                let (br, bi) = other.split(level);
                TowerElement::ext(level, &ar + &br, &ai + &bi)
            }
        }
    }
}

impl Neg for &TowerElement {
    type Output = TowerElement;

    fn neg(self) -> TowerElement {
        match self {
            Rational(a) => Rational(-a),
            Ext { level, re, im } => Ext { level: *level, re: Box::new(-&**re), im: Box::new(-&**im) },
        }
    }
}

impl Sub for &TowerElement {
    type Output = TowerElement;

    fn sub(self, other: &TowerElement) -> TowerElement {
        self + &(-other)
    }
}

/// Closed interval with outward rounding, used to approximate elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    fn widen(lo: f64, hi: f64) -> Interval {
        const REL: f64 = 4.0 * f64::EPSILON;
        Interval { lo: lo - lo.abs() * REL - f64::MIN_POSITIVE, hi: hi + hi.abs() * REL + f64::MIN_POSITIVE }
    }

    fn point(x: f64) -> Interval {
        Interval::widen(x, x)
    }

    fn add(self, o: Interval) -> Interval {
        Interval::widen(self.lo + o.lo, self.hi + o.hi)
    }

    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::widen(lo, hi)
    }

    fn sqrt(self) -> Interval {
        Interval::widen(self.lo.max(0.0).sqrt(), self.hi.max(0.0).sqrt())
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Sign when the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo > 0.0 {
            Some(1)
        } else if self.hi < 0.0 {
            Some(-1)
        } else {
            None
        }
    }
}

/// The generator list `g₀, g₁, …` of a tower; generator `i` has depth `<= i`,
/// is positive and is not a square in the field generated by `g₀ … g_{i-1}`.
#[derive(Debug, Clone, Default)]
pub struct Tower {
    gens: Vec<TowerElement>,
    sqrt_gens: Vec<Interval>,
}

impl Tower {
    pub fn new() -> Self {
        Tower::default()
    }

    /// A tower with a single rational generator.
    pub fn over_rational(g: BigRational) -> Result<Self, TowerError> {
        let mut t = Tower::new();
        t.push(Rational(g))?;
        Ok(t)
    }

    pub fn levels(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[TowerElement] {
        &self.gens
    }

    /// Adjoins `√g` after checking positivity and non-squareness.
    pub fn push(&mut self, g: TowerElement) -> Result<(), TowerError> {
        let index = self.gens.len();
        if g.depth() > index {
            return Err(TowerError::DepthMismatch { depth: g.depth(), levels: index });
        }
        if self.sign(&g) <= 0 {
            return Err(TowerError::NonPositiveGenerator { index });
        }
        if self.is_square(&g) {
            return Err(TowerError::SquareGenerator { index });
        }
        let iv = self.interval(&g).sqrt();
        self.gens.push(g);
        self.sqrt_gens.push(iv);
        Ok(())
    }

    /// The tower generated by the first `levels` generators.
    pub fn truncated(&self, levels: usize) -> Tower {
        let levels = levels.min(self.gens.len());
        Tower { gens: self.gens[..levels].to_vec(), sqrt_gens: self.sqrt_gens[..levels].to_vec() }
    }

    /// A copy extended by one generator.
    pub fn extended(&self, g: TowerElement) -> Result<Tower, TowerError> {
        let mut t = self.clone();
        t.push(g)?;
        Ok(t)
    }

    fn check(&self, e: &TowerElement) -> Result<(), TowerError> {
        if e.depth() > self.gens.len() {
            Err(TowerError::DepthMismatch { depth: e.depth(), levels: self.gens.len() })
        } else {
            Ok(())
        }
    }

    pub fn mul(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        match (a, b) {
            (Rational(x), Rational(y)) => Rational(x * y),
            (Rational(q), e) | (e, Rational(q)) => e.scale_by_rational(q),
            _ => {
                let level = a.depth().max(b.depth()) - 1;
                let (ar, ai) = a.split(level);
                let (br, bi) = b.split(level);
                let g = &self.gens[level];
                let ii = self.mul(&ai, &bi);
                let re = &self.mul(&ar, &br) + &self.mul(&ii, g);
                let im = &self.mul(&ar, &bi) + &self.mul(&ai, &br);
                TowerElement::ext(level, re, im)
            }
        }
    }

    pub fn square(&self, a: &TowerElement) -> TowerElement {
        self.mul(a, a)
    }

    /// `(re + im√g)⁻¹ = (re - im√g) / (re² - im²g)`.
    pub fn inv(&self, a: &TowerElement) -> Result<TowerElement, TowerError> {
        match a {
            Rational(q) if q.is_zero() => Err(TowerError::DivisionByZero),
            Rational(q) => Ok(Rational(q.recip())),
            Ext { level, re, im } => {
                let g = &self.gens[*level];
                let den = &self.square(re) - &self.mul(&self.square(im), g);
                let den_inv = self.inv(&den)?;
                let conj = TowerElement::ext(*level, (**re).clone(), -&**im);
                Ok(self.mul(&conj, &den_inv))
            }
        }
    }

    pub fn div(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement, TowerError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Exact sign. For `re + im√g` with mixed signs the comparison of `re²`
    /// with `im²g` is made one level down.
    pub fn sign(&self, a: &TowerElement) -> i8 {
        match a {
            Rational(q) => {
                if q.is_positive() {
                    1
                } else if q.is_negative() {
                    -1
                } else {
                    0
                }
            }
            Ext { level, re, im } => {
                let sr = self.sign(re);
                let si = self.sign(im);
                if sr == 0 || sr == si {
                    return si;
                }
                if si == 0 {
                    return sr;
                }
                let g = &self.gens[*level];
                let diff = &self.square(re) - &self.mul(&self.square(im), g);
                match self.sign(&diff) {
                    1 => sr,
                    -1 => si,
                    _ => 0,
                }
            }
        }
    }

    pub fn cmp(&self, a: &TowerElement, b: &TowerElement) -> Ordering {
        self.sign(&(a - b)).cmp(&0)
    }

    pub fn abs(&self, a: &TowerElement) -> TowerElement {
        if self.sign(a) < 0 {
            -a
        } else {
            a.clone()
        }
    }

    /// Enclosure of the real value.
    pub fn interval(&self, a: &TowerElement) -> Interval {
        match a {
            Rational(q) => Interval::point(q.to_f64().unwrap_or(f64::NAN)),
            Ext { level, re, im } => self.interval(re).add(self.interval(im).mul(self.sqrt_gens[*level])),
        }
    }

    pub fn approx(&self, a: &TowerElement) -> f64 {
        self.interval(a).mid()
    }

    /// A square root of `a` inside the field spanned by the first `levels`
    /// generators, if one exists.
    ///
    /// Writing `a = x + y√z`: when `y = 0`, `a` is a square iff `x` or `x/z` is
    /// a square below. Otherwise `(p + q√z)² = a` forces `p² = (x ± √(x² - y²z))/2`
    /// and `q = y/(2p)`, so it suffices to take square roots one level down.
    pub fn sqrt_in(&self, a: &TowerElement, levels: usize) -> Option<TowerElement> {
        debug_assert!(a.depth() <= levels && levels <= self.gens.len());
        if self.sign(a) < 0 {
            return None;
        }
        if levels == 0 {
            return a.as_rational().and_then(rational_sqrt).map(Rational);
        }
        let level = levels - 1;
        let z = &self.gens[level];
        let (x, y) = a.split(level);
        if y.is_zero() {
            if let Some(r) = self.sqrt_in(&x, level) {
                return Some(r);
            }
            let over = self.div(&x, z).ok()?;
            return self.sqrt_in(&over, level).map(|q| TowerElement::ext(level, TowerElement::zero(), q));
        }
        let disc = &self.square(&x) - &self.mul(&self.square(&y), z);
        let s = self.sqrt_in(&disc, level)?;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for cand in [&x + &s, &x - &s] {
            let cand = cand.scale_by_rational(&half);
            if let Some(p) = self.sqrt_in(&cand, level) {
                if p.is_zero() {
                    continue;
                }
                let two_p = p.scale_by_rational(&BigRational::from_integer(BigInt::from(2)));
                let q = self.div(&y, &two_p).ok()?;
                return Some(TowerElement::ext(level, p, q));
            }
        }
        None
    }

    /// A square root in the full tower.
    pub fn sqrt(&self, a: &TowerElement) -> Option<TowerElement> {
        self.sqrt_in(a, self.gens.len())
    }

    /// Whether `a` is a square in the full tower.
    ///
    /// `x + y√z` with `x <= 0`, `y ≠ 0` is never a square since
    /// `(p + q√z)² = p² + q²z + 2pq√z` has positive rational part; that case is
    /// answered directly, everything else goes through [`Tower::sqrt_in`].
    pub fn is_square(&self, a: &TowerElement) -> bool {
        if let Ext { level, re, im } = a {
            if *level + 1 == self.gens.len() && self.sign(re) <= 0 && !im.is_zero() {
                return false;
            }
        }
        self.sqrt(a).is_some()
    }

    pub fn format(&self, a: &TowerElement) -> String {
        match a {
            Rational(q) => q.to_string(),
            Ext { level, re, im } => {
                let g = match &self.gens[*level] {
                    Rational(q) => q.to_string(),
                    other => format!("({})", self.format(other)),
                };
                let im_s = match &**im {
                    Rational(q) if q.is_one() => String::new(),
                    Rational(q) if (-q).is_one() => "-".to_string(),
                    Rational(q) => format!("{q}*"),
                    other => format!("({})*", self.format(other)),
                };
                if re.is_zero() {
                    format!("{im_s}sqrt({g})")
                } else {
                    format!("{} + {im_s}sqrt({g})", self.format(re))
                }
            }
        }
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational(q) => write!(f, "{q}"),
            Ext { level, re, im } => write!(f, "({re}) + ({im})·√g{level}"),
        }
    }
}

/// Largest `k >= 1` with `pred(k)`, for `pred` true on `1..=k` and false
/// afterwards. `guess` only affects speed.
fn last_true(pred: impl Fn(&BigInt) -> bool, guess: BigInt) -> BigInt {
    let one = BigInt::one();
    let mut lo;
    let mut hi;
    let guess = if guess < one { one.clone() } else { guess };
    if pred(&guess) {
        lo = guess;
        let mut step = one.clone();
        loop {
            let probe = &lo + &step;
            if pred(&probe) {
                lo = probe;
                step *= 2;
            } else {
                hi = probe;
                break;
            }
        }
    } else {
        hi = guess;
        let mut step = one.clone();
        loop {
            let probe = &hi - &step;
            if probe < one {
                lo = BigInt::zero();
                break;
            }
            if pred(&probe) {
                lo = probe;
                break;
            }
            hi = probe;
            step *= 2;
        }
    }
    while &hi - &lo > one {
        let mid: BigInt = (&lo + &hi) / 2;
        if pred(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn f64_guess(x: f64) -> BigInt {
    if (1.0..1e300).contains(&x) {
        num_bigint::BigInt::from_biguint(
            num_bigint::Sign::Plus,
            num_traits::FromPrimitive::from_f64(x.floor()).unwrap_or_default(),
        )
    } else {
        BigInt::one()
    }
}

/// One certified state of the orbit.
#[derive(Debug, Clone)]
pub struct OrbitState {
    pub n: usize,
    /// Depth `n + 1`.
    pub x: TowerElement,
    /// Depth `n`.
    pub y: TowerElement,
    /// Digits that produced this state (`None` at `n = 0`).
    pub k: Option<BigInt>,
    pub j: Option<BigInt>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepReport {
    pub n: usize,
    pub k: Option<String>,
    pub j: Option<String>,
    pub x_approx: f64,
    pub y_approx: f64,
    pub bits: u64,
}

#[derive(Debug, Clone)]
pub struct OrbitCertificate {
    pub states: Vec<OrbitState>,
    pub tower: Tower,
}

impl OrbitCertificate {
    pub fn reports(&self) -> Vec<StepReport> {
        self.states
            .iter()
            .map(|s| StepReport {
                n: s.n,
                k: s.k.as_ref().map(|k| k.to_string()),
                j: s.j.as_ref().map(|j| j.to_string()),
                x_approx: self.tower.approx(&s.x),
                y_approx: self.tower.approx(&s.y),
                bits: s.x.max_bits().max(s.y.max_bits()),
            })
            .collect()
    }
}

fn require(ok: bool, clause: &'static str, n: usize) -> Result<(), TowerError> {
    if ok {
        Ok(())
    } else {
        Err(TowerError::InvariantViolation { clause, n })
    }
}

/// Checks i(n), ii(n), iii(n) for `(x, y)` in a tower whose top generator is `y`.
fn check_state(t: &Tower, x: &TowerElement, y: &TowerElement, n: usize) -> Result<(), TowerError> {
    // i(n): y > 0 and not a square in K_n (the tower below y)
    require(t.sign(y) > 0, "i: y > 0", n)?;
    require(!t.truncated(n).is_square(y), "i: y is not a square", n)?;
    // ii(n): x > 0, x = a + b√y with a ≠ 0 and |b| >= 1
    require(t.sign(x) > 0, "ii: x > 0", n)?;
    let (a, b) = x.split(n);
    require(!a.is_zero(), "ii: a ≠ 0", n)?;
    require(t.sign(&(&t.abs(&b) - &TowerElement::one())) >= 0, "ii: |b| >= 1", n)?;
    // iii(n): y > x²
    require(t.sign(&(y - &t.square(x))) > 0, "iii: y > x²", n)?;
    Ok(())
}

/// Runs `depth` steps of the accelerated algorithm for `σ(x) = x²` from
/// `(x₀, y₀)` in exact arithmetic, certifying at each step that
///
/// * i(n): `yₙ > 0` is not a square in `Kₙ`,
/// * ii(n): `xₙ = aₙ + bₙ√yₙ > 0` with `aₙ ≠ 0`, `|bₙ| >= 1`,
/// * iii(n): `yₙ > xₙ²`,
///
/// where `yₙ₊₁ = yₙ - kₙ₊₁xₙ²` with `0 < yₙ₊₁ < xₙ²` and
/// `xₙ₊₁ = xₙ - jₙ₊₁√yₙ₊₁` with `0 < xₙ₊₁ < √yₙ₊₁`.
///
/// `x0` must be written over the generator `y0` (level 0).
pub fn orbit_verify(x0: &TowerElement, y0: &BigRational, depth: usize) -> Result<OrbitCertificate, TowerError> {
    if depth > HARD_DEPTH_CAP {
        return Err(TowerError::DepthCap(depth));
    }
    let mut tower = Tower::new();
    tower.push(Rational(y0.clone())).map_err(|_| TowerError::InvariantViolation { clause: "i: y0", n: 0 })?;
    tower.check(x0)?;
    let mut x = x0.clone();
    let mut y = Rational(y0.clone());
    check_state(&tower, &x, &y, 0)?;
    let mut states = vec![OrbitState { n: 0, x: x.clone(), y: y.clone(), k: None, j: None }];

    for n in 0..depth {
        let x2 = tower.square(&x);
        let guess = f64_guess(tower.approx(&y) / tower.approx(&x2));
        let k =
            last_true(|k| tower.sign(&(&y - &x2.scale_by_rational(&BigRational::from_integer(k.clone())))) > 0, guess);
        require(k >= BigInt::one(), "step: k >= 1", n + 1)?;
        let y_next = &y - &x2.scale_by_rational(&BigRational::from_integer(k.clone()));
        require(tower.cmp(&y_next, &x2) == Ordering::Less, "step: y' < x²", n + 1)?;

        tower.push(y_next.clone()).map_err(|e| match e {
            TowerError::NonPositiveGenerator { .. } => TowerError::InvariantViolation { clause: "i: y > 0", n: n + 1 },
            TowerError::SquareGenerator { .. } => {
                TowerError::InvariantViolation { clause: "i: y is not a square", n: n + 1 }
            }
            other => other,
        })?;
        let root = TowerElement::sqrt_of_generator(n + 1);
        let guess = f64_guess(tower.approx(&x) / tower.approx(&y_next).sqrt());
        let j = last_true(
            |j| tower.sign(&(&x - &root.scale_by_rational(&BigRational::from_integer(j.clone())))) > 0,
            guess,
        );
        require(j >= BigInt::one(), "step: j >= 1", n + 1)?;
        let x_next = &x - &root.scale_by_rational(&BigRational::from_integer(j.clone()));
        require(tower.cmp(&x_next, &root) == Ordering::Less, "step: x' < √y'", n + 1)?;

        check_state(&tower, &x_next, &y_next, n + 1)?;
        x = x_next;
        y = y_next;
        states.push(OrbitState { n: n + 1, x: x.clone(), y: y.clone(), k: Some(k), j: Some(j) });
    }
    Ok(OrbitCertificate { states, tower })
}

/// The point `(−1 + √2, 2)` over the tower `ℚ(√2)`.
pub fn m0() -> (TowerElement, BigRational) {
    (TowerElement::ext(0, TowerElement::int(-1), TowerElement::one()), BigRational::from_integer(BigInt::from(2)))
}

/// A point with exact coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPoint {
    pub x: TowerElement,
    pub y: TowerElement,
}

/// `σ(x) = sgn(x)x²`.
pub fn square_sigma(t: &Tower, x: &TowerElement) -> TowerElement {
    let s = t.square(x);
    if t.sign(x) < 0 {
        -&s
    } else {
        s
    }
}

/// `σ⁻¹(y) = sgn(y)√|y|`, when the root lies in the tower (either a square or
/// a generator).
pub fn square_sigma_inv(t: &Tower, y: &TowerElement) -> Result<TowerElement, TowerError> {
    let a = t.abs(y);
    let r = match t.sqrt(&a) {
        Some(r) => t.abs(&r),
        None => {
            let level =
                t.gens.iter().position(|g| *g == a).ok_or_else(|| TowerError::NotRepresentable(t.format(&a)))?;
            TowerElement::sqrt_of_generator(level)
        }
    };
    Ok(if t.sign(y) < 0 { -&r } else { r })
}

pub fn exact_h(t: &Tower, p: &ExactPoint) -> Result<ExactPoint, TowerError> {
    Ok(ExactPoint { x: &p.x + &square_sigma_inv(t, &p.y)?, y: p.y.clone() })
}

pub fn exact_h_inv(t: &Tower, p: &ExactPoint) -> Result<ExactPoint, TowerError> {
    Ok(ExactPoint { x: &p.x - &square_sigma_inv(t, &p.y)?, y: p.y.clone() })
}

pub fn exact_v(t: &Tower, p: &ExactPoint) -> ExactPoint {
    ExactPoint { x: p.x.clone(), y: &p.y + &square_sigma(t, &p.x) }
}

pub fn exact_v_inv(t: &Tower, p: &ExactPoint) -> ExactPoint {
    ExactPoint { x: p.x.clone(), y: &p.y - &square_sigma(t, &p.x) }
}

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub holds: bool,
    /// `v⁴(1,0)`, `h⁻¹v⁴(1,0)`, `v²h⁻¹v⁴(1,0)`, `hv²h⁻¹v⁴(1,0)`.
    pub trail: Vec<ExactPoint>,
    pub tower: Tower,
}

impl IdentityCheck {
    pub fn final_point(&self) -> &ExactPoint {
        self.trail.last().expect("trail is never empty")
    }
}

/// Evaluates `h∘v²∘h⁻¹∘v⁴` on `(1, 0)` exactly in `ℚ(√2)` and compares the
/// result with `(−1 + √2, 2)`.
pub fn m0_identity_check() -> Result<IdentityCheck, TowerError> {
    let t = Tower::over_rational(BigRational::from_integer(BigInt::from(2)))?;
    let mut p = ExactPoint { x: TowerElement::one(), y: TowerElement::zero() };
    for _ in 0..4 {
        p = exact_v(&t, &p);
    }
    let mut trail = vec![p.clone()];
    p = exact_h_inv(&t, &p)?;
    trail.push(p.clone());
    p = exact_v(&t, &exact_v(&t, &p));
    trail.push(p.clone());
    p = exact_h(&t, &p)?;
    trail.push(p.clone());
    let (mx, my) = m0();
    let holds = p.x == mx && p.y == Rational(my);
    Ok(IdentityCheck { holds, trail, tower: t })
}
