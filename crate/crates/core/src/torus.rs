//! Generalized transvections on the torus `𝕋² = ℝ²/ℤ²`:
//! `h(x, y) = (x + σ₂(y), y)` and `v(x, y) = (x, y + σ₁(x))` for circle maps
//! `σ₁`, `σ₂`, with Monte Carlo checks of Lebesgue invariance and of the
//! Birkhoff averages along `h`-orbits.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("bad circle map descriptor {0:?} (expected const:c, lin:a or sine:c)")]
    BadMap(String),
    #[error("bad trigonometric polynomial {0:?}")]
    BadPoly(String),
    #[error("need at least one iteration, start and bin")]
    Empty,
}

/// Reduction into `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A circle map `𝕋 → 𝕋`, evaluated on representatives in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CircleMap {
    /// `x ↦ c`.
    Const(f64),
    /// `x ↦ a·x mod 1`.
    Lin(f64),
    /// `x ↦ x + c·sin(2πx)/2π mod 1`.
    Sine(f64),
}

impl CircleMap {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            CircleMap::Const(c) => frac(c),
            CircleMap::Lin(a) => frac(a * x),
            CircleMap::Sine(c) => frac(x + c * (TAU * x).sin() / TAU),
        }
    }
}

impl fmt::Display for CircleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleMap::Const(c) => write!(f, "const:{c}"),
            CircleMap::Lin(a) => write!(f, "lin:{a}"),
            CircleMap::Sine(c) => write!(f, "sine:{c}"),
        }
    }
}

impl FromStr for CircleMap {
    type Err = TorusError;

    fn from_str(s: &str) -> Result<Self, TorusError> {
        let bad = || TorusError::BadMap(s.to_string());
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        let v: f64 = arg.trim().parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        match kind {
            "const" => Ok(CircleMap::Const(v)),
            "lin" => Ok(CircleMap::Lin(v)),
            "sine" => Ok(CircleMap::Sine(v)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusMapPair {
    pub sigma1: CircleMap,
    pub sigma2: CircleMap,
}

impl TorusMapPair {
    pub fn h(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (frac(x + self.sigma2.eval(y)), y)
    }

    pub fn h_inv(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (frac(x - self.sigma2.eval(y)), y)
    }

    pub fn v(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (x, frac(y + self.sigma1.eval(x)))
    }

    pub fn v_inv(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (x, frac(y - self.sigma1.eval(x)))
    }
}

/// Distance from `t` to the circle, i.e. to the nearest integer.
fn circle_dist(t: f64) -> f64 {
    (t - t.round()).abs()
}

/// A rational `p/q`, `q <= max_den`, within `tol` of `t` on the circle.
pub fn near_rational(t: f64, max_den: u32, tol: f64) -> Option<(i64, u32)> {
    (1..=max_den).find_map(|q| {
        let p = (t * q as f64).round();
        (circle_dist(t * q as f64) <= tol * q as f64).then_some((p as i64, q))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Wave {
    Cos,
    Sin,
}

/// `c₀ + Σ cₖ·cos(2πkx)` / `sin(2πkx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub constant: f64,
    pub terms: Vec<(f64, Wave, u32)>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        TrigPoly { constant: c, terms: Vec::new() }
    }

    pub fn cos(k: u32) -> Self {
        TrigPoly { constant: 0.0, terms: vec![(1.0, Wave::Cos, k)] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().fold(self.constant, |acc, &(c, w, k)| {
            let arg = TAU * k as f64 * x;
            acc + c * match w {
                Wave::Cos => arg.cos(),
                Wave::Sin => arg.sin(),
            }
        })
    }

    /// `∫₀¹ φ dλ`.
    pub fn mean(&self) -> f64 {
        self.constant
            + self.terms.iter().filter(|&&(_, w, k)| w == Wave::Cos && k == 0).map(|&(c, _, _)| c).sum::<f64>()
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.constant != 0.0 || self.terms.is_empty() {
            parts.push(self.constant.to_string());
        }
        for &(c, w, k) in &self.terms {
            let name = match w {
                Wave::Cos => "cos",
                Wave::Sin => "sin",
            };
            parts.push(if c == 1.0 { format!("{name}{k}") } else { format!("{c}*{name}{k}") });
        }
        f.write_str(&parts.join(" + "))
    }
}

impl FromStr for TrigPoly {
    type Err = TorusError;

    /// Terms joined by `+`: a number, `cosK`, `sinK`, or `c*cosK`.
    fn from_str(s: &str) -> Result<Self, TorusError> {
        let bad = || TorusError::BadPoly(s.to_string());
        let mut p = TrigPoly::constant(0.0);
        for term in s.split('+').map(str::trim) {
            let (coef, body) = match term.split_once('*') {
                Some((c, b)) => (c.trim().parse::<f64>().map_err(|_| bad())?, b.trim()),
                None => (1.0, term),
            };
            let wave = if let Some(k) = body.strip_prefix("cos") {
                Some((Wave::Cos, k))
            } else {
                body.strip_prefix("sin").map(|k| (Wave::Sin, k))
            };
            match wave {
                Some((w, k)) => p.terms.push((coef, w, k.parse().map_err(|_| bad())?)),
                None => p.constant += coef * body.parse::<f64>().map_err(|_| bad())?,
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartResult {
    pub x: f64,
    pub y: f64,
    pub average: f64,
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffReport {
    pub n: usize,
    pub seed: u64,
    pub max_deviation: f64,
    pub starts: Vec<StartResult>,
    /// Starts whose translation `σ₂(y)` is close to a low-denominator rational.
    pub warnings: Vec<String>,
}

/// Denominator bound for the rational-translation warning.
pub const WARN_MAX_DEN: u32 = 100;
/// Distance for the rational-translation warning.
pub const WARN_TOL: f64 = 1e-9;

fn start_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| master.next_u64()).collect()
}

/// Time averages `(1/n)Σ_{k<n} φ₁⊗φ₂(hᵏ(x, y))` from random starts, compared
/// with `∫φ₁dλ·φ₂(y)`.
pub fn birkhoff_product_test(
    pair: &TorusMapPair,
    phi1: &TrigPoly,
    phi2: &TrigPoly,
    n: usize,
    starts: usize,
    seed: u64,
) -> Result<BirkhoffReport, TorusError> {
    if n == 0 || starts == 0 {
        return Err(TorusError::Empty);
    }
    let mean1 = phi1.mean();
    let results: Vec<(StartResult, Option<String>)> = start_seeds(seed, starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let (x, y) = (rng.gen::<f64>(), rng.gen::<f64>());
            let t = pair.sigma2.eval(y);
            let warning = near_rational(t, WARN_MAX_DEN, WARN_TOL)
                .map(|(p, q)| format!("start ({x}, {y}): translation {t} is within {WARN_TOL:e} of {p}/{q}"));
            let f2 = phi2.eval(y);
            let mut p = (x, y);
            let mut sum = 0.0;
            for _ in 0..n {
                sum += phi1.eval(p.0) * f2;
                p = pair.h(p);
            }
            let average = sum / n as f64;
            let expected = mean1 * f2;
            (StartResult { x, y, average, expected, deviation: (average - expected).abs() }, warning)
        })
        .collect();
    let max_deviation = results.iter().map(|(r, _)| r.deviation).fold(0.0, f64::max);
    let (starts, warnings): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(BirkhoffReport { n, seed, max_deviation, starts, warnings: warnings.into_iter().flatten().collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorusMove {
    H,
    V,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramReport {
    pub points: usize,
    pub bins: usize,
    pub seed: u64,
    pub expected: f64,
    /// Largest `|count - expected|` over the bins.
    pub max_abs_dev: f64,
    /// `4·√expected`.
    pub bound: f64,
    pub counts: Vec<u64>,
}

impl HistogramReport {
    pub fn within_bound(&self) -> bool {
        self.max_abs_dev <= self.bound
    }
}

const CHUNK: usize = 1 << 16;

/// Pushes `points` uniform points through `h` or `v` and bins the images on a
/// `bins × bins` grid.
pub fn lebesgue_histogram(
    pair: &TorusMapPair,
    mv: TorusMove,
    points: usize,
    bins: usize,
    seed: u64,
) -> Result<HistogramReport, TorusError> {
    if points == 0 || bins == 0 {
        return Err(TorusError::Empty);
    }
    let chunks = points.div_ceil(CHUNK);
    let counts = start_seeds(seed, chunks)
        .into_par_iter()
        .enumerate()
        .map(|(c, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut local = vec![0u64; bins * bins];
            let len = CHUNK.min(points - c * CHUNK);
            for _ in 0..len {
                let p = (rng.gen::<f64>(), rng.gen::<f64>());
                let (x, y) = match mv {
                    TorusMove::H => pair.h(p),
                    TorusMove::V => pair.v(p),
                };
                let i = ((x * bins as f64) as usize).min(bins - 1);
                let j = ((y * bins as f64) as usize).min(bins - 1);
                local[i * bins + j] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; bins * bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let expected = points as f64 / (bins * bins) as f64;
    let max_abs_dev = counts.iter().map(|&c| (c as f64 - expected).abs()).fold(0.0, f64::max);
    Ok(HistogramReport { points, bins, seed, expected, max_abs_dev, bound: 4.0 * expected.sqrt(), counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> TorusMapPair {
        TorusMapPair { sigma1: CircleMap::Sine(0.5), sigma2: CircleMap::Const(2f64.sqrt() - 1.0) }
    }

    #[test]
    fn translation_example() {
        let (x, y) = pair().h((0.9, 0.5));
        assert!((x - 0.314214).abs() < 1e-6);
        assert_eq!(y, 0.5);
        let id = TorusMapPair { sigma1: CircleMap::Const(0.0), sigma2: CircleMap::Const(0.0) };
        assert_eq!(id.v((0.3, 0.7)), (0.3, 0.7));
    }

    #[test]
    fn round_trips() {
        let p = pair();
        for q in [(0.1, 0.2), (0.999, 0.001), (0.5, 0.75)] {
            let back = p.h_inv(p.h(q));
            assert!(circle_dist(back.0 - q.0) <= 1e-15);
            let back = p.v_inv(p.v(q));
            assert!(circle_dist(back.1 - q.1) <= 1e-15);
        }
        assert_eq!(frac(-1e-20), 0.0);
    }

    #[test]
    fn birkhoff_trivial_cases() {
        let p = pair();
        let one = TrigPoly::constant(1.0);
        let c = TrigPoly::cos(1);
        let rep = birkhoff_product_test(&p, &one, &c, 1000, 4, 7).unwrap();
        assert!(rep.starts.iter().all(|s| (s.average - c.eval(s.y)).abs() < 1e-12));
        let rep = birkhoff_product_test(&p, &c, &c, 1, 3, 7).unwrap();
        assert!(rep.starts.iter().all(|s| (s.average - c.eval(s.x) * c.eval(s.y)).abs() < 1e-15));
    }

    #[test]
    fn rational_translation_warns() {
        let p = TorusMapPair { sigma1: CircleMap::Const(0.0), sigma2: CircleMap::Const(0.25) };
        let rep = birkhoff_product_test(&p, &TrigPoly::cos(1), &TrigPoly::constant(1.0), 10, 2, 0).unwrap();
        assert_eq!(rep.warnings.len(), 2);
        assert_eq!(near_rational(2f64.sqrt() - 1.0, 100, 1e-9), None);
    }

    #[test]
    fn parsing() {
        assert_eq!("lin:3".parse::<CircleMap>().unwrap(), CircleMap::Lin(3.0));
        assert!("foo:1".parse::<CircleMap>().is_err());
        let p: TrigPoly = "0.5 + 2*cos1 + sin3".parse().unwrap();
        assert_eq!(p.mean(), 0.5);
        assert!((p.eval(0.25) - (0.5 + 2.0 * (TAU * 0.25).cos() + (TAU * 0.75).sin())).abs() < 1e-15);
        assert!("cosx".parse::<TrigPoly>().is_err());
    }

    #[test]
    fn histogram_is_deterministic() {
        let a = lebesgue_histogram(&pair(), TorusMove::V, 100_000, 10, 3).unwrap();
        let b = lebesgue_histogram(&pair(), TorusMove::V, 100_000, 10, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 100_000);
    }
}
