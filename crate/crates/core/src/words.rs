//! Words over the transvection alphabet.
//!
//! A word `w = w₁w₂…wₙ` acts as the composition `w₁∘w₂∘…∘wₙ`: the first letter
//! is outermost and the last letter is applied first.
//!
//! Text form: `H` and `V` for `h`, `v`; lowercase `h` and `v` for their
//! inverses. The empty word is written as an empty string.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::{euclid_step, in_x, in_y, EuclidError};
use crate::sigma::{Point2, SigmaMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WordError {
    #[error("bad letter `{0}` (expected H, V, h or v)")]
    BadLetter(char),
    #[error("iterate {step} of the Euclidean algorithm is on an axis")]
    AxisHit { step: usize },
    #[error("start point must be off the axes, got {0}")]
    NotInXOrY(Point2),
    #[error("sigma must fix the integers for the SL(2,Z) comparison")]
    SigmaMovesIntegers,
    #[error("depth {0} exceeds the enumeration cap of 20")]
    DepthTooLarge(usize),
    #[error(transparent)]
    Euclid(#[from] EuclidError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    H,
    V,
    HInv,
    VInv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::H => Letter::HInv,
            Letter::V => Letter::VInv,
            Letter::HInv => Letter::H,
            Letter::VInv => Letter::V,
        }
    }

    pub fn apply(self, s: &SigmaMap, p: Point2) -> Point2 {
        match self {
            Letter::H => s.h(p),
            Letter::V => s.v(p),
            Letter::HInv => s.h_inv(p),
            Letter::VInv => s.v_inv(p),
        }
    }

    /// Image in `SL(2, ℤ)` when `σ` is the identity.
    pub fn matrix(self) -> IntMatrix2 {
        let m = |a: i64, b: i64, c: i64, d: i64| IntMatrix2::from_i64([[a, b], [c, d]]);
        match self {
            Letter::H => m(1, 1, 0, 1),
            Letter::V => m(1, 0, 1, 1),
            Letter::HInv => m(1, -1, 0, 1),
            Letter::VInv => m(1, 0, -1, 1),
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Letter::H | Letter::V)
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::H => 'H',
            Letter::V => 'V',
            Letter::HInv => 'h',
            Letter::VInv => 'v',
        }
    }

    pub fn from_char(c: char) -> Result<Letter, WordError> {
        match c {
            'H' => Ok(Letter::H),
            'V' => Ok(Letter::V),
            'h' => Ok(Letter::HInv),
            'v' => Ok(Letter::VInv),
            _ => Err(WordError::BadLetter(c)),
        }
    }
}

/// A finite word in the group alphabet. Monoid words are the ones whose
/// letters are all positive (or all negative, for the Y-side monoid).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// `w⁻¹ = wₙ⁻¹…w₁⁻¹`.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Word(out)
    }

    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }

    /// Free reduction (cancels adjacent `xx⁻¹`).
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.is_positive())
    }

    pub fn is_negative(&self) -> bool {
        self.0.iter().all(|l| !l.is_positive())
    }

    /// `w₁(w₂(…wₙ(p)))`.
    pub fn eval(&self, s: &SigmaMap, p: Point2) -> Point2 {
        self.0.iter().rev().fold(p, |q, l| l.apply(s, q))
    }

    /// Product of the letter matrices, first letter leftmost.
    pub fn matrix(&self) -> IntMatrix2 {
        self.0.iter().fold(IntMatrix2::identity(), |m, l| m.mul(&l.matrix()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars().filter(|c| !c.is_whitespace()).map(Letter::from_char).collect::<Result<_, _>>().map(Word)
    }
}

/// See [`Word::eval`].
pub fn eval_word(s: &SigmaMap, w: &Word, p: Point2) -> Point2 {
    w.eval(s, p)
}

/// 2×2 integer matrix with arbitrary-precision entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix2(pub [[BigInt; 2]; 2]);

impl IntMatrix2 {
    pub fn identity() -> Self {
        IntMatrix2::from_i64([[1, 0], [0, 1]])
    }

    pub fn from_i64(m: [[i64; 2]; 2]) -> Self {
        IntMatrix2(m.map(|row| row.map(BigInt::from)))
    }

    pub fn mul(&self, o: &IntMatrix2) -> IntMatrix2 {
        let a = &self.0;
        let b = &o.0;
        IntMatrix2([
            [&a[0][0] * &b[0][0] + &a[0][1] * &b[1][0], &a[0][0] * &b[0][1] + &a[0][1] * &b[1][1]],
            [&a[1][0] * &b[0][0] + &a[1][1] * &b[1][0], &a[1][0] * &b[0][1] + &a[1][1] * &b[1][1]],
        ])
    }

    pub fn det(&self) -> BigInt {
        let a = &self.0;
        &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]
    }

    pub fn apply(&self, q: (&BigInt, &BigInt)) -> (BigInt, BigInt) {
        let a = &self.0;
        (&a[0][0] * q.0 + &a[0][1] * q.1, &a[1][0] * q.0 + &a[1][1] * q.1)
    }

    pub fn is_identity(&self) -> bool {
        let a = &self.0;
        a[0][0].is_one() && a[1][1].is_one() && a[0][1].is_zero() && a[1][0].is_zero()
    }
}

/// `U = v⁻¹h`, of order 3 modulo the centre.
pub fn modular_u() -> Word {
    Word(vec![Letter::VInv, Letter::H])
}

/// `V = h⁻¹vh⁻¹`, the quarter turn.
pub fn modular_v() -> Word {
    Word(vec![Letter::HInv, Letter::V, Letter::HInv])
}

/// Compares the action of `w` on the integer point `q` with its `SL(2, ℤ)`
/// image. Requires `σ` to fix the integers; coordinates must stay below 2^53.
pub fn morphism_check(s: &SigmaMap, w: &Word, q: (i64, i64)) -> Result<bool, WordError> {
    if !s.fixes_integers() {
        return Err(WordError::SigmaMovesIntegers);
    }
    let image = w.eval(s, Point2::new(q.0 as f64, q.1 as f64));
    let (mx, my) = w.matrix().apply((&BigInt::from(q.0), &BigInt::from(q.1)));
    let as_big = |t: f64| (t.fract() == 0.0 && t.abs() < 9.007_199_254_740_992e15).then(|| BigInt::from(t as i64));
    Ok(as_big(image.x) == Some(mx) && as_big(image.y) == Some(my))
}

/// The unique word of length `n` with `p ∈ w(X)` (or `p ∈ w(Y)` with inverse
/// letters when `p ∈ Y`), together with `Eⁿ(p)`.
///
/// Letter `i` is read off the cell of `E^{i-1}(p)`: A gives `H`, B gives `V`,
/// C gives `h`, D gives `v`.
pub fn encode_with_endpoint(s: &SigmaMap, p: Point2, n: usize) -> Result<(Word, Point2), WordError> {
    if p.x == 0.0 || p.y == 0.0 {
        return Err(WordError::NotInXOrY(p));
    }
    let mut w = Word(Vec::with_capacity(n));
    let mut q = p;
    for step in 0..n {
        let e = euclid_step(s, q)?;
        let letter = e.letter.ok_or(WordError::AxisHit { step })?;
        w.push(letter.inverse());
        q = e.result;
    }
    Ok((w, q))
}

pub fn encode(s: &SigmaMap, p: Point2, n: usize) -> Result<Word, WordError> {
    encode_with_endpoint(s, p, n).map(|(w, _)| w)
}

/// `p ∈ w(X)` for a positive word, `p ∈ w(Y)` for a negative one.
pub fn in_cell(s: &SigmaMap, w: &Word, p: Point2) -> bool {
    let back = w.inverse().eval(s, p);
    if w.is_negative() && !w.is_empty() {
        in_y(back)
    } else {
        in_x(back)
    }
}

/// Parameter grid `t0, t0 + dt, …, t1` with `steps + 1` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl ParamGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 0 {
            return vec![self.t0];
        }
        let dt = (self.t1 - self.t0) / self.steps as f64;
        (0..=self.steps).map(|i| self.t0 + dt * i as f64).collect()
    }
}

/// Closed axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Box2 {
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// True once `|x|` or `|y|` exceeds every value the box allows. Letters of
    /// either monoid never decrease `|x|` or `|y|` on their own quadrants, so
    /// such a point never comes back.
    pub fn escaped(&self, p: Point2) -> bool {
        p.x.abs() > self.x0.abs().max(self.x1.abs()) || p.y.abs() > self.y0.abs().max(self.y1.abs())
    }
}

/// Which family of σ-rational lines to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineFamily {
    /// Images of `Ox` (points `(t, 0)`) under words in `h`, `v`.
    Ox,
    /// Images of `Oy` (points `(0, t)`) under words in `h⁻¹`, `v⁻¹`.
    Oy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSample {
    pub word: Word,
    pub t: f64,
    pub point: Point2,
}

pub const MAX_LINE_DEPTH: usize = 20;

/// Calls `visit(word, t, point)` for every word of length `<= depth` in the
/// family's alphabet and every grid parameter whose image lies in `bbox`.
/// A sample is dropped from a subtree as soon as its image escapes `bbox`.
pub fn visit_rational_lines<F>(
    s: &SigmaMap,
    family: LineFamily,
    depth: usize,
    grid: &ParamGrid,
    bbox: &Box2,
    visit: &F,
) -> Result<(), WordError>
where
    F: Fn(&[Letter], f64, Point2) + Sync,
{
    if depth > MAX_LINE_DEPTH {
        return Err(WordError::DepthTooLarge(depth));
    }
    let (alphabet, seed): ([Letter; 2], fn(f64) -> Point2) = match family {
        LineFamily::Ox => ([Letter::H, Letter::V], |t| Point2::new(t, 0.0)),
        LineFamily::Oy => ([Letter::HInv, Letter::VInv], |t| Point2::new(0.0, t)),
    };
    let alive: Vec<(f64, Point2)> =
        grid.values().into_iter().map(|t| (t, seed(t))).filter(|(_, p)| !bbox.escaped(*p)).collect();
    let mut prefix = Vec::with_capacity(depth);
    walk(s, &alphabet, depth, bbox, &alive, &mut prefix, visit);
    Ok(())
}

fn walk<F>(
    s: &SigmaMap,
    alphabet: &[Letter; 2],
    remaining: usize,
    bbox: &Box2,
    alive: &[(f64, Point2)],
    word: &mut Vec<Letter>,
    visit: &F,
) where
    F: Fn(&[Letter], f64, Point2) + Sync,
{
    if alive.is_empty() {
        return;
    }
    // `word` is stored innermost-first while walking; reverse for the visitor.
    let outer_first: Vec<Letter> = word.iter().rev().copied().collect();
    for &(t, p) in alive {
        if bbox.contains(p) {
            visit(&outer_first, t, p);
        }
    }
    if remaining == 0 {
        return;
    }
    let child = |l: Letter, word: &mut Vec<Letter>| {
        let next: Vec<(f64, Point2)> =
            alive.iter().map(|&(t, p)| (t, l.apply(s, p))).filter(|(_, q)| !bbox.escaped(*q)).collect();
        word.push(l);
        walk(s, alphabet, remaining - 1, bbox, &next, word, visit);
        word.pop();
    };
    if remaining >= 8 {
        let mut w0 = word.clone();
        let mut w1 = word.clone();
        rayon::join(|| child(alphabet[0], &mut w0), || child(alphabet[1], &mut w1));
    } else {
        child(alphabet[0], word);
        child(alphabet[1], word);
    }
}

/// All samples of σ-rational lines up to `depth`, in canonical order
/// (shorter words first, then lexicographic, then by `t`).
pub fn rational_lines(
    s: &SigmaMap,
    family: LineFamily,
    depth: usize,
    grid: &ParamGrid,
    bbox: &Box2,
) -> Result<Vec<LineSample>, WordError> {
    let out = std::sync::Mutex::new(Vec::new());
    visit_rational_lines(s, family, depth, grid, bbox, &|w: &[Letter], t, p| {
        out.lock().unwrap().push(LineSample { word: Word(w.to_vec()), t, point: p });
    })?;
    let mut v = out.into_inner().unwrap();
    v.par_sort_by(|a, b| (a.word.len(), &a.word).cmp(&(b.word.len(), &b.word)).then(a.t.total_cmp(&b.t)));
    Ok(v)
}

/// Membership of `p` in `w(X)` (or `w(Y)`) for every length-`n` word of the
/// matching monoid. Exactly one entry is true off the σ-rational set.
pub fn cells_containing(s: &SigmaMap, p: Point2, n: usize) -> BTreeMap<Word, bool> {
    let (alphabet, inside): ([Letter; 2], fn(Point2) -> bool) =
        if in_x(p) { ([Letter::H, Letter::V], in_x) } else { ([Letter::HInv, Letter::VInv], in_y) };
    let mut out = BTreeMap::new();
    for bits in 0..(1u64 << n) {
        let w = Word((0..n).map(|i| alphabet[((bits >> i) & 1) as usize]).collect());
        let hit = inside(w.inverse().eval(s, p));
        out.insert(w, hit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eval_examples() {
        let hv: Word = "HV".parse().unwrap();
        assert_eq!(hv.eval(&SigmaMap::identity(), Point2::new(1.0, 1.0)), Point2::new(3.0, 2.0));
        let p = hv.eval(&SigmaMap::power(2.0).unwrap(), Point2::new(1.0, 1.0));
        assert!((p.x - (1.0 + 2f64.sqrt())).abs() < 1e-15 && p.y == 2.0);
        let q = Point2::new(0.3, -1.7);
        assert_eq!(Word::empty().eval(&SigmaMap::power(3.0).unwrap(), q), q);
    }

    #[test]
    fn word_text_round_trip() {
        let w: Word = "HVhv".parse().unwrap();
        assert_eq!(w.letters(), &[Letter::H, Letter::V, Letter::HInv, Letter::VInv]);
        assert_eq!(w.to_string(), "HVhv");
        assert_eq!(w.inverse().to_string(), "VHvh");
        assert!("HX".parse::<Word>().is_err());
        assert_eq!("HVvh".parse::<Word>().unwrap().reduced(), Word::empty());
    }

    #[test]
    fn encode_examples() {
        let id = SigmaMap::identity();
        assert_eq!(encode(&id, Point2::new(PI, 1.0), 4).unwrap().to_string(), "HHHV");
        assert_eq!(encode(&id, Point2::new(3.0, 2.0), 2).unwrap().to_string(), "HV");
        assert_eq!(encode(&SigmaMap::power(2.0).unwrap(), Point2::new(0.5, 0.7), 0).unwrap(), Word::empty());
    }

    #[test]
    fn encode_reports_axis_hit() {
        // (3, 2) → (1, 2) → (1, 1) → (1, 0), which is fixed
        let err = encode(&SigmaMap::identity(), Point2::new(3.0, 2.0), 5).unwrap_err();
        assert_eq!(err, WordError::AxisHit { step: 3 });
    }

    #[test]
    fn encode_y_side_uses_inverse_letters() {
        let s = SigmaMap::power(2.0).unwrap();
        let p = Point2::new(-0.37, 1.91);
        let (w, end) = encode_with_endpoint(&s, p, 6).unwrap();
        assert!(w.is_negative());
        let back = w.eval(&s, end);
        assert!(back.dist(p) < 1e-12);
        assert!(in_cell(&s, &w, p));
    }

    #[test]
    fn rational_lines_small_cases() {
        let grid = ParamGrid { t0: 1.0, t1: 1.0, steps: 0 };
        let bbox = Box2 { x0: 0.0, y0: 0.0, x1: 10.0, y1: 10.0 };
        let id = SigmaMap::identity();
        let samples = rational_lines(&id, LineFamily::Ox, 2, &grid, &bbox).unwrap();
        let at = |w: &str| samples.iter().find(|s| s.word.to_string() == w).unwrap().point;
        assert_eq!(at(""), Point2::new(1.0, 0.0));
        assert_eq!(at("H"), Point2::new(1.0, 0.0));
        assert_eq!(at("V"), Point2::new(1.0, 1.0));
        assert_eq!(at("HV"), Point2::new(2.0, 1.0));
        assert_eq!(at("VV"), Point2::new(1.0, 2.0));
        assert_eq!(at("VH"), Point2::new(1.0, 1.0));
        assert_eq!(at("HH"), Point2::new(1.0, 0.0));
        assert_eq!(samples.len(), 7);

        let grid = ParamGrid { t0: 0.0, t1: 2.0, steps: 4 };
        let sq = SigmaMap::power(2.0).unwrap();
        for s in rational_lines(&sq, LineFamily::Ox, 1, &grid, &bbox).unwrap() {
            if s.word.to_string() == "V" {
                assert_eq!(s.point, Point2::new(s.t, s.t * s.t));
            }
        }
        for s in rational_lines(&id, LineFamily::Ox, 1, &grid, &bbox).unwrap() {
            if s.word.to_string() == "V" {
                assert_eq!(s.point, Point2::new(s.t, s.t));
            }
        }
    }

    #[test]
    fn rational_lines_dual_family_stays_in_y() {
        let grid = ParamGrid { t0: -2.0, t1: 2.0, steps: 8 };
        let bbox = Box2 { x0: -5.0, y0: -5.0, x1: 5.0, y1: 5.0 };
        let s = SigmaMap::power(2.0).unwrap();
        let samples = rational_lines(&s, LineFamily::Oy, 4, &grid, &bbox).unwrap();
        assert!(!samples.is_empty());
        for smp in samples {
            assert!(smp.word.is_negative());
            assert!(smp.point.y == 0.0 || in_y(smp.point), "{smp:?}");
        }
    }

    #[test]
    fn rational_lines_depth_cap() {
        let grid = ParamGrid { t0: 1.0, t1: 1.0, steps: 0 };
        let bbox = Box2 { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 };
        assert_eq!(
            rational_lines(&SigmaMap::identity(), LineFamily::Ox, 21, &grid, &bbox),
            Err(WordError::DepthTooLarge(21))
        );
    }

    #[test]
    fn morphism_examples() {
        let s = SigmaMap::sine_wobble(0.5).unwrap();
        let hv: Word = "HV".parse().unwrap();
        assert_eq!(hv.matrix(), IntMatrix2::from_i64([[2, 1], [1, 1]]));
        assert!(morphism_check(&s, &hv, (1, 1)).unwrap());
        assert_eq!(hv.eval(&s, Point2::new(1.0, 1.0)), Point2::new(3.0, 2.0));

        let v = modular_v();
        assert_eq!(v.matrix(), IntMatrix2::from_i64([[0, -1], [1, 0]]));
        assert!(v.pow(4).matrix().is_identity());
        let u = modular_u();
        assert_eq!(u.pow(3).matrix(), IntMatrix2::from_i64([[-1, 0], [0, -1]]));
        let rel = v.pow(2).concat(&u.pow(3));
        assert!(rel.matrix().is_identity());
        for q in [(3, -7), (0, 1), (-11, 4)] {
            let p = Point2::new(q.0 as f64, q.1 as f64);
            assert_eq!(v.pow(4).eval(&s, p), p);
            assert_eq!(rel.eval(&s, p), p);
            assert!(morphism_check(&s, &rel, q).unwrap());
        }
        assert_eq!(morphism_check(&SigmaMap::power(2.0).unwrap(), &hv, (1, 1)), Err(WordError::SigmaMovesIntegers));
    }

    #[test]
    fn cell_uniqueness_small() {
        let s = SigmaMap::power(3.0).unwrap();
        let p = Point2::new(0.81, 0.44);
        let cells = cells_containing(&s, p, 6);
        assert_eq!(cells.values().filter(|&&b| b).count(), 1);
        let w = encode(&s, p, 6).unwrap();
        assert!(cells[&w]);
    }
}
