//! Desk-scale experiments: the counting function `Λ(r)`, coverage of the
//! plane by σ-rational lines, the backward orbit of `(1, 0)` for `σ(x) = x²`,
//! and orbit coverage in dimensions 3 and 4.

use std::collections::{HashSet, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::euclid_step;
use crate::sigma::{Family, Point2, PointN, SigmaError, SigmaMap};
use crate::words::{visit_rational_lines, Box2, LineFamily, ParamGrid, WordError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("r must satisfy 0 < r <= 1, got {0}")]
    RadiusOutOfRange(String),
    #[error("exact mode needs the identity map and a rational r")]
    ExactUnsupported,
    #[error("box {0:?} must lie in the open first quadrant")]
    BoxOutsideQuadrant(Box2),
    #[error("grid must have at least one cell per axis")]
    EmptyGrid,
    #[error("the probe is defined for sigma = pow:2 only")]
    NotSquareMap,
    #[error("dimension {0} not supported (3 or 4)")]
    Dimension(usize),
    #[error("start needs two coordinates of opposite signs")]
    NoOppositeSigns,
    #[error(transparent)]
    Sigma(#[from] SigmaError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Snapping resolution for floating-point deduplication.
pub const SNAP: f64 = 1e-9;
/// Slack on the upper edge of the closed unit square in float mode.
pub const EDGE_SLACK: f64 = 1e-12;

fn snap(x: f64) -> i64 {
    (x / SNAP).round() as i64
}

/// `r` for [`mertens_count`].
#[derive(Debug, Clone, PartialEq)]
pub enum Radius {
    Exact(BigRational),
    Float(f64),
}

impl Radius {
    /// `1/m`.
    pub fn reciprocal(m: u64) -> Radius {
        Radius::Exact(BigRational::new(BigInt::one(), BigInt::from(m)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Radius::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Radius::Float(r) => *r,
        }
    }

    fn describe(&self) -> String {
        match self {
            Radius::Exact(q) => q.to_string(),
            Radius::Float(r) => r.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MertensReport {
    pub r: String,
    pub count: u64,
    /// `r²·count`.
    pub normalized: f64,
    pub sigma: String,
    pub exact: bool,
    /// What is counted: distinct points of the closed square `[0, 1]²`.
    pub counting: String,
}

/// `card Λ(r)`, `Λ(r) = {w(r, r) ∈ [0, 1]² : w ∈ ⟨h, v⟩⁺}`.
///
/// The monoid tree is walked depth first. `h` and `v` never decrease a
/// coordinate on the first quadrant, so a branch is cut once a coordinate
/// exceeds 1, and a point seen before is not expanded twice.
pub fn mertens_count(s: &SigmaMap, r: &Radius, exact: bool) -> Result<MertensReport, ExperimentError> {
    let rf = r.to_f64();
    let in_range = match r {
        Radius::Exact(q) => q.is_positive() && *q <= BigRational::one(),
        Radius::Float(x) => *x > 0.0 && *x <= 1.0,
    };
    if !in_range {
        return Err(ExperimentError::RadiusOutOfRange(r.describe()));
    }
    let count = if exact {
        let q = match (s.family(), r) {
            (Family::Identity, Radius::Exact(q)) => q.clone(),
            _ => return Err(ExperimentError::ExactUnsupported),
        };
        mertens_exact(&q)
    } else {
        mertens_points(s, rf, None, true).len() as u64
    };
    let normalized = match r {
        Radius::Exact(q) => (q * q * BigRational::from_integer(count.into())).to_f64().unwrap_or(f64::NAN),
        Radius::Float(_) => rf * rf * count as f64,
    };
    Ok(MertensReport {
        r: r.describe(),
        count,
        normalized,
        sigma: s.to_string(),
        exact,
        counting: "distinct points, closed square [0,1]^2".to_string(),
    })
}

/// For the identity every image of `(r, r)` is `(a·r, b·r)` with integers
/// `a, b`, so the walk runs on `(a, b)` with the exact bound `a, b <= ⌊1/r⌋`.
fn mertens_exact(r: &BigRational) -> u64 {
    let bound = r.recip().floor().to_integer().to_u64().unwrap_or(u64::MAX);
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    let mut stack = vec![(1u64, 1u64)];
    while let Some((a, b)) = stack.pop() {
        if a > bound || b > bound || !seen.insert((a, b)) {
            continue;
        }
        stack.push((a + b, b));
        stack.push((a, a + b));
    }
    seen.len() as u64
}

/// Snapped monoid images of `(r, r)` in `[0, 1]²`, optionally limited to
/// words of length `<= depth`. With `prune = false` nothing is cut or merged,
/// which is only feasible for small depths.
pub fn mertens_points(s: &SigmaMap, r: f64, depth: Option<usize>, prune: bool) -> HashSet<(i64, i64)> {
    let limit = 1.0 + EDGE_SLACK;
    let mut found = HashSet::new();
    let mut expanded = HashSet::new();
    let mut stack = vec![(Point2::new(r, r), 0usize)];
    while let Some((p, d)) = stack.pop() {
        let inside = p.x <= limit && p.y <= limit;
        if inside {
            found.insert((snap(p.x), snap(p.y)));
        }
        if prune && (!inside || !expanded.insert((snap(p.x), snap(p.y), depth.map_or(0, |_| d)))) {
            continue;
        }
        if depth.is_some_and(|l| d >= l) {
            continue;
        }
        stack.push((s.h(p), d + 1));
        stack.push((s.v(p), d + 1));
    }
    found
}

/// Cell grid over an axis-aligned box in any dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cells: usize,
}

impl GridSpec {
    pub fn square(b: &Box2, cells: usize) -> GridSpec {
        GridSpec { lo: vec![b.x0, b.y0], hi: vec![b.x1, b.y1], cells }
    }

    pub fn cube(lo: f64, hi: f64, dims: usize, cells: usize) -> GridSpec {
        GridSpec { lo: vec![lo; dims], hi: vec![hi; dims], cells }
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn total(&self) -> usize {
        self.cells.pow(self.dims() as u32)
    }

    /// Index of the closed cell containing `p`; the upper faces belong to the
    /// last cell.
    pub fn cell_of(&self, p: &[f64]) -> Option<usize> {
        let mut idx = 0;
        for (k, &x) in p.iter().enumerate() {
            let (lo, hi) = (self.lo[k], self.hi[k]);
            if !(x >= lo && x <= hi) {
                return None;
            }
            let i = (((x - lo) / (hi - lo)) * self.cells as f64) as usize;
            idx = idx * self.cells + i.min(self.cells - 1);
        }
        Some(idx)
    }

    /// Centre of cell `idx` (row-major, last axis fastest).
    pub fn centre(&self, mut idx: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dims()];
        for k in (0..self.dims()).rev() {
            let i = idx % self.cells;
            idx /= self.cells;
            let w = (self.hi[k] - self.lo[k]) / self.cells as f64;
            c[k] = self.lo[k] + (i as f64 + 0.5) * w;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub grid: GridSpec,
    pub depth: usize,
    pub hit_cells: usize,
    pub total_cells: usize,
    pub hit_fraction: f64,
    /// Largest distance from an empty cell centre to the nearest hit cell
    /// centre; `None` when nothing was hit.
    pub max_empty_distance: Option<f64>,
    pub empty_cells: Vec<usize>,
}

fn coverage_report(grid: &GridSpec, depth: usize, hits: &[AtomicBool]) -> CoverageReport {
    let hit: Vec<bool> = hits.iter().map(|b| b.load(Ordering::Relaxed)).collect();
    let hit_idx: Vec<usize> = (0..hit.len()).filter(|&i| hit[i]).collect();
    let empty_cells: Vec<usize> = (0..hit.len()).filter(|&i| !hit[i]).collect();
    let hit_centres: Vec<Vec<f64>> = hit_idx.iter().map(|&i| grid.centre(i)).collect();
    let max_empty_distance = if hit_idx.is_empty() {
        None
    } else {
        Some(empty_cells.iter().fold(0.0, |m: f64, &e| {
            let c = grid.centre(e);
            let d = hit_centres
                .iter()
                .map(|h| h.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min);
            m.max(d)
        }))
    };
    CoverageReport {
        grid: grid.clone(),
        depth,
        hit_cells: hit_idx.len(),
        total_cells: hit.len(),
        hit_fraction: hit_idx.len() as f64 / hit.len() as f64,
        max_empty_distance,
        empty_cells,
    }
}

/// Default number of samples per line.
pub const DEFAULT_LINE_SAMPLES: usize = 2000;

/// Grid cells of `bbox` met by σ-rational lines of depth `<= depth`.
///
/// Each line `w(Ox)` is sampled at `w(t, 0)` for `t = x₁/steps, …, x₁`; larger
/// `t` never come back since `h`, `v` do not decrease `x`.
pub fn density_coverage(
    s: &SigmaMap,
    depth: usize,
    cells: usize,
    bbox: &Box2,
    steps: usize,
) -> Result<CoverageReport, ExperimentError> {
    if !(bbox.x0 > 0.0 && bbox.y0 > 0.0 && bbox.x1 > bbox.x0 && bbox.y1 > bbox.y0) {
        return Err(ExperimentError::BoxOutsideQuadrant(*bbox));
    }
    if cells == 0 || steps == 0 {
        return Err(ExperimentError::EmptyGrid);
    }
    let grid = GridSpec::square(bbox, cells);
    let hits: Vec<AtomicBool> = (0..grid.total()).map(|_| AtomicBool::new(false)).collect();
    // the walk needs the whole strip below the box, where the samples start
    let walk_box = Box2 { x0: 0.0, y0: 0.0, x1: bbox.x1, y1: bbox.y1 };
    let t_grid = ParamGrid { t0: bbox.x1 / steps as f64, t1: bbox.x1, steps: steps - 1 };
    visit_rational_lines(s, LineFamily::Ox, depth, &t_grid, &walk_box, &|_, _, p: Point2| {
        if let Some(i) = grid.cell_of(&[p.x, p.y]) {
            hits[i].store(true, Ordering::Relaxed);
        }
    })?;
    Ok(coverage_report(&grid, depth, &hits))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretenessReport {
    pub bbox: Box2,
    pub depth: usize,
    pub count: usize,
    /// Smallest Euclidean distance between two points; `None` below 2 points.
    pub min_gap: Option<f64>,
    pub points: Vec<Point2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretenessComparison {
    pub current: DiscretenessReport,
    pub previous: DiscretenessReport,
    pub count_stable: bool,
}

/// Tolerance for `E^{|w|}(w(1, 0)) = (1, 0)`.
pub const RETURN_TOL: f64 = 1e-9;

/// Points `w(1, 0)` in `bbox` for positive words `|w| <= depth` that return
/// to `(1, 0)` after `|w|` Euclidean steps, for `σ = pow:2`.
pub fn backward_orbit(s: &SigmaMap, bbox: &Box2, depth: usize) -> Result<DiscretenessReport, ExperimentError> {
    if s.power_exponent() != Some(2.0) {
        return Err(ExperimentError::NotSquareMap);
    }
    let start = Point2::new(1.0, 0.0);
    let mut seen = HashSet::new();
    let mut points = Vec::new();
    let mut stack = vec![(start, 0usize)];
    while let Some((p, d)) = stack.pop() {
        if bbox.escaped(p) {
            continue;
        }
        if bbox.contains(p) && returns_to(s, p, d, start) && seen.insert((snap(p.x), snap(p.y))) {
            points.push(p);
        }
        if d < depth {
            stack.push((s.h(p), d + 1));
            stack.push((s.v(p), d + 1));
        }
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let min_gap = min_pairwise_gap(&points);
    Ok(DiscretenessReport { bbox: *bbox, depth, count: points.len(), min_gap, points })
}

fn returns_to(s: &SigmaMap, mut p: Point2, steps: usize, target: Point2) -> bool {
    for _ in 0..steps {
        match euclid_step(s, p) {
            Ok(st) => p = st.result,
            Err(_) => break,
        }
    }
    p.dist(target) <= RETURN_TOL
}

fn min_pairwise_gap(points: &[Point2]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
            best = Some(best.map_or(d, |m| m.min(d)));
        }
    }
    best
}

/// The backward orbit at depths `depth` and `depth - 2`.
pub fn discreteness_probe(s: &SigmaMap, bbox: &Box2, depth: usize) -> Result<DiscretenessComparison, ExperimentError> {
    let current = backward_orbit(s, bbox, depth)?;
    let previous = backward_orbit(s, bbox, depth.saturating_sub(2))?;
    let count_stable = current.count == previous.count;
    Ok(DiscretenessComparison { current, previous, count_stable })
}

/// Limit on distinct points kept by [`orbit_coverage_nd`].
pub const DEFAULT_POINT_CAP: usize = 2_000_000;

/// Coverage of `grid` by the orbit of `start` under the monoid generated by
/// `h_{i,j}`, `v_{i,j}` (`i < j`), enumerated breadth first to `depth`.
/// Points leaving `prune_box` (a cube `[-B, B]ⁿ`) are dropped and snapped
/// duplicates are expanded once.
pub fn orbit_coverage_nd(
    s: &SigmaMap,
    start: &PointN,
    depth: usize,
    grid: &GridSpec,
    prune_bound: f64,
    point_cap: usize,
) -> Result<(CoverageReport, usize), ExperimentError> {
    let n = start.dim();
    if !(3..=4).contains(&n) || grid.dims() != n {
        return Err(ExperimentError::Dimension(n));
    }
    if grid.cells == 0 {
        return Err(ExperimentError::EmptyGrid);
    }
    let c = start.coords();
    let opposite = (0..n).any(|i| (i + 1..n).any(|j| c[i] * c[j] < 0.0));
    if !opposite {
        return Err(ExperimentError::NoOppositeSigns);
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let hits: Vec<AtomicBool> = (0..grid.total()).map(|_| AtomicBool::new(false)).collect();
    let key = |p: &PointN| p.coords().iter().map(|&x| snap(x)).collect::<Vec<i64>>();
    let mut seen = HashSet::new();
    seen.insert(key(start));
    let mut queue = VecDeque::from([(start.clone(), 0usize)]);
    while let Some((p, d)) = queue.pop_front() {
        if let Some(i) = grid.cell_of(p.coords()) {
            hits[i].store(true, Ordering::Relaxed);
        }
        if d == depth {
            continue;
        }
        for &(i, j) in &pairs {
            for q in [s.h_ij(i, j, &p)?, s.v_ij(i, j, &p)?] {
                if q.coords().iter().any(|x| x.abs() > prune_bound) || seen.len() >= point_cap {
                    continue;
                }
                if seen.insert(key(&q)) {
                    queue.push_back((q, d + 1));
                }
            }
        }
    }
    Ok((coverage_report(grid, depth, &hits), seen.len()))
}

/// `#{(a, b) ∈ [1, m]² : gcd(a, b) = 1} = 2·Σ_{k<=m} φ(k) - 1`.
pub fn coprime_pairs(m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    let m = m as usize;
    let mut phi: Vec<u64> = (0..=m as u64).collect();
    for p in 2..=m {
        if phi[p] == p as u64 {
            for k in (p..=m).step_by(p) {
                phi[k] -= phi[k] / p as u64;
            }
        }
    }
    2 * phi[1..].iter().sum::<u64>() - 1
}

/// `6/π²`.
pub fn mertens_limit() -> f64 {
    6.0 / (std::f64::consts::PI * std::f64::consts::PI)
}

impl Radius {
    /// Parses `p/q`, an integer, or a decimal (float mode).
    pub fn parse(s: &str) -> Option<Radius> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            return Some(Radius::Exact(BigRational::new(p, q)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Some(Radius::Exact(BigRational::from_integer(n)));
        }
        s.parse::<f64>().ok().filter(|x| x.is_finite()).map(Radius::Float)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mertens_examples() {
        let id = SigmaMap::identity();
        let rep = mertens_count(&id, &Radius::reciprocal(10), true).unwrap();
        assert_eq!(rep.count, 63);
        assert!((rep.normalized - 0.63).abs() < 1e-15);
        assert_eq!(mertens_count(&id, &Radius::reciprocal(1), true).unwrap().count, 1);
        let float = mertens_count(&id, &Radius::Float(0.1), false).unwrap();
        assert_eq!(float.count, 63);
        assert!(mertens_count(&id, &Radius::Float(1.5), false).is_err());
        let sq = SigmaMap::power(2.0).unwrap();
        assert_eq!(mertens_count(&sq, &Radius::reciprocal(10), true), Err(ExperimentError::ExactUnsupported));
    }

    #[test]
    fn coprime_oracle() {
        assert_eq!(coprime_pairs(1), 1);
        assert_eq!(coprime_pairs(10), 63);
        let brute = |m: u64| {
            let gcd = |mut a: u64, mut b: u64| {
                while b != 0 {
                    (a, b) = (b, a % b);
                }
                a
            };
            (1..=m).flat_map(|a| (1..=m).map(move |b| (a, b))).filter(|&(a, b)| gcd(a, b) == 1).count() as u64
        };
        for m in [2, 7, 30] {
            assert_eq!(coprime_pairs(m), brute(m));
        }
    }

    #[test]
    fn discreteness_small_depths() {
        let s = SigmaMap::power(2.0).unwrap();
        let b = Box2 { x0: 0.0, y0: 0.0, x1: 2.0, y1: 2.0 };
        let r0 = backward_orbit(&s, &b, 0).unwrap();
        assert_eq!(r0.count, 1);
        assert_eq!(r0.min_gap, None);
        let r1 = backward_orbit(&s, &b, 1).unwrap();
        assert_eq!(r1.points, vec![Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)]);
        assert_eq!(r1.min_gap, Some(1.0));
        assert!(backward_orbit(&SigmaMap::identity(), &b, 1).is_err());
    }

    #[test]
    fn coverage_depth_zero_is_bottom_row() {
        let b = Box2 { x0: 0.05, y0: 0.05, x1: 1.0, y1: 1.0 };
        let rep = density_coverage(&SigmaMap::identity(), 0, 20, &b, 500).unwrap();
        // Ox lies below the box
        assert_eq!(rep.hit_cells, 0);
        let b0 = Box2 { x0: 0.05, y0: 0.0, x1: 1.0, y1: 1.0 };
        assert!(density_coverage(&SigmaMap::identity(), 0, 20, &b0, 500).is_err());
    }

    #[test]
    fn coverage_identity_small() {
        let b = Box2 { x0: 0.05, y0: 0.05, x1: 1.0, y1: 1.0 };
        let rep = density_coverage(&SigmaMap::identity(), 14, 20, &b, 2000).unwrap();
        assert_eq!(rep.hit_fraction, 1.0, "{:?}", rep.empty_cells);
        assert_eq!(rep.max_empty_distance, Some(0.0));
    }

    #[test]
    fn nd_preconditions() {
        let id = SigmaMap::identity();
        let g = GridSpec::cube(-1.0, 1.0, 3, 5);
        let all_pos = PointN::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(orbit_coverage_nd(&id, &all_pos, 2, &g, 4.0, 1000).unwrap_err(), ExperimentError::NoOppositeSigns);
        let p = PointN::new(vec![-1.0, std::f64::consts::PI, 1.0]).unwrap();
        let (rep, _) = orbit_coverage_nd(&id, &p, 0, &GridSpec::cube(-4.0, 4.0, 3, 5), 4.0, 1000).unwrap();
        assert_eq!(rep.hit_cells, 1);
    }

    #[test]
    fn radius_parsing() {
        assert_eq!(Radius::parse("1/10"), Some(Radius::reciprocal(10)));
        assert_eq!(Radius::parse("0.25"), Some(Radius::Float(0.25)));
        assert_eq!(Radius::parse("1/0"), None);
    }
}
