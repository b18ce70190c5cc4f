//! Subcommand handlers. Each returns an [`Output`] holding both the JSON
//! records and a flat table; the caller picks the rendering.

use serde_json::{json, Map, Value};
use transvecta::cfrac::{self, Expansion, Termination};
use transvecta::experiments::{self, GridSpec, Radius, DEFAULT_LINE_SAMPLES, DEFAULT_POINT_CAP};
use transvecta::lines::{self, CurveParam};
use transvecta::regions::{self, RegionLabel};
use transvecta::sigma::{Point2, PointN, SigmaMap};
use transvecta::torus::{self, CircleMap, TorusMapPair, TorusMove, TrigPoly};
use transvecta::tower::{self, TowerError};
use transvecta::words::{Box2, LineFamily, ParamGrid};

use crate::config::{Algorithm, Command, Format, RunConfig};
use crate::output::{to_json, Table};
use crate::CliError;

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Output {
    /// One object for summary reports, several for streamed records.
    pub records: Vec<Value>,
    /// Emit `records` as JSON Lines rather than a single object.
    pub streaming: bool,
    pub table: Table,
    pub default_format: Format,
    /// Set when a certified check failed; the run exits with status 3.
    pub failure: Option<String>,
}

impl Output {
    fn report(v: Value, table: Table) -> Output {
        Output { records: vec![v], streaming: false, table, default_format: Format::Json, failure: None }
    }

    pub fn render(&self, format: Option<Format>) -> Result<String, CliError> {
        match format.unwrap_or(self.default_format) {
            Format::Csv => self.table.to_csv(),
            Format::Json if self.streaming => Ok(self.records.iter().map(|r| to_json(r) + "\n").collect()),
            Format::Json => Ok(to_json(self.records.first().unwrap_or(&Value::Null)) + "\n"),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Validation(format!("--{flag} is required")))
}

fn sigma_or(cfg: &RunConfig, default: SigmaMap) -> SigmaMap {
    cfg.sigma.unwrap_or(default)
}

fn point2(cfg: &RunConfig) -> Result<Point2, CliError> {
    match need(&cfg.point, "point")?.as_slice() {
        [x, y] => Ok(Point2::new(*x, *y)),
        other => Err(invalid(format!("--point needs 2 coordinates, got {}", other.len()))),
    }
}

fn box2(cfg: &RunConfig, default: Box2) -> Result<Box2, CliError> {
    match cfg.bbox.as_deref() {
        None => Ok(default),
        Some([x0, y0, x1, y1]) if x0 < x1 && y0 < y1 => Ok(Box2 { x0: *x0, y0: *y0, x1: *x1, y1: *y1 }),
        Some(_) => Err(invalid("--box needs x0,y0,x1,y1 with x0 < x1 and y0 < y1")),
    }
}

fn cells(cfg: &RunConfig, default: usize) -> Result<usize, CliError> {
    match &cfg.grid {
        None => Ok(default),
        Some(g) => match g.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(invalid(format!("--grid expects a positive cell count, got {g:?}"))),
        },
    }
}

fn alpha(cfg: &RunConfig) -> Result<f64, CliError> {
    let a = cfg.alpha.unwrap_or(2.0);
    if a > 0.0 {
        Ok(a)
    } else {
        Err(invalid(format!("--alpha must be positive, got {a}")))
    }
}

fn xy(p: Point2) -> Value {
    json!([p.x, p.y])
}

/// Dispatches on the configured command.
pub fn execute(cfg: &RunConfig) -> Result<Output, CliError> {
    let allowed: &[&str] = match cfg.command {
        Command::Tower => &["verify-m0", "identity-check"],
        Command::Lines => &["ox", "oy"],
        _ => &[],
    };
    if let Some(a) = &cfg.action {
        if !allowed.contains(&a.as_str()) {
            return Err(invalid(format!("unexpected action {a:?}")));
        }
    }
    match cfg.command {
        Command::Euclid => euclid(cfg),
        Command::Lines => rational_lines(cfg),
        Command::Cfrac => cfrac_digits(cfg),
        Command::Golden => golden(cfg),
        Command::Tower => match cfg.action.as_deref() {
            Some("identity-check") => identity_check(),
            Some(_) => verify_m0(cfg),
            None => Err(invalid("tower needs an action: verify-m0 or identity-check")),
        },
        Command::LinesMeasure => lines_measure(cfg),
        Command::Mertens => mertens(cfg),
        Command::Coverage => match cfg.point.as_ref().map(Vec::len) {
            Some(3 | 4) => coverage_nd(cfg),
            Some(n) => Err(invalid(format!("coverage --point needs 3 or 4 coordinates, got {n}"))),
            None => coverage(cfg),
        },
        Command::Discrete => discrete(cfg),
        Command::Torus => torus_report(cfg),
    }
}

fn euclid(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = sigma_or(cfg, SigmaMap::identity());
    let mut p = point2(cfg)?;
    if !p.is_finite() || p == Point2::new(0.0, 0.0) {
        return Err(invalid("--point must be finite and not the origin"));
    }
    let steps = cfg.steps.unwrap_or(20);
    let mut records = Vec::new();
    let mut table = Table::new(&["step", "label", "digit", "x", "y", "norm"]);
    for step in 1..=steps {
        let (label, digit, q) = match cfg.algorithm {
            Algorithm::Slow => match regions::euclid_step(&s, p) {
                Ok(e) => (e.label, None, e.result),
                Err(_) => break,
            },
            Algorithm::Accel => match regions::accel_step(&s, p) {
                Ok(a) => (a.label, Some(a.digit), a.result),
                // an axis or the diagonal band: nothing left to accelerate
                Err(_) => break,
            },
        };
        let mut rec = Map::new();
        rec.insert("step".into(), json!(step));
        rec.insert("label".into(), json!(label.as_str()));
        if let Some(d) = digit {
            rec.insert("digit".into(), json!(d));
        }
        rec.insert("x".into(), json!(q.x));
        rec.insert("y".into(), json!(q.y));
        rec.insert("norm".into(), json!(q.norm()));
        table.rows.push(vec![
            json!(step),
            json!(label.as_str()),
            json!(digit),
            json!(q.x),
            json!(q.y),
            json!(q.norm()),
        ]);
        records.push(Value::Object(rec));
        p = q;
        if label == RegionLabel::AxisFixed {
            break;
        }
    }
    Ok(Output { records, streaming: true, table, default_format: Format::Json, failure: None })
}

fn param_grid(cfg: &RunConfig) -> Result<ParamGrid, CliError> {
    let spec = cfg.grid.as_deref().unwrap_or("0.1:1:9");
    let bad = || invalid(format!("--grid expects t0:t1:steps, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [t0, t1, steps] = parts.as_slice() else { return Err(bad()) };
    let t0: f64 = t0.trim().parse().map_err(|_| bad())?;
    let t1: f64 = t1.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if !(t0.is_finite() && t1.is_finite() && t0 <= t1) {
        return Err(bad());
    }
    Ok(ParamGrid { t0, t1, steps })
}

fn rational_lines(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = sigma_or(cfg, SigmaMap::identity());
    let (family, default_box) = match cfg.action.as_deref() {
        Some("oy") => (LineFamily::Oy, Box2 { x0: -1.0, y0: 0.0, x1: 0.0, y1: 1.0 }),
        _ => (LineFamily::Ox, Box2 { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 }),
    };
    let bbox = box2(cfg, default_box)?;
    let depth = cfg.depth.unwrap_or(6);
    let samples = transvecta::words::rational_lines(&s, family, depth, &param_grid(cfg)?, &bbox).map_err(invalid)?;
    let mut table = Table::new(&["word", "t", "x", "y"]);
    let mut records = Vec::with_capacity(samples.len());
    for smp in samples {
        let w = smp.word.to_string();
        table.rows.push(vec![json!(w), json!(smp.t), json!(smp.point.x), json!(smp.point.y)]);
        records.push(json!({"word": w, "t": smp.t, "x": smp.point.x, "y": smp.point.y}));
    }
    Ok(Output { records, streaming: true, table, default_format: Format::Csv, failure: None })
}

fn termination(e: &Expansion) -> Value {
    match &e.terminated {
        None => Value::Null,
        Some(Termination::Rational) => json!("rational"),
        Some(Termination::Precision(m)) => json!(format!("precision: {m}")),
    }
}

fn cfrac_digits(cfg: &RunConfig) -> Result<Output, CliError> {
    let a = alpha(cfg)?;
    let n = cfg.digits.unwrap_or(10);
    let e = match (cfg.slope, &cfg.point) {
        (Some(r), None) => cfrac::digits_of_slope(a, r, n),
        (None, Some(_)) => cfrac::digits(a, point2(cfg)?, n),
        _ => return Err(invalid("cfrac needs exactly one of --slope or --point")),
    }
    .map_err(invalid)?;
    let pairs: Vec<Value> = e.pairs.iter().map(|p| json!([p.a, p.b])).collect();
    let v = json!({
        "alpha": a,
        "pairs": pairs,
        "residual_slope": e.residual.r,
        "residual_y": e.residual.y,
        "terminated": termination(&e),
    });
    let mut table = Table::new(&["index", "a", "b"]);
    for (i, p) in e.pairs.iter().enumerate() {
        table.rows.push(vec![json!(i), json!(p.a), json!(p.b)]);
    }
    Ok(Output::report(v, table))
}

fn golden(cfg: &RunConfig) -> Result<Output, CliError> {
    let a = alpha(cfg)?;
    let r = cfrac::golden_slope(a).map_err(invalid)?;
    let residual = cfrac::s_ab(a, 1, 1, r).map_err(invalid)? - r;
    let mut m = Map::new();
    m.insert("alpha".into(), json!(a));
    m.insert("r".into(), json!(r));
    m.insert("residual".into(), json!(residual));
    if a == 2.0 {
        m.insert("quartic_residual".into(), json!(cfrac::golden_quartic(r)));
    }
    let v = Value::Object(m);
    let table = Table::from_object(&v);
    Ok(Output::report(v, table))
}

fn verify_m0(cfg: &RunConfig) -> Result<Output, CliError> {
    let depth = cfg.depth.unwrap_or(tower::DEFAULT_DEPTH);
    let (x0, y0) = tower::m0();
    let (steps, failure) = match tower::orbit_verify(&x0, &y0, depth) {
        Ok(cert) => (cert.reports(), None),
        Err(TowerError::InvariantViolation { clause, n }) => {
            (Vec::new(), Some(format!("clause {clause} fails at n = {n}")))
        }
        Err(e) => return Err(invalid(e)),
    };
    let mut table = Table::new(&["n", "k", "j", "x_approx", "y_approx", "bits"]);
    let rows: Vec<Value> = steps
        .iter()
        .map(|s| {
            table.rows.push(vec![
                json!(s.n),
                json!(s.k),
                json!(s.j),
                json!(s.x_approx),
                json!(s.y_approx),
                json!(s.bits),
            ]);
            json!({"n": s.n, "k": s.k, "j": s.j, "y_approx": s.y_approx, "x_approx": s.x_approx, "bits": s.bits})
        })
        .collect();
    let mut m = Map::new();
    m.insert("depth".into(), json!(depth));
    m.insert("steps".into(), Value::Array(rows));
    m.insert("all_invariants_hold".into(), json!(failure.is_none()));
    if let Some(f) = &failure {
        m.insert("violation".into(), json!(f));
    }
    Ok(Output { failure, ..Output::report(Value::Object(m), table) })
}

fn identity_check() -> Result<Output, CliError> {
    let c = tower::m0_identity_check().map_err(invalid)?;
    let fmt = |p: &tower::ExactPoint| (c.tower.format(&p.x), c.tower.format(&p.y));
    let (x, y) = fmt(c.final_point());
    let mut table = Table::new(&["stage", "x", "y"]);
    let trail: Vec<Value> = c
        .trail
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (px, py) = fmt(p);
            table.rows.push(vec![json!(i), json!(px), json!(py)]);
            json!({"x": px, "y": py})
        })
        .collect();
    let v = json!({"holds": c.holds, "x": x, "y": y, "trail": trail});
    let failure = (!c.holds).then(|| format!("h v^2 h^-1 v^4 (1, 0) = ({x}, {y})"));
    Ok(Output { failure, ..Output::report(v, table) })
}

fn lines_measure(cfg: &RunConfig) -> Result<Output, CliError> {
    let a = alpha(cfg)?;
    let w = need(&cfg.word, "word")?;
    let tol = cfg.tol.unwrap_or(1e-12);
    let lp = lines::a_of_word(a, &w, tol).map_err(invalid)?;
    let a_value = match lp.a {
        CurveParam::Finite(x) => json!(x),
        CurveParam::Infinite => json!("inf"),
    };
    let (k, k_error) = match lines::k_of_word(a, &w, tol) {
        Ok(k) => (json!(k), Value::Null),
        Err(e) => (Value::Null, json!(e.to_string())),
    };
    let mut m = Map::new();
    m.insert("alpha".into(), json!(a));
    m.insert("word".into(), json!(w.to_string()));
    m.insert("a".into(), a_value);
    m.insert("k".into(), k);
    m.insert("letters_used".into(), json!(lp.letters_used));
    m.insert("fixed_point".into(), json!(lp.fixed_point));
    m.insert("interval".into(), json!([lp.interval.lo.value(), lp.interval.hi.value()]));
    if !k_error.is_null() {
        m.insert("k_error".into(), k_error);
    }
    let v = Value::Object(m);
    let table = Table::from_object(&v);
    Ok(Output::report(v, table))
}

fn mertens(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = sigma_or(cfg, SigmaMap::identity());
    let r: Radius = need(&cfg.r, "r")?;
    let rep = experiments::mertens_count(&s, &r, cfg.exact).map_err(invalid)?;
    let v = json!({
        "sigma": rep.sigma,
        "r": rep.r,
        "exact": rep.exact,
        "count": rep.count,
        "normalized": rep.normalized,
        "counting": rep.counting,
    });
    let table = Table::from_object(&v);
    Ok(Output::report(v, table))
}

fn coverage_table(grid: &GridSpec, empty: &[usize]) -> Table {
    let axes = ["x", "y", "z", "w"];
    let mut header = vec!["cell"];
    header.extend(&axes[..grid.dims()]);
    header.push("hit");
    let mut t = Table::new(&header);
    for i in 0..grid.total() {
        let mut row = vec![json!(i)];
        row.extend(grid.centre(i).into_iter().map(|c| json!(c)));
        row.push(json!(empty.binary_search(&i).is_err()));
        t.rows.push(row);
    }
    t
}

fn coverage(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = sigma_or(cfg, SigmaMap::identity());
    let depth = cfg.depth.unwrap_or(14);
    let bbox = box2(cfg, Box2 { x0: 0.05, y0: 0.05, x1: 1.0, y1: 1.0 })?;
    let steps = cfg.steps.unwrap_or(DEFAULT_LINE_SAMPLES);
    let rep = experiments::density_coverage(&s, depth, cells(cfg, 20)?, &bbox, steps).map_err(invalid)?;
    let v = json!({
        "sigma": s.to_string(),
        "depth": rep.depth,
        "grid": rep.grid.cells,
        "box": [bbox.x0, bbox.y0, bbox.x1, bbox.y1],
        "samples_per_line": steps,
        "hit_cells": rep.hit_cells,
        "total_cells": rep.total_cells,
        "hit_fraction": rep.hit_fraction,
        "max_empty_distance": rep.max_empty_distance,
        "empty_cells": rep.empty_cells,
    });
    Ok(Output::report(v, coverage_table(&rep.grid, &rep.empty_cells)))
}

fn coverage_nd(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = sigma_or(cfg, SigmaMap::identity());
    let start = PointN::new(need(&cfg.point, "point")?).map_err(invalid)?;
    let depth = cfg.depth.unwrap_or(12);
    let (lo, hi) = match cfg.bbox.as_deref() {
        None => (-1.0, 1.0),
        Some([lo, hi]) if lo < hi => (*lo, *hi),
        Some(_) => return Err(invalid("--box for an n-dimensional grid is lo,hi with lo < hi")),
    };
    // orbits may leave the cube and come back; keep a margin around it
    let prune = 4.0 * lo.abs().max(hi.abs());
    let grid = GridSpec::cube(lo, hi, start.dim(), cells(cfg, 5)?);
    let cap = cfg.samples.unwrap_or(DEFAULT_POINT_CAP);
    let (rep, points) = experiments::orbit_coverage_nd(&s, &start, depth, &grid, prune, cap).map_err(invalid)?;
    let v = json!({
        "sigma": s.to_string(),
        "start": start.coords(),
        "depth": rep.depth,
        "grid": grid.cells,
        "box": [lo, hi],
        "prune_bound": prune,
        "points": points,
        "hit_cells": rep.hit_cells,
        "total_cells": rep.total_cells,
        "hit_fraction": rep.hit_fraction,
        "max_empty_distance": rep.max_empty_distance,
        "empty_cells": rep.empty_cells,
    });
    Ok(Output::report(v, coverage_table(&grid, &rep.empty_cells)))
}

fn discrete(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = sigma_or(cfg, SigmaMap::power(2.0).expect("2 is a valid exponent"));
    let depth = cfg.depth.unwrap_or(14);
    if depth == 0 {
        return Err(invalid("--depth must be at least 1 for discrete"));
    }
    let bbox = box2(cfg, Box2 { x0: 0.0, y0: 0.0, x1: 2.0, y1: 2.0 })?;
    let c = experiments::discreteness_probe(&s, &bbox, depth).map_err(invalid)?;
    let v = json!({
        "sigma": s.to_string(),
        "box": [bbox.x0, bbox.y0, bbox.x1, bbox.y1],
        "depth": c.current.depth,
        "count": c.current.count,
        "previous_depth": c.previous.depth,
        "previous_count": c.previous.count,
        "count_stable": c.count_stable,
        "min_gap": c.current.min_gap,
        "points": c.current.points.iter().map(|p| xy(*p)).collect::<Vec<_>>(),
    });
    let mut table = Table::new(&["x", "y"]);
    for p in &c.current.points {
        table.rows.push(vec![json!(p.x), json!(p.y)]);
    }
    Ok(Output::report(v, table))
}

fn torus_report(cfg: &RunConfig) -> Result<Output, CliError> {
    let pair = TorusMapPair {
        sigma1: cfg.map1.unwrap_or(CircleMap::Sine(0.5)),
        sigma2: cfg.map2.unwrap_or(CircleMap::Const(std::f64::consts::SQRT_2 - 1.0)),
    };
    let phi1 = cfg.phi1.clone().unwrap_or_else(|| TrigPoly::cos(1));
    let phi2 = cfg.phi2.clone().unwrap_or_else(|| TrigPoly::cos(1));
    let n = cfg.steps.unwrap_or(100_000);
    let starts = cfg.starts.unwrap_or(8);
    let samples = cfg.samples.unwrap_or(1_000_000);
    let bins = cells(cfg, 10)?;
    let b = torus::birkhoff_product_test(&pair, &phi1, &phi2, n, starts, cfg.seed).map_err(invalid)?;
    let hist = |mv| torus::lebesgue_histogram(&pair, mv, samples, bins, cfg.seed).map_err(invalid);
    let (hh, hv) = (hist(TorusMove::H)?, hist(TorusMove::V)?);
    let hist_json = |h: &torus::HistogramReport| {
        json!({
            "points": h.points,
            "bins": h.bins,
            "expected": h.expected,
            "max_abs_dev": h.max_abs_dev,
            "bound": h.bound,
            "within_bound": h.within_bound(),
        })
    };
    let starts_json: Vec<Value> = b
        .starts
        .iter()
        .map(|s| json!({"x": s.x, "y": s.y, "average": s.average, "expected": s.expected, "deviation": s.deviation}))
        .collect();
    let v = json!({
        "map1": pair.sigma1.to_string(),
        "map2": pair.sigma2.to_string(),
        "phi1": phi1.to_string(),
        "phi2": phi2.to_string(),
        "seed": cfg.seed,
        "birkhoff": {
            "n": b.n,
            "max_deviation": b.max_deviation,
            "starts": starts_json,
            "warnings": b.warnings,
        },
        "histogram_h": hist_json(&hh),
        "histogram_v": hist_json(&hv),
    });
    let mut table = Table::new(&["x", "y", "average", "expected", "deviation"]);
    for s in &b.starts {
        table.rows.push(vec![json!(s.x), json!(s.y), json!(s.average), json!(s.expected), json!(s.deviation)]);
    }
    Ok(Output::report(v, table))
}
