//! External rays and equipotentials by Böttcher-conjugacy pullback.
//!
//! The ray `R_t` is sampled on the geometric potential grid
//! `g_i = g0 · 2^{-i/m}`. Because `G(f(z)) = 2G(z)` and `f(R_t) = R_{2t}`,
//! the point at `(g_i, t)` is a square root of `x(g_{i-m}, 2t) − c`. The tracer
//! fills the triangular table `x(g_i, 2^j t)` row by row: the outermost rows
//! come from the asymptotic inverse `w − c/(2w)` of the Böttcher map at
//! `w = e^{g + 2πit}`, every deeper entry is a closed-form pullback whose
//! branch is the root nearer the same-angle entry one row out (rescaled
//! radially by `e^{g_i − g_{i-1}}`).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::circle::Angle;
use crate::error::{Error, Result};
use crate::quadmap::QuadraticMap;
use crate::rotnum::AngleApproximation;

/// Binary digits of slack kept between an irrational angle's error and the trace depth.
pub const GUARD_DIGITS: usize = 8;
/// Below this ratio of distances the two square roots are too close to call.
pub const BRANCH_RATIO: f64 = 2.0;

/// Landing tolerance for maps with hyperbolic-like Julia sets.
pub const EPS_LAND: f64 = 1e-6;
/// Landing tolerance near Siegel boundaries, where rays land slowly.
pub const EPS_LAND_INDIFFERENT: f64 = 5e-2;
pub const TAIL_FRACTION: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Outermost emitted potential.
    pub g0: f64,
    /// Number of potential halvings below `g0`.
    pub depth: usize,
    /// Grid levels per halving (`m`).
    pub substeps: usize,
    pub tol_conj: f64,
    /// Extra halvings above `g0` that are traced but not emitted.
    pub burn_in: usize,
    /// How many times `substeps` may be doubled to resolve a branch ambiguity.
    pub max_refinements: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            g0: 1e4f64.ln(),
            depth: 40,
            substeps: 4,
            tol_conj: 1e-9,
            burn_in: 2,
            max_refinements: 2,
        }
    }
}

impl TraceConfig {
    pub fn with_depth(depth: usize, substeps: usize) -> Self {
        TraceConfig { depth, substeps, ..Default::default() }
    }

    pub fn levels(&self) -> usize {
        self.depth * self.substeps
    }

    /// Potential of grid row `i` (negative rows are burn-in).
    pub fn potential(&self, i: isize) -> f64 {
        self.g0 * (-(i as f64) / self.substeps as f64).exp2()
    }

    fn validate(&self) -> Result<()> {
        let ok = self.g0.is_finite()
            && self.g0 > 0.0
            && self.depth >= 1
            && self.substeps >= 1
            && self.tol_conj > 0.0;
        if !ok {
            return Err(Error::InvalidInput(format!("bad trace configuration {self:?}")));
        }
        let top = self.potential(-((self.burn_in * self.substeps) as isize));
        if top > 700.0 {
            return Err(Error::InvalidInput(format!(
                "burn-in potential {top} overflows double precision"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrailStatus {
    TracedToDepth,
    AbortedBranchAmbiguity,
    AbortedResidual,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub potential: f64,
    pub point: Complex64,
}

/// A sampled external ray, ordered by decreasing potential.
#[derive(Clone, Debug, PartialEq)]
pub struct RayTrail {
    pub angle: Angle,
    pub c: Complex64,
    pub samples: Vec<Sample>,
    pub status: TrailStatus,
    /// The configuration actually used (substeps may have been refined).
    pub config: TraceConfig,
    /// Largest `|f(z) − x| / max(1, |x|)` over all pullbacks in the table.
    pub max_residual: f64,
    /// Smallest far/near distance ratio seen in branch selection.
    pub min_branch_ratio: f64,
}

impl RayTrail {
    pub fn deepest(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn is_complete(&self) -> bool {
        self.status == TrailStatus::TracedToDepth
    }

    pub fn points(&self) -> impl DoubleEndedIterator<Item = Complex64> + '_ {
        self.samples.iter().map(|s| s.point)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandingStatus {
    Landed,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandingEstimate {
    pub point: Complex64,
    pub status: LandingStatus,
    pub tail_diameter: f64,
    pub potential_reached: f64,
}

impl LandingEstimate {
    pub fn landed(&self) -> bool {
        self.status == LandingStatus::Landed
    }
}

enum Attempt {
    Done(RayTrail),
    Ambiguous(RayTrail),
}

fn run_table(map: &QuadraticMap, t: &Angle, cfg: &TraceConfig) -> Attempt {
    let m = cfg.substeps as isize;
    let n = cfg.levels() as isize;
    let top = -(cfg.burn_in as isize) * m;
    let columns = |i: isize| ((n - i) / m) as usize;
    let c = map.c;

    let mut angles = Vec::with_capacity(columns(top) + 1);
    let mut a = t.clone();
    for _ in 0..=columns(top) {
        angles.push(std::f64::consts::TAU * a.to_f64());
        a = a.double();
    }

    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity((n - top + 1) as usize);
    let mut samples = Vec::with_capacity(n as usize + 1);
    let mut max_residual = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    let row_index = |i: isize| (i - top) as usize;

    let mut status = TrailStatus::TracedToDepth;
    'rows: for i in top..=n {
        let g = cfg.potential(i);
        let cols = columns(i);
        let mut row = Vec::with_capacity(cols + 1);
        if i < top + m {
            for &theta in &angles[..=cols] {
                let w = Complex64::from_polar(g.exp(), theta);
                row.push(w - c / (2.0 * w));
            }
        } else {
            let outer = &rows[row_index(i - m)];
            let prev = &rows[row_index(i - 1)];
            let shrink = (g - cfg.potential(i - 1)).exp();
            for j in 0..=cols {
                let x = outer[j + 1];
                let predictor = prev[j] * shrink;
                let root = (x - c).sqrt();
                let near = (root - predictor).norm();
                let far = (root + predictor).norm();
                let (z, d_near, d_far) = if near <= far { (root, near, far) } else { (-root, far, near) };
                let ratio = if d_near > 0.0 { d_far / d_near } else { f64::INFINITY };
                min_ratio = min_ratio.min(ratio);
                if ratio < BRANCH_RATIO {
                    status = TrailStatus::AbortedBranchAmbiguity;
                    break 'rows;
                }
                let residual = (z * z + c - x).norm() / x.norm().max(1.0);
                max_residual = max_residual.max(residual);
                if residual.is_nan() || residual > cfg.tol_conj {
                    status = TrailStatus::AbortedResidual;
                    break 'rows;
                }
                row.push(z);
            }
        }
        if i >= 0 {
            samples.push(Sample { potential: g, point: row[0] });
        }
        rows.push(row);
    }

    let trail = RayTrail {
        angle: t.clone(),
        c,
        samples,
        status,
        config: cfg.clone(),
        max_residual,
        min_branch_ratio: min_ratio,
    };
    match status {
        TrailStatus::AbortedBranchAmbiguity => Attempt::Ambiguous(trail),
        _ => Attempt::Done(trail),
    }
}

/// Trace the external ray at the exact angle `t`.
///
/// On a branch ambiguity the grid is refined by doubling `substeps`, up to
/// `max_refinements` times; if it persists the partial trail is returned with
/// status [`TrailStatus::AbortedBranchAmbiguity`].
pub fn trace_ray(map: &QuadraticMap, t: &Angle, cfg: &TraceConfig) -> Result<RayTrail> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    let mut refinements = 0;
    loop {
        match run_table(map, t, &cfg) {
            Attempt::Done(trail) => return Ok(trail),
            Attempt::Ambiguous(trail) if refinements >= cfg.max_refinements => return Ok(trail),
            Attempt::Ambiguous(_) => {
                cfg.substeps *= 2;
                refinements += 1;
            }
        }
    }
}

/// Trace the ray at an irrational angle through its exact dyadic truncation.
///
/// The truncation's error is doubled at every level of the table, so the
/// trace is refused unless `error_bound · 2^{depth·m + 8} ≤ 1`.
pub fn trace_irrational(
    map: &QuadraticMap,
    t_approx: &AngleApproximation,
    cfg: &TraceConfig,
) -> Result<RayTrail> {
    check_angle_precision(t_approx, cfg)?;
    trace_ray(map, &t_approx.value, cfg)
}

pub fn check_angle_precision(t_approx: &AngleApproximation, cfg: &TraceConfig) -> Result<()> {
    let digits = cfg.levels() + GUARD_DIGITS;
    let amplified = &t_approx.error_bound * BigRational::from_integer(BigInt::one() << digits);
    if amplified > BigRational::one() {
        return Err(Error::InsufficientPrecision(format!(
            "angle error {} exceeds 2^-{digits} needed for {} grid levels",
            t_approx.error_bound,
            cfg.levels()
        )));
    }
    Ok(())
}

/// Landing estimate from the deepest `tail_fraction` of the samples.
pub fn landing_estimate(trail: &RayTrail, eps_land: f64, tail_fraction: f64) -> Result<LandingEstimate> {
    let Some(deepest) = trail.deepest() else {
        return Err(Error::InvalidInput("trail has no samples".into()));
    };
    let len = trail.samples.len();
    let k = ((tail_fraction * len as f64).ceil() as usize).clamp(2.min(len), len);
    let tail = &trail.samples[len - k..];
    let mut diameter = 0.0f64;
    for (a_idx, a) in tail.iter().enumerate() {
        for b in &tail[a_idx + 1..] {
            diameter = diameter.max((a.point - b.point).norm());
        }
    }
    let status = if len >= 10 && diameter <= eps_land {
        LandingStatus::Landed
    } else {
        LandingStatus::Undecided
    };
    Ok(LandingEstimate {
        point: deepest.point,
        status,
        tail_diameter: diameter,
        potential_reached: deepest.potential,
    })
}

/// Largest `|f(x(g, t)) − x(2g, 2t)| / max(1, |x(2g, 2t)|)` between a trail
/// and an independently traced trail of the doubled angle on the same grid.
pub fn conjugacy_residual(map: &QuadraticMap, trail: &RayTrail, doubled: &RayTrail) -> Result<f64> {
    if doubled.angle != trail.angle.double() {
        return Err(Error::InvalidInput(format!(
            "trail of {} is not the doubled trail of {}",
            doubled.angle, trail.angle
        )));
    }
    if doubled.config != trail.config {
        return Err(Error::InvalidInput("trails were traced on different grids".into()));
    }
    let m = trail.config.substeps;
    let mut worst = 0.0f64;
    for (i, s) in trail.samples.iter().enumerate().skip(m) {
        let Some(partner) = doubled.samples.get(i - m) else { break };
        let target = partner.point;
        worst = worst.max((map.apply(s.point) - target).norm() / target.norm().max(1.0));
    }
    Ok(worst)
}

/// `max |x(g, t) + x(g, t + 1/2)|` over the common samples.
pub fn symmetry_defect(trail: &RayTrail, tau_trail: &RayTrail) -> f64 {
    trail
        .samples
        .iter()
        .zip(&tau_trail.samples)
        .map(|(a, b)| (a.point + b.point).norm())
        .fold(0.0, f64::max)
}

/// Points on the equipotential of level `g` at angles `k/n`, `k = 0..n`.
pub fn equipotential(map: &QuadraticMap, g: f64, n: usize, cfg: &TraceConfig) -> Result<Vec<Complex64>> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidInput(format!("equipotential level {g} must be positive")));
    }
    if n < 8 {
        return Err(Error::InvalidInput("an equipotential needs at least 8 points".into()));
    }
    let octaves = ((cfg.g0 / g).log2().ceil().max(1.0)) as usize;
    let level_cfg = TraceConfig { g0: g * (octaves as f64).exp2(), depth: octaves, ..cfg.clone() };
    let angles: Vec<Angle> = (0..n).map(|k| Angle::new(k as i64, n as i64).expect("n > 0")).collect();
    let points = crate::par::map_collect(&angles, |t| -> Result<Complex64> {
        let trail = trace_ray(map, t, &level_cfg)?;
        if !trail.is_complete() {
            return Err(Error::TraceAborted(format!(
                "equipotential ray at {t} ended with status {:?}",
                trail.status
            )));
        }
        Ok(trail.deepest().expect("complete trail has samples").point)
    });
    points.into_iter().collect()
}

/// The JSON trail document: `{"c", "angle", "samples": [[g, re, im], ...], "status", "landing", "config"}`.
pub fn trail_document(trail: &RayTrail, landing: Option<&LandingEstimate>) -> serde_json::Value {
    let samples: Vec<[f64; 3]> = trail
        .samples
        .iter()
        .map(|s| [s.potential, s.point.re, s.point.im])
        .collect();
    json!({
        "c": [trail.c.re, trail.c.im],
        "angle": trail.angle,
        "samples": samples,
        "status": trail.status,
        "landing": landing,
        "config": trail.config,
        "max_residual": trail.max_residual,
        "min_branch_ratio": trail.min_branch_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    fn zero_map() -> QuadraticMap {
        QuadraticMap::from_c(cx(0.0, 0.0)).unwrap()
    }

    fn chebyshev() -> QuadraticMap {
        QuadraticMap::from_c(cx(-2.0, 0.0)).unwrap()
    }

    fn exp_ray(g: f64, t: f64) -> Complex64 {
        Complex64::from_polar(g.exp(), TAU * t)
    }

    // ψ(w) = w + 1/w conjugates w ↦ w² to z ↦ z² − 2: (w + 1/w)² − 2 = w² + 1/w²
    fn chebyshev_oracle(g: f64, t: f64) -> Complex64 {
        let w = exp_ray(g, t);
        w + 1.0 / w
    }

    #[test]
    fn chebyshev_oracle_conjugates() {
        for &(g, t) in &[(0.3, 0.1), (2.0, 0.77), (1e-3, 0.4)] {
            let z = chebyshev_oracle(g, t);
            let lhs = z * z - 2.0;
            let rhs = chebyshev_oracle(2.0 * g, (2.0 * t) % 1.0);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn identity_map_trail_is_radial() {
        let cfg = TraceConfig::with_depth(20, 4);
        let t = a("3/7");
        let trail = trace_ray(&zero_map(), &t, &cfg).unwrap();
        assert!(trail.is_complete());
        assert_eq!(trail.samples.len(), 81);
        for s in &trail.samples {
            assert!((s.point - exp_ray(s.potential, t.to_f64())).norm() <= 1e-12 * s.point.norm().max(1.0));
        }
    }

    #[test]
    fn potential_grid_is_geometric() {
        let cfg = TraceConfig::with_depth(5, 3);
        let trail = trace_ray(&chebyshev(), &a("1/9"), &cfg).unwrap();
        for (i, s) in trail.samples.iter().enumerate() {
            let expected = cfg.g0 * (-(i as f64) / 3.0).exp2();
            assert!((s.potential - expected).abs() <= 1e-15 * expected);
        }
        for w in trail.samples.windows(2) {
            assert!(w[1].potential < w[0].potential);
        }
    }

    #[test]
    fn chebyshev_trail_matches_closed_form() {
        let cfg = TraceConfig::with_depth(30, 4);
        for t in ["1/9", "1/7", "3/11", "5/13"] {
            let t = a(t);
            let trail = trace_ray(&chebyshev(), &t, &cfg).unwrap();
            for s in trail.samples.iter().filter(|s| s.potential >= 1e-4) {
                let z = chebyshev_oracle(s.potential, t.to_f64());
                assert!((s.point - z).norm() <= 1e-9 * z.norm(), "t = {t}, g = {}", s.potential);
            }
        }
    }

    #[test]
    fn tau_symmetry_of_trails() {
        let cfg = TraceConfig::with_depth(20, 4);
        let t = a("1/9");
        let trail = trace_ray(&chebyshev(), &t, &cfg).unwrap();
        let other = trace_ray(&chebyshev(), &t.tau(), &cfg).unwrap();
        assert!(symmetry_defect(&trail, &other) <= cfg.tol_conj);
    }

    #[test]
    fn doubled_trail_is_conjugate() {
        let cfg = TraceConfig::with_depth(20, 4);
        let t = a("3/11");
        let map = chebyshev();
        let trail = trace_ray(&map, &t, &cfg).unwrap();
        let doubled = trace_ray(&map, &t.double(), &cfg).unwrap();
        assert!(conjugacy_residual(&map, &trail, &doubled).unwrap() <= 1e-12);
        assert!(conjugacy_residual(&map, &trail, &trail).is_err());
    }

    #[test]
    fn landing_on_unit_circle() {
        let trail = trace_ray(&zero_map(), &a("1/3"), &TraceConfig::with_depth(40, 4)).unwrap();
        let land = landing_estimate(&trail, EPS_LAND, TAIL_FRACTION).unwrap();
        assert!(land.landed());
        assert!((land.point - Complex64::from_polar(1.0, TAU / 3.0)).norm() < 1e-10);
    }

    #[test]
    fn chebyshev_landing_at_cosine() {
        let trail = trace_ray(&chebyshev(), &a("1/9"), &TraceConfig::with_depth(40, 4)).unwrap();
        let land = landing_estimate(&trail, EPS_LAND, TAIL_FRACTION).unwrap();
        assert!(land.landed());
        assert!((land.point - cx(2.0 * (2.0 * PI / 9.0).cos(), 0.0)).norm() < 1e-6);
        assert!((land.point.re - 1.53209).abs() < 1e-5);
    }

    #[test]
    fn shallow_siegel_trail_is_undecided() {
        let map = QuadraticMap::from_rotation(&crate::rotnum::ContinuedFraction::golden_mean()).unwrap();
        let trail = trace_ray(&map, &a("1/3"), &TraceConfig::with_depth(2, 4)).unwrap();
        let land = landing_estimate(&trail, EPS_LAND_INDIFFERENT, TAIL_FRACTION).unwrap();
        assert_eq!(land.status, LandingStatus::Undecided);
    }

    #[test]
    fn tail_diameter_shrinks_with_depth() {
        for map in [zero_map(), chebyshev()] {
            let mut last = f64::INFINITY;
            for depth in [10, 20, 30, 40] {
                let trail = trace_ray(&map, &a("2/7"), &TraceConfig::with_depth(depth, 4)).unwrap();
                let d = landing_estimate(&trail, EPS_LAND, TAIL_FRACTION).unwrap().tail_diameter;
                assert!(d <= last, "depth {depth}: {d} > {last}");
                last = d;
            }
        }
    }

    #[test]
    fn irrational_precision_gate() {
        let cfg = TraceConfig::with_depth(30, 1);
        let approx = |den: i64| AngleApproximation {
            value: a("1/3"),
            error_bound: BigRational::new(1.into(), den.into()),
        };
        check_angle_precision(&approx(1_000_000_000_000), &cfg).unwrap();
        assert!(matches!(
            check_angle_precision(&approx(1000), &cfg),
            Err(Error::InsufficientPrecision(_))
        ));
        let map = chebyshev();
        let trail = trace_irrational(&map, &approx(1_000_000_000_000), &cfg).unwrap();
        let doubled = trace_irrational(&map, &approx(1_000_000_000_000).double(), &cfg).unwrap();
        assert!(conjugacy_residual(&map, &trail, &doubled).unwrap() <= cfg.tol_conj);
    }

    #[test]
    fn equipotential_oracles() {
        let cfg = TraceConfig::default();
        let pts = equipotential(&zero_map(), 0.7, 16, &cfg).unwrap();
        for (k, p) in pts.iter().enumerate() {
            assert!((p - Complex64::from_polar(0.7f64.exp(), TAU * k as f64 / 16.0)).norm() < 1e-12);
        }
        let pts = equipotential(&chebyshev(), 1.0, 8, &cfg).unwrap();
        let e = 1f64.exp() + (-1f64).exp();
        assert!((pts[0] - cx(e, 0.0)).norm() < 1e-9);
        assert!((pts[4] - cx(-e, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn equipotential_green_consistency() {
        let map = QuadraticMap::from_c(cx(-0.39054, -0.58679)).unwrap();
        let pts = equipotential(&map, 0.5, 32, &TraceConfig::default()).unwrap();
        for p in pts {
            let g = map.green(p, 1e-10);
            assert!(g.escaped);
            assert!((g.green_estimate - 0.5).abs() < 1e-6, "{p}: {}", g.green_estimate);
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(equipotential(&zero_map(), 0.5, 4, &TraceConfig::default()).is_err());
        assert!(equipotential(&zero_map(), -1.0, 16, &TraceConfig::default()).is_err());
        let bad = TraceConfig { depth: 0, ..Default::default() };
        assert!(trace_ray(&zero_map(), &a("1/3"), &bad).is_err());
    }

    #[test]
    fn document_shape() {
        let trail = trace_ray(&chebyshev(), &a("1/9"), &TraceConfig::with_depth(3, 2)).unwrap();
        let land = landing_estimate(&trail, EPS_LAND, TAIL_FRACTION).unwrap();
        let doc = trail_document(&trail, Some(&land));
        assert_eq!(doc["c"], json!([-2.0, 0.0]));
        assert_eq!(doc["angle"], json!({"num": "1", "den": "9"}));
        assert_eq!(doc["status"], json!("traced-to-depth"));
        assert_eq!(doc["samples"].as_array().unwrap().len(), 7);
        assert_eq!(doc["samples"][0][0], json!(trail.config.g0));
        assert_eq!(doc["landing"]["status"], json!("undecided"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn residual_and_symmetry_hold(p in 0i64..200, q in 1i64..200, re in -1.5f64..0.3, im in -0.8f64..0.8) {
                let c = cx(re, im);
                prop_assume!(!(c.im == 0.0 && c.re >= 0.25));
                let map = QuadraticMap::from_c(c).unwrap();
                let cfg = TraceConfig::with_depth(12, 4);
                let t = Angle::new(p, q).unwrap();
                let trail = trace_ray(&map, &t, &cfg).unwrap();
                prop_assume!(trail.is_complete());
                prop_assert!(trail.max_residual <= cfg.tol_conj);
                let doubled = trace_ray(&map, &t.double(), &trail.config).unwrap();
                let tau = trace_ray(&map, &t.tau(), &trail.config).unwrap();
                prop_assert!(conjugacy_residual(&map, &trail, &doubled).unwrap() <= cfg.tol_conj);
                prop_assert!(symmetry_defect(&trail, &tau) <= cfg.tol_conj);
            }
        }
    }
}
