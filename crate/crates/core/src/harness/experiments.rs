use std::f64::consts::TAU;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use super::{ExperimentReport, Measurement};
use crate::circle::Angle;
use crate::error::Result;
use crate::quadmap::QuadraticMap;
use crate::raytrace::{
    conjugacy_residual, landing_estimate, symmetry_defect, trace_irrational, trace_ray, RayTrail, TraceConfig,
    EPS_LAND, GUARD_DIGITS, TAIL_FRACTION,
};
use crate::rotnum::{AngleApproximation, ContinuedFraction};

/// Angles `t` whose pairs `(t, 1 − t)` the Chebyshev experiment checks.
pub const CHEBYSHEV_ANGLES: [(i64, i64); 6] = [(0, 1), (1, 2), (1, 9), (1, 7), (3, 11), (5, 13)];

/// Closed-form Chebyshev ray point `ψ(e^{g+2πit})`, `ψ(w) = w + 1/w`.
fn chebyshev_point(g: f64, t: f64) -> Complex64 {
    let w = Complex64::from_polar(g.exp(), TAU * t);
    w + 1.0 / w
}

/// Chebyshev map `z² − 2`: trails against the closed form, landings
/// against `2cos(2πt)`, and co-landing of `t` and `1 − t`.
pub fn exp_chebyshev_oracle(depth: usize, substeps: usize) -> ExperimentReport {
    let started = Instant::now();
    let cfg = TraceConfig::with_depth(depth, substeps);
    let map = QuadraticMap::from_c(Complex64::new(-2.0, 0.0)).expect("c = -2 is valid");
    let mut report = ExperimentReport::new(
        "chebyshev",
        map.c,
        json!({ "config": cfg, "angles": CHEBYSHEV_ANGLES.iter().map(|(p, q)| format!("{p}/{q}")).collect::<Vec<_>>() }),
    );

    let mut angles = Vec::new();
    for &(p, q) in &CHEBYSHEV_ANGLES {
        let t = Angle::new(p, q).expect("valid angle");
        let partner = Angle::new(q - p, q).expect("valid angle");
        angles.push(t.clone());
        if partner != t {
            angles.push(partner);
        }
    }
    let mut all = angles.clone();
    all.extend(angles.iter().map(Angle::double));
    let trails = crate::par::map_collect(&all, |t| trace_ray(&map, t, &cfg));
    let (trails, doubled) = trails.split_at(angles.len());

    let mut landings = Vec::new();
    for ((t, trail), doubled) in angles.iter().zip(trails).zip(doubled) {
        let trail = match trail {
            Ok(trail) if trail.is_complete() => trail,
            Ok(trail) => {
                report.fail_with(&format!("trace {t}"), format!("status {:?}", trail.status));
                landings.push(None);
                continue;
            }
            Err(e) => {
                report.fail_with(&format!("trace {t}"), e);
                landings.push(None);
                continue;
            }
        };
        let tf = t.to_f64();
        let sample_err = trail
            .samples
            .iter()
            .filter(|s| s.potential >= 1e-4)
            .map(|s| {
                let z = chebyshev_point(s.potential, tf);
                (s.point - z).norm() / z.norm()
            })
            .fold(0.0, f64::max);
        report.push(Measurement::at_most(format!("sample error {t}"), sample_err, 1e-9));

        match doubled {
            Ok(d) => match conjugacy_residual(&map, trail, d) {
                Ok(r) => report.push(Measurement::at_most(format!("conjugacy residual {t}"), r, cfg.tol_conj)),
                Err(e) => report.fail_with(&format!("conjugacy residual {t}"), e),
            },
            Err(e) => report.fail_with(&format!("conjugacy residual {t}"), e),
        }

        let land = landing_estimate(trail, EPS_LAND, TAIL_FRACTION).expect("complete trail has samples");
        let expected = Complex64::new(2.0 * (TAU * tf).cos(), 0.0);
        let tol = if t.is_zero() || *t == Angle::half() { 1e-9 } else { 1e-6 };
        let label = format!("landing {t}");
        let err = (land.point - expected).norm();
        if land.landed() {
            report.push(Measurement::at_most(label, err, tol));
        } else {
            report.push(Measurement::undecided(label, err, tol));
        }
        landings.push(Some(land));
    }

    for &(p, q) in &CHEBYSHEV_ANGLES {
        if 2 * p == q || p == 0 {
            continue;
        }
        let t = Angle::new(p, q).expect("valid angle");
        let partner = Angle::new(q - p, q).expect("valid angle");
        let find = |x: &Angle| angles.iter().position(|a| a == x).and_then(|i| landings[i]);
        if let (Some(a), Some(b)) = (find(&t), find(&partner)) {
            let label = format!("co-landing {t} {partner}");
            let gap = (a.point - b.point).norm();
            if a.landed() && b.landed() {
                report.push(Measurement::at_most(label, gap, 1e-6));
            } else {
                report.push(Measurement::undecided(label, gap, 1e-6));
            }
        }
    }
    report.finish(started)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiegelConfig {
    pub depth: usize,
    pub substeps: usize,
    /// Distance within which deep samples must approach their target.
    pub eps: f64,
    pub tol_conj: f64,
}

impl Default for SiegelConfig {
    fn default() -> Self {
        SiegelConfig { depth: 256, substeps: 4, eps: 5e-2, tol_conj: 1e-6 }
    }
}

impl SiegelConfig {
    pub fn trace_config(&self) -> TraceConfig {
        TraceConfig { tol_conj: self.tol_conj, ..TraceConfig::with_depth(self.depth, self.substeps) }
    }
}

pub fn golden_siegel_map() -> QuadraticMap {
    QuadraticMap::from_rotation(&ContinuedFraction::golden_mean()).expect("golden mean is Brjuno")
}

/// The critical angle of the golden Siegel map, accurate enough that its
/// double can still be traced through `levels` grid levels.
pub fn golden_critical_angle(levels: usize) -> Result<AngleApproximation> {
    let err = BigRational::new(BigInt::one(), BigInt::one() << (levels + GUARD_DIGITS + 1));
    ContinuedFraction::golden_mean().critical_angle(&err)
}

fn angle_echo(t: &AngleApproximation) -> serde_json::Value {
    json!({
        "value": t.value.to_f64(),
        "error_bound": num_traits::ToPrimitive::to_f64(&t.error_bound),
    })
}

fn deepest_distance(trail: &RayTrail, target: Complex64) -> f64 {
    trail.deepest().map_or(f64::INFINITY, |s| (s.point - target).norm())
}

/// Largest increase of `|z − target|` over the last `levels` grid steps.
fn worst_increase(trail: &RayTrail, target: Complex64, levels: usize) -> f64 {
    let n = trail.samples.len();
    let tail = &trail.samples[n.saturating_sub(levels + 1)..];
    tail.windows(2)
        .map(|w| (w[1].point - target).norm() - (w[0].point - target).norm())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Golden-mean Siegel map: the rays at the critical angle `t*` and at
/// `t* + 1/2` must both reach 0, and the ray at `2t*` must reach `c`.
pub fn exp_golden_siegel(cfg: &SiegelConfig) -> ExperimentReport {
    let started = Instant::now();
    let map = golden_siegel_map();
    let trace = cfg.trace_config();
    let mut report = ExperimentReport::new("golden-siegel", map.c, json!({ "config": cfg }));

    let t_star = match golden_critical_angle(trace.levels()) {
        Ok(t) => t,
        Err(e) => {
            report.fail_with("critical angle", e);
            return report.finish(started);
        }
    };
    report.inputs["critical_angle"] = angle_echo(&t_star);

    let targets = [t_star.clone(), t_star.tau(), t_star.double()];
    let trails = crate::par::map_collect(&targets, |t| trace_irrational(&map, t, &trace));
    let names = ["t*", "t*+1/2", "2t*"];
    let mut ok = Vec::new();
    for (name, trail) in names.iter().zip(trails) {
        match trail {
            Ok(trail) if trail.is_complete() => {
                report.push(Measurement::at_most(format!("residual {name}"), trail.max_residual, cfg.tol_conj));
                ok.push(trail);
            }
            Ok(trail) => {
                report.fail_with(&format!("trace {name}"), format!("status {:?}", trail.status));
                return report.finish(started);
            }
            Err(e) => {
                report.fail_with(&format!("trace {name}"), e);
                return report.finish(started);
            }
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    for (name, trail) in names.iter().zip(&ok).take(2) {
        report.push(Measurement::at_most(format!("distance to 0 {name}"), deepest_distance(trail, zero), cfg.eps));
        report.push(Measurement::at_most(format!("monotone approach {name}"), worst_increase(trail, zero, 20), 0.0));
    }
    report.push(Measurement::at_most("distance to c 2t*", deepest_distance(&ok[2], map.c), cfg.eps));
    report.push(Measurement::at_most("tau symmetry", symmetry_defect(&ok[0], &ok[1]), cfg.tol_conj));
    match conjugacy_residual(&map, &ok[0], &ok[2]) {
        Ok(r) => report.push(Measurement::at_most("conjugacy residual t* 2t*", r, cfg.tol_conj)),
        Err(e) => report.fail_with("conjugacy residual t* 2t*", e),
    }
    report.finish(started)
}

/// Golden-mean Siegel map: the four halves of `t*` and `t* + 1/2` must
/// land in two antipodal clusters at the preimages `±√(−c)` of 0.
pub fn exp_preimage_cluster(cfg: &SiegelConfig) -> ExperimentReport {
    let started = Instant::now();
    let map = golden_siegel_map();
    let trace = cfg.trace_config();
    let mut report = ExperimentReport::new("preimage-cluster", map.c, json!({ "config": cfg }));

    let t_star = match golden_critical_angle(trace.levels()) {
        Ok(t) => t,
        Err(e) => {
            report.fail_with("critical angle", e);
            return report.finish(started);
        }
    };
    report.inputs["critical_angle"] = angle_echo(&t_star);
    let (h0, h1) = t_star.halve();
    let (h2, h3) = t_star.tau().halve();
    let halves = [h0, h1, h2, h3];

    let trails = crate::par::map_collect(&halves, |t| trace_irrational(&map, t, &trace));
    let mut ends = Vec::new();
    for (h, trail) in halves.iter().zip(trails) {
        match trail {
            Ok(trail) if trail.is_complete() => ends.push(trail.deepest().expect("samples").point),
            Ok(trail) => {
                report.fail_with(&format!("trace {}", h.value.to_f64()), format!("status {:?}", trail.status));
                return report.finish(started);
            }
            Err(e) => {
                report.fail_with(&format!("trace {}", h.value.to_f64()), e);
                return report.finish(started);
            }
        }
    }

    // the three ways to split four points into two pairs
    let splits = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    let spread = |(a, b): (usize, usize)| (ends[a] - ends[b]).norm();
    let (best, intra) = splits
        .iter()
        .map(|&(p, q)| ((p, q), spread(p).max(spread(q))))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("three splits");
    let (p, q) = best;
    let inter = [p.0, p.1]
        .iter()
        .flat_map(|&i| [q.0, q.1].map(|j| (ends[i] - ends[j]).norm()))
        .fold(f64::INFINITY, f64::min);
    let separation_label = "cluster separation";
    if inter < 3.0 * intra {
        report.push(Measurement::undecided(separation_label, inter / intra, 3.0));
        report.notes.push("clusters are not separated by three times their spread".into());
        return report.finish(started);
    }
    report.push(Measurement::check(separation_label, true));

    let center = |(a, b): (usize, usize)| 0.5 * (ends[a] + ends[b]);
    let (c1, c2) = (center(p), center(q));
    report.push(Measurement::at_most("preimage equation cluster 1", (c1 * c1 + map.c).norm(), cfg.eps));
    report.push(Measurement::at_most("preimage equation cluster 2", (c2 * c2 + map.c).norm(), cfg.eps));
    report.push(Measurement::at_most("antipodal centers", (c1 + c2).norm(), cfg.eps));
    report.inputs["centers"] = json!([[c1.re, c1.im], [c2.re, c2.im]]);

    let mut target = [t_star.value.clone(), t_star.value.tau()];
    target.sort();
    for (k, (a, b)) in [p, q].into_iter().enumerate() {
        let mut doubled = [halves[a].value.double(), halves[b].value.double()];
        doubled.sort();
        report.push(Measurement::check(format!("doubled angles cluster {}", k + 1), doubled == target));
    }
    report.finish(started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Outcome;

    #[test]
    fn chebyshev_experiment_passes() {
        let r = exp_chebyshev_oracle(40, 4);
        assert!(r.passed(), "{:#?}", r.measurements);
        assert!(r.measurement("landing 1/9").unwrap().value < 1e-6);
        assert!(r.measurement("co-landing 1/7 6/7").is_some());
    }

    #[test]
    fn shallow_chebyshev_is_never_a_false_pass() {
        let r = exp_chebyshev_oracle(1, 4);
        assert_ne!(r.overall, Outcome::Pass);
    }

    #[test]
    fn golden_map_echo() {
        let map = golden_siegel_map();
        assert!((map.c - Complex64::new(-0.390541, -0.586788)).norm() < 1e-6);
        let t = golden_critical_angle(40).unwrap();
        assert!((t.value.to_f64() - 0.354902).abs() < 1e-6);
    }

    #[test]
    fn worst_increase_detects_backtracking() {
        let cfg = TraceConfig::with_depth(10, 4);
        let map = QuadraticMap::from_c(Complex64::new(0.0, 0.0)).unwrap();
        let trail = trace_ray(&map, &Angle::new(1, 3).unwrap(), &cfg).unwrap();
        assert!(worst_increase(&trail, Complex64::new(0.0, 0.0), 20) < 0.0);
        assert!(worst_increase(&trail, Complex64::from_polar(50.0, TAU / 3.0), 40) > 0.0);
    }
}
