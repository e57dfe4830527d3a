//! Ray pairs, wakes and the separation search.
//!
//! A ray pair `(R_t, R_t′)` with a common landing point cuts the plane into
//! two components. The wake is the one not containing `α`; which one that is
//! cannot be read off the angles, so it is decided by locating `α` against a
//! closed polygon built from the two trails. Everything downstream of that
//! choice (the wake angle, its doubling, the critical-point test) is exact
//! rational arithmetic on the side arc at infinity.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::circle::{angle_in_arc, arc_measure, serialize_rational, Angle, Orientation};
use crate::error::{Error, Result};
use crate::quadmap::QuadraticMap;
use crate::raytrace::{landing_estimate, trace_ray, LandingEstimate, RayTrail, TraceConfig, TAIL_FRACTION};

/// Finest angular step of the closing arc, in turns.
const ARC_STEP: f64 = 1.0 / 512.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WakeConfig {
    /// Maximum distance between the two landing estimates of a pair.
    pub pairing_tol: f64,
    /// A located point must clear the boundary by this multiple of the nearest edge length.
    pub clearance_factor: f64,
}

impl Default for WakeConfig {
    fn default() -> Self {
        WakeConfig { pairing_tol: 1e-6, clearance_factor: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayPair {
    pub t: Angle,
    pub t_prime: Angle,
    pub root_estimate: Option<LandingEstimate>,
}

impl RayPair {
    pub fn new(t: Angle, t_prime: Angle) -> Result<Self> {
        if t == t_prime {
            return Err(Error::InvalidInput(format!("ray pair needs two distinct angles, got {t} twice")));
        }
        Ok(RayPair { t, t_prime, root_estimate: None })
    }

    pub fn tau(&self) -> RayPair {
        RayPair { t: self.t.tau(), t_prime: self.t_prime.tau(), root_estimate: None }
    }

    pub fn double(&self) -> Result<RayPair> {
        RayPair::new(self.t.double(), self.t_prime.double())
    }
}

/// An open counterclockwise arc of the circle at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideArc {
    pub from: Angle,
    pub to: Angle,
    pub orientation: Orientation,
}

impl SideArc {
    pub fn ccw(from: Angle, to: Angle) -> Self {
        SideArc { from, to, orientation: Orientation::Ccw }
    }

    pub fn measure(&self) -> BigRational {
        arc_measure(&self.from, &self.to, self.orientation)
    }

    /// The complementary arc, traversed in the same orientation.
    pub fn complement(&self) -> SideArc {
        SideArc { from: self.to.clone(), to: self.from.clone(), orientation: self.orientation }
    }

    pub fn contains(&self, x: &Angle) -> bool {
        match self.orientation {
            Orientation::Ccw => angle_in_arc(x, &self.from, &self.to),
            Orientation::Cw => angle_in_arc(x, &self.to, &self.from),
        }
    }

    pub fn doubled(&self) -> SideArc {
        SideArc { from: self.from.double(), to: self.to.double(), orientation: self.orientation }
    }

    fn normalized(&self) -> (Angle, BigRational) {
        match self.orientation {
            Orientation::Ccw => (self.from.clone(), self.measure()),
            Orientation::Cw => (self.to.clone(), self.measure()),
        }
    }
}

/// How the side not containing `α` was decided.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    GeometricTest { clearance_ratio: f64 },
    CallerAsserted,
}

/// Closed polygon through both trails, the landing segment and a large arc.
///
/// The polygon encloses the component whose arc at infinity is the ccw arc
/// from `t` to `t′`; `region_is_wake` records whether that component is the wake.
#[derive(Clone, Debug, PartialEq)]
pub struct WakeBoundary {
    pub polygon: Vec<Complex64>,
    pub region_is_wake: bool,
    pub clearance_factor: f64,
}

impl WakeBoundary {
    fn build(trail: &RayTrail, trail_prime: &RayTrail, clearance_factor: f64) -> Result<Self> {
        let (Some(outer), Some(outer_prime)) = (trail.samples.first(), trail_prime.samples.first()) else {
            return Err(Error::InconclusiveGeometry("empty trail".into()));
        };
        let mut polygon: Vec<Complex64> = trail.points().collect();
        polygon.extend(trail_prime.points().rev());

        let turns = arc_measure(&trail.angle, &trail_prime.angle, Orientation::Ccw);
        let sweep = TAU * num_traits::ToPrimitive::to_f64(&turns).unwrap_or(0.0);
        let start = outer_prime.point.arg();
        let nominal_end = start - sweep;
        let end = nominal_end + wrap_pi(outer.point.arg() - nominal_end);
        let (r0, r1) = (outer_prime.point.norm(), outer.point.norm());
        let steps = ((sweep / TAU / ARC_STEP).ceil() as usize).max(2);
        for k in 1..steps {
            let s = k as f64 / steps as f64;
            polygon.push(Complex64::from_polar(r0 + s * (r1 - r0), start + s * (end - start)));
        }
        Ok(WakeBoundary { polygon, region_is_wake: false, clearance_factor })
    }

    /// Whether `z` lies inside the polygon, with the clearance ratio achieved.
    fn locate_in_polygon(&self, z: Complex64) -> Result<(bool, f64)> {
        let n = self.polygon.len();
        let mut winding = 0i64;
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..n {
            let a = self.polygon[k];
            let b = self.polygon[(k + 1) % n];
            let len = (b - a).norm();
            if len == 0.0 {
                continue;
            }
            let d = segment_distance(z, a, b);
            if d < best.0 {
                best = (d, len);
            }
            let side = cross(b - a, z - a);
            if a.im <= z.im {
                if b.im > z.im && side > 0.0 {
                    winding += 1;
                }
            } else if b.im <= z.im && side < 0.0 {
                winding -= 1;
            }
        }
        let (dist, len) = best;
        let ratio = dist / len;
        if ratio.is_nan() || ratio < self.clearance_factor {
            return Err(Error::InconclusiveGeometry(format!(
                "point {z} is {dist:.3e} from the boundary, nearest edge length {len:.3e}"
            )));
        }
        Ok((winding != 0, ratio))
    }

    /// Whether `z` lies in the wake this boundary belongs to.
    pub fn in_wake(&self, z: Complex64) -> Result<bool> {
        let (inside, _) = self.locate_in_polygon(z)?;
        Ok(inside == self.region_is_wake)
    }
}

fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > std::f64::consts::PI {
        y - TAU
    } else {
        y
    }
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let s = ((z - a).re * ab.re + (z - a).im * ab.im) / ab.norm_sqr();
    (z - (a + ab * s.clamp(0.0, 1.0))).norm()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Wake {
    pub pair: RayPair,
    pub side_arc: SideArc,
    #[serde(serialize_with = "serialize_rational")]
    pub a: BigRational,
    pub alpha_excluded: Evidence,
    #[serde(skip)]
    pub boundary: Option<WakeBoundary>,
}

impl Wake {
    /// A wake whose side is asserted by the caller; no geometry is attached.
    pub fn asserted(pair: RayPair, side_arc: SideArc) -> Result<Self> {
        let ends_match = (side_arc.from == pair.t && side_arc.to == pair.t_prime)
            || (side_arc.from == pair.t_prime && side_arc.to == pair.t);
        if !ends_match {
            return Err(Error::InvalidInput("side arc must run between the pair's angles".into()));
        }
        let a = side_arc.measure();
        Ok(Wake { pair, side_arc, a, alpha_excluded: Evidence::CallerAsserted, boundary: None })
    }

    pub fn co_wake_arc(&self) -> SideArc {
        self.side_arc.complement()
    }

    pub fn co_wake_angle(&self) -> BigRational {
        BigRational::one() - &self.a
    }

    /// Geometric membership of `z` in the wake.
    pub fn geometric_contains(&self, z: Complex64) -> Result<bool> {
        match &self.boundary {
            Some(b) => b.in_wake(z),
            None => Err(Error::InconclusiveGeometry("wake carries no trail geometry".into())),
        }
    }
}

/// Build the wake of `pair` from its two trails.
pub fn wake_from_pair(
    map: &QuadraticMap,
    pair: &RayPair,
    trail: &RayTrail,
    trail_prime: &RayTrail,
    cfg: &WakeConfig,
) -> Result<Wake> {
    if trail.angle != pair.t || trail_prime.angle != pair.t_prime {
        return Err(Error::InvalidInput("trails do not match the pair's angles".into()));
    }
    if trail.c != map.c || trail_prime.c != map.c {
        return Err(Error::InvalidInput("trails were traced for a different map".into()));
    }
    if trail.samples.len() < 2 || trail_prime.samples.len() < 2 {
        return Err(Error::InconclusiveGeometry("trails too shallow to close a boundary".into()));
    }
    let land = landing_estimate(trail, cfg.pairing_tol, TAIL_FRACTION)?;
    let land_prime = landing_estimate(trail_prime, cfg.pairing_tol, TAIL_FRACTION)?;
    let gap = (land.point - land_prime.point).norm();
    if gap.is_nan() || gap > cfg.pairing_tol {
        return Err(Error::NotARayPair(format!(
            "rays {} and {} end {gap:.3e} apart",
            pair.t, pair.t_prime
        )));
    }
    let root = 0.5 * (land.point + land_prime.point);
    if (root - map.alpha).norm() <= cfg.pairing_tol {
        return Err(Error::InvalidInput(format!("pair {} {} lands at α", pair.t, pair.t_prime)));
    }

    let mut boundary = WakeBoundary::build(trail, trail_prime, cfg.clearance_factor)?;
    let (alpha_inside, ratio) = boundary.locate_in_polygon(map.alpha)?;
    let polygon_arc = SideArc::ccw(pair.t.clone(), pair.t_prime.clone());
    let side_arc = if alpha_inside { polygon_arc.complement() } else { polygon_arc };
    boundary.region_is_wake = !alpha_inside;

    let mut pair = pair.clone();
    pair.root_estimate = Some(LandingEstimate { point: root, ..land });
    let a = side_arc.measure();
    Ok(Wake {
        pair,
        side_arc,
        a,
        alpha_excluded: Evidence::GeometricTest { clearance_ratio: ratio },
        boundary: Some(boundary),
    })
}

/// `a(W) > 1/2`, cross-checked against point location of 0 when geometry allows.
pub fn contains_critical(wake: &Wake) -> Result<bool> {
    let half = BigRational::new(1.into(), 2.into());
    if wake.a == half {
        return Err(Error::RootIsCritical);
    }
    let exact = wake.a > half;
    if let Some(boundary) = &wake.boundary {
        match boundary.in_wake(Complex64::zero()) {
            Ok(geometric) if geometric != exact => {
                return Err(Error::ConsistencyFailure(format!(
                    "wake of ({}, {}) has angle {} but 0 is {} it geometrically",
                    wake.pair.t,
                    wake.pair.t_prime,
                    wake.a,
                    if geometric { "inside" } else { "outside" }
                )))
            }
            Ok(_) | Err(Error::InconclusiveGeometry(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(exact)
}

/// Source of trails for operations that need new angles.
pub trait TrailProvider: Sync {
    fn trail(&self, t: &Angle) -> Result<RayTrail>;
}

/// Traces trails on demand with a fixed configuration.
#[derive(Clone, Debug)]
pub struct Tracer {
    pub map: QuadraticMap,
    pub config: TraceConfig,
}

impl TrailProvider for Tracer {
    fn trail(&self, t: &Angle) -> Result<RayTrail> {
        trace_ray(&self.map, t, &self.config)
    }
}

fn pair_trails(pair: &RayPair, provider: &dyn TrailProvider) -> Result<(RayTrail, RayTrail)> {
    let mut out = crate::par::map_collect(&[pair.t.clone(), pair.t_prime.clone()], |t| provider.trail(t));
    let second = out.pop().expect("two trails")?;
    let first = out.pop().expect("two trails")?;
    Ok((first, second))
}

/// Wake of a pair, with trails from `provider`.
pub fn wake_with_provider(
    map: &QuadraticMap,
    pair: &RayPair,
    provider: &dyn TrailProvider,
    cfg: &WakeConfig,
) -> Result<Wake> {
    let (trail, trail_prime) = pair_trails(pair, provider)?;
    wake_from_pair(map, pair, &trail, &trail_prime, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageKind {
    Wake,
    CoWake,
}

/// The image `f(W)`: the region of the doubled pair cut out by the doubled
/// side arc, together with whether that region is the image pair's wake or
/// its co-wake (the latter when `−α ∈ W`, in which case it contains `α`).
pub fn image_wake(
    map: &QuadraticMap,
    wake: &Wake,
    provider: &dyn TrailProvider,
    cfg: &WakeConfig,
) -> Result<(Wake, ImageKind)> {
    let half = BigRational::new(1.into(), 2.into());
    if wake.a >= half {
        return Err(Error::InvalidInput(format!("image wake needs a(W) < 1/2, got {}", wake.a)));
    }
    let boundary = wake
        .boundary
        .as_ref()
        .ok_or_else(|| Error::InconclusiveGeometry("wake carries no trail geometry".into()))?;
    if let Some(root) = &wake.pair.root_estimate {
        if (map.apply(root.point) - map.alpha).norm() <= cfg.pairing_tol {
            return Err(Error::InvalidInput("the root is mapped onto α".into()));
        }
    }
    let minus_alpha_in = boundary.in_wake(-map.alpha)?;
    let kind = if minus_alpha_in { ImageKind::CoWake } else { ImageKind::Wake };

    let image_pair = wake.pair.double()?;
    let image = wake_with_provider(map, &image_pair, provider, cfg)?;
    let doubled = wake.side_arc.doubled();
    let two_a = &wake.a + &wake.a;
    debug_assert_eq!(doubled.measure(), two_a);
    let expected = match kind {
        ImageKind::Wake => doubled.clone(),
        ImageKind::CoWake => doubled.complement(),
    };
    if image.side_arc != expected {
        return Err(Error::ConsistencyFailure(format!(
            "image of the wake of ({}, {}) should be a {kind:?} but the geometry of ({}, {}) disagrees",
            wake.pair.t, wake.pair.t_prime, image_pair.t, image_pair.t_prime
        )));
    }
    let region = match kind {
        ImageKind::Wake => image,
        ImageKind::CoWake => {
            let mut region = image;
            region.side_arc = doubled;
            region.a = two_a;
            if let Some(b) = region.boundary.as_mut() {
                b.region_is_wake = !b.region_is_wake;
            }
            region
        }
    };
    Ok((region, kind))
}

/// `⌈log₂(1/(2a₀))⌉ + 1`, the most image steps the separation search can take.
pub fn separation_bound(a0: &BigRational) -> usize {
    let mut k = 0;
    let mut x = a0 + a0;
    while x < BigRational::one() {
        x = &x + &x;
        k += 1;
    }
    k + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationAction {
    ReturnPair,
    RootIsCritical,
    TauPair,
    Image,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationStep {
    pub t: Angle,
    pub t_prime: Angle,
    #[serde(serialize_with = "serialize_rational")]
    pub a: BigRational,
    pub minus_alpha_in_wake: Option<bool>,
    pub action: SeparationAction,
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum SeparationOutcome {
    Found {
        pair: RayPair,
        #[serde(serialize_with = "serialize_rational")]
        wake_angle: BigRational,
        via_tau: bool,
        /// Point location of 0 in the returned pair's wake.
        zero_in_wake: Option<bool>,
    },
    RootIsCritical,
    Incomplete {
        cause: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationReport {
    pub start: RayPair,
    pub outcome: SeparationOutcome,
    pub iterations: usize,
    pub bound: usize,
    pub trace: Vec<SeparationStep>,
}

/// Search forward images of a pair's wake for a ray pair separating `α` from 0.
pub fn separation_search(
    map: &QuadraticMap,
    pair: &RayPair,
    provider: &dyn TrailProvider,
    cfg: &WakeConfig,
) -> SeparationReport {
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut bound = 0;
    let outcome = (|| -> Result<SeparationOutcome> {
        let mut wake = wake_with_provider(map, pair, provider, cfg)?;
        bound = separation_bound(&wake.a);
        let half = BigRational::new(1.into(), 2.into());
        loop {
            let mut step = SeparationStep {
                t: wake.pair.t.clone(),
                t_prime: wake.pair.t_prime.clone(),
                a: wake.a.clone(),
                minus_alpha_in_wake: None,
                action: SeparationAction::ReturnPair,
            };
            if wake.a > half {
                trace.push(step);
                let zero_in_wake = wake.geometric_contains(Complex64::zero()).ok();
                return Ok(SeparationOutcome::Found {
                    pair: wake.pair.clone(),
                    wake_angle: wake.a.clone(),
                    via_tau: false,
                    zero_in_wake,
                });
            }
            if wake.a == half {
                step.action = SeparationAction::RootIsCritical;
                trace.push(step);
                return Ok(SeparationOutcome::RootIsCritical);
            }
            let minus_alpha_in = wake.geometric_contains(-map.alpha)?;
            step.minus_alpha_in_wake = Some(minus_alpha_in);
            if minus_alpha_in {
                step.action = SeparationAction::TauPair;
                trace.push(step);
                let tau_wake = wake_with_provider(map, &wake.pair.tau(), provider, cfg)?;
                let zero_in_wake = tau_wake.geometric_contains(Complex64::zero()).ok();
                return Ok(SeparationOutcome::Found {
                    pair: tau_wake.pair.clone(),
                    wake_angle: tau_wake.a.clone(),
                    via_tau: true,
                    zero_in_wake,
                });
            }
            step.action = SeparationAction::Image;
            trace.push(step);
            if iterations == bound {
                return Err(Error::ConsistencyFailure(format!("no separating pair within {bound} image steps")));
            }
            iterations += 1;
            wake = image_wake(map, &wake, provider, cfg)?.0;
        }
    })();
    SeparationReport {
        start: pair.clone(),
        outcome: outcome.unwrap_or_else(|e| SeparationOutcome::Incomplete { cause: e.to_string() }),
        iterations,
        bound,
        trace,
    }
}

/// Exact check that two arcs at infinity are disjoint or nested.
pub fn disjoint_or_nested(a: &SideArc, b: &SideArc) -> bool {
    fn inside(a: &SideArc, b: &SideArc) -> bool {
        let (a_start, a_len) = a.normalized();
        let (b_start, b_len) = b.normalized();
        arc_measure(&b_start, &a_start, Orientation::Ccw) + a_len <= b_len
    }
    fn disjoint(a: &SideArc, b: &SideArc) -> bool {
        let (a_start, a_len) = a.normalized();
        let (b_start, b_len) = b.normalized();
        let offset = arc_measure(&b_start, &a_start, Orientation::Ccw);
        offset >= b_len && offset + a_len <= BigRational::one()
    }
    inside(a, b) || inside(b, a) || disjoint(a, b)
}

/// The JSON wake document.
pub fn wake_document(wake: &Wake) -> serde_json::Value {
    serde_json::to_value(wake).expect("wake serializes")
}
