use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circle::Angle;
use crate::error::{Error, Result};
use crate::quadmap::QuadraticMap;
use crate::raytrace::{landing_estimate, trace_ray, LandingStatus, TraceConfig, TrailStatus, EPS_LAND, TAIL_FRACTION};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrolinRecord {
    pub angle: Angle,
    pub landing_status: LandingStatus,
    pub point: Complex64,
    pub doubled_status: LandingStatus,
    /// `|f(land(t)) − land(2t)|`, present only when both rays landed.
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrolinSample {
    pub seed: u64,
    pub n: usize,
    pub c: Complex64,
    pub config: TraceConfig,
    pub records: Vec<BrolinRecord>,
}

impl BrolinSample {
    pub fn decided(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().filter_map(|r| r.residual)
    }

    /// Fraction of decided records with residual below `threshold`; `None` if none were decided.
    pub fn fraction_below(&self, threshold: f64) -> Option<f64> {
        let (hits, total) = self.decided().fold((0usize, 0usize), |(h, n), r| (h + (r < threshold) as usize, n + 1));
        (total > 0).then(|| hits as f64 / total as f64)
    }
}

/// Sample `n` uniform 64-bit dyadic angles and test the pushforward
/// invariance `f(land(t)) = land(2t)` of the harmonic measure.
pub fn brolin_sample(map: &QuadraticMap, n: usize, seed: u64, depth: usize, substeps: usize) -> Result<BrolinSample> {
    if n == 0 {
        return Err(Error::InvalidInput("a Brolin sample needs n ≥ 1".into()));
    }
    let config = TraceConfig::with_depth(depth, substeps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<Angle> = (0..n).map(|_| Angle::from_u64_dyadic(rng.next_u64())).collect();

    let land = |t: &Angle| -> Result<(LandingStatus, Complex64)> {
        let trail = trace_ray(map, t, &config)?;
        if trail.status != TrailStatus::TracedToDepth || trail.samples.is_empty() {
            let point = trail.deepest().map_or(Complex64::new(f64::NAN, f64::NAN), |s| s.point);
            return Ok((LandingStatus::Undecided, point));
        }
        let est = landing_estimate(&trail, EPS_LAND, TAIL_FRACTION)?;
        Ok((est.status, est.point))
    };
    let records = crate::par::map_collect(&angles, |t| -> Result<BrolinRecord> {
        let (landing_status, point) = land(t)?;
        let (doubled_status, doubled) = land(&t.double())?;
        let both = landing_status == LandingStatus::Landed && doubled_status == LandingStatus::Landed;
        Ok(BrolinRecord {
            angle: t.clone(),
            landing_status,
            point,
            doubled_status,
            residual: both.then(|| (map.apply(point) - doubled).norm()),
        })
    });
    Ok(BrolinSample { seed, n, c: map.c, config, records: records.into_iter().collect::<Result<_>>()? })
}
