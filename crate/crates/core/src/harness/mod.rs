//! Experiments, Brolin-measure sampling and rendering.

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

mod brolin;
mod experiments;
mod render;

pub use brolin::{brolin_sample, BrolinRecord, BrolinSample};
pub use experiments::{
    exp_chebyshev_oracle, exp_golden_siegel, exp_preimage_cluster, golden_critical_angle, golden_siegel_map,
    SiegelConfig, CHEBYSHEV_ANGLES,
};
pub use render::{render, to_svg, Image, RenderOutput, RenderSpec, Window};

/// Env var capping the worker-thread count.
pub const THREADS_ENV: &str = "JULIA_RAYS_THREADS";

pub const CREMER_NOTE: &str = "The Cremer half of the theorem is not reproducible at desk scale: no \
    biaccessible point of a Cremer Julia set is known, so there is nothing to trace. Only the Siegel-side \
    consequences are checked here; the Cremer side is covered by the shared ray, conjugacy and wake machinery.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Undecided,
}

impl Outcome {
    /// Fail dominates undecided, which dominates pass.
    pub fn combine(self, other: Outcome) -> Outcome {
        use Outcome::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Undecided, _) | (_, Undecided) => Undecided,
            _ => Pass,
        }
    }
}

/// A measured defect and the tolerance it must not exceed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
    pub outcome: Outcome,
}

impl Measurement {
    pub fn at_most(label: impl Into<String>, value: f64, tolerance: f64) -> Self {
        let outcome = if value <= tolerance { Outcome::Pass } else { Outcome::Fail };
        Measurement { label: label.into(), value, tolerance, outcome }
    }

    pub fn check(label: impl Into<String>, ok: bool) -> Self {
        Measurement {
            label: label.into(),
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            outcome: if ok { Outcome::Pass } else { Outcome::Fail },
        }
    }

    pub fn undecided(label: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Measurement { label: label.into(), value, tolerance, outcome: Outcome::Undecided }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub c: Complex64,
    pub inputs: serde_json::Value,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
    pub overall: Outcome,
    pub runtime_ms: u64,
}

impl ExperimentReport {
    pub(crate) fn new(name: &str, c: Complex64, inputs: serde_json::Value) -> Self {
        ExperimentReport {
            name: name.into(),
            c,
            inputs,
            measurements: Vec::new(),
            notes: Vec::new(),
            overall: Outcome::Pass,
            runtime_ms: 0,
        }
    }

    pub(crate) fn push(&mut self, m: Measurement) {
        self.measurements.push(m);
    }

    pub(crate) fn fail_with(&mut self, label: &str, cause: impl std::fmt::Display) {
        self.notes.push(format!("{label}: {cause}"));
        self.push(Measurement::check(label, false));
    }

    pub(crate) fn finish(mut self, started: Instant) -> Self {
        self.overall = self.measurements.iter().fold(Outcome::Pass, |acc, m| acc.combine(m.outcome));
        self.runtime_ms = started.elapsed().as_millis() as u64;
        self
    }

    pub fn measurement(&self, label: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.label == label)
    }

    pub fn passed(&self) -> bool {
        self.overall == Outcome::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub reports: Vec<ExperimentReport>,
    pub overall: Outcome,
    pub notes: Vec<String>,
}

/// Run every experiment with its default configuration.
pub fn verify_all() -> VerifyReport {
    let siegel = SiegelConfig::default();
    let reports = vec![
        exp_chebyshev_oracle(40, 4),
        exp_golden_siegel(&siegel),
        exp_preimage_cluster(&siegel),
    ];
    let overall = reports.iter().fold(Outcome::Pass, |acc, r| acc.combine(r.overall));
    VerifyReport { reports, overall, notes: vec![CREMER_NOTE.to_string()] }
}

/// Size the global worker pool from [`THREADS_ENV`] if it is set.
///
/// Has no effect once the pool exists or without the `parallel` feature.
pub fn configure_threads() -> Option<usize> {
    let n = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)?;
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Some(n)
}
