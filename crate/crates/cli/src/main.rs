use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::json;

use julia_rays::harness::{self, Outcome, RenderSpec, SiegelConfig, Window};
use julia_rays::raytrace::{self, TAIL_FRACTION};
use julia_rays::wakes::{self, RayPair, Tracer, WakeConfig};
use julia_rays::{Angle, ContinuedFraction, Error, QuadraticMap, TraceConfig};

#[derive(Parser)]
#[command(name = "julia-rays", version, about = "External rays and wakes of quadratic Julia sets")]
struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct MapArgs {
    /// Parameter as `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    c: Option<Complex64>,
    /// Rotation number θ of the fixed-point multiplier e^{2πiθ}.
    #[arg(long, allow_hyphen_values = true)]
    lambda_theta: Option<f64>,
    /// Rotation number as a continued fraction, e.g. `1;tail=const:1`.
    #[arg(long)]
    theta_cf: Option<ContinuedFraction>,
}

impl MapArgs {
    fn build(&self) -> julia_rays::Result<QuadraticMap> {
        if let Some(c) = self.c {
            QuadraticMap::from_c(c)
        } else if let Some(theta) = self.lambda_theta {
            QuadraticMap::from_multiplier(Complex64::from_polar(1.0, std::f64::consts::TAU * theta))
        } else {
            QuadraticMap::from_rotation(self.theta_cf.as_ref().expect("clap enforces one map flag"))
        }
    }
}

#[derive(Args, Clone)]
struct TraceArgs {
    /// Potential halvings below the outer level.
    #[arg(long, default_value_t = 40)]
    depth: usize,
    /// Grid levels per halving.
    #[arg(long, default_value_t = 4)]
    substeps: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol_conj: f64,
}

impl TraceArgs {
    fn config(&self) -> TraceConfig {
        TraceConfig { tol_conj: self.tol_conj, ..TraceConfig::with_depth(self.depth, self.substeps) }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Chebyshev,
    GoldenSiegel,
    PreimageCluster,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Constant type / Diophantine / Brjuno classification of θ.
    Classify {
        #[arg(long)]
        theta_cf: ContinuedFraction,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Certified dyadic value of the critical angle of θ.
    CritAngle {
        #[arg(long)]
        theta_cf: ContinuedFraction,
        /// Error bound, as a decimal (`1e-8`) or `p/q`.
        #[arg(long, default_value = "1e-8", value_parser = parse_rational)]
        err: BigRational,
    },
    /// Trace one external ray.
    Trace {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        angle: Angle,
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long, default_value_t = raytrace::EPS_LAND)]
        eps_land: f64,
    },
    /// Points on one equipotential.
    Equipotential {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        level: f64,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[command(flatten)]
        trace: TraceArgs,
    },
    /// Wake of a ray pair.
    Wake {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        angle: Angle,
        #[arg(long)]
        angle_prime: Angle,
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long, default_value_t = 1e-6)]
        pairing_tol: f64,
    },
    /// Search images of a wake for a pair separating α from 0.
    Separate {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        angle: Angle,
        #[arg(long)]
        angle_prime: Angle,
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long, default_value_t = 1e-6)]
        pairing_tol: f64,
    },
    /// Invariance check of the harmonic measure on random angles.
    Brolin {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        substeps: usize,
    },
    /// Render a PPM picture with optional overlays.
    Render {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        /// `re_min,re_max,im_min,im_max`.
        #[arg(long, allow_hyphen_values = true, default_value = "-2,2,-2,2", value_parser = parse_window)]
        window: Window,
        /// Ray angle to overlay; repeatable.
        #[arg(long = "ray")]
        rays: Vec<Angle>,
        /// Equipotential level to overlay; repeatable.
        #[arg(long = "level")]
        levels: Vec<f64>,
        /// Number of critical-orbit points to mark.
        #[arg(long, default_value_t = 0)]
        orbit: usize,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Also write the overlays as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        trace: TraceArgs,
    },
    /// Run an experiment and report pass or fail.
    Verify {
        #[arg(value_enum)]
        experiment: Experiment,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        substeps: Option<usize>,
    },
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    if parts.len() != n || parts.iter().any(|x| !x.is_finite()) {
        return Err(format!("expected {n} finite comma-separated numbers, got `{s}`"));
    }
    Ok(parts)
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let v = parse_floats(s, 2)?;
    Ok(Complex64::new(v[0], v[1]))
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v = parse_floats(s, 4)?;
    Window::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

/// Exact value of `p/q` or of a decimal such as `2.5e-8`.
fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("`{s}` is not a positive number");
    let value = if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        BigRational::new(p, q)
    } else {
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let exp = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        if exp >= 0 {
            BigRational::from_integer(digits * ten.pow(exp as u32))
        } else {
            BigRational::new(digits, ten.pow(exp.unsigned_abs()))
        }
    };
    if value <= BigRational::from_integer(0.into()) {
        return Err(bad());
    }
    Ok(value)
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Parse(_) => Failure::Usage(e.to_string()),
            other => Failure::Failed(other.to_string()),
        }
    }
}

enum Output {
    Json(serde_json::Value),
    Bytes(Vec<u8>),
}

fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("reports serialize")
}

fn run(command: Command) -> Result<(Output, bool), Failure> {
    let ok = |v| Ok((Output::Json(v), true));
    match command {
        Command::Classify { theta_cf, depth } => ok(to_json(&theta_cf.classify(depth)?)),
        Command::CritAngle { theta_cf, err } => {
            let t = theta_cf.critical_angle(&err)?;
            let bits = t.value.denom().bits() as usize;
            let digits: String = t.value.binary_digits(bits).iter().map(|d| char::from(b'0' + d)).collect();
            ok(json!({
                "theta": theta_cf.to_string(),
                "value": t.value,
                "value_f64": t.value.to_f64(),
                "binary": format!(".{digits}"),
                "error_bound": to_json(&t)["error_bound"],
                "error_bound_f64": t.error_bound.to_f64(),
            }))
        }
        Command::Trace { map, angle, trace, eps_land } => {
            let map = map.build()?;
            let trail = raytrace::trace_ray(&map, &angle, &trace.config())?;
            let landing = raytrace::landing_estimate(&trail, eps_land, TAIL_FRACTION).ok();
            ok(raytrace::trail_document(&trail, landing.as_ref()))
        }
        Command::Equipotential { map, level, points, trace } => {
            let map = map.build()?;
            let pts = raytrace::equipotential(&map, level, points, &trace.config())?;
            let pts: Vec<[f64; 2]> = pts.iter().map(|z| [z.re, z.im]).collect();
            ok(json!({ "c": [map.c.re, map.c.im], "level": level, "points": pts }))
        }
        Command::Wake { map, angle, angle_prime, trace, pairing_tol } => {
            let map = map.build()?;
            let tracer = Tracer { map: map.clone(), config: trace.config() };
            let cfg = WakeConfig { pairing_tol, ..Default::default() };
            let pair = RayPair::new(angle, angle_prime)?;
            let wake = wakes::wake_with_provider(&map, &pair, &tracer, &cfg)?;
            let mut doc = wakes::wake_document(&wake);
            doc["contains_critical"] = match wakes::contains_critical(&wake) {
                Ok(b) => json!(b),
                Err(Error::RootIsCritical) => json!("root-is-critical"),
                Err(e) => return Err(e.into()),
            };
            ok(doc)
        }
        Command::Separate { map, angle, angle_prime, trace, pairing_tol } => {
            let map = map.build()?;
            let tracer = Tracer { map: map.clone(), config: trace.config() };
            let cfg = WakeConfig { pairing_tol, ..Default::default() };
            let pair = RayPair::new(angle, angle_prime)?;
            let report = wakes::separation_search(&map, &pair, &tracer, &cfg);
            let found = matches!(report.outcome, wakes::SeparationOutcome::Found { .. });
            Ok((Output::Json(to_json(&report)), found))
        }
        Command::Brolin { map, n, seed, depth, substeps } => {
            let map = map.build()?;
            let sample = harness::brolin_sample(&map, n, seed, depth, substeps)?;
            let mut doc = to_json(&sample);
            doc["decided"] = json!(sample.decided().count());
            doc["fraction_below_1e-6"] = json!(sample.fraction_below(1e-6));
            ok(doc)
        }
        Command::Render { map, width, height, window, rays, levels, orbit, max_iter, svg, trace } => {
            let map = map.build()?;
            let spec = RenderSpec {
                rays,
                equipotentials: levels,
                critical_orbit: orbit,
                trace: trace.config(),
                max_iter,
                ..RenderSpec::new(width, height, window)
            };
            let out = harness::render(&map, &spec)?;
            if let Some(path) = svg {
                std::fs::write(&path, harness::to_svg(&spec, &out))
                    .map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))?;
            }
            Ok((Output::Bytes(out.image.to_ppm()), true))
        }
        Command::Verify { experiment, depth, substeps } => {
            let siegel = SiegelConfig {
                depth: depth.unwrap_or(SiegelConfig::default().depth),
                substeps: substeps.unwrap_or(SiegelConfig::default().substeps),
                ..Default::default()
            };
            let chebyshev = || harness::exp_chebyshev_oracle(depth.unwrap_or(40), substeps.unwrap_or(4));
            let (doc, outcome) = match experiment {
                Experiment::Chebyshev => {
                    let r = chebyshev();
                    (to_json(&r), r.overall)
                }
                Experiment::GoldenSiegel => {
                    let r = harness::exp_golden_siegel(&siegel);
                    (to_json(&r), r.overall)
                }
                Experiment::PreimageCluster => {
                    let r = harness::exp_preimage_cluster(&siegel);
                    (to_json(&r), r.overall)
                }
                Experiment::All if depth.is_none() && substeps.is_none() => {
                    let r = harness::verify_all();
                    (to_json(&r), r.overall)
                }
                Experiment::All => {
                    let reports =
                        vec![chebyshev(), harness::exp_golden_siegel(&siegel), harness::exp_preimage_cluster(&siegel)];
                    let overall = reports.iter().fold(Outcome::Pass, |acc, r| acc.combine(r.overall));
                    let r = harness::VerifyReport { reports, overall, notes: vec![harness::CREMER_NOTE.into()] };
                    (to_json(&r), r.overall)
                }
            };
            Ok((Output::Json(doc), outcome == Outcome::Pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    harness::configure_threads();
    let (output, success) = match run(cli.command) {
        Ok(result) => result,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let bytes = match output {
        Output::Json(v) => serde_json::to_string_pretty(&v).expect("json") + "\n",
        Output::Bytes(b) => {
            return finish(cli.out, &b, success);
        }
    };
    finish(cli.out, bytes.as_bytes(), success)
}

fn finish(out: Option<PathBuf>, bytes: &[u8], success: bool) -> ExitCode {
    let written = match &out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(bytes).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1e-8").unwrap(), BigRational::new(1.into(), 100_000_000.into()));
        assert_eq!(parse_rational("2.5e-1").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("3/9").unwrap(), BigRational::new(1.into(), 3.into()));
        assert_eq!(parse_rational("12").unwrap(), BigRational::from_integer(12.into()));
        assert!(parse_rational("0").is_err());
        assert!(parse_rational("-1e-3").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn complex_and_window() {
        assert_eq!(parse_complex("-2,0").unwrap(), Complex64::new(-2.0, 0.0));
        assert!(parse_complex("1").is_err());
        assert!(parse_complex("1,nan").is_err());
        assert!(parse_window("-2,2,-1.5,1.5").is_ok());
        assert!(parse_window("2,-2,0,1").is_err());
    }
}
