//! The quadratic family `f(z) = z² + c`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rotnum::ContinuedFraction;

/// Tolerance on `|λ| = 1` for maps built from a multiplier.
pub const MULTIPLIER_TOL: f64 = 1e-12;
/// Default iteration budget for escape tests.
pub const STEP_BUDGET: usize = 10_000;

/// How a map was constructed.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSource {
    FromC,
    FromMultiplier,
    /// Built from `λ = e^{2πiθ}`; `theta` is the continued-fraction text.
    FromRotation { theta: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticMap {
    pub c: Complex64,
    /// The fixed point further to the left.
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Multiplier `2α` of the α fixed point.
    pub lambda: Complex64,
    pub precision_bits: u32,
    pub source: MapSource,
}

/// Result of [`QuadraticMap::iterate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Iterate {
    Finite(Complex64),
    /// The orbit overflowed at this step.
    Infinity { step: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EscapeResult {
    pub escaped: bool,
    pub steps: usize,
    pub green_estimate: f64,
    pub error_bound: f64,
}

/// `c = λ(2 − λ)/4`, with no check on `λ`.
pub fn c_from_multiplier(lambda: Complex64) -> Complex64 {
    lambda * (Complex64::new(2.0, 0.0) - lambda) / 4.0
}

/// Both roots of `z² − z + c = 0`, with no ordering convention.
pub fn fixed_points_unordered(c: Complex64) -> (Complex64, Complex64) {
    let s = (Complex64::new(1.0, 0.0) - 4.0 * c).sqrt();
    ((1.0 - s) / 2.0, (1.0 + s) / 2.0)
}

fn on_excluded_ray(c: Complex64) -> bool {
    c.im == 0.0 && c.re >= 0.25
}

/// The fixed points `(α, β)` with α the one further to the left.
pub fn fixed_points(c: Complex64) -> Result<(Complex64, Complex64)> {
    if on_excluded_ray(c) {
        return Err(Error::ConventionUndefined { re: c.re, im: c.im });
    }
    let (u, v) = fixed_points_unordered(c);
    Ok(if u.re <= v.re { (u, v) } else { (v, u) })
}

fn check_precision(bits: u32) -> Result<()> {
    if bits != 53 {
        return Err(Error::InvalidInput(format!(
            "only 53-bit (double) precision is implemented, {bits} requested"
        )));
    }
    Ok(())
}

impl QuadraticMap {
    pub fn from_c(c: Complex64) -> Result<Self> {
        Self::from_c_with_precision(c, 53)
    }

    pub fn from_c_with_precision(c: Complex64, precision_bits: u32) -> Result<Self> {
        check_precision(precision_bits)?;
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidInput("c must be finite".into()));
        }
        let (alpha, beta) = fixed_points(c)?;
        Ok(QuadraticMap { c, alpha, beta, lambda: 2.0 * alpha, precision_bits, source: MapSource::FromC })
    }

    /// The map whose α fixed point has multiplier `λ`, `|λ| = 1`.
    pub fn from_multiplier(lambda: Complex64) -> Result<Self> {
        if (lambda.norm() - 1.0).abs() > MULTIPLIER_TOL {
            return Err(Error::InvalidInput(format!(
                "multiplier {lambda} is not on the unit circle (|λ| = {})",
                lambda.norm()
            )));
        }
        let alpha = lambda / 2.0;
        Ok(QuadraticMap {
            c: c_from_multiplier(lambda),
            alpha,
            beta: Complex64::new(1.0, 0.0) - alpha,
            lambda,
            precision_bits: 53,
            source: MapSource::FromMultiplier,
        })
    }

    /// The map with `λ = e^{2πiθ}`.
    pub fn from_rotation(theta: &ContinuedFraction) -> Result<Self> {
        let t = theta.to_f64()?;
        let lambda = Complex64::from_polar(1.0, std::f64::consts::TAU * t);
        let mut map = Self::from_multiplier(lambda)?;
        map.source = MapSource::FromRotation { theta: theta.to_string() };
        Ok(map)
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        z * z + self.c
    }

    /// `max(4, |c| + 2)`; beyond it orbits grow monotonically.
    pub fn escape_radius(&self) -> f64 {
        (self.c.norm() + 2.0).max(4.0)
    }

    /// `f^{∘n}(z)`, reporting overflow instead of producing NaN.
    pub fn iterate(&self, z: Complex64, n: usize) -> Iterate {
        let mut w = z;
        for step in 1..=n {
            w = self.apply(w);
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Iterate::Infinity { step };
            }
        }
        Iterate::Finite(w)
    }

    /// Green's function `G(z) = lim 2^{-n} log|f^{∘n}(z)|` to within `tol`.
    pub fn green(&self, z: Complex64, tol: f64) -> EscapeResult {
        self.green_with_budget(z, tol, STEP_BUDGET)
    }

    pub fn green_with_budget(&self, z: Complex64, tol: f64, budget: usize) -> EscapeResult {
        let radius = self.escape_radius();
        let c_abs = self.c.norm();
        let mut w = z;
        let mut scale = 1.0f64;
        let mut n = 0usize;
        while w.norm() < radius {
            if n >= budget {
                return EscapeResult { escaped: false, steps: n, green_estimate: 0.0, error_bound: 0.0 };
            }
            w = self.apply(w);
            scale *= 0.5;
            n += 1;
        }
        // |G(w) − log|w|| ≤ −log(1 − |c|/|w|²); keep squaring until scaled bound ≤ tol
        loop {
            let r = w.norm();
            let x = c_abs / (r * r);
            let bound = scale * -(-x).ln_1p();
            let next = self.apply(w);
            let next_ok = next.norm().is_finite() && next.norm() < 1e150;
            if bound <= tol || !next_ok {
                return EscapeResult {
                    escaped: true,
                    steps: n,
                    green_estimate: scale * r.ln(),
                    error_bound: bound,
                };
            }
            w = next;
            scale *= 0.5;
            n += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn multiplier_one_gives_cusp() {
        let m = QuadraticMap::from_multiplier(cx(1.0, 0.0)).unwrap();
        assert_eq!(m.c, cx(0.25, 0.0));
    }

    #[test]
    fn multiplier_formula_at_zero() {
        assert_eq!(c_from_multiplier(cx(0.0, 0.0)), cx(0.0, 0.0));
        assert!(QuadraticMap::from_multiplier(cx(0.0, 0.0)).is_err());
        assert!(QuadraticMap::from_multiplier(cx(1.0 + 1e-9, 0.0)).is_err());
    }

    #[test]
    fn golden_c() {
        let th = (5f64.sqrt() - 1.0) / 2.0;
        let m = QuadraticMap::from_multiplier(Complex64::from_polar(1.0, TAU * th)).unwrap();
        assert!((m.c - cx(-0.390541, -0.586788)).norm() < 1e-6);
        let r = QuadraticMap::from_rotation(&ContinuedFraction::golden_mean()).unwrap();
        assert!((r.c - m.c).norm() < 1e-15);
    }

    #[test]
    fn chebyshev_fixed_points() {
        let (a, b) = fixed_points(cx(-2.0, 0.0)).unwrap();
        assert_eq!((a, b), (cx(-1.0, 0.0), cx(2.0, 0.0)));
        let (a, b) = fixed_points(cx(0.0, 0.0)).unwrap();
        assert_eq!((a, b), (cx(0.0, 0.0), cx(1.0, 0.0)));
    }

    #[test]
    fn convention_undefined_on_ray() {
        assert!(matches!(fixed_points(cx(0.5, 0.0)), Err(Error::ConventionUndefined { .. })));
        assert!(matches!(QuadraticMap::from_c(cx(0.25, 0.0)), Err(Error::ConventionUndefined { .. })));
        let (u, v) = fixed_points_unordered(cx(0.5, 0.0));
        assert!((u * u + 0.5 - u).norm() < 1e-15 && (v * v + 0.5 - v).norm() < 1e-15);
    }

    #[test]
    fn only_double_precision() {
        assert!(QuadraticMap::from_c_with_precision(cx(0.0, 0.0), 128).is_err());
    }

    #[test]
    fn iterate_examples() {
        let cheb = QuadraticMap::from_c(cx(-2.0, 0.0)).unwrap();
        assert_eq!(cheb.iterate(cx(2.0, 0.0), 17), Iterate::Finite(cx(2.0, 0.0)));
        let zero = QuadraticMap::from_c(cx(0.0, 0.0)).unwrap();
        assert_eq!(zero.iterate(cx(2.0, 0.0), 3), Iterate::Finite(cx(256.0, 0.0)));
        let basilica = QuadraticMap::from_c(cx(-1.0, 0.0)).unwrap();
        assert_eq!(basilica.iterate(cx(0.0, 0.0), 2), Iterate::Finite(cx(0.0, 0.0)));
        assert!(matches!(zero.iterate(cx(2.0, 0.0), 20), Iterate::Infinity { .. }));
    }

    #[test]
    fn green_examples() {
        let zero = QuadraticMap::from_c(cx(0.0, 0.0)).unwrap();
        let g = zero.green(cx(1f64.exp().powi(2), 0.0), 1e-12);
        assert!(g.escaped);
        assert_eq!(g.error_bound, 0.0);
        assert!((g.green_estimate - 2.0).abs() < 1e-15);

        let cheb = QuadraticMap::from_c(cx(-2.0, 0.0)).unwrap();
        let g = cheb.green(cx(-1.0, 0.0), 1e-12);
        assert!(!g.escaped);
        assert_eq!(g.green_estimate, 0.0);

        let tol = 1e-10;
        let z = cx(3.0, 0.0);
        let g1 = cheb.green(z, tol);
        let g2 = cheb.green(cheb.apply(z), tol);
        assert!(g1.escaped && g1.green_estimate > 0.0);
        assert!((g2.green_estimate - 2.0 * g1.green_estimate).abs() <= 2.0 * tol + 1e-14);
        // closed form for c = −2: G = log|w| with z = w + 1/w
        let w = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((g1.green_estimate - w.ln()).abs() <= tol + 1e-14);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn disk_point() -> impl Strategy<Value = Complex64> {
            (0.0f64..2.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]
            #[test]
            fn fixed_point_relations(c in disk_point()) {
                prop_assume!(!(c.im.abs() < 1e-9 && c.re >= 0.2));
                let m = QuadraticMap::from_c(c).unwrap();
                let scale = 1.0 + c.norm();
                prop_assert!((m.alpha + m.beta - 1.0).norm() <= 1e-12 * scale);
                prop_assert!((m.alpha * m.beta - c).norm() <= 1e-12 * scale);
                prop_assert!(m.alpha.re <= m.beta.re);
                prop_assert!(m.lambda.norm() <= (2.0 - m.lambda).norm() + 1e-12);
                prop_assert!((2.0 - m.lambda - 2.0 * m.beta).norm() <= 1e-12 * scale);
            }
        }

        proptest! {
            #[test]
            fn multiplier_round_trip(a in 0.01f64..(std::f64::consts::TAU - 0.01)) {
                let lambda = Complex64::from_polar(1.0, a);
                let m = QuadraticMap::from_multiplier(lambda).unwrap();
                let (alpha, _) = fixed_points(m.c).unwrap();
                prop_assert!((2.0 * alpha - lambda).norm() <= 1e-12);
                prop_assert!((c_from_multiplier(2.0 * m.alpha) - m.c).norm() <= 1e-15);
            }

            #[test]
            fn even_symmetry(z in disk_point(), c in disk_point()) {
                prop_assume!(!(c.im == 0.0 && c.re >= 0.25));
                let m = QuadraticMap::from_c(c).unwrap();
                prop_assert_eq!(m.apply(z), m.apply(-z));
            }

            #[test]
            fn green_functional_equation(z in (2.5f64..8.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a)), c in disk_point()) {
                prop_assume!(!(c.im == 0.0 && c.re >= 0.25));
                let m = QuadraticMap::from_c(c).unwrap();
                let tol = 1e-10;
                let g1 = m.green(z, tol);
                let g2 = m.green(m.apply(z), tol);
                if g1.escaped {
                    prop_assert!(g2.escaped);
                    prop_assert!((g2.green_estimate - 2.0 * g1.green_estimate).abs() <= 2.0 * tol + 1e-12);
                }
            }
        }
    }
}
