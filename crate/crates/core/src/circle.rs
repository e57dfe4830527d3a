//! Exact arithmetic on the circle ℝ/ℤ of external angles.
//!
//! Angles are reduced rationals in `[0, 1)`. Doubling, the involution
//! `t ↦ t + 1/2` and arc lengths are all exact; nothing here touches floating
//! point except [`Angle::to_f64`].

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of ℝ/ℤ, stored as a reduced fraction in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(BigRational);

/// Direction of travel around the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Ccw,
    Cw,
}

fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

impl Angle {
    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    pub fn half() -> Self {
        Angle(BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// `num/den` reduced mod 1. Fails on a zero denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidInput("angle denominator is zero".into()));
        }
        Ok(Self::from_rational(&BigRational::new(num.into(), den)))
    }

    /// Any rational, reduced mod 1.
    pub fn from_rational(r: &BigRational) -> Self {
        Angle(frac(r))
    }

    /// The dyadic angle `k / 2^64`.
    pub fn from_u64_dyadic(k: u64) -> Self {
        Angle(BigRational::new(BigInt::from(k), BigInt::one() << 64))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Nearest `f64`, in `[0, 1]` (rounding may reach 1 for angles within 2^-54 of 1).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// `2t mod 1`.
    pub fn double(&self) -> Angle {
        Angle(frac(&(&self.0 * BigInt::from(2))))
    }

    /// `t + 1/2 mod 1`, the angle of the ray symmetric under `z ↦ −z`.
    pub fn tau(&self) -> Angle {
        Angle(frac(&(&self.0 + Angle::half().0)))
    }

    /// The two doubling preimages `(t/2, t/2 + 1/2)`.
    pub fn halve(&self) -> (Angle, Angle) {
        let low = Angle(&self.0 / BigInt::from(2));
        let high = low.tau();
        (low, high)
    }

    /// `t + s mod 1`.
    pub fn add(&self, other: &Angle) -> Angle {
        Angle(frac(&(&self.0 + &other.0)))
    }

    /// The first `k` binary digits of `t`.
    pub fn binary_digits(&self, k: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(k);
        let mut x = self.clone();
        for _ in 0..k {
            let twice = &x.0 * BigInt::from(2);
            out.push(if twice >= BigRational::one() { 1 } else { 0 });
            x = Angle(frac(&twice));
        }
        out
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// `p/q`, an integer, or a binary expansion `.b1b2...bk`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(bits) = s.strip_prefix('.') {
            if bits.is_empty() {
                return Err(Error::Parse("empty binary expansion".into()));
            }
            let mut num = BigInt::zero();
            for ch in bits.chars() {
                num <<= 1;
                match ch {
                    '0' => {}
                    '1' => num += 1,
                    _ => return Err(Error::Parse(format!("bad binary digit {ch:?} in {s:?}"))),
                }
            }
            return Angle::new(num, BigInt::one() << bits.len());
        }
        let parse_int = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad integer {t:?} in angle {s:?}")))
        };
        match s.split_once('/') {
            Some((p, q)) => Angle::new(parse_int(p)?, parse_int(q)?),
            None => Angle::new(parse_int(s)?, 1),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AngleRepr {
    num: String,
    den: String,
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AngleRepr { num: self.numer().to_string(), den: self.denom().to_string() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = AngleRepr::deserialize(deserializer)?;
        let num: BigInt = repr.num.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = repr.den.parse().map_err(serde::de::Error::custom)?;
        Angle::new(num, den).map_err(serde::de::Error::custom)
    }
}

/// Serialize an exact non-angle rational (e.g. a wake angle, which may equal 1)
/// in the same `{"num", "den"}` shape as [`Angle`].
pub fn serialize_rational<S: Serializer>(
    r: &BigRational,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    AngleRepr { num: r.numer().to_string(), den: r.denom().to_string() }.serialize(serializer)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSummary {
    pub preperiod: usize,
    /// 0 when no repetition was seen within the horizon.
    pub period: usize,
    pub orbit: Vec<Angle>,
}

/// Iterate doubling up to `horizon` steps, detecting preperiod and period
/// by exact-value lookup.
pub fn orbit(t: &Angle, horizon: usize) -> OrbitSummary {
    let mut seen: HashMap<Angle, usize> = HashMap::new();
    let mut orbit = Vec::new();
    let mut x = t.clone();
    for step in 0..=horizon {
        if let Some(&first) = seen.get(&x) {
            return OrbitSummary { preperiod: first, period: step - first, orbit };
        }
        seen.insert(x.clone(), step);
        orbit.push(x.clone());
        x = x.double();
    }
    OrbitSummary { preperiod: 0, period: 0, orbit }
}

/// Exact length of the arc from `from` to `to` in the given direction.
/// The counterclockwise arc of a point to itself has length 0, the clockwise one 1.
pub fn arc_measure(from: &Angle, to: &Angle, direction: Orientation) -> BigRational {
    if from == to {
        return match direction {
            Orientation::Ccw => BigRational::zero(),
            Orientation::Cw => BigRational::one(),
        };
    }
    match direction {
        Orientation::Ccw => frac(&(&to.0 - &from.0)),
        Orientation::Cw => frac(&(&from.0 - &to.0)),
    }
}

/// Whether `x` lies strictly inside the counterclockwise arc from `from` to `to`.
pub fn angle_in_arc(x: &Angle, from: &Angle, to: &Angle) -> bool {
    if x == from || x == to {
        return false;
    }
    let offset = frac(&(&x.0 - &from.0));
    let length = arc_measure(from, to, Orientation::Ccw);
    offset.is_positive() && offset < length
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(a("1/3").double(), a("2/3"));
        assert_eq!(a("2/3").double(), a("1/3"));
        assert_eq!(a("19/64").double(), a("19/32"));
    }

    #[test]
    fn tau_examples() {
        assert_eq!(Angle::zero().tau(), a("1/2"));
        assert_eq!(a("5/7").tau().tau(), a("5/7"));
        assert_eq!(a("1/9").tau().double(), a("1/9").double());
    }

    #[test]
    fn halve_examples() {
        assert_eq!(Angle::zero().halve(), (Angle::zero(), a("1/2")));
        assert_eq!(a("1/3").halve(), (a("1/6"), a("2/3")));
        assert_eq!(a("19/64").halve(), (a("19/128"), a("83/128")));
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&a("1/7"), 10);
        assert_eq!((o.preperiod, o.period), (0, 3));
        assert_eq!(o.orbit, vec![a("1/7"), a("2/7"), a("4/7")]);

        let o = orbit(&a("1/6"), 10);
        assert_eq!((o.preperiod, o.period), (1, 2));
        assert_eq!(o.orbit, vec![a("1/6"), a("1/3"), a("2/3")]);

        let o = orbit(&a("1/2"), 10);
        assert_eq!((o.preperiod, o.period), (1, 1));
    }

    #[test]
    fn orbit_horizon_too_short() {
        let o = orbit(&a("1/31"), 2);
        assert_eq!(o.period, 0);
        assert_eq!(o.orbit.len(), 3);
    }

    #[test]
    fn arc_examples() {
        assert_eq!(arc_measure(&a("1/9"), &a("8/9"), Orientation::Ccw), r(7, 9));
        assert_eq!(arc_measure(&a("1/9"), &a("8/9"), Orientation::Cw), r(2, 9));
        assert_eq!(arc_measure(&a("4/9"), &a("5/9"), Orientation::Ccw), r(1, 9));
        assert_eq!(arc_measure(&a("1/5"), &a("1/5"), Orientation::Ccw), r(0, 1));
        assert_eq!(arc_measure(&a("1/5"), &a("1/5"), Orientation::Cw), r(1, 1));
    }

    #[test]
    fn in_arc_examples() {
        assert!(angle_in_arc(&Angle::zero(), &a("8/9"), &a("1/9")));
        assert!(!angle_in_arc(&a("1/2"), &a("8/9"), &a("1/9")));
        assert!(!angle_in_arc(&a("8/9"), &a("8/9"), &a("1/9")));
    }

    #[test]
    fn parse_formats() {
        assert_eq!(a(".0101"), a("5/16"));
        assert_eq!(a("3/2"), a("1/2"));
        assert_eq!(a("-1/3"), a("2/3"));
        assert_eq!(a("0"), Angle::zero());
        assert!("1/0".parse::<Angle>().is_err());
        assert!(".012".parse::<Angle>().is_err());
        assert!("x/3".parse::<Angle>().is_err());
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_string(&a("19/64")).unwrap();
        assert_eq!(json, r#"{"num":"19","den":"64"}"#);
        let back: Angle = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a("19/64"));
    }

    #[test]
    fn binary_digits_of_dyadic() {
        assert_eq!(a("19/64").binary_digits(6), vec![0, 1, 0, 0, 1, 1]);
    }

    fn multiplicative_order_of_two(d: u64) -> usize {
        let mut x = 2 % d;
        let mut k = 1;
        while x != 1 {
            x = x * 2 % d;
            k += 1;
        }
        k
    }

    #[test]
    fn odd_denominator_period_is_order_of_two() {
        for d in (3..2000u64).step_by(2) {
            let o = orbit(&Angle::new(1, d).unwrap(), 4000);
            assert_eq!(o.preperiod, 0, "d = {d}");
            assert_eq!(o.period, multiplicative_order_of_two(d), "d = {d}");
        }
    }

    #[test]
    fn order_of_two_at_large_odd_denominators() {
        for d in [99_991u64, 65_537, 100_000 - 1] {
            let o = orbit(&Angle::new(1, d).unwrap(), 200_000);
            assert_eq!(o.period, multiplicative_order_of_two(d), "d = {d}");
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn angle() -> impl Strategy<Value = Angle> {
            (0i64..10_000, 1i64..10_000).prop_map(|(p, q)| Angle::new(p, q).unwrap())
        }

        proptest! {
            #[test]
            fn double_ignores_tau(t in angle()) {
                prop_assert_eq!(t.tau().double(), t.double());
                prop_assert_eq!(t.tau().tau(), t.clone());
            }

            #[test]
            fn halves_are_the_preimages(t in angle()) {
                let (lo, hi) = t.halve();
                prop_assert_eq!(lo.double(), t.clone());
                prop_assert_eq!(hi.double(), t.clone());
                prop_assert_eq!(lo.tau(), hi);
                prop_assert!(lo.as_rational() < Angle::half().as_rational());
            }

            #[test]
            fn opposite_arcs_sum_to_one(s in angle(), t in angle()) {
                prop_assume!(s != t);
                let total = arc_measure(&s, &t, Orientation::Ccw) + arc_measure(&t, &s, Orientation::Ccw);
                prop_assert_eq!(total, BigRational::one());
                let both = arc_measure(&s, &t, Orientation::Ccw) + arc_measure(&s, &t, Orientation::Cw);
                prop_assert_eq!(both, BigRational::one());
            }

            #[test]
            fn every_rational_orbit_closes(p in 0i64..500, q in 1i64..500) {
                let t = Angle::new(p, q).unwrap();
                let o = orbit(&t, 2000);
                prop_assert!(o.period > 0);
                for w in o.orbit.windows(2) {
                    prop_assert_eq!(w[0].double(), w[1].clone());
                }
            }
        }
    }
}
