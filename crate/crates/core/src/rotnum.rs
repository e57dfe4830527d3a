//! Continued-fraction arithmetic for rotation numbers.
//!
//! A rotation number `θ = [0; a_1, a_2, ...]` is given by a finite list of
//! partial quotients plus an [`Extension`] that says what comes after it:
//! nothing known (`Prefix`), nothing at all (`Exact`, θ is rational), or a
//! [`TailRule`] generating further quotients on demand. Convergents `p_n/q_n`
//! are computed lazily into a cache shared by all readers.

use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::circle::Angle;
use crate::error::{Error, Result};

/// Quotients larger than this many bits are refused; rules such as
/// `a[n+1] = 3^q[n]` leave the computable range after a handful of terms.
const MAX_COEFF_BITS: u64 = 1 << 22;

/// Generator for the partial quotients after the explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailRule {
    /// `a_n = k`.
    Constant(u64),
    /// `a_n = Σ c_k n^k` (coefficients listed from the constant term up).
    Polynomial(Vec<u64>),
    /// `a_{n+1} = q_n^k`.
    QPower(u32),
    /// `a_{n+1} = q_n^n`.
    QPowerIndex,
    /// `a_{n+1} = b^{q_n}`.
    ExpBase(u64),
}

impl TailRule {
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(msg.to_string()));
        match self {
            TailRule::Constant(0) => bad("constant tail must be ≥ 1"),
            TailRule::Polynomial(cs) if cs.iter().all(|&c| c == 0) => {
                bad("polynomial tail must be ≥ 1 for n ≥ 1")
            }
            TailRule::QPower(0) => bad("q-power tail exponent must be ≥ 1"),
            TailRule::ExpBase(b) if *b < 2 => bad("exponential tail base must be ≥ 2"),
            _ => Ok(()),
        }
    }

    /// Degree of a polynomial rule after dropping zero leading coefficients.
    fn degree(cs: &[u64]) -> usize {
        cs.iter().rposition(|&c| c != 0).unwrap_or(0)
    }
}

impl fmt::Display for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Constant(k) => write!(f, "const:{k}"),
            TailRule::Polynomial(cs) => {
                let list: Vec<String> = cs.iter().map(u64::to_string).collect();
                write!(f, "poly:{}", list.join(","))
            }
            TailRule::QPower(1) => write!(f, "rule:a[n+1]=q[n]"),
            TailRule::QPower(k) => write!(f, "rule:a[n+1]=q[n]^{k}"),
            TailRule::QPowerIndex => write!(f, "rule:a[n+1]=q[n]^n"),
            TailRule::ExpBase(b) => write!(f, "rule:a[n+1]={b}^q[n]"),
        }
    }
}

impl FromStr for TailRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::Parse(format!("unrecognised tail rule {s:?}"));
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| err());
        let rule = if let Some(k) = s.strip_prefix("const:") {
            TailRule::Constant(num(k)?)
        } else if let Some(cs) = s.strip_prefix("poly:") {
            TailRule::Polynomial(cs.split(',').map(num).collect::<Result<_>>()?)
        } else if let Some(body) = s.strip_prefix("rule:") {
            let rhs = body.replace(' ', "");
            let rhs = rhs.strip_prefix("a[n+1]=").ok_or_else(err)?;
            if rhs == "q[n]" {
                TailRule::QPower(1)
            } else if rhs == "q[n]^n" {
                TailRule::QPowerIndex
            } else if let Some(k) = rhs.strip_prefix("q[n]^") {
                TailRule::QPower(k.parse().map_err(|_| err())?)
            } else if let Some(b) = rhs.strip_suffix("^q[n]") {
                TailRule::ExpBase(num(b)?)
            } else {
                return Err(err());
            }
        } else {
            return Err(err());
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// What follows the explicit quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    /// Unknown continuation: θ is only known to start with these quotients.
    Prefix,
    /// The list is the complete expansion of a rational θ.
    Exact,
    Tail(TailRule),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub a: BigUint,
    pub p: BigUint,
    pub q: BigUint,
}

/// A rotation number as a partial-quotient stream with cached convergents.
#[derive(Debug)]
pub struct ContinuedFraction {
    coefficients: Vec<u64>,
    extension: Extension,
    cache: RwLock<Vec<Convergent>>,
}

impl Clone for ContinuedFraction {
    fn clone(&self) -> Self {
        ContinuedFraction {
            coefficients: self.coefficients.clone(),
            extension: self.extension.clone(),
            cache: RwLock::new(self.read_cache().clone()),
        }
    }
}

/// An exact rational `value` with a rigorous enclosure radius, mod 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AngleApproximation {
    pub value: Angle,
    #[serde(serialize_with = "crate::circle::serialize_rational")]
    pub error_bound: BigRational,
}

impl AngleApproximation {
    pub fn exact(value: Angle) -> Self {
        AngleApproximation { value, error_bound: BigRational::zero() }
    }

    /// The approximation of `2t`; the error doubles.
    pub fn double(&self) -> Self {
        AngleApproximation {
            value: self.value.double(),
            error_bound: &self.error_bound * BigInt::from(2),
        }
    }

    pub fn tau(&self) -> Self {
        AngleApproximation { value: self.value.tau(), error_bound: self.error_bound.clone() }
    }

    /// Both doubling preimages; the error halves.
    pub fn halve(&self) -> (Self, Self) {
        let (lo, hi) = self.value.halve();
        let eb = &self.error_bound / BigInt::from(2);
        (
            AngleApproximation { value: lo, error_bound: eb.clone() },
            AngleApproximation { value: hi, error_bound: eb },
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

/// Membership in the constant-type ⊂ Diophantine ⊂ Brjuno chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub constant_type: Tri,
    pub diophantine: Tri,
    pub brjuno: Tri,
    pub witness: String,
    pub depth_used: usize,
}

impl ClassificationReport {
    /// True when no class is asserted while a smaller class it contains is denied.
    pub fn respects_inclusions(&self) -> bool {
        let implies = |small: Tri, big: Tri| small != Tri::True || big == Tri::True;
        implies(self.constant_type, self.diophantine) && implies(self.diophantine, self.brjuno)
    }
}

impl ContinuedFraction {
    /// Build from partial quotients `a_1..a_N` and an extension.
    pub fn new(coefficients: Vec<u64>, extension: Extension) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput("continued fraction needs at least one quotient".into()));
        }
        if let Some(pos) = coefficients.iter().position(|&a| a == 0) {
            return Err(Error::InvalidInput(format!("partial quotient a_{} is zero", pos + 1)));
        }
        if let Extension::Tail(rule) = &extension {
            rule.validate()?;
        }
        Ok(ContinuedFraction { coefficients, extension, cache: RwLock::new(Vec::new()) })
    }

    /// Build from quotients and an optional tail rule; no rule means [`Extension::Prefix`].
    pub fn from_coeffs(coefficients: Vec<u64>, tail: Option<TailRule>) -> Result<Self> {
        let ext = tail.map_or(Extension::Prefix, Extension::Tail);
        Self::new(coefficients, ext)
    }

    /// The golden mean `(√5 − 1)/2 = [0; 1, 1, 1, ...]`.
    pub fn golden_mean() -> Self {
        Self::new(vec![1], Extension::Tail(TailRule::Constant(1))).expect("valid")
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn extension(&self) -> &Extension {
        &self.extension
    }

    pub fn is_irrational(&self) -> bool {
        matches!(self.extension, Extension::Tail(_))
    }

    /// Number of quotients that exist, `None` when unbounded.
    pub fn known_depth(&self) -> Option<usize> {
        match self.extension {
            Extension::Tail(_) => None,
            _ => Some(self.coefficients.len()),
        }
    }

    fn read_cache(&self) -> std::sync::RwLockReadGuard<'_, Vec<Convergent>> {
        self.cache.read().unwrap_or_else(|e| e.into_inner())
    }

    fn next_coefficient(&self, n: usize, computed: &[Convergent]) -> Result<BigUint> {
        if n <= self.coefficients.len() {
            return Ok(BigUint::from(self.coefficients[n - 1]));
        }
        let unreachable = |why: String| Err(Error::PrecisionUnreachable(why));
        let rule = match &self.extension {
            Extension::Tail(rule) => rule,
            _ => {
                return unreachable(format!(
                    "continued fraction has only {} known quotients, a_{n} requested",
                    self.coefficients.len()
                ))
            }
        };
        let prev_q = || computed[n - 2].q.clone();
        let too_big = |bits: u64| -> Result<()> {
            if bits > MAX_COEFF_BITS {
                Err(Error::PrecisionUnreachable(format!(
                    "a_{n} from rule {rule} would need about {bits} bits"
                )))
            } else {
                Ok(())
            }
        };
        let a = match rule {
            TailRule::Constant(k) => BigUint::from(*k),
            TailRule::Polynomial(cs) => {
                let x = BigUint::from(n);
                cs.iter().rev().fold(BigUint::zero(), |acc, &c| acc * &x + BigUint::from(c))
            }
            TailRule::QPower(k) => {
                let q = prev_q();
                too_big(q.bits() * u64::from(*k))?;
                q.pow(*k)
            }
            TailRule::QPowerIndex => {
                let q = prev_q();
                let e = (n - 1) as u64;
                too_big(q.bits().saturating_mul(e))?;
                q.pow(e as u32)
            }
            TailRule::ExpBase(b) => {
                let q = prev_q();
                let exp = q.to_u64().filter(|&e| e <= MAX_COEFF_BITS);
                let Some(exp) = exp else {
                    return unreachable(format!("a_{n} = {b}^q_{} is astronomically large", n - 1));
                };
                let bits_per = 64 - b.leading_zeros() as u64;
                too_big(exp.saturating_mul(bits_per))?;
                BigUint::from(*b).pow(exp as u32)
            }
        };
        if a.is_zero() {
            return Err(Error::InvalidInput(format!("tail rule produced a_{n} = 0")));
        }
        Ok(a)
    }

    /// Convergent `p_n/q_n`, `n ≥ 1`.
    pub fn convergent(&self, n: usize) -> Result<Convergent> {
        if n == 0 {
            return Err(Error::InvalidInput("convergents are indexed from 1".into()));
        }
        if let Some(c) = self.read_cache().get(n - 1) {
            return Ok(c.clone());
        }
        let mut cache = self.cache.write().unwrap_or_else(|e| e.into_inner());
        while cache.len() < n {
            let k = cache.len() + 1;
            let a = self.next_coefficient(k, &cache)?;
            // seeds p_0 = 0, p_{-1} = 1, q_0 = 1, q_{-1} = 0
            let (p1, q1) = match k {
                1 => (BigUint::zero(), BigUint::one()),
                _ => (cache[k - 2].p.clone(), cache[k - 2].q.clone()),
            };
            let (p2, q2) = match k {
                1 => (BigUint::one(), BigUint::zero()),
                2 => (BigUint::zero(), BigUint::one()),
                _ => (cache[k - 3].p.clone(), cache[k - 3].q.clone()),
            };
            let p = &a * p1 + p2;
            let q = &a * q1 + q2;
            cache.push(Convergent { a, p, q });
        }
        Ok(cache[n - 1].clone())
    }

    /// Open interval certainly containing an irrational θ, from convergents `n` and `n+1`.
    fn bracket(&self, n: usize) -> Result<(BigRational, BigRational)> {
        let c0 = self.convergent(n)?;
        let c1 = self.convergent(n + 1)?;
        let r0 = ratio(&c0.p, &c0.q);
        let r1 = ratio(&c1.p, &c1.q);
        Ok(if r0 < r1 { (r0, r1) } else { (r1, r0) })
    }

    /// The convergent `p_n/q_n` with error bound `1/(q_n q_{n+1}) ≤ eps`,
    /// or bound 0 when θ is exactly the last convergent of an [`Extension::Exact`] list.
    pub fn value(&self, eps: &BigRational) -> Result<AngleApproximation> {
        if *eps <= BigRational::zero() {
            return Err(Error::InvalidInput("eps must be positive".into()));
        }
        let mut n = 1;
        loop {
            let c = self.convergent(n)?;
            let approx_value = Angle::from_rational(&ratio(&c.p, &c.q));
            if self.extension == Extension::Exact && n == self.coefficients.len() {
                return Ok(AngleApproximation::exact(approx_value));
            }
            let next = match self.convergent(n + 1) {
                Ok(next) => next,
                Err(Error::PrecisionUnreachable(why)) => {
                    return Err(Error::PrecisionUnreachable(format!(
                        "cannot certify θ to within {eps}: {why}"
                    )))
                }
                Err(e) => return Err(e),
            };
            let bound = BigRational::new(BigInt::one(), BigInt::from(&c.q * &next.q));
            if bound <= *eps {
                return Ok(AngleApproximation { value: approx_value, error_bound: bound });
            }
            n += 1;
        }
    }

    /// A double-precision value of θ (accurate to the last bit for rules that
    /// reach depth; for `Prefix` the best known convergent).
    pub fn to_f64(&self) -> Result<f64> {
        let eps = BigRational::new(BigInt::one(), BigInt::one() << 80);
        match self.value(&eps) {
            Ok(v) => Ok(v.value.as_rational().to_f64().unwrap_or(0.0)),
            Err(Error::PrecisionUnreachable(_)) => {
                let c = self.convergent(self.coefficients.len())?;
                Ok(ratio(&c.p, &c.q).to_f64().unwrap_or(0.0))
            }
            Err(e) => Err(e),
        }
    }

    /// `Σ_{n=1}^{N} log(q_{n+1}) / q_n`.
    pub fn brjuno_partial_sum(&self, terms: usize) -> Result<f64> {
        let mut sum = 0.0;
        for n in 1..=terms {
            let qn = self.convergent(n)?.q;
            let qn1 = self.convergent(n + 1)?.q;
            sum += brjuno_term(&qn, &qn1);
        }
        Ok(sum)
    }

    /// Classify θ into constant type / Diophantine / Brjuno. Tail rules are
    /// decided from their form; the witness quotes brute-force numbers up to
    /// `depth` (or as deep as the quotients stay computable).
    pub fn classify(&self, depth: usize) -> Result<ClassificationReport> {
        if depth < 2 {
            return Err(Error::InvalidInput("classification depth must be ≥ 2".into()));
        }
        let stats = self.prefix_statistics(depth);
        let numbers = format!(
            "sup a_n (n ≤ {d}) = {sup}; max log q_(n+1)/log q_n (2 ≤ n ≤ {dm}) = {ratio:.6}; S_{dm} = {sum:.12}",
            d = stats.depth,
            dm = stats.depth.saturating_sub(1),
            sup = compact_integer(&stats.sup_a),
            ratio = stats.max_log_ratio,
            sum = stats.brjuno_sum,
        );
        let rule = match &self.extension {
            Extension::Prefix => {
                return Ok(ClassificationReport {
                    constant_type: Tri::Unknown,
                    diophantine: Tri::Unknown,
                    brjuno: Tri::Unknown,
                    witness: format!("finite prefix only, all three classes are tail properties; {numbers}"),
                    depth_used: stats.depth,
                });
            }
            Extension::Exact => {
                return Ok(ClassificationReport {
                    constant_type: Tri::False,
                    diophantine: Tri::False,
                    brjuno: Tri::False,
                    witness: "θ is rational; the classes consist of irrationals".into(),
                    depth_used: stats.depth,
                });
            }
            Extension::Tail(rule) => rule,
        };
        let (ct, d, b, reason) = match rule {
            TailRule::Constant(k) => (
                true,
                true,
                true,
                format!("bounded quotients: a_n = {k} eventually, sup a_n = {}", stats.sup_a),
            ),
            TailRule::Polynomial(cs) if TailRule::degree(cs) == 0 => (
                true,
                true,
                true,
                format!("bounded quotients: a_n = {} eventually", cs[0]),
            ),
            TailRule::Polynomial(cs) => (
                false,
                true,
                true,
                format!(
                    "a_n grows like n^{}: unbounded, but log q_(n+1)/log q_n → 1",
                    TailRule::degree(cs)
                ),
            ),
            TailRule::QPower(k) => (
                false,
                true,
                true,
                format!(
                    "q_(n+1) ≤ 2 q_n^{}: log q_(n+1)/log q_n → {}, bounded; Σ log q_(n+1)/q_n converges",
                    k + 1,
                    k + 1
                ),
            ),
            TailRule::QPowerIndex => (
                false,
                false,
                true,
                "q_(n+1) ≥ q_n^(n+1): log q_(n+1)/log q_n ≥ n+1, unbounded; terms ≤ (n+2) log q_n / q_n with q_n superexponential, so the series converges".to_string(),
            ),
            TailRule::ExpBase(base) => (
                false,
                false,
                false,
                format!(
                    "q_(n+1) ≥ {base}^q_n: every term log q_(n+1)/q_n ≥ log {base} = {:.6}, the series diverges",
                    (*base as f64).ln()
                ),
            ),
        };
        Ok(ClassificationReport {
            constant_type: ct.into(),
            diophantine: d.into(),
            brjuno: b.into(),
            witness: format!("tail {rule}: {reason}; {numbers}"),
            depth_used: stats.depth,
        })
    }

    fn prefix_statistics(&self, depth: usize) -> PrefixStats {
        let mut stats = PrefixStats { depth: 0, sup_a: BigUint::zero(), max_log_ratio: 0.0, brjuno_sum: 0.0 };
        let mut prev: Option<Convergent> = None;
        for n in 1..=depth {
            let Ok(c) = self.convergent(n) else { break };
            if c.a > stats.sup_a {
                stats.sup_a = c.a.clone();
            }
            if let Some(p) = &prev {
                stats.brjuno_sum += brjuno_term(&p.q, &c.q);
                let lp = ln_big(&p.q);
                if n >= 3 && lp > 0.0 {
                    stats.max_log_ratio = stats.max_log_ratio.max(ln_big(&c.q) / lp);
                }
            }
            stats.depth = n;
            prev = Some(c);
        }
        stats
    }

    /// `⌊qθ⌋`, certified by bracketing θ between convergents and deepening
    /// until `qθ` cannot straddle an integer. `start` carries the depth reached.
    fn floor_multiple(&self, q: &BigInt, start: &mut usize) -> Result<BigInt> {
        loop {
            let (lo, hi) = self.bracket(*start)?;
            let f = (&lo * q).floor();
            if &hi * q <= &f + BigRational::one() {
                return Ok(f.to_integer());
            }
            *start += 1;
        }
    }

    /// `Σ_{q=1}^{Q} ⌊qθ⌋ 2^{-(q+1)}`, the angle series truncated at `Q = max_q`.
    pub fn critical_angle_partial(&self, max_q: u64) -> Result<BigRational> {
        if !self.is_irrational() {
            return Err(Error::InvalidInput(
                "the critical-angle series needs an irrational θ (a tail rule)".into(),
            ));
        }
        let mut depth = 1;
        let mut numer = BigInt::zero();
        // accumulate over the common denominator 2^(Q+1)
        for q in 1..=max_q {
            let count = self.floor_multiple(&BigInt::from(q), &mut depth)?;
            numer += count << (max_q - q) as usize;
        }
        Ok(BigRational::new(numer, BigInt::one() << (max_q + 1) as usize))
    }

    /// The angle `t = Σ_{0<p/q<θ} 2^{-(q+1)}` (all pairs, not only reduced
    /// fractions), truncated where the tail bound `(Q+2) 2^{-(Q+1)}` is `≤ err`.
    pub fn critical_angle(&self, err: &BigRational) -> Result<AngleApproximation> {
        if *err <= BigRational::zero() {
            return Err(Error::InvalidInput("err must be positive".into()));
        }
        let max_q = critical_series_terms(err);
        let value = self.critical_angle_partial(max_q)?;
        Ok(AngleApproximation {
            value: Angle::from_rational(&value),
            error_bound: critical_series_tail(max_q),
        })
    }
}

struct PrefixStats {
    depth: usize,
    sup_a: BigUint,
    max_log_ratio: f64,
    brjuno_sum: f64,
}

/// `(Q+2) 2^{-(Q+1)}`, a bound on `Σ_{q>Q} ⌊qθ⌋ 2^{-(q+1)}`.
pub fn critical_series_tail(max_q: u64) -> BigRational {
    BigRational::new(BigInt::from(max_q + 2), BigInt::one() << (max_q + 1) as usize)
}

/// Smallest `Q ≥ 1` whose tail bound is `≤ err`.
pub fn critical_series_terms(err: &BigRational) -> u64 {
    let mut q = 1;
    while critical_series_tail(q) > *err {
        q += 1;
    }
    q
}

fn ratio(p: &BigUint, q: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(p.clone()), BigInt::from(q.clone()))
}

/// Natural log of a big integer, relative error near machine precision.
/// Exact up to 40 digits, otherwise the leading 12 digits and the digit count.
fn compact_integer(x: &BigUint) -> String {
    let s = x.to_string();
    if s.len() <= 40 {
        s
    } else {
        format!("{}...({} digits)", &s[..12], s.len())
    }
}

pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn brjuno_term(qn: &BigUint, qn1: &BigUint) -> f64 {
    let num = ln_big(qn1);
    if qn.bits() <= 1000 {
        num / qn.to_f64().unwrap_or(f64::INFINITY)
    } else {
        (num.ln() - ln_big(qn)).exp()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.coefficients.iter().map(u64::to_string).collect();
        write!(f, "{}", list.join(","))?;
        match &self.extension {
            Extension::Prefix => Ok(()),
            Extension::Exact => write!(f, ";exact"),
            Extension::Tail(rule) => write!(f, ";tail={rule}"),
        }
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;

    /// `1,1,1;tail=const:1`, `2,3;tail=rule:a[n+1]=q[n]`, `2;exact`, or a bare prefix `1,2,2`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(';');
        let coeffs = parts.next().unwrap_or("");
        let coefficients = coeffs
            .split(',')
            .map(|c| {
                let c = c.trim();
                match c.parse::<i128>() {
                    Ok(v) if v < 1 => Err(Error::InvalidInput(format!("partial quotient {v} is not ≥ 1"))),
                    Ok(v) => u64::try_from(v)
                        .map_err(|_| Error::Parse(format!("partial quotient {c:?} too large"))),
                    Err(_) => Err(Error::Parse(format!("bad partial quotient {c:?} in {s:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let extension = match parts.next().map(str::trim) {
            None => Extension::Prefix,
            Some("exact") => Extension::Exact,
            Some(t) => match t.strip_prefix("tail=") {
                Some(rule) => Extension::Tail(rule.parse()?),
                None => return Err(Error::Parse(format!("bad suffix {t:?}; expected tail=... or exact"))),
            },
        };
        if parts.next().is_some() {
            return Err(Error::Parse(format!("too many ';' sections in {s:?}")));
        }
        ContinuedFraction::new(coefficients, extension)
    }
}
