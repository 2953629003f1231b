//! Exact probabilities.
//!
//! Every distribution in this crate is produced by a circuit over uniform
//! input bits, so probabilities are dyadic. Intermediate quantities (such as
//! a prover choosing uniformly among three preimages) can leave the dyadic
//! ring, so the working type is a big rational; [`ExactValue`] is the
//! report-facing rendering.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Prob = BigRational;

pub fn zero() -> Prob {
    Prob::zero()
}

pub fn one() -> Prob {
    Prob::one()
}

/// `numerator / 2^power`.
pub fn dyadic(numerator: impl Into<BigInt>, power: u32) -> Prob {
    Prob::new(numerator.into(), BigInt::one() << power)
}

pub fn ratio(numerator: i64, denominator: i64) -> Prob {
    Prob::new(BigInt::from(numerator), BigInt::from(denominator))
}

pub fn to_f64(p: &Prob) -> f64 {
    // Shift both into f64 range before dividing; supports can carry huge
    // denominators after tensoring.
    let n = p.numer();
    let d = p.denom();
    let shift = (d.bits().max(n.bits()) as i64 - 1000).max(0) as usize;
    let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
    nf / df
}

/// Smallest dyadic `s / 2^bits` that is `>= x` (clamped to [0, 1]).
pub fn dyadic_ceil(x: f64, bits: u32) -> Prob {
    let scale = (1u128 << bits) as f64;
    let s = (x.clamp(0.0, 1.0) * scale).ceil() as u128;
    dyadic(BigInt::from(s.min(1u128 << bits)), bits)
}

/// Exact dyadic probability as `numerator / 2^denominator_power`, with a
/// float rendering for convenience.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub numerator: String,
    pub denominator_power: u32,
    pub float: String,
}

impl ExactValue {
    /// Renders `p` if its reduced denominator is a power of two.
    pub fn from_prob(p: &Prob) -> Option<ExactValue> {
        let d = p.denom();
        if d.is_negative() {
            return None;
        }
        let du: BigUint = d.magnitude().clone();
        if du.count_ones() != 1 {
            return None;
        }
        let power = (du.bits() - 1) as u32;
        Some(ExactValue {
            numerator: p.numer().to_string(),
            denominator_power: power,
            float: format!("{:.12}", to_f64(p)),
        })
    }

    pub fn to_prob(&self) -> Option<Prob> {
        let n: BigInt = self.numerator.parse().ok()?;
        Some(dyadic(n, self.denominator_power))
    }
}

/// Renders a probability that may or may not be dyadic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportValue {
    Dyadic(ExactValue),
    Rational {
        numerator: String,
        denominator: String,
        float: String,
    },
}

impl ReportValue {
    pub fn from_prob(p: &Prob) -> ReportValue {
        match ExactValue::from_prob(p) {
            Some(v) => ReportValue::Dyadic(v),
            None => ReportValue::Rational {
                numerator: p.numer().to_string(),
                denominator: p.denom().to_string(),
                float: format!("{:.12}", to_f64(p)),
            },
        }
    }
}

/// Parses `"3/8"`, `"0.375"`, or an integer into an exact rational.
pub fn parse_prob(text: &str) -> Option<Prob> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| Prob::new(n, d));
    }
    let (neg, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("0{int}{frac}").parse().ok()?;
    let v = Prob::new(all, BigInt::from(10u32).pow(frac.len() as u32));
    Some(if neg { -v } else { v })
}

/// `serialize_with` helper rendering a [`Prob`] as a [`ReportValue`].
pub fn serialize_prob<S: serde::Serializer>(p: &Prob, s: S) -> Result<S::Ok, S::Error> {
    ReportValue::from_prob(p).serialize(s)
}

pub fn serialize_opt_prob<S: serde::Serializer>(p: &Option<Prob>, s: S) -> Result<S::Ok, S::Error> {
    p.as_ref().map(ReportValue::from_prob).serialize(s)
}
