//! Seeded instance generators. Every instance carries a certificate with
//! the exactly enumerated statistic that justifies its regime label.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::circuit::{random_circuit, Circuit};
use crate::dist::{enumerate, shannon_entropy};
use crate::error::{Error, Result};
use crate::prob::{one, zero, Prob};
use crate::reductions::{measure_pair, prob_json, PairStats, Regime};

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub kind: String,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub statistic: String,
    pub value: Value,
    pub regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairStats>,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub x: Circuit,
    pub y: Option<Circuit>,
    pub certificate: Certificate,
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn scaled_floor(p: &Prob, n: usize) -> Option<usize> {
    let s = p * Prob::from_integer(BigInt::from(1u64) << n);
    s.floor().to_integer().to_usize()
}

fn check_size(n: usize, budget: &Budget) -> Result<()> {
    if n == 0 || n > 16 {
        return Err(Error::Precondition(
            "generator size n must be in 1..=16".into(),
        ));
    }
    budget.check("generator", n)
}

/// `(X, Y)` on `n` inputs and `n + 2` outputs with `SD(X, Y) <= target`:
/// `Y` is `X` with `floor(target · 2^n)` table entries redrawn.
pub fn yes_iid(n: usize, target_sd: &Prob, seed: u64, budget: &Budget) -> Result<Generated> {
    check_size(n, budget)?;
    if target_sd < &zero() {
        return Err(Error::Precondition(
            "requested SD below 0 is unachievable".into(),
        ));
    }
    let j = scaled_floor(target_sd, n).unwrap_or(usize::MAX).min(1 << n);
    let mut rng = rng_for(seed);
    let w = n + 2;
    let xt: Vec<u128> = (0..1usize << n)
        .map(|_| rng.random_range(0..1u128 << w))
        .collect();
    let mut yt = xt.clone();
    for pos in index::sample(&mut rng, 1 << n, j) {
        yt[pos] = rng.random_range(0..1u128 << w);
    }
    let x = Circuit::from_table(&xt, w)?;
    let y = Circuit::from_table(&yt, w)?;
    let stats = measure_pair(&x, &y, budget)?;
    debug_assert!(&stats.sd <= target_sd);
    let params = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("target_sd".to_string(), prob_json(target_sd)),
    ]);
    Ok(Generated {
        certificate: Certificate {
            kind: "yes-iid".into(),
            seed,
            params,
            statistic: "sd".into(),
            value: prob_json(&stats.sd),
            regime: Regime::Yes,
            pair: Some(stats),
        },
        x,
        y: Some(y),
    })
}

/// `(X, Y)` on `n` inputs with `mut-Disj(X, Y) = 1 - j/2^n >= target`:
/// both share `j = floor((1 - target) · 2^n)` values once each, and the
/// rest sit in tagged regions private to each side.
pub fn no_iid(n: usize, target_disj: &Prob, seed: u64, budget: &Budget) -> Result<Generated> {
    check_size(n, budget)?;
    if target_disj > &one() {
        return Err(Error::Precondition(
            "requested Disj above 1 is unachievable".into(),
        ));
    }
    let j = scaled_floor(&(one() - target_disj), n)
        .unwrap_or(0)
        .min(1 << n);
    let mut rng = rng_for(seed);
    let w = n + 2;
    let x_only = 1u128 << n;
    let y_only = 1u128 << (n + 1);
    let pool: Vec<u128> = index::sample(&mut rng, 1 << n, j)
        .iter()
        .map(|v| v as u128)
        .collect();
    let mut xt = pool.clone();
    let mut yt = pool;
    while xt.len() < 1 << n {
        xt.push(x_only | rng.random_range(0..1u128 << n));
        yt.push(y_only | rng.random_range(0..1u128 << n));
    }
    xt.shuffle(&mut rng);
    yt.shuffle(&mut rng);
    let x = Circuit::from_table(&xt, w)?;
    let y = Circuit::from_table(&yt, w)?;
    let stats = measure_pair(&x, &y, budget)?;
    debug_assert!(&stats.mut_disj >= target_disj);
    let params = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("target_disj".to_string(), prob_json(target_disj)),
    ]);
    Ok(Generated {
        certificate: Certificate {
            kind: "no-iid".into(),
            seed,
            params,
            statistic: "mut_disj".into(),
            value: prob_json(&stats.mut_disj),
            regime: Regime::No,
            pair: Some(stats),
        },
        x,
        y: Some(y),
    })
}

/// `X` on `m` inputs and `m + 1` outputs with `H(X) <= t - 1` (Yes) or
/// `H(X) >= t + 1` (No).
pub fn ea_instance(
    m: usize,
    t: usize,
    regime: Regime,
    seed: u64,
    budget: &Budget,
) -> Result<Generated> {
    check_size(m, budget)?;
    let mut rng = rng_for(seed);
    let w = m + 1;
    let table: Vec<u128> = match regime {
        Regime::Yes => {
            if t == 0 {
                return Err(Error::Precondition(
                    "H <= t - 1 is unachievable for t = 0".into(),
                ));
            }
            let bits = (t - 1).min(m);
            let values: Vec<u128> = (0..1usize << bits)
                .map(|_| rng.random_range(0..1u128 << w))
                .collect();
            (0..1usize << m)
                .map(|_| values[rng.random_range(0..values.len())])
                .collect()
        }
        Regime::No => {
            if t + 1 > m {
                return Err(Error::Precondition(format!(
                    "H >= t + 1 = {} is unachievable with m = {m} input bits",
                    t + 1
                )));
            }
            let mut found = None;
            for _ in 0..64 {
                let cand: Vec<u128> = (0..1usize << m)
                    .map(|_| rng.random_range(0..1u128 << w))
                    .collect();
                let c = Circuit::from_table(&cand, w)?;
                if shannon_entropy(&enumerate(&c, budget)?) >= (t + 1) as f64 {
                    found = Some(cand);
                    break;
                }
            }
            found.unwrap_or_else(|| {
                let mut perm: Vec<u128> = (0..1u128 << m).collect();
                perm.shuffle(&mut rng);
                perm
            })
        }
        Regime::Unknown => {
            return Err(Error::Precondition(
                "ea-instance needs a Yes or No regime".into(),
            ))
        }
    };
    let x = Circuit::from_table(&table, w)?;
    let h = shannon_entropy(&enumerate(&x, budget)?);
    let params = BTreeMap::from([("m".to_string(), json!(m)), ("t".to_string(), json!(t))]);
    Ok(Generated {
        certificate: Certificate {
            kind: "ea-instance".into(),
            seed,
            params,
            statistic: "entropy".into(),
            value: json!(h),
            regime,
            pair: None,
        },
        x,
        y: None,
    })
}

/// A random circuit with its entropy recorded.
pub fn random_instance(
    n: usize,
    gates: usize,
    outputs: usize,
    seed: u64,
    budget: &Budget,
) -> Result<Generated> {
    budget.check("generator", n)?;
    if outputs == 0 || outputs > 128 {
        return Err(Error::Precondition("outputs must be in 1..=128".into()));
    }
    let mut rng = rng_for(seed);
    let x = random_circuit(&mut rng, n, gates, outputs);
    let d = enumerate(&x, budget)?;
    let params = BTreeMap::from([
        ("n".to_string(), json!(n)),
        ("gates".to_string(), json!(gates)),
        ("outputs".to_string(), json!(outputs)),
        ("support".to_string(), json!(d.support_len())),
    ]);
    Ok(Generated {
        certificate: Certificate {
            kind: "random-circuit".into(),
            seed,
            params,
            statistic: "entropy".into(),
            value: json!(shannon_entropy(&d)),
            regime: Regime::Unknown,
            pair: None,
        },
        x,
        y: None,
    })
}
