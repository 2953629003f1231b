//! Exact distributions extracted from circuits, and the statistics the
//! reductions are phrased in: statistical difference, disjointness, entropy,
//! preimage weights, typicality mass.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::budget::Budget;
use crate::circuit::{bits_to_string, pack_lane, Circuit};
use crate::error::{Error, Result};
use crate::prob::{dyadic, one, Prob};

/// Largest denominator exponent a distribution may carry.
pub const MAX_POWER: u32 = 120;
/// Outputs are packed into a `u128` key.
pub const MAX_WIDTH: usize = 128;

const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Calls `f(input_index, output_key)` for every assignment of `c`'s inputs,
/// one batch of 64 assignments at a time, restricted to batches in `batches`.
fn scan_batches<F: FnMut(u64, u128)>(c: &Circuit, batches: std::ops::Range<u64>, mut f: F) {
    let n = c.n_inputs();
    let lanes: u32 = if n >= 6 { 64 } else { 1 << n };
    let mut inputs = vec![0u64; n];
    let mut scratch = Vec::new();
    let mut out = vec![0u64; c.n_outputs()];
    for batch in batches {
        for (i, w) in inputs.iter_mut().enumerate() {
            *w = if i < 6 {
                LANE_PATTERNS[i]
            } else if batch >> (i - 6) & 1 == 1 {
                !0
            } else {
                0
            };
        }
        c.eval_words(&inputs, &mut scratch, &mut out);
        for lane in 0..lanes {
            f(batch << 6 | lane as u64, pack_lane(&out, lane));
        }
    }
}

fn batch_count(n: usize) -> u64 {
    if n >= 6 {
        1u64 << (n - 6)
    } else {
        1
    }
}

/// Visits every input assignment of `c` in increasing index order.
pub fn scan<F: FnMut(u64, u128)>(c: &Circuit, budget: &Budget, f: F) -> Result<()> {
    budget.check("enumeration", c.n_inputs())?;
    if c.n_outputs() > MAX_WIDTH {
        return Err(Error::Precondition(format!(
            "output width {} exceeds {MAX_WIDTH}",
            c.n_outputs()
        )));
    }
    scan_batches(c, 0..batch_count(c.n_inputs()), f);
    Ok(())
}

/// Exact distribution over `width`-bit strings; `counts[x] / 2^power` is the
/// mass of `x`. Only the support is stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    width: usize,
    power: u32,
    counts: BTreeMap<u128, u128>,
}

impl ExactDistribution {
    /// Builds a distribution from raw counts; they must sum to `2^power`.
    pub fn from_counts(width: usize, power: u32, counts: BTreeMap<u128, u128>) -> Result<Self> {
        if power > MAX_POWER || width > MAX_WIDTH {
            return Err(Error::Precondition(format!(
                "distribution too large: width {width}, power {power}"
            )));
        }
        let total: u128 = counts.values().sum();
        if total != 1u128 << power {
            return Err(Error::Precondition(format!(
                "counts sum to {total}, expected 2^{power}"
            )));
        }
        if width < 128 && counts.keys().any(|&k| k >> width != 0) {
            return Err(Error::Precondition("key wider than declared width".into()));
        }
        let counts = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        Ok(ExactDistribution {
            width,
            power,
            counts,
        })
    }

    pub fn point(width: usize, value: u128) -> Self {
        ExactDistribution {
            width,
            power: 0,
            counts: BTreeMap::from([(value, 1)]),
        }
    }

    pub fn uniform(width: usize) -> Self {
        assert!(width <= 24, "uniform table too large");
        ExactDistribution {
            width,
            power: width as u32,
            counts: (0..1u128 << width).map(|k| (k, 1)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Denominator exponent: masses are multiples of `2^-power`.
    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn counts(&self) -> &BTreeMap<u128, u128> {
        &self.counts
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn in_support(&self, x: u128) -> bool {
        self.counts.contains_key(&x)
    }

    pub fn mass(&self, x: u128) -> Prob {
        dyadic(
            BigInt::from(self.counts.get(&x).copied().unwrap_or(0)),
            self.power,
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (u128, Prob)> + '_ {
        self.counts
            .iter()
            .map(|(&k, &c)| (k, dyadic(BigInt::from(c), self.power)))
    }

    fn mass_f64(&self, c: u128) -> f64 {
        c as f64 / 2f64.powi(self.power as i32)
    }

    /// Product distribution; `self` occupies the low bits.
    pub fn product(&self, other: &ExactDistribution) -> Result<ExactDistribution> {
        let width = self.width + other.width;
        let power = self.power + other.power;
        if width > MAX_WIDTH || power > MAX_POWER {
            return Err(Error::Precondition(format!(
                "product too large: width {width}, power {power}"
            )));
        }
        let mut counts = BTreeMap::new();
        for (&a, &ca) in &self.counts {
            for (&b, &cb) in &other.counts {
                counts.insert(a | b << self.width, ca * cb);
            }
        }
        Ok(ExactDistribution {
            width,
            power,
            counts,
        })
    }

    pub fn power_k(&self, k: usize) -> Result<ExactDistribution> {
        assert!(k >= 1);
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// `bitstring,numerator,denominator_power` rows in key order, with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bitstring,numerator,denominator_power\n");
        for (k, p) in self.iter() {
            let v = crate::prob::ExactValue::from_prob(&p).expect("dyadic");
            let _ = writeln!(
                s,
                "{},{},{}",
                bits_to_string(k, self.width),
                v.numerator,
                v.denominator_power
            );
        }
        s
    }

    pub fn from_csv(width: usize, text: &str) -> Result<ExactDistribution> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Syntax {
                line: i + 1,
                message: format!("bad CSV row `{line}`"),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 || f[0].len() != width {
                return Err(bad());
            }
            let key = crate::circuit::string_to_bits(f[0]).ok_or_else(bad)?;
            let num: u128 = f[1].parse().map_err(|_| bad())?;
            let pow: u32 = f[2].parse().map_err(|_| bad())?;
            rows.push((key, num, pow));
        }
        let power = rows.iter().map(|r| r.2).max().unwrap_or(0);
        let counts = rows
            .into_iter()
            .map(|(k, n, p)| (k, n << (power - p)))
            .collect();
        ExactDistribution::from_counts(width, power, counts)
    }
}

/// Exact output distribution of `c` over uniform inputs.
pub fn enumerate(c: &Circuit, budget: &Budget) -> Result<ExactDistribution> {
    budget.check("enumeration", c.n_inputs())?;
    if c.n_outputs() > MAX_WIDTH {
        return Err(Error::Precondition(format!(
            "output width {} exceeds {MAX_WIDTH}",
            c.n_outputs()
        )));
    }
    let batches = batch_count(c.n_inputs());
    let workers = std::thread::available_parallelism()
        .map(|n| n.get() as u64)
        .unwrap_or(1)
        .min(batches)
        .min(if batches >= 1024 { 16 } else { 1 })
        .max(1);
    let chunk = batches.div_ceil(workers);
    let partials: Vec<HashMap<u128, u128>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = w * chunk;
                let hi = (lo + chunk).min(batches);
                s.spawn(move || {
                    let mut m: HashMap<u128, u128> = HashMap::new();
                    scan_batches(c, lo..hi, |_, key| *m.entry(key).or_insert(0) += 1);
                    m
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker"))
            .collect()
    });
    let mut counts = BTreeMap::new();
    for part in partials {
        for (k, v) in part {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    Ok(ExactDistribution {
        width: c.n_outputs(),
        power: c.n_inputs() as u32,
        counts,
    })
}

fn check_widths(x: &ExactDistribution, y: &ExactDistribution) -> Result<()> {
    if x.width != y.width {
        return Err(Error::WidthMismatch {
            left: x.width,
            right: y.width,
        });
    }
    Ok(())
}

/// `SD(X,Y) = 1/2 sum_i |x_i - y_i|`, exactly.
pub fn statistical_difference(x: &ExactDistribution, y: &ExactDistribution) -> Result<Prob> {
    check_widths(x, y)?;
    let p = x.power.max(y.power);
    let (sx, sy) = (p - x.power, p - y.power);
    let mut total: u128 = 0;
    for (k, &cx) in &x.counts {
        let a = cx << sx;
        let b = y.counts.get(k).map_or(0, |&c| c << sy);
        total += a.abs_diff(b);
    }
    for (k, &cy) in &y.counts {
        if !x.counts.contains_key(k) {
            total += cy << sy;
        }
    }
    Ok(dyadic(BigInt::from(total), p + 1))
}

pub fn statistical_closeness(x: &ExactDistribution, y: &ExactDistribution) -> Result<Prob> {
    Ok(one() - statistical_difference(x, y)?)
}

/// Fraction of `x`'s input space mapped outside the support of `y`. For a
/// distribution read off a deterministic circuit this is the circuit-level
/// disjointness.
pub fn disjointness(x: &ExactDistribution, y: &ExactDistribution) -> Result<Prob> {
    check_widths(x, y)?;
    let outside: u128 = x
        .counts
        .iter()
        .filter(|(k, _)| !y.counts.contains_key(k))
        .map(|(_, &c)| c)
        .sum();
    Ok(dyadic(BigInt::from(outside), x.power))
}

pub fn mut_disjointness(x: &ExactDistribution, y: &ExactDistribution) -> Result<Prob> {
    Ok(disjointness(x, y)?.min(disjointness(y, x)?))
}

/// Shannon entropy in bits.
pub fn shannon_entropy(x: &ExactDistribution) -> f64 {
    x.counts
        .values()
        .map(|&c| {
            let p = x.mass_f64(c);
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

/// `log2` of a preimage count; an empty preimage is a distinguished value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogCount {
    NegInfinity,
    Finite(f64),
}

impl LogCount {
    pub fn of(count: u128) -> LogCount {
        if count == 0 {
            LogCount::NegInfinity
        } else {
            LogCount::Finite((count as f64).log2())
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            LogCount::Finite(v) => Some(v),
            LogCount::NegInfinity => None,
        }
    }
}

/// `wt(x) = log2 |{r : C(r) = x}|`.
pub fn preimage_log_count(c: &Circuit, x: u128, budget: &Budget) -> Result<LogCount> {
    let mut count = 0u128;
    scan(c, budget, |_, key| {
        if key == x {
            count += 1
        }
    })?;
    Ok(LogCount::of(count))
}

/// Same as [`preimage_log_count`], read off an enumerated distribution.
pub fn preimage_log_count_in(x_dist: &ExactDistribution, x: u128) -> LogCount {
    LogCount::of(x_dist.counts.get(&x).copied().unwrap_or(0))
}

/// Mass of elements `x` with `|log2 Pr[x] + H(X)| <= threshold`.
pub fn typicality_mass(x: &ExactDistribution, threshold: f64) -> Prob {
    let h = shannon_entropy(x);
    // Log-probabilities are exact for dyadic masses up to the float rounding
    // of log2(count); a tiny slack keeps exactly-typical elements typical.
    let slack = 1e-9;
    let inside: u128 = x
        .counts
        .values()
        .filter(|&&c| ((c as f64).log2() - x.power as f64 + h).abs() <= threshold + slack)
        .sum();
    dyadic(BigInt::from(inside), x.power)
}

/// A circuit whose inputs split into argument bits (the low `n_args`
/// inputs) and coin bits (the rest). It is ε-probabilistic when every
/// argument has a unique output of coin-probability at least `1 - ε`.
#[derive(Debug, Clone)]
pub struct ProbabilisticCircuit {
    base: Circuit,
    n_args: usize,
    /// `conditional[x]`: output counts over the coins for argument `x`.
    conditional: Vec<BTreeMap<u128, u128>>,
}

impl ProbabilisticCircuit {
    pub fn new(base: Circuit, n_args: usize, budget: &Budget) -> Result<Self> {
        if n_args > base.n_inputs() {
            return Err(Error::Precondition(format!(
                "{n_args} argument bits but circuit has {} inputs",
                base.n_inputs()
            )));
        }
        let mut conditional = vec![BTreeMap::new(); 1usize << n_args];
        let mask = (1u64 << n_args) - 1;
        scan(&base, budget, |r, key| {
            *conditional[(r & mask) as usize].entry(key).or_insert(0) += 1;
        })?;
        Ok(ProbabilisticCircuit {
            base,
            n_args,
            conditional,
        })
    }

    /// A deterministic circuit viewed as 0-probabilistic.
    pub fn deterministic(base: Circuit, budget: &Budget) -> Result<Self> {
        let n = base.n_inputs();
        Self::new(base, n, budget)
    }

    pub fn base(&self) -> &Circuit {
        &self.base
    }

    pub fn n_args(&self) -> usize {
        self.n_args
    }

    pub fn n_coins(&self) -> usize {
        self.base.n_inputs() - self.n_args
    }

    pub fn width(&self) -> usize {
        self.base.n_outputs()
    }

    /// Full output distribution over uniform arguments and coins.
    pub fn distribution(&self) -> ExactDistribution {
        let mut counts = BTreeMap::new();
        for cond in &self.conditional {
            for (&k, &c) in cond {
                *counts.entry(k).or_insert(0) += c;
            }
        }
        ExactDistribution {
            width: self.width(),
            power: self.base.n_inputs() as u32,
            counts,
        }
    }

    fn top(&self, x: usize) -> (u128, u128) {
        let cond = &self.conditional[x];
        let mut best = (0u128, 0u128);
        for (&k, &c) in cond {
            if c > best.1 {
                best = (k, c);
            }
        }
        best
    }

    /// The output of argument `x` with coin-probability above 1/2.
    pub fn natural_image(&self, x: u64) -> Result<u128> {
        let (k, c) = self.top(x as usize);
        let coins = self.n_coins() as u32;
        if 2 * c <= 1u128 << coins {
            return Err(Error::NaturalImageUndefined {
                argument: bits_to_string(x as u128, self.n_args),
            });
        }
        Ok(k)
    }

    /// Smallest ε for which the circuit is ε-probabilistic.
    pub fn epsilon(&self) -> Result<Prob> {
        let coins = self.n_coins() as u32;
        let total = 1u128 << coins;
        let mut worst = 0u128;
        for x in 0..self.conditional.len() {
            self.natural_image(x as u64)?;
            worst = worst.max(total - self.top(x).1);
        }
        Ok(dyadic(BigInt::from(worst), coins))
    }

    /// Natural images of all arguments, indexed by argument.
    pub fn natural_table(&self) -> Result<Vec<u128>> {
        (0..self.conditional.len() as u64)
            .map(|x| self.natural_image(x))
            .collect()
    }
}

pub fn epsilon_of(p: &ProbabilisticCircuit) -> Result<Prob> {
    p.epsilon()
}

pub fn natural_image(p: &ProbabilisticCircuit, x: u64) -> Result<u128> {
    p.natural_image(x)
}

/// `(1/2^n) sum_r max_y Pr[Y(y) = X(r)]`, with `r` ranging over all of
/// `X`'s inputs.
pub fn hit_probability(x: &ProbabilisticCircuit, y: &ProbabilisticCircuit) -> Result<Prob> {
    if x.width() != y.width() {
        return Err(Error::WidthMismatch {
            left: x.width(),
            right: y.width(),
        });
    }
    y.epsilon()?;
    let ycoins = y.n_coins() as u32;
    let mut best: HashMap<u128, u128> = HashMap::new();
    for cond in &y.conditional {
        for (&k, &c) in cond {
            let e = best.entry(k).or_insert(0);
            *e = (*e).max(c);
        }
    }
    let xd = x.distribution();
    let mut total = BigInt::from(0);
    for (&k, &c) in &xd.counts {
        if let Some(&b) = best.get(&k) {
            total += BigInt::from(c) * BigInt::from(b);
        }
    }
    Ok(Prob::new(total, BigInt::from(1) << (xd.power + ycoins)))
}

/// Natural-image disjointness: the fraction of arguments `r` of `X` with
/// `Nat_X(r)` outside the natural image set of `Y`.
pub fn disjointness_prob(x: &ProbabilisticCircuit, y: &ProbabilisticCircuit) -> Result<Prob> {
    if x.width() != y.width() {
        return Err(Error::WidthMismatch {
            left: x.width(),
            right: y.width(),
        });
    }
    let yimage: std::collections::HashSet<u128> = y.natural_table()?.into_iter().collect();
    let xnat = x.natural_table()?;
    let outside = xnat.iter().filter(|k| !yimage.contains(k)).count();
    Ok(dyadic(BigInt::from(outside), x.n_args as u32))
}
