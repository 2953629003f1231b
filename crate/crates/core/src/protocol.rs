//! Dealer / prover / verifier protocols with help, measured exactly.
//!
//! A view is `(help, message, abort)`; the abort flag is a distinguished
//! message that the verifier always rejects.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;
use serde::Serialize;

use crate::budget::Budget;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::dist::{enumerate, scan};
use crate::error::{Error, Result};
use crate::prob::{dyadic, one, serialize_prob, zero, Prob};

#[derive(Debug, Clone)]
pub enum ProverStrategy {
    /// Sends a uniform preimage of the help under the circuit, aborting
    /// when there is none.
    Inverter(Circuit),
    /// Per help value, a uniform choice among messages maximizing the
    /// acceptance probability; aborts if every message is rejected.
    Optimal,
    /// Fixed response per help value; missing entries abort.
    Table(BTreeMap<u128, u128>),
}

#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    /// Help distribution.
    pub dealer: Circuit,
    pub message_bits: usize,
    /// Inputs: help bits, message bits, then verifier coins. One output.
    pub verifier: Circuit,
    pub verifier_coins: usize,
    pub prover: ProverStrategy,
    /// Outputs `(help, message, abort)`.
    pub simulator: Circuit,
}

impl ProtocolSpec {
    pub fn help_bits(&self) -> usize {
        self.dealer.n_outputs()
    }

    pub fn view_bits(&self) -> usize {
        self.help_bits() + self.message_bits + 1
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.help_bits();
        let expect_v = h + self.message_bits + self.verifier_coins;
        if self.verifier.n_inputs() != expect_v {
            return Err(Error::LengthMismatch {
                expected: expect_v,
                got: self.verifier.n_inputs(),
            });
        }
        if self.verifier.n_outputs() != 1 {
            return Err(Error::WidthMismatch {
                left: self.verifier.n_outputs(),
                right: 1,
            });
        }
        if self.simulator.n_outputs() != self.view_bits() {
            return Err(Error::WidthMismatch {
                left: self.simulator.n_outputs(),
                right: self.view_bits(),
            });
        }
        if self.view_bits() > 128 {
            return Err(Error::Precondition("views wider than 128 bits".into()));
        }
        if let ProverStrategy::Inverter(c) = &self.prover {
            if c.n_inputs() != self.message_bits || c.n_outputs() != h {
                return Err(Error::WidthMismatch {
                    left: c.n_outputs(),
                    right: h,
                });
            }
        }
        Ok(())
    }

    fn view_key(&self, help: u128, message: Option<u128>) -> u128 {
        let h = self.help_bits();
        match message {
            Some(m) => help | m << h,
            None => help | 1u128 << (h + self.message_bits),
        }
    }
}

/// The protocol for image intersection: the dealer reveals `x' <- X'`, the
/// prover sends `r` with `Y'(r) = x'`, the verifier recomputes `Y'(r)`.
pub fn build_iid_protocol(x: &Circuit, y: &Circuit, budget: &Budget) -> Result<ProtocolSpec> {
    if x.n_outputs() != y.n_outputs() {
        return Err(Error::WidthMismatch {
            left: x.n_outputs(),
            right: y.n_outputs(),
        });
    }
    budget.check("dealer", x.n_inputs())?;
    budget.check("prover inversion", y.n_inputs())?;
    let w = x.n_outputs();
    let n = y.n_inputs();

    let mut b = CircuitBuilder::new(w + n);
    let help = b.inputs(0..w);
    let r = b.inputs(w..w + n);
    let yr = b.embed(y, &r);
    let mut ok = b.constant(true);
    for (&hw, &yw) in help.iter().zip(&yr) {
        let diff = b.xor(hw, yw);
        let same = b.not(diff);
        ok = b.and(ok, same);
    }
    let verifier = b.finish(vec![ok]);

    let mut b = CircuitBuilder::new(n);
    let r = b.inputs(0..n);
    let mut outs = b.embed(y, &r);
    outs.extend(r);
    outs.push(b.constant(false));
    let simulator = b.finish(outs);

    let spec = ProtocolSpec {
        dealer: x.clone(),
        message_bits: n,
        verifier,
        verifier_coins: 0,
        prover: ProverStrategy::Inverter(y.clone()),
        simulator,
    };
    spec.validate()?;
    Ok(spec)
}

/// Per help value, the number of verifier coin strings accepting each
/// message.
fn acceptance_table(spec: &ProtocolSpec, help: u128, budget: &Budget) -> Result<Vec<u64>> {
    let h = spec.help_bits();
    let mb = spec.message_bits;
    let n = mb + spec.verifier_coins;
    budget.check("verifier enumeration", n)?;
    let mut b = CircuitBuilder::new(n);
    let mut ins: Vec<_> = (0..h).map(|i| b.constant(help >> i & 1 == 1)).collect();
    ins.extend(b.inputs(0..n));
    let out = b.embed(&spec.verifier, &ins);
    let c = b.finish(out);
    let mut table = vec![0u64; 1 << mb];
    let mask = (1u64 << mb) - 1;
    scan(&c, budget, |idx, key| {
        if key & 1 == 1 {
            table[(idx & mask) as usize] += 1;
        }
    })?;
    Ok(table)
}

/// Message distribution of the prover on one help value; `None` is abort.
fn prover_messages(
    spec: &ProtocolSpec,
    help: u128,
    accept: &[u64],
    preimages: &BTreeMap<u128, Vec<u128>>,
) -> Vec<(Option<u128>, Prob)> {
    let uniform = |ms: &[u128]| -> Vec<(Option<u128>, Prob)> {
        if ms.is_empty() {
            return vec![(None, one())];
        }
        let w = Prob::new(BigInt::from(1), BigInt::from(ms.len()));
        ms.iter().map(|&m| (Some(m), w.clone())).collect()
    };
    match &spec.prover {
        ProverStrategy::Inverter(_) => {
            uniform(preimages.get(&help).map(Vec::as_slice).unwrap_or(&[]))
        }
        ProverStrategy::Optimal => {
            let best = accept.iter().copied().max().unwrap_or(0);
            if best == 0 {
                return vec![(None, one())];
            }
            let ms: Vec<u128> = (0..accept.len() as u128)
                .filter(|&m| accept[m as usize] == best)
                .collect();
            uniform(&ms)
        }
        ProverStrategy::Table(t) => vec![(t.get(&help).copied(), one())],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    #[serde(serialize_with = "serialize_prob")]
    pub completeness: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub soundness: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub deviation: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub abort_mass: Prob,
}

fn sd_maps(p: &BTreeMap<u128, Prob>, q: &BTreeMap<u128, Prob>) -> Prob {
    let mut total = zero();
    for (k, v) in p {
        total += (v - q.get(k).cloned().unwrap_or_else(zero)).abs();
    }
    for (k, v) in q {
        if !p.contains_key(k) {
            total += v;
        }
    }
    total / Prob::from_integer(2.into())
}

/// Exact acceptance probabilities and simulator deviation.
///
/// `completeness` uses the protocol's prover, `soundness` the optimal prover,
/// and `deviation` is the SD between the real view and the simulator.
pub fn measure(spec: &ProtocolSpec, budget: &Budget) -> Result<ProtocolReport> {
    spec.validate()?;
    let dealer = enumerate(&spec.dealer, budget)?;
    let coins = spec.verifier_coins as u32;
    let preimages = match &spec.prover {
        ProverStrategy::Inverter(c) => {
            let mut pre: BTreeMap<u128, Vec<u128>> = BTreeMap::new();
            scan(c, budget, |r, v| pre.entry(v).or_default().push(r as u128))?;
            pre
        }
        _ => BTreeMap::new(),
    };
    let mut completeness = zero();
    let mut soundness = zero();
    let mut abort_mass = zero();
    let mut view: BTreeMap<u128, Prob> = BTreeMap::new();
    for (help, mass) in dealer.iter() {
        let accept = acceptance_table(spec, help, budget)?;
        let best = accept.iter().copied().max().unwrap_or(0);
        soundness += &mass * dyadic(best, coins);
        for (m, pm) in prover_messages(spec, help, &accept, &preimages) {
            let w = &mass * &pm;
            match m {
                Some(m) => completeness += &w * dyadic(accept[m as usize], coins),
                None => abort_mass += &w,
            }
            *view.entry(spec.view_key(help, m)).or_insert_with(zero) += w;
        }
    }
    let sim: BTreeMap<u128, Prob> = enumerate(&spec.simulator, budget)?.iter().collect();
    Ok(ProtocolReport {
        completeness,
        soundness,
        deviation: sd_maps(&view, &sim),
        abort_mass,
    })
}

/// One sampled execution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProtocolRun {
    pub help: u128,
    pub message: Option<u128>,
    pub accept: bool,
    pub simulated_help: u128,
    pub simulated_message: Option<u128>,
}

fn random_index<R: Rng + ?Sized>(rng: &mut R, bits: usize) -> u64 {
    if bits == 0 {
        0
    } else {
        rng.random_range(0..1u64 << bits)
    }
}

/// Samples one run of the protocol and one simulator output.
pub fn run<R: Rng + ?Sized>(
    spec: &ProtocolSpec,
    rng: &mut R,
    budget: &Budget,
) -> Result<ProtocolRun> {
    spec.validate()?;
    let h = spec.help_bits();
    let mb = spec.message_bits;
    let help = spec
        .dealer
        .evaluate_index(random_index(rng, spec.dealer.n_inputs()));
    let accept_table = acceptance_table(spec, help, budget)?;
    let preimages = match &spec.prover {
        ProverStrategy::Inverter(c) => {
            let mut pre: BTreeMap<u128, Vec<u128>> = BTreeMap::new();
            scan(c, budget, |r, v| {
                if v == help {
                    pre.entry(v).or_default().push(r as u128)
                }
            })?;
            pre
        }
        _ => BTreeMap::new(),
    };
    let options = prover_messages(spec, help, &accept_table, &preimages);
    let message = options[rng.random_range(0..options.len())].0;
    let accept = match message {
        Some(m) => {
            let coins = random_index(rng, spec.verifier_coins) as u128;
            let idx = help | m << h | coins << (h + mb);
            spec.verifier.evaluate_index(idx as u64) & 1 == 1
        }
        None => false,
    };
    let s = spec
        .simulator
        .evaluate_index(random_index(rng, spec.simulator.n_inputs()));
    let hmask = (1u128 << h) - 1;
    let mmask = (1u128 << mb) - 1;
    let aborted = s >> (h + mb) & 1 == 1;
    Ok(ProtocolRun {
        help,
        message,
        accept,
        simulated_help: s & hmask,
        simulated_message: (!aborted).then_some(s >> h & mmask),
    })
}

/// Mass of `x` outside the image of `y`, exactly.
pub fn mass_outside_image(x: &Circuit, y: &Circuit, budget: &Budget) -> Result<Prob> {
    let dx = enumerate(x, budget)?;
    let dy = enumerate(y, budget)?;
    let mut out = zero();
    for (v, m) in dx.iter() {
        if !dy.in_support(v) {
            out += m;
        }
    }
    Ok(out)
}

impl ProtocolReport {
    pub fn is_zero_knowledge_within(&self, sd: &Prob) -> bool {
        self.deviation <= sd + &self.abort_mass
    }
}
