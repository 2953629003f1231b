//! Promise-problem reductions between circuit-pair problems.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::dist::{
    disjointness, enumerate, mut_disjointness, shannon_entropy, statistical_difference,
    ProbabilisticCircuit,
};
use crate::error::{Error, Result};
use crate::ops::{or_xor_pair, power, tensor, tensor_all, AffineHash, HashFamily};
use crate::prob::{serialize_prob, Prob, ReportValue};
use crate::protocol::ProtocolSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Sd,
    Iid,
    MutIid,
    Ea,
    EaBar,
    EdBar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone)]
pub enum Params {
    Gap { a: Prob, b: Prob },
    Threshold(usize),
    None,
}

#[derive(Debug, Clone)]
pub struct PromisePair {
    pub x: Circuit,
    pub y: Circuit,
    pub problem: Problem,
    pub params: Params,
    pub regime: Regime,
}

impl PromisePair {
    pub fn new(x: Circuit, y: Circuit, problem: Problem) -> PromisePair {
        PromisePair {
            x,
            y,
            problem,
            params: Params::None,
            regime: Regime::Unknown,
        }
    }

    pub fn with_regime(mut self, regime: Regime) -> PromisePair {
        self.regime = regime;
        self
    }

    pub fn id(&self) -> String {
        instance_id(&[&self.x, &self.y])
    }

    pub fn input_bits(&self) -> usize {
        self.x.n_inputs().max(self.y.n_inputs())
    }
}

/// Stable 64-bit FNV-1a digest of the serialized circuits.
pub fn instance_id(circuits: &[&Circuit]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in circuits {
        for byte in c.serialize().bytes().chain(std::iter::once(0)) {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairStats {
    #[serde(serialize_with = "serialize_prob")]
    pub sd: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub disj_xy: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub disj_yx: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub mut_disj: Prob,
}

pub fn measure_pair(x: &Circuit, y: &Circuit, budget: &Budget) -> Result<PairStats> {
    let dx = enumerate(x, budget)?;
    let dy = enumerate(y, budget)?;
    Ok(PairStats {
        sd: statistical_difference(&dx, &dy)?,
        disj_xy: disjointness(&dx, &dy)?,
        disj_yx: disjointness(&dy, &dx)?,
        mut_disj: mut_disjointness(&dx, &dy)?,
    })
}

fn stats_json(s: &PairStats) -> BTreeMap<String, Value> {
    let v = serde_json::to_value(s).expect("stats serialize");
    v.as_object().unwrap().clone().into_iter().collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionTrace {
    pub reduction: String,
    pub input_id: String,
    pub output_id: String,
    pub params: BTreeMap<String, Value>,
    pub before: BTreeMap<String, Value>,
    pub after: BTreeMap<String, Value>,
}

impl ReductionTrace {
    fn new(reduction: &str, input: &[&Circuit], output: &PromisePair) -> ReductionTrace {
        ReductionTrace {
            reduction: reduction.into(),
            input_id: instance_id(input),
            output_id: output.id(),
            params: BTreeMap::new(),
            before: BTreeMap::new(),
            after: BTreeMap::new(),
        }
    }

    fn param(mut self, key: &str, v: Value) -> ReductionTrace {
        self.params.insert(key.into(), v);
        self
    }

    /// Measures the input pair exactly and stores the statistics.
    pub fn record_before(&mut self, x: &Circuit, y: &Circuit, budget: &Budget) -> Result<()> {
        self.before.extend(stats_json(&measure_pair(x, y, budget)?));
        Ok(())
    }

    /// Measures the output pair exactly and stores the statistics.
    pub fn record_after(&mut self, out: &PromisePair, budget: &Budget) -> Result<PairStats> {
        let s = measure_pair(&out.x, &out.y, budget)?;
        self.after.extend(stats_json(&s));
        Ok(s)
    }
}

/// Settings for the entropy-approximation-complement reduction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EaBarParams {
    /// Entropy threshold.
    pub t: usize,
    /// Number of copies.
    pub s: usize,
    /// Security parameter, recorded and used for typicality diagnostics.
    pub k: usize,
    pub family: HashFamily,
}

/// `Z = X' ⊗ (h, y)` and `Z' = (X'(r), h, h(r, u))` with `X' = X^{⊗s}`,
/// `r` the `m' = s·m` input bits of `X'`, `u` of `s·t` bits, and `h` an
/// affine hash from `m' + s·t` to `m'` bits.
pub fn ea_bar_to_iid(
    x: &Circuit,
    p: &EaBarParams,
    budget: &Budget,
) -> Result<(PromisePair, ReductionTrace)> {
    let m = x.n_inputs();
    if p.t == 0 || p.t >= m {
        return Err(Error::Precondition(format!(
            "threshold t = {} must lie in (0, m) with m = {m}",
            p.t
        )));
    }
    if p.s == 0 {
        return Err(Error::Precondition("s must be at least 1".into()));
    }
    let mp = p.s * m;
    let st = p.s * p.t;
    let h = AffineHash::new(mp + st, mp, p.family);
    let d = h.description_bits();
    budget.check("ea-bar Z", 2 * mp + d)?;
    budget.check("ea-bar Z'", mp + d + st)?;
    let unlimited = Budget::new(usize::MAX);
    let xp = power(x, p.s, &unlimited)?;
    let z = tensor(&xp, &Circuit::identity(d + mp), budget)?;

    let mut b = CircuitBuilder::new(mp + d + st);
    let r = b.inputs(0..mp);
    let desc = b.inputs(mp..mp + d);
    let u = b.inputs(mp + d..mp + d + st);
    let mut outs = b.embed(&xp, &r);
    let mut hashed_in = r.clone();
    hashed_in.extend(u);
    let hv = h.build(&mut b, &desc, &hashed_in);
    outs.extend(desc);
    outs.extend(hv);
    let zp = b.finish(outs);

    let mut pair = PromisePair::new(z, zp, Problem::Iid);
    pair.params = Params::Threshold(p.t);
    let trace = ReductionTrace::new("ea-bar-to-iid", &[x], &pair)
        .param("t", json!(p.t))
        .param("s", json!(p.s))
        .param("k", json!(p.k))
        .param("m", json!(m))
        .param("m_prime", json!(mp))
        .param("hash_in_bits", json!(mp + st))
        .param("hash_description_bits", json!(d))
        .param("family", json!(p.family));
    Ok((pair, trace))
}

/// Entropy of `X` in bits, recorded as the EA-side statistic.
pub fn entropy_of(x: &Circuit, budget: &Budget) -> Result<f64> {
    Ok(shannon_entropy(&enumerate(x, budget)?))
}

/// `A`: pick `b`, return `(X_b(r), b)`; `B`: pick `b`, return `(X_b(r), 1-b)`.
/// The tag is the last output bit.
pub fn iid_to_mut_iid(
    x0: &Circuit,
    x1: &Circuit,
    budget: &Budget,
) -> Result<(PromisePair, ReductionTrace)> {
    if x0.n_outputs() != x1.n_outputs() {
        return Err(Error::WidthMismatch {
            left: x0.n_outputs(),
            right: x1.n_outputs(),
        });
    }
    let n = x0.n_inputs().max(x1.n_inputs());
    budget.check("iid-to-mut", n + 1)?;
    let build = |flip: bool| {
        let mut b = CircuitBuilder::new(n + 1);
        let sel = b.input(0);
        let i0 = b.inputs(1..1 + x0.n_inputs());
        let i1 = b.inputs(1..1 + x1.n_inputs());
        let o0 = b.embed(x0, &i0);
        let o1 = b.embed(x1, &i1);
        let mut outs = b.mux_vec(sel, &o0, &o1);
        outs.push(if flip { b.not(sel) } else { sel });
        b.finish(outs)
    };
    let pair = PromisePair::new(build(false), build(true), Problem::MutIid);
    let trace = ReductionTrace::new("iid-to-mut-iid", &[x0, x1], &pair);
    Ok((pair, trace))
}

fn and_regime(regimes: impl Iterator<Item = Regime>) -> Regime {
    let rs: Vec<Regime> = regimes.collect();
    if rs.contains(&Regime::No) {
        Regime::No
    } else if rs.iter().all(|&r| r == Regime::Yes) {
        Regime::Yes
    } else {
        Regime::Unknown
    }
}

/// Tensors the pairs component-wise. Bounds: SD at most the sum of the
/// parts, mut-Disj at least their maximum.
pub fn and_closure(pairs: &[PromisePair], budget: &Budget) -> Result<PromisePair> {
    if pairs.is_empty() {
        return Err(Error::Precondition(
            "and-closure needs at least one pair".into(),
        ));
    }
    let xs: Vec<&Circuit> = pairs.iter().map(|p| &p.x).collect();
    let ys: Vec<&Circuit> = pairs.iter().map(|p| &p.y).collect();
    let x = tensor_all(&xs, budget)?;
    let y = tensor_all(&ys, budget)?;
    Ok(PromisePair::new(x, y, Problem::MutIid)
        .with_regime(and_regime(pairs.iter().map(|p| p.regime))))
}

/// Generalized XOR of two pairs: SD multiplies, so one Yes side suffices.
pub fn or_closure(p0: &PromisePair, p1: &PromisePair, budget: &Budget) -> Result<PromisePair> {
    let out = or_xor_pair((&p0.x, &p0.y), (&p1.x, &p1.y), budget)?;
    let regime = match (p0.regime, p1.regime) {
        (Regime::Yes, _) | (_, Regime::Yes) => Regime::Yes,
        (Regime::No, Regime::No) => Regime::No,
        _ => Regime::Unknown,
    };
    Ok(PromisePair::new(out.a, out.b, Problem::MutIid).with_regime(regime))
}

/// One `OR(EA̅^t(X'), EA^t(Y'))` instance of the decomposition.
#[derive(Debug, Clone)]
pub struct EdBarSkeleton {
    pub t: usize,
    pub x: Circuit,
    pub y: Circuit,
}

/// Triples both circuits and emits one skeleton per threshold
/// `t = 1..=n`, `n` the larger output width of the tripled circuits.
pub fn ed_bar_decompose(x: &Circuit, y: &Circuit, budget: &Budget) -> Result<Vec<EdBarSkeleton>> {
    let x3 = power(x, 3, budget)?;
    let y3 = power(y, 3, budget)?;
    let n = x3.n_outputs().max(y3.n_outputs());
    Ok((1..=n)
        .map(|t| EdBarSkeleton {
            t,
            x: x3.clone(),
            y: y3.clone(),
        })
        .collect())
}

/// A reduction from an entropy-threshold instance to mut-IID.
pub trait SubReduction {
    fn reduce(&self, x: &Circuit, t: usize, budget: &Budget) -> Result<PromisePair>;
}

impl<F> SubReduction for F
where
    F: Fn(&Circuit, usize, &Budget) -> Result<PromisePair>,
{
    fn reduce(&self, x: &Circuit, t: usize, budget: &Budget) -> Result<PromisePair> {
        self(x, t, budget)
    }
}

/// The EA̅ side: [`ea_bar_to_iid`] followed by [`iid_to_mut_iid`].
#[derive(Debug, Clone, Copy)]
pub struct EaBarSide {
    pub s: usize,
    pub k: usize,
    pub family: HashFamily,
}

impl SubReduction for EaBarSide {
    fn reduce(&self, x: &Circuit, t: usize, budget: &Budget) -> Result<PromisePair> {
        if t >= x.n_inputs() {
            // H(X) <= m <= t: the No side is empty, emit a Yes instance.
            let p = Circuit::constant(&[false], 0);
            return Ok(PromisePair::new(p.clone(), p, Problem::MutIid).with_regime(Regime::Yes));
        }
        let params = EaBarParams {
            t,
            s: self.s,
            k: self.k,
            family: self.family,
        };
        let (iid, _) = ea_bar_to_iid(x, &params, budget)?;
        Ok(iid_to_mut_iid(&iid.x, &iid.y, budget)?.0)
    }
}

/// Reduces every skeleton with the two sides, ORs per threshold, and ANDs
/// across thresholds.
pub fn ed_bar_assemble(
    skeletons: &[EdBarSkeleton],
    ea_bar: &dyn SubReduction,
    ea: Option<&dyn SubReduction>,
    budget: &Budget,
) -> Result<PromisePair> {
    let ea = ea.ok_or_else(|| Error::MissingDependency("EA^t -> mut-IID sub-reduction".into()))?;
    let ors = skeletons
        .iter()
        .map(|sk| {
            let left = ea_bar.reduce(&sk.x, sk.t, budget)?;
            let right = ea.reduce(&sk.y, sk.t, budget)?;
            or_closure(&left, &right, budget)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = and_closure(&ors, budget)?;
    out.problem = Problem::MutIid;
    Ok(out)
}

/// A pair of probabilistic circuits produced by the protocol compiler.
#[derive(Debug, Clone)]
pub struct ProbabilisticPair {
    pub d0: ProbabilisticCircuit,
    pub d1: ProbabilisticCircuit,
    pub k: usize,
    pub regime: Regime,
}

/// `D₀`: the dealer's help, tagged real. `D₁`: one simulator run whose
/// view is checked by `k` independent verifier runs; outputs the help if a
/// majority accepts and `⊥` otherwise. `D₁`'s arguments are the simulator
/// coins and its coins the verifier coins.
pub fn protocol_to_iid(
    spec: &ProtocolSpec,
    k: usize,
    budget: &Budget,
) -> Result<ProbabilisticPair> {
    spec.validate()?;
    if k.is_multiple_of(2) {
        return Err(Error::Precondition("k must be odd".into()));
    }
    let h = spec.help_bits();
    let mb = spec.message_bits;

    let mut b = CircuitBuilder::new(spec.dealer.n_inputs());
    let ins = b.inputs(0..spec.dealer.n_inputs());
    let mut outs = b.embed(&spec.dealer, &ins);
    let (t0, t1) = crate::ops::TAG_REAL;
    outs.push(b.constant(t0));
    outs.push(b.constant(t1));
    let d0 = ProbabilisticCircuit::deterministic(b.finish(outs), budget)?;

    let ns = spec.simulator.n_inputs();
    let vc = spec.verifier_coins;
    let total = ns + k * vc;
    budget.check("protocol-to-iid D1", total)?;
    let mut b = CircuitBuilder::new(total);
    let sim_in = b.inputs(0..ns);
    let view = b.embed(&spec.simulator, &sim_in);
    let aborted = view[h + mb];
    let live = b.not(aborted);
    let mut accepts = Vec::with_capacity(k);
    for i in 0..k {
        let mut vin = view[..h + mb].to_vec();
        vin.extend(b.inputs(ns + i * vc..ns + (i + 1) * vc));
        let acc = b.embed(&spec.verifier, &vin)[0];
        accepts.push(b.and(acc, live));
    }
    let maj = b.at_least(&accepts, k.div_ceil(2));
    let mut outs: Vec<_> = view[..h].iter().map(|&w| b.and(w, maj)).collect();
    outs.push(b.constant(false));
    outs.push(b.not(maj));
    let d1 = ProbabilisticCircuit::new(b.finish(outs), ns, budget)?;
    Ok(ProbabilisticPair {
        d0,
        d1,
        k,
        regime: Regime::Unknown,
    })
}

/// JSON rendering of a probability for trace maps.
pub fn prob_json(p: &Prob) -> Value {
    serde_json::to_value(ReportValue::from_prob(p)).expect("prob serialize")
}
