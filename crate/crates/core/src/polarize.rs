//! Polarization for mutual disjointness.
//!
//! A Γ-mixture first moves the promise gap so that it straddles the fixed
//! point φ of `f(x) = 1 - (1 - x²)²`; T-operator iterations then push the
//! two sides towards 0 and 1.

use num_bigint::BigInt;
use serde::Serialize;

use crate::budget::Budget;
use crate::circuit::Circuit;
use crate::dist::{enumerate, mut_disjointness, statistical_difference};
use crate::error::{Error, Result};
use crate::ops::{dyadic_numerator, gamma_mixture, t_operator, t_operator_inputs, Tag};
use crate::prob::{dyadic, one, serialize_opt_prob, serialize_prob, to_f64, zero, Prob};

/// The fixed point `(√5 - 1) / 2` of [`f`].
pub fn phi() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// One T-iteration's bound: `1 - (1 - x²)²`.
pub fn f(x: f64) -> f64 {
    let s = 1.0 - x * x;
    1.0 - s * s
}

pub fn f_exact(x: &Prob) -> Prob {
    let s = one() - x * x;
    one() - &s * &s
}

/// Same-tag mixture formula `u²δ + 2u(1-u)`.
pub fn mixture_f(u: f64, delta: f64) -> f64 {
    u * u * delta + 2.0 * u * (1.0 - u)
}

/// Cross-tag mixture formula `u²δ + 2u(1-u) + (1-u)²`.
pub fn mixture_g(u: f64, delta: f64) -> f64 {
    1.0 - u * u * (1.0 - delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TagChoice {
    SameTag,
    CrossTag,
}

impl TagChoice {
    /// The reserved symbol used by the `Y` side; `X` always uses Γ.
    pub fn y_tag(self) -> Tag {
        match self {
            TagChoice::SameTag => Tag::Gamma,
            TagChoice::CrossTag => Tag::GammaPrime,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct U0Solution {
    pub delta: f64,
    pub tag_choice: TagChoice,
    /// Root of the mixture formula in floating point.
    pub root: f64,
    #[serde(serialize_with = "serialize_prob")]
    pub u0: Prob,
    pub coin_bits: u32,
    pub root_residual: f64,
    pub snapped_residual: f64,
}

fn check_promise(a: &Prob, b: &Prob) -> Result<()> {
    if b <= a {
        return Err(Error::Precondition("requires b > a".into()));
    }
    if a <= &zero() || b >= &one() {
        return Err(Error::Precondition("requires 0 < a < b < 1".into()));
    }
    Ok(())
}

/// Solves the mixture formula for `u0` with `f(u0, δ) = φ` (δ > φ) or
/// `g(u0, δ) = φ` (δ < φ), `δ = (a + b) / 2`, then snaps to the nearest
/// dyadic with `coin_bits` bits.
pub fn solve_u0(a: &Prob, b: &Prob, coin_bits: u32) -> Result<U0Solution> {
    check_promise(a, b)?;
    if coin_bits > 62 {
        return Err(Error::Precondition("at most 62 coin bits".into()));
    }
    let delta = to_f64(&((a + b) / Prob::from_integer(2.into())));
    let p = phi();
    let (tag_choice, root, formula): (_, _, fn(f64, f64) -> f64) = if delta > p {
        // (2 - δ)u² - 2u + φ = 0, smaller root.
        let k = 2.0 - delta;
        let root = (1.0 - (1.0 - k * p).sqrt()) / k;
        (TagChoice::SameTag, root, mixture_f)
    } else if delta < p {
        (
            TagChoice::CrossTag,
            ((1.0 - p) / (1.0 - delta)).sqrt(),
            mixture_g,
        )
    } else {
        (TagChoice::SameTag, 1.0, mixture_f)
    };
    let scale = (1u64 << coin_bits) as f64;
    let s = (root * scale).round().clamp(0.0, scale) as u64;
    let u0 = dyadic(BigInt::from(s), coin_bits);
    let snapped = s as f64 / scale;
    Ok(U0Solution {
        delta,
        tag_choice,
        root,
        u0,
        coin_bits,
        root_residual: (formula(root, delta) - p).abs(),
        snapped_residual: (formula(snapped, delta) - p).abs(),
    })
}

/// Exact effect of the mixture on an `(SD, mut-Disj)` pair of values: the
/// real part scales by `u`, and with distinct tags the `1 - u` reserved mass
/// is fully disjoint.
pub fn mixture_bound(value: &Prob, u: &Prob, tag: TagChoice) -> Prob {
    match tag {
        TagChoice::SameTag => u * value,
        TagChoice::CrossTag => u * value + (one() - u),
    }
}

/// Ideal recentring weight: maps `δ = (a+b)/2` exactly onto φ under
/// [`mixture_bound`].
pub fn recentring_weight(a: &Prob, b: &Prob) -> Result<(f64, TagChoice)> {
    check_promise(a, b)?;
    let delta = to_f64(&((a + b) / Prob::from_integer(2.into())));
    let p = phi();
    if delta >= p {
        Ok((p / delta, TagChoice::SameTag))
    } else {
        Ok(((1.0 - p) / (1.0 - delta), TagChoice::CrossTag))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarizationPlan {
    #[serde(serialize_with = "serialize_prob")]
    pub a: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub b: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub u0: Prob,
    pub coin_bits: u32,
    pub tag_choice: TagChoice,
    pub t_iterations: usize,
    pub final_gap: u32,
    pub budget: usize,
    /// Input bits after the mixture and after each T-iteration.
    pub input_bits: Vec<usize>,
    /// Predicted Yes-side SD upper bound, same indexing as `input_bits`.
    pub predicted_yes: Vec<f64>,
    /// Predicted No-side mut-Disj lower bound.
    pub predicted_no: Vec<f64>,
    pub reaches_target: bool,
    /// Input bits the target would need with this mixture, if finite.
    pub bits_for_target: Option<usize>,
}

impl PolarizationPlan {
    pub fn predicted_gap(&self) -> (f64, f64) {
        (
            *self.predicted_yes.last().unwrap(),
            *self.predicted_no.last().unwrap(),
        )
    }
}

const MAX_PLAN_COIN_BITS: u32 = 16;
const MAX_ITERATIONS: usize = 64;

fn target_met(yes: f64, no: f64, k: u32) -> bool {
    let eps = 0.5f64.powi(k as i32);
    yes <= eps && no >= 1.0 - eps
}

/// Chooses a dyadic mixture weight and iteration count for arguments with
/// at most `n_inputs` input bits. Prefers the cheapest plan that reaches
/// `(2^-k, 1 - 2^-k)`; otherwise the plan closest to it within budget.
pub fn plan(
    a: &Prob,
    b: &Prob,
    k: u32,
    n_inputs: usize,
    budget: &Budget,
) -> Result<PolarizationPlan> {
    let (ideal, tag) = recentring_weight(a, b)?;
    let p = phi();
    let mut best: Option<((u8, f64, usize), PolarizationPlan)> = None;
    for t in 0..=MAX_PLAN_COIN_BITS {
        let n1 = n_inputs + t as usize;
        if n1 > budget.max_input_bits {
            break;
        }
        let scale = (1u64 << t) as f64;
        let lo = (ideal * scale).floor() as u64;
        for s in [lo, lo + 1] {
            if s > 1u64 << t {
                continue;
            }
            let u = dyadic(BigInt::from(s), t);
            let ya = to_f64(&mixture_bound(a, &u, tag));
            let nb = to_f64(&mixture_bound(b, &u, tag));
            if !(ya < p && nb > p) {
                continue;
            }
            let mut bits = vec![n1];
            let mut yes = vec![ya];
            let mut no = vec![nb];
            let mut needed = None;
            while bits.len() <= MAX_ITERATIONS {
                let (y, n) = (*yes.last().unwrap(), *no.last().unwrap());
                let cur = *bits.last().unwrap();
                if target_met(y, n, k) {
                    needed = Some(cur);
                    break;
                }
                let next = t_operator_inputs(cur);
                if next > budget.max_input_bits {
                    break;
                }
                bits.push(next);
                yes.push(f(y));
                no.push(f(n));
            }
            let reaches = needed.is_some();
            let bits_for_target = needed.or_else(|| {
                let (mut y, mut n, mut cur) = (
                    *yes.last().unwrap(),
                    *no.last().unwrap(),
                    bits[bits.len() - 1],
                );
                for _ in 0..MAX_ITERATIONS {
                    if target_met(y, n, k) {
                        return Some(cur);
                    }
                    cur = cur.checked_mul(4)?.checked_add(2)?;
                    y = f(y);
                    n = f(n);
                }
                None
            });
            let (y, n) = (*yes.last().unwrap(), *no.last().unwrap());
            let score = if reaches {
                (0, 0.0, *bits.last().unwrap())
            } else {
                (1, y.max(1.0 - n), *bits.last().unwrap())
            };
            let candidate = PolarizationPlan {
                a: a.clone(),
                b: b.clone(),
                u0: u,
                coin_bits: t,
                tag_choice: tag,
                t_iterations: bits.len() - 1,
                final_gap: k,
                budget: budget.max_input_bits,
                input_bits: bits,
                predicted_yes: yes,
                predicted_no: no,
                reaches_target: reaches,
                bits_for_target,
            };
            let better = match &best {
                None => true,
                Some((sc, _)) => score.partial_cmp(sc) == Some(std::cmp::Ordering::Less),
            };
            if better {
                best = Some((score, candidate));
            }
        }
    }
    best.map(|(_, p)| p).ok_or(Error::BudgetExceeded {
        what: "polarization mixture".into(),
        needed: n_inputs + 1,
        budget: budget.max_input_bits,
    })
}

/// One measured stage of a polarization run.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub stage: String,
    pub input_bits: usize,
    #[serde(serialize_with = "serialize_prob")]
    pub sd: Prob,
    #[serde(serialize_with = "serialize_prob")]
    pub mut_disj: Prob,
    /// Upper bound on `sd` implied by the previous measured stage.
    #[serde(serialize_with = "serialize_opt_prob")]
    pub sd_bound: Option<Prob>,
    /// Lower bound on `mut_disj` implied by the previous measured stage.
    #[serde(serialize_with = "serialize_opt_prob")]
    pub mut_disj_bound: Option<Prob>,
    pub respects_recurrence: bool,
}

#[derive(Debug, Clone)]
pub struct PolarizationRun {
    pub x: Circuit,
    pub y: Circuit,
    pub plan: PolarizationPlan,
    pub steps: Vec<StepRecord>,
}

impl PolarizationRun {
    pub fn final_step(&self) -> &StepRecord {
        self.steps.last().unwrap()
    }

    pub fn respects_recurrence(&self) -> bool {
        self.steps.iter().all(|s| s.respects_recurrence)
    }
}

fn measure(x: &Circuit, y: &Circuit, budget: &Budget) -> Result<(Prob, Prob)> {
    let (dx, dy) = (enumerate(x, budget)?, enumerate(y, budget)?);
    Ok((
        statistical_difference(&dx, &dy)?,
        mut_disjointness(&dx, &dy)?,
    ))
}

/// Executes `plan` on `(x, y)`, measuring every stage exactly.
pub fn run_plan(
    x: &Circuit,
    y: &Circuit,
    plan: &PolarizationPlan,
    budget: &Budget,
) -> Result<PolarizationRun> {
    dyadic_numerator(&plan.u0, plan.coin_bits)?;
    let (sd0, md0) = measure(x, y, budget)?;
    let mut steps = vec![StepRecord {
        stage: "input".into(),
        input_bits: x.n_inputs().max(y.n_inputs()),
        sd: sd0.clone(),
        mut_disj: md0.clone(),
        sd_bound: None,
        mut_disj_bound: None,
        respects_recurrence: true,
    }];
    let mut cx = gamma_mixture(x, &plan.u0, plan.coin_bits, Tag::Gamma, budget)?;
    let mut cy = gamma_mixture(y, &plan.u0, plan.coin_bits, plan.tag_choice.y_tag(), budget)?;
    let (sd, md) = measure(&cx, &cy, budget)?;
    let sb = mixture_bound(&sd0, &plan.u0, plan.tag_choice);
    let mb = mixture_bound(&md0, &plan.u0, plan.tag_choice);
    steps.push(StepRecord {
        stage: "mixture".into(),
        input_bits: cx.n_inputs().max(cy.n_inputs()),
        respects_recurrence: sd <= sb && md >= mb,
        sd,
        mut_disj: md,
        sd_bound: Some(sb),
        mut_disj_bound: Some(mb),
    });
    for i in 1..=plan.t_iterations {
        let pair = t_operator(&cx, &cy, budget)?;
        cx = pair.a;
        cy = pair.b;
        let (sd, md) = measure(&cx, &cy, budget)?;
        let prev = steps.last().unwrap();
        let sb = f_exact(&prev.sd);
        let mb = f_exact(&prev.mut_disj);
        steps.push(StepRecord {
            stage: format!("t-operator {i}"),
            input_bits: cx.n_inputs().max(cy.n_inputs()),
            respects_recurrence: sd <= sb && md >= mb,
            sd,
            mut_disj: md,
            sd_bound: Some(sb),
            mut_disj_bound: Some(mb),
        });
    }
    Ok(PolarizationRun {
        x: cx,
        y: cy,
        plan: plan.clone(),
        steps,
    })
}

/// Runs the best plan available within `budget` whether or not it reaches
/// the target gap.
pub fn polarize_best_effort(
    x: &Circuit,
    y: &Circuit,
    a: &Prob,
    b: &Prob,
    k: u32,
    budget: &Budget,
) -> Result<PolarizationRun> {
    let p = plan(a, b, k, x.n_inputs().max(y.n_inputs()), budget)?;
    run_plan(x, y, &p, budget)
}

/// Polarizes `(x, y)` to `(2^-k, 1 - 2^-k)`; fails with
/// [`Error::BudgetExceeded`] naming the achievable gap if the budget is too
/// small.
pub fn polarize_mut_iid(
    x: &Circuit,
    y: &Circuit,
    a: &Prob,
    b: &Prob,
    k: u32,
    budget: &Budget,
) -> Result<PolarizationRun> {
    let p = plan(a, b, k, x.n_inputs().max(y.n_inputs()), budget)?;
    if !p.reaches_target {
        let (yes, no) = p.predicted_gap();
        return Err(Error::BudgetExceeded {
            what: format!(
                "polarization to k = {k} (achievable within budget: SD <= {yes:.6}, mut-Disj >= {no:.6} after {} T-iterations)",
                p.t_iterations
            ),
            needed: p.bits_for_target.unwrap_or(usize::MAX),
            budget: budget.max_input_bits,
        });
    }
    run_plan(x, y, &p, budget)
}
