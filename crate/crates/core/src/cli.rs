//! Command-line harness behind the `zkhelp` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::budget::Budget;
use crate::circuit::Circuit;
use crate::dist::{
    disjointness_prob, enumerate, epsilon_of, shannon_entropy, statistical_closeness,
    statistical_difference,
};
use crate::error::{Error, Result};
use crate::generate::{ea_instance, no_iid, random_instance, yes_iid, Generated};
use crate::ops::{gamma_mixture, t_operator, tensor, xor_pair, HashFamily, Tag};
use crate::polarize::{polarize_best_effort, polarize_mut_iid};
use crate::prob::{parse_prob, Prob, ReportValue};
use crate::protocol::{build_iid_protocol, mass_outside_image, measure, run};
use crate::quantum::fact_check_sweep;
use crate::reductions::{
    ea_bar_to_iid, ed_bar_assemble, ed_bar_decompose, iid_to_mut_iid, measure_pair,
    protocol_to_iid, EaBarParams, EaBarSide, Regime,
};
use crate::report::{ExperimentConfig, Report};

fn prob_arg(s: &str) -> std::result::Result<Prob, String> {
    parse_prob(s).ok_or_else(|| format!("not a rational number: {s}"))
}

#[derive(Parser, Debug)]
#[command(
    name = "zkhelp",
    version,
    about = "Exact desk-scale distribution and zero-knowledge reduction toolkit"
)]
pub struct Cli {
    /// Report path; stdout when omitted.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TagArg {
    Gamma,
    GammaPrime,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Full,
    Toeplitz,
}

impl From<FamilyArg> for HashFamily {
    fn from(f: FamilyArg) -> HashFamily {
        match f {
            FamilyArg::Full => HashFamily::Full,
            FamilyArg::Toeplitz => HashFamily::Toeplitz,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKindArg {
    YesIid,
    NoIid,
    EaInstance,
    RandomCircuit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Yes,
    No,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Statistical difference and closeness of two circuits.
    Sd {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Disjointness in both directions and mutual disjointness.
    Disj {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Shannon entropy; optionally the distribution as CSV.
    Entropy {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// `X ⊗ Y`.
    Tensor {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// XOR pair operator.
    Xor {
        #[arg(long)]
        x0: PathBuf,
        #[arg(long)]
        x1: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long)]
        measure: bool,
    },
    /// T polarization operator.
    TOp {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long)]
        measure: bool,
    },
    /// Γ-mixture with weight `u = s / 2^coin_bits`.
    Mixture {
        #[arg(long)]
        x: PathBuf,
        #[arg(long, value_parser = prob_arg)]
        u: Prob,
        #[arg(long)]
        coin_bits: u32,
        #[arg(long, value_enum, default_value = "gamma")]
        tag: TagArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// mut-IID polarization to `(2^-k, 1 - 2^-k)`.
    Polarize {
        #[arg(long, value_parser = prob_arg)]
        a: Prob,
        #[arg(long, value_parser = prob_arg)]
        b: Prob,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
        /// Run the best plan within budget even if it misses the target.
        #[arg(long)]
        best_effort: bool,
    },
    /// Promise-problem reductions.
    Reduce {
        #[command(subcommand)]
        which: ReduceCommand,
    },
    /// Help-based protocol measurement.
    Protocol {
        #[command(subcommand)]
        which: ProtocolCommand,
    },
    /// Density-matrix checks.
    Quantum {
        #[command(subcommand)]
        which: QuantumCommand,
    },
    /// Certified instance generation.
    Generate {
        #[arg(long, value_enum)]
        kind: GenKindArg,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Target SD (yes-iid) or Disj (no-iid).
        #[arg(long, value_parser = prob_arg)]
        target: Option<Prob>,
        /// Entropy threshold (ea-instance).
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, value_enum, default_value = "yes")]
        regime: RegimeArg,
        #[arg(long, default_value_t = 16)]
        gates: usize,
        #[arg(long, default_value_t = 2)]
        outputs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_prefix: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ReduceCommand {
    /// Entropy-approximation complement to IID.
    EaBarToIid {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value = "full")]
        family: FamilyArg,
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long)]
        measure: bool,
    },
    /// IID to mut-IID.
    IidToMut {
        #[arg(long)]
        x0: PathBuf,
        #[arg(long)]
        x1: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long)]
        measure: bool,
    },
    /// Entropy-difference complement: decomposition, optionally assembly.
    EdBar {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
        /// Also assemble; needs an EA-side sub-reduction, which the CLI
        /// does not provide.
        #[arg(long)]
        assemble: bool,
    },
    /// Compile the IID protocol on `(x, y)` into a probabilistic pair.
    ProtocolToIid {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        out_prefix: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ProtocolCommand {
    /// Exact completeness, soundness, deviation and abort mass.
    Run {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Security parameter the pair was polarized for.
        #[arg(long)]
        k: u32,
        /// Sampled executions to include in the report.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum QuantumCommand {
    /// Sweep the entropy/trace-distance implications over random states.
    FactCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    Circuit::parse(&text)
}

fn write_circuit(path: &Path, c: &Circuit, cfg: &mut ExperimentConfig, key: &str) -> Result<()> {
    std::fs::write(path, c.serialize())?;
    cfg.output(key, path);
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn rv(p: &Prob) -> ReportValue {
    ReportValue::from_prob(p)
}

fn write_generated(g: &Generated, prefix: &Path, cfg: &mut ExperimentConfig) -> Result<()> {
    write_circuit(&with_suffix(prefix, "_x.ckt"), &g.x, cfg, "x")?;
    if let Some(y) = &g.y {
        write_circuit(&with_suffix(prefix, "_y.ckt"), y, cfg, "y")?;
    }
    let cert = with_suffix(prefix, "_cert.json");
    let mut text = serde_json::to_string_pretty(&g.certificate)?;
    text.push('\n');
    std::fs::write(&cert, text)?;
    cfg.output("certificate", &cert);
    Ok(())
}

fn dispatch(cli: Cli, budget: Budget) -> Result<Report> {
    let bits = budget.max_input_bits;
    let report = match cli.command {
        Command::Sd { x, y } => {
            let cfg = ExperimentConfig::new("sd", bits)
                .input("x", &x)
                .input("y", &y);
            cfg.validate()?;
            let (dx, dy) = (
                enumerate(&read_circuit(&x)?, &budget)?,
                enumerate(&read_circuit(&y)?, &budget)?,
            );
            let sd = statistical_difference(&dx, &dy)?;
            let sc = statistical_closeness(&dx, &dy)?;
            Report::new(cfg, json!({"sd": rv(&sd), "sc": rv(&sc)}))
        }
        Command::Disj { x, y } => {
            let cfg = ExperimentConfig::new("disj", bits)
                .input("x", &x)
                .input("y", &y);
            let s = measure_pair(&read_circuit(&x)?, &read_circuit(&y)?, &budget)?;
            Report::new(cfg, s)
        }
        Command::Entropy { x, csv } => {
            let mut cfg = ExperimentConfig::new("entropy", bits).input("x", &x);
            let d = enumerate(&read_circuit(&x)?, &budget)?;
            if let Some(p) = &csv {
                std::fs::write(p, d.to_csv())?;
                cfg.output("csv", p);
            }
            Report::new(
                cfg,
                json!({"entropy": shannon_entropy(&d), "support": d.support_len(), "width": d.width()}),
            )
        }
        Command::Tensor { x, y, out } => {
            let mut cfg = ExperimentConfig::new("tensor", bits)
                .input("x", &x)
                .input("y", &y);
            let c = tensor(&read_circuit(&x)?, &read_circuit(&y)?, &budget)?;
            write_circuit(&out, &c, &mut cfg, "out")?;
            Report::new(
                cfg,
                json!({"n_inputs": c.n_inputs(), "n_outputs": c.n_outputs()}),
            )
        }
        Command::Xor {
            x0,
            x1,
            out_prefix,
            measure,
        } => {
            let mut cfg = ExperimentConfig::new("xor", bits)
                .input("x0", &x0)
                .input("x1", &x1);
            let (c0, c1) = (read_circuit(&x0)?, read_circuit(&x1)?);
            let p = xor_pair(&c0, &c1, &budget)?;
            write_circuit(&with_suffix(&out_prefix, "_a.ckt"), &p.a, &mut cfg, "a")?;
            write_circuit(&with_suffix(&out_prefix, "_b.ckt"), &p.b, &mut cfg, "b")?;
            let mut results = json!({"n_inputs": p.a.n_inputs(), "provenance": p.provenance});
            if measure {
                results["input"] = serde_json::to_value(measure_pair(&c0, &c1, &budget)?)?;
                results["output"] = serde_json::to_value(measure_pair(&p.a, &p.b, &budget)?)?;
            }
            Report::new(cfg.param("measure", measure), results)
        }
        Command::TOp {
            x,
            y,
            out_prefix,
            measure,
        } => {
            let mut cfg = ExperimentConfig::new("t-op", bits)
                .input("x", &x)
                .input("y", &y);
            let (cx, cy) = (read_circuit(&x)?, read_circuit(&y)?);
            let p = t_operator(&cx, &cy, &budget)?;
            write_circuit(&with_suffix(&out_prefix, "_a.ckt"), &p.a, &mut cfg, "a")?;
            write_circuit(&with_suffix(&out_prefix, "_b.ckt"), &p.b, &mut cfg, "b")?;
            let mut results = json!({"n_inputs": p.a.n_inputs(), "provenance": p.provenance});
            if measure {
                results["input"] = serde_json::to_value(measure_pair(&cx, &cy, &budget)?)?;
                results["output"] = serde_json::to_value(measure_pair(&p.a, &p.b, &budget)?)?;
            }
            Report::new(cfg.param("measure", measure), results)
        }
        Command::Mixture {
            x,
            u,
            coin_bits,
            tag,
            out,
        } => {
            let mut cfg = ExperimentConfig::new("mixture", bits)
                .input("x", &x)
                .param("u", rv(&u))
                .param("coin_bits", coin_bits)
                .param("tag", format!("{tag:?}"));
            let t = match tag {
                TagArg::Gamma => Tag::Gamma,
                TagArg::GammaPrime => Tag::GammaPrime,
            };
            let c = gamma_mixture(&read_circuit(&x)?, &u, coin_bits, t, &budget)?;
            write_circuit(&out, &c, &mut cfg, "out")?;
            Report::new(
                cfg,
                json!({"n_inputs": c.n_inputs(), "n_outputs": c.n_outputs()}),
            )
        }
        Command::Polarize {
            a,
            b,
            k,
            x,
            y,
            out_prefix,
            best_effort,
        } => {
            let mut cfg = ExperimentConfig::new("polarize", bits)
                .input("x", &x)
                .input("y", &y)
                .param("a", rv(&a))
                .param("b", rv(&b))
                .param("k", k)
                .param("best_effort", best_effort);
            let (cx, cy) = (read_circuit(&x)?, read_circuit(&y)?);
            let run = if best_effort {
                polarize_best_effort(&cx, &cy, &a, &b, k, &budget)?
            } else {
                polarize_mut_iid(&cx, &cy, &a, &b, k, &budget)?
            };
            write_circuit(&with_suffix(&out_prefix, "_x.ckt"), &run.x, &mut cfg, "x")?;
            write_circuit(&with_suffix(&out_prefix, "_y.ckt"), &run.y, &mut cfg, "y")?;
            Report::new(
                cfg,
                json!({
                    "plan": run.plan,
                    "steps": run.steps,
                    "respects_recurrence": run.respects_recurrence(),
                }),
            )
        }
        Command::Reduce { which } => reduce(which, budget)?,
        Command::Protocol {
            which:
                ProtocolCommand::Run {
                    x,
                    y,
                    k,
                    samples,
                    seed,
                },
        } => {
            let cfg = ExperimentConfig::new("protocol run", bits)
                .input("x", &x)
                .input("y", &y)
                .param("k", k)
                .param("samples", samples);
            let cfg = ExperimentConfig {
                seed: Some(seed),
                ..cfg
            };
            let (cx, cy) = (read_circuit(&x)?, read_circuit(&y)?);
            let spec = build_iid_protocol(&cx, &cy, &budget)?;
            let m = measure(&spec, &budget)?;
            let pair = measure_pair(&cx, &cy, &budget)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let runs = (0..samples)
                .map(|_| run(&spec, &mut rng, &budget))
                .collect::<Result<Vec<_>>>()?;
            Report::new(
                cfg,
                json!({
                    "completeness": rv(&m.completeness),
                    "soundness": rv(&m.soundness),
                    "deviation": rv(&m.deviation),
                    "abort_mass": rv(&m.abort_mass),
                    "pair": pair,
                    "mass_outside_image": rv(&mass_outside_image(&cx, &cy, &budget)?),
                    "runs": runs,
                }),
            )
        }
        Command::Quantum {
            which:
                QuantumCommand::FactCheck {
                    n,
                    trials,
                    seed,
                    csv,
                },
        } => {
            if n == 0 || n > 6 {
                return Err(Error::Precondition(
                    "quantum fact-check supports 1..=6 qubits".into(),
                ));
            }
            let mut cfg = ExperimentConfig::new("quantum fact-check", bits)
                .param("n", n)
                .param("trials", trials);
            cfg.seed = Some(seed);
            let sweep = fact_check_sweep(n, trials, &mut ChaCha8Rng::seed_from_u64(seed));
            if let Some(p) = &csv {
                let mut text = String::from("index,family,distance,entropy,lower_bound,upper_bound,lower_holds,upper_holds\n");
                for (i, (fam, c)) in sweep.checks.iter().enumerate() {
                    let fam = fam.map(|f| {
                        serde_json::to_value(f)
                            .unwrap()
                            .as_str()
                            .unwrap()
                            .to_string()
                    });
                    text.push_str(&format!(
                        "{i},{},{:.12},{:.12},{:.12},{:.12},{},{}\n",
                        fam.unwrap_or_else(|| "fixed".into()),
                        c.distance,
                        c.entropy,
                        c.lower_bound,
                        c.upper_bound,
                        c.lower_holds,
                        c.upper_holds
                    ));
                }
                std::fs::write(p, text)?;
                cfg.output("csv", p);
            }
            Report::new(cfg, sweep)
        }
        Command::Generate {
            kind,
            n,
            target,
            t,
            regime,
            gates,
            outputs,
            seed,
            out_prefix,
        } => {
            let mut cfg = ExperimentConfig::new("generate", bits)
                .param("kind", format!("{kind:?}"))
                .param("n", n);
            cfg.seed = Some(seed);
            let need_target = || {
                target
                    .clone()
                    .ok_or_else(|| Error::Precondition("--target is required for this kind".into()))
            };
            let g = match kind {
                GenKindArg::YesIid => yes_iid(n, &need_target()?, seed, &budget)?,
                GenKindArg::NoIid => no_iid(n, &need_target()?, seed, &budget)?,
                GenKindArg::EaInstance => {
                    let r = match regime {
                        RegimeArg::Yes => Regime::Yes,
                        RegimeArg::No => Regime::No,
                    };
                    ea_instance(n, t, r, seed, &budget)?
                }
                GenKindArg::RandomCircuit => random_instance(n, gates, outputs, seed, &budget)?,
            };
            write_generated(&g, &out_prefix, &mut cfg)?;
            Report::new(cfg, &g.certificate)
        }
    };
    Ok(report)
}

fn reduce(which: ReduceCommand, budget: Budget) -> Result<Report> {
    let bits = budget.max_input_bits;
    Ok(match which {
        ReduceCommand::EaBarToIid {
            x,
            t,
            s,
            k,
            family,
            out_prefix,
            measure,
        } => {
            let mut cfg = ExperimentConfig::new("reduce ea-bar-to-iid", bits)
                .input("x", &x)
                .param("t", t)
                .param("s", s)
                .param("k", k)
                .param("family", format!("{family:?}"));
            let cx = read_circuit(&x)?;
            let params = EaBarParams {
                t,
                s,
                k,
                family: family.into(),
            };
            let (pair, mut trace) = ea_bar_to_iid(&cx, &params, &budget)?;
            write_circuit(&with_suffix(&out_prefix, "_z.ckt"), &pair.x, &mut cfg, "z")?;
            write_circuit(
                &with_suffix(&out_prefix, "_zp.ckt"),
                &pair.y,
                &mut cfg,
                "z_prime",
            )?;
            trace.before.insert(
                "entropy".into(),
                json!(shannon_entropy(&enumerate(&cx, &budget)?)),
            );
            if measure {
                trace.record_after(&pair, &budget)?;
            }
            Report::new(cfg, trace)
        }
        ReduceCommand::IidToMut {
            x0,
            x1,
            out_prefix,
            measure,
        } => {
            let mut cfg = ExperimentConfig::new("reduce iid-to-mut", bits)
                .input("x0", &x0)
                .input("x1", &x1);
            let (c0, c1) = (read_circuit(&x0)?, read_circuit(&x1)?);
            let (pair, mut trace) = iid_to_mut_iid(&c0, &c1, &budget)?;
            write_circuit(&with_suffix(&out_prefix, "_a.ckt"), &pair.x, &mut cfg, "a")?;
            write_circuit(&with_suffix(&out_prefix, "_b.ckt"), &pair.y, &mut cfg, "b")?;
            if measure {
                trace.record_before(&c0, &c1, &budget)?;
                trace.record_after(&pair, &budget)?;
            }
            Report::new(cfg, trace)
        }
        ReduceCommand::EdBar {
            x,
            y,
            out_prefix,
            assemble,
        } => {
            let mut cfg = ExperimentConfig::new("reduce ed-bar", bits)
                .input("x", &x)
                .input("y", &y)
                .param("assemble", assemble);
            let sk = ed_bar_decompose(&read_circuit(&x)?, &read_circuit(&y)?, &budget)?;
            if assemble {
                let side = EaBarSide {
                    s: 1,
                    k: 1,
                    family: HashFamily::Full,
                };
                ed_bar_assemble(&sk, &side, None, &budget)?;
            }
            if let Some(first) = sk.first() {
                write_circuit(
                    &with_suffix(&out_prefix, "_x3.ckt"),
                    &first.x,
                    &mut cfg,
                    "x3",
                )?;
                write_circuit(
                    &with_suffix(&out_prefix, "_y3.ckt"),
                    &first.y,
                    &mut cfg,
                    "y3",
                )?;
            }
            let thresholds: Vec<usize> = sk.iter().map(|s| s.t).collect();
            Report::new(
                cfg,
                json!({"skeletons": sk.len(), "thresholds": thresholds}),
            )
        }
        ReduceCommand::ProtocolToIid {
            x,
            y,
            k,
            out_prefix,
        } => {
            let mut cfg = ExperimentConfig::new("reduce protocol-to-iid", bits)
                .input("x", &x)
                .input("y", &y)
                .param("k", k);
            let spec = build_iid_protocol(&read_circuit(&x)?, &read_circuit(&y)?, &budget)?;
            let pair = protocol_to_iid(&spec, k, &budget)?;
            write_circuit(
                &with_suffix(&out_prefix, "_d0.ckt"),
                pair.d0.base(),
                &mut cfg,
                "d0",
            )?;
            write_circuit(
                &with_suffix(&out_prefix, "_d1.ckt"),
                pair.d1.base(),
                &mut cfg,
                "d1",
            )?;
            let sd = statistical_difference(&pair.d0.distribution(), &pair.d1.distribution())?;
            Report::new(
                cfg,
                json!({
                    "d0_args": pair.d0.n_args(),
                    "d1_args": pair.d1.n_args(),
                    "d1_coins": pair.d1.n_coins(),
                    "epsilon_d1": rv(&epsilon_of(&pair.d1)?),
                    "sd": rv(&sd),
                    "disjointness_prob": rv(&disjointness_prob(&pair.d0, &pair.d1)?),
                }),
            )
        }
    })
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let report_path = cli.report.clone();
    match dispatch(cli, Budget::from_env()).and_then(|r| r.write(report_path.as_deref())) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
