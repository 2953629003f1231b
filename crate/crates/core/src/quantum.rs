//! Density matrices on a few qubits.
//!
//! `n` is always the qubit count; `I` below is the totally mixed state
//! `1/2^n` times the identity.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const INVARIANT_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    entries: DMatrix<C64>,
}

fn dim(qubits: usize) -> usize {
    1usize << qubits
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(qubits: usize, entries: DMatrix<C64>) -> Result<DensityMatrix> {
        let d = dim(qubits);
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::InvalidState(format!(
                "expected {d}x{d} matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..d {
            for j in 0..d {
                if (entries[(i, j)] - entries[(j, i)].conj()).norm() > INVARIANT_TOL {
                    return Err(Error::InvalidState(format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > INVARIANT_TOL || tr.im.abs() > INVARIANT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min < -INVARIANT_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(DensityMatrix { qubits, entries })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn maximally_mixed(qubits: usize) -> DensityMatrix {
        let d = dim(qubits);
        DensityMatrix {
            qubits,
            entries: DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0)),
        }
    }

    /// `|ψ⟩⟨ψ|` for a vector normalized here.
    pub fn pure(qubits: usize, psi: &[C64]) -> Result<DensityMatrix> {
        let d = dim(qubits);
        if psi.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: psi.len(),
            });
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(d, psi.iter().map(|z| z / norm));
        DensityMatrix::new(qubits, &v * v.adjoint())
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(qubits: usize) -> DensityMatrix {
        let mut psi = vec![C64::new(0.0, 0.0); dim(qubits)];
        psi[0] = C64::new(1.0, 0.0);
        DensityMatrix::pure(qubits, &psi).expect("basis state")
    }

    /// `diag(p)`, for `p` a probability vector.
    pub fn diagonal(qubits: usize, p: &[f64]) -> Result<DensityMatrix> {
        let d = dim(qubits);
        if p.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: p.len(),
            });
        }
        let v = nalgebra::DVector::from_iterator(d, p.iter().map(|&x| C64::new(x, 0.0)));
        DensityMatrix::new(qubits, DMatrix::from_diagonal(&v))
    }

    /// `(1-p)·ρ + p·I`.
    pub fn depolarize(&self, p: f64) -> DensityMatrix {
        let mixed = DensityMatrix::maximally_mixed(self.qubits);
        DensityMatrix {
            qubits: self.qubits,
            entries: &self.entries * C64::new(1.0 - p, 0.0) + mixed.entries * C64::new(p, 0.0),
        }
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &DMatrix<C64>) -> DensityMatrix {
        let m = u * &self.entries * u.adjoint();
        // Re-symmetrize to stay within tolerance after many products.
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        DensityMatrix {
            qubits: self.qubits,
            entries: m,
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(
            self.qubits,
            self.eigenvalues().into_iter().map(|l| (l, 1)).collect(),
        )
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let d = dim(self.qubits);
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.entries[(i, j)];
                out.push(serde_json::json!([z.re, z.im]));
            }
        }
        serde_json::Value::Array(out)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<DensityMatrix> {
        let pairs: Vec<[f64; 2]> = serde_json::from_value(value.clone())?;
        let len = pairs.len();
        let d = (len as f64).sqrt().round() as usize;
        if d * d != len || !d.is_power_of_two() {
            return Err(Error::InvalidState(format!("{len} entries is not 4^n")));
        }
        let qubits = d.trailing_zeros() as usize;
        let m = DMatrix::from_row_iterator(d, d, pairs.iter().map(|p| C64::new(p[0], p[1])));
        DensityMatrix::new(qubits, m)
    }
}

fn check_dims(x: &DensityMatrix, y: &DensityMatrix) -> Result<()> {
    if x.qubits != y.qubits {
        return Err(Error::WidthMismatch {
            left: x.qubits,
            right: y.qubits,
        });
    }
    Ok(())
}

/// Half the sum of absolute eigenvalues of `x - y`.
pub fn trace_distance(x: &DensityMatrix, y: &DensityMatrix) -> Result<f64> {
    check_dims(x, y)?;
    let diff = &x.entries - &y.entries;
    Ok(diff
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
        / 2.0)
}

/// Entropy in bits; eigenvalues are clipped at 0.
pub fn von_neumann_entropy(x: &DensityMatrix) -> f64 {
    x.spectrum().entropy()
}

/// Eigenvalues with multiplicities, for states too large to store densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub qubits: usize,
    pub eigenvalues: Vec<(f64, u64)>,
}

impl Spectrum {
    pub fn new(qubits: usize, eigenvalues: Vec<(f64, u64)>) -> Spectrum {
        Spectrum {
            qubits,
            eigenvalues,
        }
    }

    /// Spectrum of `(1-p)|ψ⟩⟨ψ| + p·I` for any pure `ψ`.
    pub fn depolarized_pure(qubits: u32, p: f64) -> Spectrum {
        let d = 2f64.powi(qubits as i32);
        let rest = (1u64 << qubits) - 1;
        let mut eig = vec![(1.0 - p + p / d, 1)];
        if rest > 0 {
            eig.push((p / d, rest));
        }
        Spectrum::new(qubits as usize, eig)
    }

    pub fn entropy(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&(l, k)| {
                let l = l.max(0.0);
                if l == 0.0 {
                    0.0
                } else {
                    -(k as f64) * l * l.log2()
                }
            })
            .sum()
    }

    /// Trace distance to `I`, which commutes with every state.
    pub fn distance_to_mixed(&self) -> f64 {
        let u = 0.5f64.powi(self.qubits as i32);
        self.eigenvalues
            .iter()
            .map(|&(l, k)| k as f64 * (l - u).abs())
            .sum::<f64>()
            / 2.0
    }
}

/// The two entropy implications evaluated at `α = β = ‖X − I‖_tr`.
#[derive(Debug, Clone, Serialize)]
pub struct FactCheck {
    pub qubits: usize,
    pub distance: f64,
    pub entropy: f64,
    /// `n(1 - α - 1/2^n)`.
    pub lower_bound: f64,
    /// `n - log(1/(1 - β))`.
    pub upper_bound: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn fact_check_spectrum(s: &Spectrum) -> FactCheck {
    let n = s.qubits as f64;
    let a = s.distance_to_mixed();
    let entropy = s.entropy();
    let lower_bound = n * (1.0 - a - 0.5f64.powi(s.qubits as i32));
    let upper_bound = n + (1.0 - a).log2();
    FactCheck {
        qubits: s.qubits,
        distance: a,
        entropy,
        lower_bound,
        upper_bound,
        lower_margin: entropy - lower_bound,
        upper_margin: upper_bound - entropy,
        lower_holds: entropy >= lower_bound - IDENTITY_TOL,
        upper_holds: entropy <= upper_bound + IDENTITY_TOL,
    }
}

pub fn fact_check_entropy_bounds(x: &DensityMatrix) -> FactCheck {
    fact_check_spectrum(&x.spectrum())
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian
/// matrix, with the phases of `R`'s diagonal removed.
pub fn random_unitary<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> DMatrix<C64> {
    let d = dim(qubits);
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let z = r[(i, i)];
            if z.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                z / z.norm()
            }
        } else {
            C64::new(0.0, 0.0)
        }
    });
    q * phases
}

/// `G G† / tr` with `G` a `2^n x rank` complex Gaussian matrix.
pub fn random_wishart<R: Rng + ?Sized>(qubits: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let d = dim(qubits);
    let g = DMatrix::from_fn(d, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m / C64::new(tr, 0.0);
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix { qubits, entries: m }
}

/// `U diag(p) U†` with `p` Dirichlet(1)-distributed, optionally sharpened
/// by raising to `power` and renormalizing.
pub fn random_spectral<R: Rng + ?Sized>(qubits: usize, power: i32, rng: &mut R) -> DensityMatrix {
    let d = dim(qubits);
    let raw: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect::<Vec<f64>>();
    let raw: Vec<f64> = raw.iter().map(|x: &f64| x.powi(power)).collect();
    let total: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let diag = DensityMatrix::diagonal(qubits, &p).expect("probability vector");
    diag.conjugate(&random_unitary(qubits, rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateFamily {
    Wishart,
    RankDeficient,
    Pure,
    Depolarized,
    Spectral,
}

impl StateFamily {
    pub const ALL: [StateFamily; 5] = [
        StateFamily::Wishart,
        StateFamily::RankDeficient,
        StateFamily::Pure,
        StateFamily::Depolarized,
        StateFamily::Spectral,
    ];

    pub fn sample<R: Rng + ?Sized>(self, qubits: usize, rng: &mut R) -> DensityMatrix {
        let d = dim(qubits);
        match self {
            StateFamily::Wishart => random_wishart(qubits, d, rng),
            StateFamily::RankDeficient => {
                let rank = if d > 1 { rng.random_range(1..d) } else { 1 };
                random_wishart(qubits, rank, rng)
            }
            StateFamily::Pure => random_wishart(qubits, 1, rng),
            StateFamily::Depolarized => {
                let p: f64 = rng.random();
                random_wishart(qubits, 1, rng).depolarize(p)
            }
            StateFamily::Spectral => {
                let power = rng.random_range(1..=6);
                random_spectral(qubits, power, rng)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FactSweep {
    pub qubits: usize,
    pub states: usize,
    pub lower_counterexamples: usize,
    pub upper_counterexamples: usize,
    pub min_lower_margin: f64,
    pub min_upper_margin: f64,
    /// Worst violation of the upper implication, if any.
    pub upper_witness: Option<FactCheck>,
    /// Every check in order; family `None` marks the two fixed states.
    #[serde(skip)]
    pub checks: Vec<(Option<StateFamily>, FactCheck)>,
}

/// Checks both implications on `trials` random states cycling through the
/// families, plus `I` and `|0…0⟩`.
pub fn fact_check_sweep<R: Rng + ?Sized>(qubits: usize, trials: usize, rng: &mut R) -> FactSweep {
    let mut checks = vec![
        (
            None,
            fact_check_entropy_bounds(&DensityMatrix::maximally_mixed(qubits)),
        ),
        (
            None,
            fact_check_entropy_bounds(&DensityMatrix::zero_state(qubits)),
        ),
    ];
    for i in 0..trials {
        let family = StateFamily::ALL[i % StateFamily::ALL.len()];
        checks.push((
            Some(family),
            fact_check_entropy_bounds(&family.sample(qubits, rng)),
        ));
    }
    let mut sweep = FactSweep {
        qubits,
        states: checks.len(),
        lower_counterexamples: 0,
        upper_counterexamples: 0,
        min_lower_margin: f64::INFINITY,
        min_upper_margin: f64::INFINITY,
        upper_witness: None,
        checks: Vec::new(),
    };
    for (_, c) in &checks {
        sweep.lower_counterexamples += !c.lower_holds as usize;
        sweep.upper_counterexamples += !c.upper_holds as usize;
        sweep.min_lower_margin = sweep.min_lower_margin.min(c.lower_margin);
        if c.upper_margin < sweep.min_upper_margin {
            sweep.min_upper_margin = c.upper_margin;
            if !c.upper_holds {
                sweep.upper_witness = Some(c.clone());
            }
        }
    }
    sweep.checks = checks;
    sweep
}

/// Below this many qubits the closeness-to-uniform instance is decided
/// directly.
pub const DIRECT_CUTOFF: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QscuMapping {
    /// Decided directly as a Yes instance (`‖X − I‖ ≤ 1/n`).
    Yes { distance: f64 },
    /// Decided directly as a No instance (`‖X − I‖ ≥ 1 − 1/n`).
    No { distance: f64 },
    /// Decided directly: the distance lies inside the promise gap.
    OutsidePromise { distance: f64 },
    /// The same state as an entropy-approximation instance.
    Qea { threshold: usize },
}

pub fn qscu_to_qea_spectrum(s: &Spectrum) -> QscuMapping {
    let n = s.qubits;
    if n >= DIRECT_CUTOFF {
        return QscuMapping::Qea { threshold: n - 3 };
    }
    let distance = s.distance_to_mixed();
    let inv = if n == 0 { 1.0 } else { 1.0 / n as f64 };
    if distance <= inv {
        QscuMapping::Yes { distance }
    } else if distance >= 1.0 - inv {
        QscuMapping::No { distance }
    } else {
        QscuMapping::OutsidePromise { distance }
    }
}

pub fn qscu_to_qea_map(x: &DensityMatrix) -> QscuMapping {
    qscu_to_qea_spectrum(&x.spectrum())
}
