//! Boolean circuits over uniform input bits.
//!
//! A [`Circuit`] maps `{0,1}^n -> {0,1}^m`; fed uniform inputs it encodes a
//! distribution over its outputs. Circuits are immutable and valid by
//! construction: gates may only reference inputs or strictly earlier gates.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WireRef {
    Input(usize),
    Gate(usize),
}

impl fmt::Display for WireRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WireRef::Input(i) => write!(f, "i{i}"),
            WireRef::Gate(g) => write!(f, "g{g}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateOp {
    And,
    Or,
    Xor,
    Not,
    Const0,
    Const1,
}

impl GateOp {
    pub fn arity(self) -> usize {
        match self {
            GateOp::And | GateOp::Or | GateOp::Xor => 2,
            GateOp::Not => 1,
            GateOp::Const0 | GateOp::Const1 => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Or => "OR",
            GateOp::Xor => "XOR",
            GateOp::Not => "NOT",
            GateOp::Const0 => "CONST0",
            GateOp::Const1 => "CONST1",
        }
    }

    fn parse(s: &str) -> Option<GateOp> {
        Some(match s {
            "AND" => GateOp::And,
            "OR" => GateOp::Or,
            "XOR" => GateOp::Xor,
            "NOT" => GateOp::Not,
            "CONST0" => GateOp::Const0,
            "CONST1" => GateOp::Const1,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub op: GateOp,
    pub args: Vec<WireRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ForwardReference {
        gate: usize,
        arg: WireRef,
    },
    InputOutOfRange {
        location: String,
        arg: WireRef,
    },
    WrongArity {
        gate: usize,
        expected: usize,
        got: usize,
    },
    UnresolvedOutput {
        position: usize,
        wire: WireRef,
    },
    NoOutputs,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ForwardReference { gate, arg } => {
                write!(f, "forward reference: g{gate} uses {arg}")
            }
            Violation::InputOutOfRange { location, arg } => {
                write!(f, "input out of range: {location} uses {arg}")
            }
            Violation::WrongArity {
                gate,
                expected,
                got,
            } => {
                write!(f, "wrong arity: g{gate} expects {expected}, got {got}")
            }
            Violation::UnresolvedOutput { position, wire } => {
                write!(
                    f,
                    "unresolved output: position {position} references {wire}"
                )
            }
            Violation::NoOutputs => write!(f, "circuit has no outputs"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "OK");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks the structural invariants of a would-be circuit. Violations are
/// returned as data.
pub fn validate_parts(n_inputs: usize, gates: &[Gate], outputs: &[WireRef]) -> ValidationReport {
    let mut violations = Vec::new();
    for (k, gate) in gates.iter().enumerate() {
        if gate.args.len() != gate.op.arity() {
            violations.push(Violation::WrongArity {
                gate: k,
                expected: gate.op.arity(),
                got: gate.args.len(),
            });
        }
        for &arg in &gate.args {
            match arg {
                WireRef::Input(i) if i >= n_inputs => violations.push(Violation::InputOutOfRange {
                    location: format!("g{k}"),
                    arg,
                }),
                WireRef::Gate(j) if j >= k => {
                    violations.push(Violation::ForwardReference { gate: k, arg })
                }
                _ => {}
            }
        }
    }
    if outputs.is_empty() {
        violations.push(Violation::NoOutputs);
    }
    for (position, &wire) in outputs.iter().enumerate() {
        let resolved = match wire {
            WireRef::Input(i) => i < n_inputs,
            WireRef::Gate(j) => j < gates.len(),
        };
        if !resolved {
            violations.push(Violation::UnresolvedOutput { position, wire });
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    n_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<WireRef>,
}

impl Circuit {
    pub fn from_parts(n_inputs: usize, gates: Vec<Gate>, outputs: Vec<WireRef>) -> Result<Circuit> {
        let report = validate_parts(n_inputs, &gates, &outputs);
        if !report.is_ok() {
            return Err(Error::InvalidCircuit(report));
        }
        Ok(Circuit {
            n_inputs,
            gates,
            outputs,
        })
    }

    pub fn identity(n: usize) -> Circuit {
        assert!(n >= 1, "identity circuit needs at least one bit");
        Circuit {
            n_inputs: n,
            gates: Vec::new(),
            outputs: (0..n).map(WireRef::Input).collect(),
        }
    }

    /// Point distribution on `bits`, ignoring `n_inputs` uniform inputs.
    pub fn constant(bits: &[bool], n_inputs: usize) -> Circuit {
        let mut b = CircuitBuilder::new(n_inputs);
        let outs: Vec<WireRef> = bits.iter().map(|&v| b.constant(v)).collect();
        b.finish(outs)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    /// Circuit realizing `r -> table[r]` on `log2(table.len())` inputs.
    pub fn from_table(table: &[u128], width: usize) -> Result<Circuit> {
        if !table.len().is_power_of_two() {
            return Err(Error::Precondition(
                "table length must be a power of two".into(),
            ));
        }
        if width == 0 || width > 128 {
            return Err(Error::Precondition("table width must be in 1..=128".into()));
        }
        let n = table.len().trailing_zeros() as usize;
        let mut b = CircuitBuilder::new(n);
        let ins = b.inputs(0..n);
        let outs = b.lookup(&ins, table, width);
        Ok(b.finish(outs))
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[WireRef] {
        &self.outputs
    }

    pub fn validate(&self) -> ValidationReport {
        validate_parts(self.n_inputs, &self.gates, &self.outputs)
    }

    pub fn evaluate(&self, r: &[bool]) -> Result<Vec<bool>> {
        if r.len() != self.n_inputs {
            return Err(Error::LengthMismatch {
                expected: self.n_inputs,
                got: r.len(),
            });
        }
        let words: Vec<u64> = r.iter().map(|&b| if b { !0 } else { 0 }).collect();
        let mut scratch = Vec::new();
        let mut out = vec![0u64; self.outputs.len()];
        self.eval_words(&words, &mut scratch, &mut out);
        Ok(out.iter().map(|w| w & 1 == 1).collect())
    }

    /// Evaluates the input assignment whose bit `i` is `r >> i & 1`.
    pub fn evaluate_index(&self, r: u64) -> u128 {
        let words: Vec<u64> = (0..self.n_inputs)
            .map(|i| if r >> i & 1 == 1 { !0 } else { 0 })
            .collect();
        let mut scratch = Vec::new();
        let mut out = vec![0u64; self.outputs.len()];
        self.eval_words(&words, &mut scratch, &mut out);
        pack_lane(&out, 0)
    }

    /// Bitsliced evaluation: every `u64` carries 64 independent assignments.
    pub(crate) fn eval_words(&self, inputs: &[u64], scratch: &mut Vec<u64>, out: &mut [u64]) {
        debug_assert_eq!(inputs.len(), self.n_inputs);
        scratch.clear();
        scratch.reserve(self.gates.len());
        let get = |scratch: &Vec<u64>, w: WireRef| match w {
            WireRef::Input(i) => inputs[i],
            WireRef::Gate(g) => scratch[g],
        };
        for gate in &self.gates {
            let v = match gate.op {
                GateOp::And => get(scratch, gate.args[0]) & get(scratch, gate.args[1]),
                GateOp::Or => get(scratch, gate.args[0]) | get(scratch, gate.args[1]),
                GateOp::Xor => get(scratch, gate.args[0]) ^ get(scratch, gate.args[1]),
                GateOp::Not => !get(scratch, gate.args[0]),
                GateOp::Const0 => 0,
                GateOp::Const1 => !0,
            };
            scratch.push(v);
        }
        for (o, &w) in out.iter_mut().zip(&self.outputs) {
            *o = get(scratch, w);
        }
    }

    /// CKT v1 text. Canonical: no comments, LF endings, trailing newline.
    pub fn serialize(&self) -> String {
        let mut s = format!(
            "CKT v1 {} {} {}\n",
            self.n_inputs,
            self.gates.len(),
            self.outputs.len()
        );
        for (k, gate) in self.gates.iter().enumerate() {
            s.push_str(&format!("g{k} {}", gate.op.name()));
            for a in &gate.args {
                s.push_str(&format!(" {a}"));
            }
            s.push('\n');
        }
        s.push_str("OUT");
        for o in &self.outputs {
            s.push_str(&format!(" {o}"));
        }
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        let syntax = |line: usize, message: String| Error::Syntax { line, message };
        let mut lines = text
            .split('\n')
            .enumerate()
            .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

        let (hline, header) = lines
            .next()
            .ok_or_else(|| syntax(1, "missing header".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 5 || h[0] != "CKT" || h[1] != "v1" {
            return Err(syntax(hline, format!("bad header `{header}`")));
        }
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| syntax(hline, format!("bad count `{s}` in header")))
        };
        let (n_inputs, n_gates, m) = (num(h[2])?, num(h[3])?, num(h[4])?);

        let parse_ref = |line: usize, tok: &str| -> Result<WireRef> {
            let (kind, idx) = tok.split_at(1.min(tok.len()));
            let idx: usize = idx
                .parse()
                .map_err(|_| syntax(line, format!("bad wire reference `{tok}`")))?;
            match kind {
                "i" => Ok(WireRef::Input(idx)),
                "g" => Ok(WireRef::Gate(idx)),
                _ => Err(syntax(line, format!("bad wire reference `{tok}`"))),
            }
        };

        let mut gates: Vec<Gate> = Vec::with_capacity(n_gates);
        let mut outputs = None;
        for (line, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if outputs.is_some() {
                return Err(syntax(line, "content after OUT line".into()));
            }
            if toks[0] == "OUT" {
                let refs = toks[1..]
                    .iter()
                    .map(|t| parse_ref(line, t))
                    .collect::<Result<Vec<_>>>()?;
                if refs.len() != m {
                    return Err(syntax(
                        line,
                        format!("OUT lists {} refs, header declares {m}", refs.len()),
                    ));
                }
                outputs = Some((line, refs));
                continue;
            }
            let id = match parse_ref(line, toks[0])? {
                WireRef::Gate(g) => g,
                WireRef::Input(_) => {
                    return Err(syntax(line, format!("expected gate id, got `{}`", toks[0])))
                }
            };
            if id < gates.len() {
                return Err(syntax(line, format!("duplicate gate id g{id}")));
            }
            if id != gates.len() {
                return Err(syntax(
                    line,
                    format!(
                        "gate ids must be sequential: expected g{}, got g{id}",
                        gates.len()
                    ),
                ));
            }
            let op = toks
                .get(1)
                .and_then(|t| GateOp::parse(t))
                .ok_or_else(|| syntax(line, format!("unknown operation in `{l}`")))?;
            let args = toks[2..]
                .iter()
                .map(|t| parse_ref(line, t))
                .collect::<Result<Vec<_>>>()?;
            if args.len() != op.arity() {
                return Err(Error::Arity {
                    line,
                    op: op.name().into(),
                    expected: op.arity(),
                    got: args.len(),
                });
            }
            for &a in &args {
                let ok = match a {
                    WireRef::Input(i) => i < n_inputs,
                    WireRef::Gate(j) => j < id,
                };
                if !ok {
                    return Err(syntax(line, format!("g{id} references {a} out of range")));
                }
            }
            gates.push(Gate { op, args });
        }
        let (oline, outputs) = outputs.ok_or_else(|| syntax(hline, "missing OUT line".into()))?;
        if gates.len() != n_gates {
            return Err(syntax(
                oline,
                format!("header declares {n_gates} gates, found {}", gates.len()),
            ));
        }
        Circuit::from_parts(n_inputs, gates, outputs).map_err(|e| match e {
            Error::InvalidCircuit(r) => syntax(oline, r.to_string()),
            other => other,
        })
    }
}

pub(crate) fn pack_lane(words: &[u64], lane: u32) -> u128 {
    let mut key = 0u128;
    for (j, w) in words.iter().enumerate() {
        key |= ((w >> lane & 1) as u128) << j;
    }
    key
}

/// Renders `width` low bits of `key`, bit 0 first.
pub fn bits_to_string(key: u128, width: usize) -> String {
    (0..width)
        .map(|j| if key >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn string_to_bits(s: &str) -> Option<u128> {
    let mut key = 0u128;
    for (j, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => key |= 1u128.checked_shl(j as u32)?,
            _ => return None,
        }
    }
    Some(key)
}

/// Incremental construction of valid circuits.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n_inputs: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(n_inputs: usize) -> CircuitBuilder {
        CircuitBuilder {
            n_inputs,
            gates: Vec::new(),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn input(&self, i: usize) -> WireRef {
        assert!(i < self.n_inputs, "input i{i} out of range");
        WireRef::Input(i)
    }

    pub fn inputs(&self, range: std::ops::Range<usize>) -> Vec<WireRef> {
        range.map(|i| self.input(i)).collect()
    }

    fn push(&mut self, op: GateOp, args: Vec<WireRef>) -> WireRef {
        self.gates.push(Gate { op, args });
        WireRef::Gate(self.gates.len() - 1)
    }

    pub fn and(&mut self, a: WireRef, b: WireRef) -> WireRef {
        self.push(GateOp::And, vec![a, b])
    }

    pub fn or(&mut self, a: WireRef, b: WireRef) -> WireRef {
        self.push(GateOp::Or, vec![a, b])
    }

    pub fn xor(&mut self, a: WireRef, b: WireRef) -> WireRef {
        self.push(GateOp::Xor, vec![a, b])
    }

    pub fn not(&mut self, a: WireRef) -> WireRef {
        self.push(GateOp::Not, vec![a])
    }

    pub fn constant(&mut self, v: bool) -> WireRef {
        self.push(if v { GateOp::Const1 } else { GateOp::Const0 }, vec![])
    }

    /// `sel ? one : zero`
    pub fn mux(&mut self, sel: WireRef, zero: WireRef, one: WireRef) -> WireRef {
        let d = self.xor(zero, one);
        let m = self.and(sel, d);
        self.xor(zero, m)
    }

    pub fn mux_vec(&mut self, sel: WireRef, zero: &[WireRef], one: &[WireRef]) -> Vec<WireRef> {
        assert_eq!(zero.len(), one.len());
        zero.iter()
            .zip(one)
            .map(|(&z, &o)| self.mux(sel, z, o))
            .collect()
    }

    /// 1 iff the unsigned value on `bits` (bit 0 least significant) is `< bound`.
    pub fn less_than_const(&mut self, bits: &[WireRef], bound: u64) -> WireRef {
        if bits.len() < 64 && bound >= 1u64 << bits.len() {
            return self.constant(true);
        }
        // Scan from the most significant bit.
        let mut lt = self.constant(false);
        let mut eq = self.constant(true);
        for (j, &b) in bits.iter().enumerate().rev() {
            let bound_bit = j < 64 && bound >> j & 1 == 1;
            if bound_bit {
                let nb = self.not(b);
                let t = self.and(eq, nb);
                lt = self.or(lt, t);
                eq = self.and(eq, b);
            } else {
                let nb = self.not(b);
                eq = self.and(eq, nb);
            }
        }
        lt
    }

    /// 1 iff at least `threshold` of `bits` are 1.
    pub fn at_least(&mut self, bits: &[WireRef], threshold: usize) -> WireRef {
        if threshold == 0 {
            return self.constant(true);
        }
        if threshold > bits.len() {
            return self.constant(false);
        }
        // row[j] = "at least j of the bits seen so far".
        let f = self.constant(false);
        let mut row: Vec<WireRef> = vec![f; threshold + 1];
        row[0] = self.constant(true);
        for &b in bits {
            for j in (1..=threshold).rev() {
                let t = self.and(b, row[j - 1]);
                row[j] = self.or(row[j], t);
            }
        }
        row[threshold]
    }

    /// Truth-table lookup: output bit `j` is bit `j` of `table[r]` where `r`
    /// is the value on `inputs`.
    pub fn lookup(&mut self, inputs: &[WireRef], table: &[u128], width: usize) -> Vec<WireRef> {
        assert_eq!(table.len(), 1 << inputs.len(), "table size");
        let mut minterms = vec![self.constant(true)];
        for &x in inputs {
            let nx = self.not(x);
            let lo: Vec<WireRef> = minterms.iter().map(|&m| self.and(m, nx)).collect();
            let hi: Vec<WireRef> = minterms.iter().map(|&m| self.and(m, x)).collect();
            minterms = lo;
            minterms.extend(hi);
        }
        (0..width)
            .map(|j| {
                let mut acc: Option<WireRef> = None;
                for (r, &v) in table.iter().enumerate() {
                    if v >> j & 1 == 1 {
                        acc = Some(match acc {
                            None => minterms[r],
                            Some(a) => self.or(a, minterms[r]),
                        });
                    }
                }
                acc.unwrap_or_else(|| self.constant(false))
            })
            .collect()
    }

    /// Inlines `c` with its inputs bound to `inputs`; returns its outputs.
    pub fn embed(&mut self, c: &Circuit, inputs: &[WireRef]) -> Vec<WireRef> {
        assert_eq!(inputs.len(), c.n_inputs(), "embed input count");
        let base = self.gates.len();
        let map = |w: WireRef| match w {
            WireRef::Input(i) => inputs[i],
            WireRef::Gate(g) => WireRef::Gate(base + g),
        };
        for gate in c.gates() {
            let args = gate.args.iter().map(|&a| map(a)).collect();
            self.gates.push(Gate { op: gate.op, args });
        }
        c.outputs().iter().map(|&o| map(o)).collect()
    }

    pub fn finish(self, outputs: Vec<WireRef>) -> Circuit {
        Circuit::from_parts(self.n_inputs, self.gates, outputs)
            .expect("builder only produces valid circuits")
    }
}

/// Random valid circuit with the given shape. Outputs are drawn from the
/// last few wires so they tend to depend on many inputs.
pub fn random_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    n_inputs: usize,
    n_gates: usize,
    m_outputs: usize,
) -> Circuit {
    let mut gates = Vec::with_capacity(n_gates);
    let pick = |rng: &mut R, k: usize| -> WireRef {
        let total = n_inputs + k;
        let j = rng.random_range(0..total);
        if j < n_inputs {
            WireRef::Input(j)
        } else {
            WireRef::Gate(j - n_inputs)
        }
    };
    for k in 0..n_gates {
        let op = if n_inputs + k == 0 {
            if rng.random() {
                GateOp::Const1
            } else {
                GateOp::Const0
            }
        } else {
            match rng.random_range(0..10) {
                0..=2 => GateOp::And,
                3..=4 => GateOp::Or,
                5..=7 => GateOp::Xor,
                8 => GateOp::Not,
                _ => {
                    if rng.random() {
                        GateOp::Const1
                    } else {
                        GateOp::Const0
                    }
                }
            }
        };
        let args = (0..op.arity()).map(|_| pick(rng, k)).collect();
        gates.push(Gate { op, args });
    }
    let total = n_inputs + n_gates;
    let mut outputs = Vec::with_capacity(m_outputs);
    for _ in 0..m_outputs {
        let lo = total.saturating_sub(2 * m_outputs + 2);
        let j = rng.random_range(lo..total);
        outputs.push(if j < n_inputs {
            WireRef::Input(j)
        } else {
            WireRef::Gate(j - n_inputs)
        });
    }
    Circuit::from_parts(n_inputs, gates, outputs).expect("random circuit is valid")
}
