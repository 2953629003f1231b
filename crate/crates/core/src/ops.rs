//! Circuit-to-circuit distribution operators.
//!
//! Every operator returns new circuits whose uniform-input distribution is
//! the operator applied to the argument distributions. Fresh selector and
//! coin bits always take the lowest input indices.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::budget::Budget;
use crate::circuit::{Circuit, CircuitBuilder, WireRef};
use crate::error::{Error, Result};
use crate::prob::{dyadic, Prob};

/// A pair of circuits produced by a pair-valued operator.
#[derive(Debug, Clone)]
pub struct CircuitPair {
    pub a: Circuit,
    pub b: Circuit,
    pub provenance: String,
}

fn require_width(x: &Circuit, y: &Circuit) -> Result<()> {
    if x.n_outputs() != y.n_outputs() {
        return Err(Error::WidthMismatch {
            left: x.n_outputs(),
            right: y.n_outputs(),
        });
    }
    Ok(())
}

/// `X ⊗ Y`: `X`'s inputs and outputs come first.
pub fn tensor(x: &Circuit, y: &Circuit, budget: &Budget) -> Result<Circuit> {
    tensor_all(&[x, y], budget)
}

pub fn tensor_all(parts: &[&Circuit], budget: &Budget) -> Result<Circuit> {
    assert!(!parts.is_empty());
    let n: usize = parts.iter().map(|c| c.n_inputs()).sum();
    budget.check("tensor", n)?;
    let mut b = CircuitBuilder::new(n);
    let mut outs = Vec::new();
    let mut offset = 0;
    for c in parts {
        let ins = b.inputs(offset..offset + c.n_inputs());
        outs.extend(b.embed(c, &ins));
        offset += c.n_inputs();
    }
    Ok(b.finish(outs))
}

/// `X^{⊗k}`.
pub fn power(x: &Circuit, k: usize, budget: &Budget) -> Result<Circuit> {
    if k == 0 {
        return Err(Error::Precondition("power needs k >= 1".into()));
    }
    let parts: Vec<&Circuit> = std::iter::repeat_n(x, k).collect();
    tensor_all(&parts, budget)
}

/// Embeds `sel ? one : zero` where both circuits read a shared block of
/// `max(n_zero, n_one)` inputs starting at `offset`.
fn embed_choice(
    b: &mut CircuitBuilder,
    sel: WireRef,
    zero: &Circuit,
    one: &Circuit,
    offset: usize,
) -> Vec<WireRef> {
    let z_in = b.inputs(offset..offset + zero.n_inputs());
    let o_in = b.inputs(offset..offset + one.n_inputs());
    let z = b.embed(zero, &z_in);
    let o = b.embed(one, &o_in);
    b.mux_vec(sel, &z, &o)
}

/// The XOR pair operator:
/// `A`: pick `b`, sample `X_b ⊗ X_b`; `B`: pick `b`, sample `X_b ⊗ X_{1-b}`.
pub fn xor_pair(x0: &Circuit, x1: &Circuit, budget: &Budget) -> Result<CircuitPair> {
    require_width(x0, x1)?;
    let n = x0.n_inputs().max(x1.n_inputs());
    let total = 2 * n + 1;
    budget.check("xor", total)?;
    let build = |cross: bool| {
        let mut b = CircuitBuilder::new(total);
        let sel = b.input(0);
        let mut outs = embed_choice(&mut b, sel, x0, x1, 1);
        let (second0, second1) = if cross { (x1, x0) } else { (x0, x1) };
        outs.extend(embed_choice(&mut b, sel, second0, second1, 1 + n));
        b.finish(outs)
    };
    Ok(CircuitPair {
        a: build(false),
        b: build(true),
        provenance: format!("xor(n0={}, n1={})", x0.n_inputs(), x1.n_inputs()),
    })
}

/// Generalized XOR over two instance pairs `P0 = (X0, Y0)`, `P1 = (X1, Y1)`:
/// `A`: pick `b`, sample `P0[b] ⊗ P1[b]`; `B`: pick `b`, sample
/// `P0[b] ⊗ P1[1-b]`. Then `SD(A,B) = SD(X0,Y0) * SD(X1,Y1)`.
pub fn or_xor_pair(
    pair0: (&Circuit, &Circuit),
    pair1: (&Circuit, &Circuit),
    budget: &Budget,
) -> Result<CircuitPair> {
    require_width(pair0.0, pair0.1)?;
    require_width(pair1.0, pair1.1)?;
    let n0 = pair0.0.n_inputs().max(pair0.1.n_inputs());
    let n1 = pair1.0.n_inputs().max(pair1.1.n_inputs());
    let total = 1 + n0 + n1;
    budget.check("or-xor", total)?;
    let build = |cross: bool| {
        let mut b = CircuitBuilder::new(total);
        let sel = b.input(0);
        let mut outs = embed_choice(&mut b, sel, pair0.0, pair0.1, 1);
        let (z, o) = if cross {
            (pair1.1, pair1.0)
        } else {
            (pair1.0, pair1.1)
        };
        outs.extend(embed_choice(&mut b, sel, z, o, 1 + n0));
        b.finish(outs)
    };
    Ok(CircuitPair {
        a: build(false),
        b: build(true),
        provenance: format!("or-xor(n0={n0}, n1={n1})"),
    })
}

/// `T(X,Y) = (U ⊗ U, V ⊗ V)` with `(U, V) = XOR(X, Y)`.
pub fn t_operator(x: &Circuit, y: &Circuit, budget: &Budget) -> Result<CircuitPair> {
    let n = x.n_inputs().max(y.n_inputs());
    budget.check("t-operator", 2 * (2 * n + 1))?;
    let uv = xor_pair(x, y, &Budget::new(usize::MAX))?;
    Ok(CircuitPair {
        a: tensor(&uv.a, &uv.a, budget)?,
        b: tensor(&uv.b, &uv.b, budget)?,
        provenance: format!("t-operator(n={n})"),
    })
}

/// Input bits of `T(X,Y)` for argument circuits with `n` inputs.
pub fn t_operator_inputs(n: usize) -> usize {
    4 * n + 2
}

/// Which reserved symbol a mixture emits in place of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Tag {
    Gamma,
    GammaPrime,
}

/// Tag-bit patterns appended by [`gamma_mixture`], as (first, second) bit.
pub const TAG_REAL: (bool, bool) = (false, false);
pub const TAG_GAMMA: (bool, bool) = (true, false);
pub const TAG_GAMMA_PRIME: (bool, bool) = (true, true);
/// Reserved for the reject symbol of compiled protocols.
pub const TAG_BOTTOM: (bool, bool) = (false, true);

/// Numerator `s` of `u = s / 2^bits`, if representable.
pub fn dyadic_numerator(u: &Prob, bits: u32) -> Result<u64> {
    let not_rep = || Error::NotRepresentable {
        value: u.to_string(),
        bits,
    };
    if u < &Prob::zero() || u > &crate::prob::one() || bits > 62 {
        return Err(not_rep());
    }
    let scaled = u * Prob::from_integer(BigInt::from(1u64 << bits));
    if !scaled.is_integer() {
        return Err(not_rep());
    }
    scaled.to_integer().to_u64().ok_or_else(not_rep)
}

/// With probability `u` output `X(x)` tagged real, otherwise the reserved
/// symbol for `tag`. `u = s / 2^coin_bits`; the coins are inputs
/// `0..coin_bits`, followed by `X`'s inputs. Output is `X`'s bits followed by
/// two tag bits.
pub fn gamma_mixture(
    x: &Circuit,
    u: &Prob,
    coin_bits: u32,
    tag: Tag,
    budget: &Budget,
) -> Result<Circuit> {
    let s = dyadic_numerator(u, coin_bits)?;
    let t = coin_bits as usize;
    let total = t + x.n_inputs();
    budget.check("gamma-mixture", total)?;
    let mut b = CircuitBuilder::new(total);
    let coins = b.inputs(0..t);
    let real = b.less_than_const(&coins, s);
    let xin = b.inputs(t..total);
    let xs = b.embed(x, &xin);
    let mut outs: Vec<WireRef> = xs.iter().map(|&w| b.and(real, w)).collect();
    let fake = b.not(real);
    outs.push(fake);
    outs.push(match tag {
        Tag::Gamma => b.constant(false),
        Tag::GammaPrime => fake,
    });
    Ok(b.finish(outs))
}

/// Appends `extra_bits` uniform output bits.
pub fn append_uniform(x: &Circuit, extra_bits: usize, budget: &Budget) -> Result<Circuit> {
    if extra_bits == 0 {
        budget.check("append-uniform", x.n_inputs())?;
        return Ok(x.clone());
    }
    tensor(x, &Circuit::identity(extra_bits), budget)
}

/// Which matrices the affine family draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum HashFamily {
    /// Uniform `A` in `GF(2)^{out x in}`.
    Full,
    /// Uniform Toeplitz `A`; shorter description, still 2-universal with
    /// the uniform shift.
    Toeplitz,
}

/// The affine family `h(x) = A x ⊕ c` over GF(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AffineHash {
    pub in_bits: usize,
    pub out_bits: usize,
    pub family: HashFamily,
}

impl AffineHash {
    pub fn new(in_bits: usize, out_bits: usize, family: HashFamily) -> AffineHash {
        assert!(in_bits >= 1 && out_bits >= 1);
        AffineHash {
            in_bits,
            out_bits,
            family,
        }
    }

    fn matrix_bits(&self) -> usize {
        match self.family {
            HashFamily::Full => self.in_bits * self.out_bits,
            HashFamily::Toeplitz => self.in_bits + self.out_bits - 1,
        }
    }

    /// Number of uniform bits describing one member of the family.
    pub fn description_bits(&self) -> usize {
        self.matrix_bits() + self.out_bits
    }

    /// Index into the description of entry `A[row][col]`.
    fn entry(&self, row: usize, col: usize) -> usize {
        match self.family {
            HashFamily::Full => row * self.in_bits + col,
            HashFamily::Toeplitz => row + self.in_bits - 1 - col,
        }
    }

    /// Direct evaluation, bit 0 of each word first.
    pub fn apply(&self, description: u128, x: u128) -> u128 {
        let mut y = 0u128;
        for row in 0..self.out_bits {
            let mut bit = description >> (self.matrix_bits() + row) & 1;
            for col in 0..self.in_bits {
                bit ^= description >> self.entry(row, col) & x >> col & 1;
            }
            y |= bit << row;
        }
        y
    }

    /// Circuit gadget computing `h(x)` from description and input wires.
    pub fn build(
        &self,
        b: &mut CircuitBuilder,
        description: &[WireRef],
        x: &[WireRef],
    ) -> Vec<WireRef> {
        assert_eq!(description.len(), self.description_bits());
        assert_eq!(x.len(), self.in_bits);
        (0..self.out_bits)
            .map(|row| {
                let mut acc = description[self.matrix_bits() + row];
                for (col, &xw) in x.iter().enumerate() {
                    let t = b.and(description[self.entry(row, col)], xw);
                    acc = b.xor(acc, t);
                }
                acc
            })
            .collect()
    }
}

/// Circuit whose output is `(h, h(X))` with `h` drawn from fresh uniform
/// description bits (the lowest inputs) and `X` from its own inputs.
pub fn hash_apply(h: &AffineHash, x: &Circuit, budget: &Budget) -> Result<Circuit> {
    if x.n_outputs() != h.in_bits {
        return Err(Error::WidthMismatch {
            left: x.n_outputs(),
            right: h.in_bits,
        });
    }
    let d = h.description_bits();
    let total = d + x.n_inputs();
    budget.check("hash-apply", total)?;
    let mut b = CircuitBuilder::new(total);
    let desc = b.inputs(0..d);
    let xin = b.inputs(d..total);
    let xs = b.embed(x, &xin);
    let hx = h.build(&mut b, &desc, &xs);
    let mut outs = desc;
    outs.extend(hx);
    Ok(b.finish(outs))
}

/// Exact `SD((h, h(X)), I)` for `X` uniform on `set` and `I` uniform on
/// descriptions times outputs, by enumerating the family.
pub fn leftover_hash_sd(h: &AffineHash, set: &[u128], budget: &Budget) -> Result<Prob> {
    if set.is_empty() {
        return Err(Error::Precondition("empty source set".into()));
    }
    let d = h.description_bits();
    budget.check("leftover-hash enumeration", d)?;
    let range = 1usize << h.out_bits;
    let n = set.len() as i64;
    // SD(h(X), U) * 2 * n * range summed over descriptions, in integers:
    // sum_y |range * count_y - n|.
    let mut total = BigInt::zero();
    let mut counts = vec![0i64; range];
    for desc in 0..1u128 << d {
        counts.iter_mut().for_each(|c| *c = 0);
        for &x in set {
            counts[h.apply(desc, x) as usize] += 1;
        }
        let s: i64 = counts.iter().map(|&c| (range as i64 * c - n).abs()).sum();
        total += s;
    }
    let denom = BigInt::from(2 * n * range as i64) << d;
    Ok(Prob::new(total, denom))
}

/// `Pr_h[h(x) = a and h(y) = b]` for fixed points, by enumerating the family.
pub fn pair_collision_probability(h: &AffineHash, x: u128, y: u128, a: u128, b: u128) -> Prob {
    let d = h.description_bits();
    let hits = (0..1u128 << d)
        .filter(|&desc| h.apply(desc, x) == a && h.apply(desc, y) == b)
        .count();
    dyadic(BigInt::from(hits), d as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{
        disjointness, enumerate, mut_disjointness, statistical_difference, ExactDistribution,
    };
    use crate::prob::{one, ratio, zero};

    fn budget() -> Budget {
        Budget::default()
    }

    fn dist(c: &Circuit) -> ExactDistribution {
        enumerate(c, &budget()).unwrap()
    }

    fn sd(a: &Circuit, b: &Circuit) -> Prob {
        statistical_difference(&dist(a), &dist(b)).unwrap()
    }

    /// 2-bit circuit that is uniform over outputs in `{0, .., 3}` mapped by
    /// `table[r]`.
    fn table(values: &[u128], width: usize) -> Circuit {
        let n = values.len().trailing_zeros() as usize;
        assert_eq!(1 << n, values.len());
        let mut b = CircuitBuilder::new(n);
        let ins = b.inputs(0..n);
        let mut outs = Vec::new();
        for j in 0..width {
            // OR over minterms where bit j is set.
            let mut acc = b.constant(false);
            for (r, &v) in values.iter().enumerate() {
                if v >> j & 1 == 1 {
                    let mut term = b.constant(true);
                    for (i, &w) in ins.iter().enumerate() {
                        let lit = if r >> i & 1 == 1 { w } else { b.not(w) };
                        term = b.and(term, lit);
                    }
                    acc = b.or(acc, term);
                }
            }
            outs.push(acc);
        }
        b.finish(outs)
    }

    #[test]
    fn power_one_is_identity() {
        let x = table(&[0, 1, 1, 2], 2);
        assert_eq!(dist(&power(&x, 1, &budget()).unwrap()), dist(&x));
        assert!(power(&x, 0, &budget()).is_err());
    }

    #[test]
    fn tensor_is_product() {
        let x = table(&[0, 1, 1, 2], 2);
        let y = table(&[3, 3, 3, 0], 2);
        let t = tensor(&x, &y, &budget()).unwrap();
        assert_eq!(dist(&t), dist(&x).product(&dist(&y)).unwrap());
    }

    #[test]
    fn direct_product_disjointness_k2() {
        // Disj(X, Y) = 1/2 -> 3/4 after squaring.
        let x = table(&[0, 1, 2, 3], 2);
        let y = table(&[0, 1, 0, 1], 2);
        let dx = dist(&x);
        assert_eq!(disjointness(&dx, &dist(&y)).unwrap(), ratio(1, 2));
        let x2 = power(&x, 2, &budget()).unwrap();
        let y2 = power(&y, 2, &budget()).unwrap();
        assert_eq!(disjointness(&dist(&x2), &dist(&y2)).unwrap(), ratio(3, 4));
    }

    #[test]
    fn direct_product_sd_bounds_k2() {
        let x = table(&[0, 1, 2, 3], 2);
        let y = table(&[0, 0, 2, 1], 2);
        let delta = sd(&x, &y);
        let s2 = sd(
            &power(&x, 2, &budget()).unwrap(),
            &power(&y, 2, &budget()).unwrap(),
        );
        let two = Prob::from_integer(2.into());
        assert!(s2 <= &two * &delta);
        assert!(s2 <= one() - (one() - &delta) * (one() - &delta));
    }

    #[test]
    fn xor_examples() {
        let z = Circuit::constant(&[false], 0);
        let o = Circuit::constant(&[true], 0);
        let p = xor_pair(&z, &o, &budget()).unwrap();
        assert_eq!(sd(&p.a, &p.b), one());
        let p = xor_pair(&o, &o, &budget()).unwrap();
        assert_eq!(sd(&p.a, &p.b), zero());
        assert!(xor_pair(&z, &Circuit::identity(2), &budget()).is_err());
    }

    #[test]
    fn xor_squares_three_quarters() {
        // 3 input bits; X0 uniform on 8 values, X1 agrees on 2 of them.
        let x0 = table(&[0, 1, 2, 3, 4, 5, 6, 7], 3);
        let x1 = table(&[0, 1, 0, 1, 0, 1, 0, 1], 3);
        assert_eq!(sd(&x0, &x1), ratio(3, 4));
        let p = xor_pair(&x0, &x1, &budget()).unwrap();
        assert_eq!(p.a.n_inputs(), 7);
        assert_eq!(sd(&p.a, &p.b), ratio(9, 16));
    }

    #[test]
    fn xor_mut_disj_is_product_of_directions() {
        let x0 = table(&[0, 1, 2, 3], 3);
        let x1 = table(&[0, 0, 4, 5], 3);
        let (d0, d1) = (dist(&x0), dist(&x1));
        let d01 = disjointness(&d0, &d1).unwrap();
        let d10 = disjointness(&d1, &d0).unwrap();
        assert_eq!((d01.clone(), d10.clone()), (ratio(3, 4), ratio(1, 2)));
        let p = xor_pair(&x0, &x1, &budget()).unwrap();
        let m = mut_disjointness(&dist(&p.a), &dist(&p.b)).unwrap();
        assert_eq!(m, &d01 * &d10);
        let md = mut_disjointness(&d0, &d1).unwrap();
        assert!(m > &md * &md);
    }

    #[test]
    fn or_xor_examples() {
        let z = Circuit::constant(&[false], 0);
        let o = Circuit::constant(&[true], 0);
        let p = or_xor_pair((&z, &z), (&o, &o), &budget()).unwrap();
        assert_eq!(sd(&p.a, &p.b), zero());
        let p = or_xor_pair((&z, &o), (&z, &o), &budget()).unwrap();
        assert_eq!(sd(&p.a, &p.b), one());
        let u = Circuit::identity(1);
        let p = or_xor_pair((&u, &z), (&o, &u), &budget()).unwrap();
        assert_eq!(sd(&p.a, &p.b), ratio(1, 4));
    }

    #[test]
    fn t_operator_examples() {
        let x = table(&[0, 1, 2, 3], 2);
        let p = t_operator(&x, &x, &budget()).unwrap();
        assert_eq!(p.a.n_inputs(), t_operator_inputs(2));
        assert_eq!(sd(&p.a, &p.b), zero());

        let z = Circuit::constant(&[false], 0);
        let o = Circuit::constant(&[true], 0);
        let p = t_operator(&z, &o, &budget()).unwrap();
        assert_eq!(mut_disjointness(&dist(&p.a), &dist(&p.b)).unwrap(), one());

        // SD = 1/2: bound 1 - (3/4)^2 = 7/16.
        let u = Circuit::identity(1);
        let c = Circuit::constant(&[false], 1);
        assert_eq!(sd(&u, &c), ratio(1, 2));
        let p = t_operator(&u, &c, &budget()).unwrap();
        let got = sd(&p.a, &p.b);
        assert!(got <= ratio(7, 16));
        let uv = xor_pair(&u, &c, &budget()).unwrap();
        assert_eq!(sd(&uv.a, &uv.b), ratio(1, 4));

        assert!(matches!(
            t_operator(&Circuit::identity(6), &Circuit::identity(6), &budget()),
            Err(Error::BudgetExceeded { needed: 26, .. })
        ));
    }

    #[test]
    fn mixture_extremes() {
        let x = table(&[0, 1, 2, 3], 2);
        let m1 = gamma_mixture(&x, &one(), 2, Tag::Gamma, &budget()).unwrap();
        let d = dist(&m1);
        assert_eq!(d.width(), 4);
        for v in 0..4u128 {
            assert_eq!(d.mass(v), ratio(1, 4), "real tag is 00");
        }
        let m0 = gamma_mixture(&x, &zero(), 2, Tag::GammaPrime, &budget()).unwrap();
        let gamma_prime = 0b11u128 << 2;
        assert_eq!(dist(&m0).mass(gamma_prime), one());
        assert!(matches!(
            gamma_mixture(&x, &ratio(1, 3), 4, Tag::Gamma, &budget()),
            Err(Error::NotRepresentable { .. })
        ));
    }

    #[test]
    fn mixture_laws_are_affine() {
        // SD(X, Y) = 1/2, u = 1/2.
        let x = Circuit::identity(1);
        let y = Circuit::constant(&[false], 1);
        let half = ratio(1, 2);
        let b = budget();
        let mx = gamma_mixture(&x, &half, 1, Tag::Gamma, &b).unwrap();
        let my = gamma_mixture(&y, &half, 1, Tag::Gamma, &b).unwrap();
        let myp = gamma_mixture(&y, &half, 1, Tag::GammaPrime, &b).unwrap();
        assert_eq!(sd(&mx, &my), ratio(1, 4));
        assert_eq!(sd(&mx, &myp), ratio(3, 4));
        // Both stay below the quadratic envelopes u²a + 2u(1-u) = 5/8 and
        // u²a + 2u(1-u) + (1-u)² = 7/8.
        assert!(sd(&mx, &my) <= ratio(5, 8));
        assert!(sd(&mx, &myp) <= ratio(7, 8));
        let dx = dist(&mx);
        assert_eq!(disjointness(&dx, &dist(&my)).unwrap(), ratio(1, 4));
        assert_eq!(disjointness(&dx, &dist(&myp)).unwrap(), ratio(3, 4));
    }

    #[test]
    fn append_uniform_on_point() {
        let p = Circuit::constant(&[true], 0);
        let c = append_uniform(&p, 2, &budget()).unwrap();
        let d = dist(&c);
        assert_eq!(d.support_len(), 4);
        for v in 0..4u128 {
            assert_eq!(d.mass(1 | v << 1), ratio(1, 4));
        }
    }

    #[test]
    fn affine_two_to_one_is_pairwise_independent() {
        for family in [HashFamily::Full, HashFamily::Toeplitz] {
            let h = AffineHash::new(2, 1, family);
            for x in 0..4 {
                for y in 0..4 {
                    if x == y {
                        continue;
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            assert_eq!(pair_collision_probability(&h, x, y, a, b), ratio(1, 4));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hashing_small_sets_covers_small_fraction() {
        // 2^{n'-k} = 2 values into n' = 2 bits: at most 2^{-k} = 1/2 of the range.
        let h = AffineHash::new(3, 2, HashFamily::Full);
        for desc in 0..1u128 << h.description_bits() {
            let img: std::collections::BTreeSet<u128> =
                [5u128, 6].iter().map(|&x| h.apply(desc, x)).collect();
            assert!(img.len() <= 2);
        }
    }

    #[test]
    fn hash_gadget_matches_direct_evaluation() {
        for family in [HashFamily::Full, HashFamily::Toeplitz] {
            let h = AffineHash::new(3, 2, family);
            let c = hash_apply(&h, &Circuit::identity(3), &budget()).unwrap();
            let d = h.description_bits();
            for r in 0..1u64 << (d + 3) {
                let out = c.evaluate_index(r);
                let desc = (r as u128) & ((1 << d) - 1);
                let x = (r as u128) >> d;
                assert_eq!(out & ((1 << d) - 1), desc);
                assert_eq!(out >> d, h.apply(desc, x));
            }
        }
    }

    #[test]
    fn leftover_hash_sd_full_set_matches_rank_formula() {
        // X uniform on all 16 inputs: SD = E_A[1 - 2^{rank(A) - 2}] over 2x4 A.
        let h = AffineHash::new(4, 2, HashFamily::Full);
        let set: Vec<u128> = (0..16).collect();
        let got = leftover_hash_sd(&h, &set, &budget()).unwrap();
        // rank 2: 105/128, rank 1: 45/256, rank 0: 1/256.
        let expected = ratio(45, 256) * ratio(1, 2) + ratio(1, 256) * ratio(3, 4);
        assert_eq!(got, expected);
    }
}
