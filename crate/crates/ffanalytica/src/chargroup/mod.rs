//! Unit groups (F_q[t]/Q)^×, Dirichlet characters on them, short interval
//! characters realized through the involution, and Hayes characters.
//!
//! Every group element has a mixed-radix index `a_0 + n_0 (a_1 + n_1 (...))`
//! over the generator orders `n_i`; a character with exponents `e_i` sends it to
//! `e(Σ e_i a_i / n_i)`. Values stay exact rotations until they are summed.

mod character;
mod family;
mod ortho;
pub mod rot;

use std::collections::HashMap;
use std::sync::Arc;

pub use character::{characters, hayes_equiv, short_chars, top_coefficients, CharRecord, DirichletChar, HayesChar, ShortChar};
pub use family::HayesFamily;
pub use ortho::{l2_mean_value_trial, orthogonality_residues, OrthoReport};
pub use rot::{Rot, RotSum};

use crate::error::{capacity, usage, Error, Result};
use crate::gf::{Field, FieldSpec};
use crate::poly::{factor_direct, q_pow, Poly};

/// Marks non-units in the discrete-log table.
pub const NONE: u32 = u32::MAX;
/// Largest φ(Q) with an exhaustive table.
pub const MAX_PHI: u64 = 1 << 22;
/// Largest q^{deg Q} with a residue table.
pub const MAX_RESIDUES: u64 = 1 << 24;

#[derive(Debug)]
pub struct UnitGroup {
    field: Field,
    modulus: Poly,
    factors: Vec<(Poly, u32)>,
    gens: Vec<Poly>,
    orders: Vec<u32>,
    cyclic: Vec<bool>,
    phi: u64,
    exponent: u32,
    dlog: Vec<u32>,
    elements: Vec<u32>,
}

pub fn unit_group(modulus: &Poly, f: &Field) -> Result<Arc<UnitGroup>> {
    UnitGroup::new(modulus, f).map(Arc::new)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn has_exact_order(g: &Poly, n: u64, m: &Poly, f: &FieldSpec) -> bool {
    let one = Poly::one().rem(m, f);
    g.powmod(n as u128, m, f) == one && prime_factors(n).iter().all(|&r| g.powmod((n / r) as u128, m, f) != one)
}

/// Generators of (F_q[t]/P^e)^× with orders; the cyclic lift comes first.
fn local_generators(p: &Poly, e: u32, f: &FieldSpec) -> Result<Vec<(Poly, u32, bool)>> {
    let q = f.q();
    let d = p.degree();
    let qd = q_pow(q, d)?;
    let pe = p.pow(e, f);
    let mut out = Vec::new();

    if qd > 2 {
        let n = qd - 1;
        let gamma = (1..qd)
            .map(|i| Poly::from_residue_index(q, i))
            .find(|g| has_exact_order(g, n, p, f))
            .ok_or_else(|| Error::Domain(format!("no primitive root modulo {p}")))?;
        // γ^{q^{d(e-1)}} keeps order q^d - 1 and lifts γ's class
        let lift = gamma.powmod((qd as u128).pow(e - 1), &pe, f);
        out.push((lift, n as u32, true));
    }
    if e == 1 {
        return Ok(out);
    }

    // U1 = (1 + P)/(1 + P^e), an abelian p-group of order q^{d(e-1)}
    let pp = f.p() as u64;
    let size = q_pow(q, d * (e as usize - 1))?;
    let members: Vec<Poly> = (0..size)
        .map(|k| Poly::one().add(&p.mul(&Poly::from_residue_index(q, k), f), f))
        .collect();
    let key = |x: &Poly| x.residue_index(q);
    let mut span: HashMap<u64, Vec<u32>> = HashMap::from([(key(&Poly::one()), Vec::new())]);
    let mut basis: Vec<(Poly, u32)> = Vec::new();

    while (span.len() as u64) < size {
        // element of largest order modulo the current span
        let mut best: Option<(u32, &Poly)> = None;
        for u in &members {
            let (mut x, mut m) = (u.clone(), 0u32);
            while !span.contains_key(&key(&x)) {
                x = x.powmod(pp as u128, &pe, f);
                m += 1;
            }
            if best.is_none_or(|(bm, _)| m > bm) {
                best = Some((m, u));
            }
        }
        let (m, u) = best.expect("span is a proper subgroup");
        let pm = pp.pow(m) as u32;
        let image = u.powmod(pm as u128, &pe, f);
        let coords = span[&key(&image)].clone();
        // u^{p^m} = Π b_j^{c_j} with p^m | c_j, so u Π b_j^{-c_j/p^m} has order p^m
        let mut h = u.clone();
        for (j, &c) in coords.iter().enumerate() {
            let (b, ord) = &basis[j];
            if c % pm != 0 {
                return Err(Error::Domain(format!("p-group basis step failed modulo {pe}")));
            }
            let ex = (*ord - (c / pm) % ord) % ord;
            h = h.mulmod(&b.powmod(ex as u128, &pe, f), &pe, f);
        }
        let old: Vec<(u64, Vec<u32>)> = span.iter().map(|(k, v)| (*k, v.clone())).collect();
        let idx = basis.len();
        let mut hk = Poly::one();
        for k in 1..pm {
            hk = hk.mulmod(&h, &pe, f);
            for (s, v) in &old {
                let x = Poly::from_residue_index(q, *s).mulmod(&hk, &pe, f);
                let mut w = v.clone();
                w.resize(idx, 0);
                w.push(k);
                span.insert(key(&x), w);
            }
        }
        basis.push((h, pm));
    }
    out.extend(basis.into_iter().map(|(g, n)| (g, n, false)));
    Ok(out)
}

fn lcm32(a: u32, b: u32) -> u32 {
    rot::lcm(a as u64, b as u64) as u32
}

impl UnitGroup {
    pub fn new(modulus: &Poly, f: &Field) -> Result<UnitGroup> {
        if !modulus.is_monic() {
            return usage(format!("modulus {modulus} must be monic"));
        }
        let q = f.q();
        let dq = modulus.degree();
        let residues = q_pow(q, dq).ok().filter(|&r| r <= MAX_RESIDUES);
        let Some(residues) = residues else {
            return capacity(format!("q^deg Q for Q = {modulus} exceeds {MAX_RESIDUES}"));
        };
        let fac = if dq == 0 { Vec::new() } else { factor_direct(modulus, f)?.factors };
        let mut phi: u64 = 1;
        for (p, e) in &fac {
            let qd = q_pow(q, p.degree())?;
            phi *= (qd - 1) * qd.pow(e - 1);
        }
        if phi > MAX_PHI {
            return capacity(format!("φ({modulus}) = {phi} exceeds the table budget {MAX_PHI}"));
        }

        let (mut gens, mut orders, mut cyclic) = (Vec::new(), Vec::new(), Vec::new());
        for (p, e) in &fac {
            let pe = p.pow(*e, f);
            let cof = modulus.div_exact(&pe, f);
            let inv = cof.inverse_mod(&pe, f).expect("coprime cofactor");
            let s = cof.mul(&inv, f);
            for (g, n, cyc) in local_generators(p, *e, f)? {
                // ≡ g mod P^e and ≡ 1 mod Q/P^e
                let lifted = Poly::one().add(&g.sub(&Poly::one(), f).mul(&s, f), f).rem(modulus, f);
                gens.push(lifted);
                orders.push(n);
                cyclic.push(cyc);
            }
        }

        let mut elements: Vec<u32> = vec![Poly::one().rem(modulus, f).residue_index(q) as u32];
        for (g, &n) in gens.iter().zip(&orders).rev() {
            let mut next = Vec::with_capacity(elements.len() * n as usize);
            for &r in &elements {
                let mut x = Poly::from_residue_index(q, r as u64);
                for _ in 0..n {
                    next.push(x.residue_index(q) as u32);
                    x = x.mulmod(g, modulus, f);
                }
            }
            elements = next;
        }
        if elements.len() as u64 != phi {
            return Err(Error::Domain(format!("unit group of {modulus}: {} elements, expected {phi}", elements.len())));
        }
        let mut dlog = vec![NONE; residues as usize];
        for (i, &r) in elements.iter().enumerate() {
            if dlog[r as usize] != NONE {
                return Err(Error::Domain(format!("unit group of {modulus}: generators are dependent")));
            }
            dlog[r as usize] = i as u32;
        }
        let exponent = orders.iter().fold(1, |a, &b| lcm32(a, b));
        Ok(UnitGroup { field: f.clone(), modulus: modulus.clone(), factors: fac, gens, orders, cyclic, phi, exponent, dlog, elements })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// Whether generator i is a lifted primitive root rather than a 1 + P element.
    pub fn is_cyclic_generator(&self, i: usize) -> bool {
        self.cyclic[i]
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    /// lcm of the generator orders; every character value is an exponent-th root of unity.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn residue_count(&self) -> usize {
        self.dlog.len()
    }

    pub fn residue_of(&self, g: &Poly) -> u64 {
        g.rem(&self.modulus, &self.field).residue_index(self.field.q())
    }

    #[inline]
    pub fn dlog_residue(&self, r: u64) -> Option<u32> {
        let v = self.dlog[r as usize];
        (v != NONE).then_some(v)
    }

    /// Mixed-radix discrete log, or None when (G, Q) ≠ 1.
    pub fn dlog(&self, g: &Poly) -> Option<u32> {
        self.dlog_residue(self.residue_of(g))
    }

    pub fn digits(&self, mut r: u32) -> Vec<u32> {
        self.orders
            .iter()
            .map(|&n| {
                let d = r % n;
                r /= n;
                d
            })
            .collect()
    }

    pub fn radix(&self, digits: &[u32]) -> u32 {
        digits.iter().zip(&self.orders).rev().fold(0, |acc, (&d, &n)| acc * n + d)
    }

    /// Unit with the given mixed-radix index.
    pub fn element(&self, r: u32) -> Poly {
        Poly::from_residue_index(self.field.q(), self.elements[r as usize] as u64)
    }

    pub fn element_residue(&self, r: u32) -> u64 {
        self.elements[r as usize] as u64
    }

    /// Checks every generator order exactly.
    pub fn verify_orders(&self) -> bool {
        self.gens
            .iter()
            .zip(&self.orders)
            .all(|(g, &n)| has_exact_order(g, n as u64, &self.modulus, &self.field))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(q: u32, s: &str) -> Arc<UnitGroup> {
        let f = FieldSpec::new(q).unwrap();
        unit_group(&Poly::parse(s, &f).unwrap(), &f).unwrap()
    }

    #[test]
    fn small_groups() {
        let g = group(2, "t^2");
        assert_eq!((g.phi(), g.orders().to_vec()), (2, vec![2]));
        assert_eq!(g.element(1), Poly::new(vec![1, 1]));
        let g = group(2, "t^2+t+1");
        assert_eq!((g.phi(), g.orders().to_vec()), (3, vec![3]));
        let g = group(2, "t");
        assert_eq!((g.phi(), g.rank()), (1, 0));
        let g = group(3, "1");
        assert_eq!(g.phi(), 1);
        assert_eq!(g.dlog(&Poly::t()), Some(0));
    }

    #[test]
    fn structure_and_dlog_homomorphism() {
        for (q, m) in [(2, "t^5"), (2, "t^4+t+1"), (3, "t^4"), (3, "t^3+2*t+1"), (4, "t^3"), (5, "t^2+1"), (2, "t^6+t^3"), (9, "t^2")] {
            let f = FieldSpec::new(q).unwrap();
            if Poly::parse(m, &f).is_err() {
                continue;
            }
            let g = unit_group(&Poly::parse(m, &f).unwrap(), &f).unwrap();
            assert!(g.verify_orders(), "q={q} Q={m}");
            assert_eq!(g.orders().iter().map(|&n| n as u64).product::<u64>(), g.phi());
            let units: Vec<u64> = (0..g.residue_count() as u64).filter(|&r| g.dlog_residue(r).is_some()).collect();
            assert_eq!(units.len() as u64, g.phi());
            for (i, &a) in units.iter().enumerate().step_by(3) {
                for &b in units.iter().skip(i % 5).step_by(7) {
                    let (pa, pb) = (Poly::from_residue_index(q, a), Poly::from_residue_index(q, b));
                    let (da, db) = (g.digits(g.dlog(&pa).unwrap()), g.digits(g.dlog(&pb).unwrap()));
                    let dab = g.digits(g.dlog(&pa.mul(&pb, &f)).unwrap());
                    for k in 0..g.rank() {
                        assert_eq!((da[k] + db[k]) % g.orders()[k], dab[k]);
                    }
                }
            }
        }
    }

    #[test]
    fn p_part_of_prime_power() {
        // (F_2[t]/t^4)^× has order 8 and is Z/4 × Z/2
        let g = group(2, "t^4");
        let mut o = g.orders().to_vec();
        o.sort();
        assert_eq!(o, vec![2, 4]);
        // (F_3[t]/t^3)^× = F_3^× × Z/3 × Z/3
        let g = group(3, "t^3");
        assert_eq!(g.orders(), &[2, 3, 3]);
        assert!(g.is_cyclic_generator(0));
    }

    #[test]
    fn capacity_guard() {
        let f = FieldSpec::new(2).unwrap();
        let m = Poly::monomial(1, 30);
        assert!(matches!(unit_group(&m, &f), Err(Error::Capacity(_))));
    }
}
