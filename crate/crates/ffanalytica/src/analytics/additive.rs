//! Additive energy of irreducibles and the short-interval ↔ progression bijection.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::Context;
use crate::error::{usage, Result};
use crate::gf::FieldSpec;
use crate::poly::{interval, q_pow, Poly};

/// #{(P₁, P₂, P₃, P₄) ∈ 𝒫_H⁴ : P₁ + P₂ − P₃ − P₄ = M}, by histogramming pair sums.
pub fn prime_additive_energy(ctx: &Context, h: usize, m: &Poly) -> Result<u128> {
    if h < 1 {
        return usage("H must be positive");
    }
    if !m.is_zero() && m.degree() >= h {
        return usage(format!("need deg M < H, got deg M = {}, H = {h}", m.degree()));
    }
    let (q, f) = (ctx.q(), ctx.field());
    let primes = ctx.primes(h)?;
    // pair sums have degree ≤ H, so residue indices below q^{H+1} are keys
    let mut hist: HashMap<u64, u64> = HashMap::new();
    for a in primes.iter() {
        for b in primes.iter() {
            *hist.entry(a.add(b, f).residue_index(q)).or_default() += 1;
        }
    }
    let mut total = 0u128;
    for (&s, &c) in &hist {
        let t = Poly::from_residue_index(q, s).sub(m, f).residue_index(q);
        if let Some(&d) = hist.get(&t) {
            total += c as u128 * d as u128;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct BijectionReport {
    pub n: usize,
    pub h: usize,
    /// #{G ∈ I_H(G₀) : G(0) ≠ 0}
    pub source_size: usize,
    /// #{deg F = N : F ≡ A (mod t^{N+1−H}), F(0) = 1}
    pub target_size: usize,
    pub injective: bool,
    /// every image has degree N, constant term 1 and the common class A
    pub lands_in_class: bool,
    pub onto: bool,
    /// A as a polynomial of degree ≤ N − H
    pub class: Poly,
    /// A is read off the N − H coefficients of G₀ below the leading one
    pub class_from_top: bool,
}

impl BijectionReport {
    pub fn holds(&self) -> bool {
        self.injective && self.lands_in_class && self.onto && self.class_from_top && self.source_size == self.target_size
    }
}

fn low_part(g: &Poly, len: usize) -> Poly {
    Poly::new(g.coeffs().iter().take(len).copied().collect())
}

/// Checks that G ↦ G* maps {G ∈ I_H(G₀) : (G, t) = 1} onto a progression mod t^{N+1−H}.
pub fn involution_bijection_check(g0: &Poly, h: usize, f: &FieldSpec) -> Result<BijectionReport> {
    if !g0.is_monic() {
        return usage(format!("G₀ must be monic, got {g0}"));
    }
    let n = g0.degree();
    if h < 1 || h > n {
        return usage(format!("need 1 ≤ H ≤ N, got H = {h}, N = {n}"));
    }
    let q = f.q();
    let modlen = n + 1 - h;
    let images: Vec<Poly> = interval(g0, h, q)?.filter(|g| g.constant_term() != 0).map(|g| g.involute()).collect();
    let source_size = images.len();
    let set: BTreeSet<Vec<u32>> = images.iter().map(|p| p.coeffs().to_vec()).collect();
    let injective = set.len() == source_size;
    let class = images.first().map(|p| low_part(p, modlen)).unwrap_or_else(Poly::zero);
    let lands_in_class = images
        .iter()
        .all(|p| p.deg() == Some(n) && p.constant_term() == 1 && low_part(p, modlen) == class);

    // targets built coefficient by coefficient: low part A, H − 1 free, F_N ≠ 0
    let mut target = BTreeSet::new();
    let free = q_pow(q, h - 1)?;
    for top in 1..q {
        for x in 0..free {
            let mut c = class.coeffs().to_vec();
            c.resize(modlen, 0);
            c.extend(Poly::from_residue_index(q, x).coeffs().iter().copied().chain(std::iter::repeat(0)).take(h - 1));
            c.push(top);
            target.insert(Poly::new(c).coeffs().to_vec());
        }
    }
    let onto = target == set;
    let expected: Vec<u32> = std::iter::once(1).chain((1..modlen).map(|i| g0.coeff(n - i))).collect();
    let class_from_top = class == Poly::new(expected);
    Ok(BijectionReport { n, h, source_size, target_size: target.len(), injective, lands_in_class, onto, class, class_from_top })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::poly::Monics;

    #[test]
    fn energy_small_cases() {
        let f = FieldSpec::new(2).unwrap();
        let ctx = Context::new(&f).unwrap();
        assert_eq!(prime_additive_energy(&ctx, 1, &Poly::zero()).unwrap(), 8);
        assert!(matches!(prime_additive_energy(&ctx, 2, &Poly::parse("t^2", &f).unwrap()), Err(crate::Error::Usage(_))));
        // brute force over quadruples at q = 3, H = 2, M = t + 2
        let f3 = FieldSpec::new(3).unwrap();
        let c3 = Context::new(&f3).unwrap();
        let m = Poly::parse("t+2", &f3).unwrap();
        let ps = c3.primes(2).unwrap();
        let mut brute = 0u128;
        for a in ps.iter() {
            for b in ps.iter() {
                for c in ps.iter() {
                    for d in ps.iter() {
                        brute += u128::from(a.add(b, &f3).sub(c, &f3).sub(d, &f3) == m);
                    }
                }
            }
        }
        assert_eq!(prime_additive_energy(&c3, 2, &m).unwrap(), brute);
    }

    #[test]
    fn bijection_exhaustive_small() {
        for q in [2u32, 3] {
            let f = FieldSpec::new(q).unwrap();
            let n = if q == 2 { 8 } else { 5 };
            for g0 in Monics::new(q, n).unwrap() {
                for h in 1..=n {
                    let r = involution_bijection_check(&g0, h, &f).unwrap();
                    assert!(r.holds(), "{g0} H={h}: {r:?}");
                }
            }
        }
    }
}
