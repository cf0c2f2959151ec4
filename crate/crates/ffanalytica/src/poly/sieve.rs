//! Smallest-irreducible-factor table over all monics of degree ≤ D.
//!
//! Entries are addressed by global index (degree-major, then monic index). For
//! each G the table stores the smallest irreducible factor P (ordered by degree,
//! then index), its exact exponent e, and the global index of G / P^e.

use crate::error::{capacity, Result};
use crate::gf::FieldSpec;
use crate::poly::{monic_offset, split_global, Poly};

const UNSET: u32 = u32::MAX;

/// Entries allowed for the automatic bound.
pub const DEFAULT_ENTRY_BUDGET: u64 = 2_500_000;
/// Hard ceiling regardless of the requested bound (~9 bytes per entry).
pub const MAX_ENTRIES: u64 = 40_000_000;

#[derive(Debug, Clone)]
pub struct FactorSieve {
    q: u32,
    bound: usize,
    spf: Vec<u32>,
    exp: Vec<u8>,
    rest: Vec<u32>,
}

impl FactorSieve {
    /// Largest D whose table fits [`DEFAULT_ENTRY_BUDGET`]: 20 for q = 2, 13 for q = 3.
    pub fn default_bound(q: u32) -> usize {
        let mut d = 1;
        while monic_offset(q, d + 2) <= DEFAULT_ENTRY_BUDGET {
            d += 1;
        }
        d
    }

    pub fn with_default_bound(f: &FieldSpec) -> Result<FactorSieve> {
        FactorSieve::new(f, FactorSieve::default_bound(f.q()))
    }

    pub fn new(f: &FieldSpec, bound: usize) -> Result<FactorSieve> {
        let q = f.q();
        let total = monic_offset(q, bound + 1);
        if total > MAX_ENTRIES {
            return capacity(format!("factor sieve of degree {bound} over F_{q} needs {total} entries"));
        }
        let n = total as usize;
        let mut s = FactorSieve { q, bound, spf: vec![UNSET; n], exp: vec![0; n], rest: vec![0; n] };
        s.spf[0] = 0;

        let qq = q as u64;
        let pow: Vec<u64> = (0..=bound).map(|i| qq.pow(i as u32)).collect();
        let delta: Vec<u32> = (0..q).map(|a| f.sub((a + 1) % q, a)).collect();

        for d in 1..=bound {
            let (lo, hi) = (monic_offset(q, d), monic_offset(q, d + 1));
            let mut primes = Vec::new();
            for g in lo..hi {
                if s.spf[g as usize] == UNSET {
                    s.spf[g as usize] = g as u32;
                    s.exp[g as usize] = 1;
                    s.rest[g as usize] = 0;
                    primes.push(g);
                }
            }
            if 2 * d > bound {
                continue;
            }
            for &pg in &primes {
                let p = Poly::from_global_index(q, pg);
                let pc = p.coeffs();
                for n_h in d..=bound - d {
                    let m = d + n_h;
                    let base_g = monic_offset(q, m);
                    let base_h = monic_offset(q, n_h);
                    // G = P·t^{n_h} to start, updated as H's low digits count up
                    let mut gcoef = vec![0u32; m + 1];
                    gcoef[n_h..=m].copy_from_slice(pc);
                    let mut gidx: u64 = (0..m).map(|i| gcoef[i] as u64 * pow[i]).sum();
                    let mut hdig = vec![0u32; n_h];
                    let count = pow[n_h];
                    for hidx in 0..count {
                        let gi = (base_g + gidx) as usize;
                        if s.spf[gi] == UNSET {
                            let hg = (base_h + hidx) as usize;
                            s.spf[gi] = pg as u32;
                            if s.spf[hg] == pg as u32 {
                                s.exp[gi] = s.exp[hg] + 1;
                                s.rest[gi] = s.rest[hg];
                            } else {
                                s.exp[gi] = 1;
                                s.rest[gi] = hg as u32;
                            }
                        }
                        if hidx + 1 == count {
                            break;
                        }
                        // odometer step on H, mirrored into G += δ·P·t^j
                        let mut j = 0;
                        loop {
                            let a = hdig[j];
                            let dl = delta[a as usize];
                            hdig[j] = (a + 1) % q;
                            for (i, &c) in pc.iter().enumerate() {
                                let pos = i + j;
                                let old = gcoef[pos];
                                let new = f.add(old, f.mul(dl, c));
                                gcoef[pos] = new;
                                gidx = gidx + new as u64 * pow[pos] - old as u64 * pow[pos];
                            }
                            if hdig[j] != 0 {
                                break;
                            }
                            j += 1;
                        }
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.spf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spf.is_empty()
    }

    /// Smallest irreducible factor (global index), its exponent, and the cofactor.
    #[inline]
    pub fn split(&self, g: u64) -> (u64, u8, u64) {
        let i = g as usize;
        (self.spf[i] as u64, self.exp[i], self.rest[i] as u64)
    }

    #[inline]
    pub fn is_prime_global(&self, g: u64) -> bool {
        g != 0 && self.spf[g as usize] as u64 == g
    }

    /// Factor list as (prime global index, exponent), in increasing prime order.
    pub fn factor_global(&self, mut g: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while g != 0 {
            let (p, e, r) = self.split(g);
            out.push((p, e as u32));
            g = r;
        }
        out
    }

    /// Monic indices of the irreducibles of degree d.
    pub fn primes_of_degree(&self, d: usize) -> Vec<u64> {
        assert!(d >= 1 && d <= self.bound);
        let lo = monic_offset(self.q, d);
        let hi = monic_offset(self.q, d + 1);
        (lo..hi).filter(|&g| self.is_prime_global(g)).map(|g| g - lo).collect()
    }

    /// Tabulates a multiplicative function from its values on prime powers.
    /// `pp(prime_global, e)` must be pure; the result is indexed by global index.
    pub fn tabulate<T: Copy + std::ops::Mul<Output = T>>(&self, one: T, pp: impl Fn(u64, u32) -> T) -> Vec<T> {
        let mut out = Vec::with_capacity(self.spf.len());
        out.push(one);
        for g in 1..self.spf.len() as u64 {
            let (p, e, r) = self.split(g);
            let v = pp(p, e as u32) * out[r as usize];
            out.push(v);
        }
        out
    }

    pub fn degree_of(&self, g: u64) -> usize {
        split_global(self.q, g).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::poly::{count_irreducibles, factor_direct, is_irreducible};

    #[test]
    fn default_bounds() {
        assert_eq!(FactorSieve::default_bound(2), 20);
        assert_eq!(FactorSieve::default_bound(3), 13);
        assert_eq!(FactorSieve::default_bound(4), 10);
        assert_eq!(FactorSieve::default_bound(5), 9);
    }

    #[test]
    fn agrees_with_direct_factorization() {
        for (q, bound) in [(2u32, 10usize), (3, 6), (4, 5), (9, 3)] {
            let f = FieldSpec::new(q).unwrap();
            let s = FactorSieve::new(&f, bound).unwrap();
            for g in 1..s.len() as u64 {
                let poly = Poly::from_global_index(q, g);
                let direct = factor_direct(&poly, &f).unwrap();
                let via: Vec<(Poly, u32)> = s
                    .factor_global(g)
                    .into_iter()
                    .map(|(p, e)| (Poly::from_global_index(q, p), e))
                    .collect();
                assert_eq!(via, direct.factors, "q={q} G={poly}");
            }
            for d in 1..=bound {
                assert_eq!(s.primes_of_degree(d).len() as u128, count_irreducibles(q, d).unwrap());
            }
        }
    }

    #[test]
    fn irreducible_entries_point_to_themselves() {
        let f = FieldSpec::new(5).unwrap();
        let s = FactorSieve::new(&f, 4).unwrap();
        for g in 1..s.len() as u64 {
            let poly = Poly::from_global_index(5, g);
            assert_eq!(s.is_prime_global(g), is_irreducible(&poly, &f).unwrap());
        }
    }

    #[test]
    fn capacity_guard() {
        let f = FieldSpec::new(2).unwrap();
        assert!(matches!(FactorSieve::new(&f, 40), Err(crate::Error::Capacity(_))));
    }
}
