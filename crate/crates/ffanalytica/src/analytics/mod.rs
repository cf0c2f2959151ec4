//! Statistics of multiplicative functions over M_N and the exact identities
//! that constrain them.
//!
//! Every float accumulation goes through [`det_sum`] or a fixed tree over
//! per-block results, so values do not depend on the thread count.

mod additive;
mod correlation;
mod distance;
mod expsum;
mod variance;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

pub use additive::{involution_bijection_check, prime_additive_energy, BijectionReport};
pub use correlation::{katai_exact, katai_increment, log_correlation, log_correlation_exact, KataiExact};
pub use distance::{
    best_char, distance, distance_sq, halasz_report, min_theta, nonpret_profile, pretentious_defect, BestChar,
    CharDistance, CharSet, DistanceProfile, HalaszReport, PrimeSums,
};
pub use expsum::{exp_sum_grid, exp_sum_statistic, exp_sum_sup, farey_points, type_one_check, LaurentPoint, TypeOneCheck};
pub use variance::{ap_variance, mr_variance, ApVarianceReport, VarianceMode, VarianceReport};

use crate::error::{capacity, Result};
use crate::gf::Field;
use crate::multfn::MultFn;
use crate::par;
use crate::poly::{is_irreducible, monic_offset, q_pow, FactorSieve, Poly};

/// Monics a single statistic may enumerate.
pub const MAX_ENUM: u64 = 1 << 26;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Field, optional factor sieve and cached prime lists shared by the statistics.
#[derive(Debug)]
pub struct Context {
    field: Field,
    sieve: Option<Arc<FactorSieve>>,
    primes: Mutex<BTreeMap<usize, Arc<Vec<Poly>>>>,
}

impl Context {
    /// Context with a sieve of the default bound for q.
    pub fn new(field: &Field) -> Result<Context> {
        let s = FactorSieve::with_default_bound(field)?;
        Ok(Context::with_sieve(field, Some(Arc::new(s))))
    }

    pub fn with_sieve(field: &Field, sieve: Option<Arc<FactorSieve>>) -> Context {
        Context { field: field.clone(), sieve, primes: Mutex::new(BTreeMap::new()) }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn sieve(&self) -> Option<&FactorSieve> {
        self.sieve.as_deref()
    }

    /// Irreducibles of degree d in monic-index order.
    pub fn primes(&self, d: usize) -> Result<Arc<Vec<Poly>>> {
        if let Some(p) = self.primes.lock().expect("prime cache poisoned").get(&d) {
            return Ok(p.clone());
        }
        let q = self.q();
        let list: Vec<Poly> = match self.sieve() {
            Some(s) if d <= s.bound() => s.primes_of_degree(d).into_iter().map(|i| Poly::from_monic_index(q, d, i)).collect(),
            _ => {
                let count = q_pow(q, d)?;
                if count > MAX_ENUM {
                    return capacity(format!("listing irreducibles of degree {d} over F_{q} needs {count} tests"));
                }
                let f = &self.field;
                par::chunked_collect(0..count, par::DEFAULT_CHUNK, |r| {
                    r.map(|i| Poly::from_monic_index(q, d, i))
                        .filter(|p| is_irreducible(p, f).unwrap_or(false))
                        .collect()
                })
            }
        };
        let list = Arc::new(list);
        self.primes.lock().expect("prime cache poisoned").insert(d, list.clone());
        Ok(list)
    }

    /// f on all monics of degree ≤ n, by global index.
    pub fn table(&self, f: &MultFn, n: usize) -> Result<Vec<Complex64>> {
        let total = monic_offset(self.q(), n + 1);
        if total > MAX_ENUM {
            return capacity(format!("tabulating {f} to degree {n} needs {total} values"));
        }
        f.table(&self.field, n, self.sieve())
    }
}

/// Fixed-shape pairwise sum of a short slice.
pub(crate) fn pairwise(v: &[Complex64]) -> Complex64 {
    if v.len() <= 32 {
        return v.iter().fold(ZERO, |a, b| a + b);
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise(a) + pairwise(b)
}

/// Deterministic sum: fixed chunks, pairwise inside, fixed tree across.
pub fn det_sum(v: &[Complex64]) -> Complex64 {
    par::chunked_reduce(0..v.len() as u64, par::DEFAULT_CHUNK, |r| pairwise(&v[r.start as usize..r.end as usize]), || ZERO, |a, b| a + b)
}

/// (1/q^N) Σ_{G ∈ M_N} f(G).
pub fn mean(ctx: &Context, f: &MultFn, n: usize) -> Result<Complex64> {
    let q = ctx.q();
    let t = ctx.table(f, n)?;
    let lo = monic_offset(q, n) as usize;
    Ok(det_sum(&t[lo..]) / q_pow(q, n)? as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;

    #[test]
    fn means() {
        let f = FieldSpec::new(2).unwrap();
        let ctx = Context::new(&f).unwrap();
        assert_eq!(mean(&ctx, &MultFn::one(), 7).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(mean(&ctx, &MultFn::moebius(), 2).unwrap(), ZERO);
        let e = MultFn::arch(0.3);
        assert!((mean(&ctx, &e, 5).unwrap() - crate::multfn::Theta::new(0.3).value(5)).norm() < 1e-15);
    }

    #[test]
    fn prime_lists_without_sieve_match_sieve() {
        let f = FieldSpec::new(3).unwrap();
        let a = Context::new(&f).unwrap();
        let b = Context::with_sieve(&f, None);
        for d in 1..=5 {
            assert_eq!(*a.primes(d).unwrap(), *b.primes(d).unwrap());
        }
    }

    #[test]
    fn det_sum_is_order_fixed() {
        let v: Vec<Complex64> = (0..10_000).map(|i| Complex64::new((i as f64).sin(), (i as f64).cos())).collect();
        let a = det_sum(&v);
        let b = par::with_threads(1, || det_sum(&v));
        assert_eq!(a, b);
    }
}
