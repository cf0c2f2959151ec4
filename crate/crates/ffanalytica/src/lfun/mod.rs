//! L-polynomials of Hayes characters: coefficients by exact summation, inverse
//! roots by Durand–Kerner, and the checks they satisfy (Riemann hypothesis,
//! explicit formula, Vieta bounds on character sums).

mod roots;
mod sweep;

use num_complex::Complex64;
use serde::Serialize;

pub use roots::{durand_kerner, RootReport, DK_MAX_ITER, DK_TOL};
pub use sweep::{sweep, SweepConfig, SweepRecord, SweepSummary};

use crate::chargroup::{CharRecord, HayesChar, RotSum};
use crate::error::{capacity, domain, Error, Result};
use crate::poly::FactorSieve;
use crate::poly::{monic_offset, q_pow, Poly};

/// Largest cond_H accepted by [`l_polynomial`].
pub const MAX_COND: usize = 16;
/// Monics enumerated per coefficient at most.
pub const MAX_ENUM: u64 = 1 << 26;

#[derive(Debug, Clone, Serialize)]
pub struct LPolynomial {
    pub character: CharRecord,
    pub q: u32,
    pub cond_h: usize,
    /// c_0..c_deg with c_deg the last exactly non-zero coefficient
    pub coefficients: Vec<Complex64>,
    pub inverse_roots: Vec<Complex64>,
    pub root_residual: f64,
}

/// Σ_{G ∈ M_N} χ̃(G) as an exact rotation sum.
pub fn char_sum_exact(chi: &HayesChar, n: usize) -> Result<RotSum> {
    let q = chi.field().q();
    let count = q_pow(q, n)?;
    if count > MAX_ENUM {
        return capacity(format!("|M_{n}| = {count} exceeds the enumeration budget"));
    }
    let l = chi.denominator();
    Ok(crate::par::chunked_reduce(
        0..count,
        crate::par::DEFAULT_CHUNK,
        |r| {
            let mut s = RotSum::new(l);
            for idx in r {
                if let Some(v) = chi.value_rot(&Poly::from_monic_index(q, n, idx)) {
                    s.add_rot(v.lift(l).k, 1);
                }
            }
            s
        },
        || RotSum::new(l),
        |mut a, b| {
            a.add_assign(&b);
            a
        },
    ))
}

impl LPolynomial {
    /// From exact sums c_0..c_{cond_H}; the last must vanish exactly.
    pub fn from_exact(character: CharRecord, q: u32, cond_h: usize, sums: &[RotSum]) -> Result<LPolynomial> {
        debug_assert_eq!(sums.len(), cond_h + 1);
        let last = &sums[cond_h];
        if !last.is_zero() {
            return Err(Error::Numeric {
                message: format!("Σ over M_{cond_h} of a non-principal character is not zero"),
                residual: last.to_complex().norm(),
            });
        }
        let deg = (0..cond_h).rev().find(|&n| !sums[n].is_zero()).unwrap_or(0);
        let coefficients: Vec<Complex64> = sums[..=deg].iter().map(RotSum::to_complex).collect();
        LPolynomial::from_coefficients(character, q, cond_h, coefficients)
    }

    pub fn from_coefficients(character: CharRecord, q: u32, cond_h: usize, coefficients: Vec<Complex64>) -> Result<LPolynomial> {
        let rep = durand_kerner(&coefficients, q)?;
        Ok(LPolynomial { character, q, cond_h, coefficients, inverse_roots: rep.roots, root_residual: rep.residual })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Largest possible degree cond_H - 1.
    pub fn bound_degree(&self) -> usize {
        self.cond_h.saturating_sub(1)
    }

    /// Σ_j α_j^N.
    pub fn power_sum(&self, n: usize) -> Complex64 {
        self.inverse_roots.iter().map(|a| a.powu(n as u32)).sum()
    }

    /// max_N |coefficient of Π(1 - α_j z) - c_N|.
    pub fn product_residual(&self) -> f64 {
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for a in &self.inverse_roots {
            let mut next = p.clone();
            next.push(Complex64::new(0.0, 0.0));
            for (i, c) in p.iter().enumerate() {
                next[i + 1] -= a * c;
            }
            p = next;
        }
        p.iter().zip(&self.coefficients).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Largest distance of |α| from {1, √q}, with clustered roots replaced by
    /// their centroid (Durand–Kerner resolves repeated roots only to ~1e-8).
    pub fn rh_deviation(&self) -> f64 {
        let sq = (self.q as f64).sqrt();
        roots::cluster_centroids(&self.inverse_roots, 1e-5 * sq)
            .into_iter()
            .map(|a| {
                let m = a.norm();
                (m - 1.0).abs().min((m - sq).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// True iff every inverse root has modulus 1 or √q within `tol`.
pub fn verify_rh(l: &LPolynomial, tol: f64) -> bool {
    l.rh_deviation() <= tol
}

/// The L-polynomial of a non-principal Hayes character.
pub fn l_polynomial(chi: &HayesChar) -> Result<LPolynomial> {
    if chi.is_principal() {
        return domain("the L-function of the principal character has a pole");
    }
    let cond = chi.cond_h();
    if cond > MAX_COND {
        return capacity(format!("cond_H = {cond} is above the L-polynomial bound {MAX_COND}"));
    }
    let sums = (0..=cond).map(|n| char_sum_exact(chi, n)).collect::<Result<Vec<_>>>()?;
    LPolynomial::from_exact(chi.record(), chi.field().q(), cond, &sums)
}

/// Σ_{G ∈ M_N} χ̃(G) Λ(G), enumerating M_N with the sieve.
pub fn von_mangoldt_sum(chi: &HayesChar, n: usize, sieve: &FactorSieve) -> Result<Complex64> {
    let q = chi.field().q();
    if n > sieve.bound() {
        return capacity(format!("sieve of degree {} cannot give Λ on M_{n}", sieve.bound()));
    }
    if n == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let base = monic_offset(q, n);
    let count = q_pow(q, n)?;
    let l = chi.denominator();
    let s = crate::par::chunked_reduce(
        0..count,
        crate::par::DEFAULT_CHUNK,
        |r| {
            let mut s = RotSum::new(l);
            for idx in r {
                let (p, _, rest) = sieve.split(base + idx);
                if rest != 0 {
                    continue;
                }
                let d = sieve.degree_of(p) as i64;
                if let Some(v) = chi.value_rot(&Poly::from_monic_index(q, n, idx)) {
                    s.add_rot(v.lift(l).k, d);
                }
            }
            s
        },
        || RotSum::new(l),
        |mut a, b| {
            a.add_assign(&b);
            a
        },
    );
    Ok(s.to_complex())
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// (|Σ_{M_N} χ̃|, q^{N/2} C(cond_H - 1, N)).
pub fn char_sum_bound_check(chi: &HayesChar, n: usize) -> Result<(f64, f64)> {
    if chi.is_principal() {
        return domain("the bound is for non-principal characters");
    }
    let q = chi.field().q() as f64;
    let bound = q.powf(n as f64 / 2.0) * binomial(chi.cond_h().saturating_sub(1), n);
    let s = if n >= chi.cond_h() { 0.0 } else { char_sum_exact(chi, n)?.to_complex().norm() };
    Ok((s, bound))
}

/// max over θ in a uniform grid of |Σ_{P ∈ P_{≤N}} χ̃(P) e(θ deg P) q^{-deg P}|.
pub fn prime_sum_profile(chi: &HayesChar, n: usize, grid: usize, sieve: &FactorSieve) -> Result<f64> {
    let q = chi.field().q();
    if n > sieve.bound() {
        return capacity(format!("sieve of degree {} cannot list primes of degree {n}", sieve.bound()));
    }
    // per-degree sums S_d = Σ_{P ∈ P_d} χ̃(P)
    let s: Vec<Complex64> = (1..=n)
        .map(|d| sieve.primes_of_degree(d).into_iter().map(|i| chi.value(&Poly::from_monic_index(q, d, i))).sum())
        .collect();
    let best = (0..grid.max(1))
        .map(|k| {
            let th = k as f64 / grid.max(1) as f64;
            s.iter()
                .enumerate()
                .map(|(i, sd)| {
                    let d = (i + 1) as f64;
                    sd * Complex64::from_polar((q as f64).powf(-d), std::f64::consts::TAU * th * d)
                })
                .sum::<Complex64>()
                .norm()
        })
        .fold(0.0, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chargroup::{characters, short_chars, unit_group};
    use crate::gf::FieldSpec;

    fn chars_mod(q: u32, m: &str) -> (crate::gf::Field, Vec<HayesChar>) {
        let f = FieldSpec::new(q).unwrap();
        let g = unit_group(&Poly::parse(m, &f).unwrap(), &f).unwrap();
        let cs = characters(&g).into_iter().map(HayesChar::from_dirichlet).collect();
        (f, cs)
    }

    #[test]
    fn l_polynomial_examples() {
        let (_, cs) = chars_mod(2, "t^2");
        let l = l_polynomial(&cs[1]).unwrap();
        assert_eq!(l.coefficients.len(), 2);
        assert!((l.coefficients[0] - 1.0).norm() < 1e-15);
        assert!((l.coefficients[1] + 1.0).norm() < 1e-15);
        assert!(verify_rh(&l, 1e-9));
        assert!(l_polynomial(&cs[0]).is_err());

        // order-4 character mod t^3 over F_2
        let (_, cs) = chars_mod(2, "t^3");
        let c4 = cs.iter().find(|c| c.dirichlet().order() == 4).unwrap();
        let l = l_polynomial(c4).unwrap();
        assert_eq!(l.degree(), 2);
        assert!((l.coefficients[2].norm() - 2f64.sqrt()).abs() < 1e-12);
        assert!(l.product_residual() < 1e-12);
    }

    #[test]
    fn synthetic_rh_failure() {
        let rec = HayesChar::principal(&FieldSpec::new(2).unwrap()).record();
        let l = LPolynomial::from_coefficients(rec, 2, 2, vec![Complex64::new(1.0, 0.0), Complex64::new(-3.0, 0.0)]).unwrap();
        assert!(!verify_rh(&l, 1e-6));
        let rec = l.character.clone();
        let l = LPolynomial::from_coefficients(rec, 2, 2, vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]).unwrap();
        assert!(verify_rh(&l, 1e-12));
    }

    #[test]
    fn von_mangoldt_examples() {
        let f = FieldSpec::new(2).unwrap();
        let s = FactorSieve::new(&f, 10).unwrap();
        let p = HayesChar::principal(&f);
        assert!((von_mangoldt_sum(&p, 1, &s).unwrap() - 2.0).norm() < 1e-12);
        let (_, cs) = chars_mod(2, "t^2");
        assert!((von_mangoldt_sum(&cs[1], 1, &s).unwrap() + 1.0).norm() < 1e-12);
    }

    #[test]
    fn explicit_formula_and_bounds_mixed() {
        let f = FieldSpec::new(3).unwrap();
        let s = FactorSieve::new(&f, 8).unwrap();
        let g = unit_group(&Poly::parse("t^2+1", &f).unwrap(), &f).unwrap();
        let xs = short_chars(2, &f).unwrap();
        for d in characters(&g).into_iter().step_by(3) {
            for x in xs.iter().step_by(2) {
                let h = HayesChar::new(d.clone(), x.clone()).unwrap();
                if h.is_principal() {
                    continue;
                }
                let l = l_polynomial(&h).unwrap();
                assert!(verify_rh(&l, 1e-6), "{h}");
                assert!(l.product_residual() < 1e-8);
                for n in 1..=8 {
                    let lhs = von_mangoldt_sum(&h, n, &s).unwrap();
                    assert!((lhs + l.power_sum(n)).norm() < 1e-6, "{h} N={n}");
                }
                for n in 0..=h.cond_h() + 1 {
                    let (v, b) = char_sum_bound_check(&h, n).unwrap();
                    assert!(v <= b * (1.0 + 1e-12) + 1e-12, "{h} N={n}: {v} > {b}");
                }
            }
        }
    }

    #[test]
    fn bound_examples() {
        let (_, cs) = chars_mod(2, "t^2");
        let (v, b) = char_sum_bound_check(&cs[1], 1).unwrap();
        assert!((v - 1.0).abs() < 1e-15 && (b - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(char_sum_bound_check(&cs[1], 2).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn prime_sums_stay_bounded() {
        let f = FieldSpec::new(2).unwrap();
        let s = FactorSieve::new(&f, 16).unwrap();
        let g = unit_group(&Poly::parse("t^3+t+1", &f).unwrap(), &f).unwrap();
        for c in characters(&g).into_iter().skip(1) {
            let v = prime_sum_profile(&HayesChar::from_dirichlet(c), 16, 64, &s).unwrap();
            assert!(v <= 5.0);
        }
    }
}
