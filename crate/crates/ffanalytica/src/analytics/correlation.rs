//! Logarithmic two-point correlations and Kátai increments.

use num_complex::Complex64;
use serde::Serialize;

use super::{det_sum, Context, MAX_ENUM};
use crate::chargroup::rot::lcm;
use crate::chargroup::{Rot, RotSum};
use crate::error::{capacity, usage, Result};
use crate::multfn::{Exact, MultFn};
use crate::par;
use crate::poly::{monic_offset, q_pow, Poly};

/// Maps the residue index r of the low deg B + 1 digits to that of r + B.
fn add_map(b: &Poly, q: u32, f: &crate::gf::FieldSpec) -> Result<Vec<u64>> {
    let span = q_pow(q, b.degree() + 1)?;
    Ok((0..span).map(|r| Poly::from_residue_index(q, r).add(b, f).residue_index(q)).collect())
}

fn check_shift(b: &Poly, n: usize, q: u32) -> Result<u64> {
    if b.is_zero() {
        return usage("the shift B must be non-zero");
    }
    if n <= b.degree() {
        return usage(format!("need N > deg B, got N = {n}, deg B = {}", b.degree()));
    }
    let count = monic_offset(q, n + 1);
    if count > MAX_ENUM {
        return capacity(format!("{count} monics of degree ≤ {n} exceed the enumeration budget"));
    }
    Ok(count)
}

#[derive(Debug, Clone, Serialize)]
pub struct LogCorrelation {
    pub n: usize,
    /// q^{-d} Σ_{G ∈ M_d} f₁(G) f₂(G + B) for d = 0..=N; zero for d ≤ deg B
    pub per_degree: Vec<Complex64>,
    pub value: Complex64,
    /// degrees d ≤ deg B left out because G + B is not monic of degree d
    pub skipped_degrees: usize,
}

impl LogCorrelation {
    /// The statistic truncated at N' ≤ N.
    pub fn value_at(&self, n: usize) -> Complex64 {
        self.per_degree[..=n].iter().sum::<Complex64>() / n as f64
    }
}

/// (1/N) Σ_{G ∈ M_{≤N}, deg G > deg B} q^{-deg G} f₁(G) f₂(G + B).
pub fn log_correlation(ctx: &Context, f1: &MultFn, f2: &MultFn, b: &Poly, n: usize) -> Result<LogCorrelation> {
    let q = ctx.q();
    check_shift(b, n, q)?;
    let t1 = ctx.table(f1, n)?;
    let t2 = ctx.table(f2, n)?;
    let span = q_pow(q, b.degree() + 1)?;
    let map = add_map(b, q, ctx.field())?;
    let mut per_degree = vec![Complex64::new(0.0, 0.0); n + 1];
    for (d, slot) in per_degree.iter_mut().enumerate().skip(b.degree() + 1) {
        let off = monic_offset(q, d) as usize;
        let count = q_pow(q, d)?;
        let terms: Vec<Complex64> = par::chunked_collect(0..count, par::DEFAULT_CHUNK, |r| {
            r.map(|i| {
                let low = i % span;
                let j = i - low + map[low as usize];
                t1[off + i as usize] * t2[off + j as usize]
            })
            .collect()
        });
        *slot = det_sum(&terms) / count as f64;
    }
    let value = per_degree.iter().sum::<Complex64>() / n as f64;
    Ok(LogCorrelation { n, per_degree, value, skipped_degrees: b.degree() + 1 })
}

/// The same statistic with each degree summed exactly.
#[derive(Debug, Clone)]
pub struct LogCorrelationExact {
    pub q: u32,
    pub n: usize,
    pub per_degree: Vec<RotSum>,
}

impl LogCorrelationExact {
    pub fn value(&self) -> Complex64 {
        let q = self.q;
        self.per_degree.iter().enumerate().map(|(d, s)| s.to_complex() / (q as f64).powi(d as i32)).sum::<Complex64>()
            / self.n as f64
    }
}

/// Exact per-degree sums when both functions take only root-of-unity or zero values.
pub fn log_correlation_exact(ctx: &Context, f1: &MultFn, f2: &MultFn, b: &Poly, n: usize) -> Result<Option<LogCorrelationExact>> {
    let q = ctx.q();
    check_shift(b, n, q)?;
    let fld = ctx.field();
    let s = ctx.sieve();
    let mut per_degree = Vec::with_capacity(n + 1);
    for d in 0..=n {
        if d <= b.degree() {
            per_degree.push(RotSum::new(1));
            continue;
        }
        let count = q_pow(q, d)?;
        let vals: Vec<Option<Exact>> = par::chunked_collect(0..count, par::DEFAULT_CHUNK, |r| {
            r.map(|i| {
                let g = Poly::from_monic_index(q, d, i);
                let a = f1.eval_exact(&g, fld, s).ok().flatten()?;
                let c = f2.eval_exact(&g.add(b, fld), fld, s).ok().flatten()?;
                Some(a.mul(c))
            })
            .collect()
        });
        if vals.iter().any(Option::is_none) {
            return Ok(None);
        }
        let l = vals.iter().fold(1u64, |acc, v| match v {
            Some(Exact::Root(r)) => lcm(acc, r.n as u64),
            _ => acc,
        }) as u32;
        let mut sum = RotSum::new(l);
        for v in vals.into_iter().flatten() {
            if let Exact::Root(r) = v {
                sum.add_rot(r.lift(l).k, 1);
            }
        }
        per_degree.push(sum);
    }
    Ok(Some(LogCorrelationExact { q, n, per_degree }))
}

fn check_katai(f: &MultFn, m: &Poly, n: usize, q: u32) -> Result<()> {
    if !f.is_completely_multiplicative() {
        return usage(format!("the Kátai increment needs a completely multiplicative f, got {f}"));
    }
    if !m.is_monic() || m.degree() < 1 {
        return usage(format!("Q must be monic of positive degree, got {m}"));
    }
    let count = monic_offset(q, n + m.degree() + 1);
    if count > MAX_ENUM {
        return capacity(format!("{count} monics needed for the Kátai sum exceed the budget"));
    }
    Ok(())
}

/// Σ_{G ∈ M_{≤N}} |f(QG + 1) + z f(G)|.
pub fn katai_increment(ctx: &Context, f: &MultFn, m: &Poly, z: Complex64, n: usize) -> Result<f64> {
    let q = ctx.q();
    check_katai(f, m, n, q)?;
    if (z.norm() - 1.0).abs() > 1e-12 {
        return usage(format!("z must lie on the unit circle, |z| = {}", z.norm()));
    }
    let fld = ctx.field();
    let t = ctx.table(f, n + m.degree())?;
    let total = monic_offset(q, n + 1);
    let terms: Vec<Complex64> = par::chunked_collect(0..total, par::DEFAULT_CHUNK, |r| {
        r.map(|gi| {
            let g = Poly::from_global_index(q, gi);
            let shifted = m.mul(&g, fld).add(&Poly::one(), fld);
            Complex64::new((t[shifted.global_index(q) as usize] + z * t[gi as usize]).norm(), 0.0)
        })
        .collect()
    });
    Ok(det_sum(&terms).re)
}

#[derive(Debug, Clone, Serialize)]
pub struct KataiExact {
    /// number of G of degree d whose term is not exactly zero
    pub nonzero_by_degree: Vec<u64>,
    pub total: f64,
}

/// Kátai increment with every term decided exactly.
pub fn katai_exact(ctx: &Context, f: &MultFn, m: &Poly, z: Exact, n: usize) -> Result<Option<KataiExact>> {
    let q = ctx.q();
    check_katai(f, m, n, q)?;
    let Exact::Root(zr) = z else {
        return usage("z must lie on the unit circle");
    };
    let fld = ctx.field();
    let s = ctx.sieve();
    let minus_z = Exact::Root(zr.mul(Rot { k: 1, n: 2 }).reduced());
    let mut nonzero_by_degree = vec![0u64; n + 1];
    let mut parts = Vec::with_capacity(n + 1);
    for d in 0..=n {
        let count = q_pow(q, d)?;
        let terms: Vec<Option<(bool, Complex64)>> = par::chunked_collect(0..count, par::DEFAULT_CHUNK, |r| {
            r.map(|i| {
                let g = Poly::from_monic_index(q, d, i);
                let shifted = m.mul(&g, fld).add(&Poly::one(), fld);
                let a = f.eval_exact(&shifted, fld, s).ok().flatten()?;
                let b = f.eval_exact(&g, fld, s).ok().flatten()?;
                let vanishes = a == minus_z.mul(b) || (a == Exact::Zero && b == Exact::Zero);
                Some((!vanishes, a.to_complex() + zr.to_complex() * b.to_complex()))
            })
            .collect()
        });
        if terms.iter().any(Option::is_none) {
            return Ok(None);
        }
        let mut mags = Vec::with_capacity(terms.len());
        for (nz, v) in terms.into_iter().flatten() {
            nonzero_by_degree[d] += u64::from(nz);
            mags.push(Complex64::new(if nz { v.norm() } else { 0.0 }, 0.0));
        }
        parts.push(det_sum(&mags).re);
    }
    Ok(Some(KataiExact { nonzero_by_degree, total: parts.iter().sum() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chargroup::short_chars;
    use crate::gf::FieldSpec;

    #[test]
    fn correlation_examples() {
        let f = FieldSpec::new(2).unwrap();
        let ctx = Context::new(&f).unwrap();
        let one = MultFn::one();
        let b = Poly::parse("t+1", &f).unwrap();
        let c = log_correlation(&ctx, &one, &one, &b, 9).unwrap();
        assert!((c.value - Complex64::new(8.0 / 9.0, 0.0)).norm() < 1e-15);
        let mu = MultFn::moebius();
        let c = log_correlation(&ctx, &mu, &mu, &Poly::one(), 16).unwrap();
        assert!(c.value.norm() <= 0.1, "{}", c.value);
        let e = log_correlation_exact(&ctx, &mu, &mu, &Poly::one(), 16).unwrap().unwrap();
        assert!((e.value() - c.value).norm() < 1e-12);
        assert!((c.value_at(16) - c.value).norm() < 1e-15);
    }

    #[test]
    fn katai_examples() {
        let f = FieldSpec::new(2).unwrap();
        let ctx = Context::new(&f).unwrap();
        let t = Poly::t();
        assert_eq!(katai_increment(&ctx, &MultFn::one(), &t, -Complex64::new(1.0, 0.0), 10).unwrap(), 0.0);
        let big = katai_increment(&ctx, &MultFn::liouville(), &t, -Complex64::new(1.0, 0.0), 14).unwrap();
        assert!(big > 0.2 * 2f64.powi(14), "{big}");
        assert!(matches!(katai_increment(&ctx, &MultFn::moebius(), &t, Complex64::new(1.0, 0.0), 4), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn katai_vanishes_for_short_characters() {
        for q in [2u32, 3] {
            let f = FieldSpec::new(q).unwrap();
            let ctx = Context::new(&f).unwrap();
            for x in short_chars(2, &f).unwrap() {
                let nu = x.length();
                let fun = MultFn::character(&crate::chargroup::HayesChar::from_short(x.clone())).mul(&MultFn::arch(1.0 / 3.0));
                for m in [Poly::t(), Poly::parse("t+1", &f).unwrap()] {
                    let fm = fun.eval_exact(&m, &f, None).unwrap().unwrap();
                    let z = Exact::Root(Rot { k: 1, n: 2 }).mul(fm);
                    let k = katai_exact(&ctx, &fun, &m, z, 8).unwrap().unwrap();
                    for (d, &c) in k.nonzero_by_degree.iter().enumerate() {
                        if d + 1 > nu {
                            assert_eq!(c, 0, "q={q} ν={nu} d={d}");
                        }
                    }
                    assert!(k.total <= 2.0 * (q as f64).powi(nu as i32 + 1));
                    let float = katai_increment(&ctx, &fun, &m, z.to_complex(), 8).unwrap();
                    assert!((float - k.total).abs() < 1e-9);
                }
            }
        }
    }
}
