//! Short-interval variance and variance in progressions.

use num_complex::Complex64;
use serde::Serialize;

use super::distance::PrimeSums;
use super::{det_sum, Context, MAX_ENUM};
use crate::chargroup::rot::root_of_unity;
use crate::chargroup::{characters, unit_group, CharRecord, DirichletChar, HayesChar};
use crate::error::{capacity, usage, Result};
use crate::multfn::MultFn;
use crate::par;
use crate::poly::{monic_offset, q_pow, Poly};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Candidates examined when choosing the corrector χ₁.
pub const MAX_CORRECTORS: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub enum VarianceMode {
    /// subtract the long mean q^{-N} Σ_{M_N} f
    LongMean,
    /// subtract χ₁*(G₀) q^{-N} Σ_{M_N} f χ̄₁*, with χ₁ modulo t^k minimising
    /// χ ↦ 𝓓_{f χ̄*}(N); k defaults to N − H + 1
    Chi1Star { exponent: Option<usize>, real_only: bool },
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub f: String,
    pub n: usize,
    pub h: usize,
    pub mode: String,
    pub corrector: Option<CharRecord>,
    pub corrector_defect: Option<f64>,
    /// q^{-N} Σ_{M_N} f χ̄₁* (χ₁ principal in long-mean mode)
    pub long_mean: Complex64,
    pub variance: f64,
    pub intervals: u64,
    /// short mean minus corrector, per interval in index order
    #[serde(skip)]
    pub residuals: Vec<Complex64>,
}

/// The real corrector candidates χ₁ modulo t^k, principal first.
fn corrector_candidates(ctx: &Context, k: usize, real_only: bool) -> Result<Vec<DirichletChar>> {
    let g = unit_group(&Poly::monomial(1, k), ctx.field())?;
    if !real_only && g.phi() as usize > MAX_CORRECTORS {
        return capacity(format!("{} characters modulo t^{k} exceed {MAX_CORRECTORS}", g.phi()));
    }
    if g.phi() > MAX_ENUM {
        return capacity(format!("φ(t^{k}) = {} is beyond the enumeration budget", g.phi()));
    }
    let all = characters(&g);
    let out: Vec<DirichletChar> = if real_only { all.into_iter().filter(DirichletChar::is_real).collect() } else { all };
    if out.len() > MAX_CORRECTORS {
        return capacity(format!("{} corrector candidates exceed {MAX_CORRECTORS}", out.len()));
    }
    Ok(out)
}

/// q^{-N} Σ_{G_0 ∈ M_N} | q^{-H} Σ_{G ∈ I_H(G_0)} f(G) − corrector(G_0) |².
///
/// Intervals are the q^{N−H} blocks of consecutive indices, each summed once.
pub fn mr_variance(ctx: &Context, f: &MultFn, n: usize, h: usize, mode: &VarianceMode) -> Result<VarianceReport> {
    if h < 1 || h > n {
        return usage(format!("need 1 ≤ H ≤ N, got H = {h}, N = {n}"));
    }
    let q = ctx.q();
    let total = q_pow(q, n)?;
    if total > MAX_ENUM {
        return capacity(format!("|M_{n}| = {total} exceeds the enumeration budget"));
    }
    let width = q_pow(q, h)?;
    let count = total / width;
    let table = ctx.table(f, n)?;
    let block = &table[monic_offset(q, n) as usize..];
    let chunk = (par::DEFAULT_CHUNK / width).max(1);
    let sums: Vec<Complex64> = par::chunked_collect(0..count, chunk, |r| {
        r.map(|i| det_sum(&block[(i * width) as usize..((i + 1) * width) as usize])).collect()
    });
    let long = par::tree_reduce(sums.clone(), || ZERO, |a, b| a + b);
    let (qn, qh) = (total as f64, width as f64);

    let (corr, correct_at, rec, defect): (Complex64, Option<MultFn>, Option<CharRecord>, Option<f64>) = match mode {
        VarianceMode::LongMean => (long / qn, None, None, None),
        VarianceMode::Chi1Star { exponent, real_only } => {
            let k = exponent.unwrap_or(n - h + 1);
            let mut best: Option<(f64, DirichletChar)> = None;
            for chi in corrector_candidates(ctx, k, *real_only)? {
                let d = PrimeSums::new(ctx, f, &MultFn::star(&chi)?, n)?.min_theta().1;
                if best.as_ref().is_none_or(|(b, _)| d < b - 1e-12) {
                    best = Some((d, chi));
                }
            }
            let (d, chi) = best.expect("the principal character is real");
            let star = MultFn::star(&chi)?;
            let st = ctx.table(&star, n)?;
            let sb = &st[monic_offset(q, n) as usize..];
            let tw: Vec<Complex64> = block.iter().zip(sb).map(|(a, b)| a * b.conj()).collect();
            let rec = HayesChar::from_dirichlet(chi).record();
            (det_sum(&tw) / qn, Some(star), Some(rec), Some(d))
        }
    };
    let star_block = match &correct_at {
        Some(s) => Some(ctx.table(s, n)?.split_off(monic_offset(q, n) as usize)),
        None => None,
    };
    let residuals: Vec<Complex64> = (0..count)
        .map(|i| {
            let c = match &star_block {
                Some(sb) => corr * sb[(i * width) as usize],
                None => corr,
            };
            sums[i as usize] / qh - c
        })
        .collect();
    let sq: Vec<Complex64> = residuals.iter().map(|r| Complex64::new(r.norm_sqr(), 0.0)).collect();
    let variance = det_sum(&sq).re / count as f64;
    let mode_name = match mode {
        VarianceMode::LongMean => "long-mean".to_string(),
        VarianceMode::Chi1Star { .. } => "chi1-star".to_string(),
    };
    Ok(VarianceReport {
        f: f.name().into(),
        n,
        h,
        mode: mode_name,
        corrector: rec,
        corrector_defect: defect,
        long_mean: corr,
        variance,
        intervals: count,
        residuals,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ApVarianceReport {
    pub f: String,
    pub n: usize,
    pub modulus: String,
    pub chi1: CharRecord,
    pub progression_side: f64,
    pub character_side: f64,
    /// q^{2N − deg Q}
    pub scale: f64,
    pub rel_diff: f64,
}

/// Both sides of the orthogonality identity for the variance of f over reduced
/// classes modulo Q, computed independently. χ₁ defaults to the Dirichlet
/// character minimising min_θ 𝔻(f, χ e_θ; N)².
pub fn ap_variance(ctx: &Context, f: &MultFn, n: usize, m: &Poly, chi1: Option<&DirichletChar>) -> Result<ApVarianceReport> {
    if !m.is_monic() || m.degree() >= n {
        return usage(format!("need a monic Q with deg Q < N = {n}, got {m}"));
    }
    let q = ctx.q();
    let fld = ctx.field();
    let total = q_pow(q, n)?;
    let group = unit_group(m, fld)?;
    let phi = group.phi() as usize;
    if (total as u128) * (phi as u128 + 2) > MAX_ENUM as u128 * 4 {
        return capacity(format!("φ(Q)·|M_N| = {} is beyond the budget", phi as u128 * total as u128));
    }
    let chi1 = match chi1 {
        Some(c) => c.clone(),
        None => super::best_char(ctx, f, &super::CharSet::Dirichlet(m.clone()), n)?.character.dirichlet().clone(),
    };
    let table = ctx.table(f, n)?;
    let block = &table[monic_offset(q, n) as usize..];
    let classes: Vec<Option<u32>> =
        par::chunked_collect(0..total, par::DEFAULT_CHUNK, |r| r.map(|i| group.dlog(&Poly::from_monic_index(q, n, i))).collect());

    // progression side: per-class sums
    let class_sums = par::chunked_reduce(
        0..total,
        par::DEFAULT_CHUNK,
        |r| {
            let mut s = vec![ZERO; phi];
            for i in r {
                if let Some(c) = classes[i as usize] {
                    s[c as usize] += block[i as usize];
                }
            }
            s
        },
        || vec![ZERO; phi],
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let twisted_sum = |chi: &DirichletChar| -> Complex64 {
        let tab = chi.table();
        let l = chi.denominator();
        par::chunked_reduce(
            0..total,
            par::DEFAULT_CHUNK,
            |r| {
                let mut s = ZERO;
                for i in r {
                    if let Some(c) = classes[i as usize] {
                        s += block[i as usize] * root_of_unity((l - tab[c as usize] % l) % l, l);
                    }
                }
                s
            },
            || ZERO,
            |a, b| a + b,
        )
    };
    let t1 = twisted_sum(&chi1);
    let t1_tab = chi1.table();
    let l1 = chi1.denominator();
    let progression_side: f64 = class_sums
        .iter()
        .enumerate()
        .map(|(a, s)| (s - root_of_unity(t1_tab[a], l1) * t1 / phi as f64).norm_sqr())
        .sum();

    let others: Vec<DirichletChar> = characters(&group).into_iter().filter(|c| *c != chi1).collect();
    let character_side: f64 = others.iter().map(|c| twisted_sum(c).norm_sqr()).sum::<f64>() / phi as f64;
    let scale = (q as f64).powi((2 * n - m.degree()) as i32);
    Ok(ApVarianceReport {
        f: f.name().into(),
        n,
        modulus: m.to_string(),
        chi1: HayesChar::from_dirichlet(chi1).record(),
        progression_side,
        character_side,
        scale,
        rel_diff: (progression_side - character_side).abs() / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;

    #[test]
    fn trivial_variances() {
        let f = FieldSpec::new(3).unwrap();
        let ctx = Context::new(&f).unwrap();
        for h in 1..=6 {
            let r = mr_variance(&ctx, &MultFn::one(), 6, h, &VarianceMode::LongMean).unwrap();
            assert_eq!(r.variance, 0.0);
        }
        let r = mr_variance(&ctx, &MultFn::random(3), 6, 6, &VarianceMode::LongMean).unwrap();
        assert_eq!(r.variance, 0.0);
        let r = mr_variance(&ctx, &MultFn::moebius(), 6, 2, &VarianceMode::LongMean).unwrap();
        let direct: f64 = r.residuals.iter().map(|z| z.norm_sqr()).sum::<f64>() / r.residuals.len() as f64;
        assert!(r.variance > 0.0 && (r.variance - direct).abs() < 1e-15);
    }

    #[test]
    fn corrector_absorbs_a_star_pretender() {
        // f = χ* for a real χ mod t^k: the corrected variance vanishes
        let f = FieldSpec::new(2).unwrap();
        let ctx = Context::new(&f).unwrap();
        let (n, h) = (9, 4);
        let g = unit_group(&Poly::monomial(1, n - h + 1), &f).unwrap();
        let chi = characters(&g).into_iter().filter(|c| c.is_real() && !c.is_principal()).nth(1).unwrap();
        let fun = MultFn::star(&chi).unwrap();
        let mode = VarianceMode::Chi1Star { exponent: None, real_only: true };
        let r = mr_variance(&ctx, &fun, n, h, &mode).unwrap();
        assert!(r.variance < 1e-20, "{}", r.variance);
        assert!(r.corrector_defect.unwrap() < 1e-9);
        let plain = mr_variance(&ctx, &fun, n, h, &VarianceMode::LongMean).unwrap();
        assert!(plain.variance > 0.1);
    }

    #[test]
    fn ap_identity() {
        let f = FieldSpec::new(2).unwrap();
        let ctx = Context::new(&f).unwrap();
        let m = Poly::parse("t^3", &f).unwrap();
        let r = ap_variance(&ctx, &MultFn::one(), 8, &m, None).unwrap();
        assert!(r.progression_side < 1e-9 && r.character_side < 1e-9);
        let g = unit_group(&m, &f).unwrap();
        let chi = characters(&g)[2].clone();
        let pret = MultFn::dirichlet(&chi);
        let r = ap_variance(&ctx, &pret, 8, &m, None).unwrap();
        assert_eq!(r.chi1, HayesChar::from_dirichlet(chi).record());
        assert!(r.rel_diff < 1e-12 && r.progression_side < 1e-9);
        let r = ap_variance(&ctx, &MultFn::moebius(), 10, &m, None).unwrap();
        assert!(r.rel_diff < 1e-9 && r.progression_side > 0.0);
    }
}
