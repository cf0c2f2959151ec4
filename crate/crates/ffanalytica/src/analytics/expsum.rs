//! Points of 𝕋 = 𝔽_q((1/t))/𝔽_q[t], the additive character e_𝔽, and short
//! exponential sums twisted by multiplicative functions.

use num_complex::Complex64;
use serde::Serialize;

use super::{det_sum, Context, MAX_ENUM};
use crate::chargroup::rot::root_of_unity;
use crate::chargroup::RotSum;
use crate::error::{capacity, usage, Result};
use crate::gf::FieldSpec;
use crate::multfn::MultFn;
use crate::par;
use crate::poly::{monic_offset, q_pow, Monics, Poly};

/// α = a/g mod 1 with its expansion Σ_{k ≥ 1} a_k t^{-k} known to `prec` digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LaurentPoint {
    pub a: Poly,
    pub g: Poly,
    /// a_1, ..., a_prec
    pub digits: Vec<u32>,
}

impl LaurentPoint {
    pub fn new(a: &Poly, g: &Poly, prec: usize, f: &FieldSpec) -> Result<LaurentPoint> {
        if !g.is_monic() {
            return usage(format!("denominator must be monic, got {g}"));
        }
        if !a.is_zero() && a.degree() >= g.degree() {
            return usage(format!("need deg a < deg g, got {a} / {g}"));
        }
        // long division: r ← t r, digit = coefficient of t^{deg g}, r ← r − digit·g
        let mut digits = Vec::with_capacity(prec);
        let mut r = a.clone();
        let dg = g.degree();
        for _ in 0..prec {
            r = r.shift(1);
            let c = r.coeff(dg);
            if c != 0 {
                r = r.sub(&g.scale(c, f), f);
            }
            digits.push(c);
        }
        Ok(LaurentPoint { a: a.clone(), g: g.clone(), digits })
    }

    pub fn zero(prec: usize) -> LaurentPoint {
        LaurentPoint { a: Poly::zero(), g: Poly::one(), digits: vec![0; prec] }
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// a_k for 1 ≤ k ≤ precision.
    pub fn digit(&self, k: usize) -> u32 {
        self.digits[k - 1]
    }

    /// m₁, the first index with a_{m₁} ≠ 0, if it lies within the precision.
    pub fn leading_index(&self) -> Option<usize> {
        self.digits.iter().position(|&c| c != 0).map(|i| i + 1)
    }

    /// ⟨α⟩ = q^{-m₁}, and 0 for α ≡ 0 to the working precision.
    pub fn abs(&self, q: u32) -> f64 {
        self.leading_index().map_or(0.0, |m| (q as f64).powi(-(m as i32)))
    }

    pub fn sub(&self, o: &LaurentPoint, f: &FieldSpec) -> Result<LaurentPoint> {
        let num = self.a.mul(&o.g, f).sub(&o.a.mul(&self.g, f), f);
        LaurentPoint::new(&num, &self.g.mul(&o.g, f), self.precision().min(o.precision()), f)
    }

    /// tr(c·a_{j+1}) ∈ 𝔽_p for j < len and every c ∈ 𝔽_q: the phase of e_𝔽(c t^j α).
    fn phase_table(&self, len: usize, f: &FieldSpec) -> Result<Vec<Vec<u32>>> {
        if len > self.precision() {
            return usage(format!("α known to {} digits, {len} needed", self.precision()));
        }
        Ok((0..len).map(|j| (0..f.q()).map(|c| f.trace(f.mul(c, self.digits[j]))).collect()).collect())
    }
}

impl std::fmt::Display for LaurentPoint {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "({})/({})", self.a, self.g)
    }
}

/// q^{-(N-H)} Σ over intervals I_H(G₀) ⊂ M_N of q^{-H} |Σ_{G ∈ I} f(G) e_𝔽(Gα)|.
pub fn exp_sum_statistic(ctx: &Context, f: &MultFn, n: usize, h: usize, alpha: &LaurentPoint) -> Result<f64> {
    let table = ctx.table(f, n)?;
    exp_sum_on_table(ctx, &table, n, h, alpha)
}

fn exp_sum_on_table(ctx: &Context, table: &[Complex64], n: usize, h: usize, alpha: &LaurentPoint) -> Result<f64> {
    if h < 1 || h > n {
        return usage(format!("need 1 ≤ H ≤ N, got H = {h}, N = {n}"));
    }
    let fld = ctx.field();
    let (q, p) = (fld.q(), fld.p());
    let total = q_pow(q, n)?;
    if total > MAX_ENUM {
        return capacity(format!("|M_{n}| = {total} exceeds the enumeration budget"));
    }
    let phases = alpha.phase_table(n + 1, fld)?;
    let width = q_pow(q, h)?;
    let count = total / width;
    let block = &table[monic_offset(q, n) as usize..];
    let roots: Vec<Complex64> = (0..p).map(|k| root_of_unity(k, p)).collect();
    let chunk = (par::DEFAULT_CHUNK / width).max(1);
    let mags: Vec<Complex64> = par::chunked_collect(0..count, chunk, |r| {
        r.map(|i| {
            let terms: Vec<Complex64> = (i * width..(i + 1) * width)
                .map(|idx| {
                    let mut ph = phases[n][1];
                    let mut x = idx;
                    for row in phases.iter().take(n) {
                        ph += row[(x % q as u64) as usize];
                        x /= q as u64;
                    }
                    block[idx as usize] * roots[(ph % p) as usize]
                })
                .collect();
            Complex64::new(super::pairwise(&terms).norm() / width as f64, 0.0)
        })
        .collect()
    });
    Ok(det_sum(&mags).re / count as f64)
}

/// Every a/g with g monic, deg g ≤ D, (a, g) = 1 and deg a < deg g; α = 0 first.
pub fn farey_points(depth: usize, prec: usize, f: &FieldSpec) -> Result<Vec<LaurentPoint>> {
    let q = f.q();
    let mut out = vec![LaurentPoint::zero(prec)];
    for d in 1..=depth {
        let count = q_pow(q, d)?;
        if (count as u128) * (count as u128) > MAX_ENUM as u128 {
            return capacity(format!("Farey grid of depth {depth} over F_{q} is too large"));
        }
        for g in Monics::new(q, d)? {
            for ai in 1..count {
                let a = Poly::from_residue_index(q, ai);
                if a.gcd(&g, f).is_one() {
                    out.push(LaurentPoint::new(&a, &g, prec, f)?);
                }
            }
        }
    }
    Ok(out)
}

/// The statistic at every point of the Farey grid of depth D, in grid order.
pub fn exp_sum_grid(ctx: &Context, f: &MultFn, n: usize, h: usize, depth: usize) -> Result<Vec<(LaurentPoint, f64)>> {
    let table = ctx.table(f, n)?;
    let points = farey_points(depth, n + 1, ctx.field())?;
    let vals = par::map_ordered(&points, |a| exp_sum_on_table(ctx, &table, n, h, a));
    points.into_iter().zip(vals).map(|(p, v)| v.map(|v| (p, v))).collect()
}

/// The largest statistic over the Farey grid of depth D: a lower bound for the sup over 𝕋.
/// Ties keep the earliest grid point.
pub fn exp_sum_sup(ctx: &Context, f: &MultFn, n: usize, h: usize, depth: usize) -> Result<(LaurentPoint, f64)> {
    let mut best: Option<(LaurentPoint, f64)> = None;
    for (p, v) in exp_sum_grid(ctx, f, n, h, depth)? {
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((p, v));
        }
    }
    Ok(best.expect("α = 0 is always present"))
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeOneCheck {
    pub h: usize,
    /// ⟨α mod 1⟩ ≤ q^{-H-1}
    pub indicator: bool,
    /// exact value of Σ_{deg F < H} e_𝔽(Fα) as counts of e(k/p)
    pub counts: Vec<i64>,
    pub exact: bool,
}

fn convolve(a: &[i64], b: &[i64]) -> Vec<i64> {
    let p = a.len();
    let mut out = vec![0; p];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
        for (j, y) in b.iter().enumerate() {
            out[(i + j) % p] += x * y;
        }
    }
    out
}

/// Σ_{deg F < H} e_𝔽(Fα) against q^H 1_{⟨α mod 1⟩ ≤ q^{-H-1}}. Since e_𝔽(Fα) is
/// additive in F the sum is the product over positions j < H of
/// Σ_{c ∈ 𝔽_q} e_𝔽(c t^j α); each factor and the product are kept exact.
pub fn type_one_check(alpha: &LaurentPoint, h: usize, f: &FieldSpec) -> Result<TypeOneCheck> {
    let (q, p) = (f.q(), f.p());
    let phases = alpha.phase_table(h, f)?;
    let mut acc = vec![0i64; p as usize];
    acc[0] = 1;
    for row in &phases {
        let mut factor = vec![0i64; p as usize];
        for &ph in row {
            factor[ph as usize] += 1;
        }
        acc = convolve(&acc, &factor);
    }
    let indicator = alpha.digits[..h].iter().all(|&c| c == 0) && (h < alpha.precision() || alpha.leading_index().is_none());
    let qh = q_pow(q, h)? as i64;
    let sum = RotSum::from_counts(p, acc.clone());
    let exact = if indicator { acc[0] == qh && acc[1..].iter().all(|&c| c == 0) } else { sum.is_zero() };
    Ok(TypeOneCheck { h, indicator, counts: acc, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Field, FieldSpec};
    use proptest::prelude::*;

    fn field(q: u32) -> Field {
        FieldSpec::new(q).unwrap()
    }

    #[test]
    fn expansion_and_valuation() {
        let f = field(2);
        // 1/(t+1) = t^{-1} + t^{-2} + ...
        let a = LaurentPoint::new(&Poly::one(), &Poly::parse("t+1", &f).unwrap(), 6, &f).unwrap();
        assert_eq!(a.digits, vec![1; 6]);
        let b = LaurentPoint::new(&Poly::one(), &Poly::parse("t^3", &f).unwrap(), 6, &f).unwrap();
        assert_eq!(b.leading_index(), Some(3));
        assert_eq!(b.abs(2), 0.125);
        let f3 = field(3);
        let g = Poly::parse("t^3+2*t+1", &f3).unwrap();
        let a = Poly::parse("t+2", &f3).unwrap();
        let x = LaurentPoint::new(&a, &g, 12, &f3).unwrap();
        assert_eq!(x.leading_index(), Some(g.degree() - a.degree()));
    }

    #[test]
    fn exp_sum_baselines() {
        let f = field(2);
        let ctx = Context::new(&f).unwrap();
        let z = LaurentPoint::zero(12);
        assert!((exp_sum_statistic(&ctx, &MultFn::one(), 11, 4, &z).unwrap() - 1.0).abs() < 1e-15);
        let g = Poly::parse("t^3+t+1", &f).unwrap();
        let alpha = LaurentPoint::new(&Poly::parse("t", &f).unwrap(), &g, 15, &f).unwrap();
        let v = exp_sum_statistic(&ctx, &MultFn::moebius(), 14, 5, &alpha).unwrap();
        assert!(v < 1.0, "{v}");
        let (_, sup) = exp_sum_sup(&ctx, &MultFn::moebius(), 10, 4, 2).unwrap();
        assert!(sup >= exp_sum_statistic(&ctx, &MultFn::moebius(), 10, 4, &LaurentPoint::zero(11)).unwrap());
    }

    #[test]
    fn type_one_by_brute_force() {
        for q in [2u32, 3] {
            let f = field(q);
            for g in (1..=3).flat_map(|d| Monics::new(q, d).unwrap()) {
                for ai in 0..q_pow(q, g.degree()).unwrap() {
                    let alpha = LaurentPoint::new(&Poly::from_residue_index(q, ai), &g, 8, &f).unwrap();
                    for h in 1..=4 {
                        let c = type_one_check(&alpha, h, &f).unwrap();
                        assert!(c.exact);
                        let mut direct = vec![0i64; f.p() as usize];
                        for fi in 0..q_pow(q, h).unwrap() {
                            let ph: u32 = (0..h)
                                .map(|j| f.trace(f.mul(Poly::from_residue_index(q, fi).coeff(j), alpha.digit(j + 1))))
                                .sum();
                            direct[(ph % f.p()) as usize] += 1;
                        }
                        assert_eq!(direct, c.counts);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn ultrametric(a1 in 0u64..64, g1 in 0u64..32, a2 in 0u64..64, g2 in 0u64..32) {
            let f = field(2);
            let (g1, g2) = (Poly::from_monic_index(2, 5, g1), Poly::from_monic_index(2, 5, g2));
            let x = LaurentPoint::new(&Poly::from_residue_index(2, a1 % 32), &g1, 30, &f).unwrap();
            let y = LaurentPoint::new(&Poly::from_residue_index(2, a2 % 32), &g2, 30, &f).unwrap();
            let d = x.sub(&y, &f).unwrap();
            prop_assert!(d.abs(2) <= x.abs(2).max(y.abs(2)));
            if x.abs(2) != y.abs(2) {
                prop_assert_eq!(d.abs(2), x.abs(2).max(y.abs(2)));
            }
        }
    }
}
