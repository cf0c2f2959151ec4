//! Pretentious distances, their θ-minimizers, and scans over character sets.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{mean, Context};
use crate::chargroup::rot::root_of_unity;
use crate::chargroup::{CharRecord, HayesChar, HayesFamily};
use crate::error::{capacity, usage, Result};
use crate::multfn::MultFn;
use crate::par;
use crate::poly::{Monics, Poly};

/// Characters a single scan may visit.
pub const MAX_CHARSET: usize = 1 << 16;
/// Width at which golden-section refinement of θ stops.
pub const THETA_TOL: f64 = 1e-9;

/// S_d = Σ_{P ∈ 𝓟_d} f(P) ḡ(P) for d ≤ N, enough to evaluate 𝔻(f, g e_θ; M, N)².
#[derive(Debug, Clone, Serialize)]
pub struct PrimeSums {
    pub q: u32,
    pub n: usize,
    /// |𝓟_d|, index 0 unused
    pub counts: Vec<f64>,
    pub sums: Vec<Complex64>,
}

impl PrimeSums {
    pub fn new(ctx: &Context, f: &MultFn, g: &MultFn, n: usize) -> Result<PrimeSums> {
        let fld = ctx.field();
        let mut counts = vec![0.0; n + 1];
        let mut sums = vec![Complex64::new(0.0, 0.0); n + 1];
        for d in 1..=n {
            let ps = ctx.primes(d)?;
            let vals = par::map_ordered(&ps, |p| -> Result<Complex64> {
                Ok(f.eval(p, fld, ctx.sieve())? * g.eval(p, fld, ctx.sieve())?.conj())
            });
            let vals: Vec<Complex64> = vals.into_iter().collect::<Result<_>>()?;
            counts[d] = ps.len() as f64;
            sums[d] = super::det_sum(&vals);
        }
        Ok(PrimeSums { q: ctx.q(), n, counts, sums })
    }

    /// 𝔻(f, g e_θ; M, N)² = Σ_{d=M}^{N} q^{-d} (|𝓟_d| − Re(e(−θd) S_d)).
    pub fn d2(&self, theta: f64, m: usize) -> f64 {
        let mut total = 0.0;
        let mut w = (self.q as f64).powi(-(m.max(1) as i32));
        for d in m.max(1)..=self.n {
            let a = TAU * (theta * d as f64).rem_euclid(1.0);
            let re = self.sums[d].re * a.cos() + self.sums[d].im * a.sin();
            total += w * (self.counts[d] - re);
            w /= self.q as f64;
        }
        total.max(0.0)
    }

    /// min over θ ∈ [0, 1) of 𝔻(f, g e_θ; N)²: the 8N-point grid resolves every
    /// local minimum of this degree-N trigonometric polynomial, each of which is
    /// refined by golden section.
    pub fn min_theta(&self) -> (f64, f64) {
        let k = 8 * self.n.max(1);
        let step = 1.0 / k as f64;
        let grid: Vec<f64> = (0..k).map(|i| self.d2(i as f64 * step, 1)).collect();
        let mut best = (0.0, f64::INFINITY);
        for i in 0..k {
            let (l, r) = (grid[(i + k - 1) % k], grid[(i + 1) % k]);
            if grid[i] > l || grid[i] > r {
                continue;
            }
            let c = i as f64 * step;
            let (mut t, mut v) = golden(|x| self.d2(x, 1), c - step, c + step);
            if grid[i] <= v {
                (t, v) = (c, grid[i]);
            }
            if v < best.1 {
                best = (t.rem_euclid(1.0), v);
            }
        }
        best
    }
}

fn golden(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > THETA_TOL {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    let t = (a + b) / 2.0;
    (t, g(t))
}

/// 𝔻(f, g; M, N)², summing over irreducibles with degree in [M, N].
pub fn distance_sq(ctx: &Context, f: &MultFn, g: &MultFn, m: usize, n: usize) -> Result<f64> {
    if m < 1 || m > n {
        return usage(format!("distance needs 1 ≤ M ≤ N, got M = {m}, N = {n}"));
    }
    Ok(PrimeSums::new(ctx, f, g, n)?.d2(0.0, m))
}

pub fn distance(ctx: &Context, f: &MultFn, g: &MultFn, m: usize, n: usize) -> Result<f64> {
    distance_sq(ctx, f, g, m, n).map(f64::sqrt)
}

/// (θ*, min_θ 𝔻(f, g e_θ; N)²).
pub fn min_theta(ctx: &Context, f: &MultFn, g: &MultFn, n: usize) -> Result<(f64, f64)> {
    if n < 1 {
        return usage("min_theta needs N ≥ 1");
    }
    Ok(PrimeSums::new(ctx, f, g, n)?.min_theta())
}

/// 𝓓_f(N) = min_θ 𝔻(f, e_θ; N)².
pub fn pretentious_defect(ctx: &Context, f: &MultFn, n: usize) -> Result<f64> {
    Ok(min_theta(ctx, f, &MultFn::one(), n)?.1)
}

/// |mean(f, N)| beside the Halász shape (1 + 𝓓) e^{−𝓓}; the constant is not effective.
#[derive(Debug, Clone, Serialize)]
pub struct HalaszReport {
    pub mean_abs: f64,
    pub defect: f64,
    pub shape: f64,
}

pub fn halasz_report(ctx: &Context, f: &MultFn, n: usize) -> Result<HalaszReport> {
    let mean_abs = mean(ctx, f, n)?.norm();
    let defect = pretentious_defect(ctx, f, n)?;
    Ok(HalaszReport { mean_abs, defect, shape: (1.0 + defect) * (-defect).exp() })
}

#[derive(Debug, Clone, Serialize)]
pub struct CharDistance {
    pub character: CharRecord,
    pub label: String,
    /// length of the short part
    pub length: usize,
    pub theta: f64,
    pub d2: f64,
}

#[derive(Debug, Clone)]
pub enum CharSet {
    /// every Dirichlet character modulo Q
    Dirichlet(Poly),
    /// ψ ξ with ψ modulo some M ∈ 𝓜_{≤W} and len ξ ≤ ν_max
    Hayes { w: usize, nu_max: usize },
}

#[derive(Debug, Clone)]
pub struct BestChar {
    pub best: CharDistance,
    pub character: HayesChar,
    /// every candidate in tie-break order
    pub all: Vec<CharDistance>,
}

struct Candidate {
    fam: usize,
    i: usize,
    j: usize,
    key: (usize, usize, u64, usize, usize),
}

/// Per-family class of each prime, shared by all characters of the family.
fn scan(ctx: &Context, f: &MultFn, fams: &[HayesFamily], keep: impl Fn(usize) -> bool, n: usize) -> Result<Vec<(CharDistance, HayesChar)>> {
    let q = ctx.q();
    let fld = ctx.field();
    let mut primes = Vec::with_capacity(n + 1);
    let mut fvals = Vec::with_capacity(n + 1);
    primes.push(Vec::new());
    fvals.push(Vec::new());
    for d in 1..=n {
        let ps = ctx.primes(d)?;
        let vals: Vec<Complex64> = par::map_ordered(&ps, |p| f.eval(p, fld, ctx.sieve())).into_iter().collect::<Result<_>>()?;
        primes.push(ps.to_vec());
        fvals.push(vals);
    }
    let mut cands = Vec::new();
    for (k, fam) in fams.iter().enumerate() {
        let m = fam.modulus();
        for i in 0..fam.dir_chars().len() {
            for (j, x) in fam.short_chars().iter().enumerate() {
                if keep(x.length()) {
                    cands.push(Candidate { fam: k, i, j, key: (x.length(), m.degree(), m.monic_index(q), i, j) });
                }
            }
        }
    }
    if cands.len() > MAX_CHARSET {
        return capacity(format!("{} characters exceed the scan budget {MAX_CHARSET}", cands.len()));
    }
    cands.sort_by_key(|c| c.key);
    // classes[fam][d][prime]
    let classes: Vec<Vec<Vec<Option<(usize, usize)>>>> = fams
        .iter()
        .map(|fam| {
            let phi = fam.phi() as u32;
            primes
                .iter()
                .map(|ps| ps.iter().map(|p| fam.class_of(p).map(|c| ((c % phi) as usize, (c / phi) as usize))).collect())
                .collect()
        })
        .collect();
    let dir_tables: Vec<Vec<Vec<u32>>> = fams.iter().map(|fam| (0..fam.dir_chars().len()).map(|i| fam.dir_table(i)).collect()).collect();
    let short_tables: Vec<Vec<Vec<u32>>> = fams.iter().map(|fam| (0..fam.short_count()).map(|j| fam.short_table(j)).collect()).collect();

    let out = par::map_ordered(&cands, |c| {
        let fam = &fams[c.fam];
        let l = fam.denominator();
        let (ta, tb) = (&dir_tables[c.fam][c.i], &short_tables[c.fam][c.j]);
        let mut counts = vec![0.0; n + 1];
        let mut sums = vec![Complex64::new(0.0, 0.0); n + 1];
        for d in 1..=n {
            counts[d] = primes[d].len() as f64;
            let terms: Vec<Complex64> = fvals[d]
                .iter()
                .zip(&classes[c.fam][d])
                .map(|(v, cl)| match cl {
                    Some((a, b)) => v * root_of_unity((l - (ta[*a] + tb[*b]) % l) % l, l),
                    None => Complex64::new(0.0, 0.0),
                })
                .collect();
            sums[d] = super::pairwise(&terms);
        }
        let ps = PrimeSums { q, n, counts, sums };
        let (theta, d2) = ps.min_theta();
        let chi = fam.hayes(c.i, c.j);
        let rec = CharDistance { character: chi.record(), label: chi.to_string(), length: chi.short().length(), theta, d2 };
        (rec, chi)
    });
    Ok(out)
}

fn families(ctx: &Context, set: &CharSet) -> Result<Vec<HayesFamily>> {
    let f = ctx.field();
    match set {
        CharSet::Dirichlet(m) => Ok(vec![HayesFamily::new(m, 0, f)?]),
        CharSet::Hayes { w, nu_max } => {
            let mut out = Vec::new();
            for d in 0..=*w {
                for m in Monics::new(ctx.q(), d)? {
                    out.push(HayesFamily::new(&m, *nu_max, f)?);
                    if out.len() > MAX_CHARSET {
                        return capacity(format!("more than {MAX_CHARSET} moduli of degree ≤ {w}"));
                    }
                }
            }
            Ok(out)
        }
    }
}

fn pick(all: Vec<(CharDistance, HayesChar)>) -> Option<(CharDistance, HayesChar)> {
    // strict improvement only, so the first candidate in key order wins ties
    let mut best: Option<(CharDistance, HayesChar)> = None;
    for (r, c) in all {
        if best.as_ref().is_none_or(|(b, _)| r.d2 < b.d2 - 1e-12) {
            best = Some((r, c));
        }
    }
    best
}

/// The character of `set` minimising min_θ 𝔻(f, χ e_θ; N)². Ties go to the
/// shortest ξ, then the smaller modulus, then lexicographic exponent vectors.
pub fn best_char(ctx: &Context, f: &MultFn, set: &CharSet, n: usize) -> Result<BestChar> {
    let fams = families(ctx, set)?;
    let all = scan(ctx, f, &fams, |_| true, n)?;
    let records: Vec<CharDistance> = all.iter().map(|(r, _)| r.clone()).collect();
    let (best, character) = pick(all).expect("every set holds the principal character");
    Ok(BestChar { best, character, all: records })
}

/// M_Hayes and M_Dir with the attaining characters.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceProfile {
    pub f: String,
    pub n: usize,
    pub h: usize,
    pub w: usize,
    pub nu_max: usize,
    pub m_hayes: CharDistance,
    pub m_dir: CharDistance,
    pub records: Vec<CharDistance>,
}

/// Minima of 𝓓_{f ψ̄ ξ̄}(N) over ψ modulo M ∈ 𝓜_{≤W} (W ≤ H) and short ξ
/// with len ξ ≤ ν_max (Hayes), or ξ trivial (Dirichlet).
pub fn nonpret_profile(ctx: &Context, f: &MultFn, n: usize, h: usize, w: usize, nu_max: usize) -> Result<DistanceProfile> {
    if w > h {
        return usage(format!("level W = {w} exceeds H = {h}"));
    }
    let fams = families(ctx, &CharSet::Hayes { w, nu_max })?;
    let all = scan(ctx, f, &fams, |_| true, n)?;
    let records: Vec<CharDistance> = all.iter().map(|(r, _)| r.clone()).collect();
    let dir: Vec<(CharDistance, HayesChar)> = all.iter().filter(|(r, _)| r.length == 0).cloned().collect();
    let m_hayes = pick(all).expect("principal present").0;
    let m_dir = pick(dir).expect("principal present").0;
    Ok(DistanceProfile { f: f.name().into(), n, h, w, nu_max, m_hayes, m_dir, records })
}
