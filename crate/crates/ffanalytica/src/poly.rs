//! Polynomials over F_q in the variable t.
//!
//! Coefficients are raw field indices (see [`crate::gf`]). Monics of degree N are
//! enumerated by reading (c_0, ..., c_{N-1}) as a little-endian base-q counter,
//! so a short interval I_H(G_0) is a contiguous block of q^H indices.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, usage, Error, Result};
use crate::gf::FieldSpec;

mod sieve;
mod smooth;

pub use sieve::FactorSieve;
pub use smooth::{count_smooth, count_without_factor_degrees, dickman_rho};

/// Dense polynomial, low-to-high, no trailing zeros. The zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    pub fn t() -> Self {
        Poly { coeffs: vec![0, 1] }
    }

    pub fn constant(c: u32) -> Self {
        Poly::new(vec![c])
    }

    /// c·t^n.
    pub fn monomial(c: u32, n: usize) -> Self {
        let mut v = vec![0; n + 1];
        v[n] = c;
        Poly::new(v)
    }

    pub fn new(mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Validates coefficients against the field before building.
    pub fn from_coeffs(f: &FieldSpec, coeffs: Vec<u32>) -> Result<Self> {
        if let Some(&c) = coeffs.iter().find(|&&c| c >= f.q()) {
            return usage(format!("coefficient {c} is not an element of F_{}", f.q()));
        }
        Ok(Poly::new(coeffs))
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree where the caller has already excluded zero.
    pub fn degree(&self) -> usize {
        self.deg().expect("degree of the zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// G(0).
    pub fn constant_term(&self) -> u32 {
        self.coeff(0)
    }

    pub fn add(&self, o: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self, f: &FieldSpec) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(&self, c: u32, f: &FieldSpec) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![0; n];
        v.extend_from_slice(&self.coeffs);
        Poly { coeffs: v }
    }

    pub fn mul(&self, o: &Poly, f: &FieldSpec) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut r = vec![0u32; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(a, b));
            }
        }
        Poly::new(r)
    }

    /// Quotient and remainder; divisor must be nonzero.
    pub fn divrem(&self, d: &Poly, f: &FieldSpec) -> (Poly, Poly) {
        let dd = d.degree();
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = f.inv(d.leading());
        let mut r = self.coeffs.clone();
        let mut qv = vec![0u32; r.len() - dd];
        for i in (0..qv.len()).rev() {
            let c = f.mul(r[i + dd], inv);
            qv[i] = c;
            if c == 0 {
                continue;
            }
            for j in 0..=dd {
                r[i + j] = f.sub(r[i + j], f.mul(c, d.coeffs[j]));
            }
        }
        r.truncate(dd);
        (Poly::new(qv), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly, f: &FieldSpec) -> Poly {
        self.divrem(d, f).1
    }

    pub fn div_exact(&self, d: &Poly, f: &FieldSpec) -> Poly {
        let (q, r) = self.divrem(d, f);
        debug_assert!(r.is_zero());
        q
    }

    pub fn divides(&self, g: &Poly, f: &FieldSpec) -> bool {
        g.rem(self, f).is_zero()
    }

    pub fn make_monic(&self, f: &FieldSpec) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.leading()), f)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Poly, f: &FieldSpec) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.make_monic(f)
    }

    /// Inverse of self modulo m, if gcd(self, m) = 1.
    pub fn inverse_mod(&self, m: &Poly, f: &FieldSpec) -> Option<Poly> {
        // invariant: r_i ≡ s_i · self (mod m)
        let (mut r0, mut r1) = (m.clone(), self.rem(m, f));
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qu, r) = r0.divrem(&r1, f);
            let s = s0.sub(&qu.mul(&s1, f), f);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.degree() != 0 {
            return None;
        }
        Some(s0.scale(f.inv(r0.leading()), f).rem(m, f))
    }

    pub fn mulmod(&self, o: &Poly, m: &Poly, f: &FieldSpec) -> Poly {
        self.mul(o, f).rem(m, f)
    }

    pub fn powmod(&self, mut e: u128, m: &Poly, f: &FieldSpec) -> Poly {
        let mut base = self.rem(m, f);
        let mut r = Poly::one().rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod(&base, m, f);
            }
            base = base.mulmod(&base, m, f);
            e >>= 1;
        }
        r
    }

    pub fn pow(&self, e: u32, f: &FieldSpec) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self, f))
    }

    pub fn derivative(&self, f: &FieldSpec) -> Poly {
        let p = f.p();
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| {
                    // i·c as a sum of i copies; only i mod p matters
                    let m = (i as u32) % p;
                    (0..m).fold(0, |acc, _| f.add(acc, c))
                })
                .collect(),
        )
    }

    pub fn eval(&self, x: u32, f: &FieldSpec) -> u32 {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Reversal t^{deg G} G(1/t).
    pub fn involute(&self) -> Poly {
        let mut v = self.coeffs.clone();
        v.reverse();
        Poly::new(v)
    }

    /// t-adic valuation: the largest a with t^a | G (zero polynomial excluded).
    pub fn t_valuation(&self) -> usize {
        self.coeffs.iter().position(|&c| c != 0).unwrap_or(0)
    }

    /// Index of a monic inside M_{deg}: Σ_{i<deg} c_i q^i.
    pub fn monic_index(&self, q: u32) -> u64 {
        let n = self.degree();
        self.coeffs[..n].iter().rev().fold(0u64, |acc, &c| acc * q as u64 + c as u64)
    }

    pub fn from_monic_index(q: u32, n: usize, mut idx: u64) -> Poly {
        let mut v = Vec::with_capacity(n + 1);
        for _ in 0..n {
            v.push((idx % q as u64) as u32);
            idx /= q as u64;
        }
        v.push(1);
        Poly { coeffs: v }
    }

    /// Residue-table index Σ c_i q^i of a polynomial of degree < n.
    pub fn residue_index(&self, q: u32) -> u64 {
        self.coeffs.iter().rev().fold(0u64, |acc, &c| acc * q as u64 + c as u64)
    }

    pub fn from_residue_index(q: u32, mut idx: u64) -> Poly {
        let mut v = Vec::new();
        while idx > 0 {
            v.push((idx % q as u64) as u32);
            idx /= q as u64;
        }
        Poly::new(v)
    }

    /// Global index over all monics ordered by degree then [`Poly::monic_index`].
    pub fn global_index(&self, q: u32) -> u64 {
        monic_offset(q, self.degree()) + self.monic_index(q)
    }

    pub fn from_global_index(q: u32, g: u64) -> Poly {
        let (n, idx) = split_global(q, g);
        Poly::from_monic_index(q, n, idx)
    }

    pub fn parse(s: &str, f: &FieldSpec) -> Result<Poly> {
        let p: Poly = s.parse()?;
        Poly::from_coeffs(f, p.coeffs).map_err(|_| Error::Usage(format!("'{s}': coefficient outside F_{}", f.q())))
    }

    pub fn random(rng: &mut impl Rng, q: u32, max_deg_exclusive: usize) -> Poly {
        Poly::new((0..max_deg_exclusive).map(|_| rng.gen_range(0..q)).collect())
    }

    pub fn random_monic(rng: &mut impl Rng, q: u32, n: usize) -> Poly {
        let mut v: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        v.push(1);
        Poly { coeffs: v }
    }
}

/// Number of monics of degree < n, i.e. the global index of the first degree-n monic.
pub fn monic_offset(q: u32, n: usize) -> u64 {
    let q = q as u64;
    (0..n).fold(0u64, |acc, _| acc * q + 1)
}

pub fn split_global(q: u32, g: u64) -> (usize, u64) {
    let (mut n, mut start, mut size) = (0usize, 0u64, 1u64);
    while g >= start + size {
        start += size;
        size *= q as u64;
        n += 1;
    }
    (n, g - start)
}

pub fn q_pow(q: u32, n: usize) -> Result<u64> {
    (q as u64)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Capacity(format!("{q}^{n} overflows 64 bits")))
}

impl FromStr for Poly {
    type Err = Error;

    /// Grammar (whitespace ignored): `poly := '0' | term ('+' term)*` and
    /// `term := int | [int '*'] 't' ['^' int]`. Coefficients are field indices.
    /// No field is known here, so range checks happen in [`Poly::parse`].
    fn from_str(s: &str) -> Result<Poly> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return usage("empty polynomial");
        }
        if s == "0" {
            return Ok(Poly::zero());
        }
        if s.contains('-') {
            return usage(format!("'{s}': subtraction is not supported; write coefficients as field indices"));
        }
        let mut acc: Vec<u32> = Vec::new();
        for term in s.split('+') {
            let (coef, deg) = parse_term(term).ok_or_else(|| Error::Usage(format!("malformed term '{term}' in '{s}'")))?;
            if acc.len() <= deg {
                acc.resize(deg + 1, 0);
            }
            if acc[deg] != 0 {
                return usage(format!("degree {deg} appears twice in '{s}'"));
            }
            acc[deg] = coef;
        }
        Ok(Poly::new(acc))
    }
}

fn parse_term(term: &str) -> Option<(u32, usize)> {
    if term.is_empty() {
        return None;
    }
    let (coef, rest) = match term.find('t') {
        None => return term.parse().ok().map(|c| (c, 0)),
        Some(0) => (1, term),
        Some(i) => {
            let c: u32 = term[..i].strip_suffix('*')?.parse().ok()?;
            (c, &term[i..])
        }
    };
    let deg = match rest {
        "t" => 1,
        _ => rest.strip_prefix("t^")?.parse().ok()?,
    };
    Some((coef, deg))
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(out, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(out, "{c}")?,
                (1, 1) => write!(out, "t")?,
                (1, _) => write!(out, "{c}*t")?,
                (_, 1) => write!(out, "t^{i}")?,
                _ => write!(out, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Irreducible factors with multiplicities, sorted by (degree, monic index).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub unit: u32,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn reconstruct(&self, f: &FieldSpec) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit), |acc, (p, e)| acc.mul(&p.pow(*e, f), f))
    }

    fn sort(&mut self, q: u32) {
        self.factors.sort_by_key(|(p, _)| (p.degree(), p.monic_index(q)));
    }
}

/// t^{q^j} mod g for j = 0..=n, starting from t mod g.
fn frobenius_chain(g: &Poly, n: usize, f: &FieldSpec) -> Vec<Poly> {
    let mut out = Vec::with_capacity(n + 1);
    let mut h = Poly::t().rem(g, f);
    out.push(h.clone());
    for _ in 0..n {
        h = h.powmod(f.q() as u128, g, f);
        out.push(h.clone());
    }
    out
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
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

/// Rabin's test: G | t^{q^n} - t and gcd(t^{q^{n/r}} - t, G) = 1 for primes r | n.
pub fn is_irreducible(g: &Poly, f: &FieldSpec) -> Result<bool> {
    if !g.is_monic() || g.degree() < 1 {
        return usage(format!("is_irreducible needs a monic of positive degree, got {g}"));
    }
    let n = g.degree();
    if n == 1 {
        return Ok(true);
    }
    let chain = frobenius_chain(g, n, f);
    let t = Poly::t().rem(g, f);
    if chain[n] != t {
        return Ok(false);
    }
    for r in prime_divisors(n) {
        if !chain[n / r].sub(&t, f).gcd(g, f).is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn mobius_int(n: usize) -> i32 {
    let mut m = n;
    let mut s = 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return 0;
            }
            s = -s;
        }
        d += 1;
    }
    if m > 1 {
        s = -s;
    }
    s
}

/// |P_d| by the necklace formula (1/d) Σ_{e|d} μ(e) q^{d/e}.
pub fn count_irreducibles(q: u32, d: usize) -> Result<u128> {
    if d == 0 {
        return usage("count_irreducibles needs d >= 1");
    }
    let qq = q as u128;
    let mut total: i128 = 0;
    for e in 1..=d {
        if d.is_multiple_of(e) {
            let m = mobius_int(e);
            if m != 0 {
                let term = qq
                    .checked_pow((d / e) as u32)
                    .ok_or_else(|| Error::Capacity(format!("{q}^{} overflows", d / e)))?;
                total += m as i128 * term as i128;
            }
        }
    }
    Ok((total / d as i128) as u128)
}

fn pth_root(c: &Poly, f: &FieldSpec) -> Poly {
    let p = f.p() as usize;
    let e = (f.q() / f.p()) as u64;
    let n = c.degree() / p;
    Poly::new((0..=n).map(|i| f.pow(c.coeff(i * p), e)).collect())
}

fn squarefree_parts(g: &Poly, f: &FieldSpec) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    let d = g.derivative(f);
    if d.is_zero() {
        for (h, m) in squarefree_parts(&pth_root(g, f), f) {
            out.push((h, m * f.p()));
        }
        return out;
    }
    let mut c = g.gcd(&d, f);
    let mut w = g.div_exact(&c, f);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c, f);
        let fac = w.div_exact(&y, f);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w, f);
        i += 1;
    }
    if !c.is_one() {
        for (h, m) in squarefree_parts(&pth_root(&c, f), f) {
            out.push((h, m * f.p()));
        }
    }
    out
}

fn distinct_degree(g: &Poly, f: &FieldSpec) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = g.clone();
    let mut h = Poly::t();
    let mut d = 0;
    while rest.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(f.q() as u128, &rest, f);
        let gd = h.sub(&Poly::t(), f).gcd(&rest, f);
        if !gd.is_one() {
            rest = rest.div_exact(&gd, f);
            h = h.rem(&rest, f);
            out.push((gd, d));
        }
    }
    if rest.degree() > 0 {
        let n = rest.degree();
        out.push((rest, n));
    }
    out
}

/// Splits a squarefree monic whose irreducible factors all have degree d.
fn equal_degree(g: &Poly, d: usize, f: &FieldSpec, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    let n = g.degree();
    if n == d {
        out.push(g.clone());
        return;
    }
    loop {
        let a = Poly::random(rng, f.q(), n);
        if a.degree_or_zero() == 0 {
            continue;
        }
        let b = if f.p() == 2 {
            // absolute trace of a from F_{q^d} down to F_2
            let mut acc = a.clone();
            let mut cur = a.clone();
            for _ in 1..(f.k() as usize * d) {
                cur = cur.mulmod(&cur, g, f);
                acc = acc.add(&cur, f);
            }
            acc
        } else {
            // a^{(q^d-1)/2} = Π_i (a^{(q-1)/2})^{q^i}
            let base = a.powmod(((f.q() - 1) / 2) as u128, g, f);
            let mut acc = base.clone();
            let mut cur = base;
            for _ in 1..d {
                cur = cur.powmod(f.q() as u128, g, f);
                acc = acc.mulmod(&cur, g, f);
            }
            acc.sub(&Poly::one(), f)
        };
        let h = b.gcd(g, f);
        if !h.is_one() && h.degree_or_zero() < n && !h.is_zero() {
            let other = g.div_exact(&h, f);
            equal_degree(&h, d, f, rng, out);
            equal_degree(&other, d, f, rng, out);
            return;
        }
    }
}

impl Poly {
    fn degree_or_zero(&self) -> usize {
        self.deg().unwrap_or(0)
    }
}

/// Direct factorization: squarefree, distinct-degree, then equal-degree splitting.
pub fn factor_direct(g: &Poly, f: &FieldSpec) -> Result<Factorization> {
    if g.is_zero() {
        return usage("cannot factor the zero polynomial");
    }
    let unit = g.leading();
    let m = g.make_monic(f);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d ^ m.degree() as u64);
    let mut fac = Factorization { unit, factors: Vec::new() };
    if m.degree() == 0 {
        return Ok(fac);
    }
    for (part, mult) in squarefree_parts(&m, f) {
        for (block, d) in distinct_degree(&part, f) {
            let mut pieces = Vec::new();
            equal_degree(&block, d, f, &mut rng, &mut pieces);
            fac.factors.extend(pieces.into_iter().map(|p| (p, mult)));
        }
    }
    // equal factors can arrive from different squarefree layers only once each
    fac.sort(f.q());
    Ok(fac)
}

/// Factorization, through the sieve when it covers deg G.
pub fn factor(g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<Factorization> {
    if g.is_zero() {
        return usage("cannot factor the zero polynomial");
    }
    if let Some(s) = sieve {
        if g.degree() <= s.bound() {
            let unit = g.leading();
            let m = g.make_monic(f);
            let q = f.q();
            let factors = s
                .factor_global(m.global_index(q))
                .into_iter()
                .map(|(p, e)| (Poly::from_global_index(q, p), e))
                .collect();
            return Ok(Factorization { unit, factors });
        }
    }
    factor_direct(g, f)
}

pub fn moebius(g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<i32> {
    let fac = factor(g, f, sieve)?;
    Ok(if fac.is_squarefree() { if fac.omega() % 2 == 0 { 1 } else { -1 } } else { 0 })
}

pub fn liouville(g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<i32> {
    Ok(if factor(g, f, sieve)?.big_omega() % 2 == 0 { 1 } else { -1 })
}

/// Λ(G): deg P when G = P^k, else 0.
pub fn von_mangoldt(g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<usize> {
    let fac = factor(g, f, sieve)?;
    Ok(match fac.factors.as_slice() {
        [(p, _)] => p.degree(),
        _ => 0,
    })
}

/// φ(G) = |(F_q[t]/G)^×|.
pub fn euler_phi(g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<u128> {
    let fac = factor(g, f, sieve)?;
    let q = f.q() as u128;
    let mut phi: u128 = 1;
    for (p, e) in &fac.factors {
        let qd = q.checked_pow(p.degree() as u32).ok_or_else(|| Error::Capacity("φ overflows".into()))?;
        let high = qd.checked_pow(e - 1).ok_or_else(|| Error::Capacity("φ overflows".into()))?;
        phi = phi
            .checked_mul(high * (qd - 1))
            .ok_or_else(|| Error::Capacity("φ overflows".into()))?;
    }
    Ok(phi)
}

pub fn radical(g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<Poly> {
    let fac = factor(g, f, sieve)?;
    Ok(fac.factors.iter().fold(Poly::one(), |acc, (p, _)| acc.mul(p, f)))
}

/// ν_P(G) for a monic irreducible P.
pub fn valuation(g: &Poly, p: &Poly, f: &FieldSpec) -> Result<u32> {
    if g.is_zero() {
        return domain("valuation of zero is infinite");
    }
    let mut cur = g.clone();
    let mut k = 0;
    loop {
        let (qu, r) = cur.divrem(p, f);
        if !r.is_zero() {
            return Ok(k);
        }
        cur = qu;
        k += 1;
    }
}

/// True iff G has an irreducible factor with degree in every window.
pub fn in_spq(g: &Poly, windows: &[(usize, usize)], f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<bool> {
    if windows.iter().any(|&(a, b)| a > b) {
        return usage("window with P > Q");
    }
    if windows.is_empty() {
        return Ok(true);
    }
    let fac = factor(g, f, sieve)?;
    Ok(windows
        .iter()
        .all(|&(a, b)| fac.factors.iter().any(|(p, _)| (a..=b).contains(&p.degree()))))
}

/// Iterator over M_N in enumeration order.
pub struct Monics {
    q: u32,
    n: usize,
    next: u64,
    end: u64,
}

impl Monics {
    pub fn new(q: u32, n: usize) -> Result<Monics> {
        Ok(Monics { q, n, next: 0, end: q_pow(q, n)? })
    }

    fn range(q: u32, n: usize, start: u64, end: u64) -> Monics {
        Monics { q, n, next: start, end }
    }
}

impl Iterator for Monics {
    type Item = Poly;
    fn next(&mut self) -> Option<Poly> {
        (self.next < self.end).then(|| {
            let p = Poly::from_monic_index(self.q, self.n, self.next);
            self.next += 1;
            p
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

/// Block boundaries of I_H(G_0) in M_N index space.
pub fn interval_range(g0: &Poly, h: usize, q: u32) -> Result<(u64, u64)> {
    if !g0.is_monic() {
        return usage("interval origin must be monic");
    }
    let n = g0.degree();
    if h < 1 || h > n {
        return usage(format!("interval length H = {h} must lie in 1..={n}"));
    }
    let width = q_pow(q, h)?;
    let start = g0.monic_index(q) / width * width;
    Ok((start, start + width))
}

/// The q^H monics G of degree N with deg(G - G_0) < H.
pub fn interval(g0: &Poly, h: usize, q: u32) -> Result<Monics> {
    let (a, b) = interval_range(g0, h, q)?;
    Ok(Monics::range(q, g0.degree(), a, b))
}

/// Guard for enumeration sizes against a budget in elements.
pub fn check_budget(what: &str, count: u128, limit: u128) -> Result<()> {
    if count > limit {
        return capacity(format!("{what}: {count} exceeds budget {limit}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Field, FieldSpec};
    use proptest::prelude::{prop_assert, prop_assert_eq, prop_assume, proptest};

    fn fq(q: u32) -> Field {
        FieldSpec::new(q).unwrap()
    }

    fn p(s: &str, f: &FieldSpec) -> Poly {
        Poly::parse(s, f).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let f = fq(5);
        for s in ["t^3+2*t+1", "t", "0", "4", "3*t^7+t^2"] {
            assert_eq!(p(s, &f).to_string(), s);
        }
        assert_eq!(p(" t ^ 2 + 1 ", &f).coeffs(), &[1, 0, 1]);
        assert!(Poly::parse("t^2+t^2", &f).is_err());
        assert!(Poly::parse("7*t", &f).is_err());
        assert!(Poly::parse("t^", &f).is_err());
        assert!(Poly::parse("", &f).is_err());
    }

    #[test]
    fn irreducibility_examples() {
        let f = fq(2);
        assert!(is_irreducible(&p("t^2+t+1", &f), &f).unwrap());
        assert!(!is_irreducible(&p("t^2", &f), &f).unwrap());
        assert!(!is_irreducible(&p("t^2+1", &f), &f).unwrap());
        assert!(is_irreducible(&p("2*t+1", &fq(3)), &fq(3)).is_err());
        assert!(is_irreducible(&Poly::one(), &f).is_err());
    }

    fn brute_irreducible(g: &Poly, f: &FieldSpec) -> bool {
        let n = g.degree();
        for d in 1..=n / 2 {
            for h in Monics::new(f.q(), d).unwrap() {
                if h.divides(g, f) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn irreducible_counts_match_brute_force() {
        assert_eq!(count_irreducibles(2, 1).unwrap(), 2);
        assert_eq!(count_irreducibles(2, 4).unwrap(), 3);
        assert_eq!(count_irreducibles(3, 2).unwrap(), 3);
        for q in [2u32, 3, 4] {
            let f = fq(q);
            for d in 1..=4 {
                let brute = Monics::new(q, d).unwrap().filter(|g| brute_irreducible(g, &f)).count();
                let rabin = Monics::new(q, d).unwrap().filter(|g| is_irreducible(g, &f).unwrap()).count();
                assert_eq!(brute as u128, count_irreducibles(q, d).unwrap());
                assert_eq!(rabin, brute);
            }
        }
    }

    #[test]
    fn gauss_identity() {
        for q in [2u32, 3, 4] {
            for n in 1..=14 {
                let s: u128 = (1..=n)
                    .filter(|d| n % d == 0)
                    .map(|d| d as u128 * count_irreducibles(q, d).unwrap())
                    .sum();
                assert_eq!(s, (q as u128).pow(n as u32));
            }
        }
    }

    #[test]
    fn factor_examples() {
        let f = fq(2);
        let fac = factor(&p("t^2+t", &f), &f, None).unwrap();
        assert_eq!(fac.factors, vec![(p("t", &f), 1), (p("t+1", &f), 1)]);
        let fac = factor(&p("t^2+1", &f), &f, None).unwrap();
        assert_eq!(fac.factors, vec![(p("t+1", &f), 2)]);
        let irr = p("t^5+t^2+1", &f);
        assert_eq!(factor(&irr, &f, None).unwrap().factors, vec![(irr, 1)]);
        assert!(factor(&Poly::zero(), &f, None).is_err());
    }

    #[test]
    fn factor_reconstructs_in_every_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2u32, 3, 4, 5, 8, 9] {
            let f = fq(q);
            for _ in 0..60 {
                let n = rng.gen_range(1..=14);
                let g = Poly::random_monic(&mut rng, q, n).scale(rng.gen_range(1..q), &f);
                let fac = factor_direct(&g, &f).unwrap();
                assert_eq!(fac.reconstruct(&f), g, "q={q} g={g}");
                for (pp, _) in &fac.factors {
                    assert!(is_irreducible(pp, &f).unwrap());
                }
                let mut ps: Vec<_> = fac.factors.iter().map(|(pp, _)| pp.clone()).collect();
                ps.dedup();
                assert_eq!(ps.len(), fac.factors.len());
            }
        }
    }

    #[test]
    fn high_powers_in_characteristic_p() {
        let f = fq(3);
        let g = p("t+2", &f).pow(9, &f).mul(&p("t^2+1", &f).pow(4, &f), &f);
        let fac = factor_direct(&g, &f).unwrap();
        assert_eq!(fac.factors, vec![(p("t+2", &f), 9), (p("t^2+1", &f), 4)]);
    }

    #[test]
    fn moebius_examples() {
        let f = fq(2);
        assert_eq!(moebius(&Poly::t(), &f, None).unwrap(), -1);
        assert_eq!(moebius(&p("t^2+t", &f), &f, None).unwrap(), 1);
        assert_eq!(moebius(&p("t^4+t^3+t^2", &f), &f, None).unwrap(), 0);
        assert_eq!(liouville(&p("t^3+t^2", &f), &f, None).unwrap(), -1);
        assert_eq!(von_mangoldt(&p("t^2+1", &f), &f, None).unwrap(), 1);
        assert_eq!(von_mangoldt(&p("t^2+t", &f), &f, None).unwrap(), 0);
        assert_eq!(euler_phi(&p("t^2", &f), &f, None).unwrap(), 2);
        assert_eq!(radical(&p("t^3+t^2", &f), &f, None).unwrap(), p("t^2+t", &f));
        assert_eq!(valuation(&p("t^3+t^2", &f), &Poly::t(), &f).unwrap(), 2);
    }

    #[test]
    fn moebius_sums_vanish_small() {
        for q in [2u32, 3] {
            let f = fq(q);
            for n in 2..=6 {
                let s: i32 = Monics::new(q, n).unwrap().map(|g| moebius(&g, &f, None).unwrap()).sum();
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn involute_examples() {
        let f = fq(2);
        assert_eq!(p("t^3+t+1", &f).involute(), p("t^3+t^2+1", &f));
        assert_eq!(p("t^2+t+1", &f).involute(), p("t^2+t+1", &f));
    }

    #[test]
    fn interval_examples() {
        let f = fq(2);
        let got: Vec<_> = interval(&p("t^2", &f), 1, 2).unwrap().collect();
        assert_eq!(got, vec![p("t^2", &f), p("t^2+1", &f)]);
        assert_eq!(interval(&p("t^5+t^3", &f), 3, 2).unwrap().count(), 8);
        assert_eq!(interval(&p("t^4", &f), 4, 2).unwrap().count(), 16);
        assert!(interval(&p("t^2", &f), 3, 2).is_err());
        let g0 = p("t^5+t^4+t", &f);
        for g in interval(&g0, 3, 2).unwrap() {
            assert!(g.sub(&g0, &f).deg().is_none_or(|d| d < 3));
        }
    }

    #[test]
    fn spq_examples() {
        let f = fq(2);
        assert!(in_spq(&p("t^3", &f), &[], &f, None).unwrap());
        assert!(in_spq(&p("t^3+t^2+t", &f), &[(2, 2)], &f, None).unwrap());
        assert!(!in_spq(&p("t^3", &f), &[(2, 2)], &f, None).unwrap());
        assert!(in_spq(&p("t^3", &f), &[(3, 2)], &f, None).is_err());
    }

    #[test]
    fn global_index_round_trip() {
        for q in [2u32, 3, 4] {
            for g in 0..500u64 {
                let pp = Poly::from_global_index(q, g);
                assert!(pp.is_monic());
                assert_eq!(pp.global_index(q), g);
            }
        }
    }

    proptest! {
        #[test]
        fn involution_properties(a in proptest::collection::vec(0u32..3, 1..8), b in proptest::collection::vec(0u32..3, 1..8)) {
            let f = fq(3);
            let mut a = a; a.push(1);
            let mut b = b; b.push(1);
            let (pa, pb) = (Poly::new(a), Poly::new(b));
            if pa.constant_term() != 0 {
                let back = pa.involute().involute();
                prop_assert_eq!(back, pa.clone());
            }
            if pa.constant_term() != 0 && pb.constant_term() != 0 {
                prop_assert_eq!(pa.mul(&pb, &f).involute(), pa.involute().mul(&pb.involute(), &f));
            }
        }

        #[test]
        fn divrem_identity(a in proptest::collection::vec(0u32..4, 0..12), b in proptest::collection::vec(0u32..4, 1..6)) {
            let f = fq(4);
            let (pa, pb) = (Poly::new(a), Poly::new(b));
            prop_assume!(!pb.is_zero());
            let (qq, r) = pa.divrem(&pb, &f);
            prop_assert_eq!(qq.mul(&pb, &f).add(&r, &f), pa);
            prop_assert!(r.deg().is_none_or(|d| d < pb.degree()));
        }
    }
}
