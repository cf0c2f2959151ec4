//! Arithmetic in a single finite field F_q = F_p[x]/(m(x)).
//!
//! Elements are indexed by the base-p value of their coefficient vector, low
//! degree first, so index `c_0 + c_1 p + ...` stands for `c_0 + c_1 x + ...`.
//! Index 0 is zero, index 1 is one, and indices `0..p` form the prime subfield.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{usage, Result};

const NONE: u32 = u32::MAX;
pub const MAX_Q: u32 = 1 << 16;

/// Immutable description of F_q with its log/antilog and Zech tables.
#[derive(Debug)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    id: u64,
    generator: u32,
    log: Vec<u32>,
    exp: Vec<u32>,
    zech: Vec<u32>,
    neg: Vec<u32>,
    trace: Vec<u32>,
}

/// A field element tagged with the fingerprint of its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FieldElem {
    pub value: u32,
    #[serde(skip)]
    field: u64,
}

impl FieldElem {
    pub fn field_id(&self) -> u64 {
        self.field
    }
}

pub type Field = Arc<FieldSpec>;

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

fn is_prime(n: u32) -> bool {
    n >= 2 && prime_power(n) == Some((n, 1))
}

// Dense F_p polynomials used only while building tables.
fn fp_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let inv_lead = fp_inv(m[dm], p);
    while r.len() > dm {
        let c = r.pop().unwrap() * inv_lead % p;
        if c == 0 {
            continue;
        }
        let off = r.len() - dm;
        for i in 0..dm {
            r[off + i] = (r[off + i] + p * p - c * m[i] % p) % p;
        }
    }
    fp_trim(r)
}

fn fp_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn fp_mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    fp_rem(&r, m, p)
}

fn digits(mut v: u32, p: u32, k: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(k as usize);
    for _ in 0..k {
        d.push(v % p);
        v /= p;
    }
    fp_trim(d)
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Irreducibility over F_p by trial division; only used for k ≤ 16.
fn fp_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() as u32 - 1;
    for d in 1..=k / 2 {
        for low in 0..p.pow(d) {
            let mut cand = digits(low, p, d);
            cand.resize(d as usize, 0);
            cand.push(1);
            if fp_rem(m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible of degree k, ordering c_0 first, then c_1, and so on.
fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    let total = p.pow(k);
    for rank in 0..total {
        // rank enumerates (c_0, ..., c_{k-1}) with c_0 most significant
        let mut m = vec![0u32; k as usize + 1];
        let mut r = rank;
        for i in (0..k as usize).rev() {
            m[i] = r % p;
            r /= p;
        }
        m[k as usize] = 1;
        if fp_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("an irreducible of every degree exists")
}

fn fingerprint(p: u32, modulus: &[u32]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &x in std::iter::once(&p).chain(modulus) {
        h ^= x as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn small_prime_factors(mut n: u64) -> Vec<u64> {
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

impl FieldSpec {
    /// F_q with the default defining modulus.
    pub fn new(q: u32) -> Result<Field> {
        let Some((p, k)) = prime_power(q) else {
            return usage(format!("q = {q} is not a prime power"));
        };
        if q > MAX_Q {
            return usage(format!("q = {q} exceeds the table limit {MAX_Q}"));
        }
        Self::with_modulus(p, &least_irreducible(p, k))
    }

    /// F_p[x]/(m) for an explicit monic irreducible m given low-to-high.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Field> {
        if !is_prime(p) {
            return usage(format!("{p} is not prime"));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return usage("modulus must be monic of degree >= 1 with coefficients in 0..p");
        }
        let k = modulus.len() as u32 - 1;
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| crate::Error::Usage(format!("p^k exceeds {MAX_Q}")))?;
        if !fp_irreducible(modulus, p) {
            return usage("modulus is reducible over F_p");
        }

        let mul_idx = |a: u32, b: u32| {
            undigits(&fp_mul_mod(&digits(a, p, k), &digits(b, p, k), modulus, p), p)
        };
        let group = (q - 1) as u64;
        let factors = small_prime_factors(group);
        let pow_idx = |a: u32, mut e: u64| {
            let (mut r, mut b) = (1u32, a);
            while e > 0 {
                if e & 1 == 1 {
                    r = mul_idx(r, b);
                }
                b = mul_idx(b, b);
                e >>= 1;
            }
            r
        };
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&f| pow_idx(g, group / f) != 1))
            .expect("F_q^x is cyclic");

        let n = q - 1;
        let mut exp = vec![0u32; 2 * n as usize];
        let mut log = vec![NONE; q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i as usize] = x;
            exp[(i + n) as usize] = x;
            log[x as usize] = i;
            x = mul_idx(x, generator);
        }

        let add_digits = |a: u32, b: u32| {
            let (da, db) = (digits(a, p, k), digits(b, p, k));
            let len = da.len().max(db.len());
            let s: Vec<u32> = (0..len)
                .map(|i| (da.get(i).copied().unwrap_or(0) + db.get(i).copied().unwrap_or(0)) % p)
                .collect();
            undigits(&fp_trim(s), p)
        };
        let neg: Vec<u32> = (0..q)
            .map(|a| undigits(&digits(a, p, k).iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p))
            .collect();
        let zech: Vec<u32> = (0..n)
            .map(|i| {
                let s = add_digits(1, exp[i as usize]);
                if s == 0 {
                    NONE
                } else {
                    log[s as usize]
                }
            })
            .collect();

        let mut spec = FieldSpec {
            p,
            k,
            q,
            modulus: modulus.to_vec(),
            id: fingerprint(p, modulus),
            generator,
            log,
            exp,
            zech,
            neg,
            trace: Vec::new(),
        };
        spec.trace = (0..q)
            .map(|a| {
                let (mut t, mut y) = (0u32, a);
                for _ in 0..k {
                    t = spec.add(t, y);
                    y = spec.pow(y, p as u64);
                }
                t
            })
            .collect();
        debug_assert!(spec.trace.iter().all(|&t| t < p));
        Ok(Arc::new(spec))
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn id(&self) -> u64 {
        self.id
    }
    /// Defining modulus over F_p, low-to-high, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elem(&self, value: u32) -> Result<FieldElem> {
        if value >= self.q {
            return usage(format!("{value} is not an element of F_{}", self.q));
        }
        Ok(FieldElem { value, field: self.id })
    }

    fn check(&self, a: FieldElem) -> Result<u32> {
        if a.field != self.id {
            return usage("operands belong to different fields");
        }
        Ok(a.value)
    }

    fn checked2(&self, a: FieldElem, b: FieldElem, f: impl Fn(u32, u32) -> u32) -> Result<FieldElem> {
        if a.field != b.field {
            return usage("operands belong to different fields");
        }
        let (x, y) = (self.check(a)?, self.check(b)?);
        Ok(FieldElem { value: f(x, y), field: self.id })
    }

    pub fn mul_elem(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.checked2(a, b, |x, y| self.mul(x, y))
    }

    pub fn add_elem(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.checked2(a, b, |x, y| self.add(x, y))
    }

    pub fn trace_elem(&self, a: FieldElem) -> Result<FieldElem> {
        let x = self.check(a)?;
        Ok(FieldElem { value: self.trace(x), field: self.id })
    }

    /// The fixed generator of F_q^x: smallest index of order q-1.
    pub fn generator(&self) -> FieldElem {
        FieldElem { value: self.generator, field: self.id }
    }

    pub fn generator_index(&self) -> u32 {
        self.generator
    }

    // Raw index arithmetic. Callers guarantee indices are < q.

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let n = self.q - 1;
        let (la, lb) = (self.log[a as usize], self.log[b as usize]);
        let d = if lb >= la { lb - la } else { lb + n - la };
        match self.zech[d as usize] {
            NONE => 0,
            z => self.exp[(la + z) as usize],
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; `inv(0)` is 0 by convention and never relied on.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        if a == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[((n - self.log[a as usize]) % n) as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Discrete log base the generator; `None` for zero.
    #[inline]
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    #[inline]
    pub fn exp(&self, e: u32) -> u32 {
        self.exp[(e % (self.q - 1)) as usize]
    }

    /// Trace to F_p, returned as an integer in 0..p.
    #[inline]
    pub fn trace(&self, a: u32) -> u32 {
        self.trace[a as usize]
    }

    /// Human-readable name of an element in terms of x, e.g. "x+1".
    pub fn describe(&self, a: u32) -> String {
        let d = digits(a, self.p, self.k);
        if d.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            parts.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        parts.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u32) -> Field {
        FieldSpec::new(q).unwrap()
    }

    #[test]
    fn default_moduli() {
        assert_eq!(f(4).modulus(), &[1, 1, 1]);
        // x^3+x^2+1 precedes x^3+x+1 when c_1 is compared before c_2
        assert_eq!(f(8).modulus(), &[1, 0, 1, 1]);
        assert_eq!(f(9).modulus(), &[1, 0, 1]);
        assert_eq!(f(5).modulus(), &[0, 1]);
    }

    #[test]
    fn mul_examples() {
        let f4 = f(4);
        let x = f4.elem(2).unwrap();
        assert_eq!(f4.mul_elem(x, x).unwrap().value, 3);
        for a in 0..4 {
            assert_eq!(f4.mul(a, 1), a);
        }
        assert_eq!(f(3).mul(2, 2), 1);
    }

    #[test]
    fn mixed_fields_rejected() {
        let (a, b) = (f(4).elem(2).unwrap(), f(8).elem(2).unwrap());
        assert!(matches!(f(4).mul_elem(a, b), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn same_field_built_twice_is_compatible() {
        let a = f(9).elem(5).unwrap();
        let b = f(9).elem(7).unwrap();
        assert!(f(9).mul_elem(a, b).is_ok());
    }

    #[test]
    fn trace_examples() {
        let f4 = f(4);
        assert_eq!(f4.trace(0), 0);
        assert_eq!(f4.trace(2), 1);
        assert_eq!(f4.trace(1), 0);
    }

    #[test]
    fn generator_examples() {
        assert_eq!(f(2).generator().value, 1);
        assert_eq!(f(3).generator().value, 2);
        assert_eq!(f(4).generator().value, 2);
    }

    #[test]
    fn non_prime_power_rejected() {
        assert!(FieldSpec::new(6).is_err());
        assert!(FieldSpec::new(1).is_err());
        assert!(FieldSpec::with_modulus(2, &[1, 0, 1]).is_err());
    }

    #[test]
    fn axioms_on_random_triples() {
        for q in [2u32, 3, 4, 5, 8, 9] {
            let fq = f(q);
            let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
            for _ in 0..10_000 {
                let (a, b, c) = (rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q));
                assert_eq!(fq.add(fq.add(a, b), c), fq.add(a, fq.add(b, c)));
                assert_eq!(fq.mul(fq.mul(a, b), c), fq.mul(a, fq.mul(b, c)));
                assert_eq!(fq.mul(a, fq.add(b, c)), fq.add(fq.mul(a, b), fq.mul(a, c)));
                assert_eq!(fq.add(a, b), fq.add(b, a));
                assert_eq!(fq.add(a, fq.neg(a)), 0);
                assert_eq!(fq.trace(fq.add(a, b)), (fq.trace(a) + fq.trace(b)) % fq.p());
            }
            for a in 1..q {
                assert_eq!(fq.pow(a, (q - 1) as u64), 1);
                assert_eq!(fq.mul(a, fq.inv(a)), 1);
                assert_eq!(fq.exp(fq.log(a).unwrap()), a);
            }
        }
    }

    #[test]
    fn describe_elements() {
        let f9 = f(9);
        assert_eq!(f9.describe(0), "0");
        assert_eq!(f9.describe(3), "x");
        assert_eq!(f9.describe(7), "2x+1");
    }
}
