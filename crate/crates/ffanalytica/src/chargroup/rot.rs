//! Roots of unity as exact rotations, and exact sums of them.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// e(k/n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Rot {
    pub k: u32,
    pub n: u32,
}

impl Rot {
    pub const ONE: Rot = Rot { k: 0, n: 1 };

    pub fn new(k: u64, n: u32) -> Rot {
        Rot { k: (k % n as u64) as u32, n }
    }

    pub fn to_complex(self) -> Complex64 {
        root_of_unity(self.k, self.n)
    }

    /// Same rotation over a denominator that n divides.
    pub fn lift(self, n: u32) -> Rot {
        debug_assert_eq!(n % self.n, 0);
        Rot { k: self.k * (n / self.n), n }
    }

    pub fn mul(self, o: Rot) -> Rot {
        let n = lcm(self.n as u64, o.n as u64) as u32;
        let (a, b) = (self.lift(n), o.lift(n));
        Rot::new(a.k as u64 + b.k as u64, n)
    }

    pub fn conj(self) -> Rot {
        Rot::new((self.n - self.k) as u64, self.n)
    }

    pub fn pow(self, e: u64) -> Rot {
        Rot::new(self.k as u64 * (e % self.n as u64), self.n)
    }

    pub fn reduced(self) -> Rot {
        let g = gcd(self.k as u64, self.n as u64).max(1) as u32;
        if self.k == 0 {
            return Rot::ONE;
        }
        Rot { k: self.k / g, n: self.n / g }
    }
}

/// cos/sin of 2πk/n folded into the first octant so that conjugate and
/// symmetric angles give bitwise-symmetric values.
pub fn root_of_unity(k: u32, n: u32) -> Complex64 {
    let k = k % n;
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let (k, n) = (k as u64, n as u64);
    // reduce to angle in [0, π] then reflect sin sign
    let (kk, neg) = if 2 * k > n { (n - k, true) } else { (k, false) };
    let z = if 4 * kk == n {
        Complex64::new(0.0, 1.0)
    } else if 2 * kk == n {
        Complex64::new(-1.0, 0.0)
    } else {
        let a = TAU * kk as f64 / n as f64;
        Complex64::new(a.cos(), a.sin())
    };
    if neg {
        z.conj()
    } else {
        z
    }
}

/// Integer combination Σ c_k e(k/n), kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotSum {
    n: u32,
    counts: Vec<i64>,
}

impl RotSum {
    pub fn new(n: u32) -> RotSum {
        RotSum { n, counts: vec![0; n as usize] }
    }

    pub fn from_counts(n: u32, counts: Vec<i64>) -> RotSum {
        assert_eq!(counts.len(), n as usize);
        RotSum { n, counts }
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    #[inline]
    pub fn add_rot(&mut self, k: u32, weight: i64) {
        self.counts[k as usize] += weight;
    }

    pub fn add_assign(&mut self, o: &RotSum) {
        assert_eq!(self.n, o.n);
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                acc += root_of_unity(k as u32, self.n) * c as f64;
            }
        }
        acc
    }

    /// Exact test Σ c_k ζ_n^k = 0, by reducing Σ c_k x^k modulo Φ_n.
    pub fn is_zero(&self) -> bool {
        if self.counts.iter().all(|&c| c == 0) {
            return true;
        }
        let n = self.n as usize;
        let rad = radical(n);
        let s = n / rad;
        // Φ_n(x) = Φ_rad(x^s): split by residue of the exponent mod s
        let phi = cyclotomic(rad);
        (0..s).all(|j| {
            let part: Vec<i128> = (0..rad).map(|i| self.counts[j + i * s] as i128).collect();
            reduce_mod_monic(part, &phi).iter().all(|&c| c == 0)
        })
    }
}

fn radical(mut n: usize) -> usize {
    let mut r = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            r *= d;
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        r *= n;
    }
    r
}

/// Integer coefficients of the n-th cyclotomic polynomial, low-to-high.
pub fn cyclotomic(n: usize) -> Vec<i128> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<i128>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return v.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i128; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = exact_div(&num, &cyclotomic(d));
        }
    }
    cache.lock().unwrap().insert(n, num.clone());
    num
}

fn exact_div(a: &[i128], b: &[i128]) -> Vec<i128> {
    let (da, db) = (a.len() - 1, b.len() - 1);
    let mut r = a.to_vec();
    let mut q = vec![0i128; da - db + 1];
    for i in (0..=da - db).rev() {
        let c = r[i + db];
        q[i] = c;
        for j in 0..=db {
            r[i + j] -= c * b[j];
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

fn reduce_mod_monic(mut a: Vec<i128>, m: &[i128]) -> Vec<i128> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let c = a.pop().unwrap();
        if c == 0 {
            continue;
        }
        let off = a.len() - dm;
        for i in 0..dm {
            a[off + i] -= c * m[i];
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn exact_zero_detection() {
        let mut s = RotSum::new(12);
        for k in [0, 4, 8] {
            s.add_rot(k, 1);
        }
        assert!(s.is_zero());
        s.add_rot(3, 2);
        s.add_rot(9, 2);
        assert!(s.is_zero());
        s.add_rot(1, 1);
        assert!(!s.is_zero());
        let mut t = RotSum::new(30);
        for k in (0..30).step_by(6) {
            t.add_rot(k, 1);
        }
        assert!(t.is_zero());
        t.add_rot(1, -1);
        t.add_rot(11, -1);
        assert!(!t.is_zero());
        t.add_rot(21, -1);
        assert!(t.is_zero());
    }

    #[test]
    fn float_roots_are_symmetric() {
        for n in 1..40 {
            for k in 0..n {
                let (a, b) = (root_of_unity(k, n), root_of_unity(n - k, n));
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im, -b.im);
                assert!((a.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rotation_algebra() {
        let a = Rot::new(1, 4);
        let b = Rot::new(1, 6);
        assert_eq!(a.mul(b), Rot::new(5, 12));
        assert_eq!(a.mul(a.conj()).reduced(), Rot::ONE);
        assert_eq!(a.pow(4).reduced(), Rot::ONE);
    }
}
