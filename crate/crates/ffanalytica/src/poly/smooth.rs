//! Exact counts of monics by the degrees of their irreducible factors, and the
//! Dickman function used as a reference curve for smooth counts.

use std::sync::OnceLock;

use crate::error::{domain, usage, Error, Result};
use crate::poly::count_irreducibles;

/// |{G ∈ M_N : every irreducible factor has a degree in `allowed`}|.
///
/// Expands Π_{d allowed} (1 - z^d)^{-|P_d|} to order N. Requires q^N < 2^64 so
/// every intermediate product fits in u128.
pub fn count_with_factor_degrees(q: u32, n: usize, allowed: impl Fn(usize) -> bool) -> Result<u128> {
    let total = (q as u128).checked_pow(n as u32).filter(|&t| t < 1u128 << 64);
    if total.is_none() {
        return Err(Error::Capacity(format!("{q}^{n} is too large for exact counting")));
    }
    let mut c = vec![0u128; n + 1];
    c[0] = 1;
    for d in 1..=n {
        if !allowed(d) {
            continue;
        }
        let np = count_irreducibles(q, d)?;
        let mut next = c.clone();
        // coefficient of z^{kd} in (1 - z^d)^{-np} is C(np + k - 1, k)
        let mut binom: u128 = 1;
        for k in 1..=n / d {
            binom = binom * (np + k as u128 - 1) / k as u128;
            for i in 0..=n - k * d {
                next[i + k * d] += c[i] * binom;
            }
        }
        c = next;
    }
    Ok(c[n])
}

/// |S(N, M)|: monics of degree N whose irreducible factors all have degree ≤ M.
pub fn count_smooth(q: u32, n: usize, m: usize) -> Result<u128> {
    if m < 1 || m > n {
        return usage(format!("count_smooth needs 1 <= M <= N, got N={n} M={m}"));
    }
    count_with_factor_degrees(q, n, |d| d <= m)
}

/// Monics of degree N with no irreducible factor of degree in [lo, hi].
pub fn count_without_factor_degrees(q: u32, n: usize, lo: usize, hi: usize) -> Result<u128> {
    if lo > hi {
        return usage("empty degree window");
    }
    count_with_factor_degrees(q, n, |d| d < lo || d > hi)
}

const RHO_STEP: f64 = 1e-3;
const RHO_MAX: f64 = 6.0;

struct RhoTable {
    y: Vec<f64>,
}

fn rho_table() -> &'static RhoTable {
    static TABLE: OnceLock<RhoTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = RHO_STEP;
        let n = (RHO_MAX / h).round() as usize;
        let lag = (1.0 / h).round() as usize;
        let mut y = vec![1.0f64; n + 1];
        // ρ' jumps from 0 to -1 at u = 1, so the side matters at that grid point
        let slope = |y: &[f64], i: usize, right: bool| -> f64 {
            if i < lag || (i == lag && !right) {
                0.0
            } else {
                -y[i - lag] / (i as f64 * h)
            }
        };
        // delayed value at (i - lag) + 1/2 by cubic Hermite between grid points
        let delayed_mid = |y: &[f64], i: usize| -> f64 {
            let j = i - lag;
            let (a, b) = (y[j], y[j + 1]);
            let (da, db) = (slope(y, j, true), slope(y, j + 1, false));
            0.5 * (a + b) + h / 8.0 * (da - db)
        };
        for i in lag..n {
            let u = i as f64 * h;
            let f = |x: f64, delayed: f64| -delayed / x;
            let k1 = f(u, y[i - lag]);
            let mid = delayed_mid(&y, i);
            let k2 = f(u + h / 2.0, mid);
            let k3 = k2;
            let k4 = f(u + h, y[i + 1 - lag]);
            y[i + 1] = y[i] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        RhoTable { y }
    })
}

/// Dickman ρ on [0, 6] from the delay equation u ρ'(u) = -ρ(u - 1), ρ = 1 on [0, 1].
pub fn dickman_rho(u: f64) -> Result<f64> {
    if !(0.0..=RHO_MAX).contains(&u) {
        return domain(format!("dickman_rho is tabulated on [0, {RHO_MAX}], got {u}"));
    }
    if u <= 1.0 {
        return Ok(1.0);
    }
    let t = rho_table();
    let h = RHO_STEP;
    let x = u / h;
    let i = (x.floor() as usize).min(t.y.len() - 2);
    let s = x - i as f64;
    let (a, b) = (t.y[i], t.y[i + 1]);
    let lag = (1.0 / h).round() as usize;
    let d = |j: usize| -t.y[j - lag] / (j as f64 * h);
    let (da, db) = (d(i) * h, d(i + 1) * h);
    // cubic Hermite basis on [0, 1]
    let (s2, s3) = (s * s, s * s * s);
    Ok((2.0 * s3 - 3.0 * s2 + 1.0) * a + (s3 - 2.0 * s2 + s) * da + (-2.0 * s3 + 3.0 * s2) * b + (s3 - s2) * db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::poly::{factor, Monics};

    #[test]
    fn smooth_examples() {
        assert_eq!(count_smooth(2, 2, 1).unwrap(), 3);
        assert_eq!(count_smooth(2, 3, 1).unwrap(), 4);
        for n in 1..10 {
            assert_eq!(count_smooth(3, n, n).unwrap(), 3u128.pow(n as u32));
        }
        assert!(count_smooth(2, 3, 4).is_err());
    }

    #[test]
    fn smooth_counts_match_enumeration() {
        for q in [2u32, 3] {
            let f = FieldSpec::new(q).unwrap();
            for n in 1..=7 {
                let degs: Vec<usize> = Monics::new(q, n)
                    .unwrap()
                    .map(|g| factor(&g, &f, None).unwrap().factors.iter().map(|(p, _)| p.degree()).max().unwrap())
                    .collect();
                for m in 1..=n {
                    let brute = degs.iter().filter(|&&d| d <= m).count() as u128;
                    assert_eq!(count_smooth(q, n, m).unwrap(), brute);
                }
            }
        }
    }

    #[test]
    fn rho_closed_forms() {
        // ρ(u) = 1 - ln u on [1, 2]
        for u in [1.2, 1.5, 1.9, 2.0] {
            assert!((dickman_rho(u).unwrap() - (1.0 - f64::ln(u))).abs() < 1e-9);
        }
        assert!((dickman_rho(3.0).unwrap() - 0.048_608_388).abs() < 1e-7);
        assert!((dickman_rho(4.0).unwrap() - 0.004_910_925_6).abs() < 1e-8);
        assert!(dickman_rho(7.0).is_err());
    }
}
