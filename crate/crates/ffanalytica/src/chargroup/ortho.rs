use num_complex::Complex64;
use serde::Serialize;

use super::character::{characters, hayes_equiv};
use super::rot::RotSum;
use super::{unit_group, HayesFamily};
use crate::error::{capacity, usage, Result};
use crate::gf::Field;
use crate::poly::{Monics, Poly};

/// Largest |X_{Q,ν}| the pairwise orthogonality check accepts.
pub const MAX_ORTHO_CHARS: usize = 1 << 11;

#[derive(Debug, Clone, Serialize)]
pub struct OrthoReport {
    pub characters: usize,
    /// max |average - indicator| over character pairs
    pub first: f64,
    /// max |average - indicator| over residue pairs
    pub second: f64,
    /// every sum met its exact value before rounding
    pub exact: bool,
}

impl OrthoReport {
    pub fn max_deviation(&self) -> f64 {
        self.first.max(self.second)
    }
}

/// Both orthogonality relations of X_{Q,ν}, summed exactly and compared to
/// their indicators. The deviation left over is the final float conversion.
pub fn orthogonality_residues(m: &Poly, nu: usize, f: &Field) -> Result<OrthoReport> {
    let fam = HayesFamily::new(m, nu, f)?;
    let n = fam.len();
    if n > MAX_ORTHO_CHARS {
        return capacity(format!("|X_(Q,ν)| = {n} is above the orthogonality budget {MAX_ORTHO_CHARS}"));
    }
    let l = fam.denominator();
    let phi = fam.phi() as usize;
    let ns = fam.short_count();
    let dir: Vec<Vec<u32>> = (0..fam.dir_chars().len()).map(|i| fam.dir_table(i)).collect();
    let short: Vec<Vec<u32>> = (0..ns).map(|j| fam.short_table(j)).collect();
    // rot[c][class] for every character c = i·ns + j
    let rot_at = |c: usize, class: u32| -> u32 {
        let (i, j) = (c / ns, c % ns);
        let (a, b) = (class as usize % phi, class as usize / phi);
        (dir[i][a] + short[j][b]) % l
    };
    let scale = 1.0 / n as f64;
    let mut exact = true;

    let reps = fam.representatives();
    let classes: Vec<u32> = reps.iter().map(|g| fam.class_of(g).expect("representatives are units")).collect();
    let table: Vec<Vec<u32>> = (0..n).map(|c| classes.iter().map(|&k| rot_at(c, k)).collect()).collect();
    let mut first: f64 = 0.0;
    for c1 in 0..n {
        for c2 in 0..n {
            let mut s = RotSum::new(l);
            for (&a, &b) in table[c1].iter().zip(&table[c2]) {
                s.add_rot((a + l - b) % l, 1);
            }
            let ind = if c1 == c2 { 1.0 } else { 0.0 };
            exact &= if c1 == c2 { s.counts()[0] == n as i64 } else { s.is_zero() };
            first = first.max((s.to_complex() * scale - Complex64::new(ind, 0.0)).norm());
        }
    }

    // B runs one degree higher, so classes repeat and the indicator is non-trivial
    let bs: Vec<(Poly, u32)> = Monics::new(f.q(), m.degree() + nu + 1)?
        .filter_map(|g| fam.class_of(&g).map(|c| (g, c)))
        .collect();
    let mut second: f64 = 0.0;
    for (a, &ca) in reps.iter().zip(&classes) {
        for (b, cb) in &bs {
            let mut s = RotSum::new(l);
            for c in 0..n {
                s.add_rot((rot_at(c, ca) + l - rot_at(c, *cb)) % l, 1);
            }
            let same = hayes_equiv(a, b, m, nu, f)?;
            exact &= if same { s.counts()[0] == n as i64 } else { s.is_zero() };
            let ind = if same { 1.0 } else { 0.0 };
            second = second.max((s.to_complex() * scale - Complex64::new(ind, 0.0)).norm());
        }
    }
    Ok(OrthoReport { characters: n, first, second, exact })
}

/// Σ_χ |Σ_{G ∈ M_N} a_G χ(G)|² against (2φ(Q) q^{N - deg Q} + φ(Q)) Σ_{(G,Q)=1} |a_G|².
/// `coeffs[i]` is a_G for the monic of index i in M_N.
pub fn l2_mean_value_trial(m: &Poly, n: usize, coeffs: &[Complex64], f: &Field) -> Result<(f64, f64)> {
    let q = f.q();
    let count = crate::poly::q_pow(q, n)?;
    if coeffs.len() as u64 != count {
        return usage(format!("need {count} coefficients for M_{n}, got {}", coeffs.len()));
    }
    let g = unit_group(m, f)?;
    let units: Vec<Option<u32>> = Monics::new(q, n)?.map(|p| g.dlog(&p)).collect();
    let mut lhs = 0.0;
    for chi in characters(&g) {
        let table = chi.table();
        let l = chi.denominator();
        let mut s = Complex64::new(0.0, 0.0);
        for (a, u) in coeffs.iter().zip(&units) {
            if let Some(r) = u {
                s += a * super::rot::root_of_unity(table[*r as usize], l);
            }
        }
        lhs += s.norm_sqr();
    }
    let phi = g.phi() as f64;
    let mass: f64 = coeffs.iter().zip(&units).filter(|(_, u)| u.is_some()).map(|(a, _)| a.norm_sqr()).sum();
    let k = n as i64 - m.degree() as i64;
    let rhs = (2.0 * phi * (q as f64).powi(k as i32) + phi) * mass;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonality_small() {
        let f = FieldSpec::new(2).unwrap();
        let r = orthogonality_residues(&Poly::parse("t^2", &f).unwrap(), 2, &f).unwrap();
        assert!(r.exact);
        assert!(r.max_deviation() <= 1e-10);
        assert_eq!(r.characters, 8);
        let f = FieldSpec::new(3).unwrap();
        let r = orthogonality_residues(&Poly::parse("t^2+t+1", &f).unwrap(), 1, &f).unwrap();
        assert!(r.exact && r.max_deviation() <= 1e-10);
    }

    #[test]
    fn l2_examples() {
        let f = FieldSpec::new(2).unwrap();
        let m = Poly::parse("t^3", &f).unwrap();
        let zero = vec![Complex64::new(0.0, 0.0); 64];
        assert_eq!(l2_mean_value_trial(&m, 6, &zero, &f).unwrap(), (0.0, 0.0));
        // a single unit G_1 = t^6 + 1
        let mut one = zero.clone();
        one[1] = Complex64::new(1.0, 0.0);
        let (lhs, rhs) = l2_mean_value_trial(&m, 6, &one, &f).unwrap();
        assert!((lhs - 4.0).abs() < 1e-12 && lhs <= rhs);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a: Vec<Complex64> = (0..64).map(|_| Complex64::from_polar(rng.gen::<f64>(), rng.gen::<f64>() * 6.3)).collect();
            let (lhs, rhs) = l2_mean_value_trial(&m, 6, &a, &f).unwrap();
            assert!(lhs <= rhs);
        }
    }
}
