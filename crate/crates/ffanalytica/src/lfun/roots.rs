use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DK_MAX_ITER: usize = 500;
pub const DK_TOL: f64 = 1e-12;
/// Relative residual |p(α)| / Σ|c_k||α|^k accepted after iteration stops.
const ACCEPT_RESIDUAL: f64 = 1e-9;
/// Iterates closer than this (times √q) are treated as one repeated root.
pub const CLUSTER_RADIUS: f64 = 3e-5;

#[derive(Debug, Clone)]
pub struct RootReport {
    pub roots: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Inverse roots α_j of 1 + c_1 z + ... + c_D z^D, i.e. the roots of
/// w^D + c_1 w^{D-1} + ... + c_D.
pub fn durand_kerner(coeffs: &[Complex64], q: u32) -> Result<RootReport> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(RootReport { roots: Vec::new(), residual: 0.0, iterations: 0 });
    }
    let lead = coeffs[0];
    // monic in w, highest power first
    let p: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |w: Complex64| p.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c);
    let scale = |w: Complex64| p.iter().fold(0.0, |acc, c| acc * w.norm() + c.norm());

    let r = 1.5 * (q as f64).sqrt();
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect();
    let mut iterations = 0;
    for it in 0..DK_MAX_ITER {
        iterations = it + 1;
        let mut step: f64 = 0.0;
        for k in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != k {
                    den *= z[k] - z[j];
                }
            }
            if den.norm() == 0.0 {
                // coincident iterates: nudge deterministically
                den = Complex64::new(1e-14, 1e-14);
            }
            let delta = eval(z[k]) / den;
            z[k] -= delta;
            step = step.max(delta.norm() / z[k].norm().max(1.0));
        }
        if step <= DK_TOL {
            break;
        }
    }
    polish_clusters(&p, &mut z, CLUSTER_RADIUS * (q as f64).sqrt().max(1.0));
    let residual = z.iter().map(|&w| eval(w).norm() / scale(w).max(1.0)).fold(0.0, f64::max);
    if !residual.is_finite() || residual > ACCEPT_RESIDUAL {
        return Err(Error::Numeric { message: format!("Durand–Kerner did not converge on a degree-{d} L-polynomial"), residual });
    }
    Ok(RootReport { roots: z, residual, iterations })
}

fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    let d = p.len() - 1;
    p[..d].iter().enumerate().map(|(i, c)| c * (d - i) as f64).collect()
}

fn horner(p: &[Complex64], w: Complex64) -> Complex64 {
    p.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
}

/// Durand–Kerner converges only linearly onto a root of multiplicity m and
/// stalls near eps^{1/m}. A cluster of m iterates is replaced by the simple
/// root of p^{(m-1)} found by Newton from the centroid.
fn polish_clusters(p: &[Complex64], z: &mut [Complex64], radius: f64) {
    let groups = clusters(z, radius);
    for g in groups.into_iter().filter(|g| g.len() > 1) {
        let m = g.len();
        let mut dp = p.to_vec();
        for _ in 1..m {
            dp = derivative(&dp);
        }
        let ddp = derivative(&dp);
        let mut w = g.iter().map(|&i| z[i]).sum::<Complex64>() / m as f64;
        for _ in 0..60 {
            let den = horner(&ddp, w);
            if den.norm() == 0.0 {
                break;
            }
            let step = horner(&dp, w) / den;
            w -= step;
            if step.norm() <= 1e-16 * w.norm().max(1.0) {
                break;
            }
        }
        for &i in &g {
            z[i] = w;
        }
    }
}

fn clusters(roots: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while l[i] != i {
            l[i] = l[l[i]];
            i = l[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut label, i);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(Vec::new());
        }
        out[slot[r]].push(i);
    }
    out
}

/// Each root replaced by the centroid of its cluster (multiplicities kept).
pub fn cluster_centroids(roots: &[Complex64], radius: f64) -> Vec<Complex64> {
    let mut out = roots.to_vec();
    for g in clusters(roots, radius) {
        let c = g.iter().map(|&i| roots[i]).sum::<Complex64>() / g.len() as f64;
        for i in g {
            out[i] = c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(rs: &[Complex64]) -> Vec<Complex64> {
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for a in rs {
            let mut next = p.clone();
            next.push(Complex64::new(0.0, 0.0));
            for (i, c) in p.iter().enumerate() {
                next[i + 1] -= a * c;
            }
            p = next;
        }
        p
    }

    #[test]
    fn recovers_known_roots() {
        let rs = [Complex64::from_polar(2f64.sqrt(), 0.3), Complex64::from_polar(2f64.sqrt(), -2.0), Complex64::new(-1.0, 0.0)];
        let got = durand_kerner(&from_roots(&rs), 2).unwrap();
        for a in rs {
            assert!(got.roots.iter().any(|b| (a - b).norm() < 1e-10));
        }
    }

    #[test]
    fn repeated_roots_converge_by_residual() {
        let a = Complex64::new(1.0, 0.0);
        let rs = [a, a, Complex64::new(0.0, 3f64.sqrt())];
        let got = durand_kerner(&from_roots(&rs), 3).unwrap();
        let c = cluster_centroids(&got.roots, 1e-4);
        assert!(c.iter().filter(|z| (*z - a).norm() < 1e-12).count() == 2);
        let ps: Complex64 = got.roots.iter().map(|z| z.powu(9)).sum();
        let exact: Complex64 = rs.iter().map(|z| z.powu(9)).sum();
        assert!((ps - exact).norm() < 1e-10);
    }
}
