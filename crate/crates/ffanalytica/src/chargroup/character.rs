use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rot::{gcd, lcm, Rot};
use super::{unit_group, UnitGroup};
use crate::error::{usage, Result};
use crate::gf::{Field, FieldSpec};
use crate::poly::{q_pow, Poly};

/// A character of (F_q[t]/Q)^×, extended by zero off the units.
#[derive(Debug, Clone)]
pub struct DirichletChar {
    group: Arc<UnitGroup>,
    exponents: Vec<u32>,
    // e_i · (exponent / n_i), so χ(unit) = e(Σ w_i a_i / exponent)
    weights: Vec<u64>,
}

impl PartialEq for DirichletChar {
    fn eq(&self, o: &Self) -> bool {
        self.group.modulus() == o.group.modulus() && self.exponents == o.exponents
    }
}

impl Eq for DirichletChar {}

impl DirichletChar {
    pub fn new(group: Arc<UnitGroup>, exponents: Vec<u32>) -> Result<DirichletChar> {
        if exponents.len() != group.rank() || exponents.iter().zip(group.orders()).any(|(&e, &n)| e >= n) {
            return usage(format!("exponents {exponents:?} do not fit orders {:?}", group.orders()));
        }
        let l = group.exponent() as u64;
        let weights = exponents.iter().zip(group.orders()).map(|(&e, &n)| e as u64 * (l / n as u64)).collect();
        Ok(DirichletChar { group, exponents, weights })
    }

    pub fn principal(group: Arc<UnitGroup>) -> DirichletChar {
        let r = group.rank();
        DirichletChar::new(group, vec![0; r]).expect("zero exponents fit")
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn modulus(&self) -> &Poly {
        self.group.modulus()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Denominator of the value rotations (the group exponent).
    pub fn denominator(&self) -> u32 {
        self.group.exponent()
    }

    /// Rotation numerator at the unit with mixed-radix index r.
    #[inline]
    pub fn rot_at(&self, mut r: u32) -> u32 {
        let l = self.group.exponent() as u64;
        let mut acc = 0u64;
        for (&w, &n) in self.weights.iter().zip(self.group.orders()) {
            acc += w * (r % n) as u64;
            r /= n;
        }
        (acc % l) as u32
    }

    /// Numerators over every unit in radix order.
    pub fn table(&self) -> Vec<u32> {
        (0..self.group.phi() as u32).map(|r| self.rot_at(r)).collect()
    }

    pub fn value_rot(&self, g: &Poly) -> Option<Rot> {
        self.group.dlog(g).map(|r| Rot::new(self.rot_at(r) as u64, self.denominator()))
    }

    pub fn value(&self, g: &Poly) -> Complex64 {
        self.value_rot(g).map_or(Complex64::new(0.0, 0.0), Rot::to_complex)
    }

    /// Smallest d with χ^d principal.
    pub fn order(&self) -> u32 {
        let l = self.denominator() as u64;
        let g = self.weights.iter().fold(l, |a, &w| gcd(a, w % l));
        (l / g) as u32
    }

    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }

    pub fn conj(&self) -> DirichletChar {
        let e = self.exponents.iter().zip(self.group.orders()).map(|(&e, &n)| (n - e) % n).collect();
        DirichletChar::new(self.group.clone(), e).expect("negated exponents fit")
    }

    pub fn mul(&self, o: &DirichletChar) -> Result<DirichletChar> {
        if self.modulus() != o.modulus() || self.group.field().id() != o.group.field().id() {
            return usage("characters to different moduli");
        }
        let e = self.exponents.iter().zip(&o.exponents).zip(self.group.orders()).map(|((&a, &b), &n)| (a + b) % n).collect();
        DirichletChar::new(self.group.clone(), e)
    }

    /// χ is trivial on units ≡ 1 mod D, for a divisor D of the modulus.
    fn defined_mod(&self, d: &Poly) -> bool {
        let f = self.group.field();
        let q = f.q();
        let m = self.modulus();
        let span = m.degree() - d.degree();
        let count = q_pow(q, span).expect("span below the residue budget");
        (0..count).all(|k| {
            let u = Poly::one().add(&d.mul(&Poly::from_residue_index(q, k), f), f);
            self.group.dlog(&u).is_none_or(|r| self.rot_at(r) == 0)
        })
    }

    /// The modulus of the primitive character inducing χ.
    pub fn conductor(&self) -> Poly {
        let f = self.group.field().clone();
        let mut cur = self.modulus().clone();
        for (p, e) in self.group.factors() {
            for _ in 0..*e {
                let cand = cur.div_exact(p, &f);
                if !self.defined_mod(&cand) {
                    break;
                }
                cur = cand;
            }
        }
        cur
    }

    pub fn conductor_degree(&self) -> usize {
        self.conductor().degree()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == *self.modulus()
    }
}

fn lex_vectors(orders: &[u32], fixed_zero: &[bool]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut v = vec![0u32; orders.len()];
    loop {
        out.push(v.clone());
        // odometer, last coordinate fastest
        let mut i = orders.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if fixed_zero[i] {
                continue;
            }
            v[i] += 1;
            if v[i] < orders[i] {
                break;
            }
            v[i] = 0;
        }
    }
}

/// All φ(Q) characters, principal first, then lexicographic in the exponents.
pub fn characters(group: &Arc<UnitGroup>) -> Vec<DirichletChar> {
    lex_vectors(group.orders(), &vec![false; group.rank()])
        .into_iter()
        .map(|e| DirichletChar::new(group.clone(), e).expect("odometer stays in range"))
        .collect()
}

/// Σ_{j=0}^{ν} g_{N-j} t^j for G of degree N, missing coefficients read as 0.
pub fn top_coefficients(g: &Poly, nu: usize) -> Poly {
    let n = g.degree();
    Poly::new((0..=nu).map(|j| if j <= n { g.coeff(n - j) } else { 0 }).collect())
}

/// ξ(G) = χ(top ν+1 coefficients of G read upward) for χ mod t^{ν+1} trivial on
/// constants. On G coprime to t this is χ(G*), and ξ(t) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortChar {
    nu: usize,
    base: DirichletChar,
}

impl ShortChar {
    pub fn new(base: DirichletChar) -> Result<ShortChar> {
        let m = base.modulus();
        let nu = m.degree().checked_sub(1).filter(|_| *m == Poly::monomial(1, m.degree()));
        let Some(nu) = nu else {
            return usage(format!("short characters come from moduli t^(ν+1), got {m}"));
        };
        let g = base.group();
        if (0..g.rank()).any(|i| g.is_cyclic_generator(i) && base.exponents()[i] != 0) {
            return usage("short interval characters are trivial on constants");
        }
        Ok(ShortChar { nu, base })
    }

    pub fn trivial(f: &Field) -> ShortChar {
        let g = unit_group(&Poly::t(), f).expect("t has a unit group");
        ShortChar { nu: 0, base: DirichletChar::principal(g) }
    }

    /// The declared ν (values depend on ν+1 top coefficients).
    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn base(&self) -> &DirichletChar {
        &self.base
    }

    pub fn is_trivial(&self) -> bool {
        self.base.is_principal()
    }

    /// Smallest ℓ with ξ depending only on the top ℓ+1 coefficients.
    pub fn length(&self) -> usize {
        self.base.conductor_degree().saturating_sub(1)
    }

    /// Radix index of the class of G in the base group.
    pub fn class_of(&self, g: &Poly) -> Option<u32> {
        if g.is_zero() {
            return None;
        }
        self.base.group().dlog(&top_coefficients(g, self.nu))
    }

    pub fn value_rot(&self, g: &Poly) -> Option<Rot> {
        self.class_of(g).map(|r| Rot::new(self.base.rot_at(r) as u64, self.base.denominator()))
    }

    pub fn value(&self, g: &Poly) -> Complex64 {
        self.value_rot(g).map_or(Complex64::new(0.0, 0.0), Rot::to_complex)
    }

    pub fn conj(&self) -> ShortChar {
        ShortChar { nu: self.nu, base: self.base.conj() }
    }

    pub fn mul(&self, o: &ShortChar) -> Result<ShortChar> {
        Ok(ShortChar { nu: self.nu, base: self.base.mul(&o.base)? })
    }
}

/// The q^ν characters of length ≤ ν, trivial first then lexicographic.
pub fn short_chars(nu: usize, f: &Field) -> Result<Vec<ShortChar>> {
    let g = unit_group(&Poly::monomial(1, nu + 1), f)?;
    let fixed: Vec<bool> = (0..g.rank()).map(|i| g.is_cyclic_generator(i)).collect();
    Ok(lex_vectors(g.orders(), &fixed)
        .into_iter()
        .map(|e| ShortChar { nu, base: DirichletChar::new(g.clone(), e).expect("odometer stays in range") })
        .collect())
}

/// Serialized form of a Hayes character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharRecord {
    pub modulus: String,
    pub exponents: Vec<u32>,
    pub nu: usize,
    #[serde(default)]
    pub short_exponents: Vec<u32>,
}

/// χ̃ = ψ ξ with ψ mod M and ξ short of declared length ν.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HayesChar {
    dir: DirichletChar,
    short: ShortChar,
}

impl HayesChar {
    pub fn new(dir: DirichletChar, short: ShortChar) -> Result<HayesChar> {
        if dir.group().field().id() != short.base().group().field().id() {
            return usage("Hayes character parts over different fields");
        }
        Ok(HayesChar { dir, short })
    }

    pub fn principal(f: &Field) -> HayesChar {
        let g = unit_group(&Poly::one(), f).expect("trivial group");
        HayesChar { dir: DirichletChar::principal(g), short: ShortChar::trivial(f) }
    }

    pub fn from_dirichlet(dir: DirichletChar) -> HayesChar {
        let short = ShortChar::trivial(dir.group().field());
        HayesChar { dir, short }
    }

    pub fn from_short(short: ShortChar) -> HayesChar {
        let g = unit_group(&Poly::one(), short.base().group().field()).expect("trivial group");
        HayesChar { dir: DirichletChar::principal(g), short }
    }

    pub fn dirichlet(&self) -> &DirichletChar {
        &self.dir
    }

    pub fn short(&self) -> &ShortChar {
        &self.short
    }

    pub fn field(&self) -> &Field {
        self.dir.group().field()
    }

    pub fn modulus(&self) -> &Poly {
        self.dir.modulus()
    }

    /// deg M + len ξ; bounds the degree of the L-polynomial.
    pub fn cond_h(&self) -> usize {
        self.modulus().degree() + self.short.length()
    }

    /// deg Q' + len ξ with Q' the conductor of the Dirichlet part.
    pub fn cond_h_inducing(&self) -> usize {
        self.dir.conductor_degree() + self.short.length()
    }

    pub fn is_principal(&self) -> bool {
        self.dir.is_principal() && self.short.is_trivial()
    }

    /// Non-principal in the sense "some part is non-trivial".
    pub fn nonprincipal_by_parts(&self) -> bool {
        !self.is_principal()
    }

    /// Non-principal in the sense cond_H > 1, with the inducing conductor.
    pub fn nonprincipal_by_cond(&self) -> bool {
        self.cond_h_inducing() > 1
    }

    pub fn value_rot(&self, g: &Poly) -> Option<Rot> {
        Some(self.dir.value_rot(g)?.mul(self.short.value_rot(g)?))
    }

    pub fn value(&self, g: &Poly) -> Complex64 {
        self.value_rot(g).map_or(Complex64::new(0.0, 0.0), Rot::to_complex)
    }

    /// Common denominator of every value.
    pub fn denominator(&self) -> u32 {
        lcm(self.dir.denominator() as u64, self.short.base().denominator() as u64) as u32
    }

    pub fn conj(&self) -> HayesChar {
        HayesChar { dir: self.dir.conj(), short: self.short.conj() }
    }

    pub fn record(&self) -> CharRecord {
        CharRecord {
            modulus: self.modulus().to_string(),
            exponents: self.dir.exponents().to_vec(),
            nu: self.short.nu(),
            short_exponents: self.short.base().exponents().to_vec(),
        }
    }

    pub fn from_record(rec: &CharRecord, f: &Field) -> Result<HayesChar> {
        let m = Poly::parse(&rec.modulus, f)?;
        let dir = DirichletChar::new(unit_group(&m, f)?, rec.exponents.clone())?;
        let sg = unit_group(&Poly::monomial(1, rec.nu + 1), f)?;
        let se = if rec.short_exponents.is_empty() { vec![0; sg.rank()] } else { rec.short_exponents.clone() };
        let short = ShortChar::new(DirichletChar::new(sg, se)?)?;
        HayesChar::new(dir, short)
    }
}

impl std::fmt::Display for HayesChar {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "[{}; {:?}; nu={}; {:?}]", self.modulus(), self.dir.exponents(), self.short.nu(), self.short.base().exponents())
    }
}

/// A ≡ B mod R_{M,ν}: same class mod M and the same ν+1 leading coefficients.
pub fn hayes_equiv(a: &Poly, b: &Poly, m: &Poly, nu: usize, f: &FieldSpec) -> Result<bool> {
    if !a.is_monic() || !b.is_monic() {
        return usage("hayes_equiv compares monic polynomials");
    }
    Ok(a.rem(m, f) == b.rem(m, f) && top_coefficients(a, nu) == top_coefficients(b, nu))
}
