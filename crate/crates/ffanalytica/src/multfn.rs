//! Bounded multiplicative functions on monic polynomials.
//!
//! A [`MultFn`] is an immutable rule. Point evaluation factors its argument
//! (through the sieve when one covers it); tabulation over every monic of
//! degree ≤ N is the fast path used by the statistics.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chargroup::{DirichletChar, HayesChar, Rot};
use crate::error::{capacity, domain, usage, Result};
use crate::gf::FieldSpec;
use crate::poly::{factor, monic_offset, FactorSieve, Factorization, Poly};

/// Largest table (entries) [`MultFn::table`] will allocate.
pub const MAX_TABLE: u64 = 1 << 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A value known exactly: zero or a root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exact {
    Zero,
    Root(Rot),
}

impl Exact {
    pub fn mul(self, o: Exact) -> Exact {
        match (self, o) {
            (Exact::Root(a), Exact::Root(b)) => Exact::Root(a.mul(b).reduced()),
            _ => Exact::Zero,
        }
    }

    pub fn conj(self) -> Exact {
        match self {
            Exact::Root(a) => Exact::Root(a.conj()),
            z => z,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Exact::Zero => ZERO,
            Exact::Root(r) => r.to_complex(),
        }
    }

    fn sign(neg: bool) -> Exact {
        Exact::Root(if neg { Rot { k: 1, n: 2 } } else { Rot::ONE })
    }
}

/// The frequency θ of e_θ(G) = e(θ deg G), exact when it is a small rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta {
    Rational(Rot),
    Real(f64),
}

impl Theta {
    /// Denominators searched when recognising a rational θ.
    const MAX_DEN: u32 = 1 << 12;

    pub fn new(theta: f64) -> Theta {
        let x = theta.rem_euclid(1.0);
        for d in 1..=Self::MAX_DEN {
            let k = (x * d as f64).round();
            if k / d as f64 == x {
                return Theta::Rational(Rot::new(k as u64, d).reduced());
            }
        }
        Theta::Real(x)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Theta::Rational(r) => r.k as f64 / r.n as f64,
            Theta::Real(x) => x,
        }
    }

    pub fn exact(self, deg: usize) -> Option<Rot> {
        match self {
            Theta::Rational(r) => Some(r.pow(deg as u64).reduced()),
            Theta::Real(_) => None,
        }
    }

    pub fn value(self, deg: usize) -> Complex64 {
        match self {
            Theta::Rational(r) => r.pow(deg as u64).to_complex(),
            Theta::Real(x) => Complex64::from_polar(1.0, TAU * (x * deg as f64).rem_euclid(1.0)),
        }
    }
}

/// How G ↦ f(G*) treats arguments with G(0) ≠ 1.
#[derive(Debug, Clone, PartialEq)]
pub enum InvolutionMode {
    /// f*(G) = f(G*) when G(0) = 1, else 0.
    Strict,
    /// f*(G) = χ(c) f(G*/c) with c = G(0) ≠ 0, and f*(G) = 0 when t | G.
    /// `units[c]` holds χ(c); index 0 is unused.
    UnitExtended(Vec<Exact>),
}

impl InvolutionMode {
    /// Unit extension through the values of a Dirichlet character on constants.
    pub fn from_character(chi: &DirichletChar) -> InvolutionMode {
        let q = chi.group().field().q();
        let mut units = vec![Exact::Zero];
        units.extend((1..q).map(|c| chi.value_rot(&Poly::constant(c)).map_or(Exact::Zero, |r| Exact::Root(r.reduced()))));
        InvolutionMode::UnitExtended(units)
    }

    pub fn trivial_units(q: u32) -> InvolutionMode {
        let mut units = vec![Exact::Zero];
        units.extend((1..q).map(|_| Exact::Root(Rot::ONE)));
        InvolutionMode::UnitExtended(units)
    }
}

type PrimePowerRule = Arc<dyn Fn(&Poly, u32) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Rule {
    One,
    Moebius,
    Liouville,
    /// f(P^e) uniform on the circle, drawn per (P, e), or per P and powered
    Random { seed: u64, complete: bool },
    Custom { rule: PrimePowerRule, complete: bool },
    Character(HayesChar),
    /// χ* for χ mod t^k: χ*(G) = χ(G*) on (G, t) = 1 and χ*(t) = 1
    Star(DirichletChar),
    Arch(Theta),
    Product(Vec<MultFn>),
    Conj(MultFn),
    Involute(MultFn, InvolutionMode),
}

/// A multiplicative function 𝓜 → 𝕌, or an evaluator built from one.
#[derive(Clone)]
pub struct MultFn {
    rule: Arc<Rule>,
    name: String,
}

impl fmt::Debug for MultFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultFn({})", self.name)
    }
}

impl fmt::Display for MultFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl MultFn {
    fn from_rule(rule: Rule, name: String) -> MultFn {
        MultFn { rule: Arc::new(rule), name }
    }

    pub fn one() -> MultFn {
        MultFn::from_rule(Rule::One, "one".into())
    }

    pub fn moebius() -> MultFn {
        MultFn::from_rule(Rule::Moebius, "mu".into())
    }

    pub fn liouville() -> MultFn {
        MultFn::from_rule(Rule::Liouville, "lambda".into())
    }

    /// Independent uniform values on every prime power.
    pub fn random(seed: u64) -> MultFn {
        MultFn::from_rule(Rule::Random { seed, complete: false }, format!("random:{seed}"))
    }

    /// Uniform values on primes, extended completely multiplicatively.
    pub fn random_complete(seed: u64) -> MultFn {
        MultFn::from_rule(Rule::Random { seed, complete: true }, format!("crandom:{seed}"))
    }

    /// User values on prime powers. The rule must return points of 𝕌; with
    /// `complete` only e = 1 is queried.
    pub fn from_prime_powers(
        name: &str,
        complete: bool,
        rule: impl Fn(&Poly, u32) -> Complex64 + Send + Sync + 'static,
    ) -> MultFn {
        MultFn::from_rule(Rule::Custom { rule: Arc::new(rule), complete }, name.into())
    }

    pub fn character(chi: &HayesChar) -> MultFn {
        MultFn::from_rule(Rule::Character(chi.clone()), format!("chi{chi}"))
    }

    pub fn dirichlet(chi: &DirichletChar) -> MultFn {
        MultFn::character(&HayesChar::from_dirichlet(chi.clone()))
    }

    pub fn star(chi: &DirichletChar) -> Result<MultFn> {
        let m = chi.modulus();
        if *m != Poly::monomial(1, m.degree()) {
            return usage(format!("χ* needs a character modulo a power of t, got modulus {m}"));
        }
        Ok(MultFn::from_rule(Rule::Star(chi.clone()), format!("star({m};{:?})", chi.exponents())))
    }

    pub fn arch(theta: f64) -> MultFn {
        let t = Theta::new(theta);
        MultFn::from_rule(Rule::Arch(t), format!("e[{}]", t.as_f64()))
    }

    pub fn mul(&self, o: &MultFn) -> MultFn {
        let mut parts = Vec::new();
        for g in [self, o] {
            match &*g.rule {
                Rule::Product(ps) => parts.extend(ps.iter().cloned()),
                Rule::One => {}
                _ => parts.push(g.clone()),
            }
        }
        let name = format!("{}*{}", self.name, o.name);
        if parts.is_empty() {
            return MultFn::one();
        }
        MultFn::from_rule(Rule::Product(parts), name)
    }

    pub fn conj(&self) -> MultFn {
        MultFn::from_rule(Rule::Conj(self.clone()), format!("conj({})", self.name))
    }

    /// G ↦ f(G) χ̃(G) e(θ deg G).
    pub fn twist(&self, chi: &HayesChar, theta: f64) -> MultFn {
        let mut out = self.clone();
        if !chi.is_principal() {
            out = out.mul(&MultFn::character(chi));
        }
        if theta.rem_euclid(1.0) != 0.0 {
            out = out.mul(&MultFn::arch(theta));
        }
        out.name = format!("twist({},{},{})", self.name, chi, theta);
        out
    }

    /// G ↦ f(G*), see [`InvolutionMode`].
    pub fn involute(&self, mode: InvolutionMode) -> MultFn {
        let tag = if mode == InvolutionMode::Strict { "strict" } else { "unit" };
        MultFn::from_rule(Rule::Involute(self.clone(), mode), format!("inv[{tag}]({})", self.name))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// f(GH) = f(G) f(H) for all G, H.
    pub fn is_completely_multiplicative(&self) -> bool {
        match &*self.rule {
            Rule::One | Rule::Liouville | Rule::Character(_) | Rule::Star(_) | Rule::Arch(_) => true,
            Rule::Moebius => false,
            Rule::Random { complete, .. } | Rule::Custom { complete, .. } => *complete,
            Rule::Product(ps) => ps.iter().all(MultFn::is_completely_multiplicative),
            Rule::Conj(g) => g.is_completely_multiplicative(),
            Rule::Involute(g, mode) => *mode != InvolutionMode::Strict && g.is_completely_multiplicative(),
        }
    }

    fn prime_power(&self, p: &Poly, e: u32, q: u32) -> Complex64 {
        match &*self.rule {
            Rule::Moebius => {
                if e == 1 {
                    -ONE
                } else {
                    ZERO
                }
            }
            Rule::Liouville => {
                if e % 2 == 1 {
                    -ONE
                } else {
                    ONE
                }
            }
            Rule::Random { seed, complete } => {
                let draw = |e: u32| {
                    let mut key = [0u8; 32];
                    key[..8].copy_from_slice(&seed.to_le_bytes());
                    key[8..16].copy_from_slice(&p.global_index(q).to_le_bytes());
                    key[16..20].copy_from_slice(&e.to_le_bytes());
                    let x: f64 = ChaCha8Rng::from_seed(key).gen();
                    Complex64::from_polar(1.0, TAU * x)
                };
                if *complete {
                    draw(1).powu(e)
                } else {
                    draw(e)
                }
            }
            Rule::Custom { rule, complete } => {
                if *complete {
                    rule(p, 1).powu(e)
                } else {
                    rule(p, e)
                }
            }
            _ => unreachable!("only factorization rules have prime-power tables"),
        }
    }

    fn needs_factorization(&self) -> bool {
        matches!(&*self.rule, Rule::Moebius | Rule::Liouville | Rule::Random { .. } | Rule::Custom { .. })
    }

    /// f(G) for a monic G.
    pub fn eval(&self, g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<Complex64> {
        if !g.is_monic() {
            return usage(format!("multiplicative functions are evaluated on monics, got {g}"));
        }
        let mut fac = None;
        self.eval_with(g, f, sieve, &mut fac)
    }

    fn eval_with(&self, g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>, fac: &mut Option<Factorization>) -> Result<Complex64> {
        Ok(match &*self.rule {
            Rule::One => ONE,
            Rule::Arch(t) => t.value(g.degree()),
            Rule::Character(chi) => chi.value(g),
            Rule::Star(chi) => star_value(chi, g).map_or(ZERO, Rot::to_complex),
            Rule::Product(ps) => {
                let mut v = ONE;
                for p in ps {
                    v *= p.eval_with(g, f, sieve, fac)?;
                }
                v
            }
            Rule::Conj(h) => h.eval_with(g, f, sieve, fac)?.conj(),
            Rule::Involute(h, mode) => match involute_arg(g, mode, f) {
                Some((unit, gs)) => unit.to_complex() * h.eval(&gs, f, sieve)?,
                None => ZERO,
            },
            _ => {
                if fac.is_none() {
                    *fac = Some(factor(g, f, sieve)?);
                }
                let q = f.q();
                fac.as_ref()
                    .expect("factored above")
                    .factors
                    .iter()
                    .fold(ONE, |acc, (p, e)| acc * self.prime_power(p, *e, q))
            }
        })
    }

    /// f(G) as an exact value, or None when the rule is not a root-of-unity rule.
    pub fn eval_exact(&self, g: &Poly, f: &FieldSpec, sieve: Option<&FactorSieve>) -> Result<Option<Exact>> {
        Ok(match &*self.rule {
            Rule::One => Some(Exact::Root(Rot::ONE)),
            Rule::Moebius => {
                let fac = factor(g, f, sieve)?;
                Some(if fac.is_squarefree() { Exact::sign(fac.omega() % 2 == 1) } else { Exact::Zero })
            }
            Rule::Liouville => Some(Exact::sign(factor(g, f, sieve)?.big_omega() % 2 == 1)),
            Rule::Random { .. } | Rule::Custom { .. } => None,
            Rule::Character(chi) => Some(chi.value_rot(g).map_or(Exact::Zero, |r| Exact::Root(r.reduced()))),
            Rule::Star(chi) => Some(star_value(chi, g).map_or(Exact::Zero, |r| Exact::Root(r.reduced()))),
            Rule::Arch(t) => t.exact(g.degree()).map(Exact::Root),
            Rule::Product(ps) => {
                let mut v = Exact::Root(Rot::ONE);
                for p in ps {
                    match p.eval_exact(g, f, sieve)? {
                        Some(x) => v = v.mul(x),
                        None => return Ok(None),
                    }
                }
                Some(v)
            }
            Rule::Conj(h) => h.eval_exact(g, f, sieve)?.map(Exact::conj),
            Rule::Involute(h, mode) => match involute_arg(g, mode, f) {
                Some((unit, gs)) => h.eval_exact(&gs, f, sieve)?.map(|v| unit.mul(v)),
                None => Some(Exact::Zero),
            },
        })
    }

    /// f on every monic of degree ≤ `max_deg`, indexed by global index.
    pub fn table(&self, f: &FieldSpec, max_deg: usize, sieve: Option<&FactorSieve>) -> Result<Vec<Complex64>> {
        let q = f.q();
        let total = monic_offset(q, max_deg + 1);
        if total > MAX_TABLE {
            return capacity(format!("table of {total} values over F_{q}[t] exceeds {MAX_TABLE}"));
        }
        let covered = sieve.filter(|s| s.bound() >= max_deg && s.q() == q);
        Ok(match &*self.rule {
            Rule::One => vec![ONE; total as usize],
            Rule::Arch(t) => (0..=max_deg)
                .flat_map(|d| std::iter::repeat_n(t.value(d), (monic_offset(q, d + 1) - monic_offset(q, d)) as usize))
                .collect(),
            Rule::Product(ps) => {
                let mut out = vec![ONE; total as usize];
                for p in ps {
                    let t = p.table(f, max_deg, sieve)?;
                    out.iter_mut().zip(t).for_each(|(a, b)| *a *= b);
                }
                out
            }
            Rule::Conj(h) => h.table(f, max_deg, sieve)?.into_iter().map(|z| z.conj()).collect(),
            Rule::Involute(h, mode) => {
                let inner = h.table(f, max_deg, sieve)?;
                crate::par::chunked_collect(0..total, crate::par::DEFAULT_CHUNK, |r| {
                    r.map(|gi| {
                        let g = Poly::from_global_index(q, gi);
                        match involute_arg(&g, mode, f) {
                            Some((unit, gs)) => unit.to_complex() * inner[gs.global_index(q) as usize],
                            None => ZERO,
                        }
                    })
                    .collect()
                })
            }
            _ if self.needs_factorization() && covered.is_some() => {
                let s = covered.expect("checked");
                let mut t = s.tabulate(ONE, |pg, e| self.prime_power(&Poly::from_global_index(q, pg), e, q));
                t.truncate(total as usize);
                t
            }
            _ => {
                let mut err = None;
                let out = crate::par::chunked_collect(0..total, crate::par::DEFAULT_CHUNK, |r| {
                    r.map(|gi| self.eval(&Poly::from_global_index(q, gi), f, sieve).map_err(|e| e.to_string()))
                        .map(|v| v.unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
                        .collect()
                });
                if out.iter().any(|z| z.re.is_nan()) {
                    err = Some("factorization failed while tabulating");
                }
                if let Some(e) = err {
                    return domain(e);
                }
                out
            }
        })
    }

    /// f(P) on the irreducibles of degree `d`, listed as (monic index, value).
    pub fn prime_values(&self, d: usize, f: &FieldSpec, sieve: &FactorSieve) -> Result<Vec<(u64, Complex64)>> {
        let q = f.q();
        let primes = sieve.primes_of_degree(d);
        let vals = crate::par::map_ordered(&primes, |&i| self.eval(&Poly::from_monic_index(q, d, i), f, Some(sieve)));
        primes.into_iter().zip(vals).map(|(i, v)| v.map(|v| (i, v))).collect()
    }
}

/// χ*(G) for χ mod t^k: strip powers of t (χ*(t) = 1), then χ(G*).
fn star_value(chi: &DirichletChar, g: &Poly) -> Option<Rot> {
    let a = g.t_valuation();
    let core = Poly::new(g.coeffs()[a..].to_vec());
    chi.value_rot(&core.involute())
}

/// The unit factor and monic argument that f is read at for f*(G).
fn involute_arg(g: &Poly, mode: &InvolutionMode, f: &FieldSpec) -> Option<(Exact, Poly)> {
    let c = g.constant_term();
    match mode {
        InvolutionMode::Strict => (c == 1).then(|| (Exact::Root(Rot::ONE), g.involute())),
        InvolutionMode::UnitExtended(units) => {
            if c == 0 {
                return None;
            }
            let gs = g.involute().scale(f.inv(c), f);
            Some((units[c as usize], gs))
        }
    }
}

/// The two sides of Ramaré's identity at one G.
#[derive(Debug, Clone, PartialEq)]
pub struct RamareCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// number of R | G with deg R in [P, Q]
    pub terms: usize,
    /// Σ of the weights 1/(1_{(R,M)=1} + ω_{[P,Q]}(M)) as a reduced fraction
    pub weight_sum: (u64, u64),
}

impl RamareCheck {
    pub fn exact(&self) -> bool {
        self.lhs == self.rhs && self.weight_sum == (1, 1)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    crate::chargroup::rot::gcd(a, b)
}

fn add_frac((a, b): (u64, u64), (c, d): (u64, u64)) -> (u64, u64) {
    let (n, m) = (a * d + c * b, b * d);
    let g = gcd(n, m).max(1);
    (n / g, m / g)
}

/// f(G) against Σ_{RM = G, deg R ∈ [P,Q]} f(RM) / (1_{(R,M)=1} + ω_{[P,Q]}(M)).
///
/// Weights are summed as exact fractions over each group of bitwise-equal term
/// values, so equality of the two sides is decided without rounding.
pub fn ramare_decomposition_check(
    fun: &MultFn,
    g: &Poly,
    p: usize,
    qq: usize,
    f: &FieldSpec,
    sieve: Option<&FactorSieve>,
) -> Result<RamareCheck> {
    if p > qq || p == 0 {
        return usage(format!("need 1 ≤ P ≤ Q, got [{p}, {qq}]"));
    }
    let fac = factor(g, f, sieve)?;
    let window = |d: usize| (p..=qq).contains(&d);
    let rs: Vec<&(Poly, u32)> = fac.factors.iter().filter(|(r, _)| window(r.degree())).collect();
    if rs.is_empty() {
        return domain(format!("{g} has no irreducible factor with degree in [{p}, {qq}]"));
    }
    let lhs = fun.eval(g, f, sieve)?;
    // (value bits, accumulated weight)
    let mut groups: Vec<(Complex64, (u64, u64))> = Vec::new();
    let mut total = (0u64, 1u64);
    for &(r, e) in &rs {
        let m = g.div_exact(r, f);
        let coprime = *e == 1;
        let omega_m = fac.factors.iter().filter(|(s, k)| window(s.degree()) && (s != r || *k > 1)).count() as u64;
        let w = (1u64, u64::from(coprime) + omega_m);
        total = add_frac(total, w);
        let v = fun.eval(&r.mul(&m, f), f, sieve)?;
        match groups.iter_mut().find(|(u, _)| u.re.to_bits() == v.re.to_bits() && u.im.to_bits() == v.im.to_bits()) {
            Some((_, acc)) => *acc = add_frac(*acc, w),
            None => groups.push((v, w)),
        }
    }
    let rhs = groups.iter().fold(ZERO, |acc, (v, (a, b))| acc + v * (*a as f64 / *b as f64));
    Ok(RamareCheck { lhs, rhs, terms: rs.len(), weight_sum: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chargroup::{characters, unit_group};
    use crate::gf::{Field, FieldSpec};
    use crate::poly::Monics;
    use proptest::prelude::*;

    fn field(q: u32) -> Field {
        FieldSpec::new(q).unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn builtin_values() {
        let f = field(2);
        let g = Poly::parse("t^3+t^2", &f).unwrap(); // t^2 (t+1)
        assert_eq!(MultFn::liouville().eval(&g, &f, None).unwrap(), -ONE);
        assert_eq!(MultFn::moebius().eval(&g, &f, None).unwrap(), ZERO);
        assert_eq!(MultFn::one().eval(&g, &f, None).unwrap(), ONE);
        let s = FactorSieve::new(&f, 6).unwrap();
        // t^2 (t+1)^2 is squarefull
        let sq = Poly::parse("t^4+t^2", &f).unwrap();
        assert_eq!(MultFn::moebius().eval(&sq, &f, Some(&s)).unwrap(), ZERO);
    }

    #[test]
    fn twists() {
        let f = field(3);
        let g = unit_group(&Poly::parse("t^2+1", &f).unwrap(), &f).unwrap();
        let chi = HayesChar::from_dirichlet(characters(&g)[3].clone());
        let mu = MultFn::moebius();
        let same = mu.twist(&HayesChar::principal(&f), 0.0);
        let tw = mu.twist(&chi, 0.0);
        let p = Poly::parse("t+1", &f).unwrap();
        assert_eq!(same.eval(&p, &f, None).unwrap(), -ONE);
        assert!(close(tw.eval(&p, &f, None).unwrap(), -chi.value(&p)));
        let e = MultFn::one().twist(&HayesChar::principal(&f), 0.25);
        for n in 0..5 {
            for m in Monics::new(3, n).unwrap() {
                assert!(close(e.eval(&m, &f, None).unwrap(), Theta::new(0.25).value(n)));
            }
        }
        assert_eq!(Theta::new(1.0 / 3.0), Theta::Rational(Rot { k: 1, n: 3 }));
    }

    #[test]
    fn involution_conventions() {
        let f = field(3);
        let lam = MultFn::liouville();
        let strict = lam.involute(InvolutionMode::Strict);
        assert_eq!(strict.eval(&Poly::t(), &f, None).unwrap(), ZERO);
        // palindromic with G(0) = 1
        let pal = Poly::parse("t^3+2*t^2+2*t+1", &f).unwrap();
        assert_eq!(strict.eval(&pal, &f, None).unwrap(), lam.eval(&pal, &f, None).unwrap());
        let unit = lam.involute(InvolutionMode::trivial_units(3));
        assert_eq!(unit.eval(&Poly::t(), &f, None).unwrap(), ZERO);
        // (fg)* = f* g* on G(0) = 1
        let g = MultFn::random(4);
        let prod = lam.mul(&g).involute(InvolutionMode::Strict);
        let gs = g.involute(InvolutionMode::Strict);
        for m in Monics::new(3, 4).unwrap().filter(|m| m.constant_term() == 1) {
            let a = prod.eval(&m, &f, None).unwrap();
            let b = strict.eval(&m, &f, None).unwrap() * gs.eval(&m, &f, None).unwrap();
            assert!(close(a, b));
        }
    }

    #[test]
    fn tables_agree_with_point_evaluation() {
        let f = field(3);
        let s = FactorSieve::new(&f, 5).unwrap();
        let g = unit_group(&Poly::parse("t^2", &f).unwrap(), &f).unwrap();
        let chi = HayesChar::from_dirichlet(characters(&g)[4].clone());
        let fns = [
            MultFn::moebius(),
            MultFn::random(9).twist(&chi, 0.3),
            MultFn::liouville().involute(InvolutionMode::from_character(chi.dirichlet())),
            MultFn::star(chi.dirichlet()).unwrap().conj(),
        ];
        for h in &fns {
            let with = h.table(&f, 5, Some(&s)).unwrap();
            let without = h.table(&f, 4, None).unwrap();
            for (gi, v) in with.iter().enumerate() {
                let p = Poly::from_global_index(3, gi as u64);
                let direct = h.eval(&p, &f, None).unwrap();
                assert!(close(*v, direct), "{h} at {p}");
                if gi < without.len() {
                    assert!(close(without[gi], direct));
                }
                if let Some(x) = h.eval_exact(&p, &f, None).unwrap() {
                    assert!(close(x.to_complex(), direct));
                }
            }
        }
    }

    #[test]
    fn ramare_examples() {
        let f = field(2);
        let r = Poly::parse("t^2+t+1", &f).unwrap();
        let c = ramare_decomposition_check(&MultFn::random(1), &r, 1, 3, &f, None).unwrap();
        assert!(c.exact() && c.terms == 1);
        let g = Poly::parse("t^3+t^2+t", &f).unwrap(); // t (t^2+t+1)
        let c = ramare_decomposition_check(&MultFn::moebius(), &g, 1, 2, &f, None).unwrap();
        assert_eq!((c.lhs, c.rhs, c.terms), (ONE, ONE, 2));
        let bad = Poly::parse("t^4+t^3+1", &f).unwrap();
        assert!(matches!(ramare_decomposition_check(&MultFn::one(), &bad, 1, 3, &f, None), Err(crate::Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn multiplicative_on_coprime_pairs(seed in 0u64..1000, a in 0u64..729, b in 0u64..243) {
            let f = field(3);
            let h = MultFn::random(seed);
            let (x, y) = (Poly::from_monic_index(3, 6, a), Poly::from_monic_index(3, 5, b));
            prop_assume!(x.gcd(&y, &f).is_one());
            let xy = x.mul(&y, &f);
            let lhs = h.eval(&xy, &f, None).unwrap();
            prop_assert!((lhs - h.eval(&x, &f, None).unwrap() * h.eval(&y, &f, None).unwrap()).norm() < 1e-12);
            prop_assert!(lhs.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn complete_functions_power_out(seed in 0u64..1000, a in 0u64..81) {
            let f = field(3);
            let h = MultFn::random_complete(seed);
            prop_assert!(h.is_completely_multiplicative());
            let x = Poly::from_monic_index(3, 4, a);
            let fac = factor(&x, &f, None).unwrap();
            let direct: Complex64 = fac.factors.iter().map(|(p, e)| h.eval(p, &f, None).unwrap().powu(*e)).product();
            prop_assert!((h.eval(&x, &f, None).unwrap() - direct).norm() < 1e-12);
        }
    }
}
