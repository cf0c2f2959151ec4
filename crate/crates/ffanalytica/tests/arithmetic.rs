use ffanalytica::gf::FieldSpec;
use ffanalytica::poly::{
    count_irreducibles, count_smooth, factor, factor_direct, is_irreducible, moebius, monic_offset, FactorSieve, Monics,
    Poly,
};
use proptest::prelude::*;

// trial division by monics in increasing degree, independent of the library factoring
fn naive_factor(g: &Poly, f: &FieldSpec) -> Vec<(Poly, u32)> {
    let q = f.q();
    let mut rest = g.make_monic(f);
    let mut out = Vec::new();
    let mut d = 1;
    while rest.degree() >= 2 * d {
        for cand in Monics::new(q, d).unwrap() {
            let mut e = 0;
            while cand.divides(&rest, f) {
                rest = rest.div_exact(&cand, f);
                e += 1;
            }
            if e > 0 {
                out.push((cand, e));
            }
        }
        d += 1;
    }
    if rest.degree() > 0 {
        out.push((rest, 1));
    }
    out.sort_by_key(|(p, _)| p.global_index(q));
    out
}

fn naive_mu(g: &Poly, f: &FieldSpec) -> i32 {
    let fs = naive_factor(g, f);
    if fs.iter().any(|&(_, e)| e > 1) {
        0
    } else if fs.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[test]
fn irreducible_counts_match_trial_division() {
    for (q, top) in [(2u32, 9usize), (3, 6), (4, 4), (5, 4)] {
        let f = FieldSpec::new(q).unwrap();
        for d in 1..=top {
            let brute = Monics::new(q, d).unwrap().filter(|g| naive_factor(g, &f) == vec![(g.clone(), 1)]).count();
            assert_eq!(count_irreducibles(q, d).unwrap(), brute as u128, "q = {q}, d = {d}");
        }
    }
}

#[test]
fn sieve_agrees_with_direct_factoring() {
    for q in [2u32, 3, 4] {
        let f = FieldSpec::new(q).unwrap();
        let s = FactorSieve::new(&f, 6).unwrap();
        for g in (1..monic_offset(q, 7)).step_by(7).map(|i| Poly::from_global_index(q, i)) {
            let a = factor(&g, &f, Some(&s)).unwrap();
            let b = factor_direct(&g, &f).unwrap();
            assert_eq!(a.factors, b.factors, "{g}");
            assert_eq!(a.reconstruct(&f), g);
        }
    }
}

#[test]
fn moebius_sums_vanish_by_degree() {
    // Σ_{deg G = N} μ(G) is 1, −q, 0, 0, ... for N = 0, 1, 2, ...
    for q in [2u32, 3, 5] {
        let f = FieldSpec::new(q).unwrap();
        let s = FactorSieve::with_default_bound(&f).unwrap();
        for n in 0..=5 {
            let sum: i64 = Monics::new(q, n).unwrap().map(|g| moebius(&g, &f, Some(&s)).unwrap() as i64).sum();
            let want = match n {
                0 => 1,
                1 => -(q as i64),
                _ => 0,
            };
            assert_eq!(sum, want, "q = {q}, N = {n}");
        }
    }
}

#[test]
fn smooth_counts_match_naive_factoring() {
    let f = FieldSpec::new(2).unwrap();
    for n in 1..=10 {
        for m in 1..=n {
            let brute = Monics::new(2, n).unwrap().filter(|g| naive_factor(g, &f).iter().all(|(p, _)| p.degree() <= m)).count();
            assert_eq!(count_smooth(2, n, m).unwrap(), brute as u128, "N = {n}, M = {m}");
        }
    }
}

fn poly_strategy(q: u32, max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..q, 0..max_len).prop_map(Poly::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn division_identity(a in poly_strategy(4, 12), b in poly_strategy(4, 7)) {
        let f = FieldSpec::new(4).unwrap();
        prop_assume!(!b.is_zero());
        let (quo, r) = a.divrem(&b, &f);
        prop_assert_eq!(quo.mul(&b, &f).add(&r, &f), a);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
    }

    #[test]
    fn gcd_divides_and_bezout_inverse(a in poly_strategy(3, 9), m in poly_strategy(3, 7)) {
        let f = FieldSpec::new(3).unwrap();
        prop_assume!(!m.is_zero() && m.degree() > 0);
        let g = a.gcd(&m, &f);
        prop_assert!(g.divides(&a, &f) && g.divides(&m, &f));
        match a.inverse_mod(&m, &f) {
            Some(inv) => prop_assert!(a.mulmod(&inv, &m, &f).is_one()),
            None => prop_assert!(!g.is_one()),
        }
    }

    #[test]
    fn global_index_round_trip(g in 0u64..100_000, q in prop::sample::select(vec![2u32, 3, 4, 5, 7, 9])) {
        let p = Poly::from_global_index(q, g);
        prop_assert!(p.is_monic());
        prop_assert_eq!(p.global_index(q), g);
    }

    #[test]
    fn factoring_and_moebius_match_trial_division(idx in 1u64..2000) {
        let f = FieldSpec::new(3).unwrap();
        let g = Poly::from_global_index(3, idx);
        let fz = factor_direct(&g, &f).unwrap();
        prop_assert_eq!(fz.factors.clone(), naive_factor(&g, &f));
        prop_assert_eq!(moebius(&g, &f, None).unwrap(), naive_mu(&g, &f));
        prop_assert_eq!(is_irreducible(&g, &f).unwrap(), fz.factors.len() == 1 && fz.factors[0].1 == 1);
    }

    #[test]
    fn field_axioms(a in 0u32..9, b in 0u32..9, c in 0u32..9) {
        let f = FieldSpec::new(9).unwrap();
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.sub(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        // Frobenius is additive
        prop_assert_eq!(f.pow(f.add(a, b), 3), f.add(f.pow(a, 3), f.pow(b, 3)));
    }
}
