//! The acceptance suite. Each criterion is a self-contained check with its own
//! oracle; `verify` and the `acceptance` test target both run it.

use std::path::PathBuf;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use ffanalytica::analytics::{
    ap_variance, involution_bijection_check, katai_exact, log_correlation, log_correlation_exact, mr_variance,
    prime_additive_energy, type_one_check, Context, LaurentPoint, VarianceMode,
};
use ffanalytica::chargroup::{
    characters, l2_mean_value_trial, orthogonality_residues, short_chars, unit_group, HayesChar, Rot,
};
use ffanalytica::gf::{Field, FieldSpec};
use ffanalytica::lfun::{sweep, SweepConfig, SweepSummary};
use ffanalytica::multfn::{ramare_decomposition_check, Exact, MultFn};
use ffanalytica::poly::{
    count_irreducibles, count_smooth, dickman_rho, in_spq, is_irreducible, q_pow, FactorSieve, Monics, Poly,
};
use ffanalytica::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Cli, ExperimentConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {:>2} {:<34} {:>8.2}s  {}", self.id, self.name, self.seconds, self.detail)
    }
}

type Check = Result<(bool, String)>;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    run: fn(usize) -> Check,
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, name, run| Criterion { id, name, run };
    vec![
        c(1, "irreducible counts", irreducible_counts as fn(usize) -> Check),
        c(2, "Möbius sums vanish", moebius_sums),
        c(3, "Weil bound on inverse roots", weil_rh),
        c(4, "explicit formula", explicit_formula),
        c(5, "character-sum bound", char_sum_bound),
        c(6, "orthogonality relations", orthogonality),
        c(7, "progression variance identity", ap_identity),
        c(8, "short-interval variance fixtures", mr_fixtures),
        c(9, "real characters modulo t^k", real_characters),
        c(10, "two-point Chowla decay", chowla_decay),
        c(11, "short-character autocorrelation", short_autocorrelation),
        c(12, "Kátai exact vanishing", katai_vanishing),
        c(13, "type I identity", type_one),
        c(14, "involution bijection", bijection),
        c(15, "L² mean-value inequality", l2_mean_value),
        c(16, "Ramaré identity", ramare),
        c(17, "smooth counts against ρ", smooth_counts),
        c(18, "additive energy of irreducibles", additive_energy),
        c(19, "determinism across threads", determinism),
    ]
}

pub fn run_one(c: &Criterion, threads: usize) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match (c.run)(threads) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id: c.id, name: c.name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(threads: usize) -> Vec<Outcome> {
    criteria().iter().map(|c| run_one(c, threads)).collect()
}

fn field(q: u32) -> Result<Field> {
    Ok(FieldSpec::new(q)?)
}

fn poly(s: &str, f: &Field) -> Result<Poly> {
    Ok(Poly::parse(s, f)?)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    ffanalytica::par::with_threads(threads, f)
}

/// Values recorded by the first verified run live beside the crate sources.
fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

/// Compares against the archived fixture, archiving it when absent.
fn against_fixture(name: &str, current: &Value, close: impl Fn(&Value, &Value) -> bool) -> Result<(bool, &'static str)> {
    let path = fixture_path(name);
    match std::fs::read_to_string(&path) {
        Ok(s) => {
            let archived: Value = serde_json::from_str(&s)?;
            Ok((close(&archived, current), "fixture matched"))
        }
        Err(_) => {
            std::fs::create_dir_all(path.parent().expect("fixture directory"))?;
            std::fs::write(&path, serde_json::to_string_pretty(current)? + "\n")?;
            Ok((true, "fixture archived"))
        }
    }
}

fn floats_close(a: &Value, b: &Value, rel: f64) -> bool {
    match (a, b) {
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(u, v)| floats_close(u, v, rel)),
        (Value::Object(x), Value::Object(y)) => x.len() == y.len() && x.iter().all(|(k, u)| y.get(k).is_some_and(|v| floats_close(u, v, rel))),
        (Value::Number(x), Value::Number(y)) => {
            let (u, v) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            u == v || (u - v).abs() <= rel * u.abs().max(v.abs())
        }
        _ => a == b,
    }
}

fn gauss_count(q: u32, d: usize) -> u128 {
    // μ(e) on small integers by trial division
    let mu = |mut e: usize| -> i128 {
        let mut sign = 1;
        let mut p = 2;
        while p * p <= e {
            if e.is_multiple_of(p) {
                e /= p;
                if e.is_multiple_of(p) {
                    return 0;
                }
                sign = -sign;
            }
            p += 1;
        }
        if e > 1 {
            -sign
        } else {
            sign
        }
    };
    let total: i128 = (1..=d).filter(|e| d.is_multiple_of(*e)).map(|e| mu(e) * (q as i128).pow((d / e) as u32)).sum();
    (total / d as i128) as u128
}

fn irreducible_counts(_: usize) -> Check {
    let mut worst = String::new();
    for q in [2u32, 3, 4] {
        let f = field(q)?;
        for d in 1..=12 {
            let formula = count_irreducibles(q, d)?;
            if formula != gauss_count(q, d) {
                worst = format!("q={q} d={d}: {formula} vs Gauss {}", gauss_count(q, d));
            }
            if d <= 8 {
                let mut brute = 0u128;
                for g in Monics::new(q, d)? {
                    brute += u128::from(is_irreducible(&g, &f)?);
                }
                if brute != formula {
                    worst = format!("q={q} d={d}: {formula} vs brute force {brute}");
                }
            }
        }
    }
    Ok((worst.is_empty(), if worst.is_empty() { "q ∈ {2,3,4}: brute force d ≤ 8, Gauss d ≤ 12".into() } else { worst }))
}

fn moebius_sums(_: usize) -> Check {
    let mut bad = Vec::new();
    for q in [2u32, 3] {
        let f = field(q)?;
        let sieve = FactorSieve::new(&f, 14)?;
        let t = MultFn::moebius().table(&f, 14, Some(&sieve))?;
        for n in 2..=14 {
            let lo = ffanalytica::poly::monic_offset(q, n) as usize;
            let hi = ffanalytica::poly::monic_offset(q, n + 1) as usize;
            // values are 0, ±1, so the integer sum is exact
            let s: i64 = t[lo..hi].iter().map(|z| z.re as i64).sum();
            if s != 0 {
                bad.push(format!("q={q} N={n}: {s}"));
            }
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "exact zero for 2 ≤ N ≤ 14, q ∈ {2,3}".into() } else { bad.join("; ") }))
}

static SWEEPS: OnceLock<std::result::Result<Arc<Vec<SweepSummary>>, String>> = OnceLock::new();

/// One sweep per field shared by the L-function criteria.
fn sweeps() -> Result<Arc<Vec<SweepSummary>>> {
    SWEEPS
        .get_or_init(|| {
            let cfg = SweepConfig { cond_max: 6, lambda_max: 10, rh_tol: 1e-6, product_tol: 1e-8, explicit_tol: 1e-6, keep_polys: false };
            [2u32, 3]
                .iter()
                .map(|&q| {
                    let f = FieldSpec::new(q).map_err(|e| e.to_string())?;
                    sweep(&f, &cfg).map_err(|e| e.to_string())
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Arc::new)
        })
        .clone()
        .map_err(CliError::Usage)
}

fn weil_rh(_: usize) -> Check {
    let s = sweeps()?;
    let fails: usize = s.iter().map(|x| x.rh_failures + x.product_failures + x.numeric_failures).sum();
    let chars: usize = s.iter().map(|x| x.characters).sum();
    let dev = s.iter().map(|x| x.max_rh_deviation).fold(0.0, f64::max);
    let res = s.iter().map(|x| x.max_product_residual).fold(0.0, f64::max);
    Ok((fails == 0, format!("{chars} characters, max ||α|−{{1,√q}}| {dev:.2e}, max product residual {res:.2e}")))
}

fn explicit_formula(_: usize) -> Check {
    let s = sweeps()?;
    let fails: usize = s.iter().map(|x| x.explicit_failures).sum();
    let err = s.iter().map(|x| x.max_explicit_error).fold(0.0, f64::max);
    Ok((fails == 0, format!("N ≤ 10, max error {err:.2e}, failures {fails}")))
}

fn char_sum_bound(_: usize) -> Check {
    let s = sweeps()?;
    let bound: usize = s.iter().map(|x| x.bound_failures).sum();
    let sums: usize = s.iter().map(|x| x.sum_mismatches).sum();
    Ok((bound + sums == 0, format!("bound failures {bound}, exact coefficient mismatches {sums}")))
}

fn orthogonality(_: usize) -> Check {
    let mut worst: f64 = 0.0;
    let mut exact = true;
    let mut count = 0;
    for q in [2u32, 3] {
        let f = field(q)?;
        for m in ["t^2", "t^3", "t^2+t+1"] {
            for nu in 0..=3 {
                let r = orthogonality_residues(&poly(m, &f)?, nu, &f)?;
                worst = worst.max(r.max_deviation());
                exact &= r.exact;
                count += 1;
            }
        }
    }
    Ok((worst <= 1e-10 && exact, format!("{count} families, max deviation {worst:.2e}, exact sums {exact}")))
}

fn ap_identity(_: usize) -> Check {
    let f = field(2)?;
    let ctx = Context::new(&f)?;
    let mut worst: f64 = 0.0;
    for fun in [MultFn::moebius(), MultFn::random(7)] {
        for m in ["t^3", "t^3+t+1"] {
            let r = ap_variance(&ctx, &fun, 10, &poly(m, &f)?, None)?;
            worst = worst.max(r.rel_diff);
        }
    }
    Ok((worst <= 1e-9, format!("max relative difference {worst:.2e}")))
}

fn mr_values(threads: usize) -> Result<Vec<(usize, f64)>> {
    let f = field(3)?;
    let ctx = Context::new(&f)?;
    in_pool(threads, || {
        [2usize, 4, 6, 8, 12]
            .iter()
            .map(|&h| Ok((h, mr_variance(&ctx, &MultFn::moebius(), 12, h, &VarianceMode::LongMean)?.variance)))
            .collect()
    })
}

fn mr_fixtures(threads: usize) -> Check {
    let v = mr_values(threads)?;
    let decreasing = v[..4].windows(2).all(|w| w[1].1 < w[0].1);
    let zero = v[4].1 == 0.0;
    let cur = json!(v.iter().map(|(h, x)| json!({ "H": h, "variance": x })).collect::<Vec<_>>());
    let (fixture, how) = against_fixture("mr_variance_mu_q3_n12", &cur, |a, b| floats_close(a, b, 1e-12))?;
    let shown: Vec<String> = v.iter().map(|(h, x)| format!("H={h}:{x:.4e}")).collect();
    Ok((decreasing && zero && fixture, format!("{} decreasing={decreasing} V(N)=0:{zero} {how}", shown.join(" "))))
}

fn real_characters(_: usize) -> Check {
    let f2 = field(2)?;
    let g = unit_group(&poly("t^3", &f2)?, &f2)?;
    let q2 = characters(&g).iter().filter(|c| c.is_real() && !c.is_principal()).count();
    let f3 = field(3)?;
    let mut q3 = 0;
    for k in 2..=4 {
        let g = unit_group(&Poly::monomial(1, k), &f3)?;
        q3 += characters(&g).iter().filter(|c| c.is_real() && !c.is_principal() && c.is_primitive()).count();
    }
    Ok((q2 > 0 && q3 == 0, format!("q=2: {q2} real non-principal mod t^3; q=3: {q3} primitive real non-principal mod t^2..t^4")))
}

fn chowla_values(threads: usize) -> Result<(Complex64, Complex64)> {
    let f = field(2)?;
    let ctx = Context::new(&f)?;
    let mu = MultFn::moebius();
    in_pool(threads, || {
        let a = log_correlation(&ctx, &mu, &mu, &Poly::one(), 16)?.value;
        let b = log_correlation(&ctx, &mu, &mu, &Poly::one(), 6)?.value;
        Ok((a, b))
    })
}

fn chowla_decay(threads: usize) -> Check {
    let (a, b) = chowla_values(threads)?;
    let cur = json!({ "N16": [a.re, a.im], "N6": [b.re, b.im] });
    let (fixture, how) = against_fixture("chowla_mu_q2_b1", &cur, |x, y| floats_close(x, y, 1e-12))?;
    let ok = a.norm() <= 0.1 && a.norm() < b.norm();
    Ok((ok && fixture, format!("|c(16)| = {:.4e}, |c(6)| = {:.4e}, {how}", a.norm(), b.norm())))
}

fn short_autocorrelation(_: usize) -> Check {
    let n = 12;
    let mut fails = Vec::new();
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    for q in [2u32, 3] {
        let f = field(q)?;
        let ctx = Context::new(&f)?;
        for x in short_chars(2, &f)? {
            let nu = x.length();
            if !(1..=2).contains(&nu) {
                continue;
            }
            let xi = MultFn::character(&HayesChar::from_short(x.clone()));
            let Some(c) = log_correlation_exact(&ctx, &xi, &xi.conj(), &Poly::one(), n)? else {
                return Err(CliError::Usage("short characters take exact values".into()));
            };
            checked += 1;
            let margin = c.value().norm() - (1.0 - nu as f64 / n as f64);
            worst = worst.min(margin);
            if margin < -1e-12 {
                fails.push(format!("q={q} ν={nu}: {:.6}", c.value().norm()));
            }
        }
    }
    let head = format!("{checked} characters, min(|value| − (1 − ν/N)) = {worst:.4}");
    Ok((fails.is_empty(), if fails.is_empty() { head } else { format!("{head}; below: {}", fails.join(", ")) }))
}

fn katai_vanishing(_: usize) -> Check {
    let mut fails = Vec::new();
    let mut cases = 0;
    for (q, n) in [(2u32, 10usize), (3, 8)] {
        let f = field(q)?;
        let ctx = Context::new(&f)?;
        for x in short_chars(2, &f)? {
            let nu = x.length();
            for theta in [0.0, 1.0 / 3.0] {
                let fun = MultFn::character(&HayesChar::from_short(x.clone())).mul(&MultFn::arch(theta));
                for m in ["t", "t+1"] {
                    let m = poly(m, &f)?;
                    let Some(fm) = fun.eval_exact(&m, &f, ctx.sieve())? else {
                        return Err(CliError::Usage("ξ e_θ must be exact at rational θ".into()));
                    };
                    let z = Exact::Root(Rot { k: 1, n: 2 }).mul(fm);
                    let Some(k) = katai_exact(&ctx, &fun, &m, z, n)? else {
                        return Err(CliError::Usage("Kátai terms must be exact".into()));
                    };
                    cases += 1;
                    let stray: u64 = k.nonzero_by_degree.iter().enumerate().filter(|(d, _)| d + m.degree() > nu).map(|(_, c)| c).sum();
                    let cap = 2.0 * (q as f64).powi(nu as i32 + 1);
                    if stray != 0 || k.total > cap {
                        fails.push(format!("q={q} ν={nu} θ={theta:.3} Q={m}: {stray} nonzero, total {:.3}", k.total));
                    }
                }
            }
        }
    }
    Ok((fails.is_empty(), if fails.is_empty() { format!("{cases} cases exact") } else { fails.join("; ") }))
}

fn type_one(_: usize) -> Check {
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for q in [2u32, 3] {
        let f = field(q)?;
        for d in 0..=5 {
            for g in Monics::new(q, d)? {
                for ai in 0..q_pow(q, d)? {
                    let alpha = LaurentPoint::new(&Poly::from_residue_index(q, ai), &g, 11, &f)?;
                    for h in 1..=10 {
                        checked += 1;
                        if !type_one_check(&alpha, h, &f)?.exact && bad.len() < 5 {
                            bad.push(format!("q={q} α={alpha} H={h}"));
                        }
                    }
                }
            }
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { format!("{checked} (α, H) pairs exact") } else { bad.join("; ") }))
}

fn bijection(_: usize) -> Check {
    let f = field(2)?;
    let mut checked = 0;
    let mut bad = Vec::new();
    for g0 in Monics::new(2, 8)? {
        for h in 2..=7 {
            checked += 1;
            let r = involution_bijection_check(&g0, h, &f)?;
            if !r.holds() && bad.len() < 5 {
                bad.push(format!("G₀={g0} H={h}"));
            }
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { format!("{checked} (G₀, H) pairs") } else { bad.join("; ") }))
}

fn l2_mean_value(_: usize) -> Check {
    let f = field(2)?;
    let m = poly("t^3", &f)?;
    let len = q_pow(2, 6)? as usize;
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    for trial in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let coeffs: Vec<Complex64> = (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let (lhs, rhs) = l2_mean_value_trial(&m, 6, &coeffs, &f)?;
        worst = worst.max(lhs / rhs);
        fails += usize::from(lhs > rhs);
    }
    Ok((fails == 0, format!("1000 trials, max lhs/rhs {worst:.4}")))
}

fn ramare(_: usize) -> Check {
    let f = field(2)?;
    let sieve = FactorSieve::new(&f, 12)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut done, mut fails) = (0, Vec::new());
    while done < 1000 {
        let d = rng.gen_range(1..=12);
        let g = Poly::random_monic(&mut rng, 2, d);
        if !in_spq(&g, &[(1, 3)], &f, Some(&sieve))? {
            continue;
        }
        let seed = rng.gen::<u64>();
        let fun = if done % 2 == 0 { MultFn::random(seed) } else { MultFn::random_complete(seed) };
        let r = ramare_decomposition_check(&fun, &g, 1, 3, &f, Some(&sieve))?;
        if !r.exact() && fails.len() < 5 {
            fails.push(format!("G={g}"));
        }
        done += 1;
    }
    Ok((fails.is_empty(), if fails.is_empty() { "1000 instances exact".into() } else { fails.join("; ") }))
}

fn smooth_counts(_: usize) -> Check {
    let mut worst = (0.0, 0, 0);
    let mut fails = 0;
    let mut pairs = 0;
    for n in 1..=18usize {
        for m in 1..=n {
            let u = n as f64 / m as f64;
            if !(1.5..=3.0).contains(&u) {
                continue;
            }
            pairs += 1;
            let dens = count_smooth(2, n, m)? as f64 / 2f64.powi(n as i32);
            let rho = dickman_rho(u)?;
            let rel = (dens - rho).abs() / rho;
            if rel > 0.15 {
                fails += 1;
            }
            if rel > worst.0 {
                worst = (rel, n, m);
            }
        }
    }
    Ok((fails == 0, format!("{pairs} pairs, {fails} beyond 15%, worst {:.3} at (N, M) = ({}, {})", worst.0, worst.1, worst.2)))
}

fn additive_energy(_: usize) -> Check {
    let f = field(2)?;
    let ctx = Context::new(&f)?;
    let mut vals = Vec::new();
    for h in [4usize, 6, 8] {
        let e = prime_additive_energy(&ctx, h, &Poly::zero())?;
        vals.push((h, e, e as f64 * (h as f64).powi(4) / 2f64.powi(3 * h as i32)));
    }
    let base = vals[0].2;
    let bounded = vals.iter().all(|v| v.2 <= 8.0 * base);
    let cur = json!(vals.iter().map(|(h, e, _)| json!({ "H": h, "energy": e.to_string() })).collect::<Vec<_>>());
    let (fixture, how) = against_fixture("energy_q2", &cur, |a, b| a == b)?;
    let shown: Vec<String> = vals.iter().map(|(h, e, r)| format!("H={h}: E={e} ratio={r:.3}")).collect();
    Ok((bounded && fixture, format!("{}; {how}", shown.join(", "))))
}

fn cli_csv(args: &[&str], threads: usize) -> Result<Vec<u8>> {
    use clap::Parser;
    let t = threads.to_string();
    let all: Vec<&str> = std::iter::once("ffanalytica").chain(args.iter().copied()).chain(["--threads", &t]).collect();
    let cli = Cli::try_parse_from(all).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = ExperimentConfig::new(cli.command, cli.params, crate::config::DEFAULT_BUDGET_MB)?;
    let report = crate::execute(&cfg)?;
    let mut buf = Vec::new();
    report.table.write_csv(&mut buf)?;
    buf.extend(serde_json::to_vec(&report.schema())?);
    Ok(buf)
}

fn determinism(_: usize) -> Check {
    let runs: [&[&str]; 2] = [&["mr-variance", "--q", "3", "--N", "12", "--H", "2,4,6,8,12"], &["chowla", "--q", "2", "--B", "1", "--N", "16"]];
    let mut same = true;
    let mut sizes = Vec::new();
    for args in runs {
        // the thread count is an input, so it is masked before comparing
        let a = String::from_utf8_lossy(&cli_csv(args, 1)?).replace("\"threads\":1", "\"threads\":_");
        let b = String::from_utf8_lossy(&cli_csv(args, 4)?).replace("\"threads\":4", "\"threads\":_");
        same &= a == b;
        sizes.push(a.len());
    }
    Ok((same, format!("outputs of {sizes:?} bytes identical for --threads 1 and 4: {same}")))
}
