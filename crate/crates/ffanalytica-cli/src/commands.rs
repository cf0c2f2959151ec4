//! One driver per subcommand. Each turns a validated config into a [`Report`].

use ffanalytica::analytics::{
    self, best_char, exp_sum_grid, katai_exact, katai_increment, log_correlation, mr_variance, nonpret_profile,
    prime_additive_energy, CharDistance, CharSet, Context, PrimeSums, VarianceMode,
};
use ffanalytica::chargroup::{orthogonality_residues, HayesFamily, Rot, MAX_PHI};
use ffanalytica::lfun::{sweep, SweepConfig};
use ffanalytica::multfn::{Exact, MultFn};
use ffanalytica::poly::{count_irreducibles, count_smooth, dickman_rho, q_pow, Poly};
use ffanalytica::Complex64;
use serde_json::json;

use crate::config::{Command, ExperimentConfig, Mode};
use crate::error::{usage, CliError, Result};
use crate::fnspec::{parse_fn, parse_theta};
use crate::output::{cim, cre, Kind, Report, Table};

/// Character-family size above which `chars` skips the pairwise orthogonality check.
const ORTHO_REPORT_LIMIT: usize = 1 << 11;

pub fn execute(cfg: &ExperimentConfig) -> Result<Report> {
    use Command::*;
    match cfg.command {
        Field => field(cfg),
        Primes => primes(cfg),
        Chars => chars(cfg),
        Lfun => lfun(cfg),
        Distance => distance(cfg),
        BestChar => best(cfg),
        MrVariance => variance(cfg),
        ApVariance => ap(cfg),
        Chowla => chowla(cfg),
        Katai => katai(cfg),
        Expsum => expsum(cfg),
        Energy => energy(cfg),
        Smooth => smooth(cfg),
        Profile => profile(cfg),
        Verify => verify(cfg),
    }
}

fn ctx(cfg: &ExperimentConfig) -> Result<Context> {
    Ok(Context::new(&cfg.field)?)
}

fn function(cfg: &ExperimentConfig, spec: &str) -> Result<MultFn> {
    parse_fn(spec, &cfg.field, cfg.params.seed)
}

fn main_fn(cfg: &ExperimentConfig) -> Result<MultFn> {
    function(cfg, &cfg.params.fn_spec)
}

fn inputs(cfg: &ExperimentConfig) -> serde_json::Value {
    let p = &cfg.params;
    json!({
        "q": cfg.q(),
        "field_modulus": cfg.field.modulus(),
        "N": p.n, "H": p.h, "Q": p.modulus_poly, "B": p.shift, "nu": p.nu, "W": p.w, "M": p.m,
        "fn": p.fn_spec, "fn2": p.fn2, "seed": p.seed, "threads": cfg.threads,
    })
}

fn label(c: &CharDistance) -> String {
    c.label.clone()
}

fn field(cfg: &ExperimentConfig) -> Result<Report> {
    let f = &cfg.field;
    let mut t = Table::new()
        .col("index", Kind::Int, "element index")
        .col("repr", Kind::Str, "element as a polynomial in the field generator x")
        .col("log", Kind::Int, "discrete log to the chosen generator, -1 for zero")
        .col("trace", Kind::Int, "absolute trace in F_p")
        .col("inverse", Kind::Int, "index of the inverse, -1 for zero");
    for a in 0..f.q() {
        let log = f.log(a).map_or(-1, i64::from);
        let inv = if a == 0 { -1 } else { i64::from(f.inv(a)) };
        t.push(vec![a.into(), f.describe(a).into(), log.into(), f.trace(a).into(), inv.into()]);
    }
    Ok(Report::new("field", inputs(cfg), t)
        .value("p", f.p())
        .value("k", f.k())
        .value("generator", f.generator_index())
        .count("elements", f.q()))
}

fn primes(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let q = cfg.q();
    let mut t = Table::new()
        .col("d", Kind::Int, "degree")
        .col("enumerated", Kind::Int, "irreducibles found by exhaustive testing or the sieve")
        .col("gauss", Kind::Int, "(1/d) Σ_{e|d} μ(e) q^{d/e}")
        .col("match", Kind::Bool, "enumerated == gauss");
    let mut tested = 0u128;
    for d in 1..=cfg.params.max_d {
        let found = c.primes(d)?.len() as u128;
        let gauss = count_irreducibles(q, d)?;
        tested += q_pow(q, d)? as u128;
        t.push(vec![d.into(), found.into(), gauss.into(), (found == gauss).into()]);
    }
    Ok(Report::new("primes", inputs(cfg), t).count("monics_examined", tested))
}

fn chars(cfg: &ExperimentConfig) -> Result<Report> {
    let f = &cfg.field;
    let m = cfg.modulus_poly()?.unwrap_or_else(Poly::one);
    let nu = cfg.params.nu.unwrap_or(0);
    let fam = HayesFamily::new(&m, nu, f)?;
    if fam.len() as u64 > MAX_PHI {
        return Err(CliError::Capacity(format!("{} characters exceed {MAX_PHI}", fam.len())));
    }
    let mut t = Table::new()
        .col("i", Kind::Int, "Dirichlet factor index")
        .col("j", Kind::Int, "short factor index")
        .col("character", Kind::Str, "JSON character record")
        .col("denominator", Kind::Int, "values are denominator-th roots of unity")
        .col("cond_h", Kind::Int, "Hayes conductor degree")
        .col("principal", Kind::Bool, "principal character");
    for i in 0..fam.dir_chars().len() {
        for j in 0..fam.short_count() {
            let chi = fam.hayes(i, j);
            let rec = serde_json::to_string(&chi.record())?;
            t.push(vec![i.into(), j.into(), rec.into(), chi.denominator().into(), chi.cond_h().into(), chi.is_principal().into()]);
        }
    }
    let mut r = Report::new("chars", inputs(cfg), t).count("characters", fam.len() as u64).value("phi", fam.phi());
    if fam.len() <= ORTHO_REPORT_LIMIT {
        let o = orthogonality_residues(&m, nu, f)?;
        r = r.value("orthogonality", &o);
    }
    Ok(r)
}

fn lfun(cfg: &ExperimentConfig) -> Result<Report> {
    // one row per character, not only the failures
    let sc = SweepConfig { cond_max: cfg.params.cond_max, keep_polys: true, ..SweepConfig::default() };
    let s = sweep(&cfg.field, &sc)?;
    let mut t = Table::new()
        .col("character", Kind::Str, "JSON character record")
        .col("cond_h", Kind::Int, "Hayes conductor degree")
        .col("degree", Kind::Int, "degree of the L-polynomial")
        .col("rh_deviation", Kind::Float, "max over inverse roots of the distance of |α| to {1, √q}")
        .col("product_residual", Kind::Float, "coefficient error of Π (1 − α_j z)")
        .col("explicit_error", Kind::Float, "max error of the explicit formula up to degree 10")
        .col("bound_ok", Kind::Bool, "character-sum bound holds at every N")
        .col("sums_match", Kind::Bool, "character sums equal the L-coefficients exactly")
        .col("rh_ok", Kind::Bool, "every inverse root is on the predicted circle");
    for rec in &s.records {
        let rh_ok = rec.error.is_none() && rec.rh_deviation <= sc.rh_tol;
        t.push(vec![
            serde_json::to_string(&rec.character)?.into(),
            rec.cond_h.into(),
            rec.degree.into(),
            rec.rh_deviation.into(),
            rec.product_residual.into(),
            rec.explicit_error.into(),
            rec.bound_ok.into(),
            rec.sums_match.into(),
            rh_ok.into(),
        ]);
    }
    let mut r = Report::new("lfun", inputs(cfg), t)
        .count("characters", s.characters as u64)
        .value("rh_failures", s.rh_failures)
        .value("product_failures", s.product_failures)
        .value("explicit_failures", s.explicit_failures)
        .value("bound_failures", s.bound_failures)
        .value("sum_mismatches", s.sum_mismatches)
        .value("degree_drops", s.degree_drops)
        .value("max_rh_deviation", s.max_rh_deviation);
    if s.numeric_failures > 0 {
        let bad: Vec<_> = s.records.iter().filter(|r| r.error.is_some()).collect();
        r = r.fail(CliError::Numeric {
            message: format!("{} L-polynomials did not converge", s.numeric_failures),
            residual: s.max_rh_deviation,
            dump: serde_json::to_value(bad)?,
        });
    }
    Ok(r)
}

fn distance(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let n = cfg.n()?;
    let f = main_fn(cfg)?;
    let g = function(cfg, cfg.params.fn2.as_deref().unwrap_or("one"))?;
    let lo = cfg.params.m.unwrap_or(1);
    if lo < 1 || lo > n {
        return usage(format!("need 1 ≤ M ≤ N, got M = {lo}"));
    }
    let sums = PrimeSums::new(&c, &f, &g, n)?;
    let k = if cfg.params.theta_grid == 0 { 8 * n } else { cfg.params.theta_grid };
    let mut t = Table::new().col("theta", Kind::Float, "θ").col("d2", Kind::Float, "𝔻(f, g e_θ; M, N)²");
    for i in 0..k {
        let th = i as f64 / k as f64;
        t.push(vec![th.into(), sums.d2(th, lo).into()]);
    }
    let (theta, d2) = sums.min_theta();
    Ok(Report::new("distance", inputs(cfg), t)
        .value("theta_star", theta)
        .value("min_d2", d2)
        .value("d2_at_zero", sums.d2(0.0, lo))
        .count("prime_degrees", n as u64))
}

fn distance_table(records: &[CharDistance], best: &str) -> Table {
    let mut t = Table::new()
        .col("rank", Kind::Int, "position in tie-break order")
        .col("character", Kind::Str, "character label")
        .col("length", Kind::Int, "length of the short factor")
        .col("theta", Kind::Float, "minimising θ")
        .col("d2", Kind::Float, "min_θ 𝔻(f, χ e_θ; N)²")
        .col("best", Kind::Bool, "the reported minimiser");
    for (i, r) in records.iter().enumerate() {
        t.push(vec![i.into(), label(r).into(), r.length.into(), r.theta.into(), r.d2.into(), (r.label == best).into()]);
    }
    t
}

fn best(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let n = cfg.n()?;
    let f = main_fn(cfg)?;
    let set = match cfg.modulus_poly()? {
        Some(m) => CharSet::Dirichlet(m),
        None => CharSet::Hayes { w: cfg.params.w.unwrap_or(1), nu_max: cfg.params.nu.unwrap_or(1) },
    };
    let b = best_char(&c, &f, &set, n)?;
    let t = distance_table(&b.all, &b.best.label);
    Ok(Report::new("best-char", inputs(cfg), t).value("best", &b.best).count("candidates", b.all.len() as u64))
}

fn variance(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let n = cfg.n()?;
    let f = main_fn(cfg)?;
    let mode = match cfg.params.mode {
        Mode::LongMean => VarianceMode::LongMean,
        Mode::Chi1Star => VarianceMode::Chi1Star { exponent: cfg.params.corrector_exp, real_only: !cfg.params.complex_corrector },
    };
    let mut t = Table::new()
        .col("H", Kind::Int, "interval length")
        .col("mode", Kind::Str, "corrector")
        .col("variance", Kind::Float, "q^{-N} Σ_{G₀} |short mean − corrector|²")
        .complex("long_mean", "q^{-N} Σ f χ̄₁*")
        .col("corrector", Kind::Str, "JSON record of χ₁, empty in long-mean mode")
        .col("intervals", Kind::Int, "distinct intervals summed");
    let mut intervals = 0u64;
    for &h in cfg.hs()? {
        let r = mr_variance(&c, &f, n, h, &mode)?;
        intervals += r.intervals;
        let corr = r.corrector.as_ref().map(serde_json::to_string).transpose()?.unwrap_or_default();
        t.push(vec![h.into(), r.mode.clone().into(), r.variance.into(), cre(r.long_mean), cim(r.long_mean), corr.into(), r.intervals.into()]);
    }
    Ok(Report::new("mr-variance", inputs(cfg), t).count("monics", q_pow(cfg.q(), n)?).count("intervals", intervals))
}

fn ap(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let n = cfg.n()?;
    let f = main_fn(cfg)?;
    let Some(m) = cfg.modulus_poly()? else {
        return usage("ap-variance needs --Q");
    };
    let r = analytics::ap_variance(&c, &f, n, &m, None)?;
    let mut t = Table::new()
        .col("Q", Kind::Str, "modulus")
        .col("chi1", Kind::Str, "JSON record of the removed character")
        .col("progression_side", Kind::Float, "Σ over reduced classes of |Σ_{G ≡ A} f − corrector|²")
        .col("character_side", Kind::Float, "(1/φ(Q)) Σ_{χ ≠ χ₁} |Σ f χ̄|²")
        .col("scale", Kind::Float, "q^{2N − deg Q}")
        .col("rel_diff", Kind::Float, "relative difference of the two sides");
    t.push(vec![
        r.modulus.clone().into(),
        serde_json::to_string(&r.chi1)?.into(),
        r.progression_side.into(),
        r.character_side.into(),
        r.scale.into(),
        r.rel_diff.into(),
    ]);
    Ok(Report::new("ap-variance", inputs(cfg), t).count("monics", q_pow(cfg.q(), n)?))
}

fn chowla(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let n = cfg.n()?;
    let f1 = main_fn(cfg)?;
    let f2 = match &cfg.params.fn2 {
        Some(s) => function(cfg, s)?,
        None => f1.clone(),
    };
    let b = cfg.poly(cfg.params.shift.as_deref().unwrap_or("1"))?;
    let r = log_correlation(&c, &f1, &f2, &b, n)?;
    let mut t = Table::new()
        .col("N", Kind::Int, "truncation degree")
        .complex("value", "(1/N) Σ_{deg G ≤ N} q^{-deg G} f₁(G) f₂(G + B)")
        .col("abs", Kind::Float, "modulus of the value");
    for k in b.degree() + 1..=n {
        let v = r.value_at(k);
        t.push(vec![k.into(), cre(v), cim(v), v.norm().into()]);
    }
    Ok(Report::new("chowla", inputs(cfg), t)
        .value("skipped_degrees", r.skipped_degrees)
        .count("monics", ffanalytica::poly::monic_offset(cfg.q(), n + 1)))
}

/// z as a turn: "k/n" stays exact, a decimal does not.
fn parse_turn(s: &str) -> Result<(Complex64, Option<Rot>)> {
    let theta = parse_theta(s)?;
    let exact = match s.split_once('/') {
        Some((a, b)) => match (a.trim().parse::<i64>(), b.trim().parse::<u32>()) {
            (Ok(k), Ok(n)) if n > 0 => Some(Rot::new(k.rem_euclid(n as i64) as u64, n).reduced()),
            _ => None,
        },
        None => None,
    };
    Ok((Complex64::from_polar(1.0, std::f64::consts::TAU * theta), exact))
}

fn katai(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let n = cfg.n()?;
    let f = main_fn(cfg)?;
    let m = cfg.modulus_poly()?.unwrap_or_else(Poly::t);
    let (z, zr) = parse_turn(cfg.params.z.as_deref().unwrap_or("1/2"))?;
    let total = katai_increment(&c, &f, &m, z, n)?;
    let mut t = Table::new()
        .col("d", Kind::Int, "deg G")
        .col("terms", Kind::Int, "q^d")
        .col("nonzero", Kind::Int, "terms not exactly zero, -1 when undecidable exactly");
    let exact = match zr {
        Some(r) => katai_exact(&c, &f, &m, Exact::Root(r), n)?,
        None => None,
    };
    for d in 0..=n {
        let nz = exact.as_ref().map_or(-1, |e| e.nonzero_by_degree[d] as i64);
        t.push(vec![d.into(), q_pow(cfg.q(), d)?.into(), nz.into()]);
    }
    Ok(Report::new("katai", inputs(cfg), t)
        .value("increment", total)
        .value("normalized", total / q_pow(cfg.q(), n)? as f64)
        .count("monics", ffanalytica::poly::monic_offset(cfg.q(), n + 1)))
}

fn expsum(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let n = cfg.n()?;
    let f = main_fn(cfg)?;
    let q = cfg.q();
    let mut t = Table::new()
        .col("H", Kind::Int, "interval length")
        .col("alpha", Kind::Str, "a/g")
        .col("abs_alpha", Kind::Float, "⟨α⟩")
        .col("value", Kind::Float, "q^{-(N−H)} Σ_I q^{-H} |Σ_{G ∈ I} f(G) e(Gα)|");
    let mut sups = Vec::new();
    let mut points = 0u64;
    for &h in cfg.hs()? {
        let grid = exp_sum_grid(&c, &f, n, h, cfg.params.arc_depth)?;
        points = grid.len() as u64;
        let mut best = (String::new(), f64::NEG_INFINITY);
        for (a, v) in &grid {
            if *v > best.1 {
                best = (a.to_string(), *v);
            }
            t.push(vec![h.into(), a.to_string().into(), a.abs(q).into(), (*v).into()]);
        }
        sups.push(json!({ "H": h, "alpha": best.0, "sup": best.1 }));
    }
    Ok(Report::new("expsum", inputs(cfg), t).value("sup", sups).count("farey_points", points))
}

fn energy(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let q = cfg.q();
    let target = cfg.poly(&cfg.params.target)?;
    let mut t = Table::new()
        .col("H", Kind::Int, "degree")
        .col("primes", Kind::Int, "|𝒫_H|")
        .col("energy", Kind::Int, "#{P₁ + P₂ − P₃ − P₄ = target}")
        .col("normalized", Kind::Float, "energy · H⁴ / q^{3H}");
    for &h in cfg.hs()? {
        let e = prime_additive_energy(&c, h, &target)?;
        let norm = e as f64 * (h as f64).powi(4) / (q as f64).powi(3 * h as i32);
        t.push(vec![h.into(), c.primes(h)?.len().into(), e.into(), norm.into()]);
    }
    Ok(Report::new("energy", inputs(cfg), t))
}

fn smooth(cfg: &ExperimentConfig) -> Result<Report> {
    let q = cfg.q();
    let top = cfg.params.n.unwrap_or(18);
    let mut t = Table::new()
        .col("N", Kind::Int, "degree")
        .col("M", Kind::Int, "smoothness bound")
        .col("count", Kind::Int, "|S(N, M)|")
        .col("density", Kind::Float, "|S(N, M)| / q^N")
        .col("rho", Kind::Float, "ρ(N/M)")
        .col("rel_err", Kind::Float, "|density − ρ| / ρ");
    for n in 1..=top {
        let ms: Vec<usize> = match cfg.params.m {
            Some(m) => vec![m],
            // ρ is tabulated for u ≤ 6
            None => (1..=n).filter(|&m| n <= 6 * m).collect(),
        };
        for m in ms {
            let count = count_smooth(q, n, m)?;
            let density = count as f64 / (q as f64).powi(n as i32);
            let rho = dickman_rho(n as f64 / m as f64)?;
            t.push(vec![n.into(), m.into(), count.into(), density.into(), rho.into(), ((density - rho).abs() / rho).into()]);
        }
    }
    Ok(Report::new("smooth", inputs(cfg), t))
}

fn profile(cfg: &ExperimentConfig) -> Result<Report> {
    let c = ctx(cfg)?;
    let n = cfg.n()?;
    let f = main_fn(cfg)?;
    let h = cfg.params.h.first().copied().unwrap_or(1);
    let p = nonpret_profile(&c, &f, n, h, cfg.params.w.unwrap_or(1), cfg.params.nu.unwrap_or(1))?;
    let t = distance_table(&p.records, &p.m_hayes.label);
    Ok(Report::new("profile", inputs(cfg), t)
        .value("m_hayes", &p.m_hayes)
        .value("m_dir", &p.m_dir)
        .count("candidates", p.records.len() as u64))
}

fn verify(cfg: &ExperimentConfig) -> Result<Report> {
    let mut t = Table::new()
        .col("id", Kind::Int, "criterion")
        .col("name", Kind::Str, "what is checked")
        .col("passed", Kind::Bool, "outcome")
        .col("detail", Kind::Str, "measured quantities");
    let outcomes = crate::acceptance::run_all(cfg.threads);
    let passed = outcomes.iter().filter(|o| o.passed).count();
    for o in &outcomes {
        eprintln!("{}", o.line());
        t.push(vec![o.id.into(), o.name.into(), o.passed.into(), o.detail.clone().into()]);
    }
    Ok(Report::new("verify", inputs(cfg), t).value("passed", passed).value("total", outcomes.len()))
}
