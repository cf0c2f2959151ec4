//! The `--fn` mini-language.
//!
//! ```text
//! spec   := atom | call
//! atom   := "one" | "mu" | "lambda"
//!         | "random" [":" seed] | "crandom" [":" seed]
//!         | "e:" theta
//! call   := "twist(" spec ",chi=" record ["," "theta=" theta] ")"
//!         | "char(" record ")" | "star(" record ")"
//!         | "conj(" spec ")" | "involute(" spec ")" | "mul(" spec "," spec ")"
//! theta  := float | int "/" int
//! record := JSON character record, e.g. {"modulus":"t^3+t+1","exponents":[1],"nu":0}
//! ```
//!
//! Without an explicit seed, `random` and `crandom` take the `--seed` value.

use ffanalytica::chargroup::{CharRecord, HayesChar};
use ffanalytica::gf::Field;
use ffanalytica::multfn::{InvolutionMode, MultFn};

use crate::error::{usage, CliError, Result};

pub fn parse_theta(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (num(a)?, num(b)?);
            if b == 0.0 {
                return usage(format!("zero denominator in θ = '{s}'"));
            }
            a / b
        }
        None => num(s)?,
    };
    if !v.is_finite() {
        return usage(format!("θ = '{s}' is not finite"));
    }
    Ok(v)
}

fn num(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("'{s}' is not a number")))
}

/// Splits on top-level commas, ignoring those inside brackets or strings.
fn split_args(s: &str) -> Result<Vec<&str>> {
    let (mut depth, mut quoted, mut start) = (0i32, false, 0usize);
    let mut out = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '(' | '[' | '{' if !quoted => depth += 1,
            ')' | ']' | '}' if !quoted => depth -= 1,
            ',' if !quoted && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return usage(format!("unbalanced brackets in '{s}'"));
        }
    }
    if depth != 0 || quoted {
        return usage(format!("unbalanced brackets or quotes in '{s}'"));
    }
    out.push(s[start..].trim());
    Ok(out)
}

fn record(s: &str, f: &Field) -> Result<HayesChar> {
    let rec: CharRecord = serde_json::from_str(s).map_err(|e| CliError::Usage(format!("bad character record '{s}': {e}")))?;
    Ok(HayesChar::from_record(&rec, f)?)
}

fn seed_of(rest: Option<&str>, default: u64) -> Result<u64> {
    match rest {
        None => Ok(default),
        Some(s) => s.parse().map_err(|_| CliError::Usage(format!("bad seed '{s}'"))),
    }
}

pub fn parse_fn(spec: &str, f: &Field, seed: u64) -> Result<MultFn> {
    let spec = spec.trim();
    if let Some(open) = spec.find('(') {
        let Some(inner) = spec[open + 1..].strip_suffix(')') else {
            return usage(format!("'{spec}': missing closing parenthesis"));
        };
        let args = split_args(inner)?;
        let head = &spec[..open];
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                usage(format!("{head} takes {n} argument(s), got {}", args.len()))
            }
        };
        return match head {
            "twist" => {
                if !(2..=3).contains(&args.len()) {
                    return usage("twist takes a function, chi=... and an optional theta=...");
                }
                let base = parse_fn(args[0], f, seed)?;
                let Some(chi) = args[1].strip_prefix("chi=") else {
                    return usage(format!("expected chi=<record>, got '{}'", args[1]));
                };
                let theta = match args.get(2) {
                    None => 0.0,
                    Some(a) => match a.strip_prefix("theta=") {
                        Some(t) => parse_theta(t)?,
                        None => return usage(format!("expected theta=<value>, got '{a}'")),
                    },
                };
                Ok(base.twist(&record(chi, f)?, theta))
            }
            "char" => {
                arity(1)?;
                Ok(MultFn::character(&record(args[0], f)?))
            }
            "star" => {
                arity(1)?;
                let chi = record(args[0], f)?;
                if chi.short().length() > 0 {
                    return usage("star takes a Dirichlet character modulo a power of t");
                }
                Ok(MultFn::star(chi.dirichlet())?)
            }
            "conj" => {
                arity(1)?;
                Ok(parse_fn(args[0], f, seed)?.conj())
            }
            "involute" => {
                arity(1)?;
                Ok(parse_fn(args[0], f, seed)?.involute(InvolutionMode::trivial_units(f.q())))
            }
            "mul" => {
                arity(2)?;
                Ok(parse_fn(args[0], f, seed)?.mul(&parse_fn(args[1], f, seed)?))
            }
            _ => usage(format!("unknown function '{head}'")),
        };
    }
    let (head, rest) = match spec.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (spec, None),
    };
    match (head, rest) {
        ("one", None) => Ok(MultFn::one()),
        ("mu", None) => Ok(MultFn::moebius()),
        ("lambda", None) => Ok(MultFn::liouville()),
        ("random", r) => Ok(MultFn::random(seed_of(r, seed)?)),
        ("crandom", r) => Ok(MultFn::random_complete(seed_of(r, seed)?)),
        ("e", Some(t)) => Ok(MultFn::arch(parse_theta(t)?)),
        _ => usage(format!("unknown function spec '{spec}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ffanalytica::gf::FieldSpec;
    use ffanalytica::poly::Poly;

    #[test]
    fn atoms_and_calls() {
        let f = FieldSpec::new(2).unwrap();
        assert_eq!(parse_fn("mu", &f, 0).unwrap().name(), MultFn::moebius().name());
        assert_eq!(parse_fn("random", &f, 9).unwrap().name(), "random:9");
        assert_eq!(parse_fn("crandom:3", &f, 9).unwrap().name(), "crandom:3");
        let tw = parse_fn(r#"twist(mu,chi={"modulus":"t^2+t+1","exponents":[1],"nu":0},theta=1/4)"#, &f, 0).unwrap();
        let g = Poly::parse("t", &f).unwrap();
        let v = tw.eval(&g, &f, None).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(parse_fn("mul(mu,conj(e:0.5))", &f, 0).is_ok());
    }

    #[test]
    fn rejects_malformed() {
        let f = FieldSpec::new(2).unwrap();
        for bad in ["nu", "twist(mu)", "mul(mu", "e:x", "random:abc", "twist(mu,chi={bad})", "conj(mu,mu)"] {
            assert!(matches!(parse_fn(bad, &f, 0), Err(CliError::Usage(_))), "{bad}");
        }
        assert_eq!(parse_theta("1/3").unwrap(), 1.0 / 3.0);
    }
}
