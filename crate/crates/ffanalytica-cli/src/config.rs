//! Command-line surface and the validated experiment configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffanalytica::gf::{Field, FieldSpec};
use ffanalytica::poly::{monic_offset, Poly};
use serde::Serialize;

use crate::error::{usage, CliError, Result};

/// Default memory cap when FFA_BUDGET_MB is unset.
pub const DEFAULT_BUDGET_MB: u64 = 2048;

#[derive(Debug, Parser)]
#[command(name = "ffanalytica", version, about = "Statistics of multiplicative functions on F_q[t]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Elements of F_q with logarithms, traces and inverses
    Field,
    /// Irreducible counts per degree against the Gauss formula
    Primes,
    /// The character family X_{Q,ν}
    Chars,
    /// L-polynomials and their checks for every Hayes character up to --cond-max
    Lfun,
    /// θ ↦ 𝔻(f, e_θ; M, N)² on a grid, with the minimiser
    Distance,
    /// The character minimising the pretentious distance
    BestChar,
    /// Short-interval variance for each --H
    MrVariance,
    /// Both sides of the progression variance identity
    ApVariance,
    /// Logarithmic two-point correlation, truncated at every N' ≤ N
    Chowla,
    /// Kátai increment Σ |f(QG+1) + z f(G)|
    Katai,
    /// Twisted short exponential sums over a Farey grid
    Expsum,
    /// Additive energy of irreducibles for each --H
    Energy,
    /// Smooth counts against Dickman's ρ
    Smooth,
    /// M_Hayes and M_Dir non-pretentiousness profile
    Profile,
    /// Run the acceptance suite
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    LongMean,
    Chi1Star,
}

#[derive(Debug, Clone, Args)]
pub struct Params {
    /// field size (a prime power)
    #[arg(long, global = true, default_value_t = 2)]
    pub q: u32,
    /// field modulus over F_p, coefficients low to high, e.g. 1,1,1
    #[arg(long, global = true, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    /// one or more interval lengths (comma separated)
    #[arg(long = "H", global = true, value_delimiter = ',')]
    pub h: Vec<usize>,
    /// modulus polynomial, e.g. t^3+t+1
    #[arg(long = "Q", global = true)]
    pub modulus_poly: Option<String>,
    /// shift polynomial for correlations
    #[arg(long = "B", global = true)]
    pub shift: Option<String>,
    #[arg(long, global = true)]
    pub nu: Option<usize>,
    #[arg(long = "W", global = true)]
    pub w: Option<usize>,
    /// smoothness degree or lower prime degree
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// target polynomial of the energy equation P₁+P₂−P₃−P₄ = target
    #[arg(long, global = true, default_value = "0")]
    pub target: String,
    /// points of the θ grid in `distance` (0 means 8N)
    #[arg(long, global = true, default_value_t = 0)]
    pub theta_grid: usize,
    /// largest denominator degree of the Farey grid
    #[arg(long, global = true, default_value_t = 2)]
    pub arc_depth: usize,
    #[arg(long = "fn", global = true, default_value = "mu")]
    pub fn_spec: String,
    /// second function for correlations (defaults to --fn)
    #[arg(long = "fn2", global = true)]
    pub fn2: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// worker threads (0 means all cores)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 6)]
    pub cond_max: usize,
    #[arg(long, global = true, default_value_t = 10)]
    pub max_d: usize,
    #[arg(long, global = true, value_enum, default_value_t = Mode::LongMean)]
    pub mode: Mode,
    /// exponent k of the corrector modulus t^k (default N − H + 1)
    #[arg(long, global = true)]
    pub corrector_exp: Option<usize>,
    /// allow complex corrector characters
    #[arg(long, global = true, default_value_t = false)]
    pub complex_corrector: bool,
    /// z as a fraction of a turn (default 1/2, i.e. z = −1)
    #[arg(long, global = true)]
    pub z: Option<String>,
}

/// Parameters after validation. Nothing is enumerated before this exists.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub field: Field,
    pub params: Params,
    pub threads: usize,
    pub budget_mb: u64,
}

impl ExperimentConfig {
    pub fn from_cli(cli: Cli) -> Result<ExperimentConfig> {
        let budget_mb = match std::env::var("FFA_BUDGET_MB") {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("FFA_BUDGET_MB='{v}' is not an integer")))?,
            Err(_) => DEFAULT_BUDGET_MB,
        };
        ExperimentConfig::new(cli.command, cli.params, budget_mb)
    }

    pub fn new(command: Command, params: Params, budget_mb: u64) -> Result<ExperimentConfig> {
        let field = match &params.modulus {
            None => FieldSpec::new(params.q)?,
            Some(m) => {
                let p = (2..=params.q).find(|d| params.q.is_multiple_of(*d)).unwrap_or(params.q);
                let f = FieldSpec::with_modulus(p, m)?;
                if f.q() != params.q {
                    return usage(format!("modulus defines F_{}, not F_{}", f.q(), params.q));
                }
                f
            }
        };
        let threads = if params.threads == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            params.threads
        };
        let cfg = ExperimentConfig { command, field, params, threads, budget_mb };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn n(&self) -> Result<usize> {
        self.params.n.ok_or_else(|| CliError::Usage(format!("{:?} needs --N", self.command)))
    }

    pub fn hs(&self) -> Result<&[usize]> {
        if self.params.h.is_empty() {
            return usage(format!("{:?} needs --H", self.command));
        }
        Ok(&self.params.h)
    }

    pub fn poly(&self, s: &str) -> Result<Poly> {
        Ok(Poly::parse(s, &self.field)?)
    }

    pub fn modulus_poly(&self) -> Result<Option<Poly>> {
        self.params.modulus_poly.as_deref().map(|s| self.poly(s)).transpose()
    }

    fn need_n(&self) -> Result<usize> {
        let n = self.n()?;
        if n == 0 {
            return usage("--N must be positive");
        }
        Ok(n)
    }

    /// Cheap checks and the memory estimate, before any enumeration.
    fn validate(&self) -> Result<()> {
        use Command::*;
        if let Some(m) = self.modulus_poly()? {
            if !m.is_monic() {
                return usage(format!("--Q must be monic, got {m}"));
            }
        }
        if let Some(b) = &self.params.shift {
            if self.poly(b)?.is_zero() {
                return usage("--B must be non-zero");
            }
        }
        self.poly(&self.params.target)?;
        match self.command {
            Distance | BestChar | Chowla | Katai | Profile | ApVariance => {
                self.need_n()?;
            }
            MrVariance | Expsum => {
                let n = self.need_n()?;
                if let Some(&h) = self.hs()?.iter().find(|&&h| h == 0 || h > n) {
                    return usage(format!("need 1 ≤ H ≤ N, got H = {h}"));
                }
            }
            Energy => {
                self.hs()?;
            }
            _ => {}
        }
        let need = self.estimate_bytes();
        if need > self.budget_mb as u128 * (1 << 20) {
            return Err(CliError::Capacity(format!(
                "estimated {} MB exceeds the budget of {} MB (FFA_BUDGET_MB)",
                need >> 20,
                self.budget_mb
            )));
        }
        Ok(())
    }

    /// Rough peak memory: value tables of 16-byte complex numbers plus the factor sieve.
    pub fn estimate_bytes(&self) -> u128 {
        use Command::*;
        let q = self.q();
        let upto = |n: usize| monic_offset(q, n.min(40) + 1) as u128;
        let table = |n: usize| upto(n) * 16;
        let sieve = upto(ffanalytica::poly::FactorSieve::default_bound(q)) * 24;
        let n = self.params.n.unwrap_or(0);
        let extra = match self.command {
            Chowla => 2 * table(n),
            Katai => table(n + self.modulus_poly().ok().flatten().map_or(1, |m| m.degree())),
            Distance | BestChar | Profile => upto(n) * 8,
            MrVariance | Expsum => 2 * table(n),
            ApVariance => 3 * table(n),
            Smooth | Energy | Field | Primes | Chars | Lfun | Verify => 0,
        };
        sieve + extra
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("ffanalytica").chain(args.iter().copied()))
    }

    #[test]
    fn flags_and_validation() {
        let cli = parse(&["mr-variance", "--q", "3", "--N", "12", "--H", "2,4,6"]).unwrap();
        assert_eq!(cli.params.h, vec![2, 4, 6]);
        let cfg = ExperimentConfig::new(cli.command, cli.params, 1000).unwrap();
        assert_eq!(cfg.q(), 3);
        let cli = parse(&["mr-variance", "--N", "5", "--H", "6"]).unwrap();
        assert!(matches!(ExperimentConfig::new(cli.command, cli.params, 1000), Err(CliError::Usage(_))));
        let cli = parse(&["chowla", "--N", "30"]).unwrap();
        assert!(matches!(ExperimentConfig::new(cli.command, cli.params, 64), Err(CliError::Capacity(_))));
        let cli = parse(&["field", "--q", "6"]).unwrap();
        assert!(matches!(ExperimentConfig::new(cli.command, cli.params, 64), Err(CliError::Usage(_))));
        let cli = parse(&["field", "--q", "4", "--modulus", "1,1,1"]).unwrap();
        assert_eq!(ExperimentConfig::new(cli.command, cli.params, 64).unwrap().q(), 4);
    }
}
