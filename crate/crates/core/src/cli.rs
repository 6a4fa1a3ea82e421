//! The `pintersect` command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::acceptance::{run_all, Level};
use crate::config::{parse_pairs, ExperimentConfig};
use crate::counting::{count_r_direct, count_r_fft, density_profile, profile_csv, GapMode, IndexSet};
use crate::error::{Error, Result};
use crate::fourier::{
    default_grid, gauss_sum, gauss_sums_all, l2_concentration, major_arc_residual, moment_sum,
    weyl_sum, ArcSystem, Frequency, MomentKind,
};
use crate::increment::{run_with_engine, Engine};
use crate::intersective::{certify_p_intersective, AuxFactory};
use crate::poly::IntPoly;
use crate::primes::{psi, PrimeTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "pintersect", version, about = "Differences h(p) in dense sets, computed")]
pub struct Cli {
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `key = value` experiment configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PolyArg {
    /// JSON array of decimal coefficient strings, lowest degree first.
    #[arg(long)]
    pub poly: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide P-intersectivity, or certify it up to a modulus bound.
    Certify {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = 10_000)]
        qmax: u64,
    },
    /// Auxiliary data r_d, λ(d), h_d, b_d.
    Aux {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long)]
        d: u64,
    },
    /// ψ(X; a, q), the sum of log p over primes p ≤ X with p ≡ a mod q.
    Psi {
        #[arg(long)]
        x: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long)]
        q: u64,
    },
    /// R_d(B) for a set B ⊆ [1, L].
    Count {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        s: Option<u64>,
        /// fft | direct
        #[arg(long, default_value = "fft")]
        method: String,
        /// Also list the solution pairs (direct method only).
        #[arg(long)]
        pairs: bool,
    },
    /// S_M(α) = Σ_{x ≤ M} ν_d(x) e(h_d(x) α), with Ψ_d and the major-arc
    /// comparison when α is rational.
    Weyl {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long = "L")]
        l: Option<u64>,
        #[arg(long)]
        s: Option<u64>,
        /// p/q or a decimal.
        #[arg(long, allow_negative_numbers = true)]
        alpha: String,
        /// Moment order; prints Σ_t |T(t/N)|^s instead of a point value.
        #[arg(long)]
        moment: Option<u32>,
        /// T | W
        #[arg(long, default_value = "T")]
        kind: String,
        #[arg(long = "N")]
        n: Option<u64>,
    },
    /// Complete sums G(a, q).
    Gauss {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<i64>,
        #[arg(long)]
        all_a: bool,
    },
    /// L² mass of the balanced function on each family of major arcs.
    Arcs {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        gamma: Option<f64>,
        /// Degree used for γ = k + ε/2 when --gamma is absent.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// The density-increment iteration, with its full trace.
    Iterate {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long)]
        set: PathBuf,
        /// A step count, or `auto` for ⌈C δ^(-(γ-1))⌉.
        #[arg(long, default_value = "auto")]
        budget: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Densities of greedy sets avoiding every difference h(n) or h(p).
    Profile {
        #[command(flatten)]
        poly: PolyArg,
        /// Comma-separated lengths.
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<u64>,
        /// primes | all-n
        #[arg(long, default_value = "primes")]
        mode: String,
        #[arg(long)]
        csv: bool,
    },
    /// Run the acceptance suite.
    Verify {
        /// fast | full
        #[arg(default_value = "fast")]
        level: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Failures that map to the usage exit code.
#[derive(Debug)]
struct Usage(String);

enum Failure {
    Usage(Usage),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parse `argv` (program name first), run, and return the exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool.
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            let _ = writeln!(err, "note: {e}");
        }
    }
    match run(&cli, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(Usage(msg))) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    let text = serde_json::to_string(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(())
}

fn config_pairs(cli: &Cli) -> CliResult<BTreeMap<String, String>> {
    match &cli.config {
        None => Ok(BTreeMap::new()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Usage(format!("cannot read config {}: {e}", path.display())))?;
            Ok(parse_pairs(&text)?)
        }
    }
}

/// The experiment configuration: defaults, then the config file, then
/// `--poly`.
fn experiment(cli: &Cli, poly: &PolyArg) -> CliResult<ExperimentConfig> {
    let pairs = config_pairs(cli)?;
    let text = poly
        .poly
        .clone()
        .or_else(|| pairs.get("poly").cloned())
        .ok_or_else(|| Usage("--poly is required (or `poly = ...` in --config)".into()))?;
    let h: IntPoly = text.parse()?;
    let mut cfg = ExperimentConfig::for_poly(h.clone());
    let mut rest = pairs;
    rest.remove("poly");
    cfg.apply(&rest)?;
    cfg.poly = h;
    Ok(cfg)
}

fn read_set(path: &Path) -> CliResult<IndexSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read set {}: {e}", path.display())))?;
    Ok(parse_set(&text)?)
}

/// `{"L": n, "members": [...]}`, or a bare array with `L` its maximum.
pub fn parse_set(text: &str) -> Result<IndexSet> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum SetFile {
        Full {
            #[serde(rename = "L")]
            l: u64,
            members: Vec<u64>,
        },
        Bare(Vec<u64>),
    }
    let parsed: SetFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("set file: {e}")))?;
    match parsed {
        SetFile::Full { l, members } => IndexSet::new(l, members),
        SetFile::Bare(members) => {
            let l = members.iter().copied().max().unwrap_or(0);
            IndexSet::new(l, members)
        }
    }
}

pub fn parse_frequency(text: &str) -> Result<Frequency> {
    let bad = || Error::InvalidArgument(format!("cannot read {text:?} as p/q or a decimal"));
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Frequency::rational(p, q));
    }
    let x: f64 = text.trim().parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    Ok(Frequency::Real(x))
}

fn table_for(limit: u64) -> Result<PrimeTable> {
    PrimeTable::load_or_sieve(limit.max(2))
}

fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match &cli.command {
        Command::Certify { poly, qmax } => {
            let cfg = experiment(cli, poly)?;
            emit(out, &certify_p_intersective(&cfg.poly, *qmax)?)?;
        }
        Command::Aux { poly, d } => {
            let cfg = experiment(cli, poly)?;
            let aux = AuxFactory::new(&cfg.poly)?.aux_mut(*d)?;
            emit(out, &aux)?;
        }
        Command::Psi { x, a, q } => {
            if *q == 0 {
                return Err(Usage("--q must be positive".into()).into());
            }
            let table = table_for(*x)?;
            writeln!(out, "{}", psi(&table, *x, *a, *q)?).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        Command::Count { poly, d, set, s, method, pairs } => {
            let cfg = experiment(cli, poly)?;
            let b = read_set(set)?;
            let s = s.unwrap_or(cfg.s_param);
            let aux = AuxFactory::new(&cfg.poly)?.aux_mut(*d)?;
            let table = table_for(crate::primes::h_range_needs(&aux, b.length(), s)?)?;
            let wp = crate::primes::weighted_primes(&aux, b.length(), s, &table)?;
            let r = match method.as_str() {
                "fft" => count_r_fft(&b, &wp)?,
                "direct" => count_r_direct(&b, &wp, *pairs)?,
                other => return Err(Usage(format!("unknown method {other:?} (fft | direct)")).into()),
            };
            emit(
                out,
                &json!({
                    "d": d, "L": b.length(), "s": s, "method": method,
                    "R": r.value, "solutions": r.solutions(), "psi": wp.psi_total,
                    "pairs": r.pairs,
                }),
            )?;
        }
        Command::Weyl { poly, d, l, s, alpha, moment, kind, n } => {
            let cfg = experiment(cli, poly)?;
            let l = l.or(cfg.l).ok_or_else(|| Usage("--L is required".into()))?;
            let s = s.unwrap_or(cfg.s_param);
            let aux = AuxFactory::new(&cfg.poly)?.aux_mut(*d)?;
            let table = table_for(crate::primes::h_range_needs(&aux, l, s)?)?;
            let wp = crate::primes::weighted_primes(&aux, l, s, &table)?;
            if let Some(order) = moment {
                let kind: MomentKind = kind.parse()?;
                let n = match n.or(cfg.n) {
                    Some(n) => n,
                    None => 2 * wp.range.values.iter().copied().max().unwrap_or(1).max(1),
                };
                emit(out, &moment_sum(&aux, &wp, kind, *order, n)?)?;
                return Ok(EXIT_OK);
            }
            let freq = parse_frequency(alpha)?;
            let m = wp.range.m_floor;
            let z = weyl_sum(&aux, &wp, m, freq)?;
            let mut value = json!({
                "d": d, "L": l, "s": s, "alpha": freq.to_f64(), "M": m,
                "re": z.re, "im": z.im, "abs": z.norm(), "psi": wp.psi_total,
                "ratio": if wp.psi_total > 0.0 { z.norm() / wp.psi_total } else { f64::NAN },
            });
            if let Frequency::Rational { num, den } = freq {
                let g = crate::arith::gcd_i(num, den);
                let (a, q) = (num / g as i64, den / g);
                let cmp = major_arc_residual(&aux, &wp, a, q, 0.0, cfg.exceptional.as_ref())?;
                value["main"] = json!(cmp.main);
                value["residual"] = json!(cmp.residual);
            }
            emit(out, &value)?;
        }
        Command::Gauss { poly, d, q, a, all_a } => {
            let cfg = experiment(cli, poly)?;
            let aux = AuxFactory::new(&cfg.poly)?.aux_mut(*d)?;
            match (a, all_a) {
                (_, true) => emit(out, &gauss_sums_all(&aux, *q)?)?,
                (Some(a), false) => {
                    let z = gauss_sum(&aux, *a, *q)?;
                    emit(out, &json!({ "re": z.re, "im": z.im }))?;
                }
                (None, false) => return Err(Usage("give --a or --all-a".into()).into()),
            }
        }
        Command::Arcs { set, eta, gamma, k, grid } => {
            let pairs = config_pairs(cli)?;
            let epsilon = match pairs.get("epsilon") {
                Some(e) => e.parse().map_err(|_| Usage(format!("bad epsilon {e:?}")))?,
                None => 0.5,
            };
            let b = read_set(set)?;
            let gamma = gamma.unwrap_or_else(|| ArcSystem::gamma_for(*k, epsilon));
            let arcs = ArcSystem::new(b.length(), *eta, gamma)?;
            let grid = grid.unwrap_or_else(|| default_grid(b.length()));
            let masses = l2_concentration(&b, &arcs, grid)?;
            emit(out, &json!({ "arcs": arcs, "masses": masses, "argmax": masses.argmax() }))?;
        }
        Command::Iterate { poly, set, budget, seed } => {
            let mut cfg = experiment(cli, poly)?;
            if let Some(seed) = seed {
                cfg.seed = *seed;
            }
            match budget.as_str() {
                "auto" => {}
                b => cfg.budget = Some(b.parse().map_err(|_| Usage(format!("bad --budget {b:?}")))?),
            }
            let a = read_set(set)?;
            let mut engine = Engine::new(&cfg.poly, cfg.increment())?;
            let trace = run_with_engine(&a, &mut engine)?;
            for v in trace.violations() {
                let _ = writeln!(err, "invariant violated: {v}");
            }
            let mut value = serde_json::to_value(&trace).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            value["seed"] = json!(cfg.seed);
            emit(out, &value)?;
        }
        Command::Profile { poly, ns, mode, csv } => {
            let cfg = experiment(cli, poly)?;
            let mode: GapMode = mode.parse()?;
            let rows = density_profile(&cfg.poly, ns, mode);
            if *csv {
                out.write_all(profile_csv(&rows).as_bytes())
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            } else {
                emit(out, &rows)?;
            }
        }
        Command::Verify { level, seed } => {
            let level: Level = level.parse().map_err(|e: Error| Usage(e.to_string()))?;
            let seed = seed.unwrap_or(crate::config::DEFAULT_SEED);
            let report = run_all(level, seed);
            for c in &report.criteria {
                let _ = writeln!(err, "{}", c.line());
            }
            emit(out, &report)?;
            return Ok(if report.passed { EXIT_OK } else { EXIT_DOMAIN });
        }
    }
    Ok(EXIT_OK)
}
