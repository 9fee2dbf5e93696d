//! Command-line front end.
//!
//! Every numeric option can also come from a `key = value` file given with
//! `--config`; options on the command line win. Exit codes: 0 success,
//! 1 validation failure, 2 input or I/O error, 3 solver failure,
//! 4 ill-defined phase.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::geomphase::{
    circle_distance, geometric_phase, phase_converged, state_path, sweep,
    ContourSpec, DEFAULT_STEPS,
};
use crate::report::{curves_csv, roots_csv, sweep_csv, PhaseRecord};
use crate::spectrum::{
    curve_samples, enumerate_states, sorted_free_roots, Family, SystemConfig,
};
use crate::tmatrix::{make_defect, DefectParams};
use crate::wavefun::{build_state, inner_product, inner_product_quadrature, QUADRATURE_ORDER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_ILL_DEFINED: i32 = 4;

/// Environment variable overriding the sweep thread count.
pub const THREADS_ENV: &str = "RINGPHASE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ringphase",
    version,
    about = "Spectrum and geometric phase of two bosons on a ring with a transfer-matrix defect"
)]
pub struct Cli {
    /// key = value file supplying defaults for the options below
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace both families of spectral curves and list their intersections
    Curves(CurvesArgs),
    /// Enumerate roots (i, j) up to a maximum index
    Roots(RootsArgs),
    /// Geometric phase of one state around the alpha cycle
    Phase(PhaseArgs),
    /// Phase over a grid of barrier strengths and interaction strengths
    Sweep(SweepArgs),
    /// Run the fast self-test suite
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SystemArgs {
    /// barrier strength [default: 2]
    #[arg(long)]
    pub eta: Option<f64>,
    /// defect phase shift in radians [default: 0]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// interaction strength [default: 0.1]
    #[arg(long)]
    pub c: Option<f64>,
    /// ring circumference [default: 5]
    #[arg(long = "L")]
    pub l: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// lower edge of the square momentum window [default: 0.01]
    #[arg(long)]
    pub k_min: Option<f64>,
    /// upper edge of the square momentum window [default: 6]
    #[arg(long)]
    pub k_max: Option<f64>,
    /// grid spacing for the sign-change scan [default: 0.01]
    #[arg(long)]
    pub step: Option<f64>,
    /// directory receiving curves.csv and roots.csv [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct RootsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// largest state index [default: 5]
    #[arg(long)]
    pub max_index: Option<usize>,
    /// output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PhaseArgs {
    /// state index pair "i,j" [default: 1,3]
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// initial number of alpha steps, doubled until converged [default: 256]
    #[arg(long)]
    pub steps: Option<usize>,
    /// length of the alpha contour [default: 2π]
    #[arg(long)]
    pub alpha_span: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    /// state index pair "i,j" [default: 1,3]
    #[arg(long)]
    pub state: Option<String>,
    /// comma-separated barrier strengths [default: 0.5,1,2,3]
    #[arg(long)]
    pub etas: Option<String>,
    /// comma-separated interaction strengths; overrides --c-min/--c-max/--c-count
    #[arg(long)]
    pub c_grid: Option<String>,
    /// [default: 0]
    #[arg(long)]
    pub c_min: Option<f64>,
    /// [default: 30]
    #[arg(long)]
    pub c_max: Option<f64>,
    /// number of evenly spaced c values [default: 61]
    #[arg(long)]
    pub c_count: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// [default: 256]
    #[arg(long)]
    pub steps: Option<usize>,
    /// worker threads; also read from RINGPHASE_THREADS
    #[arg(long)]
    pub threads: Option<usize>,
    /// output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// tighten one tolerance below what any result can meet
    #[arg(long, hide = true)]
    pub inject_failure: bool,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn io(context: &str, e: std::io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            message: format!("{context}: {e}"),
        }
    }

    fn input(message: String) -> Self {
        CliError {
            code: EXIT_IO,
            message,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IllDefinedGlobalPhase { .. } => EXIT_ILL_DEFINED,
            Error::InvalidParameter(_) | Error::Configuration(_) | Error::Domain { .. } => EXIT_IO,
            _ => EXIT_SOLVER,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Values from a config file, tracking which keys a command consumed.
#[derive(Debug, Default)]
struct Settings {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl Settings {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(&format!("cannot read {}", path.display()), e))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::input(format!("config line {}: expected key = value", n + 1)));
            };
            let key = key.trim().replace('_', "-");
            values.insert(key, value.trim().to_string());
        }
        Ok(Settings {
            values,
            used: RefCell::default(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.values.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        let from_file = self.raw(key);
        if flag.is_some() {
            return Ok(flag);
        }
        match from_file {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::input(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    fn string(&self, flag: Option<String>, key: &str, default: &str) -> String {
        let from_file = self.raw(key).map(str::to_string);
        flag.or(from_file).unwrap_or_else(|| default.to_string())
    }

    fn path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        let from_file = self.raw(key).map(PathBuf::from);
        flag.or(from_file)
    }

    fn reject_unused(&self) -> CliResult<()> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::input(format!("unknown config keys: {}", unknown.join(", "))))
        }
    }
}

fn system(args: &SystemArgs, s: &Settings) -> CliResult<SystemConfig> {
    let eta = s.get(args.eta, "eta", 2.0)?;
    let alpha = s.get(args.alpha, "alpha", 0.0)?;
    let c = s.get(args.c, "c", 0.1)?;
    let l = s.get(args.l, "L", 5.0)?;
    Ok(SystemConfig::new(c, l, eta, alpha)?)
}

pub fn parse_state(text: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::input(format!("state must look like \"i,j\" with 1-based indices, got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 {
        return Err(bad());
    }
    Ok((i, j))
}

fn parse_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::input(format!("{what}: cannot parse {t:?}")))
        })
        .collect()
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(&format!("cannot write {}", p.display()), e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("cannot write output", e)),
    }
}

/// Parse `args` and run the selected command, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let settings = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Curves(a) => cmd_curves(&a, &settings),
        Command::Roots(a) => cmd_roots(&a, &settings, out),
        Command::Phase(a) => cmd_phase(&a, &settings, out),
        Command::Sweep(a) => cmd_sweep(&a, &settings, out, err),
        Command::Validate(a) => {
            settings.reject_unused()?;
            Ok(cmd_validate(a.inject_failure, out))
        }
    }
}

fn cmd_curves(a: &CurvesArgs, s: &Settings) -> CliResult<i32> {
    let cfg = system(&a.system, s)?;
    let k_min = s.get(a.k_min, "k-min", 0.01)?;
    let k_max = s.get(a.k_max, "k-max", 6.0)?;
    let step = s.get(a.step, "step", 0.01)?;
    let dir = s.path(a.out_dir.clone(), "out-dir").unwrap_or_else(|| PathBuf::from("."));
    s.reject_unused()?;
    if !(k_min > 0.0) || !k_min.is_finite() || !k_max.is_finite() {
        return Err(CliError::input(format!("window [{k_min}, {k_max}] must be finite with k-min > 0")));
    }
    if !(step > 0.0) {
        return Err(CliError::input(format!("step must be positive, got {step}")));
    }

    let window = (k_min, k_max);
    let vertical = curve_samples(&cfg, Family::Vertical, window, step)?;
    let horizontal = curve_samples(&cfg, Family::Horizontal, window, step)?;

    // every free root below k_max seeds a curve index
    let guess = (k_max.max(0.0) * cfg.l / TAU).ceil() as usize * 2 + 4;
    let free = sorted_free_roots(cfg.defect.eta, cfg.defect.alpha, cfg.l, guess)?;
    let count = free.iter().filter(|&&k| k <= k_max).count();
    let roots = if count == 0 || k_max < k_min {
        Vec::new()
    } else {
        enumerate_states(&cfg, count)?
            .into_values()
            .filter(|p| [p.k1, p.k2].iter().all(|k| (k_min..=k_max).contains(k)))
            .collect()
    };

    let write = |name: &str, text: String| -> CliResult<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(&format!("cannot write {}", path.display()), e))
    };
    write("curves.csv", curves_csv(&vertical, &horizontal))?;
    write("roots.csv", roots_csv(&roots))?;
    Ok(EXIT_OK)
}

fn cmd_roots(a: &RootsArgs, s: &Settings, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = system(&a.system, s)?;
    let max_index = s.get(a.max_index, "max-index", 5)?;
    let path = s.path(a.out.clone(), "out");
    s.reject_unused()?;
    let states = enumerate_states(&cfg, max_index)?;
    emit(out, path.as_deref(), &roots_csv(states.values()))?;
    Ok(EXIT_OK)
}

fn cmd_phase(a: &PhaseArgs, s: &Settings, out: &mut dyn Write) -> CliResult<i32> {
    let state = parse_state(&s.string(a.state.clone(), "state", "1,3"))?;
    let eta = s.get(a.eta, "eta", 2.0)?;
    let c = s.get(a.c, "c", 0.1)?;
    let l = s.get(a.l, "L", 5.0)?;
    let steps = s.get(a.steps, "steps", DEFAULT_STEPS)?;
    let span = s.get(a.alpha_span, "alpha-span", TAU)?;
    let format = match s.string(a.format.map(|f| format!("{f:?}").to_lowercase()), "format", "csv").as_str() {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(CliError::input(format!("unknown format {other:?}"))),
    };
    let path = s.path(a.out.clone(), "out");
    s.reject_unused()?;

    let spec = ContourSpec {
        steps,
        alpha_span: span,
        ..ContourSpec::new(state, eta, c, l)
    };
    spec.validate()?;
    let (record, code) = match phase_converged(&spec) {
        Ok(r) => (PhaseRecord::new(state, eta, c, l, &r), EXIT_OK),
        Err(Error::IllDefinedGlobalPhase { magnitude }) => (
            PhaseRecord::failed(state, eta, c, l, "ill_defined_global_phase", magnitude),
            EXIT_ILL_DEFINED,
        ),
        Err(e) => return Err(e.into()),
    };
    let text = match format {
        Format::Csv => record.csv(),
        Format::Json => record.json(),
    };
    emit(out, path.as_deref(), &text)?;
    Ok(code)
}

fn thread_count(flag: Option<usize>, s: &Settings) -> CliResult<Option<usize>> {
    let from_file: Option<usize> = s.opt(None, "threads")?;
    if flag.is_some() {
        return Ok(flag);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n = v
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        return Ok(Some(n));
    }
    Ok(from_file)
}

fn cmd_sweep(a: &SweepArgs, s: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let state = parse_state(&s.string(a.state.clone(), "state", "1,3"))?;
    let etas = parse_list(&s.string(a.etas.clone(), "etas", "0.5,1,2,3"), "etas")?;
    let c_min = s.get(a.c_min, "c-min", 0.0)?;
    let c_max = s.get(a.c_max, "c-max", 30.0)?;
    let c_count = s.get(a.c_count, "c-count", 61)?;
    let explicit = s.opt(a.c_grid.clone(), "c-grid")?;
    let l = s.get(a.l, "L", 5.0)?;
    let steps = s.get(a.steps, "steps", DEFAULT_STEPS)?;
    let threads = thread_count(a.threads, s)?;
    let path = s.path(a.out.clone(), "out");
    s.reject_unused()?;

    let c_grid = match explicit {
        Some(list) => parse_list(&list, "c-grid")?,
        None if c_count == 1 => vec![c_min],
        None if c_count >= 2 => (0..c_count)
            .map(|n| c_min + (c_max - c_min) * n as f64 / (c_count - 1) as f64)
            .collect(),
        None => return Err(CliError::input("c-count must be at least 1".into())),
    };
    for &eta in &etas {
        ContourSpec::new(state, eta, c_grid[0], l).with_steps(steps).validate()?;
    }
    for &c in &c_grid {
        ContourSpec::new(state, etas[0], c, l).with_steps(steps).validate()?;
    }

    let rows = match threads {
        Some(0) => return Err(CliError::input("thread count must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::input(format!("cannot start {n} threads: {e}")))?;
            pool.install(|| sweep(state, &etas, &c_grid, l, steps))?
        }
        None => sweep(state, &etas, &c_grid, l, steps)?,
    };
    emit(out, path.as_deref(), &sweep_csv(&rows))?;

    let ok = rows.iter().filter(|r| r.ok()).count();
    if ok * 10 >= rows.len() * 9 {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(err, "error: only {ok} of {} sweep cells succeeded", rows.len());
        Ok(EXIT_SOLVER)
    }
}

/// One line of the self-test table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Low-discrepancy points in `[0, 1)`; deterministic stand-in for random
/// sampling.
fn weyl(n: usize, generator: f64) -> f64 {
    (n as f64 * generator).fract()
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const SILVER: f64 = 0.414_213_562_373_095_1;

fn check<F>(name: &'static str, run: F) -> Check
where
    F: FnOnce() -> crate::Result<(bool, String)>,
{
    match run() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Fast acceptance subset run by `validate`.
pub fn validation_checks(inject_failure: bool) -> Vec<Check> {
    let group_tol = if inject_failure { -1.0 } else { 1e-12 };
    vec![
        check("group invariant", || {
            let mut worst = 0.0f64;
            for n in 1..=1000 {
                let p = DefectParams::new(5.0 * weyl(n, GOLDEN), TAU * weyl(n, SILVER))?;
                worst = worst.max(make_defect(p)?.group_defect());
            }
            Ok((worst < group_tol, format!("max ||u|^2 - |v|^2 - 1| = {worst:.2e}")))
        }),
        check("free-limit roots", || {
            let mut worst = 0.0f64;
            for eta in [0.5, 2.0, 4.0] {
                for alpha in [0.0, 1.0, 3.0] {
                    let cfg = SystemConfig::new(0.0, 5.0, eta, alpha)?;
                    let exact = sorted_free_roots(eta, alpha, 5.0, 4)?;
                    for ((i, j), p) in enumerate_states(&cfg, 4)? {
                        worst = worst
                            .max((p.k1 - exact[i - 1]).abs())
                            .max((p.k2 - exact[j - 1]).abs());
                    }
                }
            }
            Ok((worst < 1e-10, format!("max deviation {worst:.2e}")))
        }),
        check("quadrature cross-check", || {
            let cfg = SystemConfig::new(0.1, 5.0, 2.0, 0.0)?;
            let states = enumerate_states(&cfg, 3)?;
            let waves: Vec<_> = [(1, 3), (2, 2), (3, 1)]
                .iter()
                .map(|k| build_state(&states[k], &cfg))
                .collect::<crate::Result<_>>()?;
            let mut worst = 0.0f64;
            for a in &waves {
                for b in &waves {
                    let exact = inner_product(a, b)?;
                    let quad = inner_product_quadrature(a, b, QUADRATURE_ORDER)?;
                    worst = worst.max((exact - quad).norm() / exact.norm().max(1.0));
                }
            }
            Ok((worst < 1e-8, format!("max relative difference {worst:.2e}")))
        }),
        check("gauge invariance", || {
            let spec = ContourSpec::new((1, 3), 2.0, 0.1, 5.0).with_steps(16);
            let path = state_path(&spec)?;
            let base = geometric_phase(&path)?.theta_g;
            let mut worst = 0.0f64;
            for trial in 0..10 {
                let shifted: Vec<_> = path
                    .iter()
                    .enumerate()
                    .map(|(n, w)| w.rephased(TAU * weyl(n + 17 * trial + 1, GOLDEN)))
                    .collect();
                worst = worst.max(circle_distance(geometric_phase(&shifted)?.theta_g, base));
            }
            Ok((worst < 1e-12, format!("max phase change {worst:.2e}")))
        }),
    ]
}

fn cmd_validate(inject_failure: bool, out: &mut dyn Write) -> i32 {
    let checks = validation_checks(inject_failure);
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        let _ = writeln!(
            out,
            "{:<width$}  {}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

#[cfg(test)]
mod runs;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_parsing() {
        assert_eq!(parse_state("1,3").unwrap(), (1, 3));
        assert_eq!(parse_state(" 2 , 2 ").unwrap(), (2, 2));
        for bad in ["1", "0,3", "a,b", "1,3,4"] {
            assert!(parse_state(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_file_and_flag_precedence() {
        let s = Settings::parse("# recipe\neta = 3\nk_max=2 # trailing\n\nL = 6\n").unwrap();
        assert_eq!(s.get(None, "eta", 1.0).unwrap(), 3.0);
        assert_eq!(s.get(Some(0.5), "eta", 1.0).unwrap(), 0.5);
        assert_eq!(s.get(None, "k-max", 1.0).unwrap(), 2.0);
        assert_eq!(s.get(None, "c", 0.1).unwrap(), 0.1);
        assert_eq!(s.get(None, "L", 5.0).unwrap(), 6.0);
        assert!(s.reject_unused().is_ok());
        let extra = Settings::parse("colour = red\n").unwrap();
        assert!(extra.reject_unused().is_err());
        assert!(Settings::parse("no separator\n").is_err());
        let typed = Settings::parse("eta = two\n").unwrap();
        assert!(typed.get(None, "eta", 1.0).is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::IllDefinedGlobalPhase { magnitude: 0.0 }).code, EXIT_ILL_DEFINED);
        assert_eq!(CliError::from(Error::InvalidParameter("x".into())).code, EXIT_IO);
        assert_eq!(
            CliError::from(Error::Enumeration { i: 9, j: 9, c: 0.0, reason: String::new() }).code,
            EXIT_SOLVER
        );
    }

    #[test]
    fn weyl_points_fill_the_unit_interval() {
        let mut bins = [0usize; 10];
        for n in 1..=1000 {
            bins[(weyl(n, GOLDEN) * 10.0) as usize] += 1;
        }
        assert!(bins.iter().all(|&b| (90..=110).contains(&b)));
    }
}
