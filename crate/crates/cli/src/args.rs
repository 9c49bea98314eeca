use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use wglab_core::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "wglab", version, about = "Numerical laboratory for x^2 + p1^3 + ... + p5^3 = N")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// All representations of N
    Reps,
    /// Existence check for every even N in [lo, hi]
    VerifyRange,
    /// Local counts and densities modulo q
    Local,
    /// Singular series by Euler product and direct sum
    Sseries,
    /// Sieve density ω(d), and 𝒱(z) when --z is given
    Omega,
    /// The constants c_r
    Crconst,
    /// Rosser sandwich and sieve sums
    SieveCheck,
    /// log 2 - Σ c_r
    Margin,
    /// Diophantine counts behind the mean values
    Moments,
    /// The singular integral
    Jint,
    /// Exact Farey dissection
    Arcs,
    /// Major-arc residuals, minor-arc scan and g_r diagnostics
    Residuals,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Reps => "reps",
            Command::VerifyRange => "verify-range",
            Command::Local => "local",
            Command::Sseries => "sseries",
            Command::Omega => "omega",
            Command::Crconst => "crconst",
            Command::SieveCheck => "sieve-check",
            Command::Margin => "margin",
            Command::Moments => "moments",
            Command::Jint => "jint",
            Command::Arcs => "arcs",
            Command::Residuals => "residuals",
        }
    }
}

/// Every flag is global; each subcommand reads the ones it needs.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long = "N", global = true)]
    pub n: Option<u64>,
    #[arg(long, global = true)]
    pub lo: Option<u64>,
    #[arg(long, global = true)]
    pub hi: Option<u64>,
    #[arg(long, global = true)]
    pub r: Option<u32>,
    #[arg(long, global = true)]
    pub p: Option<u64>,
    #[arg(long, global = true)]
    pub d: Option<u64>,
    /// Sieve level
    #[arg(long = "D", global = true)]
    pub d_level: Option<f64>,
    #[arg(long, global = true)]
    pub z: Option<f64>,
    #[arg(long, global = true)]
    pub cutoff: Option<u64>,
    /// grid, mc (or dual for jint)
    #[arg(long, global = true)]
    pub method: Option<String>,
    #[arg(long, global = true)]
    pub step: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// unrestricted or paper-range
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// jsonl or csv
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "paper-constants", global = true)]
    pub paper_constants: bool,
    /// Moment (i..iv) or residual diagnostic (delta3, minor, gr, forms)
    #[arg(long, global = true)]
    pub which: Option<String>,
    #[arg(long, global = true)]
    pub q: Option<u64>,
    #[arg(long, global = true)]
    pub a: Option<u64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// A point of the circle as "a/b"
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub q0: Option<f64>,
    #[arg(long, global = true)]
    pub q1: Option<f64>,
    #[arg(long, global = true)]
    pub q2: Option<f64>,
    /// Count each ordering of the primes separately
    #[arg(long, global = true)]
    pub ordered: bool,
    /// mitm or naive
    #[arg(long, global = true)]
    pub engine: Option<String>,
    /// Flat key=value file; command-line flags take precedence
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Record ms = 0 so reruns are byte-identical
    #[arg(long = "no-timing", global = true)]
    pub no_timing: bool,
}

fn fill<T: FromStr>(slot: &mut Option<T>, file: &mut BTreeMap<String, String>, key: &str) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = file.remove(key) {
        if slot.is_none() {
            *slot = Some(v.parse().map_err(|e| Error::Validation(format!("params file: {key} = '{v}': {e}")))?);
        }
    }
    Ok(())
}

fn fill_flag(slot: &mut bool, file: &mut BTreeMap<String, String>, key: &str) -> Result<()> {
    if let Some(v) = file.remove(key) {
        let on = v.parse::<bool>().map_err(|e| Error::Validation(format!("params file: {key} = '{v}': {e}")))?;
        *slot |= on;
    }
    Ok(())
}

pub fn parse_params_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Validation(format!("params file line {}: expected key=value", i + 1)))?;
        let k = k.trim().trim_start_matches("--").to_string();
        if map.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Validation(format!("params file: duplicate key '{k}'")));
        }
    }
    Ok(map)
}

impl Flags {
    /// Fills unset flags from the params file, if one was given.
    pub fn merge_params(&mut self) -> Result<()> {
        let Some(path) = self.params.clone() else {
            return Ok(());
        };
        let text = read(&path)?;
        let mut f = parse_params_file(&text)?;
        fill(&mut self.n, &mut f, "N")?;
        fill(&mut self.lo, &mut f, "lo")?;
        fill(&mut self.hi, &mut f, "hi")?;
        fill(&mut self.r, &mut f, "r")?;
        fill(&mut self.p, &mut f, "p")?;
        fill(&mut self.d, &mut f, "d")?;
        fill(&mut self.d_level, &mut f, "D")?;
        fill(&mut self.z, &mut f, "z")?;
        fill(&mut self.cutoff, &mut f, "cutoff")?;
        fill(&mut self.method, &mut f, "method")?;
        fill(&mut self.step, &mut f, "step")?;
        fill(&mut self.samples, &mut f, "samples")?;
        fill(&mut self.seed, &mut f, "seed")?;
        fill(&mut self.mode, &mut f, "mode")?;
        fill(&mut self.format, &mut f, "format")?;
        fill(&mut self.out, &mut f, "out")?;
        fill(&mut self.which, &mut f, "which")?;
        fill(&mut self.q, &mut f, "q")?;
        fill(&mut self.a, &mut f, "a")?;
        fill(&mut self.beta, &mut f, "beta")?;
        fill(&mut self.alpha, &mut f, "alpha")?;
        fill(&mut self.q0, &mut f, "q0")?;
        fill(&mut self.q1, &mut f, "q1")?;
        fill(&mut self.q2, &mut f, "q2")?;
        fill(&mut self.engine, &mut f, "engine")?;
        fill_flag(&mut self.paper_constants, &mut f, "paper-constants")?;
        fill_flag(&mut self.ordered, &mut f, "ordered")?;
        fill_flag(&mut self.no_timing, &mut f, "no-timing")?;
        if let Some(k) = f.keys().next() {
            return Err(Error::Validation(format!("params file: unknown key '{k}'")));
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))
}
