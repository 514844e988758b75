//! Command-line front end: plant files, subcommands and JSON reports.
//!
//! A plant file is JSON with ascending coefficients:
//! `{"num": [0, 1], "den": [-1, 1], "delay": 1.0, "domain": "half-plane"}`
//! (`delay` defaults to 0 and `domain` to `half-plane`). Factor matrices can
//! be given instead as `{"G": [[...]], "Gtilde": [[...]]}` with plant
//! objects as entries.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{NuError, Result};
use crate::factorization::{normalize, CoprimeFactors, GraphSymbol, TfMatrix};
use crate::index::circle_winding;
use crate::numetric::{nu_classical_with_floor, nu_infinity, AnnulusScan, PlantInput};
use crate::poly::Poly;
use crate::stability::{closed_loop, margin, robustness_check};
use crate::transfer::{Domain, TransferFunction};

/// On-disk form of a transfer function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    #[serde(default)]
    pub delay: f64,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

fn default_domain() -> Domain {
    Domain::HalfPlane
}

impl PlantSpec {
    /// Validates and reduces to lowest terms; the count is the number of
    /// cancelled common roots.
    pub fn to_transfer_function(&self) -> Result<(TransferFunction, usize)> {
        if self.num.is_empty() || self.den.is_empty() {
            return Err(NuError::validation("num and den must be non-empty"));
        }
        TransferFunction::reduced(
            Poly::new(self.num.clone()),
            Poly::new(self.den.clone()),
            self.delay,
            self.domain,
        )
    }
}

impl From<&TransferFunction> for PlantSpec {
    fn from(tf: &TransferFunction) -> Self {
        PlantSpec {
            num: tf.numerator().coeffs().to_vec(),
            den: tf.denominator().coeffs().to_vec(),
            delay: tf.delay(),
            domain: tf.domain(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolSpec {
    #[serde(rename = "G")]
    g: Vec<Vec<PlantSpec>>,
    #[serde(rename = "Gtilde")]
    gtilde: Vec<Vec<PlantSpec>>,
}

/// A parsed plant together with any warnings raised on the way.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        NuError::Parse(format!(
            "{origin}: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn read_source(source: &str) -> Result<(String, String)> {
    if source.trim_start().starts_with('{') {
        Ok((source.to_string(), "<inline>".to_string()))
    } else {
        let text = fs::read_to_string(source)
            .map_err(|e| NuError::Parse(format!("{source}: {e}")))?;
        Ok((text, source.to_string()))
    }
}

fn plant_from_text(text: &str, origin: &str) -> Result<Parsed<TransferFunction>> {
    let spec: PlantSpec = parse_json(text, origin)?;
    let (tf, cancelled) = spec.to_transfer_function()?;
    let warnings = if cancelled > 0 {
        vec![format!(
            "{origin}: cancelled {cancelled} common root(s); reduced to lowest terms"
        )]
    } else {
        Vec::new()
    };
    Ok(Parsed { value: tf, warnings })
}

/// Reads a plant from a file path or inline JSON text.
pub fn parse_plant(source: &str) -> Result<Parsed<TransferFunction>> {
    let (text, origin) = read_source(source)?;
    plant_from_text(&text, &origin)
}

/// Like [`parse_plant`] but also accepts factor-matrix files.
pub fn parse_plant_input(source: &str) -> Result<Parsed<PlantInput>> {
    let (text, origin) = read_source(source)?;
    let probe: serde_json::Value = parse_json(&text, &origin)?;
    if probe.get("G").is_none() {
        let p = plant_from_text(&text, &origin)?;
        return Ok(Parsed {
            value: PlantInput::Plant(p.value),
            warnings: p.warnings,
        });
    }
    let spec: SymbolSpec = parse_json(&text, &origin)?;
    let mut warnings = Vec::new();
    let mut matrix = |rows: Vec<Vec<PlantSpec>>| -> Result<TfMatrix> {
        let rows = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| {
                        let (tf, k) = e.to_transfer_function()?;
                        if k > 0 {
                            warnings.push(format!("{origin}: cancelled {k} common root(s) in an entry"));
                        }
                        Ok(tf)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        TfMatrix::from_rows(rows)
    };
    let g = matrix(spec.g)?;
    let gtilde = matrix(spec.gtilde)?;
    Ok(Parsed {
        value: PlantInput::Symbol(GraphSymbol::from_matrices(g, gtilde)?),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verbosity {
    Quiet,
    Normal,
    Verbose,
}

/// Scan settings and output options shared by the subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k_min: u32,
    pub k_max: u32,
    pub samples0: usize,
    pub eps_inv: f64,
    pub tail: usize,
    pub output_path: Option<PathBuf>,
    pub verbosity: Verbosity,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k_min: 3,
            k_max: 14,
            samples0: 1024,
            eps_inv: 1e-9,
            tail: 3,
            output_path: None,
            verbosity: Verbosity::Normal,
        }
    }
}

impl RunConfig {
    pub fn scan(&self) -> Result<AnnulusScan> {
        AnnulusScan::dyadic(self.k_min, self.k_max, self.samples0, self.eps_inv, self.tail)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nu-metric",
    version,
    about = "Extended nu-metric between stabilizable plants",
    long_about = "Extended nu-metric between stabilizable plants.\n\n\
Plants are JSON objects with ascending coefficient order:\n  \
{\"num\": [0, 1], \"den\": [-1, 1], \"delay\": 1.0, \"domain\": \"half-plane\"}\n\
is exp(-s) s/(s - 1). Arguments may be file paths or inline JSON.\n\
Reports are printed to stdout as JSON.\n\n\
NU_METRIC_THREADS caps the number of worker threads."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Smallest dyadic exponent: radii are 1 - 2^-k
    #[arg(long, default_value_t = 3)]
    k_min: u32,
    /// Largest dyadic exponent
    #[arg(long, default_value_t = 14)]
    k_max: u32,
    /// Samples per circle (power of two)
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    /// Invertibility floor for determinants
    #[arg(long, default_value_t = 1e-9)]
    eps_inv: f64,
    /// Number of outermost radii that must agree
    #[arg(long, default_value_t = 3)]
    tail: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Also write the JSON report to this file
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// More diagnostics on stderr
    #[arg(short, long, conflicts_with = "quiet")]
    verbose: bool,
    /// Suppress warnings
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between two plants
    Distance {
        p1: String,
        p2: String,
        /// Classical (unit-circle) metric; rational plants only
        #[arg(long)]
        classical: bool,
        /// Exit with status 1 if the limit did not converge
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Normalized coprime factors of a plant
    Factorize {
        plant: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Winding number of a function around a circle
    Winding {
        function: String,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        eps_inv: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Stability margin of a plant/controller pair
    Margin {
        plant: String,
        controller: String,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Robustness inequality for a nominal plant, a perturbed plant and a controller
    Robust {
        p0: String,
        p: String,
        controller: String,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn config(scan: Option<&ScanArgs>, out: &OutputArgs) -> RunConfig {
    let mut cfg = RunConfig {
        output_path: out.json.clone(),
        verbosity: if out.quiet {
            Verbosity::Quiet
        } else if out.verbose {
            Verbosity::Verbose
        } else {
            Verbosity::Normal
        },
        ..RunConfig::default()
    };
    if let Some(s) = scan {
        cfg.k_min = s.k_min;
        cfg.k_max = s.k_max;
        cfg.samples0 = s.samples;
        cfg.eps_inv = s.eps_inv;
        cfg.tail = s.tail;
    }
    cfg
}

fn factors_json(f: &CoprimeFactors) -> serde_json::Value {
    json!({
        "N": PlantSpec::from(&f.n),
        "D": PlantSpec::from(&f.d),
        "normalization_residual": f.normalization_residual,
        "corona_gap": f.corona_gap,
    })
}

struct Outcome {
    report: serde_json::Value,
    verdict_failed: bool,
}

fn execute(cmd: &Command, warnings: &mut Vec<String>) -> Result<(Outcome, RunConfig)> {
    let mut plant = |src: &str| -> Result<TransferFunction> {
        let p = parse_plant(src)?;
        warnings.extend(p.warnings);
        Ok(p.value)
    };
    match cmd {
        Command::Distance {
            p1,
            p2,
            classical,
            strict,
            scan,
            out,
        } => {
            let cfg = config(Some(scan), out);
            if *classical {
                let a = plant(p1)?;
                let b = plant(p2)?;
                let r = nu_classical_with_floor(&a, &b, cfg.samples0, cfg.eps_inv)?;
                let report = json!({ "metric": "classical", "result": r });
                return Ok((Outcome { report, verdict_failed: false }, cfg));
            }
            let scan = cfg.scan()?;
            let a = parse_plant_input(p1)?;
            let b = parse_plant_input(p2)?;
            warnings.extend(a.warnings);
            warnings.extend(b.warnings);
            let r = nu_infinity(&a.value, &b.value, &scan)?;
            if let Some(w) = &r.warning {
                warnings.push(w.clone());
            }
            let verdict_failed = *strict && !r.converged;
            let report = json!({ "metric": "nu-infinity", "config": scan, "result": r });
            Ok((Outcome { report, verdict_failed }, cfg))
        }
        Command::Factorize { plant: src, out } => {
            let cfg = config(None, out);
            let f = normalize(&plant(src)?)?;
            Ok((
                Outcome {
                    report: factors_json(&f),
                    verdict_failed: false,
                },
                cfg,
            ))
        }
        Command::Winding {
            function,
            radius,
            samples,
            eps_inv,
            out,
        } => {
            let cfg = config(None, out);
            if !(*radius > 0.0 && *radius <= 1.0) {
                return Err(NuError::validation("radius must lie in (0, 1]"));
            }
            let f = plant(function)?;
            let eval = |z: Complex64| f.evaluate(z);
            let w = circle_winding(&eval, *radius, *samples, *eps_inv)?;
            let report = json!({ "radius": radius, "samples": samples, "result": w });
            Ok((Outcome { report, verdict_failed: false }, cfg))
        }
        Command::Margin {
            plant: p,
            controller,
            scan,
            out,
        } => {
            let cfg = config(Some(scan), out);
            let scan = cfg.scan()?;
            let cl = closed_loop(&plant(p)?, &plant(controller)?)?;
            let m = margin(&cl, &scan)?;
            Ok((
                Outcome {
                    report: json!({ "config": scan, "result": m }),
                    verdict_failed: false,
                },
                cfg,
            ))
        }
        Command::Robust {
            p0,
            p,
            controller,
            scan,
            out,
        } => {
            let cfg = config(Some(scan), out);
            let scan = cfg.scan()?;
            let r = robustness_check(&plant(p0)?, &plant(p)?, &plant(controller)?, &scan)?;
            Ok((
                Outcome {
                    report: json!({ "config": scan, "result": r }),
                    verdict_failed: false,
                },
                cfg,
            ))
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("NU_METRIC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs the CLI, writing the report to `stdout` and diagnostics to `stderr`.
/// Returns the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    init_threads();
    let mut warnings = Vec::new();
    let (outcome, cfg) = match execute(&cli.command, &mut warnings) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    if cfg.verbosity != Verbosity::Quiet {
        for w in &warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
    }
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    let _ = writeln!(stdout, "{text}");
    if let Some(path) = &cfg.output_path {
        if let Err(e) = fs::write(path, format!("{text}\n")) {
            let _ = writeln!(stderr, "error: writing {}: {e}", path.display());
            return 2;
        }
        if cfg.verbosity == Verbosity::Verbose {
            let _ = writeln!(stderr, "wrote {}", path.display());
        }
    }
    if outcome.verdict_failed {
        let _ = writeln!(stderr, "error: verdict failed under --strict");
        1
    } else {
        0
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
