//! Batch driver. Every subcommand writes a JSON report (`"schema": 1`) to
//! `--out` or stdout and, where it produces samples, a CSV to `--csv`.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
//! 3 numerical non-convergence.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{lobachevsky_c_min, DomainSpec, DomainTag, GroupElement, MeasureMethod, Region};
use crate::gl2::{compare_routes, random_pair, PvConfig};
use crate::hadamard_bergman::{disk_preset, hb_equivalence, HbConfig};
use crate::hardy_littlewood::{kappa_1d, kappa_2d, kernel_1d, kernel_2d, norm_lower_bound, norm_upper_check};
use crate::kernels::{build_kernel, check_strong_homogeneity, preset, weak_counterexample_violation, Kernel};
use crate::operators::{
    check_convolution_reduction, check_operator_homogeneity, log_bump, sample_points, GridFunction, GridSpec,
    QuadratureGrid,
};
use crate::{expr, sampling};

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "homokernel", version, about = "Homogeneous kernel verification driver")]
pub struct Cli {
    /// Seed for every sampler.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// JSON report path (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV output path for subcommands that emit samples.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DomainArgs {
    /// cylinder | plane | gl2 | disk | poincare | bergman | lobachevsky, or a
    /// JSON object {"tag", "R", "C", "alpha"}.
    #[arg(long, default_value = "plane")]
    pub domain: String,
    #[arg(long = "C", allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long = "R")]
    pub radius: Option<f64>,
}

impl DomainArgs {
    pub fn resolve(&self) -> Result<DomainSpec> {
        if self.domain.trim_start().starts_with('{') {
            return DomainSpec::from_json(&self.domain);
        }
        match self.domain.as_str() {
            "cylinder" => Ok(DomainSpec::cylinder()),
            "plane" => Ok(DomainSpec::punctured_plane()),
            "gl2" => Ok(DomainSpec::gl2_plane()),
            "disk" => DomainSpec::radial_disk(self.radius, self.c.unwrap_or(0.0)),
            "poincare" => DomainSpec::poincare(self.c.unwrap_or(0.0)),
            "bergman" => DomainSpec::bergman(self.alpha.unwrap_or(0.0), self.c.unwrap_or(1.0)),
            "lobachevsky" => DomainSpec::lobachevsky(self.c.unwrap_or_else(lobachevsky_c_min)),
            other => Err(Error::Config(format!("unknown domain `{other}`"))),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KernelArgs {
    /// Generating function preset (one, angular:a=cos, angular:a=one,
    /// gl2:antisym, gl2:abs).
    #[arg(long = "F")]
    pub preset: Option<String>,
    /// Generating function expression in eta (or u) and psi.
    #[arg(long, conflicts_with = "preset")]
    pub expr: Option<String>,
}

impl KernelArgs {
    pub fn resolve(&self, d: &DomainSpec) -> Result<Kernel> {
        let f = match (&self.preset, &self.expr) {
            (_, Some(e)) => expr::generating_function(e)?,
            (Some(p), None) => preset(p)?,
            (None, None) if d.tag() == DomainTag::GL2Plane => preset("gl2:antisym")?,
            (None, None) => preset("one")?,
        };
        build_kernel(d, &f)
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GroupArgs {
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Row-major 2×2 matrix `a,b,c,d` on the GL(2) plane.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub matrix: Option<Vec<f64>>,
}

impl GroupArgs {
    pub fn resolve(&self, d: &DomainSpec) -> Result<GroupElement> {
        match (d.tag(), &self.matrix) {
            (DomainTag::GL2Plane, Some(m)) if m.len() == 4 => GroupElement::mat2([[m[0], m[1]], [m[2], m[3]]]),
            (DomainTag::GL2Plane, _) => Err(Error::Config("the GL(2) plane needs --matrix a,b,c,d".into())),
            (_, Some(_)) => Err(Error::Config("--matrix only applies to the GL(2) plane".into())),
            _ => Ok(GroupElement::cyl(self.a, self.phi)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Method {
    Quad,
    Mc,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// μ(gA)/μ(A) against the character of g.
    VerifyDilation {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        group: GroupArgs,
        /// Annulus radii on polar domains, z-range on the cylinder, square
        /// side on the GL(2) plane (first value).
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.4")]
        region: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Method::Quad)]
        method: Method,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// Kernel values on all pairs of `n` sampled points (CSV).
    BuildKernel {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Sampled strong homogeneity λ_g K(gx, gy) = K(x, y).
    CheckHomogeneity {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// L_g K = K L_g on a quadrature grid.
    CheckOperator {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// U_p K U_p⁻¹ commutes with L_g without a character.
    CheckReduction {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// κ = ∫ K(1, y) y^{-1/p} dy and norm bounds for a Hardy–Littlewood kernel.
    HlBound {
        #[arg(long, default_value = "hlp:1/(x+y)")]
        kernel: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Truncation N of the lower-bound test family.
        #[arg(long, default_value_t = 1e3)]
        n: f64,
        /// Random test functions for the upper-bound check (0 skips it).
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
    /// Direct and composed evaluation of the GL⁺(2) operator (CSV).
    Gl2Demo {
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps_rel: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Hadamard–Bergman convolution against its kernel operator.
    HbCheck {
        #[arg(long, default_value = "trig:seed=1")]
        g: String,
        #[arg(long, default_value = "bump")]
        f: String,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// The shift breaking strong homogeneity of the floor kernel.
    Counterexample {
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        y: f64,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 128)]
    pub n_first: usize,
    #[arg(long, default_value_t = 128)]
    pub n_theta: usize,
    #[arg(long, default_value_t = 6)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyDilation { .. } => "verify-dilation",
            Command::BuildKernel { .. } => "build-kernel",
            Command::CheckHomogeneity { .. } => "check-homogeneity",
            Command::CheckOperator { .. } => "check-operator",
            Command::CheckReduction { .. } => "check-reduction",
            Command::HlBound { .. } => "hl-bound",
            Command::Gl2Demo { .. } => "gl2-demo",
            Command::HbCheck { .. } => "hb-check",
            Command::Counterexample { .. } => "counterexample",
        }
    }
}

/// Result of a subcommand before serialization.
pub struct Outcome {
    pub pass: bool,
    pub result: Value,
    pub csv: Option<String>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoViolation(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn region_for(d: &DomainSpec, r: &[f64]) -> Result<Region> {
    let get = |i: usize| r.get(i).copied().ok_or_else(|| Error::Config("--region needs two values".into()));
    Ok(match d.tag() {
        DomainTag::GL2Plane => Region::Rect { lo: [0.5, 0.5], hi: [0.5 + get(0)?, 0.5 + get(0)?] },
        DomainTag::Cylinder => Region::Rect { lo: [get(0)?, 0.0], hi: [get(1)?, 1.0] },
        _ => Region::annulus(get(0)?, get(1)?),
    })
}

fn operator_setup(d: &DomainSpec, grid: &GridArgs, seed: u64) -> Result<(GridFunction, Vec<crate::geometry::Point>)> {
    if d.tag() == DomainTag::GL2Plane {
        return Err(Error::Config("use gl2-demo for the GL(2) plane".into()));
    }
    let spec = GridSpec::default().with_resolution(grid.n_first, grid.n_theta);
    let gr = Arc::new(QuadratureGrid::for_domain(d, spec)?);
    let f = GridFunction::from_analytic(gr, log_bump(*d, 0.0, 0.5))?;
    Ok((f, sample_points(d, grid.points, seed)))
}

pub fn execute(cmd: &Command, seed: u64) -> Result<Outcome> {
    match cmd {
        Command::VerifyDilation { domain, group, region, method, samples } => {
            let d = domain.resolve()?;
            let g = group.resolve(&d)?;
            let m = match method {
                Method::Quad => MeasureMethod::quadrature(),
                Method::Mc => MeasureMethod::MonteCarlo { samples: *samples, seed },
            };
            let rep = d.verify_dilation(&g, &region_for(&d, region)?, m)?;
            Ok(Outcome { pass: rep.pass, result: json!({ "domain": d, "g": g, "report": rep }), csv: None })
        }
        Command::BuildKernel { domain, kernel, n } => {
            let d = domain.resolve()?;
            let k = kernel.resolve(&d)?;
            let pts = sample_points(&d, *n, seed);
            let mut csv = String::from("x0,x1,y0,y1,re,im\n");
            let mut failed = 0usize;
            for x in &pts {
                for y in &pts {
                    match k.eval(x, y) {
                        Ok(v) => csv.push_str(&format!("{:?},{:?},{:?},{:?},{:?},0\n", x.0[0], x.0[1], y.0[0], y.0[1], v)),
                        Err(_) => failed += 1,
                    }
                }
            }
            let result = json!({ "domain": d, "kernel": k.name(), "pairs": pts.len() * pts.len(), "skipped": failed });
            Ok(Outcome { pass: true, result, csv: Some(csv) })
        }
        Command::CheckHomogeneity { domain, kernel, samples, tol } => {
            let d = domain.resolve()?;
            let k = kernel.resolve(&d)?;
            let rep = check_strong_homogeneity(&d, &k, *samples, *tol, seed)?;
            Ok(Outcome { pass: rep.pass, result: json!({ "domain": d, "report": rep }), csv: None })
        }
        Command::CheckOperator { domain, kernel, group, grid } => {
            let d = domain.resolve()?;
            let k = kernel.resolve(&d)?;
            let g = group.resolve(&d)?;
            let (f, pts) = operator_setup(&d, grid, seed)?;
            let rep = check_operator_homogeneity(&d, &k, &g, &f, &pts, grid.tol)?;
            Ok(Outcome { pass: rep.pass, result: json!({ "domain": d, "kernel": k.name(), "report": rep }), csv: None })
        }
        Command::CheckReduction { domain, kernel, group, grid, p } => {
            let d = domain.resolve()?;
            let k = kernel.resolve(&d)?;
            let g = group.resolve(&d)?;
            let (f, pts) = operator_setup(&d, grid, seed)?;
            let rep = check_convolution_reduction(&d, &k, *p, &g, &f, &pts, grid.tol)?;
            Ok(Outcome { pass: rep.pass, result: json!({ "domain": d, "kernel": k.name(), "report": rep }), csv: None })
        }
        Command::HlBound { kernel, p, n, random } => {
            if let Ok(k) = kernel_1d(kernel) {
                let rep = kappa_1d(&k, *p)?;
                let lower = if rep.divergent { None } else { Some(norm_lower_bound(&k, *p, *n)?) };
                let upper = if *random > 0 && !rep.divergent { Some(norm_upper_check(&k, *p, *random, seed)?) } else { None };
                let pass = !rep.divergent && upper.as_ref().is_none_or(|u| u.pass);
                let result = json!({ "kernel": kernel, "p": p, "kappa": rep, "lower_bound": lower, "N": n, "upper_check": upper });
                Ok(Outcome { pass, result, csv: None })
            } else {
                let k = kernel_2d(kernel)?;
                let rep = kappa_2d(&k, *p)?;
                let lower = if rep.divergent {
                    None
                } else {
                    Some(crate::hardy_littlewood::norm_lower_bound_2d(&k, *p, *n)?)
                };
                let result = json!({ "kernel": kernel, "p": p, "kappa": rep, "lower_bound": lower, "N": n });
                Ok(Outcome { pass: !rep.divergent, result, csv: None })
            }
        }
        Command::Gl2Demo { pairs, eps_rel, tol } => {
            let cfg = PvConfig { eps_rel: *eps_rel, ..PvConfig::default() };
            let mut csv = String::from("x1,x2,direct,composed,abs_diff,homogeneity_residual\n");
            let mut worst_rel = 0.0f64;
            let mut worst_hom = 0.0f64;
            for i in 0..*pairs as u64 {
                let (bump, x) = random_pair(seed, i);
                let row = compare_routes(&bump, &x, &cfg)?;
                worst_rel = worst_rel.max(row.abs_diff / row.direct.abs());
                worst_hom = worst_hom.max(row.homogeneity);
                csv.push_str(&format!(
                    "{:?},{:?},{:?},{:?},{:?},{:?}\n",
                    row.x[0], row.x[1], row.direct, row.composed, row.abs_diff, row.homogeneity
                ));
            }
            let pass = worst_rel <= *tol && worst_hom <= *tol;
            let result = json!({ "pairs": pairs, "max_relative_diff": worst_rel, "max_homogeneity_residual": worst_hom, "tol": tol });
            Ok(Outcome { pass, result, csv: Some(csv) })
        }
        Command::HbCheck { g, f, points, tol } => {
            let (g, f) = (disk_preset(g)?, disk_preset(f)?);
            let cfg = HbConfig { tol: *tol, ..HbConfig::default() };
            let mut reports = Vec::with_capacity(*points);
            for i in 0..*points as u64 {
                let mut rng = sampling::stream_rng(seed, i);
                let z = Complex64::from_polar(sampling::log_uniform(&mut rng, 0.1, 0.95), sampling::angle(&mut rng));
                reports.push(hb_equivalence(&g, &f, z, &cfg)?);
            }
            let pass = reports.iter().all(|r| r.pass);
            Ok(Outcome { pass, result: json!({ "g": g.name(), "f": f.name(), "checks": reports }), csv: None })
        }
        Command::Counterexample { x, y } => {
            let c = weak_counterexample_violation(*x, *y)?;
            Ok(Outcome { pass: true, result: to_value(&c), csv: None })
        }
    }
}

fn write_text(path: &PathBuf, text: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Runs a parsed command line, writes its outputs, and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    if let Some(n) = std::env::var("HOMOKERNEL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    log::info!("running {}", cli.command.name());
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let (code, pass, result, csv) = match execute(&cli.command, cli.seed) {
        Ok(o) => (if o.pass { 0 } else { 1 }, o.pass, o.result, o.csv),
        Err(e) => (exit_code(&e), false, json!({ "error": e.to_string() }), None),
    };
    let report = json!({
        "schema": SCHEMA,
        "command": cli.command.name(),
        "timestamp": timestamp,
        "seed": cli.seed,
        "config": to_value(&cli.command),
        "pass": pass,
        "exit_code": code,
        "result": result,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let written = match &cli.out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    let written = written.and_then(|_| match (&cli.csv, csv) {
        (Some(p), Some(c)) => write_text(p, &c),
        _ => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("homokernel: {e}");
        return 2;
    }
    code
}

/// Parses `args` (including the program name) and runs; usage errors exit 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
