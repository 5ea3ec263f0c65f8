//! Hadamard–Bergman convolution `(g ⋆ f)(z) = ∫_𝔻 g(w) f(z w̄) dμ(w)` on the
//! unit disk with normalized area measure, and its realization as an
//! integral operator with the piecewise kernel
//! `K(z, w) = g(w̄/z̄)/|z|²` for `|w| < |z|`, `0` otherwise.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::kernels::{check_strong_homogeneity, HomogeneityReport, Kernel};
use crate::operators::{apply_operator, GridFunction, GridKind, GridSpec, QuadratureGrid};
use crate::sampling::stream_rng;

type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A complex function on the disk, optionally with its Taylor coefficients
/// `f(w) = Σ cₙ wⁿ`.
#[derive(Clone)]
pub struct DiskFunction {
    name: String,
    eval: ComplexFn,
    monomials: Option<Vec<Complex64>>,
}

impl fmt::Debug for DiskFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiskFunction").field("name", &self.name).field("monomials", &self.monomials).finish()
    }
}

impl DiskFunction {
    pub fn new(name: impl Into<String>, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        DiskFunction { name: name.into(), eval: Arc::new(f), monomials: None }
    }

    pub fn polynomial(name: impl Into<String>, coeffs: Vec<Complex64>) -> Self {
        let c = coeffs.clone();
        let eval = move |w: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * w + a);
        DiskFunction { name: name.into(), eval: Arc::new(eval), monomials: Some(coeffs) }
    }

    /// `wⁿ`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        Self::polynomial(format!("z^{n}"), c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn monomials(&self) -> Option<&[Complex64]> {
        self.monomials.as_deref()
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        (self.eval)(w)
    }
}

/// Named inputs: `one`, `z`, `z^n`, `bump` (a Gaussian centred at
/// `0.3 + 0.2i`) and `trig:seed=N`, a random polynomial in `w` and `w̄` of
/// bidegree at most 3, which restricts to a trigonometric polynomial on
/// every circle.
pub fn disk_preset(name: &str) -> Result<DiskFunction> {
    let unknown = || Error::Config(format!("unknown disk function preset `{name}`"));
    match name {
        "one" => return Ok(DiskFunction::monomial(0).renamed("one")),
        "z" => return Ok(DiskFunction::monomial(1).renamed("z")),
        "bump" => {
            let c = Complex64::new(0.3, 0.2);
            return Ok(DiskFunction::new("bump", move |w| Complex64::new((-(w - c).norm_sqr() / 0.12).exp(), 0.0)));
        }
        _ => {}
    }
    if let Some(n) = name.strip_prefix("z^") {
        let n: usize = n.parse().map_err(|_| unknown())?;
        return Ok(DiskFunction::monomial(n));
    }
    if let Some(seed) = name.strip_prefix("trig:seed=") {
        let seed: u64 = seed.parse().map_err(|_| unknown())?;
        let mut rng = stream_rng(seed, 0x4842);
        let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
        for row in c.iter_mut() {
            for v in row.iter_mut() {
                *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        return Ok(DiskFunction::new(name, move |w| {
            let wb = w.conj();
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, row) in c.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    acc += v * w.powu(j as u32) * wb.powu(k as u32);
                }
            }
            acc
        }));
    }
    Err(unknown())
}

impl DiskFunction {
    fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

/// The disk as a polar domain with normalized Lebesgue measure.
pub fn disk_domain() -> DomainSpec {
    DomainSpec::radial_disk(Some(1.0), 0.0).expect("unit disk is admissible")
}

pub fn to_complex(p: &Point) -> Complex64 {
    Complex64::from_polar(p.r(), p.theta())
}

/// Quadrature parameters for both sides of the identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HbConfig {
    pub grid: GridSpec,
    pub tol: f64,
}

impl Default for HbConfig {
    fn default() -> Self {
        HbConfig { grid: GridSpec::default().with_resolution(96, 64).with_panels(4), tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbValue {
    pub value: Complex64,
    pub estimate: f64,
}

fn check_z(z: Complex64) -> Result<()> {
    let r = z.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidPoint(format!("z = {z} is not in the punctured disk")));
    }
    Ok(())
}

fn disk_grid(spec: GridSpec) -> Result<QuadratureGrid> {
    QuadratureGrid::new(&disk_domain(), GridKind::DiskArea, spec)
}

fn convolve_on(g: &DiskFunction, f: &DiskFunction, z: Complex64, grid: &QuadratureGrid) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, w) in grid.nodes.iter().zip(&grid.weights) {
        let v = to_complex(p);
        let term = g.eval(v) * f.eval(z * v.conj()) * w;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(Error::NonFinite(format!("convolution integrand at w = {v}")));
        }
        acc += term;
    }
    Ok(acc)
}

/// `∫_𝔻 g(w) f(z w̄) dμ(w)` on the `(r², θ)` grid; the estimate is the change
/// against the grid with half the resolution.
pub fn hb_convolve(g: &DiskFunction, f: &DiskFunction, z: Complex64, cfg: &HbConfig) -> Result<HbValue> {
    check_z(z)?;
    let grid = disk_grid(cfg.grid.clone())?;
    let fine = convolve_on(g, f, z, &grid)?;
    let coarse = convolve_on(g, f, z, &grid.coarsen()?)?;
    let estimate = (fine - coarse).norm();
    if estimate > cfg.tol * fine.norm().max(1.0) {
        return Err(Error::NonConvergence(format!("convolution estimate {estimate:e} exceeds {:e}", cfg.tol)));
    }
    Ok(HbValue { value: fine, estimate })
}

/// `Σ aₙ bₙ zⁿ/(n+1)` when both inputs carry Taylor coefficients.
pub fn hb_closed_form(g: &DiskFunction, f: &DiskFunction, z: Complex64) -> Option<Complex64> {
    let (a, b) = (g.monomials()?, f.monomials()?);
    Some(a.iter().zip(b).enumerate().map(|(n, (a, b))| a * b * z.powu(n as u32) / (n as f64 + 1.0)).sum())
}

/// The piecewise kernel; the boundary `|w| = |z|` takes the value 0.
pub fn hb_kernel(g: &DiskFunction) -> Kernel<Complex64> {
    let g = g.clone();
    Kernel::new(format!("hb:{}", g.name()), move |z: &Point, w: &Point| {
        if w.r() >= z.r() {
            return Complex64::new(0.0, 0.0);
        }
        let (zc, wc) = (to_complex(z), to_complex(w));
        g.eval((wc / zc).conj()) / zc.norm_sqr()
    })
}

/// Strong homogeneity of the kernel under `(a, φ)` restricted to pairs that
/// stay inside the punctured disk.
#[derive(Debug, Clone, Serialize)]
pub struct HbHomogeneity {
    pub report: HomogeneityReport,
    pub acceptance_rate: f64,
}

pub fn hb_homogeneity(g: &DiskFunction, n: usize, tol: f64, seed: u64) -> Result<HbHomogeneity> {
    let report = check_strong_homogeneity(&disk_domain(), &hb_kernel(g), n, tol, seed)?;
    let acceptance_rate = report.samples as f64 / (report.samples + report.skipped) as f64;
    Ok(HbHomogeneity { report, acceptance_rate })
}

#[derive(Debug, Clone, Serialize)]
pub struct HbEquivalence {
    pub g: String,
    pub f: String,
    pub z: [f64; 2],
    pub convolution: [f64; 2],
    pub operator: [f64; 2],
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares the convolution with the operator side, whose grid breaks at
/// `|w|² = |z|²` where the kernel jumps. The tolerance adds both refinement
/// estimates to `cfg.tol`.
pub fn hb_equivalence(g: &DiskFunction, f: &DiskFunction, z: Complex64, cfg: &HbConfig) -> Result<HbEquivalence> {
    let conv = hb_convolve(g, f, z, cfg)?;
    let grid = Arc::new(disk_grid(cfg.grid.clone().with_breaks(vec![z.norm_sqr()]))?);
    let f_eval = f.clone();
    let fg = GridFunction::from_analytic(grid, move |p: &Point| f_eval.eval(to_complex(p)))?;
    let zp = Point::new(z.norm(), z.arg());
    let applied = apply_operator(&hb_kernel(g), &fg, &[zp])?;
    let op = applied.values[0];
    let op_est = applied.estimate.map_or(0.0, |e| e[0]);
    let difference = (conv.value - op).norm();
    let tolerance = cfg.tol + conv.estimate + op_est;
    Ok(HbEquivalence {
        g: g.name().to_string(),
        f: f.name().to_string(),
        z: [z.re, z.im],
        convolution: [conv.value.re, conv.value.im],
        operator: [op.re, op.im],
        difference,
        tolerance,
        pass: difference <= tolerance,
    })
}
