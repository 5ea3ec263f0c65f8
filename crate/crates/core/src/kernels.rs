//! Homogeneous kernels built from generating functions on the quotient
//! `G/H`, sampled strong-homogeneity checks, recovery of the generating
//! function, and the floor-kernel counterexample.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, DomainSpec, DomainTag, GroupElement, Point};
use crate::sampling::{self, stream_rng};

/// Field of kernel and function values.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn is_finite_value(self) -> bool;
    /// `(re, im)`; the imaginary part of a real is 0.
    fn parts(self) -> (f64, f64);
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
}

type QuotientFn<V> = Arc<dyn Fn(f64, f64) -> Result<V> + Send + Sync>;
type KernelFn<V> = Arc<dyn Fn(&Point, &Point) -> Result<V> + Send + Sync>;
type LocusFn = Arc<dyn Fn(&Point, &Point) -> bool + Send + Sync>;

/// Function on the quotient `H\G/H` from which a homogeneous kernel is built.
///
/// `Quotient` takes `(u, ψ)` on the cylinder (`u = z_x − z_y`) and `(η, ψ)`
/// with `η > 0` on polar domains (`ψ = θ_x − θ_y`). `Gl2` holds the two
/// constants for the positively and negatively oriented frames.
#[derive(Clone)]
pub enum GeneratingFunction<V: Scalar = f64> {
    Quotient { name: String, eval: QuotientFn<V> },
    Gl2 { c_plus: V, c_minus: V },
}

impl<V: Scalar> Debug for GeneratingFunction<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratingFunction::Quotient { name, .. } => write!(f, "Quotient({name})"),
            GeneratingFunction::Gl2 { c_plus, c_minus } => write!(f, "Gl2({c_plus:?}, {c_minus:?})"),
        }
    }
}

impl<V: Scalar> GeneratingFunction<V> {
    pub fn quotient(name: impl Into<String>, f: impl Fn(f64, f64) -> V + Send + Sync + 'static) -> Self {
        GeneratingFunction::Quotient { name: name.into(), eval: Arc::new(move |a, b| Ok(f(a, b))) }
    }

    pub fn fallible(name: impl Into<String>, f: impl Fn(f64, f64) -> Result<V> + Send + Sync + 'static) -> Self {
        GeneratingFunction::Quotient { name: name.into(), eval: Arc::new(f) }
    }

    pub fn gl2(c_plus: V, c_minus: V) -> Self {
        GeneratingFunction::Gl2 { c_plus, c_minus }
    }

    pub fn eval(&self, a: f64, psi: f64) -> Result<V> {
        match self {
            GeneratingFunction::Quotient { eval, .. } => eval(a, wrap_angle(psi)),
            GeneratingFunction::Gl2 { .. } => {
                Err(Error::Config("GL(2) generating functions are a pair of constants".into()))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            GeneratingFunction::Quotient { name, .. } => name.clone(),
            GeneratingFunction::Gl2 { c_plus, c_minus } => format!("gl2({c_plus:?},{c_minus:?})"),
        }
    }
}

/// Named presets: `one`, `angular:a=cos`, `angular:a=one`, `gl2:antisym`,
/// `gl2:abs`.
pub fn preset(name: &str) -> Result<GeneratingFunction> {
    match name {
        "one" => Ok(GeneratingFunction::quotient("one", |_, _| 1.0)),
        "angular:a=cos" => Ok(GeneratingFunction::quotient("angular:a=cos", |eta, psi| {
            psi.cos() * eta / (1.0 + eta * eta)
        })),
        "angular:a=one" => Ok(GeneratingFunction::quotient("angular:a=one", |eta, _| eta / (1.0 + eta * eta))),
        "gl2:antisym" => Ok(GeneratingFunction::gl2(1.0, 1.0)),
        "gl2:abs" => Ok(GeneratingFunction::gl2(1.0, -1.0)),
        _ => Err(Error::Config(format!("unknown generating function preset `{name}`"))),
    }
}

/// An integral kernel on a chart with its singular locus.
#[derive(Clone)]
pub struct Kernel<V: Scalar = f64> {
    name: String,
    eval: KernelFn<V>,
    singular: LocusFn,
    gl2_constants: Option<(V, V)>,
}

impl<V: Scalar> Debug for Kernel<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Kernel({})", self.name)
    }
}

impl<V: Scalar> Kernel<V> {
    pub fn new(name: impl Into<String>, f: impl Fn(&Point, &Point) -> V + Send + Sync + 'static) -> Self {
        Kernel {
            name: name.into(),
            eval: Arc::new(move |x, y| Ok(f(x, y))),
            singular: Arc::new(|_, _| false),
            gl2_constants: None,
        }
    }

    pub fn fallible(
        name: impl Into<String>,
        f: impl Fn(&Point, &Point) -> Result<V> + Send + Sync + 'static,
    ) -> Self {
        Kernel { name: name.into(), eval: Arc::new(f), singular: Arc::new(|_, _| false), gl2_constants: None }
    }

    pub fn with_singular_locus(mut self, pred: impl Fn(&Point, &Point) -> bool + Send + Sync + 'static) -> Self {
        self.singular = Arc::new(pred);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_singular(&self, x: &Point, y: &Point) -> bool {
        (self.singular)(x, y)
    }

    /// `(C₊, C₋)` when the kernel was built on the GL(2) plane.
    pub fn gl2_constants(&self) -> Option<(V, V)> {
        self.gl2_constants
    }

    /// `K(x, y)`; errors on the singular locus and on non-finite values.
    pub fn eval(&self, x: &Point, y: &Point) -> Result<V> {
        if self.is_singular(x, y) {
            return Err(Error::SingularLocus(format!("{} at ({:?}, {:?})", self.name, x.0, y.0)));
        }
        let v = (self.eval)(x, y)?;
        if !v.is_finite_value() {
            return Err(Error::NonFinite(format!("{} at ({:?}, {:?})", self.name, x.0, y.0)));
        }
        Ok(v)
    }

    /// `K(x, y)` without the locus check (the GL(2) kernels are defined as 0
    /// on collinear pairs).
    pub fn eval_raw(&self, x: &Point, y: &Point) -> Result<V> {
        (self.eval)(x, y)
    }
}

/// `[x, y] = x₁y₂ − x₂y₁`.
pub fn cross(x: &Point, y: &Point) -> f64 {
    x.x1() * y.x2() - x.x2() * y.x1()
}

/// The homogeneous kernel with generating function `f` on `d`.
pub fn build_kernel<V: Scalar>(d: &DomainSpec, f: &GeneratingFunction<V>) -> Result<Kernel<V>> {
    match (d.tag(), f) {
        (DomainTag::GL2Plane, GeneratingFunction::Gl2 { c_plus, c_minus }) => {
            let (cp, cm) = (*c_plus, *c_minus);
            let mut k = Kernel::new(format!("gl2({cp:?},{cm:?})"), move |x, y| {
                let c = cross(x, y);
                if c > 0.0 {
                    cp * (1.0 / c)
                } else if c < 0.0 {
                    cm * (1.0 / c)
                } else {
                    V::zero()
                }
            })
            .with_singular_locus(|x, y| cross(x, y) == 0.0);
            k.gl2_constants = Some((cp, cm));
            Ok(k)
        }
        (DomainTag::GL2Plane, _) | (_, GeneratingFunction::Gl2 { .. }) => Err(Error::Config(format!(
            "generating function {} does not match domain {:?}",
            f.name(),
            d.tag()
        ))),
        (DomainTag::Cylinder, GeneratingFunction::Quotient { name, eval }) => {
            let eval = eval.clone();
            let d = *d;
            Ok(Kernel::fallible(format!("cylinder[{name}]"), move |x, y| {
                let x = d.validate_point(x)?;
                let y = d.validate_point(y)?;
                let v = eval(x.z() - y.z(), wrap_angle(x.theta() - y.theta()))?;
                Ok(v * (-x.z() - y.z()).exp())
            }))
        }
        (_, GeneratingFunction::Quotient { name, eval }) => {
            let eval = eval.clone();
            let d = *d;
            Ok(Kernel::fallible(format!("{:?}[{name}]", d.tag()), move |x, y| {
                let x = d.validate_point(x)?;
                let y = d.validate_point(y)?;
                let gx = d.gamma_c(x.r() * x.r())?;
                let gy = d.gamma_c(y.r() * y.r())?;
                let v = eval((gx / gy).sqrt(), wrap_angle(x.theta() - y.theta()))?;
                Ok(v * (1.0 / (gx * gy).sqrt()))
            }))
        }
    }
}

/// Largest residual below which values count as zero in relative residuals.
pub const RESIDUAL_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Serialize)]
pub struct WorstCase {
    pub sample: usize,
    pub g: GroupElement,
    pub x: Point,
    pub y: Point,
    pub k_xy: (f64, f64),
    pub lambda_k_gxgy: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogeneityReport {
    pub kernel: String,
    pub samples: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub worst: Option<WorstCase>,
}

const SAMPLE_ATTEMPTS: usize = 32;

/// Samples `(g, x, y)` and checks `λ_g K(gx, gy) = K(x, y)`.
///
/// Draws that hit the singular locus or leave the chart are redrawn from the
/// same stream up to a fixed number of attempts and counted as skipped.
pub fn check_strong_homogeneity<V: Scalar>(
    d: &DomainSpec,
    k: &Kernel<V>,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<HomogeneityReport> {
    if n_samples == 0 {
        return Err(Error::ZeroBudget);
    }
    let outcomes: Vec<(usize, Option<(f64, WorstCase)>)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut skipped = 0;
            for _ in 0..SAMPLE_ATTEMPTS {
                let g = sampling::group_element(d, &mut rng);
                let x = sampling::point(d, &mut rng);
                let y = sampling::point(d, &mut rng);
                let Some(case) = homogeneity_case(d, k, i, g, x, y) else {
                    skipped += 1;
                    continue;
                };
                return (skipped, Some(case));
            }
            (skipped, None)
        })
        .collect();

    let mut skipped = 0;
    let mut worst: Option<(f64, WorstCase)> = None;
    let mut landed = 0;
    for (s, case) in outcomes {
        skipped += s;
        if let Some((res, wc)) = case {
            landed += 1;
            if worst.as_ref().is_none_or(|(r, _)| res > *r || res.is_nan()) {
                worst = Some((res, wc));
            }
        }
    }
    if landed == 0 {
        return Err(Error::AllSamplesSingular(skipped));
    }
    let (max_residual, wc) = worst.expect("at least one sample landed");
    Ok(HomogeneityReport {
        kernel: k.name().to_string(),
        samples: landed,
        skipped,
        max_residual,
        tol,
        pass: max_residual <= tol,
        worst: Some(wc),
    })
}

fn homogeneity_case<V: Scalar>(
    d: &DomainSpec,
    k: &Kernel<V>,
    sample: usize,
    g: GroupElement,
    x: Point,
    y: Point,
) -> Option<(f64, WorstCase)> {
    let gx = d.act(&g, &x).ok()?;
    let gy = d.act(&g, &y).ok()?;
    if k.is_singular(&x, &y) || k.is_singular(&gx, &gy) {
        return None;
    }
    let kxy = k.eval(&x, &y).ok()?;
    let lambda = d.character(&g).ok()?;
    let kg = k.eval(&gx, &gy).ok()? * lambda;
    let diff = (kg - kxy).modulus();
    let scale = kxy.modulus();
    let res = if scale < RESIDUAL_FLOOR { diff } else { diff / scale };
    Some((res, WorstCase { sample, g, x, y, k_xy: kxy.parts(), lambda_k_gxgy: kg.parts() }))
}

/// Base value `s = Γ_C(r_y²)` with both `s` and `η² s` inside the range of
/// `Γ_C`.
fn base_value(d: &DomainSpec, eta: f64) -> Result<f64> {
    let (lo, hi) = d.gamma_range()?;
    let e2 = eta * eta;
    let lo_eff = lo.max(lo / e2);
    let hi_eff = hi.min(hi / e2);
    if !(lo_eff < hi_eff) {
        return Err(Error::Range { value: eta, lo: (lo / hi).sqrt(), hi: (hi / lo).sqrt() });
    }
    let s = match (lo_eff > 0.0, hi_eff.is_finite()) {
        (false, false) => 1.0,
        (false, true) => 0.5 * hi_eff,
        (true, false) => 2.0 * lo_eff,
        (true, true) => (lo_eff * hi_eff).sqrt(),
    };
    Ok(s)
}

/// Recovers the generating function of a strongly homogeneous kernel by
/// evaluating it against a base point.
pub fn recover_f<V: Scalar>(d: &DomainSpec, k: &Kernel<V>) -> Result<GeneratingFunction<V>> {
    let d = *d;
    match d.tag() {
        DomainTag::GL2Plane => {
            let e1 = Point::new(1.0, 0.0);
            let e2 = Point::new(0.0, 1.0);
            let c_plus = k.eval(&e1, &e2)?;
            let c_minus = -k.eval(&e2, &e1)?;
            Ok(GeneratingFunction::gl2(c_plus, c_minus))
        }
        DomainTag::Cylinder => {
            let k = k.clone();
            Ok(GeneratingFunction::fallible(format!("recovered[{}]", k.name()), move |u, psi| {
                let v = k.eval(&Point::new(u, psi), &Point::new(0.0, 0.0))?;
                Ok(v * u.exp())
            }))
        }
        _ => {
            let k = k.clone();
            Ok(GeneratingFunction::fallible(format!("recovered[{}]", k.name()), move |eta, psi| {
                if !(eta > 0.0) {
                    return Err(Error::InvalidPoint(format!("η = {eta} must be positive")));
                }
                let s = base_value(&d, eta)?;
                let sx = eta * eta * s;
                let x = Point::new(d.gamma_c_inv(sx)?.sqrt(), psi);
                let y = Point::new(d.gamma_c_inv(s)?.sqrt(), 0.0);
                let v = k.eval(&x, &y)?;
                Ok(v * (sx * s).sqrt())
            }))
        }
    }
}

/// The floor kernel: 0 when `frac(y) = frac(x − y)`, 1 otherwise.
pub fn floor_kernel(x: &BigRational, y: &BigRational) -> u8 {
    let frac = |v: &BigRational| v - v.floor();
    if frac(y) == frac(&(x - y)) {
        0
    } else {
        1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub x: f64,
    pub y: f64,
    /// The shift `x − 2y`, exact as a fraction and rounded.
    pub r_exact: String,
    pub r: f64,
    pub k_xy: u8,
    pub k_shifted: u8,
}

/// For the floor kernel, which is translation invariant almost everywhere,
/// returns a shift `r` with `K(x + r, y + r) ≠ K(x, y)`. All arithmetic is
/// exact on the rationals represented by the inputs.
pub fn weak_counterexample_violation(x: f64, y: f64) -> Result<Counterexample> {
    let to_q = |v: f64| {
        BigRational::from_float(v).ok_or_else(|| Error::InvalidPoint(format!("{v} is not finite")))
    };
    let (qx, qy) = (to_q(x)?, to_q(y)?);
    let r = &qx - BigRational::from_integer(BigInt::from(2)) * &qy;
    if r.is_integer() {
        return Err(Error::NoViolation(r.to_string()));
    }
    let k_xy = floor_kernel(&qx, &qy);
    let k_shifted = floor_kernel(&(&qx + &r), &(&qy + &r));
    debug_assert_ne!(k_xy, k_shifted);
    Ok(Counterexample {
        x,
        y,
        r_exact: r.to_string(),
        r: r.to_f64().unwrap_or(f64::NAN),
        k_xy,
        k_shifted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::lobachevsky_c_min;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn domains() -> Vec<DomainSpec> {
        vec![
            DomainSpec::cylinder(),
            DomainSpec::punctured_plane(),
            DomainSpec::radial_disk(Some(1.0), 0.0).unwrap(),
            DomainSpec::poincare(-1.0).unwrap(),
            DomainSpec::poincare(0.5).unwrap(),
            DomainSpec::bergman(0.5, 1.0).unwrap(),
            DomainSpec::lobachevsky(lobachevsky_c_min()).unwrap(),
        ]
    }

    fn smooth_f() -> GeneratingFunction {
        GeneratingFunction::quotient("smooth", |eta, psi| (1.0 + 0.5 * psi.cos()) * eta / (1.0 + eta * eta))
    }

    #[test]
    fn plane_one_is_inverse_radii() {
        let d = DomainSpec::punctured_plane();
        let k = build_kernel(&d, &preset("one").unwrap()).unwrap();
        let v = k.eval(&Point::new(2.0, 0.3), &Point::new(0.25, 4.0)).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn plane_angular_kernel() {
        let d = DomainSpec::punctured_plane();
        let k = build_kernel(&d, &preset("angular:a=cos").unwrap()).unwrap();
        let (x, y) = (Point::new(1.5, 0.2), Point::new(0.7, 2.1));
        let expect = (0.2f64 - 2.1).cos() / (1.5f64.powi(2) + 0.7f64.powi(2));
        assert_relative_eq!(k.eval(&x, &y).unwrap(), expect, max_relative = 1e-14);
    }

    #[test]
    fn gl2_kernels() {
        let d = DomainSpec::gl2_plane();
        let anti = build_kernel(&d, &preset("gl2:antisym").unwrap()).unwrap();
        let abs = build_kernel(&d, &preset("gl2:abs").unwrap()).unwrap();
        let (x, y) = (Point::new(1.0, 2.0), Point::new(-0.5, 0.3));
        let c = cross(&x, &y);
        assert_eq!(anti.eval(&x, &y).unwrap(), 1.0 / c);
        assert_eq!(anti.eval(&y, &x).unwrap(), -anti.eval(&x, &y).unwrap());
        assert_eq!(abs.eval(&x, &y).unwrap(), 1.0 / c.abs());
        assert_eq!(abs.eval(&y, &x).unwrap(), 1.0 / c.abs());
        let z = Point::new(2.0, 4.0);
        assert_eq!(anti.eval_raw(&x, &z).unwrap(), 0.0);
        assert!(anti.eval(&x, &z).is_err());
    }

    #[test]
    fn mismatched_generating_function() {
        assert!(build_kernel(&DomainSpec::gl2_plane(), &preset("one").unwrap()).is_err());
        assert!(build_kernel(&DomainSpec::cylinder(), &preset("gl2:antisym").unwrap()).is_err());
    }

    #[test]
    fn built_kernels_are_strongly_homogeneous() {
        for d in domains() {
            let k = build_kernel(&d, &smooth_f()).unwrap();
            let tol = if d.tag() == DomainTag::Lobachevsky { 1e-8 } else { 1e-10 };
            let rep = check_strong_homogeneity(&d, &k, 1000, tol, 3).unwrap();
            assert!(rep.pass, "{:?}: {}", d.tag(), rep.max_residual);
        }
        let d = DomainSpec::gl2_plane();
        let k = build_kernel(&d, &preset("gl2:antisym").unwrap()).unwrap();
        let rep = check_strong_homogeneity(&d, &k, 1000, 1e-10, 3).unwrap();
        assert!(rep.pass, "{}", rep.max_residual);
    }

    #[test]
    fn hand_substitution_spot_check() {
        // plane, F ≡ 1: λ_g K(gx, gy) = e^{2a} / (e^a r_x e^a r_y)
        let d = DomainSpec::punctured_plane();
        let k = build_kernel(&d, &preset("one").unwrap()).unwrap();
        let g = GroupElement::cyl(0.7, 1.0);
        let (x, y) = (Point::new(0.3, 0.0), Point::new(4.0, 1.0));
        let lhs = d.character(&g).unwrap() * k.eval(&d.act(&g, &x).unwrap(), &d.act(&g, &y).unwrap()).unwrap();
        assert_relative_eq!(lhs, 1.0 / 1.2, max_relative = 1e-14);
    }

    #[test]
    fn broken_kernel_fails() {
        let d = DomainSpec::punctured_plane();
        let k = Kernel::new("1/(r_x²+1)", |x: &Point, _: &Point| 1.0 / (x.r() * x.r() + 1.0));
        let rep = check_strong_homogeneity(&d, &k, 200, 1e-10, 1).unwrap();
        assert!(!rep.pass);
        assert!(rep.max_residual > 0.5);
    }

    #[test]
    fn all_singular_is_reported() {
        let d = DomainSpec::punctured_plane();
        let k = Kernel::new("nowhere", |_: &Point, _: &Point| 1.0).with_singular_locus(|_, _| true);
        assert!(matches!(check_strong_homogeneity(&d, &k, 5, 1e-10, 1), Err(Error::AllSamplesSingular(_))));
    }

    #[test]
    fn recover_examples() {
        let d = DomainSpec::punctured_plane();
        let k = Kernel::new("1/(rx ry)", |x: &Point, y: &Point| 1.0 / (x.r() * y.r()));
        let f = recover_f(&d, &k).unwrap();
        for (eta, psi) in [(0.1, 0.0), (1.0, 2.0), (7.0, 5.0)] {
            assert_relative_eq!(f.eval(eta, psi).unwrap(), 1.0, max_relative = 1e-14);
        }
        let k = Kernel::new("angular", |x: &Point, y: &Point| {
            (x.theta() - y.theta()).cos() / (x.r() * x.r() + y.r() * y.r())
        });
        let f = recover_f(&d, &k).unwrap();
        for (eta, psi) in [(0.1, 0.4), (1.0, 2.0), (7.0, 5.0)] {
            assert_relative_eq!(f.eval(eta, psi).unwrap(), psi.cos() * eta / (1.0 + eta * eta), max_relative = 1e-13);
        }
    }

    #[test]
    fn recover_roundtrip_on_trig_polynomial() {
        let mut rng = stream_rng(99, 0);
        let coeffs: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = GeneratingFunction::quotient("trig", move |a, psi| {
            let e = a / (1.0 + a * a);
            e * (coeffs[0]
                + coeffs[1] * psi.cos()
                + coeffs[2] * psi.sin()
                + coeffs[3] * (2.0 * psi).cos()
                + coeffs[4] * (2.0 * psi).sin()
                + coeffs[5] * (3.0 * psi).cos()
                + coeffs[6] * (1.0 + a * a).ln())
        });
        for d in domains() {
            let k = build_kernel(&d, &f).unwrap();
            let k2 = build_kernel(&d, &recover_f(&d, &k).unwrap()).unwrap();
            let mut compared = 0;
            for i in 0..1000 {
                let mut rng = stream_rng(5, i);
                let x = sampling::point(&d, &mut rng);
                let y = sampling::point(&d, &mut rng);
                let (Ok(a), Ok(b)) = (k.eval(&x, &y), k2.eval(&x, &y)) else { continue };
                compared += 1;
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300), "{:?}: {a} vs {b}", d.tag());
            }
            assert!(compared > 900, "{:?}: {compared}", d.tag());
        }
        let d = DomainSpec::gl2_plane();
        let k = build_kernel(&d, &GeneratingFunction::gl2(2.5, -0.5)).unwrap();
        let GeneratingFunction::Gl2 { c_plus, c_minus } = recover_f(&d, &k).unwrap() else { panic!() };
        assert_eq!((c_plus, c_minus), (2.5, -0.5));
    }

    #[test]
    fn complex_kernels_build() {
        let d = DomainSpec::punctured_plane();
        let f = GeneratingFunction::<Complex64>::quotient("phase", |eta, psi| {
            Complex64::from_polar(eta / (1.0 + eta * eta), psi)
        });
        let k = build_kernel(&d, &f).unwrap();
        let rep = check_strong_homogeneity(&d, &k, 300, 1e-10, 4).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn counterexample_example() {
        let c = weak_counterexample_violation(0.5, 0.1).unwrap();
        assert_relative_eq!(c.r, 0.3, max_relative = 1e-12);
        assert_eq!((c.k_xy, c.k_shifted), (1, 0));
        let q = |v: f64| BigRational::from_float(v).unwrap();
        assert_eq!(floor_kernel(&q(0.8), &q(0.4)), 0);
        assert_eq!(floor_kernel(&q(0.5), &q(0.1)), 1);
        assert!(matches!(weak_counterexample_violation(2.5, 0.25), Err(Error::NoViolation(_))));
        assert!(matches!(weak_counterexample_violation(3.0, 1.0), Err(Error::NoViolation(_))));
    }

    #[test]
    fn counterexample_on_random_pairs() {
        for i in 0..1000 {
            let mut rng = stream_rng(17, i);
            let x = rng.gen_range(-10.0..10.0);
            let y = rng.gen_range(-10.0..10.0);
            let c = weak_counterexample_violation(x, y).unwrap();
            assert_ne!(c.k_xy, c.k_shifted);
        }
    }

    proptest! {
        #[test]
        fn antisymmetric_gl2_kernel(x1 in -5.0..5.0f64, x2 in -5.0..5.0f64, y1 in -5.0..5.0f64, y2 in -5.0..5.0f64) {
            let d = DomainSpec::gl2_plane();
            let k = build_kernel(&d, &preset("gl2:antisym").unwrap()).unwrap();
            let (x, y) = (Point::new(x1, x2), Point::new(y1, y2));
            prop_assert_eq!(k.eval_raw(&x, &y).unwrap(), -k.eval_raw(&y, &x).unwrap());
        }
    }
}
