//! The GL⁺(2)-homogeneous antisymmetric kernel `1/[x, y]` and its
//! principal-value operator, evaluated two ways: directly in the slope
//! variable `ξ = y₂/y₁`, and as a Hilbert transform of line integrals
//! through the origin. Also the stabilizer witnesses showing there are no
//! such kernels for `n > 2`.
//!
//! With `y = (η, ξη)` the Jacobian is `|η| dη dξ` and `[x, y] = η x₁ (ξ − τ)`,
//! `τ = x₂/x₁`, so
//! `Kf(x) = −(1/x₁) PV∫ R(ξ)/(τ − ξ) dξ` with the signed line integral
//! `R(ξ) = ∫ sign(η) f(η, ξη) dη`.

use std::f64::consts::FRAC_PI_2;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::kernels::Kernel;
use crate::quad::{composite_gauss, Adaptive};
use crate::sampling;

pub use crate::kernels::cross;

/// Test functions on the plane.
pub type PlaneFn<'a> = &'a (dyn Fn([f64; 2]) -> f64 + Sync);

/// Principal-value scheme parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PvConfig {
    /// Exclusion half-width around `ξ = τ`, relative to `max(1, |τ|)`.
    pub eps_rel: f64,
    /// Half-width in `ξ` of the folded core around `τ`; beyond it the slope
    /// is mapped to the line angle `φ = atan ξ`.
    pub xi_truncation: f64,
    /// Radius containing the (numerical) support of `f`.
    pub eta_truncation: f64,
    /// Gauss–Legendre order per panel in `ξ` and `φ`.
    pub n_xi: usize,
    /// Gauss–Legendre order per panel along lines.
    pub n_eta: usize,
    pub panels: usize,
    pub tol: f64,
}

impl Default for PvConfig {
    fn default() -> Self {
        PvConfig {
            eps_rel: 1e-3,
            xi_truncation: 1.0,
            eta_truncation: 10.0,
            n_xi: 32,
            n_eta: 48,
            panels: 6,
            tol: 1e-8,
        }
    }
}

impl PvConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.eps_rel > 0.0
            && self.xi_truncation > 0.0
            && self.eta_truncation > 0.0
            && self.n_xi >= 2
            && self.n_eta >= 2
            && self.panels > 0
            && self.tol > 0.0;
        if !ok {
            return Err(Error::Config(format!("invalid PV configuration {self:?}")));
        }
        Ok(())
    }

    fn eps(&self, tau: f64) -> f64 {
        self.eps_rel * tau.abs().max(1.0)
    }
}

/// A principal value and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PvValue {
    pub value: f64,
    pub estimate: f64,
}

/// Removes the `ε` and `ε³` terms from exclusion results at `ε, ε/2, ε/4`;
/// the estimate is the distance to the last first-order combination.
fn richardson(i1: f64, i2: f64, i3: f64) -> (f64, f64) {
    let j1 = 2.0 * i2 - i1;
    let j2 = 2.0 * i3 - i2;
    let v = (8.0 * j2 - j1) / 7.0;
    (v, (v - j2).abs())
}

/// `∫ f(η, ξη) dη` over the line of slope `ξ` through the origin (the printed
/// parameterization by the first coordinate, no sign factor).
pub fn radon_origin(f: PlaneFn, xi: f64, cfg: &PvConfig) -> Result<PvValue> {
    line_integral(f, xi, cfg, false)
}

/// `∫ sign(η) f(η, ξη) dη`, the line integral that enters the operator.
pub fn signed_radon(f: PlaneFn, xi: f64, cfg: &PvConfig) -> Result<PvValue> {
    line_integral(f, xi, cfg, true)
}

fn line_integral(f: PlaneFn, xi: f64, cfg: &PvConfig, signed: bool) -> Result<PvValue> {
    cfg.validate()?;
    let t = cfg.eta_truncation / (1.0 + xi * xi).sqrt();
    let g = |eta: f64| f([eta, xi * eta]);
    let q = Adaptive::new(1e-15, 1e-11).with_max_segments(400);
    let pos = q.integrate(g, 0.0, t);
    let neg = q.integrate(g, -t, 0.0);
    let value = if signed { pos.value - neg.value } else { pos.value + neg.value };
    // the tail beyond the truncation radius is bounded by the endpoint values
    let tail = (g(t).abs() + g(-t).abs()) * t;
    let estimate = pos.error + neg.error + tail;
    if estimate > cfg.tol * value.abs().max(1.0) {
        return Err(Error::Truncation { estimate, tol: cfg.tol });
    }
    Ok(PvValue { value, estimate })
}

/// `H[h](τ) = PV∫ h(ξ)/(τ − ξ) dξ` (no `1/π`) by symmetric exclusion with
/// Richardson extrapolation over `ε, ε/2, ε/4`.
pub fn hilbert_pv(h: &dyn Fn(f64) -> f64, tau: f64, cfg: &PvConfig) -> Result<PvValue> {
    cfg.validate()?;
    let q = Adaptive::new(cfg.tol * 1e-3, 1e-12).with_max_segments(4000);
    let eps0 = cfg.eps(tau);
    let mut results = [0.0; 3];
    let mut quad_err = 0.0;
    for (k, r) in results.iter_mut().enumerate() {
        let eps = eps0 / f64::powi(2.0, k as i32);
        let left = q.integrate_lower(|xi| h(xi) / (tau - xi), tau - eps);
        let right = q.integrate_upper(|xi| h(xi) / (tau - xi), tau + eps);
        if !(left.value.is_finite() && right.value.is_finite()) {
            return Err(Error::NonFinite(format!("Hilbert transform at τ = {tau}")));
        }
        *r = left.value + right.value;
        quad_err += left.error + right.error;
    }
    let (value, rich) = richardson(results[0], results[1], results[2]);
    let estimate = rich + quad_err;
    if rich > cfg.tol.max(1e-6 * value.abs()) * 1e3 {
        return Err(Error::NonConvergence(format!("PV does not settle under ε-halving: {rich:e}")));
    }
    Ok(PvValue { value, estimate })
}

fn check_x(x: &Point) -> Result<f64> {
    if !(x.x1().is_finite() && x.x2().is_finite()) {
        return Err(Error::InvalidPoint(format!("{:?}", x.0)));
    }
    if x.x1() == 0.0 {
        return Err(Error::ExcludedRay);
    }
    Ok(x.x2() / x.x1())
}

/// `S(φ) = ∫₀^R [f(t u_φ) − f(−t u_φ)] dt` with `u_φ = (cos φ, sin φ)`;
/// the signed line integral is `R(tan φ) = cos φ · S(φ)`.
fn line_profile(f: PlaneFn, phi: f64, cfg: &PvConfig, order: usize) -> f64 {
    let (s, c) = phi.sin_cos();
    composite_gauss(|t| f([t * c, t * s]) - f([-t * c, -t * s]), 0.0, cfg.eta_truncation, cfg.panels, order)
}

fn direct_once(f: PlaneFn, tau: f64, cfg: &PvConfig, n_xi: usize, n_eta: usize) -> Result<(f64, f64)> {
    let h = |xi: f64| {
        let phi = xi.atan();
        phi.cos() * line_profile(f, phi, cfg, n_eta)
    };
    let u_max = cfg.xi_truncation;
    let eps0 = cfg.eps(tau);
    if eps0 >= u_max {
        return Err(Error::Config("exclusion half-width exceeds the ξ core".into()));
    }
    let mut core = [0.0; 3];
    for (k, c) in core.iter_mut().enumerate() {
        let eps = eps0 / f64::powi(2.0, k as i32);
        *c = composite_gauss(|u| (h(tau - u) - h(tau + u)) / u, eps, u_max, cfg.panels, n_xi);
    }
    let (core, rich) = richardson(core[0], core[1], core[2]);
    let tail = |phi: f64| line_profile(f, phi, cfg, n_eta) / (tau * phi.cos() - phi.sin());
    let lo = composite_gauss(tail, -FRAC_PI_2, (tau - u_max).atan(), cfg.panels, n_xi);
    let hi = composite_gauss(tail, (tau + u_max).atan(), FRAC_PI_2, cfg.panels, n_xi);
    let total = core + lo + hi;
    if !total.is_finite() {
        return Err(Error::NonFinite(format!("direct PV at τ = {tau}")));
    }
    Ok((total, rich))
}

/// `Kf(x) = PV∫ f(y)/[x, y] dy` by tensor Gauss–Legendre quadrature in the
/// slope variable with symmetric exclusion around `ξ = x₂/x₁`. The estimate
/// adds the Richardson remainder and the change from halving both orders.
pub fn apply_gl2_direct(f: PlaneFn, x: &Point, cfg: &PvConfig) -> Result<PvValue> {
    cfg.validate()?;
    let tau = check_x(x)?;
    let (fine, rich) = direct_once(f, tau, cfg, cfg.n_xi, cfg.n_eta)?;
    let (coarse, _) = direct_once(f, tau, cfg, (cfg.n_xi / 2).max(2), (cfg.n_eta / 2).max(2))?;
    let scale = 1.0 / x.x1().abs();
    Ok(PvValue { value: -fine / x.x1(), estimate: scale * (rich + (fine - coarse).abs()) })
}

/// `Kf(x) = −(1/x₁) H[R](x₂/x₁)` with adaptive quadrature for both the
/// signed line integrals `R` and the Hilbert transform.
pub fn apply_gl2_composed(f: PlaneFn, x: &Point, cfg: &PvConfig) -> Result<PvValue> {
    cfg.validate()?;
    let tau = check_x(x)?;
    let failure = std::sync::Mutex::new(None);
    let h = |xi: f64| match signed_radon(f, xi, cfg) {
        Ok(v) => v.value,
        Err(e) => {
            failure.lock().expect("unpoisoned").get_or_insert(e);
            0.0
        }
    };
    let hv = hilbert_pv(&h, tau, cfg)?;
    if let Some(e) = failure.into_inner().expect("unpoisoned") {
        return Err(e);
    }
    let scale = 1.0 / x.x1().abs();
    Ok(PvValue { value: -hv.value / x.x1(), estimate: scale * hv.estimate })
}

/// Applies a GL(2) kernel built from `(C₊, C₋)`. Only the antisymmetric
/// kernels `C₊ = C₋` give a conditionally convergent integral; any other pair
/// contains a multiple of `1/|[x, y]|` and is refused.
pub fn apply_kernel(k: &Kernel, f: PlaneFn, x: &Point, cfg: &PvConfig) -> Result<PvValue> {
    let (cp, cm) = k
        .gl2_constants()
        .ok_or_else(|| Error::Config(format!("{} is not a GL(2) kernel", k.name())))?;
    if cp != cm {
        return Err(Error::NonIntegrable(format!(
            "(C₊, C₋) = ({cp}, {cm}) has a 1/|[x,y]| component; the integral diverges for nonzero f"
        )));
    }
    let v = apply_gl2_direct(f, x, cfg)?;
    Ok(PvValue { value: cp * v.value, estimate: cp.abs() * v.estimate })
}

/// `(1 + tilt·y₁) exp(−|y − c|²/w²)`, a smooth test function with no
/// symmetry under `y → −y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianBump {
    pub center: [f64; 2],
    pub width: f64,
    pub tilt: f64,
}

impl GaussianBump {
    pub fn eval(&self, y: [f64; 2]) -> f64 {
        let (a, b) = (y[0] - self.center[0], y[1] - self.center[1]);
        (1.0 + self.tilt * y[0]) * (-(a * a + b * b) / (self.width * self.width)).exp()
    }

    /// Radius beyond which the bump is below `e⁻⁸¹` relative to its peak.
    pub fn support_radius(&self) -> f64 {
        self.center[0].hypot(self.center[1]) + 9.0 * self.width
    }

    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let r = rng.gen_range(0.5..1.5);
        let t = sampling::angle(rng);
        GaussianBump {
            center: [r * t.cos(), r * t.sin()],
            width: rng.gen_range(0.4..0.8),
            tilt: rng.gen_range(-0.5..0.5),
        }
    }
}

/// The `i`-th seeded (bump, evaluation point) pair; points keep `|x₁| ≥ 0.2|x|`
/// away from the excluded ray.
pub fn random_pair(seed: u64, i: u64) -> (GaussianBump, Point) {
    let mut rng = sampling::stream_rng(seed, i);
    let bump = GaussianBump::random(&mut rng);
    loop {
        let t = sampling::angle(&mut rng);
        if t.cos().abs() >= 0.2 {
            let m = sampling::log_uniform(&mut rng, 0.5, 2.0);
            return (bump, Point::new(m * t.cos(), m * t.sin()));
        }
    }
}

/// One line of the two-route comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gl2Row {
    pub x: [f64; 2],
    pub direct: f64,
    pub composed: f64,
    pub abs_diff: f64,
    /// `|2·Kf(2x) − Kf(x)| / |Kf(x)|` from the direct route.
    pub homogeneity: f64,
}

pub fn compare_routes(bump: &GaussianBump, x: &Point, cfg: &PvConfig) -> Result<Gl2Row> {
    let cfg = PvConfig { eta_truncation: bump.support_radius(), ..*cfg };
    let f = |y: [f64; 2]| bump.eval(y);
    let direct = apply_gl2_direct(&f, x, &cfg)?.value;
    let composed = apply_gl2_composed(&f, x, &cfg)?.value;
    let doubled = apply_gl2_direct(&f, &Point::new(2.0 * x.x1(), 2.0 * x.x2()), &cfg)?.value;
    Ok(Gl2Row {
        x: x.0,
        direct,
        composed,
        abs_diff: (direct - composed).abs(),
        homogeneity: (2.0 * doubled - direct).abs() / direct.abs(),
    })
}

/// Square matrix with exact rational entries and their `f64` roundings.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessMatrix {
    pub exact: Vec<Vec<BigRational>>,
    pub approx: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `h` with `h e₁ = e₁`, `h x = x` and `det h = 2`.
    Found(WitnessMatrix),
    /// In `ℝ²` with `x` independent of `e₁`, any such `h` is the identity.
    NoWitness,
}

fn q(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

fn det(m: &[Vec<BigRational>]) -> BigRational {
    // fraction-exact Gaussian elimination
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut d = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|r| !a[*r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        let p = a[col][col].clone();
        d *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            let (upper, lower) = a.split_at_mut(r);
            for (dst, src) in lower[0][col..n].iter_mut().zip(&upper[col][col..n]) {
                *dst -= &factor * src;
            }
        }
    }
    d
}

fn mat_vec(m: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// An element of the stabilizer of `e₁` in GL(n) that fixes `x` and has
/// `det = 2`: the map doubling a direction `w ⊥ e₁, x`, that is
/// `h = I + w wᵀ/|w|²`. All identities are verified in exact arithmetic.
pub fn stabilizer_witness(x: &[f64]) -> Result<Witness> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Inadmissible(format!("dimension must be at least 2, got {n}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidPoint(format!("{x:?}")));
    }
    if x.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidPoint("x = 0".into()));
    }
    let collinear = x[1..].iter().all(|v| *v == 0.0);
    let mut w = vec![BigRational::zero(); n];
    if collinear {
        w[1] = BigRational::one();
    } else if n == 2 {
        return Ok(Witness::NoWitness);
    } else {
        let j = (1..n).max_by(|a, b| x[*a].abs().total_cmp(&x[*b].abs())).expect("n ≥ 3");
        let k = (1..n).find(|i| *i != j).expect("n ≥ 3");
        w[j] = q(x[k]);
        w[k] = -q(x[j]);
    }
    let norm2: BigRational = w.iter().map(|v| v * v).sum();
    let exact: Vec<Vec<BigRational>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let id = if a == b { BigRational::one() } else { BigRational::zero() };
                    id + &w[a] * &w[b] / &norm2
                })
                .collect()
        })
        .collect();

    let xq: Vec<BigRational> = x.iter().map(|v| q(*v)).collect();
    let mut e1 = vec![BigRational::zero(); n];
    e1[0] = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    if mat_vec(&exact, &e1) != e1 || mat_vec(&exact, &xq) != xq || det(&exact) != two {
        return Err(Error::NonConvergence("witness failed exact verification".into()));
    }
    let approx = exact.iter().map(|row| row.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    Ok(Witness::Found(WitnessMatrix { exact, approx }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cfg() -> PvConfig {
        PvConfig::default()
    }

    fn gauss(y: [f64; 2]) -> f64 {
        (-(y[0] * y[0] + y[1] * y[1])).exp()
    }

    fn bump(y: [f64; 2]) -> f64 {
        let (a, b) = (y[0] - 0.8, y[1] + 0.4);
        (1.0 + 0.5 * y[0] - 0.3 * y[1] * y[1]) * (-(a * a + 2.0 * b * b + 0.6 * a * b)).exp()
    }

    #[test]
    fn cross_examples() {
        let (e1, e2) = (Point::new(1.0, 0.0), Point::new(0.0, 1.0));
        assert_eq!(cross(&e1, &e2), 1.0);
        let x = Point::new(0.3, -2.0);
        assert_eq!(cross(&x, &x), 0.0);
    }

    #[test]
    fn radon_of_gaussian() {
        assert_relative_eq!(radon_origin(&gauss, 0.0, &cfg()).unwrap().value, PI.sqrt(), max_relative = 1e-10);
        for xi in [0.5, -2.0, 7.0] {
            let v = radon_origin(&gauss, xi, &cfg()).unwrap().value;
            assert_relative_eq!(v, PI.sqrt() / (1.0 + xi * xi).sqrt(), max_relative = 1e-10);
        }
        let odd = |y: [f64; 2]| y[0] * gauss(y);
        assert!(radon_origin(&odd, 0.7, &cfg()).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn radon_truncation_is_reported() {
        let wide = |y: [f64; 2]| (-(y[0] * y[0] + y[1] * y[1]) / 50.0).exp();
        assert!(matches!(radon_origin(&wide, 0.0, &cfg()), Err(Error::Truncation { .. })));
    }

    #[test]
    fn hilbert_examples() {
        let h = |xi: f64| 1.0 / (1.0 + xi * xi);
        for tau in [1.0, 0.0, -0.3, 5.0] {
            let v = hilbert_pv(&h, tau, &cfg()).unwrap();
            assert!((v.value - PI * tau / (1.0 + tau * tau)).abs() < 1e-8, "τ={tau}: {}", v.value);
        }
        let even = |xi: f64| (-xi * xi).exp();
        assert!(hilbert_pv(&even, 0.0, &cfg()).unwrap().value.abs() < 1e-10);
        assert_eq!(hilbert_pv(&|_| 0.0, 0.4, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn direct_and_composed_agree() {
        for x in [Point::new(1.0, 0.0), Point::new(0.7, -1.3), Point::new(-2.0, 0.5)] {
            let d = apply_gl2_direct(&bump, &x, &cfg()).unwrap();
            let c = apply_gl2_composed(&bump, &x, &cfg()).unwrap();
            assert!((d.value - c.value).abs() <= 1e-6 * d.value.abs(), "{:?}: {} vs {}", x.0, d.value, c.value);
            assert!(d.estimate < 1e-6 * d.value.abs());
        }
    }

    #[test]
    fn regular_oracle_away_from_the_singular_line() {
        // at x = e₁ the kernel is 1/y₂; f lives in y₂ ∈ [0.5, 3.5]
        let f = |y: [f64; 2]| {
            let (a, b) = (y[0] - 0.3, y[1] - 2.0);
            (-(a * a + b * b) / 0.0625).exp() * (1.0 + y[0])
        };
        let brute = composite_gauss(
            |y1| composite_gauss(|y2| f([y1, y2]) / y2, 0.5, 3.5, 8, 24),
            -1.2,
            1.8,
            8,
            24,
        );
        let cfg = PvConfig { eta_truncation: 4.0, ..cfg() };
        let d = apply_gl2_direct(&f, &Point::new(1.0, 0.0), &cfg).unwrap();
        let c = apply_gl2_composed(&f, &Point::new(1.0, 0.0), &cfg).unwrap();
        assert_relative_eq!(d.value, brute, max_relative = 1e-8);
        assert_relative_eq!(c.value, brute, max_relative = 1e-8);
    }

    #[test]
    fn sign_factor_is_required() {
        // an even f gives Kf = 0 since [x, −y] = −[x, y]
        let even = |y: [f64; 2]| bump(y) + bump([-y[0], -y[1]]);
        let x = Point::new(1.0, 0.4);
        assert!(apply_gl2_direct(&even, &x, &cfg()).unwrap().value.abs() < 1e-10);
        assert!(apply_gl2_composed(&even, &x, &cfg()).unwrap().value.abs() < 1e-10);
        let unsigned = |xi: f64| radon_origin(&even, xi, &cfg()).unwrap().value;
        let printed = -hilbert_pv(&unsigned, 0.4, &cfg()).unwrap().value;
        assert!(printed.abs() > 0.1, "{printed}");
    }

    #[test]
    fn parity_examples() {
        let f = |y: [f64; 2]| y[0] * gauss(y);
        let e1 = Point::new(1.0, 0.0);
        assert!(apply_gl2_direct(&f, &e1, &cfg()).unwrap().value.abs() < 1e-10);
        assert!(apply_gl2_composed(&f, &e1, &cfg()).unwrap().value.abs() < 1e-10);
        assert!(matches!(apply_gl2_direct(&f, &Point::new(0.0, 1.0), &cfg()), Err(Error::ExcludedRay)));
        // radial f: every signed line integral vanishes
        assert!(apply_gl2_direct(&gauss, &Point::new(0.3, 2.0), &cfg()).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn image_homogeneity() {
        let x = Point::new(0.9, 0.6);
        let base = apply_gl2_direct(&bump, &x, &cfg()).unwrap().value;
        for s in [0.5, 2.0, 4.0] {
            let v = apply_gl2_direct(&bump, &Point::new(s * x.x1(), s * x.x2()), &cfg()).unwrap().value;
            assert_relative_eq!(v, base / s, max_relative = 1e-10);
        }
    }

    #[test]
    fn absolute_kernel_is_refused() {
        use crate::geometry::DomainSpec;
        use crate::kernels::{build_kernel, preset};
        let d = DomainSpec::gl2_plane();
        let abs = build_kernel(&d, &preset("gl2:abs").unwrap()).unwrap();
        assert!(matches!(apply_kernel(&abs, &bump, &Point::new(1.0, 0.0), &cfg()), Err(Error::NonIntegrable(_))));
        let anti = build_kernel(&d, &preset("gl2:antisym").unwrap()).unwrap();
        let v = apply_kernel(&anti, &bump, &Point::new(1.0, 0.2), &cfg()).unwrap().value;
        assert_eq!(v, apply_gl2_direct(&bump, &Point::new(1.0, 0.2), &cfg()).unwrap().value);
    }

    #[test]
    fn witness_examples() {
        let Witness::Found(h) = stabilizer_witness(&[1.0, 1.0, 0.0]).unwrap() else { panic!() };
        assert_eq!(h.approx, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]]);
        let Witness::Found(h) = stabilizer_witness(&[3.0, 0.0]).unwrap() else { panic!() };
        assert_eq!(h.approx, vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert_eq!(stabilizer_witness(&[1.0, 1.0]).unwrap(), Witness::NoWitness);
        assert!(stabilizer_witness(&[0.0, 0.0, 0.0]).is_err());
        assert!(stabilizer_witness(&[1.0]).is_err());
    }
}
