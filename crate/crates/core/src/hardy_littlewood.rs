//! Hardy–Littlewood constants `κ` for homogeneous kernels of degree `−n` on
//! `ℝ₊` and `ℝ²`, and numerical two-sided brackets of the `L^p` operator norm.
//!
//! All integrals over `(0, ∞)` are taken in the log variable `y = e^s`, where
//! the homogeneous integrands decay exponentially in `|s|`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{trapezoid_periodic, Adaptive, Integral};
use crate::sampling::{log_uniform, stream_rng};

type Eval1 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Eval2 = Arc<dyn Fn([f64; 2], [f64; 2]) -> f64 + Send + Sync>;

/// Residual allowed by the construction-time homogeneity checks.
pub const HOMOGENEITY_TOL: f64 = 1e-10;

const CHECK_SAMPLES: u64 = 200;

/// Relative target of the `κ` quadratures.
pub const KAPPA_REL_TOL: f64 = 1e-10;

/// A kernel on `ℝ₊²` with `k(λx, λy) = λ⁻¹ k(x, y)`.
#[derive(Clone)]
pub struct HLKernel1D {
    name: String,
    eval: Eval1,
    /// Ratios `y/x` where `k` is not smooth.
    ratios: Vec<f64>,
}

impl std::fmt::Debug for HLKernel1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HLKernel1D({})", self.name)
    }
}

fn rel_residual(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if b.abs() < 1e-30 {
        d
    } else {
        d / b.abs()
    }
}

impl HLKernel1D {
    /// Wraps `k` after checking degree `−1` homogeneity on sampled points.
    pub fn new(
        name: impl Into<String>,
        k: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        ratios: Vec<f64>,
    ) -> Result<Self> {
        let name = name.into();
        for i in 0..CHECK_SAMPLES {
            let mut rng = stream_rng(0x4b31, i);
            let x = log_uniform(&mut rng, 0.1, 10.0);
            let y = log_uniform(&mut rng, 0.1, 10.0);
            let l = log_uniform(&mut rng, 0.01, 100.0);
            let (a, b) = (l * k(l * x, l * y), k(x, y));
            if !(a.is_finite() && b.is_finite()) {
                continue;
            }
            let r = rel_residual(a, b);
            if r > HOMOGENEITY_TOL {
                return Err(Error::Inadmissible(format!(
                    "{name} is not homogeneous of degree -1: residual {r:e} at (x, y, λ) = ({x}, {y}, {l})"
                )));
            }
        }
        Ok(HLKernel1D { name, eval: Arc::new(k), ratios })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn scaled(&self, c: f64) -> Self {
        let e = self.eval.clone();
        HLKernel1D { name: format!("{c}*{}", self.name), eval: Arc::new(move |x, y| c * e(x, y)), ratios: self.ratios.clone() }
    }
}

/// A rotation-invariant kernel on `(ℝ²∖{0})²` homogeneous of degree `−2`.
#[derive(Clone)]
pub struct HLKernel2D {
    name: String,
    eval: Eval2,
    /// Points `y` where `k(e₁, y)` is singular, besides the origin.
    singular_points: Vec<[f64; 2]>,
}

impl std::fmt::Debug for HLKernel2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HLKernel2D({})", self.name)
    }
}

fn rotate(v: [f64; 2], t: f64) -> [f64; 2] {
    let (s, c) = t.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

impl HLKernel2D {
    /// Wraps `k` after checking degree `−2` homogeneity and rotation
    /// invariance on sampled points.
    pub fn new(
        name: impl Into<String>,
        k: impl Fn([f64; 2], [f64; 2]) -> f64 + Send + Sync + 'static,
        singular_points: Vec<[f64; 2]>,
    ) -> Result<Self> {
        let name = name.into();
        for i in 0..CHECK_SAMPLES {
            let mut rng = stream_rng(0x4b32, i);
            let pt = |rng: &mut rand_chacha::ChaCha8Rng| {
                let r = log_uniform(rng, 0.1, 10.0);
                let t = rng.gen_range(0.0..TAU);
                [r * t.cos(), r * t.sin()]
            };
            let x = pt(&mut rng);
            let y = pt(&mut rng);
            let l = log_uniform(&mut rng, 0.01, 100.0);
            let w = rng.gen_range(0.0..TAU);
            let b = k(x, y);
            let scaled = l * l * k([l * x[0], l * x[1]], [l * y[0], l * y[1]]);
            let rotated = k(rotate(x, w), rotate(y, w));
            if !(b.is_finite() && scaled.is_finite() && rotated.is_finite()) {
                continue;
            }
            let r = rel_residual(scaled, b).max(rel_residual(rotated, b));
            if r > HOMOGENEITY_TOL {
                return Err(Error::Inadmissible(format!(
                    "{name} is not a rotation-invariant kernel of degree -2: residual {r:e}"
                )));
            }
        }
        Ok(HLKernel2D { name, eval: Arc::new(k), singular_points })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        (self.eval)(x, y)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let e = self.eval.clone();
        HLKernel2D {
            name: format!("{c}*{}", self.name),
            eval: Arc::new(move |x, y| c * e(x, y)),
            singular_points: self.singular_points.clone(),
        }
    }

    /// Angular average `A(ρ) = ∫₀^{2π} k(e₁, ρ(cos t, sin t)) dt`.
    ///
    /// Smooth kernels use the 512-node periodic trapezoid rule; kernels with
    /// singular points use adaptive quadrature split at each singular
    /// direction.
    pub fn angular(&self, rho: f64) -> Integral {
        let e1 = [1.0, 0.0];
        let f = |t: f64| self.eval(e1, [rho * t.cos(), rho * t.sin()]);
        if self.singular_points.is_empty() {
            let (nodes, h) = trapezoid_periodic(512);
            let value = h * nodes.iter().map(|t| f(*t)).sum::<f64>();
            return Integral { value, error: 0.0, evaluations: 512, converged: true };
        }
        let phi0 = self.singular_points[0][1].atan2(self.singular_points[0][0]);
        let mut breaks: Vec<f64> = self
            .singular_points
            .iter()
            .map(|q| {
                let phi = q[1].atan2(q[0]);
                phi0 - PI + crate::geometry::wrap_angle(phi - phi0 + PI)
            })
            .collect();
        breaks.push(phi0 - PI);
        breaks.push(phi0 + PI);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Adaptive::new(0.0, 1e-12).with_max_segments(4000).integrate_breaks(f, &breaks)
    }
}

/// 1D presets: `hlp:1/(x+y)`, `hlp:1(x<y)/y` (alias `hlp:indicator`).
pub fn kernel_1d(name: &str) -> Result<HLKernel1D> {
    match name {
        "hlp:1/(x+y)" => HLKernel1D::new(name, |x, y| 1.0 / (x + y), vec![]),
        "hlp:1(x<y)/y" | "hlp:indicator" => {
            HLKernel1D::new("hlp:1(x<y)/y", |x, y| if x < y { 1.0 / y } else { 0.0 }, vec![1.0])
        }
        _ => Err(Error::Config(format!("unknown 1D kernel `{name}`"))),
    }
}

/// 2D presets: `angular:a=one|cos|zero` for `a(cos Δθ)/(|x|²+|y|²)` and
/// `riesz:alpha=α` for `1/(|x|^α |x−y|^{2−α})`, `0 < α < 2`.
pub fn kernel_2d(name: &str) -> Result<HLKernel2D> {
    if let Some(a) = name.strip_prefix("angular:a=") {
        let a: fn(f64) -> f64 = match a {
            "one" => |_| 1.0,
            "cos" => |c| c,
            "zero" => |_| 0.0,
            _ => return Err(Error::Config(format!("unknown angular profile `{a}`"))),
        };
        return HLKernel2D::new(
            name,
            move |x, y| {
                let nx = x[0].hypot(x[1]);
                let ny = y[0].hypot(y[1]);
                let c = (x[0] * y[0] + x[1] * y[1]) / (nx * ny);
                a(c) / (nx * nx + ny * ny)
            },
            vec![],
        );
    }
    if let Some(a) = name.strip_prefix("riesz:alpha=") {
        let alpha: f64 = a.parse().map_err(|_| Error::Parse(format!("bad alpha `{a}`")))?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Inadmissible(format!("Riesz exponent must lie in (0, 2), got {alpha}")));
        }
        return HLKernel2D::new(
            name,
            move |x, y| {
                let nx = x[0].hypot(x[1]);
                let d = (x[0] - y[0]).hypot(x[1] - y[1]);
                1.0 / (nx.powf(alpha) * d.powf(2.0 - alpha))
            },
            vec![[1.0, 0.0]],
        );
    }
    Err(Error::Config(format!("unknown 2D kernel `{name}`")))
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaReport {
    pub kappa: f64,
    pub estimate: f64,
    pub divergent: bool,
    pub dual: Option<f64>,
    pub dual_estimate: Option<f64>,
}

impl KappaReport {
    fn divergent() -> Self {
        KappaReport { kappa: f64::INFINITY, estimate: f64::INFINITY, divergent: true, dual: None, dual_estimate: None }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Inadmissible(format!("p must lie in [1, ∞), got {p}")));
    }
    Ok(())
}

/// Inner cutoff for the divergence test and the number of halvings.
const DIVERGENCE_DELTA: f64 = 1e-6;
const DIVERGENCE_HALVINGS: usize = 3;

/// True when every halving of the cutoff changes the partial integral of `h`
/// over `[0, L]` (`L = ln(1/δ)`, in direction `sign`) by more than 1% and the
/// changes do not contract geometrically (a contracting sequence is a
/// convergent power tail, however slow).
fn diverges_one_side(h: &dyn Fn(f64) -> f64, breaks: &[f64], sign: f64) -> bool {
    let q = Adaptive::new(0.0, 1e-8).with_max_segments(500);
    let base = DIVERGENCE_DELTA.recip().ln();
    let segment = |a: f64, b: f64| {
        let mut pts = vec![a, b];
        pts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
        pts.sort_by(f64::total_cmp);
        q.integrate_breaks(h, &pts).value
    };
    let (a, b) = if sign > 0.0 { (0.0, base) } else { (-base, 0.0) };
    let mut partial = segment(a, b);
    let mut l = base;
    let mut changes = Vec::with_capacity(DIVERGENCE_HALVINGS);
    for _ in 0..DIVERGENCE_HALVINGS {
        let next = l + std::f64::consts::LN_2;
        let (a, b) = if sign > 0.0 { (l, next) } else { (-next, -l) };
        let change = segment(a, b);
        if !(change.abs() > 0.01 * partial.abs()) {
            return false;
        }
        changes.push(change.abs());
        partial += change;
        l = next;
    }
    changes.windows(2).all(|w| w[1] >= CONTRACTION_LIMIT * w[0])
}

/// Ratio of successive cutoff changes below which a tail counts as convergent.
const CONTRACTION_LIMIT: f64 = 0.97;

fn diverges(h: &dyn Fn(f64) -> f64, breaks: &[f64]) -> bool {
    diverges_one_side(h, breaks, -1.0) || diverges_one_side(h, breaks, 1.0)
}

fn log_breaks(points: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = points.into_iter().filter(|x| *x > 0.0 && x.is_finite()).map(f64::ln).collect();
    v.push(0.0);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn converged_or_err(i: Integral, what: &str) -> Result<Integral> {
    if !i.value.is_finite() {
        return Err(Error::NonFinite(what.into()));
    }
    if !i.converged {
        return Err(Error::NonConvergence(format!("{what}: error estimate {:e}", i.error)));
    }
    Ok(i)
}

/// `κ = ∫₀^∞ k(1, y) y^{−1/p} dy`, cross-checked against the dual form
/// `∫₀^∞ k(x, 1) x^{−1/q} dx`. Reports `κ = ∞` when the cutoff test detects
/// divergence.
pub fn kappa_1d(k: &HLKernel1D, p: f64) -> Result<KappaReport> {
    check_p(p)?;
    let inv_q = 1.0 - 1.0 / p;
    let primal = |s: f64| k.eval(1.0, s.exp()) * (s * inv_q).exp();
    let dual = |s: f64| k.eval(s.exp(), 1.0) * (s / p).exp();
    let breaks = log_breaks(k.ratios.iter().copied());
    let dual_breaks = log_breaks(k.ratios.iter().map(|r| 1.0 / r));

    let primal_div = diverges(&primal, &breaks);
    let dual_div = diverges(&dual, &dual_breaks);
    if primal_div || dual_div {
        if primal_div != dual_div {
            log::warn!("divergence detected in only one of the primal and dual forms");
        }
        return Ok(KappaReport::divergent());
    }
    let q = Adaptive::new(1e-14, KAPPA_REL_TOL).with_max_segments(4000);
    let a = converged_or_err(q.integrate_real_line(primal, &breaks), "κ integral")?;
    let b = converged_or_err(q.integrate_real_line(dual, &dual_breaks), "dual κ integral")?;
    let allowed = (3.0 * (a.error + b.error)).max(1e-9 * a.value.abs());
    if (a.value - b.value).abs() > allowed {
        return Err(Error::DualMismatch { primal: a.value, dual: b.value });
    }
    Ok(KappaReport {
        kappa: a.value,
        estimate: a.error,
        divergent: false,
        dual: Some(b.value),
        dual_estimate: Some(b.error),
    })
}

/// `κ = ∫_{ℝ²} k(e₁, y) |y|^{−2/p} dy` in polar coordinates.
pub fn kappa_2d(k: &HLKernel2D, p: f64) -> Result<KappaReport> {
    check_p(p)?;
    let expo = 2.0 - 2.0 / p;
    let radial = |s: f64| {
        let rho = s.exp();
        k.angular(rho).value * (s * expo).exp()
    };
    let breaks = log_breaks(k.singular_points.iter().map(|q| q[0].hypot(q[1])));
    if diverges(&radial, &breaks) {
        return Ok(KappaReport::divergent());
    }
    let q = Adaptive::new(1e-14, 1e-9).with_max_segments(4000);
    let a = converged_or_err(q.integrate_real_line(radial, &breaks), "2D κ integral")?;
    Ok(KappaReport { kappa: a.value, estimate: a.error, divergent: false, dual: None, dual_estimate: None })
}

/// `‖K f‖_p / ‖f‖_p` for `f(y) = y^{−1/p}` on `[1/N, N]`, which approaches
/// `κ` from below for nonnegative kernels as `N → ∞`.
pub fn norm_lower_bound(k: &HLKernel1D, p: f64, n: f64) -> Result<f64> {
    check_p(p)?;
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::Inadmissible(format!("N must be a finite number ≥ 1, got {n}")));
    }
    if n == 1.0 {
        log::warn!("N = 1 gives an empty support; the bound is 0");
        return Ok(0.0);
    }
    let l = n.ln();
    let inv_q = 1.0 - 1.0 / p;
    let ln_r: Vec<f64> = k.ratios.iter().map(|r| r.ln()).collect();
    let inner_q = Adaptive::new(0.0, 1e-11).with_max_segments(1000);
    let kf = |t: f64| -> f64 {
        let x = t.exp();
        let mut pts = vec![-l, l];
        pts.extend(ln_r.iter().map(|lr| t + lr).filter(|u| *u > -l && *u < l));
        pts.sort_by(f64::total_cmp);
        inner_q.integrate_breaks(|u| k.eval(x, u.exp()) * (u * inv_q).exp(), &pts).value
    };
    let mut outer_breaks = vec![-l, l];
    for lr in &ln_r {
        outer_breaks.push(-l - lr);
        outer_breaks.push(l - lr);
    }
    let outer = Adaptive::new(0.0, 1e-9).with_max_segments(2000);
    let norm_kf = outer.integrate_real_line(|t| kf(t).abs().powf(p) * t.exp(), &outer_breaks);
    let norm_kf = converged_or_err(norm_kf, "‖Kf_N‖")?;
    Ok((norm_kf.value / (2.0 * l)).powf(1.0 / p))
}

/// Radial analogue of [`norm_lower_bound`] with `f(y) = |y|^{−2/p}` on the
/// annulus `1/N ≤ |y| ≤ N`.
pub fn norm_lower_bound_2d(k: &HLKernel2D, p: f64, n: f64) -> Result<f64> {
    check_p(p)?;
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::Inadmissible(format!("N must be a finite number ≥ 1, got {n}")));
    }
    if n == 1.0 {
        log::warn!("N = 1 gives an empty support; the bound is 0");
        return Ok(0.0);
    }
    let l = n.ln();
    let expo = 2.0 - 2.0 / p;
    // Kf(r e₁) = ∫ ρ^{1−2/p} r^{−2} A(ρ/r) dρ over [1/N, N], with ρ = e^u
    let inner_q = Adaptive::new(0.0, 1e-10).with_max_segments(1000);
    let kf = |t: f64| -> f64 {
        let mut pts = vec![-l, l];
        for q in &k.singular_points {
            let u = t + q[0].hypot(q[1]).ln();
            if u > -l && u < l {
                pts.push(u);
            }
        }
        pts.sort_by(f64::total_cmp);
        inner_q.integrate_breaks(|u| k.angular((u - t).exp()).value * (u * expo - 2.0 * t).exp(), &pts).value
    };
    let mut outer_breaks = vec![-l, l];
    for q in &k.singular_points {
        let lq = q[0].hypot(q[1]).ln();
        outer_breaks.push(-l - lq);
        outer_breaks.push(l - lq);
    }
    let outer = Adaptive::new(0.0, 1e-8).with_max_segments(2000);
    let norm_kf = outer.integrate_real_line(|t| TAU * kf(t).abs().powf(p) * (2.0 * t).exp(), &outer_breaks);
    let norm_kf = converged_or_err(norm_kf, "‖Kf_N‖")?;
    Ok((norm_kf.value / (TAU * 2.0 * l)).powf(1.0 / p))
}

/// Compactly supported piecewise-linear function given by knots and values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinear {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn eval(&self, y: f64) -> f64 {
        let k = &self.knots;
        if y <= k[0] || y >= k[k.len() - 1] {
            return 0.0;
        }
        let i = k.partition_point(|x| *x <= y) - 1;
        let t = (y - k[i]) / (k[i + 1] - k[i]);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Knots plus the zero crossings inside each segment.
    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = self.knots.clone();
        for i in 0..self.knots.len() - 1 {
            let (a, b) = (self.values[i], self.values[i + 1]);
            if a * b < 0.0 {
                pts.push(self.knots[i] + (self.knots[i + 1] - self.knots[i]) * a / (a - b));
            }
        }
        pts.sort_by(f64::total_cmp);
        pts
    }

    /// Random `f` with log-uniform knots in `[0.1, 10]`, values `U(−1, 1)`
    /// and zero ends.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let m = rng.gen_range(3..=8);
        let mut knots: Vec<f64> = (0..m).map(|_| log_uniform(rng, 0.1, 10.0)).collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let n = knots.len();
        let values = (0..n).map(|i| if i == 0 || i == n - 1 { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect();
        PiecewiseLinear { knots, values }
    }

    pub fn hat(a: f64, peak: f64, b: f64) -> Self {
        PiecewiseLinear { knots: vec![a, peak, b], values: vec![0.0, 1.0, 0.0] }
    }
}

/// `‖Kf‖_p / ‖f‖_p` for a piecewise-linear `f`.
pub fn norm_ratio(k: &HLKernel1D, p: f64, f: &PiecewiseLinear) -> Result<f64> {
    check_p(p)?;
    let pts = f.breakpoints();
    let q = Adaptive::new(0.0, 1e-11).with_max_segments(1000);
    let norm_f = q.integrate_breaks(|y| f.eval(y).abs().powf(p), &pts).value;
    if norm_f == 0.0 {
        return Err(Error::Inadmissible("f vanishes identically".into()));
    }
    let kf = |t: f64| -> f64 {
        let x = t.exp();
        let mut inner = pts.clone();
        inner.extend(k.ratios.iter().map(|r| x * r).filter(|y| *y > pts[0] && *y < pts[pts.len() - 1]));
        inner.sort_by(f64::total_cmp);
        q.integrate_breaks(|y| k.eval(x, y) * f.eval(y), &inner).value
    };
    let mut outer_breaks: Vec<f64> = pts.iter().map(|y| y.ln()).collect();
    for r in &k.ratios {
        outer_breaks.extend(pts.iter().map(|y| (y / r).ln()));
    }
    let outer = Adaptive::new(0.0, 1e-9).with_max_segments(3000);
    let norm_kf = converged_or_err(
        outer.integrate_real_line(|t| kf(t).abs().powf(p) * t.exp(), &outer_breaks),
        "‖Kf‖",
    )?;
    Ok((norm_kf.value / norm_f).powf(1.0 / p))
}

/// Quadrature slack on the upper bound.
pub const UPPER_CHECK_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct UpperCheckReport {
    pub kappa: f64,
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
    pub pass: bool,
}

/// Checks `‖Kf‖_p ≤ κ ‖f‖_p` on `n_random` random piecewise-linear `f`.
pub fn norm_upper_check(k: &HLKernel1D, p: f64, n_random: usize, seed: u64) -> Result<UpperCheckReport> {
    if n_random == 0 {
        return Err(Error::ZeroBudget);
    }
    let kappa = kappa_1d(k, p)?;
    if kappa.divergent {
        return Err(Error::NonIntegrable(format!("κ = ∞ for {} at p = {p}", k.name())));
    }
    let ratios: Vec<f64> = (0..n_random as u64)
        .into_par_iter()
        .map(|i| norm_ratio(k, p, &PiecewiseLinear::random(&mut stream_rng(seed, i))))
        .collect::<Result<_>>()?;
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(UpperCheckReport {
        kappa: kappa.kappa,
        max_ratio,
        pass: max_ratio <= kappa.kappa * (1.0 + UPPER_CHECK_TOL),
        ratios,
    })
}
