//! Quadrature application of integral operators, the quasiregular action
//! `L_g f(x) = f(g⁻¹x)`, the unitary `U_p f(x) = λ_x^{1/p} f(x)`, and the
//! commutation checks for homogeneous and conjugated operators.

use std::f64::consts::TAU;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, DomainTag, GroupElement, Point};
use crate::kernels::{Kernel, Scalar};
use crate::quad::{gauss_legendre_on, trapezoid_periodic};
use crate::sampling::{self, stream_rng};

/// Coordinates in which a grid is a tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GridKind {
    /// `s = ln ρ` with `ρ² = Γ_C(r²)`, times `θ`.
    LogRadial,
    /// `z` times `θ`.
    Cylinder,
    /// `u = r²` times `θ`.
    DiskArea,
    /// `x₁` times `x₂`.
    Cartesian,
}

/// Resolution and extent of a tensor grid. `lo`, `hi` and `breaks` are in
/// the natural first coordinate: `ρ` for log-radial grids, `z`, `u = r²`, or
/// `x₁, x₂` (both axes) for Cartesian grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub n_first: usize,
    pub n_theta: usize,
    pub panels: usize,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub breaks: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_first: 128, n_theta: 128, panels: 8, lo: None, hi: None, breaks: Vec::new() }
    }
}

impl GridSpec {
    pub fn with_resolution(mut self, n_first: usize, n_theta: usize) -> Self {
        self.n_first = n_first;
        self.n_theta = n_theta;
        self
    }

    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.lo = Some(lo);
        self.hi = Some(hi);
        self
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels;
        self
    }
}

/// Tensor quadrature rule whose weights already include the measure density,
/// so `Σ wᵢ f(xᵢ) ≈ ∫ f dμ`.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureGrid {
    pub domain: DomainSpec,
    pub kind: GridKind,
    pub spec: GridSpec,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    axis0: Vec<f64>,
    axis1: Vec<f64>,
    bounds0: (f64, f64),
    bounds1: (f64, f64),
    periodic: bool,
}

fn panel_rule(lo: f64, hi: f64, panels: usize, breaks: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = panels.max(1);
    let mut edges: Vec<f64> = (0..=panels).map(|k| lo + (hi - lo) * k as f64 / panels as f64).collect();
    edges.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    edges.sort_by(|a, b| a.total_cmp(b));
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (hi - lo));
    let order = (n / panels).max(2);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in edges.windows(2) {
        let (x, wt) = gauss_legendre_on(order, w[0], w[1]);
        nodes.extend(x);
        weights.extend(wt);
    }
    (nodes, weights)
}

impl QuadratureGrid {
    /// Default grid for the domain: log-radial for polar domains, `(z, θ)` on
    /// the cylinder, Cartesian on the GL(2) plane.
    pub fn for_domain(d: &DomainSpec, spec: GridSpec) -> Result<Self> {
        let kind = match d.tag() {
            DomainTag::Cylinder => GridKind::Cylinder,
            DomainTag::GL2Plane => GridKind::Cartesian,
            _ => GridKind::LogRadial,
        };
        Self::new(d, kind, spec)
    }

    pub fn new(d: &DomainSpec, kind: GridKind, spec: GridSpec) -> Result<Self> {
        if spec.n_first < 2 || spec.n_theta < 2 || spec.panels == 0 {
            return Err(Error::Config("grid needs at least two nodes per axis".into()));
        }
        let norm = if d.is_polar() { d.transformed_norm() } else { 1.0 };
        match (kind, d.tag()) {
            (GridKind::Cylinder, DomainTag::Cylinder) | (GridKind::Cartesian, DomainTag::GL2Plane) => {}
            (GridKind::LogRadial | GridKind::DiskArea, _) if d.is_polar() => {}
            _ => return Err(Error::Config(format!("{kind:?} grid does not fit {:?}", d.tag()))),
        }

        // first axis bounds in the grid coordinate
        let (lo, hi, breaks): (f64, f64, Vec<f64>) = match kind {
            GridKind::LogRadial => {
                let (g_lo, g_hi) = d.gamma_range()?;
                let (rho_min, rho_max) = (g_lo.sqrt(), g_hi.sqrt());
                let scale = if rho_min > 0.0 && rho_max.is_infinite() { rho_min } else { 1.0 };
                let lo = spec.lo.unwrap_or(if rho_min > 0.0 { rho_min } else { 1e-3 * scale.min(rho_max) });
                let hi = spec.hi.unwrap_or(if rho_max.is_finite() { rho_max } else { 1e3 * scale });
                if !(lo >= rho_min && hi <= rho_max && lo > 0.0 && lo < hi) {
                    return Err(Error::Config(format!(
                        "ρ truncation ({lo}, {hi}) outside the range ({rho_min}, {rho_max})"
                    )));
                }
                (lo.ln(), hi.ln(), spec.breaks.iter().filter(|b| **b > 0.0).map(|b| b.ln()).collect())
            }
            GridKind::Cylinder => {
                (spec.lo.unwrap_or(-(1e3f64.ln())), spec.hi.unwrap_or(1e3f64.ln()), spec.breaks.clone())
            }
            GridKind::DiskArea => {
                let r2 = d.radius().map_or(f64::INFINITY, |r| r * r);
                let lo = spec.lo.unwrap_or(0.0);
                let hi = spec.hi.unwrap_or(r2);
                if !(lo >= 0.0 && hi <= r2 && hi.is_finite() && lo < hi) {
                    return Err(Error::Config(format!("u truncation ({lo}, {hi}) outside (0, {r2})")));
                }
                (lo, hi, spec.breaks.clone())
            }
            GridKind::Cartesian => (spec.lo.unwrap_or(-10.0), spec.hi.unwrap_or(10.0), spec.breaks.clone()),
        };
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("grid bounds ({lo}, {hi}) are not a finite interval")));
        }
        let (axis0, w0) = panel_rule(lo, hi, spec.panels, &breaks, spec.n_first);
        let (axis1, w1, bounds1, periodic) = match kind {
            GridKind::Cartesian => {
                let (x, w) = panel_rule(lo, hi, spec.panels, &breaks, spec.n_theta);
                (x, w, (lo, hi), false)
            }
            _ => {
                let (t, h) = trapezoid_periodic(spec.n_theta);
                let n = t.len();
                (t, vec![h; n], (0.0, TAU), true)
            }
        };

        let mut nodes = Vec::with_capacity(axis0.len() * axis1.len());
        let mut weights = Vec::with_capacity(axis0.len() * axis1.len());
        for (c0, wa) in axis0.iter().zip(&w0) {
            let (first, w_first) = match kind {
                GridKind::LogRadial => {
                    let rho2 = (2.0 * c0).exp();
                    let r = if d.tag() == DomainTag::PuncturedPlane { c0.exp() } else { d.gamma_c_inv(rho2)?.sqrt() };
                    (r, norm * rho2 * wa)
                }
                GridKind::Cylinder => (*c0, (2.0 * c0).exp() * wa),
                GridKind::DiskArea => (c0.sqrt(), norm * 0.5 * d.gamma(*c0)? * wa),
                GridKind::Cartesian => (*c0, *wa),
            };
            for (c1, wb) in axis1.iter().zip(&w1) {
                nodes.push(Point::new(first, *c1));
                weights.push(w_first * wb);
            }
        }
        Ok(QuadratureGrid {
            domain: *d,
            kind,
            spec,
            nodes,
            weights,
            axis0,
            axis1,
            bounds0: (lo, hi),
            bounds1,
            periodic,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same grid at half resolution in both axes.
    pub fn coarsen(&self) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.n_first = (spec.n_first / 2).max(2 * spec.panels.max(1));
        spec.n_theta = (spec.n_theta / 2).max(2);
        if spec.n_first == self.spec.n_first && spec.n_theta == self.spec.n_theta {
            return Err(Error::Config("grid is too coarse to halve".into()));
        }
        Self::new(&self.domain, self.kind, spec)
    }

    /// Tensor coordinates of an arbitrary chart point.
    pub fn coords_of(&self, p: &Point) -> Option<[f64; 2]> {
        match self.kind {
            GridKind::LogRadial => {
                let g = if self.domain.tag() == DomainTag::PuncturedPlane {
                    p.r() * p.r()
                } else {
                    self.domain.gamma_c(p.r() * p.r()).ok()?
                };
                Some([0.5 * g.ln(), p.theta()])
            }
            GridKind::Cylinder => Some([p.z(), p.theta()]),
            GridKind::DiskArea => Some([p.r() * p.r(), p.theta()]),
            GridKind::Cartesian => Some([p.x1(), p.x2()]),
        }
    }

    fn inside(&self, c: [f64; 2]) -> bool {
        let in0 = c[0] >= self.bounds0.0 && c[0] <= self.bounds0.1;
        let in1 = self.periodic || (c[1] >= self.bounds1.0 && c[1] <= self.bounds1.1);
        in0 && in1
    }

    /// `Σ wᵢ` over nodes inside `region` (exact for regions whose edges are
    /// panel breaks).
    pub fn weight_in(&self, pred: impl Fn(&Point) -> bool) -> f64 {
        self.nodes.iter().zip(&self.weights).filter(|(p, _)| pred(p)).map(|(_, w)| w).sum()
    }

    /// Weights of the invariant measure `dμ̃ = dμ / λ_x`.
    pub fn invariant_weights(&self) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| Ok(w / self.domain.point_character(p)?))
            .collect()
    }

    fn bracket(axis: &[f64], v: f64) -> (usize, usize, f64) {
        let n = axis.len();
        if v <= axis[0] {
            return (0, 0, 0.0);
        }
        if v >= axis[n - 1] {
            return (n - 1, n - 1, 0.0);
        }
        let hi = axis.partition_point(|a| *a <= v);
        let lo = hi - 1;
        (lo, hi, (v - axis[lo]) / (axis[hi] - axis[lo]))
    }

    /// Bilinear interpolation of node values; `None` outside the grid support.
    fn interpolate<V: Scalar>(&self, values: &[V], p: &Point) -> Option<V> {
        let c = self.coords_of(p)?;
        if !self.inside(c) {
            return None;
        }
        let n1 = self.axis1.len();
        let (i0, j0, t0) = Self::bracket(&self.axis0, c[0]);
        let (i1, j1, t1) = if self.periodic {
            let h = TAU / n1 as f64;
            let x = crate::geometry::wrap_angle(c[1]) / h;
            let k = (x.floor() as usize).min(n1 - 1);
            (k, (k + 1) % n1, x - k as f64)
        } else {
            Self::bracket(&self.axis1, c[1])
        };
        let at = |a: usize, b: usize| values[a * n1 + b];
        let low = at(i0, i1) * (1.0 - t1) + at(i0, j1) * t1;
        let high = at(j0, i1) * (1.0 - t1) + at(j0, j1) * t1;
        Some(low * (1.0 - t0) + high * t0)
    }
}

type Analytic<V> = Arc<dyn Fn(&Point) -> V + Send + Sync>;

/// Node values of a function on a grid, optionally with its closed form.
#[derive(Clone)]
pub struct GridFunction<V: Scalar = f64> {
    pub grid: Arc<QuadratureGrid>,
    pub values: Vec<V>,
    analytic: Option<Analytic<V>>,
}

impl<V: Scalar> std::fmt::Debug for GridFunction<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GridFunction({} nodes, analytic: {})", self.values.len(), self.analytic.is_some())
    }
}

impl<V: Scalar> GridFunction<V> {
    pub fn from_analytic(grid: Arc<QuadratureGrid>, f: impl Fn(&Point) -> V + Send + Sync + 'static) -> Result<Self> {
        let f: Analytic<V> = Arc::new(f);
        Self::from_arc(grid, f)
    }

    fn from_arc(grid: Arc<QuadratureGrid>, f: Analytic<V>) -> Result<Self> {
        let values: Vec<V> = grid.nodes.iter().map(|p| f(p)).collect();
        check_finite(&values)?;
        Ok(GridFunction { grid, values, analytic: Some(f) })
    }

    pub fn from_values(grid: Arc<QuadratureGrid>, values: Vec<V>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        check_finite(&values)?;
        Ok(GridFunction { grid, values, analytic: None })
    }

    pub fn has_analytic(&self) -> bool {
        self.analytic.is_some()
    }

    /// Closed form evaluation, or interpolation when there is none.
    pub fn eval_at(&self, p: &Point) -> Option<V> {
        match &self.analytic {
            Some(f) => Some(f(p)),
            None => self.grid.interpolate(&self.values, p),
        }
    }

    /// The same function on another grid (requires the closed form).
    pub fn resample(&self, grid: Arc<QuadratureGrid>) -> Result<Self> {
        let f = self
            .analytic
            .clone()
            .ok_or_else(|| Error::Config("resampling needs a closed form".into()))?;
        Self::from_arc(grid, f)
    }

    pub fn linear_combination(&self, alpha: V, other: &Self, beta: V) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) {
            return Err(Error::Config("functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * *a + beta * *b).collect();
        let analytic: Option<Analytic<V>> = match (&self.analytic, &other.analytic) {
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |p| alpha * f(p) + beta * g(p)))
            }
            _ => None,
        };
        Ok(GridFunction { grid: self.grid.clone(), values, analytic })
    }

    /// CSV rows `c0,c1,weight,re,im` in chart coordinates.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "c0,c1,weight,re,im")?;
        for ((p, wt), v) in self.grid.nodes.iter().zip(&self.grid.weights).zip(&self.values) {
            let (re, im) = v.parts();
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", p.0[0], p.0[1], wt, re, im)?;
        }
        Ok(())
    }
}

fn check_finite<V: Scalar>(values: &[V]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite_value()) {
        Some(i) => Err(Error::NonFinite(format!("function value at node {i}"))),
        None => Ok(()),
    }
}

/// Operator values at evaluation points with an optional grid-refinement
/// error estimate `|full − half resolution|` per point.
#[derive(Debug, Clone)]
pub struct Applied<V: Scalar = f64> {
    pub values: Vec<V>,
    pub estimate: Option<Vec<f64>>,
}

fn quadrature_sum<V: Scalar>(k: &Kernel<V>, f: &GridFunction<V>, x: &Point) -> Result<V> {
    let mut acc = V::zero();
    for ((y, w), fy) in f.grid.nodes.iter().zip(&f.grid.weights).zip(&f.values) {
        if fy.modulus() == 0.0 {
            continue;
        }
        let term = k.eval(x, y)? * *fy * *w;
        if !term.is_finite_value() {
            return Err(Error::NonFinite(format!("summand at node {:?} for x = {:?}", y.0, x.0)));
        }
        acc = acc + term;
    }
    Ok(acc)
}

fn apply_on_grid<V: Scalar>(k: &Kernel<V>, f: &GridFunction<V>, points: &[Point]) -> Result<Vec<V>> {
    points.par_iter().map(|x| quadrature_sum(k, f, x)).collect()
}

/// `Kf(x) ≈ Σᵢ wᵢ K(x, yᵢ) f(yᵢ)` at each evaluation point. The refinement
/// estimate is available when `f` carries a closed form.
pub fn apply_operator<V: Scalar>(k: &Kernel<V>, f: &GridFunction<V>, points: &[Point]) -> Result<Applied<V>> {
    let values = apply_on_grid(k, f, points)?;
    let estimate = if f.has_analytic() {
        let half = f.resample(Arc::new(f.grid.coarsen()?))?;
        let coarse = apply_on_grid(k, &half, points)?;
        Some(values.iter().zip(&coarse).map(|(a, b)| (*a - *b).modulus()).collect())
    } else {
        None
    };
    Ok(Applied { values, estimate })
}

/// Pulled-back function together with the fraction of nodes whose preimage
/// stayed inside the grid support.
#[derive(Debug, Clone)]
pub struct Pullback<V: Scalar = f64> {
    pub function: GridFunction<V>,
    pub coverage: f64,
}

/// `L_g f(x) = f(g⁻¹x)`. Closed forms are re-evaluated; otherwise values are
/// interpolated bilinearly in the grid coordinates and extended by zero.
pub fn pullback<V: Scalar>(d: &DomainSpec, g: &GroupElement, f: &GridFunction<V>) -> Result<Pullback<V>> {
    let g_inv = g.inverse();
    d.character(g)?;
    let grid = f.grid.clone();
    let mut covered = 0usize;
    let mut values = Vec::with_capacity(grid.len());
    for p in &grid.nodes {
        let v = d.act(&g_inv, p).ok().and_then(|q| {
            let inside = grid.coords_of(&q).is_some_and(|c| grid.inside(c));
            if inside {
                covered += 1;
            }
            f.eval_at(&q)
        });
        values.push(v.unwrap_or_else(V::zero));
    }
    let coverage = covered as f64 / grid.len() as f64;
    if coverage < 0.99 {
        log::warn!("pullback coverage {:.2}% of nodes", 100.0 * coverage);
    }
    check_finite(&values)?;
    let analytic: Option<Analytic<V>> = f.analytic.clone().map(|h| {
        let d = *d;
        Arc::new(move |p: &Point| d.act(&g_inv, p).map(|q| h(&q)).unwrap_or_else(|_| V::zero())) as Analytic<V>
    });
    Ok(Pullback { function: GridFunction { grid, values, analytic }, coverage })
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Inadmissible(format!("p must be a positive real, got {p}")));
    }
    Ok(())
}

/// `U_p f(x) = λ_x^{1/p} f(x)`, or its inverse. Case B domains are rejected
/// since `λ_x` is not defined there.
pub fn u_p<V: Scalar>(d: &DomainSpec, p: f64, f: &GridFunction<V>, inverse: bool) -> Result<GridFunction<V>> {
    check_p(p)?;
    if d.is_case_b() {
        return Err(Error::CaseB("U_p needs λ constant on stabilizer cosets; no invariant measure reduction".into()));
    }
    let e = if inverse { -1.0 / p } else { 1.0 / p };
    let factors: Vec<f64> =
        f.grid.nodes.iter().map(|x| Ok(d.point_character(x)?.powf(e))).collect::<Result<_>>()?;
    let values: Vec<V> = f.values.iter().zip(&factors).map(|(v, m)| *v * *m).collect();
    check_finite(&values)?;
    let analytic: Option<Analytic<V>> = f.analytic.clone().map(|h| {
        let d = *d;
        Arc::new(move |x: &Point| h(x) * d.point_character(x).map_or(0.0, |l| l.powf(e))) as Analytic<V>
    });
    Ok(GridFunction { grid: f.grid.clone(), values, analytic })
}

/// Outcome of a commutation check on an evaluation set.
#[derive(Debug, Clone, Serialize)]
pub struct CommutationReport {
    /// `max_j |A_j − B_j| / max_j |A_j|`.
    pub residual: f64,
    /// Grid-refinement estimate on the same scale as `residual`, when
    /// closed forms allow one.
    pub estimate: Option<f64>,
    pub tol: f64,
    pub coverage: f64,
    pub pass: bool,
    /// `A_j`, the operator applied first and then translated.
    #[serde(skip)]
    pub reference: Vec<(f64, f64)>,
    /// `A_j − B_j` per evaluation point.
    #[serde(skip)]
    pub defects: Vec<(f64, f64)>,
}

fn commutation_report<V: Scalar>(
    a: &[V],
    b: &[V],
    est_a: Option<Vec<f64>>,
    est_b: Option<Vec<f64>>,
    tol: f64,
    coverage: f64,
) -> CommutationReport {
    let scale = a.iter().map(|v| v.modulus()).fold(0.0, f64::max);
    let norm = if scale < crate::kernels::RESIDUAL_FLOOR { 1.0 } else { scale };
    let defects: Vec<V> = a.iter().zip(b).map(|(x, y)| *x - *y).collect();
    let residual = defects.iter().map(|v| v.modulus()).fold(0.0, f64::max) / norm;
    let estimate = match (est_a, est_b) {
        (Some(ea), Some(eb)) => {
            Some((ea.iter().cloned().fold(0.0, f64::max) + eb.iter().cloned().fold(0.0, f64::max)) / norm)
        }
        _ => None,
    };
    let bound = estimate.map_or(tol, |e| tol.max(e));
    CommutationReport {
        residual,
        estimate,
        tol,
        coverage,
        pass: residual <= bound,
        reference: a.iter().map(|v| v.parts()).collect(),
        defects: defects.iter().map(|v| v.parts()).collect(),
    }
}

/// Checks `L_g(Kf) = K(L_g f)` at the evaluation points.
pub fn check_operator_homogeneity<V: Scalar>(
    d: &DomainSpec,
    k: &Kernel<V>,
    g: &GroupElement,
    f: &GridFunction<V>,
    points: &[Point],
    tol: f64,
) -> Result<CommutationReport> {
    let g_inv = g.inverse();
    let shifted: Vec<Point> = points.iter().map(|x| d.act(&g_inv, x)).collect::<Result<_>>()?;
    let a = apply_operator(k, f, &shifted)?;
    let pb = pullback(d, g, f)?;
    let b = apply_operator(k, &pb.function, points)?;
    Ok(commutation_report(&a.values, &b.values, a.estimate, b.estimate, tol, pb.coverage))
}

/// Checks that `K̃ = U_p K U_p⁻¹` commutes with `L_g` with no character
/// factor.
pub fn check_convolution_reduction<V: Scalar>(
    d: &DomainSpec,
    k: &Kernel<V>,
    p: f64,
    g: &GroupElement,
    f: &GridFunction<V>,
    points: &[Point],
    tol: f64,
) -> Result<CommutationReport> {
    check_p(p)?;
    if d.is_case_b() {
        return Err(Error::CaseB("the conjugated operator needs a Case A domain".into()));
    }
    let g_inv = g.inverse();
    let lam = |x: &Point| -> Result<f64> { Ok(d.point_character(x)?.powf(1.0 / p)) };

    // A_j = K̃f(g⁻¹x_j) = λ_{g⁻¹x}^{1/p} K(U_p⁻¹ f)(g⁻¹x)
    let shifted: Vec<Point> = points.iter().map(|x| d.act(&g_inv, x)).collect::<Result<_>>()?;
    let h = u_p(d, p, f, true)?;
    let a = apply_operator(k, &h, &shifted)?;
    let scale_a: Vec<f64> = shifted.iter().map(lam).collect::<Result<_>>()?;

    // B_j = K̃(L_g f)(x_j) = λ_x^{1/p} K(U_p⁻¹ L_g f)(x)
    let pb = pullback(d, g, f)?;
    let h2 = u_p(d, p, &pb.function, true)?;
    let b = apply_operator(k, &h2, points)?;
    let scale_b: Vec<f64> = points.iter().map(lam).collect::<Result<_>>()?;

    let scaled = |vals: &[V], s: &[f64]| -> Vec<V> { vals.iter().zip(s).map(|(v, m)| *v * *m).collect() };
    let scaled_est =
        |e: Option<Vec<f64>>, s: &[f64]| e.map(|e| e.iter().zip(s).map(|(v, m)| v * m).collect::<Vec<f64>>());
    Ok(commutation_report(
        &scaled(&a.values, &scale_a),
        &scaled(&b.values, &scale_b),
        scaled_est(a.estimate, &scale_a),
        scaled_est(b.estimate, &scale_b),
        tol,
        pb.coverage,
    ))
}

/// Evaluation points drawn like the homogeneity sampler.
pub fn sample_points(d: &DomainSpec, n: usize, seed: u64) -> Vec<Point> {
    (0..n as u64).map(|i| sampling::point(d, &mut stream_rng(seed, i))).collect()
}

/// Gaussian in the invariant radial coordinate (`z`, `ln r` or `ln ρ`)
/// centred at `center`, times a trigonometric polynomial in `θ`.
pub fn log_bump(d: DomainSpec, center: f64, width: f64) -> impl Fn(&Point) -> f64 + Send + Sync + 'static {
    move |x: &Point| {
        let s = match d.tag() {
            DomainTag::Cylinder => x.z(),
            DomainTag::PuncturedPlane => x.r().ln(),
            _ => 0.5 * d.gamma_c(x.r() * x.r()).map_or(f64::NEG_INFINITY, f64::ln),
        };
        let t = x.theta();
        (-((s - center) / width).powi(2)).exp() * (1.0 + 0.3 * t.cos() - 0.2 * (2.0 * t).sin())
    }
}
