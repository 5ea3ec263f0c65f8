//! Measure spaces with explicit dilation groups.
//!
//! Each [`DomainSpec`] carries a chart, a measure density with respect to the
//! chart coordinates, and an action of its dilation group `G` with character
//! `λ`. Polar-type domains (the punctured plane and the radial-measure disks)
//! share one mechanism: the radial transform `ρ² = Γ_C(r²)` maps the measure
//! to (a multiple of) Lebesgue measure, where `G = ℝ×𝕋` acts by
//! `ρ ↦ e^a ρ`, `θ ↦ θ + φ`.

use std::f64::consts::{PI, SQRT_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Adaptive;
use crate::sampling::stream_rng;

/// Smallest admissible offset for the Lobachevsky radial transform,
/// `ln(1+√2)/(2√2) − 1/2`.
pub fn lobachevsky_c_min() -> f64 {
    (1.0 + SQRT_2).ln() / (2.0 * SQRT_2) - 0.5
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta - TAU * (theta / TAU).floor();
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Distance between two angles on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainTag {
    Cylinder,
    PuncturedPlane,
    RadialDisk,
    PoincareDisk,
    BergmanDisk,
    Lobachevsky,
    GL2Plane,
}

/// A concrete measure space with its dilation group.
///
/// Serialized as `{"tag": ..., "R": ..., "C": ..., "alpha": ...}` with `null`
/// standing for an infinite radius or an unused parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainJson", into = "DomainJson")]
pub struct DomainSpec {
    tag: DomainTag,
    radius: Option<f64>,
    c: f64,
    alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DomainJson {
    tag: DomainTag,
    #[serde(rename = "R", default)]
    radius: Option<f64>,
    #[serde(rename = "C", default)]
    c: Option<f64>,
    #[serde(default)]
    alpha: Option<f64>,
}

impl TryFrom<DomainJson> for DomainSpec {
    type Error = Error;

    fn try_from(j: DomainJson) -> Result<Self> {
        let c = j.c;
        match j.tag {
            DomainTag::Cylinder => Ok(DomainSpec::cylinder()),
            DomainTag::PuncturedPlane => Ok(DomainSpec::punctured_plane()),
            DomainTag::GL2Plane => Ok(DomainSpec::gl2_plane()),
            DomainTag::RadialDisk => DomainSpec::radial_disk(j.radius, c.unwrap_or(0.0)),
            DomainTag::PoincareDisk => {
                check_unit_radius(j.radius)?;
                DomainSpec::poincare(c.unwrap_or(-1.0))
            }
            DomainTag::BergmanDisk => {
                check_unit_radius(j.radius)?;
                DomainSpec::bergman(j.alpha.unwrap_or(0.0), c.unwrap_or(1.0))
            }
            DomainTag::Lobachevsky => DomainSpec::lobachevsky(c.unwrap_or_else(lobachevsky_c_min)),
        }
    }
}

fn check_unit_radius(r: Option<f64>) -> Result<()> {
    match r {
        None => Ok(()),
        Some(r) if r != 1.0 => Err(Error::Inadmissible(format!("this disk has radius 1, got R = {r}"))),
        Some(_) => Ok(()),
    }
}

impl From<DomainSpec> for DomainJson {
    fn from(d: DomainSpec) -> Self {
        let polar_c = matches!(
            d.tag,
            DomainTag::RadialDisk | DomainTag::PoincareDisk | DomainTag::BergmanDisk | DomainTag::Lobachevsky
        );
        DomainJson {
            tag: d.tag,
            radius: d.radius,
            c: polar_c.then_some(d.c),
            alpha: (d.tag == DomainTag::BergmanDisk).then_some(d.alpha),
        }
    }
}

/// A chart point. `(z, θ)` on the cylinder, polar `(r, θ)` on polar-type
/// domains, Cartesian `(x₁, x₂)` on the GL(2) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point(pub [f64; 2]);

impl Point {
    pub fn new(c0: f64, c1: f64) -> Self {
        Point([c0, c1])
    }

    pub fn r(&self) -> f64 {
        self.0[0]
    }

    pub fn z(&self) -> f64 {
        self.0[0]
    }

    pub fn theta(&self) -> f64 {
        self.0[1]
    }

    pub fn x1(&self) -> f64 {
        self.0[0]
    }

    pub fn x2(&self) -> f64 {
        self.0[1]
    }
}

/// An element of the dilation group: `(a, φ) ∈ ℝ×𝕋` or an invertible 2×2
/// matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GroupElement {
    Cyl { a: f64, phi: f64 },
    Mat2([[f64; 2]; 2]),
}

impl GroupElement {
    pub fn cyl(a: f64, phi: f64) -> Self {
        GroupElement::Cyl { a, phi: wrap_angle(phi) }
    }

    pub fn mat2(m: [[f64; 2]; 2]) -> Result<Self> {
        let g = GroupElement::Mat2(m);
        if g.det() == 0.0 || !g.det().is_finite() {
            return Err(Error::Inadmissible("singular matrix".into()));
        }
        Ok(g)
    }

    pub fn identity_like(&self) -> Self {
        match self {
            GroupElement::Cyl { .. } => GroupElement::Cyl { a: 0.0, phi: 0.0 },
            GroupElement::Mat2(_) => GroupElement::Mat2([[1.0, 0.0], [0.0, 1.0]]),
        }
    }

    pub fn det(&self) -> f64 {
        match self {
            GroupElement::Cyl { .. } => 1.0,
            GroupElement::Mat2(m) => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        }
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Cyl { a: a1, phi: p1 }, GroupElement::Cyl { a: a2, phi: p2 }) => {
                Ok(GroupElement::cyl(a1 + a2, p1 + p2))
            }
            (GroupElement::Mat2(m), GroupElement::Mat2(n)) => {
                let mut p = [[0.0; 2]; 2];
                for (i, row) in p.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = m[i][0] * n[0][j] + m[i][1] * n[1][j];
                    }
                }
                Ok(GroupElement::Mat2(p))
            }
            _ => Err(Error::GroupMismatch("mixed group variants".into())),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match *self {
            GroupElement::Cyl { a, phi } => GroupElement::cyl(-a, -phi),
            GroupElement::Mat2(m) => {
                let d = self.det();
                GroupElement::Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
            }
        }
    }
}

impl DomainSpec {
    pub fn cylinder() -> Self {
        DomainSpec { tag: DomainTag::Cylinder, radius: None, c: 0.0, alpha: 0.0 }
    }

    pub fn punctured_plane() -> Self {
        DomainSpec { tag: DomainTag::PuncturedPlane, radius: None, c: 0.0, alpha: 0.0 }
    }

    pub fn gl2_plane() -> Self {
        DomainSpec { tag: DomainTag::GL2Plane, radius: None, c: 0.0, alpha: 0.0 }
    }

    /// Lebesgue measure `r dr dθ / π` on the disk of radius `R` (`None` for
    /// the whole plane) with radial transform `Γ_C(t) = t + C`, `C ≥ 0`.
    pub fn radial_disk(radius: Option<f64>, c: f64) -> Result<Self> {
        if let Some(r) = radius {
            if !(r > 0.0) || r.is_nan() {
                return Err(Error::Inadmissible(format!("radius must be in (0, ∞], got {r}")));
            }
        }
        let radius = radius.filter(|r| r.is_finite());
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::Inadmissible(format!("radial disk needs C ≥ 0, got {c}")));
        }
        Ok(DomainSpec { tag: DomainTag::RadialDisk, radius, c, alpha: 0.0 })
    }

    pub fn poincare(c: f64) -> Result<Self> {
        if !(c >= -1.0) || !c.is_finite() {
            return Err(Error::Inadmissible(format!("Poincaré disk needs C ≥ -1, got {c}")));
        }
        Ok(DomainSpec { tag: DomainTag::PoincareDisk, radius: Some(1.0), c, alpha: 0.0 })
    }

    pub fn bergman(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Inadmissible(format!("Bergman exponent must exceed -1, got {alpha}")));
        }
        if !(c >= 1.0) || !c.is_finite() {
            return Err(Error::Inadmissible(format!("Bergman disk needs C ≥ 1, got {c}")));
        }
        Ok(DomainSpec { tag: DomainTag::BergmanDisk, radius: Some(1.0), c, alpha })
    }

    pub fn lobachevsky(c: f64) -> Result<Self> {
        let c_min = lobachevsky_c_min();
        // tolerate the rounding of the printed bound itself
        if !(c >= c_min - 1e-15) || !c.is_finite() {
            return Err(Error::Inadmissible(format!("Lobachevsky chart needs C ≥ {c_min}, got {c}")));
        }
        Ok(DomainSpec { tag: DomainTag::Lobachevsky, radius: None, c: c.max(c_min), alpha: 0.0 })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain serializes")
    }

    pub fn tag(&self) -> DomainTag {
        self.tag
    }

    /// Chart radius; `None` means unbounded.
    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Domains charted by polar coordinates with the `ℝ×𝕋` radial action.
    pub fn is_polar(&self) -> bool {
        !matches!(self.tag, DomainTag::Cylinder | DomainTag::GL2Plane)
    }

    /// Case B: the stabilizer is not inside `ker λ`.
    pub fn is_case_b(&self) -> bool {
        self.tag == DomainTag::GL2Plane
    }

    /// Normalization in front of `γ(r²) r dr dθ`; the plane keeps plain
    /// Lebesgue measure.
    fn polar_norm(&self) -> f64 {
        if self.tag == DomainTag::PuncturedPlane {
            1.0
        } else {
            1.0 / PI
        }
    }

    /// Radial density `γ(t)`.
    pub fn gamma(&self, t: f64) -> Result<f64> {
        match self.tag {
            DomainTag::PuncturedPlane | DomainTag::RadialDisk => Ok(1.0),
            DomainTag::PoincareDisk => Ok(1.0 / ((1.0 - t) * (1.0 - t))),
            DomainTag::BergmanDisk => Ok((self.alpha + 1.0) * (1.0 - t).powf(self.alpha)),
            DomainTag::Lobachevsky => Ok(t.sinh() * (2.0 * t.cosh().powi(2) - 1.0).sqrt()),
            _ => Err(Error::GroupMismatch(format!("{:?} has no radial transform", self.tag))),
        }
    }

    /// Range of `Γ_C` over the chart interval `t ∈ (0, R²)`.
    pub fn gamma_range(&self) -> Result<(f64, f64)> {
        let c = self.c;
        match self.tag {
            DomainTag::PuncturedPlane => Ok((0.0, f64::INFINITY)),
            DomainTag::RadialDisk => Ok((c, self.radius.map_or(f64::INFINITY, |r| r * r + c))),
            DomainTag::PoincareDisk => Ok((1.0 + c, f64::INFINITY)),
            DomainTag::BergmanDisk => Ok((c - 1.0, c)),
            DomainTag::Lobachevsky => Ok((c - lobachevsky_c_min(), f64::INFINITY)),
            _ => Err(Error::GroupMismatch(format!("{:?} has no radial transform", self.tag))),
        }
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let hi = self.radius.map_or(f64::INFINITY, |r| r * r);
        if !(t > 0.0 && t < hi) {
            return Err(Error::InvalidPoint(format!("t = {t} outside the chart interval (0, {hi})")));
        }
        Ok(())
    }

    /// Radial transform `Γ_C(t)`, strictly increasing and positive on the
    /// chart interval.
    pub fn gamma_c(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let c = self.c;
        let v = match self.tag {
            DomainTag::PuncturedPlane => t,
            DomainTag::RadialDisk => t + c,
            DomainTag::PoincareDisk => t / (1.0 - t) + (1.0 + c),
            DomainTag::BergmanDisk => {
                (c - 1.0) - ((self.alpha + 1.0) * (-t).ln_1p()).exp_m1()
            }
            DomainTag::Lobachevsky => (c - lobachevsky_c_min()) + lobachevsky_delta(t),
            _ => return Err(Error::GroupMismatch(format!("{:?} has no radial transform", self.tag))),
        };
        if !v.is_finite() {
            return Err(Error::Range { value: v, lo: 0.0, hi: f64::INFINITY });
        }
        Ok(v)
    }

    /// Inverse of [`DomainSpec::gamma_c`]. Values outside the range of `Γ_C`
    /// are reported as [`Error::Range`], never clamped.
    pub fn gamma_c_inv(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.gamma_range()?;
        if !(s > lo && s < hi) {
            return Err(Error::Range { value: s, lo, hi });
        }
        let c = self.c;
        let t = match self.tag {
            DomainTag::PuncturedPlane => s,
            DomainTag::RadialDisk => s - c,
            DomainTag::PoincareDisk => {
                let u = s - c;
                (s - c - 1.0) / u
            }
            DomainTag::BergmanDisk => {
                let v = s - (c - 1.0);
                -((-v).ln_1p() / (self.alpha + 1.0)).exp_m1()
            }
            DomainTag::Lobachevsky => lobachevsky_delta_inv(s - lo)?,
            _ => unreachable!("gamma_range rejects non-polar domains"),
        };
        let t_hi = self.radius.map_or(f64::INFINITY, |r| r * r);
        if !(t > 0.0 && t < t_hi) {
            // rounding pushed the preimage onto the chart boundary
            return Err(Error::Range { value: s, lo, hi });
        }
        Ok(t)
    }

    /// Checks a point against the chart and reduces its angle.
    pub fn validate_point(&self, p: &Point) -> Result<Point> {
        let [a, b] = p.0;
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinates {:?}", p.0)));
        }
        match self.tag {
            DomainTag::Cylinder => Ok(Point::new(a, wrap_angle(b))),
            DomainTag::GL2Plane => {
                if a == 0.0 && b == 0.0 {
                    return Err(Error::InvalidPoint("the origin is not in ℝ²∖{0}".into()));
                }
                Ok(*p)
            }
            _ => {
                let hi = self.radius.unwrap_or(f64::INFINITY);
                if !(a > 0.0 && a < hi) {
                    return Err(Error::InvalidPoint(format!("r = {a} outside (0, {hi})")));
                }
                Ok(Point::new(a, wrap_angle(b)))
            }
        }
    }

    fn check_variant(&self, g: &GroupElement) -> Result<()> {
        match (self.tag, g) {
            (DomainTag::GL2Plane, GroupElement::Mat2(_)) => {
                if g.det() == 0.0 {
                    return Err(Error::Inadmissible("singular matrix".into()));
                }
                Ok(())
            }
            (DomainTag::GL2Plane, _) | (_, GroupElement::Mat2(_)) => {
                Err(Error::GroupMismatch(format!("{:?}", self.tag)))
            }
            _ => Ok(()),
        }
    }

    /// Radial part of the dilation: `r ↦ √Γ_C⁻¹(e^{2a} Γ_C(r²))`.
    pub fn dilate_radius(&self, r: f64, a: f64) -> Result<f64> {
        match self.tag {
            DomainTag::PuncturedPlane => Ok(a.exp() * r),
            DomainTag::PoincareDisk if self.c == -1.0 => {
                Ok(a.exp() * r / (1.0 + (2.0 * a).exp_m1() * r * r).sqrt())
            }
            _ => {
                let s = (2.0 * a).exp() * self.gamma_c(r * r)?;
                Ok(self.gamma_c_inv(s)?.sqrt())
            }
        }
    }

    /// The action `x ↦ g·x`.
    pub fn act(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        self.check_variant(g)?;
        let x = self.validate_point(x)?;
        match (self.tag, g) {
            (DomainTag::Cylinder, GroupElement::Cyl { a, phi }) => {
                Ok(Point::new(x.z() + a, wrap_angle(x.theta() + phi)))
            }
            (DomainTag::GL2Plane, GroupElement::Mat2(m)) => Ok(Point::new(
                m[0][0] * x.x1() + m[0][1] * x.x2(),
                m[1][0] * x.x1() + m[1][1] * x.x2(),
            )),
            (_, GroupElement::Cyl { a, phi }) => {
                let r = if *a == 0.0 { x.r() } else { self.dilate_radius(x.r(), *a)? };
                Ok(Point::new(r, wrap_angle(x.theta() + phi)))
            }
            _ => unreachable!("variant checked above"),
        }
    }

    /// The character `λ_g`: `e^{2a}` for `ℝ×𝕋`, `|det g|` for matrices.
    pub fn character(&self, g: &GroupElement) -> Result<f64> {
        self.check_variant(g)?;
        Ok(match g {
            GroupElement::Cyl { a, .. } => (2.0 * a).exp(),
            GroupElement::Mat2(_) => g.det().abs(),
        })
    }

    /// `λ_x`, the character of the group coordinate of `x` (Case A only):
    /// `e^{2z}` on the cylinder, `Γ_C(r²)` on polar domains.
    pub fn point_character(&self, x: &Point) -> Result<f64> {
        match self.tag {
            DomainTag::GL2Plane => Err(Error::CaseB(
                "λ is not constant on stabilizer cosets, so λ_x is undefined".into(),
            )),
            DomainTag::Cylinder => Ok((2.0 * x.z()).exp()),
            _ => self.gamma_c(x.r() * x.r()),
        }
    }

    /// Measure density with respect to the chart coordinates.
    pub fn density(&self, p: &Point) -> Result<f64> {
        match self.tag {
            DomainTag::Cylinder => Ok((2.0 * p.z()).exp()),
            DomainTag::GL2Plane => Ok(1.0),
            _ => self.radial_weight(p.r()),
        }
    }

    /// `γ(r²) r / π` (plain `r` on the plane).
    pub fn radial_weight(&self, r: f64) -> Result<f64> {
        Ok(self.polar_norm() * self.gamma(r * r)? * r)
    }

    /// Normalization of `ρ dρ dθ` in the transformed coordinates.
    pub fn transformed_norm(&self) -> f64 {
        self.polar_norm()
    }
}

// Γ(t) − Γ(0) for the Lobachevsky density, with the Taylor branch near 0
// where the closed form cancels.
fn lobachevsky_delta(t: f64) -> f64 {
    if t < 1e-2 {
        let t2 = t * t;
        return t2 * (0.5 + t2 * (7.0 / 24.0 + t2 / 720.0));
    }
    let c = t.cosh();
    let root = (2.0 - 1.0 / (c * c)).sqrt();
    let q = c * root;
    let log_term = c.ln() + (root + SQRT_2).ln();
    0.5 * c * q - log_term / (2.0 * SQRT_2) - (0.5 - (1.0 + SQRT_2).ln() / (2.0 * SQRT_2))
}

fn lobachevsky_gamma(t: f64) -> f64 {
    t.sinh() * (2.0 * t.cosh().powi(2) - 1.0).sqrt()
}

// Bracketed bisection refined by Newton; absolute tolerance 1e-12 in t.
fn lobachevsky_delta_inv(target: f64) -> Result<f64> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::Range { value: target, lo: 0.0, hi: f64::INFINITY });
    }
    let guess = if target < 0.5 {
        (2.0 * target).sqrt()
    } else {
        (0.5 * (8.0 * target / SQRT_2).ln()).max(0.1)
    };
    let mut lo = 0.0;
    let mut hi = guess.max(1e-300);
    let mut grow = 0;
    while lobachevsky_delta(hi) < target {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 || !lobachevsky_delta(hi).is_finite() {
            return Err(Error::Range { value: target, lo: 0.0, hi: lobachevsky_delta(700.0) });
        }
    }
    let mut t = 0.5 * (lo + hi).max(guess.min(hi)).min(hi);
    if !(t > lo && t <= hi) {
        t = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let f = lobachevsky_delta(t) - target;
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let d = lobachevsky_gamma(t);
        let newton = t - f / d;
        let step_ok = d > 0.0 && newton > lo && newton < hi;
        let next = if step_ok { newton } else { 0.5 * (lo + hi) };
        let dt = (next - t).abs();
        t = next;
        if dt <= 1e-12 && step_ok {
            // one more Newton step to reach the rounding floor
            let d = lobachevsky_gamma(t);
            if d > 0.0 {
                let refined = t - (lobachevsky_delta(t) - target) / d;
                if refined > 0.0 {
                    t = refined;
                }
            }
            return Ok(t);
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            return Ok(t);
        }
    }
    Err(Error::NonConvergence("Lobachevsky Γ inverse did not converge in 200 iterations".into()))
}

/// A bounded region of a chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    /// `r ∈ (r_inner, r_outer)`, `θ ∈ (theta_start, theta_start + width)`.
    AnnulusSector { r_inner: f64, r_outer: f64, theta_start: f64, width: f64 },
    /// Coordinate rectangle `lo ≤ x ≤ hi` (cylinder `(z, θ)` or the GL(2) plane).
    Rect { lo: [f64; 2], hi: [f64; 2] },
    /// `{origin + s·u + t·v : s, t ∈ [0,1]}` in the GL(2) plane.
    Parallelogram { origin: [f64; 2], u: [f64; 2], v: [f64; 2] },
}

impl Region {
    pub fn annulus(r_inner: f64, r_outer: f64) -> Self {
        Region::AnnulusSector { r_inner, r_outer, theta_start: 0.0, width: TAU }
    }
}

/// Numerical integration scheme and budget for [`DomainSpec::measure_of`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeasureMethod {
    Quadrature { max_segments: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl MeasureMethod {
    pub fn quadrature() -> Self {
        MeasureMethod::Quadrature { max_segments: 500 }
    }
}

/// A value with its uncertainty (quadrature error estimate or Monte Carlo
/// standard error).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    pub measure: f64,
    pub image_measure: f64,
    pub ratio: f64,
    pub expected: f64,
    pub uncertainty: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Relative tolerance on `μ(gA)/μ(A)` for the quadrature method.
pub const DILATION_QUAD_TOL: f64 = 1e-8;

impl DomainSpec {
    fn validate_region(&self, region: &Region) -> Result<()> {
        let all_finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match (self.tag, region) {
            (DomainTag::Cylinder | DomainTag::GL2Plane, Region::Rect { lo, hi }) => {
                if !all_finite(&[lo[0], lo[1], hi[0], hi[1]]) {
                    return Err(Error::InvalidRegion("unbounded rectangle".into()));
                }
                if lo[0] > hi[0] || lo[1] > hi[1] {
                    return Err(Error::InvalidRegion("rectangle corners out of order".into()));
                }
                if self.tag == DomainTag::Cylinder && hi[1] - lo[1] > TAU {
                    return Err(Error::InvalidRegion("angular extent exceeds 2π".into()));
                }
                Ok(())
            }
            (DomainTag::GL2Plane, Region::Parallelogram { origin, u, v }) => {
                if !all_finite(&[origin[0], origin[1], u[0], u[1], v[0], v[1]]) {
                    return Err(Error::InvalidRegion("unbounded parallelogram".into()));
                }
                Ok(())
            }
            (_, Region::AnnulusSector { r_inner, r_outer, theta_start, width }) if self.is_polar() => {
                if !all_finite(&[*r_inner, *r_outer, *theta_start, *width]) {
                    return Err(Error::InvalidRegion("unbounded annulus sector".into()));
                }
                let hi = self.radius.unwrap_or(f64::INFINITY);
                if !(*r_inner >= 0.0 && r_inner <= r_outer && *r_outer < hi) {
                    return Err(Error::InvalidRegion(format!(
                        "radii ({r_inner}, {r_outer}) outside the chart (0, {hi})"
                    )));
                }
                if !(*width >= 0.0 && *width <= TAU) {
                    return Err(Error::InvalidRegion("angular width must lie in [0, 2π]".into()));
                }
                Ok(())
            }
            _ => Err(Error::InvalidRegion(format!("{region:?} is not a region of {:?}", self.tag))),
        }
    }

    /// `μ(A)` by adaptive quadrature or Monte Carlo.
    pub fn measure_of(&self, region: &Region, method: MeasureMethod) -> Result<Measurement> {
        self.validate_region(region)?;
        match method {
            MeasureMethod::Quadrature { max_segments } => {
                if max_segments == 0 {
                    return Err(Error::ZeroBudget);
                }
                self.measure_quadrature(region, max_segments)
            }
            MeasureMethod::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::ZeroBudget);
                }
                self.measure_monte_carlo(region, samples, seed)
            }
        }
    }

    fn measure_quadrature(&self, region: &Region, max_segments: usize) -> Result<Measurement> {
        let q = Adaptive::new(0.0, 1e-13).with_max_segments(max_segments);
        let (value, error) = match *region {
            Region::AnnulusSector { r_inner, r_outer, width, .. } => {
                if r_inner == r_outer || width == 0.0 {
                    return Ok(Measurement { value: 0.0, error: 0.0 });
                }
                let radial = q.integrate(|r| self.radial_weight(r).unwrap_or(f64::NAN), r_inner, r_outer);
                (width * radial.value, width * radial.error)
            }
            Region::Rect { lo, hi } => {
                if lo[0] == hi[0] || lo[1] == hi[1] {
                    return Ok(Measurement { value: 0.0, error: 0.0 });
                }
                match self.tag {
                    DomainTag::Cylinder => {
                        let zi = q.integrate(|z| (2.0 * z).exp(), lo[0], hi[0]);
                        let w = hi[1] - lo[1];
                        (w * zi.value, w * zi.error)
                    }
                    _ => self.parallelogram_quadrature(&q, lo, [hi[0] - lo[0], 0.0], [0.0, hi[1] - lo[1]]),
                }
            }
            Region::Parallelogram { origin, u, v } => self.parallelogram_quadrature(&q, origin, u, v),
        };
        if !value.is_finite() {
            return Err(Error::NonFinite("measure quadrature".into()));
        }
        Ok(Measurement { value, error })
    }

    fn parallelogram_quadrature(&self, q: &Adaptive, origin: [f64; 2], u: [f64; 2], v: [f64; 2]) -> (f64, f64) {
        let jac = (u[0] * v[1] - u[1] * v[0]).abs();
        if jac == 0.0 {
            return (0.0, 0.0);
        }
        let mut err = 0.0;
        let outer = q.integrate(
            |s| {
                let inner = q.integrate(
                    |t| {
                        let p = Point::new(origin[0] + s * u[0] + t * v[0], origin[1] + s * u[1] + t * v[1]);
                        self.density(&p).unwrap_or(f64::NAN)
                    },
                    0.0,
                    1.0,
                );
                inner.value
            },
            0.0,
            1.0,
        );
        err += outer.error;
        (jac * outer.value, jac * err)
    }

    fn measure_monte_carlo(&self, region: &Region, samples: usize, seed: u64) -> Result<Measurement> {
        let mut rng = stream_rng(seed, 0);
        let (area, draw): (f64, Box<dyn Fn(f64, f64) -> Point>) = match *region {
            Region::AnnulusSector { r_inner, r_outer, theta_start, width } => (
                (r_outer - r_inner) * width,
                Box::new(move |s, t| Point::new(r_inner + s * (r_outer - r_inner), theta_start + t * width)),
            ),
            Region::Rect { lo, hi } => (
                (hi[0] - lo[0]) * (hi[1] - lo[1]),
                Box::new(move |s, t| Point::new(lo[0] + s * (hi[0] - lo[0]), lo[1] + t * (hi[1] - lo[1]))),
            ),
            Region::Parallelogram { origin, u, v } => (
                (u[0] * v[1] - u[1] * v[0]).abs(),
                Box::new(move |s, t| {
                    Point::new(origin[0] + s * u[0] + t * v[0], origin[1] + s * u[1] + t * v[1])
                }),
            ),
        };
        if area == 0.0 {
            return Ok(Measurement { value: 0.0, error: 0.0 });
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..samples {
            let s: f64 = rng.gen();
            let t: f64 = rng.gen();
            let d = self.density(&draw(s, t))?;
            sum += d;
            sum_sq += d * d;
        }
        let n = samples as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        Ok(Measurement { value: area * mean, error: area * (var / n).sqrt() })
    }

    /// Image of a region under `g`. Annulus sectors stay annulus sectors under
    /// radial actions; rectangles and parallelograms of the GL(2) plane map to
    /// parallelograms.
    pub fn image_region(&self, g: &GroupElement, region: &Region) -> Result<Region> {
        self.check_variant(g)?;
        self.validate_region(region)?;
        match (*region, *g) {
            (Region::AnnulusSector { r_inner, r_outer, theta_start, width }, GroupElement::Cyl { a, phi }) => {
                let map_r = |r: f64| -> Result<f64> {
                    if r == 0.0 {
                        let (lo, _) = self.gamma_range()?;
                        return if lo == 0.0 {
                            Ok(0.0)
                        } else {
                            Err(Error::InvalidRegion("r = 0 is not mapped by this dilation".into()))
                        };
                    }
                    if a == 0.0 {
                        Ok(r)
                    } else {
                        self.dilate_radius(r, a)
                    }
                };
                Ok(Region::AnnulusSector {
                    r_inner: map_r(r_inner)?,
                    r_outer: map_r(r_outer)?,
                    theta_start: wrap_angle(theta_start + phi),
                    width,
                })
            }
            (Region::Rect { lo, hi }, GroupElement::Cyl { a, phi }) if self.tag == DomainTag::Cylinder => {
                Ok(Region::Rect { lo: [lo[0] + a, lo[1] + phi], hi: [hi[0] + a, hi[1] + phi] })
            }
            (Region::Rect { lo, hi }, GroupElement::Mat2(m)) => {
                let mv = |p: [f64; 2]| [m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]];
                Ok(Region::Parallelogram {
                    origin: mv(lo),
                    u: mv([hi[0] - lo[0], 0.0]),
                    v: mv([0.0, hi[1] - lo[1]]),
                })
            }
            (Region::Parallelogram { origin, u, v }, GroupElement::Mat2(m)) => {
                let mv = |p: [f64; 2]| [m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]];
                Ok(Region::Parallelogram { origin: mv(origin), u: mv(u), v: mv(v) })
            }
            _ => Err(Error::InvalidRegion(format!("{region:?} is not mapped by {g:?}"))),
        }
    }

    /// Checks `μ(gA) = λ_g μ(A)` numerically. Quadrature passes within
    /// [`DILATION_QUAD_TOL`] relative; Monte Carlo within three standard errors.
    pub fn verify_dilation(&self, g: &GroupElement, region: &Region, method: MeasureMethod) -> Result<DilationReport> {
        let expected = self.character(g)?;
        let image = self.image_region(g, region)?;
        let m = self.measure_of(region, method)?;
        let method_image = match method {
            MeasureMethod::MonteCarlo { samples, seed } => {
                MeasureMethod::MonteCarlo { samples, seed: seed.wrapping_add(0x9e37_79b9_7f4a_7c15) }
            }
            q => q,
        };
        let mi = self.measure_of(&image, method_image)?;
        let (ratio, uncertainty) = if m.value == 0.0 {
            if mi.value == 0.0 {
                (expected, 0.0)
            } else {
                (f64::INFINITY, f64::INFINITY)
            }
        } else {
            let r = mi.value / m.value;
            let rel = ((m.error / m.value).powi(2) + (mi.error / mi.value.max(f64::MIN_POSITIVE)).powi(2)).sqrt();
            (r, r.abs() * rel)
        };
        let tolerance = match method {
            MeasureMethod::Quadrature { .. } => DILATION_QUAD_TOL * expected,
            MeasureMethod::MonteCarlo { .. } => (3.0 * uncertainty).max(1e-12 * expected),
        };
        Ok(DilationReport {
            measure: m.value,
            image_measure: mi.value,
            ratio,
            expected,
            uncertainty,
            tolerance,
            pass: (ratio - expected).abs() <= tolerance,
        })
    }
}
