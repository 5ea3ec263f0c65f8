//! Quadrature primitives: Gauss–Legendre rules, an adaptive 10/21-point
//! Gauss–Kronrod integrator with breakpoints and infinite-interval maps, and
//! the periodic trapezoid rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

// Kronrod abscissae for the 21-point rule, descending, centre last.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// 10-point Gauss weights, paired with XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = ((i as f64 + 0.75) / (n as f64 + 0.5) * PI).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (pn, pnm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
    (pn, d)
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]` with `panels`
/// equal panels of `order` nodes each.
pub fn composite_gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Uniform periodic nodes `2πk/n` and equal weights `2π/n`.
pub fn trapezoid_periodic(n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 * PI / n as f64;
    ((0..n).map(|k| k as f64 * h).collect(), h)
}

/// Result of a quadrature: value, error estimate, and whether the requested
/// tolerance was met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Integral {
    fn zero() -> Self {
        Integral { value: 0.0, error: 0.0, evaluations: 0, converged: true }
    }

    fn add(self, other: Integral) -> Integral {
        Integral {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 21-point Kronrod evaluation with the embedded 10-point Gauss error.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let err = rescale_error((res_k - res_g) * half, res_abs * abs_half, res_asc * abs_half);
    (result, err)
}

/// Adaptive Gauss–Kronrod integrator. Subdivision always bisects the
/// interval with the largest error estimate, so results are deterministic.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive { abs_tol: 1e-14, rel_tol: 1e-10, max_segments: 2000 }
    }
}

impl Adaptive {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Adaptive { abs_tol, rel_tol, ..Default::default() }
    }

    pub fn with_max_segments(mut self, n: usize) -> Self {
        self.max_segments = n;
        self
    }

    /// Integrates over the finite interval `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Integral {
        self.integrate_breaks(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, forcing subdivision at every
    /// listed point. Points must be sorted ascending.
    pub fn integrate_breaks<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Integral {
        if points.len() < 2 {
            return Integral::zero();
        }
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            if w[1] > w[0] {
                let (v, e) = gk21(&f, w[0], w[1]);
                evaluations += 21;
                heap.push(Segment { a: w[0], b: w[1], value: v, error: e });
            }
        }
        if heap.is_empty() {
            return Integral::zero();
        }
        loop {
            let total: f64 = heap.iter().map(|s| s.value).sum();
            let err: f64 = heap.iter().map(|s| s.error).sum();
            let target = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= target {
                return self.finish(heap, evaluations, true);
            }
            if heap.len() >= self.max_segments {
                return self.finish(heap, evaluations, false);
            }
            let worst = heap.pop().expect("non-empty heap");
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                // interval exhausted at machine resolution
                heap.push(worst);
                return self.finish(heap, evaluations, false);
            }
            let (v1, e1) = gk21(&f, worst.a, mid);
            let (v2, e2) = gk21(&f, mid, worst.b);
            evaluations += 42;
            heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
            heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        }
    }

    fn finish(&self, heap: BinaryHeap<Segment>, evaluations: usize, converged: bool) -> Integral {
        // sum in interval order so the total does not depend on heap layout
        let mut segs = heap.into_vec();
        segs.sort_by(|x, y| x.a.total_cmp(&y.a));
        let value = segs.iter().map(|s| s.value).sum();
        let error = segs.iter().map(|s| s.error).sum();
        Integral { value, error, evaluations, converged }
    }

    /// Integrates over `[a, ∞)` via `x = a + (1 - t)/t`.
    pub fn integrate_upper<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Integral {
        self.integrate(
            |t| {
                if t <= 0.0 {
                    return 0.0;
                }
                let x = a + (1.0 - t) / t;
                let v = f(x) / (t * t);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
        )
    }

    /// Integrates over `(-∞, b]`.
    pub fn integrate_lower<F: Fn(f64) -> f64>(&self, f: F, b: f64) -> Integral {
        self.integrate_upper(|x| f(2.0 * b - x), b)
    }

    /// Integrates over the whole real line, splitting at the sorted finite
    /// breakpoints (at least one point is used; 0 if none given).
    pub fn integrate_real_line<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Integral {
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        if pts.is_empty() {
            pts.push(0.0);
        }
        let lo = pts[0];
        let hi = *pts.last().expect("non-empty");
        let left = self.integrate_lower(&f, lo);
        let right = self.integrate_upper(&f, hi);
        let mid = if pts.len() > 1 { self.integrate_breaks(&f, &pts) } else { Integral::zero() };
        left.add(mid).add(right)
    }

    /// Integrates over `[a, ∞)` splitting at the given breakpoints beyond `a`.
    pub fn integrate_upper_breaks<F: Fn(f64) -> f64>(&self, f: F, a: f64, breaks: &[f64]) -> Integral {
        let mut pts = vec![a];
        pts.extend(breaks.iter().copied().filter(|x| x.is_finite() && *x > a));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let hi = *pts.last().expect("non-empty");
        let mid = if pts.len() > 1 { self.integrate_breaks(&f, &pts) } else { Integral::zero() };
        mid.add(self.integrate_upper(&f, hi))
    }

    /// Integrates over `(-∞, b]` splitting at the given breakpoints below `b`.
    pub fn integrate_lower_breaks<F: Fn(f64) -> f64>(&self, f: F, b: f64, breaks: &[f64]) -> Integral {
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite() && *x < b).collect();
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let lo = pts[0];
        let mid = if pts.len() > 1 { self.integrate_breaks(&f, &pts) } else { Integral::zero() };
        self.integrate_lower(&f, lo).add(mid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 64, 128] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            let deg = 2 * n - 1;
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            // ∫ x^(deg-1) over [-1,1], deg-1 even
            assert_relative_eq!(approx, 2.0 / deg as f64, epsilon = 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn kronrod_tables_integrate_degree_31() {
        let (v, _) = gk21(&|x: f64| x.powi(30), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 31.0, epsilon = 1e-14);
        let (v, _) = gk21(&|x: f64| x.powi(18) + 1.0, 0.0, 2.0);
        assert_relative_eq!(v, 2f64.powi(19) / 19.0 + 2.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_part_of_kronrod_pairs_is_consistent() {
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_relative_eq!(g, 2.0, epsilon = 1e-14);
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert_relative_eq!(k, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_handles_algebraic_endpoint() {
        let r = Adaptive::default().integrate(|x: f64| x.powf(-0.5), 0.0, 1.0);
        assert!(r.converged);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn infinite_maps() {
        let q = Adaptive::default();
        let r = q.integrate_upper(|x: f64| (-x).exp(), 0.0);
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
        let r = q.integrate_real_line(|x: f64| 1.0 / (1.0 + x * x), &[]);
        assert_relative_eq!(r.value, PI, max_relative = 1e-10);
        let r = q.integrate_real_line(|x: f64| (-x * x).exp(), &[-1.0, 2.0]);
        assert_relative_eq!(r.value, PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn composite_and_trapezoid() {
        let v = composite_gauss(|x: f64| x.sin(), 0.0, PI, 4, 10);
        assert_relative_eq!(v, 2.0, epsilon = 1e-14);
        let (t, h) = trapezoid_periodic(32);
        let s: f64 = t.iter().map(|x| (x.cos()).powi(2) * h).sum();
        assert_relative_eq!(s, PI, epsilon = 1e-13);
    }
}
