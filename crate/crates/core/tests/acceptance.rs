//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the test
//! harness so the lines always reach the console.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use homokernel::geometry::{lobachevsky_c_min, DomainSpec, DomainTag, GroupElement, MeasureMethod, Point, Region};
use homokernel::gl2::{apply_gl2_composed, apply_gl2_direct, compare_routes, random_pair, stabilizer_witness, PvConfig, Witness};
use homokernel::hadamard_bergman::{disk_preset, hb_convolve, hb_equivalence, DiskFunction, HbConfig};
use homokernel::hardy_littlewood::{kappa_1d, kernel_1d, norm_lower_bound, norm_upper_check};
use homokernel::kernels::{build_kernel, check_strong_homogeneity, preset, weak_counterexample_violation, Kernel};
use homokernel::operators::{
    check_convolution_reduction, check_operator_homogeneity, log_bump, sample_points, GridFunction, GridSpec,
    QuadratureGrid,
};
use homokernel::{expr, sampling, Error};
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    /// Failure documented as unattainable; does not fail the run.
    known_red: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Verdict { pass, known_red: false, detail }
    }
}

fn criterion(id: u32, budget: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let t = Instant::now();
    let mut v = f();
    let elapsed = t.elapsed();
    if elapsed > budget {
        v.pass = false;
        v.known_red = false;
        v.detail.push_str(&format!("; over the {budget:?} budget"));
    }
    let tag = if v.pass { "PASS" } else if v.known_red { "FAIL (known)" } else { "FAIL" };
    println!("criterion {id:>2}: {tag} [{:.2}s] {}", elapsed.as_secs_f64(), v.detail);
    v
}

fn polar_f() -> homokernel::kernels::GeneratingFunction {
    expr::generating_function("(1 + 0.5*cos(psi)) * eta / (1 + eta^2)").unwrap()
}

fn cylinder_f() -> homokernel::kernels::GeneratingFunction {
    expr::generating_function("(1 + 0.5*cos(psi)) * exp(-u^2)").unwrap()
}

fn dilation_domains() -> Vec<DomainSpec> {
    vec![
        DomainSpec::cylinder(),
        DomainSpec::punctured_plane(),
        DomainSpec::poincare(-1.0).unwrap(),
        DomainSpec::poincare(0.0).unwrap(),
        DomainSpec::bergman(0.5, 1.0).unwrap(),
        DomainSpec::lobachevsky(lobachevsky_c_min() + 0.1).unwrap(),
    ]
}

fn c1_dilation() -> Verdict {
    let mut worst = 0.0f64;
    let mut rejected = 0;
    for (di, d) in dilation_domains().into_iter().enumerate() {
        let mut rng = sampling::stream_rng(SEED, 100 + di as u64);
        let mut done = 0;
        while done < 50 {
            let g = sampling::cyl_element(&mut rng);
            let region = match d.tag() {
                DomainTag::Cylinder => {
                    let z0 = rng.gen_range(-2.0..1.0);
                    let t0 = sampling::angle(&mut rng);
                    Region::Rect { lo: [z0, t0], hi: [z0 + rng.gen_range(0.1..1.0), t0 + rng.gen_range(0.1..3.0)] }
                }
                _ => {
                    let hi = d.radius().unwrap_or(5.0);
                    let a = rng.gen_range(0.05..0.9) * hi;
                    let b = a + rng.gen_range(0.02..0.95) * (hi - a);
                    Region::AnnulusSector {
                        r_inner: a,
                        r_outer: b,
                        theta_start: sampling::angle(&mut rng),
                        width: rng.gen_range(0.1..6.0),
                    }
                }
            };
            match d.verify_dilation(&g, &region, MeasureMethod::quadrature()) {
                Ok(r) => {
                    worst = worst.max((r.ratio - r.expected).abs());
                    done += 1;
                }
                // the image left the radial range; draw again
                Err(Error::Range { .. }) | Err(Error::InvalidRegion(_)) => rejected += 1,
                Err(e) => return Verdict::new(false, format!("{:?}: {e}", d.tag())),
            }
        }
    }
    Verdict::new(worst <= 1e-6, format!("max |μ(gA)/μ(A) − λ_g| = {worst:.2e} over 6×50 pairs ({rejected} redrawn)"))
}

fn c2_homogeneity() -> Verdict {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut domains = dilation_domains();
    domains.push(DomainSpec::gl2_plane());
    for d in domains {
        let f = match d.tag() {
            DomainTag::Cylinder => cylinder_f(),
            DomainTag::GL2Plane => preset("gl2:antisym").unwrap(),
            _ => polar_f(),
        };
        let tol = if d.tag() == DomainTag::Lobachevsky { 1e-8 } else { 1e-10 };
        let k = build_kernel(&d, &f).unwrap();
        match check_strong_homogeneity(&d, &k, 1000, tol, SEED) {
            Ok(r) => {
                pass &= r.pass && r.samples == 1000;
                lines.push(format!("{:?} {:.1e} ({}/{})", d.tag(), r.max_residual, r.samples, r.skipped));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("{:?} error {e}", d.tag()));
            }
        }
    }
    Verdict::new(pass, lines.join(", "))
}

fn c3_operator() -> Verdict {
    let d = DomainSpec::punctured_plane();
    let grid = Arc::new(QuadratureGrid::for_domain(&d, GridSpec::default()).unwrap());
    let k = build_kernel(&d, &polar_f()).unwrap();
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for i in 0..20u64 {
        let mut rng = sampling::stream_rng(SEED, 300 + i);
        let g = GroupElement::cyl(rng.gen_range(-1.0..1.0), sampling::angle(&mut rng));
        let f = GridFunction::from_analytic(grid.clone(), log_bump(d, rng.gen_range(-1.0..1.0), 0.5)).unwrap();
        let pts = sample_points(&d, 4, SEED + i);
        let r = check_operator_homogeneity(&d, &k, &g, &f, &pts, 1e-6).unwrap();
        pass &= r.pass;
        worst = worst.max(r.residual);
    }
    let broken = Kernel::new("1/(r_x²+1)", |x: &Point, _: &Point| 1.0 / (x.r() * x.r() + 1.0));
    let f = GridFunction::from_analytic(grid, log_bump(d, 0.0, 0.5)).unwrap();
    let pts = sample_points(&d, 4, SEED);
    let b = check_operator_homogeneity(&d, &broken, &GroupElement::cyl(1.0, 0.0), &f, &pts, 1e-6).unwrap();
    Verdict::new(
        pass && !b.pass && b.residual > 0.1,
        format!("max residual {worst:.2e} over 20 (g, f); broken kernel residual {:.3}", b.residual),
    )
}

fn c4_reduction() -> Verdict {
    let d = DomainSpec::cylinder();
    let grid = Arc::new(QuadratureGrid::for_domain(&d, GridSpec::default()).unwrap());
    let k = build_kernel(&d, &cylinder_f()).unwrap();
    let f = GridFunction::from_analytic(grid, log_bump(d, 0.2, 0.5)).unwrap();
    let pts = sample_points(&d, 5, SEED);
    let g = GroupElement::cyl(0.7, 2.0);
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [1.5, 2.0, 4.0] {
        let r = check_convolution_reduction(&d, &k, p, &g, &f, &pts, 1e-6).unwrap();
        pass &= r.pass && r.residual <= 1e-6;
        parts.push(format!("p={p}: {:.1e}", r.residual));
    }
    Verdict::new(pass, parts.join(", "))
}

fn c5_hardy_littlewood() -> Verdict {
    let mut pass = true;
    let mut red = false;
    let mut parts = Vec::new();
    for (name, exact) in [("hlp:1/(x+y)", PI), ("hlp:1(x<y)/y", 2.0)] {
        let k = kernel_1d(name).unwrap();
        let kappa = kappa_1d(&k, 2.0).unwrap();
        let kappa_ok = !kappa.divergent && (kappa.kappa - exact).abs() <= 1e-6;
        let lower = norm_lower_bound(&k, 2.0, 1e3).unwrap();
        let lower_ok = lower >= 0.95 * exact;
        let upper = norm_upper_check(&k, 2.0, 100, SEED).unwrap();
        let upper_ok = upper.max_ratio <= exact * (1.0 + 1e-4);
        pass &= kappa_ok && upper_ok;
        red |= !lower_ok;
        parts.push(format!(
            "{name}: κ={:.9} lower(N=1e3)={:.4}κ{} max ratio={:.6}κ",
            kappa.kappa,
            lower / exact,
            if lower_ok { "" } else { " < 0.95κ" },
            upper.max_ratio / exact
        ));
    }
    let mut v = Verdict::new(pass && !red, parts.join("; "));
    v.known_red = pass && red;
    v
}

fn c6_gl2() -> Verdict {
    let cfg = PvConfig::default();
    let mut worst_route = 0.0f64;
    let mut worst_hom = 0.0f64;
    for i in 0..20u64 {
        let (bump, x) = random_pair(SEED, i);
        let row = compare_routes(&bump, &x, &cfg).unwrap();
        worst_route = worst_route.max(row.abs_diff / row.direct.abs());
        let cfg = PvConfig { eta_truncation: bump.support_radius(), ..cfg };
        let f = |y: [f64; 2]| bump.eval(y);
        let base = apply_gl2_direct(&f, &x, &cfg).unwrap().value;
        for s in [0.5, 2.0, 4.0] {
            // scaled point through the other route
            let v = apply_gl2_composed(&f, &Point::new(s * x.x1(), s * x.x2()), &cfg).unwrap().value;
            worst_hom = worst_hom.max((s * v - base).abs() / base.abs());
        }
    }
    Verdict::new(
        worst_route <= 1e-3 && worst_hom <= 1e-3,
        format!("max direct/composed rel diff {worst_route:.2e}, max |s·Kf(sx) − Kf(x)|/|Kf(x)| {worst_hom:.2e}"),
    )
}

fn c7_witness() -> Verdict {
    let mut rng = sampling::stream_rng(SEED, 700);
    let mut found = [0usize; 2];
    for (slot, n) in [3usize, 4].into_iter().enumerate() {
        for _ in 0..1000 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            if matches!(stabilizer_witness(&x), Ok(Witness::Found(_))) {
                found[slot] += 1;
            }
        }
    }
    let mut none = 0;
    for _ in 0..1000 {
        let x = [rng.gen_range(-3.0..3.0), rng.gen_range(0.01..3.0) * if rng.gen() { 1.0 } else { -1.0 }];
        if stabilizer_witness(&x) == Ok(Witness::NoWitness) {
            none += 1;
        }
    }
    Verdict::new(
        found == [1000, 1000] && none == 1000,
        format!("witnesses ℝ³ {}/1000, ℝ⁴ {}/1000; NoWitness ℝ² {none}/1000", found[0], found[1]),
    )
}

fn c8_hadamard_bergman() -> Verdict {
    let cfg = HbConfig::default();
    let mut rng = sampling::stream_rng(SEED, 800);
    let mut worst_mono = 0.0f64;
    for _ in 0..10 {
        let z = Complex64::from_polar(rng.gen_range(0.05..0.95), sampling::angle(&mut rng));
        for n in 0..=3 {
            let m = DiskFunction::monomial(n);
            let v = hb_convolve(&m, &m, z, &cfg).unwrap().value;
            worst_mono = worst_mono.max((v - z.powu(n as u32) / (n as f64 + 1.0)).norm());
        }
    }
    let mut worst_eq = 0.0f64;
    let f = disk_preset("bump").unwrap();
    for i in 0..10 {
        let g = disk_preset(&format!("trig:seed={i}")).unwrap();
        let z = Complex64::from_polar(rng.gen_range(0.1..0.95), sampling::angle(&mut rng));
        let r = hb_equivalence(&g, &f, z, &HbConfig { tol: 1e-4, ..cfg.clone() }).unwrap();
        worst_eq = worst_eq.max(r.difference);
    }
    Verdict::new(
        worst_mono <= 1e-8 && worst_eq <= 1e-4,
        format!("monomial max error {worst_mono:.1e}; equivalence max difference {worst_eq:.1e}"),
    )
}

fn c9_counterexample() -> Verdict {
    let mut rng = sampling::stream_rng(SEED, 900);
    let mut found = 0;
    let mut tried = 0;
    while tried < 1000 {
        let (x, y): (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        if (x - 2.0 * y).fract() == 0.0 {
            continue;
        }
        tried += 1;
        // K = 0 exactly when x − 2y is an integer; the shift makes it 0
        if let Ok(c) = weak_counterexample_violation(x, y) {
            if c.k_xy == 1 && c.k_shifted == 0 {
                found += 1;
            }
        }
    }
    Verdict::new(found == 1000, format!("violations {found}/1000"))
}

fn strip_timestamp(s: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(s).expect("report is JSON");
    v.as_object_mut().expect("object").remove("timestamp");
    v.to_string()
}

fn c10_determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_homokernel");
    let runs: &[&[&str]] = &[
        &["check-homogeneity", "--domain", "lobachevsky", "--samples", "200", "--seed", "7"],
        &["verify-dilation", "--domain", "bergman", "--alpha", "0.5", "--method", "mc", "--samples", "20000", "--seed", "3"],
        &["gl2-demo", "--pairs", "2", "--seed", "5"],
        &["hl-bound", "--random", "5", "--seed", "9"],
        &["hb-check", "--points", "2", "--seed", "1"],
    ];
    let mut same = 0;
    for args in runs {
        let out = || Command::new(bin).args(*args).output().expect("binary runs");
        let (a, b) = (out(), out());
        if a.status.success()
            && a.status == b.status
            && strip_timestamp(&String::from_utf8_lossy(&a.stdout)) == strip_timestamp(&String::from_utf8_lossy(&b.stdout))
        {
            same += 1;
        }
    }
    Verdict::new(same == runs.len(), format!("{same}/{} subcommands reproduce their reports", runs.len()))
}

fn main() {
    let s = Duration::from_secs;
    let verdicts = [
        criterion(1, s(10), c1_dilation),
        criterion(2, s(5), c2_homogeneity),
        criterion(3, s(30), c3_operator),
        criterion(4, s(30), c4_reduction),
        criterion(5, s(60), c5_hardy_littlewood),
        criterion(6, s(120), c6_gl2),
        criterion(7, s(1), c7_witness),
        criterion(8, s(30), c8_hadamard_bergman),
        criterion(9, s(1), c9_counterexample),
        criterion(10, s(60), c10_determinism),
    ];
    let hard = verdicts.iter().filter(|v| !v.pass && !v.known_red).count();
    let known = verdicts.iter().filter(|v| v.known_red).count();
    println!("acceptance: {} passed, {known} known-red, {hard} failed", verdicts.len() - hard - known);
    if hard > 0 {
        std::process::exit(1);
    }
}
