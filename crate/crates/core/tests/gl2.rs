use homokernel::geometry::{DomainSpec, Point};
use homokernel::gl2::{apply_gl2_direct, cross, random_pair, stabilizer_witness, PvConfig, Witness};
use homokernel::kernels::{check_strong_homogeneity, Kernel};
use proptest::prelude::*;

proptest! {
    #[test]
    fn bracket_scales_by_determinant(m in proptest::array::uniform4(-3.0..3.0f64),
                                     x in proptest::array::uniform2(-3.0..3.0f64),
                                     y in proptest::array::uniform2(-3.0..3.0f64)) {
        let g = |p: [f64; 2]| Point::new(m[0] * p[0] + m[1] * p[1], m[2] * p[0] + m[3] * p[1]);
        let det = m[0] * m[3] - m[1] * m[2];
        let lhs = cross(&g(x), &g(y));
        let rhs = det * cross(&Point::new(x[0], x[1]), &Point::new(y[0], y[1]));
        let scale = m.iter().map(|v| v * v).sum::<f64>() * x[0].hypot(x[1]) * y[0].hypot(y[1]);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn witness_fixes_e1_and_x(x in proptest::collection::vec(-5.0..5.0f64, 3..7)) {
        prop_assume!(x.iter().any(|v| *v != 0.0));
        let Witness::Found(h) = stabilizer_witness(&x).unwrap() else { panic!("n ≥ 3 always has a witness") };
        for (i, row) in h.approx.iter().enumerate() {
            prop_assert_eq!(row[0], if i == 0 { 1.0 } else { 0.0 });
            let hx: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            prop_assert!((hx - x[i]).abs() <= 1e-12 * (1.0 + x[i].abs()));
        }
    }
}

#[test]
fn perturbed_kernels_are_not_homogeneous() {
    let d = DomainSpec::gl2_plane();
    let n2 = |p: &Point| p.x1() * p.x1() + p.x2() * p.x2();
    let perturbed: Vec<Kernel> = vec![
        Kernel::new("1/[x,y] + 0.1", |x, y| 1.0 / cross(x, y) + 0.1),
        Kernel::new("1/[x,y]²", |x, y| 1.0 / cross(x, y).powi(2)),
        Kernel::new("1/([x,y](1+0.1x₁²))", |x, y| 1.0 / (cross(x, y) * (1.0 + 0.1 * x.x1() * x.x1()))),
        Kernel::new("1/([x,y] + 0.01)", |x, y| 1.0 / (cross(x, y) + 0.01)),
        Kernel::new("1/(|x|²+|y|²)", move |x, y| 1.0 / (n2(x) + n2(y))),
        Kernel::new("1/[x,y]^1.1", |x, y| cross(x, y).signum() / cross(x, y).abs().powf(1.1)),
        Kernel::new("x₁/[x,y]", |x, y| x.x1() / cross(x, y)),
        Kernel::new("(1+0.1 cos x₁)/[x,y]", |x, y| (1.0 + 0.1 * x.x1().cos()) / cross(x, y)),
        Kernel::new("exp(0.1[x,y])/[x,y]", |x, y| (0.1 * cross(x, y)).exp() / cross(x, y)),
        Kernel::new("1/[x,y] + 0.1/(x·y)", |x, y| 1.0 / cross(x, y) + 0.1 / (x.x1() * y.x1() + x.x2() * y.x2())),
    ];
    for k in perturbed {
        let k = k.with_singular_locus(|x, y| cross(x, y) == 0.0);
        let r = check_strong_homogeneity(&d, &k, 200, 1e-10, 4).unwrap();
        assert!(!r.pass && r.max_residual > 1e-3, "{} residual {}", k.name(), r.max_residual);
    }
}

#[test]
fn pv_is_stable_under_exclusion_halving() {
    for i in 0..5 {
        let (bump, x) = random_pair(17, i);
        let cfg = PvConfig { eta_truncation: bump.support_radius(), ..PvConfig::default() };
        let f = |y: [f64; 2]| bump.eval(y);
        let a = apply_gl2_direct(&f, &x, &cfg).unwrap();
        let b = apply_gl2_direct(&f, &x, &PvConfig { eps_rel: cfg.eps_rel / 2.0, ..cfg }).unwrap();
        assert!((a.value - b.value).abs() <= 10.0 * a.estimate, "{} vs {} (estimate {:e})", a.value, b.value, a.estimate);
    }
}
