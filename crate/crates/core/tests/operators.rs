use std::sync::Arc;

use homokernel::geometry::{DomainSpec, Point};
use homokernel::kernels::build_kernel;
use homokernel::operators::{apply_operator, log_bump, sample_points, GridFunction, GridSpec, QuadratureGrid};
use homokernel::expr;
use proptest::prelude::*;

fn setup() -> (DomainSpec, Arc<QuadratureGrid>) {
    let d = DomainSpec::poincare(-1.0).unwrap();
    let g = Arc::new(QuadratureGrid::for_domain(&d, GridSpec::default().with_resolution(64, 32)).unwrap());
    (d, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn application_is_linear(alpha in -3.0..3.0f64, beta in -3.0..3.0f64, c1 in -1.0..1.0f64, c2 in -1.0..1.0f64) {
        let (d, grid) = setup();
        let k = build_kernel(&d, &expr::generating_function("eta / (1 + eta^2) * (1 + 0.3*cos(psi))").unwrap()).unwrap();
        let f = GridFunction::from_analytic(grid.clone(), log_bump(d, c1, 0.5)).unwrap();
        let h = GridFunction::from_analytic(grid, log_bump(d, c2, 0.7)).unwrap();
        let pts: Vec<Point> = sample_points(&d, 3, 1);
        let lhs = apply_operator(&k, &f.linear_combination(alpha, &h, beta).unwrap(), &pts).unwrap().values;
        let kf = apply_operator(&k, &f, &pts).unwrap().values;
        let kh = apply_operator(&k, &h, &pts).unwrap().values;
        for j in 0..pts.len() {
            let rhs = alpha * kf[j] + beta * kh[j];
            prop_assert!((lhs[j] - rhs).abs() <= 1e-12 * (1.0 + alpha.abs() * kf[j].abs() + beta.abs() * kh[j].abs()));
        }
    }
}

#[test]
fn total_invariant_mass_of_the_grid() {
    // ∫ dν over the ρ-range [1e-3, 1e3] of the plane is π(1e6 − 1e-6) in r dr dθ
    let d = DomainSpec::punctured_plane();
    let g = QuadratureGrid::for_domain(&d, GridSpec::default()).unwrap();
    let total: f64 = g.weights.iter().sum();
    let exact = std::f64::consts::PI * (1e6 - 1e-6);
    assert!((total - exact).abs() <= 1e-10 * exact, "{total} vs {exact}");
}
