use homokernel::hadamard_bergman::{disk_preset, hb_closed_form, hb_convolve, hb_equivalence, hb_homogeneity, DiskFunction, HbConfig};
use homokernel::operators::GridSpec;
use num_complex::Complex64;

#[test]
fn random_inputs_agree() {
    let f = disk_preset("bump").unwrap();
    let cfg = HbConfig::default();
    for seed in 0..4 {
        let g = disk_preset(&format!("trig:seed={seed}")).unwrap();
        for z in [Complex64::new(0.7, 0.1), Complex64::new(-0.2, -0.35)] {
            let r = hb_equivalence(&g, &f, z, &cfg).unwrap();
            assert!(r.pass && r.difference <= 1e-4, "{r:?}");
        }
    }
}

#[test]
fn polynomial_closed_form() {
    let c = |re| Complex64::new(re, 0.0);
    let g = DiskFunction::polynomial("g", vec![c(1.0), c(-2.0), Complex64::new(0.5, 1.0)]);
    let f = DiskFunction::polynomial("f", vec![c(3.0), c(1.0), c(0.25), c(7.0)]);
    let z = Complex64::new(0.4, -0.3);
    let exact = hb_closed_form(&g, &f, z).unwrap();
    let v = hb_convolve(&g, &f, z, &HbConfig::default()).unwrap().value;
    assert!((v - exact).norm() < 1e-12);
    assert!(hb_closed_form(&disk_preset("bump").unwrap(), &f, z).is_none());
}

#[test]
fn discrepancy_shrinks_under_refinement() {
    let g = disk_preset("trig:seed=5").unwrap();
    let f = disk_preset("bump").unwrap();
    let z = Complex64::new(0.5, 0.5);
    let diffs: Vec<f64> = [(8, 8), (16, 16), (32, 32)]
        .into_iter()
        .map(|(n, m)| {
            let cfg = HbConfig { grid: GridSpec::default().with_resolution(n, m).with_panels(2), tol: 1.0 };
            hb_equivalence(&g, &f, z, &cfg).unwrap().difference
        })
        .collect();
    assert!(diffs[1] < diffs[0] && diffs[2] < diffs[1], "{diffs:?}");
}

#[test]
fn kernel_homogeneity_on_the_disk() {
    let h = hb_homogeneity(&disk_preset("bump").unwrap(), 1000, 1e-10, 2).unwrap();
    assert!(h.report.pass, "{:?}", h.report);
    assert!(h.acceptance_rate > 0.0);
}
