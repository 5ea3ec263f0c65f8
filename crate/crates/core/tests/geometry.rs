use homokernel::geometry::{lobachevsky_c_min, DomainSpec, GroupElement, MeasureMethod, Point, Region};
use proptest::prelude::*;

fn polar_domains() -> Vec<DomainSpec> {
    vec![
        DomainSpec::punctured_plane(),
        DomainSpec::poincare(-1.0).unwrap(),
        DomainSpec::bergman(0.5, 1.0).unwrap(),
        DomainSpec::lobachevsky(lobachevsky_c_min() + 0.1).unwrap(),
    ]
}

proptest! {
    #[test]
    fn action_is_a_group_action(a1 in -1.0..1.0f64, a2 in -1.0..1.0f64, p1 in -3.0..3.0f64, p2 in -3.0..3.0f64,
                                r in 0.05..0.95f64, t in -3.0..3.0f64) {
        let (g1, g2) = (GroupElement::cyl(a1, p1), GroupElement::cyl(a2, p2));
        for d in polar_domains() {
            let x = Point::new(r, t);
            let (Ok(step), Ok(g12)) = (d.act(&g2, &x).and_then(|y| d.act(&g1, &y)), g1.compose(&g2)) else { continue };
            let Ok(once) = d.act(&g12, &x) else { continue };
            prop_assert!((step.r() - once.r()).abs() <= 1e-9 * once.r(), "{:?}", d.tag());
            let dt = (step.theta() - once.theta()).rem_euclid(std::f64::consts::TAU);
            prop_assert!(dt.min(std::f64::consts::TAU - dt) <= 1e-12);
        }
    }

    #[test]
    fn gamma_inverse_roundtrip(t in 1e-6..0.999f64) {
        for d in polar_domains().into_iter().skip(1) {
            let s = d.gamma_c(t).unwrap();
            let back = d.gamma_c_inv(s).unwrap();
            prop_assert!((back - t).abs() <= 1e-10 * t.max(1e-3), "{:?}: {t} -> {s} -> {back}", d.tag());
        }
    }
}

#[test]
fn domains_survive_json() {
    let mut all = polar_domains();
    all.extend([DomainSpec::cylinder(), DomainSpec::gl2_plane(), DomainSpec::radial_disk(Some(3.0), 0.25).unwrap()]);
    for d in all {
        assert_eq!(DomainSpec::from_json(&d.to_json()).unwrap(), d);
    }
    assert!(DomainSpec::from_json(r#"{"tag":"PoincareDisk","C":-2.0}"#).is_err());
}

#[test]
fn quadrature_and_monte_carlo_agree_on_the_image_measure() {
    let d = DomainSpec::bergman(0.5, 1.0).unwrap();
    let region = Region::AnnulusSector { r_inner: 0.3, r_outer: 0.6, theta_start: 1.0, width: 2.0 };
    let g = GroupElement::cyl(0.2, 0.4);
    let q = d.verify_dilation(&g, &region, MeasureMethod::quadrature()).unwrap();
    let mc = d.verify_dilation(&g, &region, MeasureMethod::MonteCarlo { samples: 400_000, seed: 1 }).unwrap();
    assert!(q.pass && mc.pass, "{q:?} {mc:?}");
    assert!((q.measure - mc.measure).abs() <= 1e-2 * q.measure);
    assert!((q.image_measure - mc.image_measure).abs() <= 1e-2 * q.image_measure);
}
