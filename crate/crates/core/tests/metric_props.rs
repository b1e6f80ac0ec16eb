use disc_lab::hypgeom::*;
use disc_lab::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn disc_point(r_max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..2.0 * PI).prop_map(move |(u, t)| Complex64::from_polar(r_max * u.sqrt(), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mobius_invariance(a in disc_point(0.9), z1 in disc_point(0.9), z2 in disc_point(0.9)) {
        let before = rho_p(z1, z2).unwrap();
        let after = rho_p(mobius_phi(a, z1).unwrap(), mobius_phi(a, z2).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-12, "{before} vs {after}");
    }

    #[test]
    fn phi_is_an_involution(a in disc_point(0.9), z in disc_point(0.9)) {
        let back = mobius_phi(a, mobius_phi(a, z).unwrap()).unwrap();
        prop_assert!((back - z).norm() < 1e-14);
    }

    #[test]
    fn midpoint_bisects(z1 in disc_point(0.95), z2 in disc_point(0.95)) {
        prop_assume!((z1 - z2).norm() > 1e-9);
        let xi = hyp_midpoint(z1, z2).unwrap();
        let half = rho_h(z1, z2).unwrap() / 2.0;
        prop_assert!((rho_h(z1, xi).unwrap() - half).abs() < 1e-12);
        prop_assert!((rho_h(xi, z2).unwrap() - half).abs() < 1e-12);
    }

    #[test]
    fn pseudo_disc_matches_euclidean_disc(a in disc_point(0.95), r in 0.01..0.99f64, w in disc_point(0.999)) {
        let d = PseudoHyperbolicDisc::new(a, r).unwrap();
        let (center, radius) = pseudo_disc_to_euclidean(&d);
        let band = ((w - center).norm() - radius).abs();
        prop_assume!(band > 1e-12);
        prop_assert_eq!(d.contains(w), (w - center).norm() < radius);
    }

    #[test]
    fn rho_h_is_symmetric_and_polar_consistent(z1 in disc_point(0.99), z2 in disc_point(0.99)) {
        let d = rho_h(z1, z2).unwrap();
        prop_assert!((d - rho_h(z2, z1).unwrap()).abs() <= 1e-12 * d.max(1.0));
        let polar = rho_h_polar(1.0 - z1.norm(), z1.arg(), 1.0 - z2.norm(), z2.arg()).unwrap();
        prop_assert!((d - polar).abs() <= 1e-9 * d.max(1.0), "{d} vs {polar}");
    }

    #[test]
    fn horodisc_is_tangent_at_its_direction(theta in 0.0..2.0 * PI, cc in 0.0..50.0f64) {
        let h = Horodisc::new(theta, cc).unwrap();
        let touch = h.center() + Complex64::from_polar(h.radius(), theta);
        prop_assert!((touch - Complex64::from_polar(1.0, theta)).norm() < 1e-12);
        prop_assert!(h.center().norm() + h.radius() <= 1.0 + 1e-15);
    }

    #[test]
    fn small_omega_discs_lie_in_both_big_discs(tau in 0.01..0.45f64, frac in 0.05..1.0f64, t in 0.0..2.0 * PI) {
        let rho = (1.0 - 2.0 * tau) * frac;
        let d = omega_domain(tau, rho).unwrap();
        for center in [d.c_plus, d.c_minus] {
            let p = center + Complex64::from_polar(d.small_radius, t);
            prop_assert!(p.norm() <= 1.0 + 1e-12);
            prop_assert!((p - Complex64::new(1.0 + rho, 0.0)).norm() <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn omega_membership_samples() {
    let d = omega_domain(0.375, 0.25).unwrap();
    assert!(omega_contains(&d, Complex64::new(0.625, 0.0)));
    assert!(omega_contains(&d, Complex64::new(0.625, 0.5)));
    assert!(!omega_contains(&d, Complex64::new(0.0, 0.0)));
    assert!(omega_contains(&d, Complex64::new(0.95, 0.0)));
    // lens tip beyond the small discs
    assert!(!omega_contains(&d, Complex64::new(0.625, 0.75)));
}
