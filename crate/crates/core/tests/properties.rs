use std::f64::consts::PI;

use corner_balayage::analysis::{envelope, fit_rate, CurvePoint, MultiCornerEnvelope, Regime};
use corner_balayage::geometry::DomainFile;
use corner_balayage::sector_exact::{sector_mass, SectorSpec};
use corner_balayage::{ComplexPoint, CornerDomain, PlanarDomain};
use proptest::prelude::*;

/// Dense-sampling distance from `z` to the boundary.
fn sampled_distance(d: &CornerDomain, z: ComplexPoint) -> f64 {
    d.arcs()
        .iter()
        .flat_map(|a| (0..=4000).map(move |k| a.point(k as f64 / 4000.0)))
        .map(|p| (p - z).norm())
        .fold(f64::INFINITY, f64::min)
}

fn wedge_strategy() -> impl Strategy<Value = CornerDomain> {
    (0.2f64..1.9, 0.0f64..0.3, 0.0f64..0.3, 0.3f64..1.0).prop_map(|(alpha, kp, km, gamma)| {
        CornerDomain::perturbed_wedge(alpha, 1.0, 0.5, gamma, kp, km).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_never_overestimates(d in wedge_strategy(), r in 0.01f64..0.95, t in 0.0f64..1.0) {
        let z = ComplexPoint::from_polar(r, PI * d.alpha() * t);
        let reported = d.distance_to_boundary(z);
        let sampled = sampled_distance(&d, z);
        prop_assert!(reported <= sampled + 1e-12, "{reported} > {sampled}");
        // within the 10% certification of the branch-and-bound search
        prop_assert!(reported >= 0.9 * sampled - 1e-3 * sampled.max(1e-3), "{reported} ≪ {sampled}");
    }

    #[test]
    fn sector_membership_agrees_with_ray_casting(alpha in 0.1f64..1.95, r in 0.01f64..1.5, theta in -3.1f64..3.1) {
        let s = CornerDomain::sector(alpha, 1.0, 0.5).unwrap();
        let z = ComplexPoint::from_polar(r, theta);
        prop_assume!(s.distance_to_boundary(z) > 1e-9);
        prop_assert_eq!(s.contains(z), s.boundary().contains(z));
    }

    #[test]
    fn sector_mass_is_monotone_and_bounded(alpha in 0.1f64..2.0, b in 0.05f64..2.0, r1 in 0.001f64..0.98, r2 in 0.001f64..0.98) {
        let spec = SectorSpec::new(alpha, 1.0, b).unwrap();
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let m1 = sector_mass(&spec, lo, 1e-13).unwrap().value;
        let m2 = sector_mass(&spec, hi, 1e-13).unwrap().value;
        prop_assert!(m1 >= 0.0);
        prop_assert!(m1 <= m2 * (1.0 + 1e-9) + 1e-14);
        prop_assert!(m2 < spec.total_mass());
    }

    #[test]
    fn envelope_coefficients_are_continuous(alpha in 0.1f64..1.9, frac in 0.05f64..0.8) {
        // sub regime 2bα = frac, relative step 1e-3 in both parameters; both
        // constants diverge as 2bα → 1, so the grid stops short of it
        let b = frac / (2.0 * alpha);
        let e0 = envelope(alpha, b, 0.1).unwrap();
        let e1 = envelope(alpha * (1.0 + 1e-3), b * (1.0 + 1e-3), 0.1).unwrap();
        prop_assume!(e1.regime == Regime::Sub);
        let lo = (e1.lower_coeff.unwrap() / e0.lower_coeff.unwrap() - 1.0).abs();
        prop_assert!(lo < 1e-2, "lower jump {lo}");
        let hi = (e1.upper_coeff.unwrap() / e0.upper_coeff.unwrap() - 1.0).abs();
        prop_assert!(hi < 1e-2, "upper jump {hi}");
    }

    #[test]
    fn m_alpha_counts_widest_wedges(alphas in proptest::collection::vec(prop_oneof![Just(0.25), Just(0.5), Just(0.75)], 1..5)) {
        let m = MultiCornerEnvelope::new(&alphas, 0.3, 0.1).unwrap();
        let widest = alphas.iter().copied().fold(0.0, f64::max);
        prop_assert_eq!(m.m_alpha, alphas.iter().filter(|&&a| a == widest).count());
    }

    #[test]
    fn perturbed_domain_file_round_trips(d in wedge_strategy()) {
        let file = DomainFile::from_corner(&d);
        let text = file.to_json().unwrap();
        let back = DomainFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &file);
        let rebuilt = back.corner_domain().unwrap();
        let z = ComplexPoint::from_polar(0.4, 0.5 * PI * d.alpha());
        prop_assert_eq!(rebuilt.distance_to_boundary(z), d.distance_to_boundary(z));
    }
}

/// Exponent of the exact series away from the regime boundary.
#[test]
fn series_exponent_is_universal() {
    let radii: Vec<f64> = (0..8).map(|i| 1e-10 * 10f64.powf(i as f64 * 2.0 / 7.0)).collect();
    for &(alpha, b) in &[(1.0, 0.25), (0.5, 0.25), (2.0, 0.1), (1.0, 1.5), (0.5, 2.0), (2.0, 1.0)] {
        let spec = SectorSpec::new(alpha, 1.0, b).unwrap();
        let curve: Vec<CurvePoint> = radii
            .iter()
            .map(|&r| CurvePoint { r, mass: sector_mass(&spec, r, 1e-15).unwrap().value, std_error: 0.0 })
            .collect();
        let fit = fit_rate(&curve, false).unwrap();
        let expected = (2.0 * b).min(1.0 / alpha);
        assert!((fit.exponent - expected).abs() < 1e-3, "α={alpha} b={b}: {}", fit.exponent);
    }
    for &alpha in &[0.5, 1.0, 2.0] {
        let spec = SectorSpec::new(alpha, 1.0, 1.0 / (2.0 * alpha)).unwrap();
        let curve: Vec<CurvePoint> = radii
            .iter()
            .map(|&r| CurvePoint { r, mass: sector_mass(&spec, r, 1e-15).unwrap().value, std_error: 0.0 })
            .collect();
        let fit = fit_rate(&curve, true).unwrap();
        assert!(fit.log_correction, "α={alpha}");
        assert!((fit.exponent - 1.0 / alpha).abs() < 1e-2, "α={alpha}: {}", fit.exponent);
    }
}
