//! Planar domains with a distinguished corner.
//!
//! Boundaries are flat lists of segments, circular arcs and perturbed
//! `C^{1,γ}` arcs. Domains answer the queries a Brownian walker needs
//! (membership, a never-overestimated distance to the boundary, the nearest
//! boundary point) and expose the corner structure `Θ(r)`, `w±(r)`.

mod arc;
mod boundary;
mod domain;
mod file;

use serde::{Deserialize, Serialize};

pub use arc::{ArcClosest, BoundaryArc};
pub use boundary::{Boundary, Closest};
pub use domain::{
    AnyDomain, CornerDomain, Holder, MultiCornerDomain, PlanarDomain, SectorShape, Wedge,
    MIN_ANGULAR_GAP,
};
pub use file::{DomainFile, DomainLayout};

pub(crate) use arc::wrap_pi;

/// Points of the plane.
pub type ComplexPoint = num_complex::Complex64;

/// Side of a corner: `Plus` leaves the corner in direction `φ`, `Minus` in
/// direction `φ + πα`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    #[test]
    fn disk_queries() {
        let d = CornerDomain::disk(c(0.0, 0.0), 1.0).unwrap();
        assert!(d.contains(c(0.0, 0.0)));
        assert!((d.distance_to_boundary(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((d.theta_profile(0.5).unwrap() - 2.0 * (0.25f64).acos()).abs() < 1e-10);
    }

    #[test]
    fn quarter_sector_membership_and_distance() {
        let s = CornerDomain::sector(0.5, 1.0, 0.5).unwrap();
        assert!(s.contains(ComplexPoint::from_polar(0.5, FRAC_PI_4)));
        assert!(!s.contains(ComplexPoint::from_polar(0.5, -FRAC_PI_4)));
        // generic ray casting agrees with the closed-form sector test
        assert!(s.boundary().contains(ComplexPoint::from_polar(0.5, FRAC_PI_4)));
        assert!(!s.boundary().contains(ComplexPoint::from_polar(0.5, -FRAC_PI_4)));
        let z = c(0.3, 0.3);
        let dist = s.distance_to_boundary(z);
        // |z|·sin(angle between z and the nearer side)
        let oracle = z.norm() * FRAC_PI_4.sin();
        assert!((dist - oracle).abs() < 1e-15, "{dist}");
        let z = c(0.3, 0.1);
        assert!((s.distance_to_boundary(z) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn half_disk_equidistant_point() {
        let h = CornerDomain::half_disk(1.0).unwrap();
        assert!((h.distance_to_boundary(c(0.0, 0.5)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sector_corner_parametrization() {
        let s = CornerDomain::sector(0.5, 1.0, 0.6).unwrap();
        assert!((s.corner_parametrization(Side::Plus, 0.5).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!((s.corner_parametrization(Side::Minus, 0.5).unwrap() - c(0.0, 0.5)).norm() < 1e-15);
        assert!(s.corner_parametrization(Side::Plus, 0.7).is_err());
        assert!((s.theta_profile(0.3).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn perturbed_wedge_structure() {
        let w = CornerDomain::perturbed_wedge(1.0, 1.0, 0.5, 0.4, 0.1, 0.0).unwrap();
        let p = w.corner_parametrization(Side::Plus, 0.1).unwrap();
        let expected = ComplexPoint::from_polar(0.1, 0.1 * 0.1f64.powf(0.4));
        assert!((p - expected).norm() < 1e-12, "{p} vs {expected}");
        assert!((p.norm() - 0.1).abs() < 1e-12);

        let widened = CornerDomain::perturbed_wedge(0.5, 1.0, 0.5, 0.4, 0.0, 0.1).unwrap();
        let holder = widened.holder().unwrap();
        for r in [1e-4, 1e-3, 0.01, 0.1, 0.5] {
            let theta = widened.theta_profile(r).unwrap();
            let exact = PI * 0.5 + 0.1 * r.powf(0.4);
            assert!((theta - exact).abs() < 1e-12, "r={r}: {theta} vs {exact}");
            assert!(theta <= PI * 0.5 * (1.0 + holder.c1 * r.powf(holder.gamma)) + 1e-12);
        }
    }

    #[test]
    fn perturbed_wedge_sides_tend_to_the_tangent_directions() {
        let w = CornerDomain::perturbed_wedge(0.75, 1.0, 0.5, 0.5, 0.2, 0.3).unwrap();
        let plus = w.corner_parametrization(Side::Plus, 1e-8).unwrap();
        let minus = w.corner_parametrization(Side::Minus, 1e-8).unwrap();
        assert!(plus.arg().abs() < 1e-3);
        assert!((minus.arg() - 0.75 * PI).abs() < 1e-3);
    }

    #[test]
    fn multi_corner_profile_and_membership() {
        let m = MultiCornerDomain::new(
            c(0.0, 0.0),
            vec![Wedge { phi: 0.0, alpha: 0.5 }, Wedge { phi: PI, alpha: 0.25 }],
            0.5,
            1.0,
        )
        .unwrap();
        let t = m.theta_profile(0.2).unwrap();
        assert!((t[0] - PI / 2.0).abs() < 1e-15 && (t[1] - PI / 4.0).abs() < 1e-15);
        let probes = [
            c(0.1, 0.1),
            c(-0.1, -0.05),
            c(-0.1, 0.1),
            c(0.1, -0.1),
            c(0.7, -0.1),
            c(0.0, 0.3),
            c(0.0, -0.45),
        ];
        for z in probes {
            assert_eq!(m.contains(z), m.boundary().contains(z), "{z}");
        }
        assert!(!m.contains(c(-0.1, 0.1)));
        assert!(m.contains(c(0.7, -0.1)));
        assert_eq!(m.wedge_of(c(-0.1, -0.05)), Some(1));
        let total = m.angular_measure(0.2).unwrap();
        assert!((total - 0.75 * PI).abs() < 1e-12);
        let ray_total: f64 = m
            .boundary()
            .angular_intervals(c(0.0, 0.0), 0.2)
            .unwrap()
            .iter()
            .map(|(a, b)| b - a)
            .sum();
        assert!((ray_total - total).abs() < 1e-12);
    }

    #[test]
    fn overlapping_wedges_are_rejected() {
        let err = MultiCornerDomain::new(
            c(0.0, 0.0),
            vec![Wedge { phi: 0.0, alpha: 1.0 }, Wedge { phi: 3.0, alpha: 1.0 }],
            0.5,
            1.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        assert!(CornerDomain::sector(3.0, 1.0, 0.5).is_err());
        assert!(CornerDomain::sector(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn slit_disk_is_accepted_as_exact_sector() {
        let s = CornerDomain::sector(2.0, 1.0, 0.5).unwrap();
        assert!(s.contains(c(0.3, 0.01)));
        assert!(s.contains(c(0.3, -0.01)));
        assert!((s.distance_to_boundary(c(0.3, -0.01)) - 0.01).abs() < 1e-15);
        assert!((s.theta_profile(0.25).unwrap() - 2.0 * PI).abs() < 1e-15);
    }
}
