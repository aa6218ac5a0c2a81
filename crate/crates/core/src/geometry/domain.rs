use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::arc::BoundaryArc;
use super::boundary::{Boundary, Closest};
use super::{wrap_pi, ComplexPoint, Side};
use crate::error::{check_positive, check_range, Error, Result};

/// Smallest angular gap (radians) tolerated between the two sides of a
/// non-straight corner, and between neighbouring wedges of a multi-corner.
pub const MIN_ANGULAR_GAP: f64 = 1e-3;

/// Hölder data of a corner: `Θ(r) ≤ πα(1 + c1·r^gamma)` on `(0, ρ₀]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Holder {
    pub gamma: f64,
    pub c1: f64,
}

/// An exact circular sector `{corner + r·e^{iθ} : 0 < r < radius, φ < θ < φ + πα}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorShape {
    pub corner: Complex64,
    pub phi: f64,
    pub alpha: f64,
    pub radius: f64,
}

/// Read-only geometric queries shared by all domain kinds.
pub trait PlanarDomain: Send + Sync {
    fn boundary(&self) -> &Boundary;
    fn corner(&self) -> ComplexPoint;
    fn rho0(&self) -> f64;

    fn contains(&self, z: ComplexPoint) -> bool {
        self.boundary().contains(z)
    }

    fn closest(&self, z: ComplexPoint) -> Closest {
        self.boundary().closest(z)
    }

    /// Distance to the boundary (never overestimated).
    fn distance_to_boundary(&self, z: ComplexPoint) -> f64 {
        self.closest(z).distance
    }

    /// Set when the domain is an exact circular sector with apex at the corner.
    fn sector_shape(&self) -> Option<SectorShape> {
        None
    }

    /// Index of the corner component whose boundary contains the boundary
    /// point `z` (only meaningful for multi-corner domains).
    fn component_of(&self, _z: ComplexPoint) -> Option<usize> {
        None
    }

    /// Radius of a disk about the corner that contains the whole domain.
    fn outer_radius(&self) -> f64 {
        let c = self.corner();
        self.boundary()
            .arcs()
            .iter()
            .map(|a| a.max_distance_from(c))
            .fold(0.0, f64::max)
    }

    /// Total angle `Σ_j Θ_j(r)` of the circle of radius `r` about the corner
    /// that lies in the domain (valid for any `r > 0`).
    fn angular_measure(&self, r: f64) -> Result<f64> {
        Ok(self
            .boundary()
            .angular_intervals(self.corner(), r)?
            .iter()
            .map(|(lo, hi)| hi - lo)
            .sum())
    }
}

impl<T: PlanarDomain + ?Sized> PlanarDomain for &T {
    fn boundary(&self) -> &Boundary {
        (**self).boundary()
    }
    fn corner(&self) -> ComplexPoint {
        (**self).corner()
    }
    fn rho0(&self) -> f64 {
        (**self).rho0()
    }
    fn contains(&self, z: ComplexPoint) -> bool {
        (**self).contains(z)
    }
    fn closest(&self, z: ComplexPoint) -> Closest {
        (**self).closest(z)
    }
    fn sector_shape(&self) -> Option<SectorShape> {
        (**self).sector_shape()
    }
    fn component_of(&self, z: ComplexPoint) -> Option<usize> {
        (**self).component_of(z)
    }
    fn outer_radius(&self) -> f64 {
        (**self).outer_radius()
    }
    fn angular_measure(&self, r: f64) -> Result<f64> {
        (**self).angular_measure(r)
    }
}

/// A domain with one distinguished corner of opening `πα` at `corner`.
#[derive(Clone, Debug)]
pub struct CornerDomain {
    boundary: Boundary,
    corner: Complex64,
    phi: f64,
    alpha: f64,
    rho0: f64,
    holder: Option<Holder>,
    sector: Option<SectorShape>,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

impl CornerDomain {
    /// General constructor. `phi` is the direction of the `plus` side at the
    /// corner; pass `None` to read it off the boundary.
    pub fn new(
        arcs: Vec<BoundaryArc>,
        corner: ComplexPoint,
        alpha: f64,
        phi: Option<f64>,
        rho0: f64,
        holder: Option<Holder>,
    ) -> Result<Self> {
        check_range("alpha", alpha, 0.0, 2.0)?;
        check_positive("rho0", rho0)?;
        let boundary = Boundary::new(arcs, corner)?;
        let phi = match phi {
            Some(p) => p,
            None => {
                let iv = boundary.angular_intervals(corner, 1e-6 * rho0)?;
                match iv.as_slice() {
                    [(lo, _)] => *lo,
                    _ => {
                        return Err(Error::DegenerateDomain(
                            "cannot read the corner direction off the boundary".into(),
                        ))
                    }
                }
            }
        };
        let domain = Self {
            boundary,
            corner,
            phi,
            alpha,
            rho0,
            holder,
            sector: None,
        };
        domain.validate(alpha < 2.0)?;
        Ok(domain)
    }

    /// Exact sector of opening `πα` and radius `radius` with apex at the origin
    /// and plus side along the positive real axis.
    pub fn sector(alpha: f64, radius: f64, rho0: f64) -> Result<Self> {
        Self::sector_at(Complex64::new(0.0, 0.0), 0.0, alpha, radius, rho0)
    }

    pub fn sector_at(corner: ComplexPoint, phi: f64, alpha: f64, radius: f64, rho0: f64) -> Result<Self> {
        check_range("alpha", alpha, 0.0, 2.0)?;
        check_positive("radius", radius)?;
        check_positive("rho0", rho0)?;
        if rho0 >= radius {
            return Err(Error::param("rho0", format!("must be smaller than the sector radius {radius}")));
        }
        let opening = PI * alpha;
        let p0 = corner + Complex64::from_polar(radius, phi);
        let p1 = corner + Complex64::from_polar(radius, phi + opening);
        let mut arcs = vec![
            BoundaryArc::Segment { from: corner, to: p0 },
            BoundaryArc::CircularArc {
                center: corner,
                radius,
                start_angle: phi,
                sweep: opening,
            },
        ];
        // the slit sector (α = 2) has both sides on the same segment; it is
        // listed twice so that both sides exist as arcs
        arcs.push(BoundaryArc::Segment { from: p1, to: corner });
        let boundary = Boundary::new(arcs, corner)?;
        let domain = Self {
            boundary,
            corner,
            phi,
            alpha,
            rho0,
            holder: Some(Holder { gamma: 1.0, c1: 0.0 }),
            sector: Some(SectorShape {
                corner,
                phi,
                alpha,
                radius,
            }),
        };
        domain.validate(false)?;
        Ok(domain)
    }

    /// Wedge with apex at the origin whose sides are the perturbed arcs
    /// `r·e^{iκ₊r^γ}` and `r·e^{i(πα + κ₋r^γ)}`, closed by a circular arc of
    /// radius `radius`. Then `Θ(r) = πα + (κ₋ − κ₊)·r^γ` exactly.
    pub fn perturbed_wedge(
        alpha: f64,
        radius: f64,
        rho0: f64,
        gamma: f64,
        kappa_plus: f64,
        kappa_minus: f64,
    ) -> Result<Self> {
        check_range("alpha", alpha, 0.0, 2.0)?;
        check_range("gamma", gamma, 0.0, 1.0)?;
        check_positive("radius", radius)?;
        for (name, k) in [("kappa_plus", kappa_plus), ("kappa_minus", kappa_minus)] {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::param(name, "must be a finite non-negative number"));
            }
        }
        if rho0 >= radius {
            return Err(Error::param("rho0", format!("must be smaller than the wedge radius {radius}")));
        }
        let origin = Complex64::new(0.0, 0.0);
        let opening = PI * alpha;
        let psi_plus = kappa_plus * radius.powf(gamma);
        let psi_minus = opening + kappa_minus * radius.powf(gamma);
        let arcs = vec![
            BoundaryArc::PerturbedArc {
                origin,
                phi: 0.0,
                gamma,
                kappa: kappa_plus,
                length: radius,
                outward: true,
            },
            BoundaryArc::CircularArc {
                center: origin,
                radius,
                start_angle: psi_plus,
                sweep: psi_minus - psi_plus,
            },
            BoundaryArc::PerturbedArc {
                origin,
                phi: opening,
                gamma,
                kappa: kappa_minus,
                length: radius,
                outward: false,
            },
        ];
        let c1 = (kappa_minus - kappa_plus).max(0.0) / opening;
        let boundary = Boundary::new(arcs, origin)?;
        let domain = Self {
            boundary,
            corner: origin,
            phi: 0.0,
            alpha,
            rho0,
            holder: Some(Holder { gamma, c1 }),
            sector: None,
        };
        domain.validate(true)?;
        Ok(domain)
    }

    /// Disk with the corner placed at the boundary point of angle 0 (a
    /// smooth boundary point, `α = 1`).
    pub fn disk(center: ComplexPoint, radius: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        let corner = center + radius;
        let arcs = vec![BoundaryArc::CircularArc {
            center,
            radius,
            start_angle: 0.0,
            sweep: TAU,
        }];
        let boundary = Boundary::new(arcs, corner)?;
        let domain = Self {
            boundary,
            corner,
            phi: PI / 2.0,
            alpha: 1.0,
            rho0: radius,
            holder: None,
            sector: None,
        };
        domain.validate(true)?;
        Ok(domain)
    }

    /// Upper half-disk `{|z| < radius, Im z > 0}` with the corner at 0.
    pub fn half_disk(radius: f64) -> Result<Self> {
        Self::sector(1.0, radius, 0.5 * radius)
    }

    /// Checks the corner structure on a logarithmic grid of radii.
    fn validate(&self, require_gap: bool) -> Result<()> {
        let scale = self.boundary.scale();
        if self.boundary.closest(self.corner).distance > 1e-9 * scale {
            return Err(Error::DegenerateDomain("the corner is not on the boundary".into()));
        }
        let bisector = self.phi + 0.5 * PI * self.alpha;
        for f in [1e-3, 1e-2, 0.1, 0.5, 0.99] {
            let z = self.corner + Complex64::from_polar(f * self.rho0, bisector);
            if !self.boundary.contains(z) {
                return Err(Error::DegenerateDomain(format!(
                    "bisector point at distance {} from the corner lies outside the domain",
                    f * self.rho0
                )));
            }
        }
        for r in log_grid(1e-4 * self.rho0, self.rho0, 24) {
            let iv = self.boundary.angular_intervals(self.corner, r)?;
            if iv.len() != 1 {
                return Err(Error::DegenerateDomain(format!(
                    "the circle of radius {r} about the corner meets the domain in {} arcs; reduce rho0",
                    iv.len()
                )));
            }
            let (lo, hi) = iv[0];
            if require_gap && hi - lo > TAU - MIN_ANGULAR_GAP {
                return Err(Error::DegenerateDomain(format!(
                    "the corner sides are closer than the minimum gap {MIN_ANGULAR_GAP} at radius {r}"
                )));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn holder(&self) -> Option<Holder> {
        self.holder
    }

    pub fn arcs(&self) -> &[BoundaryArc] {
        self.boundary.arcs()
    }

    fn corner_interval(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0 && r <= self.rho0) {
            return Err(Error::OutOfRange(format!(
                "radius {r} is outside (0, rho0 = {}]",
                self.rho0
            )));
        }
        if let Some(s) = self.sector {
            return Ok((s.phi, s.phi + PI * s.alpha));
        }
        let iv = self.boundary.angular_intervals(self.corner, r)?;
        match iv.as_slice() {
            [(lo, hi)] => {
                // report the interval on the branch containing the bisector
                let shift = (self.phi - lo + PI).div_euclid(TAU) * TAU;
                Ok((lo + shift, hi + shift))
            }
            _ => Err(Error::DegenerateDomain(format!(
                "corner structure fails at radius {r}"
            ))),
        }
    }

    /// `Θ(r)`: angular measure of the arc of `|z − z₀| = r` inside the domain.
    pub fn theta_profile(&self, r: f64) -> Result<f64> {
        let (lo, hi) = self.corner_interval(r)?;
        Ok(hi - lo)
    }

    /// `w±(r)`: the point of the plus or minus side at distance `r` from the corner.
    pub fn corner_parametrization(&self, side: Side, r: f64) -> Result<ComplexPoint> {
        if r == 0.0 {
            return Ok(self.corner);
        }
        let (lo, hi) = self.corner_interval(r)?;
        let angle = match side {
            Side::Plus => lo,
            Side::Minus => hi,
        };
        Ok(self.corner + Complex64::from_polar(r, angle))
    }
}

impl PlanarDomain for CornerDomain {
    fn boundary(&self) -> &Boundary {
        &self.boundary
    }
    fn corner(&self) -> ComplexPoint {
        self.corner
    }
    fn rho0(&self) -> f64 {
        self.rho0
    }
    fn sector_shape(&self) -> Option<SectorShape> {
        self.sector
    }
    fn contains(&self, z: ComplexPoint) -> bool {
        match self.sector {
            Some(s) => {
                let d = z - s.corner;
                let r = d.norm();
                if !(r > 0.0 && r < s.radius) {
                    return false;
                }
                let rel = (d.arg() - s.phi).rem_euclid(TAU);
                rel > 0.0 && rel < PI * s.alpha
            }
            None => self.boundary.contains(z),
        }
    }
    fn outer_radius(&self) -> f64 {
        match self.sector {
            Some(s) => s.radius,
            None => self.boundary.scale(),
        }
    }
    fn angular_measure(&self, r: f64) -> Result<f64> {
        match self.sector {
            Some(s) if r < s.radius => Ok(PI * s.alpha),
            Some(_) => Ok(0.0),
            None => Ok(self
                .boundary
                .angular_intervals(self.corner, r)?
                .iter()
                .map(|(lo, hi)| hi - lo)
                .sum()),
        }
    }
}

/// One wedge of a multi-corner: directions `φ < θ < φ + πα`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub phi: f64,
    pub alpha: f64,
}

/// Several wedges meeting at one point: the disk `|z − corner| < outer_radius`
/// with the closed gap sectors between consecutive wedges (radius `rho0`)
/// removed. Inside `B_{ρ₀}` the domain is the disjoint union of the wedges.
#[derive(Clone, Debug)]
pub struct MultiCornerDomain {
    boundary: Boundary,
    corner: Complex64,
    wedges: Vec<Wedge>,
    rho0: f64,
    outer_radius: f64,
}

impl MultiCornerDomain {
    pub fn new(corner: ComplexPoint, wedges: Vec<Wedge>, rho0: f64, outer_radius: f64) -> Result<Self> {
        check_positive("rho0", rho0)?;
        if !(outer_radius > rho0 && outer_radius.is_finite()) {
            return Err(Error::param("outer_radius", format!("must exceed rho0 = {rho0}")));
        }
        if wedges.is_empty() {
            return Err(Error::param("wedges", "at least one wedge is required"));
        }
        let mut wedges = wedges;
        for w in &mut wedges {
            check_range("alpha", w.alpha, 0.0, 2.0)?;
            if !w.phi.is_finite() {
                return Err(Error::param("phi", "must be finite"));
            }
            w.phi = w.phi.rem_euclid(TAU);
        }
        wedges.sort_by(|a, b| a.phi.total_cmp(&b.phi));
        let m = wedges.len();
        let mut arcs = vec![BoundaryArc::CircularArc {
            center: corner,
            radius: outer_radius,
            start_angle: 0.0,
            sweep: TAU,
        }];
        for j in 0..m {
            let gap_start = wedges[j].phi + PI * wedges[j].alpha;
            let gap_end = if j + 1 < m {
                wedges[j + 1].phi
            } else {
                wedges[0].phi + TAU
            };
            if gap_end - gap_start < MIN_ANGULAR_GAP {
                return Err(Error::DegenerateDomain(format!(
                    "wedges {j} and {} overlap or leave a gap below {MIN_ANGULAR_GAP} rad",
                    (j + 1) % m
                )));
            }
            let a = corner + Complex64::from_polar(rho0, gap_start);
            let b = corner + Complex64::from_polar(rho0, gap_end);
            arcs.push(BoundaryArc::Segment { from: corner, to: a });
            arcs.push(BoundaryArc::CircularArc {
                center: corner,
                radius: rho0,
                start_angle: gap_start,
                sweep: gap_end - gap_start,
            });
            arcs.push(BoundaryArc::Segment { from: b, to: corner });
        }
        let boundary = Boundary::new(arcs, corner)?;
        Ok(Self {
            boundary,
            corner,
            wedges,
            rho0,
            outer_radius,
        })
    }

    /// Wedges sorted by direction.
    pub fn wedges(&self) -> &[Wedge] {
        &self.wedges
    }

    pub fn outer_radius_value(&self) -> f64 {
        self.outer_radius
    }

    /// Index of the wedge containing direction `theta`, if any.
    pub fn wedge_of_angle(&self, theta: f64) -> Option<usize> {
        self.wedges.iter().position(|w| {
            let rel = (theta - w.phi).rem_euclid(TAU);
            rel > 0.0 && rel < PI * w.alpha
        })
    }

    /// Index of the wedge `U_j` containing `z`, if `|z − corner| < ρ₀`.
    pub fn wedge_of(&self, z: ComplexPoint) -> Option<usize> {
        let d = z - self.corner;
        let r = d.norm();
        if !(r > 0.0 && r < self.rho0) {
            return None;
        }
        self.wedge_of_angle(d.arg())
    }

    /// Wedge `U_j` as a standalone exact sector of radius `ρ₀`.
    pub fn wedge_domain(&self, j: usize) -> Result<CornerDomain> {
        let w = self
            .wedges
            .get(j)
            .ok_or_else(|| Error::param("wedge", format!("index {j} out of range")))?;
        CornerDomain::sector_at(self.corner, w.phi, w.alpha, self.rho0, 0.5 * self.rho0)
    }

    /// `(Θ_j(r))_j` for `0 < r ≤ ρ₀`.
    pub fn theta_profile(&self, r: f64) -> Result<Vec<f64>> {
        if !(r > 0.0 && r <= self.rho0) {
            return Err(Error::OutOfRange(format!(
                "radius {r} is outside (0, rho0 = {}]",
                self.rho0
            )));
        }
        Ok(self.wedges.iter().map(|w| PI * w.alpha).collect())
    }

    pub fn max_alpha(&self) -> f64 {
        self.wedges.iter().map(|w| w.alpha).fold(0.0, f64::max)
    }
}

impl PlanarDomain for MultiCornerDomain {
    fn boundary(&self) -> &Boundary {
        &self.boundary
    }
    fn corner(&self) -> ComplexPoint {
        self.corner
    }
    fn rho0(&self) -> f64 {
        self.rho0
    }
    fn component_of(&self, z: ComplexPoint) -> Option<usize> {
        let d = z - self.corner;
        if !(d.norm() <= self.rho0 * (1.0 + 1e-12)) {
            return None;
        }
        const SLACK: f64 = 1e-9;
        let theta = d.arg();
        self.wedges.iter().position(|w| {
            let rel = wrap_pi(theta - w.phi - 0.5 * PI * w.alpha);
            rel.abs() <= 0.5 * PI * w.alpha + SLACK
        })
    }
    fn contains(&self, z: ComplexPoint) -> bool {
        let d = z - self.corner;
        let r = d.norm();
        if !(r > 0.0 && r < self.outer_radius) {
            return false;
        }
        r > self.rho0 || self.wedge_of_angle(d.arg()).is_some()
    }
    fn outer_radius(&self) -> f64 {
        self.outer_radius
    }
    fn angular_measure(&self, r: f64) -> Result<f64> {
        Ok(if r >= self.outer_radius {
            0.0
        } else if r > self.rho0 {
            TAU
        } else {
            self.wedges.iter().map(|w| PI * w.alpha).sum()
        })
    }
}

/// Either kind of domain, as loaded from a domain file.
#[derive(Clone, Debug)]
pub enum AnyDomain {
    Corner(CornerDomain),
    Multi(MultiCornerDomain),
}

impl AnyDomain {
    fn inner(&self) -> &dyn PlanarDomain {
        match self {
            AnyDomain::Corner(d) => d,
            AnyDomain::Multi(d) => d,
        }
    }
}

impl PlanarDomain for AnyDomain {
    fn boundary(&self) -> &Boundary {
        self.inner().boundary()
    }
    fn corner(&self) -> ComplexPoint {
        self.inner().corner()
    }
    fn rho0(&self) -> f64 {
        self.inner().rho0()
    }
    fn contains(&self, z: ComplexPoint) -> bool {
        self.inner().contains(z)
    }
    fn closest(&self, z: ComplexPoint) -> Closest {
        self.inner().closest(z)
    }
    fn sector_shape(&self) -> Option<SectorShape> {
        self.inner().sector_shape()
    }
    fn component_of(&self, z: ComplexPoint) -> Option<usize> {
        self.inner().component_of(z)
    }
    fn outer_radius(&self) -> f64 {
        self.inner().outer_radius()
    }
    fn angular_measure(&self, r: f64) -> Result<f64> {
        self.inner().angular_measure(r)
    }
}
