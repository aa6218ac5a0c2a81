//! Radial power measures `dμ = m(|z − c|)·|z − c|^{2b−2} d²z` restricted to a domain.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{check_positive, Error, Result};
use crate::geometry::{BoundaryArc, ComplexPoint, PlanarDomain};
use crate::parallel::{self, Stream};
use crate::quadrature;

/// Radial multiplier `m(r)` with `r = |z − center|`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Multiplier {
    #[default]
    None,
    Constant {
        value: f64,
    },
    /// `m(r) = 1 + coeff·r^exponent`.
    Power {
        coeff: f64,
        exponent: f64,
    },
}

impl Multiplier {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Multiplier::None => 1.0,
            Multiplier::Constant { value } => value,
            Multiplier::Power { coeff, exponent } => 1.0 + coeff * r.powf(exponent),
        }
    }

    /// `sup_{0 < r ≤ rho} |m(r) − 1|`, the modulus of the `(1 + o(1))` factor.
    pub fn modulus(&self, rho: f64) -> f64 {
        match *self {
            Multiplier::None => 0.0,
            Multiplier::Constant { value } => (value - 1.0).abs(),
            Multiplier::Power { coeff, exponent } => coeff.abs() * rho.powf(exponent),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Multiplier::None => Ok(()),
            Multiplier::Constant { value } => check_positive("multiplier.value", value),
            Multiplier::Power { coeff, exponent } => {
                if !(coeff >= 0.0 && coeff.is_finite()) {
                    return Err(Error::param("multiplier.coeff", "must be finite and non-negative"));
                }
                check_positive("multiplier.exponent", exponent)
            }
        }
    }
}

/// Measure description as stored in domain files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<ComplexPoint>,
    #[serde(default)]
    pub multiplier: Multiplier,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_cap: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureSample {
    pub point: ComplexPoint,
    pub weight: f64,
}

/// `m(r)·r^{2b−2}` on the domain, where `r = |z − center|`; beyond `ρ₀` the
/// density is optionally scaled down so that the mass outside `B_{ρ₀}` does
/// not exceed `outer_cap`.
#[derive(Clone, Debug)]
pub struct RadialPowerMeasure<D> {
    b: f64,
    center: ComplexPoint,
    multiplier: Multiplier,
    outer_cap: Option<f64>,
    outer_scale: f64,
    r_max: f64,
    total: f64,
    reference: f64,
    domain: D,
}

/// Breakpoints of `r ↦ Θ_c(r)`: radii where the circle about `center` passes
/// through a vertex or becomes tangent to a circular arc.
fn radial_breaks(domain: &dyn PlanarDomain, center: ComplexPoint, r_max: f64) -> Vec<f64> {
    let mut breaks = vec![0.0, r_max];
    for arc in domain.boundary().arcs() {
        breaks.push((arc.start() - center).norm());
        breaks.push((arc.end() - center).norm());
        if let BoundaryArc::CircularArc { center: c2, radius, .. } = *arc {
            let d = (c2 - center).norm();
            breaks.push(d + radius);
            breaks.push((d - radius).abs());
        }
    }
    breaks.push(domain.rho0());
    breaks.retain(|&r| r >= 0.0 && r <= r_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * r_max);
    breaks
}

impl<D: PlanarDomain> RadialPowerMeasure<D> {
    /// Plain density `|z − corner|^{2b−2}` on `domain`.
    pub fn new(domain: D, b: f64) -> Result<Self> {
        let center = domain.corner();
        Self::build(domain, b, center, Multiplier::None, None)
    }

    pub fn from_spec(domain: D, spec: &MeasureSpec) -> Result<Self> {
        let center = spec.center.unwrap_or_else(|| domain.corner());
        Self::build(domain, spec.b, center, spec.multiplier, spec.outer_cap)
    }

    pub fn build(
        domain: D,
        b: f64,
        center: ComplexPoint,
        multiplier: Multiplier,
        outer_cap: Option<f64>,
    ) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param(
                "b",
                format!("{b} is not positive; the radial power measure diverges at the center"),
            ));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::param("center", "must be finite"));
        }
        multiplier.validate()?;
        if let Some(cap) = outer_cap {
            if !(cap >= 0.0 && cap.is_finite()) {
                return Err(Error::param("outer_cap", "must be finite and non-negative"));
            }
        }
        let r_max = domain
            .boundary()
            .arcs()
            .iter()
            .map(|a| a.max_distance_from(center))
            .fold(0.0, f64::max);
        let mut mu = Self {
            b,
            center,
            multiplier,
            outer_cap,
            outer_scale: 1.0,
            r_max,
            total: 0.0,
            reference: 0.0,
            domain,
        };
        if let Some(cap) = outer_cap {
            let rho0 = mu.domain.rho0();
            let outside = mu.radial_integral(rho0, r_max, b, true)?;
            if outside > cap {
                mu.outer_scale = cap / outside;
            }
        }
        mu.total = mu.radial_integral(0.0, r_max, b, true)?;
        mu.reference = mu.radial_integral(0.0, r_max, b, false)?;
        Ok(mu)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn center(&self) -> ComplexPoint {
        self.center
    }

    pub fn multiplier(&self) -> Multiplier {
        self.multiplier
    }

    pub fn domain(&self) -> &D {
        &self.domain
    }

    pub fn spec(&self) -> MeasureSpec {
        MeasureSpec {
            b: self.b,
            center: Some(self.center),
            multiplier: self.multiplier,
            outer_cap: self.outer_cap,
        }
    }

    /// Largest distance from the center to the domain.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// `∫ dμ`.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// Mass of the plain density `r^{2b−2}` on the domain (no multiplier, no cap).
    pub fn reference_mass(&self) -> f64 {
        self.reference
    }

    fn factor(&self, r: f64) -> f64 {
        let cap = if r > self.domain.rho0() { self.outer_scale } else { 1.0 };
        self.multiplier.eval(r) * cap
    }

    /// Density with respect to area measure at `z` (zero outside the domain).
    pub fn density(&self, z: ComplexPoint) -> f64 {
        if !self.domain.contains(z) {
            return 0.0;
        }
        let r = (z - self.center).norm();
        self.factor(r) * r.powf(2.0 * self.b - 2.0)
    }

    /// Angle of the circle `|z − center| = r` inside the domain.
    pub fn angular_measure(&self, r: f64) -> Result<f64> {
        if self.center == self.domain.corner() {
            self.domain.angular_measure(r)
        } else {
            Ok(self
                .domain
                .boundary()
                .angular_intervals(self.center, r)?
                .iter()
                .map(|(lo, hi)| hi - lo)
                .sum())
        }
    }

    /// `∫_{r1}^{r2} w(r)·r^{2e−1}·Θ_c(r) dr` with `w` the multiplier and cap
    /// (or 1), computed in the variable `u = r^{2e}`.
    fn radial_integral(&self, r1: f64, r2: f64, e: f64, weighted: bool) -> Result<f64> {
        self.radial_integral_with(r1, r2, e, weighted, &mut |r| self.angular_measure(r))
    }

    fn radial_integral_with(
        &self,
        r1: f64,
        r2: f64,
        e: f64,
        weighted: bool,
        theta: &mut dyn FnMut(f64) -> Result<f64>,
    ) -> Result<f64> {
        if r2 <= r1 {
            return Ok(0.0);
        }
        let two_e = 2.0 * e;
        let mut breaks: Vec<f64> = radial_breaks(&self.domain, self.center, self.r_max)
            .into_iter()
            .filter(|&r| r > r1 && r < r2)
            .collect();
        breaks.insert(0, r1);
        breaks.push(r2);
        let ub: Vec<f64> = breaks.iter().map(|r| r.powf(two_e)).collect();
        let mut failure = None;
        let mut f = |u: f64| {
            let r = u.powf(1.0 / two_e);
            let w = if weighted { self.factor(r) } else { 1.0 };
            match theta(r) {
                Ok(t) => w * t,
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            }
        };
        let scale = r2.powf(two_e) * TAU;
        let q = quadrature::integrate_with_breaks(&mut f, &ub, 1e-15 * scale, 1e-12)?;
        if let Some(err) = failure {
            return Err(err);
        }
        Ok(q.value / two_e)
    }

    /// Mass of `{z ∈ Ω : r1 < |z − center| < r2}`.
    pub fn annulus_mass(&self, r1: f64, r2: f64) -> Result<f64> {
        self.radial_integral(r1.max(0.0), r2.min(self.r_max), self.b, true)
    }

    /// `n` i.i.d. draws from the normalized measure; weights have mean
    /// `total_mass / reference_mass`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<MeasureSample>> {
        self.sample_with_proposal(n, seed, self.b)
    }

    /// Draws from the proposal `r^{2b'−2}` on the domain with importance
    /// weights for the target; `b' < b` oversamples the neighbourhood of the
    /// center. Weights have mean `total_mass / reference_mass`.
    pub fn sample_with_proposal(&self, n: usize, seed: u64, proposal_b: f64) -> Result<Vec<MeasureSample>> {
        check_positive("proposal_b", proposal_b)?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let sector = self
            .domain
            .sector_shape()
            .filter(|s| s.corner == self.center);
        let proposal_mass = match sector {
            Some(s) => PI * s.alpha * s.radius.powf(2.0 * proposal_b) / (2.0 * proposal_b),
            None if proposal_b == self.b => self.reference,
            None => self.radial_integral(0.0, self.r_max, proposal_b, false)?,
        };
        let weight_scale = proposal_mass / self.reference;
        let exponent = 2.0 * (self.b - proposal_b);
        let inv = 1.0 / (2.0 * proposal_b);

        let chunks = parallel::map_chunks(n, |k, range| -> Result<Vec<MeasureSample>> {
            let mut rng = parallel::stream_rng(seed, k, Stream::Sampling);
            let mut out = Vec::with_capacity(range.len());
            let mut attempts: u64 = 0;
            for _ in range {
                let point = match sector {
                    Some(s) => {
                        let u: f64 = 1.0 - rng.random::<f64>();
                        let r = s.radius * u.powf(inv);
                        let theta = s.phi + PI * s.alpha * rng.random::<f64>();
                        s.corner + ComplexPoint::from_polar(r, theta)
                    }
                    None => loop {
                        attempts += 1;
                        let u: f64 = 1.0 - rng.random::<f64>();
                        let r = self.r_max * u.powf(inv);
                        let theta = TAU * rng.random::<f64>();
                        let z = self.center + ComplexPoint::from_polar(r, theta);
                        if self.domain.contains(z) {
                            break z;
                        }
                        if attempts >= 10_000 && (out.len() as u64 + 1) * 1000 < attempts {
                            return Err(Error::Sampling(format!(
                                "rejection efficiency {:.2e} is below 1e-3 ({} accepted of {attempts} proposals); \
                                 the domain occupies too little of the disk of radius {} about the center",
                                out.len() as f64 / attempts as f64,
                                out.len(),
                                self.r_max
                            )));
                        }
                    },
                };
                let r = (point - self.center).norm();
                let weight = if exponent == 0.0 {
                    self.factor(r) * weight_scale
                } else {
                    self.factor(r) * r.powf(exponent) * weight_scale
                };
                out.push(MeasureSample { point, weight });
            }
            Ok(out)
        });
        let mut samples = Vec::with_capacity(n);
        for chunk in chunks {
            samples.extend(chunk?);
        }
        Ok(samples)
    }

    /// Checks `|μ(A) − ∫_A r^{2b−2}| ≤ ε·∫_A r^{2b−2}` over a catalog of
    /// annular sectors `A`: dyadic annuli `[ρ/2^{k+1}, ρ/2^k]`, `k < trials`,
    /// each intersected with the full angular range and with its quarters.
    pub fn verify_one_plus_o1(&self, epsilon: f64, rho: f64, trials: usize) -> Result<bool> {
        check_positive("epsilon", epsilon)?;
        if !(rho > 0.0 && rho <= self.domain.rho0()) {
            return Err(Error::OutOfRange(format!(
                "rho = {rho} must lie in (0, rho0 = {}]",
                self.domain.rho0()
            )));
        }
        for k in 0..trials.max(1) {
            let hi = rho / 2f64.powi(k as i32);
            let lo = 0.5 * hi;
            for fraction in [1.0, 0.25] {
                let mut theta = |r: f64| self.angular_measure(r).map(|t| fraction * t);
                let actual = self.radial_integral_with(lo, hi, self.b, true, &mut theta)?;
                let reference = self.radial_integral_with(lo, hi, self.b, false, &mut theta)?;
                if (actual - reference).abs() > epsilon * reference {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CornerDomain;

    #[test]
    fn sector_total_mass_closed_form() {
        for &(alpha, a, b) in &[(0.5, 1.0, 0.25), (1.0, 2.0, 1.0), (2.0, 0.7, 0.5), (1.5, 1.3, 2.0)] {
            let mu = RadialPowerMeasure::new(CornerDomain::sector(alpha, a, 0.5 * a).unwrap(), b).unwrap();
            let exact = PI * alpha * a.powf(2.0 * b) / (2.0 * b);
            assert!((mu.total_mass() / exact - 1.0).abs() < 1e-10, "{alpha} {a} {b}");
        }
    }

    #[test]
    fn disk_about_its_center() {
        let disk = CornerDomain::disk(ComplexPoint::new(0.0, 0.0), 1.0).unwrap();
        let mu = RadialPowerMeasure::build(disk, 1.0, ComplexPoint::new(0.0, 0.0), Multiplier::None, None).unwrap();
        assert!((mu.total_mass() - PI).abs() < 1e-10);
    }

    #[test]
    fn disk_about_its_boundary_point() {
        // ∫_disk |z − 1|^0 = π again, but Θ(r) is now 2·acos(r/2)
        let disk = CornerDomain::disk(ComplexPoint::new(0.0, 0.0), 1.0).unwrap();
        let mu = RadialPowerMeasure::new(disk, 1.0).unwrap();
        assert!((mu.total_mass() - PI).abs() < 1e-9, "{}", mu.total_mass());
    }

    #[test]
    fn nonpositive_b_is_rejected() {
        let s = CornerDomain::sector(1.0, 1.0, 0.5).unwrap();
        assert!(RadialPowerMeasure::new(&s, 0.0).is_err());
        assert!(RadialPowerMeasure::new(&s, -1.0).is_err());
    }

    #[test]
    fn multiplier_catalog_modulus() {
        let s = CornerDomain::sector(1.0, 1.0, 0.5).unwrap();
        let plain = RadialPowerMeasure::new(&s, 0.5).unwrap();
        assert!(plain.verify_one_plus_o1(1e-6, 0.5, 6).unwrap());
        let power = Multiplier::Power { coeff: 1.0, exponent: 0.5 };
        let mu = RadialPowerMeasure::build(&s, 0.5, s.corner(), power, None).unwrap();
        assert!(mu.verify_one_plus_o1(0.1, 1e-4, 8).unwrap());
        assert!(!mu.verify_one_plus_o1(0.1, 0.5, 2).unwrap());
        let doubled = RadialPowerMeasure::build(&s, 0.5, s.corner(), Multiplier::Constant { value: 2.0 }, None).unwrap();
        assert!(!doubled.verify_one_plus_o1(0.5, 0.5, 4).unwrap());
        assert!((power.modulus(1e-4) - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn outer_cap_limits_mass_beyond_rho0() {
        let s = CornerDomain::sector(1.0, 1.0, 0.5).unwrap();
        let mu = RadialPowerMeasure::build(&s, 1.0, s.corner(), Multiplier::None, Some(0.1)).unwrap();
        let inner = PI * 0.25 / 2.0;
        assert!((mu.total_mass() - (inner + 0.1)).abs() < 1e-10);
    }

    #[test]
    fn empty_sample() {
        let s = CornerDomain::sector(1.0, 1.0, 0.5).unwrap();
        let mu = RadialPowerMeasure::new(&s, 1.0).unwrap();
        assert!(mu.sample(0, 1).unwrap().is_empty());
    }
}
