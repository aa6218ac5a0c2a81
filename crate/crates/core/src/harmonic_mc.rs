//! Harmonic measure by walk-on-spheres, closed-form references, and the
//! extremal-length upper bounds near a corner.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{check_positive, Error, Result};
use crate::geometry::{ComplexPoint, CornerDomain, PlanarDomain};
use crate::parallel::{self, Stream};
use crate::quadrature;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_walks: usize,
    /// Absolute absorption distance.
    pub eps_shell: f64,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_walks: 100_000,
            eps_shell: 1e-7,
            max_steps: 100_000,
            seed: 0,
        }
    }
}

impl McConfig {
    pub fn new(n_walks: usize, seed: u64) -> Self {
        Self {
            n_walks,
            seed,
            ..Self::default()
        }
    }

    pub fn with_eps(mut self, eps_shell: f64) -> Self {
        self.eps_shell = eps_shell;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_walks == 0 {
            return Err(Error::param("n_walks", "must be at least 1"));
        }
        check_positive("eps_shell", self.eps_shell)?;
        if self.max_steps == 0 {
            return Err(Error::param("max_steps", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Completed walks.
    pub n: usize,
    pub aborted: usize,
}

impl McEstimate {
    pub fn from_bernoulli(hits: usize, n: usize, aborted: usize) -> Self {
        if n == 0 {
            return Self { mean: 0.0, std_error: 0.0, n, aborted };
        }
        let p = hits as f64 / n as f64;
        Self {
            mean: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            n,
            aborted,
        }
    }

    /// `|self − other| ≤ k·sqrt(σ₁² + σ₂²)`.
    pub fn agrees_with(&self, other: &McEstimate, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.std_error.hypot(other.std_error)
    }

    /// `|self − value| ≤ k·σ`, with a floor for estimates whose σ vanishes.
    pub fn agrees_with_value(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error + 1e-12
    }
}

/// The boundary set `∂Ω ∩ B_radius(center)`, optionally restricted to the
/// boundary of one component of a multi-corner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWindow {
    pub center: ComplexPoint,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
}

impl BoundaryWindow {
    pub fn new(center: ComplexPoint, radius: f64) -> Self {
        Self { center, radius, component: None }
    }

    pub fn with_component(mut self, j: usize) -> Self {
        self.component = Some(j);
        self
    }

    /// Window cutting the arc of the circle `|z − c| = ρ` centred at angle
    /// `mid` with angular length `len` (`len < 2π`).
    pub fn circle_arc(c: ComplexPoint, rho: f64, mid: f64, len: f64) -> Self {
        Self::new(c + ComplexPoint::from_polar(rho, mid), 2.0 * rho * (len / 4.0).sin())
    }

    pub fn hit<D: PlanarDomain + ?Sized>(&self, domain: &D, exit: ComplexPoint) -> bool {
        (exit - self.center).norm() <= self.radius
            && self.component.is_none_or(|j| domain.component_of(exit) == Some(j))
    }
}

/// Where a walk was absorbed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exit {
    /// Nearest boundary point at absorption.
    pub point: ComplexPoint,
    pub arc: usize,
    /// Traversal parameter of `point` on its arc.
    pub t: f64,
    pub steps: u32,
}

/// One walk-on-spheres path from `z`; `None` if it exceeds `max_steps`.
pub fn walk<D: PlanarDomain + ?Sized, R: Rng>(
    domain: &D,
    mut z: ComplexPoint,
    eps_shell: f64,
    max_steps: usize,
    rng: &mut R,
) -> Option<Exit> {
    for step in 0..=max_steps {
        let c = domain.closest(z);
        if c.distance <= eps_shell {
            return Some(Exit {
                point: c.point,
                arc: c.arc,
                t: c.t,
                steps: step as u32,
            });
        }
        if step == max_steps {
            break;
        }
        let theta = TAU * rng.random::<f64>();
        z += ComplexPoint::from_polar(c.distance, theta);
    }
    None
}

/// Runs walk `i` from `start(i)` for `i < n`, with walk randomness drawn from
/// the chunk streams of `seed`.
pub fn run_walks<D, S>(domain: &D, n: usize, start: S, cfg: &McConfig) -> Vec<Option<Exit>>
where
    D: PlanarDomain + ?Sized,
    S: Fn(usize) -> ComplexPoint + Sync,
{
    parallel::collect_chunks(n, |k, range| {
        let mut rng = parallel::stream_rng(cfg.seed, k, Stream::Walk);
        range
            .map(|i| walk(domain, start(i), cfg.eps_shell, cfg.max_steps, &mut rng))
            .collect()
    })
}

/// Nested circles about `center` for splitting walks that approach it: a
/// walker entering `B_{radii[k]}` for the first time is replaced by `factor`
/// copies carrying `1/factor` of its weight each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitLevels {
    pub center: ComplexPoint,
    /// Strictly decreasing.
    pub radii: Vec<f64>,
    pub factor: usize,
}

impl SplitLevels {
    /// Levels from `r_top` down to `r_bottom` with ratio `ratio < 1`.
    pub fn geometric(center: ComplexPoint, r_top: f64, r_bottom: f64, ratio: f64, factor: usize) -> Result<Self> {
        check_positive("r_bottom", r_bottom)?;
        if !(r_top > r_bottom && ratio > 0.0 && ratio < 1.0 && factor >= 2) {
            return Err(Error::param(
                "split levels",
                "need r_top > r_bottom > 0, ratio in (0, 1) and factor ≥ 2",
            ));
        }
        let mut radii = vec![r_top];
        while *radii.last().unwrap() * ratio >= r_bottom * ratio.sqrt() {
            radii.push(radii.last().unwrap() * ratio);
        }
        Ok(Self { center, radii, factor })
    }

    fn level(&self, z: ComplexPoint) -> usize {
        let d = (z - self.center).norm();
        self.radii.partition_point(|&r| d < r)
    }
}

/// Walk from `z` with splitting; returns every copy's exit with its weight
/// (weights sum to 1 over completed copies) and the number of aborted copies.
pub fn walk_split<D: PlanarDomain + ?Sized, R: Rng>(
    domain: &D,
    z: ComplexPoint,
    cfg: &McConfig,
    levels: &SplitLevels,
    rng: &mut R,
) -> (Vec<(Exit, f64)>, usize) {
    const MAX_COPIES: usize = 1 << 16;
    let mut out = Vec::new();
    let mut aborted = 0;
    let mut stack = vec![(z, 1.0, levels.level(z), 0usize)];
    let mut spawned = 1;
    while let Some((mut z, mut w, mut deepest, mut steps)) = stack.pop() {
        loop {
            let c = domain.closest(z);
            if c.distance <= cfg.eps_shell {
                let exit = Exit { point: c.point, arc: c.arc, t: c.t, steps: steps as u32 };
                out.push((exit, w));
                break;
            }
            if steps == cfg.max_steps {
                aborted += 1;
                break;
            }
            steps += 1;
            z += ComplexPoint::from_polar(c.distance, TAU * rng.random::<f64>());
            let level = levels.level(z);
            if level > deepest && spawned < MAX_COPIES {
                let copies = levels.factor.pow((level - deepest) as u32).min(MAX_COPIES - spawned + 1);
                w /= copies as f64;
                deepest = level;
                for _ in 1..copies {
                    stack.push((z, w, deepest, steps));
                }
                spawned += copies - 1;
            }
        }
    }
    (out, aborted)
}

pub(crate) fn warn_aborted(aborted: usize, n: usize) {
    if n > 0 && aborted as f64 > 1e-4 * n as f64 {
        log::warn!("{aborted} of {n} walks exceeded the step limit and were dropped");
    }
}

/// Estimates `ω(z, window_k, Ω)` for every window from one set of walks.
pub fn wos_harmonic_measures<D: PlanarDomain + ?Sized>(
    domain: &D,
    z: ComplexPoint,
    windows: &[BoundaryWindow],
    cfg: &McConfig,
) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    if !domain.contains(z) {
        return Err(Error::OutOfRange(format!("start point {z} is not inside the domain")));
    }
    for w in windows {
        check_positive("window radius", w.radius)?;
    }
    let exits = run_walks(domain, cfg.n_walks, |_| z, cfg);
    let done: Vec<Exit> = exits.iter().flatten().copied().collect();
    let aborted = exits.len() - done.len();
    warn_aborted(aborted, exits.len());
    Ok(windows
        .iter()
        .map(|w| {
            let hits = done.iter().filter(|e| w.hit(domain, e.point)).count();
            McEstimate::from_bernoulli(hits, done.len(), aborted)
        })
        .collect())
}

pub fn wos_harmonic_measure<D: PlanarDomain + ?Sized>(
    domain: &D,
    z: ComplexPoint,
    window: BoundaryWindow,
    cfg: &McConfig,
) -> Result<McEstimate> {
    Ok(wos_harmonic_measures(domain, z, &[window], cfg)?[0])
}

/// Exact harmonic measure of the arc `{c + ρe^{iθ} : θ1 < θ < θ1 + len}` in
/// the disk `|w − c| < ρ`, seen from `z` (Möbius map of `z` to the center).
pub fn disk_arc_measure(c: ComplexPoint, rho: f64, z: ComplexPoint, theta1: f64, len: f64) -> f64 {
    if len >= TAU {
        return 1.0;
    }
    let w = (z - c) / rho;
    let image = |theta: f64| {
        let e = ComplexPoint::from_polar(1.0, theta);
        ((e - w) / (ComplexPoint::new(1.0, 0.0) - w.conj() * e)).arg()
    };
    (image(theta1 + len) - image(theta1)).rem_euclid(TAU) / TAU
}

/// Exact harmonic measure of `[a, b]` in the upper half-plane seen from `z`.
pub fn half_plane_segment_measure(z: ComplexPoint, a: f64, b: f64) -> f64 {
    (((b - z.re) / z.im).atan() - ((a - z.re) / z.im).atan()) / PI
}

/// `(8/π)·exp(−π∫_{r0}^{R0} dr/(rΘ(r)))`, integrating in `log r`.
pub fn extremal_length_bound<F: FnMut(f64) -> f64>(mut theta: F, r0: f64, r_max: f64) -> Result<f64> {
    if !(r0 > 0.0 && r0 < r_max && r_max.is_finite()) {
        return Err(Error::param("r0", format!("need 0 < r0 < R0, got r0 = {r0}, R0 = {r_max}")));
    }
    let q = quadrature::integrate(
        |t: f64| {
            let th = theta(t.exp());
            if th > 0.0 {
                1.0 / th
            } else {
                f64::NAN
            }
        },
        r0.ln(),
        r_max.ln(),
        1e-13,
        1e-12,
    )?;
    Ok(8.0 / PI * (-PI * q.value).exp())
}

/// Upper bound on `ω(z, ∂Ω ∩ B_r(z₀), Ω)` near a corner with
/// `Θ(r) ≤ πα(1 + c1·r^γ)`:
/// `(8/π)(r/m)^{1/α}(1 + c1·m^γ)^{1/(αγ)}` with `m = min(|z − z₀|, ρ₀)`.
pub fn corner_bound(alpha: f64, gamma: f64, c1: f64, r: f64, z_abs: f64, rho0: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("gamma", gamma)?;
    check_positive("rho0", rho0)?;
    if !(c1 >= 0.0 && c1.is_finite()) {
        return Err(Error::param("c1", "must be finite and non-negative"));
    }
    let m = z_abs.min(rho0);
    if !(r > 0.0 && r < m) {
        return Err(Error::param(
            "r",
            format!("need 0 < r < min(|z|, rho0) = {m}, got {r}"),
        ));
    }
    Ok(8.0 / PI * (r / m).powf(1.0 / alpha) * (1.0 + c1 * m.powf(gamma)).powf(1.0 / (alpha * gamma)))
}

/// Harmonic measure of `window` (a subset of the boundary of the unit-radius
/// sector of opening `πα`) from `w`, estimated twice: directly in the sector,
/// and in the upper half-disk from `w^{1/α}` with exits mapped by `q ↦ q^α`.
pub fn power_map_invariance(
    alpha: f64,
    w: ComplexPoint,
    window: BoundaryWindow,
    cfg: &McConfig,
) -> Result<(McEstimate, McEstimate)> {
    let sector = CornerDomain::sector(alpha, 1.0, 0.5)?;
    let half_disk = CornerDomain::sector(1.0, 1.0, 0.5)?;
    let direct = wos_harmonic_measure(&sector, w, window, cfg)?;

    let pull = ComplexPoint::from_polar(w.norm().powf(1.0 / alpha), w.arg().rem_euclid(TAU) / alpha);
    if !half_disk.contains(pull) {
        return Err(Error::OutOfRange(format!("{w} is not inside the sector")));
    }
    let exits = run_walks(&half_disk, cfg.n_walks, |_| pull, cfg);
    let done: Vec<Exit> = exits.iter().flatten().copied().collect();
    let aborted = exits.len() - done.len();
    let hits = done
        .iter()
        .filter(|e| {
            let q = e.point;
            let angle = q.arg().clamp(0.0, PI);
            let image = ComplexPoint::from_polar(q.norm().powf(alpha), alpha * angle);
            window.hit(&sector, image)
        })
        .count();
    Ok((direct, McEstimate::from_bernoulli(hits, done.len(), aborted)))
}

/// Halves `eps_shell` from `eps0` until the estimate moves by less than one
/// combined standard error; returns the accepted shell and its estimate.
pub fn converge_eps_shell<F>(mut estimate: F, eps0: f64, max_halvings: usize) -> Result<(f64, McEstimate)>
where
    F: FnMut(f64) -> Result<McEstimate>,
{
    let mut eps = eps0;
    let mut prev = estimate(eps)?;
    for _ in 0..max_halvings {
        let next = estimate(0.5 * eps)?;
        if next.agrees_with(&prev, 1.0) {
            return Ok((eps, prev));
        }
        eps *= 0.5;
        prev = next;
    }
    Err(Error::InsufficientData(format!(
        "estimate still moving after {max_halvings} halvings of eps_shell (now {eps})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    #[test]
    fn disk_closed_form_matches_poisson_kernel_quadrature() {
        for &(z, t1, len) in &[
            (c(0.0, 0.0), 0.3, 1.0),
            (c(0.5, -0.2), 2.0, 0.7),
            (c(-0.9, 0.1), 3.0, 0.5),
            (c(0.2, 0.6), 5.9, 1.2),
        ] {
            let kernel = |t: f64| {
                let e = ComplexPoint::from_polar(1.0, t);
                (1.0 - z.norm_sqr()) / (TAU * (e - z).norm_sqr())
            };
            let q = quadrature::integrate(kernel, t1, t1 + len, 1e-14, 1e-13).unwrap();
            let exact = disk_arc_measure(c(0.0, 0.0), 1.0, z, t1, len);
            assert!((q.value - exact).abs() < 1e-12, "{z}: {} vs {exact}", q.value);
        }
    }

    #[test]
    fn arc_window_cuts_the_arc() {
        let w = BoundaryWindow::circle_arc(c(0.0, 0.0), 1.0, 1.0, 0.8);
        let inside = ComplexPoint::from_polar(1.0, 1.0 + 0.399);
        let outside = ComplexPoint::from_polar(1.0, 1.0 + 0.401);
        assert!((inside - w.center).norm() <= w.radius);
        assert!((outside - w.center).norm() > w.radius);
    }

    #[test]
    fn extremal_bound_reduces_for_straight_corners() {
        let alpha: f64 = 0.5;
        let v = extremal_length_bound(|_| PI * alpha, 0.01, 1.0).unwrap();
        assert!((v / (8.0 / PI * 1e-4) - 1.0).abs() < 1e-10);
        let v = extremal_length_bound(|_| PI, 0.1, 1.0).unwrap();
        assert!((v / (8.0 / PI * 0.1) - 1.0).abs() < 1e-10);
        let wider = extremal_length_bound(|r: f64| PI * alpha * (1.0 + 0.3 * r.powf(0.5)), 0.01, 1.0).unwrap();
        assert!(wider > 8.0 / PI * 1e-4);
        assert!(extremal_length_bound(|_| PI, 1.0, 0.1).is_err());
    }

    #[test]
    fn corner_bound_examples() {
        let v = corner_bound(1.0, 0.5, 0.0, 0.01, 0.5, 1.0).unwrap();
        assert!((v - 8.0 / PI * 0.02).abs() < 1e-15);
        let v = corner_bound(0.5, 0.5, 0.0, 0.01, 2.0, 1.0).unwrap();
        assert!((v - 8.0 / PI * 1e-4).abs() < 1e-16);
        assert!(corner_bound(0.5, 0.5, 0.0, 0.6, 0.5, 1.0).is_err());
    }

    #[test]
    fn wos_on_disk_center() {
        let disk = CornerDomain::disk(c(0.0, 0.0), 1.0).unwrap();
        let cfg = McConfig::new(20_000, 3);
        let upper = BoundaryWindow::circle_arc(c(0.0, 0.0), 1.0, PI / 2.0, PI - 1e-12);
        let est = wos_harmonic_measure(&disk, c(0.0, 0.0), upper, &cfg).unwrap();
        assert!(est.agrees_with_value(0.5, 4.0), "{est:?}");
        let again = wos_harmonic_measure(&disk, c(0.0, 0.0), upper, &cfg).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn whole_boundary_is_certain() {
        let cfg = McConfig::new(2_000, 5);
        let everything = BoundaryWindow::new(c(0.0, 0.0), 10.0);
        let (a, b) = power_map_invariance(0.5, ComplexPoint::from_polar(0.5, PI / 4.0), everything, &cfg).unwrap();
        assert_eq!(a.mean, 1.0);
        assert_eq!(b.mean, 1.0);
    }

    #[test]
    fn start_outside_is_rejected() {
        let disk = CornerDomain::disk(c(0.0, 0.0), 1.0).unwrap();
        let w = BoundaryWindow::new(c(1.0, 0.0), 0.1);
        assert!(wos_harmonic_measure(&disk, c(2.0, 0.0), w, &McConfig::new(10, 0)).is_err());
    }
}
