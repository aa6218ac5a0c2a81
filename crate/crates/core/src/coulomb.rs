//! Radial Coulomb-gas equilibrium for `Q(z) = |z|^{2b}` and its hard-wall
//! modification: the part of `μ₀` inside the wall is swept onto the wall
//! boundary.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::analysis::{fit_rate, Regime, RateFit};
use crate::balayage::{BalayageRun, EmpiricalBoundaryMeasure};
use crate::error::{check_positive, Error, Result};
use crate::geometry::{ComplexPoint, CornerDomain, PlanarDomain};
use crate::harmonic_mc::{McConfig, SplitLevels};
use crate::measures::{Multiplier, RadialPowerMeasure};
use crate::parallel::{stream_rng, Stream};

/// Radius `b^{−1/(2b)}` of the support of the equilibrium measure.
pub fn support_radius(b: f64) -> f64 {
    b.powf(-1.0 / (2.0 * b))
}

/// `(b²/π)|z|^{2b−2}` on `|z| ≤ b^{−1/(2b)}`, zero outside; `+∞` at the
/// origin when `b < 1`.
pub fn equilibrium_density(b: f64, z: ComplexPoint) -> Result<f64> {
    check_positive("b", b)?;
    let r = z.norm();
    if r > support_radius(b) {
        return Ok(0.0);
    }
    if r == 0.0 {
        return Ok(match b {
            b if b < 1.0 => f64::INFINITY,
            1.0 => 1.0 / PI,
            _ => 0.0,
        });
    }
    Ok(b * b / PI * r.powf(2.0 * b - 2.0))
}

/// Equilibrium problem for `Q₀(z) = |z|^{2b}` with `Q = +∞` on the wall `Ω`.
#[derive(Clone, Debug)]
pub struct HardWallProblem {
    pub b: f64,
    pub wall: CornerDomain,
    pub s0_radius: f64,
}

impl HardWallProblem {
    pub fn new(b: f64, wall: CornerDomain) -> Result<Self> {
        check_positive("b", b)?;
        let s0_radius = support_radius(b);
        let reach = wall
            .boundary()
            .arcs()
            .iter()
            .map(|a| a.max_distance_from(ComplexPoint::new(0.0, 0.0)))
            .fold(0.0, f64::max);
        if reach >= s0_radius {
            return Err(Error::param(
                "wall",
                format!("wall reaches |z| = {reach}, outside the support radius {s0_radius}"),
            ));
        }
        Ok(Self { b, wall, s0_radius })
    }

    /// Sector wall of opening `πα` and radius `a` with its corner at the origin.
    pub fn sector_wall(b: f64, alpha: f64, a: f64) -> Result<Self> {
        let wall = CornerDomain::sector(alpha, a, a / 2.0)?;
        Self::new(b, wall)
    }

    /// `μ₀|_Ω`.
    pub fn wall_measure(&self) -> Result<RadialPowerMeasure<&CornerDomain>> {
        let coeff = self.b * self.b / PI;
        RadialPowerMeasure::build(
            &self.wall,
            self.b,
            ComplexPoint::new(0.0, 0.0),
            Multiplier::Constant { value: coeff },
            None,
        )
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.wall.alpha(), self.b)
    }

    /// Density exponent `min(2b, 1/α) − 1` of the wall profile at the corner.
    pub fn edge_exponent(&self) -> f64 {
        (2.0 * self.b).min(1.0 / self.wall.alpha()) - 1.0
    }

    /// Size of the wall as seen from the corner.
    fn wall_scale(&self) -> f64 {
        self.wall
            .sector_shape()
            .map(|s| s.radius)
            .unwrap_or_else(|| self.wall.rho0())
    }

    /// Distance window `[x_lo, x_hi]` for the edge-rate fit: `x_hi` is where
    /// the leading correction drops to about 10%, and the window spans 1.75
    /// decades.
    pub fn default_edge_window(&self) -> (f64, f64) {
        let alpha = self.wall.alpha();
        let gap = match self.regime() {
            Regime::Log => 1.0,
            _ => (2.0 * self.b - 1.0 / alpha).abs().min(2.0 / alpha),
        };
        let x_hi = 0.1f64.powf(1.0 / gap).min(0.3) * self.wall_scale();
        (x_hi * 10f64.powf(-1.75), x_hi)
    }

    /// Importance-sampling exponent for `μ₀|_Ω`: in the sub and log regimes
    /// the near-corner mass comes from near-corner samples.
    fn proposal(&self) -> Option<f64> {
        (self.regime() != Regime::Super && self.b > 0.25).then_some(0.25)
    }

    /// Splitting toward the corner in the super regime, where near-corner
    /// mass arrives from distant samples.
    fn splitting(&self) -> Option<SplitLevels> {
        if self.regime() != Regime::Super {
            return None;
        }
        let (x_lo, _) = self.default_edge_window();
        let ratio = 2f64.powf(-self.wall.alpha());
        SplitLevels::geometric(self.wall.corner(), 0.5 * self.wall_scale(), x_lo, ratio, 2).ok()
    }

    /// Swept cloud of `μ₀|_Ω` on `∂Ω`.
    pub fn sweep(&self, cfg: &McConfig) -> Result<EmpiricalBoundaryMeasure> {
        let mu = self.wall_measure()?;
        let mut run = BalayageRun::new(&mu, *cfg, Vec::new())?;
        if let Some(b) = self.proposal() {
            run = run.with_proposal(b)?;
        }
        if let Some(levels) = self.splitting() {
            run = run.with_splitting(levels);
        }
        run.empirical_balayage()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallProfile {
    /// Bin centers in arclength along `∂Ω`, starting at the first arc.
    pub s: Vec<f64>,
    pub bin_width: f64,
    /// `dν/|dz|` per bin.
    pub density: Vec<f64>,
    pub std_error: Vec<f64>,
    /// `density / ν(∂Ω)`.
    pub normalized: Vec<f64>,
    /// `μ₀(Ω)` by quadrature; equal to `ν(∂Ω)`.
    pub total: f64,
    pub boundary_length: f64,
    pub aborted: usize,
}

fn check_bins(bins: usize) -> Result<()> {
    if bins == 0 {
        return Err(Error::param("bins", "at least one bin is required"));
    }
    Ok(())
}

/// Equal-arclength profile of the swept measure on `∂Ω`.
pub fn wall_profile(problem: &HardWallProblem, cfg: &McConfig, bins: usize) -> Result<WallProfile> {
    check_bins(bins)?;
    let cloud = problem.sweep(cfg)?;
    Ok(profile_from_cloud(problem, &cloud, bins))
}

pub fn profile_from_cloud(problem: &HardWallProblem, cloud: &EmpiricalBoundaryMeasure, bins: usize) -> WallProfile {
    let boundary = problem.wall.boundary();
    let offsets: Vec<f64> = (0..boundary.curves().len())
        .scan(0.0, |acc, c| {
            let o = *acc;
            *acc += boundary.curve_length(c);
            Some(o)
        })
        .collect();
    let length: f64 = (0..boundary.curves().len()).map(|c| boundary.curve_length(c)).sum();
    let width = length / bins as f64;
    let position = |p: &crate::balayage::CloudPoint| {
        let (curve, s) = boundary.arclength_position(p.arc, p.t);
        offsets[curve] + s
    };
    let mut density = Vec::with_capacity(bins);
    let mut std_error = Vec::with_capacity(bins);
    for k in 0..bins {
        let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
        let last = k + 1 == bins;
        let m = cloud.mass_where(hi, |p| {
            let s = position(p);
            s >= lo && (s < hi || last)
        });
        density.push(m.mass / width);
        std_error.push(m.std_error / width);
    }
    let total = cloud.total;
    WallProfile {
        s: (0..bins).map(|k| (k as f64 + 0.5) * width).collect(),
        bin_width: width,
        normalized: density.iter().map(|d| if total > 0.0 { d / total } else { 0.0 }).collect(),
        density,
        std_error,
        total,
        boundary_length: length,
        aborted: cloud.aborted,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRateReport {
    pub fit: RateFit,
    pub expected: f64,
    pub window: (f64, f64),
    /// Geometric bins that received no mass (dropped from the fit).
    pub empty_bins: usize,
    pub pass: bool,
}

/// Tolerance on the fitted edge exponent.
pub const EDGE_RATE_TOLERANCE: f64 = 0.07;

/// Fits `dν/|dz| ≍ x^e` in geometric distance bins about the corner; both
/// sides of the corner are pooled, so the density is mass over twice the bin
/// width.
pub fn edge_rate_check(problem: &HardWallProblem, cfg: &McConfig) -> Result<EdgeRateReport> {
    let cloud = problem.sweep(cfg)?;
    edge_rate_from_cloud(problem, &cloud, problem.default_edge_window(), 8)
}

pub fn edge_rate_from_cloud(
    problem: &HardWallProblem,
    cloud: &EmpiricalBoundaryMeasure,
    window: (f64, f64),
    bins: usize,
) -> Result<EdgeRateReport> {
    check_bins(bins)?;
    let (x_lo, x_hi) = window;
    if !(x_lo > 0.0 && x_hi > x_lo) {
        return Err(Error::param("window", "need 0 < x_lo < x_hi"));
    }
    let corner = problem.wall.corner();
    let scale = problem.wall_scale();
    let ratio = (x_hi / x_lo).powf(1.0 / bins as f64);
    let mut curve = Vec::new();
    let mut empty_bins = 0;
    for k in 0..bins {
        let lo = x_lo * ratio.powi(k as i32);
        let hi = lo * ratio;
        let m = cloud.mass_where(hi, |p| {
            let d = (p.exit - corner).norm();
            d >= lo && d < hi
        });
        if m.mass > 0.0 {
            let w = 2.0 * (hi - lo);
            curve.push(crate::analysis::CurvePoint {
                r: (lo * hi).sqrt() / scale,
                mass: m.mass / w,
                std_error: m.std_error / w,
            });
        } else {
            empty_bins += 1;
        }
    }
    let fit = fit_rate(&curve, problem.regime() == Regime::Log).map_err(|e| {
        Error::InsufficientData(format!("insufficient near-corner statistics: {e}"))
    })?;
    let expected = problem.edge_exponent();
    Ok(EdgeRateReport {
        pass: (fit.exponent - expected).abs() <= EDGE_RATE_TOLERANCE,
        fit,
        expected,
        window,
        empty_bins,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasConfig {
    pub n: usize,
    pub beta: f64,
    /// Sweeps of `n` single-point proposals after burn-in.
    pub steps: usize,
    pub burn_in: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasRun {
    pub points: Vec<ComplexPoint>,
    pub acceptance: f64,
    pub step_size: f64,
    /// Mean `|z|²` after each post-burn-in sweep.
    pub mean_r2: Vec<f64>,
    /// Configurations recorded every `snapshot_every` sweeps after burn-in.
    pub snapshots: Vec<Vec<ComplexPoint>>,
}

/// Largest configuration the sampler accepts.
pub const MAX_GAS_POINTS: usize = 512;

/// Metropolis chain for `∏|z_j − z_k|^β exp(−(βn/2) Σ Q(z_j))` with
/// `Q = +∞` inside the wall. Single-point Gaussian proposals; the proposal
/// scale is tuned toward 30% acceptance during burn-in and then frozen.
pub fn gas_sampler(
    b: f64,
    wall: Option<&CornerDomain>,
    cfg: &GasConfig,
    snapshot_every: usize,
) -> Result<GasRun> {
    check_positive("b", b)?;
    check_positive("beta", cfg.beta)?;
    if cfg.n == 0 || cfg.n > MAX_GAS_POINTS {
        return Err(Error::param("n", format!("must lie in 1..={MAX_GAS_POINTS}")));
    }
    if let Some(w) = wall {
        HardWallProblem::new(b, w.clone())?;
    }
    let n = cfg.n;
    let nf = n as f64;
    let q = |z: ComplexPoint| z.norm().powf(2.0 * b);
    let blocked = |z: ComplexPoint| wall.is_some_and(|w| w.contains(z));
    let mut rng = stream_rng(cfg.seed, 0, Stream::Auxiliary);
    let s0 = support_radius(b);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let z = ComplexPoint::new(rng.random_range(-s0..s0), rng.random_range(-s0..s0));
        if z.norm() < s0 && !blocked(z) {
            points.push(z);
        }
    }
    let mut step = s0 / nf.sqrt();
    let mut accepted = 0usize;
    let mut proposed = 0usize;
    let mut mean_r2 = Vec::with_capacity(cfg.steps);
    let mut snapshots = Vec::new();
    for sweep in 0..cfg.burn_in + cfg.steps {
        let mut sweep_accepted = 0usize;
        for i in 0..n {
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            let old = points[i];
            let new = old + step * ComplexPoint::new(dx, dy);
            if blocked(new) {
                continue;
            }
            let mut delta = 0.5 * cfg.beta * nf * (q(new) - q(old));
            for (k, &z) in points.iter().enumerate() {
                if k != i {
                    delta -= cfg.beta * ((new - z).norm() / (old - z).norm()).ln();
                }
            }
            if delta <= 0.0 || rng.random::<f64>() < (-delta).exp() {
                points[i] = new;
                sweep_accepted += 1;
            }
        }
        let rate = sweep_accepted as f64 / nf;
        if sweep < cfg.burn_in {
            step *= (1.0 + rate - 0.3).clamp(0.5, 1.5);
        } else {
            accepted += sweep_accepted;
            proposed += n;
            mean_r2.push(points.iter().map(|z| z.norm_sqr()).sum::<f64>() / nf);
            if snapshot_every > 0 && (sweep - cfg.burn_in + 1).is_multiple_of(snapshot_every) {
                snapshots.push(points.clone());
            }
        }
    }
    let acceptance = if proposed > 0 { accepted as f64 / proposed as f64 } else { 0.0 };
    if proposed > 0 && acceptance < 0.05 {
        log::warn!("gas sampler acceptance {acceptance:.3} is below 0.05; the step size is mistuned");
    }
    Ok(GasRun {
        points,
        acceptance,
        step_size: step,
        mean_r2,
        snapshots,
    })
}

/// Kolmogorov–Smirnov distance between the radii of `points` and a radial CDF.
pub fn radial_ks(points: &[ComplexPoint], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut r: Vec<f64> = points.iter().map(|z| z.norm()).collect();
    r.sort_by(f64::total_cmp);
    let n = r.len() as f64;
    r.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}
