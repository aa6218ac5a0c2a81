//! Closed-form envelopes for `ν(∂Ω ∩ B_r(z₀))`, rate fits on window-mass
//! curves, and the multi-corner decoupling harness.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::balayage::WindowMass;
use crate::error::{check_positive, check_range, Error, Result};
use crate::geometry::{ComplexPoint, CornerDomain, MultiCornerDomain, PlanarDomain};
use crate::harmonic_mc::{corner_bound, warn_aborted, McConfig};
use crate::measures::RadialPowerMeasure;
use crate::parallel::{self, Stream};

/// Tolerance on `2bα − 1` for the logarithmic regime.
pub const LOG_REGIME_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `2b < 1/α`: `ν(B_r) ≍ r^{2b}`.
    Sub,
    /// `2b = 1/α`: `ν(B_r) ≍ r^{2b} log(1/r)`.
    Log,
    /// `2b > 1/α`: `ν(B_r) ≍ r^{1/α}`.
    Super,
}

impl Regime {
    pub fn classify(alpha: f64, b: f64) -> Self {
        let t = 2.0 * b * alpha;
        if (t - 1.0).abs() < LOG_REGIME_TOLERANCE {
            Regime::Log
        } else if t < 1.0 {
            Regime::Sub
        } else {
            Regime::Super
        }
    }
}

/// `min(2b, 1/α)`.
pub fn universal_exponent(alpha: f64, b: f64) -> f64 {
    (2.0 * b).min(1.0 / alpha)
}

/// Coefficients of the single-corner envelope; in the log regime they
/// multiply `r^{2b} log(1/r)`, in the super regime they are unknown.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    pub regime: Regime,
    pub alpha: f64,
    pub b: f64,
    pub lower_coeff: Option<f64>,
    pub upper_coeff: Option<f64>,
    pub epsilon: f64,
}

fn sub_lower(alpha: f64, b: f64) -> f64 {
    (PI * alpha * b).tan() / (2.0 * b * b)
}

fn sub_upper(alpha: f64, b: f64) -> f64 {
    PI * alpha / (2.0 * b) * (1.0 + 16.0 * b / (PI * (1.0 / alpha - 2.0 * b)))
}

pub fn envelope(alpha: f64, b: f64, epsilon: f64) -> Result<BoundEnvelope> {
    check_range("alpha", alpha, 0.0, 2.0)?;
    check_positive("b", b)?;
    check_positive("epsilon", epsilon).or_else(|e| if epsilon == 0.0 { Ok(()) } else { Err(e) })?;
    let regime = Regime::classify(alpha, b);
    let (lower, upper) = match regime {
        Regime::Sub => (
            Some((1.0 - epsilon) * sub_lower(alpha, b)),
            Some((1.0 + epsilon) * sub_upper(alpha, b)),
        ),
        Regime::Log => (Some((1.0 - epsilon) * 2.0 / (PI * b)), Some((1.0 + epsilon) * 4.0 / b)),
        Regime::Super => (None, None),
    };
    Ok(BoundEnvelope {
        regime,
        alpha,
        b,
        lower_coeff: lower,
        upper_coeff: upper,
        epsilon,
    })
}

impl BoundEnvelope {
    /// Radial profile multiplying the coefficients.
    pub fn profile(&self, r: f64) -> f64 {
        match self.regime {
            Regime::Sub => r.powf(2.0 * self.b),
            Regime::Log => r.powf(2.0 * self.b) * (1.0 / r).ln(),
            Regime::Super => r.powf(1.0 / self.alpha),
        }
    }

    /// `(lower, upper)` bounds at `r` when the regime has explicit constants.
    pub fn bounds(&self, r: f64) -> Option<(f64, f64)> {
        let p = self.profile(r);
        Some((self.lower_coeff? * p, self.upper_coeff? * p))
    }
}

/// Summed envelope for several wedges meeting at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiCornerEnvelope {
    /// `(α_j, lower_j, upper_j)` with the single-corner sub-regime constants
    /// (`None` where `2b ≥ 1/α_j`).
    pub per_corner: Vec<(f64, Option<f64>, Option<f64>)>,
    pub m_alpha: usize,
    pub combined: BoundEnvelope,
}

impl MultiCornerEnvelope {
    pub fn new(alphas: &[f64], b: f64, epsilon: f64) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::param("alphas", "at least one wedge is required"));
        }
        let alpha = alphas.iter().copied().fold(0.0, f64::max);
        let m_alpha = alphas.iter().filter(|&&a| (a - alpha).abs() <= 1e-12 * alpha).count();
        let mut combined = envelope(alpha, b, epsilon)?;
        let per_corner: Vec<_> = alphas
            .iter()
            .map(|&a| {
                if Regime::classify(a, b) == Regime::Sub {
                    (a, Some(sub_lower(a, b)), Some(sub_upper(a, b)))
                } else {
                    (a, None, None)
                }
            })
            .collect();
        match combined.regime {
            Regime::Sub => {
                let lo: f64 = per_corner.iter().map(|c| c.1.unwrap_or(0.0)).sum();
                let hi: f64 = per_corner.iter().map(|c| c.2.unwrap_or(0.0)).sum();
                combined.lower_coeff = Some((1.0 - epsilon) * lo);
                combined.upper_coeff = Some((1.0 + epsilon) * hi);
            }
            Regime::Log => {
                let m = m_alpha as f64;
                combined.lower_coeff = combined.lower_coeff.map(|c| m * c);
                combined.upper_coeff = combined.upper_coeff.map(|c| m * c);
            }
            Regime::Super => {}
        }
        Ok(Self {
            per_corner,
            m_alpha,
            combined,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub r: f64,
    pub mass: f64,
    pub std_error: f64,
}

impl From<WindowMass> for CurvePoint {
    fn from(w: WindowMass) -> Self {
        Self {
            r: w.r,
            mass: w.mass,
            std_error: w.std_error,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    /// Whether the `r^e log(1/r)` model fitted better than `r^e`.
    pub log_correction: bool,
    pub intercept: f64,
    pub stderr: f64,
    pub r_range: (f64, f64),
    /// Weighted residual sum of squares of the chosen model.
    pub residual: f64,
}

/// Weighted least squares of `y` on `x`; returns `(intercept, slope, slope
/// stderr, weighted RSS)`.
fn wls(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = (0..x.len())
        .map(|i| w[i] * (y[i] - intercept - slope * x[i]).powi(2))
        .sum();
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let stderr = (rss / dof / sxx).sqrt();
    (intercept, slope, stderr, rss)
}

/// Fits `log mass = c + e·log r` (and, if `allow_log`, `log mass =
/// c + e·log r + log log(1/r)`) by weighted least squares with weights
/// `(mass/σ)²`; the model with the smaller weighted residual wins.
pub fn fit_rate(curve: &[CurvePoint], allow_log: bool) -> Result<RateFit> {
    if curve.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "a rate fit needs at least 5 radii, got {}",
            curve.len()
        )));
    }
    if let Some(p) = curve.iter().find(|p| !(p.mass > 0.0 && p.mass.is_finite()) || !(p.r > 0.0)) {
        return Err(Error::InsufficientData(format!(
            "non-positive mass {} at r = {}",
            p.mass, p.r
        )));
    }
    let r_lo = curve.iter().map(|p| p.r).fold(f64::INFINITY, f64::min);
    let r_hi = curve.iter().map(|p| p.r).fold(0.0, f64::max);
    if (r_hi / r_lo).log10() < 1.5 - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "radii span only {:.2} decades; at least 1.5 are required",
            (r_hi / r_lo).log10()
        )));
    }
    let x: Vec<f64> = curve.iter().map(|p| p.r.ln()).collect();
    let y: Vec<f64> = curve.iter().map(|p| p.mass.ln()).collect();
    let w: Vec<f64> = if curve.iter().all(|p| p.std_error > 0.0) {
        curve.iter().map(|p| (p.mass / p.std_error).powi(2)).collect()
    } else {
        vec![1.0; curve.len()]
    };
    let (c, e, se, rss) = wls(&x, &y, &w);
    let mut fit = RateFit {
        exponent: e,
        log_correction: false,
        intercept: c,
        stderr: se,
        r_range: (r_lo, r_hi),
        residual: rss,
    };
    if allow_log && r_hi < 1.0 {
        let y_log: Vec<f64> = curve.iter().map(|p| p.mass.ln() - (1.0 / p.r).ln().ln()).collect();
        let (c2, e2, se2, rss2) = wls(&x, &y_log, &w);
        if rss2 < rss {
            fit = RateFit {
                exponent: e2,
                log_correction: true,
                intercept: c2,
                stderr: se2,
                r_range: (r_lo, r_hi),
                residual: rss2,
            };
        }
    }
    Ok(fit)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub r: f64,
    pub mass: f64,
    pub std_error: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// Whether the row lies in the declared asymptotic window `r ≤ r_max`.
    pub in_window: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub envelope: BoundEnvelope,
    pub r_max: f64,
    pub sigma_slack: f64,
    pub rows: Vec<EnvelopeRow>,
    /// All rows with `r ≤ r_max` pass (and, in the super regime, the fitted
    /// exponent matches `1/α` within 0.05).
    pub pass: bool,
    /// Smallest radius at which a bound fails, over all rows.
    pub first_failure: Option<f64>,
    /// Largest radius up to which every row passes.
    pub valid_up_to: Option<f64>,
    pub exponent_fit: Option<RateFit>,
    pub warning: Option<String>,
}

/// Row-by-row check of `lower·p(r) ≤ mass ≤ upper·p(r)` with `sigma_slack`
/// standard errors of slack.
pub fn check_envelope(curve: &[CurvePoint], env: &BoundEnvelope, r_max: f64, sigma_slack: f64) -> EnvelopeReport {
    let mut rows: Vec<EnvelopeRow> = curve
        .iter()
        .map(|p| {
            let bounds = env.bounds(p.r);
            let slack = sigma_slack * p.std_error;
            let (lower, upper) = match bounds {
                Some((l, u)) => (Some(l), Some(u)),
                None => (None, None),
            };
            EnvelopeRow {
                r: p.r,
                mass: p.mass,
                std_error: p.std_error,
                lower,
                upper,
                lower_ok: lower.is_none_or(|l| p.mass + slack >= l),
                upper_ok: upper.is_none_or(|u| p.mass - slack <= u),
                in_window: p.r <= r_max,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.r.total_cmp(&b.r));
    let ok = |row: &EnvelopeRow| row.lower_ok && row.upper_ok;
    let first_failure = rows.iter().find(|r| !ok(r)).map(|r| r.r);
    let valid_up_to = rows.iter().take_while(|r| ok(r)).last().map(|r| r.r);
    let mut pass = rows.iter().filter(|r| r.in_window).all(ok);
    let mut warning = None;
    let mut exponent_fit = None;
    if rows.iter().all(|r| !r.in_window) {
        warning = Some("no radii inside the asymptotic window; the check is vacuous".to_string());
    } else if env.regime == Regime::Super {
        let window: Vec<CurvePoint> = curve.iter().filter(|p| p.r <= r_max).copied().collect();
        match fit_rate(&window, false) {
            Ok(fit) => {
                pass &= (fit.exponent - 1.0 / env.alpha).abs() <= 0.05;
                exponent_fit = Some(fit);
            }
            Err(e) => warning = Some(format!("super regime: exponent not checked ({e})")),
        }
    }
    EnvelopeReport {
        envelope: *env,
        r_max,
        sigma_slack,
        rows,
        pass,
        first_failure,
        valid_up_to,
        exponent_fit,
        warning,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingRow {
    pub r: f64,
    /// `ν(∂Ω ∩ B_r)`.
    pub nu: f64,
    pub nu_se: f64,
    /// `Σ_j ν_j(∂U_j ∩ B_r)`.
    pub sum_nu_j: f64,
    pub sum_se: f64,
    /// `ν − Σ_j ν_j` (non-negative sample by sample).
    pub residual: f64,
    pub residual_se: f64,
    /// `Σ_k (8/π)(r/ρ₀)^{1/α_k}(1 + C_k ρ₀^{γ_k})^{1/(α_k γ_k)}·μ(Ω)`.
    pub residual_bound: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    pub rows: Vec<DecouplingRow>,
    /// `Σ_j ν_j ≤ ν` at every radius (exact under the coupling).
    pub upper_holds: bool,
    /// `ν − bound ≤ Σ_j ν_j + 3σ` at every radius.
    pub lower_holds: bool,
    pub residual_fit: Option<RateFit>,
    pub expected_residual_exponent: f64,
    pub residual_exponent_ok: Option<bool>,
    pub aborted: usize,
}

/// Walk from `z` in `Ω`, running the walk in `U_j` on the same path while the
/// walker is inside a wedge: steps use the distance to `∂U_j`, which is a
/// valid walk-on-spheres step for both domains. Returns the exit from `Ω` and,
/// if `z` started in some `U_j`, the exit from `U_j`.
fn coupled_walk<R: Rng>(
    domain: &MultiCornerDomain,
    wedges: &[CornerDomain],
    mut z: ComplexPoint,
    cfg: &McConfig,
    rng: &mut R,
) -> Option<(ComplexPoint, Option<ComplexPoint>)> {
    let mut inside = domain.wedge_of(z);
    let mut wedge_exit = None;
    for _ in 0..cfg.max_steps {
        let step = match inside {
            Some(j) => {
                let c = wedges[j].closest(z);
                if c.distance <= cfg.eps_shell {
                    wedge_exit = Some(c.point);
                    inside = None;
                    // arcs 0 and 2 of the wedge sector are sides shared with ∂Ω
                    if c.arc != 1 {
                        let full = domain.closest(z);
                        return Some((full.point, wedge_exit));
                    }
                    continue;
                }
                c.distance
            }
            None => {
                let c = domain.closest(z);
                if c.distance <= cfg.eps_shell {
                    return Some((c.point, wedge_exit));
                }
                c.distance
            }
        };
        z += ComplexPoint::from_polar(step, TAU * rng.random::<f64>());
    }
    None
}

fn weighted_estimate(weights: &[f64], values: &[f64], total: f64) -> (f64, f64) {
    let est: f64 = weights.iter().zip(values).map(|(w, v)| w * v).sum();
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let mean = est / total;
    let var: f64 = weights
        .iter()
        .zip(values)
        .map(|(w, v)| (w * (v - mean)).powi(2))
        .sum();
    (est, var.sqrt())
}

/// Compares `ν(∂Ω ∩ B_r)` with `Σ_j ν_j(∂U_j ∩ B_r)` under common random
/// numbers, and the residual with its explicit bound.
pub fn decoupling_check<D: PlanarDomain>(
    domain: &MultiCornerDomain,
    mu: &RadialPowerMeasure<D>,
    cfg: &McConfig,
    radii: &[f64],
) -> Result<DecouplingReport> {
    cfg.validate()?;
    if (mu.domain().corner() - domain.corner()).norm() > 0.0 || mu.domain().rho0() != domain.rho0() {
        return Err(Error::param("mu", "the measure must live on the multi-corner domain"));
    }
    let rho0 = domain.rho0();
    for &r in radii {
        if !(r > 0.0 && r < rho0) {
            return Err(Error::OutOfRange(format!("radius {r} must lie in (0, rho0 = {rho0})")));
        }
    }
    let wedges: Vec<CornerDomain> = (0..domain.wedges().len())
        .map(|j| domain.wedge_domain(j))
        .collect::<Result<_>>()?;
    let samples = mu.sample(cfg.n_walks, cfg.seed)?;
    let exits: Vec<Option<(ComplexPoint, Option<ComplexPoint>)>> = parallel::collect_chunks(samples.len(), |k, range| {
        let mut rng = parallel::stream_rng(cfg.seed, k, Stream::Walk);
        range
            .map(|i| coupled_walk(domain, &wedges, samples[i].point, cfg, &mut rng))
            .collect()
    });
    let done: Vec<(f64, ComplexPoint, Option<ComplexPoint>)> = samples
        .iter()
        .zip(&exits)
        .filter_map(|(s, e)| e.map(|(full, w)| (s.weight, full, w)))
        .collect();
    let aborted = samples.len() - done.len();
    warn_aborted(aborted, samples.len());
    let total = mu.total_mass();
    let wsum: f64 = done.iter().map(|d| d.0).sum();
    let weights: Vec<f64> = done.iter().map(|d| d.0 * total / wsum).collect();

    let corner = domain.corner();
    let alpha_max = domain.max_alpha();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let full: Vec<f64> = done
            .iter()
            .map(|d| f64::from(u8::from((d.1 - corner).norm() <= r)))
            .collect();
        let part: Vec<f64> = done
            .iter()
            .map(|d| f64::from(u8::from(d.2.is_some_and(|p| (p - corner).norm() <= r))))
            .collect();
        let diff: Vec<f64> = full.iter().zip(&part).map(|(a, b)| a - b).collect();
        let (nu, nu_se) = weighted_estimate(&weights, &full, total);
        let (sum_nu_j, sum_se) = weighted_estimate(&weights, &part, total);
        let (residual, residual_se) = weighted_estimate(&weights, &diff, total);
        let residual_bound: f64 = domain
            .wedges()
            .iter()
            .map(|w| corner_bound_at_arc(w.alpha, r, rho0))
            .sum::<f64>()
            * total;
        rows.push(DecouplingRow {
            r,
            nu,
            nu_se,
            sum_nu_j,
            sum_se,
            residual,
            residual_se,
            residual_bound,
            upper_ok: sum_nu_j <= nu * (1.0 + 1e-12),
            lower_ok: nu - residual_bound <= sum_nu_j + 3.0 * residual_se,
        });
    }
    let curve: Vec<CurvePoint> = rows
        .iter()
        .filter(|row| row.residual > 0.0)
        .map(|row| CurvePoint {
            r: row.r,
            mass: row.residual,
            std_error: row.residual_se,
        })
        .collect();
    let residual_fit = fit_rate(&curve, false).ok();
    let expected = 1.0 / alpha_max;
    Ok(DecouplingReport {
        upper_holds: rows.iter().all(|r| r.upper_ok),
        lower_holds: rows.iter().all(|r| r.lower_ok),
        residual_exponent_ok: residual_fit.map(|f| f.exponent >= expected - 0.05),
        residual_fit,
        expected_residual_exponent: expected,
        rows,
        aborted,
    })
}

/// `(8/π)(r/ρ₀)^{1/α}` for a straight wedge (`C_k = 0`).
fn corner_bound_at_arc(alpha: f64, r: f64, rho0: f64) -> f64 {
    corner_bound(alpha, 1.0, 0.0, r, rho0, rho0).unwrap_or(8.0 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_examples() {
        let e = envelope(1.0, 0.25, 0.0).unwrap();
        assert_eq!(e.regime, Regime::Sub);
        assert!((e.lower_coeff.unwrap() - 8.0).abs() < 1e-12);
        assert!((e.upper_coeff.unwrap() - (TAU + 16.0)).abs() < 1e-12);
        let e = envelope(1.0, 0.5, 0.0).unwrap();
        assert_eq!(e.regime, Regime::Log);
        assert!((e.lower_coeff.unwrap() - 4.0 / PI).abs() < 1e-15);
        assert!((e.upper_coeff.unwrap() - 8.0).abs() < 1e-15);
        let e = envelope(0.5, 2.0, 0.1).unwrap();
        assert_eq!(e.regime, Regime::Super);
        assert!(e.lower_coeff.is_none());
    }

    #[test]
    fn coefficients_merge_as_b_vanishes() {
        for &alpha in &[0.3, 1.0, 1.9] {
            let b = 1e-7;
            let e = envelope(alpha, b, 0.0).unwrap();
            let ratio = e.lower_coeff.unwrap() / (PI * alpha / (2.0 * b));
            assert!((ratio - 1.0).abs() < 1e-5, "{alpha}: {ratio}");
        }
    }

    #[test]
    fn exact_power_law_fit() {
        let curve: Vec<CurvePoint> = (0..10)
            .map(|i| {
                let r = 10f64.powf(-3.0 + 0.25 * i as f64);
                CurvePoint { r, mass: r.sqrt(), std_error: 0.0 }
            })
            .collect();
        let fit = fit_rate(&curve, true).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
        assert!(!fit.log_correction);
    }

    #[test]
    fn exact_log_law_fit() {
        let curve: Vec<CurvePoint> = (0..10)
            .map(|i| {
                let r = 10f64.powf(-4.0 + 0.25 * i as f64);
                CurvePoint { r, mass: r * (1.0 / r).ln(), std_error: 0.0 }
            })
            .collect();
        let fit = fit_rate(&curve, true).unwrap();
        assert!(fit.log_correction);
        assert!((fit.exponent - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_preconditions() {
        let short: Vec<CurvePoint> = (0..4)
            .map(|i| CurvePoint { r: 0.1 * (i + 1) as f64, mass: 1.0, std_error: 0.0 })
            .collect();
        assert!(fit_rate(&short, false).is_err());
        let narrow: Vec<CurvePoint> = (0..6)
            .map(|i| CurvePoint { r: 0.1 + 0.01 * i as f64, mass: 1.0, std_error: 0.0 })
            .collect();
        assert!(fit_rate(&narrow, false).is_err());
    }

    #[test]
    fn envelope_check_catches_scaled_curve() {
        let env = envelope(1.0, 0.25, 0.05).unwrap();
        let good: Vec<CurvePoint> = [1e-4, 1e-3, 1e-2]
            .iter()
            .map(|&r: &f64| CurvePoint { r, mass: 8.0 * r.sqrt(), std_error: 0.0 })
            .collect();
        assert!(check_envelope(&good, &env, 1e-2, 3.0).pass);
        let scaled: Vec<CurvePoint> = good.iter().map(|p| CurvePoint { mass: p.mass / 10.0, ..*p }).collect();
        let report = check_envelope(&scaled, &env, 1e-2, 3.0);
        assert!(!report.pass);
        assert!(report.rows.iter().all(|r| !r.lower_ok));
        let empty = check_envelope(&[], &env, 1e-2, 3.0);
        assert!(empty.pass && empty.warning.is_some());
    }

    #[test]
    fn multi_envelope_counts_largest_wedges() {
        let m = MultiCornerEnvelope::new(&[0.5, 0.25, 0.5], 1.0, 0.1).unwrap();
        assert_eq!(m.m_alpha, 2);
        assert_eq!(m.combined.regime, Regime::Log);
        assert!((m.combined.lower_coeff.unwrap() - 2.0 * 0.9 * 2.0 / PI).abs() < 1e-12);
        let sub = MultiCornerEnvelope::new(&[0.5, 0.25], 0.25, 0.0).unwrap();
        let expected = sub_lower(0.5, 0.25) + sub_lower(0.25, 0.25);
        assert!((sub.combined.lower_coeff.unwrap() - expected).abs() < 1e-12);
    }
}
