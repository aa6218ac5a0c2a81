//! Exact balayage of `|w|^{2b−2} d²w` on a circular sector onto its boundary.
//!
//! For the sector `S = {0 < |w| < A, 0 < arg w < πα}` the swept measure has,
//! on each radial side, a density given by a series in `x = r/A` with
//! exponents `p_j = (2j + 1)/α`. Everything here integrates that series term
//! by term in closed form and bounds the discarded tail by a geometric series
//! in `x^{2/α}`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{check_positive, check_range, Error, Result};

/// Relative tolerance on `2bα − (2k + 1)` below which the log / resonant
/// branch is used.
pub const REGIME_TOLERANCE: f64 = 1e-9;

/// Largest `R/A` accepted by [`sector_mass`].
pub const MAX_RADIUS_FRACTION: f64 = 0.99;

const MAX_TERMS: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SeriesRegime {
    /// `2b ∉ (1 + 2ℕ)/α`.
    Generic,
    /// `2b = 1/α`.
    Log,
    /// `2b = (1 + 2k)/α` with `k ≥ 1`.
    Resonant { k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub alpha: f64,
    /// Sector radius `A`.
    pub a_alpha: f64,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEval {
    pub value: f64,
    pub truncation_bound: f64,
    pub terms: usize,
    pub regime: SeriesRegime,
}

impl SectorSpec {
    pub fn new(alpha: f64, a_alpha: f64, b: f64) -> Result<Self> {
        check_range("alpha", alpha, 0.0, 2.0)?;
        check_positive("a_alpha", a_alpha)?;
        check_positive("b", b)?;
        Ok(Self { alpha, a_alpha, b })
    }

    pub fn regime(&self) -> SeriesRegime {
        classify(self.alpha, self.b)
    }

    /// `p_j = (2j + 1)/α`.
    fn p(&self, j: usize) -> f64 {
        (2 * j + 1) as f64 / self.alpha
    }

    /// Total mass `πα·A^{2b}/(2b)` of the sector measure.
    pub fn total_mass(&self) -> f64 {
        PI * self.alpha * self.a_alpha.powf(2.0 * self.b) / (2.0 * self.b)
    }
}

pub fn classify(alpha: f64, b: f64) -> SeriesRegime {
    let t = 2.0 * b * alpha;
    let k = ((t - 1.0) / 2.0).round();
    if k >= 0.0 && (t - (2.0 * k + 1.0)).abs() < REGIME_TOLERANCE * t.max(1.0) {
        if k == 0.0 {
            SeriesRegime::Log
        } else {
            SeriesRegime::Resonant { k: k as usize }
        }
    } else {
        SeriesRegime::Generic
    }
}

/// Sums `Σ_{j ≥ j0, j ≠ skip} term(j)` until the geometric tail bound
/// `tail(j)` drops below `tol`; returns `(sum, bound, terms)`.
fn sum_with_tail(
    j0: usize,
    skip: Option<usize>,
    tol: f64,
    mut term: impl FnMut(usize) -> f64,
    mut tail: impl FnMut(usize) -> Option<f64>,
) -> Result<(f64, f64, usize)> {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut j = j0;
    loop {
        if let Some(bound) = tail(j) {
            if bound <= tol {
                return Ok((sum, bound, j - j0));
            }
        }
        if j - j0 >= MAX_TERMS {
            return Err(Error::Series(format!(
                "series needs more than {MAX_TERMS} terms; the radius is too close to the sector radius"
            )));
        }
        if Some(j) != skip {
            // Kahan summation
            let y = term(j) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        j += 1;
    }
}

/// Cumulative swept mass on both radial sides within distance `R` of the apex:
/// `ν_b(∂S ∩ B_R(0))`.
pub fn sector_mass(spec: &SectorSpec, r: f64, tol: f64) -> Result<SeriesEval> {
    let SectorSpec { alpha, a_alpha: a, b } = *spec;
    check_positive("tol", tol)?;
    if !(r > 0.0 && r <= MAX_RADIUS_FRACTION * a) {
        return Err(Error::OutOfRange(format!(
            "R = {r} must lie in (0, {MAX_RADIUS_FRACTION}·A = {}]",
            MAX_RADIUS_FRACTION * a
        )));
    }
    let x = r / a;
    let ratio = x.powf(2.0 / alpha);
    let two_b = 2.0 * b;
    let regime = spec.regime();
    match regime {
        SeriesRegime::Log => {
            // (2/π)R^{2b}[(1/b)(log(A/R) + 1/(2b)) + α/(2b) − α Σ_{j≥1} X^{2j/α}/(j(j+1)(2b + 2j/α))]
            let pre = 2.0 / PI * r.powf(two_b);
            let term = |j: usize| {
                let jf = j as f64;
                ratio.powi(j as i32) / (jf * (jf + 1.0) * (two_b + 2.0 * jf / alpha))
            };
            let tail = |j: usize| {
                let jf = j as f64;
                Some(pre * alpha * ratio.powi(j as i32) / (jf * (jf + 1.0) * (two_b + 2.0 * jf / alpha) * (1.0 - ratio)))
            };
            let (s, bound, terms) = sum_with_tail(1, None, tol, term, tail)?;
            let value = pre * ((1.0 / b) * ((a / r).ln() + 1.0 / two_b) + alpha / two_b - alpha * s);
            Ok(SeriesEval { value, truncation_bound: bound, terms, regime })
        }
        SeriesRegime::Generic | SeriesRegime::Resonant { .. } => {
            let skip = match regime {
                SeriesRegime::Resonant { k } => Some(k),
                _ => None,
            };
            let series_pre = match regime {
                SeriesRegime::Resonant { .. } => 2.0 / PI * 4.0 * a.powf(two_b) / alpha,
                _ => 8.0 * a.powf(two_b) / (alpha * PI),
            };
            let term = |j: usize| {
                let p = spec.p(j);
                x.powf(p) / (p * (p * p - two_b * two_b))
            };
            // the bound is valid once p_j > 2b (all later terms positive and
            // dominated geometrically)
            let tail = |j: usize| {
                let p = spec.p(j);
                if p <= two_b * (1.0 + 1e-6) || Some(j) <= skip {
                    return None;
                }
                Some(series_pre * x.powf(p) / (p * (p * p - two_b * two_b) * (1.0 - ratio)))
            };
            let (s, bound, terms) = sum_with_tail(0, skip, tol, term, tail)?;
            let value = match regime {
                SeriesRegime::Resonant { k } => {
                    let kf = k as f64;
                    let log_part = 2.0 / (1.0 + 2.0 * kf) * r.powf(two_b) / two_b * ((a / r).ln() + 1.0 / two_b);
                    // Σ_{j≠k} 1/(p_j² − 4b²) = 1/(16b²)
                    let flat = 4.0 * a.powf(two_b) / alpha * x.powf(two_b) / two_b / (16.0 * b * b);
                    2.0 / PI * (log_part + flat) - series_pre * s
                }
                _ => r.powf(two_b) * (PI * alpha * b).tan() / (2.0 * b * b) - series_pre * s,
            };
            Ok(SeriesEval { value, truncation_bound: bound, terms, regime })
        }
    }
}

/// Density `dν_b/|dz|` at distance `r` from the apex along either radial side.
pub fn sector_density(spec: &SectorSpec, r: f64) -> Result<f64> {
    Ok(sector_density_eval(spec, r, 1e-15)?.value)
}

/// [`sector_density`] with its truncation bound.
pub fn sector_density_eval(spec: &SectorSpec, r: f64, tol: f64) -> Result<SeriesEval> {
    let SectorSpec { alpha, a_alpha: a, b } = *spec;
    if !(r > 0.0 && r < a) {
        return Err(Error::OutOfRange(format!(
            "r = {r} must lie in (0, A = {a}); the series diverges on the outer arc"
        )));
    }
    let x = r / a;
    let ratio = x.powf(2.0 / alpha);
    let two_b = 2.0 * b;
    let regime = spec.regime();
    let scale = r.powf(two_b - 1.0);
    let tol = tol * scale;
    let eval = match regime {
        SeriesRegime::Log => {
            // (1/π) r^{2b−1} (2 log(A/r) + α − α Σ_{j≥1} x^{2j/α}/(j(j+1)))
            let pre = scale / PI;
            let term = |j: usize| {
                let jf = j as f64;
                ratio.powi(j as i32) / (jf * (jf + 1.0))
            };
            let tail = |j: usize| {
                let jf = j as f64;
                Some(pre * alpha * ratio.powi(j as i32) / (jf * (jf + 1.0) * (1.0 - ratio)))
            };
            let (s, bound, terms) = sum_with_tail(1, None, tol, term, tail)?;
            SeriesEval {
                value: pre * (2.0 * (a / r).ln() + alpha - alpha * s),
                truncation_bound: bound,
                terms,
                regime,
            }
        }
        SeriesRegime::Generic | SeriesRegime::Resonant { .. } => {
            let skip = match regime {
                SeriesRegime::Resonant { k } => Some(k),
                _ => None,
            };
            let series_pre = 4.0 * a.powf(two_b) / (alpha * PI * r);
            let term = |j: usize| {
                let p = spec.p(j);
                x.powf(p) / (p * p - two_b * two_b)
            };
            let tail = |j: usize| {
                let p = spec.p(j);
                if p <= two_b * (1.0 + 1e-6) || Some(j) <= skip {
                    return None;
                }
                Some(series_pre * x.powf(p) / ((p * p - two_b * two_b) * (1.0 - ratio)))
            };
            let (s, bound, terms) = sum_with_tail(0, skip, tol, term, tail)?;
            let value = match regime {
                SeriesRegime::Resonant { k } => {
                    let kf = k as f64;
                    let log_part = 2.0 / (1.0 + 2.0 * kf) * scale * (a / r).ln() / PI;
                    log_part + series_pre * (x.powf(two_b) / (16.0 * b * b) - s)
                }
                _ => scale * (PI * alpha * b).tan() / two_b - series_pre * s,
            };
            SeriesEval { value, truncation_bound: bound, terms, regime }
        }
    };
    Ok(eval)
}

/// Partial sum of `Σ_{j≥0} 1/(p_j² − (2b)²)` against its closed form
/// `απ·tan(παb)/(8b)`, with a two-sided enclosure of the discarded tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TanSum {
    pub partial: f64,
    pub target: f64,
    pub tail_lower: f64,
    pub tail_upper: f64,
}

impl TanSum {
    /// The certified bound on `|target − partial|`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_upper
    }
}

/// `∫_{x0}^∞ α²/((2x + 1)² − c²) dx`.
fn tail_integral(alpha: f64, c: f64, x0: f64) -> f64 {
    let y = 2.0 * x0 + 1.0;
    if c < 1e-8 * y {
        return alpha * alpha / (2.0 * y) * (1.0 + c * c / (3.0 * y * y));
    }
    alpha * alpha / (4.0 * c) * (2.0 * c / (y - c)).ln_1p()
}

pub fn tan_sum_identity(alpha: f64, b: f64, terms: usize) -> Result<TanSum> {
    check_range("alpha", alpha, 0.0, 2.0)?;
    check_positive("b", b)?;
    if terms == 0 {
        return Err(Error::param("J", "need at least one term"));
    }
    if classify(alpha, b) != SeriesRegime::Generic {
        return Err(Error::param("b", "2b = (2j + 1)/α is a pole of the identity"));
    }
    if 2.0 * b * alpha >= 1.0 {
        return Err(Error::param(
            "b",
            format!("2b = {} must be below 1/α = {} for the positive-term form", 2.0 * b, 1.0 / alpha),
        ));
    }
    let c = 2.0 * alpha * b;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in (0..terms).rev() {
        let y = (2 * j + 1) as f64;
        let t = alpha * alpha / ((y - c) * (y + c)) - comp;
        let s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
    let target = alpha * PI * (PI * alpha * b).tan() / (8.0 * b);
    Ok(TanSum {
        partial: sum,
        target,
        tail_lower: tail_integral(alpha, c, terms as f64),
        tail_upper: tail_integral(alpha, c, terms as f64 - 0.5),
    })
}

/// Smallest `J` whose tail upper bound is at most `tol`.
pub fn tan_sum_terms_for(alpha: f64, b: f64, tol: f64) -> usize {
    let c = 2.0 * alpha * b;
    let (mut lo, mut hi) = (1usize, 2usize);
    while tail_integral(alpha, c, hi as f64 - 0.5) > tol {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail_integral(alpha, c, mid as f64 - 0.5) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;

    fn spec(alpha: f64, a: f64, b: f64) -> SectorSpec {
        SectorSpec::new(alpha, a, b).unwrap()
    }

    /// Per-side density straight from the unsimplified series (both the
    /// `x^{2b}` and `x^{p_j}` parts summed numerically), generic case only.
    fn raw_density(s: &SectorSpec, r: f64) -> f64 {
        const J: usize = 2_000_000;
        let x = r / s.a_alpha;
        let mut sum = 0.0;
        for j in (0..J).rev() {
            let p = s.p(j);
            sum += (x.powf(2.0 * s.b) - x.powf(p)) / (p * p - 4.0 * s.b * s.b);
        }
        // remaining x^{2b} terms, Σ_{j≥J} α²/(2j+1)² ≈ α²/(4J)
        sum += x.powf(2.0 * s.b) * s.alpha * s.alpha / (4.0 * J as f64);
        4.0 * s.a_alpha.powf(2.0 * s.b) / (s.alpha * PI * r) * sum
    }

    #[test]
    fn regimes() {
        assert_eq!(classify(1.0, 0.25), SeriesRegime::Generic);
        assert_eq!(classify(1.0, 0.5), SeriesRegime::Log);
        assert_eq!(classify(0.5, 1.0), SeriesRegime::Log);
        assert_eq!(classify(1.0, 1.5), SeriesRegime::Resonant { k: 1 });
        assert_eq!(classify(2.0, 1.25), SeriesRegime::Resonant { k: 2 });
        assert_eq!(classify(1.0, 0.5 + 1e-12), SeriesRegime::Log);
        assert_eq!(classify(1.0, 0.5 + 1e-6), SeriesRegime::Generic);
    }

    #[test]
    fn simplified_density_matches_raw_series() {
        for &(alpha, b) in &[(1.0, 0.25), (0.5, 0.25), (2.0, 1.0), (1.0, 1.0), (1.5, 0.1)] {
            let s = spec(alpha, 1.0, b);
            for &r in &[0.05, 0.3, 0.7] {
                let d = sector_density(&s, r).unwrap();
                let raw = raw_density(&s, r);
                assert!((d - raw).abs() <= 1e-8 * raw.abs().max(1.0), "{alpha} {b} {r}: {d} vs {raw}");
            }
        }
    }

    #[test]
    fn log_density_reference_value() {
        // 2b = 1/α with α = 1: (1/π)(2 log 2 + Σ_{j≥1} (1 − 4^{−j})/(j(j+1))) at r = 1/2
        let s = spec(1.0, 1.0, 0.5);
        let mut sum = 0.0;
        for j in 1..200 {
            let jf = j as f64;
            sum += (1.0 - 0.25f64.powi(j)) / (jf * (jf + 1.0));
        }
        sum += 1.0 / 200.0;
        let oracle = (2.0 * 2f64.ln() + sum) / PI;
        assert!((sector_density(&s, 0.5).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn mass_is_twice_integrated_density() {
        for &(alpha, b) in &[(1.0, 0.25), (1.0, 0.5), (0.5, 1.0), (2.0, 0.5), (1.0, 1.5), (0.75, 0.4)] {
            let s = spec(alpha, 1.3, b);
            for &r in &[0.01, 0.2, 0.9] {
                let m = sector_mass(&s, r, 1e-14).unwrap();
                // substitute r = t^{1/(2b)} to remove the endpoint singularity
                let q = quadrature::integrate(
                    |t: f64| {
                        let rr = t.powf(1.0 / (2.0 * b));
                        sector_density(&s, rr).unwrap() * rr.powf(1.0 - 2.0 * b) / (2.0 * b)
                    },
                    0.0,
                    r.powf(2.0 * b),
                    1e-13,
                    1e-11,
                )
                .unwrap();
                let oracle = 2.0 * q.value;
                assert!(
                    (m.value - oracle).abs() <= 1e-8 * oracle,
                    "α={alpha} b={b} R={r}: {} vs {oracle}",
                    m.value
                );
            }
        }
    }

    #[test]
    fn resonant_constant_is_brute_force_sum() {
        for &(alpha, k) in &[(1.0, 1usize), (0.5, 2), (2.0, 1)] {
            let b = (1.0 + 2.0 * k as f64) / (2.0 * alpha);
            let mut sum = 0.0;
            for j in (0..4_000_000usize).rev() {
                if j != k {
                    let p = (2 * j + 1) as f64 / alpha;
                    sum += 1.0 / (p * p - 4.0 * b * b);
                }
            }
            assert!((sum - 1.0 / (16.0 * b * b)).abs() < 1e-6, "{alpha} {k}: {sum}");
        }
    }

    #[test]
    fn small_radius_limit_sub_regime() {
        let s = spec(1.0, 1.0, 0.25);
        for &r in &[1e-4, 1e-5, 1e-6] {
            let ratio = sector_mass(&s, r, 1e-16).unwrap().value / r.sqrt();
            // correction is O(R^{1/α − 2b}) = O(R^{1/2})
            assert!((ratio - 8.0).abs() < 20.0 * r.sqrt(), "{r}: {ratio}");
        }
    }

    #[test]
    fn small_radius_limit_log_regime() {
        let s = spec(1.0, 1.0, 0.5);
        let ratio = |r: f64| sector_mass(&s, r, 1e-16).unwrap().value / (r * (1.0 / r).ln());
        // ratio = (4/π)(1 + 1.5/log(1/R) + O(R^2/log)), so fit a + c/log(1/R)
        let (l1, l2) = ((1e4f64).ln(), (1e8f64).ln());
        let (q1, q2) = (ratio(1e-4), ratio(1e-8));
        let limit = (q2 * l2 - q1 * l1) / (l2 - l1);
        assert!((limit - 4.0 / PI).abs() < 1e-6, "{limit}");
    }

    #[test]
    fn scaling_law_is_exact() {
        for &(alpha, b) in &[(1.0, 0.25), (1.0, 0.5), (2.0, 1.0), (1.0, 1.5)] {
            let s1 = spec(alpha, 1.0, b);
            let lambda = 3.7;
            let s2 = spec(alpha, lambda, b);
            let v1 = sector_mass(&s1, 0.3, 1e-15).unwrap().value;
            let v2 = sector_mass(&s2, 0.3 * lambda, 1e-15).unwrap().value;
            assert!((v2 / (v1 * lambda.powf(2.0 * b)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_branch_approaches_log_branch() {
        let alpha = 1.0;
        let r = 0.1;
        let log_value = sector_mass(&spec(alpha, 1.0, 0.5), r, 1e-15).unwrap().value;
        let deltas = [1e-3, 1e-4, 1e-5];
        let values: Vec<f64> = deltas
            .iter()
            .map(|d| sector_mass(&spec(alpha, 1.0, 0.5 - d / 2.0), r, 1e-15).unwrap().value)
            .collect();
        // linear extrapolation in δ
        let extrapolated = values[2] - (values[1] - values[2]) * deltas[2] / (deltas[1] - deltas[2]);
        assert!((extrapolated / log_value - 1.0).abs() < 1e-4);
        assert!((values[2] / log_value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn mass_stays_below_total_and_is_monotone() {
        for &(alpha, b) in &[(1.0, 0.25), (0.5, 1.0), (2.0, 0.5), (1.0, 1.5)] {
            let s = spec(alpha, 1.0, b);
            let mut prev = 0.0;
            for i in 1..=99 {
                let r = i as f64 / 100.0;
                let v = sector_mass(&s, r, 1e-14).unwrap().value;
                assert!(v >= prev);
                prev = v;
                assert!(sector_density(&s, r).unwrap() >= 0.0);
            }
            assert!(prev < s.total_mass());
        }
    }

    #[test]
    fn refuses_radius_near_outer_arc() {
        let s = spec(1.0, 1.0, 0.25);
        assert!(sector_mass(&s, 0.995, 1e-12).is_err());
        assert!(sector_density(&s, 1.0).is_err());
    }

    #[test]
    fn tan_identity_examples() {
        let t = tan_sum_identity(1.0, 0.25, 1_000_000).unwrap();
        assert!((t.target - PI / 2.0).abs() < 1e-15);
        assert!((t.target - t.partial).abs() <= t.tail_upper);
        assert!(t.target - t.partial >= t.tail_lower - 1e-15);
        let t = tan_sum_identity(0.5, 0.25, 1_000_000).unwrap();
        assert!((t.target - PI / 4.0 * (PI / 8.0).tan()).abs() < 1e-15);
        // b → 0: α²π²/8
        let t = tan_sum_identity(0.8, 1e-9, 10).unwrap();
        assert!((t.target - 0.64 * PI * PI / 8.0).abs() < 1e-9);
        assert!(tan_sum_identity(1.0, 0.5, 10).is_err());
    }

    #[test]
    fn terms_for_tolerance() {
        let j = tan_sum_terms_for(1.0, 0.25, 1e-6);
        let t = tan_sum_identity(1.0, 0.25, j).unwrap();
        assert!(t.tail_upper <= 1e-6);
        let t = tan_sum_identity(1.0, 0.25, j - 1).unwrap();
        assert!(t.tail_upper > 1e-6);
    }
}
