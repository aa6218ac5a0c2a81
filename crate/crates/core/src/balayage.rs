//! Monte Carlo balayage: `ν(E) = ∫ ω(z, E, Ω) dμ(z)` with one Brownian walk
//! per `μ`-sample. The swept measure is kept as a weighted exit-point cloud
//! from which every window mass is read off.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::geometry::{ComplexPoint, PlanarDomain};
use crate::harmonic_mc::{run_walks, walk_split, warn_aborted, BoundaryWindow, McConfig, McEstimate, SplitLevels};
use crate::parallel::{self, Stream};
use crate::measures::{MeasureSample, RadialPowerMeasure};

#[derive(Clone, Debug)]
pub struct BalayageRun<'a, D> {
    pub measure: &'a RadialPowerMeasure<D>,
    /// `n_walks` is the number of `μ`-samples (one walk each).
    pub cfg: McConfig,
    pub radii: Vec<f64>,
    /// Sampling exponent `b'` for importance sampling; `None` samples `μ` itself.
    pub proposal_b: Option<f64>,
    /// Splitting levels about a boundary point for rare near-corner exits.
    pub split: Option<SplitLevels>,
}

/// One exit of the cloud with the sample it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloudPoint {
    /// Index of the `μ`-sample; split copies share it.
    pub sample: usize,
    pub source: ComplexPoint,
    pub exit: ComplexPoint,
    pub arc: usize,
    pub t: f64,
    /// Mass carried, normalized so that the weights sum to the total mass.
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct EmpiricalBoundaryMeasure {
    pub points: Vec<CloudPoint>,
    pub total: f64,
    pub aborted: usize,
    /// Kish effective sample size `(Σw)²/Σw²`.
    pub n_effective: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowMass {
    pub r: f64,
    pub mass: f64,
    pub std_error: f64,
    pub n_effective: f64,
}

impl WindowMass {
    pub fn estimate(&self, n: usize, aborted: usize) -> McEstimate {
        McEstimate {
            mean: self.mass,
            std_error: self.std_error,
            n,
            aborted,
        }
    }
}

impl<'a, D: PlanarDomain> BalayageRun<'a, D> {
    pub fn new(measure: &'a RadialPowerMeasure<D>, cfg: McConfig, radii: Vec<f64>) -> Result<Self> {
        cfg.validate()?;
        let rho0 = measure.domain().rho0();
        let mut radii = radii;
        for &r in &radii {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::param("radii", format!("radius {r} must be positive")));
            }
        }
        if radii.iter().any(|&r| r >= rho0) {
            log::debug!("window radii reach beyond rho0 = {rho0}");
        }
        radii.sort_by(f64::total_cmp);
        Ok(Self {
            measure,
            cfg,
            radii,
            proposal_b: None,
            split: None,
        })
    }

    pub fn with_proposal(mut self, proposal_b: f64) -> Result<Self> {
        check_positive("proposal_b", proposal_b)?;
        self.proposal_b = Some(proposal_b);
        Ok(self)
    }

    pub fn with_splitting(mut self, levels: SplitLevels) -> Self {
        self.split = Some(levels);
        self
    }

    pub fn samples(&self) -> Result<Vec<MeasureSample>> {
        let b = self.proposal_b.unwrap_or(self.measure.b());
        self.measure.sample_with_proposal(self.cfg.n_walks, self.cfg.seed, b)
    }

    /// Exit cloud of the run: one walk per sample, weights renormalized over
    /// the completed walks so that they sum to `total_mass(μ)`.
    pub fn empirical_balayage(&self) -> Result<EmpiricalBoundaryMeasure> {
        let samples = self.samples()?;
        Ok(self.cloud_from_samples(&samples))
    }

    pub(crate) fn cloud_from_samples(&self, samples: &[MeasureSample]) -> EmpiricalBoundaryMeasure {
        let domain = self.measure.domain();
        let mut points = Vec::with_capacity(samples.len());
        let aborted = match &self.split {
            None => {
                let exits = run_walks(domain, samples.len(), |i| samples[i].point, &self.cfg);
                for (i, (s, e)) in samples.iter().zip(&exits).enumerate() {
                    if let Some(e) = e {
                        points.push(CloudPoint {
                            sample: i,
                            source: s.point,
                            exit: e.point,
                            arc: e.arc,
                            t: e.t,
                            weight: s.weight,
                        });
                    }
                }
                samples.len() - points.len()
            }
            Some(levels) => {
                let parts = parallel::map_chunks(samples.len(), |k, range| {
                    let mut rng = parallel::stream_rng(self.cfg.seed, k, Stream::Walk);
                    let mut pts = Vec::new();
                    let mut aborted = 0;
                    for i in range {
                        let s = samples[i];
                        let (exits, lost) = walk_split(domain, s.point, &self.cfg, levels, &mut rng);
                        aborted += lost;
                        pts.extend(exits.into_iter().map(|(e, w)| CloudPoint {
                            sample: i,
                            source: s.point,
                            exit: e.point,
                            arc: e.arc,
                            t: e.t,
                            weight: s.weight * w,
                        }));
                    }
                    (pts, aborted)
                });
                let mut aborted = 0;
                for (pts, lost) in parts {
                    points.extend(pts);
                    aborted += lost;
                }
                aborted
            }
        };
        warn_aborted(aborted, samples.len());
        let total = self.measure.total_mass();
        let sum: f64 = points.iter().map(|p| p.weight).sum();
        let mut sum_sq = 0.0;
        if sum > 0.0 {
            for p in &mut points {
                sum_sq += p.weight * p.weight;
                p.weight *= total / sum;
            }
        }
        let n_effective = if sum_sq > 0.0 { sum * sum / sum_sq } else { 0.0 };
        EmpiricalBoundaryMeasure {
            points,
            total,
            aborted,
            n_effective,
        }
    }

    /// Window masses `ν(∂Ω ∩ B_r(z₀))` for every radius of the run.
    pub fn window_masses(&self) -> Result<Vec<WindowMass>> {
        let cloud = self.empirical_balayage()?;
        let corner = self.measure.domain().corner();
        Ok(self
            .radii
            .iter()
            .map(|&r| cloud.window_mass(&BoundaryWindow::new(corner, r), self.measure.domain()))
            .collect())
    }

    /// `ν(∂Ω ∩ B_r(z₀))` for a single radius.
    pub fn window_mass(&self, r: f64) -> Result<McEstimate> {
        check_positive("r", r)?;
        let cloud = self.empirical_balayage()?;
        let corner = self.measure.domain().corner();
        let w = cloud.window_mass(&BoundaryWindow::new(corner, r), self.measure.domain());
        Ok(w.estimate(cloud.points.len(), cloud.aborted))
    }

    /// `sup_k |U^ν(z_k) − U^μ(z_k)|` with `U^σ(z) = ∫ log(1/|z − w|) dσ(w)`,
    /// both potentials evaluated on the same weighted samples.
    pub fn potential_match(&self, test_points: &[ComplexPoint]) -> Result<f64> {
        let domain = self.measure.domain();
        let diam = 2.0 * domain.outer_radius();
        for &z in test_points {
            if domain.contains(z) {
                return Err(Error::OutOfRange(format!("test point {z} lies inside the domain")));
            }
            let d = domain.distance_to_boundary(z);
            if d < 0.1 * diam {
                return Err(Error::OutOfRange(format!(
                    "test point {z} is {d} from the boundary; at least 0.1·diam = {} is required",
                    0.1 * diam
                )));
            }
        }
        if self.measure.total_mass() == 0.0 {
            return Ok(0.0);
        }
        let cloud = self.empirical_balayage()?;
        Ok(cloud.potential_gap(test_points))
    }
}

impl EmpiricalBoundaryMeasure {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Self-normalized estimate of the mass in `window` with a delta-method
    /// standard error; split copies of one sample are grouped.
    pub fn window_mass<D: PlanarDomain + ?Sized>(&self, window: &BoundaryWindow, domain: &D) -> WindowMass {
        self.mass_where(window.radius, |p| window.hit(domain, p.exit))
    }

    /// Mass of the cloud points selected by `pick`.
    pub fn mass_where(&self, r: f64, pick: impl Fn(&CloudPoint) -> bool) -> WindowMass {
        if self.points.is_empty() || self.total == 0.0 {
            return WindowMass { r, mass: 0.0, std_error: 0.0, n_effective: 0.0 };
        }
        let mut groups: Vec<(f64, f64)> = Vec::new();
        let mut last = usize::MAX;
        for p in &self.points {
            if p.sample != last {
                groups.push((0.0, 0.0));
                last = p.sample;
            }
            let g = groups.last_mut().unwrap();
            g.1 += p.weight;
            if pick(p) {
                g.0 += p.weight;
            }
        }
        let mass: f64 = groups.iter().map(|g| g.0).sum();
        let share = mass / self.total;
        let var: f64 = groups.iter().map(|&(hit, all)| (hit - share * all).powi(2)).sum();
        WindowMass {
            r,
            mass,
            std_error: var.sqrt(),
            n_effective: self.n_effective,
        }
    }

    /// Window masses about `center` for each radius, sharing the cloud.
    pub fn window_curve<D: PlanarDomain + ?Sized>(&self, domain: &D, center: ComplexPoint, radii: &[f64]) -> Vec<WindowMass> {
        radii
            .iter()
            .map(|&r| self.window_mass(&BoundaryWindow::new(center, r), domain))
            .collect()
    }

    /// `sup_k |Σ w_i log|z_k − source_i| − Σ w_i log|z_k − exit_i||`.
    pub fn potential_gap(&self, test_points: &[ComplexPoint]) -> f64 {
        test_points
            .iter()
            .map(|&z| {
                self.points
                    .iter()
                    .map(|p| p.weight * ((z - p.source).norm() / (z - p.exit).norm()).ln())
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}
