//! Resolved experiment configurations and their runners. A configuration is
//! self-contained (domain files are embedded), so the `# {json}` header of a
//! CSV output is enough to regenerate the file.

use std::fmt::Write as _;

use corner_balayage::analysis::{check_envelope, decoupling_check, envelope, fit_rate, CurvePoint};
use corner_balayage::balayage::BalayageRun;
use corner_balayage::coulomb::{
    edge_rate_from_cloud, gas_sampler, profile_from_cloud, GasConfig, HardWallProblem,
};
use corner_balayage::geometry::{DomainFile, DomainLayout};
use corner_balayage::harmonic_mc::wos_harmonic_measures;
use corner_balayage::measures::MeasureSpec;
use corner_balayage::sector_exact::{sector_density_eval, sector_mass};
use corner_balayage::{BoundaryWindow, ComplexPoint, McConfig, RadialPowerMeasure, SectorSpec};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentConfig {
    SectorExact {
        alpha: f64,
        b: f64,
        a_alpha: f64,
        r: f64,
        density: bool,
        tol: f64,
    },
    Harmonic {
        domain: DomainFile,
        z: [f64; 2],
        window: [f64; 3],
        component: Option<usize>,
        mc: McConfig,
    },
    Balayage {
        domain: DomainFile,
        radii: Vec<f64>,
        proposal_b: Option<f64>,
        mc: McConfig,
    },
    Decouple {
        domain: DomainFile,
        radii: Vec<f64>,
        mc: McConfig,
    },
    CoulombProfile {
        b: f64,
        alpha: f64,
        a: f64,
        bins: usize,
        mc: McConfig,
    },
    Gas {
        n: usize,
        beta: f64,
        b: f64,
        wall: Option<DomainFile>,
        steps: usize,
        burn_in: usize,
        seed: u64,
    },
}

/// What a run produces: a JSON document, or a CSV table plus an optional
/// JSON summary for the terminal.
pub enum Artifact {
    Json(serde_json::Value),
    Csv { table: String, summary: Option<serde_json::Value> },
}

fn measure_of(file: &DomainFile) -> Result<MeasureSpec, CliError> {
    file.measure
        .clone()
        .ok_or_else(|| CliError::config("the domain file has no `measure`; pass --b"))
}

fn csv_table(config: &ExperimentConfig, columns: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<String, CliError> {
    let mut out = String::new();
    writeln!(out, "# {}", serde_json::to_string(config).map_err(CliError::internal)?).unwrap();
    writeln!(out, "{}", columns.join(",")).unwrap();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Reads the configuration from the first line of a CSV written by
    /// [`ExperimentConfig::run`].
    pub fn from_csv_header(text: &str) -> Result<Self, CliError> {
        let first = text.lines().next().unwrap_or_default();
        let json = first
            .strip_prefix("# ")
            .ok_or_else(|| CliError::config("line 1: expected a `# {json}` configuration header"))?;
        serde_json::from_str(json).map_err(|e| CliError::config(format!("line 1 header: {e}")))
    }

    pub fn run(&self) -> Result<Artifact, CliError> {
        match self {
            ExperimentConfig::SectorExact { alpha, b, a_alpha, r, density, tol } => {
                let spec = SectorSpec::new(*alpha, *a_alpha, *b)?;
                let eval = if *density {
                    sector_density_eval(&spec, *r, *tol)?
                } else {
                    sector_mass(&spec, *r, *tol)?
                };
                Ok(Artifact::Json(serde_json::to_value(eval).map_err(CliError::internal)?))
            }
            ExperimentConfig::Harmonic { domain, z, window, component, mc } => {
                let d = domain.domain()?;
                let mut w = BoundaryWindow::new(ComplexPoint::new(window[0], window[1]), window[2]);
                if let Some(j) = component {
                    w = w.with_component(*j);
                }
                let est = wos_harmonic_measures(&d, ComplexPoint::new(z[0], z[1]), &[w], mc)?[0];
                Ok(Artifact::Json(serde_json::to_value(est).map_err(CliError::internal)?))
            }
            ExperimentConfig::Balayage { domain, radii, proposal_b, mc } => {
                let d = domain.domain()?;
                let mu = RadialPowerMeasure::from_spec(&d, &measure_of(domain)?)?;
                let mut run = BalayageRun::new(&mu, *mc, radii.clone())?;
                if let Some(pb) = proposal_b {
                    run = run.with_proposal(*pb)?;
                }
                let masses = run.window_masses()?;
                let table = csv_table(
                    self,
                    &["r", "mass", "std_error", "n_effective"],
                    masses.iter().map(|w| vec![w.r, w.mass, w.std_error, w.n_effective]),
                )?;
                Ok(Artifact::Csv { table, summary: Some(json!({ "total_mass": mu.total_mass() })) })
            }
            ExperimentConfig::Decouple { domain, radii, mc } => {
                if domain.layout()? != DomainLayout::Multi {
                    return Err(CliError::config("decouple needs a multi-corner domain file (`wedges`)"));
                }
                let multi = domain.multi_domain()?;
                let mu = RadialPowerMeasure::from_spec(&multi, &measure_of(domain)?)?;
                let report = decoupling_check(&multi, &mu, mc, radii)?;
                Ok(Artifact::Json(serde_json::to_value(report).map_err(CliError::internal)?))
            }
            ExperimentConfig::CoulombProfile { b, alpha, a, bins, mc } => {
                let problem = HardWallProblem::sector_wall(*b, *alpha, *a)?;
                if *bins == 0 {
                    return Err(CliError::config("--bins must be at least 1"));
                }
                let cloud = problem.sweep(mc)?;
                let profile = profile_from_cloud(&problem, &cloud, *bins);
                let edge = edge_rate_from_cloud(&problem, &cloud, problem.default_edge_window(), 8);
                let table = csv_table(
                    self,
                    &["s", "density", "stderr", "normalized"],
                    (0..profile.s.len()).map(|k| {
                        vec![profile.s[k], profile.density[k], profile.std_error[k], profile.normalized[k]]
                    }),
                )?;
                let summary = json!({
                    "total": profile.total,
                    "boundary_length": profile.boundary_length,
                    "aborted": profile.aborted,
                    "edge_rate": match edge {
                        Ok(report) => serde_json::to_value(report).map_err(CliError::internal)?,
                        Err(e) => json!({ "error": e.to_string() }),
                    },
                });
                Ok(Artifact::Csv { table, summary: Some(summary) })
            }
            ExperimentConfig::Gas { n, beta, b, wall, steps, burn_in, seed } => {
                let wall = wall.as_ref().map(|f| f.corner_domain()).transpose()?;
                let cfg = GasConfig { n: *n, beta: *beta, steps: *steps, burn_in: *burn_in, seed: *seed };
                let run = gas_sampler(*b, wall.as_ref(), &cfg, 0)?;
                let table = csv_table(self, &["x", "y"], run.points.iter().map(|z| vec![z.re, z.im]))?;
                let mean_r2 = run.mean_r2.iter().sum::<f64>() / run.mean_r2.len().max(1) as f64;
                let summary = json!({ "acceptance": run.acceptance, "step_size": run.step_size, "mean_r2": mean_r2 });
                Ok(Artifact::Csv { table, summary: Some(summary) })
            }
        }
    }
}

/// Reads `r, mass, std_error` columns (extra columns and `#` lines ignored).
pub fn read_curve(text: &str) -> Result<Vec<CurvePoint>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::config(format!("curve header: {e}")))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ir), Some(im)) = (col("r"), col("mass")) else {
        return Err(CliError::config("curve CSV needs `r` and `mass` columns"));
    };
    let is = col("std_error");
    let mut curve = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::config(format!("curve CSV: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, CliError> {
            record
                .get(i)
                .unwrap_or_default()
                .parse()
                .map_err(|e| CliError::config(format!("curve CSV line {line}: {e}")))
        };
        curve.push(CurvePoint {
            r: field(ir)?,
            mass: field(im)?,
            std_error: is.map(field).transpose()?.unwrap_or(0.0),
        });
    }
    Ok(curve)
}

pub fn rate_fit(curve: &[CurvePoint], allow_log: bool) -> Result<serde_json::Value, CliError> {
    let fit = fit_rate(curve, allow_log)?;
    serde_json::to_value(fit).map_err(CliError::internal)
}

pub fn bounds_check(curve: &[CurvePoint], alpha: f64, b: f64, eps: f64, r_max: f64) -> Result<serde_json::Value, CliError> {
    let env = envelope(alpha, b, eps)?;
    let report = check_envelope(curve, &env, r_max, 3.0);
    serde_json::to_value(report).map_err(CliError::internal)
}

pub fn load_domain(text: &str, b: Option<f64>) -> Result<DomainFile, CliError> {
    let mut file = DomainFile::parse(text)?;
    if let Some(b) = b {
        let mut spec = file.measure.clone().unwrap_or(MeasureSpec {
            b,
            center: None,
            multiplier: Default::default(),
            outer_cap: None,
        });
        spec.b = b;
        file.measure = Some(spec);
    }
    file.domain()?;
    Ok(file)
}
