//! WebAssembly bindings for the demo page in `www/`. Every function returns
//! a JSON string; errors come back as `{"error": "..."}`.

use corner_balayage::analysis::{envelope, fit_rate, universal_exponent, CurvePoint};
use corner_balayage::balayage::BalayageRun;
use corner_balayage::coulomb::{edge_rate_from_cloud, profile_from_cloud, support_radius, HardWallProblem};
use corner_balayage::sector_exact::{sector_mass, SectorSpec};
use corner_balayage::{CornerDomain, McConfig, PlanarDomain, RadialPowerMeasure};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Cap on walks per call so the page stays responsive.
pub const MAX_SAMPLES: usize = 200_000;
/// Exits shipped back for drawing.
const MAX_DRAWN: usize = 4000;

fn respond<T: Serialize>(result: Result<T, corner_balayage::Error>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string()),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn polyline<D: PlanarDomain>(domain: &D, per_arc: usize) -> Vec<[f64; 2]> {
    domain
        .boundary()
        .arcs()
        .iter()
        .flat_map(|a| (0..=per_arc).map(move |k| a.point(k as f64 / per_arc as f64)))
        .map(|z| [z.re, z.im])
        .collect()
}

#[derive(Serialize)]
struct SectorCurve {
    regime: String,
    exponent: f64,
    r: Vec<f64>,
    exact: Vec<f64>,
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
}

/// Exact window masses `ν([0, r])` on the unit sector of opening `πα`,
/// together with the envelope for relative slack `eps`.
#[wasm_bindgen]
pub fn sector_curve(alpha: f64, b: f64, eps: f64, points: usize) -> String {
    respond((|| {
        let spec = SectorSpec::new(alpha, 1.0, b)?;
        let env = envelope(alpha, b, eps)?;
        let r = log_grid(1e-6, 0.5, points.clamp(2, 400));
        let exact = r.iter().map(|&r| sector_mass(&spec, r, 1e-12).map(|e| e.value)).collect::<Result<_, _>>()?;
        let bounds: Vec<_> = r.iter().map(|&r| env.bounds(r)).collect();
        Ok(SectorCurve {
            regime: format!("{:?}", env.regime).to_lowercase(),
            exponent: universal_exponent(alpha, b),
            lower: bounds.iter().map(|b| b.map(|x| x.0)).collect(),
            upper: bounds.iter().map(|b| b.map(|x| x.1)).collect(),
            r,
            exact,
        })
    })())
}

#[derive(Serialize)]
struct Sweep {
    boundary: Vec<[f64; 2]>,
    /// `[x, y, weight]` for the first exits of the cloud.
    exits: Vec<[f64; 3]>,
    total: f64,
    n_effective: f64,
    r: Vec<f64>,
    mc: Vec<f64>,
    std_error: Vec<f64>,
    exact: Vec<f64>,
    fitted_exponent: Option<f64>,
}

/// Walk-on-spheres sweep of `|z|^{2b−2} d²z` on the unit sector, compared
/// with the exact series.
#[wasm_bindgen]
pub fn sweep_sector(alpha: f64, b: f64, samples: usize, seed: u64) -> String {
    respond((|| {
        let sector = CornerDomain::sector(alpha, 1.0, 0.5)?;
        let mu = RadialPowerMeasure::new(&sector, b)?;
        let radii = log_grid(0.01, 0.5, 8);
        let run = BalayageRun::new(&mu, McConfig::new(samples.clamp(1, MAX_SAMPLES), seed), radii.clone())?;
        let cloud = run.empirical_balayage()?;
        let masses = cloud.window_curve(&sector, sector.corner(), &radii);
        let spec = SectorSpec::new(alpha, 1.0, b)?;
        let exact = radii.iter().map(|&r| sector_mass(&spec, r, 1e-12).map(|e| e.value)).collect::<Result<_, _>>()?;
        let curve: Vec<CurvePoint> = masses.iter().copied().map(CurvePoint::from).collect();
        Ok(Sweep {
            boundary: polyline(&sector, 64),
            exits: cloud.points.iter().take(MAX_DRAWN).map(|p| [p.exit.re, p.exit.im, p.weight]).collect(),
            total: cloud.total,
            n_effective: cloud.n_effective,
            r: radii,
            mc: masses.iter().map(|w| w.mass).collect(),
            std_error: masses.iter().map(|w| w.std_error).collect(),
            exact,
            fitted_exponent: fit_rate(&curve, false).ok().map(|f| f.exponent),
        })
    })())
}

#[derive(Serialize)]
struct Wall {
    boundary: Vec<[f64; 2]>,
    droplet_radius: f64,
    wall_radius: f64,
    s: Vec<f64>,
    density: Vec<f64>,
    std_error: Vec<f64>,
    total: f64,
    boundary_length: f64,
    edge_exponent: f64,
    edge_fit: Option<f64>,
}

/// Hard-wall equilibrium measure on the sector wall of opening `πα` and
/// radius `0.8·R_b`, as an arclength density along the wall.
#[wasm_bindgen]
pub fn wall_profile(b: f64, alpha: f64, samples: usize, bins: usize, seed: u64) -> String {
    respond((|| {
        let droplet = support_radius(b);
        let a = 0.8 * droplet;
        let problem = HardWallProblem::sector_wall(b, alpha, a)?;
        let cloud = problem.sweep(&McConfig::new(samples.clamp(1, MAX_SAMPLES), seed))?;
        let profile = profile_from_cloud(&problem, &cloud, bins.clamp(1, 512));
        let edge = edge_rate_from_cloud(&problem, &cloud, problem.default_edge_window(), 8).ok();
        Ok(Wall {
            boundary: polyline(&problem.wall, 64),
            droplet_radius: droplet,
            wall_radius: a,
            s: profile.s,
            density: profile.density,
            std_error: profile.std_error,
            total: profile.total,
            boundary_length: profile.boundary_length,
            edge_exponent: problem.edge_exponent(),
            edge_fit: edge.map(|e| e.fit.exponent),
        })
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn sector_curve_lies_inside_its_envelope() {
        let v = parse(&sector_curve(1.0, 0.25, 0.1, 20));
        let exact = v["exact"].as_array().unwrap();
        let r = v["r"].as_array().unwrap();
        for (k, m) in exact.iter().enumerate() {
            if r[k].as_f64().unwrap() < 1e-3 {
                let m = m.as_f64().unwrap();
                assert!(m >= v["lower"][k].as_f64().unwrap() && m <= v["upper"][k].as_f64().unwrap());
            }
        }
    }

    #[test]
    fn errors_are_reported_as_json() {
        let v = parse(&sector_curve(3.0, 0.25, 0.1, 20));
        assert!(v["error"].as_str().unwrap().contains("(0, 2]"));
    }

    #[test]
    fn sweep_and_wall_produce_data() {
        let v = parse(&sweep_sector(0.5, 0.25, 2000, 1));
        assert_eq!(v["r"].as_array().unwrap().len(), 8);
        assert!(v["exits"].as_array().unwrap().len() <= MAX_DRAWN);
        let w = parse(&wall_profile(1.0, 0.5, 2000, 16, 1));
        assert_eq!(w["density"].as_array().unwrap().len(), 16);
    }
}
