//! Monte Carlo routes checked against independent closed forms.

use std::f64::consts::PI;

use corner_balayage::analysis::decoupling_check;
use corner_balayage::balayage::BalayageRun;
use corner_balayage::coulomb::{gas_sampler, radial_ks, support_radius, wall_profile, GasConfig, HardWallProblem};
use corner_balayage::geometry::Wedge;
use corner_balayage::harmonic_mc::{wos_harmonic_measures, SplitLevels};
use corner_balayage::sector_exact::{sector_mass, SectorSpec};
use corner_balayage::{BoundaryWindow, ComplexPoint, CornerDomain, McConfig, MultiCornerDomain, PlanarDomain, RadialPowerMeasure};

#[test]
fn splitting_keeps_window_masses_unbiased() {
    // super regime: near-corner mass only arrives from distant samples
    let (alpha, b) = (0.5, 2.0);
    let sector = CornerDomain::sector(alpha, 1.0, 0.5).unwrap();
    let mu = RadialPowerMeasure::new(&sector, b).unwrap();
    let radii = vec![0.01, 0.03, 0.1];
    let levels = SplitLevels::geometric(sector.corner(), 0.3, 0.01, 2f64.powf(-alpha), 2).unwrap();
    let run = BalayageRun::new(&mu, McConfig::new(30_000, 17), radii).unwrap().with_splitting(levels);
    let spec = SectorSpec::new(alpha, 1.0, b).unwrap();
    let cloud = run.empirical_balayage().unwrap();
    let total: f64 = cloud.points.iter().map(|p| p.weight).sum();
    assert!((total - mu.total_mass()).abs() < 1e-9 * total);
    for w in run.window_masses().unwrap() {
        let exact = sector_mass(&spec, w.r, 1e-13).unwrap().value;
        assert!((w.mass - exact).abs() <= 4.0 * w.std_error, "r={}: {} ± {} vs {exact}", w.r, w.mass, w.std_error);
        // far fewer samples than 1/(mass fraction) still resolve the window
        assert!(w.std_error < 0.2 * exact, "r={}: relative error {}", w.r, w.std_error / exact);
    }
}

#[test]
fn window_estimates_are_monotone_under_common_walks() {
    let s = CornerDomain::sector(1.5, 1.0, 0.5).unwrap();
    let z = ComplexPoint::from_polar(0.6, 1.0);
    let windows: Vec<BoundaryWindow> = [0.05, 0.1, 0.2, 0.4, 3.0]
        .iter()
        .map(|&r| BoundaryWindow::new(s.corner(), r))
        .collect();
    let est = wos_harmonic_measures(&s, z, &windows, &McConfig::new(20_000, 4)).unwrap();
    for pair in est.windows(2) {
        assert!(pair[0].mean <= pair[1].mean);
    }
    assert_eq!(est[4].mean, 1.0);
}

#[test]
fn decoupled_wedges_never_exceed_the_full_sweep() {
    let wedges = vec![Wedge { phi: 0.3, alpha: 0.75 }, Wedge { phi: 3.5, alpha: 0.5 }];
    let domain = MultiCornerDomain::new(ComplexPoint::new(0.0, 0.0), wedges, 0.4, 1.0).unwrap();
    let mu = RadialPowerMeasure::new(&domain, 0.4).unwrap();
    let report = decoupling_check(&domain, &mu, &McConfig::new(20_000, 5), &[0.01, 0.05, 0.1, 0.2, 0.3]).unwrap();
    assert!(report.upper_holds);
    for row in &report.rows {
        assert!(row.residual >= 0.0);
        assert!(row.sum_nu_j <= row.nu);
    }
    // each wedge alone is a sector of radius ρ₀ carrying μ restricted to it
    let spec_a = SectorSpec::new(0.75, 0.4, 0.4).unwrap();
    let spec_b = SectorSpec::new(0.5, 0.4, 0.4).unwrap();
    let row = &report.rows[1];
    let exact = sector_mass(&spec_a, row.r, 1e-13).unwrap().value + sector_mass(&spec_b, row.r, 1e-13).unwrap().value;
    assert!((row.sum_nu_j - exact).abs() <= 4.0 * row.sum_se, "{} ± {} vs {exact}", row.sum_nu_j, row.sum_se);
}

#[test]
fn hard_wall_profile_carries_the_wall_mass() {
    let b = 1.0;
    let a = 0.8 * support_radius(b);
    let p = HardWallProblem::sector_wall(b, 0.4, a).unwrap();
    let prof = wall_profile(&p, &McConfig::new(20_000, 12), 64).unwrap();
    // direct quadrature of (b²/π) r^{2b−2} over the sector: (b²/π)·πα·a^{2b}/(2b)
    let direct = b * b / PI * PI * 0.4 * a.powf(2.0 * b) / (2.0 * b);
    let binned: f64 = prof.density.iter().map(|d| d * prof.bin_width).sum();
    assert!((binned - direct).abs() < 1e-9 * direct);
    let normalized: f64 = prof.normalized.iter().map(|d| d * prof.bin_width).sum();
    assert!((normalized - 1.0).abs() < 1e-9);
}

#[test]
fn free_gas_follows_the_circular_law() {
    let cfg = GasConfig { n: 128, beta: 2.0, steps: 600, burn_in: 400, seed: 21 };
    let run = gas_sampler(1.0, None, &cfg, 50).unwrap();
    assert!(run.acceptance > 0.15 && run.acceptance < 0.5, "acceptance {}", run.acceptance);
    let pooled: Vec<ComplexPoint> = run.snapshots.iter().flatten().copied().collect();
    let ks = radial_ks(&pooled, |r| (r * r).min(1.0));
    assert!(ks < 0.05, "ks = {ks}");
    // second moment: batch means of the per-sweep mean |z|²
    let batches: Vec<f64> = run.mean_r2.chunks(60).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    let m = batches.iter().sum::<f64>() / batches.len() as f64;
    let var = batches.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches.len() - 1) as f64;
    let se = (var / batches.len() as f64).sqrt();
    // 1/2 up to the O(1/n) finite-size term
    assert!((m - 0.5).abs() <= 3.0 * se + 1.0 / cfg.n as f64, "mean r² = {m} ± {se}");
}
