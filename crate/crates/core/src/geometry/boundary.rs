use num_complex::Complex64;
use std::f64::consts::TAU;
use std::ops::Range;

use super::arc::BoundaryArc;
use crate::error::{Error, Result};

/// Nearest boundary point for a query point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Closest {
    /// Lower bound on the Euclidean distance to the boundary; exact unless a
    /// perturbed arc is nearest, in which case it is at least 90% of it.
    pub distance: f64,
    pub point: Complex64,
    pub arc: usize,
    pub t: f64,
}

/// A closed boundary made of one or more closed curves, each an ordered run of
/// arcs whose end points chain together.
#[derive(Clone, Debug)]
pub struct Boundary {
    arcs: Vec<BoundaryArc>,
    curves: Vec<Range<usize>>,
    offsets: Vec<f64>,
    lengths: Vec<f64>,
    anchor: Complex64,
    scale: f64,
}

impl Boundary {
    /// Build a boundary from arcs listed curve by curve. A new curve starts
    /// whenever an arc closes the current one. `anchor` is the reference point
    /// for ray casting; every perturbed arc must emanate from it.
    pub fn new(arcs: Vec<BoundaryArc>, anchor: Complex64) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::DegenerateDomain("boundary has no arcs".into()));
        }
        for arc in &arcs {
            arc.validate()?;
        }
        let scale = arcs
            .iter()
            .map(|a| a.max_distance_from(anchor))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let tol = 1e-9 * scale;
        for arc in &arcs {
            if let Some(origin) = arc.perturbed_origin() {
                if (origin - anchor).norm() > tol {
                    return Err(Error::DegenerateDomain(
                        "perturbed arcs must emanate from the corner".into(),
                    ));
                }
            }
        }

        let mut curves = Vec::new();
        let mut start = 0;
        for i in 0..arcs.len() {
            let end = arcs[i].end();
            if (end - arcs[start].start()).norm() <= tol {
                curves.push(start..i + 1);
                start = i + 1;
            } else if i + 1 < arcs.len() && (end - arcs[i + 1].start()).norm() > tol {
                return Err(Error::DegenerateDomain(format!(
                    "arc {i} ends at {end} but arc {} starts at {}",
                    i + 1,
                    arcs[i + 1].start()
                )));
            }
        }
        if start != arcs.len() {
            return Err(Error::DegenerateDomain(
                "boundary does not close up".into(),
            ));
        }

        let mut offsets = vec![0.0; arcs.len()];
        let mut lengths = Vec::with_capacity(curves.len());
        for curve in &curves {
            let mut s = 0.0;
            for i in curve.clone() {
                offsets[i] = s;
                s += arcs[i].length();
            }
            lengths.push(s);
        }

        Ok(Self {
            arcs,
            curves,
            offsets,
            lengths,
            anchor,
            scale,
        })
    }

    pub fn arcs(&self) -> &[BoundaryArc] {
        &self.arcs
    }

    pub fn curves(&self) -> &[Range<usize>] {
        &self.curves
    }

    /// Largest distance from the anchor to the boundary.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    /// Point-in-domain test by ray casting along the ray from `z` directed
    /// away from the anchor.
    pub fn contains(&self, z: Complex64) -> bool {
        let d = z - self.anchor;
        let n = d.norm();
        if n == 0.0 || !n.is_finite() {
            return false;
        }
        let dir = d / n;
        let crossings: u32 = self.arcs.iter().map(|a| a.ray_crossings(z, dir)).sum();
        crossings % 2 == 1
    }

    pub fn closest(&self, z: Complex64) -> Closest {
        let mut best = Closest {
            distance: f64::INFINITY,
            point: z,
            arc: 0,
            t: 0.0,
        };
        // exact arcs first so that perturbed arcs can often be skipped
        let perturbed = |a: &BoundaryArc| matches!(a, BoundaryArc::PerturbedArc { .. });
        let order = (0..self.arcs.len())
            .filter(|&i| !perturbed(&self.arcs[i]))
            .chain((0..self.arcs.len()).filter(|&i| perturbed(&self.arcs[i])));
        for i in order {
            let arc = &self.arcs[i];
            if perturbed(arc) && arc.distance_floor(z) >= best.distance {
                continue;
            }
            let q = arc.closest(z);
            if q.distance < best.distance {
                best = Closest {
                    distance: q.distance,
                    point: q.point,
                    arc: i,
                    t: q.t,
                };
            }
        }
        best
    }

    /// Curve index and arclength position of a boundary point.
    pub fn arclength_position(&self, arc: usize, t: f64) -> (usize, f64) {
        let curve = self
            .curves
            .iter()
            .position(|c| c.contains(&arc))
            .expect("arc index belongs to a curve");
        (curve, self.offsets[arc] + self.arcs[arc].arclength_to(t))
    }

    pub fn curve_length(&self, curve: usize) -> f64 {
        self.lengths[curve]
    }

    /// Sorted polar angles in `[0, 2π)` (about `center`) where the circle of
    /// radius `r` meets the boundary.
    pub fn circle_crossings(&self, center: Complex64, r: f64) -> Result<Vec<f64>> {
        let tol = 1e-12 * self.scale;
        let mut angles = Vec::new();
        for arc in &self.arcs {
            arc.circle_crossings(center, r, tol, &mut angles)?;
        }
        let mut angles: Vec<f64> = angles.into_iter().map(|a| a.rem_euclid(TAU)).collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if angles.len() > 1 && angles[0] + TAU - angles[angles.len() - 1] < 1e-12 {
            angles.pop();
        }
        Ok(angles)
    }

    /// Angular intervals `(lo, hi)`, `lo ∈ [0, 2π)`, `lo < hi ≤ lo + 2π`, of the
    /// set `{θ : center + r·e^{iθ} ∈ Ω}`.
    pub fn angular_intervals(&self, center: Complex64, r: f64) -> Result<Vec<(f64, f64)>> {
        let angles = self.circle_crossings(center, r)?;
        let inside = |theta: f64| self.contains(center + Complex64::from_polar(r, theta));
        if angles.is_empty() {
            return Ok(if inside(0.0) { vec![(0.0, TAU)] } else { Vec::new() });
        }
        let k = angles.len();
        let mut gaps: Vec<(f64, f64, bool)> = (0..k)
            .map(|i| {
                let lo = angles[i];
                let hi = if i + 1 < k { angles[i + 1] } else { angles[0] + TAU };
                (lo, hi, inside(0.5 * (lo + hi)))
            })
            .collect();
        // rotate so that the list starts right after an outside gap, then merge
        if let Some(first_out) = gaps.iter().position(|g| !g.2) {
            gaps.rotate_left((first_out + 1) % k);
        } else {
            return Ok(vec![(0.0, TAU)]);
        }
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut open: Option<(f64, f64)> = None;
        for (lo, hi, inn) in gaps {
            if inn {
                open = Some(match open {
                    Some((a, _)) => (a, hi),
                    None => (lo, hi),
                });
            } else if let Some(iv) = open.take() {
                out.push(iv);
            }
        }
        if let Some(iv) = open {
            out.push(iv);
        }
        for iv in &mut out {
            let shift = iv.0.rem_euclid(TAU) - iv.0;
            iv.0 += shift;
            iv.1 += shift;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_disk() -> Boundary {
        Boundary::new(
            vec![BoundaryArc::CircularArc {
                center: Complex64::new(0.0, 0.0),
                radius: 1.0,
                start_angle: 0.0,
                sweep: TAU,
            }],
            Complex64::new(1.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn open_chain_is_rejected() {
        let arcs = vec![
            BoundaryArc::Segment {
                from: Complex64::new(0.0, 0.0),
                to: Complex64::new(1.0, 0.0),
            },
            BoundaryArc::Segment {
                from: Complex64::new(1.0, 0.0),
                to: Complex64::new(1.0, 1.0),
            },
        ];
        assert!(matches!(
            Boundary::new(arcs, Complex64::new(0.0, 0.0)),
            Err(Error::DegenerateDomain(_))
        ));
    }

    #[test]
    fn disk_membership_and_intervals() {
        let b = unit_disk();
        assert!(b.contains(Complex64::new(0.0, 0.0)));
        assert!(b.contains(Complex64::new(-0.9, 0.3)));
        assert!(!b.contains(Complex64::new(1.1, 0.0)));
        // circle of radius 1 about the boundary point 1: the arc inside the disk
        let iv = b.angular_intervals(Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert_eq!(iv.len(), 1);
        assert!((iv[0].1 - iv[0].0 - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((b.curve_length(0) - TAU).abs() < 1e-12);
    }
}
