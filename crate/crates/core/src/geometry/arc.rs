use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::quadrature;

/// One piece of a boundary curve.
///
/// A `PerturbedArc` is the curve `r ↦ origin + r·exp(i(phi + kappa·r^gamma))`,
/// `r ∈ [0, length]`, traversed away from `origin` when `outward` is set and
/// towards it otherwise. It is `C^{1,gamma}` with tangent direction `phi` at the
/// origin and satisfies `|w(r) − origin| = r` exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryArc {
    Segment {
        from: Complex64,
        to: Complex64,
    },
    CircularArc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    PerturbedArc {
        origin: Complex64,
        phi: f64,
        gamma: f64,
        kappa: f64,
        length: f64,
        outward: bool,
    },
}

/// Nearest-point query result for a single arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcClosest {
    /// Lower bound on the distance (exact for segments and circular arcs).
    pub distance: f64,
    /// Best boundary point found.
    pub point: Complex64,
    /// Traversal parameter of `point` in `[0, 1]`.
    pub t: f64,
}

#[inline]
fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

#[inline]
fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Wrap an angle into `(−π, π]`.
#[inline]
pub(crate) fn wrap_pi(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Position of `angle` along a circular arc, as a fraction of the sweep, if
/// the angle lies on the arc (endpoints included up to `slack`).
fn arc_fraction(angle: f64, start: f64, sweep: f64, slack: f64) -> Option<f64> {
    let diff = if sweep >= 0.0 {
        (angle - start).rem_euclid(TAU)
    } else {
        (start - angle).rem_euclid(TAU)
    };
    let span = sweep.abs();
    if diff <= span + slack {
        Some((diff / span).min(1.0))
    } else if TAU - diff <= slack {
        Some(0.0)
    } else {
        None
    }
}

/// Distance from the point with polar coordinates `(rho, theta)` to the
/// annular sector `r ∈ [r1, r2]`, `θ ∈ [t1, t2]` (angular width below π).
fn annular_sector_distance(rho: f64, theta: f64, r1: f64, r2: f64, t1: f64, t2: f64) -> f64 {
    let half = 0.5 * (t2 - t1);
    let dth = wrap_pi(theta - 0.5 * (t1 + t2));
    if dth.abs() <= half {
        return (r1 - rho).max(rho - r2).max(0.0);
    }
    let to_edge = |edge: f64| {
        let delta = dth - edge;
        let (s, c) = delta.sin_cos();
        let x = rho * c;
        let y = rho * s;
        (x - x.clamp(r1, r2)).hypot(y)
    };
    to_edge(half).min(to_edge(-half))
}

fn segment_closest(from: Complex64, to: Complex64, p: Complex64) -> ArcClosest {
    let e = to - from;
    let len2 = e.norm_sqr();
    let t = if len2 > 0.0 {
        (dot(p - from, e) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let point = from + e * t;
    ArcClosest {
        distance: (p - point).norm(),
        point,
        t,
    }
}

fn circular_closest(center: Complex64, radius: f64, start: f64, sweep: f64, p: Complex64) -> ArcClosest {
    let d = p - center;
    let rho = d.norm();
    if rho > 0.0 {
        if let Some(t) = arc_fraction(d.arg(), start, sweep, 0.0) {
            let point = center + d * (radius / rho);
            return ArcClosest {
                distance: (rho - radius).abs(),
                point,
                t,
            };
        }
    }
    let a = center + Complex64::from_polar(radius, start);
    let b = center + Complex64::from_polar(radius, start + sweep);
    let (da, db) = ((p - a).norm(), (p - b).norm());
    if da <= db {
        ArcClosest { distance: da, point: a, t: 0.0 }
    } else {
        ArcClosest { distance: db, point: b, t: 1.0 }
    }
}

/// Perturbed-arc geometry in local polar form.
#[derive(Clone, Copy)]
struct Perturbed {
    origin: Complex64,
    phi: f64,
    gamma: f64,
    kappa: f64,
    length: f64,
}

impl Perturbed {
    #[inline]
    fn psi(&self, r: f64) -> f64 {
        self.phi + self.kappa * r.powf(self.gamma)
    }

    #[inline]
    fn at(&self, r: f64) -> Complex64 {
        self.origin + Complex64::from_polar(r, self.psi(r))
    }

    /// Upper bound on the curvature of the arc over `r ∈ [r1, r2]`, `r1 > 0`.
    fn curvature_bound(&self, r1: f64, r2: f64) -> f64 {
        let (k, g) = (self.kappa, self.gamma);
        let t1 = k * g * (1.0 + g) * r1.powf(g - 1.0);
        let e = 3.0 * g - 1.0;
        let t2 = k.powi(3) * g.powi(3) * r1.powf(e).max(r2.powf(e));
        t1 + t2
    }

    /// Certified lower bound on the distance from `p` to the sub-arc over
    /// `[r1, r2]`: the better of the annular-sector hull and the chord minus
    /// the sagitta bound.
    fn piece_lower_bound(&self, p: Complex64, rho: f64, theta: f64, r1: f64, r2: f64) -> f64 {
        let hull = annular_sector_distance(rho, theta, r1, r2, self.psi(r1), self.psi(r2));
        if r1 <= 0.0 {
            return hull;
        }
        let (a, b) = (self.at(r1), self.at(r2));
        let chord = segment_closest(a, b, p).distance;
        let slope = self.kappa * self.gamma * r2.powf(self.gamma).max(r1.powf(self.gamma));
        let arclength = (r2 - r1) * (1.0 + slope * slope).sqrt();
        let sagitta = self.curvature_bound(r1, r2) * arclength * arclength / 8.0;
        hull.max(chord - sagitta)
    }

    /// Branch-and-bound nearest-point search. Returns a certified lower bound
    /// on the distance that is within 10% of the best distance found, and the
    /// corresponding boundary point and radius.
    fn closest(&self, p: Complex64) -> (f64, Complex64, f64) {
        const SHRINK: f64 = 0.9;
        const LEVELS: usize = 60;
        const MAX_SPLITS: usize = 400;

        let d = p - self.origin;
        let rho = d.norm();
        let theta = d.arg();
        let mut best_r = rho.min(self.length);
        let mut best = (self.at(best_r) - p).norm();
        for r in [0.0, self.length] {
            let dist = (self.at(r) - p).norm();
            if dist < best {
                best = dist;
                best_r = r;
            }
        }
        if best == 0.0 {
            return (0.0, self.at(best_r), best_r);
        }

        let mut pieces: Vec<(f64, f64, f64)> = Vec::with_capacity(32);
        let mut hi = self.length;
        for _ in 0..LEVELS {
            let lo = 0.5 * hi;
            if lo <= rho + best && hi >= rho - best {
                let lb = self.piece_lower_bound(p, rho, theta, lo, hi);
                if lb < best {
                    pieces.push((lb, lo, hi));
                }
            }
            hi = lo;
        }
        if hi >= rho - best {
            let lb = self.piece_lower_bound(p, rho, theta, 0.0, hi);
            if lb < best {
                pieces.push((lb, 0.0, hi));
            }
        }

        for _ in 0..MAX_SPLITS {
            let Some((idx, &(lb, r1, r2))) = pieces
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            else {
                return (best, self.at(best_r), best_r);
            };
            if lb >= SHRINK * best {
                return (lb, self.at(best_r), best_r);
            }
            pieces.swap_remove(idx);
            let mid = 0.5 * (r1 + r2);
            let dm = (self.at(mid) - p).norm();
            if dm < best {
                best = dm;
                best_r = mid;
                pieces.retain(|piece| piece.0 < best);
            }
            for (a, b) in [(r1, mid), (mid, r2)] {
                let lb = self.piece_lower_bound(p, rho, theta, a, b);
                if lb < best {
                    pieces.push((lb, a, b));
                }
            }
        }
        let lb = pieces.iter().map(|p| p.0).fold(best, f64::min);
        (lb, self.at(best_r), best_r)
    }
}

impl BoundaryArc {
    fn perturbed(&self) -> Option<(Perturbed, bool)> {
        match *self {
            BoundaryArc::PerturbedArc {
                origin,
                phi,
                gamma,
                kappa,
                length,
                outward,
            } => Some((
                Perturbed {
                    origin,
                    phi,
                    gamma,
                    kappa,
                    length,
                },
                outward,
            )),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        match *self {
            BoundaryArc::Segment { from, to } => {
                if !finite(from) || !finite(to) || from == to {
                    return Err(Error::DegenerateDomain(format!(
                        "segment {from} -> {to} is degenerate"
                    )));
                }
            }
            BoundaryArc::CircularArc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                if !finite(center)
                    || !(radius > 0.0 && radius.is_finite())
                    || !start_angle.is_finite()
                    || !(sweep.abs() > 0.0 && sweep.abs() <= TAU)
                {
                    return Err(Error::DegenerateDomain(format!(
                        "circular arc (center {center}, radius {radius}, sweep {sweep}) is degenerate"
                    )));
                }
            }
            BoundaryArc::PerturbedArc {
                origin,
                phi,
                gamma,
                kappa,
                length,
                ..
            } => {
                if !finite(origin)
                    || !phi.is_finite()
                    || !(gamma > 0.0 && gamma <= 1.0)
                    || !(kappa >= 0.0 && kappa.is_finite())
                    || !(length > 0.0 && length.is_finite())
                {
                    return Err(Error::DegenerateDomain(
                        "perturbed arc needs gamma in (0, 1], kappa >= 0 and positive length".into(),
                    ));
                }
                if kappa * length.powf(gamma) >= PI / 2.0 {
                    return Err(Error::DegenerateDomain(
                        "perturbed arc turns by more than π/2; shorten it or reduce kappa".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Point at traversal parameter `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            BoundaryArc::Segment { from, to } => from + (to - from) * t,
            BoundaryArc::CircularArc {
                center,
                radius,
                start_angle,
                sweep,
            } => center + Complex64::from_polar(radius, start_angle + t * sweep),
            BoundaryArc::PerturbedArc { .. } => {
                let (pa, outward) = self.perturbed().unwrap();
                let s = if outward { t } else { 1.0 - t };
                pa.at(s * pa.length)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    /// Arclength from the start of the arc to parameter `t`.
    pub fn arclength_to(&self, t: f64) -> f64 {
        match *self {
            BoundaryArc::Segment { from, to } => (to - from).norm() * t,
            BoundaryArc::CircularArc { radius, sweep, .. } => radius * sweep.abs() * t,
            BoundaryArc::PerturbedArc { .. } => {
                let (pa, outward) = self.perturbed().unwrap();
                let speed = |r: f64| {
                    let s = pa.kappa * pa.gamma * r.powf(pa.gamma);
                    (1.0 + s * s).sqrt()
                };
                let (a, b) = if outward {
                    (0.0, t * pa.length)
                } else {
                    ((1.0 - t) * pa.length, pa.length)
                };
                if b <= a {
                    return 0.0;
                }
                quadrature::integrate(speed, a, b, 1e-13, 1e-12)
                    .map(|q| q.value)
                    .unwrap_or(b - a)
            }
        }
    }

    pub fn length(&self) -> f64 {
        self.arclength_to(1.0)
    }

    /// Distance lower bound and nearest point.
    pub fn closest(&self, p: Complex64) -> ArcClosest {
        match *self {
            BoundaryArc::Segment { from, to } => segment_closest(from, to, p),
            BoundaryArc::CircularArc {
                center,
                radius,
                start_angle,
                sweep,
            } => circular_closest(center, radius, start_angle, sweep, p),
            BoundaryArc::PerturbedArc { .. } => {
                let (pa, outward) = self.perturbed().unwrap();
                let (distance, point, r) = pa.closest(p);
                let s = r / pa.length;
                ArcClosest {
                    distance,
                    point,
                    t: if outward { s } else { 1.0 - s },
                }
            }
        }
    }

    /// Cheap lower bound on the distance from `p` to a perturbed arc; zero for
    /// other arcs.
    pub(crate) fn distance_floor(&self, p: Complex64) -> f64 {
        match self.perturbed() {
            Some((pa, _)) => {
                let d = p - pa.origin;
                pa.piece_lower_bound(p, d.norm(), d.arg(), 0.0, pa.length)
            }
            None => 0.0,
        }
    }

    /// Number of crossings of the ray `{p + s·dir : s > 0}` with this arc.
    ///
    /// Perturbed arcs are only handled for rays that point radially away from
    /// their origin, which is what the owning boundary guarantees.
    pub(crate) fn ray_crossings(&self, p: Complex64, dir: Complex64) -> u32 {
        match *self {
            BoundaryArc::Segment { from, to } => {
                let e = to - from;
                let denom = cross(dir, e);
                if denom == 0.0 {
                    return 0;
                }
                let w = from - p;
                let s = cross(w, e) / denom;
                let u = cross(w, dir) / denom;
                u32::from(s > 0.0 && (0.0..1.0).contains(&u))
            }
            BoundaryArc::CircularArc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let f = p - center;
                let half_b = dot(dir, f);
                let c = f.norm_sqr() - radius * radius;
                let disc = half_b * half_b - c;
                if disc <= 0.0 {
                    return 0;
                }
                let root = disc.sqrt();
                let mut count = 0;
                for s in [-half_b - root, -half_b + root] {
                    if s <= 0.0 {
                        continue;
                    }
                    let q = f + dir * s;
                    if let Some(frac) = arc_fraction(q.arg(), start_angle, sweep, 0.0) {
                        if frac < 1.0 || sweep.abs() < TAU {
                            // half-open: the end point belongs to the next arc
                            if frac < 1.0 {
                                count += 1;
                            }
                        }
                    }
                }
                count
            }
            BoundaryArc::PerturbedArc { .. } => {
                let (pa, _) = self.perturbed().unwrap();
                let d = p - pa.origin;
                let rho = d.norm();
                if pa.kappa == 0.0 || rho == 0.0 {
                    return 0;
                }
                let theta = d.arg();
                let lo = pa.psi(0.0);
                let hi = pa.psi(pa.length);
                // psi is increasing; find theta + 2πk inside [lo, hi]
                let k = ((lo - theta) / TAU).ceil();
                let target = theta + k * TAU;
                if target < lo || target > hi {
                    return 0;
                }
                let r = ((target - pa.phi) / pa.kappa).powf(1.0 / pa.gamma);
                u32::from(r > rho && r > 0.0 && r <= pa.length)
            }
        }
    }

    /// Polar angles (about `center`) of the points where this arc meets the
    /// circle `|z − center| = r`. Returns an error if the arc lies on the circle.
    pub(crate) fn circle_crossings(&self, center: Complex64, r: f64, tol: f64, out: &mut Vec<f64>) -> Result<()> {
        match *self {
            BoundaryArc::Segment { from, to } => {
                let e = to - from;
                let f = from - center;
                let a = e.norm_sqr();
                let half_b = dot(e, f);
                let c = f.norm_sqr() - r * r;
                let disc = half_b * half_b - a * c;
                if disc < 0.0 {
                    return Ok(());
                }
                let root = disc.sqrt();
                for u in [(-half_b - root) / a, (-half_b + root) / a] {
                    if (0.0..=1.0).contains(&u) {
                        out.push((f + e * u).arg());
                    }
                }
                if disc == 0.0 {
                    out.pop();
                }
            }
            BoundaryArc::CircularArc {
                center: c2,
                radius,
                start_angle,
                sweep,
            } => {
                let delta = c2 - center;
                let dist = delta.norm();
                if dist <= tol {
                    if (radius - r).abs() <= tol {
                        return Err(Error::OutOfRange(format!(
                            "circle of radius {r} coincides with a boundary arc"
                        )));
                    }
                    return Ok(());
                }
                if dist > radius + r || dist < (radius - r).abs() {
                    return Ok(());
                }
                let a = (r * r - radius * radius + dist * dist) / (2.0 * dist);
                let h = (r * r - a * a).max(0.0).sqrt();
                let u = delta / dist;
                let perp = Complex64::new(-u.im, u.re);
                for sign in [1.0, -1.0] {
                    let q = u * a + perp * (sign * h);
                    let on_arc = q + center - c2;
                    if arc_fraction(on_arc.arg(), start_angle, sweep, 1e-12).is_some() {
                        out.push(q.arg());
                    }
                    if h == 0.0 {
                        break;
                    }
                }
            }
            BoundaryArc::PerturbedArc { .. } => {
                let (pa, _) = self.perturbed().unwrap();
                if (pa.origin - center).norm() <= tol {
                    if r <= pa.length {
                        out.push(pa.psi(r));
                    }
                    return Ok(());
                }
                const GRID: usize = 256;
                let g = |s: f64| (pa.at(s) - center).norm() - r;
                let mut prev_s = 0.0;
                let mut prev = g(0.0);
                for i in 1..=GRID {
                    let s = pa.length * i as f64 / GRID as f64;
                    let cur = g(s);
                    if prev == 0.0 {
                        out.push((pa.at(prev_s) - center).arg());
                    } else if prev * cur < 0.0 {
                        let (mut lo, mut hi) = (prev_s, s);
                        for _ in 0..80 {
                            let mid = 0.5 * (lo + hi);
                            if g(lo) * g(mid) <= 0.0 {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        out.push((pa.at(0.5 * (lo + hi)) - center).arg());
                    }
                    prev_s = s;
                    prev = cur;
                }
                if prev == 0.0 {
                    out.push((pa.at(pa.length) - center).arg());
                }
            }
        }
        Ok(())
    }

    /// Largest distance from `center` to a point of the arc.
    pub(crate) fn max_distance_from(&self, center: Complex64) -> f64 {
        match *self {
            BoundaryArc::Segment { from, to } => (from - center).norm().max((to - center).norm()),
            BoundaryArc::CircularArc {
                center: c2,
                radius,
                start_angle,
                sweep,
            } => {
                let delta = c2 - center;
                let ends = (self.start() - center).norm().max((self.end() - center).norm());
                let far_dir = if delta.norm() > 0.0 { delta.arg() } else { start_angle };
                if arc_fraction(far_dir, start_angle, sweep, 0.0).is_some() {
                    delta.norm() + radius
                } else {
                    ends
                }
            }
            BoundaryArc::PerturbedArc { .. } => {
                let (pa, _) = self.perturbed().unwrap();
                (0..=512)
                    .map(|i| (pa.at(pa.length * i as f64 / 512.0) - center).norm())
                    .fold(0.0, f64::max)
                    + pa.length / 256.0
            }
        }
    }

    pub(crate) fn perturbed_origin(&self) -> Option<Complex64> {
        match *self {
            BoundaryArc::PerturbedArc { origin, .. } => Some(origin),
            _ => None,
        }
    }
}
