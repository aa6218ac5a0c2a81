//! JSON domain files.
//!
//! A corner domain lists its arcs; a multi-corner lists its wedges:
//!
//! ```json
//! {"corner": [0, 0], "alpha": 0.5, "rho0": 0.5,
//!  "arcs": [{"kind": "segment", "from": [0, 0], "to": [1, 0]},
//!           {"kind": "circular_arc", "center": [0, 0], "radius": 1,
//!            "start_angle": 0, "sweep": 1.5707963267948966},
//!           {"kind": "segment", "from": [0, 1], "to": [0, 0]}],
//!  "measure": {"b": 0.25}}
//!
//! {"corner": [0, 0], "rho0": 0.5, "outer_radius": 1,
//!  "wedges": [{"phi": 0, "alpha": 0.5}, {"phi": 3.14159, "alpha": 0.25}]}
//! ```
//!
//! Perturbed arcs use `{"kind": "perturbed_arc", "origin", "phi", "gamma",
//! "kappa", "length", "outward"}`. Optional keys: `phi` (direction of the plus
//! side, read off the boundary when absent), `holder` (`{"gamma", "c1"}`),
//! `measure` (see [`crate::measures::MeasureSpec`]).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::arc::BoundaryArc;
use super::domain::{AnyDomain, CornerDomain, Holder, MultiCornerDomain, PlanarDomain, Wedge};
use super::ComplexPoint;
use crate::error::{Error, Result};
use crate::measures::MeasureSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub corner: ComplexPoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    pub rho0: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arcs: Vec<BoundaryArc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder: Option<Holder>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wedges: Vec<Wedge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
}

/// Which kind of domain a file describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainLayout {
    Corner,
    Multi,
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale.max(1.0)
}

impl DomainFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn layout(&self) -> Result<DomainLayout> {
        match (self.arcs.is_empty(), self.wedges.is_empty()) {
            (false, true) => Ok(DomainLayout::Corner),
            (true, false) => Ok(DomainLayout::Multi),
            _ => Err(Error::param(
                "arcs/wedges",
                "a domain file needs exactly one of `arcs` (corner domain) or `wedges` (multi-corner)",
            )),
        }
    }

    pub fn from_corner(domain: &CornerDomain) -> Self {
        Self {
            corner: domain.corner(),
            alpha: Some(domain.alpha()),
            phi: Some(domain.phi()),
            rho0: domain.rho0(),
            arcs: domain.arcs().to_vec(),
            holder: domain.holder(),
            wedges: Vec::new(),
            outer_radius: None,
            measure: None,
        }
    }

    pub fn from_multi(domain: &MultiCornerDomain) -> Self {
        Self {
            corner: domain.corner(),
            alpha: None,
            phi: None,
            rho0: domain.rho0(),
            arcs: Vec::new(),
            holder: None,
            wedges: domain.wedges().to_vec(),
            outer_radius: Some(domain.outer_radius_value()),
            measure: None,
        }
    }

    pub fn with_measure(mut self, measure: MeasureSpec) -> Self {
        self.measure = Some(measure);
        self
    }

    /// Recognise the three-arc boundary written for exact sectors, so that
    /// loading keeps the closed-form fast paths.
    fn as_sector(&self, alpha: f64) -> Option<(f64, f64)> {
        let [BoundaryArc::Segment { from, to: p0 }, BoundaryArc::CircularArc {
            center,
            radius,
            start_angle,
            sweep,
        }, BoundaryArc::Segment { from: p1, to: back }] = self.arcs.as_slice()
        else {
            return None;
        };
        let c = self.corner;
        let r = *radius;
        let ok = *from == c
            && *back == c
            && *center == c
            && close(*sweep, PI * alpha, 1.0)
            && (p0 - (c + ComplexPoint::from_polar(r, *start_angle))).norm() <= 1e-12 * r
            && (p1 - (c + ComplexPoint::from_polar(r, start_angle + sweep))).norm() <= 1e-12 * r;
        ok.then_some((*start_angle, r))
    }

    pub fn corner_domain(&self) -> Result<CornerDomain> {
        if self.layout()? != DomainLayout::Corner {
            return Err(Error::param("arcs", "this file describes a multi-corner domain"));
        }
        let alpha = self
            .alpha
            .ok_or_else(|| Error::param("alpha", "required for corner domains"))?;
        if let Some((phi, radius)) = self.as_sector(alpha) {
            if self.phi.is_none_or(|p| close(p, phi, 1.0)) {
                return CornerDomain::sector_at(self.corner, phi, alpha, radius, self.rho0);
            }
        }
        CornerDomain::new(
            self.arcs.clone(),
            self.corner,
            alpha,
            self.phi,
            self.rho0,
            self.holder,
        )
    }

    pub fn multi_domain(&self) -> Result<MultiCornerDomain> {
        if self.layout()? != DomainLayout::Multi {
            return Err(Error::param("wedges", "this file describes a single-corner domain"));
        }
        let outer = self
            .outer_radius
            .ok_or_else(|| Error::param("outer_radius", "required for multi-corner domains"))?;
        MultiCornerDomain::new(self.corner, self.wedges.clone(), self.rho0, outer)
    }

    pub fn domain(&self) -> Result<AnyDomain> {
        Ok(match self.layout()? {
            DomainLayout::Corner => AnyDomain::Corner(self.corner_domain()?),
            DomainLayout::Multi => AnyDomain::Multi(self.multi_domain()?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_round_trip_keeps_fast_path() {
        let s = CornerDomain::sector_at(ComplexPoint::new(0.5, -1.0), 0.3, 0.75, 2.0, 1.0).unwrap();
        let file = DomainFile::from_corner(&s);
        let text = file.to_json().unwrap();
        let back = DomainFile::parse(&text).unwrap();
        assert_eq!(back, file);
        let rebuilt = back.corner_domain().unwrap();
        assert_eq!(rebuilt.sector_shape(), s.sector_shape());
    }

    #[test]
    fn perturbed_round_trip() {
        let w = CornerDomain::perturbed_wedge(0.5, 1.0, 0.5, 0.4, 0.1, 0.05).unwrap();
        let file = DomainFile::from_corner(&w);
        let back = DomainFile::parse(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
        let rebuilt = back.corner_domain().unwrap();
        assert_eq!(rebuilt.arcs(), w.arcs());
        assert!(rebuilt.sector_shape().is_none());
    }

    #[test]
    fn multi_round_trip() {
        let m = MultiCornerDomain::new(
            ComplexPoint::new(0.0, 0.0),
            vec![Wedge { phi: 0.0, alpha: 0.5 }, Wedge { phi: 3.0, alpha: 0.25 }],
            0.5,
            1.0,
        )
        .unwrap();
        let file = DomainFile::from_multi(&m);
        let back = DomainFile::parse(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.multi_domain().unwrap().wedges(), m.wedges());
    }

    #[test]
    fn unknown_keys_report_position() {
        let err = DomainFile::parse("{\n \"corner\": [0, 0],\n \"rho\": 1\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
