//! JSON form of a structure function:
//! `{"kind": "bernstein" | "finite_n" | "closed_form", "name", "atoms": [[t, w], ...],
//!   "A", "density": [{"lo", "hi", "power", "rate", "weight"}], "N", "formula", "param"}`.
//! An infinite upper limit is written as `"hi": null`.

use serde::{Deserialize, Serialize};

use super::{ClosedForm, DensityPiece, Kind, Spectral, StructureFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DescriptorPiece {
    pub lo: f64,
    pub hi: Option<f64>,
    pub power: f64,
    #[serde(default)]
    pub rate: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Descriptor {
    pub kind: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default, rename = "A")]
    pub linear: f64,
    #[serde(default)]
    pub density: Vec<DescriptorPiece>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
}

fn spectral_from(d: &Descriptor) -> Spectral {
    Spectral {
        atoms: d.atoms.iter().map(|a| (a[0], a[1])).collect(),
        density: d
            .density
            .iter()
            .map(|p| DensityPiece {
                lo: p.lo,
                hi: p.hi.unwrap_or(f64::INFINITY),
                power: p.power,
                rate: p.rate,
                weight: p.weight,
            })
            .collect(),
        linear: d.linear,
    }
}

fn pieces_to(s: &Spectral) -> Vec<DescriptorPiece> {
    s.density
        .iter()
        .map(|p| DescriptorPiece {
            lo: p.lo,
            hi: if p.hi.is_finite() { Some(p.hi) } else { None },
            power: p.power,
            rate: p.rate,
            weight: p.weight,
        })
        .collect()
}

impl StructureFunction {
    pub fn from_descriptor(d: &Descriptor) -> Result<Self> {
        let name = d.name.clone().unwrap_or_else(|| d.kind.clone());
        match d.kind.as_str() {
            "bernstein" => StructureFunction::bernstein(&name, spectral_from(d)),
            "finite_n" => {
                let n = d
                    .n
                    .ok_or_else(|| Error::InvalidRequest("finite_n descriptor needs \"N\"".into()))?;
                StructureFunction::finite_n(&name, n, spectral_from(d))
            }
            "closed_form" => {
                let form = match d.formula.as_deref() {
                    Some("power") => ClosedForm::Power {
                        exponent: d.param.unwrap_or(super::F1_EXPONENT),
                    },
                    Some("cin") => ClosedForm::CinRoot,
                    Some("ex2") => ClosedForm::Ex2 {
                        eps: d.param.unwrap_or(0.125),
                    },
                    other => {
                        return Err(Error::InvalidRequest(format!("unknown closed form {other:?}")))
                    }
                };
                StructureFunction::closed_form(&name, form)
            }
            other => Err(Error::InvalidRequest(format!("unknown structure function kind '{other}'"))),
        }
    }

    pub fn to_descriptor(&self) -> Descriptor {
        let mut d = Descriptor {
            kind: String::new(),
            name: Some(self.name.clone()),
            atoms: vec![],
            linear: 0.0,
            density: vec![],
            n: None,
            formula: None,
            param: None,
        };
        match &self.kind {
            Kind::Bernstein(s) | Kind::FiniteN { spectral: s, .. } => {
                d.kind = if matches!(self.kind, Kind::Bernstein(_)) {
                    "bernstein".into()
                } else {
                    "finite_n".into()
                };
                d.atoms = s.atoms.iter().map(|&(t, w)| [t, w]).collect();
                d.linear = s.linear;
                d.density = pieces_to(s);
                if let Kind::FiniteN { n, .. } = &self.kind {
                    d.n = Some(*n);
                }
            }
            Kind::ClosedForm(c) => {
                d.kind = "closed_form".into();
                match c {
                    ClosedForm::Power { exponent } => {
                        d.formula = Some("power".into());
                        d.param = Some(*exponent);
                    }
                    ClosedForm::CinRoot => d.formula = Some("cin".into()),
                    ClosedForm::Ex2 { eps } => {
                        d.formula = Some("ex2".into());
                        d.param = Some(*eps);
                    }
                }
            }
        }
        d
    }

    /// Catalog name, inline JSON, or `@path` to a JSON file.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if let Some(path) = s.strip_prefix('@') {
            let text = std::fs::read_to_string(path)?;
            let d: Descriptor = serde_json::from_str(&text)?;
            return Self::from_descriptor(&d);
        }
        if s.starts_with('{') {
            let d: Descriptor = serde_json::from_str(s)?;
            return Self::from_descriptor(&d);
        }
        super::lookup(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure_fn::catalog;

    #[test]
    fn catalog_round_trips_through_json() {
        for f in catalog() {
            let text = serde_json::to_string(&f.to_descriptor()).unwrap();
            let back = StructureFunction::parse_spec(&text).unwrap();
            assert_eq!(back, f, "{text}");
        }
    }

    #[test]
    fn inline_descriptor() {
        let f = StructureFunction::parse_spec(r#"{"kind":"bernstein","atoms":[[2.0,0.5]],"A":0.1}"#).unwrap();
        assert!((f.eval(0.0, 1).unwrap() - 1.1).abs() < 1e-15);
        assert!(StructureFunction::parse_spec(r#"{"kind":"nope"}"#).is_err());
    }
}
