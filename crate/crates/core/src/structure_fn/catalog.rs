use super::{ClosedForm, DensityPiece, Spectral, StructureFunction, F1_EXPONENT};
use crate::error::{Error, Result};
use crate::special::gamma_fn;

/// Named examples. `ex2(ε)` accepts any ε in (0, 1/8]; the listed entry uses 1/8.
pub fn catalog() -> Vec<StructureFunction> {
    [
        "exp1",
        "exp-mix",
        "linear-plus-exp",
        "power",
        "ex2(0.125)",
        "f2",
        "f2-spectral",
        "bessel3",
    ]
    .iter()
    .map(|n| lookup(n).expect("catalog entries are valid"))
    .collect()
}

pub fn lookup(name: &str) -> Result<StructureFunction> {
    let name = name.trim();
    match name {
        "exp1" => StructureFunction::bernstein(
            name,
            Spectral {
                atoms: vec![(1.0, 1.0)],
                ..Default::default()
            },
        ),
        "exp-mix" => StructureFunction::bernstein(
            name,
            Spectral {
                atoms: vec![(0.5, 1.0), (2.0, 0.5), (5.0, 0.2)],
                ..Default::default()
            },
        ),
        "linear-plus-exp" => StructureFunction::bernstein(
            name,
            Spectral {
                atoms: vec![(1.0, 1.0)],
                density: vec![],
                linear: 1.0,
            },
        ),
        "power" => {
            // (1+r)^a − 1 = ∫ (1 − e^{−rt}) a/Γ(1−a) t^{−a−1} e^{−t} dt
            let a = F1_EXPONENT;
            StructureFunction::bernstein(
                name,
                Spectral {
                    atoms: vec![],
                    density: vec![DensityPiece {
                        lo: 0.0,
                        hi: f64::INFINITY,
                        power: -a - 1.0,
                        rate: 1.0,
                        weight: a / gamma_fn(1.0 - a),
                    }],
                    linear: 0.0,
                },
            )
        }
        "f2" => StructureFunction::closed_form(name, ClosedForm::CinRoot),
        "f2-spectral" => StructureFunction::finite_n(
            name,
            1,
            Spectral {
                atoms: vec![],
                density: vec![DensityPiece {
                    lo: 0.0,
                    hi: 1.0,
                    power: -1.0,
                    rate: 0.0,
                    weight: 1.0,
                }],
                linear: 0.0,
            },
        ),
        "bessel3" => StructureFunction::finite_n(
            name,
            3,
            Spectral {
                atoms: vec![(1.0, 1.0)],
                ..Default::default()
            },
        ),
        _ => {
            if let Some(inner) = name.strip_prefix("ex2(").and_then(|s| s.strip_suffix(')')) {
                let eps: f64 = inner
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidRequest(format!("cannot parse epsilon in {name}")))?;
                if !(eps > 0.0 && eps <= 0.125) {
                    return Err(Error::Domain(format!("ex2 needs 0 < eps <= 1/8, got {eps}")));
                }
                return StructureFunction::closed_form(&format!("ex2({eps})"), ClosedForm::Ex2 { eps });
            }
            Err(Error::InvalidRequest(format!("unknown structure function '{name}'")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_the_named_examples() {
        let c = catalog();
        assert!(c.len() >= 6);
        for f in &c {
            let (d1, d2) = f.origin().unwrap();
            assert!(d1 > 0.0 && d2 < 0.0, "{}", f.name);
        }
    }

    #[test]
    fn ex2_parameter() {
        let f = lookup("ex2(0.1)").unwrap();
        let d2 = f.eval(0.0, 2).unwrap();
        assert!((d2 - (-11.0 / 144.0 - 0.1 / 24.0)).abs() < 1e-15);
        assert!(lookup("ex2(0.5)").is_err());
        assert!(lookup("nope").is_err());
    }
}
