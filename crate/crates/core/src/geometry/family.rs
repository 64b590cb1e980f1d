use serde::{Deserialize, Serialize};

use super::affine::{AffineMap, AffineMapSpec};
use super::element::{map_element, ElementGeometry};
use super::reference::{reference_element, ElementKind};
use crate::error::{Error, Result};

/// How the size parameters h_i depend on the level j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnisotropyLaw {
    /// h_i(j) = scale_i · ratio^(−exponents_i · j).
    Power {
        ratio: f64,
        exponents: Vec<f64>,
        #[serde(default)]
        scale: Option<Vec<f64>>,
    },
    /// Level j uses `h[j]` directly.
    Explicit { h: Vec<Vec<f64>> },
}

impl AnisotropyLaw {
    /// Named laws: `iso` (2^-j in every direction), `flat1` (2^-j in x1 only)
    /// and `needle` (2^-j in x1 and x2).
    pub fn preset(name: &str, dim: usize) -> Result<Self> {
        let exponents = match name {
            "iso" => vec![1.0, 1.0, 1.0],
            "flat1" => vec![1.0, 0.0, 0.0],
            "needle" => vec![1.0, 1.0, 0.0],
            other => return Err(Error::invalid(format!("unknown family preset '{other}'"))),
        };
        Ok(AnisotropyLaw::Power {
            ratio: 2.0,
            exponents: exponents[..dim].to_vec(),
            scale: None,
        })
    }

    fn sizes_at(&self, dim: usize, j: usize) -> Result<Vec<f64>> {
        let h = match self {
            AnisotropyLaw::Power { ratio, exponents, scale } => {
                if exponents.len() != dim {
                    return Err(Error::invalid(format!("law has {} exponents for dimension {dim}", exponents.len())));
                }
                if !(*ratio > 1.0) {
                    return Err(Error::invalid("refinement ratio must exceed 1"));
                }
                let scale = scale.clone().unwrap_or_else(|| vec![1.0; dim]);
                if scale.len() != dim {
                    return Err(Error::invalid("scale length does not match dimension"));
                }
                exponents
                    .iter()
                    .zip(&scale)
                    .map(|(e, s)| s * ratio.powf(-e * j as f64))
                    .collect::<Vec<_>>()
            }
            AnisotropyLaw::Explicit { h } => {
                let row = h
                    .get(j)
                    .ok_or_else(|| Error::invalid(format!("explicit law has no level {j}")))?;
                if row.len() != dim {
                    return Err(Error::invalid(format!("level {j} has {} sizes for dimension {dim}", row.len())));
                }
                row.clone()
            }
        };
        if h.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::invalid(format!("size parameters must be positive, got {h:?}")));
        }
        Ok(h)
    }
}

/// A sequence of elements diag(h(j)) composed with an optional base map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: ElementKind,
    pub law: AnisotropyLaw,
    #[serde(default)]
    pub first_level: usize,
    pub last_level: usize,
    #[serde(default)]
    pub base_map: Option<AffineMapSpec>,
}

impl FamilySpec {
    pub fn preset(name: &str, kind: ElementKind, first_level: usize, last_level: usize) -> Result<Self> {
        Ok(FamilySpec {
            kind,
            law: AnisotropyLaw::preset(name, kind.dim())?,
            first_level,
            last_level,
            base_map: None,
        })
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.first_level..=self.last_level
    }

    /// Size parameters for every level, validated.
    pub fn sizes(&self) -> Result<Vec<Vec<f64>>> {
        if self.first_level > self.last_level {
            return Err(Error::invalid("first level exceeds last level"));
        }
        let dim = self.kind.dim();
        let sizes = self
            .levels()
            .map(|j| self.law.sizes_at(dim, j))
            .collect::<Result<Vec<_>>>()?;
        for w in sizes.windows(2) {
            if w[1].iter().zip(&w[0]).any(|(b, a)| b > a) {
                return Err(Error::invalid(format!(
                    "size parameters must be non-increasing in the level: {:?} -> {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(sizes)
    }
}

/// Generate the elements of a family, one per level.
pub fn make_family(spec: &FamilySpec) -> Result<Vec<ElementGeometry>> {
    let dim = spec.kind.dim();
    let base = match &spec.base_map {
        Some(m) => AffineMap::from_spec(dim, m)?,
        None => AffineMap::identity(dim),
    };
    let reference = reference_element(spec.kind);
    spec.sizes()?
        .into_iter()
        .map(|h| {
            let map = base.compose(&AffineMap::diagonal(&h)?)?;
            map_element(&reference, &map)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{check_max_angle, check_regular_vertex};

    #[test]
    fn isotropic_family_is_similar() {
        let spec = FamilySpec::preset("iso", ElementKind::Tet, 0, 3).unwrap();
        let fam = make_family(&spec).unwrap();
        assert_eq!(fam.len(), 4);
        for (j, el) in fam.iter().enumerate() {
            let s = 0.5f64.powi(j as i32);
            assert_eq!(el.h, vec![s; 3]);
            assert!((el.diameter - s * 2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn flat_prism_family_keeps_max_angle() {
        let spec = FamilySpec::preset("flat1", ElementKind::Prism, 0, 8).unwrap();
        let fam = make_family(&spec).unwrap();
        let a0 = check_max_angle(&fam[0]).unwrap();
        for (j, el) in fam.iter().enumerate() {
            assert!((el.aspect_ratio() - 2f64.powi(j as i32)).abs() < 1e-12);
            assert!((check_max_angle(el).unwrap() - a0).abs() < 1e-12);
        }
    }

    #[test]
    fn needle_tet_family_keeps_regular_vertex() {
        let spec = FamilySpec::preset("needle", ElementKind::Tet, 0, 8).unwrap();
        for el in make_family(&spec).unwrap() {
            assert_eq!(check_regular_vertex(&el), (0, 1.0));
        }
    }

    #[test]
    fn increasing_sizes_rejected() {
        let spec = FamilySpec {
            kind: ElementKind::Triangle,
            law: AnisotropyLaw::Explicit {
                h: vec![vec![1.0, 1.0], vec![1.0, 2.0]],
            },
            first_level: 0,
            last_level: 1,
            base_map: None,
        };
        assert!(make_family(&spec).is_err());
    }

    #[test]
    fn family_spec_json_round_trip() {
        let spec = FamilySpec::preset("needle", ElementKind::Prism, 1, 4).unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }
}
