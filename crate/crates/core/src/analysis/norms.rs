//! L^p norms over physical elements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::geometry::{ElementGeometry, ElementKind};
use crate::quadrature::make_rule;

/// Default quadrature exactness for norms.
pub const NORM_EXACTNESS: usize = 20;
/// Default lattice points per axis for the sampled sup-norm.
pub const SUP_LATTICE: usize = 20;

/// An exponent p ∈ [1, ∞].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(PNorm::Infinity)
        } else if p >= 1.0 {
            Ok(PNorm::Finite(p))
        } else {
            Err(Error::invalid(format!("p must lie in [1, inf], got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            PNorm::Finite(p) => p,
            PNorm::Infinity => f64::INFINITY,
        }
    }

    /// Column-name suffix: `p1`, `p2`, `pinf`.
    pub fn label(self) -> String {
        format!("p{self}")
    }

    /// Parse a comma-separated list such as `1,2,inf`.
    pub fn parse_list(s: &str) -> Result<Vec<PNorm>> {
        let list: Vec<PNorm> = s.split(',').map(|t| t.trim().parse()).collect::<Result<_>>()?;
        if list.is_empty() {
            return Err(Error::invalid("empty p list"));
        }
        Ok(list)
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::Finite(p) => write!(f, "{p}"),
            PNorm::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(PNorm::Infinity),
            t => PNorm::new(t.parse().map_err(|_| Error::invalid(format!("bad p value '{t}'")))?),
        }
    }
}

impl Serialize for PNorm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PNorm::Finite(p) => s.serialize_f64(*p),
            PNorm::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => PNorm::new(p),
            Raw::Str(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub p: PNorm,
    pub exactness: usize,
    /// Lattice points per axis added to the quadrature nodes when p = ∞.
    pub lattice: usize,
}

impl NormSpec {
    pub fn new(p: PNorm) -> Self {
        NormSpec {
            p,
            exactness: NORM_EXACTNESS,
            lattice: SUP_LATTICE,
        }
    }
}

/// Uniform lattice on the reference element with n points per axis.
pub fn reference_lattice(kind: ElementKind, n: usize) -> Vec<[f64; 3]> {
    let n = n.max(2);
    let t = |i: usize| i as f64 / (n - 1) as f64;
    let mut out = Vec::new();
    match kind {
        ElementKind::Triangle => {
            for i in 0..n {
                for j in 0..n - i {
                    out.push([t(i), t(j), 0.0]);
                }
            }
        }
        ElementKind::Tet => {
            for i in 0..n {
                for j in 0..n - i {
                    for l in 0..n - i - j {
                        out.push([t(i), t(j), t(l)]);
                    }
                }
            }
        }
        ElementKind::Prism => {
            for i in 0..n {
                for j in 0..n - i {
                    for l in 0..n {
                        out.push([t(i), t(j), t(l)]);
                    }
                }
            }
        }
    }
    out
}

/// ‖f‖_{0,p,T} for a field evaluated at reference points: `f(x̂, x, out)`
/// receives both the reference point and its physical image.
pub fn lp_norm_with<G>(el: &ElementGeometry, spec: &NormSpec, ncomp: usize, f: G) -> Result<f64>
where
    G: Fn(&[f64], &[f64], &mut [f64]),
{
    let d = el.dim();
    let rule = make_rule(el.kind.domain(), spec.exactness)?;
    let mut buf = vec![0.0; ncomp];
    let sample = |xhat: &[f64], buf: &mut [f64]| -> Result<()> {
        let x = el.to_physical(xhat);
        f(&xhat[..d], &x[..d], buf);
        if buf.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("non-finite value in norm evaluation", Some(&x[..d])));
        }
        Ok(())
    };
    match spec.p {
        PNorm::Infinity => {
            let mut max = 0.0f64;
            for (xhat, _) in rule.iter() {
                sample(xhat, &mut buf)?;
                max = buf.iter().fold(max, |m, v| m.max(v.abs()));
            }
            for xhat in reference_lattice(el.kind, spec.lattice) {
                sample(&xhat[..d], &mut buf)?;
                max = buf.iter().fold(max, |m, v| m.max(v.abs()));
            }
            Ok(max)
        }
        PNorm::Finite(p) => {
            let mut sum = 0.0;
            for (xhat, w) in rule.iter() {
                sample(xhat, &mut buf)?;
                sum += w * buf.iter().map(|v| v.abs().powf(p)).sum::<f64>();
            }
            Ok((sum * el.measure() / el.kind.domain().measure()).powf(1.0 / p))
        }
    }
}

/// ‖f‖_{0,p,T} with |f|^p = Σ_i |f_i|^p.
pub fn lp_norm<F: VectorField + ?Sized>(f: &F, el: &ElementGeometry, spec: &NormSpec) -> Result<f64> {
    lp_norm_with(el, spec, f.value_dim(), |_, x, out| f.eval(x, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use std::f64::consts::PI;

    #[test]
    fn parse_and_display() {
        let ps = PNorm::parse_list("1, 2,inf").unwrap();
        assert_eq!(ps, vec![PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity]);
        assert_eq!(ps.iter().map(|p| p.label()).collect::<Vec<_>>(), ["p1", "p2", "pinf"]);
        assert!("0.5".parse::<PNorm>().is_err());
        assert!(PNorm::parse_list("").is_err());
        let json = serde_json::to_string(&ps).unwrap();
        assert_eq!(json, r#"[1.0,2.0,"inf"]"#);
        assert_eq!(serde_json::from_str::<Vec<PNorm>>(&json).unwrap(), ps);
    }

    #[test]
    fn constant_on_triangle() {
        let el = ElementGeometry::reference(ElementKind::Triangle);
        let one = FnField::new(1, |_: &[f64], o: &mut [f64]| o[0] = 1.0);
        let l2 = lp_norm(&one, &el, &NormSpec::new(PNorm::Finite(2.0))).unwrap();
        assert!((l2 - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(lp_norm(&one, &el, &NormSpec::new(PNorm::Infinity)).unwrap(), 1.0);
    }

    #[test]
    fn sine_on_prism() {
        // ∫_P sin²(πx1) = ∫_0^1 (1 − x1) sin²(πx1) dx1 = 1/4
        let el = ElementGeometry::reference(ElementKind::Prism);
        let s = FnField::new(1, |x: &[f64], o: &mut [f64]| o[0] = (PI * x[0]).sin());
        let l2 = lp_norm(&s, &el, &NormSpec::new(PNorm::Finite(2.0))).unwrap();
        assert!((l2 - 0.5).abs() < 1e-12, "{l2}");
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(reference_lattice(ElementKind::Triangle, 20).len(), 210);
        assert_eq!(reference_lattice(ElementKind::Prism, 20).len(), 4200);
        assert_eq!(reference_lattice(ElementKind::Tet, 20).len(), 1540);
    }

    #[test]
    fn non_finite_is_reported_with_location() {
        let el = ElementGeometry::reference(ElementKind::Tet);
        let bad = FnField::new(1, |x: &[f64], o: &mut [f64]| o[0] = 1.0 / (x[0] - x[0]));
        match lp_norm(&bad, &el, &NormSpec::new(PNorm::Finite(1.0))) {
            Err(Error::Numeric { location: Some(l), .. }) => assert_eq!(l.len(), 3),
            other => panic!("{other:?}"),
        }
    }
}
