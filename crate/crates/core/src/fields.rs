//! Smooth analytic test fields with closed-form partial derivatives.
//!
//! Every component is a finite sum of separable terms c · Π_j g_j(x_j) with
//! g_j a power, a shifted sine or an exponential, so derivatives of any order are
//! available exactly. Derivative requests are capped at the field's `max_order`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::geometry::ElementKind;
use crate::polyspace::{bdm_space_basis, MultiIndex, SpaceSpec, VectorPolynomial};

pub const MAX_ORDER: u32 = 4;

/// One-dimensional factor of a separable term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    Pow(u32),
    /// sin(freq · x + phase)
    Sin { freq: f64, phase: f64 },
    /// exp(rate · x)
    Exp { rate: f64 },
}

impl Factor {
    pub fn value(&self, x: f64) -> f64 {
        self.derivative_value(0, x)
    }

    /// r-th derivative at x.
    pub fn derivative_value(&self, r: u32, x: f64) -> f64 {
        match *self {
            Factor::Pow(n) => {
                if r > n {
                    0.0
                } else {
                    let c: f64 = ((n - r + 1)..=n).map(|v| v as f64).product();
                    c * x.powi((n - r) as i32)
                }
            }
            Factor::Sin { freq, phase } => freq.powi(r as i32) * (freq * x + phase + r as f64 * FRAC_PI_2).sin(),
            Factor::Exp { rate } => rate.powi(r as i32) * (rate * x).exp(),
        }
    }

    /// Symbolic first derivative as (coefficient, factor).
    fn derivative(&self) -> (f64, Factor) {
        match *self {
            Factor::Pow(0) => (0.0, Factor::Pow(0)),
            Factor::Pow(n) => (n as f64, Factor::Pow(n - 1)),
            Factor::Sin { freq, phase } => (freq, Factor::Sin { freq, phase: phase + FRAC_PI_2 }),
            Factor::Exp { rate } => (rate, Factor::Exp { rate }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub factors: Vec<Factor>,
}

/// A scalar function Σ_t c_t Π_j g_tj(x_j).
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableFunction {
    dim: usize,
    terms: Vec<Term>,
}

impl SeparableFunction {
    pub fn zero(dim: usize) -> Self {
        SeparableFunction { dim, terms: Vec::new() }
    }

    pub fn new(dim: usize, terms: Vec<Term>) -> Self {
        assert!(terms.iter().all(|t| t.factors.len() == dim));
        SeparableFunction { dim, terms }
    }

    pub fn product(dim: usize, coefficient: f64, factors: Vec<Factor>) -> Self {
        Self::new(dim, vec![Term { coefficient, factors }])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * t.factors.iter().zip(x).map(|(g, &xi)| g.value(xi)).product::<f64>())
            .sum()
    }

    /// ∂^α at x.
    pub fn partial_value(&self, alpha: &[u32], x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coefficient
                    * t.factors
                        .iter()
                        .zip(alpha)
                        .zip(x)
                        .map(|((g, &r), &xi)| g.derivative_value(r, xi))
                        .product::<f64>()
            })
            .sum()
    }

    /// Symbolic derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> SeparableFunction {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let (c, g) = t.factors[axis].derivative();
                if c == 0.0 {
                    return None;
                }
                let mut factors = t.factors.clone();
                factors[axis] = g;
                Some(Term {
                    coefficient: t.coefficient * c,
                    factors,
                })
            })
            .collect();
        SeparableFunction { dim: self.dim, terms }
    }

    fn plus(mut self, other: SeparableFunction) -> SeparableFunction {
        self.terms.extend(other.terms);
        self
    }

    fn scaled(mut self, s: f64) -> SeparableFunction {
        for t in &mut self.terms {
            t.coefficient *= s;
        }
        self
    }
}

/// A vector (or scalar, with one component) field with exact derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticField {
    pub name: String,
    dim: usize,
    components: Vec<SeparableFunction>,
    max_order: u32,
}

impl AnalyticField {
    pub fn new(name: impl Into<String>, dim: usize, components: Vec<SeparableFunction>, max_order: u32) -> Self {
        assert!(components.iter().all(|c| c.dim == dim));
        AnalyticField {
            name: name.into(),
            dim,
            components,
            max_order,
        }
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn component(&self, i: usize) -> &SeparableFunction {
        &self.components[i]
    }

    /// ∂^α v_component at x; errors when |α| exceeds `max_order`.
    pub fn partial(&self, component: usize, alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
        if alpha.order() > self.max_order {
            return Err(Error::invalid(format!(
                "derivative of order {} requested, field '{}' provides {}",
                alpha.order(),
                self.name,
                self.max_order
            )));
        }
        if alpha.dim() != self.dim || component >= self.components.len() {
            return Err(Error::invalid("multi-index or component out of range"));
        }
        Ok(self.components[component].partial_value(alpha.exponents(), x))
    }

    pub fn scaled(&self, s: f64) -> AnalyticField {
        AnalyticField {
            name: format!("{}*{s}", self.name),
            dim: self.dim,
            components: self.components.iter().cloned().map(|c| c.scaled(s)).collect(),
            max_order: self.max_order,
        }
    }

    /// Exact polynomial field.
    pub fn from_polynomial(name: impl Into<String>, p: &VectorPolynomial) -> AnalyticField {
        let dim = p.dim();
        let components = p
            .components()
            .iter()
            .map(|c| {
                SeparableFunction::new(
                    dim,
                    c.terms()
                        .map(|(a, coef)| Term {
                            coefficient: coef,
                            factors: a.exponents().iter().map(|&e| Factor::Pow(e)).collect(),
                        })
                        .collect(),
                )
            })
            .collect();
        AnalyticField::new(name, dim, components, MAX_ORDER)
    }
}

impl VectorField for AnalyticField {
    fn value_dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.value(x);
        }
    }
}

/// div v as a scalar analytic field with derivatives to order `max_order − 1`.
pub fn field_divergence(f: &AnalyticField) -> Result<AnalyticField> {
    if f.max_order < 1 {
        return Err(Error::invalid("divergence needs first derivatives"));
    }
    if f.num_components() != f.dim {
        return Err(Error::invalid("divergence needs as many components as variables"));
    }
    let div = f
        .components
        .iter()
        .enumerate()
        .fold(SeparableFunction::zero(f.dim), |acc, (i, c)| acc.plus(c.derivative(i)));
    Ok(AnalyticField::new(format!("div {}", f.name), f.dim, vec![div], f.max_order - 1))
}

/// D_l^α f_component expanded into Cartesian partials.
#[derive(Clone, Debug)]
pub struct DirectionalPartial<'a> {
    field: &'a AnalyticField,
    component: usize,
    expansion: Vec<(Vec<u32>, f64)>,
}

impl DirectionalPartial<'_> {
    pub fn value(&self, x: &[f64]) -> f64 {
        let f = &self.field.components[self.component];
        self.expansion.iter().map(|(beta, c)| c * f.partial_value(beta, x)).sum()
    }

    /// Cartesian multi-indices and coefficients of the expansion.
    pub fn expansion(&self) -> &[(Vec<u32>, f64)] {
        &self.expansion
    }
}

impl VectorField for DirectionalPartial<'_> {
    fn value_dim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.value(x);
    }
}

/// Build ∂^|α| / ∂l_1^α_1 ⋯ ∂l_d^α_d of one component, with ∂/∂l = Σ_j l_j ∂/∂x_j.
pub fn directional_partial<'a>(
    f: &'a AnalyticField,
    component: usize,
    alpha: &MultiIndex,
    directions: &[[f64; 3]],
) -> Result<DirectionalPartial<'a>> {
    if alpha.order() > f.max_order {
        return Err(Error::invalid(format!(
            "directional derivative of order {} exceeds max order {}",
            alpha.order(),
            f.max_order
        )));
    }
    if directions.len() != alpha.dim() || component >= f.num_components() {
        return Err(Error::invalid("direction count must match the multi-index dimension"));
    }
    let d = f.dim;
    let mut expansion: Vec<(Vec<u32>, f64)> = vec![(vec![0; d], 1.0)];
    for (l, &times) in directions.iter().zip(alpha.exponents()) {
        for _ in 0..times {
            let mut next: Vec<(Vec<u32>, f64)> = Vec::new();
            for (beta, c) in &expansion {
                for (j, &lj) in l.iter().enumerate().take(d) {
                    if lj == 0.0 {
                        continue;
                    }
                    let mut b = beta.clone();
                    b[j] += 1;
                    match next.iter_mut().find(|(x, _)| *x == b) {
                        Some(entry) => entry.1 += c * lj,
                        None => next.push((b, c * lj)),
                    }
                }
            }
            expansion = next;
        }
    }
    expansion.retain(|(_, c)| *c != 0.0);
    Ok(DirectionalPartial {
        field: f,
        component,
        expansion,
    })
}

/// Catalog entries addressable by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum FieldSpec {
    Const { values: Vec<f64> },
    /// Seeded member of the BDM space of order k on the given element kind.
    Poly { seed: u64, k: i32, kind: ElementKind },
    Sin3,
    X1Only,
    X3Heavy,
    Layer { eps: f64 },
}

/// Phases of the sine products in `sin3`; chosen so that no derivative vanishes at the origin.
const SIN3_PHASES: [f64; 3] = [0.3, 0.7, 1.1];

/// Build a catalog field in `dim` dimensions.
pub fn catalog(spec: &FieldSpec, dim: usize) -> Result<AnalyticField> {
    if !(2..=3).contains(&dim) {
        return Err(Error::invalid(format!("fields are defined in 2 or 3 dimensions, not {dim}")));
    }
    let one = || vec![Factor::Pow(0); dim];
    let only = |axis: usize, g: Factor| {
        let mut f = one();
        f[axis] = g;
        f
    };
    let name = spec.to_string();
    let field = match spec {
        FieldSpec::Const { values } => {
            if values.len() != dim {
                return Err(Error::invalid(format!("const field needs {dim} values, got {}", values.len())));
            }
            let comps = values
                .iter()
                .map(|&c| SeparableFunction::product(dim, c, one()))
                .collect();
            AnalyticField::new(name, dim, comps, MAX_ORDER)
        }
        FieldSpec::Poly { seed, k, kind } => {
            if kind.dim() != dim {
                return Err(Error::invalid(format!("poly field for {kind} requested in {dim} dimensions")));
            }
            let p = random_bdm_member(*kind, *k, *seed)?;
            AnalyticField::from_polynomial(name, &p)
        }
        FieldSpec::Sin3 => {
            let comps = (0..dim)
                .map(|i| {
                    let factors = (0..dim)
                        .map(|j| Factor::Sin {
                            freq: PI,
                            phase: SIN3_PHASES[(i + j) % dim],
                        })
                        .collect();
                    SeparableFunction::product(dim, 1.0, factors)
                })
                .collect();
            AnalyticField::new(name, dim, comps, MAX_ORDER)
        }
        FieldSpec::X1Only => {
            let mut comps = vec![SeparableFunction::zero(dim); dim];
            comps[0] = SeparableFunction::product(dim, 1.0, only(0, Factor::Sin { freq: PI, phase: 0.0 }));
            AnalyticField::new(name, dim, comps, MAX_ORDER)
        }
        FieldSpec::X3Heavy => {
            if dim != 3 {
                return Err(Error::invalid("x3-heavy needs three dimensions"));
            }
            let mut comps = vec![SeparableFunction::zero(dim); dim];
            comps[2] = SeparableFunction::product(dim, 1.0, only(2, Factor::Sin { freq: PI, phase: 0.0 }));
            AnalyticField::new(name, dim, comps, MAX_ORDER)
        }
        FieldSpec::Layer { eps } => {
            if !(*eps > 0.0) {
                return Err(Error::invalid(format!("layer width must be positive, got {eps}")));
            }
            let mut comps = vec![SeparableFunction::zero(dim); dim];
            comps[0] = SeparableFunction::product(dim, 1.0, only(0, Factor::Exp { rate: -1.0 / eps }));
            AnalyticField::new(name, dim, comps, MAX_ORDER)
        }
    };
    Ok(field)
}

/// Seeded member of the BDM space with dyadic coefficients n/8, |n| ≤ 8.
pub fn random_bdm_member(kind: ElementKind, k: i32, seed: u64) -> Result<VectorPolynomial> {
    let spec = match kind {
        ElementKind::Prism => SpaceSpec::BdmPrism { k },
        _ => SpaceSpec::BdmSimplex { k, d: kind.dim() },
    };
    let basis = bdm_space_basis(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = VectorPolynomial::zero(kind.dim(), kind.dim());
    for b in basis.vectors().expect("vector basis") {
        let n: i32 = rng.gen_range(-8..=8);
        acc = &acc + &b.scale(n as f64 / 8.0);
    }
    Ok(acc)
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Const { values } => {
                let v: Vec<String> = values.iter().map(|x| x.to_string()).collect();
                write!(f, "const({})", v.join(","))
            }
            FieldSpec::Poly { seed, k, kind } => write!(f, "poly({seed},{k},{kind})"),
            FieldSpec::Sin3 => write!(f, "sin3"),
            FieldSpec::X1Only => write!(f, "x1-only"),
            FieldSpec::X3Heavy => write!(f, "x3-heavy"),
            FieldSpec::Layer { eps } => write!(f, "layer({eps})"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Parses `const(1,0,0)`, `poly(seed,k,kind)`, `sin3`, `x1-only`, `x3-heavy`, `layer(eps)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(Error::invalid(format!("malformed field '{s}'"))),
            None => (s, None),
        };
        let parts: Vec<&str> = args
            .map(|a| a.split(',').map(str::trim).filter(|p| !p.is_empty()).collect())
            .unwrap_or_default();
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number '{p}' in field '{s}'")))
        };
        match (head, parts.len()) {
            ("const", n) if n > 0 => Ok(FieldSpec::Const {
                values: parts.iter().map(|p| num(p)).collect::<Result<_>>()?,
            }),
            ("poly", 3) => Ok(FieldSpec::Poly {
                seed: parts[0]
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad seed in '{s}'")))?,
                k: parts[1].parse().map_err(|_| Error::invalid(format!("bad order in '{s}'")))?,
                kind: parts[2].parse()?,
            }),
            ("sin3", 0) => Ok(FieldSpec::Sin3),
            ("x1-only", 0) => Ok(FieldSpec::X1Only),
            ("x3-heavy", 0) => Ok(FieldSpec::X3Heavy),
            ("layer", 1) => Ok(FieldSpec::Layer { eps: num(parts[0])? }),
            _ => Err(Error::invalid(format!("unknown field '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn const_has_zero_partials() {
        let f = catalog(&FieldSpec::Const { values: vec![1.0, 0.0, 0.0] }, 3).unwrap();
        for a in MultiIndex::of_order(3, 1) {
            for c in 0..3 {
                assert_eq!(f.partial(c, &a, &[0.3, 0.2, 0.1]).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn x1_only_is_separable() {
        let f = catalog(&FieldSpec::X1Only, 3).unwrap();
        let x = [0.31, 0.42, 0.77];
        for order in 1..=4 {
            for a in MultiIndex::of_order(3, order) {
                let v = f.partial(0, &a, &x).unwrap();
                if a.get(1) + a.get(2) > 0 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn order_cap_enforced() {
        let f = catalog(&FieldSpec::Sin3, 3).unwrap();
        assert!(f.partial(0, &MultiIndex::new(vec![5, 0, 0]), &[0.0; 3]).is_err());
        let dirs = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(directional_partial(&f, 0, &MultiIndex::new(vec![2, 2, 1]), &dirs).is_err());
    }

    #[test]
    fn directional_axes_are_cartesian() {
        let f = catalog(&FieldSpec::Sin3, 3).unwrap();
        let dirs = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let x = [0.13, 0.57, 0.29];
        for a in MultiIndex::up_to_order(3, 3) {
            let d = directional_partial(&f, 1, &a, &dirs).unwrap();
            assert_eq!(d.value(&x), f.partial(1, &a, &x).unwrap());
        }
    }

    #[test]
    fn directional_chain_rule() {
        let v = VectorPolynomial::new(vec![
            crate::polyspace::Polynomial::coordinate(3, 0),
            crate::polyspace::Polynomial::zero(3),
            crate::polyspace::Polynomial::zero(3),
        ])
        .unwrap();
        let f = AnalyticField::from_polynomial("x1", &v);
        let s = 1.0 / 2f64.sqrt();
        let dirs = [[s, s, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let d = directional_partial(&f, 0, &MultiIndex::new(vec![1, 0, 0]), &dirs).unwrap();
        assert!((d.value(&[0.4, 0.1, 0.2]) - s).abs() < 1e-16);
    }

    #[test]
    fn divergence_examples() {
        let f = catalog(&FieldSpec::X1Only, 3).unwrap();
        let div = field_divergence(&f).unwrap();
        let x = [0.2, 0.5, 0.9];
        assert!((div.eval_vec(&x)[0] - PI * (PI * 0.2).cos()).abs() < 1e-15);
        assert_eq!(div.max_order(), MAX_ORDER - 1);
        let c = catalog(&FieldSpec::Const { values: vec![1.0, 2.0] }, 2).unwrap();
        assert_eq!(field_divergence(&c).unwrap().eval_vec(&[0.3, 0.3])[0], 0.0);
    }

    #[test]
    fn poly_divergence_matches_polynomial() {
        let spec = FieldSpec::Poly { seed: 5, k: 2, kind: ElementKind::Prism };
        let f = catalog(&spec, 3).unwrap();
        let p = random_bdm_member(ElementKind::Prism, 2, 5).unwrap();
        let div_f = field_divergence(&f).unwrap();
        let div_p = p.divergence();
        for x in [[0.1, 0.2, 0.3], [0.5, 0.25, 0.75], [0.0, 1.0, 0.5]] {
            assert!((div_f.eval_vec(&x)[0] - div_p.value(&x)).abs() < 1e-13);
        }
    }

    #[test]
    fn unknown_and_malformed_names() {
        assert!("bogus".parse::<FieldSpec>().is_err());
        assert!("layer(".parse::<FieldSpec>().is_err());
        assert!(catalog(&FieldSpec::Const { values: vec![1.0] }, 3).is_err());
        assert!(catalog(&FieldSpec::X3Heavy, 2).is_err());
        assert!(catalog(&FieldSpec::Layer { eps: 0.0 }, 2).is_err());
    }

    #[test]
    fn spec_string_round_trip() {
        for s in ["const(1,0,0)", "poly(7,2,prism)", "sin3", "x1-only", "x3-heavy", "layer(0.1)"] {
            let spec: FieldSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let json = serde_json::to_string(&FieldSpec::Layer { eps: 0.1 }).unwrap();
        assert_eq!(json, r#"{"name":"layer","eps":0.1}"#);
        let x1: FieldSpec = serde_json::from_str(r#"{"name":"x1-only"}"#).unwrap();
        assert_eq!(x1, FieldSpec::X1Only);
    }
}
