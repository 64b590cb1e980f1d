use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::MultiIndex;
use crate::error::{Error, Result};

/// Multivariate polynomial stored as monomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_terms(dim, [(MultiIndex::zero(dim), c)])
    }

    /// The monomial x^α with coefficient one.
    pub fn monomial(alpha: MultiIndex) -> Self {
        let dim = alpha.dim();
        Self::from_terms(dim, [(alpha, 1.0)])
    }

    /// Coordinate function x_axis.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, axis))
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Self {
        let mut p = Polynomial::zero(dim);
        for (alpha, c) in terms {
            assert_eq!(alpha.dim(), dim, "multi-index dimension mismatch");
            *p.terms.entry(alpha).or_insert(0.0) += c;
        }
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| *c != 0.0);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(a, c)| (a, *c))
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::order).max()
    }

    /// Degree in a single variable; `None` for the zero polynomial.
    pub fn degree_in(&self, axis: usize) -> Option<u32> {
        self.terms.keys().map(|a| a.get(axis)).max()
    }

    /// Evaluate at `x`, checking the dimension.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "point of dimension {} for polynomial of dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.value(x))
    }

    /// Evaluate at `x` without the dimension check (extra coordinates are ignored).
    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c * a.monomial_value(x))
            .sum()
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::from_terms(self.dim, self.terms.iter().map(|(a, c)| (a.clone(), c * s)))
    }

    /// Exact derivative with respect to x_axis.
    ///
    /// Panics if `axis >= dim`.
    pub fn partial(&self, axis: usize) -> Polynomial {
        assert!(axis < self.dim, "axis {axis} out of range for dimension {}", self.dim);
        let terms = self.terms.iter().filter_map(|(a, c)| {
            let e = a.get(axis);
            (e > 0).then(|| {
                let mut ex = a.exponents().to_vec();
                ex[axis] -= 1;
                (MultiIndex::new(ex), c * e as f64)
            })
        });
        Polynomial::from_terms(self.dim, terms)
    }

    /// Multiply by a single monomial.
    pub fn shift(&self, alpha: &MultiIndex) -> Polynomial {
        Polynomial::from_terms(self.dim, self.terms.iter().map(|(a, c)| (a.add(alpha), *c)))
    }

    /// Re-embed into a higher dimension by appending zero exponents.
    pub fn embed(&self, dim: usize) -> Polynomial {
        assert!(dim >= self.dim);
        Polynomial::from_terms(
            dim,
            self.terms.iter().map(|(a, c)| {
                let mut e = a.exponents().to_vec();
                e.resize(dim, 0);
                (MultiIndex::new(e), *c)
            }),
        )
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim);
        Polynomial::from_terms(
            self.dim,
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(a, c)| (a.clone(), *c)),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim);
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                terms.push((a.add(b), ca * cb));
            }
        }
        Polynomial::from_terms(self.dim, terms)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (axis, &e) in a.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", axis + 1)?,
                    _ => write!(f, "*x{}^{e}", axis + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// Vector of polynomials sharing one spatial dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPolynomial {
    components: Vec<Polynomial>,
}

impl VectorPolynomial {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::invalid("vector polynomial needs at least one component"));
        };
        let dim = first.dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::invalid("components of differing dimension"));
        }
        Ok(VectorPolynomial { components })
    }

    pub fn zero(dim: usize, ncomp: usize) -> Self {
        VectorPolynomial {
            components: vec![Polynomial::zero(dim); ncomp],
        }
    }

    /// `p` placed in component `component`, zeros elsewhere.
    pub fn unit(ncomp: usize, component: usize, p: Polynomial) -> Self {
        let mut v = Self::zero(p.dim(), ncomp);
        v.components[component] = p;
        v
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Polynomial> {
        self.components
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn value_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.value(x);
        }
    }

    pub fn scale(&self, s: f64) -> VectorPolynomial {
        VectorPolynomial {
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Σ_i ∂_i v_i. Requires as many components as variables.
    pub fn divergence(&self) -> Polynomial {
        assert_eq!(self.num_components(), self.dim(), "divergence needs d components");
        self.components
            .iter()
            .enumerate()
            .fold(Polynomial::zero(self.dim()), |acc, (i, c)| &acc + &c.partial(i))
    }

    /// The scalar polynomial p(x)·x.
    pub fn dot_position(&self) -> Polynomial {
        let dim = self.dim();
        self.components
            .iter()
            .enumerate()
            .fold(Polynomial::zero(dim), |acc, (i, c)| {
                &acc + &c.shift(&MultiIndex::unit(dim, i))
            })
    }

    /// Maximum total degree over components.
    pub fn degree(&self) -> Option<u32> {
        self.components.iter().filter_map(Polynomial::degree).max()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.components
            .iter()
            .fold(0.0, |m, c| m.max(c.max_abs_coefficient()))
    }
}

impl Add for &VectorPolynomial {
    type Output = VectorPolynomial;
    fn add(self, rhs: &VectorPolynomial) -> VectorPolynomial {
        assert_eq!(self.num_components(), rhs.num_components());
        VectorPolynomial {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &VectorPolynomial {
    type Output = VectorPolynomial;
    fn sub(self, rhs: &VectorPolynomial) -> VectorPolynomial {
        self + &rhs.scale(-1.0)
    }
}
