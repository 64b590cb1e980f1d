//! Pointwise-evaluable fields.

use crate::polyspace::{Polynomial, VectorPolynomial};

/// Anything that can be evaluated at a physical point.
///
/// `eval` writes `value_dim()` numbers into `out`. Points may carry more
/// coordinates than the field uses; extra coordinates are ignored.
pub trait VectorField: Sync {
    fn value_dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]);

    fn eval_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.value_dim()];
        self.eval(x, &mut out);
        out
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn value_dim(&self) -> usize {
        (**self).value_dim()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        (**self).eval(x, out)
    }
}

impl VectorField for Polynomial {
    fn value_dim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.value(x);
    }
}

impl VectorField for VectorPolynomial {
    fn value_dim(&self) -> usize {
        self.num_components()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        self.value_into(x, out)
    }
}

/// A closure wrapped as a field.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    pub fn new(value_dim: usize, f: F) -> Self {
        FnField { dim: value_dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    fn value_dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

/// Pointwise difference `a - b` of two fields with equal value dimension.
pub struct Difference<A, B>(pub A, pub B);

impl<A: VectorField, B: VectorField> VectorField for Difference<A, B> {
    fn value_dim(&self) -> usize {
        self.0.value_dim()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let n = self.0.value_dim();
        let mut tmp = [0.0; 8];
        self.0.eval(x, out);
        self.1.eval(x, &mut tmp[..n]);
        for (o, t) in out.iter_mut().zip(&tmp[..n]) {
            *o -= t;
        }
    }
}
