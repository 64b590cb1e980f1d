use super::affine::AffineMap;
use crate::field::VectorField;

/// Contravariant Piola transport v(x) = J v̂(J⁻¹(x − x0)) / det J.
pub struct Piola<F> {
    pub inner: F,
    pub map: AffineMap,
}

/// Transport a reference field to the physical element described by `map`.
pub fn piola_transform<F: VectorField>(field: F, map: &AffineMap) -> Piola<F> {
    Piola {
        inner: field,
        map: map.clone(),
    }
}

impl<F: VectorField> VectorField for Piola<F> {
    fn value_dim(&self) -> usize {
        self.map.dim()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let xhat = self.map.apply_inverse(x);
        let mut vhat = [0.0; 3];
        self.inner.eval(&xhat[..self.map.dim()], &mut vhat[..self.map.dim()]);
        let v = self.map.apply_linear(&vhat);
        let det = self.map.det();
        for i in 0..self.map.dim() {
            out[i] = v[i] / det;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;

    #[test]
    fn identity_leaves_field_unchanged() {
        let f = FnField::new(3, |x: &[f64], o: &mut [f64]| {
            o[0] = x[1];
            o[1] = x[0] * x[2];
            o[2] = 1.0;
        });
        let p = piola_transform(&f, &AffineMap::identity(3));
        let x = [0.2, 0.3, 0.4];
        assert_eq!(p.eval_vec(&x), f.eval_vec(&x));
    }

    #[test]
    fn stretch_along_x1() {
        let f = FnField::new(3, |_: &[f64], o: &mut [f64]| {
            o[0] = 1.0;
            o[1] = 0.0;
            o[2] = 0.0;
        });
        let p = piola_transform(&f, &AffineMap::diagonal(&[2.0, 1.0, 1.0]).unwrap());
        assert_eq!(p.eval_vec(&[0.5, 0.5, 0.5]), vec![1.0, 0.0, 0.0]);
    }
}
