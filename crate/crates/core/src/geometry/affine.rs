use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// x = J x̂ + x0 in 2 or 3 dimensions. Unused rows/columns are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    dim: usize,
    matrix: [[f64; 3]; 3],
    shift: [f64; 3],
    inverse: [[f64; 3]; 3],
    det: f64,
}

/// Serializable form used in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMapSpec {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub shift: Option<Vec<f64>>,
}

pub(crate) fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub(crate) fn det_n(a: &[[f64; 3]; 3], dim: usize) -> f64 {
    match dim {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => det3(a),
    }
}

impl AffineMap {
    /// Build from a `dim`×`dim` matrix (row-major) and a shift.
    pub fn new(dim: usize, rows: &[Vec<f64>], shift: &[f64]) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::invalid(format!("affine maps need dimension 2 or 3, got {dim}")));
        }
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) || shift.len() != dim {
            return Err(Error::invalid(format!("affine map must be {dim}x{dim} with a length-{dim} shift")));
        }
        let mut m = [[0.0; 3]; 3];
        let mut b = [0.0; 3];
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] = rows[i][j];
            }
            b[i] = shift[i];
        }
        Self::from_arrays(dim, m, b)
    }

    pub(crate) fn from_arrays(dim: usize, matrix: [[f64; 3]; 3], shift: [f64; 3]) -> Result<Self> {
        if matrix.iter().flatten().chain(shift.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("affine map has non-finite entries"));
        }
        let det = det_n(&matrix, dim);
        let col_norms: f64 = (0..dim)
            .map(|j| (0..dim).map(|i| matrix[i][j] * matrix[i][j]).sum::<f64>().sqrt())
            .product();
        if det == 0.0 || det.abs() <= 1e-14 * col_norms {
            return Err(Error::invalid(format!("singular affine map (det = {det:e})")));
        }
        let mut inverse = [[0.0; 3]; 3];
        match dim {
            2 => {
                inverse[0][0] = matrix[1][1] / det;
                inverse[0][1] = -matrix[0][1] / det;
                inverse[1][0] = -matrix[1][0] / det;
                inverse[1][1] = matrix[0][0] / det;
            }
            _ => {
                for i in 0..3 {
                    for j in 0..3 {
                        // cofactor of (j, i)
                        let (r0, r1) = match j {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let (c0, c1) = match i {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let minor = matrix[r0][c0] * matrix[r1][c1] - matrix[r0][c1] * matrix[r1][c0];
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        inverse[i][j] = sign * minor / det;
                    }
                }
            }
        }
        Ok(AffineMap {
            dim,
            matrix,
            shift,
            inverse,
            det,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(dim) {
            row[i] = 1.0;
        }
        Self::from_arrays(dim, m, [0.0; 3]).expect("identity is regular")
    }

    /// diag(h) with zero shift.
    pub fn diagonal(h: &[f64]) -> Result<Self> {
        let dim = h.len();
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { h[i] } else { 0.0 }).collect())
            .collect();
        Self::new(dim, &rows, &vec![0.0; dim])
    }

    pub fn from_spec(dim: usize, spec: &AffineMapSpec) -> Result<Self> {
        let shift = spec.shift.clone().unwrap_or_else(|| vec![0.0; dim]);
        Self::new(dim, &spec.matrix, &shift)
    }

    pub fn to_spec(&self) -> AffineMapSpec {
        AffineMapSpec {
            matrix: self.matrix_rows(),
            shift: Some(self.shift[..self.dim].to_vec()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    pub fn inverse_entry(&self, i: usize, j: usize) -> f64 {
        self.inverse[i][j]
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift[..self.dim]
    }

    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.matrix[i][..self.dim].to_vec()).collect()
    }

    /// x = J x̂ + x0.
    pub fn apply(&self, xhat: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            out[i] = self.shift[i] + (0..self.dim).map(|j| self.matrix[i][j] * xhat[j]).sum::<f64>();
        }
        out
    }

    /// x̂ = J⁻¹ (x − x0).
    pub fn apply_inverse(&self, x: &[f64]) -> [f64; 3] {
        let mut d = [0.0; 3];
        for i in 0..self.dim {
            d[i] = x[i] - self.shift[i];
        }
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            out[i] = (0..self.dim).map(|j| self.inverse[i][j] * d[j]).sum();
        }
        out
    }

    /// J v (no shift).
    pub fn apply_linear(&self, v: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            out[i] = (0..self.dim).map(|j| self.matrix[i][j] * v[j]).sum();
        }
        out
    }

    /// J⁻ᵀ v.
    pub fn apply_inverse_transpose(&self, v: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            out[i] = (0..self.dim).map(|j| self.inverse[j][i] * v[j]).sum();
        }
        out
    }

    /// self ∘ other: x ↦ self(other(x)).
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap> {
        if self.dim != other.dim {
            return Err(Error::invalid("composing affine maps of different dimension"));
        }
        let d = self.dim;
        let mut m = [[0.0; 3]; 3];
        for i in 0..d {
            for j in 0..d {
                m[i][j] = (0..d).map(|l| self.matrix[i][l] * other.matrix[l][j]).sum();
            }
        }
        let shift = self.apply(&other.shift);
        Self::from_arrays(d, m, shift)
    }

    /// Maximum absolute row sum of J.
    pub fn norm_inf(&self) -> f64 {
        row_sum_norm(&self.matrix, self.dim)
    }

    /// Maximum absolute row sum of J⁻¹.
    pub fn inverse_norm_inf(&self) -> f64 {
        row_sum_norm(&self.inverse, self.dim)
    }

    /// Euclidean norms of the columns of J.
    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.matrix[i][j].powi(2)).sum::<f64>().sqrt())
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.matrix[i][j] == 0.0))
    }
}

fn row_sum_norm(a: &[[f64; 3]; 3], dim: usize) -> f64 {
    (0..dim)
        .map(|i| (0..dim).map(|j| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = AffineMap::new(
            3,
            &[vec![2.0, 0.5, 0.0], vec![0.1, 1.0, 0.3], vec![0.0, -0.2, 0.7]],
            &[0.3, -1.0, 2.0],
        )
        .unwrap();
        let x = [0.2, 0.4, 0.9];
        let y = m.apply(&x);
        let back = m.apply_inverse(&y);
        for i in 0..3 {
            assert!((back[i] - x[i]).abs() < 1e-14);
        }
        let n = m.apply_inverse_transpose(&m.apply_linear(&[0.0, 0.0, 1.0]));
        // Jᵀ⁻¹ J e3 is not e3 in general, but Jᵀ(J⁻ᵀ v) = v
        let mut t = [0.0; 3];
        for i in 0..3 {
            t[i] = (0..3).map(|j| m.entry(j, i) * n[j]).sum();
        }
        let jv = m.apply_linear(&[0.0, 0.0, 1.0]);
        for i in 0..3 {
            assert!((t[i] - jv[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_rejected() {
        let r = AffineMap::new(2, &[vec![1.0, 2.0], vec![2.0, 4.0]], &[0.0, 0.0]);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
        assert!(AffineMap::diagonal(&[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn compose() {
        let a = AffineMap::diagonal(&[2.0, 3.0]).unwrap();
        let b = AffineMap::new(2, &[vec![1.0, 1.0], vec![0.0, 1.0]], &[1.0, 0.0]).unwrap();
        let c = a.compose(&b).unwrap();
        let x = [0.5, 0.25];
        let expected = a.apply(&b.apply(&x));
        let got = c.apply(&x);
        assert!((expected[0] - got[0]).abs() < 1e-15 && (expected[1] - got[1]).abs() < 1e-15);
    }
}
