//! Quadrature rules with declared polynomial exactness.
//!
//! Reference domains: interval [0,1], unit square, triangle
//! {x ≥ 0, x1 + x2 ≤ 1}, tetrahedron {x ≥ 0, x1 + x2 + x3 ≤ 1} and the prism
//! triangle × [0,1]. Simplex rules are collapsed (Duffy) tensor products of
//! Gauss–Legendre rules with the Jacobian folded into the weights; the prism rule
//! is the triangle rule times an interval rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_EXACTNESS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Interval,
    Square,
    Triangle,
    Tet,
    Prism,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::Interval => 1,
            Domain::Square | Domain::Triangle => 2,
            Domain::Tet | Domain::Prism => 3,
        }
    }

    /// Measure of the reference domain.
    pub fn measure(self) -> f64 {
        match self {
            Domain::Interval | Domain::Square => 1.0,
            Domain::Triangle | Domain::Prism => 0.5,
            Domain::Tet => 1.0 / 6.0,
        }
    }

    pub fn contains(self, x: &[f64], tol: f64) -> bool {
        let nonneg = x[..self.dim()].iter().all(|&c| c >= -tol);
        nonneg
            && match self {
                Domain::Interval => x[0] <= 1.0 + tol,
                Domain::Square => x[0] <= 1.0 + tol && x[1] <= 1.0 + tol,
                Domain::Triangle => x[0] + x[1] <= 1.0 + tol,
                Domain::Tet => x[0] + x[1] + x[2] <= 1.0 + tol,
                Domain::Prism => x[0] + x[1] <= 1.0 + tol && x[2] <= 1.0 + tol,
            }
    }
}

/// Nodes and weights on a reference domain.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub domain: Domain,
    pub exactness: usize,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i][..self.dim()]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        let d = self.dim();
        self.points.iter().map(move |p| &p[..d]).zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton iteration on P_n from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    // ascending order on [0, 1]
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
    (idx.iter().map(|&i| nodes[i]).collect(), idx.iter().map(|&i| weights[i]).collect())
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Build a rule on `domain` exact for all polynomials of the given degree
/// (per axis for the square, and for the x3 direction of the prism).
pub fn make_rule(domain: Domain, exactness: usize) -> Result<QuadratureRule> {
    if exactness > MAX_EXACTNESS {
        return Err(Error::invalid(format!(
            "quadrature exactness {exactness} exceeds the supported maximum {MAX_EXACTNESS}"
        )));
    }
    let e = exactness;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match domain {
        Domain::Interval => {
            let (x, w) = gauss_legendre(e / 2 + 1);
            for (xi, wi) in x.into_iter().zip(w) {
                points.push([xi, 0.0, 0.0]);
                weights.push(wi);
            }
        }
        Domain::Square => {
            let (x, w) = gauss_legendre(e / 2 + 1);
            for (xi, wi) in x.iter().zip(&w) {
                for (yj, wj) in x.iter().zip(&w) {
                    points.push([*xi, *yj, 0.0]);
                    weights.push(wi * wj);
                }
            }
        }
        Domain::Triangle => {
            let (x, w) = gauss_legendre((e + 3) / 2);
            for (u, wu) in x.iter().zip(&w) {
                for (v, wv) in x.iter().zip(&w) {
                    points.push([u * (1.0 - v), *v, 0.0]);
                    weights.push(wu * wv * (1.0 - v));
                }
            }
        }
        Domain::Tet => {
            let (x, w) = gauss_legendre((e + 4) / 2);
            for (u, wu) in x.iter().zip(&w) {
                for (v, wv) in x.iter().zip(&w) {
                    for (t, wt) in x.iter().zip(&w) {
                        points.push([u * (1.0 - v) * (1.0 - t), v * (1.0 - t), *t]);
                        weights.push(wu * wv * wt * (1.0 - v) * (1.0 - t) * (1.0 - t));
                    }
                }
            }
        }
        Domain::Prism => {
            let tri = make_rule(Domain::Triangle, e)?;
            let line = make_rule(Domain::Interval, e)?;
            for (p, wp) in tri.iter() {
                for (z, wz) in line.iter() {
                    points.push([p[0], p[1], z[0]]);
                    weights.push(wp * wz);
                }
            }
        }
    }
    Ok(QuadratureRule {
        domain,
        exactness,
        points,
        weights,
    })
}

/// Weighted nodal sum of `f`.
pub fn integrate<F>(rule: &QuadratureRule, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut sum = 0.0;
    for (x, w) in rule.iter() {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::numeric("non-finite integrand", Some(x)));
        }
        sum += w * v;
    }
    Ok(sum)
}
