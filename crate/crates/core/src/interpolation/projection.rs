//! L² projections and the commuting-diagram defect ‖div Iv − Π_D div v‖.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dofs::bdm_space;
use super::operator::BdmInterpolator;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::fields::{field_divergence, AnalyticField};
use crate::geometry::{ElementGeometry, ElementKind};
use crate::polyspace::{bdm_space_basis, monomial_basis, MultiIndex, Polynomial, SpaceSpec, VectorPolynomial};
use crate::quadrature::{make_rule, QuadratureRule};

/// Exactness of the volume rule used for projections and defect norms.
pub const PROJECTION_EXACTNESS: usize = 20;

/// A polynomial on an element, stored in reference coordinates: q(x) = reference(F⁻¹x).
#[derive(Clone, Debug)]
pub struct ElementPolynomial {
    pub reference: Polynomial,
    pub element: ElementGeometry,
}

impl ElementPolynomial {
    pub fn value(&self, x: &[f64]) -> f64 {
        let xhat = self.element.to_reference(x);
        self.reference.value(&xhat[..self.element.dim()])
    }
}

impl VectorField for ElementPolynomial {
    fn value_dim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.value(x);
    }
}

fn volume_rule(el: &ElementGeometry) -> Result<QuadratureRule> {
    make_rule(el.kind.domain(), PROJECTION_EXACTNESS)
}

/// Samples of a scalar field at the physical images of the rule's nodes.
fn samples<G: VectorField + ?Sized>(g: &G, el: &ElementGeometry, rule: &QuadratureRule) -> Result<Vec<f64>> {
    if g.value_dim() != 1 {
        return Err(Error::invalid("projection needs a scalar field"));
    }
    let d = el.dim();
    let mut buf = [0.0];
    rule.iter()
        .map(|(xhat, _)| {
            let x = el.to_physical(xhat);
            g.eval(&x[..d], &mut buf);
            if buf[0].is_finite() {
                Ok(buf[0])
            } else {
                Err(Error::numeric("non-finite value in projection", Some(&x[..d])))
            }
        })
        .collect()
}

/// Least-squares fit Σ c_i basis_i to node values in the element's L² inner product.
fn project_values(values: &[f64], basis: &[Polynomial], rule: &QuadratureRule) -> Result<Polynomial> {
    let n = basis.len();
    let dim = rule.dim();
    if n == 0 {
        return Ok(Polynomial::zero(dim));
    }
    // weighted least squares via SVD, avoiding the squared condition of the Gram matrix
    let w = rule.weights();
    let a = DMatrix::from_fn(rule.len(), n, |q, j| w[q].sqrt() * basis[j].value(rule.point(q)));
    let b = DVector::from_iterator(rule.len(), values.iter().zip(w).map(|(v, wq)| v * wq.sqrt()));
    let svd = a.svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    if !(smin > 1e-14 * smax) {
        return Err(Error::numeric("singular Gram matrix in L2 projection", None));
    }
    let c = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::numeric(format!("L2 projection solve failed: {e}"), None))?;
    let mut q = Polynomial::zero(dim);
    for (ci, b) in c.iter().zip(basis) {
        q = &q + &b.scale(*ci);
    }
    Ok(q)
}

/// L² projection of a scalar field onto a scalar polynomial space on `el`.
///
/// The space is taken in reference coordinates and composed with F⁻¹, which
/// for P_k, Q_k and P_{m,n} spans the same physical space under the maps used
/// here.
pub fn l2_project<G: VectorField + ?Sized>(g: &G, space: SpaceSpec, el: &ElementGeometry) -> Result<ElementPolynomial> {
    let basis = monomial_basis(space)?;
    let basis = basis.scalars().expect("scalar basis");
    if basis.iter().any(|b| b.dim() != el.dim()) {
        return Err(Error::invalid(format!("{space:?} does not live on a {}", el.kind)));
    }
    let rule = volume_rule(el)?;
    let values = samples(g, el, &rule)?;
    Ok(ElementPolynomial {
        reference: project_values(&values, basis, &rule)?,
        element: el.clone(),
    })
}

/// Relative eigenvalue cut-off for the numerical span of the divergence image.
pub const SPAN_TOLERANCE: f64 = 1e-10;

/// Orthonormal (in L²(T̂)) basis of span{div b ∘ F : b in the BDM basis}, in reference coordinates.
pub fn divergence_image_basis(el: &ElementGeometry, k: u32) -> Result<Vec<Polynomial>> {
    let d = el.dim();
    let basis = bdm_space_basis(bdm_space(el.kind, k as i32))?;
    // div of a Piola image is div̂ b̂ / det J composed with F⁻¹; the constant drops out of the span
    let candidates: Vec<Polynomial> = basis
        .vectors()
        .expect("vector basis")
        .iter()
        .map(|b| b.divergence())
        .filter(|p| !p.is_zero())
        .collect();
    let rule = volume_rule(el)?;
    let table: Vec<Vec<f64>> = rule.iter().map(|(x, _)| candidates.iter().map(|p| p.value(x)).collect()).collect();
    let n = candidates.len();
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for (q, row) in table.iter().enumerate() {
        let w = rule.weights()[q];
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] += w * row[i] * row[j];
            }
        }
    }
    // unit-normalize candidates before the rank decision
    let norms: Vec<f64> = (0..n).map(|i| gram[(i, i)].sqrt()).collect();
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] /= norms[i] * norms[j];
        }
    }
    let eig = SymmetricEigen::new(gram);
    let lmax = eig.eigenvalues.max();
    let mut out = Vec::new();
    for (e, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= SPAN_TOLERANCE * lmax {
            continue;
        }
        let mut u = Polynomial::zero(d);
        for i in 0..n {
            let c = eig.eigenvectors[(i, e)] / (norms[i] * lambda.sqrt());
            u = &u + &candidates[i].scale(c);
        }
        out.push(u);
    }
    Ok(out)
}

/// Target space D of the commuting-diagram check: P_{k−1} on simplices, the
/// numerical divergence image on prisms.
pub fn divergence_target_basis(el: &ElementGeometry, k: u32) -> Result<Vec<Polynomial>> {
    match el.kind {
        ElementKind::Prism => divergence_image_basis(el, k),
        kind => Ok(monomial_basis(SpaceSpec::TotalDegree {
            k: k as i32 - 1,
            d: kind.dim(),
        })?
        .scalars()
        .expect("scalar basis")
        .to_vec()),
    }
}

/// ‖div(Iv) − Π_D div v‖_{0,2,T}.
pub fn commuting_defect(field: &AnalyticField, el: &ElementGeometry, k: u32) -> Result<f64> {
    let div = field_divergence(field)?;
    let interpolator = BdmInterpolator::new(el, k)?;
    commuting_defect_with(&interpolator, field, &div)
}

/// Commuting defect with a prepared interpolator and a given divergence field.
pub fn commuting_defect_with<F, G>(interpolator: &BdmInterpolator, field: &F, div: &G) -> Result<f64>
where
    F: VectorField + ?Sized,
    G: VectorField + ?Sized,
{
    let el = interpolator.element();
    let k = interpolator.dofs().k;
    let iv = interpolator.interpolate(field)?;
    let rule = volume_rule(el)?;
    let values = samples(div, el, &rule)?;
    let target = divergence_target_basis(el, k)?;
    let q = project_values(&values, &target, &rule)?;
    let div_iv = iv.divergence_reference();
    let sum: f64 = rule
        .iter()
        .map(|(x, w)| {
            let e = div_iv.value(x) - q.value(x);
            w * e * e
        })
        .sum();
    Ok((sum * el.map.det().abs()).sqrt())
}

/// A polynomial term in serializable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub component: usize,
    pub exponents: Vec<u32>,
    pub coefficient: f64,
}

pub fn vector_polynomial_to_records(p: &VectorPolynomial) -> Vec<TermRecord> {
    p.components()
        .iter()
        .enumerate()
        .flat_map(|(c, q)| {
            q.terms().map(move |(a, coefficient)| TermRecord {
                component: c,
                exponents: a.exponents().to_vec(),
                coefficient,
            })
        })
        .collect()
}

pub fn vector_polynomial_from_records(dim: usize, records: &[TermRecord]) -> Result<VectorPolynomial> {
    let mut comps = vec![Polynomial::zero(dim); dim];
    for r in records {
        if r.component >= dim || r.exponents.len() != dim {
            return Err(Error::invalid("term record does not fit the dimension"));
        }
        let t = Polynomial::from_terms(dim, [(MultiIndex::new(r.exponents.clone()), r.coefficient)]);
        comps[r.component] = &comps[r.component] + &t;
    }
    VectorPolynomial::new(comps)
}

/// A field for which the commuting diagram fails on the prism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: ElementKind,
    pub k: u32,
    pub seed: u64,
    /// Index of the first trial exceeding the threshold.
    pub trial: usize,
    pub threshold: f64,
    pub defect: f64,
    pub field: Vec<TermRecord>,
}

impl Counterexample {
    pub fn polynomial(&self) -> Result<VectorPolynomial> {
        vector_polynomial_from_records(self.kind.dim(), &self.field)
    }
}

/// Random cubic vector field: each component has a handful of monomials of
/// total degree ≤ 3 with coefficients n/4, 1 ≤ |n| ≤ 4.
fn random_cubic(rng: &mut ChaCha8Rng, d: usize) -> VectorPolynomial {
    let monomials = MultiIndex::up_to_order(d, 3);
    let comps = (0..d)
        .map(|_| {
            let terms: Vec<(MultiIndex, f64)> = (0..rng.gen_range(0..=3))
                .map(|_| {
                    let a = monomials[rng.gen_range(0..monomials.len())].clone();
                    let n: i32 = rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 };
                    (a, n as f64 / 4.0)
                })
                .collect();
            Polynomial::from_terms(d, terms)
        })
        .collect();
    VectorPolynomial::new(comps).expect("matching dimensions")
}

/// Seeded search over cubic fields on the reference element for a defect above `threshold`.
pub fn search_counterexample(kind: ElementKind, k: u32, seed: u64, trials: usize, threshold: f64) -> Result<Option<Counterexample>> {
    let el = ElementGeometry::reference(kind);
    let interpolator = BdmInterpolator::new(&el, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let p = random_cubic(&mut rng, kind.dim());
        let div = p.divergence();
        let defect = commuting_defect_with(&interpolator, &p, &div)?;
        if defect > threshold {
            return Ok(Some(Counterexample {
                kind,
                k,
                seed,
                trial,
                threshold,
                defect,
                field: vector_polynomial_to_records(&p),
            }));
        }
    }
    Ok(None)
}
