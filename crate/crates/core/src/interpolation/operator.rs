//! The DOF system solve and the resulting interpolant.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::dofs::{bdm_space, dof_set, CompiledDofs, DofSet};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::geometry::ElementGeometry;
use crate::polyspace::{bdm_space_basis, BasisSet, Polynomial, SpaceSpec, VectorPolynomial};

/// Smallest admissible σ_min/σ_max of the row-equilibrated DOF matrix.
pub const UNISOLVENCE_TOLERANCE: f64 = 1e-12;

/// σ_min/σ_max after scaling each row by its largest absolute entry.
pub fn condition_ratio(matrix: &DMatrix<f64>) -> f64 {
    let (eq, _) = equilibrate_rows(matrix);
    let s = eq.singular_values();
    let max = s.max();
    let min = s.min();
    if max > 0.0 && min.is_finite() {
        min / max
    } else {
        0.0
    }
}

fn equilibrate_rows(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let mut out = m.clone();
    let mut scale = vec![1.0; m.nrows()];
    for (i, s) in scale.iter_mut().enumerate() {
        let r = m.row(i).amax();
        if r > 0.0 {
            *s = 1.0 / r;
            out.row_mut(i).scale_mut(*s);
        }
    }
    (out, scale)
}

/// The local interpolation operator on one element, with the factored DOF matrix.
#[derive(Clone, Debug)]
pub struct BdmInterpolator {
    element: ElementGeometry,
    dofs: DofSet,
    compiled: CompiledDofs,
    basis: BasisSet,
    matrix: DMatrix<f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    lu: LU<f64, Dyn, Dyn>,
    condition: f64,
}

impl BdmInterpolator {
    pub fn new(el: &ElementGeometry, k: u32) -> Result<Self> {
        Self::from_dofs(dof_set(el.kind, k)?, el)
    }

    /// Build from an arbitrary DOF list; fails with the condition estimate if
    /// the DOFs are not unisolvent on the BDM space.
    pub fn from_dofs(dofs: DofSet, el: &ElementGeometry) -> Result<Self> {
        if dofs.kind != el.kind {
            return Err(Error::invalid(format!("DOFs for {} on a {} element", dofs.kind, el.kind)));
        }
        let basis = bdm_space_basis(dofs.space())?;
        let members = basis.vectors().expect("vector basis");
        if members.len() != dofs.count() {
            return Err(Error::Unisolvence { condition_ratio: 0.0 });
        }
        let compiled = CompiledDofs::new(&dofs, el)?;
        let matrix = compiled.apply_reference_basis(members);
        let (rows, row_scale) = equilibrate_rows(&matrix);
        let condition = {
            let s = rows.singular_values();
            if s.max() > 0.0 { s.min() / s.max() } else { 0.0 }
        };
        if !(condition >= UNISOLVENCE_TOLERANCE) {
            return Err(Error::Unisolvence { condition_ratio: condition });
        }
        let mut scaled = rows;
        let mut col_scale = vec![1.0; scaled.ncols()];
        for (j, s) in col_scale.iter_mut().enumerate() {
            let c = scaled.column(j).amax();
            if c > 0.0 {
                *s = 1.0 / c;
                scaled.column_mut(j).scale_mut(*s);
            }
        }
        Ok(BdmInterpolator {
            element: el.clone(),
            dofs,
            compiled,
            basis,
            matrix,
            row_scale,
            col_scale,
            lu: scaled.lu(),
            condition,
        })
    }

    pub fn element(&self) -> &ElementGeometry {
        &self.element
    }

    pub fn dofs(&self) -> &DofSet {
        &self.dofs
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    /// The unscaled DOF matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// σ_min/σ_max of the row-equilibrated DOF matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn dof_values<F: VectorField + ?Sized>(&self, field: &F) -> Result<Vec<f64>> {
        self.compiled.apply(field)
    }

    pub fn interpolate<F: VectorField + ?Sized>(&self, field: &F) -> Result<Interpolant> {
        let values = self.dof_values(field)?;
        self.from_dof_values(&values)
    }

    /// The unique member of the space with the given DOF values.
    pub fn from_dof_values(&self, values: &[f64]) -> Result<Interpolant> {
        if values.len() != self.dofs.count() {
            return Err(Error::invalid("wrong number of DOF values"));
        }
        let rhs = DVector::from_iterator(values.len(), values.iter().zip(&self.row_scale).map(|(v, s)| v * s));
        let y = self
            .lu
            .solve(&rhs)
            .ok_or(Error::Unisolvence { condition_ratio: self.condition })?;
        let coefficients: Vec<f64> = y.iter().zip(&self.col_scale).map(|(v, s)| v * s).collect();
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::numeric("non-finite interpolation coefficients", None));
        }
        Ok(Interpolant::new(self.basis.space, coefficients, &self.element, &self.basis))
    }
}

/// Iv for one field; `interpolate` is the one-shot form of [`BdmInterpolator`].
pub fn interpolate<F: VectorField + ?Sized>(field: &F, el: &ElementGeometry, k: u32) -> Result<Interpolant> {
    BdmInterpolator::new(el, k)?.interpolate(field)
}

/// A member of the BDM space on a physical element.
///
/// The physical basis is the Piola image of the reference monomial basis,
/// b_j = (J b̂_j / det J) ∘ F⁻¹. It spans the same space as the monomials
/// composed with F⁻¹, and the DOF matrix of the mapped basis equals the
/// reference one, so conditioning does not degrade with anisotropy.
#[derive(Clone, Debug)]
pub struct Interpolant {
    space: SpaceSpec,
    coefficients: Vec<f64>,
    element: ElementGeometry,
    /// Σ c_j b̂_j, so that Iv = (J/det J) · reference ∘ F⁻¹.
    reference: VectorPolynomial,
}

impl Interpolant {
    fn new(space: SpaceSpec, coefficients: Vec<f64>, el: &ElementGeometry, basis: &BasisSet) -> Self {
        let d = el.dim();
        let mut reference = VectorPolynomial::zero(d, d);
        for (c, b) in coefficients.iter().zip(basis.vectors().expect("vector basis")) {
            if *c != 0.0 {
                reference = &reference + &b.scale(*c);
            }
        }
        Interpolant {
            space,
            coefficients,
            element: el.clone(),
            reference,
        }
    }

    /// Interpolant with given coefficients over `bdm_space_basis(space)`.
    pub fn from_coefficients(el: &ElementGeometry, k: u32, coefficients: Vec<f64>) -> Result<Self> {
        let space = bdm_space(el.kind, k as i32);
        let basis = bdm_space_basis(space)?;
        if coefficients.len() != basis.dimension() {
            return Err(Error::invalid(format!(
                "{} coefficients for a space of dimension {}",
                coefficients.len(),
                basis.dimension()
            )));
        }
        Ok(Self::new(space, coefficients, el, &basis))
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn element(&self) -> &ElementGeometry {
        &self.element
    }

    /// The pulled-back field on the reference element.
    pub fn reference_field(&self) -> &VectorPolynomial {
        &self.reference
    }

    /// Value at the physical image of a reference point.
    pub fn eval_reference(&self, xhat: &[f64], out: &mut [f64]) {
        let d = self.element.dim();
        let mut r = [0.0; 3];
        self.reference.value_into(&xhat[..d], &mut r[..d]);
        let map = &self.element.map;
        let det = map.det();
        for (i, o) in out.iter_mut().enumerate().take(d) {
            *o = (0..d).map(|c| map.entry(i, c) * r[c]).sum::<f64>() / det;
        }
    }

    /// div Iv ∘ F as a polynomial in reference coordinates.
    pub fn divergence_reference(&self) -> Polynomial {
        self.reference.divergence().scale(1.0 / self.element.map.det())
    }

    /// Transport to `target` by the Piola map of F_target ∘ F⁻¹. In the
    /// mapped basis this keeps the coefficients.
    pub fn piola_transport(&self, target: &ElementGeometry) -> Result<Interpolant> {
        if target.kind != self.element.kind {
            return Err(Error::invalid("Piola transport between different element kinds"));
        }
        let k = match self.space {
            SpaceSpec::BdmSimplex { k, .. } | SpaceSpec::BdmPrism { k } => k as u32,
            _ => unreachable!("interpolants live in BDM spaces"),
        };
        Interpolant::from_coefficients(target, k, self.coefficients.clone())
    }
}

impl VectorField for Interpolant {
    fn value_dim(&self) -> usize {
        self.element.dim()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let xhat = self.element.to_reference(x);
        self.eval_reference(&xhat, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::geometry::ElementKind;
    use crate::interpolation::dofs::DofFunctional;

    #[test]
    fn constants_reproduced() {
        for kind in ElementKind::all() {
            let el = ElementGeometry::scaled(kind, &[0.7, 0.2, 0.05][..kind.dim()]).unwrap();
            let d = kind.dim();
            let v = FnField::new(d, move |_: &[f64], o: &mut [f64]| {
                o.fill(0.0);
                o[0] = 1.0;
            });
            for k in 1..=3 {
                let iv = interpolate(&v, &el, k).unwrap();
                let x = el.centroid();
                let val = iv.eval_vec(&x[..d]);
                assert!((val[0] - 1.0).abs() < 1e-11, "{kind} k={k}: {val:?}");
                assert!(val[1..].iter().all(|c| c.abs() < 1e-11));
            }
        }
    }

    #[test]
    fn reference_matrices_are_well_conditioned() {
        for kind in ElementKind::all() {
            for k in 1..=3 {
                let i = BdmInterpolator::new(&ElementGeometry::reference(kind), k).unwrap();
                assert!(i.condition() > 1e-9, "{kind} k={k}: {}", i.condition());
            }
        }
    }

    #[test]
    fn duplicated_dof_is_rejected() {
        let el = ElementGeometry::reference(ElementKind::Prism);
        let mut dofs = dof_set(ElementKind::Prism, 1).unwrap();
        let dup: DofFunctional = dofs.dofs[0].clone();
        dofs.dofs[1] = dup;
        match BdmInterpolator::from_dofs(dofs, &el) {
            Err(Error::Unisolvence { condition_ratio }) => assert!(condition_ratio < 1e-14),
            other => panic!("expected unisolvence failure, got {other:?}"),
        }
    }

    #[test]
    fn divergence_reference_matches_physical() {
        let el = ElementGeometry::scaled(ElementKind::Triangle, &[0.5, 0.25]).unwrap();
        let v = FnField::new(2, |x: &[f64], o: &mut [f64]| o.copy_from_slice(&[x[0] * x[0], x[0] * x[1]]));
        let iv = interpolate(&v, &el, 2).unwrap();
        // div v = 3 x1, reproduced exactly for quadratic v
        let div = iv.divergence_reference();
        let xhat = [0.3, 0.2];
        let x = el.to_physical(&xhat);
        assert!((div.value(&xhat) - 3.0 * x[0]).abs() < 1e-12);
    }
}
