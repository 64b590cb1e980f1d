//! Degrees of freedom: facet normal moments and interior moments.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::geometry::{ElementGeometry, ElementKind};
use crate::polyspace::{monomial_basis, nedelec_basis, prism_pairs_basis, BasisSet, Polynomial, SpaceSpec, VectorPolynomial};
use crate::quadrature::{make_rule, Domain, QuadratureRule};

/// Floor on the quadrature exactness used to apply any DOF; smooth
/// non-polynomial fields need more than the polynomial minimum.
pub const DOF_QUADRATURE_EXACTNESS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub enum DofKind {
    /// ∫_e v·n z ds with z given in the facet's own parameter coordinates.
    FacetMoment { facet: usize, test: Polynomial },
    /// ∫_T v_c z dx.
    InteriorScalarMoment { component: usize, test: Polynomial },
    /// ∫_T v·z dx for a vector test function.
    InteriorPairMoment { test: VectorPolynomial },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DofFunctional {
    pub kind: DofKind,
    /// Quadrature exactness needed when v lies in the shape-function space.
    pub exactness: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DofSet {
    pub kind: ElementKind,
    pub k: u32,
    pub dofs: Vec<DofFunctional>,
}

impl DofSet {
    pub fn count(&self) -> usize {
        self.dofs.len()
    }

    /// The shape-function space these DOFs are unisolvent for.
    pub fn space(&self) -> SpaceSpec {
        bdm_space(self.kind, self.k as i32)
    }
}

pub fn bdm_space(kind: ElementKind, k: i32) -> SpaceSpec {
    match kind {
        ElementKind::Prism => SpaceSpec::BdmPrism { k },
        _ => SpaceSpec::BdmSimplex { k, d: kind.dim() },
    }
}

fn scalar_tests(spec: SpaceSpec) -> Vec<Polynomial> {
    monomial_basis(spec)
        .expect("monomial family")
        .scalars()
        .expect("scalar basis")
        .to_vec()
}

/// DOFs in fixed order: facets by id, then interior moments.
pub fn dof_set(kind: ElementKind, k: u32) -> Result<DofSet> {
    if !(1..=3).contains(&k) {
        return Err(Error::invalid(format!("BDM order must be 1, 2 or 3, got {k}")));
    }
    let ki = k as i32;
    let e = 2 * k as usize;
    let el = crate::geometry::reference_element(kind);
    let mut dofs = Vec::new();
    for (id, f) in el.facets.iter().enumerate() {
        let tests = match f.domain {
            Domain::Square => scalar_tests(SpaceSpec::TensorDegree { k: ki, dim: 2 }),
            d => scalar_tests(SpaceSpec::TotalDegree { k: ki, d: d.dim() }),
        };
        for test in tests {
            dofs.push(DofFunctional {
                kind: DofKind::FacetMoment { facet: id, test },
                exactness: e,
            });
        }
    }
    let interior = match kind {
        ElementKind::Prism => {
            let mut v = Vec::new();
            for test in scalar_tests(SpaceSpec::PrismGraded { m: ki, n: ki - 2 }) {
                v.push(DofKind::InteriorScalarMoment { component: 2, test });
            }
            let pairs = prism_pairs_basis(ki - 1, ki)?;
            for test in pairs.vectors().expect("vector basis") {
                v.push(DofKind::InteriorPairMoment { test: test.clone() });
            }
            v
        }
        _ => nedelec_basis(ki - 1, kind.dim())?
            .vectors()
            .expect("vector basis")
            .iter()
            .map(|t| DofKind::InteriorPairMoment { test: t.clone() })
            .collect(),
    };
    dofs.extend(interior.into_iter().map(|kind| DofFunctional { kind, exactness: e }));
    Ok(DofSet { kind, k, dofs })
}

/// DOFs sharing one set of quadrature nodes.
#[derive(Clone, Debug)]
struct NodeGroup {
    reference: Vec<[f64; 3]>,
    physical: Vec<[f64; 3]>,
    /// (dof index, weight vector per node): dof(v) = Σ_q w_q · v(x_q).
    rows: Vec<(usize, Vec<[f64; 3]>)>,
}

/// DOF functionals reduced to weighted point evaluations on one element.
///
/// Interior test functions are transported covariantly, z = J⁻ᵀ ẑ ∘ F⁻¹;
/// facet tests are composed with the inverse facet parameterization.
#[derive(Clone, Debug)]
pub struct CompiledDofs {
    dim: usize,
    count: usize,
    groups: Vec<NodeGroup>,
    /// J / det J, the Piola factor applied to reference basis members.
    piola: [[f64; 3]; 3],
}

fn rule_for(domain: Domain, exactness: usize) -> Result<QuadratureRule> {
    make_rule(domain, exactness.max(DOF_QUADRATURE_EXACTNESS))
}

impl CompiledDofs {
    pub fn new(dofs: &DofSet, el: &ElementGeometry) -> Result<Self> {
        Self::from_functionals(&dofs.dofs, el)
    }

    fn from_functionals(dofs: &[DofFunctional], el: &ElementGeometry) -> Result<Self> {
        let d = el.dim();
        let facets = el.facets();
        let map = &el.map;
        let abs_det = map.det().abs();
        // group key: Some(facet) or None for the interior
        let mut keys: Vec<Option<usize>> = Vec::new();
        for dof in dofs {
            let key = match &dof.kind {
                DofKind::FacetMoment { facet, .. } => Some(*facet),
                _ => None,
            };
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let mut groups = Vec::new();
        for key in keys {
            let members: Vec<(usize, &DofFunctional)> = dofs
                .iter()
                .enumerate()
                .filter(|(_, f)| match &f.kind {
                    DofKind::FacetMoment { facet, .. } => Some(*facet) == key,
                    _ => key.is_none(),
                })
                .collect();
            let exactness = members.iter().map(|(_, f)| f.exactness).max().unwrap_or(0);
            let group = match key {
                Some(fid) => {
                    let facet = facets
                        .get(fid)
                        .ok_or_else(|| Error::invalid(format!("facet {fid} does not exist on a {}", el.kind)))?;
                    let rule = rule_for(facet.domain, exactness)?;
                    let reference = rule.iter().map(|(s, _)| facet.reference_point(s)).collect();
                    let physical = rule.iter().map(|(s, _)| facet.point(s)).collect();
                    let rows = members
                        .iter()
                        .map(|(i, f)| {
                            let DofKind::FacetMoment { test, .. } = &f.kind else { unreachable!() };
                            let w = rule
                                .iter()
                                .map(|(s, wq)| {
                                    let c = wq * facet.jacobian * test.value(s);
                                    facet.normal.map(|n| c * n)
                                })
                                .collect();
                            (*i, w)
                        })
                        .collect();
                    NodeGroup { reference, physical, rows }
                }
                None => {
                    let rule = rule_for(el.kind.domain(), exactness)?;
                    let reference: Vec<[f64; 3]> = rule.iter().map(|(x, _)| pad(x)).collect();
                    let physical = reference.iter().map(|x| map.apply(&x[..d])).collect();
                    let rows = members
                        .iter()
                        .map(|(i, f)| {
                            let w = rule
                                .iter()
                                .map(|(x, wq)| {
                                    let mut z = [0.0; 3];
                                    match &f.kind {
                                        DofKind::InteriorScalarMoment { component, test } => {
                                            z[*component] = test.value(x);
                                        }
                                        DofKind::InteriorPairMoment { test } => {
                                            test.value_into(x, &mut z[..d]);
                                        }
                                        DofKind::FacetMoment { .. } => unreachable!(),
                                    }
                                    map.apply_inverse_transpose(&z).map(|c| c * wq * abs_det)
                                })
                                .collect();
                            (*i, w)
                        })
                        .collect();
                    NodeGroup { reference, physical, rows }
                }
            };
            groups.push(group);
        }
        let mut piola = [[0.0; 3]; 3];
        for (r, row) in piola.iter_mut().enumerate().take(d) {
            for (c, e) in row.iter_mut().enumerate().take(d) {
                *e = map.entry(r, c) / map.det();
            }
        }
        Ok(CompiledDofs {
            dim: d,
            count: dofs.len(),
            groups,
            piola,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// All DOF values of a field given at physical points.
    pub fn apply<F: VectorField + ?Sized>(&self, field: &F) -> Result<Vec<f64>> {
        let d = self.dim;
        if field.value_dim() != d {
            return Err(Error::invalid(format!(
                "field has {} components, element needs {d}",
                field.value_dim()
            )));
        }
        let mut out = vec![0.0; self.count];
        let mut buf = [0.0; 3];
        for g in &self.groups {
            let mut values = Vec::with_capacity(g.physical.len());
            for x in &g.physical {
                field.eval(&x[..d], &mut buf[..d]);
                if buf[..d].iter().any(|v| !v.is_finite()) {
                    return Err(Error::numeric("non-finite field value in DOF integral", Some(&x[..d])));
                }
                values.push(buf);
            }
            for (i, w) in &g.rows {
                out[*i] = w
                    .iter()
                    .zip(&values)
                    .map(|(wq, v)| (0..d).map(|c| wq[c] * v[c]).sum::<f64>())
                    .sum();
            }
        }
        Ok(out)
    }

    /// DOF values of the Piola images (J b̂ / det J) ∘ F⁻¹ of reference vector
    /// polynomials, one column each.
    pub fn apply_reference_basis(&self, basis: &[VectorPolynomial]) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::zeros(self.count, basis.len());
        let mut buf = [0.0; 3];
        let p = &self.piola;
        // pull the weights back: w · (P b̂) = (Pᵀ w) · b̂
        let groups: Vec<NodeGroup> = self
            .groups
            .iter()
            .map(|g| NodeGroup {
                reference: g.reference.clone(),
                physical: Vec::new(),
                rows: g
                    .rows
                    .iter()
                    .map(|(i, w)| {
                        let pulled = w
                            .iter()
                            .map(|wq| {
                                let mut o = [0.0; 3];
                                for (c, oc) in o.iter_mut().enumerate().take(d) {
                                    *oc = (0..d).map(|r| p[r][c] * wq[r]).sum();
                                }
                                o
                            })
                            .collect();
                        (*i, pulled)
                    })
                    .collect(),
            })
            .collect();
        for g in &groups {
            for (j, b) in basis.iter().enumerate() {
                let values: Vec<[f64; 3]> = g
                    .reference
                    .iter()
                    .map(|x| {
                        b.value_into(&x[..d], &mut buf[..d]);
                        buf
                    })
                    .collect();
                for (i, w) in &g.rows {
                    m[(*i, j)] = w
                        .iter()
                        .zip(&values)
                        .map(|(wq, v)| (0..d).map(|c| wq[c] * v[c]).sum::<f64>())
                        .sum();
                }
            }
        }
        m
    }
}

fn pad(x: &[f64]) -> [f64; 3] {
    let mut p = [0.0; 3];
    p[..x.len()].copy_from_slice(x);
    p
}

/// Value of one DOF functional on a field over a physical element.
pub fn apply_dof<F: VectorField + ?Sized>(dof: &DofFunctional, field: &F, el: &ElementGeometry) -> Result<f64> {
    let compiled = CompiledDofs::from_functionals(std::slice::from_ref(dof), el)?;
    Ok(compiled.apply(field)?[0])
}

/// Entry (i, j) is DOF i applied to the Piola image of reference basis member j.
pub fn assemble_dof_matrix(dofs: &DofSet, basis: &BasisSet, el: &ElementGeometry) -> Result<DMatrix<f64>> {
    let members = basis
        .vectors()
        .ok_or_else(|| Error::invalid("DOF matrix needs a vector basis"))?;
    if members.len() != dofs.count() {
        return Err(Error::invalid(format!(
            "{} DOFs against {} basis functions",
            dofs.count(),
            members.len()
        )));
    }
    if members.iter().any(|b| b.num_components() != el.dim() || b.dim() != el.dim()) {
        return Err(Error::invalid("basis does not live on this element"));
    }
    Ok(CompiledDofs::new(dofs, el)?.apply_reference_basis(members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::polyspace::bdm_space_basis;

    #[test]
    fn counts_match_formulas() {
        for k in 1..=3u32 {
            let kk = k as usize;
            assert_eq!(dof_set(ElementKind::Triangle, k).unwrap().count(), 3 * (kk + 1) + kk * kk - 1);
            assert_eq!(
                dof_set(ElementKind::Tet, k).unwrap().count(),
                2 * (kk + 1) * (kk + 2) + (kk - 1) * (kk + 1) * (kk + 2) / 2
            );
            let prism = (kk + 1) * (kk + 2) + 3 * (kk + 1) * (kk + 1) + (kk + 1) * (kk + 2) * (kk - 1) / 2 + (kk + 1) * (kk * kk - 1);
            let set = dof_set(ElementKind::Prism, k).unwrap();
            assert_eq!(set.count(), prism);
            assert_eq!(set.count(), set.space().dimension());
        }
        assert_eq!(dof_set(ElementKind::Prism, 1).unwrap().count(), 18);
        assert_eq!(dof_set(ElementKind::Prism, 2).unwrap().count(), 54);
        assert!(dof_set(ElementKind::Tet, 0).is_err());
        assert!(dof_set(ElementKind::Prism, 4).is_err());
    }

    #[test]
    fn tet_k1_has_no_interior() {
        let set = dof_set(ElementKind::Tet, 1).unwrap();
        assert_eq!(set.count(), 12);
        assert!(set.dofs.iter().all(|d| matches!(d.kind, DofKind::FacetMoment { .. })));
    }

    fn facet_unit(facet: usize, dim: usize) -> DofFunctional {
        DofFunctional {
            kind: DofKind::FacetMoment {
                facet,
                test: Polynomial::constant(dim, 1.0),
            },
            exactness: 0,
        }
    }

    #[test]
    fn prism_facet_examples() {
        let el = ElementGeometry::reference(ElementKind::Prism);
        let e1 = FnField::new(3, |_: &[f64], o: &mut [f64]| o.copy_from_slice(&[1.0, 0.0, 0.0]));
        assert!((apply_dof(&facet_unit(0, 2), &e1, &el).unwrap() + 1.0).abs() < 1e-14);
        let e3 = FnField::new(3, |_: &[f64], o: &mut [f64]| o.copy_from_slice(&[0.0, 0.0, 1.0]));
        assert!((apply_dof(&facet_unit(3, 2), &e3, &el).unwrap() + 0.5).abs() < 1e-14);
        let zero = DofFunctional {
            kind: DofKind::FacetMoment { facet: 2, test: Polynomial::zero(2) },
            exactness: 0,
        };
        assert_eq!(apply_dof(&zero, &e1, &el).unwrap(), 0.0);
    }

    #[test]
    fn flux_of_constant_through_slanted_face() {
        // v = (1,1,0) through x1 + x2 = 1: v·n = √2, area √2
        let el = ElementGeometry::reference(ElementKind::Prism);
        let v = FnField::new(3, |_: &[f64], o: &mut [f64]| o.copy_from_slice(&[1.0, 1.0, 0.0]));
        assert!((apply_dof(&facet_unit(2, 2), &v, &el).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn divergence_theorem_on_scaled_tet() {
        // Σ facet fluxes of x equals d·|T|
        let el = ElementGeometry::scaled(ElementKind::Tet, &[0.5, 2.0, 1e-3]).unwrap();
        let v = FnField::new(3, |x: &[f64], o: &mut [f64]| o.copy_from_slice(&x[..3]));
        let total: f64 = (0..4).map(|f| apply_dof(&facet_unit(f, 2), &v, &el).unwrap()).sum();
        assert!((total - 3.0 * el.measure()).abs() < 1e-14 * el.measure().max(1.0) * 10.0);
    }

    #[test]
    fn non_finite_field_is_a_numeric_error() {
        let el = ElementGeometry::reference(ElementKind::Triangle);
        let v = FnField::new(2, |_: &[f64], o: &mut [f64]| o.copy_from_slice(&[f64::NAN, 0.0]));
        assert!(matches!(apply_dof(&facet_unit(0, 1), &v, &el), Err(Error::Numeric { .. })));
    }

    #[test]
    fn matrix_is_square_and_checks_sizes() {
        let el = ElementGeometry::reference(ElementKind::Triangle);
        let dofs = dof_set(ElementKind::Triangle, 1).unwrap();
        let basis = bdm_space_basis(dofs.space()).unwrap();
        let m = assemble_dof_matrix(&dofs, &basis, &el).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (6, 6));
        let wrong = bdm_space_basis(SpaceSpec::BdmSimplex { k: 2, d: 2 }).unwrap();
        assert!(assemble_dof_matrix(&dofs, &wrong, &el).is_err());
    }
}
