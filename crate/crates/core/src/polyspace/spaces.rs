use serde::{Deserialize, Serialize};

use super::{MultiIndex, Polynomial, VectorPolynomial};
use crate::error::{Error, Result};

/// Names of the polynomial spaces used by the element and its DOFs.
///
/// Degree parameters are signed so that spaces such as `PrismGraded(k, k - 2)`
/// at `k = 1` can be written down directly; a negative degree is the empty space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceSpec {
    /// P_k in `d` variables.
    TotalDegree { k: i32, d: usize },
    /// Q_k on a `dim`-dimensional facet: degree ≤ k in each variable.
    TensorDegree { k: i32, dim: usize },
    /// P_{m,n}: total degree m in (x1,x2), degree n in x3.
    PrismGraded { m: i32, n: i32 },
    NedelecTriangle { m: i32 },
    NedelecTet { m: i32 },
    /// S_m: homogeneous degree-m vector polynomials with p(x)·x ≡ 0.
    HomogeneousTangential { m: i32, d: usize },
    /// Pairs (z1, z2, 0) whose slices in x3 lie in N_m and whose x3-degree is ≤ n.
    PrismPairs { m: i32, n: i32 },
    /// Full P_k^d on a triangle (d = 2) or tetrahedron (d = 3).
    BdmSimplex { k: i32, d: usize },
    /// P_{k,k}^3 on a prism.
    BdmPrism { k: i32 },
}

fn binom(n: i64, r: i64) -> usize {
    if r < 0 || n < r {
        return 0;
    }
    let mut acc: i64 = 1;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc as usize
}

impl SpaceSpec {
    /// Closed-form dimension of the space.
    pub fn dimension(&self) -> usize {
        match *self {
            SpaceSpec::TotalDegree { k, d } => binom(k as i64 + d as i64, d as i64),
            SpaceSpec::TensorDegree { k, dim } => {
                if k < 0 {
                    0
                } else {
                    (k as usize + 1).pow(dim as u32)
                }
            }
            SpaceSpec::PrismGraded { m, n } => {
                if m < 0 || n < 0 {
                    0
                } else {
                    binom(m as i64 + 2, 2) * (n as usize + 1)
                }
            }
            SpaceSpec::NedelecTriangle { m } => {
                let m = m.max(0) as usize;
                m * (m + 2)
            }
            SpaceSpec::NedelecTet { m } => {
                let m = m.max(0) as usize;
                m * (m + 2) * (m + 3) / 2
            }
            SpaceSpec::HomogeneousTangential { m, d } => {
                let m = m.max(0) as usize;
                match d {
                    2 => m,
                    _ => m * (m + 2),
                }
            }
            SpaceSpec::PrismPairs { m, n } => {
                if n < 0 {
                    0
                } else {
                    SpaceSpec::NedelecTriangle { m }.dimension() * (n as usize + 1)
                }
            }
            SpaceSpec::BdmSimplex { k, d } => d * binom(k as i64 + d as i64, d as i64),
            SpaceSpec::BdmPrism { k } => {
                let k = k.max(0) as usize;
                3 * (k + 1) * (k + 1) * (k + 2) / 2
            }
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(
            self,
            SpaceSpec::TotalDegree { .. } | SpaceSpec::TensorDegree { .. } | SpaceSpec::PrismGraded { .. }
        )
    }
}

/// Members of a basis: scalar or vector polynomials.
#[derive(Clone, Debug, PartialEq)]
pub enum BasisMembers {
    Scalar(Vec<Polynomial>),
    Vector(Vec<VectorPolynomial>),
}

/// An ordered basis of one of the spaces in [`SpaceSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSet {
    pub space: SpaceSpec,
    pub members: BasisMembers,
}

impl BasisSet {
    pub fn dimension(&self) -> usize {
        match &self.members {
            BasisMembers::Scalar(v) => v.len(),
            BasisMembers::Vector(v) => v.len(),
        }
    }

    pub fn scalars(&self) -> Option<&[Polynomial]> {
        match &self.members {
            BasisMembers::Scalar(v) => Some(v),
            BasisMembers::Vector(_) => None,
        }
    }

    pub fn vectors(&self) -> Option<&[VectorPolynomial]> {
        match &self.members {
            BasisMembers::Vector(v) => Some(v),
            BasisMembers::Scalar(_) => None,
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::invalid(format!("unsupported spatial dimension {d}")))
    }
}

/// Exponent tuples of total degree ≤ k in `d` variables, lexicographic.
fn total_degree_exponents(k: i32, d: usize) -> Vec<MultiIndex> {
    if k < 0 {
        return Vec::new();
    }
    MultiIndex::up_to_order(d, k as u32)
}

fn monomials(alphas: Vec<MultiIndex>) -> Vec<Polynomial> {
    alphas.into_iter().map(Polynomial::monomial).collect()
}

/// Monomial bases of P_k, Q_k and P_{m,n}, ordered lexicographically by exponent.
pub fn monomial_basis(spec: SpaceSpec) -> Result<BasisSet> {
    let alphas = match spec {
        SpaceSpec::TotalDegree { k, d } => {
            if d == 0 {
                return Err(Error::invalid("dimension must be positive"));
            }
            total_degree_exponents(k, d)
        }
        SpaceSpec::TensorDegree { k, dim } => {
            if dim == 0 {
                return Err(Error::invalid("dimension must be positive"));
            }
            let mut out = Vec::new();
            if k >= 0 {
                let k = k as u32;
                let count = (k + 1).pow(dim as u32);
                for idx in 0..count {
                    let mut e = vec![0u32; dim];
                    let mut r = idx;
                    for slot in e.iter_mut().rev() {
                        *slot = r % (k + 1);
                        r /= k + 1;
                    }
                    out.push(MultiIndex::new(e));
                }
            }
            out
        }
        SpaceSpec::PrismGraded { m, n } => prism_graded_exponents(m, n),
        other => {
            return Err(Error::invalid(format!(
                "{other:?} has no monomial basis; use the matching constructor"
            )))
        }
    };
    Ok(BasisSet {
        space: spec,
        members: BasisMembers::Scalar(monomials(alphas)),
    })
}

fn prism_graded_exponents(m: i32, n: i32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if m < 0 || n < 0 {
        return out;
    }
    for i in 0..=m as u32 {
        for j in 0..=(m as u32 - i) {
            for l in 0..=n as u32 {
                out.push(MultiIndex::new(vec![i, j, l]));
            }
        }
    }
    out.sort();
    out
}

/// Vector monomials e_c·x^α, blocked by component.
fn vector_monomials(alphas: &[MultiIndex], ncomp: usize) -> Vec<VectorPolynomial> {
    (0..ncomp)
        .flat_map(|c| {
            alphas
                .iter()
                .map(move |a| VectorPolynomial::unit(ncomp, c, Polynomial::monomial(a.clone())))
        })
        .collect()
}

/// Basis of S_m: homogeneous degree-m vector polynomials p with p(x)·x ≡ 0.
///
/// The basis is read off the nullspace of the linear map sending the
/// coefficients of p to those of the degree-(m+1) polynomial p·x.
pub fn homogeneous_tangential_basis(m: i32, d: usize) -> Result<BasisSet> {
    check_dim(d)?;
    if m < 0 {
        return Err(Error::invalid(format!("S_m requires m >= 0, got {m}")));
    }
    let spec = SpaceSpec::HomogeneousTangential { m, d };
    let inputs = MultiIndex::of_order(d, m as u32);
    let outputs = MultiIndex::of_order(d, m as u32 + 1);
    let ncols = d * inputs.len();
    let mut a = vec![vec![0.0; ncols]; outputs.len()];
    for c in 0..d {
        for (j, alpha) in inputs.iter().enumerate() {
            let beta = alpha.add(&MultiIndex::unit(d, c));
            let row = outputs.binary_search(&beta).expect("degree m+1 monomial");
            a[row][c * inputs.len() + j] += 1.0;
        }
    }
    let members = nullspace(a, ncols)
        .into_iter()
        .map(|vec| {
            let comps = (0..d)
                .map(|c| {
                    Polynomial::from_terms(
                        d,
                        inputs
                            .iter()
                            .enumerate()
                            .map(|(j, al)| (al.clone(), vec[c * inputs.len() + j])),
                    )
                })
                .collect();
            VectorPolynomial::new(comps).expect("components share dimension")
        })
        .collect();
    Ok(BasisSet {
        space: spec,
        members: BasisMembers::Vector(members),
    })
}

/// Nullspace of a dense matrix via reduced row echelon form.
/// Each returned vector has a one in its free variable.
fn nullspace(mut a: Vec<Vec<f64>>, ncols: usize) -> Vec<Vec<f64>> {
    const TOL: f64 = 1e-12;
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let (best, val) = (row..nrows)
            .map(|r| (r, a[r][col].abs()))
            .fold((row, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val < TOL {
            continue;
        }
        a.swap(row, best);
        let p = a[row][col];
        for v in a[row].iter_mut() {
            *v /= p;
        }
        for r in 0..nrows {
            if r != row && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in 0..ncols {
                    a[r][c] -= f * a[row][c];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; ncols];
            v[f] = 1.0;
            for (r, &pc) in pivots.iter().enumerate() {
                let x = -a[r][f];
                v[pc] = if x.abs() < TOL { 0.0 } else { x };
            }
            v
        })
        .collect()
}

/// Basis of the first-kind Nédélec space N_m = P_{m-1}^d ⊕ S_m.
pub fn nedelec_basis(m: i32, d: usize) -> Result<BasisSet> {
    check_dim(d)?;
    if m < 0 {
        return Err(Error::invalid(format!("Nédélec degree must be >= 0, got {m}")));
    }
    let spec = if d == 2 {
        SpaceSpec::NedelecTriangle { m }
    } else {
        SpaceSpec::NedelecTet { m }
    };
    let mut members = vector_monomials(&total_degree_exponents(m - 1, d), d);
    if m >= 1 {
        if let BasisMembers::Vector(s) = homogeneous_tangential_basis(m, d)?.members {
            members.extend(s);
        }
    }
    Ok(BasisSet {
        space: spec,
        members: BasisMembers::Vector(members),
    })
}

/// Basis of the prism pair space: N_m(triangle) slices times x3^j, j ≤ n,
/// embedded as (z1, z2, 0).
pub fn prism_pairs_basis(m: i32, n: i32) -> Result<BasisSet> {
    if m < 0 || n < 0 {
        return Err(Error::invalid(format!("prism pair space needs m, n >= 0, got ({m}, {n})")));
    }
    let planar = nedelec_basis(m, 2)?;
    let planar = planar.vectors().expect("vector basis");
    let mut members = Vec::with_capacity(planar.len() * (n as usize + 1));
    for phi in planar {
        for j in 0..=n as u32 {
            let lift = MultiIndex::new(vec![0, 0, j]);
            let comps = vec![
                phi.component(0).embed(3).shift(&lift),
                phi.component(1).embed(3).shift(&lift),
                Polynomial::zero(3),
            ];
            members.push(VectorPolynomial::new(comps).expect("3D components"));
        }
    }
    Ok(BasisSet {
        space: SpaceSpec::PrismPairs { m, n },
        members: BasisMembers::Vector(members),
    })
}

/// Vector monomial basis of the BDM shape-function space.
pub fn bdm_space_basis(spec: SpaceSpec) -> Result<BasisSet> {
    let members = match spec {
        SpaceSpec::BdmSimplex { k, d } => {
            check_dim(d)?;
            if k < 1 {
                return Err(Error::invalid(format!("BDM order must be >= 1, got {k}")));
            }
            vector_monomials(&total_degree_exponents(k, d), d)
        }
        SpaceSpec::BdmPrism { k } => {
            if k < 1 {
                return Err(Error::invalid(format!("BDM order must be >= 1, got {k}")));
            }
            vector_monomials(&prism_graded_exponents(k, k), 3)
        }
        other => return Err(Error::invalid(format!("{other:?} is not a BDM space"))),
    };
    Ok(BasisSet {
        space: spec,
        members: BasisMembers::Vector(members),
    })
}

/// Dispatch to the constructor matching `spec`.
pub fn basis(spec: SpaceSpec) -> Result<BasisSet> {
    match spec {
        SpaceSpec::TotalDegree { .. } | SpaceSpec::TensorDegree { .. } | SpaceSpec::PrismGraded { .. } => {
            monomial_basis(spec)
        }
        SpaceSpec::NedelecTriangle { m } => nedelec_basis(m, 2),
        SpaceSpec::NedelecTet { m } => nedelec_basis(m, 3),
        SpaceSpec::HomogeneousTangential { m, d } => homogeneous_tangential_basis(m, d),
        SpaceSpec::PrismPairs { m, n } => prism_pairs_basis(m, n),
        SpaceSpec::BdmSimplex { .. } | SpaceSpec::BdmPrism { .. } => bdm_space_basis(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force enumeration of exponent triples with i + j ≤ m, l ≤ n.
    fn brute_force_graded(m: i32, n: i32) -> usize {
        let mut count = 0;
        for i in 0..=4 {
            for j in 0..=4 {
                for l in 0..=4 {
                    if i + j <= m && l <= n {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn monomial_examples() {
        let b = monomial_basis(SpaceSpec::TotalDegree { k: 1, d: 2 }).unwrap();
        assert_eq!(b.dimension(), 3);
        let s = b.scalars().unwrap();
        assert!(s.contains(&Polynomial::constant(2, 1.0)));
        assert!(s.contains(&Polynomial::coordinate(2, 0)));
        assert!(s.contains(&Polynomial::coordinate(2, 1)));

        assert_eq!(monomial_basis(SpaceSpec::PrismGraded { m: 1, n: 1 }).unwrap().dimension(), 6);
        assert_eq!(brute_force_graded(1, 1), 6);
        assert_eq!(monomial_basis(SpaceSpec::TensorDegree { k: 2, dim: 2 }).unwrap().dimension(), 9);
    }

    #[test]
    fn graded_counts_match_enumeration() {
        for m in -1..=3 {
            for n in -1..=3 {
                let spec = SpaceSpec::PrismGraded { m, n };
                let b = monomial_basis(spec).unwrap();
                assert_eq!(b.dimension(), brute_force_graded(m, n), "({m},{n})");
                assert_eq!(b.dimension(), spec.dimension());
            }
        }
    }

    #[test]
    fn unsupported_family_rejected() {
        assert!(matches!(
            monomial_basis(SpaceSpec::NedelecTriangle { m: 1 }),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn nedelec_examples() {
        assert_eq!(nedelec_basis(0, 2).unwrap().dimension(), 0);
        let b = nedelec_basis(1, 2).unwrap();
        assert_eq!(b.dimension(), 3);
        // the S_1 member is a multiple of (x2, -x1)
        let s = &b.vectors().unwrap()[2];
        let c = s.component(0).coefficient(&MultiIndex::new(vec![0, 1]));
        assert!(c != 0.0);
        assert_eq!(s.component(1).coefficient(&MultiIndex::new(vec![1, 0])), -c);
        assert_eq!(nedelec_basis(1, 3).unwrap().dimension(), 6);
        assert!(nedelec_basis(-1, 2).is_err());
    }

    #[test]
    fn dimensions_match_closed_forms() {
        for m in 0..=4 {
            for d in [2, 3] {
                let b = nedelec_basis(m, d).unwrap();
                assert_eq!(b.dimension(), b.space.dimension(), "N_{m} d={d}");
                let s = homogeneous_tangential_basis(m, d).unwrap();
                assert_eq!(s.dimension(), s.space.dimension(), "S_{m} d={d}");
            }
        }
        for m in 0..=3 {
            for n in 0..=3 {
                let b = prism_pairs_basis(m, n).unwrap();
                assert_eq!(b.dimension(), b.space.dimension());
            }
        }
        for k in 1..=3 {
            for spec in [
                SpaceSpec::BdmSimplex { k, d: 2 },
                SpaceSpec::BdmSimplex { k, d: 3 },
                SpaceSpec::BdmPrism { k },
            ] {
                assert_eq!(bdm_space_basis(spec).unwrap().dimension(), spec.dimension());
            }
        }
    }

    #[test]
    fn prism_pair_examples() {
        assert_eq!(prism_pairs_basis(0, 1).unwrap().dimension(), 0);
        assert_eq!(prism_pairs_basis(1, 1).unwrap().dimension(), 6);
        assert_eq!(prism_pairs_basis(1, 2).unwrap().dimension(), 9);
    }

    #[test]
    fn bdm_examples() {
        assert_eq!(bdm_space_basis(SpaceSpec::BdmSimplex { k: 1, d: 2 }).unwrap().dimension(), 6);
        assert_eq!(bdm_space_basis(SpaceSpec::BdmPrism { k: 1 }).unwrap().dimension(), 18);
        assert_eq!(bdm_space_basis(SpaceSpec::BdmPrism { k: 2 }).unwrap().dimension(), 54);
        assert!(bdm_space_basis(SpaceSpec::BdmPrism { k: 0 }).is_err());
        assert!(bdm_space_basis(SpaceSpec::BdmSimplex { k: 0, d: 3 }).is_err());
    }

    #[test]
    fn tangential_members_are_homogeneous_and_orthogonal_to_position() {
        for d in [2, 3] {
            for m in 1..=3 {
                for q in homogeneous_tangential_basis(m, d).unwrap().vectors().unwrap() {
                    assert!(q.dot_position().is_zero());
                    for c in q.components() {
                        assert!(c.terms().all(|(a, _)| a.order() == m as u32));
                    }
                }
            }
        }
    }

    #[test]
    fn nedelec_degree_bound() {
        for d in [2, 3] {
            for m in 1..=3 {
                for q in nedelec_basis(m, d).unwrap().vectors().unwrap() {
                    assert!(q.degree().unwrap() <= m as u32);
                }
            }
        }
    }

    #[test]
    fn partial_of_graded_stays_in_lower_space() {
        let lower = monomial_basis(SpaceSpec::PrismGraded { m: 0, n: 1 }).unwrap();
        let lower = lower.scalars().unwrap();
        for p in monomial_basis(SpaceSpec::PrismGraded { m: 1, n: 1 }).unwrap().scalars().unwrap() {
            let dp = p.partial(1);
            // re-expand: every term must be one of the lower monomials
            for (a, _) in dp.terms() {
                assert!(lower.iter().any(|q| q.coefficient(a) != 0.0), "{a}");
            }
        }
    }

    #[test]
    fn divergence_of_bdm_prism_members_has_graded_degree() {
        for v in bdm_space_basis(SpaceSpec::BdmPrism { k: 2 }).unwrap().vectors().unwrap() {
            let div = v.divergence();
            for (a, _) in div.terms() {
                assert!(a.get(0) + a.get(1) <= 2 && a.get(2) <= 2);
            }
        }
    }
}
