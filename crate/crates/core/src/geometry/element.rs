use super::affine::{det_n, AffineMap};
use super::reference::{neighbours, ElementKind, ReferenceElement};
use crate::error::{Error, Result};
use crate::quadrature::Domain;

/// Bound on ‖J_P‖∞ and ‖J_P⁻¹‖∞ for the non-diagonal part of a prism map.
pub const PRISM_MAP_BOUND: f64 = 10.0;

/// A facet of a physical element.
#[derive(Clone, Debug)]
pub struct PhysicalFacet {
    pub label: &'static str,
    pub domain: Domain,
    pub origin: [f64; 3],
    pub axes: Vec<[f64; 3]>,
    /// Outward unit normal.
    pub normal: [f64; 3],
    /// Surface Jacobian of the facet parameterization.
    pub jacobian: f64,
    /// Reference-element coordinates of the facet origin and axes.
    pub reference_origin: [f64; 3],
    pub reference_axes: Vec<[f64; 3]>,
}

impl PhysicalFacet {
    pub fn point(&self, s: &[f64]) -> [f64; 3] {
        let mut x = self.origin;
        for (si, a) in s.iter().zip(&self.axes) {
            for c in 0..3 {
                x[c] += si * a[c];
            }
        }
        x
    }

    pub fn reference_point(&self, s: &[f64]) -> [f64; 3] {
        let mut x = self.reference_origin;
        for (si, a) in s.iter().zip(&self.reference_axes) {
            for c in 0..3 {
                x[c] += si * a[c];
            }
        }
        x
    }

    pub fn measure(&self) -> f64 {
        self.jacobian * self.domain.measure()
    }
}

/// A physical element: the image of a reference element under an affine map,
/// together with its size parameters h_i and unit edge directions l_i taken at a
/// distinguished vertex.
#[derive(Clone, Debug)]
pub struct ElementGeometry {
    pub kind: ElementKind,
    pub map: AffineMap,
    pub vertices: Vec<[f64; 3]>,
    pub distinguished_vertex: usize,
    pub h: Vec<f64>,
    pub directions: Vec<[f64; 3]>,
    pub diameter: f64,
    reference: ReferenceElement,
}

pub(crate) fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm(a: &[f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Edge lengths and unit edge vectors leaving vertex `v`.
pub(crate) fn edge_frame(kind: ElementKind, vertices: &[[f64; 3]], v: usize) -> (Vec<f64>, Vec<[f64; 3]>) {
    let mut h = Vec::new();
    let mut l = Vec::new();
    for n in neighbours(kind, v) {
        let e = sub(&vertices[n], &vertices[v]);
        let len = norm(&e);
        h.push(len);
        l.push(e.map(|c| c / len));
    }
    (h, l)
}

/// |det N| for the matrix whose columns are the given unit vectors.
pub(crate) fn frame_det(dim: usize, l: &[[f64; 3]]) -> f64 {
    let mut n = [[0.0; 3]; 3];
    for (j, col) in l.iter().enumerate() {
        for i in 0..dim {
            n[i][j] = col[i];
        }
    }
    det_n(&n, dim).abs()
}

/// Vertex maximizing |det N| over unit outgoing edge vectors, with that value.
pub(crate) fn best_regular_vertex(kind: ElementKind, vertices: &[[f64; 3]]) -> (usize, f64) {
    let dim = kind.dim();
    let mut best = (0, -1.0);
    for v in 0..vertices.len() {
        let (_, l) = edge_frame(kind, vertices, v);
        let d = frame_det(dim, &l);
        // ties go to the lowest vertex id
        if d > best.1 * (1.0 + 1e-12) {
            best = (v, d);
        }
    }
    best
}

fn diameter(vertices: &[[f64; 3]]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            d = d.max(norm(&sub(a, b)));
        }
    }
    d
}

/// Check that a prism map factors as J_P · diag(h) with ‖J_P‖∞, ‖J_P⁻¹‖∞ bounded.
fn check_prism_map(map: &AffineMap) -> Result<()> {
    let h = map.column_norms();
    let mut rows = map.matrix_rows();
    for row in rows.iter_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v /= h[j];
        }
    }
    let jp = AffineMap::new(3, &rows, &[0.0; 3])?;
    let (a, b) = (jp.norm_inf(), jp.inverse_norm_inf());
    if a > PRISM_MAP_BOUND || b > PRISM_MAP_BOUND {
        return Err(Error::invalid(format!(
            "prism map outside the admissible class: ||J_P||inf = {a:.3e}, ||J_P^-1||inf = {b:.3e} (bound {PRISM_MAP_BOUND})"
        )));
    }
    Ok(())
}

/// Map a reference element to a physical element.
pub fn map_element(reference: &ReferenceElement, map: &AffineMap) -> Result<ElementGeometry> {
    let kind = reference.kind;
    if map.dim() != kind.dim() {
        return Err(Error::invalid(format!(
            "map of dimension {} for a {kind} element",
            map.dim()
        )));
    }
    if kind == ElementKind::Prism {
        check_prism_map(map)?;
    }
    let vertices: Vec<[f64; 3]> = reference.vertices.iter().map(|v| map.apply(v)).collect();
    let distinguished_vertex = match kind {
        // image of p3 = (0,0,0)
        ElementKind::Prism => 2,
        _ => best_regular_vertex(kind, &vertices).0,
    };
    let (mut h, directions) = edge_frame(kind, &vertices, distinguished_vertex);
    if map.is_diagonal() && distinguished_vertex == 0 || kind == ElementKind::Prism && map.is_diagonal() {
        // exact diagonal entries for the reference family
        h = (0..kind.dim()).map(|i| map.entry(i, i).abs()).collect();
    }
    Ok(ElementGeometry {
        kind,
        map: map.clone(),
        diameter: diameter(&vertices),
        vertices,
        distinguished_vertex,
        h,
        directions,
        reference: reference.clone(),
    })
}

impl ElementGeometry {
    pub fn reference(kind: ElementKind) -> ElementGeometry {
        let r = super::reference::reference_element(kind);
        map_element(&r, &AffineMap::identity(kind.dim())).expect("identity map")
    }

    /// Image of the reference element under diag(h).
    pub fn scaled(kind: ElementKind, h: &[f64]) -> Result<ElementGeometry> {
        let r = super::reference::reference_element(kind);
        map_element(&r, &AffineMap::diagonal(h)?)
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn reference_element(&self) -> &ReferenceElement {
        &self.reference
    }

    pub fn measure(&self) -> f64 {
        self.map.det().abs() * self.kind.domain().measure()
    }

    pub fn h_max(&self) -> f64 {
        self.h.iter().copied().fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.h_max() / self.h_min()
    }

    /// h_T = diam T for simplices; max_i h_i for prisms.
    pub fn size_parameter(&self) -> f64 {
        match self.kind {
            ElementKind::Prism => self.h_max(),
            _ => self.diameter,
        }
    }

    /// Matrix N with the unit edge directions as columns (row-major).
    pub fn edge_matrix(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d).map(|i| self.directions.iter().map(|l| l[i]).collect()).collect()
    }

    pub fn to_physical(&self, xhat: &[f64]) -> [f64; 3] {
        self.map.apply(xhat)
    }

    pub fn to_reference(&self, x: &[f64]) -> [f64; 3] {
        self.map.apply_inverse(x)
    }

    pub fn centroid(&self) -> [f64; 3] {
        super::reference::centroid(&self.vertices)
    }

    /// Physical facets in reference order.
    pub fn facets(&self) -> Vec<PhysicalFacet> {
        let d = self.dim();
        self.reference
            .facets
            .iter()
            .map(|f| {
                let axes: Vec<[f64; 3]> = f.axes.iter().map(|a| self.map.apply_linear(a)).collect();
                let n = self.map.apply_inverse_transpose(&f.normal);
                let nn = norm(&n);
                // sqrt(det(AᵀA)) for the d×(d−1) matrix of facet axes
                let jacobian = match axes.len() {
                    1 => norm(&axes[0]),
                    _ => {
                        let (a, b) = (&axes[0], &axes[1]);
                        norm(&[a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
                    }
                };
                let mut normal = n.map(|c| c / nn);
                for c in normal.iter_mut().skip(d) {
                    *c = 0.0;
                }
                PhysicalFacet {
                    label: f.label,
                    domain: f.domain,
                    origin: self.map.apply(&f.origin),
                    axes,
                    normal,
                    jacobian,
                    reference_origin: f.origin,
                    reference_axes: f.axes.clone(),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::reference_element;

    #[test]
    fn identity_prism() {
        let el = ElementGeometry::reference(ElementKind::Prism);
        assert_eq!(el.h, vec![1.0, 1.0, 1.0]);
        assert_eq!(el.directions, vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(el.edge_matrix(), vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    }

    #[test]
    fn diagonal_map_gives_exact_h() {
        for h in [[0.3, 1e-3, 7.0], [1.0 / 3.0, 0.1, 0.7]] {
            let el = ElementGeometry::scaled(ElementKind::Prism, &h).unwrap();
            assert_eq!(el.h, h.to_vec());
            let el = ElementGeometry::scaled(ElementKind::Tet, &h).unwrap();
            assert_eq!(el.h, h.to_vec());
        }
    }

    #[test]
    fn tet_diameter_matches_pairwise_distances() {
        let eps = 1e-3;
        let el = ElementGeometry::scaled(ElementKind::Tet, &[1.0, 1.0, eps]).unwrap();
        let mut d: f64 = 0.0;
        for a in &el.vertices {
            for b in &el.vertices {
                let e = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                d = d.max((e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt());
            }
        }
        assert_eq!(el.diameter, d);
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn singular_map_rejected() {
        assert!(ElementGeometry::scaled(ElementKind::Triangle, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn prism_class_restriction() {
        let r = reference_element(ElementKind::Prism);
        // nearly dependent columns: ||J_P^-1|| large
        let bad = AffineMap::new(
            3,
            &[vec![1.0, 0.999, 0.0], vec![0.0, 0.0447, 0.0], vec![0.0, 0.0, 1.0]],
            &[0.0; 3],
        )
        .unwrap();
        assert!(matches!(map_element(&r, &bad), Err(Error::InvalidArgument(_))));
        let shear = AffineMap::new(
            3,
            &[vec![1.0, 0.5, 0.0], vec![0.0, 1.0, 0.2], vec![0.0, 0.0, 1.0]],
            &[0.0; 3],
        )
        .unwrap();
        assert!(map_element(&r, &shear).is_ok());
    }

    #[test]
    fn facet_measures_scale() {
        let el = ElementGeometry::scaled(ElementKind::Prism, &[2.0, 3.0, 0.5]).unwrap();
        let f = el.facets();
        assert!((f[0].measure() - 1.5).abs() < 1e-14); // x1 = 0: h2·h3
        assert!((f[3].measure() - 3.0).abs() < 1e-14); // bottom: h1·h2/2
        assert!((f[2].measure() - 0.5 * (4.0f64 + 9.0).sqrt()).abs() < 1e-14);
        let n = f[2].normal;
        // normal of x1/2 + x2/3 = 1
        let e: [f64; 2] = [1.0 / 2.0, 1.0 / 3.0];
        let l = (e[0] * e[0] + e[1] * e[1]).sqrt();
        assert!((n[0] - e[0] / l).abs() < 1e-15 && (n[1] - e[1] / l).abs() < 1e-15);
    }
}
