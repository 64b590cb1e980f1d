use std::f64::consts::PI;

use super::element::{best_regular_vertex, norm, sub, ElementGeometry};
use super::reference::{faces, ElementKind};
use crate::error::{Error, Result};

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Angle between two vectors, via a clamped arccos.
fn angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
}

/// Vertex maximizing |det N| (N = unit outgoing edge vectors) and that value.
pub fn check_regular_vertex(el: &ElementGeometry) -> (usize, f64) {
    best_regular_vertex(el.kind, &el.vertices)
}

/// Maximum of all angles within faces and between adjacent faces.
///
/// Triangles: the three vertex angles. Tetrahedra and prisms: every corner
/// angle of every face plus every dihedral angle along an edge.
pub fn check_max_angle(el: &ElementGeometry) -> Result<f64> {
    let scale = el.diameter.powi(el.dim() as i32);
    if !(el.measure() > 1e-14 * scale) {
        return Err(Error::DegenerateElement(format!(
            "{} with measure {:e} and diameter {:e}",
            el.kind,
            el.measure(),
            el.diameter
        )));
    }
    let v = &el.vertices;
    let loops: Vec<Vec<usize>> = match el.kind {
        ElementKind::Triangle => vec![vec![0, 1, 2]],
        kind => faces(kind),
    };
    let mut max_angle: f64 = 0.0;
    for lp in &loops {
        let n = lp.len();
        for i in 0..n {
            let prev = v[lp[(i + n - 1) % n]];
            let cur = v[lp[i]];
            let next = v[lp[(i + 1) % n]];
            max_angle = max_angle.max(angle(&sub(&prev, &cur), &sub(&next, &cur)));
        }
    }
    if el.dim() == 3 {
        let c = el.centroid();
        let normals: Vec<[f64; 3]> = loops
            .iter()
            .map(|lp| {
                // Newell normal, flipped outward
                let mut nrm = [0.0; 3];
                for i in 0..lp.len() {
                    nrm = add(&nrm, &cross(&v[lp[i]], &v[lp[(i + 1) % lp.len()]]));
                }
                let fc = super::reference::centroid(&lp.iter().map(|&i| v[i]).collect::<Vec<_>>());
                if dot(&nrm, &sub(&fc, &c)) < 0.0 {
                    nrm = nrm.map(|x| -x);
                }
                nrm
            })
            .collect();
        for (i, a) in loops.iter().enumerate() {
            for (j, b) in loops.iter().enumerate().skip(i + 1) {
                let shared = a.iter().filter(|x| b.contains(x)).count();
                if shared == 2 {
                    max_angle = max_angle.max(PI - angle(&normals[i], &normals[j]));
                }
            }
        }
    }
    Ok(max_angle)
}

fn add(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{map_element, reference_element, AffineMap};

    fn triangle(p: [[f64; 2]; 3]) -> ElementGeometry {
        let rows = vec![
            vec![p[1][0] - p[0][0], p[2][0] - p[0][0]],
            vec![p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        let map = AffineMap::new(2, &rows, &p[0]).unwrap();
        map_element(&reference_element(ElementKind::Triangle), &map).unwrap()
    }

    #[test]
    fn triangle_angles() {
        let right = triangle([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!((check_max_angle(&right).unwrap() - PI / 2.0).abs() < 1e-15);
        let eq = triangle([[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]);
        assert!((check_max_angle(&eq).unwrap() - PI / 3.0).abs() < 1e-14);
        let thin = triangle([[0.0, 0.0], [1.0, 0.0], [0.0, 1e-3]]);
        assert!((check_max_angle(&thin).unwrap() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn regular_vertex_reference() {
        let tri = ElementGeometry::reference(ElementKind::Triangle);
        assert_eq!(check_regular_vertex(&tri), (0, 1.0));
        let tet = ElementGeometry::reference(ElementKind::Tet);
        assert_eq!(check_regular_vertex(&tet), (0, 1.0));
    }

    #[test]
    fn regular_vertex_brute_force() {
        // tet {0, e1, e2, (1,1,eps)}: determinants computed by hand at every vertex
        let eps = 0.05;
        let map = AffineMap::new(3, &[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![0.0, 0.0, eps]], &[0.0; 3]).unwrap();
        let el = map_element(&reference_element(ElementKind::Tet), &map).unwrap();
        let unit = |a: [f64; 3]| {
            let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
            a.map(|x| x / n)
        };
        let det = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| {
            (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])).abs()
        };
        let v = &el.vertices;
        let mut best = (0, 0.0);
        for i in 0..4 {
            let others: Vec<_> = (0..4).filter(|&j| j != i).map(|j| unit(sub(&v[j], &v[i]))).collect();
            let d = det(others[0], others[1], others[2]);
            if d > best.1 {
                best = (i, d);
            }
        }
        let (id, val) = check_regular_vertex(&el);
        assert_eq!(id, best.0);
        assert!((val - best.1).abs() < 1e-14);
    }

    #[test]
    fn degenerate_detected() {
        assert!(check_max_angle(&ElementGeometry::reference(ElementKind::Prism)).is_ok());
        let squashed = ElementGeometry::scaled(ElementKind::Tet, &[1.0, 1.0, 1e-15]).unwrap();
        assert!(matches!(check_max_angle(&squashed), Err(Error::DegenerateElement(_))));
    }

    #[test]
    fn reference_prism_angles_are_right() {
        let p = ElementGeometry::reference(ElementKind::Prism);
        assert!((check_max_angle(&p).unwrap() - PI / 2.0).abs() < 1e-14);
        let t = ElementGeometry::reference(ElementKind::Tet);
        assert!((check_max_angle(&t).unwrap() - PI / 2.0).abs() < 1e-14);
    }
}
