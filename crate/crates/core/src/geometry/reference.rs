use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Domain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    #[serde(alias = "tri")]
    Triangle,
    Tet,
    Prism,
}

impl ElementKind {
    pub fn dim(self) -> usize {
        match self {
            ElementKind::Triangle => 2,
            ElementKind::Tet | ElementKind::Prism => 3,
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            ElementKind::Triangle => Domain::Triangle,
            ElementKind::Tet => Domain::Tet,
            ElementKind::Prism => Domain::Prism,
        }
    }

    pub fn is_simplex(self) -> bool {
        !matches!(self, ElementKind::Prism)
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Triangle => "tri",
            ElementKind::Tet => "tet",
            ElementKind::Prism => "prism",
        }
    }

    pub fn all() -> [ElementKind; 3] {
        [ElementKind::Triangle, ElementKind::Tet, ElementKind::Prism]
    }
}

impl std::str::FromStr for ElementKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tri" | "triangle" => Ok(ElementKind::Triangle),
            "tet" | "tetrahedron" => Ok(ElementKind::Tet),
            "prism" => Ok(ElementKind::Prism),
            other => Err(Error::invalid(format!("unknown element kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for ElementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A facet of a reference element with an affine parameterization
/// `s ↦ origin + Σ s_i axes[i]` from its own reference domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceFacet {
    pub label: &'static str,
    pub vertices: Vec<usize>,
    pub domain: Domain,
    pub origin: [f64; 3],
    pub axes: Vec<[f64; 3]>,
    pub normal: [f64; 3],
    pub measure: f64,
}

impl ReferenceFacet {
    pub fn point(&self, s: &[f64]) -> [f64; 3] {
        let mut x = self.origin;
        for (si, a) in s.iter().zip(&self.axes) {
            for c in 0..3 {
                x[c] += si * a[c];
            }
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceElement {
    pub kind: ElementKind,
    pub vertices: Vec<[f64; 3]>,
    pub facets: Vec<ReferenceFacet>,
}

const S2: f64 = std::f64::consts::SQRT_2;

impl ReferenceElement {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn measure(&self) -> f64 {
        self.kind.domain().measure()
    }

    pub fn centroid(&self) -> [f64; 3] {
        centroid(&self.vertices)
    }
}

pub(crate) fn centroid(vertices: &[[f64; 3]]) -> [f64; 3] {
    let mut c = [0.0; 3];
    for v in vertices {
        for i in 0..3 {
            c[i] += v[i];
        }
    }
    c.map(|x| x / vertices.len() as f64)
}

/// The reference triangle, tetrahedron or prism.
///
/// Facets are numbered by the vertex they are opposite to for simplices. The
/// prism has vertices p1 = (1,0,0), p2 = (0,1,0), p3 = (0,0,0) followed by
/// their lifts p^i = p_i + (0,0,1), and facets e1, e2, e3 (vertical, e_i opposite
/// p_i and p^i), e_b (x3 = 0) and e_t (x3 = 1).
pub fn reference_element(kind: ElementKind) -> ReferenceElement {
    let z = [0.0; 3];
    let e1 = [1.0, 0.0, 0.0];
    let e2 = [0.0, 1.0, 0.0];
    let e3 = [0.0, 0.0, 1.0];
    match kind {
        ElementKind::Triangle => ReferenceElement {
            kind,
            vertices: vec![z, e1, e2],
            facets: vec![
                ReferenceFacet {
                    label: "f0",
                    vertices: vec![1, 2],
                    domain: Domain::Interval,
                    origin: e1,
                    axes: vec![[-1.0, 1.0, 0.0]],
                    normal: [1.0 / S2, 1.0 / S2, 0.0],
                    measure: S2,
                },
                ReferenceFacet {
                    label: "f1",
                    vertices: vec![0, 2],
                    domain: Domain::Interval,
                    origin: z,
                    axes: vec![e2],
                    normal: [-1.0, 0.0, 0.0],
                    measure: 1.0,
                },
                ReferenceFacet {
                    label: "f2",
                    vertices: vec![0, 1],
                    domain: Domain::Interval,
                    origin: z,
                    axes: vec![e1],
                    normal: [0.0, -1.0, 0.0],
                    measure: 1.0,
                },
            ],
        },
        ElementKind::Tet => {
            let s3 = 3f64.sqrt();
            ReferenceElement {
                kind,
                vertices: vec![z, e1, e2, e3],
                facets: vec![
                    ReferenceFacet {
                        label: "f0",
                        vertices: vec![1, 2, 3],
                        domain: Domain::Triangle,
                        origin: e1,
                        axes: vec![[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]],
                        normal: [1.0 / s3, 1.0 / s3, 1.0 / s3],
                        measure: s3 / 2.0,
                    },
                    ReferenceFacet {
                        label: "f1",
                        vertices: vec![0, 2, 3],
                        domain: Domain::Triangle,
                        origin: z,
                        axes: vec![e2, e3],
                        normal: [-1.0, 0.0, 0.0],
                        measure: 0.5,
                    },
                    ReferenceFacet {
                        label: "f2",
                        vertices: vec![0, 1, 3],
                        domain: Domain::Triangle,
                        origin: z,
                        axes: vec![e1, e3],
                        normal: [0.0, -1.0, 0.0],
                        measure: 0.5,
                    },
                    ReferenceFacet {
                        label: "f3",
                        vertices: vec![0, 1, 2],
                        domain: Domain::Triangle,
                        origin: z,
                        axes: vec![e1, e2],
                        normal: [0.0, 0.0, -1.0],
                        measure: 0.5,
                    },
                ],
            }
        }
        ElementKind::Prism => ReferenceElement {
            kind,
            vertices: vec![e1, e2, z, [1.0, 0.0, 1.0], [0.0, 1.0, 1.0], e3],
            facets: vec![
                ReferenceFacet {
                    label: "e1",
                    vertices: vec![1, 2, 5, 4],
                    domain: Domain::Square,
                    origin: z,
                    axes: vec![e2, e3],
                    normal: [-1.0, 0.0, 0.0],
                    measure: 1.0,
                },
                ReferenceFacet {
                    label: "e2",
                    vertices: vec![2, 0, 3, 5],
                    domain: Domain::Square,
                    origin: z,
                    axes: vec![e1, e3],
                    normal: [0.0, -1.0, 0.0],
                    measure: 1.0,
                },
                ReferenceFacet {
                    label: "e3",
                    vertices: vec![0, 1, 4, 3],
                    domain: Domain::Square,
                    origin: e1,
                    axes: vec![[-1.0, 1.0, 0.0], e3],
                    normal: [1.0 / S2, 1.0 / S2, 0.0],
                    measure: S2,
                },
                ReferenceFacet {
                    label: "eb",
                    vertices: vec![0, 1, 2],
                    domain: Domain::Triangle,
                    origin: z,
                    axes: vec![e1, e2],
                    normal: [0.0, 0.0, -1.0],
                    measure: 0.5,
                },
                ReferenceFacet {
                    label: "et",
                    vertices: vec![3, 4, 5],
                    domain: Domain::Triangle,
                    origin: e3,
                    axes: vec![e1, e2],
                    normal: [0.0, 0.0, 1.0],
                    measure: 0.5,
                },
            ],
        },
    }
}

/// Edges as vertex pairs.
pub(crate) fn edges(kind: ElementKind) -> Vec<(usize, usize)> {
    match kind {
        ElementKind::Triangle => vec![(0, 1), (0, 2), (1, 2)],
        ElementKind::Tet => vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        ElementKind::Prism => vec![
            (0, 1),
            (0, 2),
            (1, 2),
            (3, 4),
            (3, 5),
            (4, 5),
            (0, 3),
            (1, 4),
            (2, 5),
        ],
    }
}

/// Neighbours of `v` along edges, in-plane neighbours first for prisms.
pub(crate) fn neighbours(kind: ElementKind, v: usize) -> Vec<usize> {
    let mut n: Vec<usize> = edges(kind)
        .into_iter()
        .filter_map(|(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
        .collect();
    n.sort_unstable();
    n
}

/// Faces as vertex loops (3D kinds only).
pub(crate) fn faces(kind: ElementKind) -> Vec<Vec<usize>> {
    reference_element(kind)
        .facets
        .into_iter()
        .map(|f| f.vertices)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, make_rule};

    fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[test]
    fn prism_normals_match() {
        let p = reference_element(ElementKind::Prism);
        let expected = [
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [1.0 / S2, 1.0 / S2, 0.0],
            [0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0],
        ];
        for (f, n) in p.facets.iter().zip(expected) {
            assert_eq!(f.normal, n, "{}", f.label);
        }
        let eb = &p.facets[3];
        assert_eq!(eb.label, "eb");
        for s in [[0.0, 0.0], [1.0, 0.0], [0.3, 0.3]] {
            assert_eq!(eb.point(&s)[2], 0.0);
        }
        assert_eq!(p.measure(), 0.5);
    }

    #[test]
    fn prism_e3_parameterization() {
        let p = reference_element(ElementKind::Prism);
        let e3 = &p.facets[2];
        let rule = make_rule(Domain::Square, 2).unwrap();
        for (s, _) in rule.iter() {
            let x = e3.point(s);
            assert!((x[0] + x[1] - 1.0).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&x[2]));
        }
        // measure = |axis0 x axis1| times the unit square's area
        let a = e3.axes[0];
        let b = e3.axes[1];
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let area = dot(&cross, &cross).sqrt() * integrate(&rule, |_| 1.0).unwrap();
        assert!((area - e3.measure).abs() < 1e-15);
        assert!((e3.measure - S2).abs() < 1e-15);
    }

    #[test]
    fn normals_unit_and_outward() {
        for kind in ElementKind::all() {
            let r = reference_element(kind);
            let c = r.centroid();
            for f in &r.facets {
                assert!((dot(&f.normal, &f.normal) - 1.0).abs() < 1e-15);
                let fc = centroid(&f.vertices.iter().map(|&i| r.vertices[i]).collect::<Vec<_>>());
                let d = [fc[0] - c[0], fc[1] - c[1], fc[2] - c[2]];
                assert!(dot(&f.normal, &d) > 0.0, "{kind:?} {}", f.label);
                // the parameterization lands on the facet's plane
                let v0 = r.vertices[f.vertices[0]];
                for s in [[0.2, 0.1], [0.5, 0.5]] {
                    let x = f.point(&s[..f.domain.dim()]);
                    let off = [x[0] - v0[0], x[1] - v0[1], x[2] - v0[2]];
                    assert!(dot(&f.normal, &off).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn prism_neighbours_of_p3() {
        assert_eq!(neighbours(ElementKind::Prism, 2), vec![0, 1, 5]);
    }
}
