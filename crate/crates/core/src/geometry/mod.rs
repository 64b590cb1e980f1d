//! Reference elements, affine maps, physical elements and anisotropic families.

mod affine;
mod checks;
mod element;
mod family;
mod piola;
mod reference;

pub use affine::{AffineMap, AffineMapSpec};
pub use checks::{check_max_angle, check_regular_vertex};
pub use element::{map_element, ElementGeometry, PhysicalFacet, PRISM_MAP_BOUND};
pub use family::{make_family, AnisotropyLaw, FamilySpec};
pub use piola::{piola_transform, Piola};
pub use reference::{reference_element, ElementKind, ReferenceElement, ReferenceFacet};
