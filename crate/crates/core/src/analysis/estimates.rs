//! Anisotropic seminorms and the right-hand sides of the error and stability estimates.

use serde::{Deserialize, Serialize};

use super::norms::{lp_norm_with, NormSpec};
use crate::error::{Error, Result};
use crate::fields::{directional_partial, field_divergence, AnalyticField};
use crate::geometry::{check_max_angle, check_regular_vertex, ElementGeometry, ElementKind};
use crate::interpolation::BdmInterpolator;
use crate::polyspace::MultiIndex;

/// h^α = Π_j h_j^α_j.
pub fn h_power(h: &[f64], alpha: &MultiIndex) -> f64 {
    h.iter().zip(alpha.exponents()).map(|(hj, &a)| hj.powi(a as i32)).product()
}

/// One weighted contribution to an estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhsTerm {
    pub group: String,
    pub alpha: Vec<u32>,
    /// Geometric weight, e.g. h^α or h_T h^α.
    pub weight: f64,
    pub norm: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhsReport {
    pub total: f64,
    pub terms: Vec<RhsTerm>,
}

impl RhsReport {
    fn push(&mut self, group: &str, alpha: &MultiIndex, weight: f64, norm: f64) {
        let value = weight * norm;
        self.total += value;
        self.terms.push(RhsTerm {
            group: group.to_string(),
            alpha: alpha.exponents().to_vec(),
            weight,
            norm,
            value,
        });
    }

    fn extend(&mut self, group: &str, factor: f64, other: RhsReport) {
        for t in other.terms {
            let weight = factor * t.weight;
            let value = weight * t.norm;
            self.total += value;
            self.terms.push(RhsTerm {
                group: group.to_string(),
                weight,
                value,
                ..t
            });
        }
    }

    /// Sum of the terms in one group.
    pub fn group_total(&self, group: &str) -> f64 {
        self.terms.iter().filter(|t| t.group == group).map(|t| t.value).sum()
    }
}

/// ‖D_l^α f‖_{0,p} over all components of f.
fn directional_norm(f: &AnalyticField, components: &[usize], alpha: &MultiIndex, el: &ElementGeometry, spec: &NormSpec) -> Result<f64> {
    let parts = components
        .iter()
        .map(|&c| directional_partial(f, c, alpha, &el.directions))
        .collect::<Result<Vec<_>>>()?;
    if parts.iter().all(|p| p.expansion().is_empty()) {
        return Ok(0.0);
    }
    lp_norm_with(el, spec, parts.len(), |_, x, out| {
        for (o, p) in out.iter_mut().zip(&parts) {
            *o = p.value(x);
        }
    })
}

fn all_components(f: &AnalyticField) -> Vec<usize> {
    (0..f.num_components()).collect()
}

/// Σ_{|α|=order} h^α ‖D_l^α f‖_{0,p} with its per-α breakdown.
pub fn aniso_seminorm(f: &AnalyticField, el: &ElementGeometry, order: u32, spec: &NormSpec) -> Result<RhsReport> {
    check_dims(f, el)?;
    let mut report = RhsReport { total: 0.0, terms: Vec::new() };
    for alpha in MultiIndex::of_order(el.dim(), order) {
        let norm = directional_norm(f, &all_components(f), &alpha, el, spec)?;
        report.push("seminorm", &alpha, h_power(&el.h, &alpha), norm);
    }
    Ok(report)
}

fn check_dims(f: &AnalyticField, el: &ElementGeometry) -> Result<()> {
    if f.dim() != el.dim() {
        return Err(Error::invalid(format!(
            "field in {} dimensions on a {} element",
            f.dim(),
            el.kind
        )));
    }
    Ok(())
}

/// Which estimate an error is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Regular-vertex estimate on simplices.
    RegularVertex,
    /// Maximum-angle estimate on simplices.
    MaximumAngle,
    /// Prism estimate.
    Prism,
}

impl Theorem {
    /// The directional estimate matching the element kind.
    pub fn for_kind(kind: ElementKind) -> Theorem {
        if kind.is_simplex() {
            Theorem::RegularVertex
        } else {
            Theorem::Prism
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Theorem::RegularVertex => "rhs_thm1",
            Theorem::MaximumAngle => "rhs_thm2",
            Theorem::Prism => "rhs_thm5",
        }
    }
}

fn require_simplex(el: &ElementGeometry) -> Result<()> {
    if el.kind.is_simplex() {
        Ok(())
    } else {
        Err(Error::invalid("this estimate is stated for simplices"))
    }
}

fn require_prism(el: &ElementGeometry) -> Result<()> {
    if el.kind == ElementKind::Prism {
        Ok(())
    } else {
        Err(Error::invalid("this estimate is stated for prisms"))
    }
}

/// Σ_{|α|=m+1} h^α ‖D_l^α v‖ + h_T Σ_{|α|=m} h^α ‖D_l^α div v‖.
pub fn rhs_theorem1(f: &AnalyticField, el: &ElementGeometry, m: u32, spec: &NormSpec) -> Result<RhsReport> {
    require_simplex(el)?;
    directional_rhs(f, el, m, spec, el.diameter)
}

fn directional_rhs(f: &AnalyticField, el: &ElementGeometry, m: u32, spec: &NormSpec, size: f64) -> Result<RhsReport> {
    let mut report = aniso_seminorm(f, el, m + 1, spec)?;
    let div = field_divergence(f)?;
    report.extend("divergence", size, aniso_seminorm(&div, el, m, spec)?);
    Ok(report)
}

/// h_T^{m+1} ‖Σ_i Σ_{|α|=m+1} |∂^α v_i|‖.
pub fn rhs_theorem2(f: &AnalyticField, el: &ElementGeometry, m: u32, spec: &NormSpec) -> Result<RhsReport> {
    require_simplex(el)?;
    check_dims(f, el)?;
    let alphas = MultiIndex::of_order(el.dim(), m + 1);
    if m + 1 > f.max_order() {
        return Err(Error::invalid(format!("order {} exceeds the field's max order", m + 1)));
    }
    let norm = lp_norm_with(el, spec, 1, |_, x, out| {
        out[0] = (0..f.num_components())
            .flat_map(|i| alphas.iter().map(move |a| (i, a)))
            .map(|(i, a)| f.component(i).partial_value(a.exponents(), x).abs())
            .sum();
    })?;
    let mut report = RhsReport { total: 0.0, terms: Vec::new() };
    report.push("full_derivative", &MultiIndex::zero(el.dim()), el.diameter.powi(m as i32 + 1), norm);
    Ok(report)
}

/// The simplex directional form with h_P in place of h_T, plus (h1+h2) Σ_{|α|=m} h^α ‖∂^{m+1} v_3 / ∂l^{α + e_3}‖.
pub fn rhs_theorem5(f: &AnalyticField, el: &ElementGeometry, m: u32, spec: &NormSpec) -> Result<RhsReport> {
    require_prism(el)?;
    let mut report = directional_rhs(f, el, m, spec, el.size_parameter())?;
    let h12 = el.h[0] + el.h[1];
    for alpha in MultiIndex::of_order(3, m) {
        let lifted = alpha.add(&MultiIndex::unit(3, 2));
        let norm = directional_norm(f, &[2], &lifted, el, spec)?;
        report.push("vertical", &alpha, h12 * h_power(&el.h, &alpha), norm);
    }
    Ok(report)
}

/// ‖v‖ + Σ_j h_j ‖∂v/∂l_j‖ + h_P ‖div v‖ + (h1+h2) ‖∂v_3/∂l_3‖.
pub fn rhs_theorem4(f: &AnalyticField, el: &ElementGeometry, spec: &NormSpec) -> Result<RhsReport> {
    require_prism(el)?;
    check_dims(f, el)?;
    let mut report = RhsReport { total: 0.0, terms: Vec::new() };
    let zero = MultiIndex::zero(3);
    report.push("value", &zero, 1.0, directional_norm(f, &all_components(f), &zero, el, spec)?);
    report.extend("gradient", 1.0, aniso_seminorm(f, el, 1, spec)?);
    let div = field_divergence(f)?;
    report.push("divergence", &zero, el.size_parameter(), directional_norm(&div, &[0], &zero, el, spec)?);
    let e3 = MultiIndex::unit(3, 2);
    report.push("vertical", &e3, el.h[0] + el.h[1], directional_norm(f, &[2], &e3, el, spec)?);
    Ok(report)
}

/// Right-hand side for the given theorem.
pub fn theorem_rhs(theorem: Theorem, f: &AnalyticField, el: &ElementGeometry, m: u32, spec: &NormSpec) -> Result<RhsReport> {
    match theorem {
        Theorem::RegularVertex => rhs_theorem1(f, el, m, spec),
        Theorem::MaximumAngle => rhs_theorem2(f, el, m, spec),
        Theorem::Prism => rhs_theorem5(f, el, m, spec),
    }
}

/// ‖v − Iv‖_{0,p} with a prepared interpolator.
pub fn interpolation_error_with(interp: &BdmInterpolator, f: &AnalyticField, spec: &NormSpec) -> Result<f64> {
    use crate::field::VectorField;
    let iv = interp.interpolate(f)?;
    let d = interp.element().dim();
    lp_norm_with(interp.element(), spec, d, |xhat, x, out| {
        let mut a = [0.0; 3];
        iv.eval_reference(xhat, &mut a[..d]);
        f.eval(x, out);
        for (o, ai) in out.iter_mut().zip(&a) {
            *o -= ai;
        }
    })
}

pub fn interpolation_error(f: &AnalyticField, el: &ElementGeometry, k: u32, spec: &NormSpec) -> Result<f64> {
    interpolation_error_with(&BdmInterpolator::new(el, k)?, f, spec)
}

/// ‖Iv‖_{0,p} / (prism stability bound); 0 for Iv = 0, +∞ when only the RHS vanishes.
pub fn stability_ratio_with(interp: &BdmInterpolator, f: &AnalyticField, spec: &NormSpec) -> Result<(f64, RhsReport)> {
    let el = interp.element();
    let iv = interp.interpolate(f)?;
    let d = el.dim();
    let num = lp_norm_with(el, spec, d, |xhat, _, out| iv.eval_reference(xhat, out))?;
    let rhs = rhs_theorem4(f, el, spec)?;
    let ratio = if num == 0.0 {
        0.0
    } else if rhs.total == 0.0 {
        f64::INFINITY
    } else {
        num / rhs.total
    };
    Ok((ratio, rhs))
}

pub fn stability_ratio(f: &AnalyticField, el: &ElementGeometry, k: u32, spec: &NormSpec) -> Result<f64> {
    Ok(stability_ratio_with(&BdmInterpolator::new(el, k)?, f, spec)?.0)
}

/// Geometry summary carried with every estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementSummary {
    pub kind: ElementKind,
    pub h: Vec<f64>,
    pub diameter: f64,
    pub size_parameter: f64,
    pub aspect_ratio: f64,
    pub measure: f64,
    pub max_angle: f64,
    pub regular_vertex: usize,
    pub regular_vertex_det: f64,
}

impl ElementSummary {
    pub fn new(el: &ElementGeometry) -> Result<Self> {
        let (regular_vertex, regular_vertex_det) = check_regular_vertex(el);
        Ok(ElementSummary {
            kind: el.kind,
            h: el.h.clone(),
            diameter: el.diameter,
            size_parameter: el.size_parameter(),
            aspect_ratio: el.aspect_ratio(),
            measure: el.measure(),
            max_angle: check_max_angle(el)?,
            regular_vertex,
            regular_vertex_det,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub element: ElementSummary,
    pub theorem: Theorem,
    pub error: f64,
    pub rhs: f64,
    /// error / rhs when rhs > 0.
    pub ratio: Option<f64>,
    pub terms: Vec<RhsTerm>,
}

/// Error of I_k v against the chosen theorem's RHS with smoothness index m.
pub fn estimate_report(
    interp: &BdmInterpolator,
    f: &AnalyticField,
    theorem: Theorem,
    m: u32,
    spec: &NormSpec,
) -> Result<EstimateReport> {
    let el = interp.element();
    let error = interpolation_error_with(interp, f, spec)?;
    let rhs = theorem_rhs(theorem, f, el, m, spec)?;
    Ok(EstimateReport {
        element: ElementSummary::new(el)?,
        theorem,
        error,
        rhs: rhs.total,
        ratio: (rhs.total > 0.0).then(|| error / rhs.total),
        terms: rhs.terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::PNorm;
    use crate::fields::{catalog, FieldSpec};
    use std::f64::consts::PI;

    fn l2() -> NormSpec {
        NormSpec::new(PNorm::Finite(2.0))
    }

    #[test]
    fn constant_field_has_zero_rhs() {
        let f = catalog(&FieldSpec::Const { values: vec![1.0, -2.0, 0.5] }, 3).unwrap();
        let tet = ElementGeometry::scaled(ElementKind::Tet, &[0.3, 0.2, 0.1]).unwrap();
        let prism = ElementGeometry::scaled(ElementKind::Prism, &[0.3, 0.2, 0.1]).unwrap();
        for m in 0..=2 {
            assert_eq!(rhs_theorem1(&f, &tet, m, &l2()).unwrap().total, 0.0);
            assert_eq!(rhs_theorem2(&f, &tet, m, &l2()).unwrap().total, 0.0);
            assert_eq!(rhs_theorem5(&f, &prism, m, &l2()).unwrap().total, 0.0);
        }
    }

    #[test]
    fn x1_only_seminorm_has_one_term() {
        let f = catalog(&FieldSpec::X1Only, 3).unwrap();
        let h1 = 0.125;
        let el = ElementGeometry::scaled(ElementKind::Prism, &[h1, 1.0, 1.0]).unwrap();
        let s = aniso_seminorm(&f, &el, 2, &l2()).unwrap();
        let live: Vec<&RhsTerm> = s.terms.iter().filter(|t| t.value != 0.0).collect();
        assert_eq!(live.len(), 1);
        assert_eq!(live[0].alpha, vec![2, 0, 0]);
        // ‖π² sin(πx1)‖² over {x1/h1 + x2 ≤ 1, 0 ≤ x3 ≤ 1}
        let g2 = |x: f64| (PI * PI * (PI * x).sin()).powi(2) * (1.0 - x / h1);
        let (nodes, weights) = crate::quadrature::gauss_legendre(30);
        let exact: f64 = nodes.iter().zip(&weights).map(|(t, w)| w * h1 * g2(t * h1)).sum::<f64>().sqrt();
        assert!((live[0].value - h1 * h1 * exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn theorem5_vertical_term_for_x3_heavy() {
        let f = catalog(&FieldSpec::X3Heavy, 3).unwrap();
        let h3 = 0.25;
        let el = ElementGeometry::scaled(ElementKind::Prism, &[1.0, 1.0, h3]).unwrap();
        let r = rhs_theorem5(&f, &el, 1, &l2()).unwrap();
        // only α = (0,0,1) survives: (1+1) · h3 · ‖g''(x3)‖ with g = sin(πx3)
        let (nodes, weights) = crate::quadrature::gauss_legendre(30);
        let g2: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(t, w)| w * h3 * (PI * PI * (PI * t * h3).sin()).powi(2))
            .sum::<f64>();
        let expected = 2.0 * h3 * (0.5 * g2).sqrt();
        assert!((r.group_total("vertical") - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn rhs_is_absolutely_homogeneous() {
        let f = catalog(&FieldSpec::Sin3, 3).unwrap();
        let g = f.scaled(-3.0);
        let el = ElementGeometry::scaled(ElementKind::Prism, &[0.5, 0.25, 0.1]).unwrap();
        let a = rhs_theorem5(&f, &el, 1, &l2()).unwrap().total;
        let b = rhs_theorem5(&g, &el, 1, &l2()).unwrap().total;
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
        let a = rhs_theorem4(&f, &el, &l2()).unwrap().total;
        let b = rhs_theorem4(&g, &el, &l2()).unwrap().total;
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn wrong_kind_rejected() {
        let f = catalog(&FieldSpec::Sin3, 3).unwrap();
        let prism = ElementGeometry::reference(ElementKind::Prism);
        let tet = ElementGeometry::reference(ElementKind::Tet);
        assert!(rhs_theorem1(&f, &prism, 1, &l2()).is_err());
        assert!(rhs_theorem5(&f, &tet, 1, &l2()).is_err());
        assert!(rhs_theorem4(&f, &tet, &l2()).is_err());
    }

    #[test]
    fn error_is_linear_and_zero_on_members() {
        let el = ElementGeometry::reference(ElementKind::Triangle);
        let f = catalog(&FieldSpec::Sin3, 2).unwrap();
        let e = interpolation_error(&f, &el, 1, &l2()).unwrap();
        assert!(e > 0.0);
        let e3 = interpolation_error(&f.scaled(3.0), &el, 1, &l2()).unwrap();
        assert!((e3 - 3.0 * e).abs() < 1e-12 * e3);
        let p = catalog(&FieldSpec::Poly { seed: 1, k: 2, kind: ElementKind::Triangle }, 2).unwrap();
        assert!(interpolation_error(&p, &el, 2, &l2()).unwrap() < 1e-12);
    }

    #[test]
    fn zero_field_has_zero_stability_ratio() {
        let f = catalog(&FieldSpec::Const { values: vec![0.0; 3] }, 3).unwrap();
        let el = ElementGeometry::reference(ElementKind::Prism);
        assert_eq!(stability_ratio(&f, &el, 1, &l2()).unwrap(), 0.0);
    }
}
