//! Every rule integrates the monomials up to its declared degree exactly.
//! The exact values come from the Beta-function formulas for each domain.

use bdm_aniso::polyspace::MultiIndex;
use bdm_aniso::quadrature::{integrate, make_rule, Domain};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// ∫ x^α over the reference domain.
fn exact(domain: Domain, a: &[u32]) -> f64 {
    let simplex = |a: &[u32]| a.iter().map(|&ai| factorial(ai)).product::<f64>() / factorial(a.iter().sum::<u32>() + a.len() as u32);
    match domain {
        Domain::Interval | Domain::Square => a.iter().map(|&ai| 1.0 / (ai as f64 + 1.0)).product(),
        Domain::Triangle | Domain::Tet => simplex(a),
        Domain::Prism => simplex(&a[..2]) / (a[2] as f64 + 1.0),
    }
}

fn main() -> bdm_aniso::Result<()> {
    for domain in [Domain::Interval, Domain::Square, Domain::Triangle, Domain::Tet, Domain::Prism] {
        for n in [4, 10, 20] {
            let rule = make_rule(domain, n)?;
            let mut worst: f64 = 0.0;
            for alpha in MultiIndex::up_to_order(domain.dim(), n as u32) {
                let exact = exact(domain, alpha.exponents());
                let q = integrate(&rule, |x| alpha.monomial_value(x))?;
                worst = worst.max((q - exact).abs() / exact);
            }
            println!("{domain:?} exactness {n:>2}: {:>5} nodes, worst relative error {worst:.2e}", rule.len());
        }
    }
    Ok(())
}
