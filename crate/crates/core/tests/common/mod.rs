#![allow(dead_code)]

use bdm_aniso::fields::{catalog, AnalyticField, FieldSpec, MAX_ORDER};
use bdm_aniso::geometry::ElementKind;
use bdm_aniso::polyspace::MultiIndex;
use bdm_aniso::quadrature::{integrate, make_rule, Domain, MAX_EXACTNESS};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// Exact ∫ x^α over a reference domain: ∏ α_i! / (|α| + d)! on simplices.
pub fn exact_monomial_integral(domain: Domain, a: &[u32]) -> BigRational {
    let simplex = |a: &[u32]| {
        let num = a.iter().fold(BigInt::one(), |acc, &ai| acc * factorial(ai));
        ratio(num, factorial(a.iter().sum::<u32>() + a.len() as u32))
    };
    let box_ = |a: &[u32]| {
        a.iter()
            .fold(BigRational::one(), |acc, &ai| acc * ratio(BigInt::one(), BigInt::from(ai + 1)))
    };
    match domain {
        Domain::Interval | Domain::Square => box_(a),
        Domain::Triangle | Domain::Tet => simplex(a),
        Domain::Prism => simplex(&a[..2]) * box_(&a[2..]),
    }
}

pub const DOMAINS: [Domain; 5] = [Domain::Interval, Domain::Square, Domain::Triangle, Domain::Tet, Domain::Prism];

/// Largest relative quadrature error over all monomials of degree ≤ n (and, for
/// the prism's tensor structure, all monomials the rule claims to integrate).
pub fn worst_quadrature_error(domain: Domain, n: usize) -> f64 {
    let rule = make_rule(domain, n).unwrap();
    let mut worst: f64 = 0.0;
    for alpha in MultiIndex::up_to_order(domain.dim(), n as u32) {
        let exact = exact_monomial_integral(domain, alpha.exponents()).to_f64().unwrap();
        let q = integrate(&rule, |x| alpha.monomial_value(x)).unwrap();
        worst = worst.max((q - exact).abs() / exact);
    }
    worst
}

pub fn worst_quadrature_error_all() -> f64 {
    let mut worst: f64 = 0.0;
    for domain in DOMAINS {
        for n in 0..=MAX_EXACTNESS {
            worst = worst.max(worst_quadrature_error(domain, n));
        }
    }
    worst
}

pub const FD_STEP: f64 = 1e-3;

/// D^α v_c by one Richardson-extrapolated central difference of the exact
/// lower-order partial along the first active axis.
pub fn richardson_partial(f: &AnalyticField, c: usize, alpha: &[u32], x: &[f64]) -> f64 {
    let axis = alpha.iter().position(|&a| a > 0).expect("order >= 1");
    let mut lower = alpha.to_vec();
    lower[axis] -= 1;
    let lower = MultiIndex::new(lower);
    let g = |t: f64| {
        let mut y = x.to_vec();
        y[axis] += t;
        f.partial(c, &lower, &y).unwrap()
    };
    let central = |h: f64| (g(h) - g(-h)) / (2.0 * h);
    (4.0 * central(FD_STEP / 2.0) - central(FD_STEP)) / 3.0
}

pub fn catalog_fields() -> Vec<(FieldSpec, usize)> {
    let mut out = Vec::new();
    for dim in [2, 3] {
        let kind = if dim == 2 { ElementKind::Triangle } else { ElementKind::Prism };
        out.extend([
            (FieldSpec::Sin3, dim),
            (FieldSpec::X1Only, dim),
            (FieldSpec::Layer { eps: 0.1 }, dim),
            (FieldSpec::Const { values: vec![1.5; dim] }, dim),
            (FieldSpec::Poly { seed: 3, k: 3, kind }, dim),
        ]);
    }
    out.push((FieldSpec::X3Heavy, 3));
    out
}

/// Largest relative deviation |FD − exact| / max(|exact|, 1) over seeded points,
/// components and multi-indices of order 1..=max_order.
pub fn worst_derivative_error(spec: &FieldSpec, dim: usize, max_order: u32) -> f64 {
    let f = catalog(spec, dim).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..0.9)).collect();
        for order in 1..=max_order.min(MAX_ORDER) {
            for alpha in MultiIndex::of_order(dim, order) {
                for c in 0..dim {
                    let exact = f.partial(c, &alpha, &x).unwrap();
                    let fd = richardson_partial(&f, c, alpha.exponents(), &x);
                    worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
                }
            }
        }
    }
    worst
}
