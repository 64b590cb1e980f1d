use std::fmt;

/// Exponent tuple of a monomial, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit multi-index along `axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |α|, the sum of exponents.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Value of the monomial x^α.
    pub fn monomial_value(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&e, &xi)| if e == 0 { 1.0 } else { xi.powi(e as i32) })
            .product()
    }

    /// All multi-indices of dimension `dim` with |α| = `order`, in lexicographic order.
    pub fn of_order(dim: usize, order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; dim];
        fill_order(&mut current, 0, order, &mut out);
        out.sort();
        out
    }

    /// All multi-indices with |α| ≤ `max_order`, in lexicographic order.
    pub fn up_to_order(dim: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = (0..=max_order)
            .flat_map(|o| MultiIndex::of_order(dim, o))
            .collect();
        out.sort();
        out
    }
}

fn fill_order(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for e in 0..=remaining {
        current[pos] = e;
        fill_order(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_counts() {
        // (n + d - 1 choose d - 1)
        assert_eq!(MultiIndex::of_order(3, 2).len(), 6);
        assert_eq!(MultiIndex::of_order(2, 3).len(), 4);
        assert_eq!(MultiIndex::up_to_order(3, 2).len(), 10);
        for a in MultiIndex::of_order(3, 4) {
            assert_eq!(a.order(), 4);
        }
    }

    #[test]
    fn lexicographic() {
        let all = MultiIndex::up_to_order(2, 1);
        let e: Vec<_> = all.iter().map(|a| a.exponents().to_vec()).collect();
        assert_eq!(e, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn monomial_value() {
        let a = MultiIndex::new(vec![1, 1]);
        assert_eq!(a.monomial_value(&[2.0, 3.0]), 6.0);
        assert_eq!(MultiIndex::zero(3).monomial_value(&[0.0, 0.0, 0.0]), 1.0);
    }
}
