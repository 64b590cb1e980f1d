//! Convergence-rate extraction.

use serde::{Deserialize, Serialize};

use super::norms::PNorm;
use crate::error::{Error, Result};

/// Least-squares fit log(error) ≈ slope · log(h) + intercept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn estimate_rate(levels: &[(f64, f64)]) -> Result<RateFit> {
    if levels.len() < 3 {
        return Err(Error::invalid(format!("rate fit needs at least 3 levels, got {}", levels.len())));
    }
    if levels.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(Error::invalid("h must be strictly decreasing"));
    }
    if let Some((h, e)) = levels.iter().find(|(h, e)| !(*e > 0.0) || !(*h > 0.0)) {
        return Err(Error::invalid(format!("rate fit needs positive h and error, got ({h}, {e})")));
    }
    let pts: Vec<(f64, f64)> = levels.iter().map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RateFit { slope, intercept, residual })
}

/// Values closer than this (relative) are tied when ranking.
pub const RANK_TIE_TOLERANCE: f64 = 1e-9;

/// Average ranks, ties sharing the mean rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && tied(v[idx[j + 1]], v[idx[i]]) {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = mean;
        }
        i = j + 1;
    }
    r
}

fn tied(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= RANK_TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Spearman rank correlation; 0 when either sample is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

/// max/min of positive values; +∞ if any is zero.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub level: usize,
    pub h: Vec<f64>,
    /// The scalar h the rate is fitted against.
    pub h_scalar: f64,
    pub measure: f64,
    pub errors: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl RateRow {
    /// error / |T|^{1/p}, the quantity whose decay exponent matches the estimates.
    pub fn normalized_error(&self, i: usize, p: PNorm) -> f64 {
        match p {
            PNorm::Infinity => self.errors[i],
            PNorm::Finite(p) => self.errors[i] / self.measure.powf(1.0 / p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub ps: Vec<PNorm>,
    pub rows: Vec<RateRow>,
    /// One fit per p once at least 3 levels are present.
    pub fits: Vec<Option<RateFit>>,
    pub fit_levels: usize,
}

impl RateTable {
    /// Fit slopes of the measure-normalized error over the finest `fit_levels` rows.
    pub fn new(ps: Vec<PNorm>, rows: Vec<RateRow>, fit_levels: usize) -> Result<Self> {
        let fit_levels = fit_levels.max(3);
        let start = rows.len().saturating_sub(fit_levels);
        let fits = ps
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                if rows.len() < 3 {
                    return Ok(None);
                }
                let pts: Vec<(f64, f64)> = rows[start..].iter().map(|r| (r.h_scalar, r.normalized_error(i, p))).collect();
                estimate_rate(&pts).map(Some)
            })
            .collect::<Result<_>>()?;
        Ok(RateTable { ps, rows, fits, fit_levels })
    }

    /// error/rhs per level for one p; None where rhs vanishes.
    pub fn ratios(&self, i: usize) -> Vec<Option<f64>> {
        self.rows
            .iter()
            .map(|r| (r.rhs[i] > 0.0).then(|| r.errors[i] / r.rhs[i]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_slopes() {
        let f = estimate_rate(&[(1.0, 1.0), (0.5, 0.25), (0.25, 1.0 / 16.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && f.residual < 1e-14);
        let f = estimate_rate(&[(1.0, 1.0), (0.5, 1.0), (0.25, 1.0)]).unwrap();
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(estimate_rate(&[(1.0, 1.0), (0.5, 0.5)]).is_err());
        assert!(estimate_rate(&[(1.0, 1.0), (0.5, 0.0), (0.25, 0.1)]).is_err());
        assert!(estimate_rate(&[(1.0, 1.0), (1.0, 0.5), (0.25, 0.1)]).is_err());
    }

    #[test]
    fn spearman_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[1.0, 4.0, 9.0, 16.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert_eq!(spearman(&x, &[1.0; 4]), 0.0);
        let noisy = [0.25, 0.25 * (1.0 + 1e-14), 0.25 * (1.0 + 3e-14), 0.25 * (1.0 + 4e-14)];
        assert_eq!(spearman(&x, &noisy), 0.0);
        assert_eq!(ranks(&[3.0, 1.0, 3.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn table_fits_finest_levels() {
        let rows: Vec<RateRow> = (0..6)
            .map(|j| {
                let h = 0.5f64.powi(j);
                // preasymptotic first levels
                let e = if j < 3 { 1.0 } else { h * h };
                RateRow { level: j as usize, h: vec![h], h_scalar: h, measure: 1.0, errors: vec![e], rhs: vec![2.0 * e] }
            })
            .collect();
        let t = RateTable::new(vec![PNorm::Infinity], rows, 3).unwrap();
        assert!((t.fits[0].unwrap().slope - 2.0).abs() < 1e-12);
        assert!(t.ratios(0).iter().all(|r| *r == Some(0.5)));
    }
}
