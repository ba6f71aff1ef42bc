//! Goodness-of-fit and rank-correlation tests used to check samplers and
//! granularity trends.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Pearson chi-square statistic and upper-tail p-value of `observed` against
/// `expected` counts. Categories with zero expectation must have zero
/// observations and are ignored.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len(), "category count mismatch");
    let mut stat = 0.0;
    let mut categories = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e == 0.0 {
            assert_eq!(o, 0, "observation in a zero-probability category");
            continue;
        }
        let d = o as f64 - e;
        stat += d * d / e;
        categories += 1;
    }
    if categories < 2 {
        return (stat, 1.0);
    }
    let dist = ChiSquared::new((categories - 1) as f64).expect("positive degrees of freedom");
    (stat, dist.sf(stat))
}

/// Chi-square test of `observed` against the uniform distribution.
pub fn chi_square_uniform(observed: &[u64]) -> (f64, f64) {
    let total: u64 = observed.iter().sum();
    let expected = vec![total as f64 / observed.len() as f64; observed.len()];
    chi_square(observed, &expected)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KendallTau {
    /// Tau-b (equals tau-a without ties).
    pub tau: f64,
    /// Two-sided p-value for the null of no association.
    pub p_value: f64,
}

/// Kendall rank correlation. Without ties the p-value is exact, computed
/// from the distribution of inversion counts over permutations; with ties it
/// uses the tie-corrected normal approximation.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> KendallTau {
    assert_eq!(x.len(), y.len(), "length mismatch");
    let n = x.len();
    assert!(n >= 2, "need at least two observations");
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            match (dx == 0.0, dy == 0.0) {
                (true, true) => {}
                (true, false) => ties_x += 1,
                (false, true) => ties_y += 1,
                (false, false) if (dx > 0.0) == (dy > 0.0) => concordant += 1,
                (false, false) => discordant += 1,
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let s = concordant - discordant;
    let denom = ((concordant + discordant + ties_x) as f64
        * (concordant + discordant + ties_y) as f64)
        .sqrt();
    let tau = if denom == 0.0 { 0.0 } else { s as f64 / denom };
    let untied = concordant + discordant == pairs;
    let p_value = if untied && n <= 60 {
        exact_two_sided(n, discordant)
    } else {
        let xt = tie_groups(x);
        let yt = tie_groups(y);
        let nf = n as f64;
        let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
        let vt: f64 = xt.iter().map(|&t| t * (t - 1.0) * (2.0 * t + 5.0)).sum();
        let vu: f64 = yt.iter().map(|&u| u * (u - 1.0) * (2.0 * u + 5.0)).sum();
        let var = (v0 - vt - vu) / 18.0;
        if var <= 0.0 {
            1.0
        } else {
            let z = s as f64 / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (2.0 * normal.sf(z.abs())).min(1.0)
        }
    };
    KendallTau { tau, p_value }
}

fn tie_groups(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let mut groups = Vec::new();
    let mut run = 1.0;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1.0;
        } else {
            if run > 1.0 {
                groups.push(run);
            }
            run = 1.0;
        }
    }
    if run > 1.0 {
        groups.push(run);
    }
    groups
}

/// P(|S| >= |s|) where S = pairs - 2 * inversions over uniform permutations.
fn exact_two_sided(n: usize, discordant: i64) -> f64 {
    let max_inv = n * (n - 1) / 2;
    // Mahonian numbers as probabilities to stay in f64 range
    let mut dist = vec![1.0f64];
    for k in 2..=n {
        let mut next = vec![0.0; dist.len() + k - 1];
        for (i, &p) in dist.iter().enumerate() {
            for shift in 0..k {
                next[i + shift] += p / k as f64;
            }
        }
        dist = next;
    }
    debug_assert_eq!(dist.len(), max_inv + 1);
    let pairs = max_inv as i64;
    let observed = (pairs - 2 * discordant).abs();
    let p: f64 = dist
        .iter()
        .enumerate()
        .filter(|&(inv, _)| (pairs - 2 * inv as i64).abs() >= observed)
        .map(|(_, &p)| p)
        .sum();
    p.min(1.0)
}
