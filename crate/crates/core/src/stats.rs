//! Rank statistics for comparing pass-rate samples between run modes.

use alloc::vec::Vec;

/// U statistic for `a` against `b`: concordant pairs where `a` wins,
/// ties at half weight. `U(a, b) + U(b, a) == n1 * n2`.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for x in a {
        for y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Vargha-Delaney effect size: probability that a value drawn from
/// `a` exceeds one drawn from `b`, ties at half.
pub fn a12(a: &[f64], b: &[f64]) -> f64 {
    mann_whitney_u(a, b) / (a.len() as f64 * b.len() as f64)
}

/// Two-sided tail of U under the normal approximation, with
/// continuity correction and tie-corrected variance. Degenerate
/// pooled samples (every value equal) report 1.
pub fn p_normal(a: &[f64], b: &[f64]) -> f64 {
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let n = n1 + n2;
    let u = mann_whitney_u(a, b);
    let mean = n1 * n2 / 2.0;

    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n1 * n2 / 12.0 * (n + 1.0 - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let d = u - mean;
    let corrected = if d > 0.0 {
        d - 0.5
    } else if d < 0.0 {
        d + 0.5
    } else {
        return 1.0;
    };
    let z = corrected / libm::sqrt(var);
    libm::erfc(libm::fabs(z) / core::f64::consts::SQRT_2)
}

/// Exact two-sided permutation tail of U: every way of re-splitting
/// the pooled sample into the observed group sizes, twice the smaller
/// tail, clamped to 1. None when either group exceeds 12 values, at
/// which point enumeration stops being worth it.
pub fn p_exact(a: &[f64], b: &[f64]) -> Option<f64> {
    let n1 = a.len();
    let n2 = b.len();
    if n1 == 0 || n2 == 0 || n1 > 12 || n2 > 12 {
        return None;
    }
    // U values are whole multiples of one half, so comparisons below
    // are exact in f64.
    let u_obs = mann_whitney_u(a, b);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let mut idx: Vec<usize> = (0..n1).collect();
    let mut selected = alloc::vec![false; n];
    let mut total = 0u64;
    let mut le = 0u64;
    let mut ge = 0u64;
    loop {
        for s in selected.iter_mut() {
            *s = false;
        }
        for &i in &idx {
            selected[i] = true;
        }
        let mut u = 0.0;
        for i in 0..n {
            if !selected[i] {
                continue;
            }
            for j in 0..n {
                if selected[j] {
                    continue;
                }
                if pooled[i] > pooled[j] {
                    u += 1.0;
                } else if pooled[i] == pooled[j] {
                    u += 0.5;
                }
            }
        }
        total += 1;
        if u <= u_obs {
            le += 1;
        }
        if u >= u_obs {
            ge += 1;
        }

        // Next combination in lexicographic order.
        let mut k = n1;
        loop {
            if k == 0 {
                let tail = le.min(ge) as f64 / total as f64;
                return Some((2.0 * tail).min(1.0));
            }
            k -= 1;
            if idx[k] != k + n - n1 {
                idx[k] += 1;
                for m in k + 1..n1 {
                    idx[m] = idx[m - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Pass rate in percent; undefined without verdicts.
pub fn ptcr(passes: u64, total: u64) -> Option<f64> {
    if total == 0 {
        None
    } else {
        Some(100.0 * passes as f64 / total as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatReport {
    pub n: usize,
    pub mean: f64,
    /// Population standard deviation: the repetitions are the whole
    /// set of runs under summary, not a sample from a larger pool.
    pub std: f64,
}

pub fn summarize(xs: &[f64]) -> Option<StatReport> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some(StatReport { n: xs.len(), mean, std: libm::sqrt(var) })
}

/// Everything the mode-versus-mode comparison reports. Baseline goes
/// first: U and A12 read as "how often the baseline pass rate beats
/// the adaptive one".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupComparison {
    pub u: f64,
    pub p_normal: f64,
    pub p_exact: Option<f64>,
    pub a12: f64,
}

pub fn compare_groups(baseline: &[f64], adaptive: &[f64]) -> GroupComparison {
    GroupComparison {
        u: mann_whitney_u(baseline, adaptive),
        p_normal: p_normal(baseline, adaptive),
        p_exact: p_exact(baseline, adaptive),
        a12: a12(baseline, adaptive),
    }
}
