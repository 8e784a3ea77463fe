//! Small statistical helpers: deterministic summation, sample moments and
//! the goodness-of-fit tests used by the verification suites.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pairwise summation over a fixed binary split, so the result depends
/// only on the slice contents and never on how it was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean and standard error of the mean (sample std / √N).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Small-λ form converges much faster here.
        let y = (-std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda)).exp();
        let mut s = 0.0;
        for k in 0..50 {
            let e = (2 * k + 1) * (2 * k + 1);
            s += y.powi(e);
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Result of a Kolmogorov–Smirnov test.
#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample KS test of `samples` against the continuous `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    KsResult { statistic: d, p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d) }
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.total_cmp(q));
    xb.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sn = ne.sqrt();
    KsResult { statistic: d, p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d) }
}

/// Pearson chi-square test of observed counts against expected counts.
/// Returns `(statistic, p_value)`.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e) * (o as f64 - e) / e)
        .sum();
    let dof = (observed.len() - 1) as f64;
    let p = 1.0 - ChiSquared::new(dof).expect("positive dof").cdf(stat);
    (stat, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_branches_agree() {
        // Both series are valid near the switch point.
        let lam: f64 = 1.18;
        let mut s = 0.0;
        for k in 1..=100 {
            let t = (-2.0 * (k * k) as f64 * lam * lam).exp();
            s += if k % 2 == 1 { t } else { -t };
        }
        assert!((kolmogorov_sf(lam) - 2.0 * s).abs() < 1e-12);
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        let (m, se) = mean_stderr(&[2.0; 10]);
        assert_eq!(m, 2.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn chi_square_perfect_fit() {
        let (s, p) = chi_square(&[10, 10, 10], &[10.0, 10.0, 10.0]);
        assert_eq!(s, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
    }
}
