//! One-dimensional angle laws: densities, CDFs and samplers.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Beta, Distribution};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

/// Truncation threshold used by the rejection sampler unless overridden.
pub const DEFAULT_ETA: f64 = 1e-4;

/// Per-slot angle law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnglePdf {
    /// Uniform on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Density ∝ `sin^k θ` on `[0, π]`.
    SinPow { k: u32 },
    /// Density `(g+1) cos θ sin^g θ` on `[0, π/2]`.
    CosSinPow { g: u32 },
    /// Four-point law on `{0, π/2, π, 3π/2}` with `p_0 = p_π = 1/(2(f+2))`.
    CliffordDiscrete { f: u32 },
}

/// How `SinPow` is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum SinPowMethod {
    /// `arccos(1 - 2B)` with `B ~ Beta((k+1)/2, (k+1)/2)`.
    #[default]
    Exact,
    /// Truncated uniform-proposal rejection.
    Rejection { eta: f64 },
}

/// `∫_0^π sin^k θ dθ`.
pub fn sinpow_integral(k: u32) -> f64 {
    let k = k as f64;
    (PI.sqrt().ln() + ln_gamma((k + 1.0) / 2.0) - ln_gamma(k / 2.0 + 1.0)).exp()
}

/// Probabilities of `(0, π/2, π, 3π/2)` under `CliffordDiscrete{f}`.
pub fn clifford_probabilities(f: u32) -> [f64; 4] {
    let f = f as f64;
    let p0 = 1.0 / (2.0 * (f + 2.0));
    let p1 = (f + 1.0) / (2.0 * (f + 2.0));
    [p0, p1, p0, p1]
}

impl AnglePdf {
    pub const FULL_TURN: AnglePdf = AnglePdf::Uniform { lo: 0.0, hi: 2.0 * PI };

    pub fn family(&self) -> &'static str {
        match self {
            AnglePdf::Uniform { .. } => "uniform",
            AnglePdf::SinPow { .. } => "sinpow",
            AnglePdf::CosSinPow { .. } => "cossinpow",
            AnglePdf::CliffordDiscrete { .. } => "clifford",
        }
    }

    /// Sine exponent of the density (0 for uniform laws).
    pub fn exponent(&self) -> u32 {
        match *self {
            AnglePdf::Uniform { .. } => 0,
            AnglePdf::SinPow { k } => k,
            AnglePdf::CosSinPow { g } => g,
            AnglePdf::CliffordDiscrete { f } => f,
        }
    }

    /// Closed support interval.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            AnglePdf::Uniform { lo, hi } => (lo, hi),
            AnglePdf::SinPow { .. } => (0.0, PI),
            AnglePdf::CosSinPow { .. } => (0.0, FRAC_PI_2),
            AnglePdf::CliffordDiscrete { .. } => (0.0, 1.5 * PI),
        }
    }

    /// Constant multiplying the unnormalized density.
    pub fn normalizer(&self) -> f64 {
        match *self {
            AnglePdf::Uniform { lo, hi } => 1.0 / (hi - lo),
            AnglePdf::SinPow { k } => 1.0 / sinpow_integral(k),
            AnglePdf::CosSinPow { g } => g as f64 + 1.0,
            AnglePdf::CliffordDiscrete { .. } => 1.0,
        }
    }

    /// Normalized density; for the discrete law, the point mass.
    pub fn density(&self, theta: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(lo..=hi).contains(&theta) {
            return 0.0;
        }
        match *self {
            AnglePdf::Uniform { lo, hi } => {
                if theta < hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            AnglePdf::SinPow { k } => theta.sin().powi(k as i32) * self.normalizer(),
            AnglePdf::CosSinPow { g } => (g as f64 + 1.0) * theta.cos() * theta.sin().powi(g as i32),
            AnglePdf::CliffordDiscrete { f } => {
                let q = theta / FRAC_PI_2;
                if q.fract() == 0.0 {
                    clifford_probabilities(f)[q as usize]
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        let (lo, hi) = self.support();
        if theta < lo {
            return 0.0;
        }
        if theta >= hi && !matches!(self, AnglePdf::Uniform { .. }) {
            return 1.0;
        }
        match *self {
            AnglePdf::Uniform { lo, hi } => ((theta - lo) / (hi - lo)).min(1.0),
            AnglePdf::SinPow { k } => {
                let a = (k as f64 + 1.0) / 2.0;
                beta_reg(a, a, ((1.0 - theta.cos()) / 2.0).clamp(0.0, 1.0))
            }
            AnglePdf::CosSinPow { g } => theta.sin().powi(g as i32 + 1),
            AnglePdf::CliffordDiscrete { f } => {
                let p = clifford_probabilities(f);
                let upto = (theta / FRAC_PI_2).floor() as usize;
                p[..=upto.min(3)].iter().sum()
            }
        }
    }

    /// Draw with the default (exact) method.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_with(SinPowMethod::Exact, rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, method: SinPowMethod, rng: &mut R) -> f64 {
        match *self {
            AnglePdf::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            AnglePdf::SinPow { k: 0 } => PI * rng.random::<f64>(),
            AnglePdf::SinPow { k } => match method {
                SinPowMethod::Exact => {
                    let a = (k as f64 + 1.0) / 2.0;
                    let b: f64 = Beta::new(a, a).expect("valid beta").sample(rng);
                    (1.0 - 2.0 * b).clamp(-1.0, 1.0).acos()
                }
                SinPowMethod::Rejection { eta } => sample_sinpow_rejection(k, eta, rng).0,
            },
            AnglePdf::CosSinPow { g } => cossinpow_quantile(g, rng.random::<f64>()),
            AnglePdf::CliffordDiscrete { f } => sample_clifford_discrete(f, rng),
        }
    }
}

/// Inverse CDF of `CosSinPow{g}`: `arcsin(u^{1/(g+1)})`.
pub fn cossinpow_quantile(g: u32, u: f64) -> f64 {
    u.powf(1.0 / (g as f64 + 1.0)).asin()
}

/// Lower edge `ε = arcsin(η^{1/k})` of the truncated domain.
pub fn truncation_edge(k: u32, eta: f64) -> f64 {
    eta.powf(1.0 / k as f64).asin()
}

/// Acceptance probability of the truncated rejection sampler.
pub fn truncated_acceptance(k: u32, eta: f64) -> f64 {
    let eps = truncation_edge(k, eta);
    let inside = 1.0 - 2.0 * AnglePdf::SinPow { k }.cdf(eps);
    inside * sinpow_integral(k) / (PI - 2.0 * eps)
}

/// Total-variation distance between the truncated and the exact law,
/// i.e. the exact mass outside `[ε, π-ε]`.
pub fn truncation_tv_distance(k: u32, eta: f64) -> f64 {
    2.0 * AnglePdf::SinPow { k }.cdf(truncation_edge(k, eta))
}

/// Rejection sampler for `sin^k` restricted to `[ε, π-ε]`. Returns the
/// accepted angle and the number of proposals used.
pub fn sample_sinpow_rejection<R: Rng + ?Sized>(k: u32, eta: f64, rng: &mut R) -> (f64, u64) {
    assert!(k >= 1 && eta > 0.0 && eta < 1.0);
    let eps = truncation_edge(k, eta);
    let width = PI - 2.0 * eps;
    let mut attempts = 0;
    loop {
        attempts += 1;
        let theta = eps + width * rng.random::<f64>();
        if rng.random::<f64>() < theta.sin().powi(k as i32) {
            return (theta, attempts);
        }
    }
}

pub fn sample_clifford_discrete<R: Rng + ?Sized>(f: u32, rng: &mut R) -> f64 {
    let p = clifford_probabilities(f);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i as f64 * FRAC_PI_2;
        }
    }
    3.0 * FRAC_PI_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, ks_two_sample, mean_stderr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Trapezoid integral, used as an independent normalization check.
    fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let m = 200_000;
        let h = (b - a) / m as f64;
        (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                w * f(a + i as f64 * h)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn density_examples() {
        assert!((AnglePdf::SinPow { k: 0 }.density(1.0) - 1.0 / PI).abs() < 1e-14);
        assert!((AnglePdf::SinPow { k: 1 }.density(FRAC_PI_2) - 0.5).abs() < 1e-14);
        assert!((AnglePdf::CosSinPow { g: 1 }.density(PI / 4.0) - 1.0).abs() < 1e-14);
        assert_eq!(AnglePdf::SinPow { k: 3 }.density(-0.1), 0.0);
    }

    #[test]
    fn densities_are_normalized() {
        for k in [0, 1, 2, 5, 50, 198] {
            let p = AnglePdf::SinPow { k };
            assert!((integrate(|t| p.density(t), 0.0, PI) - 1.0).abs() < 1e-10, "k={k}");
        }
        for g in [1, 3, 9, 15] {
            let p = AnglePdf::CosSinPow { g };
            assert!((integrate(|t| p.density(t), 0.0, FRAC_PI_2) - 1.0).abs() < 1e-10, "g={g}");
        }
        for f in 0..10 {
            assert!((clifford_probabilities(f).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn clifford_examples() {
        assert_eq!(clifford_probabilities(0), [0.25; 4]);
        assert_eq!(clifford_probabilities(2), [0.125, 0.375, 0.125, 0.375]);
        let mut r = rng(3);
        let mut counts = [0u64; 4];
        for _ in 0..40_000 {
            counts[(sample_clifford_discrete(2, &mut r) / FRAC_PI_2) as usize] += 1;
        }
        let exp: Vec<f64> = clifford_probabilities(2).iter().map(|p| p * 40_000.0).collect();
        assert!(crate::stats::chi_square(&counts, &exp).1 > 1e-3);
    }

    #[test]
    fn cossinpow_quantile_examples() {
        assert!((cossinpow_quantile(1, 0.25) - PI / 6.0).abs() < 1e-15);
        for g in [1, 3, 9] {
            let p = AnglePdf::CosSinPow { g };
            for i in 1..10 {
                let u = i as f64 / 10.0;
                assert!((p.cdf(cossinpow_quantile(g, u)) - u).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sinpow_cdf_matches_quadrature() {
        for k in [1, 2, 7] {
            let p = AnglePdf::SinPow { k };
            for t in [0.3, 1.0, 2.0] {
                let q = integrate(|x| p.density(x), 0.0, t);
                assert!((p.cdf(t) - q).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn uniform_ks() {
        let p = AnglePdf::FULL_TURN;
        let mut r = rng(1);
        let xs: Vec<f64> = (0..100_000).map(|_| p.sample(&mut r)).collect();
        assert!(ks_one_sample(&xs, |t| p.cdf(t)).p_value > 1e-3);
    }

    #[test]
    fn sinpow_mean_is_half_pi() {
        for k in [1, 4, 60] {
            let mut r = rng(k as u64);
            let xs: Vec<f64> = (0..20_000).map(|_| AnglePdf::SinPow { k }.sample(&mut r)).collect();
            let (m, se) = mean_stderr(&xs);
            assert!((m - FRAC_PI_2).abs() < 3.0 * se + 1e-12, "k={k}");
        }
    }

    #[test]
    fn rejection_agrees_with_exact() {
        let k = 5;
        let mut r = rng(11);
        let a: Vec<f64> = (0..20_000).map(|_| AnglePdf::SinPow { k }.sample(&mut r)).collect();
        let b: Vec<f64> = (0..20_000).map(|_| sample_sinpow_rejection(k, DEFAULT_ETA, &mut r).0).collect();
        assert!(ks_two_sample(&a, &b).p_value > 1e-3);
    }

    #[test]
    fn acceptance_rates() {
        assert!((truncated_acceptance(1000, 1e-4) - 0.292).abs() < 0.005);
        // k=1 with negligible truncation: area ratio 2/π.
        assert!((truncated_acceptance(1, 1e-12) - 2.0 / PI).abs() < 1e-6);
        let mut r = rng(5);
        let trials = 20_000;
        let total: u64 = (0..trials).map(|_| sample_sinpow_rejection(1, 1e-12, &mut r).1).sum();
        assert!((trials as f64 / total as f64 - 2.0 / PI).abs() < 0.01);
        for k in [1, 10, 100, 1000] {
            assert!(truncation_tv_distance(k, 1e-4) <= 1e-4, "k={k}");
        }
    }

    #[test]
    fn rejection_stays_in_truncated_domain() {
        let mut r = rng(9);
        let eps = truncation_edge(30, 1e-2);
        for _ in 0..1000 {
            let (t, _) = sample_sinpow_rejection(30, 1e-2, &mut r);
            assert!(t >= eps && t <= PI - eps);
        }
    }
}
