//! Frame potentials, entry moments and ensemble comparisons.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::angle_sampling::SinPowMethod;
use crate::circuit_model::{dense_cap, Circuit};
use crate::clifford_samplers::{
    enumerate_clifford_group, sample_with, signed_permutation_trace_abs2, CliffordElement, CliffordKind,
    CliffordSampler,
};
use crate::commutant::{commutant_dimension, Group};
use crate::error::{Error, Result};
use crate::haar_layouts::{build_layout, Layout, LayoutTag};
use crate::hurwitz_oracle::{oracle_sample_active_circuit, oracle_sample_passive_circuit};
use crate::representations::{adjoint_matrix, trace_abs2, OrthoMatrix};
use crate::rng::Streams;
use crate::stats::mean_stderr;

/// Every circuit ensemble the library can sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ensemble {
    ActiveHaar,
    ActiveHaarTri,
    PassiveHaar,
    PassiveHaarTri,
    NaiveUniformActive,
    NaiveUniformPassive,
    OracleActive,
    OraclePassive,
    CliffordActive,
    CliffordPassive,
    CliffordBrickwall,
}

impl Ensemble {
    pub const ALL: [Ensemble; 11] = [
        Ensemble::ActiveHaar,
        Ensemble::ActiveHaarTri,
        Ensemble::PassiveHaar,
        Ensemble::PassiveHaarTri,
        Ensemble::NaiveUniformActive,
        Ensemble::NaiveUniformPassive,
        Ensemble::OracleActive,
        Ensemble::OraclePassive,
        Ensemble::CliffordActive,
        Ensemble::CliffordPassive,
        Ensemble::CliffordBrickwall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::ActiveHaar => "active-haar",
            Ensemble::ActiveHaarTri => "active-haar-tri",
            Ensemble::PassiveHaar => "passive-haar",
            Ensemble::PassiveHaarTri => "passive-haar-tri",
            Ensemble::NaiveUniformActive => "naive-uniform-active",
            Ensemble::NaiveUniformPassive => "naive-uniform-passive",
            Ensemble::OracleActive => "oracle-active",
            Ensemble::OraclePassive => "oracle-passive",
            Ensemble::CliffordActive => "clifford-active",
            Ensemble::CliffordPassive => "clifford-passive",
            Ensemble::CliffordBrickwall => "clifford-brickwall",
        }
    }

    /// Stable key for random streams; never renumber.
    pub fn id(self) -> u64 {
        match self {
            Ensemble::ActiveHaar => 1,
            Ensemble::ActiveHaarTri => 2,
            Ensemble::PassiveHaar => 3,
            Ensemble::PassiveHaarTri => 4,
            Ensemble::NaiveUniformActive => 5,
            Ensemble::NaiveUniformPassive => 6,
            Ensemble::OracleActive => 7,
            Ensemble::OraclePassive => 8,
            Ensemble::CliffordActive => 9,
            Ensemble::CliffordPassive => 10,
            Ensemble::CliffordBrickwall => 11,
        }
    }

    pub fn group(self) -> Group {
        match self {
            Ensemble::PassiveHaar
            | Ensemble::PassiveHaarTri
            | Ensemble::NaiveUniformPassive
            | Ensemble::OraclePassive
            | Ensemble::CliffordPassive => Group::Passive,
            _ => Group::Active,
        }
    }

    pub fn layout_tag(self) -> Option<LayoutTag> {
        LayoutTag::ALL.into_iter().find(|t| t.name() == self.name())
    }

    /// Whether the ensemble is meant to be Haar on its group.
    pub fn is_haar(self) -> bool {
        matches!(
            self,
            Ensemble::ActiveHaar
                | Ensemble::ActiveHaarTri
                | Ensemble::PassiveHaar
                | Ensemble::PassiveHaarTri
                | Ensemble::OracleActive
                | Ensemble::OraclePassive
        )
    }

    fn clifford(self) -> Option<(CliffordSampler, CliffordKind)> {
        match self {
            Ensemble::CliffordActive => Some((CliffordSampler::Triangular, CliffordKind::Active)),
            Ensemble::CliffordPassive => Some((CliffordSampler::Passive, CliffordKind::Passive)),
            Ensemble::CliffordBrickwall => Some((CliffordSampler::Brickwall, CliffordKind::Active)),
            _ => None,
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown ensemble {s:?}")))
    }
}

/// Draws circuit `i` of an ensemble from stream `(seed, ensemble id, i)`.
#[derive(Clone, Debug)]
pub struct EnsembleSampler {
    pub ensemble: Ensemble,
    pub n: usize,
    layout: Option<Layout>,
    streams: Streams,
    method: SinPowMethod,
}

impl EnsembleSampler {
    pub fn new(ensemble: Ensemble, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        Ok(EnsembleSampler {
            ensemble,
            n,
            layout: ensemble.layout_tag().map(|t| build_layout(t, n)),
            streams: Streams::new(seed, ensemble.id()),
            method: SinPowMethod::Exact,
        })
    }

    /// Sampler for `sin^k` slots of layout ensembles.
    pub fn with_sinpow_method(mut self, method: SinPowMethod) -> Self {
        self.method = method;
        self
    }

    pub fn circuit(&self, index: u64) -> Circuit {
        if let Some(l) = &self.layout {
            return l.assemble(&l.sample_values(&self.streams, index, self.method));
        }
        let mut rng = self.streams.rng(index, 0);
        match self.ensemble {
            Ensemble::OracleActive => oracle_sample_active_circuit(self.n, &mut rng),
            Ensemble::OraclePassive => oracle_sample_passive_circuit(self.n, &mut rng),
            e => sample_with(e.clifford().expect("clifford ensemble").0, self.n, &mut rng).circuit,
        }
    }

    pub fn adjoint(&self, index: u64) -> OrthoMatrix {
        adjoint_matrix(&self.circuit(index))
    }
}

fn check_cap(n: usize) -> Result<()> {
    let cap = dense_cap();
    if n > cap {
        return Err(Error::Capacity(format!("n = {n} exceeds the simulation cap {cap} (FLOHAAR_DENSE_CAP)")));
    }
    Ok(())
}

/// `|Tr U|²` for samples `0..samples`, in index order.
pub fn trace_samples(ensemble: Ensemble, n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    check_cap(n)?;
    let s = EnsembleSampler::new(ensemble, n, seed)?;
    Ok((0..samples as u64).into_par_iter().map(|i| trace_abs2(&s.adjoint(i))).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FramePotentialReport {
    pub ensemble: String,
    pub n: usize,
    pub t: usize,
    pub samples: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub exact: Option<f64>,
    pub z: Option<f64>,
}

impl FramePotentialReport {
    pub const CSV_HEADER: &'static str = "ensemble,n,t,samples,estimate,stderr,exact,z";

    pub fn with_exact(mut self, exact: f64) -> Self {
        self.exact = Some(exact);
        self.z = Some(z_score(self.estimate - exact, self.stderr));
        self
    }

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v}"));
        format!(
            "{},{},{},{},{},{},{},{}",
            self.ensemble,
            self.n,
            self.t,
            self.samples,
            self.estimate,
            self.stderr,
            opt(self.exact),
            opt(self.z)
        )
    }
}

fn z_score(diff: f64, err: f64) -> f64 {
    if err > 0.0 {
        diff / err
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Monte-Carlo `E|Tr U|^{2t}` for each `t`, from one trace per sample.
pub fn frame_potentials(ensemble: Ensemble, n: usize, ts: &[usize], samples: usize, seed: u64) -> Result<Vec<FramePotentialReport>> {
    if samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    let traces = trace_samples(ensemble, n, samples, seed)?;
    Ok(ts
        .iter()
        .map(|&t| {
            let xs: Vec<f64> = traces.iter().map(|x| x.powi(t as i32)).collect();
            let (estimate, stderr) = mean_stderr(&xs);
            FramePotentialReport { ensemble: ensemble.name().into(), n, t, samples, estimate, stderr, exact: None, z: None }
        })
        .collect())
}

pub fn frame_potential(ensemble: Ensemble, n: usize, t: usize, samples: usize, seed: u64) -> Result<FramePotentialReport> {
    Ok(frame_potentials(ensemble, n, &[t], samples, seed)?.remove(0))
}

/// Exact `E|Tr U|^{2t}` over an enumerated group, as `(Σ |Tr U|^{2t}, |G|)`.
pub fn exact_frame_potential_ratio(elements: &[CliffordElement], t: usize) -> Result<(u128, u128)> {
    let mut sum = 0u128;
    for e in elements {
        let tr = signed_permutation_trace_abs2(&e.adjoint)
            .ok_or_else(|| Error::Inconsistent("group element is not a signed permutation".into()))?;
        let tr = u128::try_from(tr).map_err(|_| Error::Inconsistent(format!("negative |Tr U|² = {tr}")))?;
        sum += tr.pow(t as u32);
    }
    Ok((sum, elements.len() as u128))
}

pub fn exact_frame_potential_group(elements: &[CliffordElement], t: usize) -> Result<f64> {
    let (s, c) = exact_frame_potential_ratio(elements, t)?;
    Ok(s as f64 / c as f64)
}

/// Exact reference for an ensemble: the commutant dimension for Haar and
/// naive ensembles (the naive ones are expected to miss it), the enumerated
/// group value for Clifford ensembles at `n ≤ 3`.
pub fn reference_value(ensemble: Ensemble, n: usize, t: usize) -> Result<Option<f64>> {
    match ensemble.clifford() {
        Some((_, kind)) => {
            if n > 3 {
                return Ok(None);
            }
            let g = enumerate_clifford_group(n, kind)?;
            exact_frame_potential_group(&g, t).map(Some)
        }
        None => Ok(Some(commutant_dimension(ensemble.group(), n, t)? as f64)),
    }
}

/// One Monte-Carlo moment against its exact value.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub name: &'static str,
    pub estimate: f64,
    pub stderr: f64,
    pub exact: f64,
    pub z: f64,
}

/// Haar values on `SO(d)` of the entry moments tracked below; the passive
/// embedding of `U(d/2)` gives the same three numbers.
pub fn exact_entry_moments(d: usize) -> [f64; 3] {
    let d = d as f64;
    [1.0 / d, 3.0 / (d * (d + 2.0)), 1.0 / (d * (d + 2.0))]
}

pub const MOMENT_NAMES: [&str; 3] = ["E[O11^2]", "E[O11^4]", "E[O11^2 O12^2]"];

fn entry_moment_samples(ensemble: Ensemble, n: usize, samples: usize, seed: u64) -> Result<[Vec<f64>; 3]> {
    check_cap(n)?;
    let s = EnsembleSampler::new(ensemble, n, seed)?;
    let rows: Vec<[f64; 3]> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let o = s.adjoint(i);
            let (a, b) = (o[(0, 0)] * o[(0, 0)], o[(0, 1)] * o[(0, 1)]);
            [a, a * a, a * b]
        })
        .collect();
    Ok([0, 1, 2].map(|k| rows.iter().map(|r| r[k]).collect()))
}

/// z-scores of the second and fourth adjoint entry moments against Haar.
pub fn entry_moment_test(ensemble: Ensemble, n: usize, samples: usize, seed: u64) -> Result<Vec<MomentReport>> {
    let cols = entry_moment_samples(ensemble, n, samples, seed)?;
    let exact = exact_entry_moments(2 * n);
    Ok((0..3)
        .map(|k| {
            let (estimate, stderr) = mean_stderr(&cols[k]);
            MomentReport { name: MOMENT_NAMES[k], estimate, stderr, exact: exact[k], z: z_score(estimate - exact[k], stderr) }
        })
        .collect())
}

/// One quantity estimated from two ensembles.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub quantity: String,
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub a: Ensemble,
    pub b: Ensemble,
    pub n: usize,
    pub samples: usize,
    pub rows: Vec<ComparisonRow>,
}

impl EquivalenceReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

/// Two-sample z-scores for frame potentials at each `t` and the three entry
/// moments. Ensemble `b` uses `seed + 1`, so an ensemble compared with
/// itself sees independent draws.
pub fn ensemble_equivalence_test(a: Ensemble, b: Ensemble, n: usize, ts: &[usize], samples: usize, seed: u64) -> Result<EquivalenceReport> {
    let fa = frame_potentials(a, n, ts, samples, seed)?;
    let fb = frame_potentials(b, n, ts, samples, seed.wrapping_add(1))?;
    let mut rows: Vec<ComparisonRow> = fa
        .iter()
        .zip(&fb)
        .map(|(x, y)| ComparisonRow {
            quantity: format!("frame potential t={}", x.t),
            a: (x.estimate, x.stderr),
            b: (y.estimate, y.stderr),
            z: z_score(x.estimate - y.estimate, x.stderr.hypot(y.stderr)),
        })
        .collect();
    let ma = entry_moment_samples(a, n, samples, seed)?;
    let mb = entry_moment_samples(b, n, samples, seed.wrapping_add(1))?;
    for k in 0..3 {
        let (x, y) = (mean_stderr(&ma[k]), mean_stderr(&mb[k]));
        rows.push(ComparisonRow {
            quantity: MOMENT_NAMES[k].into(),
            a: x,
            b: y,
            z: z_score(x.0 - y.0, x.1.hypot(y.1)),
        });
    }
    Ok(EquivalenceReport { a, b, n, samples, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Ensemble::ALL {
            assert_eq!(e.name().parse::<Ensemble>().unwrap(), e);
        }
        let mut ids: Vec<u64> = Ensemble::ALL.iter().map(|e| e.id()).collect();
        ids.dedup();
        assert_eq!(ids.len(), 11);
        assert!("haar".parse::<Ensemble>().is_err());
    }

    #[test]
    fn zeroth_power_is_one() {
        for e in [Ensemble::ActiveHaar, Ensemble::PassiveHaar, Ensemble::CliffordActive] {
            let r = frame_potential(e, 3, 0, 200, 1).unwrap();
            assert_eq!((r.estimate, r.stderr), (1.0, 0.0));
        }
    }

    #[test]
    fn first_power_active() {
        let r = frame_potential(Ensemble::ActiveHaar, 4, 1, 20_000, 5).unwrap().with_exact(2.0);
        assert!(r.z.unwrap().abs() < 3.0, "{r:?}");
    }

    #[test]
    fn stderr_is_std_over_root_n() {
        let xs = trace_samples(Ensemble::PassiveHaar, 2, 500, 9).unwrap();
        let r = frame_potential(Ensemble::PassiveHaar, 2, 1, 500, 9).unwrap();
        let m = xs.iter().sum::<f64>() / 500.0;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 499.0;
        assert!((r.estimate - m).abs() < 1e-12);
        assert!((r.stderr - (var / 500.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| frame_potentials(Ensemble::ActiveHaar, 3, &[1, 2, 3], 3000, 42).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn clifford_group_bounds() {
        let g = enumerate_clifford_group(2, CliffordKind::Active).unwrap();
        assert_eq!(exact_frame_potential_group(&g, 0).unwrap(), 1.0);
        for t in 1..=4 {
            let exact = exact_frame_potential_group(&g, t).unwrap();
            let haar = commutant_dimension(Group::Active, 2, t).unwrap() as f64;
            assert!(exact >= haar - 1e-9);
        }
        let p = enumerate_clifford_group(2, CliffordKind::Passive).unwrap();
        assert_eq!(p.len(), 32);
        for t in 1..=4 {
            assert!(exact_frame_potential_group(&p, t).unwrap() >= commutant_dimension(Group::Passive, 2, t).unwrap() as f64);
        }
    }

    #[test]
    fn moments_of_the_oracle() {
        for r in entry_moment_test(Ensemble::OracleActive, 3, 20_000, 2).unwrap() {
            assert!(r.z.abs() < 4.0, "{r:?}");
        }
    }

    #[test]
    fn self_comparison_is_quiet() {
        let rep = ensemble_equivalence_test(Ensemble::PassiveHaar, Ensemble::PassiveHaar, 2, &[1, 2], 5000, 3).unwrap();
        assert_eq!(rep.rows.len(), 5);
        assert!(rep.max_abs_z() < 4.0, "{rep:?}");
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(trace_samples(Ensemble::ActiveHaar, dense_cap() + 1, 1, 0), Err(Error::Capacity(_))));
    }

    #[test]
    fn csv_row_shape() {
        let r = frame_potential(Ensemble::ActiveHaar, 2, 1, 10, 0).unwrap();
        assert_eq!(r.csv_row().split(',').count(), FramePotentialReport::CSV_HEADER.split(',').count());
    }
}
