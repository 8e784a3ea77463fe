//! Random Clifford FLO circuits: the triangular-layout samplers for the
//! active and passive groups, the discrete brick-wall sampler, exhaustive
//! enumeration at small `n`, and gate-count statistics.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rayon::prelude::*;

use crate::angle_sampling::AnglePdf;
use crate::circuit_model::{circuit_unitary, Circuit, GateKind};
use crate::error::{Error, Result};
use crate::haar_layouts::{active_triangular_circuit, build_active_brickwall, Layout};
use crate::hurwitz_oracle::AngleTable;
use crate::representations::{int_adjoint, IntMatrix, UnitaryMatrix};
use crate::rng::Streams;
use crate::stats::{mean_stderr, pairwise_sum};

/// `θ mod 2π ∉ {0, π}`: gates that are neither identity nor a Pauli sign flip.
pub fn is_nontrivial(theta: f64) -> bool {
    let q = (theta.rem_euclid(2.0 * PI) / FRAC_PI_2).round() as i64 % 4;
    q == 1 || q == 3
}

/// `θ mod 2π ≠ 0`.
pub fn is_non_identity(theta: f64) -> bool {
    (theta.rem_euclid(2.0 * PI) / FRAC_PI_2).round() as i64 % 4 != 0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub nontrivial: usize,
    pub nontrivial_two_qubit: usize,
    /// Counts with sign flips (angle π) included.
    pub non_identity: usize,
    pub non_identity_two_qubit: usize,
}

pub fn count_gates(c: &Circuit) -> GateCounts {
    let mut out = GateCounts::default();
    for g in &c.gates {
        let two = g.kind.is_two_qubit();
        if is_nontrivial(g.angle) {
            out.nontrivial += 1;
            out.nontrivial_two_qubit += two as usize;
        }
        if is_non_identity(g.angle) {
            out.non_identity += 1;
            out.non_identity_two_qubit += two as usize;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordSample {
    pub circuit: Circuit,
    /// Chosen `l` per ladder, outermost ladder first.
    pub l: Vec<usize>,
    pub signs: Vec<bool>,
    /// Passive sampler only: the final `θ_{1,2}` in units of π/2.
    pub last: Option<u8>,
    pub counts: GateCounts,
}

/// Active angle table for choices `(l, sign)` at `k = 2n, …, 2`.
pub fn active_angles(n: usize, choices: &[(usize, bool)]) -> AngleTable {
    let d = 2 * n;
    assert_eq!(choices.len(), d - 1);
    let mut t = AngleTable::zeros(d);
    for (&(l, s), k) in choices.iter().zip((2..=d).rev()) {
        assert!((1..=k).contains(&l));
        for j in l..k {
            t.set(j, k, FRAC_PI_2);
        }
        if s {
            if l < k {
                t.set(l, k, t.get(l, k) + PI);
            } else {
                t.set(k - 1, k, PI);
            }
        }
    }
    t
}

/// Passive angle table for choices at `k = 2n, 2n-2, …, 4` and the final
/// `θ_{1,2} = last · π/2`.
pub fn passive_angles(n: usize, choices: &[(usize, bool)], last: u8) -> AngleTable {
    let d = 2 * n;
    assert_eq!(choices.len(), n - 1);
    let mut t = AngleTable::zeros(d);
    for (&(l, s), k) in choices.iter().zip((2..=n).rev().map(|m| 2 * m)) {
        assert!((1..=k).contains(&l));
        let turn = if s { 1.5 * PI } else { FRAC_PI_2 };
        if l % 2 == 0 {
            for j in l + 1..k {
                t.set(j, k, FRAC_PI_2);
            }
            for j in l..k - 1 {
                t.set(j, k - 1, FRAC_PI_2);
            }
            if l < k {
                t.set(l, k, turn);
                t.set(l - 1, k - 1, turn);
            } else if s {
                t.set(k - 1, k, PI);
            }
        } else {
            for j in l..k {
                t.set(j, k, FRAC_PI_2);
            }
            for j in l..k - 1 {
                t.set(j, k - 1, FRAC_PI_2);
            }
            t.set(l, k, turn);
        }
    }
    t.set(1, 2, last as f64 * FRAC_PI_2);
    t
}

fn finish(n: usize, t: &AngleTable, choices: Vec<(usize, bool)>, last: Option<u8>) -> CliffordSample {
    let circuit = active_triangular_circuit(n, t);
    let counts = count_gates(&circuit);
    let (l, signs) = choices.into_iter().unzip();
    CliffordSample { circuit, l, signs, last, counts }
}

/// Uniform random element of the active Clifford FLO group.
pub fn sample_clifford_active<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordSample {
    assert!(n >= 1);
    let choices: Vec<(usize, bool)> =
        (2..=2 * n).rev().map(|k| (rng.random_range(1..=k), rng.random::<bool>())).collect();
    finish(n, &active_angles(n, &choices), choices, None)
}

/// Uniform random element of the passive Clifford FLO group.
pub fn sample_clifford_passive<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordSample {
    assert!(n >= 1);
    let choices: Vec<(usize, bool)> =
        (2..=n).rev().map(|m| (rng.random_range(1..=2 * m), rng.random::<bool>())).collect();
    let last = rng.random_range(0..4u8);
    finish(n, &passive_angles(n, &choices, last), choices, Some(last))
}

/// Brick-wall layout whose slots draw from `CliffordDiscrete{f}`.
pub fn clifford_brickwall_layout(n: usize) -> Layout {
    let mut l = build_active_brickwall(n);
    for s in &mut l.slots {
        s.pdf = AnglePdf::CliffordDiscrete { f: s.pdf.exponent() };
    }
    l
}

pub fn sample_clifford_active_brickwall<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordSample {
    let circuit = clifford_brickwall_layout(n).sample_circuit(rng);
    let counts = count_gates(&circuit);
    CliffordSample { circuit, l: Vec::new(), signs: Vec::new(), last: None, counts }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordKind {
    Active,
    Passive,
}

/// One group element: exact adjoint and its spinor unitary (up to sign).
#[derive(Clone, Debug)]
pub struct CliffordElement {
    pub adjoint: IntMatrix,
    pub unitary: UnitaryMatrix,
}

/// All `(l, sign)` choice sequences for ladders of the given sizes.
fn choice_sequences(sizes: &[usize]) -> Vec<Vec<(usize, bool)>> {
    let mut out = vec![Vec::new()];
    for &k in sizes {
        let mut next = Vec::with_capacity(out.len() * 2 * k);
        for prefix in &out {
            for l in 1..=k {
                for s in [false, true] {
                    let mut p = prefix.clone();
                    p.push((l, s));
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}

/// Every circuit the sampler can produce, one per choice sequence.
pub fn all_choice_circuits(n: usize, kind: CliffordKind) -> Vec<Circuit> {
    match kind {
        CliffordKind::Active => {
            let sizes: Vec<usize> = (2..=2 * n).rev().collect();
            choice_sequences(&sizes).iter().map(|c| active_triangular_circuit(n, &active_angles(n, c))).collect()
        }
        CliffordKind::Passive => {
            let sizes: Vec<usize> = (2..=n).rev().map(|m| 2 * m).collect();
            choice_sequences(&sizes)
                .iter()
                .flat_map(|c| (0..4u8).map(move |last| active_triangular_circuit(n, &passive_angles(n, c, last))))
                .collect()
        }
    }
}

/// Distinct group elements reached by the sampler, keyed by exact adjoint.
pub fn enumerate_clifford_group(n: usize, kind: CliffordKind) -> Result<Vec<CliffordElement>> {
    if n == 0 || n > 3 {
        return Err(Error::Capacity(format!("enumeration supports 1 ≤ n ≤ 3, got {n}")));
    }
    let mut seen: BTreeMap<IntMatrix, Circuit> = BTreeMap::new();
    for c in all_choice_circuits(n, kind) {
        let o = int_adjoint(&c).ok_or_else(|| Error::Inconsistent("non-Clifford angle".into()))?;
        seen.entry(o).or_insert(c);
    }
    seen.into_iter()
        .map(|(adjoint, c)| Ok(CliffordElement { adjoint, unitary: circuit_unitary(&c)? }))
        .collect()
}

/// `|Tr U|² = det(1 + O)` for a signed permutation, exactly: each cycle
/// of length `L` with sign product `ε` contributes `1 − (−1)^L ε`.
pub fn signed_permutation_trace_abs2(o: &IntMatrix) -> Option<i64> {
    let p = o.signed_permutation()?;
    let mut seen = vec![false; o.d];
    let mut det = 1i64;
    for start in 0..o.d {
        if seen[start] {
            continue;
        }
        let (mut i, mut len, mut eps) = (start, 0, 1i64);
        while !seen[i] {
            seen[i] = true;
            eps *= p[i].1;
            i = p[i].0;
            len += 1;
        }
        det *= 1 - if len % 2 == 0 { eps } else { -eps };
    }
    Some(det)
}

/// Summary of nontrivial gate counts over many samples.
#[derive(Clone, Debug, PartialEq)]
pub struct GateStats {
    pub n: usize,
    pub samples: usize,
    pub mean_total: f64,
    pub stderr_total: f64,
    pub mean_two_qubit: f64,
    pub std_two_qubit: f64,
    pub stderr_two_qubit: f64,
    /// Same with sign flips counted.
    pub mean_non_identity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordSampler {
    Triangular,
    Passive,
    Brickwall,
}

pub fn sample_with<R: Rng + ?Sized>(which: CliffordSampler, n: usize, rng: &mut R) -> CliffordSample {
    match which {
        CliffordSampler::Triangular => sample_clifford_active(n, rng),
        CliffordSampler::Passive => sample_clifford_passive(n, rng),
        CliffordSampler::Brickwall => sample_clifford_active_brickwall(n, rng),
    }
}

/// Gate-count statistics; sample `i` draws from stream `(i, 0)`.
pub fn clifford_gate_stats(which: CliffordSampler, n: usize, samples: usize, streams: &Streams) -> GateStats {
    let counts: Vec<GateCounts> = (0..samples)
        .into_par_iter()
        .map(|i| sample_with(which, n, &mut streams.rng(i as u64, 0)).counts)
        .collect();
    let total: Vec<f64> = counts.iter().map(|c| c.nontrivial as f64).collect();
    let two: Vec<f64> = counts.iter().map(|c| c.nontrivial_two_qubit as f64).collect();
    let raw: Vec<f64> = counts.iter().map(|c| c.non_identity as f64).collect();
    let (mean_total, stderr_total) = mean_stderr(&total);
    let (mean_two_qubit, stderr_two_qubit) = mean_stderr(&two);
    GateStats {
        n,
        samples,
        mean_total,
        stderr_total,
        mean_two_qubit,
        std_two_qubit: stderr_two_qubit * (samples as f64).sqrt(),
        stderr_two_qubit,
        mean_non_identity: pairwise_sum(&raw) / samples as f64,
    }
}

/// Nontrivial gates per ladder `C_{k-1}`, `k = 2n, …, 2`, of an active sample.
pub fn nontrivial_per_ladder(s: &CliffordSample) -> Vec<usize> {
    let n = s.circuit.n;
    let mut out = Vec::with_capacity(2 * n - 1);
    let mut offset = 0;
    let mut sizes = Vec::new();
    for m in 1..2 * n {
        sizes.push((offset, m));
        offset += m;
    }
    for &(start, m) in sizes.iter().rev() {
        let gates = &s.circuit.gates[start..start + m];
        out.push(gates.iter().filter(|g| is_nontrivial(g.angle)).count());
    }
    out
}

/// Count of a gate kind among nontrivial gates.
pub fn nontrivial_of_kind(c: &Circuit, kind: GateKind) -> usize {
    c.gates.iter().filter(|g| g.kind == kind && is_nontrivial(g.angle)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit_model::circuit_unitary;
    use crate::representations::{
        adjoint_matrix, check_symmetries, classify_matrix, majorana, pauli_string, trace_abs2,
    };
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(s: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(s)
    }

    #[test]
    fn angle_classification() {
        assert!(!is_nontrivial(0.0) && !is_nontrivial(PI) && !is_nontrivial(2.0 * PI));
        assert!(is_nontrivial(FRAC_PI_2) && is_nontrivial(1.5 * PI) && is_nontrivial(2.5 * PI));
        assert!(is_non_identity(PI) && !is_non_identity(2.0 * PI));
    }

    #[test]
    fn samples_are_signed_permutations() {
        let mut r = rng(1);
        for n in 1..=5 {
            for _ in 0..200 {
                for s in [sample_clifford_active(n, &mut r), sample_clifford_active_brickwall(n, &mut r)] {
                    let o = int_adjoint(&s.circuit).unwrap();
                    assert_eq!(o.signed_permutation_det(), Some(1));
                    assert!(s.circuit.gates.iter().all(|g| (g.angle / FRAC_PI_2).fract().abs() < 1e-12));
                }
                let s = sample_clifford_passive(n, &mut r);
                let o = int_adjoint(&s.circuit).unwrap();
                assert_eq!(o.signed_permutation_det(), Some(1));
                assert!(o.is_symplectic());
            }
        }
    }

    #[test]
    fn passive_samples_conserve_number() {
        let mut r = rng(2);
        for n in 1..=4 {
            for _ in 0..20 {
                let s = sample_clifford_passive(n, &mut r);
                let sym = check_symmetries(&s.circuit, 1e-9).unwrap();
                assert!(sym.parity_preserved && sym.number_preserved);
            }
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(enumerate_clifford_group(1, CliffordKind::Active).unwrap().len(), 4);
        assert_eq!(enumerate_clifford_group(2, CliffordKind::Active).unwrap().len(), 192);
        assert_eq!(enumerate_clifford_group(2, CliffordKind::Passive).unwrap().len(), 32);
        assert_eq!(enumerate_clifford_group(3, CliffordKind::Passive).unwrap().len(), 384);
        assert!(enumerate_clifford_group(4, CliffordKind::Active).is_err());
    }

    #[test]
    fn choice_map_is_bijective() {
        for n in 1..=2 {
            let circuits = all_choice_circuits(n, CliffordKind::Active);
            let distinct: std::collections::BTreeSet<IntMatrix> =
                circuits.iter().map(|c| int_adjoint(c).unwrap()).collect();
            assert_eq!(circuits.len(), distinct.len());
        }
    }

    #[test]
    fn exact_trace_formula() {
        for e in enumerate_clifford_group(2, CliffordKind::Active).unwrap() {
            let exact = signed_permutation_trace_abs2(&e.adjoint).unwrap();
            assert!((trace_abs2(&e.adjoint.to_f64()) - exact as f64).abs() < 1e-9);
            assert!((e.unitary.trace().norm_sqr() - exact as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn spinors_normalize_paulis() {
        // Conjugating each Majorana gives ± another Majorana, hence Pauli
        // strings map to Pauli strings.
        let mut r = rng(3);
        for n in 1..=4 {
            for _ in 0..10 {
                let s = sample_clifford_active(n, &mut r);
                let u = circuit_unitary(&s.circuit).unwrap();
                let o = adjoint_matrix(&s.circuit);
                for l in 1..=2 * n {
                    let img = &u * majorana(l, n).to_dense() * u.adjoint();
                    let m = (0..2 * n).find(|&m| o[(l - 1, m)].abs() > 0.5).unwrap();
                    let want = majorana(m + 1, n).to_dense() * Complex64::new(o[(l - 1, m)].round(), 0.0);
                    assert!((img - want).iter().all(|z| z.norm() < 1e-9));
                }
                // A generic Pauli string, e.g. X on qubit 1 times Z elsewhere.
                let mut letters = vec!['Z'; n];
                letters[0] = 'X';
                let p = pauli_string(&letters);
                let img = &u * &p * u.adjoint();
                let nonzero = img.iter().filter(|z| z.norm() > 1e-9).count();
                assert_eq!(nonzero, 1 << n);
            }
        }
    }

    #[test]
    fn uniform_signed_perm_flags() {
        let mut r = rng(4);
        let s = sample_clifford_active(3, &mut r);
        let f = classify_matrix(&adjoint_matrix(&s.circuit), 1e-9);
        assert!(f.signed_permutation && f.special);
    }

    #[test]
    fn ladder_means() {
        let n = 3;
        let streams = Streams::new(5, 0);
        let samples = 20_000;
        let per: Vec<Vec<usize>> = (0..samples)
            .map(|i| nontrivial_per_ladder(&sample_clifford_active(n, &mut streams.rng(i, 0))))
            .collect();
        for (idx, k) in (2..=2 * n).rev().enumerate() {
            let xs: Vec<f64> = per.iter().map(|p| p[idx] as f64).collect();
            let (m, se) = mean_stderr(&xs);
            assert!((m - (k as f64 - 1.0) / 2.0).abs() < 3.0 * se, "k={k}: {m} ± {se}");
        }
    }
}
