//! Adjoint (`2n × 2n` orthogonal) and spinor (`2^n × 2^n` unitary)
//! representations of circuits, Majorana operators and matrix-class checks.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit_model::{circuit_unitary, Circuit, Gate, GateKind};
use crate::error::Result;

pub type OrthoMatrix = DMatrix<f64>;
pub type UnitaryMatrix = DMatrix<Complex64>;

/// A Jordan–Wigner Majorana operator as a phased Pauli string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajoranaOp {
    pub mode: usize,
    /// Phase in units of `i^k`.
    pub phase: u8,
    pub letters: Vec<char>,
}

/// `c_{2q-1} = Z..Z X_q`, `c_{2q} = Z..Z Y_q` (1-based `l`).
pub fn majorana(l: usize, n: usize) -> MajoranaOp {
    assert!(l >= 1 && l <= 2 * n, "mode {l} out of range for n={n}");
    let q = l.div_ceil(2);
    let letters = (1..=n)
        .map(|p| match p.cmp(&q) {
            std::cmp::Ordering::Less => 'Z',
            std::cmp::Ordering::Equal if l % 2 == 1 => 'X',
            std::cmp::Ordering::Equal => 'Y',
            std::cmp::Ordering::Greater => 'I',
        })
        .collect();
    MajoranaOp { mode: l, phase: 0, letters }
}

fn pauli_dense(p: char) -> UnitaryMatrix {
    let (z, o, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    match p {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("not a Pauli letter: {p}"),
    }
}

/// Dense matrix of a Pauli string, leftmost letter = qubit 1.
pub fn pauli_string(letters: &[char]) -> UnitaryMatrix {
    letters
        .iter()
        .fold(DMatrix::identity(1, 1), |m: UnitaryMatrix, &p| m.kronecker(&pauli_dense(p)))
}

impl MajoranaOp {
    pub fn to_dense(&self) -> UnitaryMatrix {
        pauli_string(&self.letters) * Complex64::i().powu(self.phase as u32)
    }
}

/// Local adjoint generator of one gate kind: `O(θ) = exp(θ A)` acting on
/// `size` consecutive modes.
#[derive(Clone, Copy, Debug)]
struct Generator {
    size: usize,
    a: [[f64; 4]; 4],
    a2: [[f64; 4]; 4],
}

/// `A_lm` from `d/dθ (U c_l U†)|_0 = (i/2)[H, c_l] = Σ_m A_lm c_m`, read
/// off by the trace inner product on a minimal register.
fn derive_generator(h: &UnitaryMatrix, qubits: usize, first_mode: usize, size: usize) -> Generator {
    let half_i = Complex64::new(0.0, 0.5);
    let dim = (1usize << qubits) as f64;
    let cs: Vec<UnitaryMatrix> = (1..=2 * qubits).map(|l| majorana(l, qubits).to_dense()).collect();
    let mut a = [[0.0; 4]; 4];
    for r in 0..size {
        let cl = &cs[first_mode - 1 + r];
        let d = (h * cl - cl * h) * half_i;
        for s in 0..size {
            let cm = &cs[first_mode - 1 + s];
            let v = (cm * &d).trace() / dim;
            debug_assert!(v.im.abs() < 1e-12);
            a[r][s] = v.re.round();
        }
    }
    let mut a2 = [[0.0; 4]; 4];
    for r in 0..size {
        for s in 0..size {
            a2[r][s] = (0..size).map(|k| a[r][k] * a[k][s]).sum();
        }
    }
    Generator { size, a, a2 }
}

fn generators() -> &'static [Generator; 3] {
    static TABLE: OnceLock<[Generator; 3]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let z = pauli_string(&['Z']);
        let xx = pauli_string(&['X', 'X']);
        let xyyx = pauli_string(&['X', 'Y']) - pauli_string(&['Y', 'X']);
        [
            derive_generator(&z, 1, 1, 2),
            derive_generator(&xx, 2, 2, 2),
            derive_generator(&xyyx, 2, 1, 4),
        ]
    })
}

/// First global mode touched and the local block `exp(θ A)` for a gate.
/// `GlobalZ` is handled by the caller as a product of `Z` blocks.
fn local_block(kind: GateKind, site: usize, angle: f64) -> (usize, usize, [[f64; 4]; 4]) {
    let (gen, first) = match kind {
        GateKind::Z => (&generators()[0], 2 * site - 1),
        GateKind::XX => (&generators()[1], 2 * site),
        GateKind::XYYX => (&generators()[2], 2 * site - 1),
        GateKind::GlobalZ => unreachable!(),
    };
    let (s, c) = angle.sin_cos();
    let mut b = [[0.0; 4]; 4];
    for r in 0..gen.size {
        for k in 0..gen.size {
            let id = if r == k { 1.0 } else { 0.0 };
            b[r][k] = id + s * gen.a[r][k] + (1.0 - c) * gen.a2[r][k];
        }
    }
    (first, gen.size, b)
}

/// `O ← O · B` on the columns `first..first+size` (1-based `first`).
fn right_apply(o: &mut OrthoMatrix, first: usize, size: usize, b: &[[f64; 4]; 4]) {
    let f = first - 1;
    let mut row = [0.0; 4];
    for r in 0..o.nrows() {
        for (k, v) in row.iter_mut().enumerate().take(size) {
            *v = o[(r, f + k)];
        }
        for cidx in 0..size {
            let mut acc = 0.0;
            for k in 0..size {
                acc += row[k] * b[k][cidx];
            }
            o[(r, f + cidx)] = acc;
        }
    }
}

/// Multiply `o` on the right by the adjoint of `g`.
pub fn apply_gate_adjoint(o: &mut OrthoMatrix, g: &Gate, n: usize) {
    match g.kind {
        GateKind::GlobalZ => {
            for q in 1..=n {
                let (first, size, b) = local_block(GateKind::Z, q, g.angle);
                right_apply(o, first, size, &b);
            }
        }
        kind => {
            let (first, size, b) = local_block(kind, g.site.expect("validated site"), g.angle);
            right_apply(o, first, size, &b);
        }
    }
}

pub fn gate_adjoint(g: &Gate, n: usize) -> OrthoMatrix {
    let mut o = DMatrix::identity(2 * n, 2 * n);
    apply_gate_adjoint(&mut o, g, n);
    o
}

/// Adjoint matrix `O` with `U c_l U† = Σ_m O_lm c_m`.
pub fn adjoint_matrix(c: &Circuit) -> OrthoMatrix {
    let mut o = DMatrix::identity(2 * c.n, 2 * c.n);
    for g in &c.gates {
        apply_gate_adjoint(&mut o, g, c.n);
    }
    o
}

/// Adjoint read off a dense spinor unitary by conjugating every Majorana.
pub fn adjoint_by_conjugation(u: &UnitaryMatrix, n: usize) -> OrthoMatrix {
    let dim = (1usize << n) as f64;
    let cs: Vec<UnitaryMatrix> = (1..=2 * n).map(|l| majorana(l, n).to_dense()).collect();
    let ud = u.adjoint();
    DMatrix::from_fn(2 * n, 2 * n, |l, m| ((&cs[m] * u * &cs[l] * &ud).trace() / dim).re)
}

/// Largest entry of `U c_l U† − Σ_m O_lm c_m` over all modes.
pub fn adjoint_residual(c: &Circuit, o: &OrthoMatrix) -> Result<f64> {
    let u = circuit_unitary(c)?;
    let n = c.n;
    let ud = u.adjoint();
    let cs: Vec<UnitaryMatrix> = (1..=2 * n).map(|l| majorana(l, n).to_dense()).collect();
    let mut worst: f64 = 0.0;
    for l in 0..2 * n {
        let mut r = &u * &cs[l] * &ud;
        for m in 0..2 * n {
            r -= &cs[m] * Complex64::new(o[(l, m)], 0.0);
        }
        worst = r.iter().map(|z| z.norm()).fold(worst, f64::max);
    }
    Ok(worst)
}

/// Whether the stated `O` satisfies the conjugation identity for `c`.
pub fn check_adjoint_against(c: &Circuit, o: &OrthoMatrix, tol: f64) -> Result<bool> {
    Ok(adjoint_residual(c, o)? <= tol)
}

pub fn check_adjoint_consistency(c: &Circuit, tol: f64) -> Result<bool> {
    check_adjoint_against(c, &adjoint_matrix(c), tol)
}

/// Matrix-class flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixClass {
    pub orthogonal: bool,
    pub special: bool,
    pub symplectic: bool,
    pub signed_permutation: bool,
}

/// `Ω = 1_n ⊗ iY`, i.e. blocks `[[0, 1], [-1, 0]]`.
pub fn omega(n: usize) -> OrthoMatrix {
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        if r / 2 != c / 2 {
            0.0
        } else if r % 2 == 0 && c % 2 == 1 {
            1.0
        } else if r % 2 == 1 && c % 2 == 0 {
            -1.0
        } else {
            0.0
        }
    })
}

fn max_abs(m: &OrthoMatrix) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn classify_matrix(o: &OrthoMatrix, tol: f64) -> MatrixClass {
    let d = o.nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let orthogonal = o.is_square() && max_abs(&(o.transpose() * o - &id)) <= tol;
    let special = orthogonal && (o.determinant() - 1.0).abs() <= tol;
    let symplectic = d.is_multiple_of(2) && {
        let w = omega(d / 2);
        max_abs(&(o.transpose() * &w * o - &w)) <= tol
    };
    let signed_permutation = orthogonal && signed_permutation_of(o, tol).is_some();
    MatrixClass { orthogonal, special, symplectic, signed_permutation }
}

/// Exact integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    pub d: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(d: usize) -> Self {
        let mut data = vec![0; d * d];
        for i in 0..d {
            data[i * d + i] = 1;
        }
        Self { d, data }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.d + c]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let d = self.d;
        let mut data = vec![0; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a != 0 {
                    for c in 0..d {
                        data[r * d + c] += a * other.get(k, c);
                    }
                }
            }
        }
        IntMatrix { d, data }
    }

    pub fn transpose(&self) -> IntMatrix {
        let d = self.d;
        IntMatrix { d, data: (0..d * d).map(|i| self.get(i % d, i / d)).collect() }
    }

    pub fn to_f64(&self) -> OrthoMatrix {
        DMatrix::from_fn(self.d, self.d, |r, c| self.get(r, c) as f64)
    }

    /// Exact rounding of a floating matrix whose entries are integers to `tol`.
    pub fn from_f64(m: &OrthoMatrix, tol: f64) -> Option<IntMatrix> {
        let d = m.nrows();
        let mut data = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let x = m[(r, c)];
                let k = x.round();
                if (x - k).abs() > tol {
                    return None;
                }
                data.push(k as i64);
            }
        }
        Some(IntMatrix { d, data })
    }

    /// `(column, sign)` for each row if this is a signed permutation.
    pub fn signed_permutation(&self) -> Option<Vec<(usize, i64)>> {
        let d = self.d;
        let mut used = vec![false; d];
        let mut out = Vec::with_capacity(d);
        for r in 0..d {
            let nz: Vec<usize> = (0..d).filter(|&c| self.get(r, c) != 0).collect();
            if nz.len() != 1 {
                return None;
            }
            let c = nz[0];
            let v = self.get(r, c);
            if v.abs() != 1 || used[c] {
                return None;
            }
            used[c] = true;
            out.push((c, v));
        }
        Some(out)
    }

    /// Determinant of a signed permutation (None otherwise).
    pub fn signed_permutation_det(&self) -> Option<i64> {
        let p = self.signed_permutation()?;
        let mut sign: i64 = p.iter().map(|&(_, s)| s).product();
        let mut seen = vec![false; self.d];
        for start in 0..self.d {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = p[i].0;
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        Some(sign)
    }

    pub fn is_symplectic(&self) -> bool {
        let w = IntMatrix::from_f64(&omega(self.d / 2), 0.0).unwrap();
        self.transpose().mul(&w).mul(self) == w
    }
}

fn signed_permutation_of(o: &OrthoMatrix, tol: f64) -> Option<Vec<(usize, i64)>> {
    IntMatrix::from_f64(o, tol)?.signed_permutation()
}

/// Exact adjoint of a circuit whose angles are all multiples of π/2.
pub fn int_adjoint(c: &Circuit) -> Option<IntMatrix> {
    let d = 2 * c.n;
    let mut o = IntMatrix::identity(d);
    for g in &c.gates {
        let q = g.angle / std::f64::consts::FRAC_PI_2;
        if (q - q.round()).abs() > 1e-9 {
            return None;
        }
        let theta = q.round() * std::f64::consts::FRAC_PI_2;
        let block = IntMatrix::from_f64(&gate_adjoint(&Gate::new(g.kind, g.site, theta), c.n), 1e-9)?;
        o = o.mul(&block);
    }
    Some(o)
}

/// Symmetry flags of a circuit's spinor unitary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Symmetries {
    pub parity_preserved: bool,
    pub number_preserved: bool,
}

/// Commutation with `Z^{⊗n}` and `Σ_q (1 − Z_q)/2`, both diagonal in the
/// computational basis, so `[U, D] = 0` iff `U_ij (d_i − d_j) = 0`.
pub fn check_symmetries(c: &Circuit, tol: f64) -> Result<Symmetries> {
    let u = circuit_unitary(c)?;
    let dim = u.nrows();
    let mut parity = true;
    let mut number = true;
    for i in 0..dim {
        for j in 0..dim {
            let x = u[(i, j)].norm();
            if x <= tol {
                continue;
            }
            let (ni, nj) = (i.count_ones(), j.count_ones());
            if ni % 2 != nj % 2 {
                parity = false;
            }
            if ni != nj {
                number = false;
            }
        }
    }
    Ok(Symmetries { parity_preserved: parity, number_preserved: number })
}

/// `|Tr U|²` from the adjoint alone: `det(I + O)`.
pub fn trace_abs2(o: &OrthoMatrix) -> f64 {
    let d = o.nrows();
    (o + DMatrix::<f64>::identity(d, d)).lu().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit_model::Gate;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn max_diff(a: &OrthoMatrix, b: &OrthoMatrix) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn majorana_strings() {
        assert_eq!(majorana(1, 3).letters, vec!['X', 'I', 'I']);
        assert_eq!(majorana(4, 3).letters, vec!['Z', 'Y', 'I']);
        let n = 3;
        let cs: Vec<_> = (1..=2 * n).map(|l| majorana(l, n).to_dense()).collect();
        for j in 0..2 * n {
            for k in 0..2 * n {
                let ac = &cs[j] * &cs[k] + &cs[k] * &cs[j];
                let want: UnitaryMatrix =
                    DMatrix::identity(8, 8) * Complex64::new(if j == k { 2.0 } else { 0.0 }, 0.0);
                assert!((ac - want).iter().all(|z| z.norm() < 1e-15));
            }
        }
    }

    #[test]
    fn gz_quarter_turn() {
        let o = gate_adjoint(&Gate::z(1, FRAC_PI_2), 1);
        let want = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(max_diff(&o, &want) < 1e-15);
    }

    #[test]
    fn empty_is_identity() {
        let c = Circuit::empty(3);
        assert_eq!(adjoint_matrix(&c), DMatrix::identity(6, 6));
        assert!(check_adjoint_consistency(&c, 1e-12).unwrap());
    }

    #[test]
    fn swapped_rows_fail_the_check() {
        let c = Circuit::new(2, vec![Gate::xx(1, 0.3), Gate::z(2, 1.1)]).unwrap();
        let mut o = adjoint_matrix(&c);
        o.swap_rows(0, 2);
        assert!(!check_adjoint_against(&c, &o, 1e-9).unwrap());
    }

    #[test]
    fn every_kind_matches_conjugation() {
        let n = 3;
        for g in [Gate::z(2, 0.7), Gate::xx(2, 1.3), Gate::xyyx(1, 2.1), Gate::global_z(0.4)] {
            let c = Circuit::new(n, vec![g]).unwrap();
            let o = adjoint_by_conjugation(&circuit_unitary(&c).unwrap(), n);
            assert!(max_diff(&o, &adjoint_matrix(&c)) < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn symmetries() {
        let c = Circuit::new(2, vec![Gate::xx(1, 0.3)]).unwrap();
        let s = check_symmetries(&c, 1e-12).unwrap();
        assert!(s.parity_preserved && !s.number_preserved);
        let c = Circuit::new(3, vec![Gate::xyyx(1, 0.3), Gate::z(3, 1.0), Gate::global_z(0.2)]).unwrap();
        let s = check_symmetries(&c, 1e-12).unwrap();
        assert!(s.parity_preserved && s.number_preserved);
    }

    #[test]
    fn classify_identity_and_signed_perm() {
        let f = classify_matrix(&DMatrix::identity(4, 4), 1e-12);
        assert!(f.orthogonal && f.special && f.symplectic && f.signed_permutation);
        let c = Circuit::new(2, vec![Gate::xx(1, FRAC_PI_2), Gate::z(2, PI)]).unwrap();
        let io = int_adjoint(&c).unwrap();
        assert_eq!(io.signed_permutation_det(), Some(1));
        assert_eq!(io.to_f64(), adjoint_matrix(&c).map(|x| x.round()));
    }

    #[test]
    fn trace_formula_matches_dense() {
        let c = Circuit::new(
            3,
            vec![Gate::z(1, 0.3), Gate::xx(1, 1.9), Gate::xyyx(2, 0.8), Gate::z(3, 2.5), Gate::xx(2, 4.0)],
        )
        .unwrap();
        let tr = circuit_unitary(&c).unwrap().trace().norm_sqr();
        assert!((trace_abs2(&adjoint_matrix(&c)) - tr).abs() < 1e-10);
    }

    fn arb_circuit(n: usize) -> impl Strategy<Value = Circuit> {
        let gate = (0u8..4, 1usize..=n, 0.0f64..12.0).prop_map(move |(k, q, a)| match k {
            0 => Gate::z(q, a),
            1 => Gate::xx(q.min(n - 1), a),
            2 => Gate::xyyx(q.min(n - 1), a),
            _ => Gate::global_z(a),
        });
        proptest::collection::vec(gate, 0..30).prop_map(move |gates| Circuit { n, gates })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn adjoint_is_homomorphic_and_consistent(a in arb_circuit(3), b in arb_circuit(3)) {
            let oab = adjoint_matrix(&a.then(&b));
            prop_assert!(max_diff(&oab, &(adjoint_matrix(&a) * adjoint_matrix(&b))) < 1e-10);
            prop_assert!(check_adjoint_consistency(&a, 1e-9).unwrap());
            let f = classify_matrix(&oab, 1e-9);
            prop_assert!(f.orthogonal && f.special);
            let tr = circuit_unitary(&a).unwrap().trace().norm_sqr();
            prop_assert!((trace_abs2(&adjoint_matrix(&a)) - tr).abs() < 1e-8);
        }

        #[test]
        fn double_cover_shares_adjoint(a in arb_circuit(2), idx in 0usize..30) {
            prop_assume!(!a.gates.is_empty());
            let i = idx % a.gates.len();
            let mut b = a.clone();
            b.gates[i] = Gate::new(b.gates[i].kind, b.gates[i].site, b.gates[i].angle + 2.0 * PI);
            prop_assert!(max_diff(&adjoint_matrix(&a), &adjoint_matrix(&b)) < 1e-10);
            let ua = circuit_unitary(&a).unwrap();
            let ub = circuit_unitary(&b).unwrap();
            // XYYX has generator eigenvalues 0, ±2 and is 2π-periodic.
            let sign = match a.gates[i].kind {
                GateKind::XYYX => 1.0,
                GateKind::GlobalZ if a.n % 2 == 0 => 1.0,
                _ => -1.0,
            };
            prop_assert!((ua - ub * Complex64::new(sign, 0.0)).iter().all(|z| z.norm() < 1e-10));
        }
    }
}
