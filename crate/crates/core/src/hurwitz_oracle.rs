//! Matrix-level Haar oracle: Ginibre sampling with QR orthonormalization,
//! and Givens ("Hurwitz") compilation of SO(d) and U(n) into angle tables.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit_model::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::haar_layouts::{active_triangular_circuit, passive_triangular_circuit};
use crate::representations::{gate_adjoint, OrthoMatrix, UnitaryMatrix};

const TWO_PI: f64 = 2.0 * PI;

/// Reduce into `[0, 2π)`.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

fn pair_index(j: usize, k: usize) -> usize {
    debug_assert!(1 <= j && j < k);
    (k - 1) * (k - 2) / 2 + (j - 1)
}

/// Givens rotation `R_j(θ)`: `[[c, s], [-s, c]]` on coordinates `(j, j+1)`.
pub fn givens(d: usize, j: usize, theta: f64) -> OrthoMatrix {
    let mut g = DMatrix::identity(d, d);
    let (s, c) = theta.sin_cos();
    g[(j - 1, j - 1)] = c;
    g[(j - 1, j)] = s;
    g[(j, j - 1)] = -s;
    g[(j, j)] = c;
    g
}

/// `R̃_j(θ, φ, λ) = [[e^{iλ} c, e^{iφ} s], [-e^{-iφ} s, e^{-iλ} c]]` on `(j, j+1)`.
pub fn givens_u(n: usize, j: usize, theta: f64, phi: f64, lambda: f64) -> UnitaryMatrix {
    let mut g = DMatrix::identity(n, n);
    let (s, c) = theta.sin_cos();
    g[(j - 1, j - 1)] = Complex64::from_polar(c, lambda);
    g[(j - 1, j)] = Complex64::from_polar(s, phi);
    g[(j, j - 1)] = -Complex64::from_polar(s, -phi);
    g[(j, j)] = Complex64::from_polar(c, -lambda);
    g
}

/// `θ_{j,k}` for `1 ≤ j < k ≤ d`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleTable {
    pub d: usize,
    theta: Vec<f64>,
}

impl AngleTable {
    pub fn zeros(d: usize) -> Self {
        Self { d, theta: vec![0.0; d * (d - 1) / 2] }
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.theta[pair_index(j, k)]
    }

    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        self.theta[pair_index(j, k)] = v;
    }

    /// `(j, k, θ)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (2..=self.d).flat_map(move |k| (1..k).map(move |j| (j, k, self.get(j, k))))
    }

    /// `θ_{1,k} ∈ [0, 2π)` and `θ_{j,k} ∈ [0, π]` otherwise.
    pub fn in_range(&self) -> bool {
        self.iter().all(|(j, _, t)| if j == 1 { (0.0..TWO_PI).contains(&t) } else { (0.0..=PI).contains(&t) })
    }

    /// `O_1 O_2 ⋯ O_{d-1}` with `O_m = R_m(θ_{m,m+1}) ⋯ R_1(θ_{1,m+1})`.
    pub fn rebuild(&self) -> OrthoMatrix {
        let d = self.d;
        let mut o = DMatrix::identity(d, d);
        for m in 1..d {
            for j in (1..=m).rev() {
                o *= givens(d, j, self.get(j, m + 1));
            }
        }
        o
    }
}

/// `θ_{j,k}, φ_{j,k}` for `1 ≤ j < k ≤ n` and row phases `λ_1..λ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryAngleTable {
    pub n: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
    lambda: Vec<f64>,
}

impl UnitaryAngleTable {
    pub fn zeros(n: usize) -> Self {
        let m = n * (n - 1) / 2;
        Self { n, theta: vec![0.0; m], phi: vec![0.0; m], lambda: vec![0.0; n] }
    }

    pub fn theta(&self, j: usize, k: usize) -> f64 {
        self.theta[pair_index(j, k)]
    }

    pub fn phi(&self, j: usize, k: usize) -> f64 {
        self.phi[pair_index(j, k)]
    }

    /// 1-based row phase.
    pub fn lambda(&self, k: usize) -> f64 {
        self.lambda[k - 1]
    }

    pub fn set(&mut self, j: usize, k: usize, theta: f64, phi: f64) {
        let i = pair_index(j, k);
        self.theta[i] = theta;
        self.phi[i] = phi;
    }

    pub fn set_lambda(&mut self, k: usize, v: f64) {
        self.lambda[k - 1] = v;
    }

    pub fn in_range(&self) -> bool {
        self.theta.iter().all(|t| (0.0..=PI / 2.0).contains(t))
            && self.phi.iter().chain(&self.lambda).all(|x| (0.0..TWO_PI).contains(x))
    }

    /// `e^{iλ_1} U_1 ⋯ U_{n-1}` with
    /// `U_m = R̃_m(θ_{m,m+1}, φ_{m,m+1}, λ_{m+1}) R̃_{m-1}(.., 0) ⋯ R̃_1(θ_{1,m+1}, φ_{1,m+1}, 0)`.
    pub fn rebuild(&self) -> UnitaryMatrix {
        let n = self.n;
        let mut v: UnitaryMatrix = DMatrix::identity(n, n) * Complex64::from_polar(1.0, self.lambda(1));
        for m in 1..n {
            for j in (1..=m).rev() {
                let lam = if j == m { self.lambda(m + 1) } else { 0.0 };
                v *= givens_u(n, j, self.theta(j, m + 1), self.phi(j, m + 1), lam);
            }
        }
        v
    }
}

/// Haar-random element of SO(d): Gaussian matrix, Householder QR with the
/// diagonal of R made positive, then a column swap if the determinant is -1.
pub fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> OrthoMatrix {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..d {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    if d >= 2 && q.determinant() < 0.0 {
        q.swap_columns(0, 1);
    }
    q
}

/// Haar-random element of U(n) from the complex Ginibre ensemble.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..n {
        let p = r[(c, c)];
        let ph = if p.norm() > 0.0 { p / p.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..n {
            q[(row, c)] *= ph;
        }
    }
    q
}

/// Zero row `k` of `w` against columns `1..k-1`. `flip` selects the sign at
/// the first free step. Returns the angles and the resulting `(k,k)` entry.
fn eliminate_row(w: &OrthoMatrix, k: usize, flip: bool) -> (Vec<f64>, OrthoMatrix) {
    let mut w = w.clone();
    let mut angles = Vec::with_capacity(k - 1);
    let mut free_used = false;
    let row = k - 1;
    for j in 1..k {
        let (a, b) = (w[(row, j - 1)], w[(row, j)]);
        let r = a.hypot(b);
        let theta = if r == 0.0 {
            0.0
        } else {
            let sigma = if j == 1 || a == 0.0 {
                // Free sign: θ_{1,k} has the full circle, and a zero carried
                // value leaves θ ∈ {0, π}.
                if free_used {
                    if j == 1 { 1.0 } else { b.signum() }
                } else {
                    free_used = true;
                    let base = if j == 1 { 1.0 } else { b.signum() };
                    if flip { -base } else { base }
                }
            } else {
                -a.signum()
            };
            let (c, s) = (sigma * b / r, -sigma * a / r + 0.0);
            let t = s.atan2(c);
            if j == 1 {
                wrap(t)
            } else {
                t.clamp(0.0, PI)
            }
        };
        angles.push(theta);
        let (s, c) = theta.sin_cos();
        for rr in 0..w.nrows() {
            let (x, y) = (w[(rr, j - 1)], w[(rr, j)]);
            w[(rr, j - 1)] = x * c + y * s;
            w[(rr, j)] = -x * s + y * c;
        }
        w[(row, j - 1)] = 0.0;
    }
    (angles, w)
}

fn check_so(o: &OrthoMatrix, tol: f64) -> Result<()> {
    let d = o.nrows();
    if !o.is_square() || d < 2 {
        return Err(Error::Compile("expected a square matrix of size ≥ 2".into()));
    }
    let e = (o.transpose() * o - DMatrix::<f64>::identity(d, d)).amax();
    if e > tol {
        return Err(Error::Compile(format!("not orthogonal (error {e:.2e})")));
    }
    if (o.determinant() - 1.0).abs() > tol {
        return Err(Error::Compile("determinant is not +1".into()));
    }
    Ok(())
}

/// Angle table with `table.rebuild() == o`.
pub fn compile_so(o: &OrthoMatrix) -> Result<AngleTable> {
    check_so(o, 1e-8)?;
    let d = o.nrows();
    let mut table = AngleTable::zeros(d);
    let mut w = o.clone();
    for k in (2..=d).rev() {
        let (angles, next) = {
            let (a0, w0) = eliminate_row(&w, k, false);
            if w0[(k - 1, k - 1)] > 0.0 {
                (a0, w0)
            } else {
                eliminate_row(&w, k, true)
            }
        };
        if next[(k - 1, k - 1)] <= 0.0 {
            return Err(Error::Compile(format!("row {k} could not be reduced to +1")));
        }
        for (j, t) in angles.into_iter().enumerate() {
            table.set(j + 1, k, t);
        }
        w = next;
    }
    Ok(table)
}

fn arg0(z: Complex64) -> f64 {
    if z == Complex64::new(0.0, 0.0) {
        0.0
    } else {
        z.arg()
    }
}

/// Angle table with `table.rebuild() == u`; the global phase is fixed by
/// `λ_1 = arg(det u)/n` with `arg ∈ [0, 2π)`.
pub fn compile_u(u: &UnitaryMatrix) -> Result<UnitaryAngleTable> {
    let n = u.nrows();
    if !u.is_square() || n == 0 {
        return Err(Error::Compile("expected a non-empty square matrix".into()));
    }
    let e = (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if e > 1e-8 {
        return Err(Error::Compile(format!("not unitary (error {e:.2e})")));
    }
    let mut table = UnitaryAngleTable::zeros(n);
    // An argument a hair below 2π is the identity phase, not a third of a turn.
    let a = wrap(arg0(u.determinant()));
    let lam1 = if TWO_PI - a < 1e-9 { 0.0 } else { a / n as f64 };
    table.set_lambda(1, lam1);
    let mut w = u * Complex64::from_polar(1.0, -lam1);
    for k in (2..=n).rev() {
        let row = k - 1;
        for j in 1..k {
            let (a, v) = (w[(row, j - 1)], w[(row, j)]);
            let lambda = if j == k - 1 { wrap(-arg0(v)) } else { 0.0 };
            let (theta, phi) = if a.norm() == 0.0 {
                (0.0, 0.0)
            } else {
                (a.norm().atan2(v.norm()), wrap(arg0(v) - arg0(a) - PI + lambda))
            };
            if j == k - 1 {
                table.set_lambda(k, lambda);
            }
            table.set(j, k, theta, phi);
            // W ← W · R̃_j(θ, φ, λ)†
            let gd = givens_u(2, 1, theta, phi, lambda).adjoint();
            for rr in 0..n {
                let (x, y) = (w[(rr, j - 1)], w[(rr, j)]);
                w[(rr, j - 1)] = x * gd[(0, 0)] + y * gd[(1, 0)];
                w[(rr, j)] = x * gd[(0, 1)] + y * gd[(1, 1)];
            }
        }
    }
    Ok(table)
}

/// `Re U ⊗ 1 + Im U ⊗ [[0, 1], [-1, 0]]`.
pub fn embed_u_to_so(u: &UnitaryMatrix) -> OrthoMatrix {
    let n = u.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = u[(r / 2, c / 2)];
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => z.im,
            _ => -z.im,
        }
    })
}

/// `S = diag(1, -1, 1, -1, ...)`; the triangular circuit's adjoint is `S H S`.
pub fn alternating_sign(d: usize) -> OrthoMatrix {
    DMatrix::from_fn(d, d, |r, c| if r != c { 0.0 } else if r % 2 == 0 { 1.0 } else { -1.0 })
}

/// Triangular circuit whose adjoint equals `o ∈ SO(2n)`.
pub fn circuit_for_so(o: &OrthoMatrix) -> Result<Circuit> {
    let d = o.nrows();
    if !d.is_multiple_of(2) {
        return Err(Error::Compile("odd dimension has no FLO circuit".into()));
    }
    let s = alternating_sign(d);
    let table = compile_so(&(&s * o * &s))?;
    Ok(active_triangular_circuit(d / 2, &table))
}

/// Passive triangular circuit whose adjoint equals `embed_u_to_so(u)`.
pub fn circuit_for_u(u: &UnitaryMatrix) -> Result<Circuit> {
    let table = compile_u(&u.adjoint())?;
    Ok(passive_triangular_circuit(u.nrows(), &table))
}

/// Haar orthogonal matrix compiled into a triangular circuit.
pub fn oracle_sample_active_circuit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Circuit {
    let o = haar_orthogonal(2 * n, rng);
    circuit_for_so(&o).expect("Haar sample compiles")
}

/// Haar unitary compiled into a passive triangular circuit.
pub fn oracle_sample_passive_circuit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Circuit {
    let u = haar_unitary(n, rng);
    circuit_for_u(&u).expect("Haar sample compiles")
}

/// The two-qubit `GXYYX(θ)` rewritten as a `GZ`/`GXX` ladder.
pub fn decompose_rxyyx(theta: f64) -> Circuit {
    let o = gate_adjoint(&Gate::xyyx(1, theta), 2);
    circuit_for_so(&o).expect("block is in SO(4)")
}
