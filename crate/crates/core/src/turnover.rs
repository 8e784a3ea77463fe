//! Three-gate turnover `A-B-A → B-A-B` and the compression of the active
//! triangular circuit into the brick-wall layout.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit_model::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::haar_layouts::build_active_triangular;
use crate::hurwitz_oracle::{compile_u, givens, givens_u, wrap};
use crate::representations::{OrthoMatrix, UnitaryMatrix};

/// Below this `sin b` the middle rotation is treated as degenerate.
const DEGENERATE: f64 = 1e-12;

/// Which generator sits on the outside of the triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outer {
    /// `R_j(α) R_{j+1}(β) R_j(γ)`.
    Low,
    /// `R_{j+1}(α) R_j(β) R_{j+1}(γ)`.
    High,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub outer: Outer,
}

impl Triple {
    pub fn new(alpha: f64, beta: f64, gamma: f64, outer: Outer) -> Self {
        Triple { alpha, beta, gamma, outer }
    }

    /// 3×3 product in written order.
    pub fn matrix(&self) -> OrthoMatrix {
        let (o, i) = match self.outer {
            Outer::Low => (1, 2),
            Outer::High => (2, 1),
        };
        givens(3, o, self.alpha) * givens(3, i, self.beta) * givens(3, o, self.gamma)
    }

    /// The same product with the roles of the generators swapped.
    pub fn turnover(&self) -> Triple {
        let (a, b, c) = match self.outer {
            Outer::Low => turnover_so(self.alpha, self.beta, self.gamma),
            Outer::High => turnover_so_high(self.alpha, self.beta, self.gamma),
        };
        let outer = match self.outer {
            Outer::Low => Outer::High,
            Outer::High => Outer::Low,
        };
        Triple::new(a, b, c, outer)
    }
}

/// `R_1(α) R_2(β) R_1(γ) = R_2(a) R_1(b) R_2(c)` with `b ∈ [0, π]` and
/// `a, c ∈ [0, 2π)`. When `sin b = 0` the gauge is `c = 0`.
pub fn turnover_so(alpha: f64, beta: f64, gamma: f64) -> (f64, f64, f64) {
    let m = givens(3, 1, alpha) * givens(3, 2, beta) * givens(3, 1, gamma);
    let sb = m[(0, 1)].hypot(m[(0, 2)]);
    let b = sb.atan2(m[(0, 0)]);
    if sb < DEGENERATE {
        let b = 0.0f64.atan2(m[(0, 0)]);
        let rest = m * givens(3, 1, b).transpose();
        return (wrap(rest[(1, 2)].atan2(rest[(1, 1)])), b, 0.0);
    }
    let c = m[(0, 2)].atan2(m[(0, 1)]);
    let a = m[(2, 0)].atan2(-m[(1, 0)]);
    (wrap(a), b, wrap(c))
}

/// `R_2(α) R_1(β) R_2(γ) = R_1(a) R_2(b) R_1(c)`, same ranges and gauge.
pub fn turnover_so_high(alpha: f64, beta: f64, gamma: f64) -> (f64, f64, f64) {
    let m = givens(3, 2, alpha) * givens(3, 1, beta) * givens(3, 2, gamma);
    let sb = m[(0, 2)].hypot(m[(1, 2)]);
    let b = sb.atan2(m[(2, 2)]);
    if sb < DEGENERATE {
        let b = 0.0f64.atan2(m[(2, 2)]);
        let rest = m * givens(3, 2, b).transpose();
        return (wrap(rest[(0, 1)].atan2(rest[(0, 0)])), b, 0.0);
    }
    let a = m[(0, 2)].atan2(m[(1, 2)]);
    let c = m[(2, 0)].atan2(-m[(2, 1)]);
    (wrap(a), b, wrap(c))
}

/// Parameters `(θ, φ, λ)` of one `R̃` block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockParams {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl BlockParams {
    pub fn new(theta: f64, phi: f64, lambda: f64) -> Self {
        BlockParams { theta, phi, lambda }
    }
}

fn block(j: usize, p: BlockParams) -> UnitaryMatrix {
    givens_u(3, j, p.theta, p.phi, p.lambda)
}

/// `R̃_1(p_1) R̃_2(p_2) R̃_1(p_3)` as a 3×3 unitary.
pub fn low_outer_product(p: &[BlockParams; 3]) -> UnitaryMatrix {
    block(1, p[0]) * block(2, p[1]) * block(1, p[2])
}

/// `R̃_2(p_1) R̃_1(p_2) R̃_2(p_3)` as a 3×3 unitary.
pub fn high_outer_product(p: &[BlockParams; 3]) -> UnitaryMatrix {
    block(2, p[0]) * block(1, p[1]) * block(2, p[2])
}

/// Rewrite `R̃_1 R̃_2 R̃_1` as `R̃_2 R̃_1 R̃_2` (third block has `λ = 0`).
///
/// Conjugating by `M = antidiag(1, -1, 1)` swaps the two generators and
/// negates phases, so compiling `M V M` in the standard order and mapping
/// back gives the swapped order.
pub fn turnover_u(p: &[BlockParams; 3]) -> Result<[BlockParams; 3]> {
    let v = low_outer_product(p);
    let mut m = DMatrix::<Complex64>::zeros(3, 3);
    m[(0, 2)] = Complex64::new(1.0, 0.0);
    m[(1, 1)] = Complex64::new(-1.0, 0.0);
    m[(2, 0)] = Complex64::new(1.0, 0.0);
    let t = compile_u(&(&m * v * &m))?;
    let phase = t.lambda(1);
    if phase.min(2.0 * PI - phase) > 1e-9 {
        return Err(Error::Inconsistent(format!("turnover_u left a global phase {phase:.3e}")));
    }
    let flip = |theta: f64, phi: f64, lambda: f64| BlockParams::new(theta, wrap(-phi), wrap(-lambda));
    Ok([
        flip(t.theta(1, 2), t.phi(1, 2), t.lambda(2)),
        flip(t.theta(2, 3), t.phi(2, 3), t.lambda(3)),
        flip(t.theta(1, 3), t.phi(1, 3), 0.0),
    ])
}

/// Result of compressing one triangular circuit.
#[derive(Clone, Debug)]
pub struct Compression {
    /// Brick-wall circuit, gates in layout slot order.
    pub circuit: Circuit,
    /// Sine exponent carried by each output gate.
    pub exponents: Vec<u32>,
    pub layers: Vec<usize>,
    pub turnovers: usize,
}

#[derive(Clone, Copy, Debug)]
struct WordGate {
    generator: usize,
    angle: f64,
    exponent: u32,
    ladder: usize,
    moved: bool,
}

fn generator_of(g: &Gate) -> Option<usize> {
    match (g.kind, g.site) {
        (GateKind::Z, Some(q)) => Some(2 * q - 1),
        (GateKind::XX, Some(q)) => Some(2 * q),
        _ => None,
    }
}

fn gate_of(generator: usize, angle: f64) -> Gate {
    if generator % 2 == 1 {
        Gate::z(generator.div_ceil(2), angle)
    } else {
        Gate::xx(generator / 2, angle)
    }
}

/// Rewrite the word `(g, h, g)` at `i` as `(h, g, h)`. The per-gate adjoint
/// is `R_j(-θ) = S R_j(θ) S`, so the written-order identity carries over to
/// application order unchanged.
fn turn(word: &mut [WordGate], i: usize) -> Result<()> {
    let (x, y, z) = (word[i], word[i + 1], word[i + 2]);
    let (r, rp) = (x.exponent, z.exponent);
    if y.exponent != r + rp + 1 {
        return Err(Error::Inconsistent(format!(
            "turnover at generators ({}, {}, {}) with exponents ({r}, {}, {rp}) violates r + r' + 1",
            x.generator, y.generator, z.generator, y.exponent
        )));
    }
    let outer = if y.generator == x.generator + 1 { Outer::Low } else { Outer::High };
    let t = Triple::new(x.angle, y.angle, z.angle, outer).turnover();
    word[i] = WordGate { generator: y.generator, angle: t.alpha, exponent: rp, ..z };
    word[i + 1] = WordGate { generator: x.generator, angle: t.beta, exponent: y.exponent, ..y };
    word[i + 2] = WordGate { generator: y.generator, angle: t.gamma, exponent: r, ..x };
    Ok(())
}

/// Push the gate at `i` towards the end of the word until it reaches the end
/// or a gate that has already been moved. Returns the number of turnovers.
fn push_right(word: &mut [WordGate], mut i: usize) -> Result<usize> {
    let mut turns = 0;
    while i + 1 < word.len() && !word[i + 1].moved {
        let (g, h) = (word[i].generator, word[i + 1].generator);
        if g.abs_diff(h) >= 2 {
            word.swap(i, i + 1);
            i += 1;
        } else if g.abs_diff(h) == 1 && i + 2 < word.len() && !word[i + 2].moved && word[i + 2].generator == g {
            turn(word, i)?;
            turns += 1;
            i += 2;
        } else {
            return Err(Error::Inconsistent(format!(
                "gate on generator {g} blocked by generator {h} at word position {i}"
            )));
        }
    }
    word[i].moved = true;
    Ok(turns)
}

/// Compress a circuit with the active triangular geometry into the
/// brick-wall geometry by turning over every odd anti-diagonal except the
/// last, each from its last gate.
pub fn compress_active_triangular(c: &Circuit) -> Result<Compression> {
    let n = c.n;
    let skeleton = build_active_triangular(n);
    if c.gates.len() != skeleton.slots.len() {
        return Err(Error::Inconsistent(format!(
            "expected {} gates for the n = {n} triangle, got {}",
            skeleton.slots.len(),
            c.gates.len()
        )));
    }
    let mut word = Vec::with_capacity(c.gates.len());
    for (g, s) in c.gates.iter().zip(&skeleton.slots) {
        if g.kind != s.kind || g.site != s.site {
            return Err(Error::Inconsistent(format!("gate {:?} does not match triangular slot {}", g.kind, s.label())));
        }
        let generator = generator_of(g).expect("active gate");
        word.push(WordGate { generator, angle: g.angle, exponent: generator as u32 - 1, ladder: s.layer, moved: false });
    }

    let mut turnovers = 0;
    for k in (1..2 * n - 1).step_by(2) {
        while let Some(i) = word.iter().rposition(|w| w.ladder == k && !w.moved) {
            turnovers += push_right(&mut word, i)?;
        }
    }

    // Earliest layer each gate fits in; neighbours and equals conflict.
    let mut layer = vec![0usize; word.len()];
    for i in 0..word.len() {
        layer[i] = 1 + (0..i)
            .filter(|&p| word[p].generator.abs_diff(word[i].generator) <= 1)
            .map(|p| layer[p])
            .max()
            .unwrap_or(0);
    }
    // Brick-wall layers start with XX; a lone Z layer (n = 1) is layer 2.
    if word.iter().all(|w| w.generator % 2 == 1) {
        layer.iter_mut().for_each(|l| *l *= 2);
    }
    let mut order: Vec<usize> = (0..word.len()).collect();
    order.sort_by_key(|&i| (layer[i], word[i].generator));

    let gates = order.iter().map(|&i| gate_of(word[i].generator, word[i].angle)).collect();
    Ok(Compression {
        circuit: Circuit::new(n, gates)?,
        exponents: order.iter().map(|&i| word[i].exponent).collect(),
        layers: order.iter().map(|&i| layer[i]).collect(),
        turnovers,
    })
}
