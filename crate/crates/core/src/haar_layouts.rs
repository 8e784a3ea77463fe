//! Ensemble layouts: slot geometry plus one angle law per slot, for the
//! brick-wall and triangular Haar constructions and the naive controls.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::angle_sampling::{AnglePdf, SinPowMethod};
use crate::circuit_model::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::hurwitz_oracle::{AngleTable, UnitaryAngleTable};
use crate::rng::Streams;

/// Sine exponent of active brick-wall slot `(u, v)`.
pub fn f_exponent(n: usize, u: usize, v: usize) -> Result<u32> {
    let (n, u, v) = (n as i64, u as i64, v as i64);
    let f = match u.cmp(&v) {
        std::cmp::Ordering::Greater => (2 * v - 2).min(4 * n - 2 * u - 1),
        std::cmp::Ordering::Less => (4 * n - 2 * v).min(2 * u - 1),
        std::cmp::Ordering::Equal => return Err(Error::Domain(format!("f_n undefined for u = v = {u}"))),
    };
    u32::try_from(f).map_err(|_| Error::Domain(format!("negative exponent at ({u}, {v})")))
}

/// Sine exponent of passive brick-wall slot `(u, v)`.
pub fn g_exponent(n: usize, u: usize, v: usize) -> Result<u32> {
    let (n, u, v) = (n as i64, u as i64, v as i64);
    let g = match u.cmp(&v) {
        std::cmp::Ordering::Greater => (4 * v - 3).min(4 * n - 4 * u - 1),
        std::cmp::Ordering::Less => (4 * n - 4 * v + 1).min(4 * u - 1),
        std::cmp::Ordering::Equal => return Err(Error::Domain(format!("g_n undefined for u = v = {u}"))),
    };
    u32::try_from(g).map_err(|_| Error::Domain(format!("negative exponent at ({u}, {v})")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayoutTag {
    ActiveHaar,
    ActiveHaarTri,
    PassiveHaar,
    PassiveHaarTri,
    NaiveUniformActive,
    NaiveUniformPassive,
}

impl LayoutTag {
    pub const ALL: [LayoutTag; 6] = [
        LayoutTag::ActiveHaar,
        LayoutTag::ActiveHaarTri,
        LayoutTag::PassiveHaar,
        LayoutTag::PassiveHaarTri,
        LayoutTag::NaiveUniformActive,
        LayoutTag::NaiveUniformPassive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LayoutTag::ActiveHaar => "active-haar",
            LayoutTag::ActiveHaarTri => "active-haar-tri",
            LayoutTag::PassiveHaar => "passive-haar",
            LayoutTag::PassiveHaarTri => "passive-haar-tri",
            LayoutTag::NaiveUniformActive => "naive-uniform-active",
            LayoutTag::NaiveUniformPassive => "naive-uniform-passive",
        }
    }

    pub fn is_passive(self) -> bool {
        matches!(self, LayoutTag::PassiveHaar | LayoutTag::PassiveHaarTri | LayoutTag::NaiveUniformPassive)
    }
}

impl fmt::Display for LayoutTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LayoutTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LayoutTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown layout {s:?}")))
    }
}

/// Which free parameter a slot holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    /// Brick-wall XX angle `α_{j,k}`.
    Alpha { j: usize, k: usize },
    /// Brick-wall Z angle `β_{j,k}`.
    Beta { j: usize, k: usize },
    /// Triangular Givens angle, or passive block angle.
    Theta { j: usize, k: usize },
    Phi { j: usize, k: usize },
    Lambda { i: usize },
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Param::Alpha { j, k } => write!(f, "alpha_{j}_{k}"),
            Param::Beta { j, k } => write!(f, "beta_{j}_{k}"),
            Param::Theta { j, k } => write!(f, "theta_{j}_{k}"),
            Param::Phi { j, k } => write!(f, "phi_{j}_{k}"),
            Param::Lambda { i } => write!(f, "lambda_{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayoutSlot {
    pub layer: usize,
    pub position: usize,
    pub kind: GateKind,
    pub site: Option<usize>,
    pub pdf: AnglePdf,
    pub param: Param,
}

impl LayoutSlot {
    pub fn label(&self) -> String {
        self.param.to_string()
    }
}

/// Circuit skeleton in application order; indices point into `slots`.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Gate { slot: usize },
    /// Passive two-qubit block on qubits `(site, site+1)`.
    Block { site: usize, theta: usize, phi: usize, lambda: Option<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub n: usize,
    pub tag: LayoutTag,
    pub slots: Vec<LayoutSlot>,
    pub elements: Vec<Element>,
    /// Layer count, including the global-phase layer of passive layouts.
    pub layers: usize,
}

const FULL: AnglePdf = AnglePdf::FULL_TURN;

fn sinpow_or_uniform(f: u32, uniform: bool) -> AnglePdf {
    if uniform {
        FULL
    } else {
        AnglePdf::SinPow { k: f }
    }
}

impl Layout {
    fn new(n: usize, tag: LayoutTag) -> Self {
        Self { n, tag, slots: Vec::new(), elements: Vec::new(), layers: 0 }
    }

    fn push_gate(&mut self, slot: LayoutSlot) -> usize {
        self.slots.push(slot);
        let i = self.slots.len() - 1;
        self.elements.push(Element::Gate { slot: i });
        i
    }

    fn push_slot(&mut self, slot: LayoutSlot) -> usize {
        self.slots.push(slot);
        self.slots.len() - 1
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.slots.iter().map(|s| s.pdf.exponent()).collect()
    }

    /// Product of per-slot normalization constants.
    pub fn normalizer(&self) -> f64 {
        self.slots.iter().map(|s| s.pdf.normalizer().ln()).sum::<f64>().exp()
    }

    /// Replace every law by the uniform law on `[0, 2π)`.
    fn uniformized(mut self, tag: LayoutTag) -> Self {
        self.tag = tag;
        for s in &mut self.slots {
            s.pdf = FULL;
        }
        self
    }

    /// Build the circuit for given slot values.
    pub fn assemble(&self, values: &[f64]) -> Circuit {
        assert_eq!(values.len(), self.slots.len(), "one value per slot");
        let mut gates = Vec::new();
        for e in &self.elements {
            match *e {
                Element::Gate { slot } => {
                    let s = &self.slots[slot];
                    gates.push(Gate::new(s.kind, s.site, values[slot]));
                }
                Element::Block { site, theta, phi, lambda } => {
                    let (t, p) = (values[theta], values[phi]);
                    let l = lambda.map_or(0.0, |i| values[i]);
                    gates.push(Gate::z(site, (l - p) / 2.0));
                    gates.push(Gate::z(site + 1, (p - l) / 2.0));
                    gates.push(Gate::xyyx(site, t));
                    gates.push(Gate::z(site, (p + l) / 2.0));
                    gates.push(Gate::z(site + 1, -(p + l) / 2.0));
                }
            }
        }
        Circuit { n: self.n, gates }
    }

    /// Draw every slot from one generator, in slot order.
    pub fn sample_circuit<R: Rng + ?Sized>(&self, rng: &mut R) -> Circuit {
        let values: Vec<f64> = self.slots.iter().map(|s| s.pdf.sample(rng)).collect();
        self.assemble(&values)
    }

    /// Slot values for sample `index`; slot `i` draws from stream `(index, i)`.
    pub fn sample_values(&self, streams: &Streams, index: u64, method: SinPowMethod) -> Vec<f64> {
        self.slots
            .iter()
            .enumerate()
            .map(|(i, s)| s.pdf.sample_with(method, &mut streams.rng(index, i as u64)))
            .collect()
    }

    pub fn sample_indexed(&self, streams: &Streams, index: u64) -> Circuit {
        self.assemble(&self.sample_values(streams, index, SinPowMethod::Exact))
    }

    /// `layer,position,kind,site,pdf-family,exponent` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,position,kind,site,pdf-family,exponent\n");
        for s in &self.slots {
            let site = s.site.map(|q| q.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.layer,
                s.position,
                s.kind,
                site,
                s.pdf.family(),
                s.pdf.exponent()
            ));
        }
        out
    }
}

/// Alternating XX / Z layers, first layer XX.
pub fn build_active_brickwall(n: usize) -> Layout {
    assert!(n >= 1);
    let mut l = Layout::new(n, LayoutTag::ActiveHaar);
    for k in 1..=n {
        let v = 2 * k - 1;
        for j in 1..n {
            let f = f_exponent(n, 2 * j, v).expect("valid slot");
            l.push_gate(LayoutSlot {
                layer: v,
                position: j,
                kind: GateKind::XX,
                site: Some(j),
                pdf: sinpow_or_uniform(f, v == 1),
                param: Param::Alpha { j, k },
            });
        }
        let v = 2 * k;
        for j in 1..=n {
            let f = f_exponent(n, 2 * j - 1, v).expect("valid slot");
            l.push_gate(LayoutSlot {
                layer: v,
                position: j,
                kind: GateKind::Z,
                site: Some(j),
                pdf: sinpow_or_uniform(f, v == 2 * n),
                param: Param::Beta { j, k },
            });
        }
    }
    l.layers = 2 * n;
    l
}

/// Ladders `C_1 … C_{2n-1}`; inside `C_m` the gate `R_m` acts first and
/// `R_1` last. Odd `j` maps to `GZ((j+1)/2)`, even `j` to `GXX(j/2)`.
pub fn build_active_triangular(n: usize) -> Layout {
    assert!(n >= 1);
    let mut l = Layout::new(n, LayoutTag::ActiveHaarTri);
    for m in 1..2 * n {
        for (pos, j) in (1..=m).rev().enumerate() {
            let (kind, site) = if j % 2 == 1 { (GateKind::Z, j.div_ceil(2)) } else { (GateKind::XX, j / 2) };
            let pdf = if j == 1 { FULL } else { AnglePdf::SinPow { k: j as u32 - 1 } };
            l.push_gate(LayoutSlot {
                layer: m,
                position: pos + 1,
                kind,
                site: Some(site),
                pdf,
                param: Param::Theta { j, k: m + 1 },
            });
        }
    }
    l.layers = 2 * n - 1;
    l
}

fn push_block(l: &mut Layout, layer: usize, position: usize, site: usize, theta_pdf: AnglePdf, key: (usize, usize), lambda: Option<usize>) {
    let (j, k) = key;
    let theta = l.push_slot(LayoutSlot {
        layer,
        position,
        kind: GateKind::XYYX,
        site: Some(site),
        pdf: theta_pdf,
        param: Param::Theta { j, k },
    });
    let phi = l.push_slot(LayoutSlot {
        layer,
        position,
        kind: GateKind::Z,
        site: Some(site),
        pdf: FULL,
        param: Param::Phi { j, k },
    });
    let lambda = lambda.map(|i| {
        l.push_slot(LayoutSlot {
            layer,
            position,
            kind: GateKind::Z,
            site: Some(site),
            pdf: FULL,
            param: Param::Lambda { i },
        })
    });
    l.elements.push(Element::Block { site, theta, phi, lambda });
}

fn push_global(l: &mut Layout, layer: usize, i: usize) {
    l.push_gate(LayoutSlot {
        layer,
        position: 1,
        kind: GateKind::GlobalZ,
        site: None,
        pdf: FULL,
        param: Param::Lambda { i },
    });
}

/// Layers `L̃_1 … L̃_n` of passive blocks, then a global phase layer.
/// Odd layers hold blocks on `(2j, 2j+1)`, even layers on `(2j-1, 2j)`.
/// The phase `λ_q` rides on the layer-1 block at even `q` and on the
/// last-even-layer block at odd `q`; `λ_n` is global.
pub fn build_passive_brickwall(n: usize) -> Layout {
    assert!(n >= 1);
    let mut l = Layout::new(n, LayoutTag::PassiveHaar);
    let last_even = 2 * (n / 2);
    for v in 1..=n {
        let (first, count) = if v % 2 == 0 { (1, n / 2) } else { (2, (n - 1) / 2) };
        for j in 1..=count {
            let q = first + 2 * (j - 1);
            let g = g_exponent(n, q, v).expect("valid slot");
            let lambda = if (v == 1 && q % 2 == 0) || (v == last_even && q % 2 == 1) { Some(q) } else { None };
            push_block(&mut l, v, j, q, AnglePdf::CosSinPow { g }, (j, v), lambda);
        }
    }
    push_global(&mut l, n + 1, n);
    l.layers = n + 1;
    l
}

/// Ladders in application order `m = n-1, …, 1`; ladder `m` applies
/// `R̃_1 … R̃_m` with `λ_{m+1}` on `R̃_m`, and the global phase `λ_1` comes last.
pub fn build_passive_triangular(n: usize) -> Layout {
    assert!(n >= 1);
    let mut l = Layout::new(n, LayoutTag::PassiveHaarTri);
    for (layer, m) in (1..n).rev().enumerate() {
        for j in 1..=m {
            let lambda = if j == m { Some(m + 1) } else { None };
            let g = 2 * j as u32 - 1;
            push_block(&mut l, layer + 1, j, j, AnglePdf::CosSinPow { g }, (j, m + 1), lambda);
        }
    }
    push_global(&mut l, n, 1);
    l.layers = n;
    l
}

pub fn build_layout(tag: LayoutTag, n: usize) -> Layout {
    match tag {
        LayoutTag::ActiveHaar => build_active_brickwall(n),
        LayoutTag::ActiveHaarTri => build_active_triangular(n),
        LayoutTag::PassiveHaar => build_passive_brickwall(n),
        LayoutTag::PassiveHaarTri => build_passive_triangular(n),
        LayoutTag::NaiveUniformActive => build_active_brickwall(n).uniformized(tag),
        LayoutTag::NaiveUniformPassive => build_passive_brickwall(n).uniformized(tag),
    }
}

/// `((2π)^{2n-1} Π_{s=3}^{2n} √π^{s-2}/Γ(s/2))^{-1}`
pub fn active_global_normalizer(n: usize) -> f64 {
    let mut ln = (2 * n - 1) as f64 * (2.0 * PI).ln();
    for s in 3..=2 * n {
        let s = s as f64;
        ln += (s - 2.0) * PI.sqrt().ln() - ln_gamma(s / 2.0);
    }
    (-ln).exp()
}

/// `(√(2π)^{n(n+1)} Π_{s=1}^{n-1} (2s)^{s-n})^{-1}`
pub fn passive_global_normalizer(n: usize) -> f64 {
    let mut ln = (n * (n + 1)) as f64 * (2.0 * PI).sqrt().ln();
    for s in 1..n {
        ln += (s as f64 - n as f64) * (2.0 * s as f64).ln();
    }
    (-ln).exp()
}

/// Triangular circuit for a table of `θ_{j,k}` (`d = 2n`).
pub fn active_triangular_circuit(n: usize, table: &AngleTable) -> Circuit {
    assert_eq!(table.d, 2 * n);
    let l = build_active_triangular(n);
    let values: Vec<f64> = l
        .slots
        .iter()
        .map(|s| match s.param {
            Param::Theta { j, k } => table.get(j, k),
            _ => unreachable!(),
        })
        .collect();
    l.assemble(&values)
}

/// Passive triangular circuit for a unitary angle table.
pub fn passive_triangular_circuit(n: usize, table: &UnitaryAngleTable) -> Circuit {
    assert_eq!(table.n, n);
    let l = build_passive_triangular(n);
    let values: Vec<f64> = l
        .slots
        .iter()
        .map(|s| match s.param {
            Param::Theta { j, k } => table.theta(j, k),
            Param::Phi { j, k } => table.phi(j, k),
            Param::Lambda { i } => table.lambda(i),
            _ => unreachable!(),
        })
        .collect();
    l.assemble(&values)
}
