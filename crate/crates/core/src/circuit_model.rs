//! Circuit intermediate representation, dense spinor unitaries and the
//! JSON-lines circuit format.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::representations::UnitaryMatrix;

const FOUR_PI: f64 = 4.0 * PI;

/// Default qubit cap for dense `2^n × 2^n` construction.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// Qubit cap for dense simulation, overridable through `FLOHAAR_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var("FLOHAAR_DENSE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    /// `exp(i θ/2 Z_q)`
    Z,
    /// `exp(i θ/2 X_q X_{q+1})`
    XX,
    /// `exp(i θ/2 (X_q Y_{q+1} - Y_q X_{q+1}))`
    XYYX,
    /// `exp(i λ/2 Σ_q Z_q)`
    GlobalZ,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Z => "gz",
            GateKind::XX => "gxx",
            GateKind::XYYX => "gxyyx",
            GateKind::GlobalZ => "gglobalz",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "gz" => Some(GateKind::Z),
            "gxx" => Some(GateKind::XX),
            "gxyyx" => Some(GateKind::XYYX),
            "gglobalz" => Some(GateKind::GlobalZ),
            _ => None,
        }
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::XX | GateKind::XYYX)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reduce an angle into `[0, 4π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(FOUR_PI);
    if r >= FOUR_PI {
        0.0
    } else {
        r
    }
}

/// One parametrized gate. `site` is the (leftmost) 1-based qubit and is
/// `None` only for [`GateKind::GlobalZ`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub site: Option<usize>,
    pub angle: f64,
}

impl Gate {
    pub fn z(q: usize, theta: f64) -> Self {
        Self { kind: GateKind::Z, site: Some(q), angle: canonical_angle(theta) }
    }

    pub fn xx(q: usize, theta: f64) -> Self {
        Self { kind: GateKind::XX, site: Some(q), angle: canonical_angle(theta) }
    }

    pub fn xyyx(q: usize, theta: f64) -> Self {
        Self { kind: GateKind::XYYX, site: Some(q), angle: canonical_angle(theta) }
    }

    pub fn global_z(lambda: f64) -> Self {
        Self { kind: GateKind::GlobalZ, site: None, angle: canonical_angle(lambda) }
    }

    pub fn new(kind: GateKind, site: Option<usize>, angle: f64) -> Self {
        Self { kind, site, angle: canonical_angle(angle) }
    }

    /// Check the site against an `n`-qubit register.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGate(m));
        match (self.kind, self.site) {
            (GateKind::GlobalZ, None) => Ok(()),
            (GateKind::GlobalZ, Some(_)) => bad("gglobalz takes no site".into()),
            (_, None) => bad(format!("{} requires a site", self.kind)),
            (GateKind::Z, Some(q)) if q >= 1 && q <= n => Ok(()),
            (GateKind::XX | GateKind::XYYX, Some(q)) if q >= 1 && q < n => Ok(()),
            (k, Some(q)) => bad(format!("{k} site {q} out of range for n={n}")),
        }
    }

    /// Angles compared modulo 4π.
    pub fn same_as(&self, other: &Gate) -> bool {
        self.kind == other.kind
            && self.site == other.site
            && canonical_angle(self.angle) == canonical_angle(other.angle)
    }
}

/// Gates in application order: `gates[0]` acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Self { n, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn empty(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidGate("circuit needs at least one qubit".into()));
        }
        for g in &self.gates {
            g.validate(self.n)?;
        }
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Circuit {
        assert_eq!(self.n, other.n, "qubit counts differ");
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Circuit { n: self.n, gates }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }
}

fn check_cap(n: usize) -> Result<()> {
    let cap = dense_cap();
    if n > cap {
        return Err(Error::Capacity(format!("n={n} exceeds dense cap {cap}")));
    }
    Ok(())
}

/// Bit mask of qubit `q` (1-based, qubit 1 most significant).
#[inline]
fn mask(n: usize, q: usize) -> usize {
    1 << (n - q)
}

/// Left-multiply `u` (rows indexed by basis states) by the gate.
pub(crate) fn apply_gate_rows(u: &mut UnitaryMatrix, g: &Gate, n: usize) {
    let dim = 1usize << n;
    let half = g.angle / 2.0;
    let cols = u.ncols();
    match g.kind {
        GateKind::Z => {
            let m = mask(n, g.site.unwrap());
            let p = Complex64::from_polar(1.0, half);
            for i in 0..dim {
                let f = if i & m == 0 { p } else { p.conj() };
                for c in 0..cols {
                    u[(i, c)] *= f;
                }
            }
        }
        GateKind::GlobalZ => {
            for i in 0..dim {
                let z = n as f64 - 2.0 * i.count_ones() as f64;
                let f = Complex64::from_polar(1.0, half * z);
                for c in 0..cols {
                    u[(i, c)] *= f;
                }
            }
        }
        GateKind::XX => {
            let q = g.site.unwrap();
            let flip = mask(n, q) | mask(n, q + 1);
            let (s, co) = half.sin_cos();
            let is = Complex64::new(0.0, s);
            for i in 0..dim {
                let j = i ^ flip;
                if i < j {
                    for c in 0..cols {
                        let (a, b) = (u[(i, c)], u[(j, c)]);
                        u[(i, c)] = a * co + is * b;
                        u[(j, c)] = b * co + is * a;
                    }
                }
            }
        }
        GateKind::XYYX => {
            // Acts as [[cos θ, -sin θ], [sin θ, cos θ]] on (|01>, |10>) and
            // trivially on |00>, |11>.
            let q = g.site.unwrap();
            let (ml, mr) = (mask(n, q), mask(n, q + 1));
            let (s, co) = g.angle.sin_cos();
            for i in 0..dim {
                if i & ml == 0 && i & mr != 0 {
                    let j = i ^ ml ^ mr;
                    for c in 0..cols {
                        let (a, b) = (u[(i, c)], u[(j, c)]);
                        u[(i, c)] = a * co - b * s;
                        u[(j, c)] = a * s + b * co;
                    }
                }
            }
        }
    }
}

/// Dense spinor unitary of a single gate on `n` qubits.
pub fn gate_unitary(g: &Gate, n: usize) -> Result<UnitaryMatrix> {
    g.validate(n)?;
    check_cap(n)?;
    let mut u = DMatrix::identity(1 << n, 1 << n);
    apply_gate_rows(&mut u, g, n);
    Ok(u)
}

/// Dense spinor unitary of a circuit; the first gate is rightmost.
pub fn circuit_unitary(c: &Circuit) -> Result<UnitaryMatrix> {
    c.validate()?;
    check_cap(c.n)?;
    let mut u = DMatrix::identity(1 << c.n, 1 << c.n);
    for g in &c.gates {
        apply_gate_rows(&mut u, g, c.n);
    }
    Ok(u)
}

/// One JSON object per line, angles with 17 significant digits.
pub fn serialize(c: &Circuit) -> String {
    let mut s = format!("{{\"n\":{},\"convention\":\"half-angle\",\"gates\":[", c.n);
    for (i, g) in c.gates.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        match g.site {
            Some(q) => s.push_str(&format!(
                "{{\"kind\":\"{}\",\"site\":{},\"angle\":{:.16e}}}",
                g.kind, q, g.angle
            )),
            None => s.push_str(&format!("{{\"kind\":\"{}\",\"angle\":{:.16e}}}", g.kind, g.angle)),
        }
    }
    s.push_str("]}");
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    n: usize,
    convention: String,
    gates: Vec<RawGate>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    kind: String,
    #[serde(default)]
    site: Option<i64>,
    angle: f64,
}

fn parse_line(line: &str, lineno: usize) -> Result<Circuit> {
    let err = |location: String, message: String| Error::Parse { location, message };
    let raw: RawCircuit =
        serde_json::from_str(line).map_err(|e| err(format!("line {lineno}"), e.to_string()))?;
    if raw.convention != "half-angle" {
        return Err(err(format!("line {lineno}"), format!("unsupported convention {:?}", raw.convention)));
    }
    let mut gates = Vec::with_capacity(raw.gates.len());
    for (i, rg) in raw.gates.into_iter().enumerate() {
        let loc = || format!("line {lineno}, gate {i}");
        let kind = GateKind::from_name(&rg.kind)
            .ok_or_else(|| err(loc(), format!("unknown gate kind {:?}", rg.kind)))?;
        if !rg.angle.is_finite() {
            return Err(err(loc(), "angle is not finite".into()));
        }
        let site = match rg.site {
            Some(q) if q < 1 => return Err(err(loc(), format!("site {q} out of range"))),
            Some(q) => Some(q as usize),
            None => None,
        };
        let g = Gate::new(kind, site, rg.angle);
        g.validate(raw.n).map_err(|e| err(loc(), e.to_string()))?;
        gates.push(g);
    }
    if raw.n == 0 {
        return Err(err(format!("line {lineno}"), "n must be at least 1".into()));
    }
    Ok(Circuit { n: raw.n, gates })
}

/// Parse a single circuit record.
pub fn parse(text: &str) -> Result<Circuit> {
    parse_line(text.trim(), 1)
}

/// Parse a JSON-lines stream, skipping blank lines.
pub fn parse_many(text: &str) -> Result<Vec<Circuit>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l.trim(), i + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn kron(a: &UnitaryMatrix, b: &UnitaryMatrix) -> UnitaryMatrix {
        a.kronecker(b)
    }

    fn pauli(p: char) -> UnitaryMatrix {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        match p {
            'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
            _ => unreachable!(),
        }
    }

    fn string(s: &str) -> UnitaryMatrix {
        s.chars().skip(1).fold(pauli(s.chars().next().unwrap()), |m, p| kron(&m, &pauli(p)))
    }

    /// exp(i θ/2 H) by Taylor series; independent of the closed forms.
    fn expm_series(h: &UnitaryMatrix, theta: f64) -> UnitaryMatrix {
        let a = h * c(0.0, theta / 2.0);
        let mut term = DMatrix::identity(h.nrows(), h.ncols());
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * &a / c(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn gz_examples() {
        let u = gate_unitary(&Gate::z(1, 0.0), 1).unwrap();
        assert!(max_diff(&u, &DMatrix::identity(2, 2)) < 1e-15);
        let u = gate_unitary(&Gate::z(1, PI), 1).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        assert!(max_diff(&u, &want) < 1e-15);
    }

    #[test]
    fn gxx_pi_is_i_xx() {
        let u = gate_unitary(&Gate::xx(1, PI), 2).unwrap();
        assert!(max_diff(&u, &(string("XX") * c(0.0, 1.0))) < 1e-15);
    }

    #[test]
    fn two_gate_product() {
        let circ = Circuit::new(2, vec![Gate::z(1, PI), Gate::xx(1, PI)]).unwrap();
        let zi = kron(
            &DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]),
            &pauli('I'),
        );
        let want = (string("XX") * c(0.0, 1.0)) * zi;
        assert!(max_diff(&circuit_unitary(&circ).unwrap(), &want) < 1e-14);
    }

    #[test]
    fn closed_forms_match_series() {
        let n = 3;
        let th = 0.737;
        let cases: Vec<(Gate, UnitaryMatrix)> = vec![
            (Gate::z(2, th), string("IZI")),
            (Gate::xx(2, th), string("IXX")),
            (Gate::xyyx(1, th), string("XYI") - string("YXI")),
            (Gate::global_z(th), string("ZII") + string("IZI") + string("IIZ")),
        ];
        for (g, h) in cases {
            let got = gate_unitary(&g, n).unwrap();
            assert!(max_diff(&got, &expm_series(&h, th)) < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn double_cover() {
        let a = gate_unitary(&Gate::z(1, 0.4), 2).unwrap();
        let b = gate_unitary(&Gate::z(1, 0.4 + 2.0 * PI), 2).unwrap();
        let d = gate_unitary(&Gate::z(1, 0.4 + 4.0 * PI), 2).unwrap();
        assert!(max_diff(&a, &(-b)) < 1e-12);
        assert!(max_diff(&a, &d) < 1e-12);
    }

    #[test]
    fn invalid_sites_rejected() {
        assert!(matches!(gate_unitary(&Gate::z(3, 0.1), 2), Err(Error::InvalidGate(_))));
        assert!(matches!(gate_unitary(&Gate::xx(2, 0.1), 2), Err(Error::InvalidGate(_))));
        assert!(Circuit::new(2, vec![Gate::xyyx(0, 0.1)]).is_err());
    }

    #[test]
    fn empty_circuit_is_identity() {
        let u = circuit_unitary(&Circuit::empty(2)).unwrap();
        assert!(max_diff(&u, &DMatrix::identity(4, 4)) < 1e-15);
        let c0 = Circuit::empty(2);
        assert_eq!(parse(&serialize(&c0)).unwrap(), c0);
    }

    #[test]
    fn parse_rejects_bad_records() {
        let e = parse(r#"{"n":4,"convention":"half-angle","gates":[{"kind":"rz","site":5,"angle":0.1}]}"#);
        match e {
            Err(Error::Parse { location, .. }) => assert!(location.contains("gate 0")),
            other => panic!("{other:?}"),
        }
        assert!(parse(r#"{"n":4,"convention":"half-angle","gates":[{"kind":"gz","site":5,"angle":0.1}]}"#).is_err());
        assert!(parse(r#"{"n":4,"convention":"full-angle","gates":[]}"#).is_err());
        assert!(parse("not json").is_err());
        let many = "{\"n\":1,\"convention\":\"half-angle\",\"gates\":[]}\n\n{\"n\":1}";
        match parse_many(many) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 3"),
            other => panic!("{other:?}"),
        }
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (2usize..6).prop_flat_map(|n| {
            let gate = (0u8..4, 1usize..=n, -20.0f64..20.0).prop_map(move |(k, q, a)| match k {
                0 => Gate::z(q, a),
                1 => Gate::xx(q.min(n - 1), a),
                2 => Gate::xyyx(q.min(n - 1), a),
                _ => Gate::global_z(a),
            });
            proptest::collection::vec(gate, 0..100).prop_map(move |gates| Circuit { n, gates })
        })
    }

    proptest! {
        #[test]
        fn roundtrip_is_exact(c in arb_circuit()) {
            let back = parse(&serialize(&c)).unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn angles_are_canonical(a in -100.0f64..100.0) {
            let g = Gate::z(1, a);
            prop_assert!(g.angle >= 0.0 && g.angle < 4.0 * PI);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn unitary_and_composition(a in arb_circuit(), b in arb_circuit()) {
            let b = Circuit { n: a.n, gates: b.gates.into_iter().filter(|g| g.validate(a.n).is_ok()).collect() };
            let ua = circuit_unitary(&a).unwrap();
            let ub = circuit_unitary(&b).unwrap();
            let uab = circuit_unitary(&a.then(&b)).unwrap();
            prop_assert!(max_diff(&uab, &(&ub * &ua)) < 1e-10);
            let id = DMatrix::identity(1 << a.n, 1 << a.n);
            prop_assert!(max_diff(&(&ua * ua.adjoint()), &id) < 1e-10);
        }
    }
}
