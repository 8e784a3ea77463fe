//! Exact dimensions of the t-fold commutant of the FLO representations.
//!
//! Characters are kept as weight → multiplicity maps with every weight
//! stored doubled, so spinor half-integers stay integral. The tensor power is
//! an additive convolution; irreducible constituents are peeled off from the
//! top, with irrep weight multiplicities from Freudenthal's recursion. The
//! commutant dimension is `Σ m_λ²`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest `n` and `t` accepted by [`commutant_dimension`].
pub const MAX_RANK: usize = 8;
pub const MAX_POWER: usize = 8;

/// A weight with all coordinates doubled.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(Vec<i32>);

impl Weight {
    pub fn from_doubled(v: Vec<i32>) -> Self {
        Weight(v)
    }

    pub fn from_integers(v: &[i32]) -> Self {
        Weight(v.iter().map(|x| 2 * x).collect())
    }

    pub fn doubled(&self) -> &[i32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    fn add(&self, other: &[i32]) -> Weight {
        Weight(self.0.iter().zip(other).map(|(a, b)| a + b).collect())
    }

    fn dot(&self, other: &[i32]) -> i64 {
        self.0.iter().zip(other).map(|(&a, &b)| a as i64 * b as i64).sum()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if x % 2 == 0 {
                write!(f, "{}", x / 2)?;
            } else {
                write!(f, "{x}/2")?;
            }
        }
        write!(f, ")")
    }
}

/// Weight → multiplicity. Multiplicities may go negative only inside peeling.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightCharacter {
    pub weights: BTreeMap<Weight, i64>,
}

impl WeightCharacter {
    pub fn get(&self, w: &Weight) -> i64 {
        self.weights.get(w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> i64 {
        self.weights.values().sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// Parity-preserving FLO: the two half-spin representations of so(2n).
    Active,
    /// Number-preserving FLO: `⊕_k Λ^k C^n` of u(n).
    Passive,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Active => "active",
            Group::Passive => "passive",
        }
    }

    pub fn algebra(self, n: usize) -> Algebra {
        match self {
            Group::Active => Algebra::D(n),
            Group::Passive => Algebra::Gl(n),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "active" => Ok(Group::Active),
            "passive" => Ok(Group::Passive),
            _ => Err(Error::Domain(format!("unknown group '{s}' (expected active or passive)"))),
        }
    }
}

/// `D(n)` is so(2n) (abelian for `n = 1`), `Gl(n)` is gl(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    D(usize),
    Gl(usize),
}

impl Algebra {
    pub fn rank(self) -> usize {
        match self {
            Algebra::D(n) | Algebra::Gl(n) => n,
        }
    }

    /// Positive roots, doubled.
    fn positive_roots(self) -> Vec<Vec<i32>> {
        let n = self.rank();
        let mut roots = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut minus = vec![0; n];
                minus[i] = 2;
                minus[j] = -2;
                roots.push(minus);
                if let Algebra::D(_) = self {
                    let mut plus = vec![0; n];
                    plus[i] = 2;
                    plus[j] = 2;
                    roots.push(plus);
                }
            }
        }
        roots
    }

    /// Half the sum of positive roots, doubled: `2(n-1, …, 0)`. For gl(n)
    /// this is shifted by a multiple of `(1, …, 1)`, which no formula here
    /// can see.
    fn rho(self) -> Vec<i32> {
        let n = self.rank() as i32;
        (0..n).map(|i| 2 * (n - 1 - i)).collect()
    }

    pub fn is_dominant(self, w: &Weight) -> bool {
        let x = w.doubled();
        let n = x.len();
        if n != self.rank() {
            return false;
        }
        let decreasing = x.windows(2).take(n.saturating_sub(match self {
            Algebra::D(_) => 2,
            Algebra::Gl(_) => 1,
        }))
        .all(|p| p[0] >= p[1]);
        match self {
            Algebra::Gl(_) => decreasing,
            Algebra::D(1) => true,
            Algebra::D(_) => decreasing && x[n - 2] >= x[n - 1].abs(),
        }
    }

    /// Dominant representative of the Weyl orbit.
    pub fn dominant(self, w: &Weight) -> Weight {
        let mut x = w.doubled().to_vec();
        match self {
            Algebra::Gl(_) => x.sort_unstable_by(|a, b| b.cmp(a)),
            Algebra::D(1) => {}
            Algebra::D(_) => {
                let negatives = x.iter().filter(|&&v| v < 0).count();
                let zero = x.contains(&0);
                for v in x.iter_mut() {
                    *v = v.abs();
                }
                x.sort_unstable_by(|a, b| b.cmp(a));
                if negatives % 2 == 1 && !zero {
                    let last = x.len() - 1;
                    x[last] = -x[last];
                }
            }
        }
        Weight(x)
    }

    fn reflections(self, x: &[i32]) -> Vec<Vec<i32>> {
        let n = x.len();
        let mut out = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let mut y = x.to_vec();
            y.swap(i, i + 1);
            out.push(y);
        }
        if let Algebra::D(m) = self {
            if m >= 2 {
                let mut y = x.to_vec();
                y[n - 2] = -x[n - 1];
                y[n - 1] = -x[n - 2];
                out.push(y);
            }
        }
        out
    }

    /// Whether `λ - μ` is a non-negative integer combination of simple roots.
    fn below(self, lambda: &Weight, mu: &Weight) -> bool {
        let d: Vec<i32> = lambda.doubled().iter().zip(mu.doubled()).map(|(a, b)| a - b).collect();
        let n = d.len();
        let mut s = 0;
        let mut partial = Vec::with_capacity(n);
        for &x in &d {
            s += x;
            partial.push(s);
        }
        // Coefficients are doubled too, so each must be even and ≥ 0.
        let ok = |c: i32| c >= 0 && c % 2 == 0;
        match self {
            Algebra::Gl(_) => partial[n - 1] == 0 && partial[..n - 1].iter().all(|&c| ok(c)),
            Algebra::D(1) => d[0] == 0,
            Algebra::D(_) => {
                partial[..n - 2].iter().all(|&c| ok(c))
                    && (partial[n - 2] - d[n - 1]) % 4 == 0
                    && partial[n - 2] - d[n - 1] >= 0
                    && partial[n - 1] % 4 == 0
                    && partial[n - 1] >= 0
            }
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algebra::D(n) => write!(f, "D{n}"),
            Algebra::Gl(n) => write!(f, "gl({n})"),
        }
    }
}

/// Character of the `2^n`-dimensional Fock space.
pub fn rep_character(group: Group, n: usize) -> WeightCharacter {
    let mut ch = WeightCharacter::default();
    for bits in 0..1usize << n {
        let w = (0..n)
            .map(|q| {
                let b = (bits >> (n - 1 - q)) & 1 == 1;
                match (group, b) {
                    (Group::Active, true) => 1,
                    (Group::Active, false) => -1,
                    (Group::Passive, true) => 2,
                    (Group::Passive, false) => 0,
                }
            })
            .collect();
        ch.weights.insert(Weight(w), 1);
    }
    ch
}

/// `t`-fold tensor power by repeated convolution; `t = 0` is the trivial
/// character.
pub fn tensor_power(chi: &WeightCharacter, t: usize) -> WeightCharacter {
    let rank = chi.weights.keys().next().map_or(0, Weight::rank);
    let mut acc: HashMap<Weight, i64> = HashMap::from([(Weight(vec![0; rank]), 1)]);
    for _ in 0..t {
        let mut next: HashMap<Weight, i64> = HashMap::with_capacity(acc.len() * 2);
        for (w, &m) in &acc {
            for (v, &k) in &chi.weights {
                *next.entry(w.add(v.doubled())).or_insert(0) += m * k;
            }
        }
        acc = next;
    }
    WeightCharacter { weights: acc.into_iter().filter(|(_, m)| *m != 0).collect() }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Weyl dimension formula `Π_{α>0} (λ+ρ, α) / (ρ, α)`.
pub fn weyl_dimension(lambda: &Weight, algebra: Algebra) -> u128 {
    let rho = algebra.rho();
    let shifted = lambda.add(&rho);
    let rho = Weight(rho);
    let (mut num, mut den) = (1i128, 1i128);
    for a in algebra.positive_roots() {
        num *= shifted.dot(&a) as i128;
        den *= rho.dot(&a) as i128;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    debug_assert_eq!(den, 1);
    (num / den) as u128
}

/// Dominant weights of `V(λ)`, each with its multiplicity (Freudenthal).
pub fn dominant_multiplicities(lambda: &Weight, algebra: Algebra) -> Result<BTreeMap<Weight, i64>> {
    if !algebra.is_dominant(lambda) {
        return Err(Error::Domain(format!("{lambda} is not dominant for {algebra}")));
    }
    let x = lambda.doubled();
    let n = x.len();
    let (lo, hi) = match algebra {
        Algebra::D(_) => (-x[0].abs(), x[0].abs()),
        Algebra::Gl(_) => (x[n - 1], x[0]),
    };
    // Weakly decreasing vectors in the box with λ's parity; dominance and
    // the root-cone condition are filtered below.
    let parity = x[0].rem_euclid(2);
    let mut candidates = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn walk(cur: &mut Vec<i32>, n: usize, lo: i32, hi: i32, parity: i32, out: &mut Vec<Weight>) {
        if cur.len() == n {
            out.push(Weight(cur.clone()));
            return;
        }
        let top = cur.last().copied().unwrap_or(hi);
        let mut v = top;
        while v >= lo {
            if v.rem_euclid(2) == parity {
                cur.push(v);
                walk(cur, n, lo, hi, parity, out);
                cur.pop();
            }
            v -= 1;
        }
    }
    walk(&mut cur, n, lo, hi, parity, &mut candidates);
    let mut dominant: Vec<Weight> =
        candidates.into_iter().filter(|m| algebra.is_dominant(m) && algebra.below(lambda, m)).collect();
    let rho = algebra.rho();
    let norm = |w: &Weight| {
        let s = w.add(&rho);
        s.dot(s.doubled())
    };
    // Higher weights first: decreasing (μ+ρ)² is a valid order.
    dominant.sort_by_key(|w| std::cmp::Reverse(norm(w)));
    let top = norm(lambda);
    let roots = algebra.positive_roots();
    let mut mult: BTreeMap<Weight, i64> = BTreeMap::new();
    let set: BTreeSet<Weight> = dominant.iter().cloned().collect();
    for mu in &dominant {
        if mu == lambda {
            mult.insert(mu.clone(), 1);
            continue;
        }
        let mut rhs = 0i64;
        for a in &roots {
            let mut k = 1;
            loop {
                let w = mu.add(&a.iter().map(|c| c * k).collect::<Vec<_>>());
                let d = algebra.dominant(&w);
                if !set.contains(&d) {
                    break;
                }
                let m = *mult.get(&d).ok_or_else(|| Error::Inconsistent(format!("multiplicity of {d} needed early")))?;
                rhs += 2 * m * w.dot(a);
                k += 1;
            }
        }
        let gap = top - norm(mu);
        if gap <= 0 || rhs % gap != 0 {
            return Err(Error::Inconsistent(format!("Freudenthal step at {mu} is not integral")));
        }
        mult.insert(mu.clone(), rhs / gap);
    }
    mult.retain(|_, m| *m != 0);
    Ok(mult)
}

/// Full character of `V(λ)` (orbits of the dominant weights).
pub fn irrep_character(lambda: &Weight, algebra: Algebra) -> Result<WeightCharacter> {
    let mut ch = WeightCharacter::default();
    for (mu, m) in dominant_multiplicities(lambda, algebra)? {
        let mut orbit = BTreeSet::from([mu.0.clone()]);
        let mut stack = vec![mu.0.clone()];
        while let Some(x) = stack.pop() {
            for y in algebra.reflections(&x) {
                if orbit.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        for w in orbit {
            ch.weights.insert(Weight(w), m);
        }
    }
    Ok(ch)
}

/// One irreducible constituent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irrep {
    pub highest: Weight,
    pub multiplicity: u64,
    pub dimension: u128,
}

/// Peel irreducible constituents off a Weyl-invariant character, highest
/// first. Only dominant weights are tracked.
pub fn decompose_irreps(chi: &WeightCharacter, algebra: Algebra) -> Result<Vec<Irrep>> {
    let n = algebra.rank();
    if chi.weights.keys().any(|w| w.rank() != n) {
        return Err(Error::Domain(format!("character rank does not match {algebra}")));
    }
    // v = (n, …, 1) is strictly dominant for both algebras.
    let v: Vec<i32> = (0..n as i32).map(|i| n as i32 - i).collect();
    let mut sectors: BTreeMap<i32, BTreeMap<Weight, i64>> = BTreeMap::new();
    for (w, &m) in &chi.weights {
        if algebra.is_dominant(w) && m != 0 {
            let key = match algebra {
                Algebra::Gl(_) => w.doubled().iter().sum(),
                Algebra::D(_) => 0,
            };
            sectors.entry(key).or_default().insert(w.clone(), m);
        }
    }
    let mut out = Vec::new();
    for (_, mut rest) in sectors {
        while let Some(top) = rest.keys().max_by(|a, b| a.dot(&v).cmp(&b.dot(&v)).then_with(|| a.cmp(b))).cloned() {
            let m = rest[&top];
            if m < 0 {
                return Err(Error::Inconsistent(format!("negative multiplicity {m} at {top}")));
            }
            for (mu, k) in dominant_multiplicities(&top, algebra)? {
                let e = rest.entry(mu.clone()).or_insert(0);
                *e -= m * k;
                if *e == 0 {
                    rest.remove(&mu);
                }
            }
            out.push(Irrep { dimension: weyl_dimension(&top, algebra), highest: top, multiplicity: m as u64 });
        }
    }
    out.sort_by(|a, b| b.highest.dot(&v).cmp(&a.highest.dot(&v)).then_with(|| b.highest.cmp(&a.highest)));
    let total: u128 = out.iter().map(|r| r.multiplicity as u128 * r.dimension).sum();
    if total != chi.total() as u128 {
        return Err(Error::Inconsistent(format!("constituents span {total} dimensions, character has {}", chi.total())));
    }
    Ok(out)
}

/// Commutant dimension together with the constituent table.
pub fn commutant_table(group: Group, n: usize, t: usize) -> Result<(u128, Vec<Irrep>)> {
    if n == 0 || n > MAX_RANK || t > MAX_POWER {
        return Err(Error::Capacity(format!(
            "commutant supports 1 ≤ n ≤ {MAX_RANK} and t ≤ {MAX_POWER}, got n = {n}, t = {t}"
        )));
    }
    let chi = tensor_power(&rep_character(group, n), t);
    let irreps = decompose_irreps(&chi, group.algebra(n))?;
    let dim = irreps.iter().map(|r| (r.multiplicity as u128).pow(2)).sum();
    if dim == 0 {
        return Err(Error::Inconsistent("empty commutant".into()));
    }
    Ok((dim, irreps))
}

/// `dim L(H^{⊗t})^G = Σ_λ m_λ²`.
pub fn commutant_dimension(group: Group, n: usize, t: usize) -> Result<u128> {
    commutant_table(group, n, t).map(|(d, _)| d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> Weight {
        Weight::from_doubled(v.to_vec())
    }

    #[test]
    fn fock_characters() {
        let a = rep_character(Group::Active, 2);
        let keys: Vec<String> = a.weights.keys().map(|k| k.to_string()).collect();
        assert_eq!(keys, ["(-1/2,-1/2)", "(-1/2,1/2)", "(1/2,-1/2)", "(1/2,1/2)"]);
        let p = rep_character(Group::Passive, 2);
        assert!(p.weights.keys().all(|k| k.doubled().iter().all(|&x| x == 0 || x == 2)));
        for n in 1..=5 {
            assert_eq!(rep_character(Group::Active, n).total(), 1 << n);
            assert_eq!(rep_character(Group::Passive, n).len(), 1 << n);
        }
    }

    #[test]
    fn convolution() {
        let a = rep_character(Group::Active, 1);
        assert_eq!(tensor_power(&a, 1), a);
        let sq = tensor_power(&a, 2);
        assert_eq!(sq.get(&w(&[-2])), 1);
        assert_eq!(sq.get(&w(&[0])), 2);
        assert_eq!(sq.get(&w(&[2])), 1);
        assert_eq!(tensor_power(&rep_character(Group::Passive, 3), 3).total(), 1 << 9);
    }

    #[test]
    fn dominant_representatives() {
        let d = Algebra::D(3);
        assert_eq!(d.dominant(&w(&[-1, 3, -1])), w(&[3, 1, 1]));
        assert_eq!(d.dominant(&w(&[-1, 3, 1])), w(&[3, 1, -1]));
        assert_eq!(d.dominant(&w(&[0, -2, 4])), w(&[4, 2, 0]));
        assert!(d.is_dominant(&w(&[3, 1, -1])) && !d.is_dominant(&w(&[1, 3, 1])));
        assert_eq!(Algebra::Gl(3).dominant(&w(&[0, 2, -2])), w(&[2, 0, -2]));
    }

    #[test]
    fn gl2_strings() {
        // V(λ1, λ2) of gl(2) has weights (λ1-i, λ2+i), each once.
        for l1 in 0..=3 {
            for l2 in 0..=l1 {
                let ch = irrep_character(&Weight::from_integers(&[l1, l2]), Algebra::Gl(2)).unwrap();
                let expect: BTreeMap<Weight, i64> =
                    (0..=l1 - l2).map(|i| (Weight::from_integers(&[l1 - i, l2 + i]), 1)).collect();
                assert_eq!(ch.weights, expect);
            }
        }
    }

    #[test]
    fn d2_is_two_sl2() {
        // D2 = sl2 ⊕ sl2: V(λ) = V_{j1} ⊗ V_{j2}, weights (x, y) with x+y
        // and x-y running over the two spin strings.
        for a in 0..=6 {
            for b in -a..=a {
                if (a - b) % 2 != 0 {
                    continue;
                }
                let lambda = w(&[a, b]);
                let ch = irrep_character(&lambda, Algebra::D(2)).unwrap();
                let (s, d) = (a + b, a - b);
                let mut expect = BTreeMap::new();
                for u in (-s..=s).step_by(4) {
                    for v in (-d..=d).step_by(4) {
                        expect.insert(w(&[(u + v) / 2, (u - v) / 2]), 1);
                    }
                }
                assert_eq!(ch.weights, expect, "λ = {lambda}");
                assert_eq!(weyl_dimension(&lambda, Algebra::D(2)), ((s / 2 + 1) * (d / 2 + 1)) as u128);
            }
        }
    }

    #[test]
    fn known_dimensions() {
        // Vector, adjoint and spinor of so(8); Λ^2 and Sym^2 of gl(4).
        let d4 = Algebra::D(4);
        assert_eq!(weyl_dimension(&Weight::from_integers(&[1, 0, 0, 0]), d4), 8);
        assert_eq!(weyl_dimension(&Weight::from_integers(&[1, 1, 0, 0]), d4), 28);
        assert_eq!(weyl_dimension(&w(&[1, 1, 1, 1]), d4), 8);
        assert_eq!(weyl_dimension(&Weight::from_integers(&[1, 1, 0, 0]), Algebra::Gl(4)), 6);
        assert_eq!(weyl_dimension(&Weight::from_integers(&[2, 0, 0, 0]), Algebra::Gl(4)), 10);
        for lambda in [w(&[2, 2, 0, 0]), w(&[3, 1, 1, -1]), w(&[4, 2, 2, 0])] {
            let ch = irrep_character(&lambda, d4).unwrap();
            assert_eq!(ch.total() as u128, weyl_dimension(&lambda, d4));
        }
    }

    #[test]
    fn passive_first_power() {
        let irreps = decompose_irreps(&rep_character(Group::Passive, 2), Algebra::Gl(2)).unwrap();
        let mut hw: Vec<String> = irreps.iter().map(|r| r.highest.to_string()).collect();
        hw.sort();
        assert_eq!(hw, ["(0,0)", "(1,0)", "(1,1)"]);
        assert!(irreps.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn single_irrep_round_trip() {
        let lambda = Weight::from_integers(&[2, 1, 0]);
        let ch = irrep_character(&lambda, Algebra::D(3)).unwrap();
        let irreps = decompose_irreps(&ch, Algebra::D(3)).unwrap();
        assert_eq!(irreps, vec![Irrep { highest: lambda.clone(), multiplicity: 1, dimension: weyl_dimension(&lambda, Algebra::D(3)) }]);
    }

    #[test]
    fn conservation_active_n2_t2() {
        let chi = tensor_power(&rep_character(Group::Active, 2), 2);
        let irreps = decompose_irreps(&chi, Algebra::D(2)).unwrap();
        assert_eq!(irreps.iter().map(|r| r.multiplicity as u128 * r.dimension).sum::<u128>(), 16);
    }

    #[test]
    fn first_power_values() {
        for n in 1..=6 {
            assert_eq!(commutant_dimension(Group::Active, n, 1).unwrap(), 2);
            assert_eq!(commutant_dimension(Group::Passive, n, 1).unwrap(), n as u128 + 1);
        }
    }

    #[test]
    fn low_rank_values() {
        // Central binomials for the abelian n = 1 case.
        let binom = [2, 6, 20, 70, 252, 924];
        for t in 1..=6 {
            assert_eq!(commutant_dimension(Group::Active, 1, t).unwrap(), binom[t - 1]);
        }
        assert_eq!(commutant_dimension(Group::Active, 2, 2).unwrap(), 10);
        assert_eq!(commutant_dimension(Group::Passive, 2, 2).unwrap(), 20);
    }

    #[test]
    fn not_a_character() {
        let mut chi = WeightCharacter::default();
        chi.weights.insert(Weight::from_integers(&[1, 0]), 1);
        assert!(decompose_irreps(&chi, Algebra::Gl(2)).is_err());
        assert!(commutant_dimension(Group::Active, 0, 1).is_err());
        assert!(commutant_dimension(Group::Active, 2, MAX_POWER + 1).is_err());
    }
}
