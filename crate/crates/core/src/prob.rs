//! Finite-alphabet joint distributions and the scalar information measures
//! built on them.
//!
//! All logarithms are base 2. Divergences whose first argument is not
//! absolutely continuous with respect to the second evaluate to
//! `f64::INFINITY` rather than failing.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::varset::{VarSet, MAX_VARS};

/// Largest dense tensor accepted by [`JointPmf::new`].
pub const MAX_JOINT_SIZE: usize = 10_000_000;

/// Sums within this distance of 1 are accepted as-is.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Sums within this distance of 1 are renormalized on ingestion.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// Maximum deviation tolerated by [`check_factorization`].
pub const FACTORIZATION_TOLERANCE: f64 = 1e-9;

/// Which of the two laws in play an atom or pmf refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistLabel {
    /// The law used to draw codewords.
    Codebook,
    /// The law the selected codewords are made to look like.
    Encoding,
}

impl DistLabel {
    pub fn tag(self) -> &'static str {
        match self {
            DistLabel::Codebook => "c",
            DistLabel::Encoding => "e",
        }
    }
}

impl fmt::Display for DistLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A named coordinate of a joint distribution.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableId {
    pub index: usize,
    pub label: String,
}

impl VariableId {
    pub fn new(index: usize, label: impl Into<String>) -> Self {
        VariableId {
            index,
            label: label.into(),
        }
    }
}

/// Dense joint pmf over a product of finite alphabets, row-major with the
/// last variable varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    vars: Vec<VariableId>,
    cards: Vec<usize>,
    mass: Vec<f64>,
}

impl JointPmf {
    /// Validates and builds a pmf.
    ///
    /// Entries must be finite and nonnegative. A total within
    /// [`RENORMALIZE_TOLERANCE`] of one is rescaled to sum to one.
    pub fn new(vars: Vec<VariableId>, cards: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        if vars.len() != cards.len() {
            return Err(Error::validation(
                "cardinalities",
                format!("{} variables but {} cardinalities", vars.len(), cards.len()),
            ));
        }
        let mut seen = VarSet::EMPTY;
        for v in &vars {
            if v.index >= MAX_VARS {
                return Err(Error::validation(
                    "variables",
                    format!("index {} exceeds {}", v.index, MAX_VARS - 1),
                ));
            }
            if seen.contains(v.index) {
                return Err(Error::validation(
                    "variables",
                    format!("duplicate variable index {}", v.index),
                ));
            }
            seen = seen.union(VarSet::singleton(v.index));
        }
        if let Some(pos) = cards.iter().position(|&c| c == 0) {
            return Err(Error::validation(
                "cardinalities",
                format!("variable {} has an empty alphabet", vars[pos].index),
            ));
        }
        let size = cards
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .filter(|&s| s <= MAX_JOINT_SIZE)
            .ok_or_else(|| {
                Error::validation(
                    "cardinalities",
                    format!("joint alphabet exceeds {MAX_JOINT_SIZE} entries"),
                )
            })?;
        if mass.len() != size {
            return Err(Error::validation(
                "mass",
                format!("expected {size} entries, got {}", mass.len()),
            ));
        }
        if let Some((i, &m)) = mass
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_finite() || **m < 0.0)
        {
            return Err(Error::validation(
                "mass",
                format!("entry {i} is {m}; entries must be finite and nonnegative"),
            ));
        }
        let total: f64 = mass.iter().sum();
        let deviation = (total - 1.0).abs();
        let mass = if deviation <= SUM_TOLERANCE {
            mass
        } else if deviation <= RENORMALIZE_TOLERANCE {
            mass.into_iter().map(|m| m / total).collect()
        } else {
            return Err(Error::validation(
                "mass",
                format!("entries sum to {total}, expected 1"),
            ));
        };
        Ok(JointPmf { vars, cards, mass })
    }

    /// A pmf drawn from the flat Dirichlet law, over variables `0..cards.len()`.
    pub fn random<R: Rng + ?Sized>(cards: Vec<usize>, rng: &mut R) -> Result<Self> {
        let size = cards.iter().product();
        Self::from_cards(cards, dirichlet_row(size, rng))
    }

    /// Appends variables whose conditional law given the variables at
    /// coordinate positions `parents` is drawn from the flat Dirichlet law,
    /// independently for each parent configuration.
    pub fn extend_random<R: Rng + ?Sized>(
        &self,
        new_vars: Vec<VariableId>,
        new_cards: Vec<usize>,
        parents: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        if let Some(&p) = parents.iter().find(|&&p| p >= self.cards.len()) {
            return Err(Error::domain(format!("parent position {p} out of range")));
        }
        let block: usize = new_cards.iter().product();
        let configs: usize = parents.iter().map(|&p| self.cards[p]).product();
        let rows: Vec<Vec<f64>> = (0..configs).map(|_| dirichlet_row(block, rng)).collect();
        let cards = &self.cards;
        self.extend_with(new_vars, new_cards, |symbols| {
            let key = parents.iter().fold(0, |acc, &p| acc * cards[p] + symbols[p]);
            rows[key].clone()
        })
    }

    /// Same alphabets and mass under new variable ids.
    pub fn clone_with_vars(&self, vars: &[VariableId]) -> Result<Self> {
        Self::new(vars.to_vec(), self.cards.clone(), self.mass.clone())
    }

    /// Builds a pmf whose variables are numbered `0..cards.len()` with
    /// default labels `V0, V1, ...`.
    pub fn from_cards(cards: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        let vars = (0..cards.len())
            .map(|i| VariableId::new(i, format!("V{i}")))
            .collect();
        Self::new(vars, cards, mass)
    }

    pub fn uniform(cards: Vec<usize>) -> Result<Self> {
        let size: usize = cards.iter().product();
        Self::from_cards(cards, vec![1.0 / size as f64; size])
    }

    /// Independent product of two pmfs over disjoint variables; the
    /// variables of `self` come first.
    pub fn product(&self, other: &JointPmf) -> Result<Self> {
        if !self.var_set().is_disjoint(other.var_set()) {
            return Err(Error::domain("product of pmfs sharing a variable"));
        }
        let mut mass = Vec::with_capacity(self.mass.len() * other.mass.len());
        for &a in &self.mass {
            mass.extend(other.mass.iter().map(|&b| a * b));
        }
        let vars = self.vars.iter().chain(&other.vars).cloned().collect();
        let cards = self.cards.iter().chain(&other.cards).copied().collect();
        Self::new(vars, cards, mass)
    }

    /// Appends new variables drawn from `kernel(x)`, a distribution over the
    /// new variables' joint alphabet (row-major) given the existing symbol
    /// tuple `x`.
    pub fn extend_with<F>(&self, new_vars: Vec<VariableId>, new_cards: Vec<usize>, kernel: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> Vec<f64>,
    {
        let block: usize = new_cards.iter().product();
        let mut mass = Vec::with_capacity(self.mass.len() * block);
        for (flat, &p) in self.mass.iter().enumerate() {
            let symbols = self.unflatten(flat);
            let row = kernel(&symbols);
            if row.len() != block {
                return Err(Error::validation(
                    "kernel",
                    format!("row has {} entries, expected {block}", row.len()),
                ));
            }
            mass.extend(row.iter().map(|&k| p * k));
        }
        let vars = self.vars.iter().cloned().chain(new_vars).collect();
        let cards = self.cards.iter().copied().chain(new_cards).collect();
        Self::new(vars, cards, mass)
    }

    pub fn variables(&self) -> &[VariableId] {
        &self.vars
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn var_set(&self) -> VarSet {
        self.vars.iter().map(|v| v.index).collect()
    }

    /// Position of variable `index` in this pmf's coordinate order.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.vars.iter().position(|v| v.index == index)
    }

    pub fn cardinality_of(&self, index: usize) -> Option<usize> {
        self.position(index).map(|p| self.cards[p])
    }

    /// Probability of a full symbol tuple (in coordinate order).
    pub fn prob(&self, symbols: &[usize]) -> f64 {
        self.mass[self.flatten(symbols)]
    }

    pub fn flatten(&self, symbols: &[usize]) -> usize {
        debug_assert_eq!(symbols.len(), self.cards.len());
        symbols
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&s, &c)| acc * c + s)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.cards.len()];
        for (slot, &c) in out.iter_mut().zip(&self.cards).rev() {
            *slot = flat % c;
            flat /= c;
        }
        out
    }

    fn positions_of(&self, keep: &[usize]) -> Result<Vec<usize>> {
        let mut seen = VarSet::EMPTY;
        keep.iter()
            .map(|&i| {
                if i >= MAX_VARS || seen.contains(i) {
                    return Err(Error::domain(format!("variable {i} repeated or out of range")));
                }
                seen = seen.union(VarSet::singleton(i));
                self.position(i)
                    .ok_or_else(|| Error::domain(format!("unknown variable {i}")))
            })
            .collect()
    }

    /// Maps every flat index of `self` to a flat index over the variables
    /// at `positions` (in the given order).
    fn projection_map(&self, positions: &[usize]) -> (Vec<usize>, usize) {
        let mut strides = vec![0usize; self.cards.len()];
        let mut size = 1;
        for &p in positions.iter().rev() {
            strides[p] = size;
            size *= self.cards[p];
        }
        let mut digits = vec![0usize; self.cards.len()];
        let mut map = Vec::with_capacity(self.mass.len());
        let mut target = 0usize;
        for _ in 0..self.mass.len() {
            map.push(target);
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                target += strides[k];
                if digits[k] < self.cards[k] {
                    break;
                }
                target -= strides[k] * digits[k];
                digits[k] = 0;
            }
        }
        (map, size)
    }

    fn marginal_mass(&self, positions: &[usize]) -> Vec<f64> {
        let (map, size) = self.projection_map(positions);
        let mut out = vec![0.0; size];
        for (&t, &m) in map.iter().zip(&self.mass) {
            out[t] += m;
        }
        out
    }

    /// Marginal over `keep`, in the order given.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointPmf> {
        let positions = self.positions_of(keep)?;
        let mass = self.marginal_mass(&positions);
        Ok(JointPmf {
            vars: positions.iter().map(|&p| self.vars[p].clone()).collect(),
            cards: positions.iter().map(|&p| self.cards[p]).collect(),
            mass,
        })
    }

    /// Marginal over a variable set, ordered by ascending index.
    pub fn marginal_set(&self, set: VarSet) -> Result<JointPmf> {
        self.marginal(&set.to_vec())
    }

    /// Conditional kernel `P(of | given)`.
    pub fn conditional(&self, of: &[usize], given: &[usize]) -> Result<ConditionalKernel> {
        let of_set: VarSet = of.iter().copied().collect();
        let given_set: VarSet = given.iter().copied().collect();
        if !of_set.is_disjoint(given_set) {
            return Err(Error::domain("conditioned and conditioning sets overlap"));
        }
        let joint_order: Vec<usize> = given.iter().chain(of).copied().collect();
        let joint = self.marginal(&joint_order)?;
        let given_cards: Vec<usize> = joint.cards[..given.len()].to_vec();
        let of_cards: Vec<usize> = joint.cards[given.len()..].to_vec();
        let width: usize = of_cards.iter().product();
        let rows = joint
            .mass
            .chunks(width)
            .map(|chunk| {
                let total: f64 = chunk.iter().sum();
                (total > 0.0).then(|| chunk.iter().map(|m| m / total).collect())
            })
            .collect();
        Ok(ConditionalKernel {
            of: of.to_vec(),
            given: given.to_vec(),
            of_cards,
            given_cards,
            rows,
        })
    }

    /// Shannon entropy of the marginal on `of`, in bits.
    pub fn entropy(&self, of: VarSet) -> Result<f64> {
        if of.is_empty() {
            return Ok(0.0);
        }
        let positions = self.positions_of(&of.to_vec())?;
        Ok(entropy_of_masses(&self.marginal_mass(&positions)))
    }

    /// `-sum P_self(s) log2 P_other(s)` over the `of`-marginals.
    pub fn cross_entropy(&self, other: &JointPmf, of: VarSet) -> Result<f64> {
        if of.is_empty() {
            return Ok(0.0);
        }
        ensure_same_alphabets(self, other, of)?;
        let p = self.marginal_mass(&self.positions_of(&of.to_vec())?);
        let q = other.marginal_mass(&other.positions_of(&of.to_vec())?);
        Ok(cross_entropy_of_masses(&p, &q))
    }
}

/// A conditional distribution `P(of | given)`; rows are indexed by the
/// flattened `given` tuple and are `None` where the conditioning symbol has
/// zero mass.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalKernel {
    pub of: Vec<usize>,
    pub given: Vec<usize>,
    pub of_cards: Vec<usize>,
    pub given_cards: Vec<usize>,
    pub rows: Vec<Option<Vec<f64>>>,
}

impl ConditionalKernel {
    pub fn row(&self, given_flat: usize) -> Option<&[f64]> {
        self.rows.get(given_flat).and_then(|r| r.as_deref())
    }

    pub fn is_supported(&self, given_flat: usize) -> bool {
        self.row(given_flat).is_some()
    }
}

/// A conditional-independence statement `A ⫫ B | C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CondIndep {
    pub a: VarSet,
    pub b: VarSet,
    pub given: VarSet,
}

impl CondIndep {
    pub fn new(a: VarSet, b: VarSet, given: VarSet) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::domain("independence statement with an empty side"));
        }
        if !a.is_disjoint(b) || !a.is_disjoint(given) || !b.is_disjoint(given) {
            return Err(Error::domain("independence statement sets must be disjoint"));
        }
        Ok(CondIndep { a, b, given })
    }

    pub fn all(&self) -> VarSet {
        self.a.union(self.b).union(self.given)
    }
}

impl fmt::Display for CondIndep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} _||_ {} | {}", self.a, self.b, self.given)
    }
}

fn entropy_of_masses(masses: &[f64]) -> f64 {
    -masses
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| q * q.log2())
        .sum::<f64>()
}

fn cross_entropy_of_masses(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            acc -= pi * qi.log2();
        }
    }
    acc
}

fn dirichlet_row<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..len).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

fn ensure_same_alphabets(p: &JointPmf, q: &JointPmf, over: VarSet) -> Result<()> {
    for i in over.iter() {
        match (p.cardinality_of(i), q.cardinality_of(i)) {
            (Some(a), Some(b)) if a == b => {}
            (Some(_), Some(_)) => {
                return Err(Error::domain(format!("variable {i} has different alphabets")))
            }
            _ => return Err(Error::domain(format!("variable {i} missing from a pmf"))),
        }
    }
    Ok(())
}

/// `H(of)` under `p`.
pub fn entropy(p: &JointPmf, of: VarSet) -> Result<f64> {
    p.entropy(of)
}

/// `I(a; b | given)` under `p`, computed from four entropies.
pub fn mutual_information(p: &JointPmf, a: VarSet, b: VarSet, given: VarSet) -> Result<f64> {
    if !a.is_disjoint(b) || !a.is_disjoint(given) || !b.is_disjoint(given) {
        return Err(Error::domain("mutual information arguments must be disjoint"));
    }
    let ag = p.entropy(a.union(given))?;
    let bg = p.entropy(b.union(given))?;
    let abg = p.entropy(a.union(b).union(given))?;
    let g = p.entropy(given)?;
    Ok(ag + bg - abg - g)
}

/// `D(p || q)` between two pmfs over the same variables and alphabets.
pub fn kl(p: &JointPmf, q: &JointPmf) -> Result<f64> {
    if p.cardinalities() != q.cardinalities()
        || p.variables().iter().map(|v| v.index).ne(q.variables().iter().map(|v| v.index))
    {
        return Err(Error::domain("kl requires identical variables and alphabets"));
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.mass().iter().zip(q.mass()) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += pi * (pi / qi).log2();
        }
    }
    Ok(acc)
}

/// `D(P_e(of) || P_c(of) | P_e(given))`: the expectation is taken under the
/// encoding law, with the numerator conditional from `pe` and the
/// denominator conditional from `pc`.
pub fn conditional_kl(pe: &JointPmf, pc: &JointPmf, of: VarSet, given: VarSet) -> Result<f64> {
    if !of.is_disjoint(given) {
        return Err(Error::domain("conditional divergence sets overlap"));
    }
    let all = of.union(given);
    ensure_same_alphabets(pe, pc, all)?;
    let order: Vec<usize> = given.iter().chain(of.iter()).collect();
    let e = pe.marginal(&order)?;
    let c = pc.marginal(&order)?;
    let width: usize = e.cardinalities()[given.len()..].iter().product();
    let mut acc = 0.0;
    for (e_row, c_row) in e.mass().chunks(width).zip(c.mass().chunks(width)) {
        let e_total: f64 = e_row.iter().sum();
        if e_total <= 0.0 {
            continue;
        }
        let c_total: f64 = c_row.iter().sum();
        for (&pe_go, &pc_go) in e_row.iter().zip(c_row) {
            if pe_go <= 0.0 {
                continue;
            }
            if pc_go <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += pe_go * ((pe_go / e_total) / (pc_go / c_total)).log2();
        }
    }
    Ok(acc)
}

/// Cross-entropy `-sum p log2 q`, equal to `D(p||q) + H(p)`.
pub fn inaccuracy(p: &JointPmf, q: &JointPmf) -> Result<f64> {
    let d = kl(p, q)?;
    if d.is_infinite() {
        return Ok(d);
    }
    Ok(cross_entropy_of_masses(p.mass(), q.mass()))
}

/// True iff `p` satisfies the statement to within [`FACTORIZATION_TOLERANCE`]
/// in max norm.
pub fn check_factorization(p: &JointPmf, ci: &CondIndep) -> bool {
    let order: Vec<usize> = ci.given.iter().chain(ci.a.iter()).chain(ci.b.iter()).collect();
    let Ok(m) = p.marginal(&order) else {
        return false;
    };
    let c_len = ci.given.len();
    let a_len = ci.a.len();
    let cards = m.cardinalities();
    let a_card: usize = cards[c_len..c_len + a_len].iter().product();
    let b_card: usize = cards[c_len + a_len..].iter().product();
    for block in m.mass().chunks(a_card * b_card) {
        let pc: f64 = block.iter().sum();
        for ia in 0..a_card {
            let pac: f64 = block[ia * b_card..(ia + 1) * b_card].iter().sum();
            for ib in 0..b_card {
                let pbc: f64 = (0..a_card).map(|k| block[k * b_card + ib]).sum();
                let rebuilt = if pc > 0.0 { pac * pbc / pc } else { 0.0 };
                if (block[ia * b_card + ib] - rebuilt).abs() > FACTORIZATION_TOLERANCE {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(mass: [f64; 4]) -> JointPmf {
        JointPmf::from_cards(vec![2, 2], mass.to_vec()).unwrap()
    }

    fn binary(p0: f64) -> JointPmf {
        JointPmf::from_cards(vec![2], vec![p0, 1.0 - p0]).unwrap()
    }

    fn s(ix: &[usize]) -> VarSet {
        VarSet::from_indices(ix.iter().copied())
    }

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    /// Doubly symmetric binary pair with the given crossover.
    fn dsbs(cross: f64) -> JointPmf {
        bits([(1.0 - cross) / 2.0, cross / 2.0, cross / 2.0, (1.0 - cross) / 2.0])
    }

    #[test]
    fn marginal_examples() {
        let u = JointPmf::uniform(vec![2, 2]).unwrap();
        assert_eq!(u.marginal(&[0]).unwrap().mass(), &[0.5, 0.5]);

        let p = bits([0.1, 0.2, 0.3, 0.4]);
        let m = p.marginal(&[0]).unwrap();
        assert!((m.mass()[0] - 0.3).abs() < 1e-15);
        assert!((m.mass()[1] - 0.7).abs() < 1e-15);

        assert_eq!(p.marginal(&[0, 1]).unwrap(), p);
    }

    #[test]
    fn marginal_preserves_requested_order() {
        let p = bits([0.1, 0.2, 0.3, 0.4]);
        let swapped = p.marginal(&[1, 0]).unwrap();
        assert_eq!(swapped.variables()[0].index, 1);
        // p(u1=0,u0=1) = p(u0=1,u1=0) = 0.3
        assert!((swapped.prob(&[0, 1]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn marginal_unknown_variable() {
        let p = bits([0.25; 4]);
        assert!(matches!(p.marginal(&[5]), Err(Error::Domain(_))));
    }

    #[test]
    fn conditional_examples() {
        let indep = binary(0.3).product(&JointPmf::new(
            vec![VariableId::new(1, "b")],
            vec![2],
            vec![0.6, 0.4],
        ).unwrap()).unwrap();
        let k = indep.conditional(&[1], &[0]).unwrap();
        for r in 0..2 {
            let row = k.row(r).unwrap();
            assert!((row[0] - 0.6).abs() < 1e-12 && (row[1] - 0.4).abs() < 1e-12);
        }

        let p = bits([0.1, 0.2, 0.3, 0.4]);
        let k = p.conditional(&[1], &[0]).unwrap();
        assert!((k.row(0).unwrap()[1] - 2.0 / 3.0).abs() < 1e-12);

        let copy = bits([0.5, 0.0, 0.0, 0.5]);
        let k = copy.conditional(&[1], &[0]).unwrap();
        assert_eq!(k.row(0).unwrap(), &[1.0, 0.0]);
        assert_eq!(k.row(1).unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn conditional_flags_unsupported_rows() {
        let p = bits([0.5, 0.5, 0.0, 0.0]);
        let k = p.conditional(&[1], &[0]).unwrap();
        assert!(k.is_supported(0));
        assert!(!k.is_supported(1));
    }

    #[test]
    fn conditional_overlap_is_domain_error() {
        let p = bits([0.25; 4]);
        assert!(matches!(p.conditional(&[0], &[0, 1]), Err(Error::Domain(_))));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary(0.5).entropy(s(&[0])).unwrap(), 1.0);
        assert_eq!(binary(1.0).entropy(s(&[0])).unwrap(), 0.0);
        // Oracle in natural logs: h(0.11) = 0.499916 bits.
        let h = binary(0.11).entropy(s(&[0])).unwrap();
        let oracle = -(0.11f64 * 0.11f64.ln() + 0.89 * 0.89f64.ln()) / std::f64::consts::LN_2;
        assert!((h - oracle).abs() < 1e-12, "{h}");
        assert!((h - 0.499916).abs() < 1e-6, "{h}");
    }

    #[test]
    fn mutual_information_examples() {
        let indep = JointPmf::uniform(vec![2, 2]).unwrap();
        assert!(mutual_information(&indep, s(&[0]), s(&[1]), VarSet::EMPTY).unwrap().abs() < 1e-12);
        let copy = bits([0.5, 0.0, 0.0, 0.5]);
        assert!((mutual_information(&copy, s(&[0]), s(&[1]), VarSet::EMPTY).unwrap() - 1.0).abs() < 1e-12);
        let i = mutual_information(&dsbs(0.1), s(&[0]), s(&[1]), VarSet::EMPTY).unwrap();
        assert!((i - 0.53100).abs() < 1e-4, "{i}");
        assert!((i - (1.0 - h2(0.1))).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_rejects_overlap() {
        let p = JointPmf::uniform(vec![2, 2]).unwrap();
        assert!(mutual_information(&p, s(&[0]), s(&[0, 1]), VarSet::EMPTY).is_err());
    }

    #[test]
    fn kl_examples() {
        let p = binary(0.5);
        assert_eq!(kl(&p, &p).unwrap(), 0.0);
        let d = kl(&binary(0.5), &binary(0.25)).unwrap();
        assert!((d - 0.20752).abs() < 1e-4, "{d}");
        assert!((kl(&binary(1.0), &binary(0.5)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(kl(&binary(0.5), &binary(1.0)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn kl_alphabet_mismatch() {
        let p = binary(0.5);
        let q = JointPmf::uniform(vec![3]).unwrap();
        assert!(matches!(kl(&p, &q), Err(Error::Domain(_))));
    }

    #[test]
    fn conditional_kl_examples() {
        let pe = dsbs(0.1);
        assert_eq!(conditional_kl(&pe, &pe, s(&[1]), s(&[0])).unwrap(), 0.0);

        let pc = JointPmf::from_cards(vec![2, 2], vec![0.1, 0.3, 0.2, 0.4]).unwrap();
        let unconditional = conditional_kl(&pe, &pc, s(&[1]), VarSet::EMPTY).unwrap();
        let direct = kl(&pe.marginal(&[1]).unwrap(), &pc.marginal(&[1]).unwrap()).unwrap();
        assert!((unconditional - direct).abs() < 1e-12);

        let product = JointPmf::uniform(vec![2, 2]).unwrap();
        let d = conditional_kl(&pe, &product, s(&[1]), s(&[0])).unwrap();
        assert!((d - 0.53100).abs() < 1e-4, "{d}");
    }

    #[test]
    fn conditional_kl_support_violation() {
        let pe = JointPmf::uniform(vec![2, 2]).unwrap();
        let pc = bits([0.5, 0.0, 0.0, 0.5]);
        assert_eq!(conditional_kl(&pe, &pc, s(&[1]), s(&[0])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn inaccuracy_examples() {
        let p = binary(0.3);
        assert!((inaccuracy(&p, &p).unwrap() - p.entropy(s(&[0])).unwrap()).abs() < 1e-12);
        let x = inaccuracy(&binary(0.5), &binary(0.25)).unwrap();
        assert!((x - 1.20752).abs() < 1e-4, "{x}");
        assert!((inaccuracy(&binary(1.0), &binary(0.5)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn factorization_examples() {
        let indep = binary(0.3).product(&JointPmf::new(
            vec![VariableId::new(1, "b")],
            vec![2],
            vec![0.6, 0.4],
        ).unwrap()).unwrap();
        let stmt = CondIndep::new(s(&[0]), s(&[1]), VarSet::EMPTY).unwrap();
        assert!(check_factorization(&indep, &stmt));
        assert!(!check_factorization(&bits([0.5, 0.0, 0.0, 0.5]), &stmt));

        // P(u0) P(u1|u0) P(u2|u0)
        let p0 = [0.3, 0.7];
        let p1 = [[0.9, 0.1], [0.2, 0.8]];
        let p2 = [[0.6, 0.4], [0.35, 0.65]];
        let mut mass = Vec::new();
        for a in 0..2 {
            for pb in p1[a] {
                for pc in p2[a] {
                    mass.push(p0[a] * pb * pc);
                }
            }
        }
        let p = JointPmf::from_cards(vec![2, 2, 2], mass).unwrap();
        let markov = CondIndep::new(s(&[1]), s(&[2]), s(&[0])).unwrap();
        assert!(check_factorization(&p, &markov));
        let unconditional = CondIndep::new(s(&[1]), s(&[2]), VarSet::EMPTY).unwrap();
        assert!(!check_factorization(&p, &unconditional));
    }

    #[test]
    fn ingestion_validation() {
        assert!(JointPmf::from_cards(vec![2], vec![0.5, 0.4]).is_err());
        assert!(JointPmf::from_cards(vec![2], vec![-0.1, 1.1]).is_err());
        assert!(JointPmf::from_cards(vec![2], vec![0.5, 0.5, 0.0]).is_err());
        let p = JointPmf::from_cards(vec![2], vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((p.mass().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(JointPmf::from_cards(vec![10_000, 10_000], vec![]).is_err());
    }

    #[test]
    fn extend_with_channel() {
        let u = binary(0.5);
        let bsc = |x: &[usize]| if x[0] == 0 { vec![0.9, 0.1] } else { vec![0.1, 0.9] };
        let joint = u.extend_with(vec![VariableId::new(1, "Y")], vec![2], bsc).unwrap();
        let i = mutual_information(&joint, s(&[0]), s(&[1]), VarSet::EMPTY).unwrap();
        assert!((i - (1.0 - h2(0.1))).abs() < 1e-12);
    }
}
