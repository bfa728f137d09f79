//! Empirical types, strong typicality and sequence probabilities.
//!
//! A tuple of sequences is ε-typical for `p` when the L1 distance between
//! its joint type and `p` is at most ε and, in strict mode, no symbol with
//! zero probability under `p` occurs.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::prob::{JointPmf, VariableId};

/// Rounding allowance on the L1 radius.
pub const L1_SLACK: f64 = 1e-12;

/// A tuple of equal-length sequences, one column per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    vars: Vec<VariableId>,
    cards: Vec<usize>,
    columns: Vec<Vec<usize>>,
    len: usize,
}

impl Sequence {
    pub fn new(vars: Vec<VariableId>, cards: Vec<usize>, columns: Vec<Vec<usize>>) -> Result<Self> {
        if vars.len() != cards.len() || vars.len() != columns.len() || vars.is_empty() {
            return Err(Error::domain("sequence needs one column and cardinality per variable"));
        }
        let len = columns[0].len();
        if len == 0 {
            return Err(Error::domain("sequence length must be positive"));
        }
        for ((col, &card), v) in columns.iter().zip(&cards).zip(&vars) {
            if col.len() != len {
                return Err(Error::domain("sequence columns have different lengths"));
            }
            if let Some(s) = col.iter().find(|&&s| s >= card) {
                return Err(Error::domain(format!(
                    "symbol {s} out of range for variable {} with {card} letters",
                    v.index
                )));
            }
        }
        Ok(Sequence {
            vars,
            cards,
            columns,
            len,
        })
    }

    /// Single-variable sequence over variable `0`.
    pub fn single(card: usize, symbols: Vec<usize>) -> Result<Self> {
        Self::new(vec![VariableId::new(0, "V0")], vec![card], vec![symbols])
    }

    /// Draws `n` iid symbol tuples from `p`.
    pub fn sample<R: Rng + ?Sized>(p: &JointPmf, n: usize, rng: &mut R) -> Result<Self> {
        let dist = WeightedIndex::new(p.mass()).map_err(|e| Error::domain(e.to_string()))?;
        let mut columns = vec![Vec::with_capacity(n); p.cardinalities().len()];
        for _ in 0..n {
            let tuple = p.unflatten(dist.sample(rng));
            for (col, s) in columns.iter_mut().zip(tuple) {
                col.push(s);
            }
        }
        Self::new(p.variables().to_vec(), p.cardinalities().to_vec(), columns)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn variables(&self) -> &[VariableId] {
        &self.vars
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn column(&self, k: usize) -> &[usize] {
        &self.columns[k]
    }

    /// Concatenates the variables of several sequences of equal length.
    pub fn zip(parts: &[&Sequence]) -> Result<Self> {
        let mut vars = Vec::new();
        let mut cards = Vec::new();
        let mut columns = Vec::new();
        for s in parts {
            vars.extend(s.vars.iter().cloned());
            cards.extend(&s.cards);
            columns.extend(s.columns.iter().cloned());
        }
        Self::new(vars, cards, columns)
    }

    /// Flat index of every position in the layout of `p`.
    fn flat_in(&self, p: &JointPmf) -> Result<Vec<usize>> {
        if p.variables().len() != self.vars.len() {
            return Err(Error::domain("sequence and pmf have different variables"));
        }
        let mut order = Vec::with_capacity(self.vars.len());
        for (v, &card) in p.variables().iter().zip(p.cardinalities()) {
            let k = self
                .vars
                .iter()
                .position(|s| s.index == v.index)
                .ok_or_else(|| Error::domain(format!("variable {} missing from sequence", v.index)))?;
            if self.cards[k] != card {
                return Err(Error::domain(format!("variable {} has different alphabets", v.index)));
            }
            order.push(k);
        }
        Ok((0..self.len)
            .map(|n| {
                order
                    .iter()
                    .zip(p.cardinalities())
                    .fold(0, |acc, (&k, &c)| acc * c + self.columns[k][n])
            })
            .collect())
    }
}

/// Typicality radius and zero-support rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalityParams {
    epsilon: f64,
    zero_support_strict: bool,
}

impl TypicalityParams {
    /// `epsilon` is an L1 radius in `(0, 2]`; 2 is the largest possible
    /// L1 distance between two pmfs.
    pub fn new(epsilon: f64, zero_support_strict: bool) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 2.0) {
            return Err(Error::validation("epsilon", format!("{epsilon} is outside (0, 2]")));
        }
        Ok(TypicalityParams {
            epsilon,
            zero_support_strict,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn zero_support_strict(&self) -> bool {
        self.zero_support_strict
    }
}

/// Joint type as a pmf over the sequence's variables.
pub fn empirical_type(seq: &Sequence) -> Result<JointPmf> {
    let shape = JointPmf::uniform(seq.cards.clone())?;
    let mut counts = vec![0usize; shape.mass().len()];
    for n in 0..seq.len {
        let flat = seq
            .columns
            .iter()
            .zip(&seq.cards)
            .fold(0, |acc, (col, &c)| acc * c + col[n]);
        counts[flat] += 1;
    }
    let total = seq.len as f64;
    JointPmf::new(
        seq.vars.clone(),
        seq.cards.clone(),
        counts.into_iter().map(|c| c as f64 / total).collect(),
    )
}

/// Whether `seq` is ε-typical for `p`.
pub fn is_typical(seq: &Sequence, p: &JointPmf, params: TypicalityParams) -> Result<bool> {
    let flat = seq.flat_in(p)?;
    let mut checker = TypicalSet::new(p.mass().to_vec(), params);
    Ok(checker.contains(flat.into_iter()))
}

/// `sum_n log2 q(seq_n)`; `-inf` if some symbol has zero probability.
pub fn log_prob_under(seq: &Sequence, q: &JointPmf) -> Result<f64> {
    let flat = seq.flat_in(q)?;
    Ok(flat.into_iter().map(|f| q.mass()[f].log2()).sum())
}

/// Reusable typicality test over flat symbol indices of a fixed target pmf.
#[derive(Debug, Clone)]
pub struct TypicalSet {
    target: Vec<f64>,
    params: TypicalityParams,
    counts: Vec<u32>,
}

impl TypicalSet {
    pub fn new(target: Vec<f64>, params: TypicalityParams) -> Self {
        let counts = vec![0; target.len()];
        TypicalSet {
            target,
            params,
            counts,
        }
    }

    pub fn size(&self) -> usize {
        self.target.len()
    }

    /// Tests the sequence of flat symbols yielded by `flat`.
    pub fn contains(&mut self, flat: impl Iterator<Item = usize>) -> bool {
        self.counts.iter_mut().for_each(|c| *c = 0);
        let mut n = 0u32;
        for f in flat {
            if self.params.zero_support_strict && self.target[f] <= 0.0 {
                return false;
            }
            self.counts[f] += 1;
            n += 1;
        }
        if n == 0 {
            return true;
        }
        let total = f64::from(n);
        let l1: f64 = self
            .counts
            .iter()
            .zip(&self.target)
            .map(|(&c, &t)| (f64::from(c) / total - t).abs())
            .sum();
        l1 <= self.params.epsilon + L1_SLACK
    }
}
