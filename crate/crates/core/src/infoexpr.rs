//! Exact linear combinations of entropy atoms.
//!
//! Every information constant used in a rate region is expressed in the
//! basis
//!
//! * `H_c{S}`: entropy of `S` under the codebook law,
//! * `H_e{S}`: entropy of `S` under the encoding law,
//! * `X{S}`: cross-entropy `-sum P_e(S) log2 P_c(S)`,
//!
//! with arbitrary-precision rational coefficients. Conditional independence
//! statements are applied as rewrite rules so that expressions equal under a
//! factorization share a normal form.
//!
//! The text form is a sequence of signed terms, e.g.
//! `+1 H_e{1,2} -1 X{1,2} +3/2 H_c{0}`; a signed coefficient not followed by
//! an atom is the scalar part.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxflow::FlowNetwork;
use crate::prob::{CondIndep, DistLabel, JointPmf};
use crate::varset::VarSet;

/// Upper bound on rewrite steps in [`InfoExpr::canonicalize`].
const MAX_REWRITE_STEPS: usize = 1_000_000;

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.125` exactly.
pub fn parse_ratio(text: &str) -> Result<BigRational> {
    let bad = || Error::validation("ratio", format!("cannot read `{text}` as a rational number"));
    let t = text.trim();
    if t.contains('/') {
        return BigRational::from_str(t).map_err(|_| bad());
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() || !(whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let value = BigRational::new(digits, scale);
    Ok(if negative { -value } else { value })
}

/// One basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Ent(DistLabel, VarSet),
    Xent(VarSet),
}

impl Atom {
    pub fn vars(self) -> VarSet {
        match self {
            Atom::Ent(_, s) | Atom::Xent(s) => s,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Ent(l, s) => write!(f, "H_{l}{s}"),
            Atom::Xent(s) => write!(f, "X{s}"),
        }
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation("expression", format!("malformed atom `{s}`"));
        let (head, rest) = s.split_at(s.find('{').ok_or_else(bad)?);
        let inner = rest
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(bad)?;
        let mut set = VarSet::EMPTY;
        for tok in inner.split(',').filter(|t| !t.trim().is_empty()) {
            let i: usize = tok.trim().parse().map_err(|_| bad())?;
            if i >= crate::varset::MAX_VARS || set.contains(i) {
                return Err(bad());
            }
            set = set.union(VarSet::singleton(i));
        }
        if set.is_empty() {
            return Err(Error::validation("expression", format!("atom `{s}` has an empty set")));
        }
        match head {
            "H_c" => Ok(Atom::Ent(DistLabel::Codebook, set)),
            "H_e" => Ok(Atom::Ent(DistLabel::Encoding, set)),
            "X" => Ok(Atom::Xent(set)),
            _ => Err(bad()),
        }
    }
}

/// A conditional-independence statement holding under one of the two laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CIIdentity {
    pub statement: CondIndep,
    pub label: DistLabel,
}

impl CIIdentity {
    pub fn new(a: VarSet, b: VarSet, given: VarSet, label: DistLabel) -> Result<Self> {
        Ok(CIIdentity {
            statement: CondIndep::new(a, b, given)?,
            label,
        })
    }

    /// Whether the identity factorizes the law of `s`: `s` lies inside the
    /// statement's variables, contains the conditioning set and meets both
    /// sides.
    pub fn matches_set(&self, s: VarSet) -> bool {
        let CondIndep { a, b, given } = self.statement;
        s.is_subset(self.statement.all())
            && given.is_subset(s)
            && !s.intersection(a).is_empty()
            && !s.intersection(b).is_empty()
    }

    /// Whether the identity rewrites this atom. Codebook statements also
    /// rewrite cross-entropy atoms, which take logarithms of the codebook law.
    pub fn matches(&self, atom: Atom) -> bool {
        let applies = match atom {
            Atom::Ent(l, _) => l == self.label,
            Atom::Xent(_) => self.label == DistLabel::Codebook,
        };
        applies && self.matches_set(atom.vars())
    }

    /// `S -> S∩(A∪C) + S∩(B∪C) - C`, as `(plus, plus, minus)` sets.
    fn split(&self, s: VarSet) -> (VarSet, VarSet, VarSet) {
        let CondIndep { a, b, given } = self.statement;
        (
            s.intersection(a.union(given)),
            s.intersection(b.union(given)),
            given,
        )
    }
}

impl fmt::Display for CIIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} under {}", self.statement, self.label)
    }
}

/// Exact rational combination of atoms plus a scalar, in sparse canonical
/// form (no zero coefficients stored).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct InfoExpr {
    terms: BTreeMap<Atom, BigRational>,
    scalar: BigRational,
}

impl InfoExpr {
    pub fn zero() -> Self {
        InfoExpr::default()
    }

    pub fn constant(c: BigRational) -> Self {
        InfoExpr {
            terms: BTreeMap::new(),
            scalar: c,
        }
    }

    /// A single atom with coefficient one; empty sets give zero.
    pub fn atom(atom: Atom) -> Self {
        let mut e = InfoExpr::zero();
        e.add_term(atom, BigRational::one());
        e
    }

    pub fn ent(label: DistLabel, s: VarSet) -> Self {
        InfoExpr::atom(Atom::Ent(label, s))
    }

    pub fn xent(s: VarSet) -> Self {
        InfoExpr::atom(Atom::Xent(s))
    }

    pub fn terms(&self) -> impl Iterator<Item = (Atom, &BigRational)> {
        self.terms.iter().map(|(a, c)| (*a, c))
    }

    pub fn coefficient(&self, atom: Atom) -> BigRational {
        self.terms.get(&atom).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scalar(&self) -> &BigRational {
        &self.scalar
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.scalar.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Union of all variable sets mentioned.
    pub fn support(&self) -> VarSet {
        self.terms.keys().fold(VarSet::EMPTY, |acc, a| acc.union(a.vars()))
    }

    /// Adds `coeff * atom`, folding atoms over the empty set to zero.
    pub fn add_term(&mut self, atom: Atom, coeff: BigRational) {
        if atom.vars().is_empty() || coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(atom).or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&atom);
        }
    }

    pub fn scale(&self, k: &BigRational) -> InfoExpr {
        if k.is_zero() {
            return InfoExpr::zero();
        }
        InfoExpr {
            terms: self.terms.iter().map(|(a, c)| (*a, c * k)).collect(),
            scalar: &self.scalar * k,
        }
    }

    /// `H_l(of | given)`.
    pub fn cond_entropy(label: DistLabel, of: VarSet, given: VarSet) -> Result<Self> {
        if !of.is_disjoint(given) {
            return Err(Error::domain("conditional entropy sets overlap"));
        }
        Ok(InfoExpr::ent(label, of.union(given)) - InfoExpr::ent(label, given))
    }

    /// `I_l(a; b | given)` as four entropy atoms.
    pub fn mutual_information(label: DistLabel, a: VarSet, b: VarSet, given: VarSet) -> Result<Self> {
        if !a.is_disjoint(b) || !a.is_disjoint(given) || !b.is_disjoint(given) {
            return Err(Error::domain("mutual information arguments must be disjoint"));
        }
        Ok(InfoExpr::ent(label, a.union(given)) + InfoExpr::ent(label, b.union(given))
            - InfoExpr::ent(label, a.union(b).union(given))
            - InfoExpr::ent(label, given))
    }

    /// `D(P_e(of) || P_c(of) | P_e(given))`.
    pub fn kl_cond(of: VarSet, given: VarSet) -> Result<Self> {
        if !of.is_disjoint(given) {
            return Err(Error::domain("conditional divergence sets overlap"));
        }
        let all = of.union(given);
        Ok(InfoExpr::xent(all) - InfoExpr::xent(given) - InfoExpr::ent(DistLabel::Encoding, all)
            + InfoExpr::ent(DistLabel::Encoding, given))
    }

    /// Numeric value under an encoding law `pe` and codebook law `pc`.
    ///
    /// An infinite cross-entropy atom makes the whole value `+inf`.
    pub fn evaluate(&self, pe: &JointPmf, pc: &JointPmf) -> Result<f64> {
        let mut acc = self.scalar.to_f64().unwrap_or(f64::NAN);
        for (atom, coeff) in &self.terms {
            let value = match *atom {
                Atom::Ent(DistLabel::Encoding, s) => pe.entropy(s)?,
                Atom::Ent(DistLabel::Codebook, s) => pc.entropy(s)?,
                Atom::Xent(s) => pe.cross_entropy(pc, s)?,
            };
            if value.is_infinite() {
                return Ok(f64::INFINITY);
            }
            acc += coeff.to_f64().unwrap_or(f64::NAN) * value;
        }
        Ok(acc)
    }

    /// Rewrites to the normal form under `identities`: the largest matched
    /// set is split first, using the first identity in list order that
    /// matches it, until no atom is matched.
    pub fn canonicalize(&self, identities: &[CIIdentity]) -> Result<InfoExpr> {
        let mut expr = self.clone();
        let mut last: Option<CIIdentity> = None;
        for _ in 0..MAX_REWRITE_STEPS {
            let target = expr
                .terms
                .keys()
                .filter_map(|&atom| {
                    identities
                        .iter()
                        .find(|id| id.matches(atom))
                        .map(|id| (atom, *id))
                })
                .max_by(|(x, _), (y, _)| {
                    x.vars().len().cmp(&y.vars().len()).then_with(|| y.cmp(x))
                });
            let Some((atom, id)) = target else {
                return Ok(expr);
            };
            let coeff = expr.terms.remove(&atom).expect("atom present");
            let (p, q, m) = id.split(atom.vars());
            let rebuild = |s: VarSet| match atom {
                Atom::Ent(l, _) => Atom::Ent(l, s),
                Atom::Xent(_) => Atom::Xent(s),
            };
            expr.add_term(rebuild(p), coeff.clone());
            expr.add_term(rebuild(q), coeff.clone());
            expr.add_term(rebuild(m), -coeff);
            last = Some(id);
        }
        let name = |id: Option<CIIdentity>| id.map(|i| i.to_string()).unwrap_or_default();
        Err(Error::RewriteCycle {
            first: name(last),
            second: name(identities.first().copied()),
        })
    }

    /// Substitutes the codebook law by the encoding law: cross-entropies and
    /// codebook entropies become encoding entropies.
    pub fn specialize_equal_laws(&self) -> InfoExpr {
        let mut out = InfoExpr::constant(self.scalar.clone());
        for (atom, c) in &self.terms {
            let s = atom.vars();
            out.add_term(Atom::Ent(DistLabel::Encoding, s), c.clone());
        }
        out
    }

    /// Substitutes a codebook law equal to the product of the encoding
    /// single-variable marginals.
    pub fn specialize_product_codebook(&self) -> InfoExpr {
        let mut out = InfoExpr::constant(self.scalar.clone());
        for (atom, c) in &self.terms {
            match *atom {
                Atom::Ent(DistLabel::Encoding, _) => out.add_term(*atom, c.clone()),
                Atom::Ent(DistLabel::Codebook, s) | Atom::Xent(s) => {
                    for v in s.iter() {
                        out.add_term(
                            Atom::Ent(DistLabel::Encoding, VarSet::singleton(v)),
                            c.clone(),
                        );
                    }
                }
            }
        }
        out
    }

    /// Decomposes the expression as `scalar + sum_S a_S D(S)` with
    /// `D(S) = X{S} - H_e{S}`, if it has that shape.
    pub fn divergence_coordinates(&self) -> Option<BTreeMap<VarSet, BigRational>> {
        let mut coords = BTreeMap::new();
        for (atom, c) in &self.terms {
            match *atom {
                Atom::Xent(s) => {
                    let paired = self.terms.get(&Atom::Ent(DistLabel::Encoding, s));
                    if paired != Some(&-c.clone()) {
                        return None;
                    }
                    coords.insert(s, c.clone());
                }
                Atom::Ent(DistLabel::Encoding, s) => {
                    if !self.terms.contains_key(&Atom::Xent(s)) {
                        return None;
                    }
                }
                Atom::Ent(DistLabel::Codebook, _) => return None,
            }
        }
        Some(coords)
    }

    /// Sufficient condition for the expression to be nonnegative for every
    /// pair of laws.
    ///
    /// Marginal divergences are monotone in the variable set, so
    /// `sum_S a_S D(S) >= 0` whenever the negative mass on each set can be
    /// routed to positive coefficients on strict supersets. This is decided
    /// with a max-flow computation.
    pub fn is_certified_nonnegative(&self) -> bool {
        if self.scalar.is_negative() {
            return false;
        }
        let Some(coords) = self.divergence_coordinates() else {
            return false;
        };
        let (pos, neg): (Vec<_>, Vec<_>) = coords.into_iter().partition(|(_, c)| c.is_positive());
        if neg.is_empty() {
            return true;
        }
        let demand: BigRational = neg.iter().map(|(_, c)| -c.clone()).sum();
        // source = 0, positives 1..=p, negatives p+1..=p+n, sink = p+n+1
        let p = pos.len();
        let n = neg.len();
        let mut net = FlowNetwork::new(p + n + 2);
        let sink = p + n + 1;
        for (i, (_, c)) in pos.iter().enumerate() {
            net.add_edge(0, 1 + i, c.clone());
        }
        for (j, (_, c)) in neg.iter().enumerate() {
            net.add_edge(p + 1 + j, sink, -c.clone());
        }
        for (i, (s, c)) in pos.iter().enumerate() {
            for (j, (t, _)) in neg.iter().enumerate() {
                if t.is_subset(*s) {
                    net.add_edge(1 + i, p + 1 + j, c.clone());
                }
            }
        }
        net.max_flow(0, sink) == demand
    }
}

impl Add for InfoExpr {
    type Output = InfoExpr;
    fn add(mut self, rhs: InfoExpr) -> InfoExpr {
        self += rhs;
        self
    }
}

impl AddAssign for InfoExpr {
    fn add_assign(&mut self, rhs: InfoExpr) {
        self.scalar += rhs.scalar;
        for (a, c) in rhs.terms {
            self.add_term(a, c);
        }
    }
}

impl Neg for InfoExpr {
    type Output = InfoExpr;
    fn neg(self) -> InfoExpr {
        InfoExpr {
            terms: self.terms.into_iter().map(|(a, c)| (a, -c)).collect(),
            scalar: -self.scalar,
        }
    }
}

impl Sub for InfoExpr {
    type Output = InfoExpr;
    fn sub(self, rhs: InfoExpr) -> InfoExpr {
        self + (-rhs)
    }
}

impl Mul<&BigRational> for InfoExpr {
    type Output = InfoExpr;
    fn mul(self, k: &BigRational) -> InfoExpr {
        self.scale(k)
    }
}

impl std::iter::Sum for InfoExpr {
    fn sum<I: Iterator<Item = InfoExpr>>(iter: I) -> InfoExpr {
        iter.fold(InfoExpr::zero(), Add::add)
    }
}

fn signed(c: &BigRational) -> String {
    if c.is_negative() {
        c.to_string()
    } else {
        format!("+{c}")
    }
}

impl fmt::Display for InfoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (atom, c) in &self.terms {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{} {atom}", signed(c))?;
        }
        if !self.scalar.is_zero() {
            if !first {
                f.write_str(" ")?;
            }
            f.write_str(&signed(&self.scalar))?;
        }
        Ok(())
    }
}

fn parse_rational(tok: &str) -> Result<BigRational> {
    let body = tok.strip_prefix('+').unwrap_or(tok);
    BigRational::from_str(body)
        .map_err(|_| Error::validation("expression", format!("malformed coefficient `{tok}`")))
}

impl FromStr for InfoExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens == ["0"] {
            return Ok(InfoExpr::zero());
        }
        let mut expr = InfoExpr::zero();
        let mut i = 0;
        while i < tokens.len() {
            let tok = tokens[i];
            if !tok.starts_with(['+', '-']) {
                return Err(Error::validation(
                    "expression",
                    format!("expected a signed coefficient, found `{tok}`"),
                ));
            }
            let c = parse_rational(tok)?;
            match tokens.get(i + 1) {
                Some(next) if next.starts_with(['H', 'X']) => {
                    expr.add_term(next.parse()?, c);
                    i += 2;
                }
                _ => {
                    expr.scalar += c;
                    i += 1;
                }
            }
        }
        Ok(expr)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<DistLabel>,
    vars: VarSet,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExprDoc {
    text: String,
    scalar: String,
    terms: Vec<TermDoc>,
}

impl Serialize for InfoExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| match *a {
                Atom::Ent(l, s) => TermDoc {
                    kind: "ent".into(),
                    label: Some(l),
                    vars: s,
                    coeff: c.to_string(),
                },
                Atom::Xent(s) => TermDoc {
                    kind: "xent".into(),
                    label: None,
                    vars: s,
                    coeff: c.to_string(),
                },
            })
            .collect();
        ExprDoc {
            text: self.to_string(),
            scalar: self.scalar.to_string(),
            terms,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for InfoExpr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = ExprDoc::deserialize(deserializer)?;
        let mut expr = InfoExpr::constant(parse_rational(&doc.scalar).map_err(D::Error::custom)?);
        for t in doc.terms {
            let atom = match (t.kind.as_str(), t.label) {
                ("ent", Some(l)) => Atom::Ent(l, t.vars),
                ("xent", None) => Atom::Xent(t.vars),
                _ => return Err(D::Error::custom(format!("bad term kind `{}`", t.kind))),
            };
            if t.vars.is_empty() {
                return Err(D::Error::custom("term over the empty set"));
            }
            expr.add_term(atom, parse_rational(&t.coeff).map_err(D::Error::custom)?);
        }
        Ok(expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{conditional_kl, JointPmf};
    use DistLabel::{Codebook as C, Encoding as E};

    fn s(ix: &[usize]) -> VarSet {
        VarSet::from_indices(ix.iter().copied())
    }

    fn dsbs(cross: f64) -> JointPmf {
        let a = (1.0 - cross) / 2.0;
        let b = cross / 2.0;
        JointPmf::from_cards(vec![2, 2], vec![a, b, b, a]).unwrap()
    }

    #[test]
    fn mutual_information_shapes() {
        let i = InfoExpr::mutual_information(E, s(&[1]), s(&[2]), VarSet::EMPTY).unwrap();
        assert_eq!(i.to_string(), "+1 H_e{1} -1 H_e{1,2} +1 H_e{2}");
        let i = InfoExpr::mutual_information(E, s(&[3]), s(&[1]), s(&[0])).unwrap();
        assert_eq!(i.terms().count(), 4);
        assert!(InfoExpr::mutual_information(E, s(&[1]), s(&[1]), VarSet::EMPTY).is_err());
    }

    #[test]
    fn chain_rule() {
        let (a, b, g) = (s(&[0]), s(&[1]), s(&[2]));
        let lhs = InfoExpr::mutual_information(E, a, b, g).unwrap()
            + InfoExpr::mutual_information(E, a, g, VarSet::EMPTY).unwrap();
        let rhs = InfoExpr::mutual_information(E, a, b.union(g), VarSet::EMPTY).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn kl_cond_shapes() {
        let d = InfoExpr::kl_cond(s(&[1, 2]), VarSet::EMPTY).unwrap();
        assert_eq!(d, InfoExpr::xent(s(&[1, 2])) - InfoExpr::ent(E, s(&[1, 2])));
        let p = dsbs(0.1);
        let d = InfoExpr::kl_cond(s(&[1]), s(&[0])).unwrap();
        assert_eq!(d.evaluate(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_cond_matches_direct_divergence() {
        let pe = dsbs(0.1);
        let pc = JointPmf::uniform(vec![2, 2]).unwrap();
        let d = InfoExpr::kl_cond(s(&[1]), s(&[0])).unwrap();
        let v = d.evaluate(&pe, &pc).unwrap();
        let direct = conditional_kl(&pe, &pc, s(&[1]), s(&[0])).unwrap();
        assert!((v - direct).abs() < 1e-12);
        assert!((v - 0.53100).abs() < 1e-4, "{v}");
    }

    #[test]
    fn evaluate_examples() {
        let fair = JointPmf::from_cards(vec![2], vec![0.5, 0.5]).unwrap();
        assert_eq!(InfoExpr::ent(E, s(&[0])).evaluate(&fair, &fair).unwrap(), 1.0);
        let pc = JointPmf::from_cards(vec![2], vec![0.25, 0.75]).unwrap();
        let d = InfoExpr::kl_cond(s(&[0]), VarSet::EMPTY).unwrap();
        assert!((d.evaluate(&fair, &pc).unwrap() - 0.20752).abs() < 1e-4);
        assert_eq!(InfoExpr::zero().evaluate(&fair, &pc).unwrap(), 0.0);
        let point = JointPmf::from_cards(vec![2], vec![1.0, 0.0]).unwrap();
        assert_eq!(d.evaluate(&fair, &point).unwrap(), f64::INFINITY);
    }

    #[test]
    fn canonicalize_splits_matched_sets() {
        let id = CIIdentity::new(s(&[1]), s(&[2]), s(&[0]), C).unwrap();
        let e = InfoExpr::ent(C, s(&[0, 1, 2]));
        let expected = InfoExpr::ent(C, s(&[0, 1])) + InfoExpr::ent(C, s(&[0, 2])) - InfoExpr::ent(C, s(&[0]));
        assert_eq!(e.canonicalize(&[id]).unwrap(), expected);

        let untouched = InfoExpr::ent(E, s(&[0, 1, 2])) + InfoExpr::ent(C, s(&[1]));
        assert_eq!(untouched.canonicalize(&[id]).unwrap(), untouched);

        let x = InfoExpr::xent(s(&[0, 1, 2]));
        let expected = InfoExpr::xent(s(&[0, 1])) + InfoExpr::xent(s(&[0, 2])) - InfoExpr::xent(s(&[0]));
        assert_eq!(x.canonicalize(&[id]).unwrap(), expected);
    }

    #[test]
    fn canonicalize_requires_conditioning_set() {
        let id = CIIdentity::new(s(&[1]), s(&[2]), s(&[0]), C).unwrap();
        let e = InfoExpr::ent(C, s(&[1, 2]));
        assert_eq!(e.canonicalize(&[id]).unwrap(), e);
    }

    #[test]
    fn specializations() {
        let d = InfoExpr::kl_cond(s(&[1]), s(&[0])).unwrap();
        assert!(d.specialize_equal_laws().is_zero());
        let i = InfoExpr::mutual_information(E, s(&[0]), s(&[1]), VarSet::EMPTY).unwrap();
        let d = InfoExpr::kl_cond(s(&[0, 1]), VarSet::EMPTY).unwrap();
        assert_eq!(d.specialize_product_codebook(), i);
    }

    #[test]
    fn certificates() {
        let d1 = InfoExpr::kl_cond(s(&[1]), s(&[0])).unwrap();
        assert!(d1.is_certified_nonnegative());
        assert!(!(-d1.clone()).is_certified_nonnegative());
        let d0 = InfoExpr::kl_cond(s(&[0]), VarSet::EMPTY).unwrap();
        assert!((d0.clone() + d1.clone()).is_certified_nonnegative());
        assert!(InfoExpr::zero().is_certified_nonnegative());
        assert!(InfoExpr::constant(rational(1, 2)).is_certified_nonnegative());
        assert!(!InfoExpr::constant(rational(-1, 2)).is_certified_nonnegative());
        // D({0,1}) - 2 D({0}) is not implied by monotonicity.
        let e = InfoExpr::kl_cond(s(&[0, 1]), VarSet::EMPTY).unwrap() - d0.clone() * &integer(2);
        assert!(!e.is_certified_nonnegative());
        // Mutual information is nonnegative but not of divergence type.
        let i = InfoExpr::mutual_information(E, s(&[0]), s(&[1]), VarSet::EMPTY).unwrap();
        assert!(!i.is_certified_nonnegative());
    }

    #[test]
    fn ratio_text() {
        assert_eq!(parse_ratio("1/2").unwrap(), rational(1, 2));
        assert_eq!(parse_ratio("-0.125").unwrap(), rational(-1, 8));
        assert_eq!(parse_ratio("3").unwrap(), integer(3));
        assert_eq!(parse_ratio(".5").unwrap(), rational(1, 2));
        for bad in ["", ".", "1e3", "a/b", "0.5.1"] {
            assert!(parse_ratio(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn text_round_trip() {
        let text = "+1 H_e{1,2} -1 X{1,2} +3/2 H_c{0}";
        let e: InfoExpr = text.parse().unwrap();
        assert_eq!(e.to_string(), "+3/2 H_c{0} +1 H_e{1,2} -1 X{1,2}");
        assert_eq!(e.to_string().parse::<InfoExpr>().unwrap(), e);
        let with_scalar: InfoExpr = "-2/3 X{0} +5".parse().unwrap();
        assert_eq!(with_scalar.scalar(), &integer(5));
        assert_eq!("0".parse::<InfoExpr>().unwrap(), InfoExpr::zero());
        assert!("+1 H_q{0}".parse::<InfoExpr>().is_err());
        assert!("+1 H_e{}".parse::<InfoExpr>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let e: InfoExpr = "+1 H_e{1,2} -1 X{1,2} +3/2 H_c{0} -1/7".parse().unwrap();
        let json = serde_json::to_string(&e).unwrap();
        let back: InfoExpr = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }
}
