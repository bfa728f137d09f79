//! Linear rate regions with symbolic information constants.
//!
//! A [`RateRegion`] is a system of inequalities over named rate symbols
//! whose right-hand sides are [`InfoExpr`] values. Regions can be projected
//! exactly with Fourier–Motzkin elimination, simplified with divergence
//! certificates, compared for symbolic equality, and instantiated into a
//! floating-point [`NumericPolytope`] for a concrete pair of laws.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fme::{Field, Numeric, System};
use crate::format::format_g9;
use crate::infoexpr::{CIIdentity, InfoExpr};
use crate::prob::JointPmf;

/// Tolerance for numeric membership tests.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Default number of support directions in [`NumericPolytope::boundary_2d`].
pub const DEFAULT_DIRECTIONS: usize = 720;

/// Half-width of the box used to detect unbounded support directions.
pub const BOUNDARY_BOX: f64 = 1e6;

const NUMERIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Message,
    Binning,
    Total,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RateSymbol {
    pub name: String,
    pub kind: SymbolKind,
}

impl RateSymbol {
    pub fn new(name: impl Into<String>, kind: SymbolKind) -> Self {
        RateSymbol {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
        })
    }
}

/// Linear combination of rate symbols, keyed by name.
pub type Combination = BTreeMap<String, BigRational>;

mod rational_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Combination, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k, v.to_string())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Combination, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                v.parse::<BigRational>()
                    .map(|r| (k, r))
                    .map_err(|_| D::Error::custom(format!("bad coefficient `{v}`")))
            })
            .collect()
    }
}

/// `lhs (sense) rhs`, with an optional provenance tag for auditing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateInequality {
    #[serde(with = "rational_map")]
    pub lhs: Combination,
    pub sense: Sense,
    pub rhs: InfoExpr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl RateInequality {
    pub fn new(lhs: Combination, sense: Sense, rhs: InfoExpr) -> Self {
        RateInequality {
            lhs,
            sense,
            rhs,
            source: None,
        }
    }

    pub fn le(lhs: Combination, rhs: InfoExpr) -> Self {
        Self::new(lhs, Sense::Le, rhs)
    }

    pub fn ge(lhs: Combination, rhs: InfoExpr) -> Self {
        Self::new(lhs, Sense::Ge, rhs)
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    /// `a·x <= b` form.
    fn to_le(&self) -> (Combination, InfoExpr) {
        match self.sense {
            Sense::Le => (self.lhs.clone(), self.rhs.clone()),
            Sense::Ge => (
                self.lhs.iter().map(|(k, v)| (k.clone(), -v.clone())).collect(),
                -self.rhs.clone(),
            ),
        }
    }

    /// Primitive integer coefficients, first coefficient (by name) positive.
    pub fn normalized(&self) -> RateInequality {
        let (mut lhs, mut rhs) = self.to_le();
        lhs.retain(|_, v| !v.is_zero());
        let scale = primitive_scale(lhs.values());
        for v in lhs.values_mut() {
            *v *= &scale;
        }
        rhs = rhs.scale(&scale);
        let flip = lhs.values().next().is_some_and(|v| v.is_negative());
        if flip {
            for v in lhs.values_mut() {
                *v = -v.clone();
            }
            rhs = -rhs;
        }
        RateInequality {
            lhs,
            sense: if flip { Sense::Ge } else { Sense::Le },
            rhs,
            source: self.source.clone(),
        }
    }

    fn key(&self, identities: &[CIIdentity]) -> Result<String> {
        let n = self.normalized();
        let rhs = n.rhs.canonicalize(identities)?;
        Ok(format!("{} {} {}", render_lhs(&n.lhs), n.sense, rhs))
    }
}

/// Positive factor that turns the coefficients into coprime integers.
fn primitive_scale<'a>(coeffs: impl Iterator<Item = &'a BigRational> + Clone) -> BigRational {
    let lcm = coeffs
        .clone()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let gcd = coeffs.fold(BigInt::zero(), |acc, c| {
        acc.gcd(&(c.numer() * (&lcm / c.denom())))
    });
    if gcd.is_zero() {
        BigRational::one()
    } else {
        BigRational::new(lcm, gcd.abs())
    }
}

fn render_lhs(lhs: &Combination) -> String {
    if lhs.is_empty() {
        return "0".into();
    }
    lhs.iter()
        .map(|(k, v)| {
            if v.is_negative() {
                format!("{v} {k}")
            } else {
                format!("+{v} {k}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for RateInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", render_lhs(&self.lhs), self.sense, self.rhs)
    }
}

/// `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateEquality {
    #[serde(with = "rational_map")]
    pub lhs: Combination,
    pub rhs: InfoExpr,
}

/// `symbol := combination`, applied by [`RateRegion::substitute`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Substitution {
    pub symbol: String,
    #[serde(with = "rational_map")]
    pub combination: Combination,
}

/// Builds a combination from `(name, coefficient)` pairs.
pub fn combo<'a>(terms: impl IntoIterator<Item = (&'a str, i64)>) -> Combination {
    let mut out = Combination::new();
    for (name, c) in terms {
        let slot = out.entry(name.to_string()).or_insert_with(BigRational::zero);
        *slot += BigRational::from_integer(BigInt::from(c));
    }
    out.retain(|_, v| !v.is_zero());
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateRegion {
    pub symbols: Vec<RateSymbol>,
    pub inequalities: Vec<RateInequality>,
    #[serde(default)]
    pub equalities: Vec<RateEquality>,
    #[serde(default)]
    pub substitutions: Vec<Substitution>,
    #[serde(default)]
    pub identities: Vec<CIIdentity>,
    /// Conditions `0 <= c` on the laws produced by elimination that could
    /// not be certified.
    #[serde(default)]
    pub side_conditions: Vec<InfoExpr>,
}

impl RateRegion {
    pub fn new(symbols: Vec<RateSymbol>, inequalities: Vec<RateInequality>, identities: Vec<CIIdentity>) -> Result<Self> {
        let region = RateRegion {
            symbols,
            inequalities,
            equalities: Vec::new(),
            substitutions: Vec::new(),
            identities,
            side_conditions: Vec::new(),
        };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for s in &self.symbols {
            if !names.insert(s.name.as_str()) {
                return Err(Error::validation("symbols", format!("duplicate symbol `{}`", s.name)));
            }
        }
        let mentioned = self
            .inequalities
            .iter()
            .flat_map(|i| i.lhs.keys())
            .chain(self.equalities.iter().flat_map(|e| e.lhs.keys()));
        for name in mentioned {
            if !names.contains(name.as_str()) {
                return Err(Error::validation("inequalities", format!("unknown symbol `{name}`")));
            }
        }
        if let Some(i) = self.inequalities.iter().find(|i| i.lhs.values().all(|v| v.is_zero())) {
            return Err(Error::validation("inequalities", format!("empty left-hand side in `{i}`")));
        }
        Ok(())
    }

    pub fn symbol_names(&self) -> Vec<&str> {
        self.symbols.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.symbols.iter().any(|s| s.name == name)
    }

    /// Appends `x >= 0` for every message and binning symbol lacking it.
    pub fn with_nonnegativity(mut self) -> Self {
        for s in &self.symbols {
            if s.kind == SymbolKind::Total {
                continue;
            }
            let row = RateInequality::ge(combo([(s.name.as_str(), 1)]), InfoExpr::zero());
            if !self.inequalities.iter().any(|i| i.normalized() == row) {
                self.inequalities.push(row.with_source("nonnegativity"));
            }
        }
        self
    }

    pub fn add_symbol(&mut self, symbol: RateSymbol) -> Result<()> {
        if self.has_symbol(&symbol.name) {
            return Err(Error::domain(format!("symbol `{}` already present", symbol.name)));
        }
        self.symbols.push(symbol);
        Ok(())
    }

    /// Replaces `sub.symbol` by its defining combination everywhere and
    /// drops it from the symbol list.
    pub fn substitute(&self, sub: &Substitution) -> Result<RateRegion> {
        if !self.has_symbol(&sub.symbol) {
            return Err(Error::domain(format!("symbol `{}` not in region", sub.symbol)));
        }
        if sub.combination.contains_key(&sub.symbol) {
            return Err(Error::domain("substitution refers to its own symbol"));
        }
        if let Some(missing) = sub.combination.keys().find(|k| !self.has_symbol(k)) {
            return Err(Error::domain(format!("symbol `{missing}` not in region")));
        }
        let apply = |lhs: &Combination| -> Combination {
            let mut out = lhs.clone();
            if let Some(k) = out.remove(&sub.symbol) {
                for (name, c) in &sub.combination {
                    let slot = out.entry(name.clone()).or_insert_with(BigRational::zero);
                    *slot += &k * c;
                }
                out.retain(|_, v| !v.is_zero());
            }
            out
        };
        let mut region = self.clone();
        for ineq in &mut region.inequalities {
            ineq.lhs = apply(&ineq.lhs);
        }
        for eq in &mut region.equalities {
            eq.lhs = apply(&eq.lhs);
        }
        region.symbols.retain(|s| s.name != sub.symbol);
        region.substitutions.push(sub.clone());
        Ok(region)
    }

    fn column_of(&self, name: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::domain(format!("symbol `{name}` not in region")))
    }

    fn to_system<'a>(&self, field: &Symbolic<'a>) -> System<Symbolic<'a>> {
        let dense = |lhs: &Combination| -> Vec<BigRational> {
            self.symbols
                .iter()
                .map(|s| lhs.get(&s.name).cloned().unwrap_or_else(BigRational::zero))
                .collect()
        };
        let rows = self
            .inequalities
            .iter()
            .map(|i| {
                let (lhs, rhs) = i.to_le();
                (dense(&lhs), rhs)
            })
            .collect();
        let eqs = self
            .equalities
            .iter()
            .map(|e| (dense(&e.lhs), e.rhs.clone()))
            .collect();
        System::new(field, rows, eqs)
    }

    fn rebuild_from(&self, system: System<Symbolic<'_>>, removed: &[usize]) -> RateRegion {
        let sparse = |a: &[BigRational]| -> Combination {
            self.symbols
                .iter()
                .zip(a)
                .filter(|(_, c)| !c.is_zero())
                .map(|(s, c)| (s.name.clone(), c.clone()))
                .collect()
        };
        let mut inequalities: Vec<RateInequality> = system
            .rows
            .iter()
            .map(|r| {
                let row = RateInequality::le(sparse(&r.a), r.b.clone()).normalized();
                let mut sources: Vec<&str> = Vec::new();
                for i in r.origins() {
                    if let Some(s) = self.inequalities.get(i).and_then(|q| q.source.as_deref()) {
                        if !sources.contains(&s) {
                            sources.push(s);
                        }
                    }
                }
                if sources.is_empty() {
                    row
                } else {
                    row.with_source(sources.join(" + "))
                }
            })
            .collect();
        inequalities.sort_by_key(|i| i.to_string());
        let equalities = system
            .eqs
            .iter()
            .filter(|e| e.a.iter().any(|c| !c.is_zero()))
            .map(|e| RateEquality {
                lhs: sparse(&e.a),
                rhs: e.b.clone(),
            })
            .collect();
        let mut side_conditions = self.side_conditions.clone();
        for r in system.residual {
            if !side_conditions.contains(&r) {
                side_conditions.push(r);
            }
        }
        RateRegion {
            symbols: self
                .symbols
                .iter()
                .enumerate()
                .filter(|(j, _)| !removed.contains(j))
                .map(|(_, s)| s.clone())
                .collect(),
            inequalities,
            equalities,
            substitutions: self.substitutions.clone(),
            identities: self.identities.clone(),
            side_conditions,
        }
    }

    /// Projects out one symbol.
    pub fn fme_eliminate(&self, victim: &str) -> Result<RateRegion> {
        self.fme_eliminate_all(&[victim])
    }

    /// Projects out `victims` in the given order.
    pub fn fme_eliminate_all(&self, victims: &[&str]) -> Result<RateRegion> {
        let columns = victims
            .iter()
            .map(|v| self.column_of(v))
            .collect::<Result<Vec<_>>>()?;
        let field = Symbolic::new(&self.identities);
        let mut system = self.to_system(&field);
        for &c in &columns {
            system.eliminate(&field, c);
        }
        Ok(self.rebuild_from(system, &columns))
    }

    /// Removes duplicates and inequalities implied, with a divergence
    /// certificate on the constants, by one other inequality or the sum of
    /// two others.
    pub fn simplify_symbolic(&self) -> RateRegion {
        let field = Symbolic::new(&self.identities);
        let mut system = self.to_system(&field);
        system.prune(&field);
        self.rebuild_from(system, &[])
    }

    /// Applies `f` to every constant.
    pub fn map_constants(&self, f: impl Fn(&InfoExpr) -> InfoExpr) -> RateRegion {
        let mut region = self.clone();
        for i in &mut region.inequalities {
            i.rhs = f(&i.rhs);
        }
        for e in &mut region.equalities {
            e.rhs = f(&e.rhs);
        }
        region.side_conditions = region.side_conditions.iter().map(&f).collect();
        region
    }

    /// Codebook law equal to the encoding law.
    pub fn specialize_equal_laws(&self) -> RateRegion {
        let mut r = self.map_constants(InfoExpr::specialize_equal_laws);
        r.identities = merge_labels(&r.identities);
        r
    }

    /// Codebook law equal to the product of encoding marginals.
    pub fn specialize_product_codebook(&self) -> RateRegion {
        let mut r = self.map_constants(InfoExpr::specialize_product_codebook);
        r.identities.retain(|id| id.label == crate::prob::DistLabel::Encoding);
        r
    }

    /// Canonical string keys of all constraints, for set comparison.
    pub fn normalized_keys(&self) -> Result<BTreeSet<String>> {
        let mut keys = BTreeSet::new();
        for i in &self.inequalities {
            keys.insert(i.key(&self.identities)?);
        }
        for e in &self.equalities {
            let ineq = RateInequality::le(e.lhs.clone(), e.rhs.clone()).normalized();
            let rhs = ineq.rhs.canonicalize(&self.identities)?;
            keys.insert(format!("{} = {}", render_lhs(&ineq.lhs), rhs));
        }
        for c in &self.side_conditions {
            let c = c.canonicalize(&self.identities)?;
            if !c.is_zero() {
                keys.insert(format!("0 <= {c}"));
            }
        }
        Ok(keys)
    }

    /// Instantiates every constant for the laws `pe` and `pc`.
    pub fn instantiate(&self, pe: &JointPmf, pc: &JointPmf) -> Result<NumericPolytope> {
        let mut rows = Vec::new();
        let mut eqs = Vec::new();
        let mut infeasible = false;
        let dense = |lhs: &Combination| -> Vec<f64> {
            self.symbols
                .iter()
                .map(|s| lhs.get(&s.name).and_then(|c| c.to_f64()).unwrap_or(0.0))
                .collect()
        };
        for ineq in &self.inequalities {
            let value = ineq.rhs.evaluate(pe, pc)?;
            let a = dense(&ineq.lhs);
            match ineq.sense {
                Sense::Le if value == f64::INFINITY => {}
                Sense::Le => rows.push((a, value)),
                Sense::Ge if value == f64::INFINITY => infeasible = true,
                Sense::Ge => rows.push((a.iter().map(|x| -x).collect(), -value)),
            }
        }
        for eq in &self.equalities {
            let value = eq.rhs.evaluate(pe, pc)?;
            if value.is_infinite() {
                infeasible = true;
                continue;
            }
            eqs.push((dense(&eq.lhs), value));
        }
        for c in &self.side_conditions {
            if c.evaluate(pe, pc)? < -MEMBERSHIP_SLACK {
                infeasible = true;
            }
        }
        Ok(NumericPolytope {
            symbols: self.symbol_names().into_iter().map(String::from).collect(),
            rows,
            eqs,
            infeasible,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::domain(format!("region serialization failed: {e}")))
    }

    pub fn from_json(text: &str) -> Result<RateRegion> {
        let region: RateRegion = serde_json::from_str(text)
            .map_err(|e| Error::validation("region", e.to_string()))?;
        region.validate()?;
        Ok(region)
    }
}

impl fmt::Display for RateRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.inequalities {
            writeln!(f, "{i}")?;
        }
        for e in &self.equalities {
            writeln!(f, "{} = {}", render_lhs(&e.lhs), e.rhs)?;
        }
        for c in &self.side_conditions {
            writeln!(f, "0 <= {c}")?;
        }
        Ok(())
    }
}

/// Once the two laws coincide, every statement holds under both labels.
fn merge_labels(ids: &[CIIdentity]) -> Vec<CIIdentity> {
    let mut out: Vec<CIIdentity> = Vec::new();
    for id in ids {
        let e = CIIdentity {
            statement: id.statement,
            label: crate::prob::DistLabel::Encoding,
        };
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

/// Symbolic equality of two regions over the same symbols: both are
/// simplified, their constants canonicalized under their own identities, and
/// the resulting constraint sets compared.
pub fn region_equal(a: &RateRegion, b: &RateRegion) -> Result<bool> {
    let sa: BTreeSet<&str> = a.symbol_names().into_iter().collect();
    let sb: BTreeSet<&str> = b.symbol_names().into_iter().collect();
    if sa != sb {
        return Err(Error::domain(format!(
            "regions have different symbols: {sa:?} vs {sb:?}"
        )));
    }
    Ok(a.simplify_symbolic().normalized_keys()? == b.simplify_symbolic().normalized_keys()?)
}

/// Exact field with symbolic constants, certifying comparisons by
/// divergence monotonicity under the region's identities.
pub(crate) struct Symbolic<'a> {
    identities: &'a [CIIdentity],
}

impl<'a> Symbolic<'a> {
    pub(crate) fn new(identities: &'a [CIIdentity]) -> Self {
        Symbolic { identities }
    }
}

impl Field for Symbolic<'_> {
    type C = BigRational;
    type B = InfoExpr;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn sign(&self, c: &BigRational) -> i8 {
        if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        }
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn div(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a / b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn magnitude(&self, a: &BigRational) -> f64 {
        a.abs().to_f64().unwrap_or(f64::MAX)
    }
    fn b_zero(&self) -> InfoExpr {
        InfoExpr::zero()
    }
    fn b_comb(&self, ka: &BigRational, a: &InfoExpr, kb: &BigRational, b: &InfoExpr) -> InfoExpr {
        a.scale(ka) + b.scale(kb)
    }
    fn b_le(&self, a: &InfoExpr, b: &InfoExpr) -> bool {
        let diff = b.clone() - a.clone();
        diff.is_certified_nonnegative()
            || diff
                .canonicalize(self.identities)
                .is_ok_and(|c| c.is_certified_nonnegative())
    }
    fn b_eq(&self, a: &InfoExpr, b: &InfoExpr) -> bool {
        let diff = b.clone() - a.clone();
        diff.is_zero()
            || diff
                .canonicalize(self.identities)
                .is_ok_and(|c| c.is_zero())
    }
    fn normalize(&self, a: &mut [BigRational], b: &mut InfoExpr) {
        let k = primitive_scale(a.iter());
        for x in a.iter_mut() {
            *x *= &k;
        }
        *b = b.scale(&k);
    }
}

/// A linear system `A x <= b`, `E x = f` over named real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPolytope {
    pub symbols: Vec<String>,
    pub rows: Vec<(Vec<f64>, f64)>,
    pub eqs: Vec<(Vec<f64>, f64)>,
    /// Set when some constraint can never hold.
    pub infeasible: bool,
}

/// One support direction of a 2-D boundary sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSample {
    pub angle: f64,
    pub support: f64,
    pub point: (f64, f64),
    pub unbounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Boundary2d {
    pub axes: (String, String),
    pub samples: Vec<DirectionSample>,
}

impl Boundary2d {
    /// Distinct maximizers in sweep order.
    pub fn frontier(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for s in self.samples.iter().filter(|s| !s.unbounded) {
            let dup = out.last().is_some_and(|p| {
                (p.0 - s.point.0).abs() <= MEMBERSHIP_SLACK && (p.1 - s.point.1).abs() <= MEMBERSHIP_SLACK
            });
            if !dup {
                out.push(s.point);
            }
        }
        out
    }

    /// `x,y` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in self.frontier() {
            out.push_str(&format!("{},{}\n", format_g9(x), format_g9(y)));
        }
        out
    }
}

impl NumericPolytope {
    pub fn dimension(&self) -> usize {
        self.symbols.len()
    }

    fn column_of(&self, name: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::domain(format!("coordinate `{name}` not in polytope")))
    }

    pub fn contains_point(&self, point: &[f64]) -> Result<bool> {
        if point.len() != self.dimension() {
            return Err(Error::domain(format!(
                "point has {} coordinates, polytope has {}",
                point.len(),
                self.dimension()
            )));
        }
        if self.infeasible {
            return Ok(false);
        }
        let dot = |a: &[f64]| a.iter().zip(point).map(|(x, y)| x * y).sum::<f64>();
        Ok(self.rows.iter().all(|(a, b)| dot(a) <= b + MEMBERSHIP_SLACK)
            && self.eqs.iter().all(|(a, b)| (dot(a) - b).abs() <= MEMBERSHIP_SLACK))
    }

    /// Projects out the named coordinates.
    pub fn eliminate(&self, victims: &[&str]) -> Result<NumericPolytope> {
        let columns = victims
            .iter()
            .map(|v| self.column_of(v))
            .collect::<Result<Vec<_>>>()?;
        let field = Numeric { tol: NUMERIC_TOL };
        let mut system = System::new(&field, self.rows.clone(), self.eqs.clone());
        for &c in &columns {
            system.eliminate(&field, c);
        }
        let keep: Vec<usize> = (0..self.dimension()).filter(|j| !columns.contains(j)).collect();
        let pick = |a: &[f64]| keep.iter().map(|&j| a[j]).collect::<Vec<_>>();
        let infeasible = self.infeasible
            || system
                .residual
                .iter()
                .any(|&b| b < -MEMBERSHIP_SLACK);
        Ok(NumericPolytope {
            symbols: keep.iter().map(|&j| self.symbols[j].clone()).collect(),
            rows: system.rows.iter().map(|r| (pick(&r.a), r.b)).collect(),
            eqs: system
                .eqs
                .iter()
                .map(|e| (pick(&e.a), e.b))
                .filter(|(a, _)| a.iter().any(|x| x.abs() > NUMERIC_TOL))
                .collect(),
            infeasible,
        })
    }

    /// Projects onto the named coordinates, in that order.
    pub fn project(&self, axes: &[&str]) -> Result<NumericPolytope> {
        for a in axes {
            self.column_of(a)?;
        }
        let victims: Vec<&str> = self
            .symbols
            .iter()
            .map(String::as_str)
            .filter(|s| !axes.contains(s))
            .collect();
        let projected = self.eliminate(&victims)?;
        let order: Vec<usize> = axes
            .iter()
            .map(|a| projected.column_of(a))
            .collect::<Result<_>>()?;
        let permute = |a: &[f64]| order.iter().map(|&j| a[j]).collect::<Vec<_>>();
        Ok(NumericPolytope {
            symbols: axes.iter().map(|s| s.to_string()).collect(),
            rows: projected.rows.iter().map(|(a, b)| (permute(a), *b)).collect(),
            eqs: projected.eqs.iter().map(|(a, b)| (permute(a), *b)).collect(),
            infeasible: projected.infeasible,
        })
    }

    /// Vertices of the projection onto two axes, clipped to the detection box.
    fn vertices_2d(&self, half_width: f64) -> Vec<(f64, f64)> {
        let mut lines: Vec<(f64, f64, f64)> = self.rows.iter().map(|(a, b)| (a[0], a[1], *b)).collect();
        for (a, b) in &self.eqs {
            lines.push((a[0], a[1], *b));
            lines.push((-a[0], -a[1], -*b));
        }
        lines.extend([
            (1.0, 0.0, half_width),
            (-1.0, 0.0, half_width),
            (0.0, 1.0, half_width),
            (0.0, -1.0, half_width),
        ]);
        let feasible = |x: f64, y: f64| {
            lines
                .iter()
                .all(|&(p, q, c)| p * x + q * y <= c + MEMBERSHIP_SLACK * (1.0 + c.abs()))
        };
        let mut out = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a1, b1, c1) = lines[i];
                let (a2, b2, c2) = lines[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (c1 * b2 - c2 * b1) / det;
                let y = (a1 * c2 - a2 * c1) / det;
                if feasible(x, y) {
                    out.push((x + 0.0, y + 0.0));
                }
            }
        }
        out
    }

    /// Upper-right Pareto frontier of the projection onto `axes`, found by
    /// maximizing `cos t x + sin t y` for `directions` angles evenly spaced
    /// over `[0, pi/2]`.
    pub fn boundary_2d(&self, axes: (&str, &str), directions: usize) -> Result<Boundary2d> {
        if directions == 0 {
            return Err(Error::domain("boundary sweep needs at least one direction"));
        }
        let plane = self.project(&[axes.0, axes.1])?;
        let (vertices, wide) = if plane.infeasible {
            (Vec::new(), Vec::new())
        } else {
            (plane.vertices_2d(BOUNDARY_BOX), plane.vertices_2d(2.0 * BOUNDARY_BOX))
        };
        if vertices.is_empty() {
            return Err(Error::domain("projection is empty"));
        }
        let on_box = |p: &(f64, f64)| p.0.abs().max(p.1.abs()) >= BOUNDARY_BOX * (1.0 - 1e-9);
        let samples = (0..directions)
            .map(|k| {
                let angle = if directions == 1 {
                    0.0
                } else {
                    std::f64::consts::FRAC_PI_2 * k as f64 / (directions - 1) as f64
                };
                let (c, s) = (angle.cos(), angle.sin());
                let score = |p: &(f64, f64)| c * p.0 + s * p.1;
                let top = vertices.iter().map(score).fold(f64::NEG_INFINITY, f64::max);
                let top_wide = wide.iter().map(score).fold(f64::NEG_INFINITY, f64::max);
                // Among tied maximizers prefer finite points, then the one
                // furthest up and right.
                let best = vertices
                    .iter()
                    .copied()
                    .filter(|p| score(p) >= top - 1e-12 * (1.0 + top.abs()))
                    .max_by(|p, q| {
                        on_box(q)
                            .cmp(&on_box(p))
                            .then((p.0 + p.1).total_cmp(&(q.0 + q.1)))
                    })
                    .expect("nonempty vertex list");
                DirectionSample {
                    angle,
                    support: top,
                    point: best,
                    unbounded: top_wide > top + 1e-9 * (1.0 + top.abs()),
                }
            })
            .collect();
        Ok(Boundary2d {
            axes: (axes.0.to_string(), axes.1.to_string()),
            samples,
        })
    }
}
