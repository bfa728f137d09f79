//! Rate-region builders for superposition coding with binning on the
//! broadcast channel with a common message, the multiple-access channel with
//! a common message, the general broadcast channel and the interference
//! channel, plus the classical regions they are compared against.
//!
//! Every builder works over a fixed variable layout described by a
//! [`SchemeSpec`]. Rate symbols are named after the codeword they carry:
//! `R_<c>` (message), `Rho_<c>` (binning) and `L_<c> = R_<c> + Rho_<c>`,
//! where `<c>` is a codeword tag such as `1to12` for the codeword carrying
//! the message from transmitter 1 to both receivers. Original rates after
//! rate splitting are `Rp_1`, `Rp_2`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infoexpr::{CIIdentity, InfoExpr};
use crate::prob::{DistLabel, VariableId};
use crate::region::{
    combo, Combination, RateEquality, RateInequality, RateRegion, RateSymbol, SymbolKind, Substitution,
};
use crate::varset::VarSet;

use DistLabel::{Codebook as C, Encoding as E};

/// A codeword with the tag used in its rate symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codeword {
    pub tag: String,
    pub var: usize,
}

/// Variable roles of a coding scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub name: String,
    pub codewords: Vec<Codeword>,
    /// Channel outputs, in receiver order.
    pub outputs: Vec<usize>,
    /// `(base, satellite)` pairs: the satellite codebook is generated
    /// conditionally on the base codeword.
    pub superposition: Vec<(usize, usize)>,
    /// Codewords that carry a bin index.
    pub binned: Vec<usize>,
}

impl SchemeSpec {
    fn new(name: &str, codewords: &[(&str, usize)], outputs: &[usize], edges: &[(usize, usize)], binned: &[usize]) -> Self {
        SchemeSpec {
            name: name.into(),
            codewords: codewords
                .iter()
                .map(|(t, v)| Codeword {
                    tag: t.to_string(),
                    var: *v,
                })
                .collect(),
            outputs: outputs.to_vec(),
            superposition: edges.to_vec(),
            binned: binned.to_vec(),
        }
    }

    /// `0 = U1`, `1 = U2`, `2 = Y1`, `3 = Y2`; `U2` superposed on `U1`.
    pub fn bc_cm() -> Self {
        Self::new("bc-cm", &[("1", 0), ("2", 1)], &[2, 3], &[(0, 1)], &[0, 1])
    }

    /// `0 = U_{12->1}`, `1 = U_{1->1}`, `2 = U_{2->1}`, `3 = Y1`; both private
    /// codewords superposed on the common one and binned.
    pub fn mac_cm() -> Self {
        Self::new("mac-cm", &[("12to1", 0), ("1to1", 1), ("2to1", 2)], &[3], &[(0, 1), (0, 2)], &[1, 2])
    }

    /// `0 = U_{1->12}`, `1 = U_{1->1}`, `2 = U_{1->2}`, `3 = Y1`, `4 = Y2`;
    /// private codewords superposed on the common one, all jointly binned.
    pub fn bc() -> Self {
        Self::new("bc", &[("1to12", 0), ("1to1", 1), ("1to2", 2)], &[3, 4], &[(0, 1), (0, 2)], &[0, 1, 2])
    }

    /// `0 = U_{1->12}`, `1 = U_{1->1}`, `2 = U_{2->12}`, `3 = U_{2->2}`,
    /// `4 = Y1`, `5 = Y2`; each private codeword superposed on its
    /// transmitter's common codeword, each pair jointly binned.
    pub fn ifc() -> Self {
        Self::new(
            "ifc",
            &[("1to12", 0), ("1to1", 1), ("2to12", 2), ("2to2", 3)],
            &[4, 5],
            &[(0, 1), (2, 3)],
            &[0, 1, 2, 3],
        )
    }

    /// Display names for the variables.
    pub fn variables(&self) -> Vec<VariableId> {
        let mut vars: Vec<VariableId> = self
            .codewords
            .iter()
            .map(|c| VariableId::new(c.var, format!("U_{}", c.tag)))
            .chain(
                self.outputs
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| VariableId::new(v, format!("Y{}", i + 1))),
            )
            .collect();
        vars.sort_by_key(|v| v.index);
        vars
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = VarSet::EMPTY;
        let all = self.codewords.iter().map(|c| c.var).chain(self.outputs.iter().copied());
        for v in all {
            if v >= crate::varset::MAX_VARS || seen.contains(v) {
                return Err(Error::domain(format!("variable {v} repeated or out of range")));
            }
            seen = seen.union(VarSet::singleton(v));
        }
        let cw: VarSet = self.codewords.iter().map(|c| c.var).collect();
        if self.binned.iter().any(|v| !cw.contains(*v)) {
            return Err(Error::domain("binned variable is not a codeword"));
        }
        if self.superposition.iter().any(|(a, b)| !cw.contains(*a) || !cw.contains(*b)) {
            return Err(Error::domain("superposition edge between non-codewords"));
        }
        // Kahn's algorithm on the superposition edges.
        let mut remaining = self.superposition.clone();
        let mut placed = VarSet::EMPTY;
        loop {
            let ready: Vec<usize> = cw
                .iter()
                .filter(|v| !placed.contains(*v) && remaining.iter().all(|(_, s)| s != v))
                .collect();
            if ready.is_empty() {
                break;
            }
            for v in ready {
                placed = placed.union(VarSet::singleton(v));
                remaining.retain(|(b, _)| *b != v);
            }
        }
        if placed != cw {
            return Err(Error::domain("superposition edges contain a cycle"));
        }
        Ok(())
    }

    fn expect_shape(&self, other: &SchemeSpec) -> Result<()> {
        self.validate()?;
        type Shape<'a> = (Vec<&'a str>, usize, Vec<(Option<usize>, Option<usize>)>, Vec<Option<usize>>);
        fn shape(s: &SchemeSpec) -> Shape<'_> {
            let tags: Vec<&str> = s.codewords.iter().map(|c| c.tag.as_str()).collect();
            let index = |v: usize| s.codewords.iter().position(|c| c.var == v);
            let edges: Vec<_> = s.superposition.iter().map(|(a, b)| (index(*a), index(*b))).collect();
            let binned: Vec<_> = s.binned.iter().map(|v| index(*v)).collect();
            (tags, s.outputs.len(), edges, binned)
        }
        if shape(self) != shape(other) {
            return Err(Error::domain(format!(
                "scheme layout does not match the `{}` builder",
                other.name
            )));
        }
        Ok(())
    }

    fn var(&self, tag: &str) -> usize {
        self.codewords
            .iter()
            .find(|c| c.tag == tag)
            .map(|c| c.var)
            .expect("validated layout")
    }
}

/// How original rates map onto split message rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Fixed fractions `alpha`, `beta`.
    Fixed,
    /// Any split: the union over all fractions.
    Free,
}

/// Rate-splitting parameters. `alpha` applies to the broadcast channel and
/// to the first interference-channel user, `beta` to the second user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub alpha: BigRational,
    pub beta: BigRational,
    pub mode: SplitMode,
}

impl SplitSpec {
    pub fn fixed(alpha: BigRational, beta: BigRational) -> Result<Self> {
        for (name, v) in [("alpha", &alpha), ("beta", &beta)] {
            if v.is_negative() || *v > BigRational::one() {
                return Err(Error::validation(name, format!("{v} outside [0, 1]")));
            }
        }
        Ok(SplitSpec {
            alpha,
            beta,
            mode: SplitMode::Fixed,
        })
    }

    pub fn from_f64(alpha: f64, beta: f64) -> Result<Self> {
        let conv = |x: f64, name: &str| {
            BigRational::from_float(x).ok_or_else(|| Error::domain(format!("{name} is not finite")))
        };
        Self::fixed(conv(alpha, "alpha")?, conv(beta, "beta")?)
    }

    pub fn free() -> Self {
        SplitSpec {
            alpha: BigRational::zero(),
            beta: BigRational::zero(),
            mode: SplitMode::Free,
        }
    }
}

pub const RP1: &str = "Rp_1";
pub const RP2: &str = "Rp_2";

fn r(tag: &str) -> String {
    format!("R_{tag}")
}

fn rho(tag: &str) -> String {
    format!("Rho_{tag}")
}

fn l(tag: &str) -> String {
    format!("L_{tag}")
}

fn s(ix: &[usize]) -> VarSet {
    ix.iter().copied().collect()
}

fn mi(a: &[usize], b: &[usize], given: &[usize]) -> InfoExpr {
    InfoExpr::mutual_information(E, s(a), s(b), s(given)).expect("disjoint by construction")
}

fn kl(of: &[usize], given: &[usize]) -> InfoExpr {
    InfoExpr::kl_cond(s(of), s(given)).expect("disjoint by construction")
}

fn sum_of(names: &[String]) -> Combination {
    combo(names.iter().map(|n| (n.as_str(), 1)))
}

/// Builds the region over `L`/`Rho` symbols, then substitutes
/// `L = R + Rho` for binned codewords.
struct Draft {
    symbols: Vec<RateSymbol>,
    rows: Vec<RateInequality>,
    binned: Vec<String>,
}

impl Draft {
    fn new(spec: &SchemeSpec) -> Self {
        let mut symbols = Vec::new();
        let mut binned = Vec::new();
        for c in &spec.codewords {
            symbols.push(RateSymbol::new(r(&c.tag), SymbolKind::Message));
        }
        for c in &spec.codewords {
            if spec.binned.contains(&c.var) {
                symbols.push(RateSymbol::new(rho(&c.tag), SymbolKind::Binning));
                symbols.push(RateSymbol::new(l(&c.tag), SymbolKind::Total));
                binned.push(c.tag.clone());
            }
        }
        Draft {
            symbols,
            rows: Vec::new(),
            binned,
        }
    }

    /// Total rate symbol of a codeword: `L` when binned, `R` otherwise.
    fn total(&self, tag: &str) -> String {
        if self.binned.iter().any(|t| t == tag) {
            l(tag)
        } else {
            r(tag)
        }
    }

    fn binning(&mut self, tags: &[&str], rhs: InfoExpr, source: &str) {
        let names: Vec<String> = tags.iter().map(|t| rho(t)).collect();
        self.rows.push(RateInequality::ge(sum_of(&names), rhs).with_source(source));
    }

    fn decoding(&mut self, tags: &[&str], rhs: InfoExpr, source: &str) {
        let names: Vec<String> = tags.iter().map(|t| self.total(t)).collect();
        self.rows.push(RateInequality::le(sum_of(&names), rhs).with_source(source));
    }

    fn finish(self, identities: Vec<CIIdentity>) -> Result<RateRegion> {
        let mut region = RateRegion::new(self.symbols, self.rows, identities)?;
        for tag in &self.binned {
            region = region.substitute(&Substitution {
                symbol: l(tag),
                combination: combo([(r(tag).as_str(), 1), (rho(tag).as_str(), 1)]),
            })?;
        }
        Ok(region.with_nonnegativity())
    }
}

/// Superposition coding with joint binning on the broadcast channel with a
/// common message: four constraints over `R_1, R_2, Rho_1, Rho_2`.
pub fn build_bc_cm(spec: &SchemeSpec) -> Result<RateRegion> {
    spec.expect_shape(&SchemeSpec::bc_cm())?;
    let (u1, u2) = (spec.var("1"), spec.var("2"));
    let (y1, y2) = (spec.outputs[0], spec.outputs[1]);
    let mut d = Draft::new(spec);
    d.binning(&["1", "2"], kl(&[u1, u2], &[]), "joint binning");
    d.decoding(&["1"], mi(&[y1], &[u1], &[]) + kl(&[u1], &[]), "decoder 1");
    d.decoding(&["2"], mi(&[y2], &[u2], &[u1]) + kl(&[u2], &[u1]), "decoder 2, satellite");
    d.decoding(&["1", "2"], mi(&[y2], &[u1, u2], &[]) + kl(&[u1, u2], &[]), "decoder 2, both");
    d.finish(Vec::new())
}

/// Divergence of the two private codewords from their codebook law given
/// the common codeword, `D(A|W) + D(B|W)`.
pub fn mac_encoding_divergence(spec: &SchemeSpec) -> InfoExpr {
    let (w, a, b) = (spec.var("12to1"), spec.var("1to1"), spec.var("2to1"));
    kl(&[a], &[w]) + kl(&[b], &[w])
}

fn mac_identities(w: usize, a: usize, b: usize) -> Vec<CIIdentity> {
    [C, E]
        .into_iter()
        .map(|label| CIIdentity::new(s(&[a]), s(&[b]), s(&[w]), label).expect("disjoint"))
        .collect()
}

/// Multiple-access channel with a common message: two binning bounds and
/// four decoding constraints.
pub fn build_mac_cm(spec: &SchemeSpec) -> Result<RateRegion> {
    spec.expect_shape(&SchemeSpec::mac_cm())?;
    let (w, a, b) = (spec.var("12to1"), spec.var("1to1"), spec.var("2to1"));
    let y = spec.outputs[0];
    let denc = mac_encoding_divergence(spec);
    let mut d = Draft::new(spec);
    d.binning(&["1to1"], kl(&[a], &[w]), "binning of transmitter 1");
    d.binning(&["2to1"], kl(&[b], &[w]), "binning of transmitter 2");
    d.decoding(&["12to1", "1to1", "2to1"], mi(&[y], &[w, a, b], &[]) + denc.clone(), "all codewords");
    d.decoding(&["1to1", "2to1"], mi(&[y], &[a, b], &[w]) + denc, "both private codewords");
    d.decoding(&["1to1"], mi(&[y], &[a], &[w, b]) + kl(&[a], &[w]), "private codeword 1");
    d.decoding(&["2to1"], mi(&[y], &[b], &[w, a]) + kl(&[b], &[w]), "private codeword 2");
    d.finish(mac_identities(w, a, b))
}

/// The classical capacity region of the multiple-access channel with a
/// common message.
pub fn mac_capacity_fixture() -> RateRegion {
    let spec = SchemeSpec::mac_cm();
    let (w, a, b, y) = (0, 1, 2, 3);
    let rows = vec![
        RateInequality::le(combo([("R_12to1", 1), ("R_1to1", 1), ("R_2to1", 1)]), mi(&[y], &[w, a, b], &[])),
        RateInequality::le(combo([("R_1to1", 1), ("R_2to1", 1)]), mi(&[y], &[a, b], &[w])),
        RateInequality::le(combo([("R_1to1", 1)]), mi(&[y], &[a], &[w, b])),
        RateInequality::le(combo([("R_2to1", 1)]), mi(&[y], &[b], &[w, a])),
    ];
    let symbols = spec
        .codewords
        .iter()
        .map(|c| RateSymbol::new(r(&c.tag), SymbolKind::Message))
        .collect();
    RateRegion::new(symbols, rows, mac_identities(w, a, b))
        .expect("static fixture")
        .with_nonnegativity()
}

fn bc_identities(spec: &SchemeSpec) -> Vec<CIIdentity> {
    let (w, a, b) = (spec.var("1to12"), spec.var("1to1"), spec.var("1to2"));
    vec![CIIdentity::new(s(&[a]), s(&[b]), s(&[w]), C).expect("disjoint")]
}

/// General broadcast channel after rate splitting: four binning bounds and
/// four decoding constraints over the common and private codewords.
pub fn build_bc(spec: &SchemeSpec) -> Result<RateRegion> {
    spec.expect_shape(&SchemeSpec::bc())?;
    let (w, a, b) = (spec.var("1to12"), spec.var("1to1"), spec.var("1to2"));
    let (y1, y2) = (spec.outputs[0], spec.outputs[1]);
    let mut d = Draft::new(spec);
    d.binning(&["1to12", "1to1", "1to2"], kl(&[w, a, b], &[]), "joint binning");
    d.binning(&["1to12", "1to1"], kl(&[w, a], &[]), "binning of common and private 1");
    d.binning(&["1to12", "1to2"], kl(&[w, b], &[]), "binning of common and private 2");
    d.binning(&["1to12"], kl(&[w], &[]), "binning of common");
    d.decoding(&["1to12", "1to1"], mi(&[y1], &[w, a], &[]) + kl(&[w, a], &[]), "decoder 1, both");
    d.decoding(&["1to1"], mi(&[y1], &[a], &[w]) + kl(&[a], &[w]), "decoder 1, private");
    d.decoding(&["1to12", "1to2"], mi(&[y2], &[w, b], &[]) + kl(&[w, b], &[]), "decoder 2, both");
    d.decoding(&["1to2"], mi(&[y2], &[b], &[w]) + kl(&[b], &[w]), "decoder 2, private");
    d.finish(bc_identities(spec))
}

/// The rate-splitting divergence term, written out as the expectation
/// under the encoding law of
/// `log P_e(A|W) - log P_e(A|W,B) + log P_c(A|W,B) - log P_c(A|W)`.
pub fn bc_rate_splitting_divergence(spec: &SchemeSpec) -> InfoExpr {
    let (w, a, b) = (spec.var("1to12"), spec.var("1to1"), spec.var("1to2"));
    let he = |v: &[usize]| InfoExpr::ent(E, s(v));
    let x = |v: &[usize]| InfoExpr::xent(s(v));
    // E_e[log P_e(S)] = -H_e(S); E_e[log P_c(S)] = -X(S).
    (he(&[w]) - he(&[w, a])) + (he(&[w, a, b]) - he(&[w, b])) + (x(&[w, b]) - x(&[w, a, b]))
        + (x(&[w, a]) - x(&[w]))
}

/// Marton's region with a common message, over the same symbols as
/// [`build_bc`] after eliminating the binning rates.
///
/// The two sum-rate bounds carry `+ bc_rate_splitting_divergence`, which
/// equals `-I_e(A;B|W)`. The bound on `2 R_1to12 + R_1to1 + R_1to2` is part
/// of Marton's region with a common message and is produced by the
/// elimination as well.
pub fn build_marton() -> RateRegion {
    let spec = SchemeSpec::bc();
    let (w, a, b, y1, y2) = (0, 1, 2, 3, 4);
    let drs = bc_rate_splitting_divergence(&spec);
    let rows = vec![
        RateInequality::le(combo([("R_1to1", 1)]), mi(&[y1], &[a], &[w]) + kl(&[a], &[w])),
        RateInequality::le(combo([("R_1to2", 1)]), mi(&[y2], &[b], &[w]) + kl(&[b], &[w])),
        RateInequality::le(combo([("R_1to12", 1), ("R_1to1", 1)]), mi(&[y1], &[w, a], &[])),
        RateInequality::le(combo([("R_1to12", 1), ("R_1to2", 1)]), mi(&[y2], &[w, b], &[])),
        RateInequality::le(
            combo([("R_1to12", 1), ("R_1to1", 1), ("R_1to2", 1)]),
            mi(&[y1], &[w, a], &[]) + mi(&[y2], &[b], &[w]) + drs.clone(),
        ),
        RateInequality::le(
            combo([("R_1to12", 1), ("R_1to1", 1), ("R_1to2", 1)]),
            mi(&[y2], &[w, b], &[]) + mi(&[y1], &[a], &[w]) + drs.clone(),
        ),
        RateInequality::le(
            combo([("R_1to12", 2), ("R_1to1", 1), ("R_1to2", 1)]),
            mi(&[y1], &[w, a], &[]) + mi(&[y2], &[w, b], &[]) + drs,
        ),
    ];
    let symbols = spec
        .codewords
        .iter()
        .map(|c| RateSymbol::new(r(&c.tag), SymbolKind::Message))
        .collect();
    RateRegion::new(symbols, rows, bc_identities(&spec))
        .expect("static fixture")
        .with_nonnegativity()
}

fn ifc_identities(spec: &SchemeSpec) -> Vec<CIIdentity> {
    let t1 = s(&[spec.var("1to12"), spec.var("1to1")]);
    let t2 = s(&[spec.var("2to12"), spec.var("2to2")]);
    [C, E]
        .into_iter()
        .map(|label| CIIdentity::new(t1, t2, VarSet::EMPTY, label).expect("disjoint"))
        .collect()
}

/// Interference channel after rate splitting: four binning bounds and four
/// decoding constraints per receiver.
pub fn build_ifc(spec: &SchemeSpec) -> Result<RateRegion> {
    spec.expect_shape(&SchemeSpec::ifc())?;
    let (w1, a1, w2, a2) = (spec.var("1to12"), spec.var("1to1"), spec.var("2to12"), spec.var("2to2"));
    let (y1, y2) = (spec.outputs[0], spec.outputs[1]);
    let mut d = Draft::new(spec);
    d.binning(&["1to12", "1to1"], kl(&[w1, a1], &[]), "transmitter 1, both");
    d.binning(&["1to1"], kl(&[a1], &[w1]), "transmitter 1, private");
    d.binning(&["2to12", "2to2"], kl(&[w2, a2], &[]), "transmitter 2, both");
    d.binning(&["2to2"], kl(&[a2], &[w2]), "transmitter 2, private");

    let own1 = kl(&[w1, a1], &[]);
    let priv1 = kl(&[a1], &[w1]);
    d.decoding(&["1to12", "1to1", "2to12"], mi(&[y1], &[w1, a1, w2], &[]) + own1.clone(), "decoder 1, line 1");
    d.decoding(&["1to1", "2to12"], mi(&[y1], &[a1, w2], &[w1]) + priv1.clone(), "decoder 1, line 2");
    d.decoding(&["1to12", "1to1"], mi(&[y1], &[w1, a1], &[w2]) + own1, "decoder 1, line 3");
    d.decoding(&["1to1"], mi(&[y1], &[a1], &[w1, w2]) + priv1, "decoder 1, line 4");

    let own2 = kl(&[w2, a2], &[]);
    let priv2 = kl(&[a2], &[w2]);
    d.decoding(&["1to12", "2to2", "2to12"], mi(&[y2], &[w1, a2, w2], &[]) + own2.clone(), "decoder 2, line 1");
    d.decoding(&["2to2", "2to12"], mi(&[y2], &[a2, w2], &[w1]) + own2, "decoder 2, line 2");
    d.decoding(&["1to12", "2to2"], mi(&[y2], &[w1, a2], &[w2]) + priv2.clone(), "decoder 2, line 3");
    d.decoding(&["2to2"], mi(&[y2], &[a2], &[w1, w2]) + priv2, "decoder 2, line 4");
    d.finish(ifc_identities(spec))
}

/// The Han–Kobayashi region for one input distribution, in the compact
/// form over the original rates `Rp_1`, `Rp_2`, with the common codewords
/// `W_i`, private codewords `A_i` and
///
/// * `a_i = I(Y_i; A_i | W_1 W_2)`,
/// * `b_i = I(Y_i; W_i A_i | W_j)`,
/// * `d_i = I(Y_i; A_i W_j | W_i)`,
/// * `e_i = I(Y_i; W_i A_i W_j)`.
///
/// The bounds `Rp_i <= a_i + d_j` are kept: they only become redundant
/// after the union over distributions.
pub fn build_han_kobayashi() -> RateRegion {
    let (w1, a1, w2, a2, y1, y2) = (0, 1, 2, 3, 4, 5);
    let a_1 = mi(&[y1], &[a1], &[w1, w2]);
    let b_1 = mi(&[y1], &[w1, a1], &[w2]);
    let d_1 = mi(&[y1], &[a1, w2], &[w1]);
    let e_1 = mi(&[y1], &[w1, a1, w2], &[]);
    let a_2 = mi(&[y2], &[a2], &[w1, w2]);
    let b_2 = mi(&[y2], &[w2, a2], &[w1]);
    let d_2 = mi(&[y2], &[a2, w1], &[w2]);
    let e_2 = mi(&[y2], &[w1, a2, w2], &[]);
    let rows = vec![
        RateInequality::le(combo([(RP1, 1)]), b_1),
        RateInequality::le(combo([(RP2, 1)]), b_2),
        RateInequality::le(combo([(RP1, 1), (RP2, 1)]), e_1.clone() + a_2.clone()),
        RateInequality::le(combo([(RP1, 1), (RP2, 1)]), e_2.clone() + a_1.clone()),
        RateInequality::le(combo([(RP1, 1), (RP2, 1)]), d_1.clone() + d_2.clone()),
        RateInequality::le(combo([(RP1, 2), (RP2, 1)]), e_1 + a_1.clone() + d_2.clone()),
        RateInequality::le(combo([(RP1, 1), (RP2, 2)]), e_2 + a_2.clone() + d_1.clone()),
        RateInequality::le(combo([(RP1, 1)]), a_1 + d_2),
        RateInequality::le(combo([(RP2, 1)]), a_2 + d_1),
        RateInequality::ge(combo([(RP1, 1)]), InfoExpr::zero()),
        RateInequality::ge(combo([(RP2, 1)]), InfoExpr::zero()),
    ];
    let symbols = vec![
        RateSymbol::new(RP1, SymbolKind::Total),
        RateSymbol::new(RP2, SymbolKind::Total),
    ];
    RateRegion::new(symbols, rows, ifc_identities(&SchemeSpec::ifc())).expect("static fixture")
}

/// The region obtained when codebook and encoding laws coincide, for the
/// broadcast channel with a common message.
pub fn superposition_fixture() -> RateRegion {
    let (u1, u2, y1, y2) = (0, 1, 2, 3);
    let rows = vec![
        RateInequality::le(combo([("R_1", 1)]), mi(&[y1], &[u1], &[])),
        RateInequality::le(combo([("R_2", 1)]), mi(&[y2], &[u2], &[u1])),
        RateInequality::le(combo([("R_1", 1), ("R_2", 1)]), mi(&[y2], &[u1, u2], &[])),
    ];
    let symbols = vec![
        RateSymbol::new("R_1", SymbolKind::Message),
        RateSymbol::new("R_2", SymbolKind::Message),
    ];
    RateRegion::new(symbols, rows, Vec::new())
        .expect("static fixture")
        .with_nonnegativity()
}

/// Binning of `U1` alone against `U2` with a product codebook law, derived
/// by hand from the broadcast-channel constraints with `Rho_2 = 0` after
/// eliminating `Rho_1`.
pub fn single_binning_fixture() -> RateRegion {
    let (u1, u2, y1, y2) = (0, 1, 2, 3);
    let i12 = mi(&[u1], &[u2], &[]);
    let rows = vec![
        RateInequality::le(combo([("R_1", 1)]), mi(&[y1], &[u1], &[]) - i12.clone()),
        RateInequality::le(combo([("R_2", 1)]), mi(&[y2], &[u2], &[u1]) + i12),
        RateInequality::le(combo([("R_1", 1), ("R_2", 1)]), mi(&[y2], &[u1, u2], &[])),
    ];
    let symbols = vec![
        RateSymbol::new("R_1", SymbolKind::Message),
        RateSymbol::new("R_2", SymbolKind::Message),
    ];
    RateRegion::new(symbols, rows, Vec::new())
        .expect("static fixture")
        .with_nonnegativity()
}

/// Adds the original rates `Rp_1`, `Rp_2` and the equalities tying them to
/// the split message rates.
///
/// Broadcast channel: `Rp_1 = R_1to1 + alpha R_1to12`,
/// `Rp_2 = R_1to2 + (1 - alpha) R_1to12`.
/// Interference channel: user 1 sends `alpha Rp_1` privately and
/// `(1 - alpha) Rp_1` as a common message; user 2 likewise with `beta`.
/// In free mode the split is left open.
pub fn apply_split(region: &RateRegion, split: &SplitSpec) -> Result<RateRegion> {
    let is_bc = ["R_1to12", "R_1to1", "R_1to2"].iter().all(|n| region.has_symbol(n));
    let is_ifc = ["R_1to12", "R_1to1", "R_2to12", "R_2to2"].iter().all(|n| region.has_symbol(n));
    if !is_bc && !is_ifc {
        return Err(Error::domain("rate splitting needs the broadcast or interference channel symbols"));
    }
    let mut out = region.clone();
    out.add_symbol(RateSymbol::new(RP1, SymbolKind::Total))?;
    out.add_symbol(RateSymbol::new(RP2, SymbolKind::Total))?;
    let one = BigRational::one();
    let term = |name: &str, k: BigRational| (name.to_string(), k);
    let eq = |terms: Vec<(String, BigRational)>| {
        let mut lhs = Combination::new();
        for (n, k) in terms {
            *lhs.entry(n).or_insert_with(BigRational::zero) += k;
        }
        lhs.retain(|_, v| !v.is_zero());
        RateEquality {
            lhs,
            rhs: InfoExpr::zero(),
        }
    };
    let neg = |k: &BigRational| -k.clone();
    match (is_bc, split.mode) {
        (true, SplitMode::Fixed) => {
            let a = split.alpha.clone();
            let abar = &one - &a;
            out.equalities.push(eq(vec![
                term(RP1, one.clone()),
                term("R_1to1", neg(&one)),
                term("R_1to12", neg(&a)),
            ]));
            out.equalities.push(eq(vec![
                term(RP2, one.clone()),
                term("R_1to2", neg(&one)),
                term("R_1to12", neg(&abar)),
            ]));
        }
        (true, SplitMode::Free) => {
            out.equalities.push(eq(vec![
                term(RP1, one.clone()),
                term(RP2, one.clone()),
                term("R_1to1", neg(&one)),
                term("R_1to2", neg(&one)),
                term("R_1to12", neg(&one)),
            ]));
            out.inequalities
                .push(RateInequality::ge(combo([(RP1, 1), ("R_1to1", -1)]), InfoExpr::zero()).with_source("split"));
            out.inequalities
                .push(RateInequality::ge(combo([(RP2, 1), ("R_1to2", -1)]), InfoExpr::zero()).with_source("split"));
        }
        (false, SplitMode::Fixed) => {
            let (a, b) = (split.alpha.clone(), split.beta.clone());
            let pairs = [
                ("R_1to1", RP1, a.clone()),
                ("R_1to12", RP1, &one - &a),
                ("R_2to2", RP2, b.clone()),
                ("R_2to12", RP2, &one - &b),
            ];
            for (part, whole, k) in pairs {
                out.equalities
                    .push(eq(vec![term(part, one.clone()), term(whole, neg(&k))]));
            }
        }
        (false, SplitMode::Free) => {
            for (private, common, whole) in [("R_1to1", "R_1to12", RP1), ("R_2to2", "R_2to12", RP2)] {
                out.equalities.push(eq(vec![
                    term(whole, one.clone()),
                    term(private, neg(&one)),
                    term(common, neg(&one)),
                ]));
            }
        }
    }
    Ok(out)
}

/// Names of the message and binning symbols that remain to be eliminated
/// when projecting a split region onto `Rp_1`, `Rp_2`.
pub fn split_victims(region: &RateRegion) -> Vec<String> {
    region
        .symbols
        .iter()
        .filter(|s| s.name != RP1 && s.name != RP2)
        .map(|s| s.name.clone())
        .collect()
}

/// Builder names reachable from the command line, in listing order.
pub const SCHEME_NAMES: [&str; 6] = ["bc-cm", "mac-cm", "bc", "ifc", "marton", "hk"];

/// Builds a region by name with the default layout.
pub fn build_by_name(name: &str, split: Option<&SplitSpec>) -> Result<RateRegion> {
    let region = match name {
        "bc-cm" => build_bc_cm(&SchemeSpec::bc_cm())?,
        "mac-cm" => build_mac_cm(&SchemeSpec::mac_cm())?,
        "bc" => build_bc(&SchemeSpec::bc())?,
        "ifc" => build_ifc(&SchemeSpec::ifc())?,
        "marton" => build_marton(),
        "hk" => build_han_kobayashi(),
        other => {
            return Err(Error::validation("scheme", format!("unknown scheme `{other}`")));
        }
    };
    match split {
        Some(sp) if matches!(name, "bc" | "ifc") => apply_split(&region, sp),
        Some(_) => Err(Error::validation("split", format!("scheme `{name}` takes no rate split"))),
        None => Ok(region),
    }
}

/// Binning-rate symbols of a region.
pub fn binning_symbols(region: &RateRegion) -> Vec<String> {
    region
        .symbols
        .iter()
        .filter(|s| s.kind == SymbolKind::Binning)
        .map(|s| s.name.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::region_equal;

    fn as_str(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }

    #[test]
    fn bc_cm_shape() {
        let r = build_bc_cm(&SchemeSpec::bc_cm()).unwrap();
        assert_eq!(r.symbol_names(), vec!["R_1", "R_2", "Rho_1", "Rho_2"]);
        let info = r.inequalities.iter().filter(|i| i.source.as_deref() != Some("nonnegativity"));
        assert_eq!(info.count(), 4);
        assert_eq!(r.inequalities.len(), 8);
        assert_eq!(r.substitutions.len(), 2);
    }

    #[test]
    fn mac_shape() {
        let r = build_mac_cm(&SchemeSpec::mac_cm()).unwrap();
        assert_eq!(r.inequalities.len(), 6 + 5);
        assert_eq!(r.identities.len(), 2);
    }

    #[test]
    fn bc_and_ifc_shapes() {
        let r = build_bc(&SchemeSpec::bc()).unwrap();
        assert_eq!(r.inequalities.len(), 8 + 6);
        let r = build_ifc(&SchemeSpec::ifc()).unwrap();
        assert_eq!(r.inequalities.len(), 12 + 8);
    }

    #[test]
    fn malformed_specs() {
        let mut spec = SchemeSpec::bc_cm();
        spec.superposition.push((1, 0));
        assert!(build_bc_cm(&spec).is_err());
        let mut spec = SchemeSpec::bc_cm();
        spec.binned.push(7);
        assert!(build_bc_cm(&spec).is_err());
        assert!(build_bc_cm(&SchemeSpec::mac_cm()).is_err());
    }

    #[test]
    fn remapped_layout() {
        let mut spec = SchemeSpec::bc_cm();
        spec.codewords[0].var = 3;
        spec.outputs[1] = 0;
        spec.superposition = vec![(3, 1)];
        spec.binned = vec![3, 1];
        assert!(build_bc_cm(&spec).is_ok());
    }

    #[test]
    fn mac_elimination_reaches_capacity() {
        let r = build_mac_cm(&SchemeSpec::mac_cm()).unwrap();
        let b = binning_symbols(&r);
        let out = r.fme_eliminate_all(&as_str(&b)).unwrap().simplify_symbolic();
        assert!(region_equal(&out, &mac_capacity_fixture()).unwrap(), "{out}");
    }

    #[test]
    fn superposition_collapse() {
        let r = build_bc_cm(&SchemeSpec::bc_cm()).unwrap().specialize_equal_laws();
        let out = r.fme_eliminate_all(&["Rho_1", "Rho_2"]).unwrap().simplify_symbolic();
        assert!(region_equal(&out, &superposition_fixture()).unwrap(), "{out}");
    }

    #[test]
    fn single_binning_from_joint_binning() {
        let r = build_bc_cm(&SchemeSpec::bc_cm()).unwrap();
        let zero_rho2 = Substitution {
            symbol: "Rho_2".into(),
            combination: Combination::new(),
        };
        let out = r
            .substitute(&zero_rho2)
            .unwrap()
            .fme_eliminate("Rho_1")
            .unwrap()
            .simplify_symbolic()
            .specialize_product_codebook();
        assert!(region_equal(&out, &single_binning_fixture()).unwrap(), "{out}");
    }

    #[test]
    fn marton_equivalence() {
        let r = build_bc(&SchemeSpec::bc()).unwrap();
        let b = binning_symbols(&r);
        let out = r.fme_eliminate_all(&as_str(&b)).unwrap();
        assert!(region_equal(&out, &build_marton()).unwrap(), "{out}");
    }

    #[test]
    fn rate_splitting_divergence_is_negative_conditional_information() {
        let spec = SchemeSpec::bc();
        let d = bc_rate_splitting_divergence(&spec)
            .canonicalize(&bc_identities(&spec))
            .unwrap();
        let i = mi(&[1], &[2], &[0]);
        assert_eq!(d, -i);
    }

    #[test]
    fn split_matrix_rows() {
        let r = build_bc(&SchemeSpec::bc()).unwrap();
        let one = SplitSpec::fixed(BigRational::one(), BigRational::zero()).unwrap();
        let s = apply_split(&r, &one).unwrap();
        assert_eq!(s.equalities[0].lhs, combo([(RP1, 1), ("R_1to1", -1), ("R_1to12", -1)]));
        assert_eq!(s.equalities[1].lhs, combo([(RP2, 1), ("R_1to2", -1)]));
        assert!(SplitSpec::from_f64(1.5, 0.0).is_err());
        assert!(SplitSpec::from_f64(0.5, -0.1).is_err());
    }

    #[test]
    fn ifc_alpha_zero_uses_common_message_only() {
        let r = build_ifc(&SchemeSpec::ifc()).unwrap();
        let sp = SplitSpec::fixed(BigRational::zero(), BigRational::one()).unwrap();
        let s = apply_split(&r, &sp).unwrap();
        let private1 = s.equalities.iter().find(|e| e.lhs.contains_key("R_1to1")).unwrap();
        assert_eq!(private1.lhs, combo([("R_1to1", 1)]));
        let common1 = s.equalities.iter().find(|e| e.lhs.contains_key("R_1to12")).unwrap();
        assert_eq!(common1.lhs, combo([("R_1to12", 1), (RP1, -1)]));
    }

    #[test]
    fn split_elimination_matches_substitution() {
        let r = build_bc(&SchemeSpec::bc()).unwrap();
        let half = crate::infoexpr::rational(1, 2);
        let sp = SplitSpec::fixed(half.clone(), BigRational::zero()).unwrap();
        let via_eqs = apply_split(&r, &sp).unwrap().fme_eliminate_all(&["R_1to1", "R_1to2"]).unwrap();
        let mut direct = r.clone();
        direct.add_symbol(RateSymbol::new(RP1, SymbolKind::Total)).unwrap();
        direct.add_symbol(RateSymbol::new(RP2, SymbolKind::Total)).unwrap();
        let mut c1 = combo([(RP1, 1)]);
        c1.insert("R_1to12".into(), -half.clone());
        let mut c2 = combo([(RP2, 1)]);
        c2.insert("R_1to12".into(), -half);
        let direct = direct
            .substitute(&Substitution { symbol: "R_1to1".into(), combination: c1 })
            .unwrap()
            .substitute(&Substitution { symbol: "R_1to2".into(), combination: c2 })
            .unwrap();
        assert!(region_equal(&via_eqs, &direct).unwrap());
    }

    #[test]
    fn build_by_name_covers_listing() {
        for name in SCHEME_NAMES {
            assert!(build_by_name(name, None).is_ok(), "{name}");
        }
        assert!(build_by_name("nope", None).is_err());
        assert!(build_by_name("hk", Some(&SplitSpec::free())).is_err());
    }
}
