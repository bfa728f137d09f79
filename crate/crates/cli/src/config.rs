//! Experiment files: a versioned JSON envelope carrying a `kind`, a `seed`
//! and a kind-specific `params` object.
//!
//! ```json
//! { "version": 1, "seed": 7, "kind": "sim-covering", "params": { ... } }
//! ```
//!
//! Distributions are written as nested row-major arrays with explicit
//! cardinalities, `{"cardinalities": [2, 2], "mass": [[0.5, 0], [0, 0.5]]}`.
//! Unknown fields are rejected everywhere.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;
use supbin::codingsim::{Channel, CoveringRoute};
use supbin::infoexpr::{parse_ratio, BigRational};
use supbin::schemes::SplitSpec;
use supbin::JointPmf;

use crate::error::{at, CliError};

pub const CONFIG_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    RegionBuild,
    RegionFme,
    RegionCompare,
    RegionBoundary,
    SimCovering,
    SimInaccuracy,
    SimBcCm,
    InfoEval,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::RegionBuild => "region-build",
            Kind::RegionFme => "region-fme",
            Kind::RegionCompare => "region-compare",
            Kind::RegionBoundary => "region-boundary",
            Kind::SimCovering => "sim-covering",
            Kind::SimInaccuracy => "sim-inaccuracy",
            Kind::SimBcCm => "sim-bc-cm",
            Kind::InfoEval => "info-eval",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    version: Option<u64>,
    seed: Option<u64>,
    kind: Option<Kind>,
    params: Option<Value>,
}

/// A validated experiment file.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub job: Job,
}

#[derive(Debug, Clone)]
pub enum Job {
    RegionBuild(RegionSpec),
    RegionFme(RegionSpec),
    RegionCompare(CompareParams),
    RegionBoundary(BoundaryParams),
    SimCovering(CoveringParams),
    SimInaccuracy(InaccuracyParams),
    SimBcCm(BcCmParams),
    InfoEval(InfoEvalParams),
}

impl Job {
    pub fn kind(&self) -> Kind {
        match self {
            Job::RegionBuild(_) => Kind::RegionBuild,
            Job::RegionFme(_) => Kind::RegionFme,
            Job::RegionCompare(_) => Kind::RegionCompare,
            Job::RegionBoundary(_) => Kind::RegionBoundary,
            Job::SimCovering(_) => Kind::SimCovering,
            Job::SimInaccuracy(_) => Kind::SimInaccuracy,
            Job::SimBcCm(_) => Kind::SimBcCm,
            Job::InfoEval(_) => Kind::InfoEval,
        }
    }
}

fn serde_error<E: std::fmt::Display>(e: serde_path_to_error::Error<E>) -> CliError {
    let path = e.path().to_string();
    let field = if path == "." { String::new() } else { path };
    CliError::invalid(field, e.inner().to_string())
}

fn decode<T: DeserializeOwned>(value: Value, scope: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| serde_error(e).within(scope))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let env: Envelope = serde_path_to_error::deserialize(de).map_err(serde_error)?;
        match env.version {
            Some(CONFIG_VERSION) => {}
            Some(v) => return Err(CliError::invalid("version", format!("unsupported version {v}, expected 1"))),
            None => return Err(CliError::invalid("version", "missing; expected 1")),
        }
        let seed = env
            .seed
            .ok_or_else(|| CliError::invalid("seed", "missing; every run needs an explicit seed"))?;
        let kind = env.kind.ok_or_else(|| CliError::invalid("kind", "missing"))?;
        let params = env.params.ok_or_else(|| CliError::invalid("params", "missing"))?;
        let p = "params";
        let job = match kind {
            Kind::RegionBuild => {
                let spec: RegionSpec = decode(params, p)?;
                if spec.eliminate.is_some() {
                    return Err(CliError::invalid("params.eliminate", "not allowed here; use region-fme"));
                }
                Job::RegionBuild(spec)
            }
            Kind::RegionFme => {
                let spec: RegionSpec = decode(params, p)?;
                if spec.eliminate.is_none() {
                    return Err(CliError::invalid("params.eliminate", "missing"));
                }
                Job::RegionFme(spec)
            }
            Kind::RegionCompare => Job::RegionCompare(decode(params, p)?),
            Kind::RegionBoundary => {
                let b: BoundaryParams = decode(params, p)?;
                if b.directions == 0 {
                    return Err(CliError::invalid("params.directions", "must be positive"));
                }
                Job::RegionBoundary(b)
            }
            Kind::SimCovering => {
                let c: CoveringParams = decode(params, p)?;
                c.rate_grid().map_err(|e| e.within(p))?;
                Job::SimCovering(c)
            }
            Kind::SimInaccuracy => Job::SimInaccuracy(decode(params, p)?),
            Kind::SimBcCm => Job::SimBcCm(decode(params, p)?),
            Kind::InfoEval => Job::InfoEval(decode(params, p)?),
        };
        Ok(ExperimentConfig { seed, job })
    }
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

/// A pmf as nested row-major arrays.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfSpec {
    pub cardinalities: Vec<usize>,
    pub mass: Value,
}

impl PmfSpec {
    /// Builds the pmf; `scope` names this field in error messages.
    pub fn to_pmf(&self, scope: &str) -> Result<JointPmf, CliError> {
        if self.cardinalities.is_empty() {
            return Err(CliError::invalid(format!("{scope}.cardinalities"), "at least one variable is needed"));
        }
        let mut flat = Vec::new();
        flatten(&self.mass, &self.cardinalities, "mass", &mut flat).map_err(|e| e.within(scope))?;
        JointPmf::from_cards(self.cardinalities.clone(), flat).map_err(at(scope))
    }
}

fn flatten(v: &Value, cards: &[usize], path: &str, out: &mut Vec<f64>) -> Result<(), CliError> {
    match cards.split_first() {
        None => {
            let x = v
                .as_f64()
                .ok_or_else(|| CliError::invalid(path, format!("expected a number, found {v}")))?;
            out.push(x);
            Ok(())
        }
        Some((&card, rest)) => {
            let items = v
                .as_array()
                .ok_or_else(|| CliError::invalid(path, format!("expected an array of {card} entries")))?;
            if items.len() != card {
                return Err(CliError::invalid(
                    path,
                    format!("expected {card} entries, found {}", items.len()),
                ));
            }
            items
                .iter()
                .enumerate()
                .try_for_each(|(i, item)| flatten(item, rest, &format!("{path}[{i}]"), out))
        }
    }
}

/// A rational given as a JSON number or as text such as `"1/3"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Ratio {
    Number(f64),
    Text(String),
}

impl Ratio {
    fn parse(&self, field: &str) -> Result<BigRational, CliError> {
        let text = match self {
            Ratio::Number(x) => x.to_string(),
            Ratio::Text(t) => t.clone(),
        };
        parse_ratio(&text).map_err(|e| CliError::from(e).within(field))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitModeDoc {
    #[default]
    Fixed,
    Free,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitDoc {
    #[serde(default)]
    pub mode: SplitModeDoc,
    pub alpha: Option<Ratio>,
    pub beta: Option<Ratio>,
}

impl SplitDoc {
    pub fn to_spec(&self, scope: &str) -> Result<SplitSpec, CliError> {
        match self.mode {
            SplitModeDoc::Free => {
                if self.alpha.is_some() || self.beta.is_some() {
                    return Err(CliError::invalid(format!("{scope}.mode"), "free splits take no alpha or beta"));
                }
                Ok(SplitSpec::free())
            }
            SplitModeDoc::Fixed => {
                let zero = Ratio::Number(0.0);
                let alpha = self
                    .alpha
                    .as_ref()
                    .ok_or_else(|| CliError::invalid(format!("{scope}.alpha"), "missing"))?
                    .parse("alpha")
                    .map_err(|e| e.within(scope))?;
                let beta = self.beta.as_ref().unwrap_or(&zero).parse("beta").map_err(|e| e.within(scope))?;
                SplitSpec::fixed(alpha, beta).map_err(at(scope))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Specialization {
    /// Encoding and codebook laws coincide.
    EqualLaws,
    /// Codebook law is the product of the encoding marginals.
    ProductCodebook,
}

/// Which symbols to eliminate: `"binning"` or an explicit list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Victims {
    Preset(VictimPreset),
    Named(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VictimPreset {
    Binning,
}

/// A region by scheme name, with optional split, specialization and
/// symbolic elimination, applied in that order.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub scheme: String,
    pub split: Option<SplitDoc>,
    pub specialize: Option<Specialization>,
    pub eliminate: Option<Victims>,
    #[serde(default = "yes")]
    pub simplify: bool,
}

fn yes() -> bool {
    true
}

fn default_directions() -> usize {
    720
}

fn default_strict() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareParams {
    pub left: RegionSpec,
    pub right: RegionSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryParams {
    pub region: RegionSpec,
    pub pe: PmfSpec,
    /// Defaults to `pe`.
    pub pc: Option<PmfSpec>,
    pub axes: [String; 2],
    #[serde(default = "default_directions")]
    pub directions: usize,
}

// ---------------------------------------------------------------------------
// Simulations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringParams {
    pub target: PmfSpec,
    pub source: PmfSpec,
    pub n: usize,
    pub epsilon: f64,
    #[serde(default = "default_strict")]
    pub strict: bool,
    pub trials: usize,
    #[serde(default = "auto_route")]
    pub route: CoveringRoute,
    pub rates: Option<Vec<f64>>,
    pub sweep: Option<Sweep>,
}

fn auto_route() -> CoveringRoute {
    CoveringRoute::Auto
}

impl CoveringParams {
    /// The requested rates: the explicit list, or the sweep grid
    /// `from, from + step, ...` up to `to`.
    pub fn rate_grid(&self) -> Result<Vec<f64>, CliError> {
        match (&self.rates, &self.sweep) {
            (Some(r), None) if !r.is_empty() => Ok(r.clone()),
            (Some(_), None) => Err(CliError::invalid("rates", "empty list")),
            (None, Some(s)) => {
                if !(s.step > 0.0 && s.from.is_finite() && s.to.is_finite() && s.from <= s.to) {
                    return Err(CliError::invalid("sweep", "need from <= to and a positive step"));
                }
                let count = ((s.to - s.from) / s.step + 1e-9).floor() as usize + 1;
                if count > 10_000 {
                    return Err(CliError::invalid("sweep", "more than 10000 points"));
                }
                // Rounded to 12 decimals so that 0.3 + 4 * 0.1 prints as 0.7.
                Ok((0..count)
                    .map(|i| ((s.from + i as f64 * s.step) * 1e12).round() / 1e12)
                    .collect())
            }
            (Some(_), Some(_)) => Err(CliError::invalid("sweep", "give either rates or sweep, not both")),
            (None, None) => Err(CliError::invalid("rates", "missing; give rates or sweep")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InaccuracyParams {
    pub p: PmfSpec,
    pub q: PmfSpec,
    pub n: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesDoc {
    pub r1: f64,
    pub r2: f64,
    #[serde(default)]
    pub rho1: f64,
    #[serde(default)]
    pub rho2: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// Both receivers see the input letter.
    Noiseless { inputs: usize },
    /// `rows[x]` lists `P(y1, y2 | x)` with `y2` varying fastest.
    Table {
        y1_card: usize,
        y2_card: usize,
        rows: Vec<Vec<f64>>,
    },
}

impl ChannelSpec {
    pub fn to_channel(&self) -> Result<Channel, CliError> {
        match self {
            ChannelSpec::Noiseless { inputs } if *inputs == 0 => {
                Err(CliError::invalid("channel.inputs", "must be positive"))
            }
            ChannelSpec::Noiseless { inputs } => Ok(Channel::noiseless(*inputs)),
            ChannelSpec::Table { y1_card, y2_card, rows } => {
                Channel::new(rows.len(), *y1_card, *y2_card, rows.clone()).map_err(at(""))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decoder1Route {
    /// Store the codebook and run the full encoder and both decoders.
    #[default]
    Simulate,
    /// Decoder 1 only, with the confusion probability computed exactly.
    Exact,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcCmParams {
    pub n: usize,
    pub rates: RatesDoc,
    pub epsilon: f64,
    #[serde(default = "default_strict")]
    pub strict: bool,
    pub margin: Option<f64>,
    pub trials: usize,
    pub pe: PmfSpec,
    /// Defaults to `pe`.
    pub pc: Option<PmfSpec>,
    pub channel: ChannelSpec,
    /// Defaults to `x = u1 * |U2| + u2`.
    pub input_map: Option<Vec<usize>>,
    #[serde(default)]
    pub decoder1: Decoder1Route,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedExpr {
    pub name: String,
    /// Signed-coefficient text, e.g. `+1 H_e{0} -1 H_e{0,1} +1 H_e{1}`.
    pub expr: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoEvalParams {
    pub pe: PmfSpec,
    pub pc: Option<PmfSpec>,
    #[serde(default)]
    pub expressions: Vec<NamedExpr>,
    /// Evaluate every constant of this region as well.
    pub region: Option<RegionSpec>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(text: &str) -> String {
        match ExperimentConfig::parse(text).unwrap_err() {
            CliError::Invalid { field, .. } => field,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn envelope_fields() {
        assert_eq!(field_of(r#"{"seed":1,"kind":"region-build","params":{"scheme":"bc"}}"#), "version");
        assert_eq!(field_of(r#"{"version":1,"kind":"region-build","params":{"scheme":"bc"}}"#), "seed");
        assert_eq!(field_of(r#"{"version":2,"seed":1,"kind":"region-build","params":{}}"#), "version");
        assert_eq!(field_of(r#"{"version":1,"seed":1,"kind":"region-build","params":{"scheme":"bc","x":1}}"#), "params.x");
        let f = field_of(r#"{"version":1,"seed":1,"kind":"region-build","extra":0,"params":{}}"#);
        assert_eq!(f, "extra");
    }

    #[test]
    fn nested_mass() {
        let spec = PmfSpec {
            cardinalities: vec![2, 3],
            mass: serde_json::json!([[0.1, 0.2, 0.2], [0.1, 0.1, 0.3]]),
        };
        assert_eq!(spec.to_pmf("pe").unwrap().mass(), &[0.1, 0.2, 0.2, 0.1, 0.1, 0.3]);
        let short = PmfSpec {
            cardinalities: vec![2, 3],
            mass: serde_json::json!([[0.1, 0.2, 0.2], [0.1, 0.4]]),
        };
        match short.to_pmf("pe").unwrap_err() {
            CliError::Invalid { field, .. } => assert_eq!(field, "pe.mass[1]"),
            e => panic!("{e}"),
        }
        let light = PmfSpec {
            cardinalities: vec![2],
            mass: serde_json::json!([0.4, 0.5]),
        };
        match light.to_pmf("params.pe").unwrap_err() {
            CliError::Invalid { field, .. } => assert_eq!(field, "params.pe.mass"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn sweep_grid() {
        let c = CoveringParams {
            target: PmfSpec { cardinalities: vec![1], mass: serde_json::json!([1.0]) },
            source: PmfSpec { cardinalities: vec![1], mass: serde_json::json!([1.0]) },
            n: 1,
            epsilon: 0.1,
            strict: true,
            trials: 1,
            route: CoveringRoute::Auto,
            rates: None,
            sweep: Some(Sweep { from: 0.3, to: 0.7, step: 0.05 }),
        };
        let g = c.rate_grid().unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[8], 0.7);
        assert_eq!(g[1], 0.35);
    }
}
