//! One runner per experiment kind. Each returns the `result.json` body and
//! the CSV files to write next to it.

use serde::Serialize;
use serde_json::{json, Value};
use supbin::codingsim::{
    covering_experiment, decoder1_exact, inaccuracy_experiment, BcCmSimulator, CoveringConfig, Rates, SimConfig,
    DEFAULT_MARGIN,
};
use supbin::format::format_g9;
use supbin::schemes::{binning_symbols, build_by_name};
use supbin::typicality::TypicalityParams;
use supbin::{InfoExpr, JointPmf, RateRegion};

use crate::config::{
    BcCmParams, BoundaryParams, CompareParams, CoveringParams, Decoder1Route, InaccuracyParams, InfoEvalParams, Job,
    PmfSpec, RegionSpec, Specialization, Victims,
};
use crate::error::{at, CliError};

/// Everything a run produces.
#[derive(Debug)]
pub struct Output {
    pub result: Value,
    /// `(file name, contents)` pairs.
    pub files: Vec<(String, String)>,
}

pub fn run_job(job: &Job, seed: u64) -> Result<Output, CliError> {
    match job {
        Job::RegionBuild(spec) | Job::RegionFme(spec) => region_build(spec),
        Job::RegionCompare(p) => region_compare(p),
        Job::RegionBoundary(p) => region_boundary(p),
        Job::SimCovering(p) => sim_covering(p, seed),
        Job::SimInaccuracy(p) => sim_inaccuracy(p, seed),
        Job::SimBcCm(p) => sim_bc_cm(p, seed),
        Job::InfoEval(p) => info_eval(p),
    }
}

/// Builds the region described by `spec`; `scope` locates it in the config.
pub fn resolve_region(spec: &RegionSpec, scope: &str) -> Result<RateRegion, CliError> {
    let split = spec
        .split
        .as_ref()
        .map(|s| s.to_spec(&format!("{scope}.split")))
        .transpose()?;
    let mut region = build_by_name(&spec.scheme, split.as_ref()).map_err(at(scope))?;
    region = match spec.specialize {
        Some(Specialization::EqualLaws) => region.specialize_equal_laws(),
        Some(Specialization::ProductCodebook) => region.specialize_product_codebook(),
        None => region,
    };
    if let Some(v) = &spec.eliminate {
        let names = match v {
            Victims::Preset(_) => binning_symbols(&region),
            Victims::Named(n) => n.clone(),
        };
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        region = region
            .fme_eliminate_all(&refs)
            .map_err(|e| CliError::from(e).within(&format!("{scope}.eliminate")))?;
    }
    if spec.simplify {
        region = region.simplify_symbolic();
    }
    Ok(region)
}

fn inequalities_csv(region: &RateRegion) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Failed(e.to_string());
    w.write_record(["index", "lhs", "sense", "rhs", "source"]).map_err(fail)?;
    for (i, ineq) in region.inequalities.iter().enumerate() {
        let n = ineq.normalized();
        let lhs = n
            .lhs
            .iter()
            .map(|(name, k)| format!("{k} {name}"))
            .collect::<Vec<_>>()
            .join(" + ");
        w.write_record([
            i.to_string(),
            lhs,
            n.sense.to_string(),
            n.rhs.to_string(),
            ineq.source.clone().unwrap_or_default(),
        ])
        .map_err(fail)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Failed(e.to_string()))
}

fn region_summary(region: &RateRegion) -> Value {
    json!({
        "symbols": region.symbol_names(),
        "inequalities": region.inequalities.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        "equalities": region.equalities.len(),
        "side_conditions": region.side_conditions.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

fn region_build(spec: &RegionSpec) -> Result<Output, CliError> {
    let region = resolve_region(spec, "params")?;
    Ok(Output {
        result: json!({ "scheme": spec.scheme, "region": region_summary(&region) }),
        files: vec![
            ("region.json".into(), region.to_json()? + "\n"),
            ("inequalities.csv".into(), inequalities_csv(&region)?),
        ],
    })
}

fn region_compare(p: &CompareParams) -> Result<Output, CliError> {
    let left = resolve_region(&p.left, "params.left")?;
    let right = resolve_region(&p.right, "params.right")?;
    let equal = supbin::region_equal(&left, &right).map_err(at("params"))?;
    let lk = left.simplify_symbolic().normalized_keys()?;
    let rk = right.simplify_symbolic().normalized_keys()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Failed(e.to_string());
    w.write_record(["constraint", "left", "right"]).map_err(fail)?;
    for key in lk.union(&rk) {
        let flag = |s: &std::collections::BTreeSet<String>| u8::from(s.contains(key)).to_string();
        w.write_record([key.clone(), flag(&lk), flag(&rk)]).map_err(fail)?;
    }
    Ok(Output {
        result: json!({
            "equal": equal,
            "left_only": lk.difference(&rk).collect::<Vec<_>>(),
            "right_only": rk.difference(&lk).collect::<Vec<_>>(),
        }),
        files: vec![("constraints.csv".into(), finish(w)?)],
    })
}

fn laws(pe: &PmfSpec, pc: Option<&PmfSpec>) -> Result<(JointPmf, JointPmf), CliError> {
    let e = pe.to_pmf("params.pe")?;
    let c = match pc {
        Some(pc) => pc.to_pmf("params.pc")?,
        None => e.clone(),
    };
    Ok((e, c))
}

fn region_boundary(p: &BoundaryParams) -> Result<Output, CliError> {
    let region = resolve_region(&p.region, "params.region")?;
    let (pe, pc) = laws(&p.pe, p.pc.as_ref())?;
    let poly = region.instantiate(&pe, &pc).map_err(at("params.pe"))?;
    let b = poly
        .boundary_2d((&p.axes[0], &p.axes[1]), p.directions)
        .map_err(at("params.axes"))?;
    let mut sweep = String::from("angle,support,x,y,unbounded\n");
    for s in &b.samples {
        sweep.push_str(&format!(
            "{},{},{},{},{}\n",
            format_g9(s.angle),
            format_g9(s.support),
            format_g9(s.point.0),
            format_g9(s.point.1),
            u8::from(s.unbounded)
        ));
    }
    let unbounded = b.samples.iter().filter(|s| s.unbounded).count();
    Ok(Output {
        result: json!({
            "axes": p.axes,
            "directions": p.directions,
            "unbounded_directions": unbounded,
            "frontier": b.frontier(),
        }),
        files: vec![("boundary.csv".into(), b.to_csv()), ("directions.csv".into(), sweep)],
    })
}

fn typicality(eps: f64, strict: bool) -> Result<TypicalityParams, CliError> {
    TypicalityParams::new(eps, strict).map_err(|e| CliError::from(e).within("params"))
}

fn sim_covering(p: &CoveringParams, seed: u64) -> Result<Output, CliError> {
    let target = p.target.to_pmf("params.target")?;
    let source = p.source.to_pmf("params.source")?;
    let t = typicality(p.epsilon, p.strict)?;
    let mut csv = format!("{}\n", supbin::codingsim::CoveringReport::CSV_HEADER);
    let mut reports = Vec::new();
    for rate in p.rate_grid().map_err(|e| e.within("params"))? {
        let r = covering_experiment(&CoveringConfig {
            target: target.clone(),
            source: source.clone(),
            rate,
            n: p.n,
            typicality: t,
            trials: p.trials,
            seed,
            route: p.route,
        })
        .map_err(at("params"))?;
        csv.push_str(&r.csv_row());
        csv.push('\n');
        reports.push(r);
    }
    let divergence = reports.first().map(|r| r.divergence);
    Ok(Output {
        result: json!({ "divergence": divergence, "points": reports }),
        files: vec![("covering.csv".into(), csv)],
    })
}

fn sim_inaccuracy(p: &InaccuracyParams, seed: u64) -> Result<Output, CliError> {
    let law = p.p.to_pmf("params.p")?;
    let q = p.q.to_pmf("params.q")?;
    let r = inaccuracy_experiment(&law, &q, p.n, p.trials, seed).map_err(at("params"))?;
    #[derive(Serialize)]
    struct Summary {
        expected: f64,
        mean: f64,
        std_dev: f64,
        min: f64,
        max: f64,
        max_type_identity_gap: f64,
    }
    let s = Summary {
        expected: r.expected,
        mean: r.mean,
        std_dev: r.std_dev,
        min: r.min,
        max: r.max,
        max_type_identity_gap: r.max_type_identity_gap,
    };
    Ok(Output {
        result: serde_json::to_value(s).map_err(|e| CliError::Failed(e.to_string()))?,
        files: vec![("inaccuracy.csv".into(), r.csv())],
    })
}

fn sim_bc_cm(p: &BcCmParams, seed: u64) -> Result<Output, CliError> {
    let (pe, pc) = laws(&p.pe, p.pc.as_ref())?;
    let channel = p.channel.to_channel().map_err(|e| e.within("params"))?;
    let pairs = pe.mass().len();
    let input_map = p.input_map.clone().unwrap_or_else(|| (0..pairs).collect());
    let cfg = SimConfig {
        n: p.n,
        rates: Rates {
            r1: p.rates.r1,
            r2: p.rates.r2,
            rho1: p.rates.rho1,
            rho2: p.rates.rho2,
        },
        typicality: typicality(p.epsilon, p.strict)?,
        margin: p.margin.unwrap_or(DEFAULT_MARGIN),
        trials: p.trials,
        seed,
        pe,
        pc,
        channel,
        input_map,
    };
    match p.decoder1 {
        Decoder1Route::Simulate => {
            let r = BcCmSimulator::new(cfg).map_err(at("params"))?.run_campaign();
            let (trials, summary) = (r.trials_csv(), r.summary_csv());
            let mut v = serde_json::to_value(&r).map_err(|e| CliError::Failed(e.to_string()))?;
            if let Some(obj) = v.as_object_mut() {
                obj.remove("trials");
            }
            Ok(Output {
                result: v,
                files: vec![("trials.csv".into(), trials), ("summary.csv".into(), summary)],
            })
        }
        Decoder1Route::Exact => {
            let r = decoder1_exact(cfg).map_err(at("params"))?;
            Ok(Output {
                result: json!({ "route": "exact", "decode1": r.decode1, "sizes": r.sizes }),
                files: vec![("decoder1.csv".into(), r.csv()), ("summary.csv".into(), r.summary_csv())],
            })
        }
    }
}

fn info_eval(p: &InfoEvalParams) -> Result<Output, CliError> {
    let (pe, pc) = laws(&p.pe, p.pc.as_ref())?;
    let mut rows: Vec<(String, String, f64)> = Vec::new();
    for (i, ne) in p.expressions.iter().enumerate() {
        let scope = format!("params.expressions[{i}].expr");
        let expr: InfoExpr = ne.expr.parse().map_err(|e| CliError::from(e).within(&scope))?;
        let v = expr.evaluate(&pe, &pc).map_err(at(&scope))?;
        rows.push((ne.name.clone(), expr.to_string(), v));
    }
    if let Some(spec) = &p.region {
        let region = resolve_region(spec, "params.region")?;
        for (i, ineq) in region.inequalities.iter().enumerate() {
            let v = ineq.rhs.evaluate(&pe, &pc).map_err(at("params.pe"))?;
            let name = format!("row {i}: {}", ineq.source.as_deref().unwrap_or("derived"));
            rows.push((name, ineq.rhs.to_string(), v));
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Failed(e.to_string());
    w.write_record(["name", "expression", "value"]).map_err(fail)?;
    for (name, text, v) in &rows {
        w.write_record([name.as_str(), text.as_str(), &format_g9(*v)]).map_err(fail)?;
    }
    let values: Vec<Value> = rows
        .iter()
        .map(|(n, e, v)| json!({ "name": n, "expression": e, "value": finite_or_text(*v) }))
        .collect();
    Ok(Output {
        result: json!({ "values": values }),
        files: vec![("values.csv".into(), finish(w)?)],
    })
}

/// JSON has no infinities; those are reported as text.
fn finite_or_text(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(format_g9(v))
    }
}
