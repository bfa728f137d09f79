//! Monte Carlo simulation of superposition coding with joint binning on a
//! two-receiver broadcast channel, plus the covering and inaccuracy
//! experiments.
//!
//! Randomness: every trial and stage draws from its own ChaCha8 stream,
//! `seed` with stream id `16 * trial + stage`, so results do not depend on
//! how trials are spread over threads.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::format_g9;
use crate::prob::{inaccuracy, JointPmf};
use crate::typeclass::{ln_hit_probability, prob_any_hit, TypeClass};
use crate::typicality::{empirical_type, log_prob_under, Sequence, TypicalSet, TypicalityParams};

/// Largest number of sequences a single experiment may hold or draw.
pub const SEQUENCE_GUARD_LOG2: u32 = 26;

/// Default stand-in for the vanishing slack of the covering lemma, in bits.
pub const DEFAULT_MARGIN: f64 = 0.1;

const STAGE_CODEBOOK: u64 = 0;
const STAGE_MESSAGES: u64 = 1;
const STAGE_ENCODER: u64 = 2;
const STAGE_CHANNEL: u64 = 3;
const STAGE_OUTCOME: u64 = 4;

/// The random stream of one stage of one trial.
pub fn stage_rng(seed: u64, trial: u64, stage: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(16).wrapping_add(stage));
    rng
}

/// A success count with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
}

impl Proportion {
    pub fn rate(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.successes as f64 / self.trials as f64)
    }

    /// 95% Wilson score interval.
    pub fn wilson(&self) -> Option<(f64, f64)> {
        const Z: f64 = 1.959_963_984_540_054;
        let p = self.rate()?;
        let n = self.trials as f64;
        let z2 = Z * Z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
        let lo = if self.successes == 0 { 0.0 } else { (centre - half).max(0.0) };
        let hi = if self.successes == self.trials { 1.0 } else { (centre + half).min(1.0) };
        Some((lo, hi))
    }

    fn csv_fields(&self) -> String {
        let opt = |x: Option<f64>| x.map(format_g9).unwrap_or_default();
        let (lo, hi) = match self.wilson() {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        format!("{},{},{},{},{}", self.successes, self.trials, opt(self.rate()), opt(lo), opt(hi))
    }
}

fn log2_size(n: usize, rate: f64, field: &str) -> Result<u32> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::validation(field, format!("rate {rate} must be finite and nonnegative")));
    }
    let k = (n as f64 * rate).round();
    if k > f64::from(u32::MAX) {
        return Err(Error::validation(field, "rate too large"));
    }
    Ok(k as u32)
}

fn guard(log2_counts: &[u32], what: &str) -> Result<()> {
    let total: f64 = log2_counts.iter().map(|&k| (k as f64).exp2()).sum();
    let limit = f64::from(SEQUENCE_GUARD_LOG2).exp2();
    if total > limit {
        return Err(Error::Refused(format!(
            "{what} needs {total:.6e} sequences; the budget is 2^{SEQUENCE_GUARD_LOG2}"
        )));
    }
    Ok(())
}

fn sampler(weights: &[f64], field: &str) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| Error::validation(field, e.to_string()))
}

// ---------------------------------------------------------------------------
// Broadcast channel with a common message
// ---------------------------------------------------------------------------

/// Memoryless two-output channel `P(y1, y2 | x)`, one row per input letter
/// with `y2` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub x_card: usize,
    pub y1_card: usize,
    pub y2_card: usize,
    pub rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(x_card: usize, y1_card: usize, y2_card: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if x_card == 0 || y1_card == 0 || y2_card == 0 {
            return Err(Error::validation("channel", "alphabets must be nonempty"));
        }
        if rows.len() != x_card {
            return Err(Error::validation("channel", format!("expected {x_card} rows, got {}", rows.len())));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != y1_card * y2_card {
                return Err(Error::validation("channel", format!("row {x} has {} entries", row.len())));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::validation("channel", format!("row {x} has a negative entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > crate::prob::RENORMALIZE_TOLERANCE {
                return Err(Error::validation("channel", format!("row {x} sums to {s}")));
            }
        }
        Ok(Channel {
            x_card,
            y1_card,
            y2_card,
            rows,
        })
    }

    /// Both receivers observe the input without noise.
    pub fn noiseless(x_card: usize) -> Self {
        let rows = (0..x_card)
            .map(|x| {
                let mut row = vec![0.0; x_card * x_card];
                row[x * x_card + x] = 1.0;
                row
            })
            .collect();
        Channel {
            x_card,
            y1_card: x_card,
            y2_card: x_card,
            rows,
        }
    }
}

/// Message and binning rates in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    pub r1: f64,
    pub r2: f64,
    pub rho1: f64,
    pub rho2: f64,
}

/// One end-to-end simulation setup.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n: usize,
    pub rates: Rates,
    pub typicality: TypicalityParams,
    pub margin: f64,
    pub trials: usize,
    pub seed: u64,
    /// Encoding law over `(U1, U2)`.
    pub pe: JointPmf,
    /// Codebook law over `(U1, U2)`.
    pub pc: JointPmf,
    pub channel: Channel,
    /// `x = input_map[u1 * |U2| + u2]`.
    pub input_map: Vec<usize>,
}

/// Codebook dimensions as powers of two, after rounding `N * rate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodebookSizes {
    pub log2_m1: u32,
    pub log2_b1: u32,
    pub log2_m2: u32,
    pub log2_b2: u32,
}

impl CodebookSizes {
    fn count(k: u32) -> usize {
        1usize << k
    }

    pub fn m1(&self) -> usize {
        Self::count(self.log2_m1)
    }
    pub fn b1(&self) -> usize {
        Self::count(self.log2_b1)
    }
    pub fn m2(&self) -> usize {
        Self::count(self.log2_m2)
    }
    pub fn b2(&self) -> usize {
        Self::count(self.log2_b2)
    }

    /// Rates actually used, `log2 size / N`.
    pub fn effective_rates(&self, n: usize) -> Rates {
        let f = |k: u32| f64::from(k) / n as f64;
        Rates {
            r1: f(self.log2_m1),
            r2: f(self.log2_m2),
            rho1: f(self.log2_b1),
            rho2: f(self.log2_b2),
        }
    }
}

/// Base codewords indexed by `(w1, b1)` and satellites by `(w1, b1, w2, b2)`,
/// stored row-major, one symbol per byte pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    sizes: CodebookSizes,
    base: Vec<u16>,
    satellites: Vec<u16>,
}

impl Codebook {
    pub fn sizes(&self) -> CodebookSizes {
        self.sizes
    }

    fn base_slot(&self, w1: usize, b1: usize) -> usize {
        w1 * self.sizes.b1() + b1
    }

    fn satellite_slot(&self, w1: usize, b1: usize, w2: usize, b2: usize) -> usize {
        (self.base_slot(w1, b1) * self.sizes.m2() + w2) * self.sizes.b2() + b2
    }

    pub fn base(&self, w1: usize, b1: usize) -> &[u16] {
        let s = self.base_slot(w1, b1) * self.n;
        &self.base[s..s + self.n]
    }

    pub fn satellite(&self, w1: usize, b1: usize, w2: usize, b2: usize) -> &[u16] {
        let s = self.satellite_slot(w1, b1, w2, b2) * self.n;
        &self.satellites[s..s + self.n]
    }
}

/// Result of a decoder scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecodeOutcome<T> {
    /// Every typical candidate carries the same message; the first is kept.
    Found { indices: T },
    NotFound,
    /// Typical candidates carry different messages.
    Ambiguous,
}

/// Bin choice of the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Encoding {
    pub w1: usize,
    pub w2: usize,
    pub b1: usize,
    pub b2: usize,
    pub found: bool,
    /// Bin pairs visited up to and including the first typical one.
    pub steps: usize,
    /// Typical bin pairs for this message pair.
    pub typical_pairs: usize,
}

/// Outcome of one end-to-end trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub encode_ok: bool,
    pub bins_found: Option<(usize, usize)>,
    pub decode1_ok: bool,
    pub decode2_ok: bool,
    pub decode1_ambiguous: bool,
    pub decode2_ambiguous: bool,
    pub bin_search_steps: usize,
    pub typical_bin_pairs: usize,
}

/// Aggregate over all trials of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub n: usize,
    pub requested_rates: Rates,
    pub effective_rates: Rates,
    pub sizes: CodebookSizes,
    pub encode: Proportion,
    pub decode1: Proportion,
    pub decode2: Proportion,
    pub overall: Proportion,
    /// Mean number of typical bin pairs per encoded message pair.
    pub mean_typical_bin_pairs: Option<f64>,
    pub max_typical_bin_pairs: usize,
    pub trials: Vec<TrialReport>,
}

impl CampaignReport {
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("trial,encode_ok,b1,b2,dec1,dec2\n");
        for t in &self.trials {
            let (b1, b2) = t
                .bins_found
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t.trial,
                u8::from(t.encode_ok),
                b1,
                b2,
                u8::from(t.decode1_ok),
                u8::from(t.decode2_ok)
            ));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("metric,successes,trials,rate,wilson_low,wilson_high\n");
        for (name, p) in [
            ("encode", &self.encode),
            ("decode1", &self.decode1),
            ("decode2", &self.decode2),
            ("overall", &self.overall),
        ] {
            out.push_str(&format!("{name},{}\n", p.csv_fields()));
        }
        out
    }
}

/// Validated simulator state shared by all trials.
#[derive(Debug, Clone)]
pub struct BcCmSimulator {
    cfg: SimConfig,
    sizes: CodebookSizes,
    u1_card: usize,
    u2_card: usize,
    base_law: WeightedIndex<f64>,
    satellite_law: Vec<Option<WeightedIndex<f64>>>,
    channel_law: Vec<WeightedIndex<f64>>,
    encoder_target: TypicalSet,
    decoder1_target: TypicalSet,
    decoder2_target: TypicalSet,
    decoder2_base_target: TypicalSet,
    /// `P_c(u1)`, for the exact decoder-1 route.
    base_marginal: Vec<f64>,
    /// `P(u1, y1)` under the encoding law, row-major.
    decoder1_joint: Vec<f64>,
}

impl BcCmSimulator {
    /// Validates `cfg` and refuses codebooks above the sequence guard.
    pub fn new(cfg: SimConfig) -> Result<Self> {
        Self::build(cfg, true)
    }

    fn build(cfg: SimConfig, guarded: bool) -> Result<Self> {
        if cfg.n == 0 {
            return Err(Error::validation("n", "blocklength must be positive"));
        }
        if !(cfg.margin.is_finite() && cfg.margin >= 0.0) {
            return Err(Error::validation("margin", "must be finite and nonnegative"));
        }
        let cards = cfg.pe.cardinalities().to_vec();
        if cards.len() != 2 {
            return Err(Error::validation("pe", "encoding law must be over (U1, U2)"));
        }
        if cfg.pc.cardinalities() != cards.as_slice()
            || cfg
                .pc
                .variables()
                .iter()
                .map(|v| v.index)
                .ne(cfg.pe.variables().iter().map(|v| v.index))
        {
            return Err(Error::validation("pc", "codebook law must match the encoding law's variables"));
        }
        let (u1_card, u2_card) = (cards[0], cards[1]);
        let ch = &cfg.channel;
        if u1_card.max(u2_card).max(ch.y1_card).max(ch.y2_card) > usize::from(u16::MAX) + 1 {
            return Err(Error::validation("cardinalities", "alphabets above 65536 letters"));
        }
        if cfg.input_map.len() != u1_card * u2_card {
            return Err(Error::validation("input_map", format!("expected {} entries", u1_card * u2_card)));
        }
        if let Some(x) = cfg.input_map.iter().find(|&&x| x >= ch.x_card) {
            return Err(Error::validation("input_map", format!("input letter {x} outside the channel alphabet")));
        }
        let r = cfg.rates;
        let sizes = CodebookSizes {
            log2_m1: log2_size(cfg.n, r.r1, "rates.r1")?,
            log2_b1: log2_size(cfg.n, r.rho1, "rates.rho1")?,
            log2_m2: log2_size(cfg.n, r.r2, "rates.r2")?,
            log2_b2: log2_size(cfg.n, r.rho2, "rates.rho2")?,
        };
        if guarded {
            let base_exp = sizes.log2_m1 + sizes.log2_b1;
            guard(&[base_exp, base_exp + sizes.log2_m2 + sizes.log2_b2], "the codebook")?;
        }

        let pc_base = cfg.pc.marginal(&[cfg.pc.variables()[0].index])?;
        let base_law = sampler(pc_base.mass(), "pc")?;
        let satellite_law = cfg
            .pc
            .mass()
            .chunks(u2_card)
            .map(|row| WeightedIndex::new(row).ok())
            .collect();
        let channel_law = ch
            .rows
            .iter()
            .map(|row| sampler(row, "channel"))
            .collect::<Result<Vec<_>>>()?;

        // P(u1, u2, y1, y2) under the encoding law.
        let (y1c, y2c) = (ch.y1_card, ch.y2_card);
        let mut dec1 = vec![0.0; u1_card * y1c];
        let mut dec2 = vec![0.0; u1_card * u2_card * y2c];
        let mut dec2_base = vec![0.0; u1_card * y2c];
        for u1 in 0..u1_card {
            for u2 in 0..u2_card {
                let p = cfg.pe.mass()[u1 * u2_card + u2];
                let row = &ch.rows[cfg.input_map[u1 * u2_card + u2]];
                for y1 in 0..y1c {
                    for y2 in 0..y2c {
                        let m = p * row[y1 * y2c + y2];
                        dec1[u1 * y1c + y1] += m;
                        dec2[(u1 * u2_card + u2) * y2c + y2] += m;
                        dec2_base[u1 * y2c + y2] += m;
                    }
                }
            }
        }
        let t = cfg.typicality;
        Ok(BcCmSimulator {
            sizes,
            u1_card,
            u2_card,
            base_law,
            satellite_law,
            channel_law,
            encoder_target: TypicalSet::new(cfg.pe.mass().to_vec(), t),
            decoder1_target: TypicalSet::new(dec1.clone(), t),
            decoder2_target: TypicalSet::new(dec2, t),
            decoder2_base_target: TypicalSet::new(dec2_base, t),
            base_marginal: pc_base.mass().to_vec(),
            decoder1_joint: dec1,
            cfg,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn sizes(&self) -> CodebookSizes {
        self.sizes
    }

    /// Draws base codewords iid from `P_c(u1)` and, for each, satellites
    /// symbol by symbol from `P_c(u2 | u1)`.
    pub fn generate_codebook<R: Rng + ?Sized>(&self, rng: &mut R) -> Codebook {
        let n = self.cfg.n;
        let s = self.sizes;
        let bases = s.m1() * s.b1();
        let per_base = s.m2() * s.b2();
        let base: Vec<u16> = (0..bases * n).map(|_| self.base_law.sample(rng) as u16).collect();
        let mut satellites = Vec::with_capacity(bases * per_base * n);
        for word in base.chunks(n) {
            for _ in 0..per_base {
                satellites.extend(word.iter().map(|&u1| {
                    self.satellite_law[usize::from(u1)]
                        .as_ref()
                        .expect("base letters have positive codebook mass")
                        .sample(rng) as u16
                }));
            }
        }
        Codebook {
            n,
            sizes: s,
            base,
            satellites,
        }
    }

    /// Scans bin pairs row-major and keeps the first whose codewords are
    /// jointly typical under the encoding law. On failure a bin pair is
    /// drawn uniformly from `rng`.
    pub fn encode<R: Rng + ?Sized>(&self, cb: &Codebook, w1: usize, w2: usize, rng: &mut R) -> Encoding {
        let (nb1, nb2) = (cb.sizes.b1(), cb.sizes.b2());
        let mut checker = self.encoder_target.clone();
        let mut first = None;
        let mut typical_pairs = 0;
        for b1 in 0..nb1 {
            let u1 = cb.base(w1, b1);
            for b2 in 0..nb2 {
                let u2 = cb.satellite(w1, b1, w2, b2);
                let flat = u1
                    .iter()
                    .zip(u2)
                    .map(|(&a, &b)| usize::from(a) * self.u2_card + usize::from(b));
                if checker.contains(flat) {
                    typical_pairs += 1;
                    first.get_or_insert((b1, b2, b1 * nb2 + b2 + 1));
                }
            }
        }
        match first {
            Some((b1, b2, steps)) => Encoding {
                w1,
                w2,
                b1,
                b2,
                found: true,
                steps,
                typical_pairs,
            },
            None => Encoding {
                w1,
                w2,
                b1: rng.random_range(0..nb1),
                b2: rng.random_range(0..nb2),
                found: false,
                steps: nb1 * nb2,
                typical_pairs,
            },
        }
    }

    /// Sends `x = f(u1, u2)` through the channel.
    pub fn transmit<R: Rng + ?Sized>(&self, cb: &Codebook, enc: &Encoding, rng: &mut R) -> (Vec<u16>, Vec<u16>) {
        let u1 = cb.base(enc.w1, enc.b1);
        let u2 = cb.satellite(enc.w1, enc.b1, enc.w2, enc.b2);
        let y2c = self.cfg.channel.y2_card;
        u1.iter()
            .zip(u2)
            .map(|(&a, &b)| {
                let x = self.cfg.input_map[usize::from(a) * self.u2_card + usize::from(b)];
                let y = self.channel_law[x].sample(rng);
                ((y / y2c) as u16, (y % y2c) as u16)
            })
            .unzip()
    }

    /// Receiver 1 looks for base codewords jointly typical with `y1`.
    pub fn decode1(&self, cb: &Codebook, y1: &[u16]) -> DecodeOutcome<(usize, usize)> {
        let y1c = self.cfg.channel.y1_card;
        let mut checker = self.decoder1_target.clone();
        let mut hit: Option<(usize, usize)> = None;
        for w1 in 0..cb.sizes.m1() {
            for b1 in 0..cb.sizes.b1() {
                let flat = cb
                    .base(w1, b1)
                    .iter()
                    .zip(y1)
                    .map(|(&u, &y)| usize::from(u) * y1c + usize::from(y));
                if checker.contains(flat) {
                    match hit {
                        None => hit = Some((w1, b1)),
                        Some((w, _)) if w != w1 => return DecodeOutcome::Ambiguous,
                        Some(_) => {}
                    }
                }
            }
        }
        hit.map_or(DecodeOutcome::NotFound, |indices| DecodeOutcome::Found { indices })
    }

    /// Receiver 2 looks for codeword pairs jointly typical with `y2`.
    pub fn decode2(&self, cb: &Codebook, y2: &[u16]) -> DecodeOutcome<(usize, usize, usize, usize)> {
        let y2c = self.cfg.channel.y2_card;
        let u2c = self.u2_card;
        let mut base_checker = self.decoder2_base_target.clone();
        let mut checker = self.decoder2_target.clone();
        let mut hit: Option<(usize, usize, usize, usize)> = None;
        for w1 in 0..cb.sizes.m1() {
            for b1 in 0..cb.sizes.b1() {
                let u1 = cb.base(w1, b1);
                // A pair can only be typical if its projection is.
                let flat = u1.iter().zip(y2).map(|(&u, &y)| usize::from(u) * y2c + usize::from(y));
                if !base_checker.contains(flat) {
                    continue;
                }
                for w2 in 0..cb.sizes.m2() {
                    for b2 in 0..cb.sizes.b2() {
                        let u2 = cb.satellite(w1, b1, w2, b2);
                        let flat = u1
                            .iter()
                            .zip(u2)
                            .zip(y2)
                            .map(|((&a, &b), &y)| (usize::from(a) * u2c + usize::from(b)) * y2c + usize::from(y));
                        if checker.contains(flat) {
                            match hit {
                                None => hit = Some((w1, b1, w2, b2)),
                                Some((a, _, b, _)) if (a, b) != (w1, w2) => return DecodeOutcome::Ambiguous,
                                Some(_) => {}
                            }
                        }
                    }
                }
            }
        }
        hit.map_or(DecodeOutcome::NotFound, |indices| DecodeOutcome::Found { indices })
    }

    /// One end-to-end trial with a fresh codebook.
    pub fn run_trial(&self, trial: usize) -> TrialReport {
        let seed = self.cfg.seed;
        let t = trial as u64;
        let cb = self.generate_codebook(&mut stage_rng(seed, t, STAGE_CODEBOOK));
        let mut msg_rng = stage_rng(seed, t, STAGE_MESSAGES);
        let w1 = msg_rng.random_range(0..self.sizes.m1());
        let w2 = msg_rng.random_range(0..self.sizes.m2());
        let enc = self.encode(&cb, w1, w2, &mut stage_rng(seed, t, STAGE_ENCODER));
        let (y1, y2) = self.transmit(&cb, &enc, &mut stage_rng(seed, t, STAGE_CHANNEL));
        let d1 = self.decode1(&cb, &y1);
        let d2 = self.decode2(&cb, &y2);
        TrialReport {
            trial,
            encode_ok: enc.found,
            bins_found: enc.found.then_some((enc.b1, enc.b2)),
            decode1_ok: matches!(d1, DecodeOutcome::Found { indices: (a, _) } if a == w1),
            decode2_ok: matches!(d2, DecodeOutcome::Found { indices: (a, _, b, _) } if (a, b) == (w1, w2)),
            decode1_ambiguous: d1 == DecodeOutcome::Ambiguous,
            decode2_ambiguous: d2 == DecodeOutcome::Ambiguous,
            bin_search_steps: enc.steps,
            typical_bin_pairs: enc.typical_pairs,
        }
    }

    /// Runs every trial (in parallel on the current rayon pool) and
    /// aggregates in trial order.
    pub fn run_campaign(&self) -> CampaignReport {
        let trials: Vec<TrialReport> = (0..self.cfg.trials).into_par_iter().map(|t| self.run_trial(t)).collect();
        let count = |f: fn(&TrialReport) -> bool| Proportion {
            successes: trials.iter().filter(|t| f(t)).count(),
            trials: trials.len(),
        };
        let mean_typical_bin_pairs = (!trials.is_empty())
            .then(|| trials.iter().map(|t| t.typical_bin_pairs as f64).sum::<f64>() / trials.len() as f64);
        CampaignReport {
            n: self.cfg.n,
            requested_rates: self.cfg.rates,
            effective_rates: self.sizes.effective_rates(self.cfg.n),
            sizes: self.sizes,
            encode: count(|t| t.encode_ok),
            decode1: count(|t| t.decode1_ok),
            decode2: count(|t| t.decode2_ok),
            overall: count(|t| t.encode_ok && t.decode1_ok && t.decode2_ok),
            mean_typical_bin_pairs,
            max_typical_bin_pairs: trials.iter().map(|t| t.typical_bin_pairs).max().unwrap_or(0),
            trials,
        }
    }

    /// Decoder-1 error rate for codebooks too large to store.
    ///
    /// Per trial the sent pair is drawn iid from the encoding law and passed
    /// through the channel. The true base codeword is checked directly; every
    /// base codeword of another message is an independent draw from the
    /// codebook law, so the chance that none of them is typical with `y1`
    /// is computed exactly from conditional type classes and realised with
    /// one Bernoulli draw.
    pub fn decoder1_exact(&self) -> Result<Decoder1Report> {
        let y1c = self.cfg.channel.y1_card;
        let others_ln = {
            let m1 = f64::from(self.sizes.log2_m1).exp2();
            ((m1 - 1.0).ln() + f64::from(self.sizes.log2_b1) * std::f64::consts::LN_2).max(f64::NEG_INFINITY)
        };
        let joint = JointPmf::from_cards(vec![self.u1_card, self.u2_card], self.cfg.pe.mass().to_vec())?;
        let t = self.cfg.typicality;
        let rows = (0..self.cfg.trials)
            .into_par_iter()
            .map(|trial| -> Result<Decoder1Trial> {
                let tr = trial as u64;
                let pair = Sequence::sample(&joint, self.cfg.n, &mut stage_rng(self.cfg.seed, tr, STAGE_CODEBOOK))?;
                let enc_rng = &mut stage_rng(self.cfg.seed, tr, STAGE_CHANNEL);
                let y1: Vec<usize> = pair
                    .column(0)
                    .iter()
                    .zip(pair.column(1))
                    .map(|(&a, &b)| {
                        let x = self.cfg.input_map[a * self.u2_card + b];
                        self.channel_law[x].sample(enc_rng) / self.cfg.channel.y2_card
                    })
                    .collect();
                let mut checker = self.decoder1_target.clone();
                let true_ok = checker.contains(pair.column(0).iter().zip(&y1).map(|(&u, &y)| u * y1c + y));
                let classes: Vec<TypeClass> = (0..y1c)
                    .map(|y| TypeClass {
                        size: y1.iter().filter(|&&s| s == y).count(),
                        targets: (0..self.u1_card).map(|u| self.decoder1_joint[u * y1c + y]).collect(),
                    })
                    .collect();
                let ln_p = ln_hit_probability(&classes, &self.base_marginal, t.epsilon(), t.zero_support_strict())?;
                let p_confused = prob_any_hit(ln_p, others_ln);
                let confused = stage_rng(self.cfg.seed, tr, STAGE_OUTCOME).random_bool(p_confused.clamp(0.0, 1.0));
                Ok(Decoder1Trial {
                    trial,
                    true_typical: true_ok,
                    log2_false_hit_probability: ln_p / std::f64::consts::LN_2,
                    confusion_probability: p_confused,
                    ok: true_ok && !confused,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Decoder1Report {
            decode1: Proportion {
                successes: rows.iter().filter(|r| r.ok).count(),
                trials: rows.len(),
            },
            sizes: self.sizes,
            trials: rows,
        })
    }
}

/// One trial of [`BcCmSimulator::decoder1_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decoder1Trial {
    pub trial: usize,
    pub true_typical: bool,
    pub log2_false_hit_probability: f64,
    pub confusion_probability: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decoder1Report {
    pub decode1: Proportion,
    pub sizes: CodebookSizes,
    pub trials: Vec<Decoder1Trial>,
}

impl Decoder1Report {
    pub fn csv(&self) -> String {
        let mut out = String::from("trial,true_typical,log2_false_hit_probability,confusion_probability,dec1\n");
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t.trial,
                u8::from(t.true_typical),
                format_g9(t.log2_false_hit_probability),
                format_g9(t.confusion_probability),
                u8::from(t.ok)
            ));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        format!(
            "metric,successes,trials,rate,wilson_low,wilson_high\ndecode1,{}\n",
            self.decode1.csv_fields()
        )
    }
}

/// Runs a campaign for `cfg`.
pub fn run_campaign(cfg: SimConfig) -> Result<CampaignReport> {
    Ok(BcCmSimulator::new(cfg)?.run_campaign())
}

/// Decoder-1 error rate by the exact route. No codebook is stored, so the
/// sequence guard does not apply.
pub fn decoder1_exact(cfg: SimConfig) -> Result<Decoder1Report> {
    BcCmSimulator::build(cfg, false)?.decoder1_exact()
}

// ---------------------------------------------------------------------------
// Covering experiment
// ---------------------------------------------------------------------------

/// How a covering trial is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoveringRoute {
    /// Brute force within the sequence budget, type classes beyond it.
    Auto,
    /// Draw every sequence.
    BruteForce,
    /// Exact success probability from type classes, one Bernoulli draw per
    /// trial.
    TypeClass,
}

#[derive(Debug, Clone)]
pub struct CoveringConfig {
    /// Law whose typical set is to be hit.
    pub target: JointPmf,
    /// Law the sequences are drawn from.
    pub source: JointPmf,
    pub rate: f64,
    pub n: usize,
    pub typicality: TypicalityParams,
    pub trials: usize,
    pub seed: u64,
    pub route: CoveringRoute,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub rate: f64,
    pub log2_draws: u32,
    pub route: CoveringRoute,
    pub success: Proportion,
    /// Exact per-trial success probability (type-class route only).
    pub exact_probability: Option<f64>,
    pub divergence: f64,
}

impl CoveringReport {
    pub const CSV_HEADER: &'static str =
        "rate,log2_draws,route,successes,trials,success_rate,wilson_low,wilson_high,exact_probability,divergence";

    pub fn csv_row(&self) -> String {
        let route = match self.route {
            CoveringRoute::Auto => "auto",
            CoveringRoute::BruteForce => "brute-force",
            CoveringRoute::TypeClass => "type-class",
        };
        format!(
            "{},{},{},{},{},{}",
            format_g9(self.rate),
            self.log2_draws,
            route,
            self.success.csv_fields(),
            self.exact_probability.map(format_g9).unwrap_or_default(),
            format_g9(self.divergence)
        )
    }
}

/// Draws `2^round(N R)` iid source sequences per trial and records whether
/// one of them is typical for the target.
pub fn covering_experiment(cfg: &CoveringConfig) -> Result<CoveringReport> {
    if cfg.n == 0 {
        return Err(Error::validation("n", "blocklength must be positive"));
    }
    if cfg.target.cardinalities() != cfg.source.cardinalities() {
        return Err(Error::domain("target and source need the same alphabet"));
    }
    let k = log2_size(cfg.n, cfg.rate, "rate")?;
    let route = match cfg.route {
        CoveringRoute::Auto if k <= SEQUENCE_GUARD_LOG2 => CoveringRoute::BruteForce,
        CoveringRoute::Auto => CoveringRoute::TypeClass,
        r => r,
    };
    let divergence = crate::prob::kl(&cfg.target, &cfg.source.clone_with_vars(cfg.target.variables())?)?;
    let t = cfg.typicality;
    let (hits, exact) = match route {
        CoveringRoute::BruteForce => {
            guard(&[k], "the covering experiment")?;
            let draws = 1usize << k;
            let law = sampler(cfg.source.mass(), "source")?;
            let target = TypicalSet::new(cfg.target.mass().to_vec(), t);
            let hits: Vec<bool> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = stage_rng(cfg.seed, trial as u64, STAGE_CODEBOOK);
                    let mut checker = target.clone();
                    let mut word = vec![0usize; cfg.n];
                    (0..draws).any(|_| {
                        word.iter_mut().for_each(|s| *s = law.sample(&mut rng));
                        checker.contains(word.iter().copied())
                    })
                })
                .collect();
            (hits, None)
        }
        _ => {
            let class = TypeClass {
                size: cfg.n,
                targets: cfg.target.mass().to_vec(),
            };
            let ln_p = ln_hit_probability(&[class], cfg.source.mass(), t.epsilon(), t.zero_support_strict())?;
            let p = prob_any_hit(ln_p, f64::from(k) * std::f64::consts::LN_2);
            let hits = (0..cfg.trials)
                .map(|trial| stage_rng(cfg.seed, trial as u64, STAGE_OUTCOME).random_bool(p.clamp(0.0, 1.0)))
                .collect();
            (hits, Some(p))
        }
    };
    Ok(CoveringReport {
        rate: cfg.rate,
        log2_draws: k,
        route,
        success: Proportion {
            successes: hits.iter().filter(|&&h| h).count(),
            trials: hits.len(),
        },
        exact_probability: exact,
        divergence,
    })
}

// ---------------------------------------------------------------------------
// Inaccuracy experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InaccuracyReport {
    /// `D(p||q) + H(p)`.
    pub expected: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    /// Largest `|-log2 q(seq) - N (D(t||q) + H(t))| / N` over trials, `t`
    /// being the sequence's type.
    pub max_type_identity_gap: f64,
    /// Per-trial `-log2 q(seq) / N`.
    pub per_symbol: Vec<f64>,
}

impl InaccuracyReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("trial,neg_log2_prob_per_symbol\n");
        for (i, v) in self.per_symbol.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", format_g9(*v)));
        }
        out
    }
}

/// Draws iid `p`-sequences and measures their per-symbol probability
/// under `q`.
pub fn inaccuracy_experiment(p: &JointPmf, q: &JointPmf, n: usize, trials: usize, seed: u64) -> Result<InaccuracyReport> {
    if n == 0 {
        return Err(Error::validation("n", "blocklength must be positive"));
    }
    let q = q.clone_with_vars(p.variables())?;
    let expected = inaccuracy(p, &q)?;
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(f64, f64)> {
            let seq = Sequence::sample(p, n, &mut stage_rng(seed, trial as u64, STAGE_CODEBOOK))?;
            let lp = log_prob_under(&seq, &q)?;
            let t = empirical_type(&seq)?;
            let identity = inaccuracy(&t, &q)?;
            let gap = if lp.is_infinite() && identity.is_infinite() {
                0.0
            } else {
                (-lp - n as f64 * identity).abs() / n as f64
            };
            Ok((-lp / n as f64, gap))
        })
        .collect::<Result<Vec<_>>>()?;
    let per_symbol: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let count = per_symbol.len().max(1) as f64;
    let mean = per_symbol.iter().sum::<f64>() / count;
    let var = per_symbol.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
    Ok(InaccuracyReport {
        expected,
        mean,
        std_dev: var.sqrt(),
        min: per_symbol.iter().copied().fold(f64::INFINITY, f64::min),
        max: per_symbol.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        max_type_identity_gap: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        per_symbol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(p: f64) -> JointPmf {
        JointPmf::from_cards(vec![2], vec![p, 1.0 - p]).unwrap()
    }

    fn uniform_pair() -> JointPmf {
        JointPmf::uniform(vec![2, 2]).unwrap()
    }

    fn noiseless_cfg(rates: Rates, n: usize, trials: usize) -> SimConfig {
        SimConfig {
            n,
            rates,
            typicality: TypicalityParams::new(0.3, true).unwrap(),
            margin: DEFAULT_MARGIN,
            trials,
            seed: 11,
            pe: uniform_pair(),
            pc: uniform_pair(),
            channel: Channel::noiseless(4),
            input_map: vec![0, 1, 2, 3],
        }
    }

    #[test]
    fn wilson_interval() {
        let p = Proportion { successes: 81, trials: 100 };
        let (lo, hi) = p.wilson().unwrap();
        assert!((lo - 0.7222).abs() < 1e-3 && (hi - 0.8749).abs() < 1e-3, "{lo} {hi}");
        assert_eq!(Proportion { successes: 0, trials: 0 }.wilson(), None);
        assert_eq!(Proportion { successes: 0, trials: 9 }.wilson().unwrap().0, 0.0);
        assert_eq!(Proportion { successes: 9, trials: 9 }.wilson().unwrap().1, 1.0);
    }

    #[test]
    fn zero_rates_single_codewords() {
        let zero = Rates { r1: 0.0, r2: 0.0, rho1: 0.0, rho2: 0.0 };
        let sim = BcCmSimulator::new(noiseless_cfg(zero, 400, 4)).unwrap();
        let cb = sim.generate_codebook(&mut stage_rng(1, 0, 0));
        assert_eq!((cb.base.len(), cb.satellites.len()), (400, 400));
        let report = sim.run_campaign();
        assert_eq!(report.decode1.successes, 4, "{report:?}");
    }

    #[test]
    fn point_mass_codebook_is_constant() {
        let point = JointPmf::from_cards(vec![2, 2], vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let mut cfg = noiseless_cfg(Rates { r1: 0.2, r2: 0.2, rho1: 0.0, rho2: 0.0 }, 10, 1);
        cfg.pc = point.clone();
        cfg.pe = point;
        let sim = BcCmSimulator::new(cfg).unwrap();
        let cb = sim.generate_codebook(&mut stage_rng(3, 0, 0));
        assert!(cb.base.iter().all(|&s| s == 1));
        assert!(cb.satellites.iter().all(|&s| s == 0));
    }

    #[test]
    fn guard_refuses_large_codebooks() {
        let cfg = noiseless_cfg(Rates { r1: 0.2, r2: 0.2, rho1: 0.0, rho2: 0.0 }, 100, 1);
        assert!(matches!(BcCmSimulator::new(cfg), Err(Error::Refused(_))));
    }

    #[test]
    fn empty_campaign() {
        let cfg = noiseless_cfg(Rates { r1: 0.1, r2: 0.1, rho1: 0.0, rho2: 0.0 }, 20, 0);
        let r = run_campaign(cfg).unwrap();
        assert!(r.trials.is_empty() && r.encode.rate().is_none());
        assert_eq!(r.trials_csv(), "trial,encode_ok,b1,b2,dec1,dec2\n");
    }

    #[test]
    fn covering_fixed_rate_exact_is_zero_or_one() {
        let base = CoveringConfig {
            target: bern(0.5),
            source: bern(0.5),
            rate: 0.0,
            n: 200,
            typicality: TypicalityParams::new(0.2, true).unwrap(),
            trials: 20,
            seed: 5,
            route: CoveringRoute::Auto,
        };
        let r = covering_experiment(&base).unwrap();
        assert_eq!(r.route, CoveringRoute::BruteForce);
        assert_eq!(r.success.successes, 20);
        let refuse = CoveringConfig {
            rate: 0.5,
            route: CoveringRoute::BruteForce,
            ..base
        };
        assert!(matches!(covering_experiment(&refuse), Err(Error::Refused(_))));
    }

    #[test]
    fn inaccuracy_deterministic_cases() {
        let r = inaccuracy_experiment(&bern(0.5), &bern(0.5), 50, 10, 1).unwrap();
        assert!(r.per_symbol.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let r = inaccuracy_experiment(&bern(1.0), &bern(0.5), 50, 10, 1).unwrap();
        assert!(r.per_symbol.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}
