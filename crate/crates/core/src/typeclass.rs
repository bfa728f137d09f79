//! Exact probability that an iid sequence is jointly typical with a fixed
//! sequence, by summing over conditional type classes.
//!
//! The fixed sequence splits the positions into classes, one per fixed
//! symbol `y`, of size `n_y`. A fresh sequence drawn iid from `q` has, in
//! each class, a count vector `k_{.,y}` with multinomial law; the joint type
//! is `k_{u,y} / N` and typicality is an L1 condition on all classes
//! together.

use crate::error::{Error, Result};
use crate::typicality::L1_SLACK;

/// Stop enumerating once this many partial states are alive.
pub(crate) const MAX_STATES: usize = 20_000_000;

/// One class of positions: its size and the target mass `P(u, y)` of each
/// fresh symbol `u`.
#[derive(Debug, Clone)]
pub(crate) struct TypeClass {
    pub size: usize,
    pub targets: Vec<f64>,
}

struct Partial {
    l1: f64,
    ln_p: f64,
}

/// Natural log of `P(fresh sequence is typical)`, `-inf` when impossible.
pub(crate) fn ln_hit_probability(
    classes: &[TypeClass],
    q: &[f64],
    epsilon: f64,
    strict: bool,
) -> Result<f64> {
    let n_total: usize = classes.iter().map(|c| c.size).sum();
    if n_total == 0 {
        return Ok(0.0);
    }
    let nf = n_total as f64;
    let ln_fact = ln_factorials(classes.iter().map(|c| c.size).max().unwrap_or(0));
    let ln_q: Vec<f64> = q.iter().map(|p| p.ln()).collect();
    let floor: Vec<f64> = classes
        .iter()
        .map(|c| (c.size as f64 / nf - c.targets.iter().sum::<f64>()).abs())
        .collect();

    let mut states = vec![Partial { l1: 0.0, ln_p: 0.0 }];
    for (i, class) in classes.iter().enumerate() {
        let rest: f64 = floor[i + 1..].iter().sum();
        let budget = epsilon + L1_SLACK - rest;
        let min_used = states.iter().map(|s| s.l1).fold(f64::INFINITY, f64::min);
        let options = class_options(class, &ln_q, &ln_fact, nf, budget - min_used, strict);
        let mut next = Vec::new();
        for s in &states {
            for o in &options {
                if s.l1 + o.l1 <= budget {
                    next.push(Partial {
                        l1: s.l1 + o.l1,
                        ln_p: s.ln_p + o.ln_p,
                    });
                }
            }
            if next.len() > MAX_STATES {
                return Err(Error::Refused(format!(
                    "type-class enumeration exceeds {MAX_STATES} partial types"
                )));
            }
        }
        states = next;
        if states.is_empty() {
            return Ok(f64::NEG_INFINITY);
        }
    }
    Ok(log_sum_exp(states.iter().map(|s| s.ln_p)))
}

fn class_options(
    class: &TypeClass,
    ln_q: &[f64],
    ln_fact: &[f64],
    nf: f64,
    budget: f64,
    strict: bool,
) -> Vec<Partial> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; class.targets.len()];
    let suffix: Vec<f64> = {
        let mut s = vec![0.0; class.targets.len() + 1];
        for j in (0..class.targets.len()).rev() {
            s[j] = s[j + 1] + class.targets[j];
        }
        s
    };
    let ctx = Ctx {
        class,
        ln_q,
        nf,
        budget,
        strict,
        suffix: &suffix,
    };
    recurse(&ctx, 0, class.size, 0.0, &mut counts, &mut |counts, l1| {
        let mut ln_p = ln_fact[class.size];
        for (u, &k) in counts.iter().enumerate() {
            if k > 0 {
                ln_p += k as f64 * ln_q[u] - ln_fact[k];
            }
        }
        if ln_p > f64::NEG_INFINITY {
            out.push(Partial { l1, ln_p });
        }
    });
    out
}

struct Ctx<'a> {
    class: &'a TypeClass,
    ln_q: &'a [f64],
    nf: f64,
    budget: f64,
    strict: bool,
    suffix: &'a [f64],
}

fn recurse(
    ctx: &Ctx<'_>,
    u: usize,
    remaining: usize,
    l1: f64,
    counts: &mut [usize],
    emit: &mut dyn FnMut(&[usize], f64),
) {
    let t = ctx.class.targets[u];
    let last = u + 1 == counts.len();
    let allowed = |k: usize| k == 0 || ((!ctx.strict || t > 0.0) && ctx.ln_q[u] > f64::NEG_INFINITY);
    if last {
        let term = (remaining as f64 / ctx.nf - t).abs();
        if allowed(remaining) && l1 + term <= ctx.budget {
            counts[u] = remaining;
            emit(counts, l1 + term);
        }
        return;
    }
    let slack = ctx.budget - l1;
    let lo = ((t - slack) * ctx.nf).floor().max(0.0) as usize;
    let hi = (((t + slack) * ctx.nf).ceil().max(0.0) as usize).min(remaining);
    for k in lo..=hi {
        if !allowed(k) {
            continue;
        }
        let term = (k as f64 / ctx.nf - t).abs();
        let left = remaining - k;
        let floor = (left as f64 / ctx.nf - ctx.suffix[u + 1]).abs();
        if l1 + term + floor > ctx.budget {
            continue;
        }
        counts[u] = k;
        recurse(ctx, u + 1, left, l1 + term, counts, emit);
    }
    counts[u] = 0;
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `1 - (1 - p)^count` from `ln p` and `ln count`.
pub(crate) fn prob_any_hit(ln_p: f64, ln_count: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY || ln_count == f64::NEG_INFINITY {
        return 0.0;
    }
    // ln(-ln(1 - p)), with ln(-ln(1-p)) ~ ln p for small p.
    let a = if ln_p < -30.0 {
        ln_p
    } else {
        let l = -(-ln_p.exp()).ln_1p();
        if l == f64::INFINITY {
            return 1.0;
        }
        l.ln()
    };
    -(-(ln_count + a).exp()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sums the probability of every typical sequence by listing all of them.
    fn brute(fixed: &[usize], y_card: usize, target: &[f64], q: &[f64], eps: f64, strict: bool) -> f64 {
        let u_card = q.len();
        let n = fixed.len();
        let mut total = 0.0;
        for code in 0..u_card.pow(n as u32) {
            let mut c = code;
            let mut counts = vec![0usize; u_card * y_card];
            let mut p = 1.0;
            let mut bad = false;
            for &y in fixed {
                let u = c % u_card;
                c /= u_card;
                p *= q[u];
                counts[u * y_card + y] += 1;
                if strict && target[u * y_card + y] <= 0.0 {
                    bad = true;
                }
            }
            let l1: f64 = counts
                .iter()
                .zip(target)
                .map(|(&k, &t)| (k as f64 / n as f64 - t).abs())
                .sum();
            if !bad && l1 <= eps + L1_SLACK {
                total += p;
            }
        }
        total
    }

    fn classes(fixed: &[usize], y_card: usize, target: &[f64], u_card: usize) -> Vec<TypeClass> {
        (0..y_card)
            .map(|y| TypeClass {
                size: fixed.iter().filter(|&&s| s == y).count(),
                targets: (0..u_card).map(|u| target[u * y_card + y]).collect(),
            })
            .collect()
    }

    #[test]
    fn matches_listing_unconditional() {
        let target = [0.3, 0.7];
        let q = [0.5, 0.5];
        let fixed = vec![0; 12];
        for eps in [0.05, 0.2, 0.6] {
            let want = brute(&fixed, 1, &target, &q, eps, true);
            let got = ln_hit_probability(&classes(&fixed, 1, &target, 2), &q, eps, true)
                .unwrap()
                .exp();
            assert!((got - want).abs() < 1e-12, "{eps}: {got} vs {want}");
        }
    }

    #[test]
    fn matches_listing_conditional() {
        // target over (u, y) with u in 0..3, y in 0..2
        let target = [0.2, 0.1, 0.0, 0.3, 0.25, 0.15];
        let q = [0.5, 0.2, 0.3];
        let fixed = vec![0, 1, 1, 0, 1, 0, 0, 1, 1];
        for strict in [true, false] {
            for eps in [0.3, 0.5, 0.9] {
                let want = brute(&fixed, 2, &target, &q, eps, strict);
                let got = ln_hit_probability(&classes(&fixed, 2, &target, 3), &q, eps, strict)
                    .unwrap()
                    .exp();
                assert!((got - want).abs() < 1e-12, "{strict} {eps}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_source_mass() {
        let target = [0.5, 0.5];
        let q = [1.0, 0.0];
        let got = ln_hit_probability(&classes(&[0; 10], 1, &target, 2), &q, 0.1, true).unwrap();
        assert_eq!(got, f64::NEG_INFINITY);
    }

    #[test]
    fn any_hit() {
        assert_eq!(prob_any_hit(f64::NEG_INFINITY, 3.0), 0.0);
        let p: f64 = 0.1;
        let want = 1.0 - 0.9f64.powi(20);
        assert!((prob_any_hit(p.ln(), 20f64.ln()) - want).abs() < 1e-12);
        let tiny = -800.0;
        assert!((prob_any_hit(tiny, 790.0) - (1.0 - (-(-10.0f64).exp()).exp())).abs() < 1e-12);
        assert_eq!(prob_any_hit(0.0, 0.0), 1.0);
    }
}
