//! Derived numbers checked against closed forms computed here from scratch.

use supbin::codingsim::{covering_experiment, inaccuracy_experiment, CoveringConfig, CoveringRoute, Proportion};
use supbin::prob::{entropy, inaccuracy, kl};
use supbin::schemes::{build_mac_cm, mac_capacity_fixture, SchemeSpec};
use supbin::typicality::TypicalityParams;
use supbin::{JointPmf, VarSet, VariableId};

fn bern(p: f64) -> JointPmf {
    JointPmf::from_cards(vec![2], vec![p, 1.0 - p]).unwrap()
}

/// Binary entropy in bits via natural logs.
fn h2(p: f64) -> f64 {
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln()) / std::f64::consts::LN_2
}

fn ln_choose(n: u64, k: u64) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
}

#[test]
fn covering_threshold_for_biased_target_and_fair_source() {
    let d = kl(&bern(0.11), &bern(0.5)).unwrap();
    assert!((d - (1.0 - h2(0.11))).abs() < 1e-12);
    assert!((d - 0.500_084).abs() < 1e-6, "{d}");
    assert!((entropy(&bern(0.11), VarSet::singleton(0)).unwrap() - 0.499_916).abs() < 1e-6);
}

#[test]
fn inaccuracy_against_fair_bit_is_one_bit() {
    // -p log q - (1-p) log q with q = 1/2, whatever p is.
    for p in [0.11, 0.3, 0.5, 0.97] {
        assert!((inaccuracy(&bern(p), &bern(0.5)).unwrap() - 1.0).abs() < 1e-12);
    }
    let r = inaccuracy_experiment(&bern(0.11), &bern(0.5), 1000, 50, 1).unwrap();
    // Every binary sequence has probability 2^-N under the fair bit.
    assert!(r.per_symbol.iter().all(|v| (v - 1.0).abs() < 1e-12));
    assert!(r.max_type_identity_gap < 1e-9);
}

#[test]
fn exact_covering_probability_matches_binomial_sum() {
    // Over a binary alphabet the L1 distance of type k/N to (p, 1-p) is
    // 2 |k/N - p|; under a fair source each count has weight C(N,k) 2^-N.
    let (p, n, eps) = (0.11f64, 300u64, 0.05);
    let hit: f64 = (0..=n)
        .filter(|&k| 2.0 * (k as f64 / n as f64 - p).abs() <= eps + 1e-12)
        .map(|k| (ln_choose(n, k) - n as f64 * std::f64::consts::LN_2).exp())
        .sum();
    for k_draws in [100u32, 150, 170, 200] {
        let report = covering_experiment(&CoveringConfig {
            target: bern(p),
            source: bern(0.5),
            rate: f64::from(k_draws) / n as f64,
            n: n as usize,
            typicality: TypicalityParams::new(eps, true).unwrap(),
            trials: 1,
            seed: 0,
            route: CoveringRoute::TypeClass,
        })
        .unwrap();
        assert_eq!(report.log2_draws, k_draws);
        let want = -(2f64.powi(k_draws as i32) * (-hit).ln_1p()).exp_m1();
        let got = report.exact_probability.unwrap();
        assert!((got - want).abs() < 1e-9, "2^{k_draws} draws: {got} vs {want}");
    }
}

#[test]
fn wilson_interval_closed_form() {
    let prop = Proportion { successes: 37, trials: 120 };
    let (n, ph, z) = (120.0f64, 37.0 / 120.0, 1.959_963_984_540_054f64);
    let centre = (ph + z * z / (2.0 * n)) / (1.0 + z * z / n);
    let half = z / (1.0 + z * z / n) * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt();
    let (lo, hi) = prop.wilson().unwrap();
    assert!((lo - (centre - half)).abs() < 1e-9 && (hi - (centre + half)).abs() < 1e-9);
}

/// `W`, `A`, `B` independent fair bits; `Y = A + B` over `{0, 1, 2}`.
fn adder() -> JointPmf {
    JointPmf::uniform(vec![2, 2, 2])
        .unwrap()
        .extend_with(vec![VariableId::new(3, "Y")], vec![3], |s| {
            let mut row = vec![0.0; 3];
            row[s[1] + s[2]] = 1.0;
            row
        })
        .unwrap()
}

#[test]
fn adder_pentagon_corners() {
    // I(Y;A|W,B) = H(A) = 1 and I(Y;A,B|W) = H(Y) = 1/4 + 1/2 + 1/4 log 4 = 1.5,
    // so the private-rate face runs from (1, 0.5) to (0.5, 1).
    let p = adder();
    let h_y = -(0.25f64 * 0.25f64.log2() * 2.0 + 0.5 * 0.5f64.log2());
    assert!((h_y - 1.5).abs() < 1e-12);
    let want = [(1.0, h_y - 1.0), (h_y - 1.0, 1.0)];
    let reduced = build_mac_cm(&SchemeSpec::mac_cm())
        .unwrap()
        .fme_eliminate_all(&["Rho_1to1", "Rho_2to1"])
        .unwrap();
    for region in [mac_capacity_fixture(), reduced] {
        let b = region
            .instantiate(&p, &p)
            .unwrap()
            .boundary_2d(("R_1to1", "R_2to1"), 720)
            .unwrap();
        let corners = b.frontier();
        assert_eq!(corners.len(), 2, "{corners:?}");
        for (got, want) in corners.iter().zip(&want) {
            assert!((got.0 - want.0).abs() < 1e-9 && (got.1 - want.1).abs() < 1e-9, "{got:?} vs {want:?}");
        }
        for sample in &b.samples {
            let (c, s) = (sample.angle.cos(), sample.angle.sin());
            let best = want.iter().map(|w| c * w.0 + s * w.1).fold(f64::NEG_INFINITY, f64::max);
            assert!((sample.support - best).abs() < 1e-9);
        }
    }
}
