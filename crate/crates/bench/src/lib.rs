//! Seeded inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use supbin::codingsim::{Channel, Rates, SimConfig, DEFAULT_MARGIN};
use supbin::typicality::TypicalityParams;
use supbin::JointPmf;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random joint law over `vars` variables of the given alphabet size.
pub fn random_law(vars: usize, card: usize, seed: u64) -> JointPmf {
    JointPmf::random(vec![card; vars], &mut rng(seed)).expect("valid cardinalities")
}

/// Noiseless 2-bit broadcast setup with uniform laws.
pub fn noiseless_sim(n: usize, rates: Rates) -> SimConfig {
    SimConfig {
        n,
        rates,
        typicality: TypicalityParams::new(0.3, true).expect("valid radius"),
        margin: DEFAULT_MARGIN,
        trials: 1,
        seed: 1,
        pe: JointPmf::uniform(vec![2, 2]).expect("valid"),
        pc: JointPmf::uniform(vec![2, 2]).expect("valid"),
        channel: Channel::noiseless(4),
        input_map: vec![0, 1, 2, 3],
    }
}
