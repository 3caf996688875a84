//! Seedable 64-bit PRNG for the Monte-Carlo experiments.
//!
//! SplitMix64 (Steele, Lea, Flood 2014): tiny state, full 64-bit output,
//! identical streams on every platform. Reports that consume randomness
//! record [`ALGORITHM`] so runs are reproducible from the JSON alone.

/// Algorithm identifier embedded in experiment reports.
pub const ALGORITHM: &str = "splitmix64";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform value in 0..bound (bound > 0), by rejection-free reduction;
    /// bias is negligible for the small bounds used here.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// Derives the independent stream seed for one trial of a multi-trial
/// experiment. Trials may run in any order; results only depend on
/// (seed, trial).
pub fn trial_seed(seed: u64, trial: u32) -> u64 {
    let mut mixer = SplitMix64::new(seed ^ (trial as u64).wrapping_mul(GOLDEN_GAMMA));
    mixer.next_u64()
}
