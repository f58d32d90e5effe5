//! Seedable, splittable 64-bit generator used by every randomised agent.
//!
//! The algorithm is fixed repo-wide (splitmix64) so that transcripts recorded
//! on one machine replay bit-exactly on any other. Agents own their stream;
//! the harness derives per-trial streams positionally from a master seed.

/// Name recorded in transcript headers.
pub const RNG_ALGORITHM: &str = "splitmix64";

/// splitmix64 stream. Small state, full 64-bit period, cheap to split.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// A new independent stream seeded from this one.
    pub fn split(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }

    /// Uniform value in `0..n`. Rejection sampling keeps it exactly uniform.
    pub fn gen_range(&mut self, n: u64) -> u64 {
        assert!(n > 0, "gen_range requires a nonempty range");
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

/// Position-derived seed: mixing the master seed with coordinate parts so
/// that adding grid cells or trials never perturbs existing streams.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut acc = SplitMix64::new(master ^ 0x6a09_e667_f3bc_c908);
    let mut out = acc.next_u64();
    for &p in parts {
        let mut s = SplitMix64::new(out ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        out = s.next_u64();
        acc = s;
    }
    let _ = acc;
    out
}
