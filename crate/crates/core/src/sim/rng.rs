//! The measurement random number generator.
//!
//! xorshift64* (Marsaglia's xorshift with shifts 12, 25, 27 followed by a
//! multiplication by 0x2545F4914F6CDD1D). The 64-bit seed is first passed
//! through one round of splitmix64 so that small seeds give unrelated
//! streams and a zero state is impossible. Uniform doubles take the top 53
//! bits of each output.
//!
//! Every simulated measurement draws exactly one double `u` and reports 1
//! when `u < P(1)`.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        if z == 0 {
            z = 0x9E37_79B9_7F4A_7C15;
        }
        Rng { state: z }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_ne!(Rng::new(0).next_u64(), Rng::new(1).next_u64());
    }

    #[test]
    fn fixed_stream() {
        // Frozen from an independent implementation of the recurrences.
        let mut r = Rng { state: 1 };
        assert_eq!(r.next_u64(), 0x47e4_ce4b_896c_dd1d);
        assert_eq!(r.next_u64(), 0xabcf_a6a8_e079_651d);
        assert_eq!(r.next_u64(), 0xb9d1_0d8f_eb73_1f57);
        let mut r = Rng::new(42);
        assert_eq!(r.next_u64(), 0x31b0_ece7_c4f6_97a2);
        assert_eq!(r.next_u64(), 0x9008_a3b1_cb68_6f03);
        let mut r = Rng::new(42);
        assert!((r.next_f64() - 0.194_105_917_534_182_6).abs() < 1e-15);
    }

    #[test]
    fn doubles_are_uniformish() {
        let mut r = Rng::new(7);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| r.next_f64()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }
}
