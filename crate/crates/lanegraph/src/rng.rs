//! Seeded pseudo-random generator for the synthetic pipeline.
//!
//! The generator is SplitMix64: the state advances by the golden-ratio
//! increment `0x9E3779B97F4A7C15` and each output is a finalizing mix of the
//! new state (Steele, Lea & Flood, "Fast splittable pseudorandom number
//! generators", OOPSLA 2014). It is effectively a counter-based generator:
//! output `n` is `mix(seed + (n+1) * 0x9E3779B97F4A7C15)`, so a (seed, index)
//! pair determines every draw with pure integer arithmetic and the integer and
//! uniform streams are bit-identical on every platform.
//!
//! Gaussian draws use the Box-Muller transform on two uniforms; those go
//! through `ln`/`cos`/`sqrt` and are therefore deterministic per platform.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [0, n) via the 128-bit multiply-shift reduction.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Bernoulli draw. Always consumes exactly one uniform.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal via Box-Muller (the cosine branch; the sine mate is
    /// discarded so each call consumes exactly two uniforms).
    pub fn normal(&mut self) -> f64 {
        // u1 in (0, 1] so ln is finite
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
