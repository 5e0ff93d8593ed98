//! Portable SplitMix64 generator.
//!
//! The state advances by a fixed odd increment and every output is a pure
//! function of the state, so streams are reproducible bit-for-bit on every
//! platform. Floating-point draws only use IEEE-exact operations and `libm`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream `stream` derived from `seed`; replication `i` of a
    /// Monte Carlo run uses `stream(seed, i)`.
    pub fn stream(seed: u64, stream: u64) -> Self {
        SplitMix64 { state: mix(seed ^ mix(stream.wrapping_add(GOLDEN))) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (((self.next_u64() >> 11) as u128 * n as u128) >> 53) as usize
    }

    /// Standard normal draw (Box-Muller, one value per call).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Uniform point on the unit sphere in `R^dim`.
    pub fn unit_vector(&mut self, dim: usize) -> alloc::vec::Vec<f64> {
        loop {
            let v: alloc::vec::Vec<f64> = (0..dim).map(|_| self.normal()).collect();
            let n = crate::linalg::norm(&v);
            if n > 1e-8 {
                return v.iter().map(|x| x / n).collect();
            }
        }
    }
}
