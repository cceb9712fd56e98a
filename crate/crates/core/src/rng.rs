//! Counter-based, splittable pseudo-random generation.
//!
//! Monte Carlo ensembles here must be reproducible across thread counts and
//! evaluation order, so the generator is a pure function of
//! `(seed, stream_id, counter)`: every path, rollout or grid of increments
//! owns a stream and draws by advancing a counter through a splitmix64-style
//! finalizer. Cloning a generator or re-deriving the same stream replays the
//! identical sequence.
//!
//! Gaussian draws use the Box-Muller transform on open-interval uniforms, so
//! a normal is a deterministic function of the two counter slots it consumes.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-mode generator for one `(seed, stream_id)` stream.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
    spare_normal: Option<f64>,
}

impl CounterRng {
    /// Derives the stream keyed by `(seed, stream_id)`.
    pub fn from_stream(seed: u64, stream_id: u64) -> Self {
        let key = mix64(seed ^ mix64(stream_id.wrapping_mul(GOLDEN_GAMMA) ^ 0x6A09_E667_F3BC_C909));
        CounterRng {
            key,
            counter: 0,
            spare_normal: None,
        }
    }

    /// The word at counter position `ctr`, independent of generator state.
    #[inline]
    pub fn word_at(&self, ctr: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(ctr.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let w = self.word_at(self.counter);
        self.counter += 1;
        w
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal via Box-Muller; the paired draw is cached.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = crate::math::sqrt(-2.0 * crate::math::ln(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        self.spare_normal = Some(radius * crate::math::sin(angle));
        radius * crate::math::cos(angle)
    }

    /// Fills `out` with independent standard normals.
    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for slot in out {
            *slot = self.standard_normal();
        }
    }
}
