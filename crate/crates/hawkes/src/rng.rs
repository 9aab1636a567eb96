//! Counter-based splittable random streams.
//!
//! Every sampler in this crate draws from a [`Stream`] derived by mixing a
//! user seed with structural keys (replication index, event id), so paths are
//! reproducible bit-for-bit regardless of thread scheduling, and replications
//! can run in any order.

/// 64-bit finalizer (murmur3 variant). Also used to derive deterministic
/// positive starting vectors elsewhere in the crate.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 33;
    z = z.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    z ^= z >> 33;
    z = z.wrapping_mul(0xC4CE_B9FE_1A85_EC53);
    z ^ (z >> 33)
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix generator over a keyed counter.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            state: mix64(seed ^ 0x5851_F42D_4C95_7F2D),
        }
    }

    /// Derives an independent stream from this one and a key path.
    pub fn keyed(seed: u64, keys: &[u64]) -> Self {
        let mut state = mix64(seed ^ 0x5851_F42D_4C95_7F2D);
        for &k in keys {
            state = mix64(state.wrapping_add(GOLDEN) ^ mix64(k.wrapping_add(0xA24B_AED4_963E_E407)));
        }
        Stream { state }
    }

    /// Child stream keyed by one extra word, leaving `self` untouched.
    pub fn child(&self, key: u64) -> Self {
        Stream {
            state: mix64(self.state.wrapping_add(GOLDEN) ^ mix64(key.wrapping_add(0xA24B_AED4_963E_E407))),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1), safe under `ln`.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Exponential with the given rate.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        debug_assert!(rate > 0.0);
        -self.next_open01().ln() / rate
    }

    /// Poisson sample; product method for small means, PTRS rejection above.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        debug_assert!(mean >= 0.0 && mean.is_finite());
        if mean <= 0.0 {
            0
        } else if mean < 30.0 {
            let limit = (-mean).exp();
            let mut prod = self.next_f64();
            let mut count = 0u64;
            while prod > limit {
                prod *= self.next_f64();
                count += 1;
            }
            count
        } else {
            self.poisson_ptrs(mean)
        }
    }

    // Hörmann's transformed rejection with squeeze (PTRS), valid for mean >= ~10.
    fn poisson_ptrs(&mut self, mean: f64) -> u64 {
        let b = 0.931 + 2.53 * mean.sqrt();
        let a = -0.059 + 0.024_83 * b;
        let inv_alpha = 1.123_9 + 1.132_8 / (b - 3.4);
        let v_r = 0.927_7 - 3.623_4 / (b - 2.0);
        let ln_mean = mean.ln();
        loop {
            let mut v = self.next_f64();
            let mut u;
            if v <= 0.86 * v_r {
                u = v / v_r - 0.43;
                return ((2.0 * a / (0.5 - u.abs()) + b) * u + mean + 0.445) as u64;
            }
            if v >= v_r {
                u = self.next_f64() - 0.5;
            } else {
                u = v / v_r - 0.93;
                u = u.signum() * 0.5 - u;
                v = self.next_f64() * v_r;
            }
            let us = 0.5 - u.abs();
            if us < 0.013 && v > us {
                continue;
            }
            let k = ((2.0 * a / us + b) * u + mean + 0.445).floor();
            v *= inv_alpha / (a / (us * us) + b);
            if k >= 10.0
                && v.ln() < k * ln_mean - mean - crate::numeric::ln_gamma(k + 1.0)
            {
                return k as u64;
            }
            if (0.0..=9.0).contains(&k) {
                let ln_fact = crate::numeric::ln_gamma(k + 1.0);
                if v.ln() < k * ln_mean - mean - ln_fact {
                    return k as u64;
                }
            }
        }
    }
}
