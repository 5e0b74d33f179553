use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ChaCha8 stream keyed by a 64-bit seed. Output is bit-identical across
/// runs and platforms.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for repetition `rep` of sweep point `point`.
    pub fn for_task(master: u64, point: u64, rep: u64) -> Self {
        Self::new(derive_seed(master, point, rep))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed `hash(master, point, rep)`.
pub fn derive_seed(master: u64, point: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ point) ^ rep.rotate_left(32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn stream_is_pinned() {
        // Frozen first outputs; a change here breaks reproducibility of published runs.
        let mut r = SeededRng::new(42);
        assert_eq!(r.next_u64(), 12578764544318200737);
        assert_eq!(r.next_u64(), 17529487244874322312);
        assert_eq!(derive_seed(42, 0, 0), 7138415436909018950);
        assert_ne!(SeededRng::new(43).next_u64(), 12578764544318200737);
    }

    #[test]
    fn task_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for point in 0..20 {
            for rep in 0..200 {
                assert!(seen.insert(derive_seed(7, point, rep)));
            }
        }
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut r = SeededRng::new(1);
        let mut sum = 0.0;
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        assert!((sum / 10_000.0 - 0.5).abs() < 0.02);
    }
}
