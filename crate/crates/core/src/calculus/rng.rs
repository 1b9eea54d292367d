//! Reproducible pseudorandom streams.
//!
//! Every stochastic operation takes an explicit 64-bit seed. Streams are
//! ChaCha8 keyed through `seed_from_u64`, which is specified bit-for-bit and
//! therefore identical across platforms. Independent sub-streams are derived
//! from a base seed and a stream label.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for sub-task `label` of a run seeded with `seed`.
pub fn substream(seed: u64, label: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label);
    rng
}

/// Uniform point in the disk of the given radius around `center`.
pub fn uniform_in_disk(rng: &mut Stream, center: Complex64, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.gen::<f64>();
    center + Complex64::from_polar(r, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| stream(7).gen()).collect();
        let mut s = stream(7);
        let first: u64 = s.gen();
        assert_eq!(a[0], first);
        let mut x = substream(7, 1);
        let mut y = substream(7, 2);
        assert_ne!(x.gen::<u64>(), y.gen::<u64>());
    }

    #[test]
    fn seed_stream_is_pinned() {
        // ChaCha8 with seed_from_u64 is fully specified; pin one draw so a
        // silent algorithm change is caught.
        let mut s = stream(0);
        assert_eq!(s.gen::<u64>(), 13080132717333068652);
        assert!(uniform_in_disk(&mut s, Complex64::new(1.0, 0.0), 0.5).norm() <= 1.5);
    }
}
