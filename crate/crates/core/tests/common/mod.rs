#![allow(dead_code)]

use hingekit_core::chain::{Chain, Configuration};
use hingekit_core::geometry::{Axis, Frame, Isometry};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vector(rng: &mut ChaCha8Rng, d: usize, r: f64) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.random_range(-r..r))
}

pub fn axis(rng: &mut ChaCha8Rng, d: usize) -> Axis {
    let origin = vector(rng, d, 2.0);
    Axis::new(origin, (0..d - 2).map(|_| vector(rng, d, 1.0)).collect()).unwrap()
}

pub fn axes(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<Axis> {
    (0..n).map(|_| axis(rng, d)).collect()
}

pub fn frame(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Frame {
    Frame::new(vector(rng, d, 2.0), (0..k).map(|_| vector(rng, d, 1.0)).collect()).unwrap()
}

/// Open chain of `n` bodies with a random `k`-frame.
pub fn chain(rng: &mut ChaCha8Rng, d: usize, n: usize, k: usize) -> Chain {
    Chain::open(axes(rng, d, n - 1), frame(rng, d, k)).unwrap()
}

pub fn angles(rng: &mut ChaCha8Rng, len: usize) -> Configuration {
    Configuration::new((0..len).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect())
}

/// A random proper rigid motion.
pub fn isometry(rng: &mut ChaCha8Rng, d: usize) -> Isometry {
    let m = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let mut q = m.qr().q();
    if q.determinant() < 0.0 {
        let c = -q.column(0);
        q.set_column(0, &c);
    }
    Isometry::new(q, vector(rng, d, 3.0)).unwrap()
}
