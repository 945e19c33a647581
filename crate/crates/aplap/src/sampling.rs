//! Deterministic point sampling used by the norm/operator property checks.
//!
//! Directions come from low-discrepancy constructions (golden-angle circle in
//! 2D, Fibonacci sphere in 3D) so that enlarging a sample set keeps all
//! previous points as a prefix; random magnitudes and generic vectors come
//! from a seeded ChaCha stream for reproducibility.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Golden ratio conjugate, the angular increment of the 2D direction spiral.
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// `count` quasi-uniform unit directions in dimension `dim` (2 or 3).
///
/// The sequence is deterministic and prefix-stable: the first `k` points of
/// `unit_directions(dim, n)` equal `unit_directions(dim, k)` for `k <= n`.
pub fn unit_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    assert!(dim == 2 || dim == 3, "direction sampling supports n=2,3");
    let mut out = Vec::with_capacity(count);
    match dim {
        2 => {
            for k in 0..count {
                let theta = 2.0 * std::f64::consts::PI * ((k as f64) * GOLDEN).fract();
                out.push(vec![theta.cos(), theta.sin()]);
            }
        }
        _ => {
            // Golden-angle azimuth, van der Corput height: uniform on the
            // sphere and prefix-stable (z_k depends only on k).
            for k in 0..count {
                let z = 1.0 - 2.0 * van_der_corput(k as u64 + 1);
                let r = (1.0 - z * z).max(0.0).sqrt();
                let theta = 2.0 * std::f64::consts::PI * ((k as f64) * GOLDEN).fract();
                out.push(vec![r * theta.cos(), r * theta.sin(), z]);
            }
        }
    }
    out
}

/// Radical-inverse (base 2) of `k`, in (0, 1).
fn van_der_corput(mut k: u64) -> f64 {
    let mut v = 0.0;
    let mut base = 0.5;
    while k > 0 {
        v += base * (k & 1) as f64;
        k >>= 1;
        base *= 0.5;
    }
    v
}

/// Seeded random nonzero vectors with log-uniform magnitude in `[mag_lo, mag_hi]`.
pub fn random_vectors(dim: usize, count: usize, mag_lo: f64, mag_hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let (llo, lhi) = (mag_lo.ln(), mag_hi.ln());
    while out.len() < count {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm2(&v);
        if n < 1e-9 {
            continue;
        }
        let mag = (rng.gen_range(llo..lhi)).exp();
        for x in &mut v {
            *x *= mag / n;
        }
        out.push(v);
    }
    out
}

/// Seeded uniform points in the axis-aligned box `[lo, hi]^dim` given per-axis bounds.
pub fn random_points_in_box(lo: &[f64], hi: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            lo.iter()
                .zip(hi.iter())
                .map(|(&a, &b)| rng.gen_range(a..b))
                .collect()
        })
        .collect()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
