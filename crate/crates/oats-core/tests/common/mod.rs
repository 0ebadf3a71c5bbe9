#![allow(dead_code)] // shared between test targets; each uses a subset

use num_complex::Complex64;
use oats_core::echo::BipartiteState;
use oats_core::spin::CollectiveSpinState;
use rand::Rng;

pub fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn random_state(atom_count: usize, rng: &mut impl Rng) -> CollectiveSpinState {
    let mut amplitudes: Vec<Complex64> = (0..=atom_count)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut amplitudes {
        *c /= norm;
    }
    CollectiveSpinState::from_amplitudes_unnormalized(atom_count, amplitudes).unwrap()
}

pub fn random_bipartite(
    control_count: usize,
    target_count: usize,
    rng: &mut impl Rng,
) -> BipartiteState {
    let len = (control_count + 1) * (target_count + 1);
    let mut amplitudes: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut amplitudes {
        *c /= norm;
    }
    BipartiteState::from_amplitudes(control_count, target_count, amplitudes).unwrap()
}
