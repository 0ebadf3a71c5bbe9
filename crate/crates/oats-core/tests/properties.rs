//! Property tests for the invariants the engine is contractually expected to
//! uphold: the coherent-state overlap law, rotation group structure, phase
//! invariances of the Husimi map, and the exact periodicity of the Gauss-sum
//! terms.

mod common;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use oats_core::decomposition::{build_decomposition, gauss_term, quadratic_gauss_sum, GaussSumQuery};
use oats_core::echo::{apply_oats, SqueezingSpec};
use oats_core::husimi::{husimi_grid, QNormalization};
use oats_core::spin::{
    inner, phase_aligned_max_deviation, rotate, Axis, BlochDirection, CollectiveSpinState,
    RotationSpec,
};

fn direction_strategy() -> impl Strategy<Value = (f64, f64)> {
    (0.0..=PI, 0.0..TAU)
}

fn axis_strategy() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

/// Rotates a unit vector around `axis` by `angle` (right-hand rule), matching
/// the Bloch-sphere action of exp(-i angle S_axis).
fn rotate_unit_vector(v: [f64; 3], axis: Axis, angle: f64) -> [f64; 3] {
    let k = match axis {
        Axis::X => [1.0, 0.0, 0.0],
        Axis::Y => [0.0, 1.0, 0.0],
        Axis::Z => [0.0, 0.0, 1.0],
    };
    let (sin, cos) = angle.sin_cos();
    let cross = [
        k[1] * v[2] - k[2] * v[1],
        k[2] * v[0] - k[0] * v[2],
        k[0] * v[1] - k[1] * v[0],
    ];
    let dot: f64 = k.iter().zip(&v).map(|(a, b)| a * b).sum();
    [
        v[0] * cos + cross[0] * sin + k[0] * dot * (1.0 - cos),
        v[1] * cos + cross[1] * sin + k[1] * dot * (1.0 - cos),
        v[2] * cos + cross[2] * sin + k[2] * dot * (1.0 - cos),
    ]
}

fn direction_from_vector(v: [f64; 3]) -> BlochDirection {
    let theta = v[2].clamp(-1.0, 1.0).acos();
    let phi = v[1].atan2(v[0]);
    BlochDirection::new(theta, phi).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// |<css(d1)|css(d2)>| = cos^N(gamma/2) with gamma the Bloch angle.
    #[test]
    fn css_overlap_law(
        n in 1usize..=60,
        d1 in direction_strategy(),
        d2 in direction_strategy(),
    ) {
        let a = BlochDirection::new(d1.0, d1.1).unwrap();
        let b = BlochDirection::new(d2.0, d2.1).unwrap();
        let overlap = inner(
            &CollectiveSpinState::coherent(n, a),
            &CollectiveSpinState::coherent(n, b),
        )
        .unwrap()
        .norm();
        let gamma = a.angle_to(&b);
        let expected = (gamma / 2.0).cos().powi(n as i32);
        prop_assert!((overlap - expected).abs() < 1e-10, "{overlap} vs {expected}");
    }

    /// Same-axis rotations compose additively.
    #[test]
    fn rotation_composition(
        n in 1usize..=25,
        axis in axis_strategy(),
        alpha in -TAU..TAU,
        beta in -TAU..TAU,
        seed in any::<u64>(),
    ) {
        let mut rng: rand::rngs::StdRng = rand::SeedableRng::seed_from_u64(seed);
        let state = common::random_state(n, &mut rng);
        let two_step = rotate(
            &rotate(&state, &RotationSpec::new(axis, alpha)),
            &RotationSpec::new(axis, beta),
        );
        let one_step = rotate(&state, &RotationSpec::new(axis, alpha + beta));
        let dev = common::max_dev(two_step.amplitudes(), one_step.amplitudes());
        prop_assert!(dev < 1e-10, "deviation {dev}");
    }

    /// Rotating a coherent state gives the coherent state of the rotated
    /// direction, up to a global phase.
    #[test]
    fn rotation_maps_css_to_css(
        n in 1usize..=30,
        d in direction_strategy(),
        axis in axis_strategy(),
        angle in -TAU..TAU,
    ) {
        let dir = BlochDirection::new(d.0, d.1).unwrap();
        let rotated = rotate(
            &CollectiveSpinState::coherent(n, dir),
            &RotationSpec::new(axis, angle),
        );
        let expected = CollectiveSpinState::coherent(
            n,
            direction_from_vector(rotate_unit_vector(dir.unit_vector(), axis, angle)),
        );
        let overlap = inner(&expected, &rotated).unwrap().norm();
        prop_assert!(overlap >= 1.0 - 1e-10, "overlap {overlap}");
    }

    /// A full 2*pi turn flips the sign for odd N and is the identity for
    /// even N.
    #[test]
    fn spinor_sign(n in 1usize..=20, seed in any::<u64>()) {
        let mut rng: rand::rngs::StdRng = rand::SeedableRng::seed_from_u64(seed);
        let state = common::random_state(n, &mut rng);
        let turned = rotate(&state, &RotationSpec::new(Axis::Y, TAU));
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let flipped: Vec<Complex64> =
            state.amplitudes().iter().map(|c| c.scale(sign)).collect();
        let dev = common::max_dev(&flipped, turned.amplitudes());
        prop_assert!(dev < 1e-12, "deviation {dev}");
    }

    /// Squeeze then unsqueeze is the identity to machine precision.
    #[test]
    fn oats_inverse(n in 0usize..=40, mu in -10.0..10.0f64, seed in any::<u64>()) {
        let mut rng: rand::rngs::StdRng = rand::SeedableRng::seed_from_u64(seed);
        let state = common::random_state(n, &mut rng);
        let back = apply_oats(
            &apply_oats(&state, &SqueezingSpec::squeeze(mu)),
            &SqueezingSpec::unsqueeze(mu),
        );
        let dev = common::max_dev(state.amplitudes(), back.amplitudes());
        prop_assert!(dev < 1e-14, "deviation {dev}");
    }

    /// The Gauss-sum summand has period n in k, bit-exactly.
    #[test]
    fn gauss_term_period(n in 1u32..=50, offset in -40i64..40) {
        let two_k = 2 * offset + n as i64; // parity of 2k matches n
        let a = gauss_term(n, two_k);
        let b = gauss_term(n, two_k + 2 * n as i64);
        prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
        prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    /// The Gauss sum is independent of the start point among valid ones.
    #[test]
    fn gauss_sum_start_invariance(n in 1u32..=60, shift in -10i64..10) {
        let base = GaussSumQuery::new(n, n as i64 % 2).unwrap();
        let other = GaussSumQuery::new(n, n as i64 % 2 + 2 * shift).unwrap();
        let diff = (quadratic_gauss_sum(&base) - quadratic_gauss_sum(&other)).norm();
        prop_assert!(diff < 1e-12, "difference {diff}");
    }

    /// Decomposition weights all have modulus 1/sqrt(n) and the term count
    /// is n.
    #[test]
    fn decomposition_shape(n in 1u32..=12, atoms in 0usize..=41) {
        let d = build_decomposition(n, atoms);
        prop_assert_eq!(d.terms().len(), n as usize);
        let expected = 1.0 / (n as f64).sqrt();
        for term in d.terms() {
            prop_assert!((term.coefficient.norm() - expected).abs() < 1e-14);
        }
        // l values form a unit-step progression starting at alpha
        let two_alpha = (atoms as i64 + n as i64).rem_euclid(2);
        for (step, term) in d.terms().iter().enumerate() {
            prop_assert_eq!(term.two_l, two_alpha + 2 * step as i64);
        }
        // sum of |coefficient|^2 is 1
        let total: f64 = d.terms().iter().map(|t| t.coefficient.norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    /// The normalized Husimi map ignores the global phase of the state.
    #[test]
    fn husimi_global_phase_invariance(
        n in 1usize..=20,
        phase in 0.0..TAU,
        seed in any::<u64>(),
    ) {
        let mut rng: rand::rngs::StdRng = rand::SeedableRng::seed_from_u64(seed);
        let state = common::random_state(n, &mut rng);
        let shifted = CollectiveSpinState::from_amplitudes_unnormalized(
            n,
            state
                .amplitudes()
                .iter()
                .map(|c| c * Complex64::cis(phase))
                .collect(),
        )
        .unwrap();
        let a = husimi_grid(&state, 19, 24, QNormalization::MaxOne).unwrap();
        let b = husimi_grid(&shifted, 19, 24, QNormalization::MaxOne).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    /// A z-rotation by a whole number of grid steps translates the map in
    /// phi.
    #[test]
    fn husimi_translation_under_z_rotation(
        n in 1usize..=20,
        steps in 1usize..24,
        seed in any::<u64>(),
    ) {
        let n_phi = 24usize;
        let mut rng: rand::rngs::StdRng = rand::SeedableRng::seed_from_u64(seed);
        let state = common::random_state(n, &mut rng);
        let shift = TAU * steps as f64 / n_phi as f64;
        let rotated = rotate(&state, &RotationSpec::new(Axis::Z, shift));
        let a = husimi_grid(&state, 19, n_phi, QNormalization::MaxOne).unwrap();
        let b = husimi_grid(&rotated, 19, n_phi, QNormalization::MaxOne).unwrap();
        for i in 0..a.n_theta() {
            for j in 0..n_phi {
                let translated = (j + steps) % n_phi;
                prop_assert!((a.value(i, j) - b.value(i, translated)).abs() < 1e-9);
            }
        }
    }

    /// State JSON written by serde reads back bit-identically.
    #[test]
    fn state_json_round_trip(n in 0usize..=30, seed in any::<u64>()) {
        let mut rng: rand::rngs::StdRng = rand::SeedableRng::seed_from_u64(seed);
        let state = common::random_state(n, &mut rng);
        let text = serde_json::to_string(&state).unwrap();
        let back: CollectiveSpinState = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.atom_count(), state.atom_count());
        for (a, b) in state.amplitudes().iter().zip(back.amplitudes()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    /// Global-phase comparator never sees a phase it cannot remove.
    #[test]
    fn phase_comparator(n in 0usize..=20, phase in 0.0..TAU, seed in any::<u64>()) {
        let mut rng: rand::rngs::StdRng = rand::SeedableRng::seed_from_u64(seed);
        let state = common::random_state(n, &mut rng);
        let shifted = CollectiveSpinState::from_amplitudes_unnormalized(
            n,
            state
                .amplitudes()
                .iter()
                .map(|c| c * Complex64::cis(phase))
                .collect(),
        )
        .unwrap();
        prop_assert!(phase_aligned_max_deviation(&state, &shifted) < 1e-13);
    }
}
