//! Rotation-sum decomposition of the squeezing propagator at mu = pi/n.
//!
//! For integer n >= 1 the propagator splits into n z-rotations,
//!
//!   exp(-i (pi/n) S_z^2)
//!     = (1/sqrt(n)) e^(-i pi/4) sum_{l = alpha}^{n-1+alpha}
//!         e^(i (pi/n) l^2) exp(-i (2 pi/n) l S_z),
//!
//! with alpha the fractional part of (N+n)/2: zero when N+n is even, 1/2
//! when it is odd. The normalization rests on the quadratic Gauss sum
//! sum_k e^(i (pi/n) k^2) = sqrt(n) e^(i pi/4) over any n consecutive k whose
//! doubled values share the parity of n.
//!
//! Applied to a coherent state, the decomposition exposes the hidden order of
//! the squeezed state: n equally weighted coherent components spread at equal
//! azimuthal spacing 2 pi/n.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::echo::{apply_oats, SqueezingSpec};
use crate::error::{Error, Result};
use crate::phase::{cis_pi_ratio, pairwise_sum};
use crate::spin::{rotate, Axis, BlochDirection, CollectiveSpinState, RotationSpec};

use std::f64::consts::PI;

/// One rotation term of the decomposition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecompositionTerm {
    /// Doubled index value 2l (l runs from alpha to n-1+alpha in unit steps).
    pub two_l: i64,
    /// (1/sqrt(n)) e^(-i pi/4) e^(i (pi/n) l^2).
    pub coefficient: Complex64,
    /// z-rotation angle (2 pi/n) l.
    pub z_angle: f64,
}

impl DecompositionTerm {
    pub fn l(&self) -> f64 {
        self.two_l as f64 / 2.0
    }
}

/// The full term list for exp(-i (pi/n) S_z^2) acting on N atoms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationDecomposition {
    order: u32,
    atom_count: usize,
    /// Doubled fractional part of (N+n)/2: 0 when N+n is even, 1 when odd.
    two_alpha: i64,
    terms: Vec<DecompositionTerm>,
}

/// Start point for a quadratic Gauss sum: n terms beginning at k0, where
/// 2*k0 must share the parity of n.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaussSumQuery {
    order: u32,
    two_k0: i64,
}

impl GaussSumQuery {
    pub fn new(order: u32, two_k0: i64) -> Result<Self> {
        if order == 0 || (two_k0 - order as i64) % 2 != 0 {
            return Err(Error::GaussSumParity { order, two_k0 });
        }
        Ok(Self { order, two_k0 })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn two_k0(&self) -> i64 {
        self.two_k0
    }
}

/// One Gauss-sum term e^(i (pi/n) k^2) addressed by 2k. The phase is reduced
/// in integer arithmetic, so the period-n property holds bit-exactly.
pub fn gauss_term(order: u32, two_k: i64) -> Complex64 {
    // (pi/n) k^2 = pi * (2k)^2 / (4n)
    cis_pi_ratio(two_k * two_k, 4 * order as i64)
}

/// Direct evaluation of sum_{k=k0}^{k0+n-1} e^(i (pi/n) k^2), summed in
/// balanced order. Equals sqrt(n) e^(i pi/4) for every valid start.
pub fn quadratic_gauss_sum(query: &GaussSumQuery) -> Complex64 {
    let n = query.order as i64;
    let terms: Vec<Complex64> = (0..n)
        .map(|step| gauss_term(query.order, query.two_k0 + 2 * step))
        .collect();
    pairwise_sum(&terms)
}

/// Builds the decomposition term list for given order n and atom count N.
pub fn build_decomposition(order: u32, atom_count: usize) -> RotationDecomposition {
    assert!(order >= 1, "decomposition order must be at least 1");
    let n = order as i64;
    let two_alpha = (atom_count as i64 + n).rem_euclid(2);
    let terms = (0..n)
        .map(|step| {
            let two_l = two_alpha + 2 * step;
            // coefficient = (1/sqrt(n)) e^(i pi (l^2/n - 1/4))
            //             = (1/sqrt(n)) e^(i pi ((2l)^2 - n) / (4n))
            let coefficient =
                cis_pi_ratio(two_l * two_l - n, 4 * n).scale(1.0 / (order as f64).sqrt());
            let z_angle = PI * two_l as f64 / n as f64;
            DecompositionTerm {
                two_l,
                coefficient,
                z_angle,
            }
        })
        .collect();
    RotationDecomposition {
        order,
        atom_count,
        two_alpha,
        terms,
    }
}

impl RotationDecomposition {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    /// 0 when N+n is even, 1/2 when odd.
    pub fn alpha(&self) -> f64 {
        self.two_alpha as f64 / 2.0
    }

    pub fn terms(&self) -> &[DecompositionTerm] {
        &self.terms
    }
}

/// Applies the decomposition as the literal weighted sum of z-rotations.
/// Must agree with apply_oats(state, pi/n, squeeze) on every state.
pub fn apply_decomposition(
    state: &CollectiveSpinState,
    decomposition: &RotationDecomposition,
) -> Result<CollectiveSpinState> {
    if decomposition.atom_count != state.atom_count() {
        return Err(Error::DecompositionMismatch {
            expected: decomposition.atom_count,
            got: state.atom_count(),
        });
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); state.dim()];
    for term in &decomposition.terms {
        let rotated = rotate(state, &RotationSpec::new(Axis::Z, term.z_angle));
        for (a, r) in acc.iter_mut().zip(rotated.amplitudes()) {
            *a += term.coefficient * r;
        }
    }
    CollectiveSpinState::from_amplitudes_unnormalized(state.atom_count(), acc)
}

/// One coherent component of a squeezed coherent state.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CssComponent {
    /// Complex weight; modulus 1/sqrt(n) for every component.
    pub weight: Complex64,
    /// Bloch direction of the component.
    pub direction: BlochDirection,
}

const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Decomposes `state` (which must be the mu = pi/n squeezed image of the
/// coherent state at `source`) into its n coherent components. The claim is
/// checked by reconstruction; a residual above 1e-8 rejects the input.
pub fn css_components(
    state: &CollectiveSpinState,
    decomposition: &RotationDecomposition,
    source: BlochDirection,
) -> Result<Vec<CssComponent>> {
    if decomposition.atom_count != state.atom_count() {
        return Err(Error::DecompositionMismatch {
            expected: decomposition.atom_count,
            got: state.atom_count(),
        });
    }
    let n_atoms = state.atom_count();
    let components: Vec<CssComponent> = decomposition
        .terms
        .iter()
        .map(|term| {
            // exp(-i z_angle S_z)|theta,phi> = e^(-i z_angle N/2)|theta, phi + z_angle>
            // weight = coefficient * e^(-i z_angle N/2)
            //        = (1/sqrt(n)) e^(i pi ((2l)^2 - n - 2 l 2N) / (4n))
            let n = decomposition.order as i64;
            let weight = cis_pi_ratio(
                term.two_l * term.two_l - n - 2 * term.two_l * n_atoms as i64,
                4 * n,
            )
            .scale(1.0 / (decomposition.order as f64).sqrt());
            let direction =
                BlochDirection::new(source.theta(), source.phi() + term.z_angle)
                    .expect("theta unchanged");
            CssComponent { weight, direction }
        })
        .collect();

    // reconstruction check
    let mut rebuilt = vec![Complex64::new(0.0, 0.0); state.dim()];
    for component in &components {
        let css = CollectiveSpinState::coherent(n_atoms, component.direction);
        for (r, c) in rebuilt.iter_mut().zip(css.amplitudes()) {
            *r += component.weight * c;
        }
    }
    let residual = rebuilt
        .iter()
        .zip(state.amplitudes())
        .map(|(r, s)| (r - s).norm())
        .fold(0.0, f64::max);
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::ReconstructionResidual {
            residual,
            tolerance: RECONSTRUCTION_TOL,
        });
    }
    Ok(components)
}

/// Worst-case amplitude error of the decomposition against the direct
/// propagator, over `samples` random normalized states.
pub fn max_operator_error(order: u32, atom_count: usize, samples: usize, seed: u64) -> f64 {
    let decomposition = build_decomposition(order, atom_count);
    let spec = SqueezingSpec::squeeze(PI / order as f64);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let state = random_state(atom_count, &mut rng);
        let direct = apply_oats(&state, &spec);
        let summed = apply_decomposition(&state, &decomposition).expect("matching atom count");
        let dev = direct
            .amplitudes()
            .iter()
            .zip(summed.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    worst
}

/// Random normalized state with independent uniform re/im amplitudes.
pub fn random_state(atom_count: usize, rng: &mut impl Rng) -> CollectiveSpinState {
    let mut amplitudes: Vec<Complex64> = (0..=atom_count)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut amplitudes {
        *c /= norm;
    }
    CollectiveSpinState::from_amplitudes_unnormalized(atom_count, amplitudes)
        .expect("constructed with matching length")
}
