//! Dicke-subspace representation of an N-atom collective spin.
//!
//! All states live in the maximal-spin symmetric subspace, spanned by the
//! N+1 eigenstates |m> of the collective S_z with m = -N/2 .. +N/2.
//! Amplitudes are stored in ascending-m order throughout the crate; index k
//! corresponds to m = k - N/2 (integer m for even N, half-integer for odd N).
//!
//! Rotations use the convention U = exp(-i * angle * S_axis). Under it a
//! z-rotation by phi advances the azimuth of a coherent spin state by +phi,
//! and a +pi/2 pulse around y maps the all-up state onto the +x direction.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance: a state is accepted as normalized when
/// | sum |c_m|^2 - 1 | stays below this.
pub const NORM_TOL: f64 = 1e-12;

/// Point on the Bloch sphere: polar angle theta in [0, pi], azimuth phi
/// reduced into [0, 2*pi) on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochDirection {
    theta: f64,
    phi: f64,
}

impl BlochDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::ThetaOutOfRange { theta });
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit vector (x, y, z).
    pub fn unit_vector(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }

    /// Central angle between two directions, in [0, pi].
    pub fn angle_to(&self, other: &BlochDirection) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        dot.clamp(-1.0, 1.0).acos()
    }
}

/// Rotation axis for collective pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A collective rotation exp(-i * angle * S_axis). The angle is reduced
/// modulo 4*pi when applied (spinor periodicity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    pub axis: Axis,
    pub angle: f64,
}

impl RotationSpec {
    pub fn new(axis: Axis, angle: f64) -> Self {
        Self { axis, angle }
    }

    fn effective_angle(&self) -> f64 {
        self.angle.rem_euclid(4.0 * PI)
    }
}

#[derive(Serialize, Deserialize)]
struct SpinStateWire {
    n_atoms: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// State of one atom group in the symmetric subspace: N+1 complex amplitudes
/// over the S_z eigenbasis, ascending in m.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SpinStateWire", into = "SpinStateWire")]
pub struct CollectiveSpinState {
    atom_count: usize,
    amplitudes: Vec<Complex64>,
}

impl TryFrom<SpinStateWire> for CollectiveSpinState {
    type Error = Error;

    fn try_from(wire: SpinStateWire) -> Result<Self> {
        let amplitudes = wire
            .amplitudes
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        CollectiveSpinState::from_amplitudes_unnormalized(wire.n_atoms, amplitudes)
    }
}

impl From<CollectiveSpinState> for SpinStateWire {
    fn from(state: CollectiveSpinState) -> Self {
        SpinStateWire {
            n_atoms: state.atom_count,
            amplitudes: state.amplitudes.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl CollectiveSpinState {
    /// Builds a state that is required to be normalized.
    pub fn from_amplitudes(atom_count: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::from_amplitudes_unnormalized(atom_count, amplitudes)?;
        let n2 = state.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr: n2 });
        }
        Ok(state)
    }

    /// Builds a state without the normalization check; use for explicitly
    /// un-normalized intermediates (conditional branches, term sums).
    pub fn from_amplitudes_unnormalized(
        atom_count: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        if amplitudes.len() != atom_count + 1 {
            return Err(Error::AmplitudeLength {
                expected: atom_count + 1,
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            atom_count,
            amplitudes,
        })
    }

    /// S_z eigenstate |m>, addressed by 2m (integer-exact for both parities).
    pub fn basis_state(atom_count: usize, two_m: i64) -> Result<Self> {
        let n = atom_count as i64;
        if two_m.abs() > n || (two_m + n) % 2 != 0 {
            return Err(Error::InvalidProjection { atom_count, two_m });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); atom_count + 1];
        amplitudes[((two_m + n) / 2) as usize] = Complex64::new(1.0, 0.0);
        Ok(Self {
            atom_count,
            amplitudes,
        })
    }

    /// All atoms up: |m = +N/2>.
    pub fn all_up(atom_count: usize) -> Self {
        Self::basis_state(atom_count, atom_count as i64).expect("top projection always valid")
    }

    /// All atoms down: |m = -N/2>.
    pub fn all_down(atom_count: usize) -> Self {
        Self::basis_state(atom_count, -(atom_count as i64)).expect("bottom projection always valid")
    }

    /// Polar cat state (|all-up> + |all-down>) / sqrt(2).
    pub fn polar_cat(atom_count: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); atom_count + 1];
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amplitudes[0] = w;
        amplitudes[atom_count] = w;
        Self {
            atom_count,
            amplitudes,
        }
    }

    /// Coherent spin state |theta, phi>: every atom in
    /// cos(theta/2)|up> + e^(i phi) sin(theta/2)|down>, expanded over the
    /// symmetric subspace as
    /// c_m = sqrt(C(N, N/2 - m)) cos(theta/2)^(N/2+m) (e^(i phi) sin(theta/2))^(N/2-m).
    pub fn coherent(atom_count: usize, direction: BlochDirection) -> Self {
        let n = atom_count;
        let cos_half = (direction.theta() / 2.0).cos();
        let sin_half = (direction.theta() / 2.0).sin();
        let down = Complex64::cis(direction.phi()) * sin_half;

        let mut amplitudes = Vec::with_capacity(n + 1);
        // k ups, N-k downs; m = k - N/2
        for k in 0..=n {
            let amp = Complex64::new(binomial(n, k).sqrt() * cos_half.powi(k as i32), 0.0)
                * pow_complex(down, n - k);
            amplitudes.push(amp);
        }
        Self {
            atom_count: n,
            amplitudes,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn dim(&self) -> usize {
        self.atom_count + 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// 2m for amplitude index k.
    pub fn two_m_at(&self, index: usize) -> i64 {
        2 * index as i64 - self.atom_count as i64
    }

    /// m as a float (exact: halves are representable).
    pub fn m_at(&self, index: usize) -> f64 {
        self.two_m_at(index) as f64 / 2.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Rescales to unit norm. Errors on a zero state.
    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNormState);
        }
        for c in &mut self.amplitudes {
            *c /= norm;
        }
        Ok(())
    }

    /// <S_z> = sum m |c_m|^2.
    pub fn expect_sz(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, c)| self.m_at(k) * c.norm_sqr())
            .sum()
    }

    /// <S_z^2>.
    pub fn expect_sz_sq(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let m = self.m_at(k);
                m * m * c.norm_sqr()
            })
            .sum()
    }

    /// Mean spin vector (<S_x>, <S_y>, <S_z>).
    pub fn mean_spin(&self) -> [f64; 3] {
        let j = self.atom_count as f64 / 2.0;
        // <S_+> = sum conj(c_{m+1}) sqrt(j(j+1) - m(m+1)) c_m
        let mut s_plus = Complex64::new(0.0, 0.0);
        for k in 0..self.atom_count {
            let m = self.m_at(k);
            let coupling = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            s_plus += self.amplitudes[k + 1].conj() * coupling * self.amplitudes[k];
        }
        [s_plus.re, s_plus.im, self.expect_sz()]
    }
}

/// <a|b> = sum conj(a_m) b_m; errors on mismatched atom counts.
pub fn inner(a: &CollectiveSpinState, b: &CollectiveSpinState) -> Result<Complex64> {
    if a.atom_count != b.atom_count {
        return Err(Error::AtomCountMismatch {
            left: a.atom_count,
            right: b.atom_count,
        });
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// |<a|b>|^2 with both states renormalized; 0 when either has zero norm.
pub fn fidelity(a: &CollectiveSpinState, b: &CollectiveSpinState) -> Result<f64> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(inner(a, b)?.norm_sqr() / (na * nb))
}

/// Applies exp(-i * angle * S_axis) exactly in the N+1 dimensional subspace.
///
/// z rotations are diagonal phases; x uses the cached eigendecomposition of
/// the tridiagonal S_x; y is conjugated through z rotations via
/// exp(-i a S_y) = exp(-i (pi/2) S_z) exp(-i a S_x) exp(+i (pi/2) S_z).
pub fn rotate(state: &CollectiveSpinState, rotation: &RotationSpec) -> CollectiveSpinState {
    let mut amplitudes = state.amplitudes.clone();
    rotate_in_place(state.atom_count, &mut amplitudes, rotation);
    CollectiveSpinState {
        atom_count: state.atom_count,
        amplitudes,
    }
}

pub(crate) fn rotate_in_place(
    atom_count: usize,
    amplitudes: &mut [Complex64],
    rotation: &RotationSpec,
) {
    let angle = rotation.effective_angle();
    match rotation.axis {
        Axis::Z => rotate_z_in_place(atom_count, amplitudes, angle),
        Axis::X => rotate_x_in_place(atom_count, amplitudes, angle),
        Axis::Y => {
            rotate_z_in_place(atom_count, amplitudes, -PI / 2.0);
            rotate_x_in_place(atom_count, amplitudes, angle);
            rotate_z_in_place(atom_count, amplitudes, PI / 2.0);
        }
    }
}

fn rotate_z_in_place(atom_count: usize, amplitudes: &mut [Complex64], angle: f64) {
    let n = atom_count as i64;
    for (k, c) in amplitudes.iter_mut().enumerate() {
        let m = (2 * k as i64 - n) as f64 / 2.0;
        *c *= Complex64::cis(-angle * m);
    }
}

fn rotate_x_in_place(atom_count: usize, amplitudes: &mut [Complex64], angle: f64) {
    let eigen = sx_eigen(atom_count);
    let dim = atom_count + 1;
    // w = V^T c
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    for (j, wj) in w.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in amplitudes.iter().enumerate() {
            acc += c.scale(eigen.vectors[(k, j)]);
        }
        *wj = acc;
    }
    // w_j *= exp(-i angle m_j), eigenvalues snapped to the exact grid
    for (j, wj) in w.iter_mut().enumerate() {
        *wj *= Complex64::cis(-angle * eigen.values[j]);
    }
    // c' = V w
    for (k, c) in amplitudes.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            acc += wj.scale(eigen.vectors[(k, j)]);
        }
        *c = acc;
    }
}

struct SxEigen {
    /// Orthonormal eigenvectors of S_x, column j for eigenvalue `values[j]`.
    vectors: DMatrix<f64>,
    /// Eigenvalues snapped to the exact grid -N/2 .. +N/2.
    values: Vec<f64>,
}

static SX_EIGEN_CACHE: OnceLock<Mutex<HashMap<usize, Arc<SxEigen>>>> = OnceLock::new();

/// Eigendecomposition of S_x for N atoms, built once per N and shared
/// read-only afterwards.
fn sx_eigen(atom_count: usize) -> Arc<SxEigen> {
    let cache = SX_EIGEN_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("S_x cache poisoned");
    map.entry(atom_count)
        .or_insert_with(|| Arc::new(build_sx_eigen(atom_count)))
        .clone()
}

fn build_sx_eigen(atom_count: usize) -> SxEigen {
    let dim = atom_count + 1;
    let j = atom_count as f64 / 2.0;
    let mut sx = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..atom_count {
        let m = k as f64 - j;
        // <m+1| S_x |m> = sqrt(j(j+1) - m(m+1)) / 2
        let coupling = 0.5 * (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        sx[(k + 1, k)] = coupling;
        sx[(k, k + 1)] = coupling;
    }
    let eigen = SymmetricEigen::new(sx);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .expect("eigenvalues are finite")
    });

    let mut vectors = DMatrix::<f64>::zeros(dim, dim);
    let mut values = Vec::with_capacity(dim);
    for (slot, &col) in order.iter().enumerate() {
        let exact = slot as f64 - j;
        debug_assert!(
            (eigen.eigenvalues[col] - exact).abs() < 1e-8,
            "S_x spectrum must be the exact grid"
        );
        values.push(exact);
        for row in 0..dim {
            vectors[(row, slot)] = eigen.eigenvectors[(row, col)];
        }
    }
    SxEigen { vectors, values }
}

/// Largest deviation between `a` and `b` after aligning the global phase,
/// extracted from the largest-magnitude amplitude of `a`.
pub fn phase_aligned_max_deviation(a: &CollectiveSpinState, b: &CollectiveSpinState) -> f64 {
    phase_aligned_deviation_slices(&a.amplitudes, &b.amplitudes)
}

pub(crate) fn phase_aligned_deviation_slices(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "comparing states of different dimension");
    let anchor = (0..a.len())
        .max_by(|&i, &j| a[i].norm_sqr().partial_cmp(&a[j].norm_sqr()).unwrap())
        .unwrap_or(0);
    let phase = if a[anchor].norm() > 0.0 && b[anchor].norm() > 0.0 {
        let ratio = b[anchor] / a[anchor];
        ratio / ratio.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

/// Binomial coefficient C(n, k) as f64, by the multiplicative recurrence.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    let kk = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..kk {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn pow_complex(base: Complex64, exp: usize) -> Complex64 {
    // exp is small (<= N); repeated multiplication keeps 0^0 = 1 exact
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..exp {
        acc *= base;
    }
    acc
}
