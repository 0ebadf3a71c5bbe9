//! One-axis-twist squeezing propagators and the two-step echo protocol.
//!
//! The squeezing propagator exp(-i mu S_z^2) is diagonal in the Dicke basis,
//! so single-group and joint applications are pure phase maps. The echo
//! (squeeze the joint control+target system, then unsqueeze the target alone)
//! net-applies exp(-i 2 mu S_z S~_z) exp(-i mu S~_z^2), which conditions the
//! target azimuth on the control projection: a control eigenstate |m> steers
//! a target coherent state from (theta, phi) to (theta, phi + 2 m mu) with an
//! overall branch phase exp(-i mu m (N + m)).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{
    rotate_in_place, BlochDirection, CollectiveSpinState, RotationSpec, NORM_TOL,
};

/// Direction of the squeezing Hamiltonian: `Squeeze` applies
/// exp(-i mu S_z^2), `Unsqueeze` the inverse exp(+i mu S_z^2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqueezeSign {
    Squeeze,
    Unsqueeze,
}

impl SqueezeSign {
    fn factor(&self) -> f64 {
        match self {
            SqueezeSign::Squeeze => 1.0,
            SqueezeSign::Unsqueeze => -1.0,
        }
    }
}

/// Squeezing parameter mu (the product of squeezing strength and duration)
/// plus the direction of the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingSpec {
    pub mu: f64,
    pub sign: SqueezeSign,
}

impl SqueezingSpec {
    pub fn squeeze(mu: f64) -> Self {
        Self {
            mu,
            sign: SqueezeSign::Squeeze,
        }
    }

    pub fn unsqueeze(mu: f64) -> Self {
        Self {
            mu,
            sign: SqueezeSign::Unsqueeze,
        }
    }

    fn signed_mu(&self) -> f64 {
        self.sign.factor() * self.mu
    }
}

/// Applies exp(-/+ i mu S_z^2) to one group: c_m -> exp(-i mu m^2) c_m.
pub fn apply_oats(state: &CollectiveSpinState, spec: &SqueezingSpec) -> CollectiveSpinState {
    let mu = spec.signed_mu();
    let amplitudes = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let m = state.m_at(k);
            c * Complex64::cis(-mu * m * m)
        })
        .collect();
    CollectiveSpinState::from_amplitudes_unnormalized(state.atom_count(), amplitudes)
        .expect("length unchanged")
}

#[derive(Serialize, Deserialize)]
struct BipartiteWire {
    n_control: usize,
    n_target: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// Joint state of the control and target groups: an (N'+1) x (N+1) amplitude
/// matrix over the S~_z (x) S_z eigenbasis, both indices ascending in m,
/// stored row-major with the control projection as the row index.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "BipartiteWire", into = "BipartiteWire")]
pub struct BipartiteState {
    control_count: usize,
    target_count: usize,
    amplitudes: Vec<Complex64>,
}

impl TryFrom<BipartiteWire> for BipartiteState {
    type Error = Error;

    fn try_from(wire: BipartiteWire) -> Result<Self> {
        let expected = (wire.n_control + 1) * (wire.n_target + 1);
        if wire.amplitudes.len() != expected {
            return Err(Error::AmplitudeLength {
                expected,
                got: wire.amplitudes.len(),
            });
        }
        Ok(BipartiteState {
            control_count: wire.n_control,
            target_count: wire.n_target,
            amplitudes: wire
                .amplitudes
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect(),
        })
    }
}

impl From<BipartiteState> for BipartiteWire {
    fn from(state: BipartiteState) -> Self {
        BipartiteWire {
            n_control: state.control_count,
            n_target: state.target_count,
            amplitudes: state.amplitudes.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl BipartiteState {
    /// Unentangled product of a control and a target state.
    pub fn from_product(control: &CollectiveSpinState, target: &CollectiveSpinState) -> Self {
        let mut amplitudes =
            Vec::with_capacity((control.atom_count() + 1) * (target.atom_count() + 1));
        for cm in control.amplitudes() {
            for tm in target.amplitudes() {
                amplitudes.push(cm * tm);
            }
        }
        Self {
            control_count: control.atom_count(),
            target_count: target.atom_count(),
            amplitudes,
        }
    }

    pub fn from_amplitudes(
        control_count: usize,
        target_count: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        let expected = (control_count + 1) * (target_count + 1);
        if amplitudes.len() != expected {
            return Err(Error::AmplitudeLength {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            control_count,
            target_count,
            amplitudes,
        })
    }

    pub fn control_count(&self) -> usize {
        self.control_count
    }

    pub fn target_count(&self) -> usize {
        self.target_count
    }

    pub fn control_dim(&self) -> usize {
        self.control_count + 1
    }

    pub fn target_dim(&self) -> usize {
        self.target_count + 1
    }

    /// Row-major amplitude storage.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amp(&self, row: usize, col: usize) -> Complex64 {
        self.amplitudes[row * self.target_dim() + col]
    }

    /// 2 m~ of a control row.
    pub fn control_two_m(&self, row: usize) -> i64 {
        2 * row as i64 - self.control_count as i64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Probability of finding the control group in the row's S~_z eigenstate.
    pub fn branch_weight(&self, row: usize) -> f64 {
        let td = self.target_dim();
        self.amplitudes[row * td..(row + 1) * td]
            .iter()
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// Weight plus the renormalized conditional target state for a control
    /// row; the state is `None` when the branch weight is numerically zero.
    pub fn conditional_target(&self, row: usize) -> Result<(f64, Option<CollectiveSpinState>)> {
        if row >= self.control_dim() {
            return Err(Error::RowOutOfRange {
                row,
                control_count: self.control_count,
            });
        }
        let weight = self.branch_weight(row);
        if weight < 1e-300 {
            return Ok((weight, None));
        }
        let td = self.target_dim();
        let scale = weight.sqrt();
        let amplitudes = self.amplitudes[row * td..(row + 1) * td]
            .iter()
            .map(|c| c / scale)
            .collect();
        let state = CollectiveSpinState::from_amplitudes_unnormalized(self.target_count, amplitudes)?;
        Ok((weight, Some(state)))
    }

    /// Purity tr(rho^2) of the normalized control marginal; 1 for a product
    /// state (Schmidt rank 1).
    pub fn control_purity(&self) -> f64 {
        let cd = self.control_dim();
        let td = self.target_dim();
        // rho = A A^dagger over control indices
        let mut rho = vec![Complex64::new(0.0, 0.0); cd * cd];
        for r in 0..cd {
            for s in 0..cd {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..td {
                    acc += self.amplitudes[r * td + c] * self.amplitudes[s * td + c].conj();
                }
                rho[r * cd + s] = acc;
            }
        }
        let trace: f64 = (0..cd).map(|r| rho[r * cd + r].re).sum();
        let frob_sq: f64 = rho.iter().map(|c| c.norm_sqr()).sum();
        frob_sq / (trace * trace)
    }

    /// Rotates the target factor: every control row is acted on by
    /// exp(-i angle S_axis) of the target group.
    pub fn rotate_target(&self, rotation: &RotationSpec) -> Self {
        let td = self.target_dim();
        let mut amplitudes = self.amplitudes.clone();
        for row in amplitudes.chunks_mut(td) {
            rotate_in_place(self.target_count, row, rotation);
        }
        Self {
            control_count: self.control_count,
            target_count: self.target_count,
            amplitudes,
        }
    }
}

/// Joint squeeze exp(-/+ i mu (S_z + S~_z)^2): pure phases
/// exp(-i mu (m~ + m)^2).
pub fn apply_joint_oats(state: &BipartiteState, spec: &SqueezingSpec) -> BipartiteState {
    let mu = spec.signed_mu();
    map_phases(state, |two_mc, two_mt| {
        let total = (two_mc + two_mt) as f64 / 2.0;
        -mu * total * total
    })
}

/// Target-only squeeze exp(-/+ i mu S_z^2): phases exp(-i mu m^2) on the
/// target index.
pub fn apply_target_oats(state: &BipartiteState, spec: &SqueezingSpec) -> BipartiteState {
    let mu = spec.signed_mu();
    map_phases(state, |_, two_mt| {
        let m = two_mt as f64 / 2.0;
        -mu * m * m
    })
}

fn map_phases(state: &BipartiteState, phase: impl Fn(i64, i64) -> f64) -> BipartiteState {
    let nc = state.control_count() as i64;
    let nt = state.target_count() as i64;
    let td = state.target_dim();
    let amplitudes = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let two_mc = 2 * (idx / td) as i64 - nc;
            let two_mt = 2 * (idx % td) as i64 - nt;
            c * Complex64::cis(phase(two_mc, two_mt))
        })
        .collect();
    BipartiteState {
        control_count: state.control_count,
        target_count: state.target_count,
        amplitudes,
    }
}

/// Two-step echo: form the product state, squeeze the joint system with `mu`,
/// then unsqueeze the target group alone.
pub fn echo_protocol(
    control: &CollectiveSpinState,
    target: &CollectiveSpinState,
    mu: f64,
) -> BipartiteState {
    let joint = BipartiteState::from_product(control, target);
    let squeezed = apply_joint_oats(&joint, &SqueezingSpec::squeeze(mu));
    apply_target_oats(&squeezed, &SqueezingSpec::unsqueeze(mu))
}

/// Closed form of the echo output for a coherent target: each control branch
/// m~ carries the phase exp(-i mu m~ (N + m~)) and a target coherent state
/// with azimuth advanced by 2 m~ mu.
pub fn closed_form_final(
    control: &CollectiveSpinState,
    target_dir: BlochDirection,
    target_count: usize,
    mu: f64,
) -> BipartiteState {
    let n = target_count as f64;
    let td = target_count + 1;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); (control.atom_count() + 1) * td];
    for (row, cm) in control.amplitudes().iter().enumerate() {
        let m = control.m_at(row);
        let branch_phase = Complex64::cis(-mu * m * (n + m));
        let shifted = BlochDirection::new(target_dir.theta(), target_dir.phi() + 2.0 * m * mu)
            .expect("theta unchanged");
        let branch = CollectiveSpinState::coherent(target_count, shifted);
        for (col, t) in branch.amplitudes().iter().enumerate() {
            amplitudes[row * td + col] = cm * branch_phase * t;
        }
    }
    BipartiteState {
        control_count: control.atom_count(),
        target_count,
        amplitudes,
    }
}
